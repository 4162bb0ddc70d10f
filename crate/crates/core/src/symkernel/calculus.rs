//! Partial differentiation and simultaneous substitution.

use super::error::{KResult, KernelError};
use super::expr::Expr;
use super::nf::normalize;
use std::collections::BTreeMap;

/// Simultaneous atom substitution map. Keys are atoms; matching happens
/// against the original tree, so replacement results are never re-scanned.
pub type AtomMap = BTreeMap<Expr, Expr>;

/// Build an atom map, normalizing keys and values and rejecting non-atom
/// keys.
pub fn atom_map(pairs: impl IntoIterator<Item = (Expr, Expr)>) -> KResult<AtomMap> {
    let mut out = AtomMap::new();
    for (k, v) in pairs {
        let k = normalize(&k)?;
        if !k.is_atom() {
            return Err(KernelError::NonAtomKey(k.to_string()));
        }
        out.insert(k, normalize(&v)?);
    }
    Ok(out)
}

/// Partial derivative with respect to an atom. Atoms other than the target
/// are treated as independent coordinates; opaque function applications
/// follow the chain rule, with derivatives recorded as bumped atoms.
pub fn diff_partial(e: &Expr, atom: &Expr) -> KResult<Expr> {
    let atom = normalize(atom)?;
    if !atom.is_atom() {
        return Err(KernelError::NonAtomKey(atom.to_string()));
    }
    let e = normalize(e)?;
    let raw = d(&e, &atom)?;
    normalize(&raw)
}

fn d(e: &Expr, a: &Expr) -> KResult<Expr> {
    Ok(match e {
        Expr::Rational(_) => Expr::zero(),
        Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) => {
            if e == a {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Func(fa) => {
            if e == a {
                return Ok(Expr::one());
            }
            let mut terms = Vec::new();
            for (j, arg) in fa.args.iter().enumerate() {
                let darg = d(arg, a)?;
                if darg.is_zero() {
                    continue;
                }
                terms.push(Expr::Func(fa.bump(j)) * darg);
            }
            Expr::sum(terms)
        }
        Expr::Sum(children) => {
            let mut terms = Vec::with_capacity(children.len());
            for c in children {
                terms.push(d(c, a)?);
            }
            Expr::sum(terms)
        }
        Expr::Product(children) => {
            let mut terms = Vec::new();
            for (i, c) in children.iter().enumerate() {
                let dc = d(c, a)?;
                if dc.is_zero() {
                    continue;
                }
                let mut factors = vec![dc];
                for (j, o) in children.iter().enumerate() {
                    if i != j {
                        factors.push(o.clone());
                    }
                }
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        Expr::Power(b, ex) => {
            // Exponents are parameter-rational; differentiating by a
            // parameter they mention would need logarithms, which the
            // expression language does not house.
            if let Expr::Param(name) = a {
                if ex.contains_atom(a) {
                    return Err(KernelError::LogDerivative(name.clone()));
                }
            }
            let db = d(b, a)?;
            if db.is_zero() {
                Expr::zero()
            } else {
                let lowered = Expr::pow((**b).clone(), (**ex).clone() - Expr::one());
                (**ex).clone() * lowered * db
            }
        }
    })
}

/// Simultaneous replacement of atoms. Matching is done on the original tree
/// top-down, so a matched function application is replaced whole before its
/// arguments are considered. The result is normalized.
pub fn substitute(e: &Expr, map: &AtomMap) -> KResult<Expr> {
    if map.is_empty() {
        return normalize(e);
    }
    let e = normalize(e)?;
    let raw = sub(&e, map);
    normalize(&raw)
}

fn sub(e: &Expr, m: &AtomMap) -> Expr {
    if let Some(r) = m.get(e) {
        return r.clone();
    }
    match e {
        Expr::Rational(_) | Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) => e.clone(),
        Expr::Func(fa) => {
            let args = fa.args.iter().map(|a| sub(a, m)).collect();
            Expr::func_deriv(fa.name.clone(), args, fa.deriv.clone())
        }
        Expr::Sum(cs) => Expr::Sum(cs.iter().map(|c| sub(c, m)).collect()),
        Expr::Product(cs) => Expr::Product(cs.iter().map(|c| sub(c, m)).collect()),
        Expr::Power(b, ex) => Expr::pow(sub(b, m), sub(ex, m)),
    }
}
