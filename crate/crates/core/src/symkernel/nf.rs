//! Normal-form engine.
//!
//! Canonical form is an expanded rational-function normal form over the atom
//! set: a sorted sum of terms, each an exact rational coefficient times a
//! sorted product of distinct base powers. Bases are atoms, canonical sums
//! that cannot be expanded (non-positive-integer exponents), or rational
//! constants under symbolic exponents. Negative integer exponents represent
//! denominators, so `a/b` is `a * b^(-1)` in expanded form.
//!
//! Powers of sums with positive integer exponents are always expanded;
//! products distribute over sums; like bases merge by exponent addition.
//! Exponent arithmetic happens in the same normal form, restricted to
//! parameter-rational expressions.

use super::error::{KResult, KernelError};
use super::expr::{Expr, Rat};
use num::{Integer, One, Signed, Zero};
use std::collections::BTreeMap;

/// Product of distinct base powers; factors sorted by (base, exponent).
/// An empty factor list is the unit monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct Mono {
    pub factors: Vec<(Expr, Expr)>,
}

impl Mono {
    pub fn unit() -> Mono {
        Mono { factors: vec![] }
    }

    pub fn single(base: Expr, exp: Expr) -> Mono {
        Mono {
            factors: vec![(base, exp)],
        }
    }
}

/// Normal form: monomial -> nonzero rational coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Nf {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Nf {
    pub fn zero() -> Nf {
        Nf::default()
    }

    pub fn constant(c: Rat) -> Nf {
        let mut nf = Nf::zero();
        if !c.is_zero() {
            nf.terms.insert(Mono::unit(), c);
        }
        nf
    }

    pub fn one() -> Nf {
        Nf::constant(Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mono: Mono, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Single-term normal forms expose their parts.
    pub fn as_single(&self) -> Option<(&Mono, &Rat)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

pub(crate) fn nf_add(a: Nf, b: &Nf) -> Nf {
    let mut out = a;
    for (m, c) in &b.terms {
        out.add_term(m.clone(), c.clone());
    }
    out
}

fn rat_pow(r: &Rat, n: i64) -> KResult<Rat> {
    if n == 0 {
        return Ok(Rat::one());
    }
    if r.is_zero() {
        if n > 0 {
            return Ok(Rat::zero());
        }
        return Err(KernelError::ZeroDenominator);
    }
    let mut base = r.clone();
    let mut n_abs = n.unsigned_abs();
    if n < 0 {
        base = base.recip();
    }
    let mut acc = Rat::one();
    while n_abs > 0 {
        if n_abs & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        n_abs >>= 1;
    }
    Ok(acc)
}

/// gcd of absolute values of rationals: gcd of numerators over lcm of
/// denominators.
fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    let num = a.numer().abs().gcd(&b.numer().abs());
    let den = a.denom().lcm(b.denom());
    Rat::new(num, den)
}

/// Factor the rational content out of a multi-term normal form. With
/// `with_sign`, the sign of the leading coefficient is extracted too (only
/// valid under integer exponents).
fn extract_content(nf: &Nf, with_sign: bool) -> (Rat, Nf) {
    let mut content = Rat::zero();
    for c in nf.terms.values() {
        content = rat_gcd(&content, c);
    }
    if content.is_zero() {
        return (Rat::one(), nf.clone());
    }
    if with_sign {
        if let Some(first) = nf.terms.values().next() {
            if first.is_negative() {
                content = -content;
            }
        }
    }
    let mut out = Nf::zero();
    for (m, c) in &nf.terms {
        out.terms.insert(m.clone(), c / &content);
    }
    (content, out)
}

/// Multiply two monomials. Like bases merge by exponent addition; merged
/// sum bases whose exponent becomes a positive integer are returned as
/// pending expansions, and rational bases reaching integer exponents fold
/// into the returned coefficient multiplier.
fn mul_mono(a: &Mono, b: &Mono) -> KResult<(Mono, Vec<(Expr, u32)>, Rat)> {
    let mut factors: Vec<(Expr, Expr)> = Vec::with_capacity(a.factors.len() + b.factors.len());
    let mut expansions = Vec::new();
    let mut coeff = Rat::one();
    let mut i = 0;
    let mut j = 0;
    let push = |factors: &mut Vec<(Expr, Expr)>,
                    expansions: &mut Vec<(Expr, u32)>,
                    coeff: &mut Rat,
                    base: &Expr,
                    exp: Expr|
     -> KResult<()> {
        if exp.is_zero() {
            return Ok(());
        }
        if let Some(n) = exp.as_integer() {
            match base {
                Expr::Rational(r) => {
                    *coeff *= rat_pow(r, n)?;
                    return Ok(());
                }
                Expr::Sum(_) if n > 0 => {
                    expansions.push((base.clone(), n as u32));
                    return Ok(());
                }
                _ => {}
            }
        }
        factors.push((base.clone(), exp));
        Ok(())
    };
    while i < a.factors.len() && j < b.factors.len() {
        let (ba, ea) = &a.factors[i];
        let (bb, eb) = &b.factors[j];
        match ba.cmp(bb) {
            std::cmp::Ordering::Less => {
                push(&mut factors, &mut expansions, &mut coeff, ba, ea.clone())?;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                push(&mut factors, &mut expansions, &mut coeff, bb, eb.clone())?;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let merged = normalize_exponent(&(ea.clone() + eb.clone()))?;
                push(&mut factors, &mut expansions, &mut coeff, ba, merged)?;
                i += 1;
                j += 1;
            }
        }
    }
    while i < a.factors.len() {
        let (ba, ea) = &a.factors[i];
        push(&mut factors, &mut expansions, &mut coeff, ba, ea.clone())?;
        i += 1;
    }
    while j < b.factors.len() {
        let (bb, eb) = &b.factors[j];
        push(&mut factors, &mut expansions, &mut coeff, bb, eb.clone())?;
        j += 1;
    }
    factors.sort();
    Ok((Mono { factors }, expansions, coeff))
}

pub(crate) fn nf_mul(a: &Nf, b: &Nf) -> KResult<Nf> {
    let mut out = Nf::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let (mono, expansions, cmult) = mul_mono(ma, mb)?;
            let coeff = ca * cb * cmult;
            let mut partial = Nf::zero();
            partial.add_term(mono, coeff);
            for (sum_expr, n) in expansions {
                let base_nf = to_nf(&sum_expr)?;
                let powed = nf_pow_uint(&base_nf, n)?;
                partial = nf_mul(&partial, &powed)?;
            }
            out = nf_add(out, &partial);
        }
    }
    Ok(out)
}

fn nf_pow_uint(base: &Nf, n: u32) -> KResult<Nf> {
    let mut acc = Nf::one();
    let mut sq = base.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = nf_mul(&acc, &sq)?;
        }
        n >>= 1;
        if n > 0 {
            sq = nf_mul(&sq, &sq)?;
        }
    }
    Ok(acc)
}

/// Raise a normal form to a canonical exponent.
fn nf_pow(base: &Nf, exp: &Expr) -> KResult<Nf> {
    if exp.is_zero() {
        return Ok(Nf::one());
    }
    if exp.is_one() {
        return Ok(base.clone());
    }
    if base.is_zero() {
        return match exp.as_rational() {
            Some(r) if r.is_positive() => Ok(Nf::zero()),
            Some(_) => Err(KernelError::ZeroDenominator),
            None => Err(KernelError::ZeroBaseSymbolicExponent),
        };
    }
    if let Some(n) = exp.as_integer() {
        if n > 0 {
            return nf_pow_uint(base, n as u32);
        }
        // Negative integer power: invert a single term directly; sums stay
        // opaque power atoms after content extraction.
        if let Some((mono, coeff)) = base.as_single() {
            let mut out_mono = Mono::unit();
            for (b, e) in &mono.factors {
                let scaled = normalize_exponent(&(e.clone() * Expr::int(n)))?;
                if !scaled.is_zero() {
                    out_mono.factors.push((b.clone(), scaled));
                }
            }
            out_mono.factors.sort();
            let mut out = Nf::zero();
            out.add_term(out_mono, rat_pow(coeff, n)?);
            return Ok(out);
        }
        let (content, primitive) = extract_content(base, true);
        let sum_expr = from_nf(&primitive);
        let mut out = Nf::zero();
        out.add_term(Mono::single(sum_expr, Expr::int(n)), rat_pow(&content, n)?);
        return Ok(out);
    }
    // Non-integer or symbolic exponent: distribute over a single term, keep
    // sums as opaque power atoms with positive content pulled out.
    if let Some((mono, coeff)) = base.as_single() {
        let mut factors: Vec<(Expr, Expr)> = Vec::new();
        if !coeff.is_one() {
            factors.push((Expr::Rational(coeff.clone()), exp.clone()));
        }
        for (b, e) in &mono.factors {
            let scaled = normalize_exponent(&(e.clone() * exp.clone()))?;
            if scaled.is_zero() {
                continue;
            }
            if let (Expr::Rational(r), Some(k)) = (b, scaled.as_integer()) {
                let folded = rat_pow(r, k)?;
                if !folded.is_one() {
                    factors.push((Expr::Rational(folded), Expr::one()));
                }
                continue;
            }
            factors.push((b.clone(), scaled));
        }
        factors.sort();
        // Rational bases reaching exponent 1 fold into the coefficient.
        let mut out_coeff = Rat::one();
        factors.retain(|(b, e)| {
            if let (Expr::Rational(r), true) = (b, e.is_one()) {
                out_coeff *= r;
                false
            } else {
                true
            }
        });
        let mut out = Nf::zero();
        out.add_term(Mono { factors }, out_coeff);
        return Ok(out);
    }
    let (content, primitive) = extract_content(base, false);
    let sum_expr = from_nf(&primitive);
    let mut factors = vec![(sum_expr, exp.clone())];
    if !content.is_one() {
        factors.push((Expr::Rational(content), exp.clone()));
    }
    factors.sort();
    let mut out = Nf::zero();
    out.add_term(Mono { factors }, Rat::one());
    Ok(out)
}

/// Exponents must be parameter-rational: rational constants, parameters,
/// sums/products of those, and powers with integer-constant exponents.
fn validate_param_rational(e: &Expr) -> KResult<()> {
    fn ok(e: &Expr) -> bool {
        match e {
            Expr::Rational(_) | Expr::Param(_) => true,
            Expr::Sum(cs) | Expr::Product(cs) => cs.iter().all(ok),
            Expr::Power(b, ex) => ok(b) && matches!(ex.as_integer(), Some(_)),
            _ => false,
        }
    }
    if ok(e) {
        Ok(())
    } else {
        Err(KernelError::InvalidExponent(e.to_string()))
    }
}

pub(crate) fn normalize_exponent(e: &Expr) -> KResult<Expr> {
    let n = normalize(e)?;
    validate_param_rational(&n)?;
    Ok(n)
}

pub(crate) fn to_nf(e: &Expr) -> KResult<Nf> {
    match e {
        Expr::Rational(r) => Ok(Nf::constant(r.clone())),
        Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) => {
            let mut nf = Nf::zero();
            nf.add_term(Mono::single(e.clone(), Expr::one()), Rat::one());
            Ok(nf)
        }
        Expr::Func(fa) => {
            let mut args = Vec::with_capacity(fa.args.len());
            for a in &fa.args {
                args.push(normalize(a)?);
            }
            let atom = Expr::func_deriv(fa.name.clone(), args, fa.deriv.clone());
            let mut nf = Nf::zero();
            nf.add_term(Mono::single(atom, Expr::one()), Rat::one());
            Ok(nf)
        }
        Expr::Sum(children) => {
            let mut out = Nf::zero();
            for c in children {
                out = nf_add(out, &to_nf(c)?);
            }
            Ok(out)
        }
        Expr::Product(children) => product_to_nf(children),
        Expr::Power(b, e) => {
            let en = normalize_exponent(e)?;
            let bn = to_nf(b)?;
            nf_pow(&bn, &en)
        }
    }
}

/// Product normalization. Powers sharing a canonical sum base merge their
/// exponents before any expansion, so `(u+v)^2 * (u+v)^(-1)` reduces to
/// `u + v` instead of leaving an opaque denominator atom.
fn product_to_nf(children: &[Expr]) -> KResult<Nf> {
    fn flatten<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
        if let Expr::Product(cs) = e {
            for c in cs {
                flatten(c, out);
            }
        } else {
            out.push(e);
        }
    }
    let mut flat = Vec::new();
    for c in children {
        flatten(c, &mut flat);
    }
    let mut acc = Nf::one();
    let mut sum_powers: BTreeMap<Expr, Expr> = BTreeMap::new();
    for child in flat {
        match child {
            Expr::Power(b, e) => {
                let bn = normalize(b)?;
                if matches!(bn, Expr::Sum(_)) {
                    let en = normalize_exponent(e)?;
                    let slot = sum_powers.entry(bn).or_insert_with(Expr::zero);
                    *slot = slot.clone() + en;
                } else {
                    let en = normalize_exponent(e)?;
                    acc = nf_mul(&acc, &nf_pow(&to_nf(&bn)?, &en)?)?;
                }
            }
            Expr::Sum(_) => {
                let bn = normalize(child)?;
                if matches!(bn, Expr::Sum(_)) {
                    let slot = sum_powers.entry(bn).or_insert_with(Expr::zero);
                    *slot = slot.clone() + Expr::one();
                } else {
                    acc = nf_mul(&acc, &to_nf(&bn)?)?;
                }
            }
            _ => acc = nf_mul(&acc, &to_nf(child)?)?,
        }
    }
    for (base, exp_raw) in sum_powers {
        let en = normalize_exponent(&exp_raw)?;
        let p = nf_pow(&to_nf(&base)?, &en)?;
        acc = nf_mul(&acc, &p)?;
    }
    Ok(acc)
}

fn term_expr(mono: &Mono, coeff: &Rat) -> Expr {
    let mut children: Vec<Expr> = Vec::with_capacity(mono.factors.len() + 1);
    for (b, e) in &mono.factors {
        if e.is_one() {
            children.push(b.clone());
        } else {
            children.push(Expr::pow(b.clone(), e.clone()));
        }
    }
    if children.is_empty() {
        return Expr::Rational(coeff.clone());
    }
    if !coeff.is_one() {
        children.insert(0, Expr::Rational(coeff.clone()));
    }
    Expr::product(children)
}

pub(crate) fn from_nf(nf: &Nf) -> Expr {
    if nf.terms.is_empty() {
        return Expr::zero();
    }
    let terms: Vec<Expr> = nf.terms.iter().map(|(m, c)| term_expr(m, c)).collect();
    Expr::sum(terms)
}

/// Canonical form. Idempotent; preserves value as a rational function over
/// the atom set.
pub fn normalize(e: &Expr) -> KResult<Expr> {
    Ok(from_nf(&to_nf(e)?))
}

/// True iff `a - b` normalizes to zero.
pub fn equal_canonical(a: &Expr, b: &Expr) -> KResult<bool> {
    let diff = to_nf(&(a.clone() - b.clone()))?;
    Ok(diff.is_zero())
}

/// Multiply away every negative integer base power, returning the cleared
/// expression and the multiplier applied.
pub fn clear_denominators(e: &Expr) -> KResult<(Expr, Expr)> {
    let nf = to_nf(e)?;
    let mut min_exp: BTreeMap<Expr, i64> = BTreeMap::new();
    for mono in nf.terms.keys() {
        for (b, ex) in &mono.factors {
            if let Some(n) = ex.as_integer() {
                if n < 0 {
                    let slot = min_exp.entry(b.clone()).or_insert(0);
                    if n < *slot {
                        *slot = n;
                    }
                }
            }
        }
    }
    if min_exp.is_empty() {
        return Ok((from_nf(&nf), Expr::one()));
    }
    let mut mult_factors = Vec::new();
    for (b, n) in &min_exp {
        mult_factors.push(Expr::powi(b.clone(), -n));
    }
    let multiplier = normalize(&Expr::product(mult_factors.clone()))?;
    let cleared = nf_mul(&nf, &to_nf(&Expr::product(mult_factors))?)?;
    Ok((from_nf(&cleared), multiplier))
}

/// Scale so the canonically-first coefficient is +1. Zero stays zero.
pub fn scale_leading_unit(e: &Expr) -> KResult<Expr> {
    let nf = to_nf(e)?;
    let lead = match nf.terms.values().next() {
        Some(c) => c.clone(),
        None => return Ok(Expr::zero()),
    };
    let inv = lead.recip();
    let mut out = Nf::zero();
    for (m, c) in &nf.terms {
        out.terms.insert(m.clone(), c * &inv);
    }
    Ok(from_nf(&out))
}

/// Exact polynomial division: `Some(q)` with `e = q * d` when the long
/// division over the term algebra succeeds with zero remainder. Bounded to
/// keep the reduction safe under the structural monomial order.
pub fn try_div_exact(e: &Expr, d: &Expr) -> KResult<Option<Expr>> {
    let dn = to_nf(d)?;
    if dn.is_zero() {
        return Err(KernelError::ZeroDenominator);
    }
    let mut rem = to_nf(e)?;
    if rem.is_zero() {
        return Ok(Some(Expr::zero()));
    }
    let (lead_mono, lead_coeff) = match dn.terms.iter().next_back() {
        Some((m, c)) => (m.clone(), c.clone()),
        None => return Ok(None),
    };
    let mut quot = Nf::zero();
    let budget = 16 * (rem.terms.len() + 4) * (dn.terms.len() + 4);
    for _ in 0..budget {
        if rem.is_zero() {
            return Ok(Some(from_nf(&quot)));
        }
        let (rm, rc) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let q_mono = match mono_div(&rm, &lead_mono)? {
            Some(m) => m,
            None => return Ok(None),
        };
        let q_coeff = &rc / &lead_coeff;
        let mut q_term = Nf::zero();
        q_term.add_term(q_mono, q_coeff);
        let sub = nf_mul(&q_term, &dn)?;
        let mut neg = Nf::zero();
        for (m, c) in &sub.terms {
            neg.terms.insert(m.clone(), -c.clone());
        }
        rem = nf_add(rem, &neg);
        quot = nf_add(quot, &q_term);
    }
    Ok(None)
}

/// Divide monomial `a` by `b`, requiring integer exponents for shared bases.
fn mono_div(a: &Mono, b: &Mono) -> KResult<Option<Mono>> {
    let mut factors = a.factors.clone();
    for (bb, be) in &b.factors {
        let eb = match be.as_integer() {
            Some(n) => n,
            None => return Ok(None),
        };
        let pos = factors.iter().position(|(ba, _)| ba == bb);
        match pos {
            None => return Ok(None),
            Some(idx) => {
                let ea = match factors[idx].1.as_integer() {
                    Some(n) => n,
                    None => return Ok(None),
                };
                let rest = ea - eb;
                if rest < 0 {
                    return Ok(None);
                }
                if rest == 0 {
                    factors.remove(idx);
                } else {
                    factors[idx].1 = Expr::int(rest);
                }
            }
        }
    }
    factors.sort();
    Ok(Some(Mono { factors }))
}

/// Repeatedly strip an exactly-dividing factor (used with declared-nonzero
/// factors when matching determining systems).
pub fn strip_factor(e: &Expr, factor: &Expr) -> KResult<Expr> {
    let mut cur = normalize(e)?;
    if cur.is_zero() {
        return Ok(cur);
    }
    loop {
        match try_div_exact(&cur, factor)? {
            Some(q) if !q.is_zero() => cur = normalize(&q)?,
            _ => return Ok(cur),
        }
    }
}

pub(crate) use self::collect_impl::collect;

mod collect_impl {
    use super::*;
    use std::collections::BTreeSet;

    /// Coefficient collection over a basis of atoms. The expression must be
    /// polynomial in the basis: non-negative integer powers only, and no
    /// basis atom hidden inside function arguments, sum bases, or exponents.
    pub fn collect(e: &Expr, basis: &BTreeSet<Expr>) -> KResult<BTreeMap<Expr, Expr>> {
        let nf = to_nf(e)?;
        let mut grouped: BTreeMap<Mono, Nf> = BTreeMap::new();
        for (mono, coeff) in &nf.terms {
            let mut basis_part = Mono::unit();
            let mut coeff_part = Mono::unit();
            for (b, ex) in &mono.factors {
                if basis.contains(b) {
                    match ex.as_integer() {
                        Some(n) if n > 0 => basis_part.factors.push((b.clone(), ex.clone())),
                        _ => {
                            return Err(KernelError::NonPolynomial(format!(
                                "basis atom {} has exponent {}",
                                b, ex
                            )))
                        }
                    }
                } else {
                    // A basis atom buried inside an opaque base makes the
                    // expression non-polynomial in the basis.
                    for atom in basis {
                        if b.contains_atom(atom) {
                            return Err(KernelError::NonPolynomial(format!(
                                "basis atom {} occurs inside {}",
                                atom, b
                            )));
                        }
                        if ex.contains_atom(atom) {
                            return Err(KernelError::NonPolynomial(format!(
                                "basis atom {} occurs in exponent {}",
                                atom, ex
                            )));
                        }
                    }
                    coeff_part.factors.push((b.clone(), ex.clone()));
                }
            }
            basis_part.factors.sort();
            coeff_part.factors.sort();
            grouped
                .entry(basis_part)
                .or_default()
                .add_term(coeff_part, coeff.clone());
        }
        let mut out = BTreeMap::new();
        for (mono, coeff_nf) in grouped {
            let key = super::term_expr(&mono, &Rat::one());
            out.insert(key, super::from_nf(&coeff_nf));
        }
        Ok(out)
    }
}
