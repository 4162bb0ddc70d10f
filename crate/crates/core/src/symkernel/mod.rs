//! Minimal computer-algebra kernel: canonical expression trees over exact
//! rationals, partial differentiation with chain rule through opaque function
//! symbols, simultaneous substitution, and coefficient collection.
//!
//! Expressions are immutable values; everything here is a pure function, so
//! sharing across threads is safe.

mod atoms;
mod calculus;
mod display;
mod error;
mod expr;
mod nf;
#[cfg(test)]
mod tests;

pub use atoms::{FuncAtom, Indep, JetCoord};
pub use calculus::{atom_map, diff_partial, substitute, AtomMap};
pub use error::{KResult, KernelError};
pub use expr::{Expr, Rat};
pub use nf::{
    clear_denominators, equal_canonical, normalize, scale_leading_unit, strip_factor,
    try_div_exact,
};

use std::collections::{BTreeMap, BTreeSet};

/// Coefficient collection over a basis of atoms: the returned map sends each
/// monomial in the basis to its basis-free coefficient, with the empty
/// monomial keyed by `1`. Zero collects to the empty map.
pub fn collect(e: &Expr, basis: &BTreeSet<Expr>) -> KResult<BTreeMap<Expr, Expr>> {
    nf::collect(e, basis)
}

/// Solve a linear equation `eq = 0` for an atom: returns `(solution,
/// coefficient)` when the atom occurs linearly with nonzero coefficient and
/// nowhere else. The coefficient is the expression divided by, for recording
/// genericity assumptions.
pub fn solve_linear_for_atom(eq: &Expr, atom: &Expr) -> KResult<Option<(Expr, Expr)>> {
    let mut basis = BTreeSet::new();
    basis.insert(atom.clone());
    let collected = match collect(eq, &basis) {
        Ok(c) => c,
        Err(KernelError::NonPolynomial(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut coeff = None;
    let mut rest = Expr::zero();
    for (mono, c) in collected {
        if mono.is_one() {
            rest = c;
        } else if mono == *atom {
            coeff = Some(c);
        } else {
            return Ok(None); // degree >= 2
        }
    }
    match coeff {
        Some(a) if !a.is_zero() => {
            let solved = normalize(&Expr::div(rest.neg(), a.clone()))?;
            Ok(Some((solved, a)))
        }
        _ => Ok(None),
    }
}
