//! The symbolic expression tree.
//!
//! Expressions form a commutative algebra over exact rationals with four atom
//! kinds (parameters, independent variables, jet coordinates, opaque function
//! applications) plus n-ary sums, n-ary products, and powers. Power exponents
//! are restricted to parameter-rational expressions (rational constants and
//! rational functions of parameters); every other exponent shape is rejected
//! during normalization.

use super::atoms::{FuncAtom, Indep, JetCoord};
use num::BigRational;
use num::{One, Signed, Zero};
use std::collections::BTreeSet;
use std::ops;

pub type Rat = BigRational;

/// Symbolic expression node. The derived `Ord` gives the fixed total atom
/// ordering used for canonical forms: variant rank first, fields
/// lexicographically after.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Rational(Rat),
    Var(Indep),
    Param(String),
    Jet(JetCoord),
    Func(FuncAtom),
    Power(Box<Expr>, Box<Expr>),
    Product(Vec<Expr>),
    Sum(Vec<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Rational(Rat::zero())
    }

    pub fn one() -> Expr {
        Expr::Rational(Rat::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rational(Rat::from_integer(n.into()))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        assert!(den != 0, "rational literal with zero denominator");
        Expr::Rational(Rat::new(num.into(), den.into()))
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn t() -> Expr {
        Expr::Var(Indep::T)
    }

    pub fn x() -> Expr {
        Expr::Var(Indep::X)
    }

    pub fn jet(dep: usize, nt: u32, nx: u32) -> Expr {
        Expr::Jet(JetCoord::new(dep, nt, nx))
    }

    pub fn func(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Func(FuncAtom::new(name, args))
    }

    pub fn func_deriv(name: impl Into<String>, args: Vec<Expr>, deriv: Vec<u32>) -> Expr {
        Expr::Func(FuncAtom::with_deriv(name, args, deriv))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        Expr::Power(Box::new(base), Box::new(exponent))
    }

    pub fn powi(base: Expr, n: i64) -> Expr {
        Expr::pow(base, Expr::int(n))
    }

    pub fn sum(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn product(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Product(factors),
        }
    }

    pub fn neg(self) -> Expr {
        Expr::Product(vec![Expr::int(-1), self])
    }

    /// `self / other` as a raw tree (`other^(-1)` factor).
    pub fn div(self, other: Expr) -> Expr {
        Expr::Product(vec![self, Expr::powi(other, -1)])
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            Expr::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// Integer value when the expression is an integral rational constant.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Rational(r) if r.is_integer() => {
                use num::ToPrimitive;
                r.to_integer().to_i64()
            }
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) | Expr::Func(_)
        )
    }

    /// Positive rational constants.
    pub fn is_positive_const(&self) -> bool {
        matches!(self, Expr::Rational(r) if r.is_positive())
    }

    /// Walk the tree, visiting every node (including nodes inside function
    /// arguments and exponents).
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Sum(children) | Expr::Product(children) => {
                for c in children {
                    c.visit(f);
                }
            }
            Expr::Power(b, e) => {
                b.visit(f);
                e.visit(f);
            }
            Expr::Func(fa) => {
                for a in &fa.args {
                    a.visit(f);
                }
            }
            _ => {}
        }
    }

    /// All jet coordinates appearing anywhere in the expression.
    pub fn jets(&self) -> BTreeSet<JetCoord> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Jet(j) = e {
                out.insert(*j);
            }
        });
        out
    }

    /// Maximum total jet order present, or 0 when no jets occur.
    pub fn max_jet_order(&self) -> u32 {
        self.jets().iter().map(|j| j.order()).max().unwrap_or(0)
    }

    /// True when the given atom occurs anywhere in the tree.
    pub fn contains_atom(&self, atom: &Expr) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if e == atom {
                found = true;
            }
        });
        found
    }

    /// All distinct atoms (parameters, variables, jets, function atoms).
    pub fn atoms(&self) -> BTreeSet<Expr> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if e.is_atom() {
                out.insert(e.clone());
            }
        });
        out
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs])
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum(vec![self, rhs.neg()])
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product(vec![self, rhs])
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
