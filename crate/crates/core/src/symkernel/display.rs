//! Table-free text form for diagnostics. Canonical grammar rendering (bare
//! function names, underscore derivative suffixes) lives in `pdeparse`.

use super::expr::Expr;
use num::Signed;
use std::fmt;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Rational(r) => write!(f, "{}", r),
        Expr::Var(v) => write!(f, "{}", v.name()),
        Expr::Param(p) => write!(f, "{}", p),
        Expr::Jet(j) => write!(f, "{}", j.default_name()),
        Expr::Func(fa) => write!(f, "{}", fa),
        Expr::Sum(children) => {
            for (i, c) in children.iter().enumerate() {
                if i == 0 {
                    write_expr(c, f)?;
                    continue;
                }
                if let Some(pos) = strip_leading_minus(c) {
                    write!(f, " - ")?;
                    write_expr(&pos, f)?;
                } else {
                    write!(f, " + ")?;
                    write_expr(c, f)?;
                }
            }
            Ok(())
        }
        Expr::Product(children) => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                if needs_parens_in_product(c) {
                    write!(f, "(")?;
                    write_expr(c, f)?;
                    write!(f, ")")?;
                } else {
                    write_expr(c, f)?;
                }
            }
            Ok(())
        }
        Expr::Power(b, ex) => {
            if needs_parens_as_base(b) {
                write!(f, "(")?;
                write_expr(b, f)?;
                write!(f, ")")?;
            } else {
                write_expr(b, f)?;
            }
            write!(f, "^")?;
            if needs_parens_as_exponent(ex) {
                write!(f, "(")?;
                write_expr(ex, f)?;
                write!(f, ")")
            } else {
                write_expr(ex, f)
            }
        }
    }
}

/// `-3*u` as a sum term prints as `- 3*u`; returns the positive remainder.
fn strip_leading_minus(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Rational(r) if r.is_negative() => Some(Expr::Rational(-r.clone())),
        Expr::Product(children) => match children.first() {
            Some(Expr::Rational(r)) if r.is_negative() => {
                let mut rest = children.clone();
                let pos = -r.clone();
                if pos.is_one() && rest.len() > 1 {
                    rest.remove(0);
                } else {
                    rest[0] = Expr::Rational(pos);
                }
                Some(Expr::product(rest))
            }
            _ => None,
        },
        _ => None,
    }
}

fn needs_parens_in_product(e: &Expr) -> bool {
    match e {
        Expr::Sum(_) => true,
        Expr::Rational(r) => r.is_negative() || !r.is_integer(),
        _ => false,
    }
}

fn needs_parens_as_base(e: &Expr) -> bool {
    match e {
        Expr::Sum(_) | Expr::Product(_) | Expr::Power(..) => true,
        Expr::Rational(r) => r.is_negative() || !r.is_integer(),
        _ => false,
    }
}

fn needs_parens_as_exponent(e: &Expr) -> bool {
    match e {
        Expr::Rational(r) => r.is_negative() || !r.is_integer(),
        Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) | Expr::Func(_) => false,
        _ => true,
    }
}

use num::One;
