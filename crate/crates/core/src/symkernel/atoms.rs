//! Atomic coordinates of the expression language: independent variables,
//! parameters, jet coordinates, and opaque function applications.

use super::expr::Expr;
use std::fmt;

/// Independent variable. Two only: time and one spatial direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indep {
    T,
    X,
}

impl Indep {
    pub fn name(self) -> &'static str {
        match self {
            Indep::T => "t",
            Indep::X => "x",
        }
    }
}

/// Jet coordinate: the `(nt, nx)`-th derivative of dependent variable `dep`
/// (0-based index). `(0, 0)` is the dependent variable itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoord {
    pub dep: usize,
    pub nt: u32,
    pub nx: u32,
}

impl JetCoord {
    pub fn new(dep: usize, nt: u32, nx: u32) -> Self {
        JetCoord { dep, nt, nx }
    }

    /// Total derivative order.
    pub fn order(&self) -> u32 {
        self.nt + self.nx
    }

    /// Jet with the multi-index bumped in the given direction.
    pub fn bump(&self, dir: Indep) -> JetCoord {
        match dir {
            Indep::T => JetCoord::new(self.dep, self.nt + 1, self.nx),
            Indep::X => JetCoord::new(self.dep, self.nt, self.nx + 1),
        }
    }

    /// Render with explicit default variable names (u, v, w, u4, ...).
    pub fn default_name(&self) -> String {
        let base = match self.dep {
            0 => "u".to_string(),
            1 => "v".to_string(),
            2 => "w".to_string(),
            n => format!("u{}", n + 1),
        };
        suffix_jet(&base, self.nt, self.nx)
    }
}

pub(crate) fn suffix_jet(base: &str, nt: u32, nx: u32) -> String {
    if nt == 0 && nx == 0 {
        return base.to_string();
    }
    let mut s = String::from(base);
    s.push('_');
    for _ in 0..nt {
        s.push('t');
    }
    for _ in 0..nx {
        s.push('x');
    }
    s
}

/// Application of an opaque function symbol to argument expressions, with a
/// derivative multi-index over the argument slots. `deriv[j]` counts how many
/// times the symbol has been differentiated in slot `j`; the derivatives are
/// new atoms with no closed form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncAtom {
    pub name: String,
    pub args: Vec<Expr>,
    pub deriv: Vec<u32>,
}

impl FuncAtom {
    pub fn new(name: impl Into<String>, args: Vec<Expr>) -> Self {
        let deriv = vec![0; args.len()];
        FuncAtom {
            name: name.into(),
            args,
            deriv,
        }
    }

    pub fn with_deriv(name: impl Into<String>, args: Vec<Expr>, deriv: Vec<u32>) -> Self {
        assert_eq!(args.len(), deriv.len(), "derivative index arity mismatch");
        FuncAtom {
            name: name.into(),
            args,
            deriv,
        }
    }

    /// One more derivative in argument slot `j`.
    pub fn bump(&self, j: usize) -> FuncAtom {
        let mut d = self.deriv.clone();
        d[j] += 1;
        FuncAtom {
            name: self.name.clone(),
            args: self.args.clone(),
            deriv: d,
        }
    }

    pub fn total_deriv_order(&self) -> u32 {
        self.deriv.iter().sum()
    }
}

impl fmt::Display for FuncAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if self.total_deriv_order() > 0 {
            write!(f, "[")?;
            for (i, d) in self.deriv.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", d)?;
            }
            write!(f, "]")?;
        }
        write!(f, "(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}
