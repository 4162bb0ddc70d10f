//! Random-point numeric verification.
//!
//! Symbolic claims are checked by instantiating opaque function symbols with
//! concrete samples (random low-degree polynomials with exactly consistent
//! derivatives, plus `exp` as a builtin) and evaluating residuals at seeded
//! random jet points. All sampling is deterministic in the seed; point
//! evaluations are independent and reports merge by max aggregation.

use crate::symkernel::{diff_partial, normalize, Expr, FuncAtom, Indep, KernelError};
use num::ToPrimitive;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum OracleError {
    #[error("uncovered atom: {0}")]
    Uncovered(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("sampling exhausted retries: {0}")]
    SamplingExhausted(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type OResult<T> = Result<T, OracleError>;

/// Concrete realization of an opaque function symbol. Derivative atoms of the
/// symbol evaluate as exact derivatives of the sample.
#[derive(Debug, Clone)]
pub struct FunctionSample {
    pub name: String,
    pub arity: usize,
    kind: SampleKind,
}

#[derive(Debug, Clone)]
enum SampleKind {
    /// Polynomial in the slot parameters `@0..@arity`.
    Poly(Expr),
    /// The exponential function (unary); every derivative is itself.
    Exp,
}

fn slot(i: usize) -> Expr {
    Expr::param(format!("@{}", i))
}

impl FunctionSample {
    pub fn from_expr(name: impl Into<String>, arity: usize, body_in_slots: Expr) -> Self {
        FunctionSample {
            name: name.into(),
            arity,
            kind: SampleKind::Poly(body_in_slots),
        }
    }

    pub fn exp() -> Self {
        FunctionSample {
            name: "exp".into(),
            arity: 1,
            kind: SampleKind::Exp,
        }
    }

    /// Random polynomial of degree <= 3 with nonzero rational coefficients,
    /// including pair cross-terms so mixed partials are exercised.
    pub fn poly_random(name: impl Into<String>, arity: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut terms = vec![Expr::Rational(rand_coeff(rng))];
        for i in 0..arity {
            for d in 1..=3i64 {
                terms.push(Expr::Rational(rand_coeff(rng)) * Expr::powi(slot(i), d));
            }
        }
        for i in 0..arity {
            for j in (i + 1)..arity {
                terms.push(Expr::Rational(rand_coeff(rng)) * slot(i) * slot(j));
            }
        }
        FunctionSample::from_expr(name, arity, Expr::sum(terms))
    }

    /// Evaluate the sample derivative `deriv` at the given argument values.
    pub fn eval_deriv(&self, deriv: &[u32], args: &[f64]) -> OResult<f64> {
        if args.len() != self.arity {
            return Err(OracleError::Uncovered(format!(
                "{} called with {} args, declared arity {}",
                self.name,
                args.len(),
                self.arity
            )));
        }
        match &self.kind {
            SampleKind::Exp => Ok(args[0].exp()),
            SampleKind::Poly(body) => {
                let mut d = body.clone();
                for (i, &n) in deriv.iter().enumerate() {
                    for _ in 0..n {
                        d = diff_partial(&d, &slot(i))?;
                    }
                }
                let mut pt = NumericPoint::default();
                for (i, &val) in args.iter().enumerate() {
                    pt.values.insert(slot(i), val);
                }
                eval(&d, &pt, &[])
            }
        }
    }
}

fn rand_coeff(rng: &mut ChaCha8Rng) -> crate::symkernel::Rat {
    // Nonzero rationals in [-2, 2].
    loop {
        let num: i64 = rng.gen_range(-8..=8);
        if num == 0 {
            continue;
        }
        let den: i64 = rng.gen_range(1..=4);
        let r = crate::symkernel::Rat::new(num.into(), den.into());
        if r.to_f64().map(|v| v.abs() <= 2.0).unwrap_or(false) {
            return r;
        }
    }
}

/// Assignment of real values to atoms: independent variables, jet
/// coordinates, parameters, and free function atoms not covered by a sample.
#[derive(Debug, Clone, Default)]
pub struct NumericPoint {
    pub values: BTreeMap<Expr, f64>,
}

/// Evaluate an expression at a point. Every atom must be covered by the point
/// or by a function sample; powers with negative base and fractional exponent
/// are domain violations.
pub fn eval(e: &Expr, pt: &NumericPoint, samples: &[FunctionSample]) -> OResult<f64> {
    match e {
        Expr::Rational(r) => r
            .to_f64()
            .ok_or_else(|| OracleError::Uncovered("rational out of f64 range".into())),
        Expr::Var(_) | Expr::Param(_) | Expr::Jet(_) => pt
            .values
            .get(e)
            .copied()
            .ok_or_else(|| OracleError::Uncovered(e.to_string())),
        Expr::Func(fa) => {
            if let Some(v) = pt.values.get(e) {
                return Ok(*v);
            }
            let sample = samples
                .iter()
                .find(|s| s.name == fa.name)
                .ok_or_else(|| OracleError::Uncovered(e.to_string()))?;
            let mut args = Vec::with_capacity(fa.args.len());
            for a in &fa.args {
                args.push(eval(a, pt, samples)?);
            }
            sample.eval_deriv(&fa.deriv, &args)
        }
        Expr::Sum(cs) => {
            let mut acc = 0.0;
            for c in cs {
                acc += eval(c, pt, samples)?;
            }
            Ok(acc)
        }
        Expr::Product(cs) => {
            let mut acc = 1.0;
            for c in cs {
                acc *= eval(c, pt, samples)?;
            }
            Ok(acc)
        }
        Expr::Power(b, ex) => {
            let bv = eval(b, pt, samples)?;
            let ev = eval(ex, pt, samples)?;
            pow_checked(bv, ev)
        }
    }
}

fn pow_checked(base: f64, exp: f64) -> OResult<f64> {
    let is_integral = (exp - exp.round()).abs() < 1e-9;
    if base == 0.0 && exp < 0.0 {
        return Err(OracleError::DomainViolation("0 to negative power".into()));
    }
    if base < 0.0 && !is_integral {
        return Err(OracleError::DomainViolation(format!(
            "negative base {} to fractional power {}",
            base, exp
        )));
    }
    let v = if is_integral {
        base.powi(exp.round() as i32)
    } else {
        base.powf(exp)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(OracleError::DomainViolation(format!(
            "non-finite result {}^{}",
            base, exp
        )))
    }
}

/// Sampling ranges. Defaults: order-0 dependent values in [0.5, 2], t in
/// [0.1, 1], x in [1, 2], higher jets in [-2, 2] with small values excluded
/// for denominator-sensitive atoms, parameters in [-2, 2].
#[derive(Debug, Clone)]
pub struct Domain {
    pub order0: (f64, f64),
    pub t: (f64, f64),
    pub x: (f64, f64),
    pub jet: (f64, f64),
    pub param: (f64, f64),
    pub exclusion: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            order0: (0.5, 2.0),
            t: (0.1, 1.0),
            x: (1.0, 2.0),
            jet: (-2.0, 2.0),
            param: (-2.0, 2.0),
            exclusion: 0.1,
        }
    }
}

/// Deterministic point sampler: fixed assignments take priority, everything
/// else draws from the domain ranges.
#[derive(Debug, Clone, Default)]
pub struct Sampler {
    pub domain: Domain,
    pub fixed: BTreeMap<Expr, f64>,
    /// Atoms that must stay away from zero (eliminated denominators).
    pub sensitive: BTreeSet<Expr>,
}

impl Sampler {
    pub fn new() -> Self {
        Sampler {
            domain: Domain::default(),
            fixed: BTreeMap::new(),
            sensitive: BTreeSet::new(),
        }
    }

    fn range_for(&self, atom: &Expr) -> (f64, f64) {
        match atom {
            Expr::Var(Indep::T) => self.domain.t,
            Expr::Var(Indep::X) => self.domain.x,
            Expr::Jet(j) if j.order() == 0 => self.domain.order0,
            Expr::Jet(_) => self.domain.jet,
            Expr::Param(_) => self.domain.param,
            // Free function atoms sample like jets.
            _ => self.domain.jet,
        }
    }

    pub fn sample_point(&self, atoms: &BTreeSet<Expr>, rng: &mut ChaCha8Rng) -> OResult<NumericPoint> {
        let mut pt = NumericPoint::default();
        for atom in atoms {
            if let Some(v) = self.fixed.get(atom) {
                pt.values.insert(atom.clone(), *v);
                continue;
            }
            let (lo, hi) = self.range_for(atom);
            let mut val = rng.gen_range(lo..hi);
            if self.sensitive.contains(atom) || matches!(atom, Expr::Jet(j) if j.order() == 0) {
                let mut tries = 0;
                while val.abs() < self.domain.exclusion {
                    val = rng.gen_range(lo..hi);
                    tries += 1;
                    if tries > 200 {
                        return Err(OracleError::SamplingExhausted(atom.to_string()));
                    }
                }
            }
            pt.values.insert(atom.clone(), val);
        }
        Ok(pt)
    }
}

/// Atoms that need point values: everything except function applications
/// covered by a sample (their argument atoms are still collected).
pub fn atoms_needing_values(exprs: &[Expr], samples: &[FunctionSample]) -> BTreeSet<Expr> {
    let mut out = BTreeSet::new();
    for e in exprs {
        for atom in e.atoms() {
            match &atom {
                Expr::Func(fa) => {
                    if !samples.iter().any(|s| s.name == fa.name) {
                        out.insert(atom);
                    }
                }
                Expr::Param(p) if p.starts_with('@') => {}
                _ => {
                    out.insert(atom);
                }
            }
        }
    }
    out
}

/// Result of a residual check over random points.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub n_points: usize,
    pub tol: f64,
    pub max_violation: f64,
    pub seed: u64,
    pub passed: bool,
    /// Rendered worst point, present when the check failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<BTreeMap<String, f64>>,
}

/// Check that each expression vanishes at `n_points` random points:
/// pass iff |value| <= tol * (1 + scale) where scale is the largest additive
/// term magnitude (relative cancellation metric). Domain violations trigger
/// bounded resampling.
pub fn residual_check(
    exprs: &[Expr],
    samples: &[FunctionSample],
    sampler: &Sampler,
    n_points: usize,
    tol: f64,
    seed: u64,
) -> OResult<CheckOutcome> {
    assert!(n_points >= 1, "need at least one point");
    assert!(tol > 0.0, "tolerance must be positive");
    let mut normalized = Vec::with_capacity(exprs.len());
    for e in exprs {
        normalized.push(normalize(e)?);
    }
    let atoms = atoms_needing_values(&normalized, samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation: f64 = 0.0;
    let mut worst_point = None;
    for _ in 0..n_points {
        let mut attempt = 0;
        let (pt, values) = loop {
            let pt = sampler.sample_point(&atoms, &mut rng)?;
            match eval_all(&normalized, &pt, samples) {
                Ok(values) => break (pt, values),
                Err(OracleError::DomainViolation(_)) if attempt < 100 => {
                    attempt += 1;
                }
                Err(e) => return Err(e),
            }
        };
        for &(value, scale) in &values {
            let violation = value.abs() / (1.0 + scale);
            if violation > max_violation {
                max_violation = violation;
                worst_point = Some(render_point(&pt));
            }
        }
    }
    let passed = max_violation <= tol;
    Ok(CheckOutcome {
        n_points,
        tol,
        max_violation,
        seed,
        passed,
        worst_point: if passed { None } else { worst_point },
    })
}

fn eval_all(
    exprs: &[Expr],
    pt: &NumericPoint,
    samples: &[FunctionSample],
) -> OResult<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(exprs.len());
    for e in exprs {
        let (value, scale) = match e {
            Expr::Sum(terms) => {
                let mut total = 0.0;
                let mut scale: f64 = 0.0;
                for t in terms {
                    let v = eval(t, pt, samples)?;
                    total += v;
                    scale = scale.max(v.abs());
                }
                (total, scale)
            }
            _ => {
                let v = eval(e, pt, samples)?;
                (v, v.abs())
            }
        };
        out.push((value, scale));
    }
    Ok(out)
}

fn render_point(pt: &NumericPoint) -> BTreeMap<String, f64> {
    pt.values
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

/// Default samples for every opaque function symbol in the expressions:
/// random cubics, with `exp` kept exact.
pub fn auto_samples(exprs: &[Expr], rng: &mut ChaCha8Rng) -> Vec<FunctionSample> {
    let mut names: BTreeMap<String, usize> = BTreeMap::new();
    for e in exprs {
        e.visit(&mut |node| {
            if let Expr::Func(FuncAtom { name, args, .. }) = node {
                names.entry(name.clone()).or_insert(args.len());
            }
        });
    }
    names
        .into_iter()
        .map(|(name, arity)| {
            if name == "exp" {
                FunctionSample::exp()
            } else {
                FunctionSample::poly_random(name, arity, rng)
            }
        })
        .collect()
}

/// Numeric identity backstop: `a` and `b` agree at random points for several
/// independent function-sample draws. One-way only: canonical equality
/// implies this, never the converse.
pub fn check_identity(a: &Expr, b: &Expr, n_points: usize, tol: f64, seed: u64) -> OResult<bool> {
    let diff = normalize(&(a.clone() - b.clone()))?;
    let exprs = [diff];
    for round in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(round.wrapping_mul(0x9e3779b9)));
        let samples = auto_samples(&exprs, &mut rng);
        let sampler = Sampler::new();
        let outcome = residual_check(
            &exprs,
            &samples,
            &sampler,
            n_points,
            tol,
            seed.wrapping_add(round),
        )?;
        if !outcome.passed {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests;
