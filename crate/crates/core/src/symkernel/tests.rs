use super::*;
use std::collections::BTreeSet;

fn u() -> Expr {
    Expr::jet(0, 0, 0)
}
fn v() -> Expr {
    Expr::jet(1, 0, 0)
}
fn u_x() -> Expr {
    Expr::jet(0, 0, 1)
}
fn v_x() -> Expr {
    Expr::jet(1, 0, 1)
}
fn u_t() -> Expr {
    Expr::jet(0, 1, 0)
}
fn k() -> Expr {
    Expr::param("k")
}

fn eq(a: &Expr, b: &Expr) -> bool {
    equal_canonical(a, b).unwrap()
}

#[test]
fn like_terms_merge() {
    let e = u() + u();
    assert_eq!(normalize(&e).unwrap(), normalize(&(Expr::int(2) * u())).unwrap());
}

#[test]
fn symbolic_exponents_add() {
    // u^k * u^1 -> u^(k+1)
    let e = Expr::pow(u(), k()) * u();
    let want = Expr::pow(u(), k() + Expr::one());
    assert!(eq(&e, &want));
}

#[test]
fn commutativity_cancels() {
    let e = u_x() * v_x() - v_x() * u_x();
    assert!(normalize(&e).unwrap().is_zero());
}

#[test]
fn normalize_is_idempotent() {
    let e = (u() + v()) * (u() - v()) + Expr::pow(u() + v(), Expr::int(2));
    let once = normalize(&e).unwrap();
    let twice = normalize(&once).unwrap();
    assert_eq!(once, twice);
}

#[test]
fn binomial_expansion() {
    let lhs = Expr::pow(u() + v(), Expr::int(2));
    let rhs = u() * u() + Expr::int(2) * u() * v() + v() * v();
    assert!(eq(&lhs, &rhs));
}

#[test]
fn distinct_jets_differ() {
    assert!(!eq(&u_x(), &u_t()));
}

#[test]
fn zero_denominator_detected() {
    let e = Expr::div(u(), Expr::zero());
    assert_eq!(normalize(&e).unwrap_err(), KernelError::ZeroDenominator);
    let hidden = Expr::div(u(), u() - u());
    assert_eq!(normalize(&hidden).unwrap_err(), KernelError::ZeroDenominator);
}

#[test]
fn negative_powers_merge_and_cancel() {
    let e = Expr::div(u(), u());
    assert!(normalize(&e).unwrap().is_one());
    let e2 = Expr::pow(u(), k()) * Expr::pow(u(), k().neg());
    assert!(normalize(&e2).unwrap().is_one());
}

#[test]
fn sum_power_atom_merges() {
    // (u+v)^(-1) * (u+v)^2 expands to u + v
    let s = u() + v();
    let e = Expr::powi(s.clone(), -1) * Expr::pow(s.clone(), Expr::int(2));
    assert!(eq(&e, &s));
}

#[test]
fn rational_arithmetic_exact() {
    let e = Expr::rational(1, 3) + Expr::rational(1, 6);
    assert_eq!(normalize(&e).unwrap(), Expr::rational(1, 2));
    let p = Expr::powi(Expr::rational(2, 3), -2);
    assert_eq!(normalize(&p).unwrap(), Expr::rational(9, 4));
}

#[test]
fn invalid_exponent_rejected() {
    let e = Expr::pow(u(), v());
    assert!(matches!(
        normalize(&e).unwrap_err(),
        KernelError::InvalidExponent(_)
    ));
}

#[test]
fn parameter_ratio_exponent_accepted() {
    // Exponents may be rational functions of parameters.
    let exp = Expr::div(
        Expr::param("lambda2") * (k() + Expr::one()),
        Expr::param("lambda4") * (Expr::param("l") + Expr::one()),
    );
    let e = Expr::pow(v() - Expr::param("lambda3"), exp);
    normalize(&e).unwrap();
}

#[test]
fn diff_power_rule() {
    let e = u() * u();
    let d = diff_partial(&e, &u()).unwrap();
    assert!(eq(&d, &(Expr::int(2) * u())));
}

#[test]
fn diff_jets_independent() {
    // d/du of d1(u)*u_t = d1_u(u)*u_t
    let d1 = Expr::func("d1", vec![u()]);
    let e = d1 * u_t();
    let d = diff_partial(&e, &u()).unwrap();
    let want = Expr::func_deriv("d1", vec![u()], vec![1]) * u_t();
    assert!(eq(&d, &want));
}

#[test]
fn diff_chain_rule_through_opaque() {
    // d/du f(w(u,v)) = f'(w)*w_u with w = u^2*v expanded
    let w = u() * u() * v();
    let f = Expr::func("f", vec![w.clone()]);
    let d = diff_partial(&f, &u()).unwrap();
    let want = Expr::func_deriv("f", vec![w], vec![1]) * Expr::int(2) * u() * v();
    assert!(eq(&d, &want));
}

#[test]
fn diff_commutes() {
    let d1 = Expr::func("d1", vec![u()]);
    let e = d1 * u_t() * Expr::pow(u(), k()) + Expr::powi(v(), 3) * u_x();
    let duv = diff_partial(&diff_partial(&e, &u()).unwrap(), &v()).unwrap();
    let dvu = diff_partial(&diff_partial(&e, &v()).unwrap(), &u()).unwrap();
    assert!(eq(&duv, &dvu));
}

#[test]
fn diff_symbolic_exponent_by_its_parameter_fails() {
    let e = Expr::pow(u(), k());
    assert!(matches!(
        diff_partial(&e, &k()).unwrap_err(),
        KernelError::LogDerivative(_)
    ));
    // ... but differentiating by an unrelated parameter is zero.
    let d = diff_partial(&e, &Expr::param("l")).unwrap();
    assert!(d.is_zero());
}

#[test]
fn substitute_simultaneous() {
    // {u -> v, v -> u} swaps, it does not chain.
    let m = atom_map([(u(), v()), (v(), u())]).unwrap();
    let e = u() + Expr::int(2) * v();
    let got = substitute(&e, &m).unwrap();
    assert!(eq(&got, &(v() + Expr::int(2) * u())));
}

#[test]
fn substitute_empty_is_identity() {
    let e = Expr::func("xi0", vec![Expr::t()]) * u_x();
    let got = substitute(&e, &AtomMap::new()).unwrap();
    assert!(eq(&got, &e));
}

#[test]
fn substitute_inside_function_args() {
    let m = atom_map([(u(), v())]).unwrap();
    let e = Expr::func("d1", vec![u()]);
    let got = substitute(&e, &m).unwrap();
    assert!(eq(&got, &Expr::func("d1", vec![v()])));
}

#[test]
fn substitute_whole_function_atom_wins() {
    // A key matching the whole application takes priority over its args.
    let d1u = Expr::func("d1", vec![u()]);
    let m = atom_map([(d1u.clone(), Expr::one()), (u(), v())]).unwrap();
    let e = d1u + u();
    let got = substitute(&e, &m).unwrap();
    assert!(eq(&got, &(Expr::one() + v())));
}

#[test]
fn collect_basic() {
    let a = Expr::param("a");
    let b = Expr::param("b");
    let c = Expr::param("c");
    let e = a.clone() * u_x() * u_x() + b.clone() * u_x() * v_x() + c.clone();
    let basis: BTreeSet<Expr> = [u_x(), v_x()].into_iter().collect();
    let got = collect(&e, &basis).unwrap();
    assert_eq!(got.len(), 3);
    assert!(eq(&got[&Expr::one()], &c));
    assert!(eq(got.get(&normalize(&(u_x() * v_x())).unwrap()).unwrap(), &b));
    assert!(eq(
        got.get(&normalize(&Expr::powi(u_x(), 2)).unwrap()).unwrap(),
        &a
    ));
}

#[test]
fn collect_zero_is_empty() {
    let basis: BTreeSet<Expr> = [u_x()].into_iter().collect();
    assert!(collect(&Expr::zero(), &basis).unwrap().is_empty());
}

#[test]
fn collect_rejects_basis_atom_in_function_arg() {
    let e = Expr::func("f", vec![u_x()]);
    let basis: BTreeSet<Expr> = [u_x()].into_iter().collect();
    assert!(matches!(
        collect(&e, &basis).unwrap_err(),
        KernelError::NonPolynomial(_)
    ));
}

#[test]
fn collect_rejects_negative_power() {
    let e = Expr::powi(u_x(), -1);
    let basis: BTreeSet<Expr> = [u_x()].into_iter().collect();
    assert!(matches!(
        collect(&e, &basis).unwrap_err(),
        KernelError::NonPolynomial(_)
    ));
}

#[test]
fn collect_round_trip() {
    let e = Expr::func("a", vec![u()]) * u_x() * u_x()
        + Expr::int(3) * v_x() * u_x()
        + Expr::func("c", vec![u(), v()]);
    let basis: BTreeSet<Expr> = [u_x(), v_x()].into_iter().collect();
    let parts = collect(&e, &basis).unwrap();
    let rebuilt = Expr::sum(parts.into_iter().map(|(m, c)| m * c).collect());
    assert!(eq(&rebuilt, &e));
}

#[test]
fn clear_denominators_tracks_multiplier() {
    let xi0 = Expr::func("xi0", vec![Expr::t()]);
    let e = Expr::div(u(), Expr::powi(xi0.clone(), 2)) + Expr::div(v(), xi0.clone());
    let (cleared, mult) = clear_denominators(&e).unwrap();
    assert!(eq(&mult, &Expr::powi(xi0.clone(), 2)));
    assert!(eq(&cleared, &(u() + v() * xi0)));
}

#[test]
fn try_div_exact_binomial() {
    let d1 = Expr::func("d1", vec![u()]);
    let d2 = Expr::func("d2", vec![v()]);
    let diff = d1.clone() - d2.clone();
    let e = normalize(&(diff.clone() * (u_x() + Expr::int(3) * v()))).unwrap();
    let q = try_div_exact(&e, &diff).unwrap().unwrap();
    assert!(eq(&q, &(u_x() + Expr::int(3) * v())));
    // Not divisible.
    let e2 = normalize(&(d1 * u_x())).unwrap();
    assert!(try_div_exact(&e2, &diff).unwrap().is_none());
}

#[test]
fn scale_leading_unit_makes_first_coeff_one() {
    let e = Expr::int(-3) * u() + Expr::int(6) * v();
    let s = scale_leading_unit(&e).unwrap();
    assert!(eq(&s, &(u() - Expr::int(2) * v())));
    // Idempotent, and scale-invariant across rational multiples.
    assert_eq!(s, scale_leading_unit(&s).unwrap());
    let half = normalize(&(Expr::rational(1, 2) * e)).unwrap();
    assert_eq!(s, scale_leading_unit(&half).unwrap());
}

#[test]
fn solve_linear() {
    // d1*u_t + C1 - u_xx = 0 solved for u_t
    let d1 = Expr::func("d1", vec![u()]);
    let c1 = Expr::func("C1", vec![u(), v()]);
    let u_xx = Expr::jet(0, 0, 2);
    let eqn = d1.clone() * u_t() + c1.clone() - u_xx.clone();
    let (solved, div) = solve_linear_for_atom(&eqn, &u_t()).unwrap().unwrap();
    assert!(eq(&div, &d1));
    assert!(eq(&solved, &Expr::div(u_xx - c1, d1)));
    // Quadratic occurrence fails.
    let bad = u_t() * u_t() + u();
    assert!(solve_linear_for_atom(&bad, &u_t()).unwrap().is_none());
}

#[test]
fn power_of_product_distributes() {
    // ((k+1)*u)^m splits into content-free pieces and round-trips.
    let m = Expr::param("m");
    let e = Expr::pow((k() + Expr::one()) * u(), m.clone());
    let n = normalize(&e).unwrap();
    let again = normalize(&n).unwrap();
    assert_eq!(n, again);
    // And multiplying by the inverse power gives 1.
    let inv = Expr::pow((k() + Expr::one()) * u(), m.neg());
    assert!(normalize(&(e * inv)).unwrap().is_one());
}
