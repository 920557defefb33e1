//! Invariants checked against independent oracles.

use expograph::basicfamily::{
    basic_family_step, derivative_modulus, halley_step, newton_step, FamilyError, FamilyParams,
};
use expograph::complexpoly::{partial_sum, szego_sum, Polynomial};
use expograph::roots::{find_all_roots, nearest_root, RootSet};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

fn complex_in_disc() -> impl Strategy<Value = Complex64> {
    (0.0..2.0f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| c(a, b))
}

fn poly(max_degree: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(coeff(), 2..=max_degree + 1).prop_map(|mut v| {
        // keep the leading coefficient away from zero
        let last = v.last_mut().unwrap();
        *last += c(1.5, 0.0);
        Polynomial::new(v)
    })
}

/// `p^(j)(z)` by the Cauchy integral on a circle, discretized with more
/// nodes than the degree, which makes the trapezoid sum exact up to rounding.
fn contour_derivative(p: &Polynomial, z: Complex64, j: usize) -> Complex64 {
    let nodes = 64;
    let r = 0.5;
    let mut acc = c(0.0, 0.0);
    for k in 0..nodes {
        let e = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / nodes as f64);
        acc += p.eval(z + e * r) / e.powu(j as u32);
    }
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    acc * fact / (nodes as f64 * r.powi(j as i32))
}

/// Central differences straight from Horner evaluations, with one
/// Richardson step for the higher orders.
fn central_difference(p: &Polynomial, z: Complex64, j: usize) -> Complex64 {
    let stencil = |h: f64| match j {
        1 => (p.eval(z + h) - p.eval(z - h)) / (2.0 * h),
        2 => (p.eval(z + h) - p.eval(z) * 2.0 + p.eval(z - h)) / (h * h),
        3 => {
            (p.eval(z + 2.0 * h) - p.eval(z + h) * 2.0 + p.eval(z - h) * 2.0 - p.eval(z - 2.0 * h)) / (2.0 * h * h * h)
        }
        _ => unreachable!(),
    };
    match j {
        0 => p.eval(z),
        1 => stencil(1e-6),
        2 => (stencil(5e-5) * 4.0 - stencil(1e-4)) / 3.0,
        _ => (stencil(1e-3) * 4.0 - stencil(2e-3)) / 3.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_sum_matches_power_summation(n in 0usize..=12, z in complex_in_disc()) {
        let got = partial_sum(n).eval(z);
        let mut want = c(0.0, 0.0);
        let mut fact = 1.0;
        for k in 0..=n {
            if k > 0 { fact *= k as f64; }
            want += z.powu(k as u32) / fact;
        }
        prop_assert!((got - want).norm() < 1e-12 * got.norm().max(1.0));
    }

    #[test]
    fn multiply_commutes_and_associates(a in poly(6), b in poly(6), d in poly(6)) {
        let ab = a.multiply(&b);
        let ba = b.multiply(&a);
        prop_assert_eq!(ab.degree(), a.degree() + b.degree());
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
            prop_assert!(rel_close(*x, *y, 1e-12));
        }
        let left = ab.multiply(&d);
        let right = a.multiply(&b.multiply(&d));
        for (x, y) in left.coeffs().iter().zip(right.coeffs()) {
            prop_assert!(rel_close(*x, *y, 1e-12));
        }
    }

    #[test]
    fn derivatives_match_contour_oracle(p in poly(8), z in complex_in_disc()) {
        let d = p.eval_with_derivs(z, 3);
        for (j, dj) in d.iter().enumerate() {
            let want = contour_derivative(&p, z, j);
            prop_assert!(rel_close(*dj, want, 1e-9), "j={} got={} want={}", j, dj, want);
        }
    }

    #[test]
    fn derivatives_match_finite_differences(p in poly(8), z in complex_in_disc()) {
        let d = p.eval_with_derivs(z, 3);
        for (j, dj) in d.iter().enumerate() {
            let want = central_difference(&p, z, j);
            prop_assert!(rel_close(*dj, want, 1e-5), "j={} got={} want={}", j, dj, want);
        }
    }

    #[test]
    fn linear_member_is_affine(re in -50.0..50.0f64, im in -50.0..50.0f64, m in 2usize..12,
                               ar in 0.2..1.8f64, ai in -0.5..0.5f64) {
        let z = c(re, im);
        let alpha = c(ar, ai);
        prop_assume!((c(1.0, 0.0) - alpha).norm() < 1.0);
        let params = FamilyParams::new(m, alpha).unwrap();
        let got = basic_family_step(&partial_sum(1), z, &params).unwrap();
        prop_assert_eq!(got, z - alpha * (c(1.0, 0.0) + z));
    }

    #[test]
    fn nearest_root_partitions_the_plane(n in 2usize..=8, re in -10.0..10.0f64, im in -10.0..10.0f64) {
        let rs = find_all_roots(&partial_sum(n)).unwrap();
        let w = c(re, im);
        let (idx, dist) = nearest_root(&rs, w);
        let minimizers: Vec<usize> = rs.roots.iter().enumerate()
            .filter(|(_, r)| ((**r - w).norm() - dist).abs() <= 1e-12 * dist.max(1.0))
            .map(|(i, _)| i)
            .collect();
        prop_assert_eq!(minimizers, vec![idx]);
    }
}

#[test]
fn szego_coefficients_scale_partial_sum() {
    for n in 1..=64usize {
        let p = partial_sum(n);
        let s = szego_sum(n);
        for (k, (pk, sk)) in p.coeffs().iter().zip(s.coeffs()).enumerate() {
            let want = pk.re * (n as f64).powi(k as i32);
            assert!((sk.re - want).abs() <= 1e-15 * want.abs() * (k as f64 + 1.0), "n={n} k={k}");
        }
    }
}

#[test]
fn family_agrees_with_closed_forms() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let p = partial_sum(n);
        let z = Complex64::from_polar(rng.gen_range(0.0..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
        match (basic_family_step(&p, z, &FamilyParams::newton()), newton_step(&p, z)) {
            (Ok(a), Ok(b)) => assert!(rel_close(a, b, 1e-12), "newton {a} vs {b}"),
            (Err(FamilyError::SingularDenominator), Err(FamilyError::SingularDenominator)) => {}
            other => panic!("mismatch {other:?}"),
        }
        match (basic_family_step(&p, z, &FamilyParams::halley()), halley_step(&p, z)) {
            (Ok(a), Ok(b)) => assert!(rel_close(a, b, 1e-12), "halley {a} vs {b}"),
            (Err(FamilyError::SingularDenominator), Err(FamilyError::SingularDenominator)) => {}
            other => panic!("mismatch {other:?}"),
        }
        checked += 1;
    }
    assert_eq!(checked, 1000);
}

#[test]
fn relaxed_newton_derivative_at_simple_roots() {
    let mut rng = StdRng::seed_from_u64(11);
    for n in 2..=6 {
        let p = partial_sum(n);
        let rs = find_all_roots(&p).unwrap();
        for _ in 0..5 {
            let alpha = c(1.0, 0.0)
                - Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..std::f64::consts::TAU));
            let params = FamilyParams::new(2, alpha).unwrap();
            for &theta in &rs.roots {
                let d = derivative_modulus(|z| basic_family_step(&p, z, &params), theta, 1e-6).unwrap();
                let want = (c(1.0, 0.0) - alpha).norm();
                assert!((d - want).abs() < 1e-5, "n={n} alpha={alpha} d={d} want={want}");
            }
        }
    }
}

// ---- closed-form roots for degree <= 3 ----

fn quadratic_roots(p: &Polynomial) -> Vec<Complex64> {
    let [c0, c1, c2] = [p.coeffs()[0], p.coeffs()[1], p.coeffs()[2]];
    let disc = (c1 * c1 - c0 * c2 * 4.0).sqrt();
    // choose the sign that avoids cancellation
    let q = if (c1.conj() * disc).re >= 0.0 { (c1 + disc) * -0.5 } else { (c1 - disc) * -0.5 };
    vec![q / c2, c0 / q]
}

fn cubic_roots(p: &Polynomial) -> Vec<Complex64> {
    let lead = p.coeffs()[3];
    let a = p.coeffs()[2] / lead;
    let b = p.coeffs()[1] / lead;
    let d = p.coeffs()[0] / lead;
    let pp = b - a * a / 3.0;
    let qq = a * a * a * (2.0 / 27.0) - a * b / 3.0 + d;
    let disc = (qq * qq / 4.0 + pp * pp * pp / 27.0).sqrt();
    let mut u3 = -qq / 2.0 + disc;
    if u3.norm() < 1e-300 {
        u3 = -qq / 2.0 - disc;
    }
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    (0..3)
        .map(|k| {
            let uk = u * omega.powu(k);
            let vk = if uk.norm() == 0.0 { c(0.0, 0.0) } else { -pp / (uk * 3.0) };
            uk + vk - a / 3.0
        })
        .collect()
}

fn best_matching_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    fn permute(b: &[Complex64], k: usize, perm: &mut Vec<Complex64>, a: &[Complex64], best: &mut f64) {
        if k == b.len() {
            let err = a.iter().zip(perm.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            *best = best.min(err);
            return;
        }
        for i in k..b.len() {
            perm.swap(k, i);
            permute(b, k + 1, perm, a, best);
            perm.swap(k, i);
        }
    }
    let mut best = f64::INFINITY;
    let mut perm = b.to_vec();
    permute(b, 0, &mut perm, a, &mut best);
    best
}

#[test]
fn roots_match_closed_forms() {
    let mut rng = StdRng::seed_from_u64(3);
    let mut rc = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    for _ in 0..200 {
        let lin = Polynomial::new(vec![rc(), rc() + c(3.0, 0.0)]);
        let want = vec![-lin.coeffs()[0] / lin.coeffs()[1]];
        let got = find_all_roots(&lin).unwrap();
        assert!(best_matching_error(&got.roots, &want) < 1e-10);

        let quad = Polynomial::new(vec![rc(), rc(), rc() + c(3.0, 0.0)]);
        let got = find_all_roots(&quad).unwrap();
        assert!(best_matching_error(&got.roots, &quadratic_roots(&quad)) < 1e-10, "{quad:?}");

        let cubic = Polynomial::new(vec![rc(), rc(), rc(), rc() + c(3.0, 0.0)]);
        let got = find_all_roots(&cubic).unwrap();
        let want = cubic_roots(&cubic);
        assert!(best_matching_error(&got.roots, &want) < 1e-10, "{cubic:?} {:?} {want:?}", got.roots);
    }
}

#[test]
fn szego_roots_are_scaled_partial_sum_roots() {
    for n in 2..=10 {
        let p: RootSet = find_all_roots(&partial_sum(n)).unwrap();
        let s = find_all_roots(&szego_sum(n)).unwrap();
        let scaled: Vec<Complex64> = p.roots.iter().map(|r| r / n as f64).collect();
        // lexicographic order is preserved by positive scaling, so match index-wise
        for (a, b) in scaled.iter().zip(&s.roots) {
            assert!((a - b).norm() < 1e-9, "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn partial_sum_residuals_are_small() {
    for n in 1..=12 {
        let rs = find_all_roots(&partial_sum(n)).unwrap();
        assert_eq!(rs.len(), n);
        assert!(rs.max_residual() < 1e-10, "n={n} residual={}", rs.max_residual());
    }
}

#[test]
fn high_degree_families_have_roots() {
    for n in [20, 32, 48, 64] {
        let rs = find_all_roots(&szego_sum(n)).unwrap();
        assert_eq!(rs.len(), n);
        assert!(rs.roots.iter().all(|r| r.norm() < 1.0));
    }
}
