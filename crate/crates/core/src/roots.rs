//! Simultaneous root finding and nearest-root (Voronoi cell) assignment.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexpoly::{partial_sum, szego_sum, Polynomial};

pub const MAX_SWEEPS: usize = 200;
pub const DEFAULT_PHASE: f64 = 0.4;
const CORRECTION_TOL: f64 = 1e-13;
const RESIDUAL_TOL: f64 = 1e-10;
const SIMPLE_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial degree must be at least 1")]
    DegreeTooLow,
    #[error("polynomial has non-finite coefficients")]
    NonFiniteCoefficients,
    #[error("root finder did not converge after {sweeps} sweeps (max residual {max_residual:e})")]
    NoConvergence { sweeps: usize, max_residual: f64 },
}

/// All roots of a polynomial in lexicographic `(re, im)` order, with the
/// residual `|p(root)|` and derivative modulus `|p'(root)|` of each.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub derivative_moduli: Vec<f64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// `1 + max_{k<n} |c_k| / |c_n|`; every root lies strictly inside.
pub fn cauchy_bound(p: &Polynomial) -> f64 {
    let n = p.degree();
    let lead = p.leading().norm();
    1.0 + p.coeffs()[..n].iter().map(|c| c.norm() / lead).fold(0.0, f64::max)
}

/// Aberth–Ehrlich iteration from equally spaced starting points.
pub fn find_all_roots(p: &Polynomial) -> Result<RootSet, RootError> {
    find_all_roots_with_phase(p, DEFAULT_PHASE)
}

/// As [`find_all_roots`], with a caller-chosen phase for the initial
/// circle of guesses (useful as a retry after `NoConvergence`).
pub fn find_all_roots_with_phase(p: &Polynomial, phase: f64) -> Result<RootSet, RootError> {
    let n = p.degree();
    if n == 0 {
        return Err(RootError::DegreeTooLow);
    }
    if p.coeffs().iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(RootError::NonFiniteCoefficients);
    }

    let radius = 0.5 * (1.0 + cauchy_bound(p));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = phase + std::f64::consts::TAU * k as f64 / n as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut done = true;
        for i in 0..n {
            let t = p.taylor_at(z[i], 1);
            if t[0] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let newton = t[0] / t[1];
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = newton / (1.0 - newton * repulsion);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // Coincident iterates or a critical point; nudge off it.
                let nudge = Complex64::from_polar(1e-8 * (1.0 + z[i].norm()), phase + i as f64);
                z[i] += nudge;
                done = false;
                continue;
            }
            z[i] -= w;
            if w.norm() >= CORRECTION_TOL * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            break;
        }
    }

    if p.has_real_coeffs() {
        symmetrize_conjugates(&mut z);
    }
    z.sort_by(lex_order);

    let dp = p.derivative();
    let residuals: Vec<f64> = z.iter().map(|&r| p.eval(r).norm()).collect();
    let derivative_moduli = z.iter().map(|&r| dp.eval(r).norm()).collect();
    let set = RootSet { roots: z, residuals, derivative_moduli };

    let threshold = residual_threshold(p);
    if set.max_residual() >= threshold {
        return Err(RootError::NoConvergence { sweeps, max_residual: set.max_residual() });
    }
    Ok(set)
}

/// Residual bound a converged root must satisfy.
pub fn residual_threshold(p: &Polynomial) -> f64 {
    RESIDUAL_TOL * p.max_coeff_modulus().max(1.0)
}

fn lex_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Roots of a real polynomial come in conjugate pairs. Snap near-real roots
/// onto the axis and make each pair exactly conjugate, so that ordering and
/// downstream symmetry do not depend on last-bit noise.
fn symmetrize_conjugates(z: &mut [Complex64]) {
    let n = z.len();
    let tol = |r: Complex64| 1e-9 * (1.0 + r.norm());
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        if z[i].im.abs() <= tol(z[i]) {
            z[i].im = 0.0;
            paired[i] = true;
            continue;
        }
        let target = z[i].conj();
        let partner = (0..n)
            .filter(|&j| j != i && !paired[j])
            .min_by(|&a, &b| (z[a] - target).norm().total_cmp(&(z[b] - target).norm()));
        if let Some(j) = partner {
            if (z[j] - target).norm() <= tol(z[i]) {
                let re = 0.5 * (z[i].re + z[j].re);
                let im = 0.5 * (z[i].im.abs() + z[j].im.abs());
                let sign = z[i].im.signum();
                z[i] = Complex64::new(re, sign * im);
                z[j] = Complex64::new(re, -sign * im);
                paired[j] = true;
            }
        }
        paired[i] = true;
    }
}

/// Index of the Euclidean-nearest root and its distance; ties go to the
/// lowest index.
pub fn nearest_root(rs: &RootSet, w: Complex64) -> (usize, f64) {
    nearest_in(&rs.roots, w)
}

pub(crate) fn nearest_in(roots: &[Complex64], w: Complex64) -> (usize, f64) {
    assert!(!roots.is_empty(), "nearest_root on empty root set");
    let mut best = 0;
    let mut best_d2 = (roots[0] - w).norm_sqr();
    for (i, r) in roots.iter().enumerate().skip(1) {
        let d2 = (*r - w).norm_sqr();
        if d2 < best_d2 {
            best = i;
            best_d2 = d2;
        }
    }
    (best, best_d2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    PartialSum,
    Szego,
}

impl FamilyKind {
    pub fn polynomial(self, n: usize) -> Polynomial {
        match self {
            FamilyKind::PartialSum => partial_sum(n),
            FamilyKind::Szego => szego_sum(n),
        }
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "partial_sum" => Ok(FamilyKind::PartialSum),
            "szego" => Ok(FamilyKind::Szego),
            other => Err(format!("unknown polynomial kind {other:?} (expected partial_sum or szego)")),
        }
    }
}

/// Outcome of checking the known root facts for a partial-sum family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootReport {
    pub kind: FamilyKind,
    pub n: usize,
    pub all_simple: bool,
    pub bounds_hold: bool,
    pub roots: Vec<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub derivative_moduli: Vec<f64>,
}

/// Check simplicity and the modulus bounds: `0 < |root| < n` for partial
/// sums, `|root| < 1` for Szegő sums. Violations are reported, not raised.
pub fn verify_root_claims(kind: FamilyKind, n: usize, rs: &RootSet) -> RootReport {
    let all_simple = rs.derivative_moduli.iter().all(|&d| d > SIMPLE_ROOT_TOL);
    let bounds_hold = rs.roots.iter().all(|r| {
        let m = r.norm();
        match kind {
            FamilyKind::PartialSum => m > 0.0 && m < n as f64,
            FamilyKind::Szego => m < 1.0,
        }
    });
    RootReport {
        kind,
        n,
        all_simple,
        bounds_hold,
        roots: rs.roots.iter().map(|r| [r.re, r.im]).collect(),
        residuals: rs.residuals.clone(),
        derivative_moduli: rs.derivative_moduli.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn set(roots: Vec<Complex64>) -> RootSet {
        let n = roots.len();
        RootSet { roots, residuals: vec![0.0; n], derivative_moduli: vec![1.0; n] }
    }

    #[test]
    fn cauchy_bounds() {
        assert_eq!(cauchy_bound(&Polynomial::from_real(&[-1.0, 0.0, 1.0])), 2.0);
        assert_eq!(cauchy_bound(&partial_sum(2)), 3.0);
        assert_eq!(cauchy_bound(&partial_sum(1)), 2.0);
    }

    #[test]
    fn roots_of_small_partial_sums() {
        let rs = find_all_roots(&partial_sum(1)).unwrap();
        assert_eq!(rs.len(), 1);
        assert!(close(rs.roots[0], c(-1.0, 0.0), 1e-14));

        let rs = find_all_roots(&partial_sum(2)).unwrap();
        assert!(close(rs.roots[0], c(-1.0, -1.0), 1e-12));
        assert!(close(rs.roots[1], c(-1.0, 1.0), 1e-12));

        let rs = find_all_roots(&szego_sum(2)).unwrap();
        assert!(close(rs.roots[0], c(-0.5, -0.5), 1e-12));
        assert!(close(rs.roots[1], c(-0.5, 0.5), 1e-12));
    }

    #[test]
    fn roots_are_sorted_and_conjugate_paired() {
        let rs = find_all_roots(&partial_sum(9)).unwrap();
        for w in rs.roots.windows(2) {
            assert_ne!(lex_order(&w[0], &w[1]), Ordering::Greater);
        }
        for r in &rs.roots {
            assert!(rs.roots.contains(&r.conj()), "{r} lacks an exact conjugate");
        }
    }

    #[test]
    fn degree_zero_rejected() {
        assert_eq!(find_all_roots(&Polynomial::from_real(&[3.0])), Err(RootError::DegreeTooLow));
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z - 2)
        let p = Polynomial::new(vec![c(0.0, 2.0), c(-2.0, -1.0), c(1.0, 0.0)]);
        let rs = find_all_roots(&p).unwrap();
        assert!(close(rs.roots[0], c(0.0, 1.0), 1e-12));
        assert!(close(rs.roots[1], c(2.0, 0.0), 1e-12));
    }

    #[test]
    fn nearest_root_examples() {
        let rs = set(vec![c(-1.0, -1.0), c(-1.0, 1.0)]);
        let (i, d) = nearest_root(&rs, c(1.0, 1.0));
        assert_eq!(i, 1);
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(nearest_root(&rs, c(0.0, 0.0)).0, 0);
        let one = set(vec![c(-1.0, 0.0)]);
        assert_eq!(nearest_root(&one, c(40.0, -7.0)).0, 0);
    }

    #[test]
    fn claims_report() {
        let rs = find_all_roots(&partial_sum(2)).unwrap();
        let rep = verify_root_claims(FamilyKind::PartialSum, 2, &rs);
        assert!(rep.all_simple && rep.bounds_hold);

        let rs = find_all_roots(&szego_sum(2)).unwrap();
        assert!(verify_root_claims(FamilyKind::Szego, 2, &rs).bounds_hold);

        // |theta| = 1 = n fails the strict bound and is reported as such.
        let rs = find_all_roots(&partial_sum(1)).unwrap();
        let rep = verify_root_claims(FamilyKind::PartialSum, 1, &rs);
        assert!(rep.all_simple);
        assert!(!rep.bounds_hold);
    }

    #[test]
    fn report_json_shape() {
        let rs = find_all_roots(&partial_sum(2)).unwrap();
        let v = serde_json::to_value(verify_root_claims(FamilyKind::PartialSum, 2, &rs)).unwrap();
        assert_eq!(v["kind"], "partial_sum");
        assert_eq!(v["n"], 2);
        assert_eq!(v["all_simple"], true);
        assert_eq!(v["roots"].as_array().unwrap().len(), 2);
        assert_eq!(v["roots"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("szego".parse::<FamilyKind>().unwrap(), FamilyKind::Szego);
        assert!("cosine".parse::<FamilyKind>().is_err());
    }
}
