//! The parametrized basic family of iteration functions.
//!
//! For a polynomial `p` of degree `n`, the family is
//!
//! ```text
//! B_{m,a}(z) = z - a p(z) D_{m-2}(z) / D_{m-1}(z),      m >= 2, |1 - a| < 1
//! D_m(z)     = sum_{i=1}^{min(n,m)} (-1)^(i-1) p(z)^(i-1) p^(i)(z)/i! D_{m-i}(z)
//! ```
//!
//! with `D_0 = 1`. `B_2` is Newton's method and `B_3` is Halley's.
//!
//! `D_m` grows or shrinks geometrically in `m`, and the powers of `p(z)` in
//! the recurrence overflow for large `|p(z)|` well before `D_m` itself does.
//! Two exact power-of-two scalings keep the computation in range:
//!
//! * a gauge `g = 2^s` with `|p(z)/g| < 1`, writing `D_m = G_m g^m`, so
//!   the recurrence only ever raises `p/g` to powers;
//! * a sliding-window rescale: once the entries still referenced by the
//!   recurrence leave `[1e-100, 1e100]` they are all multiplied by the same
//!   power of two and the shift is recorded per entry.
//!
//! Both scalings are exact in binary floating point, so every ratio
//! `D_{m-2}/D_{m-1}` equals what the unscaled recurrence would produce
//! whenever the latter does not overflow.

use num_complex::Complex64;
use thiserror::Error;

use crate::complexpoly::Polynomial;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// Classification threshold around modulus one.
pub const CLASSIFY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("order m must be at least 2, got {0}")]
    InvalidOrder(usize),
    #[error("alpha = {re}{im:+}i violates |1 - alpha| < 1", re = .0.re, im = .0.im)]
    AlphaOutsideDisc(Complex64),
    #[error("polynomial must be non-constant")]
    ConstantPolynomial,
    #[error("input is not finite")]
    NonFiniteInput,
    #[error("denominator D_(m-1) vanished")]
    SingularDenominator,
    #[error("iteration produced a non-finite value")]
    NonFiniteResult,
}

/// Order and relaxation parameter of a basic-family member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    m: usize,
    alpha: Complex64,
}

impl FamilyParams {
    pub fn new(m: usize, alpha: Complex64) -> Result<Self, FamilyError> {
        if m < 2 {
            return Err(FamilyError::InvalidOrder(m));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(FamilyError::AlphaOutsideDisc(alpha));
        }
        if (Complex64::new(1.0, 0.0) - alpha).norm() >= 1.0 {
            return Err(FamilyError::AlphaOutsideDisc(alpha));
        }
        Ok(FamilyParams { m, alpha })
    }

    /// Unrelaxed member `B_m` (alpha = 1).
    pub fn plain(m: usize) -> Result<Self, FamilyError> {
        Self::new(m, Complex64::new(1.0, 0.0))
    }

    pub fn newton() -> Self {
        FamilyParams { m: 2, alpha: Complex64::new(1.0, 0.0) }
    }

    pub fn halley() -> Self {
        FamilyParams { m: 3, alpha: Complex64::new(1.0, 0.0) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }
}

/// `D_0 .. D_{m_max}` at a point, stored under exact power-of-two scaling.
///
/// The true value is `D_k = stored[k] * 2^(shift[k] + gauge_exp * k)`.
#[derive(Debug, Clone, Default)]
pub struct DSequence {
    values: Vec<Complex64>,
    shifts: Vec<i32>,
    gauge_exp: i32,
    p_at: Complex64,
}

impl DSequence {
    /// Scaled values as stored. Only ratios of adjacent entries are
    /// meaningful without the accompanying shifts.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `p(z)` at the point the sequence was computed for.
    pub fn p_value(&self) -> Complex64 {
        self.p_at
    }

    /// Natural log of the cumulative scale factor applied to the last entry.
    pub fn scale_log(&self) -> f64 {
        match self.values.len() {
            0 => 0.0,
            len => {
                let k = len - 1;
                (self.shifts[k] as f64 + self.gauge_exp as f64 * k as f64) * std::f64::consts::LN_2
            }
        }
    }

    /// Unscaled `D_k`; may overflow to infinity or underflow to zero.
    pub fn value(&self, k: usize) -> Complex64 {
        let e = self.shifts[k] as i64 + self.gauge_exp as i64 * k as i64;
        scale_pow2(self.values[k], e)
    }

    /// `D_{k-1} / D_k`, or `None` when `D_k` vanished.
    pub fn quotient(&self, k: usize) -> Option<Complex64> {
        assert!(k >= 1 && k < self.values.len(), "quotient index out of range");
        let den = self.values[k];
        if den == Complex64::new(0.0, 0.0) {
            return None;
        }
        let q = cdiv(self.values[k - 1], den);
        let e = self.shifts[k - 1] as i64 - self.shifts[k] as i64 - self.gauge_exp as i64;
        Some(scale_pow2(q, e))
    }

    /// `p(z) D_{m-2}(z) / D_{m-1}(z)`, the basic-family correction for order
    /// `m`, or `None` when the denominator vanished.
    pub fn correction(&self, m: usize) -> Option<Complex64> {
        assert!(m >= 2 && m <= self.values.len(), "correction order out of range");
        let den = self.values[m - 1];
        if den == Complex64::new(0.0, 0.0) {
            return None;
        }
        let q = cdiv(self.values[m - 2], den);
        // p * 2^-s is exact; the remaining 2^s is folded into the gauge.
        let reduced_p = scale_pow2(self.p_at, -(self.gauge_exp as i64));
        let e = self.shifts[m - 2] as i64 - self.shifts[m - 1] as i64;
        Some(scale_pow2(reduced_p * q, e))
    }

    /// Recompute in place, reusing allocations. `taylor` is scratch space.
    pub fn compute(
        &mut self,
        p: &Polynomial,
        z: Complex64,
        m_max: usize,
        taylor: &mut Vec<Complex64>,
    ) -> Result<(), FamilyError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(FamilyError::NonFiniteInput);
        }
        let n = p.degree();
        if n == 0 {
            return Err(FamilyError::ConstantPolynomial);
        }
        let k = n.min(m_max);
        taylor.resize(k.max(1) + 1, Complex64::new(0.0, 0.0));
        p.taylor_into(z, taylor);
        let pz = taylor[0];
        if !(pz.re.is_finite() && pz.im.is_finite()) {
            return Err(FamilyError::NonFiniteResult);
        }

        let modulus = pz.re.abs().max(pz.im.abs());
        let s = if modulus >= 1.0 { frexp_exp(modulus) } else { 0 };
        let reduced_p = scale_pow2(pz, -(s as i64));

        // Recurrence weights (-1)^(i-1) (p/g)^(i-1) t_i / g, stored in
        // taylor[i] over the Taylor coefficients they replace.
        let mut power = Complex64::new(1.0, 0.0);
        for t in taylor.iter_mut().take(k + 1).skip(1) {
            *t = scale_pow2(power * *t, -(s as i64));
            power *= -reduced_p;
        }

        self.values.clear();
        self.shifts.clear();
        self.gauge_exp = s;
        self.p_at = pz;
        self.values.push(Complex64::new(1.0, 0.0));
        self.shifts.push(0);

        for m in 1..=m_max {
            let top = n.min(m);
            let acc = taylor[1..=top]
                .iter()
                .zip(self.values[m - top..m].iter().rev())
                .fold(Complex64::new(0.0, 0.0), |acc, (t, d)| acc + t * d);
            if !(acc.re.is_finite() && acc.im.is_finite()) {
                return Err(FamilyError::NonFiniteResult);
            }
            let shift = self.shifts[m - 1];
            self.values.push(acc);
            self.shifts.push(shift);
            self.rescale_window(m, n);
        }
        Ok(())
    }

    fn rescale_window(&mut self, m: usize, window: usize) {
        let lo = (m + 1).saturating_sub(window);
        let max = self.values[lo..=m].iter().map(|v| v.re.abs().max(v.im.abs())).fold(0.0, f64::max);
        if max == 0.0 || (RESCALE_LOW..=RESCALE_HIGH).contains(&max) {
            return;
        }
        let e = frexp_exp(max);
        for k in lo..=m {
            self.values[k] = scale_pow2(self.values[k], -(e as i64));
            self.shifts[k] += e;
        }
    }
}

/// `D_0 .. D_{m_max}` of `p` at `z`.
pub fn d_sequence(p: &Polynomial, z: Complex64, m_max: usize) -> Result<DSequence, FamilyError> {
    let mut seq = DSequence::default();
    let mut taylor = Vec::new();
    seq.compute(p, z, m_max, &mut taylor)?;
    Ok(seq)
}

/// Reusable scratch for repeated family evaluations on one polynomial.
#[derive(Debug, Clone, Default)]
pub struct FamilyWorkspace {
    taylor: Vec<Complex64>,
    seq: DSequence,
}

impl FamilyWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// `B_{m,alpha}(z)`.
    pub fn step(&mut self, p: &Polynomial, z: Complex64, params: &FamilyParams) -> Result<Complex64, FamilyError> {
        let m = params.m;
        self.seq.compute(p, z, m - 1, &mut self.taylor)?;
        let corr = self.seq.correction(m).ok_or(FamilyError::SingularDenominator)?;
        let next = z - params.alpha * corr;
        if next.re.is_finite() && next.im.is_finite() {
            Ok(next)
        } else {
            Err(FamilyError::NonFiniteResult)
        }
    }

    /// Fills `out` with `B_2(w) .. B_{m_max}(w)` from a single recurrence pass.
    pub fn sequence(
        &mut self,
        p: &Polynomial,
        w: Complex64,
        m_max: usize,
        out: &mut Vec<SequenceTerm>,
    ) -> Result<(), FamilyError> {
        assert!(m_max >= 2, "basic sequence needs m_max >= 2");
        self.seq.compute(p, w, m_max - 1, &mut self.taylor)?;
        out.clear();
        for m in 2..=m_max {
            let value = self.seq.correction(m).map(|c| w - c);
            out.push(match value {
                Some(v) if v.re.is_finite() && v.im.is_finite() => SequenceTerm::defined(m, v),
                _ => SequenceTerm::undefined(m),
            });
        }
        Ok(())
    }
}

/// `B_{m,alpha}(z)` for the given member.
pub fn basic_family_step(p: &Polynomial, z: Complex64, params: &FamilyParams) -> Result<Complex64, FamilyError> {
    FamilyWorkspace::new().step(p, z, params)
}

/// `z - p/p'`.
pub fn newton_step(p: &Polynomial, z: Complex64) -> Result<Complex64, FamilyError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(FamilyError::NonFiniteInput);
    }
    let t = p.eval_with_derivs(z, 1);
    if t[1] == Complex64::new(0.0, 0.0) {
        return Err(FamilyError::SingularDenominator);
    }
    finite(z - cdiv(t[0], t[1]))
}

/// `z - 2 p p' / (2 p'^2 - p p'')`.
pub fn halley_step(p: &Polynomial, z: Complex64) -> Result<Complex64, FamilyError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(FamilyError::NonFiniteInput);
    }
    let t = p.eval_with_derivs(z, 2);
    let den = t[1] * t[1] * 2.0 - t[0] * t[2];
    if den == Complex64::new(0.0, 0.0) {
        return Err(FamilyError::SingularDenominator);
    }
    finite(z - cdiv(t[0] * t[1] * 2.0, den))
}

fn finite(z: Complex64) -> Result<Complex64, FamilyError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(FamilyError::NonFiniteResult)
    }
}

/// One entry `B_m(w)` of the basic sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceTerm {
    pub m: usize,
    /// NaN when undefined.
    pub value: Complex64,
    pub defined: bool,
}

impl SequenceTerm {
    fn defined(m: usize, value: Complex64) -> Self {
        SequenceTerm { m, value, defined: true }
    }

    fn undefined(m: usize) -> Self {
        SequenceTerm { m, value: Complex64::new(f64::NAN, f64::NAN), defined: false }
    }

    pub fn get(&self) -> Option<Complex64> {
        self.defined.then_some(self.value)
    }
}

/// `[B_2(w), ..., B_{m_max}(w)]` with alpha = 1. Entries whose denominator
/// vanished are marked undefined rather than failing the call.
pub fn basic_sequence(p: &Polynomial, w: Complex64, m_max: usize) -> Result<Vec<SequenceTerm>, FamilyError> {
    let mut out = Vec::with_capacity(m_max.saturating_sub(1));
    FamilyWorkspace::new().sequence(p, w, m_max, &mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    Attractive,
    Repulsive,
    Indifferent,
}

/// Classify a fixed point from the modulus of the map's derivative there.
pub fn classify_fixed_point(map_derivative_modulus: f64) -> Result<FixedPointKind, FamilyError> {
    if !map_derivative_modulus.is_finite() {
        return Err(FamilyError::NonFiniteInput);
    }
    Ok(if map_derivative_modulus < 1.0 - CLASSIFY_EPS {
        FixedPointKind::Attractive
    } else if map_derivative_modulus > 1.0 + CLASSIFY_EPS {
        FixedPointKind::Repulsive
    } else {
        FixedPointKind::Indifferent
    })
}

/// Central-difference estimate of `|g'(z)|` along the real direction.
/// Holomorphic maps have the same derivative in every direction.
pub fn derivative_modulus<F>(map: F, z: Complex64, h: f64) -> Result<f64, FamilyError>
where
    F: Fn(Complex64) -> Result<Complex64, FamilyError>,
{
    let plus = map(z + h)?;
    let minus = map(z - h)?;
    let d = ((plus - minus) / (2.0 * h)).norm();
    if d.is_finite() {
        Ok(d)
    } else {
        Err(FamilyError::NonFiniteResult)
    }
}

/// Smith's complex division; avoids the overflow and underflow of the
/// textbook `|b|^2` denominator.
pub(crate) fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    if b.im.abs() <= b.re.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// Exponent `e` with `x = f 2^e`, `0.5 <= f < 1`, for positive finite `x`.
fn frexp_exp(x: f64) -> i32 {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i32;
    if raw == 0 {
        // subnormal
        frexp_exp(x * 2f64.powi(64)) - 64
    } else {
        raw - 1022
    }
}

fn pow2(e: i32) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// `z * 2^e`, exact unless the result leaves the normal range.
pub(crate) fn scale_pow2(z: Complex64, mut e: i64) -> Complex64 {
    let mut out = z;
    while e != 0 {
        let step = e.clamp(-1000, 1000) as i32;
        let f = pow2(step);
        out = Complex64::new(out.re * f, out.im * f);
        e -= step as i64;
        if out.re == 0.0 && out.im == 0.0 || !(out.re.is_finite() && out.im.is_finite()) {
            break;
        }
    }
    out
}
