//! Dense complex polynomials and the exponential partial-sum families.
//!
//! Coefficients are stored in ascending order: index `k` holds the
//! coefficient of `z^k`.

use std::fmt;

use num_complex::Complex64;

/// A point of the plane treated as a complex number.
pub type ComplexValue = Complex64;

/// Largest family parameter `n` accepted by scene validation.
pub const MAX_FAMILY_N: usize = 64;

/// Dense polynomial over binary64 complex coefficients.
///
/// Trailing zero coefficients are trimmed on construction, so the last
/// stored coefficient is nonzero unless the polynomial is identically zero,
/// in which case it is stored as a single zero coefficient.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Build from ascending coefficients. An empty slice gives the zero
    /// polynomial.
    pub fn new(coeffs: impl Into<Vec<Complex64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    /// Build from real ascending coefficients.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect::<Vec<_>>())
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the last stored coefficient; 0 for constants and for the
    /// zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// True when every coefficient has a zero imaginary part.
    pub fn has_real_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Normalized Taylor coefficients `p^(j)(z) / j!` for `j = 0..=k`,
    /// computed by repeated synthetic division in a single nested pass.
    /// Entries with `j > degree` are exactly zero.
    pub fn taylor_at(&self, z: Complex64, k: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); k + 1];
        self.taylor_into(z, &mut out);
        out
    }

    /// Allocation-free form of [`Polynomial::taylor_at`]; fills all of `out`.
    pub fn taylor_into(&self, z: Complex64, out: &mut [Complex64]) {
        let zero = Complex64::new(0.0, 0.0);
        out.fill(zero);
        if out.is_empty() {
            return;
        }
        let k = out.len() - 1;
        let n = self.degree();
        out[0] = self.coeffs[n];
        for i in (0..n).rev() {
            let top = k.min(n - i);
            for j in (1..=top).rev() {
                out[j] = out[j] * z + out[j - 1];
            }
            out[0] = out[0] * z + self.coeffs[i];
        }
    }

    /// `[p(z), p'(z), ..., p^(k)(z)]`.
    pub fn eval_with_derivs(&self, z: Complex64, k: usize) -> Vec<Complex64> {
        let mut out = self.taylor_at(z, k);
        let mut fact = 1.0;
        for (j, v) in out.iter_mut().enumerate().skip(1) {
            fact *= j as f64;
            *v *= fact;
        }
        out
    }

    /// Coefficient convolution.
    pub fn multiply(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Coefficients of `p'`.
    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::zero();
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect::<Vec<_>>())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

/// `P_n(z) = sum_{k=0}^{n} z^k / k!`.
pub fn partial_sum(n: usize) -> Polynomial {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    coeffs.push(Complex64::new(c, 0.0));
    for k in 1..=n {
        c /= k as f64;
        coeffs.push(Complex64::new(c, 0.0));
    }
    Polynomial::new(coeffs)
}

/// Szegő partial sum `S_n(z) = P_n(n z)`, coefficient `k` equal to `n^k / k!`.
pub fn szego_sum(n: usize) -> Polynomial {
    let scale = n as f64;
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c = 1.0;
    coeffs.push(Complex64::new(c, 0.0));
    for k in 1..=n {
        c = c * scale / k as f64;
        coeffs.push(Complex64::new(c, 0.0));
    }
    Polynomial::new(coeffs)
}

/// `z^n - 1`.
pub fn unity_factor(n: usize) -> Polynomial {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[0] = Complex64::new(-1.0, 0.0);
    coeffs[n] = Complex64::new(1.0, 0.0);
    Polynomial::new(coeffs)
}

pub fn multiply(p: &Polynomial, q: &Polynomial) -> Polynomial {
    p.multiply(q)
}
