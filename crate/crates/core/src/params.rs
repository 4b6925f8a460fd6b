//! The Scarf II potential `V(x) = P sech²x + Q sech x tanh x`,
//! `P = B² - A² - A`, `Q = B(2A + 1)`.

use num_complex::Complex64;

use crate::error::AnalyticError;

/// The complex pair `(A, B)` that fixes a Scarf II potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScarfParams {
    pub a: Complex64,
    pub b: Complex64,
}

impl ScarfParams {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, AnalyticError> {
        for z in [a, b] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(AnalyticError::NonFiniteParameter(z));
            }
        }
        Ok(Self { a, b })
    }

    /// Real `A` and `B`: a Hermitian potential.
    pub fn real(a: f64, b: f64) -> Self {
        Self {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
        }
    }

    /// Strength of the even `sech²x` term.
    pub fn p(&self) -> Complex64 {
        self.b * self.b - self.a * self.a - self.a
    }

    /// Strength of the odd `sech x tanh x` term.
    pub fn q(&self) -> Complex64 {
        self.b * (2.0 * self.a + 1.0)
    }

    /// `V(x)`.
    pub fn potential(&self, x: f64) -> Complex64 {
        let s = 1.0 / x.cosh();
        self.p() * (s * s) + self.q() * (s * x.tanh())
    }

    /// `(A, -B)`: the parameters seen by a wave incident from the right.
    pub fn mirrored(&self) -> Self {
        Self { a: self.a, b: -self.b }
    }

    /// `(conj A, conj B)`, whose potential is `conj V(x)`.
    pub fn time_reversed(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: self.b.conj(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.a.im == 0.0 && self.b.im == 0.0
    }
}

/// `potential(params, x)`.
pub fn potential(params: &ScarfParams, x: f64) -> Complex64 {
    params.potential(x)
}

/// A value that may be infinite. Infinite values are carried as a flag and
/// never stored as a floating-point infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Copy> Extended<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        let p = ScarfParams::real(1.0, 0.0);
        assert_eq!(p.potential(0.0), Complex64::new(-2.0, 0.0));

        let p4 = ScarfParams::new(Complex64::new(0.0, -2.0), Complex64::new(0.0, 5.0)).unwrap();
        // P = B² - A² - A = -d² + c² + ic, Q = 2cd + id
        let v0 = p4.potential(0.0);
        assert!((v0 - Complex64::new(-21.0, 2.0)).norm() < 1e-12);
        assert!((p4.q() - Complex64::new(20.0, 5.0)).norm() < 1e-12);
    }

    #[test]
    fn decays() {
        // Q = 0: the sech² term alone is below 1e-12 from |x| = 16 on.
        let even = ScarfParams::new(Complex64::new(0.3, 0.4), Complex64::new(0.0, 0.0)).unwrap();
        for x in [16.0, -16.0, 25.0] {
            assert!(even.potential(x).norm() < 1e-12);
        }
        // The sech·tanh term only decays like 2|Q|e^{-|x|}.
        let p = ScarfParams::new(Complex64::new(0.3, -2.0), Complex64::new(1.7, 2.5)).unwrap();
        for x in [16.0, -16.0] {
            assert!(p.potential(x).norm() < 2.3e-7 * p.q().norm());
        }
        for x in [36.0, -36.0] {
            assert!(p.potential(x).norm() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_conjugates_potential() {
        let p = ScarfParams::new(Complex64::new(0.3, -2.0), Complex64::new(1.7, 2.5)).unwrap();
        let r = p.time_reversed();
        for x in [-1.3, 0.0, 0.4, 2.2] {
            assert!((r.potential(x) - p.potential(x).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ScarfParams::new(Complex64::new(f64::NAN, 0.0), Complex64::new(0.0, 0.0)).is_err());
    }
}
