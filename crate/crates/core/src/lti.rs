//! Real-coefficient polynomials in `s` and rational transfer functions.
//!
//! This is the numeric substrate for every model in the crate: plants,
//! controllers and closed loops are all carried as ratios of polynomials and
//! evaluated on the imaginary axis. Compositions never cancel shared
//! factors — cancellation is numerically fragile — so equality and magnitude
//! are always pointwise notions via [`RationalTF::eval_jw`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial in `s` with real coefficients, ascending powers:
/// `coeffs[k]` multiplies `s^k`.
///
/// Normalized form carries no trailing zero coefficient; the zero polynomial
/// is stored as `[0.0]`. Only exact `0.0` is trimmed — scaled near-zeros are
/// kept so that system order is never changed silently.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        Self {
            coeffs: coeffs.into(),
        }
        .normalized()
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn s() -> Self {
        Self {
            coeffs: vec![0.0, 1.0],
        }
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs == [0.0]
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len().max(rhs.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            out[i] += c;
        }
        Self::new(out)
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0.0 && !self.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}s")?,
                _ => write!(f, "{c}s^{k}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Ratio of two real-coefficient polynomials in `s`.
///
/// Stored without common-factor cancellation; two transfer functions that
/// differ by a shared factor evaluate identically everywhere except at the
/// shared root, which is the behaviour the rest of the crate relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTF {
    /// Panics if `den` is identically zero.
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "denominator must not be identically zero");
        Self { num, den }
    }

    pub fn constant(k: f64) -> Self {
        Self::new(Polynomial::constant(k), Polynomial::one())
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// The transfer function `s`.
    pub fn s() -> Self {
        Self::new(Polynomial::s(), Polynomial::one())
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.num.scale(k), self.den.clone())
    }

    /// Evaluates the response at `s = j*omega`.
    ///
    /// Negative `omega` is permitted; the response there is the complex
    /// conjugate of the response at `|omega|`.
    pub fn eval_jw(&self, omega: f64) -> Result<Complex64> {
        let s = Complex64::new(0.0, omega);
        let den = self.den.eval(s);
        if den.re == 0.0 && den.im == 0.0 {
            return Err(Error::PoleAtFrequency { omega });
        }
        Ok(self.num.eval(s) / den)
    }

    /// Magnitude of the response at `s = j*omega`.
    pub fn magnitude_at(&self, omega: f64) -> Result<f64> {
        Ok(self.eval_jw(omega)?.norm())
    }
}

impl Add for RationalTF {
    type Output = RationalTF;

    /// `a/b + c/d = (ad + cb)/(bd)`, no cancellation.
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.num * rhs.den.clone() + rhs.num * self.den.clone(),
            self.den * rhs.den,
        )
    }
}

impl Mul for RationalTF {
    type Output = RationalTF;

    fn mul(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Div for RationalTF {
    type Output = RationalTF;

    /// `(a/b) / (c/d) = ad / bc`. Panics if `rhs` is identically zero.
    fn div(self, rhs: Self) -> Self {
        Self::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl fmt::Display for RationalTF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

/// Closes a negative feedback loop: `forward / (1 + forward*loop)`.
///
/// Fails with [`Error::IdenticallySingular`] when `1 + forward*loop` is
/// identically zero.
pub fn feedback(forward: &RationalTF, loop_tf: &RationalTF) -> Result<RationalTF> {
    let one_plus = RationalTF::one() + forward.clone() * loop_tf.clone();
    if one_plus.num.is_zero() {
        return Err(Error::IdenticallySingular);
    }
    Ok(forward.clone() / one_plus)
}
