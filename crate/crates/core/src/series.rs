//! Truncated complex power series.
//!
//! A [`TruncatedSeries`] of order `N` stores `c_0 ... c_N` and every
//! operation is exact modulo `z^{N+1}`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};

/// Absolute tolerance for "constant term is 1" / "constant term is 0" checks.
pub const UNIT_TOL: f64 = 1e-12;

/// Working order used by constructions unless overridden.
pub const DEFAULT_ORDER: usize = 256;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries[N={}](", self.order())?;
        for (k, c) in self.coeffs.iter().enumerate().take(6) {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        if self.coeffs.len() > 6 {
            write!(f, ", ...")?;
        }
        write!(f, ")")
    }
}

impl TruncatedSeries {
    /// Builds a series of order `coeffs.len() - 1`. At least two coefficients are required.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Usage(format!(
                "a truncated series needs order >= 1, got {} coefficient(s)",
                coeffs.len()
            )));
        }
        Ok(Self { coeffs })
    }

    /// Pads with zeros or truncates `coeffs` to exactly `order + 1` entries.
    pub fn from_slice(coeffs: &[Complex64], order: usize) -> Result<Self> {
        let mut v = vec![Complex64::new(0.0, 0.0); order + 1];
        for (dst, src) in v.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        Self::new(v)
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Result<Self> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_slice(&c, order)
    }

    pub fn zero(order: usize) -> Self {
        Self::from_slice(&[], order.max(1)).expect("order >= 1")
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Self::from_slice(&[c], order.max(1)).expect("order >= 1")
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Self {
        Self::from_real(&[0.0, 1.0], order.max(1)).expect("order >= 1")
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Drops every coefficient above `order` (which must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::Usage(format!(
                "cannot truncate order {} series to larger order {order}",
                self.order()
            )));
        }
        Self::new(self.coeffs[..=order].to_vec())
    }

    fn check_same_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::Usage(format!(
                "order mismatch: {} vs {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs })
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_order(other)?;
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() <= UNIT_TOL {
            return domain("reciprocal of a series with vanishing constant term");
        }
        let n = self.order();
        let inv0 = c0.inv();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        out[0] = inv0;
        for k in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -acc * inv0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    fn require_constant(&self, target: f64, what: &str) -> Result<()> {
        let c0 = self.coeffs[0];
        if (c0 - Complex64::new(target, 0.0)).norm() > UNIT_TOL {
            return domain(format!("{what} requires constant term {target}, got {c0}"));
        }
        Ok(())
    }

    /// `log s` for a series with constant term 1, via `n l_n = n c_n - sum_{k<n} k l_k c_{n-k}`.
    pub fn log_unit(&self) -> Result<Self> {
        self.require_constant(1.0, "log_unit")?;
        let n = self.order();
        let c = &self.coeffs;
        let mut l = vec![Complex64::new(0.0, 0.0); n + 1];
        for m in 1..=n {
            let mut acc = c[m] * m as f64;
            for k in 1..m {
                acc -= l[k] * c[m - k] * k as f64;
            }
            l[m] = acc / m as f64;
        }
        Ok(Self { coeffs: l })
    }

    /// `exp s` for a series with constant term 0, via `n e_n = sum_{k=1}^n k s_k e_{n-k}`.
    pub fn exp_unit(&self) -> Result<Self> {
        self.require_constant(0.0, "exp_unit")?;
        let n = self.order();
        let s = &self.coeffs;
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        e[0] = Complex64::new(1.0, 0.0);
        for m in 1..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 1..=m {
                acc += s[k] * e[m - k] * k as f64;
            }
            e[m] = acc / m as f64;
        }
        Ok(Self { coeffs: e })
    }

    /// Principal real power `s^beta` of a series with constant term 1.
    pub fn pow_unit(&self, beta: f64) -> Result<Self> {
        let mut l = self.log_unit()?;
        for c in &mut l.coeffs {
            *c *= beta;
        }
        // log_unit leaves exactly 0 in slot 0
        l.exp_unit()
    }

    /// Term-wise derivative. The result keeps the same order; its top coefficient is 0
    /// and carries no information.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 1..=n {
            out[k - 1] = self.coeffs[k] * k as f64;
        }
        Self { coeffs: out }
    }

    /// `s / z` for a series with `c_0 = 0`; the order drops by one (at least 1).
    pub fn shift_down(&self) -> Result<Self> {
        if self.coeffs[0].norm() > UNIT_TOL {
            return domain("shift_down requires a vanishing constant term");
        }
        if self.order() < 2 {
            return Err(Error::Usage("shift_down needs order >= 2".into()));
        }
        Self::new(self.coeffs[1..].to_vec())
    }

    /// Horner evaluation of the polynomial `sum c_k z^k`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Values at `z_m = r e^{2 pi i m / samples}` for `m = 0..samples`, computed with one FFT.
    pub fn eval_circle(&self, radius: f64, samples: usize) -> Vec<Complex64> {
        assert!(samples > 0, "eval_circle needs at least one sample");
        let mut buf = vec![Complex64::new(0.0, 0.0); samples];
        let mut rk = 1.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            buf[k % samples] += c * rk;
            rk *= radius;
        }
        PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(samples).process(&mut buf));
        buf
    }

    /// Tail estimate `max_{N/2 < k <= N} |c_k| r^{N+1} / (1 - r)`, used to judge whether
    /// sampling on radius `r` resolves the function the series represents.
    pub fn tail_estimate(&self, radius: f64) -> f64 {
        let n = self.order();
        let tail = self.coeffs[n / 2 + 1..]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        tail * radius.powi(n as i32 + 1) / (1.0 - radius)
    }
}

/// Sample angles matching [`TruncatedSeries::eval_circle`].
pub fn circle_angle(m: usize, samples: usize) -> f64 {
    2.0 * PI * m as f64 / samples as f64
}
