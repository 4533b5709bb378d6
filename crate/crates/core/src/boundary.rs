//! Boundary data on the unit circle as a truncated Fourier series.
//!
//! The solver consumes the transplanted datum `H(t) = sum_k h_k e^{ikt}`
//! directly; whoever built the conformal map is responsible for composing the
//! physical datum with it. A real-valued datum satisfies
//! `h_{-k} = conj(h_k)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    max_mode: usize,
    /// Indexed `k + max_mode`, `k = -K..=K`.
    coeffs: Vec<Complex64>,
    holder_exponent_estimate: Option<f64>,
}

impl BoundaryFunction {
    pub fn zeros(max_mode: usize) -> Self {
        BoundaryFunction {
            max_mode,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_mode + 1],
            holder_exponent_estimate: None,
        }
    }

    /// Build from explicit `(k, h_k)` pairs; modes outside the band are
    /// rejected rather than silently dropped.
    pub fn from_modes(max_mode: usize, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut b = BoundaryFunction::zeros(max_mode);
        for &(k, v) in modes {
            if k.unsigned_abs() as usize > max_mode {
                return Err(Error::InvalidParam {
                    name: "boundary mode",
                    value: k as f64,
                    reason: "outside the band limit",
                });
            }
            b.coeffs[(k + max_mode as i64) as usize] += v;
        }
        b.holder_exponent_estimate = b.decay_exponent();
        Ok(b)
    }

    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.max_mode {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.max_mode as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, k: i64, v: Complex64) {
        let kk = self.max_mode as i64;
        assert!(k.abs() <= kk, "mode {k} outside band {kk}");
        self.coeffs[(k + kk) as usize] = v;
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let kk = self.max_mode as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kk..=kk {
            acc += self.coeff(k) * Complex64::from_polar(1.0, k as f64 * t);
        }
        acc
    }

    pub fn is_real(&self, tol: f64) -> bool {
        let kk = self.max_mode as i64;
        (0..=kk).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// Least-squares fit of `|h_k| ~ C k^{-beta}` on the nonzero tail
    /// (log-log). Needs at least two distinct participating frequencies.
    pub fn decay_exponent(&self) -> Option<f64> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let floor = 1e-14
            * self
                .coeffs
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max)
                .max(1e-300);
        for k in 1..=self.max_mode as i64 {
            let m = self.coeff(k).norm().max(self.coeff(-k).norm());
            if m > floor {
                pts.push(((k as f64).ln(), m.ln()));
            }
        }
        if pts.len() < 2 || pts.first().map(|p| p.0) == pts.last().map(|p| p.0) {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-30 {
            return None;
        }
        let slope = (n * sxy - sx * sy) / denom;
        Some(-slope)
    }

    pub fn holder_estimate(&self) -> Option<f64> {
        self.holder_exponent_estimate
    }

    pub fn set_holder_estimate(&mut self, est: Option<f64>) {
        self.holder_exponent_estimate = est;
    }
}
