//! Canonical parameters of the strongly elliptic operator and the affine
//! conjugation operator `w -> alpha*w + beta*conj(w)` it is built from.
//!
//! A second-order strongly elliptic system with constant coefficients reduces,
//! after a linear change of variables, to the canonical two-parameter form
//! indexed by `0 <= tau, sigma < 1`. The solver only ever sees the derived
//! triple `(t_norm, alpha0, beta0)`:
//!
//! ```text
//! t_norm = (tau + sigma) / (1 + sigma*tau)
//! alpha0 = tau*(1 - sigma^2) / ((tau + sigma)*(1 - sigma*tau))
//! beta0  = sigma*(1 - tau^2) / ((tau + sigma)*(1 - sigma*tau))
//! ```
//!
//! with `alpha0 + beta0 = 1` and `0 <= t_norm < 1`; `t_norm` is the size of
//! the perturbation away from the Laplacian and drives series convergence.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The operator `w -> alpha*w + beta*conj(w)` on complex numbers.
///
/// Its operator norm (as a real-linear map of the plane) is `|alpha| + |beta|`
/// and it is invertible iff `|alpha| != |beta|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineConjOp {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl AffineConjOp {
    pub fn new(alpha: Complex64, beta: Complex64) -> Self {
        Self { alpha, beta }
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        self.alpha * w + self.beta * w.conj()
    }

    /// `|alpha| + |beta|`, the exact operator norm; the supremum of
    /// `|apply(w)|` over `|w| = 1` is attained where the two phases align.
    pub fn norm(&self) -> f64 {
        self.alpha.norm() + self.beta.norm()
    }

    /// Inverse operator `(1 / (|alpha|^2 - |beta|^2)) * (conj(alpha)*w - beta*conj(w))`.
    ///
    /// Errors when `|alpha| == |beta|` (the map collapses the plane onto a line).
    pub fn inverse(&self) -> Result<AffineConjOp> {
        let det = self.alpha.norm_sqr() - self.beta.norm_sqr();
        if det == 0.0 {
            return Err(Error::DegenerateOperator {
                modulus: self.alpha.norm(),
            });
        }
        Ok(AffineConjOp {
            alpha: self.alpha.conj() / det,
            beta: -self.beta / det,
        })
    }
}

/// Canonical ellipticity parameters together with the derived constants the
/// iteration uses. Construct through [`canonical_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub tau: f64,
    pub sigma: f64,
    /// Perturbation size; the series in the solver is a power series in this.
    pub t_norm: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl CanonicalParams {
    /// The normalized zeroth-order operator `w -> alpha0*w + beta0*conj(w)`.
    pub fn t0(&self) -> AffineConjOp {
        AffineConjOp::new(
            Complex64::new(self.alpha0, 0.0),
            Complex64::new(self.beta0, 0.0),
        )
    }
}

/// Build [`CanonicalParams`] from `(tau, sigma)`.
///
/// Both parameters must lie in `[0, 1)` (strong ellipticity). The degenerate
/// corner `tau = sigma = 0` is the Laplacian itself; by convention it carries
/// `(alpha0, beta0) = (1, 0)` so downstream formulas stay total, and
/// `t_norm = 0` removes every perturbation term anyway.
pub fn canonical_params(tau: f64, sigma: f64) -> Result<CanonicalParams> {
    for (name, v) in [("tau", tau), ("sigma", sigma)] {
        if !(0.0..1.0).contains(&v) || !v.is_finite() {
            return Err(Error::InvalidParam {
                name,
                value: v,
                reason: "strong ellipticity requires 0 <= value < 1",
            });
        }
    }
    let t_norm = (tau + sigma) / (1.0 + sigma * tau);
    let (alpha0, beta0) = if tau == 0.0 && sigma == 0.0 {
        (1.0, 0.0)
    } else {
        let d = (tau + sigma) * (1.0 - sigma * tau);
        (
            tau * (1.0 - sigma * sigma) / d,
            sigma * (1.0 - tau * tau) / d,
        )
    };
    Ok(CanonicalParams {
        tau,
        sigma,
        t_norm,
        alpha0,
        beta0,
    })
}
