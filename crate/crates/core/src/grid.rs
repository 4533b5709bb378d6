//! Polar spectral grid on the unit disk.
//!
//! Angular direction: equispaced nodes `t_m = 2 pi m / M` carrying Fourier
//! modes `|k| <= max_mode`. Radial direction: the positive roots of `T_{2J}`,
//!
//! ```text
//! rho_j = cos((2(J-j)+1) pi / (4J)),   j = 1..J,   0 < rho_1 < ... < rho_J < 1,
//! ```
//!
//! i.e. the positive half of a 2J-point Chebyshev grid on (-1, 1). A mode-k
//! radial profile extends to the full diameter with parity
//! `c_k(-rho) = (-1)^k c_k(rho)`, and interpolation / differentiation act on
//! that implicit 2J-point grid, so smooth disk functions are represented with
//! spectral accuracy down to the center without placing a node at 0.
//!
//! Quadrature: with `s = 2 rho^2 - 1` the rule `int_0^1 f(rho) rho drho`
//! becomes a Fejér-1 rule in `s`, so all weights are positive and even powers
//! `rho^m`, `m <= 2J - 2`, integrate exactly. Odd radial powers are not exact
//! in isolation, but they cancel from any disk integral once the angular sum
//! over a pi-symmetric angular grid is taken, which is the only way the
//! weights are used.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Shared handle to an immutable grid.
pub type GridRef = Arc<PolarGrid>;

#[derive(Debug)]
pub struct PolarGrid {
    max_mode: usize,
    radial: Vec<f64>,
    weights: Vec<f64>,
    angular_count: usize,
    /// Barycentric weights at the positive nodes (mirror weight is the negative).
    lambda: Vec<f64>,
    /// Parity-folded differentiation matrices, row-major J x J.
    d_even: Vec<f64>,
    d_odd: Vec<f64>,
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Fejér-1 weight at angle `phi` for a J-point first-kind Chebyshev rule.
fn fejer1_weight(j_count: usize, phi: f64) -> f64 {
    let mut s = 0.0;
    for t in 1..=(j_count / 2) {
        s += (2.0 * t as f64 * phi).cos() / ((4 * t * t - 1) as f64);
    }
    (2.0 / j_count as f64) * (1.0 - 2.0 * s)
}

impl PolarGrid {
    pub fn max_mode(&self) -> usize {
        self.max_mode
    }

    /// Number of retained angular modes, `2*max_mode + 1`.
    pub fn mode_count(&self) -> usize {
        2 * self.max_mode + 1
    }

    pub fn radial_count(&self) -> usize {
        self.radial.len()
    }

    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial
    }

    /// Weights for `int_0^1 f(rho) rho drho ~ sum_j w_j f(rho_j)`; all positive.
    pub fn radial_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    pub fn angular_nodes(&self) -> Vec<f64> {
        (0..self.angular_count)
            .map(|m| 2.0 * PI * m as f64 / self.angular_count as f64)
            .collect()
    }

    /// Highest even power of rho the radial rule integrates exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.radial.len() - 2
    }

    /// Grids are interchangeable iff their defining sizes agree.
    pub fn compatible(&self, other: &PolarGrid) -> bool {
        self.max_mode == other.max_mode && self.radial.len() == other.radial.len()
    }

    /// Interpolation coefficients: value of the parity-respecting interpolant
    /// at radius `x` as a linear combination of the nodal values.
    /// `parity` is +1 for even modes, -1 for odd.
    pub(crate) fn interp_row(&self, parity: i32, x: f64, out: &mut [f64]) {
        let j_count = self.radial.len();
        debug_assert_eq!(out.len(), j_count);
        let p = parity as f64;
        // Exact node hit: indicator row.
        for q in 0..j_count {
            if (x - self.radial[q]).abs() < 1e-14 {
                out.fill(0.0);
                out[q] = 1.0;
                return;
            }
        }
        let mut den = 0.0;
        for q in 0..j_count {
            let a = 1.0 / (x - self.radial[q]);
            let b = 1.0 / (x + self.radial[q]);
            out[q] = self.lambda[q] * (a - p * b);
            den += self.lambda[q] * (a - b);
        }
        for v in out.iter_mut() {
            *v /= den;
        }
    }

    /// Evaluate the parity interpolant of nodal values at radius `x`.
    pub(crate) fn interp_value(
        &self,
        parity: i32,
        values: &[num_complex::Complex64],
        x: f64,
    ) -> num_complex::Complex64 {
        use num_complex::Complex64;
        let p = parity as f64;
        for q in 0..self.radial.len() {
            if (x - self.radial[q]).abs() < 1e-14 {
                return values[q];
            }
        }
        let mut num = Complex64::new(0.0, 0.0);
        let mut den = 0.0;
        for q in 0..self.radial.len() {
            let a = 1.0 / (x - self.radial[q]);
            let b = 1.0 / (x + self.radial[q]);
            num += values[q] * (self.lambda[q] * (a - p * b));
            den += self.lambda[q] * (a - b);
        }
        num / den
    }

    /// Differentiate nodal values of a profile with the given parity.
    pub(crate) fn radial_derivative(
        &self,
        parity: i32,
        values: &[num_complex::Complex64],
        out: &mut [num_complex::Complex64],
    ) {
        use num_complex::Complex64;
        let j_count = self.radial.len();
        let d = if parity > 0 { &self.d_even } else { &self.d_odd };
        for j in 0..j_count {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &d[j * j_count..(j + 1) * j_count];
            for q in 0..j_count {
                acc += values[q] * row[q];
            }
            out[j] = acc;
        }
    }
}

/// Build a grid carrying modes `|k| <= max_mode` on `radial_count` radial nodes.
///
/// `angular_count` is `2*max_mode + 2` rounded up to a power of two.
/// `radial_count` must be at least 4. For faithful Poisson profiles the radial
/// resolution should satisfy `2*radial_count - 1 >= max_mode`.
pub fn make_grid(max_mode: usize, radial_count: usize) -> Result<GridRef> {
    if radial_count < 4 {
        return Err(Error::InvalidParam {
            name: "radial_count",
            value: radial_count as f64,
            reason: "need at least 4 radial nodes",
        });
    }
    let j_count = radial_count;
    let mut radial = Vec::with_capacity(j_count);
    let mut lambda = Vec::with_capacity(j_count);
    let mut weights = Vec::with_capacity(j_count);
    for j in 1..=j_count {
        // theta decreasing in j => rho ascending.
        let theta = (2.0 * (j_count - j) as f64 + 1.0) * PI / (4.0 * j_count as f64);
        radial.push(theta.cos());
        // Full-grid barycentric weight at this node, global scale dropped.
        let full_idx = j_count - j; // 0-based descending-x index
        let sign = if full_idx % 2 == 0 { 1.0 } else { -1.0 };
        lambda.push(sign * theta.sin());
        // s = 2 rho^2 - 1 = cos(2 theta) is a first-kind Chebyshev node.
        weights.push(fejer1_weight(j_count, 2.0 * theta) / 4.0);
    }

    // Full 2J differentiation matrix, then parity folding.
    let two_j = 2 * j_count;
    let mut xs = vec![0.0; two_j];
    let mut lam = vec![0.0; two_j];
    for m in 0..two_j {
        let theta = (2.0 * m as f64 + 1.0) * PI / (4.0 * j_count as f64);
        xs[m] = theta.cos();
        lam[m] = if m % 2 == 0 { theta.sin() } else { -theta.sin() };
    }
    let mut d_full = vec![0.0; two_j * two_j];
    for a in 0..two_j {
        let mut diag = 0.0;
        for b in 0..two_j {
            if a == b {
                continue;
            }
            let v = (lam[b] / lam[a]) / (xs[a] - xs[b]);
            d_full[a * two_j + b] = v;
            diag -= v;
        }
        d_full[a * two_j + a] = diag;
    }
    // Positive node p (ascending rho) sits at full index J-1-p; its mirror at J+p.
    let mut d_even = vec![0.0; j_count * j_count];
    let mut d_odd = vec![0.0; j_count * j_count];
    for p in 0..j_count {
        let row = j_count - 1 - p;
        for q in 0..j_count {
            let col_pos = j_count - 1 - q;
            let col_neg = j_count + q;
            let d_pos = d_full[row * two_j + col_pos];
            let d_neg = d_full[row * two_j + col_neg];
            d_even[p * j_count + q] = d_pos + d_neg;
            d_odd[p * j_count + q] = d_pos - d_neg;
        }
    }

    let angular_count = next_pow2(2 * max_mode + 2);
    Ok(Arc::new(PolarGrid {
        max_mode,
        radial,
        weights,
        angular_count,
        lambda,
        d_even,
        d_odd,
    }))
}

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let wi = 2.0 / ((1.0 - x * x) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (nodes, w)
}
