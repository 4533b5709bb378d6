//! Conformal map of the disk onto the target domain, as a truncated power
//! series `w(z) = sum_m a_m z^m`.
//!
//! The geometry enters the transplanted equation only through the frame
//! factor `Omega = conj(w')/w'`, a unimodular field on the disk. The map is
//! never inverted: solution samples are reported at forward-mapped points.
//!
//! Univalence is enforced by the sufficient coefficient test
//! `sum_{m>=2} m |a_m| < |a_1|`, which bounds `|w'(z) - a_1|` on the closed
//! disk away from `|a_1|`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{sample_field, DiskField};
use crate::grid::GridRef;

#[derive(Debug, Clone)]
pub struct ConformalMapSeries {
    /// `a_m` for `m = 0..=M`; `a_1 != 0` by construction.
    coeffs: Vec<Complex64>,
}

impl ConformalMapSeries {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs[1].norm() == 0.0 {
            return Err(Error::InvalidParam {
                name: "a_1",
                value: coeffs.get(1).map(|c| c.norm()).unwrap_or(0.0),
                reason: "linear coefficient must be nonzero",
            });
        }
        Ok(ConformalMapSeries { coeffs })
    }

    pub fn identity() -> Self {
        ConformalMapSeries {
            coeffs: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn affine(a: Complex64, b: Complex64) -> Result<Self> {
        Self::from_coeffs(vec![b, a])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `|a_1| - sum_{m>=2} m |a_m|`; positive margin certifies injectivity
    /// and `w' != 0` on the closed disk.
    pub fn univalence_margin(&self) -> f64 {
        let head = self.coeffs[1].norm();
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(2)
            .map(|(m, a)| m as f64 * a.norm())
            .sum();
        head - tail
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        acc
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (1..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[m] * m as f64;
        }
        acc
    }

    pub fn deriv2(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in (2..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[m] * (m * (m - 1)) as f64;
        }
        acc
    }

    /// The frame factor `Omega = conj(w')/w'` sampled on the grid.
    pub fn derivative_ratio(&self, grid: &GridRef) -> Result<DiskField> {
        let margin = self.univalence_margin();
        if margin <= 0.0 {
            return Err(Error::NonUnivalentMap { margin });
        }
        Ok(sample_field(grid, |z| {
            let d = self.deriv(z);
            d.conj() / d
        }))
    }

    /// Forward images of disk points `(r, t)`.
    pub fn pushforward(&self, points: &[(f64, f64)]) -> Vec<Complex64> {
        points
            .iter()
            .map(|&(r, t)| self.eval(Complex64::from_polar(r, t)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::synthesize;
    use crate::grid::make_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ratio_for_identity_is_one() {
        let grid = make_grid(6, 8).unwrap();
        let omega = ConformalMapSeries::identity().derivative_ratio(&grid).unwrap();
        let v = synthesize(&omega, &[(0.3, 1.0), (0.9, 4.0)]).unwrap();
        for x in v {
            assert!((x - c(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn ratio_for_affine_is_constant() {
        let grid = make_grid(6, 8).unwrap();
        let map = ConformalMapSeries::affine(c(2.0, 1.0), c(0.3, 0.0)).unwrap();
        let omega = map.derivative_ratio(&grid).unwrap();
        let v = synthesize(&omega, &[(0.5, 0.7)]).unwrap();
        let expect = c(2.0, -1.0) / c(2.0, 1.0); // (3-4i)/5
        assert!((v[0] - expect).norm() < 1e-13);
        assert!((expect - c(0.6, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn ratio_example_quadratic_map() {
        let grid = make_grid(16, 16).unwrap();
        let map =
            ConformalMapSeries::from_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)]).unwrap();
        let omega = map.derivative_ratio(&grid).unwrap();
        let v = synthesize(&omega, &[(0.5, std::f64::consts::PI / 2.0)]).unwrap();
        let expect = c(1.0, -0.2) / c(1.0, 0.2);
        assert!((v[0] - expect).norm() < 1e-10);
    }

    #[test]
    fn ratio_is_unimodular_on_grid() {
        // |Omega| = 1 holds pointwise; the banded representation reproduces it
        // once the band resolves Omega's angular tail. The tail decay rate is
        // set by the root radius of w' (about 5.8 here), so K = 24 leaves a
        // tail near 1e-19.
        let grid = make_grid(24, 16).unwrap();
        let map = ConformalMapSeries::from_coeffs(vec![
            c(0.0, 0.0),
            c(1.0, 0.0),
            c(0.02, 0.0),
            c(0.0, 0.01),
        ])
        .unwrap();
        let omega = map.derivative_ratio(&grid).unwrap();
        let values = crate::field::grid_values(&omega);
        for v in values {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pushforward_examples() {
        let map =
            ConformalMapSeries::from_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0)]).unwrap();
        let pts = map.pushforward(&[(1.0, 0.0), (1.0, std::f64::consts::PI / 2.0)]);
        assert!((pts[0] - c(1.2, 0.0)).norm() < 1e-14);
        assert!((pts[1] - c(-0.2, 1.0)).norm() < 1e-14);
        let id = ConformalMapSeries::identity();
        let p = id.pushforward(&[(0.7, 1.3)]);
        assert!((p[0] - Complex64::from_polar(0.7, 1.3)).norm() < 1e-15);
    }

    #[test]
    fn univalence_margin_and_rejection() {
        let bad =
            ConformalMapSeries::from_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.6, 0.0)]).unwrap();
        assert!(bad.univalence_margin() < 0.0);
        let grid = make_grid(4, 6).unwrap();
        assert!(matches!(
            bad.derivative_ratio(&grid),
            Err(Error::NonUnivalentMap { .. })
        ));
        assert!(ConformalMapSeries::from_coeffs(vec![c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn margin_monotone_under_tail_scaling() {
        let coeffs = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.1)];
        let m1 = ConformalMapSeries::from_coeffs(coeffs.clone())
            .unwrap()
            .univalence_margin();
        let scaled: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(m, &a)| if m >= 2 { a * 0.5 } else { a })
            .collect();
        let m2 = ConformalMapSeries::from_coeffs(scaled)
            .unwrap()
            .univalence_margin();
        assert!(m2 > m1);
    }
}
