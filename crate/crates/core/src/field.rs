//! Fields on the disk in mode representation.
//!
//! A [`DiskField`] stores, for every angular mode `|k| <= max_mode`, the
//! radial profile `c_k` on the grid nodes, so that
//! `f(rho e^{it}) = sum_k c_k(rho) e^{ikt}`. Profiles inherit the parity of
//! their mode index when extended across the center (see [`crate::grid`]).
//!
//! `analyze` / `synthesize` convert between value samples and modes (FFT in
//! the angle, barycentric interpolation in the radius). `wirtinger_derivatives`
//! applies
//!
//! ```text
//! d  = e^{-it} (d_rho - (i/rho) d_t) / 2      (mode k -> k-1)
//! db = e^{+it} (d_rho + (i/rho) d_t) / 2      (mode k -> k+1)
//! ```
//!
//! per mode via the parity differentiation matrices. Accuracy of the `1/rho`
//! term degrades for high modes near the center, where genuine smooth fields
//! are `O(rho^{|k|})` anyway.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{make_grid, GridRef};

#[derive(Debug, Clone)]
pub struct DiskField {
    grid: GridRef,
    /// Row-major (mode, radial): `coeffs[(k + K)*J + j]`.
    coeffs: Vec<Complex64>,
}

impl DiskField {
    pub fn zeros(grid: &GridRef) -> Self {
        let n = grid.mode_count() * grid.radial_count();
        DiskField {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    #[inline]
    fn idx(&self, k: i64) -> usize {
        let kk = self.grid.max_mode() as i64;
        assert!(k.abs() <= kk, "mode {k} outside band {kk}");
        ((k + kk) as usize) * self.grid.radial_count()
    }

    pub fn mode(&self, k: i64) -> &[Complex64] {
        let j = self.grid.radial_count();
        let i = self.idx(k);
        &self.coeffs[i..i + j]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut [Complex64] {
        let j = self.grid.radial_count();
        let i = self.idx(k);
        &mut self.coeffs[i..i + j]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &DiskField, s: Complex64) -> Result<()> {
        if !self.grid.compatible(&other.grid) {
            return Err(Error::GridMismatch("add_scaled operands"));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, s: Complex64) {
        for a in self.coeffs.iter_mut() {
            *a *= s;
        }
    }

    /// Value of each mode profile extrapolated to the boundary `rho = 1`,
    /// indexed `k = -K..=K`.
    pub fn mode_trace(&self) -> Vec<Complex64> {
        let kk = self.grid.max_mode() as i64;
        (-kk..=kk)
            .map(|k| {
                let parity = if k.rem_euclid(2) == 0 { 1 } else { -1 };
                self.grid.interp_value(parity, self.mode(k), 1.0)
            })
            .collect()
    }

    /// Largest coefficient magnitude; cheap roughness scale for tests.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Write the `k,j,r,re,im` coefficient table.
    pub fn write_coeffs_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,j,r,re,im")?;
        let kk = self.grid.max_mode() as i64;
        for k in -kk..=kk {
            for (j, &r) in self.grid.radial_nodes().iter().enumerate() {
                let c = self.mode(k)[j];
                writeln!(w, "{},{},{},{},{}", k, j, r, c.re, c.im)?;
            }
        }
        Ok(())
    }
}

fn parity_of(k: i64) -> i32 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Mode coefficients from value samples `samples[j*M + m] = f(rho_j e^{i t_m})`.
pub fn analyze(grid: &GridRef, samples: &[Complex64]) -> Result<DiskField> {
    let j_count = grid.radial_count();
    let m_count = grid.angular_count();
    if samples.len() != j_count * m_count {
        return Err(Error::DimensionMismatch {
            expected: j_count * m_count,
            got: samples.len(),
        });
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m_count);
    let mut field = DiskField::zeros(grid);
    let kk = grid.max_mode() as i64;
    let inv_m = 1.0 / m_count as f64;
    let mut row = vec![Complex64::new(0.0, 0.0); m_count];
    for j in 0..j_count {
        row.copy_from_slice(&samples[j * m_count..(j + 1) * m_count]);
        fft.process(&mut row);
        for k in -kk..=kk {
            let bin = k.rem_euclid(m_count as i64) as usize;
            field.mode_mut(k)[j] = row[bin] * inv_m;
        }
    }
    Ok(field)
}

/// Sample a pointwise-defined function on the grid and analyze it.
pub fn sample_field<F: Fn(Complex64) -> Complex64>(grid: &GridRef, f: F) -> DiskField {
    let j_count = grid.radial_count();
    let m_count = grid.angular_count();
    let mut samples = vec![Complex64::new(0.0, 0.0); j_count * m_count];
    for (j, &r) in grid.radial_nodes().iter().enumerate() {
        for m in 0..m_count {
            let t = 2.0 * PI * m as f64 / m_count as f64;
            samples[j * m_count + m] = f(Complex64::from_polar(r, t));
        }
    }
    analyze(grid, &samples).expect("sample dimensions are consistent by construction")
}

/// Values on the grid nodes, row-major (radial, angular), via inverse FFT.
pub fn grid_values(field: &DiskField) -> Vec<Complex64> {
    values_at_angles(field, field.grid().angular_count())
}

fn values_at_angles(field: &DiskField, m_count: usize) -> Vec<Complex64> {
    let grid = field.grid();
    let j_count = grid.radial_count();
    let kk = grid.max_mode() as i64;
    assert!(m_count >= grid.mode_count());
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(m_count);
    let mut out = vec![Complex64::new(0.0, 0.0); j_count * m_count];
    let mut spec = vec![Complex64::new(0.0, 0.0); m_count];
    for j in 0..j_count {
        spec.fill(Complex64::new(0.0, 0.0));
        for k in -kk..=kk {
            let bin = k.rem_euclid(m_count as i64) as usize;
            spec[bin] = field.mode(k)[j];
        }
        ifft.process(&mut spec);
        out[j * m_count..(j + 1) * m_count].copy_from_slice(&spec);
    }
    out
}

/// Evaluate the field at arbitrary points `(r, t)`, `0 <= r <= 1`.
pub fn synthesize(field: &DiskField, points: &[(f64, f64)]) -> Result<Vec<Complex64>> {
    let grid = field.grid();
    let kk = grid.max_mode() as i64;
    let mut out = Vec::with_capacity(points.len());
    for &(r, t) in points {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RadiusOutOfRange(r));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kk..=kk {
            let c = grid.interp_value(parity_of(k), field.mode(k), r);
            acc += c * Complex64::from_polar(1.0, k as f64 * t);
        }
        out.push(acc);
    }
    Ok(out)
}

/// `L^p` norm over the disk, `1 < p < infinity`, by grid quadrature.
pub fn lp_norm(field: &DiskField, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParam {
            name: "p",
            value: p,
            reason: "need 1 < p < infinity",
        });
    }
    let grid = field.grid();
    let m_count = grid.angular_count();
    let values = grid_values(field);
    let dtheta = 2.0 * PI / m_count as f64;
    let mut acc = 0.0;
    for (j, &w) in grid.radial_weights().iter().enumerate() {
        let mut ring = 0.0;
        for m in 0..m_count {
            ring += values[j * m_count + m].norm().powf(p);
        }
        acc += w * ring * dtheta;
    }
    Ok(acc.powf(1.0 / p))
}

/// Discrete `L^2(disk)` inner product `<a, b>` via the radial quadrature and
/// mode orthogonality (`2 pi sum_k sum_j w_j a_k(r_j) conj(b_k(r_j))`).
pub fn inner_product(a: &DiskField, b: &DiskField) -> Result<Complex64> {
    if !a.grid().compatible(b.grid()) {
        return Err(Error::GridMismatch("inner_product operands"));
    }
    let grid = a.grid();
    let j_count = grid.radial_count();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, (x, y)) in a.coeffs().iter().zip(b.coeffs()).enumerate() {
        acc += grid.radial_weights()[i % j_count] * x * y.conj();
    }
    Ok(acc * (2.0 * PI))
}

/// Pointwise complex conjugate: `c'_k(r) = conj(c_{-k}(r))`.
pub fn conj_field(field: &DiskField) -> DiskField {
    let grid = field.grid();
    let kk = grid.max_mode() as i64;
    let mut out = DiskField::zeros(grid);
    for k in -kk..=kk {
        let src = field.mode(-k);
        for (d, s) in out.mode_mut(k).iter_mut().zip(src) {
            *d = s.conj();
        }
    }
    out
}

/// Wirtinger derivatives `(d f, db f)` in mode space.
///
/// Content at the band edges `|k| = max_mode` shifts out of the retained band
/// and is truncated; keep the band comfortably above the data band.
pub fn wirtinger_derivatives(field: &DiskField) -> (DiskField, DiskField) {
    let grid = field.grid();
    let kk = grid.max_mode() as i64;
    let j_count = grid.radial_count();
    let mut d = DiskField::zeros(grid);
    let mut db = DiskField::zeros(grid);
    let mut deriv = vec![Complex64::new(0.0, 0.0); j_count];
    for k in -kk..=kk {
        let c = field.mode(k).to_vec();
        grid.radial_derivative(parity_of(k), &c, &mut deriv);
        // d:  mode k-1 profile (c' + k c / rho)/2
        if k - 1 >= -kk {
            let dst = d.mode_mut(k - 1);
            for (j, &r) in grid.radial_nodes().iter().enumerate() {
                dst[j] += (deriv[j] + c[j] * (k as f64 / r)) * 0.5;
            }
        }
        // db: mode k+1 profile (c' - k c / rho)/2
        if k + 1 <= kk {
            let dst = db.mode_mut(k + 1);
            for (j, &r) in grid.radial_nodes().iter().enumerate() {
                dst[j] += (deriv[j] - c[j] * (k as f64 / r)) * 0.5;
            }
        }
    }
    (d, db)
}

/// Pointwise product, computed on an angular grid padded to avoid aliasing
/// of the doubled band back into `|k| <= max_mode`.
pub fn multiply(a: &DiskField, b: &DiskField) -> Result<DiskField> {
    if !a.grid().compatible(b.grid()) {
        return Err(Error::GridMismatch("multiply operands"));
    }
    let grid = a.grid();
    let kk = grid.max_mode() as i64;
    let j_count = grid.radial_count();
    let m_pad = (4 * grid.max_mode() + 2).next_power_of_two();
    let va = values_at_angles(a, m_pad);
    let vb = values_at_angles(b, m_pad);
    let mut prod: Vec<Complex64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m_pad);
    let mut out = DiskField::zeros(grid);
    let inv_m = 1.0 / m_pad as f64;
    for j in 0..j_count {
        let row = &mut prod[j * m_pad..(j + 1) * m_pad];
        fft.process(row);
        for k in -kk..=kk {
            let bin = k.rem_euclid(m_pad as i64) as usize;
            out.mode_mut(k)[j] = row[bin] * inv_m;
        }
    }
    Ok(out)
}

/// Grid plus band used by operator tests; kept here so callers get one-stop
/// construction of a field for a closed-form function.
pub fn field_of(max_mode: usize, radial_count: usize, f: impl Fn(Complex64) -> Complex64) -> DiskField {
    let grid = make_grid(max_mode, radial_count).expect("valid sizes");
    sample_field(&grid, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn analyze_pure_mode() {
        let grid = make_grid(4, 8).unwrap();
        let f = sample_field(&grid, |z| {
            let t = z.arg();
            Complex64::from_polar(1.0, t)
        });
        for (j, _) in grid.radial_nodes().iter().enumerate() {
            assert!((f.mode(1)[j] - c(1.0, 0.0)).norm() < 1e-13);
        }
        for k in [-4i64, -3, -2, -1, 0, 2, 3, 4] {
            for v in f.mode(k) {
                assert!(v.norm() < 1e-13, "leak into mode {k}");
            }
        }
    }

    #[test]
    fn analyze_radial_mode_zero() {
        let grid = make_grid(4, 8).unwrap();
        let f = sample_field(&grid, |z| c(z.norm_sqr(), 0.0));
        for (j, &r) in grid.radial_nodes().iter().enumerate() {
            assert!((f.mode(0)[j].re - r * r).abs() < 1e-13);
        }
    }

    #[test]
    fn round_trip_polynomial() {
        let grid = make_grid(6, 10).unwrap();
        let f = sample_field(&grid, |z| z.powu(3) + 2.0 * z.conj());
        let pts: Vec<(f64, f64)> = vec![(0.0, 0.0), (0.3, 1.1), (0.77, 4.0), (1.0, 2.2)];
        let vals = synthesize(&f, &pts).unwrap();
        for (i, &(r, t)) in pts.iter().enumerate() {
            let z = Complex64::from_polar(r, t);
            let exact = z.powu(3) + 2.0 * z.conj();
            assert!((vals[i] - exact).norm() < 1e-12, "point {i}");
        }
    }

    #[test]
    fn synthesize_spec_values() {
        let grid = make_grid(4, 8).unwrap();
        let fz = sample_field(&grid, |z| z);
        let v = synthesize(&fz, &[(0.5, 0.0)]).unwrap();
        assert!((v[0] - c(0.5, 0.0)).norm() < 1e-13);
        let fzb2 = sample_field(&grid, |z| z.conj() * z.conj());
        let v = synthesize(&fzb2, &[(1.0, PI / 2.0)]).unwrap();
        assert!((v[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(synthesize(&fz, &[(1.2, 0.0)]).is_err());
    }

    #[test]
    fn lp_norm_closed_forms() {
        let grid = make_grid(4, 16).unwrap();
        let one = sample_field(&grid, |_| c(1.0, 0.0));
        assert!((lp_norm(&one, 2.0).unwrap() - PI.sqrt()).abs() < 1e-12);
        let z = sample_field(&grid, |z| z);
        assert!((lp_norm(&z, 2.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-12);
        assert!((lp_norm(&z, 4.0).unwrap() - (PI / 3.0).powf(0.25)).abs() < 1e-12);
        assert!(lp_norm(&z, 1.0).is_err());
        assert!(lp_norm(&z, f64::INFINITY).is_err());
    }

    #[test]
    fn parseval_matches_quadrature() {
        let grid = make_grid(6, 16).unwrap();
        let f = sample_field(&grid, |z| {
            z.powu(2) * 1.5 + z.conj().powu(3) * c(0.2, -0.7) + c(0.1, 0.0)
        });
        let by_norm = lp_norm(&f, 2.0).unwrap().powi(2);
        let kk = grid.max_mode() as i64;
        let mut by_modes = 0.0;
        for k in -kk..=kk {
            for (j, &w) in grid.radial_weights().iter().enumerate() {
                by_modes += 2.0 * PI * w * f.mode(k)[j].norm_sqr();
            }
        }
        assert!((by_norm - by_modes).abs() < 1e-12 * by_norm.max(1.0));
    }

    #[test]
    fn wirtinger_on_polynomials() {
        let grid = make_grid(6, 12).unwrap();
        // f = z^2 zbar => d = 2 z zbar, db = z^2
        let f = sample_field(&grid, |z| z * z * z.conj());
        let (d, db) = wirtinger_derivatives(&f);
        let pts = [(0.3, 0.4), (0.8, 2.0), (0.15, 5.5)];
        let dv = synthesize(&d, &pts).unwrap();
        let dbv = synthesize(&db, &pts).unwrap();
        for (i, &(r, t)) in pts.iter().enumerate() {
            let z = Complex64::from_polar(r, t);
            assert!((dv[i] - 2.0 * z * z.conj()).norm() < 1e-10);
            assert!((dbv[i] - z * z).norm() < 1e-10);
        }
    }

    #[test]
    fn conj_field_matches_pointwise() {
        let grid = make_grid(5, 10).unwrap();
        let f = sample_field(&grid, |z| z.powu(2) * c(0.3, 1.0) + z.conj() * c(0.0, -2.0));
        let g = conj_field(&f);
        let pts = [(0.45, 1.0), (0.9, 3.3)];
        let fv = synthesize(&f, &pts).unwrap();
        let gv = synthesize(&g, &pts).unwrap();
        for i in 0..pts.len() {
            assert!((gv[i] - fv[i].conj()).norm() < 1e-12);
        }
        // involution
        let h = conj_field(&g);
        for (a, b) in h.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn multiply_is_alias_free_in_band() {
        let grid = make_grid(24, 32).unwrap();
        // Both factors have content near the band edge; a naive product on the
        // grid's own angular count would fold modes 40..48 into the band.
        let a = sample_field(&grid, |z| z.powu(20) + 1.0);
        let b = sample_field(&grid, |z| z.conj().powu(20) + z.powu(4));
        let p = multiply(&a, &b).unwrap();
        let pts = [(0.7, 0.9), (0.95, 2.4), (0.2, 0.1)];
        let pv = synthesize(&p, &pts).unwrap();
        for (i, &(r, t)) in pts.iter().enumerate() {
            let z = Complex64::from_polar(r, t);
            // (z^20 + 1)(zbar^20 + z^4) = |z|^40 + z^24 + zbar^20 + z^4,
            // every term inside |mode| <= 24
            let exact = Complex64::new(z.norm_sqr().powi(20), 0.0)
                + z.powu(24)
                + z.conj().powu(20)
                + z.powu(4);
            assert!((pv[i] - exact).norm() < 1e-10, "point {i}");
        }
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let grid = make_grid(1, 4).unwrap();
        let f = sample_field(&grid, |z| z);
        let mut buf = Vec::new();
        f.write_coeffs_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,j,r,re,im");
        assert_eq!(text.lines().count(), 1 + 3 * 4);
    }

    #[test]
    fn analyze_rejects_bad_shape() {
        let grid = make_grid(2, 6).unwrap();
        let res = analyze(&grid, &vec![c(0.0, 0.0); 5]);
        assert!(res.is_err());
    }
}
