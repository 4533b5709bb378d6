//! The disk integral operators: boundary extension P and the volume
//! operators K, K_d, K_db built from the Green function of `d db` on the
//! disk.
//!
//! Everything is reduced per angular mode. Writing the input as
//! `phi = c(rho) e^{ik theta}` and expanding the kernels in geometric series,
//! the angular integral selects a single output mode and leaves 1-D radial
//! integrals:
//!
//! ```text
//! K:    mode k -> k-1
//!   k >= 1:  2 int_r^1 c(s) (r/s)^{k-1} ds
//!   k <= 0: -2 int_0^r c(s) (s/r)^{1-k} ds + 2 r^{1-k} S_k,
//!            S_k = int_0^1 c(s) s^{1-k} ds           (reflected kernel)
//! K_d:  mode k -> k-2   (equals d of the K output, including the local
//!                        term the principal value contributes)
//!   k >= 1:  (2(k-1)/r) int_r^1 c(s)(r/s)^{k-1} ds - c(r)
//!   k <= 0:  (2(1-k)/r) int_0^r c(s)(s/r)^{1-k} ds - c(r)
//! K_db: mode k -> k
//!   k >= 1:  -c(r)
//!   k <= 0:  2(1-k) r^{-k} S_k - c(r)
//! ```
//!
//! The split integrals are accumulated by telescoping between adjacent nodes
//! with local Gauss-Legendre panels: the carried term is damped by
//! `(r_j/r_{j+1})^{|k|-ish} <= 1`, so high modes stay stable where a direct
//! cumulative evaluation of `(r/s)^{k-1}` across the whole radius would
//! amplify roundoff by many orders of magnitude. `S_k` uses the grid weights
//! themselves: the integrand `c(s) s^{-k} * s` is even, exactly inside the
//! quadrature's polynomial-exactness range for bands below the radial count,
//! which is what pins the discrete rank-one structure of K_db (and its unit
//! operator norm) down to rounding.

use std::fmt;

use num_complex::Complex64;

use crate::boundary::BoundaryFunction;
use crate::error::{Error, Result};
use crate::field::DiskField;
use crate::grid::{gauss_legendre, GridRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelId {
    GreenK,
    BeurlingKd,
    Kdbar,
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelId::GreenK => "green_k",
            KernelId::BeurlingKd => "beurling_kd",
            KernelId::Kdbar => "kdbar",
        })
    }
}

fn parity_of(k: i64) -> i32 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Harmonic extension of boundary data together with its two Wirtinger
/// derivatives, all computed mode-analytically:
/// `F0 = sum_{k>=0} h_k z^k + sum_{k<0} h_k conj(z)^{|k|}`.
pub fn poisson_extend(
    h: &BoundaryFunction,
    grid: &GridRef,
) -> Result<(DiskField, DiskField, DiskField)> {
    if h.max_mode() > grid.max_mode() {
        return Err(Error::GridMismatch("boundary band exceeds grid band"));
    }
    let kk = grid.max_mode() as i64;
    let r = grid.radial_nodes().to_vec();
    let mut f0 = DiskField::zeros(grid);
    let mut df = DiskField::zeros(grid);
    let mut dbf = DiskField::zeros(grid);
    for k in -kk..=kk {
        let hk = h.coeff(k);
        if hk.norm() == 0.0 {
            continue;
        }
        let a = k.unsigned_abs() as i32;
        let dst = f0.mode_mut(k);
        for (j, &rj) in r.iter().enumerate() {
            dst[j] = hk * rj.powi(a);
        }
        if k >= 1 {
            let dst = df.mode_mut(k - 1);
            for (j, &rj) in r.iter().enumerate() {
                dst[j] += hk * (k as f64) * rj.powi(a - 1);
            }
        } else if k <= -1 {
            let dst = dbf.mode_mut(k + 1);
            for (j, &rj) in r.iter().enumerate() {
                dst[j] += hk * (-k as f64) * rj.powi(a - 1);
            }
        }
    }
    Ok((f0, df, dbf))
}

/// Per-mode matrices of the three volume operators on a fixed grid.
/// Assembly is O(modes * nodes^2 * panel_order); applications are plain
/// matrix-vector products per mode.
pub struct DiskOps {
    grid: GridRef,
    /// K matrices, input mode k at index k + K; J*J row-major.
    green: Vec<Vec<f64>>,
    /// K_d matrices, same indexing (local -I already folded in).
    beurling: Vec<Vec<f64>>,
    /// K_db rank-one factors for k <= 0: output column 2(1-k) r^{-k} ...
    kdbar_col: Vec<Option<Vec<f64>>>,
    /// ... against moment row s_k[q] = w_q r_q^{-k}.
    kdbar_row: Vec<Option<Vec<f64>>>,
}

impl DiskOps {
    pub fn new(grid: &GridRef) -> Self {
        let j_count = grid.radial_count();
        let kk = grid.max_mode() as i64;
        let r = grid.radial_nodes();
        let w = grid.radial_weights();
        let mode_count = grid.mode_count();
        let mut green = Vec::with_capacity(mode_count);
        let mut beurling = Vec::with_capacity(mode_count);
        let mut kdbar_col = Vec::with_capacity(mode_count);
        let mut kdbar_row = Vec::with_capacity(mode_count);
        let mut interp = vec![0.0; j_count];
        for k in -kk..=kk {
            let parity = parity_of(k);
            let n_gl = j_count + k.unsigned_abs() as usize / 2 + 8;
            let (gx, gw) = gauss_legendre(n_gl);
            let mut rows = vec![0.0; j_count * j_count];
            if k >= 1 {
                // outer integrals int_r^1, telescoped downward
                let e = (k - 1) as i32;
                for j in (0..j_count).rev() {
                    let a = r[j];
                    let b = if j + 1 < j_count { r[j + 1] } else { 1.0 };
                    if j + 1 < j_count {
                        let decay = (a / b).powi(e);
                        let (head, tail) = rows.split_at_mut((j + 1) * j_count);
                        for q in 0..j_count {
                            head[j * j_count + q] = decay * tail[q];
                        }
                    }
                    let half = 0.5 * (b - a);
                    let mid = 0.5 * (a + b);
                    for g in 0..n_gl {
                        let x = mid + half * gx[g];
                        let fw = gw[g] * half * (a / x).powi(e);
                        grid.interp_row(parity, x, &mut interp);
                        for q in 0..j_count {
                            rows[j * j_count + q] += fw * interp[q];
                        }
                    }
                }
                let mut gm = vec![0.0; j_count * j_count];
                let mut bm = vec![0.0; j_count * j_count];
                for j in 0..j_count {
                    let db = 2.0 * e as f64 / r[j];
                    for q in 0..j_count {
                        gm[j * j_count + q] = 2.0 * rows[j * j_count + q];
                        bm[j * j_count + q] = db * rows[j * j_count + q];
                    }
                    bm[j * j_count + j] -= 1.0;
                }
                green.push(gm);
                beurling.push(bm);
                kdbar_col.push(None);
                kdbar_row.push(None);
            } else {
                // inner integrals int_0^r, telescoped upward from [0, r_1]
                let e = (1 - k) as i32;
                for j in 0..j_count {
                    let (a, b) = if j == 0 { (0.0, r[0]) } else { (r[j - 1], r[j]) };
                    if j > 0 {
                        let decay = (a / b).powi(e);
                        let (head, tail) = rows.split_at_mut(j * j_count);
                        for q in 0..j_count {
                            tail[q] = decay * head[(j - 1) * j_count + q];
                        }
                    }
                    let half = 0.5 * (b - a);
                    let mid = 0.5 * (a + b);
                    for g in 0..n_gl {
                        let x = mid + half * gx[g];
                        let fw = gw[g] * half * (x / b).powi(e);
                        grid.interp_row(parity, x, &mut interp);
                        for q in 0..j_count {
                            rows[j * j_count + q] += fw * interp[q];
                        }
                    }
                }
                let s: Vec<f64> = (0..j_count).map(|q| w[q] * r[q].powi(e - 1)).collect();
                let mut gm = vec![0.0; j_count * j_count];
                let mut bm = vec![0.0; j_count * j_count];
                for j in 0..j_count {
                    let refl = 2.0 * r[j].powi(e);
                    let db = 2.0 * e as f64 / r[j];
                    for q in 0..j_count {
                        gm[j * j_count + q] = -2.0 * rows[j * j_count + q] + refl * s[q];
                        bm[j * j_count + q] = db * rows[j * j_count + q];
                    }
                    bm[j * j_count + j] -= 1.0;
                }
                green.push(gm);
                beurling.push(bm);
                kdbar_col.push(Some(
                    (0..j_count)
                        .map(|j| 2.0 * e as f64 * r[j].powi(e - 1))
                        .collect(),
                ));
                kdbar_row.push(Some(s));
            }
        }
        DiskOps {
            grid: grid.clone(),
            green,
            beurling,
            kdbar_col,
            kdbar_row,
        }
    }

    pub fn grid(&self) -> &GridRef {
        &self.grid
    }

    fn check(&self, phi: &DiskField) -> Result<()> {
        if !self.grid.compatible(phi.grid()) {
            return Err(Error::GridMismatch("operator and field grids differ"));
        }
        Ok(())
    }

    #[inline]
    fn midx(&self, k: i64) -> usize {
        (k + self.grid.max_mode() as i64) as usize
    }

    pub fn apply(&self, kernel: KernelId, phi: &DiskField) -> Result<DiskField> {
        match kernel {
            KernelId::GreenK => self.green_volume_k(phi),
            KernelId::BeurlingKd => self.beurling_kd(phi),
            KernelId::Kdbar => self.kdbar(phi),
        }
    }

    /// K[phi]: solution operator content, vanishing on the boundary circle.
    pub fn green_volume_k(&self, phi: &DiskField) -> Result<DiskField> {
        self.check(phi)?;
        let kk = self.grid.max_mode() as i64;
        let j_count = self.grid.radial_count();
        let mut out = DiskField::zeros(&self.grid);
        for k in -kk..=kk {
            let m = k - 1;
            if m < -kk {
                continue;
            }
            matvec(&self.green[self.midx(k)], phi.mode(k), out.mode_mut(m), j_count);
        }
        // The analytic trace is zero; pin the interpolated trace to zero so the
        // partial sums attain the boundary data to rounding, not to quadrature.
        let r = self.grid.radial_nodes().to_vec();
        for m in -kk..=kk {
            let t = self.grid.interp_value(parity_of(m), out.mode(m), 1.0);
            if t.norm() > 0.0 {
                let a = m.unsigned_abs() as i32;
                let dst = out.mode_mut(m);
                for (j, &rj) in r.iter().enumerate() {
                    dst[j] -= t * rj.powi(a);
                }
            }
        }
        Ok(out)
    }

    /// K_d[phi]: the principal-value derivative kernel (Beurling transform
    /// restricted to the disk, plus the reflected part).
    pub fn beurling_kd(&self, phi: &DiskField) -> Result<DiskField> {
        self.check(phi)?;
        let kk = self.grid.max_mode() as i64;
        let j_count = self.grid.radial_count();
        let mut out = DiskField::zeros(&self.grid);
        for k in -kk..=kk {
            let m = k - 2;
            if m < -kk {
                continue;
            }
            matvec(&self.beurling[self.midx(k)], phi.mode(k), out.mode_mut(m), j_count);
        }
        Ok(out)
    }

    /// K_db[phi]: identity-plus-rank-one per mode; mode-preserving.
    pub fn kdbar(&self, phi: &DiskField) -> Result<DiskField> {
        self.check(phi)?;
        let kk = self.grid.max_mode() as i64;
        let mut out = DiskField::zeros(&self.grid);
        for k in -kk..=kk {
            let src = phi.mode(k).to_vec();
            let dst = out.mode_mut(k);
            match (&self.kdbar_col[self.midx(k)], &self.kdbar_row[self.midx(k)]) {
                (Some(col), Some(row)) => {
                    let dot: Complex64 = row
                        .iter()
                        .zip(&src)
                        .map(|(s, c)| c * *s)
                        .sum();
                    for j in 0..dst.len() {
                        dst[j] = col[j] * dot - src[j];
                    }
                }
                _ => {
                    for j in 0..dst.len() {
                        dst[j] = -src[j];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Adjoint of `apply(kernel, _)` in the discrete quadrature inner
    /// product; used by operator-norm estimation.
    pub fn apply_adjoint(&self, kernel: KernelId, psi: &DiskField) -> Result<DiskField> {
        self.check(psi)?;
        if kernel == KernelId::Kdbar {
            // mode-diagonal and self-adjoint in the weighted inner product
            return self.kdbar(psi);
        }
        let kk = self.grid.max_mode() as i64;
        let j_count = self.grid.radial_count();
        let w = self.grid.radial_weights().to_vec();
        let mut out = DiskField::zeros(&self.grid);
        let shift = if kernel == KernelId::GreenK { 1 } else { 2 };
        for k in -kk..=kk {
            let m = k - shift;
            if m < -kk {
                continue;
            }
            let mat = if kernel == KernelId::GreenK {
                &self.green[self.midx(k)]
            } else {
                &self.beurling[self.midx(k)]
            };
            let src = psi.mode(m).to_vec();
            let dst = out.mode_mut(k);
            for q in 0..j_count {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, sj) in src.iter().enumerate() {
                    acc += *sj * (mat[j * j_count + q] * w[j]);
                }
                dst[q] = acc / w[q];
            }
        }
        Ok(out)
    }
}

fn matvec(mat: &[f64], src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for j in 0..n {
        let row = &mat[j * n..(j + 1) * n];
        let mut acc = Complex64::new(0.0, 0.0);
        for (q, &c) in src.iter().enumerate() {
            acc += c * row[q];
        }
        dst[j] = acc;
    }
}
