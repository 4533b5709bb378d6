//! Slow ground truth for the volume-kernel operators: the defining integrals
//! evaluated by direct 2-D quadrature, with no per-mode reduction anywhere.
//!
//! Integration runs in polar coordinates centered at the evaluation point
//! `zeta = z + s*exp(i psi)`, which removes the `1/(zeta - z)` factor
//! entirely (the area element contributes the cancelling `s`) and turns the
//! `1/(zeta - z)^2` principal value into a `1/s` profile handled by
//! subtracting `phi(z)` along each ray: the subtracted log term is restored
//! in closed form through `log S(psi)`, while the `log epsilon` part
//! integrates to zero against `exp(-2i psi)`. The exclusion error is an even
//! series in epsilon starting at `epsilon^2 * d^2 phi / 2`, so one Richardson
//! step over `epsilon, epsilon/2` leaves `O(epsilon^4)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{synthesize, DiskField};
use crate::grid::gauss_legendre;
use crate::ops::KernelId;

const N_PSI: usize = 192;
const N_RAY: usize = 40;

/// Values of `phi` along the ray `z + s*dir` at the given arc positions.
fn ray_samples(phi: &DiskField, z: Complex64, dir: Complex64, s: &[f64]) -> Vec<Complex64> {
    let pts: Vec<(f64, f64)> = s
        .iter()
        .map(|&si| {
            let zeta = z + dir * si;
            // rounding can push a rim point to 1 + ulp
            (zeta.norm().min(1.0), zeta.arg())
        })
        .collect();
    synthesize(phi, &pts).expect("quadrature points stay in the closed disk")
}

/// Distance from `z` to the unit circle along direction `exp(i psi)`.
fn ray_length(z: Complex64, psi: f64) -> f64 {
    let c = (z.conj() * Complex64::from_polar(1.0, psi)).re;
    -c + (c * c + 1.0 - z.norm_sqr()).sqrt()
}

pub fn bruteforce_kernel(
    kernel: KernelId,
    phi: &DiskField,
    z: Complex64,
    epsilon: f64,
) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::RadiusOutOfRange(z.norm()));
    }
    match kernel {
        KernelId::GreenK => Ok(green(phi, z)),
        KernelId::BeurlingKd => {
            if epsilon <= 0.0 {
                return Err(Error::InvalidParam {
                    name: "epsilon",
                    value: epsilon,
                    reason: "principal value exclusion radius must be positive",
                });
            }
            let coarse = beurling_excluded(phi, z, epsilon);
            let fine = beurling_excluded(phi, z, 0.5 * epsilon);
            Ok((fine * 4.0 - coarse) / 3.0)
        }
        KernelId::Kdbar => Ok(kdbar(phi, z)),
    }
}

fn green(phi: &DiskField, z: Complex64) -> Complex64 {
    let (gx, gw) = gauss_legendre(N_RAY);
    let d_psi = std::f64::consts::TAU / N_PSI as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut s = vec![0.0; N_RAY];
    for m in 0..N_PSI {
        let psi = d_psi * m as f64;
        let dir = Complex64::from_polar(1.0, psi);
        let s_max = ray_length(z, psi);
        for (si, &x) in s.iter_mut().zip(&gx) {
            *si = 0.5 * s_max * (x + 1.0);
        }
        let vals = ray_samples(phi, z, dir, &s);
        let e_m1 = dir.conj();
        for ((&si, &w), v) in s.iter().zip(&gw).zip(vals) {
            let zeta = z + dir * si;
            let reflected = z.conj() / (1.0 - zeta * z.conj());
            acc += v * (e_m1 + reflected * si) * (w * 0.5 * s_max);
        }
    }
    acc * (d_psi / std::f64::consts::PI)
}

fn beurling_excluded(phi: &DiskField, z: Complex64, eps: f64) -> Complex64 {
    let (gx, gw) = gauss_legendre(N_RAY);
    let d_psi = std::f64::consts::TAU / N_PSI as f64;
    let phi0 = synthesize(phi, &[(z.norm(), z.arg())]).expect("interior point")[0];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut s = vec![0.0; N_RAY];
    for m in 0..N_PSI {
        let psi = d_psi * m as f64;
        let dir = Complex64::from_polar(1.0, psi);
        let s_max = ray_length(z, psi);
        let e_m2 = (dir * dir).conj();
        let mut ray = phi0 * s_max.ln();
        if s_max > eps {
            let (half, mid) = (0.5 * (s_max - eps), 0.5 * (s_max + eps));
            for (si, &x) in s.iter_mut().zip(&gx) {
                *si = mid + half * x;
            }
            for ((&si, &w), v) in s.iter().zip(&gw).zip(ray_samples(phi, z, dir, &s)) {
                ray += (v - phi0) / si * (w * half);
            }
        }
        acc += ray * e_m2;
    }
    acc * (d_psi / std::f64::consts::PI)
}

fn kdbar(phi: &DiskField, z: Complex64) -> Complex64 {
    let (gx, gw) = gauss_legendre(N_RAY);
    let d_psi = std::f64::consts::TAU / N_PSI as f64;
    let zb = z.conj();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut s = vec![0.0; N_RAY];
    for m in 0..N_PSI {
        let psi = d_psi * m as f64;
        let dir = Complex64::from_polar(1.0, psi);
        let s_max = ray_length(z, psi);
        for (si, &x) in s.iter_mut().zip(&gx) {
            *si = 0.5 * s_max * (x + 1.0);
        }
        for ((&si, &w), v) in s.iter().zip(&gw).zip(ray_samples(phi, z, dir, &s)) {
            let den = 1.0 - (z + dir * si) * zb;
            acc += v / (den * den) * (si * w * 0.5 * s_max);
        }
    }
    let center = synthesize(phi, &[(z.norm(), z.arg())]).expect("interior point")[0];
    acc * (d_psi / std::f64::consts::PI) - center
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;
    use crate::grid::make_grid;
    use crate::ops::DiskOps;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn green_of_constant_vanishes() {
        let grid = make_grid(6, 14).unwrap();
        let phi = sample_field(&grid, |_| c(1.0, 0.0));
        let v = bruteforce_kernel(KernelId::GreenK, &phi, c(0.3, 0.1), 0.0).unwrap();
        assert!(v.norm() < 1e-6, "got {v}");
    }

    #[test]
    fn green_of_identity_matches_profile() {
        let grid = make_grid(6, 14).unwrap();
        let phi = sample_field(&grid, |zeta| zeta);
        let v = bruteforce_kernel(KernelId::GreenK, &phi, c(0.5, 0.0), 0.0).unwrap();
        assert!((v - c(0.75, 0.0)).norm() < 1e-6, "got {v}");
    }

    #[test]
    fn kdbar_of_identity_is_minus_z() {
        let grid = make_grid(6, 14).unwrap();
        let phi = sample_field(&grid, |zeta| zeta);
        let v = bruteforce_kernel(KernelId::Kdbar, &phi, c(0.0, 0.2), 0.0).unwrap();
        assert!((v - c(0.0, -0.2)).norm() < 1e-6, "got {v}");
    }

    #[test]
    fn beurling_agrees_with_per_mode_route() {
        let grid = make_grid(8, 16).unwrap();
        let phi = sample_field(&grid, |zeta| {
            zeta * zeta * zeta.conj() + zeta.conj() * c(0.4, -0.2)
        });
        let ops = DiskOps::new(&grid);
        let fast = ops.beurling_kd(&phi).unwrap();
        for &(re, im) in &[(0.3, -0.25), (0.0, 0.0), (-0.6, 0.1)] {
            let z = c(re, im);
            let slow = bruteforce_kernel(KernelId::BeurlingKd, &phi, z, 5e-3).unwrap();
            let direct = synthesize(&fast, &[(z.norm(), z.arg())]).unwrap()[0];
            assert!(
                (slow - direct).norm() < 1e-6,
                "z={z} slow={slow} fast={direct}"
            );
        }
    }

    #[test]
    fn rejects_non_interior_points_and_bad_epsilon() {
        let grid = make_grid(4, 10).unwrap();
        let phi = sample_field(&grid, |zeta| zeta);
        assert!(bruteforce_kernel(KernelId::GreenK, &phi, c(1.0, 0.0), 0.0).is_err());
        assert!(bruteforce_kernel(KernelId::BeurlingKd, &phi, c(0.2, 0.0), 0.0).is_err());
    }

    #[test]
    fn green_of_radial_data_rotates_as_one_negative_mode() {
        // |zeta|^2 input: output lives in mode -1, profile (r - r^3)/2
        let grid = make_grid(6, 14).unwrap();
        let phi = sample_field(&grid, |zeta| c(zeta.norm_sqr(), 0.0));
        let a = bruteforce_kernel(KernelId::GreenK, &phi, c(0.4, 0.0), 0.0).unwrap();
        let b = bruteforce_kernel(KernelId::GreenK, &phi, c(0.0, 0.4), 0.0).unwrap();
        let profile = 0.5 * (0.4 - 0.4f64.powi(3));
        assert!((a - c(profile, 0.0)).norm() < 1e-7, "a={a}");
        assert!((b * Complex64::i() - a).norm() < 1e-7, "b={b}");
    }
}
