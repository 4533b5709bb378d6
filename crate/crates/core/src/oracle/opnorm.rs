//! Operator-norm probes for the discretized kernels.
//!
//! At `p = 2` the norm comes from power iteration on `A*A`, with the adjoint
//! taken in the quadrature inner product, so the result is the largest
//! singular value of the discrete operator over the resolved radial range:
//! every iterate is projected onto radial degree `< J` (Chebyshev truncation
//! on the doubled node set). Without that projection the iteration drifts
//! into nodal vectors whose squared interpolants exceed the quadrature
//! exactness degree, where the discrete norm no longer measures the function
//! it represents and the "norm" inflates by an O(1) aliasing artifact.
//! Away from `p = 2` no finite procedure gives the exact norm; the estimate
//! is the best ratio found over seeded inputs improved by duality-map
//! ascent, and callers must treat it as a lower bound.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{analyze, grid_values, lp_norm, sample_field, DiskField};
use crate::grid::GridRef;
use crate::ops::{DiskOps, KernelId};

pub fn opnorm_estimate(kernel: KernelId, p: f64, grid: &GridRef, trials: usize) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParam {
            name: "p",
            value: p,
            reason: "need 1 < p < infinity",
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParam {
            name: "trials",
            value: 0.0,
            reason: "need at least one trial",
        });
    }
    let ops = DiskOps::new(grid);
    if p == 2.0 {
        singular_value(&ops, kernel, trials)
    } else {
        ascent_lower_bound(&ops, kernel, p, trials)
    }
}

/// Project each mode's radial profile onto Chebyshev degree `< j_count`.
///
/// The radial nodes are the positive half of the 2J Chebyshev-roots grid, so
/// a profile extends by its mode parity to all 2J nodes, transforms exactly,
/// and truncates. Profiles of polynomial degree `< J` pass through unchanged.
fn radial_lowpass(field: &DiskField) -> DiskField {
    let grid = field.grid();
    let j_count = grid.radial_count();
    let n = 2 * j_count;
    let kk = grid.max_mode() as i64;
    let theta: Vec<f64> = (0..n)
        .map(|i| (2 * i + 1) as f64 * std::f64::consts::PI / (2 * n) as f64)
        .collect();
    let mut out = DiskField::zeros(grid);
    let mut ext = vec![Complex64::new(0.0, 0.0); n];
    let mut coef = vec![Complex64::new(0.0, 0.0); j_count];
    for k in -kk..=kk {
        let parity = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let src = field.mode(k);
        // node rho_j = cos(theta_{j_count - 1 - j}); mirror with parity
        for i in 0..n {
            ext[i] = if i < j_count {
                src[j_count - 1 - i]
            } else {
                src[i - j_count] * parity
            };
        }
        for (m, cm) in coef.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += ext[i] * (m as f64 * theta[i]).cos();
            }
            *cm = acc * (if m == 0 { 1.0 } else { 2.0 } / n as f64);
        }
        let dst = out.mode_mut(k);
        for j in 0..j_count {
            let th = theta[j_count - 1 - j];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, cm) in coef.iter().enumerate() {
                acc += *cm * (m as f64 * th).cos();
            }
            dst[j] = acc;
        }
    }
    out
}

fn random_field(grid: &GridRef, rng: &mut ChaCha8Rng) -> DiskField {
    let kk = grid.max_mode() as i64;
    let mut f = DiskField::zeros(grid);
    for k in -kk..=kk {
        // taper high modes so seeds resemble resolvable fields
        let damp = 1.0 / (1.0 + (k * k) as f64);
        for v in f.mode_mut(k) {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * damp;
        }
    }
    f
}

fn singular_value(ops: &DiskOps, kernel: KernelId, trials: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51ac + trial as u64);
        let mut v = radial_lowpass(&random_field(ops.grid(), &mut rng));
        let nv = lp_norm(&v, 2.0)?;
        if nv == 0.0 {
            continue;
        }
        v.scale(Complex64::new(1.0 / nv, 0.0));
        let mut prev = 0.0f64;
        for it in 0..400 {
            let u = ops.apply(kernel, &v)?;
            let nu = lp_norm(&u, 2.0)?;
            if nu == 0.0 {
                break;
            }
            let mut w = radial_lowpass(&ops.apply_adjoint(kernel, &u)?);
            let nw = lp_norm(&w, 2.0)?;
            if nw == 0.0 {
                break;
            }
            w.scale(Complex64::new(1.0 / nw, 0.0));
            v = w;
            if it > 2 && (nu - prev).abs() <= 1e-12 * nu.max(1.0) {
                prev = nu;
                break;
            }
            prev = nu;
        }
        best = best.max(prev);
    }
    Ok(best)
}

/// Pointwise duality map `u -> |u|^{e-1} sgn(u)` applied in value space.
fn duality_map(field: &DiskField, e: f64) -> Result<DiskField> {
    let vals: Vec<Complex64> = grid_values(field)
        .into_iter()
        .map(|v| {
            let m = v.norm();
            if m == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                v / m * m.powf(e - 1.0)
            }
        })
        .collect();
    analyze(field.grid(), &vals)
}

fn ascent_lower_bound(ops: &DiskOps, kernel: KernelId, p: f64, trials: usize) -> Result<f64> {
    let q = p / (p - 1.0);
    let grid = ops.grid();
    let mut seeds: Vec<DiskField> = Vec::new();
    // norm-carrying directions of the kernels: low powers of z and the
    // profile e^{i theta}, on which kdbar acts as negation
    for m in 1..=3u32 {
        seeds.push(sample_field(grid, |z| z.powu(m)));
    }
    seeds.push(sample_field(grid, |z| {
        Complex64::from_polar(z.norm().sqrt(), z.arg())
    }));
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0d + trial as u64);
        seeds.push(radial_lowpass(&random_field(grid, &mut rng)));
    }

    let mut best = 0.0f64;
    for seed in seeds {
        let mut phi = seed;
        let np = lp_norm(&phi, p)?;
        if np == 0.0 {
            continue;
        }
        phi.scale(Complex64::new(1.0 / np, 0.0));
        for _ in 0..20 {
            let u = ops.apply(kernel, &phi)?;
            let ratio = lp_norm(&u, p)?;
            best = best.max(ratio);
            if ratio == 0.0 {
                break;
            }
            // gradient direction of ||A phi||_p under ||phi||_p = 1
            let g = ops.apply_adjoint(kernel, &duality_map(&u, p)?)?;
            let mut next = radial_lowpass(&duality_map(&g, q)?);
            let nn = lp_norm(&next, p)?;
            if nn == 0.0 {
                break;
            }
            next.scale(Complex64::new(1.0 / nn, 0.0));
            phi = next;
        }
    }
    Ok(best)
}
