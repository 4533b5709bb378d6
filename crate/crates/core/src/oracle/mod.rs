//! Ground-truth machinery kept deliberately independent of the per-mode fast
//! paths: direct quadrature of the defining integrals, exact polynomial
//! solution families, operator-norm probes, and rough boundary data. Nothing
//! here shares code with the operators under test beyond the field type.

mod bruteforce;
mod exact;
mod fd;
mod holder;
mod opnorm;
mod zpoly;

pub use bruteforce::bruteforce_kernel;
pub use exact::{exact_solution, ExactSolutionSpec, SolutionFamily};
pub use fd::{fd_compare, fd_solve, CartesianField};
pub use holder::holder_boundary;
pub use opnorm::opnorm_estimate;
pub use zpoly::ZPoly;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::field::synthesize;
use crate::grid::GridRef;
use crate::ops::{DiskOps, KernelId};

/// Worst disagreement between one fast operator and the direct quadrature.
#[derive(Debug, Clone, Serialize)]
pub struct KernelAgreement {
    pub kernel: String,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare every fast operator against [`bruteforce_kernel`] on random
/// band-limited inputs (modes `|k| <= 6`) at random interior points.
pub fn oracle_agreement(
    grid: &GridRef,
    fields: usize,
    points: usize,
    seed: u64,
) -> Result<Vec<KernelAgreement>> {
    const TOL: f64 = 1e-6;
    const PV_EPS: f64 = 5e-3;
    let ops = DiskOps::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = grid.max_mode().min(6) as u32;
    let kernels = [KernelId::GreenK, KernelId::BeurlingKd, KernelId::Kdbar];
    let mut worst = [0.0f64; 3];

    for _ in 0..fields {
        // random polynomial in (z, conj z) of total degree <= band: radially
        // smooth, so the direct quadrature converges at full rate
        let mut coeffs = Vec::new();
        for a in 0..=band {
            for b in 0..=(band - a) {
                let g = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                coeffs.push((a, b, g / (1.0 + (a + b) as f64)));
            }
        }
        let phi = crate::field::sample_field(grid, |z| {
            let zb = z.conj();
            coeffs
                .iter()
                .map(|&(a, b, g)| g * z.powu(a) * zb.powu(b))
                .sum()
        });
        let pts: Vec<(f64, f64)> = (0..points)
            .map(|_| {
                (
                    rng.gen_range(0.05..0.85),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        for (slot, &kernel) in kernels.iter().enumerate() {
            let fast = ops.apply(kernel, &phi)?;
            let fast_vals = synthesize(&fast, &pts)?;
            for (&(r, t), fv) in pts.iter().zip(fast_vals) {
                let z = Complex64::from_polar(r, t);
                let slow = bruteforce_kernel(kernel, &phi, z, PV_EPS)?;
                worst[slot] = worst[slot].max((slow - fv).norm());
            }
        }
    }

    Ok(kernels
        .iter()
        .zip(worst)
        .map(|(k, w)| KernelAgreement {
            kernel: k.to_string(),
            max_discrepancy: w,
            tolerance: TOL,
            pass: w <= TOL,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_params;
    use crate::conformal::ConformalMapSeries;
    use crate::grid::make_grid;
    use crate::oracle::exact::{exact_solution, ExactSolutionSpec, SolutionFamily};
    use crate::oracle::fd::{fd_compare, fd_solve};
    use crate::solver::{solve_series, SolverConfig};

    #[test]
    fn fast_routes_match_quadrature_on_random_fields() {
        let grid = make_grid(8, 16).unwrap();
        let report = oracle_agreement(&grid, 4, 3, 0xfeed).unwrap();
        assert_eq!(report.len(), 3);
        for entry in report {
            assert!(
                entry.pass,
                "{} off by {}",
                entry.kernel, entry.max_discrepancy
            );
        }
    }

    // the two discretizations share nothing past the boundary data: spectral
    // series on the polar grid vs real-expanded differences on the lattice.
    // On terminating family cases both should agree to the second-order
    // envelope, at every tested resolution.
    #[test]
    fn series_and_lattice_solutions_agree_on_terminating_cases() {
        let one = Complex64::new(1.0, 0.0);
        let cases = [
            (SolutionFamily::Lame, canonical_params(0.0, 0.5).unwrap()),
            (SolutionFamily::Skew, canonical_params(0.5, 0.0).unwrap()),
        ];
        let grid = make_grid(8, 16).unwrap();
        let cfg = SolverConfig {
            grid_max_mode: 8,
            grid_radial: 16,
            ..SolverConfig::default()
        };
        let map = ConformalMapSeries::identity();
        for (family, params) in cases {
            let spec = ExactSolutionSpec {
                family,
                poly_coeffs: vec![Complex64::default(), Complex64::default(), one],
                params: params.clone(),
            };
            let (_, trace) = exact_solution(&spec, &grid).unwrap();
            let solution = solve_series(&params, &trace, &map, &cfg).unwrap();
            for n in [48usize, 64] {
                let cart = fd_solve(&params, &map, &trace, n).unwrap();
                let (max, _) = fd_compare(&cart, &solution.field).unwrap();
                let envelope = 5.0 * (2.0 / n as f64).powi(2);
                assert!(
                    max <= envelope,
                    "{family:?} n={n}: discrepancy {max} vs envelope {envelope}"
                );
            }
        }
    }
}
