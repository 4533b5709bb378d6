//! Run configuration: a single JSON document. Complex numbers are `[re, im]`
//! pairs throughout; exactly one boundary source may be given.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Deserialize;

use sepsolve::{
    canonical_params, exact_solution, holder_boundary, BoundaryFunction, CanonicalParams,
    ConformalMapSeries, ExactSolutionSpec, GridRef, KernelId, SolutionFamily, SolverConfig,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub sigma: f64,
    pub boundary: Option<BoundarySource>,
    /// Power-series coefficients `a_0, a_1, ...` of the domain map;
    /// omitted means the identity map on the disk.
    pub map: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    pub output_dir: Option<PathBuf>,
    pub opnorm: Option<OpnormSpec>,
    pub fd: Option<FdSpec>,
    /// Seed for the randomized parts of validate-ops.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    ValidateOps,
    Opnorm,
    CompareFd,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::ValidateOps => "validate-ops",
            Command::Opnorm => "opnorm",
            Command::CompareFd => "compare-fd",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySource {
    /// Explicit angular modes `{"k": −2, "coeff": [1.0, 0.0]}`.
    Fourier(Vec<FourierTerm>),
    Holder { alpha: f64, modes: usize, seed: u64 },
    TraceOfExact { family: String, poly: Vec<[f64; 2]> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub k: i64,
    pub coeff: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub max_mode: usize,
    pub radial: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            max_mode: 24,
            radial: 32,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub max_terms: usize,
    pub tail_tol: f64,
    pub p_exponent: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSpec {
            max_terms: d.max_terms,
            tail_tol: d.tail_tol,
            p_exponent: d.p_exponent,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpnormSpec {
    #[serde(default = "default_kernels")]
    pub kernels: Vec<String>,
    #[serde(default = "default_p_values")]
    pub p_values: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_kernels() -> Vec<String> {
    vec!["kdbar".into(), "beurling_kd".into()]
}

fn default_p_values() -> Vec<f64> {
    vec![2.0]
}

fn default_trials() -> usize {
    2
}

impl Default for OpnormSpec {
    fn default() -> Self {
        OpnormSpec {
            kernels: default_kernels(),
            p_values: default_p_values(),
            trials: default_trials(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdSpec {
    pub n: usize,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec { n: 64 }
    }
}

fn cx(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

impl RunConfig {
    pub fn params(&self) -> Result<CanonicalParams, String> {
        canonical_params(self.tau, self.sigma).map_err(|e| e.to_string())
    }

    pub fn map(&self) -> Result<ConformalMapSeries, String> {
        let map = match &self.map {
            None => ConformalMapSeries::identity(),
            Some(coeffs) => {
                ConformalMapSeries::from_coeffs(coeffs.iter().copied().map(cx).collect())
                    .map_err(|e| e.to_string())?
            }
        };
        let margin = map.univalence_margin();
        if margin <= 0.0 {
            return Err(format!(
                "map coefficients do not certify univalence (margin {margin})"
            ));
        }
        Ok(map)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            max_terms: self.solver.max_terms,
            tail_tol: self.solver.tail_tol,
            p_exponent: self.solver.p_exponent,
            grid_max_mode: self.grid.max_mode,
            grid_radial: self.grid.radial,
        }
    }

    /// Materialize the configured boundary data. Needs the grid (for exact
    /// traces) and the canonical parameters (for family constraints).
    pub fn boundary(
        &self,
        grid: &GridRef,
        params: &CanonicalParams,
    ) -> Result<BoundaryFunction, String> {
        let source = self
            .boundary
            .as_ref()
            .ok_or_else(|| format!("command {} needs a boundary source", self.command.as_str()))?;
        let h = match source {
            BoundarySource::Fourier(terms) => {
                let band = terms.iter().map(|t| t.k.unsigned_abs()).max().unwrap_or(0);
                let pairs: Vec<(i64, Complex64)> =
                    terms.iter().map(|t| (t.k, cx(t.coeff))).collect();
                BoundaryFunction::from_modes(band as usize, &pairs).map_err(|e| e.to_string())?
            }
            BoundarySource::Holder { alpha, modes, seed } => {
                holder_boundary(*alpha, *modes, *seed).map_err(|e| e.to_string())?
            }
            BoundarySource::TraceOfExact { family, poly } => {
                let family = match family.as_str() {
                    "lame" => SolutionFamily::Lame,
                    "skew" => SolutionFamily::Skew,
                    other => return Err(format!("unknown solution family \"{other}\"")),
                };
                let spec = ExactSolutionSpec {
                    family,
                    poly_coeffs: poly.iter().copied().map(cx).collect(),
                    params: params.clone(),
                };
                let (_, trace) = exact_solution(&spec, grid).map_err(|e| e.to_string())?;
                trace
            }
        };
        if h.max_mode() > grid.max_mode() {
            return Err(format!(
                "boundary occupies angular modes up to {} but the grid band is {}",
                h.max_mode(),
                grid.max_mode()
            ));
        }
        Ok(h)
    }
}

pub fn parse_kernel(name: &str) -> Result<KernelId, String> {
    match name {
        "green_k" => Ok(KernelId::GreenK),
        "beurling_kd" => Ok(KernelId::BeurlingKd),
        "kdbar" => Ok(KernelId::Kdbar),
        other => Err(format!("unknown kernel \"{other}\"")),
    }
}
