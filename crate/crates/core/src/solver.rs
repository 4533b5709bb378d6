//! The perturbation iteration and its bookkeeping.
//!
//! `F_0` is the Poisson extension of the boundary data; each further term is
//! `F_n = K[W_n]` with `W_n = Omega (alpha0 dF_{n-1} + beta0 conj(db F_{n-1}))`,
//! and the derivative pair is tracked through the dedicated kernels
//! `dF_n = K_d[W_n]`, `db F_n = K_db[W_n]` rather than by re-differentiating.
//! The solution is the weighted partial sum `S = sum F_n t^n`, `t` the
//! perturbation magnitude.
//!
//! Stopping is empirical: the decay ratio of derivative norms stands in for
//! the operator-norm bound the convergence proof uses, and the geometric tail
//! it implies is compared against the configured tolerance. Exactly
//! terminating series (polynomial data on the unmapped disk) are recognized
//! by two consecutive vanishing terms.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundaryFunction;
use crate::canon::CanonicalParams;
use crate::conformal::ConformalMapSeries;
use crate::error::{Error, Result};
use crate::field::{
    conj_field, grid_values, lp_norm, multiply, wirtinger_derivatives, DiskField,
};
use crate::grid::make_grid;
use crate::ops::{poisson_extend, DiskOps};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_terms: usize,
    pub tail_tol: f64,
    /// Norm-monitoring exponent; must exceed 2 (the convergence argument
    /// lives in L^p with p > 2, approaching 2 for strong coupling).
    pub p_exponent: f64,
    pub grid_max_mode: usize,
    pub grid_radial: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_terms: 40,
            tail_tol: 1e-11,
            p_exponent: 2.2,
            grid_max_mode: 32,
            grid_radial: 48,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidParam {
                name: "tail_tol",
                value: self.tail_tol,
                reason: "must be positive",
            });
        }
        if !(self.p_exponent > 2.0 && self.p_exponent.is_finite()) {
            return Err(Error::InvalidParam {
                name: "p_exponent",
                value: self.p_exponent,
                reason: "monitoring exponent must lie in (2, infinity)",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TailConverged,
    TermVanished,
    MaxTerms,
    Diverging,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::TailConverged => "tail_converged",
            StopReason::TermVanished => "term_vanished",
            StopReason::MaxTerms => "max_terms",
            StopReason::Diverging => "diverging",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermRecord {
    pub n: usize,
    /// `||F_n||_p` with the monitoring exponent.
    pub norm_f: f64,
    /// `max(||dF_n||_p, ||db F_n||_p)`.
    pub norm_df: f64,
    /// `||DF_n|| / ||DF_{n-1}||`; absent for n = 0 or after a zero term.
    pub ratio: Option<f64>,
    /// `||F_n||_p * t^n`.
    pub weighted_term: f64,
    /// Plain L^2 companions, reported alongside the L^p monitors.
    pub norm_f_l2: f64,
    pub norm_df_l2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesReport {
    pub records: Vec<TermRecord>,
    pub stop_reason: StopReason,
    pub tail_estimate: Option<f64>,
    pub residual_norm: f64,
    pub boundary_error: f64,
}

impl SeriesReport {
    pub fn terms_used(&self) -> usize {
        self.records.len()
    }

    /// The frozen per-term table.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,norm_F,norm_DF,ratio,weighted_term")?;
        for r in &self.records {
            let ratio = r.ratio.map(|q| q.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{}",
                r.n, r.norm_f, r.norm_df, ratio, r.weighted_term
            )?;
        }
        Ok(())
    }
}

pub struct Solution {
    /// Final partial sum on the disk grid.
    pub field: DiskField,
    pub report: SeriesReport,
    /// `(omega(z), S(z))` at the grid nodes, radial-major like `grid_values`.
    pub physical_samples: Vec<(Complex64, Complex64)>,
}

/// One iteration: from the derivative pair of the previous term to the next
/// term and its derivative pair. The term itself is not an input; only its
/// derivatives enter the integrand `W = Omega (alpha0 dF + beta0 conj(db F))`.
pub fn iterate_step(
    params: &CanonicalParams,
    ops: &DiskOps,
    omega_ratio: &DiskField,
    df_prev: &DiskField,
    dbf_prev: &DiskField,
) -> Result<(DiskField, DiskField, DiskField)> {
    let grid = ops.grid();
    let mut integrand = DiskField::zeros(grid);
    integrand.add_scaled(df_prev, Complex64::new(params.alpha0, 0.0))?;
    integrand.add_scaled(&conj_field(dbf_prev), Complex64::new(params.beta0, 0.0))?;
    let w = multiply(omega_ratio, &integrand)?;
    Ok((
        ops.green_volume_k(&w)?,
        ops.beurling_kd(&w)?,
        ops.kdbar(&w)?,
    ))
}

/// Discrete residual of the transplanted equation,
/// `|| ddb S + t d(Omega d(T0 S)) ||_{L^2}` over the interior region
/// `rho <= 0.9`. Differentiation here is spectral (independent of the
/// kernel route used to build S), so the residual is a genuine check.
pub fn residual_m(
    params: &CanonicalParams,
    omega_ratio: &DiskField,
    s: &DiskField,
) -> Result<f64> {
    let grid = s.grid();
    let (ds, dbs) = wirtinger_derivatives(s);
    let lap = wirtinger_derivatives(&dbs).0;
    let mut t0 = DiskField::zeros(grid);
    t0.add_scaled(&ds, Complex64::new(params.alpha0, 0.0))?;
    t0.add_scaled(&conj_field(&dbs), Complex64::new(params.beta0, 0.0))?;
    let w = multiply(omega_ratio, &t0)?;
    let dw = wirtinger_derivatives(&w).0;
    let mut res = lap;
    res.add_scaled(&dw, Complex64::new(params.t_norm, 0.0))?;
    let values = grid_values(&res);
    let m_count = grid.angular_count();
    let dtheta = 2.0 * std::f64::consts::PI / m_count as f64;
    let mut acc = 0.0;
    for (j, &r) in grid.radial_nodes().iter().enumerate() {
        if r > 0.9 {
            continue;
        }
        let w_j = grid.radial_weights()[j];
        for m in 0..m_count {
            acc += w_j * dtheta * values[j * m_count + m].norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// Max angular deviation of the field's boundary trace from the data.
fn boundary_error(s: &DiskField, h: &BoundaryFunction) -> f64 {
    let grid = s.grid();
    let kk = grid.max_mode() as i64;
    let trace = s.mode_trace();
    let samples = 4 * grid.angular_count().max(8);
    let mut worst = 0.0f64;
    for m in 0..samples {
        let t = 2.0 * std::f64::consts::PI * m as f64 / samples as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -kk..=kk {
            let d = trace[(k + kk) as usize] - h.coeff(k);
            acc += d * Complex64::from_polar(1.0, k as f64 * t);
        }
        worst = worst.max(acc.norm());
    }
    worst
}

/// Relative threshold under which a term counts as exactly zero.
const VANISH_REL: f64 = 1e-13;
/// Consecutive vanishing terms needed to declare termination.
const VANISH_RUN: usize = 2;
/// Consecutive ratio*t >= 1 observations needed to declare divergence.
const DIVERGE_RUN: usize = 10;
/// Window over which the tail ratio is taken.
const RATIO_WINDOW: usize = 5;

struct StopState {
    vanish_count: usize,
    diverge_count: usize,
}

enum StepVerdict {
    Stop(StopReason, Option<f64>),
    Continue,
}

/// Stopping logic for one freshly recorded term. `ratios` are the available
/// ratio entries so far (n >= 1), `norm_f`/`norm_f0` the monitoring norms.
fn classify_step(
    state: &mut StopState,
    records: &[TermRecord],
    t_norm: f64,
    tail_tol: f64,
) -> StepVerdict {
    let last = records.last().expect("at least one record");
    let norm_f0 = records[0].norm_f;
    if last.norm_f <= VANISH_REL * norm_f0 {
        state.vanish_count += 1;
        if state.vanish_count >= VANISH_RUN {
            return StepVerdict::Stop(StopReason::TermVanished, Some(0.0));
        }
        return StepVerdict::Continue;
    }
    state.vanish_count = 0;
    if let Some(q) = last.ratio {
        if q * t_norm >= 1.0 {
            state.diverge_count += 1;
            if state.diverge_count >= DIVERGE_RUN {
                return StepVerdict::Stop(StopReason::Diverging, None);
            }
        } else {
            state.diverge_count = 0;
        }
    }
    let q_bar = records
        .iter()
        .rev()
        .take(RATIO_WINDOW)
        .filter_map(|r| r.ratio)
        .fold(f64::NAN, f64::max);
    if q_bar.is_finite() && q_bar * t_norm < 1.0 {
        let n = last.n;
        let tail = last.norm_f * t_norm.powi(n as i32 + 1) / (1.0 - q_bar * t_norm);
        if tail < tail_tol {
            return StepVerdict::Stop(StopReason::TailConverged, Some(tail));
        }
    }
    StepVerdict::Continue
}

pub fn solve_series(
    params: &CanonicalParams,
    h: &BoundaryFunction,
    map: &ConformalMapSeries,
    cfg: &SolverConfig,
) -> Result<Solution> {
    cfg.validate()?;
    let grid = make_grid(cfg.grid_max_mode, cfg.grid_radial)?;
    let ops = DiskOps::new(&grid);
    let omega = map.derivative_ratio(&grid)?;
    let t = params.t_norm;
    let p = cfg.p_exponent;

    let (f0, mut df, mut dbf) = poisson_extend(h, &grid)?;
    let mut records = Vec::new();
    let df_norm =
        |a: &DiskField, b: &DiskField, q: f64| -> Result<f64> {
            Ok(lp_norm(a, q)?.max(lp_norm(b, q)?))
        };
    records.push(TermRecord {
        n: 0,
        norm_f: lp_norm(&f0, p)?,
        norm_df: df_norm(&df, &dbf, p)?,
        ratio: None,
        weighted_term: lp_norm(&f0, p)?,
        norm_f_l2: lp_norm(&f0, 2.0)?,
        norm_df_l2: df_norm(&df, &dbf, 2.0)?,
    });
    let mut sum = f0;

    let mut stop = None;
    let mut tail_estimate = None;
    if t == 0.0 {
        // pure Poisson problem: the series is its first term
        stop = Some(StopReason::TermVanished);
        tail_estimate = Some(0.0);
    } else {
        let mut state = StopState {
            vanish_count: 0,
            diverge_count: 0,
        };
        for n in 1..=cfg.max_terms {
            let (f, dfn, dbfn) = iterate_step(params, &ops, &omega, &df, &dbf)?;
            let norm_f = lp_norm(&f, p)?;
            let norm_df = df_norm(&dfn, &dbfn, p)?;
            let prev_df = records.last().map(|r| r.norm_df).unwrap_or(0.0);
            let ratio = if prev_df > 0.0 {
                Some(norm_df / prev_df)
            } else {
                None
            };
            sum.add_scaled(&f, Complex64::new(t.powi(n as i32), 0.0))?;
            records.push(TermRecord {
                n,
                norm_f,
                norm_df,
                ratio,
                weighted_term: norm_f * t.powi(n as i32),
                norm_f_l2: lp_norm(&f, 2.0)?,
                norm_df_l2: df_norm(&dfn, &dbfn, 2.0)?,
            });
            df = dfn;
            dbf = dbfn;
            match classify_step(&mut state, &records, t, cfg.tail_tol) {
                StepVerdict::Stop(reason, tail) => {
                    stop = Some(reason);
                    tail_estimate = tail;
                    break;
                }
                StepVerdict::Continue => {}
            }
        }
    }
    let stop_reason = stop.unwrap_or(StopReason::MaxTerms);
    if stop_reason == StopReason::MaxTerms {
        // report the tail the final window implies, when it is finite
        let q_bar = records
            .iter()
            .rev()
            .take(RATIO_WINDOW)
            .filter_map(|r| r.ratio)
            .fold(f64::NAN, f64::max);
        if q_bar.is_finite() && q_bar * t < 1.0 {
            let last = records.last().expect("records nonempty");
            tail_estimate =
                Some(last.norm_f * t.powi(last.n as i32 + 1) / (1.0 - q_bar * t));
        }
    }

    let residual_norm = residual_m(params, &omega, &sum)?;
    let b_err = boundary_error(&sum, h);
    let values = grid_values(&sum);
    let m_count = grid.angular_count();
    let mut physical_samples = Vec::with_capacity(values.len());
    for (j, &r) in grid.radial_nodes().iter().enumerate() {
        for m in 0..m_count {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / m_count as f64;
            let w = map.eval(Complex64::from_polar(r, theta));
            physical_samples.push((w, values[j * m_count + m]));
        }
    }
    Ok(Solution {
        field: sum,
        report: SeriesReport {
            records,
            stop_reason,
            tail_estimate,
            residual_norm,
            boundary_error: b_err,
        },
        physical_samples,
    })
}
