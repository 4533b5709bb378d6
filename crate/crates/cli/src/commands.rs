//! Command execution and the frozen output formats.
//!
//! Files written per command (all into the output directory):
//!   solve       solution.csv, report.csv, summary.json
//!   validate-ops validate.json, summary.json
//!   opnorm      estimates.json, summary.json
//!   compare-fd  compare.json, summary.json
//!
//! summary.json is written for every run that gets past configuration,
//! including failure paths; configuration errors exit 2 without output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use sepsolve::{
    fd_compare, fd_solve, grid_values, make_grid, opnorm_estimate, oracle_agreement, sample_field,
    solve_series, BoundaryFunction, DiskOps, GridRef, KernelId, Solution, StopReason,
};

use crate::config::{parse_kernel, Command, FdSpec, RunConfig};

pub struct Outcome {
    pub exit: u8,
    pub lines: Vec<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    status: &'a str,
    command: &'a str,
    stop_reason: Option<&'a str>,
    terms_used: Option<usize>,
    tail_estimate: Option<f64>,
    residual: Option<f64>,
    boundary_error: Option<f64>,
    warnings: Vec<String>,
}

impl<'a> Summary<'a> {
    fn bare(status: &'a str, command: &'a str, warnings: Vec<String>) -> Self {
        Summary {
            status,
            command,
            stop_reason: None,
            terms_used: None,
            tail_estimate: None,
            residual: None,
            boundary_error: None,
            warnings,
        }
    }
}

#[derive(Serialize)]
struct CheckRecord {
    check: String,
    max_discrepancy: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ValidateReport {
    checks: Vec<CheckRecord>,
    all_pass: bool,
}

#[derive(Serialize)]
struct EstimateRecord {
    kernel: String,
    p: f64,
    estimate: f64,
}

#[derive(Serialize)]
struct EstimatesReport {
    trials: usize,
    estimates: Vec<EstimateRecord>,
}

#[derive(Serialize)]
struct CompareReport {
    n: usize,
    max_discrepancy: f64,
    mean_discrepancy: f64,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, String> {
    let path = dir.join(name);
    let mut body = serde_json::to_vec_pretty(value)
        .map_err(|e| format!("serializing {name}: {e}"))?;
    body.push(b'\n');
    fs::write(&path, body).map_err(|e| format!("writing {}: {e}", path.display()))?;
    Ok(path)
}

pub fn run(cfg: &RunConfig, out_dir: &Path) -> Result<Outcome, String> {
    let params = cfg.params()?;
    let map = cfg.map()?;
    let grid = make_grid(cfg.grid.max_mode, cfg.grid.radial).map_err(|e| e.to_string())?;
    match cfg.command {
        Command::Solve => solve_cmd(cfg, out_dir, &params, &map, &grid),
        Command::ValidateOps => validate_cmd(cfg, out_dir, &grid),
        Command::Opnorm => opnorm_cmd(cfg, out_dir, &grid),
        Command::CompareFd => compare_cmd(cfg, out_dir, &params, &map, &grid),
    }
}

fn boundary_warnings(h: &BoundaryFunction) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(beta) = h.holder_estimate().or_else(|| h.decay_exponent()) {
        if beta < 0.5 {
            warnings.push(format!(
                "boundary decay exponent estimate {beta:.3} is below the 1/2 smoothness \
                 threshold; convergence of the series is not guaranteed"
            ));
        }
    }
    warnings
}

fn solve_warnings(h: &BoundaryFunction, stop: StopReason) -> Vec<String> {
    let mut warnings = boundary_warnings(h);
    match stop {
        StopReason::MaxTerms => warnings.push(
            "series stopped at the term cap before meeting the tail tolerance".to_string(),
        ),
        StopReason::Diverging => warnings.push(
            "weighted term ratios stayed at or above 1; the contraction condition fails at \
             this discretization"
                .to_string(),
        ),
        _ => {}
    }
    warnings
}

fn write_solution_csv(
    dir: &Path,
    grid: &GridRef,
    solution: &Solution,
) -> Result<PathBuf, String> {
    let path = dir.join("solution.csv");
    let file = fs::File::create(&path).map_err(|e| format!("creating solution.csv: {e}"))?;
    let mut w = std::io::BufWriter::new(file);
    let err = |e: std::io::Error| format!("writing solution.csv: {e}");
    writeln!(w, "r,theta,x,y,re,im").map_err(err)?;
    let m_count = grid.angular_count();
    let mut samples = solution.physical_samples.iter();
    for &r in grid.radial_nodes() {
        for m in 0..m_count {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / m_count as f64;
            let (w_point, value) = samples.next().expect("sample per grid node");
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r, theta, w_point.re, w_point.im, value.re, value.im
            )
            .map_err(err)?;
        }
    }
    Ok(path)
}

fn solve_cmd(
    cfg: &RunConfig,
    out_dir: &Path,
    params: &sepsolve::CanonicalParams,
    map: &sepsolve::ConformalMapSeries,
    grid: &GridRef,
) -> Result<Outcome, String> {
    let h = cfg.boundary(grid, params)?;
    let solution =
        solve_series(params, &h, map, &cfg.solver_config()).map_err(|e| e.to_string())?;
    let report = &solution.report;

    let mut lines = Vec::new();
    lines.push(write_solution_csv(out_dir, grid, &solution)?.display().to_string());
    let report_path = out_dir.join("report.csv");
    let file = fs::File::create(&report_path).map_err(|e| format!("creating report.csv: {e}"))?;
    report
        .write_csv(std::io::BufWriter::new(file))
        .map_err(|e| format!("writing report.csv: {e}"))?;
    lines.push(report_path.display().to_string());

    let diverged = report.stop_reason == StopReason::Diverging;
    let status = if diverged { "diverging" } else { "ok" };
    let summary = Summary {
        status,
        command: cfg.command.as_str(),
        stop_reason: Some(report.stop_reason.as_str()),
        terms_used: Some(report.terms_used()),
        tail_estimate: report.tail_estimate,
        residual: Some(report.residual_norm),
        boundary_error: Some(report.boundary_error),
        warnings: solve_warnings(&h, report.stop_reason),
    };
    lines.push(write_json(out_dir, "summary.json", &summary)?.display().to_string());
    lines.push(format!(
        "stop_reason={} terms_used={} residual={:.3e} boundary_error={:.3e}",
        report.stop_reason.as_str(),
        report.terms_used(),
        report.residual_norm,
        report.boundary_error
    ));
    Ok(Outcome {
        exit: if diverged { 3 } else { 0 },
        lines,
    })
}

/// Closed-form kernel identities checked nodewise on the configured grid.
fn closed_form_checks(grid: &GridRef) -> Result<Vec<CheckRecord>, String> {
    const TOL: f64 = 1e-8;
    let ops = DiskOps::new(grid);
    type Fz = fn(Complex64) -> Complex64;
    let cases: [(&str, KernelId, Fz, Fz); 7] = [
        (
            "green_k annihilates constants",
            KernelId::GreenK,
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
        ),
        (
            "green_k annihilates the conjugate coordinate",
            KernelId::GreenK,
            |z| z.conj(),
            |_| Complex64::new(0.0, 0.0),
        ),
        (
            "green_k maps the coordinate to 1-|z|^2",
            KernelId::GreenK,
            |z| z,
            |z| Complex64::new(1.0 - z.norm_sqr(), 0.0),
        ),
        (
            "beurling_kd maps the coordinate to -conj(z)",
            KernelId::BeurlingKd,
            |z| z,
            |z| -z.conj(),
        ),
        (
            "kdbar annihilates constants",
            KernelId::Kdbar,
            |_| Complex64::new(1.0, 0.0),
            |_| Complex64::new(0.0, 0.0),
        ),
        (
            "kdbar maps the coordinate to -z",
            KernelId::Kdbar,
            |z| z,
            |z| -z,
        ),
        (
            "kdbar negates a single positive mode",
            KernelId::Kdbar,
            |z| z * (1.0 - z.norm_sqr()),
            |z| -z * (1.0 - z.norm_sqr()),
        ),
    ];

    let m_count = grid.angular_count();
    let mut out = Vec::with_capacity(cases.len());
    for (name, kernel, input, expect) in cases {
        let image = ops
            .apply(kernel, &sample_field(grid, input))
            .map_err(|e| e.to_string())?;
        let values = grid_values(&image);
        let mut worst = 0.0f64;
        for (j, &r) in grid.radial_nodes().iter().enumerate() {
            for m in 0..m_count {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / m_count as f64;
                let z = Complex64::from_polar(r, theta);
                worst = worst.max((values[j * m_count + m] - expect(z)).norm());
            }
        }
        out.push(CheckRecord {
            check: name.to_string(),
            max_discrepancy: worst,
            tolerance: TOL,
            pass: worst <= TOL,
        });
    }
    Ok(out)
}

fn validate_cmd(cfg: &RunConfig, out_dir: &Path, grid: &GridRef) -> Result<Outcome, String> {
    let mut checks = closed_form_checks(grid)?;
    // dual route: the same kernels against the direct quadrature of the
    // defining integrals, on random band-limited fields
    let agreement = oracle_agreement(grid, 20, 10, cfg.seed).map_err(|e| e.to_string())?;
    for entry in agreement {
        checks.push(CheckRecord {
            check: format!("{} matches the quadrature oracle on random fields", entry.kernel),
            max_discrepancy: entry.max_discrepancy,
            tolerance: entry.tolerance,
            pass: entry.pass,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    let report = ValidateReport { checks, all_pass };

    let mut lines = Vec::new();
    lines.push(write_json(out_dir, "validate.json", &report)?.display().to_string());
    let status = if all_pass { "ok" } else { "validation_failed" };
    let summary = Summary::bare(status, cfg.command.as_str(), Vec::new());
    lines.push(write_json(out_dir, "summary.json", &summary)?.display().to_string());
    for c in &report.checks {
        lines.push(format!(
            "{} {} ({:.3e} vs {:.0e})",
            if c.pass { "pass" } else { "FAIL" },
            c.check,
            c.max_discrepancy,
            c.tolerance
        ));
    }
    Ok(Outcome {
        exit: if all_pass { 0 } else { 1 },
        lines,
    })
}

fn opnorm_cmd(cfg: &RunConfig, out_dir: &Path, grid: &GridRef) -> Result<Outcome, String> {
    let spec = cfg.opnorm.clone().unwrap_or_default();
    let mut estimates = Vec::new();
    for name in &spec.kernels {
        let kernel = parse_kernel(name)?;
        for &p in &spec.p_values {
            let estimate =
                opnorm_estimate(kernel, p, grid, spec.trials).map_err(|e| e.to_string())?;
            estimates.push(EstimateRecord {
                kernel: name.clone(),
                p,
                estimate,
            });
        }
    }
    let report = EstimatesReport {
        trials: spec.trials,
        estimates,
    };
    let mut lines = Vec::new();
    lines.push(write_json(out_dir, "estimates.json", &report)?.display().to_string());
    let summary = Summary::bare("ok", cfg.command.as_str(), Vec::new());
    lines.push(write_json(out_dir, "summary.json", &summary)?.display().to_string());
    for e in &report.estimates {
        lines.push(format!("{} p={} -> {:.9}", e.kernel, e.p, e.estimate));
    }
    Ok(Outcome { exit: 0, lines })
}

fn compare_cmd(
    cfg: &RunConfig,
    out_dir: &Path,
    params: &sepsolve::CanonicalParams,
    map: &sepsolve::ConformalMapSeries,
    grid: &GridRef,
) -> Result<Outcome, String> {
    let n = cfg.fd.as_ref().map(|f| f.n).unwrap_or_else(|| FdSpec::default().n);
    let h = cfg.boundary(grid, params)?;
    let solution =
        solve_series(params, &h, map, &cfg.solver_config()).map_err(|e| e.to_string())?;
    let stop = solution.report.stop_reason;
    if stop == StopReason::Diverging {
        let summary = Summary {
            status: "diverging",
            command: cfg.command.as_str(),
            stop_reason: Some(stop.as_str()),
            terms_used: Some(solution.report.terms_used()),
            tail_estimate: solution.report.tail_estimate,
            residual: Some(solution.report.residual_norm),
            boundary_error: Some(solution.report.boundary_error),
            warnings: solve_warnings(&h, stop),
        };
        let path = write_json(out_dir, "summary.json", &summary)?;
        return Ok(Outcome {
            exit: 3,
            lines: vec![path.display().to_string()],
        });
    }

    let cart = fd_solve(params, map, &h, n).map_err(|e| e.to_string())?;
    let (max, mean) = fd_compare(&cart, &solution.field).map_err(|e| e.to_string())?;
    let report = CompareReport {
        n,
        max_discrepancy: max,
        mean_discrepancy: mean,
    };
    let mut lines = Vec::new();
    lines.push(write_json(out_dir, "compare.json", &report)?.display().to_string());
    let summary = Summary {
        status: "ok",
        command: cfg.command.as_str(),
        stop_reason: Some(stop.as_str()),
        terms_used: Some(solution.report.terms_used()),
        tail_estimate: solution.report.tail_estimate,
        residual: Some(solution.report.residual_norm),
        boundary_error: Some(solution.report.boundary_error),
        warnings: solve_warnings(&h, stop),
    };
    lines.push(write_json(out_dir, "summary.json", &summary)?.display().to_string());
    lines.push(format!("n={n} max={max:.3e} mean={mean:.3e}"));
    Ok(Outcome { exit: 0, lines })
}
