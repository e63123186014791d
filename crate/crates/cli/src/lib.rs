//! Batch commands behind the `optomech` binary: figure-ready curves,
//! cross-validation, and parameter scans, all emitting deterministic CSV
//! (fixed 17-significant-digit float formatting, `\n` line endings) with
//! a `key=value` sidecar recording the effective configuration.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use optomech::analytic::{
    average_concurrence, beta_of, concurrence_closed, evolve_analytic, postselect_analytic,
    Outcome,
};
use optomech::entanglement::concurrence_pure;
use optomech::fock::HilbertSpec;
use optomech::model::ModelParams;
use optomech::oracle::{postselect_numeric, tau_grid, undisplace_and_project, OracleEngine};

pub use config::RunConfig;

/// 17 significant digits, locale-independent; identical configs produce
/// byte-identical files.
pub fn fmt_f(x: f64) -> String {
    format!("{:.16e}", x)
}

fn write_output(cfg: &RunConfig, meta_extra: &[(&str, String)], body: String) -> Result<()> {
    fs::write(&cfg.out, body).with_context(|| format!("writing {}", cfg.out.display()))?;
    let meta_path = sidecar_path(&cfg.out);
    fs::write(&meta_path, cfg.meta(meta_extra))
        .with_context(|| format!("writing {}", meta_path.display()))?;
    Ok(())
}

pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".meta");
    os.into()
}

fn model(cfg: &RunConfig) -> Result<ModelParams> {
    ModelParams::from_ratio(cfg.ratio, cfg.xi_ratio, cfg.omega_c).map_err(|e| anyhow!("{e}"))
}

/// `tau,P1,P2,C1,C2,C_ave` over the scaled-time grid, from the closed
/// forms. Concurrence fields of vanishing-probability branches are empty.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<()> {
    cfg.validate().map_err(|e| anyhow!(e))?;
    let p = model(cfg)?;
    let mut body = String::from("tau,P1,P2,C1,C2,C_ave\n");
    for tau in tau_grid(cfg.tau_max, cfg.steps) {
        let st = evolve_analytic(&p, tau).map_err(|e| anyhow!("{e}"))?;
        let probs: Vec<f64> =
            Outcome::both().iter().map(|&o| postselect_analytic(&st, o).prob).collect();
        let cs: Vec<Option<f64>> =
            Outcome::both().iter().map(|&o| concurrence_closed(&p, tau, o)).collect();
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            fmt_f(tau),
            fmt_f(probs[0]),
            fmt_f(probs[1]),
            cs[0].map(fmt_f).unwrap_or_default(),
            cs[1].map(fmt_f).unwrap_or_default(),
            fmt_f(average_concurrence(&p, tau)),
        );
    }
    write_output(cfg, &[("command", "evolve".into())], body)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    /// Per-branch concurrence and probability curves.
    Concurrence,
    /// The average-concurrence envelope.
    Average,
}

/// `figure concurrence`: `tau,C1,P1,C2,P2`; `figure average`:
/// `tau,C_ave`.
pub fn cmd_figure(which: FigureKind, cfg: &RunConfig) -> Result<()> {
    cfg.validate().map_err(|e| anyhow!(e))?;
    let p = model(cfg)?;
    let command = match which {
        FigureKind::Concurrence => "figure concurrence",
        FigureKind::Average => "figure average",
    };
    let mut body = String::new();
    match which {
        FigureKind::Concurrence => {
            body.push_str("tau,C1,P1,C2,P2\n");
            for tau in tau_grid(cfg.tau_max, cfg.steps) {
                let st = evolve_analytic(&p, tau).map_err(|e| anyhow!("{e}"))?;
                let mut fields = vec![fmt_f(tau)];
                for o in Outcome::both() {
                    fields.push(concurrence_closed(&p, tau, o).map(fmt_f).unwrap_or_default());
                    fields.push(fmt_f(postselect_analytic(&st, o).prob));
                }
                // reorder to C1,P1,C2,P2
                let _ = writeln!(body, "{},{},{},{},{}", fields[0], fields[1], fields[2], fields[3], fields[4]);
            }
        }
        FigureKind::Average => {
            body.push_str("tau,C_ave\n");
            for tau in tau_grid(cfg.tau_max, cfg.steps) {
                let _ = writeln!(body, "{},{}", fmt_f(tau), fmt_f(average_concurrence(&p, tau)));
            }
        }
    }
    write_output(cfg, &[("command", command.into())], body)
}

/// One cross-validation row per (ratio, tau).
#[derive(Clone, Debug)]
pub struct ValidateRow {
    pub ratio: f64,
    pub report: optomech::oracle::ComparisonReport,
}

/// Outcome of the layered validation run: the CSV rows, the per-ratio
/// worst RWA infidelity, and every detected violation (empty means the
/// run passes).
pub struct ValidationSummary {
    pub rows: Vec<ValidateRow>,
    pub max_infidelity_per_ratio: Vec<(f64, f64)>,
    pub failures: Vec<String>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs all three propagators across the grid and ratio list, writes
/// `ratio,tau,f_exact_chain,f_rwa_analytic,f_exact_analytic,dP,dC,leakage`,
/// and checks the layered invariants: the approximation-free fidelities
/// at every point, and monotone decrease of the worst RWA infidelity as
/// the ratio grows.
pub fn cmd_validate(cfg: &RunConfig, ratios: &[f64]) -> Result<ValidationSummary> {
    cfg.validate().map_err(|e| anyhow!(e))?;
    if ratios.is_empty() {
        return Err(anyhow!("at least one ratio is required"));
    }
    let spec = HilbertSpec::new(cfg.n_b).map_err(|e| anyhow!("{e}"))?;
    let grid = tau_grid(cfg.tau_max, cfg.steps);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut max_infidelity_per_ratio = Vec::new();
    for &ratio in ratios {
        let p = ModelParams::from_ratio(ratio, cfg.xi_ratio, cfg.omega_c).map_err(|e| anyhow!("{e}"))?;
        let engine = OracleEngine::new(&p, spec).map_err(|e| anyhow!("ratio {ratio}: {e}"))?;
        let reports = engine.compare_grid(&grid).map_err(|e| anyhow!("ratio {ratio}: {e}"))?;
        let mut worst = 0.0_f64;
        for report in reports {
            for violation in report.layered_violations() {
                failures.push(format!("ratio {ratio}: {violation}"));
            }
            worst = worst.max(1.0 - report.fidelity_exact_vs_analytic);
            rows.push(ValidateRow { ratio, report });
        }
        max_infidelity_per_ratio.push((ratio, worst));
    }

    let mut by_ratio = max_infidelity_per_ratio.clone();
    by_ratio.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for pair in by_ratio.windows(2) {
        if pair[1].1 >= pair[0].1 {
            failures.push(format!(
                "RWA infidelity not decreasing: ratio {} gives {:.3e}, ratio {} gives {:.3e}",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            ));
        }
    }

    let mut body =
        String::from("ratio,tau,f_exact_chain,f_rwa_analytic,f_exact_analytic,dP,dC,leakage\n");
    for row in &rows {
        let r = &row.report;
        let _ = writeln!(
            body,
            "{},{},{},{},{},{},{},{}",
            fmt_f(row.ratio),
            fmt_f(r.tau),
            fmt_f(r.fidelity_exact_vs_chain_exact),
            fmt_f(r.fidelity_chain_rwa_vs_analytic),
            fmt_f(r.fidelity_exact_vs_analytic),
            fmt_f(r.prob_delta),
            fmt_f(r.concurrence_delta),
            fmt_f(r.leakage),
        );
    }
    let ratios_str = ratios.iter().map(|r| fmt_f(*r)).collect::<Vec<_>>().join(";");
    write_output(cfg, &[("command", "validate".into()), ("ratios", ratios_str)], body)?;

    Ok(ValidationSummary { rows, max_infidelity_per_ratio, failures })
}

/// Human-readable validation summary: worst RWA infidelity per ratio and
/// the failure table, if any.
pub fn render_summary(summary: &ValidationSummary) -> String {
    let mut out = String::from("layered validation summary\n");
    let mut by_ratio = summary.max_infidelity_per_ratio.clone();
    by_ratio.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for (ratio, infidelity) in by_ratio {
        let _ = writeln!(out, "  ratio {ratio:>10.1}: max RWA infidelity {infidelity:.3e}");
    }
    if summary.passed() {
        out.push_str("  all layered invariants hold\n");
    } else {
        let _ = writeln!(out, "  {} violation(s):", summary.failures.len());
        for f in &summary.failures {
            let _ = writeln!(out, "    {f}");
        }
    }
    out
}

/// Per-ratio peak entanglement yield: sweeps the exact propagator,
/// post-selects numerically, and reports the best average concurrence,
/// where it occurs, and the RWA infidelity there. Rows are sorted by
/// ratio.
pub fn cmd_scan(cfg: &RunConfig, ratios: &[f64]) -> Result<()> {
    cfg.validate().map_err(|e| anyhow!(e))?;
    if ratios.is_empty() {
        return Err(anyhow!("at least one ratio is required"));
    }
    let spec = HilbertSpec::new(cfg.n_b).map_err(|e| anyhow!("{e}"))?;
    let grid = tau_grid(cfg.tau_max, cfg.steps);
    let mut sorted = ratios.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut body = String::from("ratio,c_ave_max,tau_at_max,infidelity\n");
    for ratio in sorted {
        let p = ModelParams::from_ratio(ratio, cfg.xi_ratio, cfg.omega_c).map_err(|e| anyhow!("{e}"))?;
        let engine = OracleEngine::new(&p, spec).map_err(|e| anyhow!("ratio {ratio}: {e}"))?;
        let mut best = (0.0_f64, 0.0_f64); // (c_ave, tau)
        for &tau in &grid {
            let psi = engine.propagate_exact(tau).map_err(|e| anyhow!("{e}"))?;
            let beta = beta_of(&p, tau);
            let mut c_ave = 0.0;
            for outcome in Outcome::both() {
                let Ok((mech, prob)) = postselect_numeric(&psi, outcome) else { continue };
                let (pair, _) = undisplace_and_project(&mech, beta).map_err(|e| anyhow!("{e}"))?;
                c_ave += prob * concurrence_pure(&pair);
            }
            if c_ave > best.0 {
                best = (c_ave, tau);
            }
        }
        let report = engine.compare(best.1).map_err(|e| anyhow!("{e}"))?;
        let _ = writeln!(
            body,
            "{},{},{},{}",
            fmt_f(ratio),
            fmt_f(best.0),
            fmt_f(best.1),
            fmt_f(1.0 - report.fidelity_exact_vs_analytic),
        );
    }
    let ratios_str = ratios.iter().map(|r| fmt_f(*r)).collect::<Vec<_>>().join(";");
    write_output(cfg, &[("command", "scan".into()), ("ratios", ratios_str)], body)
}
