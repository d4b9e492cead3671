//! Runs a scenario's engines, compares them and writes the artifacts.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fpe_core::fpe_fd::{self, FdConfig, FpeProblemSpec};
use fpe_core::quadrature::{integrate, integrate_upper_half_line, Tolerance};
use fpe_core::sde_mc::{self, Histogram, InitialDistribution};
use fpe_core::{Bound, DensityField, Family};

use crate::error::CliError;
use crate::scenario::{Engine, Scenario};

/// Cells used to tabulate the start density of the Monte Carlo problem; the
/// paths themselves start from exact draws.
const MC_SPEC_CELLS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub t: f64,
    pub engine: Engine,
    pub mass: f64,
    pub peak_x: f64,
    pub peak_value: f64,
    pub l1_vs_analytic: Option<f64>,
    pub l1_vs_fd: Option<f64>,
    pub l1_vs_mc: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub engine: Engine,
    pub field: DensityField,
}

#[derive(Debug, Clone)]
pub struct Convergence {
    pub levels: Vec<(usize, f64)>,
    pub order: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: Scenario,
    pub curves: Vec<Curve>,
    pub histograms: Vec<Histogram>,
    pub rows: Vec<SummaryRow>,
    pub convergence: Option<Convergence>,
    /// Human-readable tolerance violations; empty when everything passed.
    pub failures: Vec<String>,
}

/// Mass of the closed-form density at `t` over its full support.
pub fn analytic_mass(family: &Family, t: f64) -> Result<f64, CliError> {
    let tol = Tolerance::new(1e-13, 1e-12);
    let density = |x: f64| family.density(x, t).unwrap_or(f64::NAN);
    let est = match family.support(t)? {
        (lo, Bound::Finite(hi)) => integrate(density, lo, hi, tol)?,
        (lo, _) => integrate_upper_half_line(density, lo, tol)?,
    };
    Ok(est.value)
}

fn later_fields(s: &Scenario) -> Result<Vec<DensityField>, CliError> {
    let fd = s.fd.as_ref().expect("fd engine has settings");
    let domain = s.fd_domain().expect("fd engine has a domain");
    let t_end = s.times[s.times.len() - 1];
    let cfg = FdConfig {
        cfl_safety: fd.cfl_safety,
        scheme: fd.scheme,
        snapshot_times: s.times[1..s.times.len() - 1].to_vec(),
        ..FdConfig::new(fd.cells, s.t_start(), t_end, fd.frame)?
    };
    let spec = FpeProblemSpec::for_family(&s.family, domain, s.t_start(), fd.cells)?;
    let sol = fpe_fd::evolve(&spec, &cfg)?;
    let mut fields = sol.snapshots;
    fields.push(sol.field);
    Ok(fields)
}

/// Grid-convergence study over `fd.levels`. The main run starts from the
/// same exact cell averages, so its endpoint `main` stands in for the level
/// equal to `fd.cells`.
fn convergence(s: &Scenario, main: &DensityField) -> Result<Option<Convergence>, CliError> {
    let fd = s.fd.as_ref().expect("fd engine has settings");
    if fd.levels.is_empty() {
        return Ok(None);
    }
    let domain = s.fd_domain().expect("fd engine has a domain");
    let t_end = s.times[s.times.len() - 1];
    let cfg = FdConfig {
        cfl_safety: fd.cfl_safety,
        scheme: fd.scheme,
        ..FdConfig::new(fd.cells, s.t_start(), t_end, fd.frame)?
    };
    let spec = FpeProblemSpec::for_family(&s.family, domain, s.t_start(), fd.levels[0])?;
    let family = s.family;
    let reference = move |x: f64, t: f64| family.density(x, t).unwrap_or(f64::NAN);
    let others: Vec<usize> = fd.levels.iter().copied().filter(|&n| n != fd.cells).collect();
    let mut levels = fpe_fd::convergence_study(&spec, &cfg, &others, &reference)?;
    if others.len() < fd.levels.len() {
        levels.push((fd.cells, main.l1_against_cell_averages(|x| reference(x, t_end))?));
        levels.sort_by_key(|&(n, _)| fd.levels.iter().position(|&m| m == n));
    }
    let order = fpe_fd::fitted_order(&levels)?;
    Ok(Some(Convergence { levels, order }))
}

fn monte_carlo(s: &Scenario) -> Result<Vec<Histogram>, CliError> {
    let mc = s.mc.as_ref().expect("mc engine has settings");
    let spec = FpeProblemSpec::for_family(&s.family, s.mc_domain(), s.t_start(), MC_SPEC_CELLS)?;
    let initial = InitialDistribution::from_family(s.family, s.t_start());
    let cfg = mc.config();
    s.later_times()
        .iter()
        .map(|&t| Ok(sde_mc::simulate_from(&spec, &cfg, t, &initial)?))
        .collect()
}

fn row(t: f64, engine: Engine, field: &DensityField, mass: f64) -> SummaryRow {
    let (peak_x, peak_value) = field.peak();
    SummaryRow { t, engine, mass, peak_x, peak_value, l1_vs_analytic: None, l1_vs_fd: None, l1_vs_mc: None }
}

/// Runs every engine of `s` and compares the results. Nothing is written.
pub fn execute(s: &Scenario) -> Result<RunReport, CliError> {
    let family = s.family;
    let exact = |x: f64, t: f64| family.density(x, t).unwrap_or(f64::NAN);
    let mut curves = Vec::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let tol = &s.tolerances;

    if s.engines.contains(&Engine::Analytic) {
        for &t in &s.times {
            let field = family.sample_field(t, s.analytic_points)?;
            let mass = analytic_mass(&family, t)?;
            if !((mass - 1.0).abs() <= tol.mass) {
                failures.push(format!("analytic mass {mass:.9} at t = {t} is outside 1 ± {:e}", tol.mass));
            }
            rows.push(row(t, Engine::Analytic, &field, mass));
            curves.push(Curve { engine: Engine::Analytic, field });
        }
    }

    let fd_fields = if s.engines.contains(&Engine::Fd) { Some(later_fields(s)?) } else { None };
    let histograms = if s.engines.contains(&Engine::Mc) { monte_carlo(s)? } else { Vec::new() };
    let convergence = match &fd_fields {
        Some(f) => convergence(s, f.last().expect("at least one later time"))?,
        None => None,
    };

    for (k, &t) in s.later_times().iter().enumerate() {
        let fd = fd_fields.as_ref().map(|f| &f[k]);
        let mc = histograms.get(k).map(|h| &h.field);
        if let Some(f) = fd {
            let mut r = row(t, Engine::Fd, f, f.cell_mass());
            let l1 = f.l1_against_cell_averages(|x| exact(x, t))?;
            if !(l1 <= tol.fd_l1) {
                failures.push(format!("fd L1 {l1:.3e} at t = {t} exceeds {:e}", tol.fd_l1));
            }
            r.l1_vs_analytic = Some(l1);
            r.l1_vs_mc = mc.map(|m| f.l1_distance_to(m));
            rows.push(r);
            curves.push(Curve { engine: Engine::Fd, field: f.clone() });
        }
        if let Some(m) = mc {
            let mut r = row(t, Engine::Mc, m, m.cell_mass());
            let l1 = sde_mc::l1_distance(m, &exact, t)?;
            if !(l1 <= tol.mc_l1) {
                failures.push(format!("mc L1 {l1:.3e} at t = {t} exceeds {:e}", tol.mc_l1));
            }
            r.l1_vs_analytic = Some(l1);
            r.l1_vs_fd = fd.map(|f| f.l1_distance_to(m));
            rows.push(r);
            curves.push(Curve { engine: Engine::Mc, field: m.clone() });
        }
    }
    if let Some(c) = &convergence {
        if !(c.order >= tol.order) {
            failures.push(format!("fitted convergence order {:.3} is below {}", c.order, tol.order));
        }
    }

    Ok(RunReport { scenario: s.clone(), curves, histograms, rows, convergence, failures })
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Engine(format!("cannot write {}: {e}", path.display())))
}

pub fn curve_file(name: &str, engine: Engine, t: f64) -> String {
    format!("{name}_{}_t{t}.csv", engine.name())
}

/// Writes curves, histograms, summary, convergence table and plot script
/// into `dir`, returning the paths written.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Engine(format!("cannot create {}: {e}", dir.display())))?;
    let name = &report.scenario.name;
    let mut written = Vec::new();

    for c in &report.curves {
        let path = dir.join(curve_file(name, c.engine, c.field.t));
        let mut out = create(&path)?;
        c.field.write_csv(&mut out)?;
        out.flush()?;
        written.push(path);
    }
    for h in &report.histograms {
        let path = dir.join(format!("{name}_mc_hist_t{}.csv", h.field.t));
        let mut out = create(&path)?;
        h.write_csv(&mut out)?;
        out.flush()?;
        written.push(path);
    }

    let path = dir.join(format!("{name}_summary.csv"));
    let mut out = create(&path)?;
    writeln!(out, "t,engine,mass,peak_x,peak_value,l1_vs_analytic,l1_vs_fd,l1_vs_mc")?;
    for r in &report.rows {
        writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{},{},{}",
            r.t,
            r.engine.name(),
            r.mass,
            r.peak_x,
            r.peak_value,
            opt(r.l1_vs_analytic),
            opt(r.l1_vs_fd),
            opt(r.l1_vs_mc)
        )?;
    }
    out.flush()?;
    written.push(path);

    if let Some(c) = &report.convergence {
        let path = dir.join(format!("{name}_convergence.csv"));
        let mut out = create(&path)?;
        writeln!(out, "n_cells,l1_error")?;
        for (n, e) in &c.levels {
            writeln!(out, "{n},{e:.16e}")?;
        }
        out.flush()?;
        written.push(path);
    }

    let path = dir.join(format!("{name}.gp"));
    fs::write(&path, plot_script(report))?;
    written.push(path);
    Ok(written)
}

/// A gnuplot script drawing every curve of the run from the CSVs next to it.
pub fn plot_script(report: &RunReport) -> String {
    let s = &report.scenario;
    let mut g = String::new();
    let _ = writeln!(g, "# {}: {}", s.name, s.description);
    let _ = writeln!(g, "set datafile separator \",\"");
    let _ = writeln!(g, "set terminal pngcairo size 900,600");
    let _ = writeln!(g, "set output \"{}.png\"", s.name);
    let _ = writeln!(g, "set xlabel \"x\"");
    let _ = writeln!(g, "set ylabel \"W(x,t)\"");
    let _ = writeln!(g, "set key top right");
    let plots: Vec<String> = report
        .curves
        .iter()
        .map(|c| {
            let style = match c.engine {
                Engine::Analytic => "lines lw 2",
                Engine::Fd => "lines dt 2",
                Engine::Mc => "steps",
            };
            format!(
                "\"{}\" using 2:3 skip 1 with {style} title \"{} t={}\"",
                curve_file(&s.name, c.engine, c.field.t),
                c.engine.name(),
                c.field.t
            )
        })
        .collect();
    let _ = writeln!(g, "plot {}", plots.join(", \\\n     "));
    if report.convergence.is_some() {
        let _ = writeln!(g, "\nset output \"{}_convergence.png\"", s.name);
        let _ = writeln!(g, "set logscale xy");
        let _ = writeln!(g, "set xlabel \"cells\"");
        let _ = writeln!(g, "set ylabel \"L1 error\"");
        let _ = writeln!(g, "plot \"{}_convergence.csv\" using 1:2 skip 1 with linespoints title \"fd\"", s.name);
    }
    g
}

/// Runs `s`, writes into `dir` and turns tolerance violations into an
/// error after the artifacts exist.
pub fn run(s: &Scenario, dir: &Path) -> Result<RunReport, CliError> {
    let report = execute(s)?;
    write_outputs(&report, dir)?;
    if !report.failures.is_empty() {
        return Err(CliError::Tolerance(report.failures.join("; ")));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::builtin;

    #[test]
    fn fig1_rows_and_peaks() {
        let report = execute(&builtin("fig1").unwrap()).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.failures.is_empty());
        for r in &report.rows {
            assert_eq!(r.peak_x, 0.0);
            assert!((r.peak_value / (2.0 * r.t * r.t) - 1.0).abs() < 1e-10);
            assert!((r.mass - 1.0).abs() < 1e-9);
        }
        let gp = plot_script(&report);
        assert!(gp.contains("fig1_analytic_t0.5.csv") && gp.contains("fig1_analytic_t1.4.csv"));
    }

    #[test]
    fn pairwise_columns_present_when_all_engines_run() {
        let mut s = builtin("verify-beta").unwrap();
        s.apply_overrides(None, Some(64), Some(2000)).unwrap();
        s.times = vec![1.0, 1.05];
        s.tolerances.fd_l1 = 1.0;
        s.tolerances.mc_l1 = 2.0;
        let report = execute(&s).unwrap();
        let fd = report.rows.iter().find(|r| r.engine == Engine::Fd).unwrap();
        let mc = report.rows.iter().find(|r| r.engine == Engine::Mc).unwrap();
        assert!(fd.l1_vs_analytic.is_some() && fd.l1_vs_mc.is_some());
        assert!(mc.l1_vs_analytic.is_some() && mc.l1_vs_fd.is_some());
        assert_eq!(fd.l1_vs_mc, mc.l1_vs_fd);
        assert!(report.failures.is_empty(), "{:?}", report.failures);
    }
}
