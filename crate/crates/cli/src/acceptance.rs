//! The acceptance suite: eight criteria, each with a pinned tolerance and a
//! wall-clock budget, reported one line apiece.
//!
//! Randomized parameter sets come from a fixed ChaCha8 seed so every run
//! checks the same cases.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fpe_core::quadrature::{integrate, Tolerance};
use fpe_core::scaling::coefficients_at;
use fpe_core::solutions::{first_integral_residual, reduced_ode_residual, solve_profile};
use fpe_core::special::{beta_fn, ln_gamma};
use fpe_core::{BetaFamilyParams, Family, GammaFamilyParams, ScalingIndices, SimilarityProblem};

use crate::error::CliError;
use crate::runner::{execute, RunReport};
use crate::scenario::{builtin, Engine, Scenario};

const SEED: u64 = 0x5eed_f9e5;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {}: {} ({:.2} s of {:.0} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

/// Outcome of a check body: pass flag and a one-line detail.
type Outcome = Result<(bool, String), CliError>;

fn timed(id: u8, title: &'static str, budget_s: u64, body: impl FnOnce() -> Outcome) -> CriterionResult {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    let (ok, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let in_budget = elapsed <= budget;
    if !in_budget {
        detail.push_str("; over the time budget");
    }
    CriterionResult { id, title, passed: ok && in_budget, detail, elapsed, budget }
}

pub const TITLES: [&str; 8] = [
    "gamma figure curves",
    "beta figure curves",
    "reduced ODE and flux residuals",
    "quadrature profiles vs closed forms",
    "finite-volume cross-validation",
    "Monte Carlo cross-validation",
    "self-similarity and scale covariance",
    "special functions",
];

/// Runs criterion `id` (1..=8).
pub fn run_criterion(id: u8) -> Option<CriterionResult> {
    let title = *TITLES.get(usize::from(id).checked_sub(1)?)?;
    Some(match id {
        1 => timed(id, title, 1, gamma_figure),
        2 => timed(id, title, 1, beta_figure),
        3 => timed(id, title, 5, residuals),
        4 => timed(id, title, 10, quadrature_profiles),
        5 => timed(id, title, 60, finite_volume),
        6 => timed(id, title, 120, monte_carlo),
        7 => timed(id, title, 5, self_similarity),
        _ => timed(id, title, 1, special_functions),
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=8).filter_map(run_criterion).collect()
}

fn analytic_curves(report: &RunReport) -> impl Iterator<Item = &fpe_core::DensityField> {
    report.curves.iter().filter(|c| c.engine == Engine::Analytic).map(|c| &c.field)
}

fn gamma_figure() -> Outcome {
    let report = execute(&builtin("fig1").expect("built-in"))?;
    let mut worst = 0.0_f64;
    let mut at_origin = true;
    let mut peaks = Vec::new();
    for r in report.rows.iter().filter(|r| r.engine == Engine::Analytic) {
        worst = worst.max((r.peak_value / (2.0 * r.t * r.t) - 1.0).abs());
        at_origin &= r.peak_x == 0.0;
        peaks.push(r.peak_value);
    }
    let increasing = peaks.windows(2).all(|w| w[0] < w[1]);
    let ok = peaks.len() == 4 && worst <= 1e-10 && at_origin && increasing;
    let list: Vec<String> = peaks.iter().map(|p| format!("{p:.4}")).collect();
    Ok((ok, format!("peaks {{{}}} at x = 0, max rel. error {worst:.1e}, increasing: {increasing}", list.join(", "))))
}

fn beta_figure() -> Outcome {
    let report = execute(&builtin("fig2").expect("built-in"))?;
    let Family::Beta(p) = report.scenario.family else {
        return Ok((false, "fig2 is not a beta scenario".into()));
    };
    // walls rounded to four decimals
    let rounded = [(1.0, 4.0), (0.6944, 2.7778), (0.5102, 2.0408)];
    let mut wall_err = 0.0_f64;
    let mut rounded_err = 0.0_f64;
    let mut mass_err = 0.0_f64;
    let mut mode_ok = true;
    let mut walls = Vec::new();
    for ((field, row), pr) in analytic_curves(&report).zip(&report.rows).zip(rounded) {
        let t2 = field.t * field.t;
        wall_err = wall_err.max((field.x_lo - p.z1 / t2).abs()).max((field.x_hi - p.z2 / t2).abs());
        rounded_err = rounded_err.max((field.x_lo - pr.0).abs()).max((field.x_hi - pr.1).abs());
        mass_err = mass_err.max((row.mass - 1.0).abs());
        let cell = (field.x_hi - field.x_lo) / (field.len() - 1) as f64;
        mode_ok &= (row.peak_x - 2.2 / t2).abs() <= cell;
        walls.push((field.x_lo, field.x_hi));
    }
    let shrinking = walls.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1);
    let ok = walls.len() == 3 && wall_err <= 1e-10 && rounded_err <= 5e-5 && mass_err <= 1e-6 && mode_ok && shrinking;
    Ok((
        ok,
        format!(
            "wall error {wall_err:.1e}, mass error {mass_err:.1e}, mode within a cell: {mode_ok}, walls close in: {shrinking}"
        ),
    ))
}

fn random_gamma(rng: &mut ChaCha8Rng) -> GammaFamilyParams {
    let alpha = if rng.random_bool(0.5) { rng.random_range(-3.0..-0.2) } else { rng.random_range(0.2..3.0) };
    let mu3 = rng.random_range(0.2..2.0);
    let rate = rng.random_range(0.3..5.0);
    let kappa = rng.random_range(1.0..6.0);
    GammaFamilyParams::new(alpha - rate * mu3, kappa * mu3, mu3, alpha).expect("constructed valid")
}

fn random_beta(rng: &mut ChaCha8Rng) -> BetaFamilyParams {
    let alpha = if rng.random_bool(0.5) { rng.random_range(-3.0..-0.2) } else { rng.random_range(0.2..3.0) };
    let z1 = rng.random_range(-2.0..2.0);
    let z2 = z1 + rng.random_range(0.5..4.0);
    BetaFamilyParams::new(z1, z2, rng.random_range(0.1..3.0), rng.random_range(0.1..3.0), alpha)
        .expect("constructed valid")
}

/// `n` evenly spaced interior points of `(lo, hi)`.
fn interior(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |k| lo + (hi - lo) * k as f64 / (n + 1) as f64)
}

/// Interior of the family's (truncated) similarity domain.
fn domain_of(f: &Family) -> (f64, f64) {
    f.truncated_similarity_domain(1e-10)
}

/// Largest residual of the second-order and first-integral equations,
/// each relative to the sum of its term magnitudes.
fn worst_residual(f: &Family) -> f64 {
    let pb: SimilarityProblem = f.similarity_problem();
    let (lo, hi) = domain_of(f);
    let mut worst = 0.0_f64;
    for z in interior(lo, hi, 32) {
        let (y, dy, d2y) = f.profile_jet(z);
        let (r2, r2d, r2dd) = (pb.rho2.value(z), pb.rho2.derivative(z), pb.rho2.second_derivative(z));
        let (r1, r1d) = (pb.rho1.value(z), pb.rho1.derivative(z));
        let a = pb.alpha;
        let scale2 = (r2 * d2y).abs() + ((2.0 * r2d - r1 + a * z) * dy).abs() + ((r2dd - r1d + a) * y).abs();
        let scale1 = (r2 * dy).abs() + ((r2d - r1 + a * z) * y).abs();
        if scale2 > 0.0 {
            worst = worst.max(reduced_ode_residual(&pb, y, dy, d2y, z).abs() / scale2);
        }
        if scale1 > 0.0 {
            worst = worst.max(first_integral_residual(&pb, y, dy, z).abs() / scale1);
        }
    }
    worst
}

fn residuals() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = [0.0_f64; 2];
    for _ in 0..100 {
        worst[0] = worst[0].max(worst_residual(&Family::Gamma(random_gamma(&mut rng))));
        worst[1] = worst[1].max(worst_residual(&Family::Beta(random_beta(&mut rng))));
    }
    let ok = worst.iter().all(|w| *w < 1e-8);
    Ok((ok, format!("100 sets per family, worst relative residual gamma {:.1e}, beta {:.1e}", worst[0], worst[1])))
}

fn profile_error(f: &Family) -> Result<f64, CliError> {
    let sol = solve_profile(&f.similarity_problem(), 4000)?;
    let (lo, hi) = domain_of(f);
    // stay a tenth of the span away from either end
    let margin = 0.1 * (hi - lo);
    let mut worst = 0.0_f64;
    for z in interior(lo + margin, hi - margin, 8) {
        let exact = f.profile(z);
        worst = worst.max((sol.y(z)? / exact - 1.0).abs());
    }
    Ok(worst)
}

fn figure_families() -> [Family; 2] {
    [builtin("fig1").expect("built-in").family, builtin("fig2").expect("built-in").family]
}

fn quadrature_profiles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut families = figure_families().to_vec();
    for _ in 0..20 {
        families.push(Family::Gamma(random_gamma(&mut rng)));
        families.push(Family::Beta(random_beta(&mut rng)));
    }
    let mut worst = 0.0_f64;
    for f in &families {
        worst = worst.max(profile_error(f)?);
    }
    Ok((worst <= 1e-6, format!("{} profiles, worst relative error {worst:.1e}", families.len())))
}

fn engine_only(name: &str, engine: Engine) -> Scenario {
    let mut s = builtin(name).expect("built-in");
    s.engines = vec![engine];
    s
}

fn endpoint_l1(report: &RunReport, engine: Engine) -> f64 {
    report
        .rows
        .iter()
        .rfind(|r| r.engine == engine)
        .and_then(|r| r.l1_vs_analytic)
        .unwrap_or(f64::INFINITY)
}

fn finite_volume() -> Outcome {
    let gamma = endpoint_l1(&execute(&engine_only("verify-gamma", Engine::Fd))?, Engine::Fd);
    let beta = endpoint_l1(&execute(&engine_only("verify-beta", Engine::Fd))?, Engine::Fd);
    let conv = execute(&builtin("convergence").expect("built-in"))?;
    let c = conv.convergence.ok_or_else(|| CliError::Engine("convergence scenario has no study".into()))?;
    let errors: Vec<String> = c.levels.iter().map(|(n, e)| format!("{n}:{e:.2e}")).collect();
    let ok = gamma <= 1e-3 && beta <= 1e-3 && c.order >= 1.8;
    Ok((
        ok,
        format!(
            "512-cell L1 gamma {gamma:.2e}, beta {beta:.2e}; order {:.2} from [{}]",
            c.order,
            errors.join(" ")
        ),
    ))
}

fn monte_carlo() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["verify-gamma", "verify-beta"] {
        let mut l1s = Vec::new();
        for seed in 1..=5 {
            let mut s = engine_only(name, Engine::Mc);
            s.apply_overrides(Some(seed), None, Some(100_000))?;
            l1s.push(endpoint_l1(&execute(&s)?, Engine::Mc));
        }
        let passing = l1s.iter().filter(|l| **l <= 0.05).count();
        ok &= passing >= 4;
        let list: Vec<String> = l1s.iter().map(|l| format!("{l:.4}")).collect();
        parts.push(format!("{name} {passing}/5 [{}]", list.join(" ")));
    }
    Ok((ok, parts.join("; ")))
}

fn self_similarity() -> Outcome {
    let mut collapse = 0.0_f64;
    for f in figure_families() {
        let alpha = f.alpha();
        let (lo, hi) = domain_of(&f);
        for z in interior(lo, hi, 20) {
            let y = f.profile(z);
            for t in [0.3_f64, 0.5, 0.8, 1.1, 1.4, 2.0, 3.5] {
                let ta = t.powf(alpha);
                collapse = collapse.max((ta * f.density(z * ta, t)? / y - 1.0).abs());
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut covariance = 0.0_f64;
    let mut indices_ok = true;
    for f in figure_families() {
        let pb = f.similarity_problem();
        let (lo, hi) = domain_of(&f);
        let mut checked = 0;
        while checked < 1000 {
            let b = rng.random_range(0.25..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let idx = ScalingIndices::similarity(f.alpha() * b, b)?;
            indices_ok &= idx.consistent() && idx.normalizable() && (idx.alpha() - f.alpha()).abs() < 1e-14;
            let eps = rng.random_range(0.5..2.0);
            let t: f64 = rng.random_range(0.4..2.0);
            let z = rng.random_range(lo..hi);
            let x = z * t.powf(f.alpha());
            let (xs, ts) = idx.transform(eps, x, t);
            let w = f.density(x, t)?;
            if w < 1e-200 {
                continue;
            }
            let ws = f.density(xs, ts)?;
            covariance = covariance.max((ws / (eps.powf(idx.c) * w) - 1.0).abs());
            let (d1, d2) = coefficients_at(&pb, x, t)?;
            let (d1s, d2s) = coefficients_at(&pb, xs, ts)?;
            if d1 != 0.0 {
                covariance = covariance.max((d1s / (eps.powf(idx.d) * d1) - 1.0).abs());
            }
            if d2 != 0.0 {
                covariance = covariance.max((d2s / (eps.powf(idx.e) * d2) - 1.0).abs());
            }
            checked += 1;
        }
    }
    let ok = collapse <= 1e-10 && covariance <= 1e-10 && indices_ok;
    Ok((
        ok,
        format!("profile collapse {collapse:.1e}; 1000 triples per family, worst covariance error {covariance:.1e}"),
    ))
}

fn special_functions() -> Outcome {
    let mut recurrence = 0.0_f64;
    let n = 2000;
    for k in 0..=n {
        let x = 0.5 + 49.5 * k as f64 / n as f64;
        let gap = ln_gamma(x + 1.0)? - ln_gamma(x)? - x.ln();
        recurrence = recurrence.max(gap.exp_m1().abs());
    }
    let (p, q) = (4.0 / 3.0, 1.5);
    let oracle = integrate(|u| u.powf(p - 1.0) * (1.0 - u).powf(q - 1.0), 0.0, 1.0, Tolerance::new(1e-14, 1e-13))?.value;
    let beta_err = (beta_fn(p, q)? / oracle - 1.0).abs();
    Ok((
        recurrence <= 1e-12 && beta_err <= 1e-10,
        format!("recurrence error {recurrence:.1e} on [0.5, 50]; B(4/3, 3/2) error {beta_err:.1e}"),
    ))
}
