//! Conservative finite-volume solver for
//! `∂t W = -∂x(D1 W) + ∂x²(D2 W)` with zero-flux walls.
//!
//! The grid is uniform and cell centred. Each interior face carries the
//! probability current `S = D1 W - ∂x(D2 W)` in Scharfetter-Gummel form,
//! which is the Chang-Cooper weighting written for a general
//! `A = D1 - ∂x D2`:
//!
//! ```text
//! S_{i+1/2} = D2_f / h · [B(-Φ) W_i - B(Φ) W_{i+1}],   Φ = ∫ A / D2 dx,   B(x) = x / (e^x - 1)
//! ```
//!
//! It reduces to central differencing for small `Φ` and to upwinding of
//! the effective drift for large `|Φ|`, keeps the operator an M-matrix and
//! is second order in `h`; plain upwinding is only first order. The two
//! wall faces carry no flux, so nothing is ever divided by `D2` at a
//! degenerate wall. Faces whose quadrature nodes see `D2 = 0` fall back to
//! upwinding.
//!
//! Time stepping is Crank-Nicolson with a tridiagonal solve, or forward
//! Euler for [`Scheme::ExplicitUpwind`]. Both take steps no larger than
//! `cfl_safety · h² / (2 max D2 + max|D1| h)`.
//!
//! Moving walls `z_k t^α` are handled by solving in the similarity frame
//! (see [`frame`]); there the grid is fixed in `z`.

pub mod frame;
mod operator;
pub mod tridiagonal;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::scaling::Coefficients;
use crate::solutions::Family;

pub use frame::{to_similarity_frame, SimilarityFrameProblem};
pub use tridiagonal::solve_tridiagonal;

use operator::{apply, assemble, implicit_bands, FaceWeights, Grid, Transport};

/// Values may grow to this multiple of the initial maximum before the run
/// is declared unstable.
const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    CrankNicolson,
    ExplicitUpwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    PhysicalFixed,
    SimilarityMapped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub n_cells: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub scheme: Scheme,
    pub frame: Frame,
    /// Extra output times strictly between `t_start` and `t_end`.
    pub snapshot_times: Vec<f64>,
}

impl FdConfig {
    /// Crank-Nicolson with `cfl_safety = 0.4` and no snapshots.
    pub fn new(n_cells: usize, t_start: f64, t_end: f64, frame: Frame) -> Result<Self> {
        let cfg = FdConfig {
            n_cells,
            t_start,
            t_end,
            cfl_safety: 0.4,
            scheme: Scheme::CrankNicolson,
            frame,
            snapshot_times: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 16 {
            return Err(Error::Config(format!("n_cells must be at least 16, got {}", self.n_cells)));
        }
        if !(self.t_start > 0.0 && self.t_start < self.t_end && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < t_start < t_end, got {} and {}",
                self.t_start, self.t_end
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Config(format!("cfl_safety must lie in (0, 1], got {}", self.cfl_safety)));
        }
        if self.snapshot_times.iter().any(|&s| !(s > self.t_start && s < self.t_end))
            || self.snapshot_times.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::Config(
                "snapshot times must be increasing and strictly inside (t_start, t_end)".into(),
            ));
        }
        Ok(())
    }
}

/// Either a fixed interval in `x` or walls at `z_lo t^α` and `z_hi t^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FdDomain {
    Fixed { lo: f64, hi: f64 },
    Moving { z_lo: f64, z_hi: f64, alpha: f64 },
}

impl FdDomain {
    /// Physical interval at time `t`.
    pub fn at(&self, t: f64) -> (f64, f64) {
        match *self {
            FdDomain::Fixed { lo, hi } => (lo, hi),
            FdDomain::Moving { z_lo, z_hi, alpha } => {
                let ta = t.powf(alpha);
                (z_lo * ta, z_hi * ta)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = match *self {
            FdDomain::Fixed { lo, hi } => (lo, hi),
            FdDomain::Moving { z_lo, z_hi, alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::Config(format!("moving domain needs a finite alpha, got {alpha}")));
                }
                (z_lo, z_hi)
            }
        };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("domain [{lo}, {hi}] must be finite and non-empty")));
        }
        Ok(())
    }
}

/// Coefficients, domain and initial density of one evolution problem.
#[derive(Clone)]
pub struct FpeProblemSpec {
    pub coefficients: Arc<dyn Coefficients>,
    pub domain: FdDomain,
    pub initial: DensityField,
}

impl std::fmt::Debug for FpeProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FpeProblemSpec")
            .field("domain", &self.domain)
            .field("initial_t", &self.initial.t)
            .field("initial_cells", &self.initial.len())
            .finish()
    }
}

impl FpeProblemSpec {
    /// Checks that the initial field spans the domain at its own time, has
    /// mass `1 ± 1e-6` and sees `D2 ≥ 0` on its cells.
    pub fn new(coefficients: Arc<dyn Coefficients>, domain: FdDomain, initial: DensityField) -> Result<Self> {
        domain.validate()?;
        let (lo, hi) = domain.at(initial.t);
        let slack = 1e-9 * (hi - lo).abs();
        if (initial.x_lo - lo).abs() > slack || (initial.x_hi - hi).abs() > slack {
            return Err(Error::Config(format!(
                "initial support [{}, {}] differs from the domain [{lo}, {hi}] at t = {}",
                initial.x_lo, initial.x_hi, initial.t
            )));
        }
        let mass = initial.cell_mass();
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("initial mass is {mass}, expected 1 ± 1e-6")));
        }
        for x in initial.cell_faces().into_iter().chain(initial.xs.iter().copied()) {
            let d = coefficients.diffusion(x, initial.t);
            if d < 0.0 || d.is_nan() {
                return Err(Error::Parameter(format!("D2({x}, {}) = {d} is negative", initial.t)));
            }
        }
        Ok(FpeProblemSpec { coefficients, domain, initial })
    }

    /// Initial data from the exact cell averages of `density` on `n_cells`
    /// equal cells of the domain at `t_start`.
    pub fn from_density<F: Fn(f64) -> f64>(
        coefficients: Arc<dyn Coefficients>,
        domain: FdDomain,
        t_start: f64,
        n_cells: usize,
        density: F,
    ) -> Result<Self> {
        domain.validate()?;
        let (lo, hi) = domain.at(t_start);
        let initial = DensityField::from_cell_averages(t_start, lo, hi, n_cells, density)?;
        Self::new(coefficients, domain, initial)
    }

    /// A closed-form family evolved under its own similarity coefficients.
    pub fn for_family(family: &Family, domain: FdDomain, t_start: f64, n_cells: usize) -> Result<Self> {
        Self::from_density(Arc::new(family.similarity_problem()), domain, t_start, n_cells, |x| {
            family.density(x, t_start).unwrap_or(f64::NAN)
        })
    }
}

/// `S = D1 W - ∂x(D2 W) = D1 W - (∂x D2 · W + D2 · ∂x W)`.
pub fn probability_current(w: f64, dw_dx: f64, d1: f64, d2: f64, dd2_dx: f64) -> f64 {
    d1 * w - (dd2_dx * w + d2 * dw_dx)
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct FdSolution {
    /// Density at `t_end`, negatives clipped to 0.
    pub field: DensityField,
    /// Densities at the requested snapshot times, in order.
    pub snapshots: Vec<DensityField>,
    pub steps: usize,
    /// Largest `|mass - initial mass|` seen over all steps.
    pub max_mass_drift: f64,
    /// Smallest value seen before clipping.
    pub min_raw_value: f64,
}

struct PhysicalTransport<'a>(&'a dyn Coefficients);

impl Transport for PhysicalTransport<'_> {
    fn coefficients(&self, x: f64, t: f64) -> (f64, f64, f64) {
        (self.0.drift(x, t), self.0.diffusion(x, t), self.0.diffusion_dx(x, t))
    }

    fn autonomous(&self) -> bool {
        false
    }
}

struct RunStats {
    steps: usize,
    max_mass_drift: f64,
    min_raw_value: f64,
}

/// Integrates `∂τ V = L(τ) V` from `tau0` through every target, handing the
/// state to `emit` at each one. `times` gives the physical time of each
/// target for error reporting.
#[allow(clippy::too_many_arguments)]
fn march<T: Transport + ?Sized>(
    tr: &T,
    grid: &Grid,
    v: &mut [f64],
    tau0: f64,
    targets: &[f64],
    times: &[f64],
    cfg: &FdConfig,
    mut emit: impl FnMut(usize, &[f64]) -> Result<()>,
) -> Result<RunStats> {
    let n = grid.n;
    let h = grid.h;
    let autonomous = tr.autonomous();
    let mass0: f64 = v.iter().sum::<f64>() * h;
    let vmax0 = v.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let mut stats = RunStats { steps: 0, max_mass_drift: 0.0, min_raw_value: v.iter().copied().fold(f64::INFINITY, f64::min) };

    let mut current = assemble(tr, grid, tau0, cfg.scheme, autonomous)?;
    let mut tau = tau0;
    let mut lv = vec![0.0; n];

    for (k, &target) in targets.iter().enumerate() {
        while tau < target {
            let bound = cfg.cfl_safety * h * h / (2.0 * current.max_d + current.max_a * h);
            let remaining = target - tau;
            let dt = if bound.is_finite() && bound > 0.0 {
                remaining / (remaining / bound).ceil().max(1.0)
            } else {
                remaining
            };
            let last = dt >= remaining * (1.0 - 1e-12);
            let next_tau = if last { target } else { tau + dt };

            apply(&current, h, v, &mut lv);
            let next: Option<FaceWeights> = match (cfg.scheme, autonomous) {
                (Scheme::ExplicitUpwind, _) => {
                    v.iter_mut().zip(&lv).for_each(|(x, l)| *x += dt * l);
                    if autonomous {
                        None
                    } else {
                        Some(assemble(tr, grid, next_tau, cfg.scheme, false)?)
                    }
                }
                (Scheme::CrankNicolson, _) => {
                    let rhs: Vec<f64> = v.iter().zip(&lv).map(|(x, l)| x + 0.5 * dt * l).collect();
                    let next = if autonomous { None } else { Some(assemble(tr, grid, next_tau, cfg.scheme, false)?) };
                    let (lower, diag, upper) = implicit_bands(next.as_ref().unwrap_or(&current), h, 0.5 * dt, n);
                    let solved = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
                    v.copy_from_slice(&solved);
                    next
                }
            };
            if let Some(next) = next {
                current = next;
            }
            tau = next_tau;
            stats.steps += 1;

            check_bounded(v, vmax0, times[k], stats.steps)?;
            let mass: f64 = v.iter().sum();
            stats.min_raw_value = v.iter().copied().fold(stats.min_raw_value, f64::min);
            stats.max_mass_drift = stats.max_mass_drift.max((mass * h - mass0).abs());
        }
        emit(k, v)?;
    }
    Ok(stats)
}

/// Blow-up detection: every value finite and within
/// `BLOWUP_FACTOR` times the initial maximum.
fn check_bounded(v: &[f64], vmax0: f64, t: f64, steps: usize) -> Result<()> {
    match v.iter().find(|x| !x.is_finite() || x.abs() > BLOWUP_FACTOR * vmax0) {
        Some(x) => Err(Error::Instability {
            t,
            reason: format!("value {x:e} exceeds {BLOWUP_FACTOR:e} x the initial maximum after {steps} steps"),
        }),
        None => Ok(()),
    }
}

fn clipped(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.max(0.0)).collect()
}

/// Evolves the initial density of `spec` from `cfg.t_start` to
/// `cfg.t_end`.
///
/// The initial field is remapped conservatively onto the `n_cells` grid,
/// so it may come at any resolution. Fixed domains need the physical frame
/// and moving domains the similarity frame; other pairings are config
/// errors.
pub fn evolve(spec: &FpeProblemSpec, cfg: &FdConfig) -> Result<FdSolution> {
    cfg.validate()?;
    let rel = (spec.initial.t - cfg.t_start).abs() / cfg.t_start;
    if rel > 1e-12 {
        return Err(Error::Config(format!(
            "initial field is given at t = {}, but the run starts at {}",
            spec.initial.t, cfg.t_start
        )));
    }
    let mut times = cfg.snapshot_times.clone();
    times.push(cfg.t_end);
    let mut fields = Vec::with_capacity(times.len());

    let stats = match (spec.domain, cfg.frame) {
        (FdDomain::Fixed { lo, hi }, Frame::PhysicalFixed) => {
            let grid = Grid::new(lo, hi, cfg.n_cells);
            let mut v = spec.initial.remap_cells(lo, hi, cfg.n_cells);
            let centres = grid.centres();
            march(&PhysicalTransport(spec.coefficients.as_ref()), &grid, &mut v, cfg.t_start, &times, &times, cfg, |k, v| {
                fields.push(DensityField::new(times[k], centres.clone(), clipped(v), lo, hi)?);
                Ok(())
            })?
        }
        (FdDomain::Moving { .. }, Frame::SimilarityMapped) => {
            let sim = to_similarity_frame(spec)?;
            let grid = Grid::new(sim.z_lo, sim.z_hi, cfg.n_cells);
            let mut v = sim.initial.remap_cells(sim.z_lo, sim.z_hi, cfg.n_cells);
            let centres = grid.centres();
            let taus: Vec<f64> = times.iter().map(|t| t.ln()).collect();
            march(&sim, &grid, &mut v, cfg.t_start.ln(), &taus, &times, cfg, |k, v| {
                let vz = DensityField::new(times[k], centres.clone(), clipped(v), sim.z_lo, sim.z_hi)?;
                fields.push(sim.to_physical(&vz)?);
                Ok(())
            })?
        }
        (FdDomain::Fixed { .. }, Frame::SimilarityMapped) => {
            return Err(Error::Config(
                "similarity_mapped frame needs a moving domain (z_lo, z_hi, alpha)".into(),
            ))
        }
        (FdDomain::Moving { .. }, Frame::PhysicalFixed) => {
            return Err(Error::Config(
                "moving walls are only supported in the similarity_mapped frame".into(),
            ))
        }
    };

    let field = fields.pop().expect("t_end is always a target");
    Ok(FdSolution {
        field,
        snapshots: fields,
        steps: stats.steps,
        max_mass_drift: stats.max_mass_drift,
        min_raw_value: stats.min_raw_value,
    })
}

/// Evolves at `n_cells` and at `n_cells / 2` and reports the fine solution
/// with a Richardson-style L1 error estimate `‖u_h - u_2h‖ / 3` (second
/// order assumed).
pub fn evolve_with_error_estimate(spec: &FpeProblemSpec, cfg: &FdConfig) -> Result<(FdSolution, f64)> {
    let coarse_cfg = FdConfig { n_cells: (cfg.n_cells / 2).max(16), snapshot_times: Vec::new(), ..cfg.clone() };
    let (fine, coarse) = rayon::join(|| evolve(spec, cfg), || evolve(spec, &coarse_cfg));
    let (fine, coarse) = (fine?, coarse?);
    let estimate = fine.field.l1_distance_to(&coarse.field) / 3.0;
    Ok((fine, estimate))
}

/// L1 error against `reference(x, t)` at `t_end`, for each grid size in
/// `levels`.
///
/// At every level the initial data is rebuilt from the exact cell averages
/// of `reference` at `t_start`, and the error is measured against exact
/// cell averages at `t_end`. `spec.initial` only fixes the coefficients and
/// domain. Levels run in parallel.
pub fn convergence_study(
    spec: &FpeProblemSpec,
    cfg: &FdConfig,
    levels: &[usize],
    reference: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> Result<Vec<(usize, f64)>> {
    levels
        .par_iter()
        .map(|&n| {
            let level_spec = FpeProblemSpec::from_density(
                spec.coefficients.clone(),
                spec.domain,
                cfg.t_start,
                n,
                |x| reference(x, cfg.t_start),
            )?;
            let level_cfg = FdConfig { n_cells: n, snapshot_times: Vec::new(), ..cfg.clone() };
            let sol = evolve(&level_spec, &level_cfg)?;
            let err = sol.field.l1_against_cell_averages(|x| reference(x, cfg.t_end))?;
            Ok((n, err))
        })
        .collect()
}

/// Least-squares order `p` in `error ≈ C n^(-p)`.
pub fn fitted_order(results: &[(usize, f64)]) -> Result<f64> {
    if results.len() < 2 {
        return Err(Error::InvalidState("an order fit needs at least two levels".into()));
    }
    if results.iter().any(|&(n, e)| n == 0 || !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidState("an order fit needs positive errors and grid sizes".into()));
    }
    let pts: Vec<(f64, f64)> = results.iter().map(|&(n, e)| ((n as f64).ln(), e.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidState("an order fit needs distinct grid sizes".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::FnCoefficients;

    fn pure_diffusion() -> Arc<dyn Coefficients> {
        Arc::new(FnCoefficients { drift: |_: f64, _: f64| 0.0, diffusion: |_: f64, _: f64| 0.3 })
    }

    #[test]
    fn current_examples() {
        assert_eq!(probability_current(0.0, 0.0, 1.3, 0.7, 0.2), 0.0);
        // Fick's law
        assert_eq!(probability_current(0.4, 2.0, 0.0, 0.25, 0.0), -0.5);
        assert_eq!(probability_current(2.0, 1.0, 3.0, 0.5, 0.25), 6.0 - (0.5 + 0.5));
    }

    #[test]
    fn config_validation() {
        assert!(FdConfig::new(15, 0.5, 1.0, Frame::PhysicalFixed).is_err());
        assert!(FdConfig::new(16, 0.0, 1.0, Frame::PhysicalFixed).is_err());
        assert!(FdConfig::new(16, 1.0, 1.0, Frame::PhysicalFixed).is_err());
        let mut cfg = FdConfig::new(16, 0.5, 1.0, Frame::PhysicalFixed).unwrap();
        cfg.cfl_safety = 1.5;
        assert!(cfg.validate().is_err());
        cfg.cfl_safety = 0.4;
        cfg.snapshot_times = vec![0.7, 0.6];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn spec_validation() {
        let init = DensityField::from_cell_averages(1.0, 0.0, 1.0, 16, |_| 1.0).unwrap();
        let half = DensityField::from_cell_averages(1.0, 0.0, 1.0, 16, |_| 0.5).unwrap();
        assert!(FpeProblemSpec::new(pure_diffusion(), FdDomain::Fixed { lo: 0.0, hi: 1.0 }, half).is_err());
        assert!(FpeProblemSpec::new(pure_diffusion(), FdDomain::Fixed { lo: 0.0, hi: 2.0 }, init.clone()).is_err());
        let negative: Arc<dyn Coefficients> =
            Arc::new(FnCoefficients { drift: |_: f64, _: f64| 0.0, diffusion: |x: f64, _: f64| x - 0.5 });
        assert!(matches!(
            FpeProblemSpec::new(negative, FdDomain::Fixed { lo: 0.0, hi: 1.0 }, init),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn frame_domain_mismatch_is_a_config_error() {
        let spec = FpeProblemSpec::from_density(pure_diffusion(), FdDomain::Fixed { lo: 0.0, hi: 1.0 }, 1.0, 16, |_| 1.0)
            .unwrap();
        let cfg = FdConfig::new(16, 1.0, 2.0, Frame::SimilarityMapped).unwrap();
        assert!(matches!(evolve(&spec, &cfg), Err(Error::Config(_))));
        let moving = FdDomain::Moving { z_lo: 0.0, z_hi: 1.0, alpha: 0.5 };
        let spec = FpeProblemSpec::from_density(pure_diffusion(), moving, 1.0, 16, |_| 1.0).unwrap();
        let cfg = FdConfig::new(16, 1.0, 2.0, Frame::PhysicalFixed).unwrap();
        assert!(matches!(evolve(&spec, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn start_time_must_match_initial_field() {
        let spec = FpeProblemSpec::from_density(pure_diffusion(), FdDomain::Fixed { lo: 0.0, hi: 1.0 }, 1.0, 16, |_| 1.0)
            .unwrap();
        let cfg = FdConfig::new(16, 0.9, 2.0, Frame::PhysicalFixed).unwrap();
        assert!(matches!(evolve(&spec, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn uniform_density_stays_uniform() {
        for scheme in [Scheme::CrankNicolson, Scheme::ExplicitUpwind] {
            let spec =
                FpeProblemSpec::from_density(pure_diffusion(), FdDomain::Fixed { lo: 0.0, hi: 2.0 }, 1.0, 32, |_| 0.5)
                    .unwrap();
            let mut cfg = FdConfig::new(32, 1.0, 3.0, Frame::PhysicalFixed).unwrap();
            cfg.scheme = scheme;
            let sol = evolve(&spec, &cfg).unwrap();
            assert!(sol.field.ws.iter().all(|w| (w - 0.5).abs() < 1e-13), "{scheme:?}");
            assert!(sol.max_mass_drift < 1e-13);
        }
    }

    #[test]
    fn snapshots_are_emitted_in_order() {
        let spec = FpeProblemSpec::from_density(
            pure_diffusion(),
            FdDomain::Fixed { lo: 0.0, hi: 1.0 },
            1.0,
            16,
            |x| 2.0 * x,
        )
        .unwrap();
        let mut cfg = FdConfig::new(16, 1.0, 2.0, Frame::PhysicalFixed).unwrap();
        cfg.snapshot_times = vec![1.25, 1.5];
        let sol = evolve(&spec, &cfg).unwrap();
        let ts: Vec<f64> = sol.snapshots.iter().map(|f| f.t).collect();
        assert_eq!(ts, vec![1.25, 1.5]);
        assert_eq!(sol.field.t, 2.0);
        // diffusion flattens the ramp monotonically
        let spread = |f: &DensityField| f.ws[15] - f.ws[0];
        assert!(spread(&sol.snapshots[0]) > spread(&sol.snapshots[1]));
        assert!(spread(&sol.snapshots[1]) > spread(&sol.field));
    }

    #[test]
    fn blow_up_is_reported() {
        assert!(check_bounded(&[1.0, 2.0], 2.0, 1.0, 3).is_ok());
        assert!(matches!(check_bounded(&[1.0, 2.1e6], 2.0, 1.5, 3), Err(Error::Instability { t, .. }) if t == 1.5));
        assert!(check_bounded(&[f64::NAN], 2.0, 1.0, 3).is_err());
    }

    #[test]
    fn order_fit() {
        let data = [(64, 1.0), (128, 0.25), (256, 0.0625)];
        assert!((fitted_order(&data).unwrap() - 2.0).abs() < 1e-12);
        assert!(fitted_order(&data[..1]).is_err());
        assert!(fitted_order(&[(64, 1.0), (128, 0.0)]).is_err());
    }
}
