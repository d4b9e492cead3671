//! Monte Carlo sampling of the Itô SDE behind the FPE,
//!
//! ```text
//! dX = D1(X, t) dt + sqrt(2 D2(X, t)) dB
//! ```
//!
//! Itô, not Stratonovich: `∂x²(D2 W)` in the FPE corresponds to drift `D1`
//! and variance rate `2 D2` only in the Itô reading. For `x`-dependent
//! `D2` the Stratonovich drift would differ by `∂x D2 / 2`.
//!
//! Paths take Euler-Maruyama steps. Coefficients are evaluated at the
//! state clamped into the current domain (full truncation, i.e.
//! `max(X, 0)` for a wall at the origin), and after each step the state is
//! folded back across whichever wall it crossed, using the wall positions
//! at the end of the step. Every path draws from its own ChaCha8 stream
//! `(seed, path_index)`, and histograms add integer counts, so results do
//! not depend on how paths are spread over threads.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::fpe_fd::{FdDomain, FpeProblemSpec};
use crate::quadrature::{integrate, Tolerance};
use crate::solutions::Family;

/// Fold iterations allowed under [`BoundaryPolicy::ClampReflect`] before
/// the state is pinned to the nearest wall.
const CLAMP_AFTER_FOLDS: usize = 1;

/// Analytic mass outside the histogram support that [`l1_distance`]
/// tolerates.
pub const SUPPORT_MISMATCH_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Fold `X -> 2 x_b - X` about the crossed wall until inside.
    Reflect,
    /// Fold once; if still outside, clamp to the nearest wall.
    ClampReflect,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub boundary_policy: BoundaryPolicy,
    pub bins: usize,
}

impl McConfig {
    /// Reflecting walls and 64 bins.
    pub fn new(n_paths: usize, dt: f64, seed: u64) -> Self {
        McConfig { n_paths, dt, seed, boundary_policy: BoundaryPolicy::Reflect, bins: 64 }
    }

    pub fn validate(&self, span: f64) -> Result<()> {
        if self.n_paths < 1000 {
            return Err(Error::Config(format!("n_paths must be at least 1000, got {}", self.n_paths)));
        }
        if self.bins < 16 {
            return Err(Error::Config(format!("bins must be at least 16, got {}", self.bins)));
        }
        if !(self.dt > 0.0 && self.dt < span) {
            return Err(Error::Config(format!(
                "dt must be positive and below t_end - t_start = {span}, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

/// How starting points are drawn.
#[derive(Debug, Clone)]
pub enum InitialDistribution {
    /// Exact draws from a closed-form family at its start time, rejected
    /// until inside the domain.
    Family { family: Family, t: f64 },
    /// Inverse CDF of a density read as piecewise constant on its cells.
    Tabulated { faces: Vec<f64>, cdf: Vec<f64> },
}

impl InitialDistribution {
    pub fn from_field(field: &DensityField) -> Result<Self> {
        let faces = field.cell_faces();
        let mut cdf = Vec::with_capacity(field.len() + 1);
        cdf.push(0.0);
        let mut acc = 0.0;
        for (w, f) in field.ws.iter().zip(faces.windows(2)) {
            if *w < 0.0 {
                return Err(Error::InvalidState("cannot sample a negative density".into()));
            }
            acc += w * (f[1] - f[0]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::InvalidState("cannot sample a density with zero mass".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(InitialDistribution::Tabulated { faces, cdf })
    }

    pub fn from_family(family: Family, t: f64) -> Self {
        InitialDistribution::Family { family, t }
    }

    fn sample<R: Rng>(&self, rng: &mut R, lo: f64, hi: f64) -> Result<f64> {
        match self {
            InitialDistribution::Tabulated { faces, cdf } => {
                let u: f64 = rng.random();
                // first cell whose upper CDF value reaches u
                let k = cdf[1..].partition_point(|&c| c < u).min(faces.len() - 2);
                let width = cdf[k + 1] - cdf[k];
                let frac = if width > 0.0 { (u - cdf[k]) / width } else { 0.5 };
                Ok(faces[k] + frac * (faces[k + 1] - faces[k]))
            }
            InitialDistribution::Family { family, t } => {
                let draw = |rng: &mut R| -> Result<f64> {
                    match family {
                        Family::Gamma(p) => {
                            let g = Gamma::new(p.shape(), 1.0 / p.rate(*t))
                                .map_err(|e| Error::Parameter(format!("gamma sampler: {e}")))?;
                            Ok(g.sample(rng))
                        }
                        Family::Beta(p) => {
                            let b = Beta::new(p.a1 + 1.0, p.a2 + 1.0)
                                .map_err(|e| Error::Parameter(format!("beta sampler: {e}")))?;
                            let ta = t.powf(p.alpha);
                            let u: f64 = b.sample(rng);
                            Ok(p.z1 * ta + u * (p.z2 - p.z1) * ta)
                        }
                    }
                };
                for _ in 0..10_000 {
                    let x = draw(rng)?;
                    if x >= lo && x <= hi {
                        return Ok(x);
                    }
                }
                Err(Error::InvalidState(format!(
                    "initial distribution puts almost no mass on [{lo}, {hi}]"
                )))
            }
        }
    }
}

/// Empirical density at `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Bin centres and densities `count / (n_paths · width)`.
    pub field: DensityField,
    pub counts: Vec<u64>,
    pub n_paths: usize,
}

impl Histogram {
    /// CSV rows `t,bin_center,density,count`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,bin_center,density,count")?;
        for ((x, w), c) in self.field.xs.iter().zip(&self.field.ws).zip(&self.counts) {
            writeln!(out, "{:.16e},{:.16e},{:.16e},{}", self.field.t, x, w, c)?;
        }
        Ok(())
    }
}

/// Folds `x` into `[lo, hi]`.
pub fn reflect(x: f64, lo: f64, hi: f64, policy: BoundaryPolicy) -> f64 {
    let mut x = x;
    let mut folds = 0;
    while x < lo || x > hi {
        if policy == BoundaryPolicy::ClampReflect && folds >= CLAMP_AFTER_FOLDS {
            return x.clamp(lo, hi);
        }
        x = if x < lo { 2.0 * lo - x } else { 2.0 * hi - x };
        folds += 1;
        if folds > 64 {
            // a jump of many domain widths; fold by the period directly
            let period = 2.0 * (hi - lo);
            let r = (x - lo).rem_euclid(period);
            x = if r <= hi - lo { lo + r } else { lo + period - r };
            break;
        }
    }
    x
}

/// Runs `cfg.n_paths` paths from `spec.initial` to `t_end`.
pub fn simulate(spec: &FpeProblemSpec, cfg: &McConfig, t_end: f64) -> Result<Histogram> {
    simulate_from(spec, cfg, t_end, &InitialDistribution::from_field(&spec.initial)?)
}

/// [`simulate`] with an explicit starting distribution.
pub fn simulate_from(
    spec: &FpeProblemSpec,
    cfg: &McConfig,
    t_end: f64,
    initial: &InitialDistribution,
) -> Result<Histogram> {
    let t0 = spec.initial.t;
    cfg.validate(t_end - t0)?;
    let steps = ((t_end - t0) / cfg.dt).ceil() as usize;
    let dt = (t_end - t0) / steps as f64;
    let (lo_end, hi_end) = spec.domain.at(t_end);
    let bins = cfg.bins;
    let width = (hi_end - lo_end) / bins as f64;
    let coeffs = spec.coefficients.as_ref();
    let domain = spec.domain;
    let moving = matches!(domain, FdDomain::Moving { .. });

    let run_path = |index: usize| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index as u64);
        let (mut lo, mut hi) = domain.at(t0);
        let mut x = initial.sample(&mut rng, lo, hi)?;
        for k in 0..steps {
            let t = t0 + dt * k as f64;
            let xe = x.clamp(lo, hi);
            let (d1, d2) = coeffs.drift_diffusion(xe, t);
            if d2 < 0.0 {
                return Err(Error::Parameter(format!("D2({xe}, {t}) = {d2} is negative")));
            }
            let n: f64 = StandardNormal.sample(&mut rng);
            x += d1 * dt + (2.0 * d2 * dt).sqrt() * n;
            if !x.is_finite() {
                return Err(Error::InvalidState(format!("path {index} left the reals at t = {t}")));
            }
            let t_next = if k + 1 == steps { t_end } else { t + dt };
            if moving {
                (lo, hi) = domain.at(t_next);
            }
            x = reflect(x, lo, hi, cfg.boundary_policy);
        }
        Ok(x)
    };

    let counts = (0..cfg.n_paths)
        .into_par_iter()
        .try_fold(
            || vec![0u64; bins],
            |mut acc, i| {
                let x = run_path(i)?;
                let b = (((x - lo_end) / width) as usize).min(bins - 1);
                acc[b] += 1;
                Ok::<_, Error>(acc)
            },
        )
        .try_reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let norm = cfg.n_paths as f64 * width;
    let field = DensityField::new(
        t_end,
        DensityField::cell_centres(lo_end, hi_end, bins),
        counts.iter().map(|&c| c as f64 / norm).collect(),
        lo_end,
        hi_end,
    )?;
    Ok(Histogram { field, counts, n_paths: cfg.n_paths })
}

/// `Σ |p̂_i - p_i| Δx_i` between a histogram and `analytic(·, t)` sampled
/// at the bin centres and renormalized over the binned support.
///
/// `analytic` must be a normalized density: if more than
/// [`SUPPORT_MISMATCH_TOLERANCE`] of its mass falls outside the histogram
/// support the comparison is refused.
pub fn l1_distance(empirical: &DensityField, analytic: &dyn Fn(f64, f64) -> f64, t: f64) -> Result<f64> {
    let inside = integrate(|x| analytic(x, t), empirical.x_lo, empirical.x_hi, Tolerance::new(1e-10, 1e-9))?.value;
    if 1.0 - inside > SUPPORT_MISMATCH_TOLERANCE {
        return Err(Error::SupportMismatch(format!(
            "{:.3e} of the analytic mass lies outside [{}, {}]",
            1.0 - inside,
            empirical.x_lo,
            empirical.x_hi
        )));
    }
    let faces = empirical.cell_faces();
    let widths: Vec<f64> = faces.windows(2).map(|f| f[1] - f[0]).collect();
    let p: Vec<f64> = empirical.xs.iter().map(|&x| analytic(x, t)).collect();
    let mass: f64 = p.iter().zip(&widths).map(|(p, w)| p * w).sum();
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::SupportMismatch("analytic density vanishes at every bin centre".into()));
    }
    let emp_mass: f64 = empirical.ws.iter().zip(&widths).map(|(p, w)| p * w).sum();
    Ok(empirical
        .ws
        .iter()
        .zip(&p)
        .zip(&widths)
        .map(|((e, a), w)| (e / emp_mass - a / mass).abs() * w)
        .sum())
}
