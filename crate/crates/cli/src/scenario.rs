//! Scenarios: a family, output times, engines and their settings.
//!
//! Built-in scenarios are written in the same `key = value` format as user
//! files, so both go through [`Scenario::from_config`].

use std::path::PathBuf;

use fpe_core::fpe_fd::{FdConfig, FdDomain, Frame, Scheme};
use fpe_core::sde_mc::{BoundaryPolicy, McConfig};
use fpe_core::{BetaFamilyParams, Family, GammaFamilyParams};

use crate::config::ConfigMap;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Analytic,
    Fd,
    Mc,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::Fd => "fd",
            Engine::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "fd" => Ok(Engine::Fd),
            "mc" => Ok(Engine::Mc),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSettings {
    pub cells: usize,
    pub cfl_safety: f64,
    pub scheme: Scheme,
    pub frame: Frame,
    /// Far wall in `z` for the gamma family in the similarity frame.
    pub z_max: Option<f64>,
    /// Far wall in `x` for the gamma family in the physical frame.
    pub x_max: Option<f64>,
    /// Grid sizes for a convergence study; empty for none.
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSettings {
    pub paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub bins: usize,
    pub boundary: BoundaryPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    pub mass: f64,
    pub fd_l1: f64,
    pub mc_l1: f64,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub family: Family,
    pub times: Vec<f64>,
    pub engines: Vec<Engine>,
    pub analytic_points: usize,
    pub fd: Option<FdSettings>,
    pub mc: Option<McSettings>,
    pub tolerances: Tolerances,
    pub out_dir: PathBuf,
}

const KNOWN_KEYS: &[&str] = &[
    "name",
    "description",
    "family",
    "alpha",
    "gamma.mu1",
    "gamma.mu2",
    "gamma.mu3",
    "beta.z1",
    "beta.z2",
    "beta.a1",
    "beta.a2",
    "times",
    "engines",
    "out_dir",
    "analytic.points",
    "fd.cells",
    "fd.cfl_safety",
    "fd.scheme",
    "fd.frame",
    "fd.z_max",
    "fd.x_max",
    "fd.levels",
    "mc.paths",
    "mc.dt",
    "mc.seed",
    "mc.bins",
    "mc.boundary",
    "tolerance.mass",
    "tolerance.fd_l1",
    "tolerance.mc_l1",
    "tolerance.order",
];

/// Tail mass cut off when an unbounded support needs a far wall.
pub const TAIL_CUTOFF: f64 = 1e-10;

pub const BUILTIN_NAMES: [&str; 5] = ["fig1", "fig2", "verify-gamma", "verify-beta", "convergence"];

const FIG1: &str = "\
name = fig1
description = gamma family, exponential case: peaks 2t^2 at x = 0 rising with t
family = gamma
alpha = -2
gamma.mu1 = -3
gamma.mu2 = 0.5
gamma.mu3 = 0.5
times = 0.5, 0.8, 1.1, 1.4
engines = analytic
";

const FIG2: &str = "\
name = fig2
description = beta family with walls at z_k t^alpha closing in on the origin
family = beta
alpha = -2
beta.z1 = 1
beta.z2 = 4
beta.a1 = 0.3333333333333333
beta.a2 = 0.5
times = 1.0, 1.2, 1.4
engines = analytic
";

const VERIFY_GAMMA: &str = "\
name = verify-gamma
description = gamma family evolved 0.5 -> 1.4 by finite volumes and Monte Carlo
family = gamma
alpha = -2
gamma.mu1 = -3
gamma.mu2 = 0.5
gamma.mu3 = 0.5
times = 0.5, 1.4
engines = analytic, fd, mc
fd.cells = 512
fd.frame = similarity_mapped
mc.paths = 100000
mc.dt = 1e-3
mc.seed = 1
";

const VERIFY_BETA: &str = "\
name = verify-beta
description = beta family evolved 1.0 -> 1.4 by finite volumes and Monte Carlo
family = beta
alpha = -2
beta.z1 = 1
beta.z2 = 4
beta.a1 = 0.3333333333333333
beta.a2 = 0.5
times = 1.0, 1.4
engines = analytic, fd, mc
fd.cells = 512
fd.frame = similarity_mapped
mc.paths = 100000
mc.dt = 1e-3
mc.seed = 1
";

const CONVERGENCE: &str = "\
name = convergence
description = grid convergence of the finite-volume solver, gamma family in x
family = gamma
alpha = -2
gamma.mu1 = -3
gamma.mu2 = 0.5
gamma.mu3 = 0.5
times = 0.5, 1.4
engines = analytic, fd
fd.cells = 512
fd.frame = physical_fixed
fd.x_max = 28
fd.levels = 64, 128, 256, 512
tolerance.fd_l1 = 5e-3
";

pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        "verify-gamma" => Some(VERIFY_GAMMA),
        "verify-beta" => Some(VERIFY_BETA),
        "convergence" => Some(CONVERGENCE),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Option<Scenario> {
    let src = builtin_source(name)?;
    Some(Scenario::from_config(&ConfigMap::parse(src, name).expect("built-in parses")).expect("built-in is valid"))
}

fn parse_enum<T>(c: &ConfigMap, key: &str, options: &[(&str, T)], default: T) -> Result<T, CliError>
where
    T: Copy,
{
    match c.raw(key) {
        None => Ok(default),
        Some(v) => options.iter().find(|(k, _)| *k == v).map(|(_, t)| *t).ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(k, _)| *k).collect();
            CliError::Config(format!("{}: `{key}` must be one of {}, got `{v}`", c.origin(), names.join(" | ")))
        }),
    }
}

impl Scenario {
    pub fn from_config(c: &ConfigMap) -> Result<Self, CliError> {
        c.reject_unknown(KNOWN_KEYS)?;
        let origin = c.origin();
        let bad = |msg: String| CliError::Config(format!("{origin}: {msg}"));

        let name: String = c.require("name")?;
        if name.is_empty() || name.contains(['/', '\\']) || name.chars().any(char::is_whitespace) {
            return Err(bad(format!("scenario name `{name}` must be non-empty without spaces or slashes")));
        }
        let alpha: f64 = c.require("alpha")?;
        let family = match c.raw("family") {
            Some("gamma") => Family::Gamma(
                GammaFamilyParams::new(c.require("gamma.mu1")?, c.require("gamma.mu2")?, c.require("gamma.mu3")?, alpha)
                    .map_err(|e| bad(e.to_string()))?,
            ),
            Some("beta") => Family::Beta(
                BetaFamilyParams::new(
                    c.require("beta.z1")?,
                    c.require("beta.z2")?,
                    c.require("beta.a1")?,
                    c.require("beta.a2")?,
                    alpha,
                )
                .map_err(|e| bad(e.to_string()))?,
            ),
            Some(other) => return Err(bad(format!("`family` must be gamma | beta, got `{other}`"))),
            None => return Err(bad("missing required key `family`".into())),
        };

        let times: Vec<f64> = c.get_list("times")?.ok_or_else(|| bad("missing required key `times`".into()))?;
        if times.is_empty() || times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(bad("`times` must be positive".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(bad("`times` must be strictly increasing".into()));
        }

        let engines: Vec<Engine> = c
            .get_list::<String>("engines")?
            .ok_or_else(|| bad("missing required key `engines`".into()))?
            .iter()
            .map(|e| e.parse().map_err(|_| bad(format!("unknown engine `{e}` (analytic | fd | mc)"))))
            .collect::<Result<_, _>>()?;
        let mut sorted = engines.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != engines.len() {
            return Err(bad("`engines` lists an engine twice".into()));
        }
        if engines.iter().any(|e| *e != Engine::Analytic) && times.len() < 2 {
            return Err(bad("fd and mc start at the first time and need at least one later time".into()));
        }

        let fd = if engines.contains(&Engine::Fd) {
            let cells: usize = c.require("fd.cells")?;
            let frame = parse_enum(
                c,
                "fd.frame",
                &[("similarity_mapped", Frame::SimilarityMapped), ("physical_fixed", Frame::PhysicalFixed)],
                Frame::SimilarityMapped,
            )?;
            if frame == Frame::PhysicalFixed && matches!(family, Family::Beta(_)) {
                return Err(bad("the beta family has moving walls: use fd.frame = similarity_mapped".into()));
            }
            let settings = FdSettings {
                cells,
                cfl_safety: c.get("fd.cfl_safety")?.unwrap_or(0.4),
                scheme: parse_enum(
                    c,
                    "fd.scheme",
                    &[("crank_nicolson", Scheme::CrankNicolson), ("explicit_upwind", Scheme::ExplicitUpwind)],
                    Scheme::CrankNicolson,
                )?,
                frame,
                z_max: c.get("fd.z_max")?,
                x_max: c.get("fd.x_max")?,
                levels: c.get_list("fd.levels")?.unwrap_or_default(),
            };
            // surface FdConfig's own checks now rather than mid-run
            let mut cfg = FdConfig::new(cells, times[0], times[times.len() - 1], frame).map_err(|e| bad(e.to_string()))?;
            cfg.cfl_safety = settings.cfl_safety;
            cfg.validate().map_err(|e| bad(e.to_string()))?;
            if settings.levels.iter().any(|&n| n < 16) || settings.levels.len() == 1 {
                return Err(bad("`fd.levels` needs at least two grid sizes, each ≥ 16".into()));
            }
            Some(settings)
        } else {
            None
        };

        let mc = if engines.contains(&Engine::Mc) {
            let settings = McSettings {
                paths: c.require("mc.paths")?,
                dt: c.get("mc.dt")?.unwrap_or(1e-3),
                seed: c.get("mc.seed")?.unwrap_or(1),
                bins: c.get("mc.bins")?.unwrap_or(64),
                boundary: parse_enum(
                    c,
                    "mc.boundary",
                    &[("reflect", BoundaryPolicy::Reflect), ("clamp_reflect", BoundaryPolicy::ClampReflect)],
                    BoundaryPolicy::Reflect,
                )?,
            };
            let span = times[1] - times[0];
            settings.config().validate(span).map_err(|e| bad(e.to_string()))?;
            Some(settings)
        } else {
            None
        };

        let tolerances = Tolerances {
            mass: c.get("tolerance.mass")?.unwrap_or(1e-6),
            fd_l1: c.get("tolerance.fd_l1")?.unwrap_or(1e-3),
            mc_l1: c.get("tolerance.mc_l1")?.unwrap_or(0.05),
            order: c.get("tolerance.order")?.unwrap_or(1.8),
        };
        let analytic_points: usize = c.get("analytic.points")?.unwrap_or(401);
        if analytic_points < 2 {
            return Err(bad("`analytic.points` must be at least 2".into()));
        }

        Ok(Scenario {
            description: c.raw("description").unwrap_or("").to_string(),
            out_dir: c.get::<String>("out_dir")?.map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out")),
            name,
            family,
            times,
            engines,
            analytic_points,
            fd,
            mc,
            tolerances,
        })
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    /// Output times after the start, where fd and mc report.
    pub fn later_times(&self) -> &[f64] {
        &self.times[1..]
    }

    /// Similarity-space walls for solvers that need a finite domain.
    pub fn similarity_walls(&self) -> (f64, f64) {
        match (&self.family, self.fd.as_ref().and_then(|f| f.z_max)) {
            (Family::Gamma(_), Some(z_max)) => (0.0, z_max),
            _ => self.family.truncated_similarity_domain(TAIL_CUTOFF),
        }
    }

    pub fn fd_domain(&self) -> Option<FdDomain> {
        let fd = self.fd.as_ref()?;
        Some(match fd.frame {
            Frame::SimilarityMapped => {
                let (z_lo, z_hi) = self.similarity_walls();
                FdDomain::Moving { z_lo, z_hi, alpha: self.family.alpha() }
            }
            Frame::PhysicalFixed => {
                let hi = fd.x_max.unwrap_or_else(|| {
                    // the widest the support gets between the first and last time
                    let (_, z_hi) = self.family.truncated_similarity_domain(1e-7);
                    let alpha = self.family.alpha();
                    z_hi * self.t_start().powf(alpha).max(self.times[self.times.len() - 1].powf(alpha))
                });
                FdDomain::Fixed { lo: 0.0, hi }
            }
        })
    }

    pub fn mc_domain(&self) -> FdDomain {
        let (z_lo, z_hi) = self.similarity_walls();
        FdDomain::Moving { z_lo, z_hi, alpha: self.family.alpha() }
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, cells: Option<usize>, paths: Option<usize>) -> Result<(), CliError> {
        if let (Some(fd), Some(cells)) = (self.fd.as_mut(), cells) {
            if cells < 16 {
                return Err(CliError::Config(format!("--cells must be at least 16, got {cells}")));
            }
            fd.cells = cells;
        }
        if let Some(mc) = self.mc.as_mut() {
            if let Some(seed) = seed {
                mc.seed = seed;
            }
            if let Some(paths) = paths {
                if paths < 1000 {
                    return Err(CliError::Config(format!("--paths must be at least 1000, got {paths}")));
                }
                mc.paths = paths;
            }
        }
        Ok(())
    }
}

impl McSettings {
    pub fn config(&self) -> McConfig {
        McConfig { n_paths: self.paths, dt: self.dt, seed: self.seed, boundary_policy: self.boundary, bins: self.bins }
    }
}
