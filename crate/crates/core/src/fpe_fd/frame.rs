//! The similarity frame `(z, s) = (x / t^α, ln t)`.
//!
//! With `V(z, s) = t^α W(z t^α, t)` the FPE becomes
//!
//! ```text
//! ∂s V = -∂z[(ρ̃1 - αz) V] + ∂z²(ρ̃2 V)
//! ρ̃1(z, s) = t^(1-α) D1(z t^α, t),   ρ̃2(z, s) = t^(1-2α) D2(z t^α, t)
//! ```
//!
//! on the fixed interval `[z_lo, z_hi]`. For exact similarity coefficients
//! `ρ̃1 = ρ1(z)` and `ρ̃2 = ρ2(z)`, so the operator is independent of `s`
//! and a zero-flux profile `y(z)` is stationary.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::scaling::{Coefficients, SimilarityProblem};

use super::operator::Transport;
use super::{FdDomain, FpeProblemSpec};

/// Fixed-interval problem for `V(z, s)`; see the module docs.
#[derive(Clone)]
pub struct SimilarityFrameProblem {
    pub z_lo: f64,
    pub z_hi: f64,
    pub alpha: f64,
    coefficients: Arc<dyn Coefficients>,
    exact: Option<SimilarityProblem>,
    /// `V` at the start time: positions in `z`, values `t^α W`. Its `t`
    /// field keeps the physical start time.
    pub initial: DensityField,
}

impl std::fmt::Debug for SimilarityFrameProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SimilarityFrameProblem")
            .field("z_lo", &self.z_lo)
            .field("z_hi", &self.z_hi)
            .field("alpha", &self.alpha)
            .field("autonomous", &self.is_autonomous())
            .finish()
    }
}

/// Maps a moving-domain problem onto the similarity frame.
pub fn to_similarity_frame(spec: &FpeProblemSpec) -> Result<SimilarityFrameProblem> {
    let FdDomain::Moving { z_lo, z_hi, alpha } = spec.domain else {
        return Err(Error::Config(
            "the similarity frame needs a moving domain (z_lo, z_hi, alpha)".into(),
        ));
    };
    let exact = spec
        .coefficients
        .similarity_form()
        .filter(|p| (p.alpha - alpha).abs() <= 1e-12 * alpha.abs().max(1.0))
        .cloned();
    let t0 = spec.initial.t;
    let ta = t0.powf(alpha);
    let init = &spec.initial;
    let initial = DensityField::new(
        t0,
        init.xs.iter().map(|x| x / ta).collect(),
        init.ws.iter().map(|w| w * ta).collect(),
        z_lo,
        z_hi,
    )
    .map_err(|e| Error::Config(format!("initial field does not fit the moving domain: {e}")))?;
    Ok(SimilarityFrameProblem { z_lo, z_hi, alpha, coefficients: spec.coefficients.clone(), exact, initial })
}

impl SimilarityFrameProblem {
    /// True when the coefficients have exact similarity form with this `α`.
    pub fn is_autonomous(&self) -> bool {
        self.exact.is_some()
    }

    /// Effective drift `ρ̃1(z, s) - αz`.
    pub fn drift(&self, z: f64, s: f64) -> f64 {
        let rho1 = match &self.exact {
            Some(p) => p.rho1.value(z),
            None => {
                let t = s.exp();
                let ta = t.powf(self.alpha);
                t / ta * self.coefficients.drift(z * ta, t)
            }
        };
        rho1 - self.alpha * z
    }

    /// `ρ̃2(z, s)`.
    pub fn diffusion(&self, z: f64, s: f64) -> f64 {
        match &self.exact {
            Some(p) => p.rho2.value(z),
            None => {
                let t = s.exp();
                let ta = t.powf(self.alpha);
                t / (ta * ta) * self.coefficients.diffusion(z * ta, t)
            }
        }
    }

    /// `∂ρ̃2/∂z = t^(1-α) ∂x D2`.
    pub fn diffusion_dz(&self, z: f64, s: f64) -> f64 {
        match &self.exact {
            Some(p) => p.rho2.derivative(z),
            None => {
                let t = s.exp();
                let ta = t.powf(self.alpha);
                t / ta * self.coefficients.diffusion_dx(z * ta, t)
            }
        }
    }

    /// Converts a similarity-frame field `V(z)` at physical time `t` back to
    /// `W(x, t)`.
    pub fn to_physical(&self, v: &DensityField) -> Result<DensityField> {
        let ta = v.t.powf(self.alpha);
        DensityField::new(
            v.t,
            v.xs.iter().map(|z| z * ta).collect(),
            v.ws.iter().map(|w| w / ta).collect(),
            self.z_lo * ta,
            self.z_hi * ta,
        )
    }
}

impl Transport for SimilarityFrameProblem {
    fn coefficients(&self, z: f64, s: f64) -> (f64, f64, f64) {
        (self.drift(z, s), self.diffusion(z, s), self.diffusion_dz(z, s))
    }

    fn autonomous(&self) -> bool {
        self.is_autonomous()
    }
}
