//! Half-line family with `ρ1 = μ1 z + μ2`, `ρ2 = μ3 z`, i.e.
//! `D1 = μ1 x / t + μ2 t^(α-1)` and `D2 = μ3 x t^(α-1)` on `x ≥ 0`.
//!
//! The zero-flux solution is a gamma density with shape `κ = μ2/μ3` and
//! time-dependent rate `λ(t) = (α - μ1) / (μ3 t^α)`:
//!
//! ```text
//! W(x, t) = λ^κ / Γ(κ) · x^(κ-1) · exp(-λ x)
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scaling::{Bound, Polynomial, SimilarityDomain, SimilarityProblem};
use crate::special::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFamilyParams {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub alpha: f64,
}

/// Classification of a parameter set against the family constraints.
#[derive(Debug, Clone, PartialEq)]
pub enum GammaValidity {
    Valid,
    /// `0 < μ2/μ3 < 1`: the density is integrable but unbounded at `x = 0`,
    /// which the family's `μ2/μ3 ≥ 1` requirement excludes.
    IntegrableButExcluded,
    Invalid(String),
}

impl GammaFamilyParams {
    /// Validated constructor: requires `μ3 ≠ 0`, `(α - μ1)/μ3 > 0` and
    /// `μ2/μ3 ≥ 1`.
    pub fn new(mu1: f64, mu2: f64, mu3: f64, alpha: f64) -> Result<Self> {
        match Self::diagnose(mu1, mu2, mu3, alpha) {
            GammaValidity::Valid => Ok(GammaFamilyParams { mu1, mu2, mu3, alpha }),
            GammaValidity::IntegrableButExcluded => Err(Error::Parameter(format!(
                "mu2/mu3 = {} < 1: integrable but excluded (density unbounded at x = 0)",
                mu2 / mu3
            ))),
            GammaValidity::Invalid(reason) => Err(Error::Parameter(reason)),
        }
    }

    pub fn diagnose(mu1: f64, mu2: f64, mu3: f64, alpha: f64) -> GammaValidity {
        if ![mu1, mu2, mu3, alpha].iter().all(|v| v.is_finite()) {
            return GammaValidity::Invalid("parameters must be finite".into());
        }
        if mu3 == 0.0 {
            return GammaValidity::Invalid("mu3 must be nonzero".into());
        }
        if !((alpha - mu1) / mu3 > 0.0) {
            return GammaValidity::Invalid(format!(
                "(alpha - mu1)/mu3 = {} must be positive",
                (alpha - mu1) / mu3
            ));
        }
        let kappa = mu2 / mu3;
        if kappa >= 1.0 {
            GammaValidity::Valid
        } else if kappa > 0.0 {
            GammaValidity::IntegrableButExcluded
        } else {
            GammaValidity::Invalid(format!("mu2/mu3 = {kappa} must be positive"))
        }
    }

    /// Shape `κ = μ2/μ3`.
    pub fn shape(&self) -> f64 {
        self.mu2 / self.mu3
    }

    /// Rate at `t = 1`, `(α - μ1)/μ3`.
    pub fn base_rate(&self) -> f64 {
        (self.alpha - self.mu1) / self.mu3
    }

    /// `λ(t) = (α - μ1) / (μ3 t^α)`.
    pub fn rate(&self, t: f64) -> f64 {
        self.base_rate() / t.powf(self.alpha)
    }

    pub fn similarity_problem(&self) -> SimilarityProblem {
        SimilarityProblem {
            rho1: Arc::new(Polynomial::linear(self.mu1, self.mu2)),
            rho2: Arc::new(Polynomial::linear(self.mu3, 0.0)),
            alpha: self.alpha,
            domain: SimilarityDomain { lo: Bound::Finite(0.0), hi: Bound::Unbounded },
        }
    }

    fn ln_profile(&self, z: f64) -> f64 {
        let k = self.shape();
        let lam = self.base_rate();
        k * lam.ln() - ln_gamma(k).expect("shape is positive") + (k - 1.0) * z.ln() - lam * z
    }

    /// `y(z) = W(z, 1)`, zero for `z < 0`.
    pub fn profile(&self, z: f64) -> f64 {
        if z < 0.0 {
            0.0
        } else if z == 0.0 {
            self.value_at_origin(self.base_rate())
        } else {
            self.ln_profile(z).exp()
        }
    }

    /// `(y, y', y'')` for `z > 0`.
    pub fn profile_jet(&self, z: f64) -> (f64, f64, f64) {
        let y = self.profile(z);
        let k = self.shape();
        let g = (k - 1.0) / z - self.base_rate();
        let dg = -(k - 1.0) / (z * z);
        (y, y * g, y * (g * g + dg))
    }

    fn value_at_origin(&self, lam: f64) -> f64 {
        if self.shape() == 1.0 {
            lam
        } else {
            0.0
        }
    }

    /// Similarity coordinate beyond which the profile carries less than
    /// `tail` of its mass.
    pub fn similarity_cutoff(&self, tail: f64) -> f64 {
        // Upper tail of Gamma(κ, λ): bisect on a bracketing Chernoff-style
        // bound, then refine with the exact tail integral.
        let lam = self.base_rate();
        let k = self.shape();
        let tail_mass = |z: f64| {
            crate::quadrature::integrate_upper_half_line(|s| self.profile(s), z, Default::default())
                .map(|e| e.value)
                .unwrap_or(0.0)
        };
        let mut hi = (k + (1.0 / tail).ln()) / lam;
        while tail_mass(hi) > tail {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if tail_mass(mid) > tail {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `W(x, t) = λ^κ / Γ(κ) · x^(κ-1) · exp(-λx)`, evaluated in log space.
pub fn gamma_family_density(p: &GammaFamilyParams, x: f64, t: f64) -> Result<f64> {
    GammaFamilyParams::new(p.mu1, p.mu2, p.mu3, p.alpha)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be strictly positive, got {t}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("gamma family lives on x ≥ 0, got x = {x}")));
    }
    let lam = p.rate(t);
    if x == 0.0 {
        return Ok(p.value_at_origin(lam));
    }
    let k = p.shape();
    Ok((k * lam.ln() - ln_gamma(k)? + (k - 1.0) * x.ln() - lam * x).exp())
}

/// Location and height of the peak for the exponential case `μ2 = μ3`:
/// `(0, |(μ1 - α) / (μ3 t^α)|)`.
pub fn gamma_family_peak(p: &GammaFamilyParams, t: f64) -> Result<(f64, f64)> {
    if (p.mu2 - p.mu3).abs() > 1e-12 * p.mu3.abs() {
        return Err(Error::Parameter(format!(
            "peak formula needs mu2 = mu3, got mu2 = {}, mu3 = {}",
            p.mu2, p.mu3
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be strictly positive, got {t}")));
    }
    Ok((0.0, ((p.mu1 - p.alpha) / (p.mu3 * t.powf(p.alpha))).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_upper_half_line, Tolerance};

    fn fig1() -> GammaFamilyParams {
        GammaFamilyParams::new(-3.0, 0.5, 0.5, -2.0).unwrap()
    }

    #[test]
    fn peak_values_follow_two_t_squared() {
        let p = fig1();
        assert!((gamma_family_density(&p, 0.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((gamma_family_density(&p, 0.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
        let (x, w) = gamma_family_peak(&p, 1.4).unwrap();
        assert_eq!(x, 0.0);
        assert!((w - 3.92).abs() < 1e-13);
        let (_, w1) = gamma_family_peak(&p, 1.0).unwrap();
        assert!((w1 - (p.mu1 - p.alpha).abs() / p.mu3).abs() < 1e-15);
    }

    #[test]
    fn peak_increases_for_negative_alpha_and_decreases_for_positive() {
        let times = [0.5, 0.8, 1.1, 1.4];
        let neg = fig1();
        let pos = GammaFamilyParams::new(-1.0, 0.7, 0.7, 0.5).unwrap();
        let peaks = |p: &GammaFamilyParams| times.map(|t| gamma_family_peak(p, t).unwrap().1);
        assert!(peaks(&neg).windows(2).all(|w| w[1] > w[0]));
        assert!(peaks(&pos).windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn peak_requires_exponential_case() {
        let p = GammaFamilyParams::new(-3.0, 1.0, 0.5, -2.0).unwrap();
        assert!(matches!(gamma_family_peak(&p, 1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn origin_behaviour_by_shape() {
        let p = GammaFamilyParams::new(-3.0, 0.75, 0.5, -2.0).unwrap();
        assert_eq!(gamma_family_density(&p, 0.0, 1.0).unwrap(), 0.0);
        assert!(gamma_family_density(&p, -0.1, 1.0).is_err());
        assert!(gamma_family_density(&p, 0.1, 0.0).is_err());
    }

    #[test]
    fn constraint_diagnostics() {
        assert_eq!(GammaFamilyParams::diagnose(-3.0, 0.5, 0.5, -2.0), GammaValidity::Valid);
        assert_eq!(
            GammaFamilyParams::diagnose(-3.0, 0.25, 0.5, -2.0),
            GammaValidity::IntegrableButExcluded
        );
        assert!(matches!(GammaFamilyParams::diagnose(-3.0, -0.5, 0.5, -2.0), GammaValidity::Invalid(_)));
        assert!(matches!(GammaFamilyParams::diagnose(-1.0, 0.5, 0.5, -2.0), GammaValidity::Invalid(_)));
        assert!(matches!(GammaFamilyParams::diagnose(-3.0, 0.5, 0.0, -2.0), GammaValidity::Invalid(_)));
        assert!(GammaFamilyParams::new(-3.0, 0.25, 0.5, -2.0).is_err());
    }

    #[test]
    fn negative_mu3_keeps_a_valid_density() {
        // (α - μ1)/μ3 > 0 and μ2/μ3 ≥ 1 with μ3 < 0
        let p = GammaFamilyParams::new(1.0, -1.5, -0.5, -2.0).unwrap();
        let mass = integrate_upper_half_line(|x| gamma_family_density(&p, x, 1.3).unwrap(), 0.0, Tolerance::default())
            .unwrap()
            .value;
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_is_normalized() {
        for p in [fig1(), GammaFamilyParams::new(0.3, 3.1, 0.9, 1.2).unwrap()] {
            for t in [0.5, 1.0, 2.7] {
                let mass = integrate_upper_half_line(
                    |x| gamma_family_density(&p, x, t).unwrap(),
                    0.0,
                    Tolerance::default(),
                )
                .unwrap()
                .value;
                assert!((mass - 1.0).abs() < 1e-9, "{p:?} t={t}: {mass}");
            }
        }
    }

    #[test]
    fn cutoff_bounds_the_tail() {
        let p = fig1();
        let z = p.similarity_cutoff(1e-10);
        // exponential with rate 2: tail e^{-2z}
        assert!(((-2.0 * z).exp() - 1e-10).abs() < 1e-13, "{z}");
    }
}
