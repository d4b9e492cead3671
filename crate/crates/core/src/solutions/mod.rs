//! Similarity solutions of the reduced equation
//!
//! ```text
//! ρ2 y'' + (2ρ2' - ρ1 + αz) y' + (ρ2'' - ρ1' + α) y = 0
//! ```
//!
//! which integrates once to `ρ2 y' + (ρ2' - ρ1 + αz) y = C`. Impenetrable
//! walls force `C = 0`, leaving `y = A exp(∫ f)` with
//! `f = (ρ1 - ρ2' - αz) / ρ2`. [`solve_profile`] evaluates that quadrature
//! for any [`SimilarityProblem`]; [`gamma`] and [`beta`] carry the two
//! closed-form families.

pub mod beta;
pub mod gamma;

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::field::DensityField;
use crate::quadrature::{self, Tolerance};
use crate::scaling::{Bound, SimilarityProblem};

pub use beta::{
    beta_family_density, beta_normalization_constant, boundary_positions, BetaFamilyParams,
    BetaSubclass, WallDiffusion,
};
pub use gamma::{gamma_family_density, gamma_family_peak, GammaFamilyParams, GammaValidity};

/// |ρ2| below this is treated as a zero of the diffusion profile.
pub const SINGULAR_RHO2: f64 = 1e-300;

/// `f(z) = (ρ1(z) - ρ2'(z) - αz) / ρ2(z)`.
pub fn f_from_profiles(problem: &SimilarityProblem, z: f64) -> Result<f64> {
    if !problem.domain.contains_interior(z) {
        return Err(Error::Domain(format!(
            "f(z) is only defined inside the similarity domain, got z = {z}"
        )));
    }
    let rho2 = problem.rho2.value(z);
    if rho2.abs() < SINGULAR_RHO2 {
        return Err(Error::Singularity { z });
    }
    Ok((problem.rho1.value(z) - problem.rho2.derivative(z) - problem.alpha * z) / rho2)
}

/// Residual of the second-order reduced equation; zero for exact solutions.
pub fn reduced_ode_residual(problem: &SimilarityProblem, y: f64, dy: f64, d2y: f64, z: f64) -> f64 {
    let rho2 = problem.rho2.value(z);
    let rho2_d = problem.rho2.derivative(z);
    let rho2_dd = problem.rho2.second_derivative(z);
    let rho1 = problem.rho1.value(z);
    let rho1_d = problem.rho1.derivative(z);
    let alpha = problem.alpha;
    rho2 * d2y + (2.0 * rho2_d - rho1 + alpha * z) * dy + (rho2_dd - rho1_d + alpha) * y
}

/// `ρ2 y' + (ρ2' - ρ1 + αz) y`, the integration constant `C` carried by
/// `(y, y')` at `z`. Zero-flux solutions give 0.
pub fn first_integral_residual(problem: &SimilarityProblem, y: f64, dy: f64, z: f64) -> f64 {
    let rho2 = problem.rho2.value(z);
    let rho2_d = problem.rho2.derivative(z);
    let rho1 = problem.rho1.value(z);
    rho2 * dy + (rho2_d - rho1 + problem.alpha * z) * y
}

/// Zero-flux solution `y(z) = A exp(∫_{z_ref}^{z} f)` of a similarity
/// problem, evaluated by adaptive quadrature.
///
/// `z_ref` is the domain anchor (see [`crate::SimilarityDomain::anchor`]);
/// the integration constant `C` is zero and the multiplicative constant is
/// folded into `A`.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    problem: SimilarityProblem,
    anchor: f64,
    ln_norm: f64,
    max_intervals: usize,
}

const INNER_TOL: Tolerance = Tolerance::new(1e-13, 1e-12);

impl ProfileSolution {
    pub fn problem(&self) -> &SimilarityProblem {
        &self.problem
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// Normalization constant `A`.
    pub fn normalization(&self) -> f64 {
        self.ln_norm.exp()
    }

    pub fn f(&self, z: f64) -> Result<f64> {
        f_from_profiles(&self.problem, z)
    }

    /// `∫_{z_ref}^{z} f(ζ) dζ`.
    pub fn log_y_unnorm(&self, z: f64) -> Result<f64> {
        if !self.problem.domain.contains(z) {
            return Err(Error::Domain(format!("z = {z} lies outside the similarity domain")));
        }
        integrate_checked(|s| f_from_profiles(&self.problem, s), self.anchor, z, INNER_TOL, self.max_intervals)
    }

    pub fn log_y(&self, z: f64) -> Result<f64> {
        Ok(self.ln_norm + self.log_y_unnorm(z)?)
    }

    pub fn y(&self, z: f64) -> Result<f64> {
        self.log_y(z).map(f64::exp)
    }

    /// `W(x, t) = t^(-α) y(x / t^α)`; zero outside the moving support.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        let z = crate::scaling::similarity_variable(x, t, self.problem.alpha)?;
        if !self.problem.domain.contains_interior(z) {
            return Ok(0.0);
        }
        crate::scaling::density_from_profile(self.y(z)?, t, self.problem.alpha)
    }

    /// `∫ y dz` over the domain, recomputed from scratch.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.ln_norm.exp() * unnormalized_mass(&self.problem, self.anchor, self.max_intervals)?)
    }
}

/// Inside the mass integral, an unconverged `ln y` whose error estimate is
/// below this is still used. Near a wall at `z_k != 0`, `s - z_k` keeps few
/// significant digits and rounding noise stalls the inner rule; those points
/// carry almost no mass, and `1e-8` in `ln y` is `1e-8` relative in `y`.
const MASS_INNER_SLACK: f64 = 1e-8;

/// Subinterval cap for each `ln y` inside the mass integral; a stalled inner
/// rule otherwise burns the full cap at every outer node.
const MASS_INNER_INTERVALS: usize = 256;

/// Runs an adaptive integral of a fallible integrand, surfacing the
/// integrand's own error in preference to the quadrature failure it causes.
fn integrate_checked<F>(f: F, a: f64, b: f64, tol: Tolerance, max_intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate_checked_with_slack(f, a, b, tol, max_intervals, 0.0)
}

/// [`integrate_checked`], accepting an unconverged estimate whose error is
/// at most `slack`.
fn integrate_checked_with_slack<F>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
    slack: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = RefCell::new(None);
    let wrapped = |s: f64| match f(s) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let est = quadrature::integrate_best_effort(wrapped, a, b, tol, max_intervals);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    match est? {
        (e, true) => Ok(e.value),
        (e, false) if e.error <= slack => Ok(e.value),
        (e, false) => Err(Error::Quadrature(format!(
            "no convergence after {max_intervals} subintervals (estimate {:e} ± {:e})",
            e.value, e.error
        ))),
    }
}

fn unnormalized_mass(problem: &SimilarityProblem, anchor: f64, max_intervals: usize) -> Result<f64> {
    let tol = Tolerance::default();
    let failure = RefCell::new(None);
    let integrand = |z: f64| {
        let inner = integrate_checked_with_slack(
            |s| f_from_profiles(problem, s),
            anchor,
            z,
            INNER_TOL,
            max_intervals.min(MASS_INNER_INTERVALS),
            MASS_INNER_SLACK,
        );
        match inner {
            Ok(l) => l.exp(),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let non_normalizable = |side: &str, e: Error| match e {
        Error::Quadrature(msg) => Error::NonNormalizable(format!("{side} integral failed: {msg}")),
        // a zero of ρ2 met at the very edge of the domain: f blows up like
        // 1/(z - z_edge) with a weight that exp(∫f) cannot integrate
        Error::Singularity { z } => {
            Error::NonNormalizable(format!("{side} integral hits a non-integrable zero of rho2 near z = {z:e}"))
        }
        other => other,
    };

    let mut total = 0.0;
    for (side, lo_side) in [("lower", true), ("upper", false)] {
        let bound = if lo_side { problem.domain.lo } else { problem.domain.hi };
        let est = match bound {
            Bound::Finite(end) => quadrature::integrate_with_limit(&integrand, anchor, end, tol, max_intervals)
                .map(|e| if lo_side { -e.value } else { e.value }),
            Bound::Unbounded if lo_side => {
                quadrature::integrate_lower_half_line(&integrand, anchor, tol).map(|e| e.value)
            }
            Bound::Unbounded => quadrature::integrate_upper_half_line(&integrand, anchor, tol).map(|e| e.value),
        };
        if let Some(e) = failure.borrow_mut().take() {
            // The inner integral diverging near an endpoint means exp(L) -> ∞ or 0;
            // either way the outer rule cannot resolve a normalizable profile.
            return Err(non_normalizable(side, e));
        }
        total += est.map_err(|e| non_normalizable(side, e))?;
    }
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonNormalizable(format!("profile mass evaluates to {total}")));
    }
    Ok(total)
}

/// Builds the zero-flux profile of `problem` and normalizes it.
///
/// `max_intervals` caps the number of subintervals in every adaptive
/// integral; a divergent mass integral exhausts it and is reported as
/// [`Error::NonNormalizable`].
pub fn solve_profile(problem: &SimilarityProblem, max_intervals: usize) -> Result<ProfileSolution> {
    let anchor = problem.domain.anchor();
    // Probe f at the anchor first so a singular ρ2 is reported as such.
    f_from_profiles(problem, anchor)?;
    let mass = unnormalized_mass(problem, anchor, max_intervals)?;
    Ok(ProfileSolution {
        problem: problem.clone(),
        anchor,
        ln_norm: -mass.ln(),
        max_intervals,
    })
}

/// The two closed-form families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gamma(GammaFamilyParams),
    Beta(BetaFamilyParams),
}

impl Family {
    pub fn alpha(&self) -> f64 {
        match self {
            Family::Gamma(p) => p.alpha,
            Family::Beta(p) => p.alpha,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Gamma(_) => "gamma",
            Family::Beta(_) => "beta",
        }
    }

    pub fn similarity_problem(&self) -> SimilarityProblem {
        match self {
            Family::Gamma(p) => p.similarity_problem(),
            Family::Beta(p) => p.similarity_problem(),
        }
    }

    /// W(x, t); zero outside the physical support.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            Family::Gamma(p) if x < 0.0 => {
                crate::scaling::similarity_variable(x, t, p.alpha)?;
                Ok(0.0)
            }
            Family::Gamma(p) => gamma_family_density(p, x, t),
            Family::Beta(p) => beta_family_density(p, x, t),
        }
    }

    /// y(z) = W(z, 1).
    pub fn profile(&self, z: f64) -> f64 {
        match self {
            Family::Gamma(p) => p.profile(z),
            Family::Beta(p) => p.profile(z),
        }
    }

    /// `(y, y', y'')` at `z`, analytically.
    pub fn profile_jet(&self, z: f64) -> (f64, f64, f64) {
        match self {
            Family::Gamma(p) => p.profile_jet(z),
            Family::Beta(p) => p.profile_jet(z),
        }
    }

    /// Physical support at time `t`; the gamma family extends to +∞.
    pub fn support(&self, t: f64) -> Result<(f64, Bound)> {
        match self {
            Family::Gamma(p) => {
                crate::scaling::similarity_variable(0.0, t, p.alpha)?;
                Ok((0.0, Bound::Unbounded))
            }
            Family::Beta(p) => {
                let (lo, hi) = boundary_positions(p, t)?;
                Ok((lo, Bound::Finite(hi)))
            }
        }
    }

    /// Similarity-space interval holding all but `tail` of the mass.
    pub fn truncated_similarity_domain(&self, tail: f64) -> (f64, f64) {
        match self {
            Family::Gamma(p) => (0.0, p.similarity_cutoff(tail)),
            Family::Beta(p) => (p.z1, p.z2),
        }
    }

    /// The density sampled on `n` evenly spaced points across the (truncated)
    /// support, endpoints included.
    pub fn sample_field(&self, t: f64, n: usize) -> Result<DensityField> {
        let (zlo, zhi) = self.truncated_similarity_domain(1e-10);
        let ta = t.powf(self.alpha());
        let (lo, hi) = if ta > 0.0 && zlo * ta <= zhi * ta { (zlo * ta, zhi * ta) } else { (zhi * ta, zlo * ta) };
        let xs = DensityField::linspace(lo, hi, n);
        let ws = xs.iter().map(|&x| self.density(x, t)).collect::<Result<Vec<_>>>()?;
        DensityField::new(t, xs, ws, lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::{FnProfile, Polynomial, SimilarityDomain};
    use std::sync::Arc;

    fn gamma_problem(mu1: f64, mu2: f64, mu3: f64, alpha: f64) -> SimilarityProblem {
        SimilarityProblem::new(
            Arc::new(Polynomial::linear(mu1, mu2)),
            Arc::new(Polynomial::linear(mu3, 0.0)),
            alpha,
            SimilarityDomain::new(Bound::Finite(0.0), Bound::Unbounded).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn f_for_gamma_profiles() {
        let (mu1, mu2, mu3, alpha) = (-3.0, 0.75, 0.5, -2.0);
        let p = gamma_problem(mu1, mu2, mu3, alpha);
        for z in [0.1, 1.0, 3.7] {
            let expected = ((mu1 - alpha) * z + mu2 - mu3) / (mu3 * z);
            assert!((f_from_profiles(&p, z).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn f_for_beta_vanishes_at_mode() {
        let fam = BetaFamilyParams::new(1.0, 4.0, 1.0 / 3.0, 0.5, -2.0).unwrap();
        let f = f_from_profiles(&fam.similarity_problem(), 2.2).unwrap();
        assert!(f.abs() < 1e-14, "{f}");
    }

    #[test]
    fn f_is_zero_when_drift_balances() {
        let alpha = 0.7;
        let rho2 = Polynomial::new(vec![1.0, 0.0, 0.5]);
        // ρ1 = αz + ρ2'(z) = αz + z
        let rho1 = Polynomial::linear(alpha + 1.0, 0.0);
        let p = SimilarityProblem::new(
            Arc::new(rho1),
            Arc::new(rho2),
            alpha,
            SimilarityDomain::finite(-2.0, 2.0).unwrap(),
        )
        .unwrap();
        for z in [-1.5, 0.0, 0.3, 1.9] {
            assert!(f_from_profiles(&p, z).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn f_reports_singular_diffusion() {
        let p = SimilarityProblem::new(
            Arc::new(Polynomial::linear(1.0, 0.0)),
            Arc::new(Polynomial::linear(1.0, -1.0)),
            1.0,
            SimilarityDomain::finite(0.0, 2.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(f_from_profiles(&p, 1.0), Err(Error::Singularity { .. })));
        assert!(matches!(f_from_profiles(&p, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn residuals_vanish_for_zero_function() {
        let p = gamma_problem(-3.0, 0.5, 0.5, -2.0);
        assert_eq!(reduced_ode_residual(&p, 0.0, 0.0, 0.0, 1.3), 0.0);
        assert_eq!(first_integral_residual(&p, 0.0, 0.0, 1.3), 0.0);
    }

    #[test]
    fn analytic_profiles_satisfy_first_integral_and_ode() {
        let families = [
            Family::Gamma(GammaFamilyParams::new(-3.0, 0.5, 0.5, -2.0).unwrap()),
            Family::Gamma(GammaFamilyParams::new(0.2, 2.6, 0.8, 1.5).unwrap()),
            Family::Beta(BetaFamilyParams::new(1.0, 4.0, 1.0 / 3.0, 0.5, -2.0).unwrap()),
            Family::Beta(BetaFamilyParams::new(-2.0, 0.5, 2.5, 0.7, 0.8).unwrap()),
        ];
        for fam in families {
            let p = fam.similarity_problem();
            let (lo, hi) = fam.truncated_similarity_domain(1e-6);
            for k in 1..32 {
                let z = lo + (hi - lo) * k as f64 / 32.0;
                let (y, dy, d2y) = fam.profile_jet(z);
                let c = first_integral_residual(&p, y, dy, z);
                let scale = (p.rho2.value(z) * dy).abs().max(y.abs());
                assert!(c.abs() <= 1e-12 * scale.max(1e-300), "{fam:?} z={z} C={c}");
                let r = reduced_ode_residual(&p, y, dy, d2y, z);
                let scale2 = (p.rho2.value(z) * d2y).abs().max(dy.abs()).max(y.abs());
                assert!(r.abs() <= 1e-10 * scale2.max(1e-300), "{fam:?} z={z} r={r}");
            }
        }
    }

    #[test]
    fn solve_profile_matches_exponential_gamma() {
        let params = GammaFamilyParams::new(-3.0, 0.5, 0.5, -2.0).unwrap();
        let sol = solve_profile(&params.similarity_problem(), 4000).unwrap();
        for z in [0.5, 1.0, 2.0] {
            let exact = gamma_family_density(&params, z, 1.0).unwrap();
            let got = sol.y(z).unwrap();
            assert!((got - exact).abs() <= 1e-6 * exact, "z={z}: {got} vs {exact}");
        }
    }

    #[test]
    fn solve_profile_normalizes_beta() {
        let params = BetaFamilyParams::new(1.0, 4.0, 1.0 / 3.0, 0.5, -2.0).unwrap();
        let sol = solve_profile(&params.similarity_problem(), 4000).unwrap();
        assert!((sol.total_mass().unwrap() - 1.0).abs() < 1e-8);
        let a = beta_normalization_constant(&params).unwrap();
        assert!((sol.y(2.2).unwrap() - params.profile(2.2)).abs() < 1e-8 * a);
        assert!((sol.density(1.0, 1.4).unwrap() - beta_family_density(&params, 1.0, 1.4).unwrap()).abs() < 1e-7);
        assert_eq!(sol.density(3.0, 1.4).unwrap(), 0.0);
    }

    #[test]
    fn shallow_walls_away_from_origin_still_normalize() {
        // small exponents push the mass integral right up to walls at z != 0
        let params = BetaFamilyParams::new(-1.7884, -0.3711, 0.1645, 0.2150, 1.46).unwrap();
        let sol = solve_profile(&params.similarity_problem(), 4000).unwrap();
        assert!((sol.total_mass().unwrap() - 1.0).abs() < 1e-8);
        for z in [-1.6, -1.0, -0.5] {
            assert!((sol.y(z).unwrap() / params.profile(z) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn integrable_but_excluded_gamma_still_normalizes() {
        // κ = 1/2: integrable, though outside the κ ≥ 1 family constraint
        let sol = solve_profile(&gamma_problem(-3.0, 0.25, 0.5, -2.0), 4000).unwrap();
        assert!((sol.total_mass().unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn nonpositive_shape_is_not_normalizable() {
        for mu2 in [0.0, -0.5] {
            let res = solve_profile(&gamma_problem(-3.0, mu2, 0.5, -2.0), 4000);
            assert!(matches!(res, Err(Error::NonNormalizable(_))), "mu2={mu2}: {res:?}");
        }
    }

    #[test]
    fn growing_tail_is_not_normalizable() {
        // (α - μ1)/μ3 < 0: y grows like e^{+z}
        let res = solve_profile(&gamma_problem(-1.5, 0.5, 0.5, -2.0), 4000);
        assert!(matches!(res, Err(Error::NonNormalizable(_))), "{res:?}");
    }

    #[test]
    fn callback_profiles_use_finite_differences() {
        // Same beta problem, but ρ2 supplied as a bare closure.
        let fam = BetaFamilyParams::new(0.0, 1.0, 1.0, 1.0, 0.5).unwrap();
        let exact = fam.similarity_problem();
        let p = SimilarityProblem::new(
            exact.rho1.clone(),
            Arc::new(FnProfile(|z: f64| z * (1.0 - z))),
            0.5,
            exact.domain,
        )
        .unwrap();
        let sol = solve_profile(&p, 4000).unwrap();
        for z in [0.2, 0.5, 0.8] {
            // y = A z (1 - z) with A = 1 / B(2, 2) = 6
            let expected = 6.0 * z * (1.0 - z);
            assert!((sol.y(z).unwrap() - expected).abs() < 1e-6, "z={z}");
        }
    }
}
