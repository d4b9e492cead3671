//! Scale transformation of the Fokker-Planck equation.
//!
//! Under `x → ε^a x`, `t → ε^b t` with `W → ε^c W`, `D1 → ε^d D1` and
//! `D2 → ε^e D2` the equation keeps its form iff `b = a - d = 2a - e`.
//! Normalization of `W` for all `t` further forces `c = -a`, which leaves
//!
//! ```text
//! z  = x / t^α,          α = a / b
//! W  = t^(-α)    y(z)
//! D1 = t^(α-1)   ρ1(z)
//! D2 = t^(2α-1)  ρ2(z)
//! ```

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Absolute tolerance for the index relations.
pub const INDEX_TOLERANCE: f64 = 1e-12;

/// Exponents of the scale transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingIndices {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl ScalingIndices {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<Self> {
        if a == 0.0 || b == 0.0 {
            return Err(Error::Parameter(format!(
                "scaling exponents a and b must be nonzero (a = {a}, b = {b})"
            )));
        }
        if ![a, b, c, d, e].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("scaling exponents must be finite".into()));
        }
        Ok(ScalingIndices { a, b, c, d, e })
    }

    /// The consistent, normalizable indices for given `a` and `b`:
    /// `c = -a`, `d = a - b`, `e = 2a - b`.
    pub fn similarity(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, -a, a - b, 2.0 * a - b)
    }

    pub fn alpha(&self) -> f64 {
        self.a / self.b
    }

    pub fn consistent(&self) -> bool {
        check_scaling_consistency(self)
    }

    pub fn normalizable(&self) -> bool {
        (self.c + self.a).abs() <= INDEX_TOLERANCE
    }

    /// `(ε^a x, ε^b t)`.
    pub fn transform(&self, eps: f64, x: f64, t: f64) -> (f64, f64) {
        (eps.powf(self.a) * x, eps.powf(self.b) * t)
    }
}

/// True iff `b = a - d` and `b = 2a - e` to within [`INDEX_TOLERANCE`].
pub fn check_scaling_consistency(idx: &ScalingIndices) -> bool {
    (idx.b - (idx.a - idx.d)).abs() <= INDEX_TOLERANCE
        && (idx.b - (2.0 * idx.a - idx.e)).abs() <= INDEX_TOLERANCE
}

fn require_positive_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be strictly positive, got {t}")))
    }
}

/// `z = x / t^α`.
pub fn similarity_variable(x: f64, t: f64, alpha: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(x / t.powf(alpha))
}

/// `W = t^(-α) y(z)`.
pub fn density_from_profile(y_at_z: f64, t: f64, alpha: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok(t.powf(-alpha) * y_at_z)
}

/// One end of an interval. Infinite ends are explicit rather than IEEE
/// infinities so configs and CSV headers stay unambiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Unbounded,
}

impl Bound {
    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }
}

/// Similarity-space interval `[lo, hi]`; `lo` is read as -∞ and `hi` as +∞
/// when unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityDomain {
    pub lo: Bound,
    pub hi: Bound,
}

impl SimilarityDomain {
    pub fn new(lo: Bound, hi: Bound) -> Result<Self> {
        if let (Bound::Finite(l), Bound::Finite(h)) = (lo, hi) {
            if !(l < h) {
                return Err(Error::Parameter(format!(
                    "similarity domain requires lo < hi, got [{l}, {h}]"
                )));
            }
        }
        for v in [lo, hi].iter().filter_map(|b| b.finite()) {
            if !v.is_finite() {
                return Err(Error::Parameter(
                    "use Bound::Unbounded for infinite endpoints".into(),
                ));
            }
        }
        Ok(SimilarityDomain { lo, hi })
    }

    pub fn finite(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Bound::Finite(lo), Bound::Finite(hi))
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.finite().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.finite().unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, z: f64) -> bool {
        let slack = INDEX_TOLERANCE * z.abs().max(1.0);
        z >= self.lo_f64() - slack && z <= self.hi_f64() + slack
    }

    pub fn contains_interior(&self, z: f64) -> bool {
        z > self.lo_f64() && z < self.hi_f64()
    }

    /// Interior reference point: the midpoint of a finite interval, `1` for
    /// `[lo, ∞)` (shifted to `lo + 1` when `lo ≠ 0`), `-1` for `(-∞, hi]`,
    /// and `0` for the whole line.
    pub fn anchor(&self) -> f64 {
        match (self.lo, self.hi) {
            (Bound::Finite(l), Bound::Finite(h)) => 0.5 * (l + h),
            (Bound::Finite(l), Bound::Unbounded) => l + 1.0,
            (Bound::Unbounded, Bound::Finite(h)) => h - 1.0,
            (Bound::Unbounded, Bound::Unbounded) => 0.0,
        }
    }
}

/// A scale-invariant profile ρ(z) with first and second derivatives.
///
/// The default derivatives are central differences with step
/// `h = max(1e-6, 1e-6 |z|)`; built-in profiles override them analytically.
pub trait Profile: Send + Sync + fmt::Debug {
    fn value(&self, z: f64) -> f64;

    fn derivative(&self, z: f64) -> f64 {
        let h = fd_step(z);
        (self.value(z + h) - self.value(z - h)) / (2.0 * h)
    }

    fn second_derivative(&self, z: f64) -> f64 {
        let h = fd_step(z);
        (self.value(z + h) - 2.0 * self.value(z) + self.value(z - h)) / (h * h)
    }
}

pub(crate) fn fd_step(z: f64) -> f64 {
    1e-6_f64.max(1e-6 * z.abs())
}

/// Polynomial `Σ c_k z^k`, optionally restricted to a closed support outside
/// of which it and its derivatives are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
    support: Option<(f64, f64)>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Polynomial { coeffs, support: None }
    }

    /// `slope * z + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self::new(vec![intercept, slope])
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    fn outside(&self, z: f64) -> bool {
        matches!(self.support, Some((lo, hi)) if z < lo || z > hi)
    }

    fn horner(coeffs: &[f64], z: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }
}

impl Profile for Polynomial {
    fn value(&self, z: f64) -> f64 {
        if self.outside(z) {
            return 0.0;
        }
        Self::horner(&self.coeffs, z)
    }

    fn derivative(&self, z: f64) -> f64 {
        if self.outside(z) || self.coeffs.len() < 2 {
            return 0.0;
        }
        let d: Vec<f64> = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
        Self::horner(&d, z)
    }

    fn second_derivative(&self, z: f64) -> f64 {
        if self.outside(z) || self.coeffs.len() < 3 {
            return 0.0;
        }
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, c)| (k * (k - 1)) as f64 * c)
            .collect();
        Self::horner(&d, z)
    }
}

/// A user-supplied profile; derivatives come from finite differences.
pub struct FnProfile<F>(pub F);

impl<F> fmt::Debug for FnProfile<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnProfile(..)")
    }
}

impl<F: Fn(f64) -> f64 + Send + Sync> Profile for FnProfile<F> {
    fn value(&self, z: f64) -> f64 {
        (self.0)(z)
    }
}

/// Drift and diffusion coefficients `D1(x, t)`, `D2(x, t)` of the FPE.
pub trait Coefficients: Send + Sync {
    fn drift(&self, x: f64, t: f64) -> f64;

    fn diffusion(&self, x: f64, t: f64) -> f64;

    /// ∂D2/∂x; central difference unless overridden.
    fn diffusion_dx(&self, x: f64, t: f64) -> f64 {
        let h = fd_step(x);
        (self.diffusion(x + h, t) - self.diffusion(x - h, t)) / (2.0 * h)
    }

    /// `(D1, D2)` together; override when the two share work.
    fn drift_diffusion(&self, x: f64, t: f64) -> (f64, f64) {
        (self.drift(x, t), self.diffusion(x, t))
    }

    /// The similarity structure behind these coefficients, if they have one.
    /// Solvers use it to skip re-assembly when the transformed operator is
    /// time independent.
    fn similarity_form(&self) -> Option<&SimilarityProblem> {
        None
    }
}

/// Coefficients given as closures of `(x, t)`.
pub struct FnCoefficients<F1, F2> {
    pub drift: F1,
    pub diffusion: F2,
}

impl<F1, F2> Coefficients for FnCoefficients<F1, F2>
where
    F1: Fn(f64, f64) -> f64 + Send + Sync,
    F2: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn drift(&self, x: f64, t: f64) -> f64 {
        (self.drift)(x, t)
    }

    fn diffusion(&self, x: f64, t: f64) -> f64 {
        (self.diffusion)(x, t)
    }
}

/// Scale-invariant drift and diffusion profiles on a similarity domain.
#[derive(Clone)]
pub struct SimilarityProblem {
    pub rho1: Arc<dyn Profile>,
    pub rho2: Arc<dyn Profile>,
    pub alpha: f64,
    pub domain: SimilarityDomain,
}

impl fmt::Debug for SimilarityProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimilarityProblem")
            .field("rho1", &self.rho1)
            .field("rho2", &self.rho2)
            .field("alpha", &self.alpha)
            .field("domain", &self.domain)
            .finish()
    }
}

impl SimilarityProblem {
    pub fn new(
        rho1: Arc<dyn Profile>,
        rho2: Arc<dyn Profile>,
        alpha: f64,
        domain: SimilarityDomain,
    ) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Parameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(SimilarityProblem { rho1, rho2, alpha, domain })
    }

    /// Physical position of the similarity point `z` at time `t`.
    pub fn position(&self, z: f64, t: f64) -> f64 {
        z * t.powf(self.alpha)
    }
}

/// `(D1, D2) = (t^(α-1) ρ1(z), t^(2α-1) ρ2(z))` with `z = x / t^α`.
pub fn coefficients_at(problem: &SimilarityProblem, x: f64, t: f64) -> Result<(f64, f64)> {
    let z = similarity_variable(x, t, problem.alpha)?;
    if !problem.domain.contains(z) {
        return Err(Error::Domain(format!(
            "z = {z} lies outside the similarity domain [{}, {}]",
            problem.domain.lo_f64(),
            problem.domain.hi_f64()
        )));
    }
    let alpha = problem.alpha;
    Ok((
        t.powf(alpha - 1.0) * problem.rho1.value(z),
        t.powf(2.0 * alpha - 1.0) * problem.rho2.value(z),
    ))
}

impl Coefficients for SimilarityProblem {
    fn drift(&self, x: f64, t: f64) -> f64 {
        let ta = t.powf(self.alpha);
        ta / t * self.rho1.value(x / ta)
    }

    fn diffusion(&self, x: f64, t: f64) -> f64 {
        let ta = t.powf(self.alpha);
        ta * ta / t * self.rho2.value(x / ta)
    }

    fn diffusion_dx(&self, x: f64, t: f64) -> f64 {
        let ta = t.powf(self.alpha);
        ta / t * self.rho2.derivative(x / ta)
    }

    fn drift_diffusion(&self, x: f64, t: f64) -> (f64, f64) {
        let ta = t.powf(self.alpha);
        let z = x / ta;
        let f = ta / t;
        (f * self.rho1.value(z), ta * f * self.rho2.value(z))
    }

    fn similarity_form(&self) -> Option<&SimilarityProblem> {
        Some(self)
    }
}
