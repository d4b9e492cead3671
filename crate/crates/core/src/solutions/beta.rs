//! Moving-boundary family on `z1 ≤ z ≤ z2`.
//!
//! With `f(z) = a1/(z - z1) - a2/(z2 - z)` the profiles are
//!
//! ```text
//! ρ2(z) = (z - z1)(z2 - z)
//! ρ1(z) = (α - a1 - a2 - 2) z + (a1 + 1) z2 + (a2 + 1) z1
//! y(z)  = A (z - z1)^a1 (z2 - z)^a2,   A = [(z2 - z1)^(a1+a2+1) B(a1+1, a2+1)]^-1
//! ```
//!
//! and both profiles vanish outside `[z1, z2]`. In physical space the walls
//! sit at `x_k(t) = z_k t^α`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scaling::{Polynomial, Profile, SimilarityDomain, SimilarityProblem};
use crate::special::ln_beta;

/// `ρ2 = (z - z1)(z2 - z)` on `[z1, z2]`, kept in factored form so that it
/// stays accurate next to the walls (the expanded quadratic cancels there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallDiffusion {
    pub z1: f64,
    pub z2: f64,
}

impl Profile for WallDiffusion {
    fn value(&self, z: f64) -> f64 {
        if z < self.z1 || z > self.z2 {
            return 0.0;
        }
        (z - self.z1) * (self.z2 - z)
    }

    fn derivative(&self, z: f64) -> f64 {
        if z < self.z1 || z > self.z2 {
            return 0.0;
        }
        (self.z2 - z) - (z - self.z1)
    }

    fn second_derivative(&self, z: f64) -> f64 {
        if z < self.z1 || z > self.z2 {
            return 0.0;
        }
        -2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaFamilyParams {
    pub z1: f64,
    pub z2: f64,
    pub a1: f64,
    pub a2: f64,
    pub alpha: f64,
}

/// Position of the similarity interval relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaSubclass {
    /// (i) both walls on the same side of the origin; both move.
    SameSide { mirrored: bool },
    /// (ii) one wall pinned at the origin, a fixed point of the scaling.
    PinnedAtOrigin { mirrored: bool },
    /// (iii) the interval straddles the origin.
    Straddling,
}

impl BetaFamilyParams {
    pub fn new(z1: f64, z2: f64, a1: f64, a2: f64, alpha: f64) -> Result<Self> {
        if ![z1, z2, a1, a2, alpha].iter().all(|v| v.is_finite()) {
            return Err(Error::Parameter("parameters must be finite".into()));
        }
        if !(z1 < z2) {
            return Err(Error::Parameter(format!("need z1 < z2, got z1 = {z1}, z2 = {z2}")));
        }
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::Parameter(format!("need a1, a2 > 0, got a1 = {a1}, a2 = {a2}")));
        }
        Ok(BetaFamilyParams { z1, z2, a1, a2, alpha })
    }

    pub fn subclass(&self) -> BetaSubclass {
        if self.z1 == 0.0 {
            BetaSubclass::PinnedAtOrigin { mirrored: false }
        } else if self.z2 == 0.0 {
            BetaSubclass::PinnedAtOrigin { mirrored: true }
        } else if self.z1 > 0.0 {
            BetaSubclass::SameSide { mirrored: false }
        } else if self.z2 < 0.0 {
            BetaSubclass::SameSide { mirrored: true }
        } else {
            BetaSubclass::Straddling
        }
    }

    pub fn rho1(&self) -> Polynomial {
        let slope = self.alpha - self.a1 - self.a2 - 2.0;
        let intercept = (self.a1 + 1.0) * self.z2 + (self.a2 + 1.0) * self.z1;
        Polynomial::linear(slope, intercept).with_support(self.z1, self.z2)
    }

    pub fn rho2(&self) -> WallDiffusion {
        WallDiffusion { z1: self.z1, z2: self.z2 }
    }

    pub fn similarity_problem(&self) -> SimilarityProblem {
        SimilarityProblem {
            rho1: Arc::new(self.rho1()),
            rho2: Arc::new(self.rho2()),
            alpha: self.alpha,
            domain: SimilarityDomain::finite(self.z1, self.z2).expect("z1 < z2 by construction"),
        }
    }

    /// ln A.
    pub fn ln_normalization(&self) -> f64 {
        let span = self.z2 - self.z1;
        -((self.a1 + self.a2 + 1.0) * span.ln()
            + ln_beta(self.a1 + 1.0, self.a2 + 1.0).expect("a1, a2 > 0"))
    }

    /// Maximum of the profile, `(a1 z2 + a2 z1) / (a1 + a2)`.
    pub fn mode(&self) -> f64 {
        (self.a1 * self.z2 + self.a2 * self.z1) / (self.a1 + self.a2)
    }

    /// `y(z)`; zero on and outside the walls.
    pub fn profile(&self, z: f64) -> f64 {
        if z <= self.z1 || z >= self.z2 {
            return 0.0;
        }
        (self.ln_normalization() + self.a1 * (z - self.z1).ln() + self.a2 * (self.z2 - z).ln()).exp()
    }

    /// `(y, y', y'')` for `z1 < z < z2`.
    pub fn profile_jet(&self, z: f64) -> (f64, f64, f64) {
        let y = self.profile(z);
        let (l, r) = (z - self.z1, self.z2 - z);
        let g = self.a1 / l - self.a2 / r;
        let dg = -self.a1 / (l * l) - self.a2 / (r * r);
        (y, y * g, y * (g * g + dg))
    }
}

/// `A = [(z2 - z1)^(a1+a2+1) B(a1+1, a2+1)]^-1`, via log-gamma.
pub fn beta_normalization_constant(p: &BetaFamilyParams) -> Result<f64> {
    let p = BetaFamilyParams::new(p.z1, p.z2, p.a1, p.a2, p.alpha)?;
    Ok(p.ln_normalization().exp())
}

/// Physical wall positions `(z1 t^α, z2 t^α)`.
pub fn boundary_positions(p: &BetaFamilyParams, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be strictly positive, got {t}")));
    }
    let ta = t.powf(p.alpha);
    Ok((p.z1 * ta, p.z2 * ta))
}

/// `W(x, t) = t^(-α) y(x / t^α)` inside the walls, zero elsewhere
/// (including exactly on a wall).
pub fn beta_family_density(p: &BetaFamilyParams, x: f64, t: f64) -> Result<f64> {
    let (x1, x2) = boundary_positions(p, t)?;
    if x <= x1 || x >= x2 {
        return Ok(0.0);
    }
    let ta = t.powf(p.alpha);
    let z = x / ta;
    let ln_y = p.ln_normalization() + p.a1 * (z - p.z1).max(0.0).ln() + p.a2 * (p.z2 - z).max(0.0).ln();
    Ok((ln_y - ta.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, Tolerance};

    fn fig2() -> BetaFamilyParams {
        BetaFamilyParams::new(1.0, 4.0, 1.0 / 3.0, 0.5, -2.0).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let unit = BetaFamilyParams::new(0.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((beta_normalization_constant(&unit).unwrap() - 6.0).abs() < 1e-13);
        // [3^{11/6} B(4/3, 3/2)]^{-1}, B from an mpmath quadrature
        let a = beta_normalization_constant(&fig2()).unwrap();
        assert!((a - 0.290_779_284_605_617_543_4).abs() < 1e-14, "{a}");
    }

    #[test]
    fn normalization_oracle_by_quadrature() {
        let p = fig2();
        let a = beta_normalization_constant(&p).unwrap();
        let b = integrate(
            |u| u.powf(1.0 / 3.0) * (1.0 - u).sqrt(),
            0.0,
            1.0,
            Tolerance::new(1e-14, 1e-13),
        )
        .unwrap()
        .value;
        let expected = 1.0 / (3f64.powf(11.0 / 6.0) * b);
        assert!((a - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn profile_integrates_to_one() {
        for p in [fig2(), BetaFamilyParams::new(-2.0, 0.5, 2.5, 0.7, 0.8).unwrap()] {
            let mass = integrate(|z| p.profile(z), p.z1, p.z2, Tolerance::default()).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-9, "{mass}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(BetaFamilyParams::new(4.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(BetaFamilyParams::new(1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(BetaFamilyParams::new(1.0, 4.0, 0.0, 1.0, 1.0).is_err());
        assert!(BetaFamilyParams::new(1.0, 4.0, 1.0, -1.0, 1.0).is_err());
        let raw = BetaFamilyParams { z1: 2.0, z2: 1.0, a1: 1.0, a2: 1.0, alpha: 1.0 };
        assert!(matches!(beta_normalization_constant(&raw), Err(Error::Parameter(_))));
    }

    #[test]
    fn subclasses() {
        let mk = |z1, z2| BetaFamilyParams::new(z1, z2, 1.0, 1.0, 1.0).unwrap().subclass();
        assert_eq!(mk(1.0, 4.0), BetaSubclass::SameSide { mirrored: false });
        assert_eq!(mk(-4.0, -1.0), BetaSubclass::SameSide { mirrored: true });
        assert_eq!(mk(0.0, 2.0), BetaSubclass::PinnedAtOrigin { mirrored: false });
        assert_eq!(mk(-2.0, 0.0), BetaSubclass::PinnedAtOrigin { mirrored: true });
        assert_eq!(mk(-1.0, 2.0), BetaSubclass::Straddling);
    }

    #[test]
    fn walls_and_support() {
        let p = fig2();
        assert_eq!(boundary_positions(&p, 1.0).unwrap(), (1.0, 4.0));
        let (x1, x2) = boundary_positions(&p, 1.4).unwrap();
        assert!((x1 - 1.0 / 1.96).abs() < 1e-15 && (x2 - 4.0 / 1.96).abs() < 1e-15);
        assert_eq!(beta_family_density(&p, x1, 1.4).unwrap(), 0.0);
        assert_eq!(beta_family_density(&p, x2, 1.4).unwrap(), 0.0);
        assert_eq!(beta_family_density(&p, 0.3, 1.4).unwrap(), 0.0);
        assert_eq!(beta_family_density(&p, 2.1, 1.4).unwrap(), 0.0);
        assert!(beta_family_density(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn walls_approach_origin_for_negative_alpha() {
        let p = fig2();
        let mut last = boundary_positions(&p, 0.5).unwrap();
        for k in 1..20 {
            let t = 0.5 + 0.1 * k as f64;
            let now = boundary_positions(&p, t).unwrap();
            assert!(now.0.abs() < last.0.abs() && now.1.abs() < last.1.abs());
            last = now;
        }
        // pinned wall stays put, the other recedes for α > 0
        let q = BetaFamilyParams::new(0.0, 2.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(boundary_positions(&q, 3.0).unwrap().0, 0.0);
        assert!(boundary_positions(&q, 3.0).unwrap().1 > boundary_positions(&q, 2.0).unwrap().1);
    }

    #[test]
    fn mode_of_figure_parameters() {
        let p = fig2();
        assert!((p.mode() - 2.2).abs() < 1e-15);
        let (_, dy, _) = p.profile_jet(2.2);
        assert!(dy.abs() < 1e-14);
        // at t = 1.4 the mode sits at 2.2 / 1.96
        let x = 2.2 / 1.96;
        let w = beta_family_density(&p, x, 1.4).unwrap();
        assert!(w > beta_family_density(&p, x - 1e-3, 1.4).unwrap());
        assert!(w > beta_family_density(&p, x + 1e-3, 1.4).unwrap());
    }

    #[test]
    fn moving_density_keeps_unit_mass() {
        let p = fig2();
        for t in [1.0, 1.2, 1.4] {
            let (x1, x2) = boundary_positions(&p, t).unwrap();
            let mass = integrate(|x| beta_family_density(&p, x, t).unwrap(), x1, x2, Tolerance::default())
                .unwrap()
                .value;
            assert!((mass - 1.0).abs() < 1e-9, "t={t}: {mass}");
        }
    }
}
