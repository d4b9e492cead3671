//! Face fluxes and the semi-discrete operator on a uniform cell grid.
//!
//! Every interior face carries a flux `J = p V_left - q V_right` with
//! `p, q ≥ 0`, so the operator has non-negative off-diagonals and zero
//! column sums: conservation and positivity hold by construction. The two
//! walls carry no flux at all.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance, GAUSS_LEGENDRE_4};

use super::Scheme;

/// Diffusion below this at a quadrature node switches the face to upwinding.
const DEGENERATE_D: f64 = 1e-300;

/// Coefficients of an advection-diffusion equation
/// `∂τ V = -∂ξ(a V) + ∂ξ²(d V)` in whatever frame the solver works in.
pub(crate) trait Transport {
    /// `(a, d, ∂d/∂ξ)` at `(ξ, τ)`.
    fn coefficients(&self, xi: f64, tau: f64) -> (f64, f64, f64);

    /// True when the coefficients do not depend on `τ`.
    fn autonomous(&self) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Grid {
    pub lo: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Grid { lo, n, h: (hi - lo) / n as f64 }
    }

    pub fn centre(&self, i: usize) -> f64 {
        self.lo + self.h * (i as f64 + 0.5)
    }

    pub fn face(&self, i: usize) -> f64 {
        self.lo + self.h * i as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.centre(i)).collect()
    }
}

/// Flux weights of the `n - 1` interior faces at one time level.
#[derive(Debug, Clone)]
pub(crate) struct FaceWeights {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub max_d: f64,
    pub max_a: f64,
}

/// `B(x) = x / (e^x - 1)`.
pub(crate) fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - 0.5 * x
    } else {
        x / x.exp_m1()
    }
}

/// Builds the face weights at time `τ`.
///
/// Crank-Nicolson faces use Scharfetter-Gummel (Chang-Cooper) weights with
/// the Péclet integral `Φ = ∫ (a - ∂ξd) / d dξ` between the neighbouring
/// centres; `accurate` replaces the four-point Gauss rule for `Φ` by an
/// adaptive one (worth it when the operator is assembled only once).
/// Explicit faces use plain upwinding of the effective drift.
pub(crate) fn assemble<T: Transport + ?Sized>(
    tr: &T,
    grid: &Grid,
    tau: f64,
    scheme: Scheme,
    accurate: bool,
) -> Result<FaceWeights> {
    let n = grid.n;
    let h = grid.h;
    let mut p = Vec::with_capacity(n.saturating_sub(1));
    let mut q = Vec::with_capacity(n.saturating_sub(1));
    let mut max_d: f64 = 0.0;
    let mut max_a: f64 = 0.0;

    let check = |xi: f64, a: f64, d: f64, dd: f64| -> Result<()> {
        if d < 0.0 {
            return Err(Error::Parameter(format!(
                "negative diffusion {d:e} at position {xi}, time variable {tau}"
            )));
        }
        if !(a.is_finite() && d.is_finite() && dd.is_finite()) {
            return Err(Error::InvalidState(format!(
                "non-finite coefficients at position {xi}, time variable {tau}"
            )));
        }
        Ok(())
    };

    for k in 0..n.saturating_sub(1) {
        let (xl, xr, xf) = (grid.centre(k), grid.centre(k + 1), grid.face(k + 1));
        let (af, df, ddf) = tr.coefficients(xf, tau);
        check(xf, af, df, ddf)?;
        max_d = max_d.max(df);
        max_a = max_a.max(af.abs());
        let eff = af - ddf;
        let upwind = (eff.max(0.0) + df / h, (-eff).max(0.0) + df / h);

        let (pk, qk) = match scheme {
            Scheme::ExplicitUpwind => upwind,
            Scheme::CrankNicolson => {
                let mid = 0.5 * (xl + xr);
                let half = 0.5 * (xr - xl);
                let mut phi = 0.0;
                let mut degenerate = df <= DEGENERATE_D;
                for &(node, w) in GAUSS_LEGENDRE_4.iter() {
                    let xi = mid + half * node;
                    let (a, d, dd) = tr.coefficients(xi, tau);
                    check(xi, a, d, dd)?;
                    max_d = max_d.max(d);
                    max_a = max_a.max(a.abs());
                    if d <= DEGENERATE_D {
                        degenerate = true;
                    } else {
                        phi += w * (a - dd) / d;
                    }
                }
                phi *= half;
                if degenerate {
                    upwind
                } else {
                    if accurate {
                        let fine = integrate(
                            |xi| {
                                let (a, d, dd) = tr.coefficients(xi, tau);
                                (a - dd) / d
                            },
                            xl,
                            xr,
                            Tolerance::new(1e-14, 1e-12),
                        );
                        if let Ok(est) = fine {
                            phi = est.value;
                        }
                    }
                    (df / h * bernoulli(-phi), df / h * bernoulli(phi))
                }
            }
        };
        p.push(pk);
        q.push(qk);
    }
    Ok(FaceWeights { p, q, max_d, max_a })
}

/// `out = L v`, the discrete `-∂ξ J`.
pub(crate) fn apply(w: &FaceWeights, h: f64, v: &[f64], out: &mut [f64]) {
    let n = v.len();
    out.iter_mut().for_each(|o| *o = 0.0);
    for k in 0..n.saturating_sub(1) {
        let flux = w.p[k] * v[k] - w.q[k] * v[k + 1];
        out[k] -= flux / h;
        out[k + 1] += flux / h;
    }
}

/// Bands of `I - c L` for the implicit half of a θ-step.
pub(crate) fn implicit_bands(w: &FaceWeights, h: f64, c: f64, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut lower = vec![0.0; n];
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let s = c / h;
    for k in 0..n.saturating_sub(1) {
        // face k couples cells k and k+1
        diag[k] += s * w.p[k];
        upper[k] -= s * w.q[k];
        lower[k + 1] -= s * w.p[k];
        diag[k + 1] += s * w.q[k];
    }
    (lower, diag, upper)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(f64, f64);
    impl Transport for Constant {
        fn coefficients(&self, _: f64, _: f64) -> (f64, f64, f64) {
            (self.0, self.1, 0.0)
        }
        fn autonomous(&self) -> bool {
            true
        }
    }

    #[test]
    fn bernoulli_limits() {
        assert_eq!(bernoulli(0.0), 1.0);
        assert!((bernoulli(1e-9) - (1.0 - 5e-10)).abs() < 1e-15);
        assert!((bernoulli(1.0) - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!(bernoulli(800.0) == 0.0);
        assert!((bernoulli(-800.0) - 800.0).abs() < 1e-12);
    }

    #[test]
    fn columns_sum_to_zero() {
        let grid = Grid::new(0.0, 1.0, 8);
        for scheme in [Scheme::CrankNicolson, Scheme::ExplicitUpwind] {
            let w = assemble(&Constant(0.7, 0.05), &grid, 0.0, scheme, false).unwrap();
            for j in 0..8 {
                let mut e = vec![0.0; 8];
                e[j] = 1.0;
                let mut out = vec![0.0; 8];
                apply(&w, grid.h, &e, &mut out);
                assert!(out.iter().sum::<f64>().abs() < 1e-13);
                assert!(out.iter().enumerate().all(|(i, &o)| i == j || o >= 0.0));
            }
        }
    }

    #[test]
    fn exponential_is_a_discrete_equilibrium() {
        // a = 1, d = 0.5: zero-flux profile e^{2ξ}
        let grid = Grid::new(0.0, 1.0, 16);
        let w = assemble(&Constant(1.0, 0.5), &grid, 0.0, Scheme::CrankNicolson, true).unwrap();
        let v: Vec<f64> = grid.centres().iter().map(|x| (2.0 * x).exp()).collect();
        let mut out = vec![0.0; 16];
        apply(&w, grid.h, &v, &mut out);
        assert!(out.iter().all(|o| o.abs() < 1e-12), "{out:?}");
    }

    #[test]
    fn negative_diffusion_is_rejected() {
        let grid = Grid::new(0.0, 1.0, 4);
        let res = assemble(&Constant(0.0, -1.0), &grid, 0.0, Scheme::CrankNicolson, false);
        assert!(matches!(res, Err(Error::Parameter(_))));
    }
}
