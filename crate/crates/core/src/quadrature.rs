//! Adaptive Gauss-Kronrod quadrature.
//!
//! The 15-point Kronrod extension of the 7-point Gauss rule is applied on
//! each subinterval; the interval with the largest error estimate is bisected
//! until the global estimate drops below `max(abs, rel * |I|)`. Error
//! estimates follow QUADPACK's `qk15` rescaling. Half-lines are mapped onto
//! `[0, 1)` with `z = anchor ± u / (1 - u)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], largest first; odd indices are Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Four-point Gauss-Legendre rule on [-1, 1].
pub const GAUSS_LEGENDRE_4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_575_2, 0.347_854_845_137_453_857_4),
    (-0.339_981_043_584_856_264_8, 0.652_145_154_862_546_142_6),
    (0.339_981_043_584_856_264_8, 0.652_145_154_862_546_142_6),
    (0.861_136_311_594_052_575_2, 0.347_854_845_137_453_857_4),
];

const MAX_INTERVALS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-10, 1e-10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0; 15];
    fv[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    if let Some(bad) = fv.iter().position(|v| !v.is_finite()) {
        let x = if bad == 7 {
            center
        } else if bad < 7 {
            center - half * XGK[bad]
        } else {
            center + half * XGK[14 - bad]
        };
        return Err(Error::Quadrature(format!(
            "integrand is not finite at x = {x:e}"
        )));
    }

    let mut res_k = WGK[7] * fv[7];
    let mut res_g = WG[3] * fv[7];
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        res_k += WGK[j] * pair;
        res_abs += WGK[j] * (fv[j].abs() + fv[14 - j].abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fv[7] - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    Ok(Segment { a, b, value, error })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
///
/// Integrable endpoint singularities are fine since the rule never samples
/// the endpoints. Divergent integrals surface as `Error::Quadrature`, either
/// through a non-finite sample or through exhausting the subdivision budget.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_limit(f, a, b, tol, MAX_INTERVALS)
}

/// [`integrate`] with an explicit cap on the number of subintervals.
pub fn integrate_with_limit<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<Estimate> {
    match integrate_best_effort(f, a, b, tol, max_intervals)? {
        (est, true) => Ok(est),
        (est, false) => Err(Error::Quadrature(format!(
            "no convergence after {max_intervals} subintervals (estimate {:e} ± {:e})",
            est.value, est.error
        ))),
    }
}

/// Like [`integrate_with_limit`], but running out of subintervals returns
/// the current estimate flagged `false` instead of failing. Non-finite
/// samples and unsplittable intervals are still errors.
pub fn integrate_best_effort<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    max_intervals: usize,
) -> Result<(Estimate, bool)> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Quadrature(format!(
            "finite limits required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok((Estimate { value: 0.0, error: 0.0, evaluations: 0 }, true));
    }
    let first = kronrod15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    let mut converged = true;
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= max_intervals.max(1) {
            converged = false;
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature(format!(
                "interval [{:e}, {:e}] exhausted floating-point resolution",
                worst.a, worst.b
            )));
        }
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // resum to shed accumulated cancellation from the running update
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok((Estimate { value, error, evaluations }, converged))
}

/// Integral over `[anchor, +∞)` via `z = anchor + u / (1 - u)`.
pub fn integrate_upper_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    anchor: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    integrate(
        |u| {
            let w = 1.0 - u;
            let z = anchor + u / w;
            let fz = f(z);
            // the mapped integrand vanishes at u -> 1 whenever f decays
            if fz == 0.0 {
                0.0
            } else {
                fz / (w * w)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Integral over `(-∞, anchor]` via `z = anchor - u / (1 - u)`.
pub fn integrate_lower_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    anchor: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    integrate_upper_half_line(|s| f(2.0 * anchor - s), anchor, tol)
}

/// Fixed four-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre_4<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GAUSS_LEGENDRE_4
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}
