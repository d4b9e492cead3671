//! Sampled densities exchanged between the analytic, finite-difference and
//! Monte Carlo engines.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Density values `ws` at increasing positions `xs` at time `t`, inside the
/// physical support `[x_lo, x_hi]`.
///
/// Finite-volume outputs use `xs` as cell centres; the cell faces are the
/// midpoints between neighbouring centres plus the two support ends.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub t: f64,
    pub xs: Vec<f64>,
    pub ws: Vec<f64>,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl DensityField {
    pub fn new(t: f64, xs: Vec<f64>, ws: Vec<f64>, x_lo: f64, x_hi: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("field time must be positive, got {t}")));
        }
        if xs.len() != ws.len() || xs.is_empty() {
            return Err(Error::InvalidState(format!(
                "field needs matching non-empty grids ({} positions, {} values)",
                xs.len(),
                ws.len()
            )));
        }
        if !(x_lo < x_hi) {
            return Err(Error::InvalidState(format!(
                "field support [{x_lo}, {x_hi}] is empty"
            )));
        }
        if xs.windows(2).any(|p| !(p[0] < p[1])) {
            return Err(Error::InvalidState("field positions must be strictly increasing".into()));
        }
        if xs[0] < x_lo || xs[xs.len() - 1] > x_hi {
            return Err(Error::InvalidState("field positions leave the support".into()));
        }
        if ws.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidState("field contains non-finite values".into()));
        }
        Ok(DensityField { t, xs, ws, x_lo, x_hi })
    }

    /// Samples `density` at `xs`.
    pub fn sample<F: Fn(f64) -> f64>(t: f64, xs: Vec<f64>, x_lo: f64, x_hi: f64, density: F) -> Result<Self> {
        let ws = xs.iter().map(|&x| density(x)).collect();
        Self::new(t, xs, ws, x_lo, x_hi)
    }

    /// `n` equally spaced points including both support ends.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let h = (hi - lo) / (n - 1) as f64;
        (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + h * i as f64 })
            .collect()
    }

    /// Centres of `n` equal cells on `[lo, hi]`.
    pub fn cell_centres(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / n as f64;
        (0..n).map(|i| lo + h * (i as f64 + 0.5)).collect()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Trapezoidal integral over the sample points.
    pub fn trapezoid_mass(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ws.windows(2))
            .map(|(x, w)| 0.5 * (x[1] - x[0]) * (w[0] + w[1]))
            .sum()
    }

    pub fn cell_faces(&self) -> Vec<f64> {
        let mut faces = Vec::with_capacity(self.xs.len() + 1);
        faces.push(self.x_lo);
        faces.extend(self.xs.windows(2).map(|p| 0.5 * (p[0] + p[1])));
        faces.push(self.x_hi);
        faces
    }

    /// Integral treating each value as a cell average.
    pub fn cell_mass(&self) -> f64 {
        let faces = self.cell_faces();
        self.ws.iter().zip(faces.windows(2)).map(|(w, f)| w * (f[1] - f[0])).sum()
    }

    /// Leftmost position of the largest value.
    pub fn peak(&self) -> (f64, f64) {
        let mut best = 0;
        for (i, &w) in self.ws.iter().enumerate() {
            if w > self.ws[best] {
                best = i;
            }
        }
        (self.xs[best], self.ws[best])
    }

    pub fn min_value(&self) -> f64 {
        self.ws.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ |w_i - avg_i(density)| Δx_i`, where `avg_i` is the exact average of
    /// `density` over cell `i`.
    pub fn l1_against_cell_averages<F: Fn(f64) -> f64>(&self, density: F) -> Result<f64> {
        let faces = self.cell_faces();
        let mut total = 0.0;
        for (w, f) in self.ws.iter().zip(faces.windows(2)) {
            let mass = integrate(&density, f[0], f[1], Tolerance::new(1e-13, 1e-10))?.value;
            total += (w * (f[1] - f[0]) - mass).abs();
        }
        Ok(total)
    }

    /// Cell averages of `density` on the faces `[lo, hi]` split into `n`
    /// equal cells.
    pub fn from_cell_averages<F: Fn(f64) -> f64>(
        t: f64,
        lo: f64,
        hi: f64,
        n: usize,
        density: F,
    ) -> Result<Self> {
        let h = (hi - lo) / n as f64;
        let mut ws = Vec::with_capacity(n);
        for i in 0..n {
            let a = lo + h * i as f64;
            let b = if i == n - 1 { hi } else { a + h };
            ws.push(integrate(&density, a, b, Tolerance::new(1e-13, 1e-10))?.value / (b - a));
        }
        Self::new(t, Self::cell_centres(lo, hi, n), ws, lo, hi)
    }

    /// Piecewise-constant reading of the field: its cell integral over
    /// `[a, b]`, zero outside the support.
    pub fn cell_integral(&self, a: f64, b: f64) -> f64 {
        let faces = self.cell_faces();
        let mut total = 0.0;
        for (w, f) in self.ws.iter().zip(faces.windows(2)) {
            let lo = f[0].max(a);
            let hi = f[1].min(b);
            if hi > lo {
                total += w * (hi - lo);
            }
        }
        total
    }

    /// Conservative remap onto `n` equal cells of `[lo, hi]`, returning the
    /// new cell averages.
    pub fn remap_cells(&self, lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|i| {
                let a = lo + h * i as f64;
                let b = if i == n - 1 { hi } else { a + h };
                self.cell_integral(a, b) / (b - a)
            })
            .collect()
    }

    /// L1 distance between two fields compared as cell averages on the
    /// coarser of the two grids (larger mean cell width).
    ///
    /// The finer field is integrated over each coarse cell, and its mass
    /// outside the coarse support counts in full; this keeps the staircase
    /// of a coarse grid from being mistaken for a difference.
    pub fn l1_distance_to(&self, other: &DensityField) -> f64 {
        let width = |f: &DensityField| (f.x_hi - f.x_lo) / f.len() as f64;
        let (coarse, fine) = if width(self) >= width(other) { (self, other) } else { (other, self) };
        let faces = coarse.cell_faces();
        let mut total = 0.0;
        for (w, f) in coarse.ws.iter().zip(faces.windows(2)) {
            total += (w * (f[1] - f[0]) - fine.cell_integral(f[0], f[1])).abs();
        }
        let outside = fine.cell_integral(f64::NEG_INFINITY, coarse.x_lo) + fine.cell_integral(coarse.x_hi, f64::INFINITY);
        total + outside
    }

    /// CSV rows `t,x,W` in 17-significant-digit scientific notation.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,W")?;
        for (x, w) in self.xs.iter().zip(&self.ws) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", self.t, x, w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(DensityField::new(0.0, vec![0.5], vec![1.0], 0.0, 1.0).is_err());
        assert!(DensityField::new(1.0, vec![0.5, 0.4], vec![1.0, 1.0], 0.0, 1.0).is_err());
        assert!(DensityField::new(1.0, vec![1.5], vec![1.0], 0.0, 1.0).is_err());
        assert!(DensityField::new(1.0, vec![0.5], vec![f64::NAN], 0.0, 1.0).is_err());
        assert!(DensityField::new(1.0, vec![0.5], vec![1.0, 2.0], 0.0, 1.0).is_err());
    }

    #[test]
    fn masses_of_uniform_density() {
        let f = DensityField::sample(1.0, DensityField::linspace(0.0, 2.0, 11), 0.0, 2.0, |_| 0.5).unwrap();
        assert!((f.trapezoid_mass() - 1.0).abs() < 1e-15);
        let c = DensityField::sample(1.0, DensityField::cell_centres(0.0, 2.0, 8), 0.0, 2.0, |_| 0.5).unwrap();
        assert!((c.cell_mass() - 1.0).abs() < 1e-15);
        assert_eq!(c.cell_faces().len(), 9);
    }

    #[test]
    fn peak_is_leftmost_maximum() {
        let f = DensityField::new(1.0, vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 3.0, 3.0, 0.0], 0.0, 3.0).unwrap();
        assert_eq!(f.peak(), (1.0, 3.0));
    }

    #[test]
    fn cell_averages_reproduce_linear_density() {
        let f = DensityField::from_cell_averages(1.0, 0.0, 1.0, 16, |x| 2.0 * x).unwrap();
        assert!((f.cell_mass() - 1.0).abs() < 1e-14);
        for (x, w) in f.xs.iter().zip(&f.ws) {
            assert!((w - 2.0 * x).abs() < 1e-13);
        }
        assert!(f.l1_against_cell_averages(|x| 2.0 * x).unwrap() < 1e-13);
    }

    #[test]
    fn remap_conserves_mass_and_l1_of_disjoint_fields_is_two() {
        let f = DensityField::from_cell_averages(1.0, 0.0, 1.0, 10, |x| 2.0 * x).unwrap();
        let r = f.remap_cells(0.0, 1.0, 7);
        let mass: f64 = r.iter().sum::<f64>() / 7.0;
        assert!((mass - 1.0).abs() < 1e-14);
        assert!(f.l1_distance_to(&f) < 1e-15);
        let a = DensityField::sample(1.0, vec![0.25, 0.75], 0.0, 1.0, |_| 1.0).unwrap();
        let b = DensityField::sample(1.0, vec![2.5], 2.0, 3.0, |_| 1.0).unwrap();
        assert!((a.l1_distance_to(&b) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let f = DensityField::new(0.5, vec![0.1], vec![1.0 / 3.0], 0.0, 1.0).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,x,W"));
        let row = lines.next().unwrap();
        assert_eq!(row, "5.0000000000000000e-1,1.0000000000000001e-1,3.3333333333333331e-1");
        let back: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }
}
