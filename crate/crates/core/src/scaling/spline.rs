//! Weighted least-squares fit of a uniform cubic B-spline.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug)]
pub struct CubicSpline {
    lo: f64,
    h: f64,
    intervals: usize,
    coeffs: DVector<f64>,
}

/// The four nonzero basis values on one interval, and the first index.
fn basis(lo: f64, h: f64, intervals: usize, x: f64) -> (usize, [f64; 4]) {
    let u = (x - lo) / h;
    let j = (u.floor().max(0.0) as usize).min(intervals - 1);
    let t = u - j as f64;
    let t2 = t * t;
    let t3 = t2 * t;
    let s = 1.0 - t;
    (j, [s * s * s / 6.0, (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0, (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0, t3 / 6.0])
}

impl CubicSpline {
    /// Fits `intervals + 3` coefficients on `[min x, max x]`; `None` if the system is degenerate.
    pub fn fit(xs: &[f64], ys: &[f64], weights: &[f64], intervals: usize) -> Option<Self> {
        let intervals = intervals.max(1);
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return None;
        }
        let h = (hi - lo) / intervals as f64;
        let nb = intervals + 3;
        let mut a = DMatrix::zeros(xs.len(), nb);
        let mut b = DVector::zeros(xs.len());
        for (i, ((&x, &y), &w)) in xs.iter().zip(ys).zip(weights).enumerate() {
            let sw = w.sqrt();
            let (j, v) = basis(lo, h, intervals, x);
            for (k, vk) in v.iter().enumerate() {
                a[(i, j + k)] = sw * vk;
            }
            b[i] = sw * y;
        }
        let svd = a.svd(true, true);
        let coeffs = svd.solve(&b, 1e-12).ok()?;
        Some(Self { lo, h, intervals, coeffs })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (j, v) = basis(self.lo, self.h, self.intervals, x);
        (0..4).map(|k| v[k] * self.coeffs[j + k]).sum()
    }
}
