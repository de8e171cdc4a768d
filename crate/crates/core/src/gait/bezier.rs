use alloc::vec::Vec;

use nalgebra::Vector3;

use super::GaitError;

/// Bézier curve of degree `M = points.len() - 1` in the Bernstein basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierCurve {
    points: Vec<Vector3<f64>>,
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

fn powi(base: f64, exp: usize) -> f64 {
    let mut out = 1.0;
    for _ in 0..exp {
        out *= base;
    }
    out
}

impl BezierCurve {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self, GaitError> {
        if points.len() < 2 {
            return Err(GaitError::TooFewControlPoints(points.len()));
        }
        if points.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
            return Err(GaitError::NonFiniteControlPoint);
        }
        Ok(Self { points })
    }

    pub fn control_points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> Vector3<f64> {
        self.points[0]
    }

    pub fn last(&self) -> Vector3<f64> {
        self.points[self.points.len() - 1]
    }

    /// `b(s) = Σ_k C(M, k) s^k (1 − s)^(M − k) P_k`.
    pub fn eval(&self, s: f64) -> Result<Vector3<f64>, GaitError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(GaitError::ParameterOutOfRange(s));
        }
        Ok(self.eval_unchecked(s))
    }

    fn eval_unchecked(&self, s: f64) -> Vector3<f64> {
        // Endpoints are returned verbatim so interpolation there is exact.
        if s == 0.0 {
            return self.first();
        }
        if s == 1.0 {
            return self.last();
        }
        let m = self.degree();
        self.points
            .iter()
            .enumerate()
            .map(|(k, p)| p * (binomial(m, k) * powi(s, k) * powi(1.0 - s, m - k)))
            .sum()
    }

    /// `db/ds`, itself a degree `M − 1` Bézier curve on the point differences.
    pub fn derivative(&self, s: f64) -> Result<Vector3<f64>, GaitError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(GaitError::ParameterOutOfRange(s));
        }
        let m = self.degree();
        let diffs: Vec<Vector3<f64>> = self.points.windows(2).map(|w| (w[1] - w[0]) * m as f64).collect();
        if diffs.len() == 1 {
            return Ok(diffs[0]);
        }
        Ok(BezierCurve { points: diffs }.eval_unchecked(s))
    }

    /// Componentwise bounding box of the control points.
    pub fn bounding_box(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }
}
