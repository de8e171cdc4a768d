use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// `min ½ uᵀPu + qᵀu + c` subject to `lower ≤ u ≤ upper`, with `P`
/// symmetric positive definite and the origin feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp {
    pub p: DMatrix<f64>,
    pub q: DVector<f64>,
    pub c: f64,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpResult {
    pub u: DVector<f64>,
    pub cost: f64,
    /// Cost of the all-zero decision vector.
    pub zero_cost: f64,
    /// Norm of the projected-gradient mapping at `u`.
    pub stationarity: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl BoxQp {
    pub fn cost(&self, u: &DVector<f64>) -> f64 {
        0.5 * u.dot(&(&self.p * u)) + self.q.dot(u) + self.c
    }

    pub fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.p * u + &self.q
    }

    pub fn project(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(u.len(), |i, _| u[i].clamp(self.lower[i], self.upper[i]))
    }

    /// Largest eigenvalue of `P`, the Lipschitz constant of the gradient.
    pub fn lipschitz(&self) -> f64 {
        let sym = (&self.p + self.p.transpose()) * 0.5;
        SymmetricEigen::new(sym).eigenvalues.max()
    }

    /// `L·(u − Π(u − ∇J(u)/L))`; zero exactly at the constrained minimizer.
    pub fn stationarity(&self, u: &DVector<f64>, lipschitz: f64) -> f64 {
        let stepped = self.project(&(u - self.gradient(u) / lipschitz));
        (u - stepped).norm() * lipschitz
    }
}

/// Projected gradient with fixed step `1/L`, accelerated by Nesterov
/// momentum with a function-value restart. Starts from the origin and
/// returns the lowest-cost feasible iterate seen, so the result never costs
/// more than the zero vector.
pub fn solve_box_qp(qp: &BoxQp, tolerance: f64, max_iterations: usize) -> QpResult {
    let n = qp.q.len();
    let zero = DVector::zeros(n);
    let zero_cost = qp.c;
    let lipschitz = qp.lipschitz();
    if n == 0 || !(lipschitz > 0.0) {
        let stationarity = if n == 0 { 0.0 } else { qp.q.norm() };
        return QpResult { u: zero, cost: zero_cost, zero_cost, stationarity, iterations: 0, converged: stationarity <= tolerance };
    }

    let mut x = zero.clone();
    let mut y = zero.clone();
    let mut t = 1.0f64;
    let mut cost = zero_cost;
    let mut best = (zero, zero_cost);
    let mut iterations = 0;
    let mut stationarity = qp.stationarity(&x, lipschitz);

    while stationarity > tolerance && iterations < max_iterations {
        iterations += 1;
        let next = qp.project(&(&y - qp.gradient(&y) / lipschitz));
        let next_cost = qp.cost(&next);
        if next_cost > cost && t > 1.0 {
            // Momentum overshot: restart from the last iterate. A plain step
            // from there is accepted whatever roundoff says about its cost.
            t = 1.0;
            y = x.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t * t));
        y = &next + (&next - &x) * ((t - 1.0) / t_next);
        t = t_next;
        x = next;
        cost = next_cost;
        if cost <= best.1 {
            best = (x.clone(), cost);
        }
        stationarity = qp.stationarity(&x, lipschitz);
    }

    // Roundoff can leave the converged iterate a hair above the best cost.
    let (u, cost) = if stationarity <= tolerance && cost <= zero_cost { (x, cost) } else { best };
    let stationarity = qp.stationarity(&u, lipschitz);
    QpResult { u, cost, zero_cost, stationarity, iterations, converged: stationarity <= tolerance }
}
