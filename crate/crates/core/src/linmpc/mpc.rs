use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use super::qp::{solve_box_qp, BoxQp};
use super::{stack, LinearModel};
use crate::state::WRENCH_DIM;

/// Horizon, weights and bounds. Vector lengths follow the model: `q` has one
/// entry per output, `r`, `u_min` and `u_max` one per wrench input.
#[derive(Debug, Clone, PartialEq)]
pub struct MpcConfig {
    pub horizon: usize,
    pub dt: f64,
    /// Diagonal of the output-error weight.
    pub q: DVector<f64>,
    /// Diagonal of the input weight.
    pub r: DVector<f64>,
    pub u_min: DVector<f64>,
    pub u_max: DVector<f64>,
    /// Central-difference perturbation for relinearization.
    pub h: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Control steps between relinearizations.
    pub relinearize_every: usize,
}

impl Default for MpcConfig {
    /// Settings for the HROM roll regulator: Euler-angle outputs, body wrench
    /// inputs (N, N·m).
    fn default() -> Self {
        let force = 60.0;
        let moment = 15.0;
        Self {
            horizon: 10,
            dt: 0.01,
            q: DVector::from_element(3, 1.0e3),
            r: DVector::from_column_slice(&[1e-3, 1e-3, 1e-3, 1e-2, 1e-2, 1e-2]),
            u_min: DVector::from_column_slice(&[-force, -force, -force, -moment, -moment, -moment]),
            u_max: DVector::from_column_slice(&[force, force, force, moment, moment, moment]),
            h: 1e-5,
            tolerance: 1e-8,
            max_iterations: 500,
            relinearize_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MpcError {
    #[error("invalid MPC setting {name} = {value}")]
    Setting { name: &'static str, value: f64 },
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension { what: &'static str, expected: usize, got: usize },
}

impl MpcConfig {
    pub fn validate(&self) -> Result<(), MpcError> {
        let bad = |name, value: f64| Err(MpcError::Setting { name, value });
        if self.horizon == 0 {
            return bad("horizon", 0.0);
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt);
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return bad("h", self.h);
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance", self.tolerance);
        }
        if self.relinearize_every == 0 {
            return bad("relinearize_every", 0.0);
        }
        if let Some(&v) = self.q.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return bad("q", v);
        }
        if let Some(&v) = self.r.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return bad("r", v);
        }
        dim("u_min", self.r.len(), self.u_min.len())?;
        dim("u_max", self.r.len(), self.u_max.len())?;
        if let Some(&v) = self.u_min.iter().find(|v| !(**v <= 0.0)) {
            return bad("u_min", v);
        }
        if let Some(&v) = self.u_max.iter().find(|v| !(**v >= 0.0)) {
            return bad("u_max", v);
        }
        Ok(())
    }

    /// Checks the weight sizes against a model.
    pub fn check_model(&self, model: &LinearModel) -> Result<(), MpcError> {
        dim("q", model.output_dim(), self.q.len())?;
        dim("r", model.wrench_dim(), self.r.len())?;
        Ok(())
    }

    /// `true` when the sizes match the HROM outputs and wrench.
    pub fn is_hrom_sized(&self) -> bool {
        self.q.len() == 3 && self.r.len() == WRENCH_DIM
    }
}

fn dim(what: &'static str, expected: usize, got: usize) -> Result<(), MpcError> {
    if expected == got {
        Ok(())
    } else {
        Err(MpcError::Dimension { what, expected, got })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcSolution {
    /// First wrench of the optimal sequence, the one to apply.
    pub u_e: DVector<f64>,
    /// All `N` wrenches, stacked.
    pub sequence: DVector<f64>,
    pub cost: f64,
    pub zero_cost: f64,
    pub stationarity: f64,
    pub iterations: usize,
    /// `false` when the iteration cap was hit before the tolerance.
    pub converged: bool,
}

/// Finite-horizon MPC over the wrench inputs.
///
/// Predictions use the explicit-Euler map in deviation coordinates about the
/// model's operating point, `δx⁺ = δx + A_d δx + B_d u_e + w` with the drift
/// `w = (f0 − B_e u0_e)·dt` and the joint accelerations held at `u0`. The
/// cost is `Σ_{k=1..N} e_kᵀ Q e_k + Σ_{k=0..N−1} u_kᵀ R u_k` with the output
/// error `e_k = y_ref,k − g0 − C δx_k`; there is no terminal weight.
pub fn solve_mpc(x: &DVector<f64>, reference: &[DVector<f64>], model: &LinearModel, config: &MpcConfig) -> Result<MpcSolution, MpcError> {
    config.validate()?;
    config.check_model(model)?;
    let (n, m, p, horizon) = (model.state_dim(), model.wrench_dim(), model.output_dim(), config.horizon);
    dim("state", n, x.len())?;
    dim("reference length", horizon, reference.len())?;
    for r in reference {
        dim("reference entry", p, r.len())?;
    }

    let dt = config.dt;
    let phi = DMatrix::identity(n, n) + &model.a * dt;
    let b_d = &model.b_e * dt;
    let u0_e = model.u0.rows(0, m).into_owned();
    let drift = (&model.f0 - &model.b_e * &u0_e) * dt;

    // Markov blocks C Φ^i B_d and the free response.
    let mut markov = Vec::with_capacity(horizon);
    let mut phi_b = b_d;
    for _ in 0..horizon {
        markov.push(&model.c * &phi_b);
        phi_b = &phi * &phi_b;
    }
    let mut free = x - &model.x0;
    let mut residual = Vec::with_capacity(horizon);
    for r in reference {
        free = &phi * &free + &drift;
        residual.push(r - &model.g0 - &model.c * &free);
    }
    let residual = stack(&residual);

    let mut h = DMatrix::zeros(horizon * p, horizon * m);
    for k in 0..horizon {
        for j in 0..=k {
            h.view_mut((k * p, j * m), (p, m)).copy_from(&markov[k - j]);
        }
    }
    let q_bar = DVector::from_fn(horizon * p, |i, _| config.q[i % p]);
    let r_bar = DVector::from_fn(horizon * m, |i, _| config.r[i % m]);
    let qh = DMatrix::from_fn(horizon * p, horizon * m, |i, j| q_bar[i] * h[(i, j)]);
    let mut hess = h.transpose() * &qh;
    for i in 0..horizon * m {
        hess[(i, i)] += r_bar[i];
    }
    let qp = BoxQp {
        p: hess * 2.0,
        q: qh.transpose() * &residual * -2.0,
        c: residual.iter().zip(q_bar.iter()).map(|(r, w)| w * r * r).sum(),
        lower: DVector::from_fn(horizon * m, |i, _| config.u_min[i % m]),
        upper: DVector::from_fn(horizon * m, |i, _| config.u_max[i % m]),
    };
    let result = solve_box_qp(&qp, config.tolerance, config.max_iterations);
    Ok(MpcSolution {
        u_e: result.u.rows(0, m).into_owned(),
        sequence: result.u,
        cost: result.cost,
        zero_cost: result.zero_cost,
        stationarity: result.stationarity,
        iterations: result.iterations,
        converged: result.converged,
    })
}
