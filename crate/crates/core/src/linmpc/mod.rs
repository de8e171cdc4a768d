//! Linearization and the box-constrained model predictive controller.
//!
//! [`numerical_jacobian`] linearizes any `ẋ = f(x, u)`, `y = g(x)` by
//! central differences; [`linearize_hrom`] applies it to the HROM with the
//! Euler angles as outputs. [`discretize`] is the explicit-Euler step map and
//! [`solve_mpc`] condenses the horizon into a QP over the stacked wrenches.

mod jacobian;
mod mpc;
mod qp;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use jacobian::{hrom_output, linearize_hrom, numerical_jacobian, Coordinate, LinearizeError};
pub use mpc::{solve_mpc, MpcConfig, MpcError, MpcSolution};
pub use qp::{solve_box_qp, BoxQp, QpResult};

/// Continuous-time linearization about `(x0, u0)`.
///
/// Inputs are split into the wrench part (the first `b_e.ncols()` entries of
/// `u0`) and the joint-acceleration part.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a: DMatrix<f64>,
    pub b_e: DMatrix<f64>,
    pub b_j: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub x0: DVector<f64>,
    pub u0: DVector<f64>,
    /// `f(x0, u0)`.
    pub f0: DVector<f64>,
    /// `g(x0)`.
    pub g0: DVector<f64>,
}

impl LinearModel {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn wrench_dim(&self) -> usize {
        self.b_e.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.nrows()
    }

    /// `[B_e, B_j]`.
    pub fn b(&self) -> DMatrix<f64> {
        let n = self.state_dim();
        let (me, mj) = (self.b_e.ncols(), self.b_j.ncols());
        let mut b = DMatrix::zeros(n, me + mj);
        b.columns_mut(0, me).copy_from(&self.b_e);
        b.columns_mut(me, mj).copy_from(&self.b_j);
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("discretization step must be positive and finite, got {0}")]
pub struct StepError(pub f64);

/// Explicit-Euler step map `x⁺ = x + A_d·x + B_d·u` with `A_d = A·dt` and
/// `B_d = B·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub a_d: DMatrix<f64>,
    pub b_d: DMatrix<f64>,
}

impl DiscreteModel {
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        x + &self.a_d * x + &self.b_d * u
    }
}

pub fn discretize(model: &LinearModel, dt: f64) -> Result<DiscreteModel, StepError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(StepError(dt));
    }
    Ok(DiscreteModel { a_d: &model.a * dt, b_d: model.b() * dt })
}

/// Stacks `k` vectors of equal length into one.
pub(crate) fn stack(parts: &[DVector<f64>]) -> DVector<f64> {
    let data: Vec<f64> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    DVector::from_vec(data)
}
