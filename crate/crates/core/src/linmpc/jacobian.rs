use core::fmt;

use nalgebra::{DMatrix, DVector, Matrix3};
use thiserror::Error;

use super::LinearModel;
use crate::dynamics::{state_derivative, DynamicsError, Hrom};
use crate::rotation::euler_angles_from_rotation;
use crate::state::{input_entry_name, state_entry_name, ControlInput, RobotState, INPUT_DIM, ROTATION, STATE_DIM, WRENCH_DIM};

/// Which stencil point an evaluation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    OperatingPoint,
    State(usize),
    Input(usize),
}

impl Coordinate {
    /// Entry name in the HROM state or input layout.
    pub fn hrom_name(&self) -> &'static str {
        match *self {
            Coordinate::OperatingPoint => "operating point",
            Coordinate::State(i) if i < STATE_DIM => state_entry_name(i),
            Coordinate::Input(i) if i < INPUT_DIM => input_entry_name(i),
            _ => "?",
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::OperatingPoint => write!(f, "the operating point"),
            Coordinate::State(i) => write!(f, "x[{i}]"),
            Coordinate::Input(i) => write!(f, "u[{i}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinearizeError<E> {
    #[error("perturbation must be positive and finite, got {0}")]
    Perturbation(f64),
    #[error("wrench dimension {wrench} exceeds input dimension {input}")]
    Dimension { wrench: usize, input: usize },
    #[error("model evaluation failed while perturbing {coordinate}: {source}")]
    Evaluation { coordinate: Coordinate, source: E },
    #[error("non-finite model output while perturbing {coordinate}")]
    NonFinite { coordinate: Coordinate },
}

/// Central-difference linearization of `ẋ = f(x, u)`, `y = g(x)`.
///
/// Column `i` of `A` is `[f(x0 + h eᵢ, u0) − f(x0 − h eᵢ, u0)] / 2h`; the
/// input and output Jacobians are built the same way. The first
/// `wrench_dim` inputs go to `B_e`, the rest to `B_j`.
pub fn numerical_jacobian<E, F, G>(
    f: F,
    g: G,
    x0: &DVector<f64>,
    u0: &DVector<f64>,
    wrench_dim: usize,
    h: f64,
) -> Result<LinearModel, LinearizeError<E>>
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> Result<DVector<f64>, E>,
    G: Fn(&DVector<f64>) -> DVector<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(LinearizeError::Perturbation(h));
    }
    if wrench_dim > u0.len() {
        return Err(LinearizeError::Dimension { wrench: wrench_dim, input: u0.len() });
    }
    let eval_f = |x: &DVector<f64>, u: &DVector<f64>, coordinate| {
        let y = f(x, u).map_err(|source| LinearizeError::Evaluation { coordinate, source })?;
        if y.iter().all(|v| v.is_finite()) {
            Ok(y)
        } else {
            Err(LinearizeError::NonFinite { coordinate })
        }
    };
    let eval_g = |x: &DVector<f64>, coordinate| {
        let y = g(x);
        if y.iter().all(|v| v.is_finite()) {
            Ok(y)
        } else {
            Err(LinearizeError::NonFinite { coordinate })
        }
    };

    let f0 = eval_f(x0, u0, Coordinate::OperatingPoint)?;
    let g0 = eval_g(x0, Coordinate::OperatingPoint)?;
    let (n, m, p) = (x0.len(), u0.len(), g0.len());
    let mut a = DMatrix::zeros(f0.len(), n);
    let mut c = DMatrix::zeros(p, n);
    let mut b = DMatrix::zeros(f0.len(), m);

    for i in 0..n {
        let coordinate = Coordinate::State(i);
        let (mut plus, mut minus) = (x0.clone(), x0.clone());
        plus[i] += h;
        minus[i] -= h;
        let df = eval_f(&plus, u0, coordinate)? - eval_f(&minus, u0, coordinate)?;
        a.set_column(i, &(df / (2.0 * h)));
        let dg = eval_g(&plus, coordinate)? - eval_g(&minus, coordinate)?;
        c.set_column(i, &(dg / (2.0 * h)));
    }
    for j in 0..m {
        let coordinate = Coordinate::Input(j);
        let (mut plus, mut minus) = (u0.clone(), u0.clone());
        plus[j] += h;
        minus[j] -= h;
        let df = eval_f(x0, &plus, coordinate)? - eval_f(x0, &minus, coordinate)?;
        b.set_column(j, &(df / (2.0 * h)));
    }

    Ok(LinearModel {
        a,
        b_e: b.columns(0, wrench_dim).into_owned(),
        b_j: b.columns(wrench_dim, m - wrench_dim).into_owned(),
        c,
        x0: x0.clone(),
        u0: u0.clone(),
        f0,
        g0,
    })
}

/// Euler angles `[roll, pitch, yaw]` of a flattened HROM state. The rotation
/// block is read as is, without orthonormalization, so the map is smooth in
/// all nine entries.
pub fn hrom_output(x: &DVector<f64>) -> DVector<f64> {
    let r = Matrix3::from_iterator(x.rows(ROTATION, 9).iter().copied());
    let e = euler_angles_from_rotation(&r);
    DVector::from_column_slice(&[e.roll, e.pitch, e.yaw])
}

/// Linearizes the HROM (contact included) about a state and input.
pub fn linearize_hrom(
    model: &Hrom,
    state: &RobotState,
    input: &ControlInput,
    h: f64,
) -> Result<LinearModel, LinearizeError<DynamicsError>> {
    let f = |x: &DVector<f64>, u: &DVector<f64>| {
        let mut xs = [0.0; STATE_DIM];
        xs.copy_from_slice(x.as_slice());
        let mut us = [0.0; INPUT_DIM];
        us.copy_from_slice(u.as_slice());
        let d = state_derivative(model, &RobotState::from_vector(&xs), &ControlInput::from_vector(&us))?;
        Ok(DVector::from_column_slice(&d.to_vector()))
    };
    let x0 = DVector::from_column_slice(&state.to_vector());
    let u0 = DVector::from_column_slice(&input.to_vector());
    numerical_jacobian(f, hrom_output, &x0, &u0, WRENCH_DIM, h)
}
