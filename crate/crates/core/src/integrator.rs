//! Fixed-step classical Runge-Kutta integration.

use thiserror::Error;

use crate::dynamics::{state_derivative, DynamicsError, Hrom};
use crate::rotation::project_to_so3;
use crate::state::{ControlInput, RobotState};

/// Vector-space operations RK4 needs on a state type.
pub trait OdeState: Sized {
    fn scaled(&self, a: f64) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn scaled(&self, a: f64) -> Self {
        self * a
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl<const N: usize> OdeState for [f64; N] {
    fn scaled(&self, a: f64) -> Self {
        self.map(|v| v * a)
    }
    fn plus(&self, other: &Self) -> Self {
        core::array::from_fn(|i| self[i] + other[i])
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for RobotState {
    fn scaled(&self, a: f64) -> Self {
        RobotState::from_vector(&self.to_vector().scaled(a))
    }
    fn plus(&self, other: &Self) -> Self {
        RobotState::from_vector(&self.to_vector().plus(&other.to_vector()))
    }
    fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegratorError<E> {
    #[error("stage {stage} evaluation failed: {source}")]
    Stage { stage: usize, source: E },
    #[error("stage {stage} produced a non-finite derivative")]
    NonFinite { stage: usize },
    #[error("step size must be positive and finite, got {0}")]
    StepSize(f64),
}

/// One RK4 step with the input held over all four stages.
pub fn rk4_step<S, U, E, F>(f: F, x: &S, u: &U, dt: f64) -> Result<S, IntegratorError<E>>
where
    S: OdeState,
    F: Fn(&S, &U) -> Result<S, E>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(IntegratorError::StepSize(dt));
    }
    let stage = |i: usize, at: &S| -> Result<S, IntegratorError<E>> {
        let k = f(at, u).map_err(|source| IntegratorError::Stage { stage: i, source })?;
        if k.is_finite() {
            Ok(k)
        } else {
            Err(IntegratorError::NonFinite { stage: i })
        }
    };
    let f1 = stage(1, x)?;
    let f2 = stage(2, &x.plus(&f1.scaled(dt / 2.0)))?;
    let f3 = stage(3, &x.plus(&f2.scaled(dt / 2.0)))?;
    let f4 = stage(4, &x.plus(&f3.scaled(dt)))?;
    let (sixth, third) = (dt / 6.0, dt / 3.0);
    let increment = f1.scaled(sixth).plus(&f2.scaled(third)).plus(&f3.scaled(third)).plus(&f4.scaled(sixth));
    Ok(x.plus(&increment))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum So3Projection {
    /// Replace `R_B` by its orthonormal polar factor after every step.
    #[default]
    Polar,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub so3_projection: So3Projection,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, so3_projection: So3Projection::Polar }
    }
}

/// RK4 step of the full model followed by the configured SO(3) restoration.
pub fn step_robot(
    model: &Hrom,
    x: &RobotState,
    u: &ControlInput,
    config: &IntegratorConfig,
) -> Result<RobotState, IntegratorError<DynamicsError>> {
    let mut next = rk4_step(|s: &RobotState, u: &ControlInput| state_derivative(model, s, u), x, u, config.dt)?;
    if config.so3_projection == So3Projection::Polar {
        next.body.rotation = project_to_so3(&next.body.rotation);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::ContactParams;
    use crate::dynamics::mechanical_energy;
    use crate::params::RobotParams;
    use crate::rotation::{orthonormality_error, rotation_from_euler};
    use crate::state::{BodyState, LegJointState};
    use core::convert::Infallible;
    use nalgebra::Vector3;

    fn ok<T>(v: T) -> Result<T, Infallible> {
        Ok(v)
    }

    #[test]
    fn stationary_field() {
        let x = [1.0, -2.0, 3.5];
        let next = rk4_step(|_: &[f64; 3], _: &()| ok([0.0; 3]), &x, &(), 0.1).unwrap();
        assert_eq!(next, x);
    }

    #[test]
    fn constant_field_exact() {
        let next = rk4_step(|_: &f64, _: &()| ok(1.0), &0.0, &(), 0.1).unwrap();
        assert_eq!(next, 0.1);
    }

    #[test]
    fn exponential_matches_taylor() {
        let next = rk4_step(|x: &f64, _: &()| ok(*x), &1.0, &(), 0.1).unwrap();
        let taylor = 1.0 + 0.1 + 0.005 + 1.0 / 6000.0 + 1.0 / 240_000.0;
        assert!((next - taylor).abs() < 1e-15);
        assert!(((next - 0.1f64.exp()).abs() - 8.47e-8).abs() < 1e-9);
    }

    #[test]
    fn reports_stage_and_step_errors() {
        let err = rk4_step(|x: &f64, _: &()| ok(if *x > 0.4 { f64::NAN } else { 10.0 }), &0.0, &(), 0.1).unwrap_err();
        assert_eq!(err, IntegratorError::NonFinite { stage: 2 });
        let err = rk4_step(|_: &f64, _: &()| Err::<f64, &str>("boom"), &0.0, &(), 0.1).unwrap_err();
        assert_eq!(err, IntegratorError::Stage { stage: 1, source: "boom" });
        assert!(matches!(rk4_step(|x: &f64, _: &()| ok(*x), &0.0, &(), 0.0), Err(IntegratorError::StepSize(_))));
    }

    #[test]
    fn robot_step_stays_on_so3() {
        let mut contact = ContactParams::default();
        contact.ground_height = -100.0;
        let model = Hrom::new(RobotParams::default(), contact);
        let mut x = RobotState {
            body: BodyState::at_rest(Vector3::new(0.0, 0.0, 1.0), rotation_from_euler(0.1, 0.2, 0.3)),
            legs: [LegJointState::at_rest(0.0, 0.0, 0.4); 4],
        };
        x.body.angular_velocity = Vector3::new(1.5, -2.0, 0.7);
        let e0 = mechanical_energy(&model.robot, &x.body);
        let cfg = IntegratorConfig::default();
        for _ in 0..1000 {
            x = step_robot(&model, &x, &ControlInput::default(), &cfg).unwrap();
            assert!(orthonormality_error(&x.body.rotation) < 1e-12);
        }
        let e1 = mechanical_energy(&model.robot, &x.body);
        assert!(((e1 - e0) / e0).abs() < 1e-9);
    }
}
