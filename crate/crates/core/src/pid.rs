//! Frontal-plane roll compensation through the thrusters.
//!
//! The roll loop treats the body as an inverted pendulum about the support
//! line and commands a roll moment from a PID on the roll error. The moment
//! is produced by equal and opposite vertical thrusts on the two sides.

use nalgebra::{Vector3, Vector6};
use thiserror::Error;

use crate::params::RobotParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Bound on `|∫e dt|`, rad·s.
    pub integral_limit: f64,
    /// Bound on the commanded roll moment, N·m.
    pub max_moment: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self { kp: 40.0, ki: 5.0, kd: 8.0, integral_limit: 0.5, max_moment: 20.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PidError {
    #[error("PID setting {name} must be non-negative, got {value}")]
    Gain { name: &'static str, value: f64 },
    #[error("thrusters have no lateral arm; a roll moment cannot be produced")]
    ZeroArm,
}

impl PidGains {
    pub fn validate(&self) -> Result<(), PidError> {
        for (name, value) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(PidError::Gain { name, value });
            }
        }
        // Infinite limits switch the clamps off.
        for (name, value) in [("integral_limit", self.integral_limit), ("max_moment", self.max_moment)] {
            if !(value >= 0.0) {
                return Err(PidError::Gain { name, value });
            }
        }
        Ok(())
    }
}

/// Thruster positions in the body frame, indexed like the legs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrusterGeometry {
    pub offsets: [Vector3<f64>; 4],
}

impl From<&RobotParams> for ThrusterGeometry {
    fn from(p: &RobotParams) -> Self {
        Self { offsets: p.thruster_offsets }
    }
}

impl ThrusterGeometry {
    /// Mean lateral distance of the thrusters from the body's x axis.
    pub fn lateral_arm(&self) -> f64 {
        self.offsets.iter().map(|o| o.y.abs()).sum::<f64>() / 4.0
    }

    /// Body wrench of vertical thrusts `f[i]` (body z, N).
    pub fn wrench(&self, thrust: &[f64; 4]) -> Vector6<f64> {
        let mut w = Vector6::zeros();
        for (r, &f) in self.offsets.iter().zip(thrust) {
            let force = Vector3::new(0.0, 0.0, f);
            let moment = r.cross(&force);
            w += Vector6::new(force.x, force.y, force.z, moment.x, moment.y, moment.z);
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    /// Error at the previous update; `None` before the first.
    pub previous_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidOutput {
    pub wrench: Vector6<f64>,
    /// Commanded roll moment after saturation.
    pub moment: f64,
    /// Per-thruster vertical force.
    pub thrust: [f64; 4],
    pub saturated: bool,
}

/// One PID update on the roll error `e` (reference minus measured roll)
/// over the control period `dt`.
///
/// `τ = kp·e + ki·∫e + kd·ė`, with `ė` from the difference to the previous
/// error. The integral is clamped and left unchanged on updates where the
/// moment saturates. The moment is split as `±τ/(2·y_t)` between the left
/// and right sides, shared equally by the front and back thruster of a side.
pub fn pid_roll_wrench(
    error: f64,
    dt: f64,
    state: &PidState,
    gains: &PidGains,
    geometry: &ThrusterGeometry,
) -> Result<(PidOutput, PidState), PidError> {
    gains.validate()?;
    let arm = geometry.lateral_arm();
    if !(arm > 0.0) {
        return Err(PidError::ZeroArm);
    }
    let rate = match state.previous_error {
        Some(prev) if dt > 0.0 => (error - prev) / dt,
        _ => 0.0,
    };
    let integral = (state.integral + error * dt).clamp(-gains.integral_limit, gains.integral_limit);
    let raw = gains.kp * error + gains.ki * integral + gains.kd * rate;
    let saturated = raw.abs() > gains.max_moment;
    let moment = raw.clamp(-gains.max_moment, gains.max_moment);
    let next = PidState { integral: if saturated { state.integral } else { integral }, previous_error: Some(error) };

    let side_force = moment / (2.0 * arm);
    let thrust = core::array::from_fn(|i| {
        let o = geometry.offsets[i];
        if o.y > 0.0 {
            side_force / 2.0
        } else if o.y < 0.0 {
            -side_force / 2.0
        } else {
            0.0
        }
    });
    Ok((PidOutput { wrench: geometry.wrench(&thrust), moment, thrust, saturated }, next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry() -> ThrusterGeometry {
        ThrusterGeometry::from(&RobotParams::default())
    }

    fn p_only(kp: f64) -> PidGains {
        PidGains { kp, ki: 0.0, kd: 0.0, integral_limit: 1.0, max_moment: f64::INFINITY }
    }

    #[test]
    fn zero_error_zero_wrench() {
        let (out, _) = pid_roll_wrench(0.0, 0.01, &PidState::default(), &PidGains::default(), &geometry()).unwrap();
        assert_eq!(out.wrench, Vector6::zeros());
    }

    #[test]
    fn force_pair_from_proportional_term() {
        let (out, _) = pid_roll_wrench(0.1, 0.01, &PidState::default(), &p_only(10.0), &geometry()).unwrap();
        assert!((out.moment - 1.0).abs() < 1e-15);
        let side: f64 = 1.0 / (2.0 * 0.15);
        assert!((side - 10.0 / 3.0).abs() < 1e-15);
        let left: f64 = (0..4).filter(|&i| geometry().offsets[i].y > 0.0).map(|i| out.thrust[i]).sum();
        assert!((left - side).abs() < 1e-14);
        // Pure roll moment: no net force, no pitch or yaw.
        assert!((out.wrench - Vector6::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0)).amax() < 1e-14);
    }

    #[test]
    fn integral_frozen_when_saturated() {
        let gains = PidGains { kp: 100.0, ki: 10.0, kd: 0.0, integral_limit: 10.0, max_moment: 1.0 };
        let mut st = PidState { integral: 0.2, previous_error: Some(0.5) };
        for _ in 0..50 {
            let (out, next) = pid_roll_wrench(0.5, 0.01, &st, &gains, &geometry()).unwrap();
            assert!(out.saturated && out.moment == 1.0);
            assert_eq!(next.integral, 0.2);
            st = next;
        }
    }

    #[test]
    fn derivative_from_error_difference() {
        let gains = PidGains { kp: 0.0, ki: 0.0, kd: 2.0, integral_limit: 1.0, max_moment: f64::INFINITY };
        let st = PidState { integral: 0.0, previous_error: Some(0.1) };
        let (out, _) = pid_roll_wrench(0.12, 0.01, &st, &gains, &geometry()).unwrap();
        assert!((out.moment - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_setup() {
        let mut g = geometry();
        for o in &mut g.offsets {
            o.y = 0.0;
        }
        assert_eq!(pid_roll_wrench(0.1, 0.01, &PidState::default(), &PidGains::default(), &g), Err(PidError::ZeroArm));
        let gains = PidGains { kp: -1.0, ..PidGains::default() };
        assert!(matches!(pid_roll_wrench(0.1, 0.01, &PidState::default(), &gains, &geometry()), Err(PidError::Gain { name: "kp", .. })));
    }
}
