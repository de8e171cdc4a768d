use libm::{asin, atan2, sqrt};
use nalgebra::Vector3;

use super::GaitError;
use crate::dynamics::{leg_jacobian, leg_vector};
use crate::params::RobotParams;
use crate::state::LegJointState;

/// Admissible leg lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegWorkspace {
    pub min: f64,
    pub max: f64,
}

impl From<&RobotParams> for LegWorkspace {
    fn from(p: &RobotParams) -> Self {
        Self { min: p.leg_min, max: p.leg_max }
    }
}

impl LegWorkspace {
    pub fn contains(&self, length: f64) -> bool {
        self.min <= length && length <= self.max
    }
}

/// Hip-frame foot position of joint coordinates `[phi, gamma, l]`.
pub fn leg_forward(joints: &Vector3<f64>) -> Vector3<f64> {
    leg_vector(&LegJointState::at_rest(joints.x, joints.y, joints.z))
}

/// Closed-form inverse of the spherical-joint leg: returns `[phi, gamma, l]`
/// for a hip-frame foot target.
pub fn inverse_kinematics(target: &Vector3<f64>, workspace: &LegWorkspace) -> Result<Vector3<f64>, GaitError> {
    let length = target.norm();
    if !workspace.contains(length) {
        return Err(GaitError::Workspace { length, min: workspace.min, max: workspace.max });
    }
    let sagittal = sqrt(target.x * target.x + target.z * target.z);
    if sagittal <= 1e-12 * length {
        let gamma = if target.y > 0.0 { core::f64::consts::FRAC_PI_2 } else { -core::f64::consts::FRAC_PI_2 };
        return Err(GaitError::DegenerateLeg { gamma });
    }
    let gamma = asin((target.y / length).clamp(-1.0, 1.0));
    let phi = atan2(-target.x, -target.z);
    Ok(Vector3::new(phi, gamma, length))
}

/// Joint rates producing a hip-frame foot velocity at the given joints.
/// `None` at a singular configuration.
pub fn foot_rate_to_joint_rate(joints: &Vector3<f64>, foot_rate: &Vector3<f64>) -> Option<Vector3<f64>> {
    let j = leg_jacobian(&LegJointState::at_rest(joints.x, joints.y, joints.z));
    j.lu().solve(foot_rate)
}
