//! Rotation helpers on SO(3): skew operator, elementary rotations, Z-Y-X
//! Euler angles and projection back onto the rotation group.

use libm::{atan2, cos, fabs, sin, sqrt};
use nalgebra::{Matrix3, Vector3};

/// Skew-symmetric matrix such that `skew(v) * w == v.cross(&w)`.
pub fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

pub fn rot_x(angle: f64) -> Matrix3<f64> {
    let (s, c) = (sin(angle), cos(angle));
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(angle: f64) -> Matrix3<f64> {
    let (s, c) = (sin(angle), cos(angle));
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(angle: f64) -> Matrix3<f64> {
    let (s, c) = (sin(angle), cos(angle));
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Roll, pitch and yaw in the Z-Y-X convention: `R = Rz(yaw) Ry(pitch) Rx(roll)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    /// Pitch within 1e-6 of ±π/2. Yaw is then reported as 0 and the whole
    /// heading is folded into roll.
    pub gimbal_lock: bool,
}

impl EulerAngles {
    pub fn as_vector(&self) -> Vector3<f64> {
        Vector3::new(self.roll, self.pitch, self.yaw)
    }
}

const GIMBAL_TOLERANCE: f64 = 1e-6;

/// Extracts Z-Y-X Euler angles from a rotation matrix.
///
/// The extraction only uses atan2 on matrix entries, so it stays smooth for
/// slightly non-orthonormal input (the linearizer perturbs individual
/// entries of `R`).
pub fn euler_angles_from_rotation(r: &Matrix3<f64>) -> EulerAngles {
    let pitch = atan2(-r[(2, 0)], sqrt(r[(2, 1)] * r[(2, 1)] + r[(2, 2)] * r[(2, 2)]));
    if fabs(fabs(pitch) - core::f64::consts::FRAC_PI_2) < GIMBAL_TOLERANCE {
        // R = Ry(±π/2) Rx(roll) with yaw pinned to zero.
        let roll = if pitch > 0.0 {
            atan2(r[(0, 1)], r[(1, 1)])
        } else {
            atan2(-r[(0, 1)], r[(1, 1)])
        };
        return EulerAngles { roll, pitch, yaw: 0.0, gimbal_lock: true };
    }
    EulerAngles {
        roll: atan2(r[(2, 1)], r[(2, 2)]),
        pitch,
        yaw: atan2(r[(1, 0)], r[(0, 0)]),
        gimbal_lock: false,
    }
}

pub fn rotation_from_euler(roll: f64, pitch: f64, yaw: f64) -> Matrix3<f64> {
    rot_z(yaw) * rot_y(pitch) * rot_x(roll)
}

/// Frobenius norm of `RᵀR − I`.
pub fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    (r.transpose() * r - Matrix3::identity()).norm()
}

/// Nearest rotation in Frobenius norm (orthonormal polar factor), computed
/// with the Newton iteration `X ← (X + X⁻ᵀ)/2`.
///
/// Returns the input unchanged if it is singular; callers only pass matrices
/// that are already close to SO(3).
pub fn project_to_so3(r: &Matrix3<f64>) -> Matrix3<f64> {
    let mut x = *r;
    for _ in 0..16 {
        let Some(inv) = x.try_inverse() else {
            return *r;
        };
        let next = (x + inv.transpose()) * 0.5;
        let delta = (next - x).norm();
        x = next;
        if delta < 1e-15 {
            break;
        }
    }
    x
}
