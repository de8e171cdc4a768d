//! State and input types, and the flattened 42-entry state layout.
//!
//! Flattened layout (stable; the linearizer, integrator and CSV logs use it):
//!
//! ```text
//!  0..3    p_B                  body position, inertial frame
//!  3..12   R_B columns          r_B1, r_B2, r_B3 (column-major)
//! 12..24   leg joints           [phi, gamma, l] for FR, BR, FL, BL
//! 24..27   v_B                  body velocity, inertial frame
//! 27..30   omega_B              body angular velocity, body frame
//! 30..42   leg joint rates      [phi_dot, gamma_dot, l_dot] for FR, BR, FL, BL
//! ```

use nalgebra::{Matrix3, Vector3, Vector6};

use crate::params::LEGS;

pub const STATE_DIM: usize = 42;
pub const WRENCH_DIM: usize = 6;
pub const JOINT_DIM: usize = 12;
pub const INPUT_DIM: usize = WRENCH_DIM + JOINT_DIM;

pub const POSITION: usize = 0;
pub const ROTATION: usize = 3;
pub const JOINTS: usize = 12;
pub const VELOCITY: usize = 24;
pub const ANGULAR_VELOCITY: usize = 27;
pub const JOINT_RATES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub position: Vector3<f64>,
    /// Body-to-inertial rotation.
    pub rotation: Matrix3<f64>,
    pub velocity: Vector3<f64>,
    /// Body-frame angular velocity.
    pub angular_velocity: Vector3<f64>,
}

impl BodyState {
    pub fn at_rest(position: Vector3<f64>, rotation: Matrix3<f64>) -> Self {
        Self { position, rotation, velocity: Vector3::zeros(), angular_velocity: Vector3::zeros() }
    }
}

/// Spherical hip joint (`phi` about body y, then `gamma` about body x) plus a
/// prismatic leg length.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LegJointState {
    pub phi: f64,
    pub gamma: f64,
    pub length: f64,
    pub phi_dot: f64,
    pub gamma_dot: f64,
    pub length_dot: f64,
}

impl LegJointState {
    pub fn at_rest(phi: f64, gamma: f64, length: f64) -> Self {
        Self { phi, gamma, length, ..Self::default() }
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.phi, self.gamma, self.length)
    }

    pub fn rate(&self) -> Vector3<f64> {
        Vector3::new(self.phi_dot, self.gamma_dot, self.length_dot)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub body: BodyState,
    /// Indexed by [`crate::Leg`].
    pub legs: [LegJointState; 4],
}

impl RobotState {
    pub fn to_vector(&self) -> [f64; STATE_DIM] {
        let mut x = [0.0; STATE_DIM];
        x[POSITION..POSITION + 3].copy_from_slice(self.body.position.as_slice());
        x[ROTATION..ROTATION + 9].copy_from_slice(self.body.rotation.as_slice());
        x[VELOCITY..VELOCITY + 3].copy_from_slice(self.body.velocity.as_slice());
        x[ANGULAR_VELOCITY..ANGULAR_VELOCITY + 3]
            .copy_from_slice(self.body.angular_velocity.as_slice());
        for leg in LEGS {
            let j = &self.legs[leg.index()];
            let q = JOINTS + 3 * leg.index();
            let r = JOINT_RATES + 3 * leg.index();
            x[q..q + 3].copy_from_slice(&[j.phi, j.gamma, j.length]);
            x[r..r + 3].copy_from_slice(&[j.phi_dot, j.gamma_dot, j.length_dot]);
        }
        x
    }

    pub fn from_vector(x: &[f64; STATE_DIM]) -> Self {
        let v3 = |i: usize| Vector3::new(x[i], x[i + 1], x[i + 2]);
        let legs = LEGS.map(|leg| {
            let q = JOINTS + 3 * leg.index();
            let r = JOINT_RATES + 3 * leg.index();
            LegJointState {
                phi: x[q],
                gamma: x[q + 1],
                length: x[q + 2],
                phi_dot: x[r],
                gamma_dot: x[r + 1],
                length_dot: x[r + 2],
            }
        });
        Self {
            body: BodyState {
                position: v3(POSITION),
                rotation: Matrix3::from_column_slice(&x[ROTATION..ROTATION + 9]),
                velocity: v3(VELOCITY),
                angular_velocity: v3(ANGULAR_VELOCITY),
            },
            legs,
        }
    }

    /// Index and name of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, &'static str)> {
        self.to_vector()
            .iter()
            .position(|v| !v.is_finite())
            .map(|i| (i, state_entry_name(i)))
    }
}

/// Thruster wrench plus commanded joint accelerations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    /// Body-frame force (applied at the body origin) and body-frame moment.
    pub wrench: Vector6<f64>,
    /// `[phi_ddot, gamma_ddot, l_ddot]` per leg.
    pub joint_accel: [Vector3<f64>; 4],
}

impl Default for ControlInput {
    fn default() -> Self {
        Self { wrench: Vector6::zeros(), joint_accel: [Vector3::zeros(); 4] }
    }
}

impl ControlInput {
    pub fn force(&self) -> Vector3<f64> {
        self.wrench.fixed_rows::<3>(0).into_owned()
    }

    pub fn moment(&self) -> Vector3<f64> {
        self.wrench.fixed_rows::<3>(3).into_owned()
    }

    /// `[u_e (6), u_L (12)]`.
    pub fn to_vector(&self) -> [f64; INPUT_DIM] {
        let mut u = [0.0; INPUT_DIM];
        u[..WRENCH_DIM].copy_from_slice(self.wrench.as_slice());
        for (i, a) in self.joint_accel.iter().enumerate() {
            u[WRENCH_DIM + 3 * i..WRENCH_DIM + 3 * i + 3].copy_from_slice(a.as_slice());
        }
        u
    }

    pub fn from_vector(u: &[f64; INPUT_DIM]) -> Self {
        Self {
            wrench: Vector6::from_column_slice(&u[..WRENCH_DIM]),
            joint_accel: core::array::from_fn(|i| {
                Vector3::from_column_slice(&u[WRENCH_DIM + 3 * i..WRENCH_DIM + 3 * i + 3])
            }),
        }
    }

    pub fn first_non_finite(&self) -> Option<(usize, &'static str)> {
        self.to_vector().iter().position(|v| !v.is_finite()).map(|i| (i, input_entry_name(i)))
    }
}

const STATE_NAMES: [&str; STATE_DIM] = [
    "p_x", "p_y", "p_z",
    "r11", "r21", "r31", "r12", "r22", "r32", "r13", "r23", "r33",
    "FR_phi", "FR_gamma", "FR_l", "BR_phi", "BR_gamma", "BR_l",
    "FL_phi", "FL_gamma", "FL_l", "BL_phi", "BL_gamma", "BL_l",
    "v_x", "v_y", "v_z",
    "w_x", "w_y", "w_z",
    "FR_phi_dot", "FR_gamma_dot", "FR_l_dot", "BR_phi_dot", "BR_gamma_dot", "BR_l_dot",
    "FL_phi_dot", "FL_gamma_dot", "FL_l_dot", "BL_phi_dot", "BL_gamma_dot", "BL_l_dot",
];

const INPUT_NAMES: [&str; INPUT_DIM] = [
    "f_x", "f_y", "f_z", "m_x", "m_y", "m_z",
    "FR_phi_ddot", "FR_gamma_ddot", "FR_l_ddot", "BR_phi_ddot", "BR_gamma_ddot", "BR_l_ddot",
    "FL_phi_ddot", "FL_gamma_ddot", "FL_l_ddot", "BL_phi_ddot", "BL_gamma_ddot", "BL_l_ddot",
];

/// Column name of a flattened state entry.
pub fn state_entry_name(index: usize) -> &'static str {
    STATE_NAMES.get(index).copied().unwrap_or("?")
}

pub fn input_entry_name(index: usize) -> &'static str {
    INPUT_NAMES.get(index).copied().unwrap_or("?")
}
