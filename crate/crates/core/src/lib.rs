//! Reduced-order quadruped workbench.
//!
//! The model is a single rigid body carrying four massless spherical-joint
//! legs of variable length. Legs are driven kinematically through joint
//! accelerations, feet interact with a compliant ground under Stribeck
//! friction, and an external body wrench stands in for the thrusters.
//!
//! Everything in this crate is a pure function of its inputs and builds
//! without `std` (an allocator is required for the dynamic matrices used by
//! the linearizer and the MPC).
//!
//! Module map:
//!
//! - [`rotation`], [`state`], [`params`], [`dynamics`]: the state layout and
//!   continuous-time state derivative
//! - [`contact`]: ground reaction forces and friction-cone checks
//! - [`gait`]: Bézier curves, trot construction, the sequence manager, leg IK
//!   and joint tracking
//! - [`linmpc`]: numerical linearization, discretization and the
//!   box-constrained MPC
//! - [`integrator`]: RK4 with rotation re-orthonormalization
//! - [`pid`], [`sim`], [`metrics`]: the closed simulation loop and its summary

#![cfg_attr(not(test), no_std)]
// Negated comparisons reject NaN settings along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod contact;
pub mod dynamics;
pub mod gait;
pub mod integrator;
pub mod linmpc;
pub mod metrics;
pub mod params;
pub mod pid;
pub mod rotation;
pub mod sim;
pub mod state;

pub use nalgebra;
pub use nalgebra::{Matrix3, Vector3};

pub use contact::{friction_cone_margin, ground_reaction_force, ConeCheck, ContactParams, GrfResult};
pub use dynamics::{state_derivative, DynamicsError, Hrom};
pub use params::{Leg, RobotParams, LEGS};
pub use state::{BodyState, ControlInput, LegJointState, RobotState, STATE_DIM};
