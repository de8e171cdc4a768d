//! Rigid-body dynamics of the reduced-order model.
//!
//! The legs are massless, so the dynamic block is the single rigid body:
//!
//! ```text
//! m_B v̇_B            = m_B g + R_B f_e + Σ u_gi
//! I_B ω̇_B + ω×I_Bω   = m_e + Σ r_i × (R_Bᵀ u_gi)      r_i = l_hi + l_fi
//! Ṙ_B                = R_B [ω_B]×
//! q̈_L                = u_L
//! ```
//!
//! Ground forces enter through the transpose of each foot Jacobian.

use nalgebra::{Matrix2, Matrix3, Matrix6, SMatrix, Vector2, Vector3, Vector6};
use thiserror::Error;

use crate::contact::{ground_reaction_force, ContactParams, GrfResult};
use crate::params::{Leg, RobotParams, LEGS};
use crate::rotation::{rot_x, rot_y, skew};
use crate::state::{BodyState, ControlInput, LegJointState, RobotState};

/// Generalized velocity dimension: `[v_B (3), ω_B (3), q̇_L (12)]`.
pub const GEN_VEL_DIM: usize = 18;

pub type FootJacobian = SMatrix<f64, 3, GEN_VEL_DIM>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("non-finite state entry {name} (index {index})")]
    NonFiniteState { index: usize, name: &'static str },
    #[error("non-finite input entry {name} (index {index})")]
    NonFiniteInput { index: usize, name: &'static str },
}

/// Body-frame angular axes held fixed by an ideal constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AxisLock {
    pub roll: bool,
    pub pitch: bool,
    pub yaw: bool,
}

impl AxisLock {
    pub const NONE: AxisLock = AxisLock { roll: false, pitch: false, yaw: false };

    fn mask(&self) -> [bool; 3] {
        [self.roll, self.pitch, self.yaw]
    }
}

/// Everything `f(x, u)` depends on besides state and input.
#[derive(Debug, Clone, PartialEq)]
pub struct Hrom {
    pub robot: RobotParams,
    pub contact: ContactParams,
    /// Locked axes keep a constant body rate: the constraint absorbs any
    /// torque about them.
    pub lock: AxisLock,
}

impl Hrom {
    pub fn new(robot: RobotParams, contact: ContactParams) -> Self {
        Self { robot, contact, lock: AxisLock::NONE }
    }
}

/// Body-frame foot offset from the hip, `Ry(φ) Rx(γ) [0, 0, −l]`.
pub fn leg_vector(joint: &LegJointState) -> Vector3<f64> {
    rot_y(joint.phi) * rot_x(joint.gamma) * Vector3::new(0.0, 0.0, -joint.length)
}

/// `∂ leg_vector / ∂ (φ, γ, l)`, columns in that order.
pub fn leg_jacobian(joint: &LegJointState) -> Matrix3<f64> {
    let (sp, cp) = (libm::sin(joint.phi), libm::cos(joint.phi));
    let (sg, cg) = (libm::sin(joint.gamma), libm::cos(joint.gamma));
    let l = joint.length;
    Matrix3::new(
        -l * cg * cp, l * sg * sp, -cg * sp,
        0.0, l * cg, sg,
        l * cg * sp, l * sg * cp, -cg * cp,
    )
}

/// Body-frame vector from the body origin to the foot.
pub fn foot_offset_body(params: &RobotParams, state: &RobotState, leg: Leg) -> Vector3<f64> {
    params.hip_offsets[leg.index()] + leg_vector(&state.legs[leg.index()])
}

/// Inertial foot positions, indexed by [`Leg`].
pub fn forward_kinematics(params: &RobotParams, state: &RobotState) -> [Vector3<f64>; 4] {
    let body = &state.body;
    LEGS.map(|leg| body.position + body.rotation * foot_offset_body(params, state, leg))
}

/// Inertial foot velocities.
pub fn foot_velocities(params: &RobotParams, state: &RobotState) -> [Vector3<f64>; 4] {
    let body = &state.body;
    LEGS.map(|leg| {
        let joint = &state.legs[leg.index()];
        let r = foot_offset_body(params, state, leg);
        let local = body.angular_velocity.cross(&r) + leg_jacobian(joint) * joint.rate();
        body.velocity + body.rotation * local
    })
}

/// Jacobian from generalized velocity `[v_B, ω_B, q̇_L]` to one foot's
/// inertial velocity. Its transpose maps a foot force to generalized forces.
pub fn foot_jacobian(params: &RobotParams, state: &RobotState, leg: Leg) -> FootJacobian {
    let rot = state.body.rotation;
    let r = foot_offset_body(params, state, leg);
    let mut j = FootJacobian::zeros();
    j.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
    j.fixed_view_mut::<3, 3>(0, 3).copy_from(&(-rot * skew(&r)));
    let col = 6 + 3 * leg.index();
    j.fixed_view_mut::<3, 3>(0, col).copy_from(&(rot * leg_jacobian(&state.legs[leg.index()])));
    j
}

/// Manipulator-form terms of the rigid body, on coordinates `[p_B, θ_B]`
/// with body-frame angular rates.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTerms {
    pub mass_matrix: Matrix6<f64>,
    /// Velocity-product vector `[0, ω × I ω]`.
    pub coriolis: Vector6<f64>,
    /// `[−m g, 0]`: moved to the right-hand side it becomes `m g`.
    pub gravity: Vector6<f64>,
}

pub fn dynamics_terms(params: &RobotParams, body: &BodyState) -> DynamicsTerms {
    let mut mass_matrix = Matrix6::zeros();
    mass_matrix.fixed_view_mut::<3, 3>(0, 0).copy_from(&(Matrix3::identity() * params.mass));
    mass_matrix.fixed_view_mut::<3, 3>(3, 3).copy_from(&params.inertia);
    let w = body.angular_velocity;
    let mut coriolis = Vector6::zeros();
    coriolis.fixed_rows_mut::<3>(3).copy_from(&w.cross(&(params.inertia * w)));
    let mut gravity = Vector6::zeros();
    gravity.fixed_rows_mut::<3>(0).copy_from(&(-params.gravity * params.mass));
    DynamicsTerms { mass_matrix, coriolis, gravity }
}

/// `f(x, u)` together with the contact quantities computed along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Time derivative laid out like a state (the rotation field holds `Ṙ_B`).
    pub derivative: RobotState,
    pub feet: [Vector3<f64>; 4],
    pub foot_velocities: [Vector3<f64>; 4],
    pub grf: [GrfResult; 4],
}

pub fn evaluate(model: &Hrom, state: &RobotState, input: &ControlInput) -> Result<Evaluation, DynamicsError> {
    if let Some((index, name)) = state.first_non_finite() {
        return Err(DynamicsError::NonFiniteState { index, name });
    }
    if let Some((index, name)) = input.first_non_finite() {
        return Err(DynamicsError::NonFiniteInput { index, name });
    }
    let params = &model.robot;
    let body = &state.body;
    let rot = body.rotation;

    let feet = forward_kinematics(params, state);
    let foot_vel = foot_velocities(params, state);
    let grf = core::array::from_fn(|i| ground_reaction_force(&model.contact, &feet[i], &foot_vel[i]));

    // Σ B_giᵀ u_gi + u_e, restricted to the rigid-body rows (the leg rows
    // are absorbed by the massless, acceleration-driven legs).
    let mut force = rot * input.force();
    let mut torque = input.moment();
    for leg in LEGS {
        let f = grf[leg.index()].force;
        force += f;
        torque += foot_offset_body(params, state, leg).cross(&(rot.transpose() * f));
    }

    let terms = dynamics_terms(params, body);
    // Equivalent to (Q − G)/m, written so free fall is exactly g.
    let lin_accel = force / params.mass + params.gravity;
    let rhs = torque - terms.coriolis.fixed_rows::<3>(3);
    let ang_accel = constrained_angular_accel(&params.inertia, &rhs, model.lock);

    let legs = core::array::from_fn(|i| {
        let j = &state.legs[i];
        let a = input.joint_accel[i];
        LegJointState {
            phi: j.phi_dot,
            gamma: j.gamma_dot,
            length: j.length_dot,
            phi_dot: a.x,
            gamma_dot: a.y,
            length_dot: a.z,
        }
    });
    let derivative = RobotState {
        body: BodyState {
            position: body.velocity,
            rotation: rot * skew(&body.angular_velocity),
            velocity: lin_accel,
            angular_velocity: ang_accel,
        },
        legs,
    };
    Ok(Evaluation { derivative, feet, foot_velocities: foot_vel, grf })
}

/// Continuous-time state derivative `ẋ = f(x, u)`.
pub fn state_derivative(model: &Hrom, state: &RobotState, input: &ControlInput) -> Result<RobotState, DynamicsError> {
    evaluate(model, state, input).map(|e| e.derivative)
}

/// Solves `I ω̇ = rhs + λ` with `ω̇ = 0` and `λ` confined to the locked axes.
fn constrained_angular_accel(inertia: &Matrix3<f64>, rhs: &Vector3<f64>, lock: AxisLock) -> Vector3<f64> {
    let mask = lock.mask();
    let mut free = [0usize; 3];
    let mut n = 0;
    for (axis, locked) in mask.iter().enumerate() {
        if !locked {
            free[n] = axis;
            n += 1;
        }
    }
    let mut out = Vector3::zeros();
    match free[..n] {
        [] => {}
        [a] => out[a] = rhs[a] / inertia[(a, a)],
        [a, b] => {
            let m = Matrix2::new(inertia[(a, a)], inertia[(a, b)], inertia[(b, a)], inertia[(b, b)]);
            if let Some(inv) = m.try_inverse() {
                let s = inv * Vector2::new(rhs[a], rhs[b]);
                out[a] = s.x;
                out[b] = s.y;
            }
        }
        _ => {
            if let Some(inv) = inertia.try_inverse() {
                out = inv * rhs;
            }
        }
    }
    out
}

/// Kinetic plus potential energy, `½m|v|² + ½ωᵀIω − m pᵀg`.
pub fn mechanical_energy(params: &RobotParams, body: &BodyState) -> f64 {
    let w = body.angular_velocity;
    0.5 * params.mass * body.velocity.norm_squared() + 0.5 * w.dot(&(params.inertia * w))
        - params.mass * body.position.dot(&params.gravity)
}

/// Angular momentum about the body origin in the inertial frame, `R I ω`.
pub fn angular_momentum(params: &RobotParams, body: &BodyState) -> Vector3<f64> {
    body.rotation * (params.inertia * body.angular_velocity)
}
