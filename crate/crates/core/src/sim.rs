//! The closed simulation loop.
//!
//! Every `control_decimation` dynamics steps the gait sequencer, leg IK,
//! joint tracking and the selected wrench controller run once and their
//! outputs are held. Every dynamics step is one RK4 step of the full model
//! followed by the rotation projection.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DVector, Vector3, Vector6};
use thiserror::Error;

use crate::contact::{ConeStatus, ContactParams};
use crate::dynamics::{evaluate, leg_vector, AxisLock, Hrom};
use crate::gait::{
    build_trot_schedule, foot_rate_to_joint_rate, inverse_kinematics, joint_tracking_accel, sequencer_step, GaitParams, LegWorkspace,
    SequencerState, TrackingGains,
};
use crate::integrator::{step_robot, IntegratorConfig, So3Projection};
use crate::linmpc::{linearize_hrom, solve_mpc, LinearModel, MpcConfig};
use crate::params::{RobotParams, LEGS};
use crate::pid::{pid_roll_wrench, PidGains, PidState, ThrusterGeometry};
use crate::rotation::{euler_angles_from_rotation, rotation_from_euler, EulerAngles};
use crate::state::{BodyState, ControlInput, LegJointState, RobotState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ControllerMode {
    #[default]
    OpenLoop,
    PidRoll,
    Mpc,
}

impl ControllerMode {
    pub fn label(&self) -> &'static str {
        match self {
            ControllerMode::OpenLoop => "open_loop",
            ControllerMode::PidRoll => "pid_roll",
            ControllerMode::Mpc => "mpc",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "open_loop" => Some(ControllerMode::OpenLoop),
            "pid_roll" => Some(ControllerMode::PidRoll),
            "mpc" => Some(ControllerMode::Mpc),
            _ => None,
        }
    }
}

/// Initial body pose and rates. Legs start at the neutral foot positions
/// with zero joint rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    /// Horizontal start position; only `x` and `y` are used.
    pub position: Vector3<f64>,
    /// Body height. `None` places the lowest foot exactly on the ground.
    pub height: Option<f64>,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    /// Inertial-frame linear velocity.
    pub velocity: Vector3<f64>,
    /// Body-frame angular velocity.
    pub angular_velocity: Vector3<f64>,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            position: Vector3::zeros(),
            height: None,
            roll: 0.0,
            pitch: 0.0,
            yaw: 0.0,
            velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub robot: RobotParams,
    pub contact: ContactParams,
    pub gait: GaitParams,
    pub tracking: TrackingGains,
    pub mode: ControllerMode,
    pub pid: PidGains,
    pub mpc: MpcConfig,
    pub duration: f64,
    pub dt: f64,
    pub control_decimation: u32,
    pub log_decimation: u32,
    pub lock: AxisLock,
    pub so3_projection: So3Projection,
    pub initial: InitialState,
    /// Minimum allowed distance between any two feet.
    pub foot_clearance: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            robot: RobotParams::default(),
            contact: ContactParams::default(),
            gait: GaitParams::default(),
            tracking: TrackingGains::default(),
            mode: ControllerMode::OpenLoop,
            pid: PidGains::default(),
            mpc: MpcConfig::default(),
            duration: 10.0,
            dt: 1e-3,
            control_decimation: 10,
            log_decimation: 1,
            lock: AxisLock::NONE,
            so3_projection: So3Projection::Polar,
            initial: InitialState::default(),
            foot_clearance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("robot: {0}")]
    Robot(#[from] crate::params::ParamsError),
    #[error("contact: {0}")]
    Contact(#[from] crate::contact::ContactParamsError),
    #[error("gait: {0}")]
    Gait(#[from] crate::gait::GaitError),
    #[error("pid: {0}")]
    Pid(#[from] crate::pid::PidError),
    #[error("mpc: {0}")]
    Mpc(#[from] crate::linmpc::MpcError),
    #[error("invalid setting {name} = {value}")]
    Setting { name: &'static str, value: f64 },
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.robot.validate()?;
        self.contact.validate()?;
        self.gait.validate()?;
        self.pid.validate()?;
        self.mpc.validate()?;
        if !self.mpc.is_hrom_sized() {
            return Err(ConfigError::Setting { name: "mpc.r length", value: self.mpc.r.len() as f64 });
        }
        let bad = |name, value: f64| Err(ConfigError::Setting { name, value });
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration", self.duration);
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt);
        }
        if self.control_decimation == 0 {
            return bad("control_decimation", 0.0);
        }
        if self.log_decimation == 0 {
            return bad("log_decimation", 0.0);
        }
        if !(self.foot_clearance >= 0.0) {
            return bad("foot_clearance", self.foot_clearance);
        }
        Ok(())
    }

    /// Number of dynamics steps covering `duration`.
    pub fn step_count(&self) -> usize {
        let n = self.duration / self.dt;
        // Absorb roundoff such as 0.01 / 1e-3 = 9.999999999999998.
        libm::ceil(n - 1e-9) as usize
    }

    pub fn control_period(&self) -> f64 {
        self.dt * self.control_decimation as f64
    }

    pub fn model(&self) -> Hrom {
        Hrom { robot: self.robot.clone(), contact: self.contact, lock: self.lock }
    }
}

/// Which part of the loop failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Kinematics,
    Controller,
    Dynamics,
    Integrator,
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Subsystem::Kinematics => "inverse kinematics",
            Subsystem::Controller => "controller",
            Subsystem::Dynamics => "dynamics",
            Subsystem::Integrator => "integrator",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{subsystem} failed at step {step} (t = {time:.6} s): {message}")]
    Runtime { step: usize, time: f64, subsystem: Subsystem, message: String },
}

/// One logged dynamics step: the state at `time`, the input held over the
/// following step and the contact quantities at that state.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub time: f64,
    pub state: RobotState,
    pub euler: EulerAngles,
    /// Inertial-frame GRF per foot.
    pub grf: [Vector3<f64>; 4],
    pub margin: [f64; 4],
    pub status: [ConeStatus; 4],
    pub in_contact: [bool; 4],
    pub wrench: Vector6<f64>,
    /// Joint targets `[phi, gamma, l]` per leg.
    pub joint_targets: [Vector3<f64>; 4],
    /// Inertial-frame foot positions.
    pub feet: [Vector3<f64>; 4],
    /// Completed gait loops.
    pub gait_loops: u32,
    /// The MPC solve that produced `wrench` hit its iteration cap.
    pub mpc_warning: bool,
}

impl LogRow {
    /// In contact and outside the friction cone.
    pub fn cone_violation(&self, leg: usize) -> bool {
        self.in_contact[leg] && self.status[leg] == ConeStatus::Outside
    }

    /// In contact with a normal force of zero (the ground would have to pull).
    pub fn unilateral_violation(&self, leg: usize) -> bool {
        self.in_contact[leg] && self.status[leg] == ConeStatus::Unilateral
    }

    /// Foot loaded and sliding beyond the cone.
    pub fn slipping(&self, leg: usize) -> bool {
        self.cone_violation(leg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    pub rows: Vec<LogRow>,
    /// Time between rows.
    pub sample_period: f64,
    pub final_state: RobotState,
    pub steps: usize,
    pub mpc_solves: u32,
    pub mpc_warnings: u32,
}

/// Legs at the neutral feet, body rotated by the initial Euler angles and
/// lowered until the lowest foot touches the ground (or at `height` if set).
pub fn initial_state(config: &ScenarioConfig) -> Result<RobotState, ConfigError> {
    let ws = LegWorkspace::from(&config.robot);
    let mut legs = [LegJointState::at_rest(0.0, 0.0, 0.0); 4];
    for leg in LEGS {
        let q = inverse_kinematics(&config.gait.neutral_foot[leg.index()], &ws)?;
        legs[leg.index()] = LegJointState::at_rest(q.x, q.y, q.z);
    }
    let init = &config.initial;
    let rotation = rotation_from_euler(init.roll, init.pitch, init.yaw);
    let height = init.height.unwrap_or_else(|| {
        let lowest = LEGS
            .iter()
            .map(|l| (rotation * (config.robot.hip_offsets[l.index()] + leg_vector(&legs[l.index()]))).z)
            .fold(f64::INFINITY, f64::min);
        config.contact.ground_height - lowest
    });
    let body = BodyState {
        position: Vector3::new(init.position.x, init.position.y, height),
        rotation,
        velocity: init.velocity,
        angular_velocity: init.angular_velocity,
    };
    Ok(RobotState { body, legs })
}

struct Controller {
    pid: PidState,
    geometry: ThrusterGeometry,
    linear: Option<LinearModel>,
    control_steps: usize,
    yaw_ref: f64,
}

pub fn run_simulation(config: &ScenarioConfig) -> Result<SimLog, SimError> {
    config.validate()?;
    let model = config.model();
    let integrator = IntegratorConfig { dt: config.dt, so3_projection: config.so3_projection };
    let ws = LegWorkspace::from(&config.robot);
    let schedule = build_trot_schedule(&config.gait, &ws).map_err(ConfigError::from)?;
    let mut state = initial_state(config)?;
    let mut sequencer = SequencerState::new(config.gait.neutral_foot);
    let control_dt = config.control_period();
    let steps = config.step_count();

    let mut ctl = Controller {
        pid: PidState::default(),
        geometry: ThrusterGeometry::from(&config.robot),
        linear: None,
        control_steps: 0,
        yaw_ref: config.initial.yaw,
    };
    let mut input = ControlInput::default();
    let mut joint_targets = [Vector3::zeros(); 4];
    let mut mpc_warning = false;
    let (mut mpc_solves, mut mpc_warnings) = (0u32, 0u32);
    let mut rows = Vec::with_capacity(steps / config.log_decimation as usize + 1);

    for k in 0..steps {
        let time = k as f64 * config.dt;
        let fail = |subsystem, message: String| SimError::Runtime { step: k, time, subsystem, message };

        if k % config.control_decimation as usize == 0 {
            let (out, next) = sequencer_step(&schedule, &sequencer, control_dt);
            sequencer = next;
            let mut qd_des = [Vector3::zeros(); 4];
            for i in 0..4 {
                joint_targets[i] = inverse_kinematics(&out.targets[i], &ws)
                    .map_err(|e| fail(Subsystem::Kinematics, format!("{}: {e}", LEGS[i].label())))?;
                qd_des[i] = foot_rate_to_joint_rate(&joint_targets[i], &out.velocities[i]).unwrap_or_else(Vector3::zeros);
            }
            let q = state.legs.map(|l| l.position());
            let qd = state.legs.map(|l| l.rate());
            input.joint_accel = joint_tracking_accel(&joint_targets, &qd_des, &[Vector3::zeros(); 4], &q, &qd, &config.tracking);

            let euler = euler_angles_from_rotation(&state.body.rotation);
            mpc_warning = false;
            input.wrench = match config.mode {
                ControllerMode::OpenLoop => Vector6::zeros(),
                ControllerMode::PidRoll => {
                    let (out, next) = pid_roll_wrench(-euler.roll, control_dt, &ctl.pid, &config.pid, &ctl.geometry)
                        .map_err(|e| fail(Subsystem::Controller, format!("{e}")))?;
                    ctl.pid = next;
                    out.wrench
                }
                ControllerMode::Mpc => {
                    let x = DVector::from_column_slice(&state.to_vector());
                    if ctl.linear.is_none() || ctl.control_steps.is_multiple_of(config.mpc.relinearize_every) {
                        let op = ControlInput { wrench: Vector6::zeros(), joint_accel: input.joint_accel };
                        let lin = linearize_hrom(&model, &state, &op, config.mpc.h).map_err(|e| {
                            let name = match &e {
                                crate::linmpc::LinearizeError::Evaluation { coordinate, .. }
                                | crate::linmpc::LinearizeError::NonFinite { coordinate } => coordinate.hrom_name(),
                                _ => "",
                            };
                            fail(Subsystem::Controller, format!("linearization ({name}): {e}"))
                        })?;
                        ctl.linear = Some(lin);
                    }
                    let lin = ctl.linear.as_ref().expect("linearized above");
                    let reference = vec![DVector::from_column_slice(&[0.0, 0.0, ctl.yaw_ref]); config.mpc.horizon];
                    let sol = solve_mpc(&x, &reference, lin, &config.mpc).map_err(|e| fail(Subsystem::Controller, format!("{e}")))?;
                    mpc_solves += 1;
                    if !sol.converged {
                        mpc_warning = true;
                        mpc_warnings += 1;
                    }
                    Vector6::from_iterator(sol.u_e.iter().copied())
                }
            };
            ctl.control_steps += 1;
        }

        if k % config.log_decimation as usize == 0 {
            let eval = evaluate(&model, &state, &input).map_err(|e| fail(Subsystem::Dynamics, format!("{e}")))?;
            rows.push(LogRow {
                time,
                state,
                euler: euler_angles_from_rotation(&state.body.rotation),
                grf: eval.grf.map(|g| g.force),
                margin: eval.grf.map(|g| g.cone.margin),
                status: eval.grf.map(|g| g.cone.status),
                in_contact: eval.grf.map(|g| g.in_contact),
                wrench: input.wrench,
                joint_targets,
                feet: eval.feet,
                gait_loops: sequencer.total_loops,
                mpc_warning,
            });
        }

        state = step_robot(&model, &state, &input, &integrator).map_err(|e| fail(Subsystem::Integrator, format!("{e}")))?;
    }

    Ok(SimLog {
        rows,
        sample_period: config.dt * config.log_decimation as f64,
        final_state: state,
        steps,
        mpc_solves,
        mpc_warnings,
    })
}
