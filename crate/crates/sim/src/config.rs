//! Scenario files.
//!
//! One `key = value` pair per line, `#` starts a comment, keys carry a
//! dotted section prefix. Vectors are comma-separated. Unknown and repeated
//! keys are errors, so a typo never silently falls back to a default.
//!
//! ```text
//! # trotting with roll compensation
//! controller.mode = pid_roll
//! gait.step_length = 0.1
//! gait.neutral.FR = 0, 0.07, -0.45
//! sim.lock = pitch, yaw
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use hrom_core::dynamics::AxisLock;
use hrom_core::integrator::So3Projection;
use hrom_core::nalgebra::{DVector, Matrix3, Vector3};
use hrom_core::sim::{ConfigError, ControllerMode, ScenarioConfig};
use hrom_core::{Leg, LEGS};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` is set twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key} = {value}`: expected {expected}")]
    Value { line: usize, key: String, value: String, expected: &'static str },
    #[error(transparent)]
    Invalid(#[from] ConfigError),
}

/// A parsed scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub output_dir: Option<PathBuf>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io { path: path.to_owned(), source })?;
    parse_scenario(&text)
}

/// Parses and validates a scenario. Keys that are absent keep their
/// defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigFileError> {
    let mut scenario = Scenario { config: ScenarioConfig::default(), output_dir: None };
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigFileError::Syntax { line, text: content.to_owned() });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ConfigFileError::Syntax { line, text: content.to_owned() });
        }
        if !seen.insert(key.to_owned()) {
            return Err(ConfigFileError::Duplicate { line, key: key.to_owned() });
        }
        apply(&mut scenario, key, value).map_err(|e| match e {
            Apply::Unknown => ConfigFileError::UnknownKey { line, key: key.to_owned() },
            Apply::Bad(expected) => ConfigFileError::Value { line, key: key.to_owned(), value: value.to_owned(), expected },
        })?;
    }
    scenario.config.validate()?;
    Ok(scenario)
}

enum Apply {
    Unknown,
    Bad(&'static str),
}

fn num(v: &str) -> Result<f64, Apply> {
    v.parse::<f64>().map_err(|_| Apply::Bad("a number"))
}

fn count(v: &str) -> Result<u32, Apply> {
    v.parse::<u32>().map_err(|_| Apply::Bad("a non-negative integer"))
}

fn flag(v: &str) -> Result<bool, Apply> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Apply::Bad("true or false")),
    }
}

fn list(v: &str, n: usize, expected: &'static str) -> Result<Vec<f64>, Apply> {
    let items: Result<Vec<f64>, _> = v.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match items {
        Ok(items) if items.len() == n => Ok(items),
        _ => Err(Apply::Bad(expected)),
    }
}

fn vec3(v: &str) -> Result<Vector3<f64>, Apply> {
    let x = list(v, 3, "three comma-separated numbers")?;
    Ok(Vector3::new(x[0], x[1], x[2]))
}

fn dvec(v: &str, n: usize, expected: &'static str) -> Result<DVector<f64>, Apply> {
    Ok(DVector::from_vec(list(v, n, expected)?))
}

fn lock(v: &str) -> Result<AxisLock, Apply> {
    let mut lock = AxisLock::NONE;
    if v == "none" {
        return Ok(lock);
    }
    for axis in v.split(',').map(str::trim) {
        match axis {
            "roll" => lock.roll = true,
            "pitch" => lock.pitch = true,
            "yaw" => lock.yaw = true,
            _ => return Err(Apply::Bad("`none` or a list of roll, pitch, yaw")),
        }
    }
    Ok(lock)
}

/// `prefix.FR` style keys.
fn leg_key(key: &str, prefix: &str) -> Option<Leg> {
    key.strip_prefix(prefix)?.strip_prefix('.').and_then(Leg::from_label)
}

fn apply(s: &mut Scenario, key: &str, v: &str) -> Result<(), Apply> {
    let c = &mut s.config;
    if let Some(leg) = leg_key(key, "robot.hip") {
        c.robot.hip_offsets[leg.index()] = vec3(v)?;
        return Ok(());
    }
    if let Some(leg) = leg_key(key, "robot.thruster") {
        c.robot.thruster_offsets[leg.index()] = vec3(v)?;
        return Ok(());
    }
    if let Some(leg) = leg_key(key, "gait.neutral") {
        c.gait.neutral_foot[leg.index()] = vec3(v)?;
        return Ok(());
    }
    match key {
        "robot.mass" => c.robot.mass = num(v)?,
        "robot.inertia" => {
            c.robot.inertia = match list(v, 3, "") {
                Ok(d) => Matrix3::from_diagonal(&Vector3::new(d[0], d[1], d[2])),
                Err(_) => Matrix3::from_row_slice(&list(v, 9, "3 diagonal or 9 row-major entries")?),
            }
        }
        "robot.gravity" => c.robot.gravity = vec3(v)?,
        "robot.leg_min" => c.robot.leg_min = num(v)?,
        "robot.leg_max" => c.robot.leg_max = num(v)?,

        "contact.k_gz" => c.contact.k_gz = num(v)?,
        "contact.k_dz" => c.contact.k_dz = num(v)?,
        "contact.mu_c" => c.contact.mu_c = num(v)?,
        "contact.mu_s" => c.contact.mu_s = num(v)?,
        "contact.mu_v" => c.contact.mu_v = num(v)?,
        "contact.v_s" => c.contact.v_s = num(v)?,
        "contact.ground_height" => c.contact.ground_height = num(v)?,

        "gait.step_length" => c.gait.step_length = num(v)?,
        "gait.step_height" => c.gait.step_height = num(v)?,
        "gait.swing_out" => c.gait.swing_out = num(v)?,
        "gait.gait_period" => c.gait.gait_period = num(v)?,
        "gait.num_steps" => c.gait.num_steps = count(v)?,
        "gait.align_finish" => c.gait.align_finish = flag(v)?,
        "gait.neutral" => c.gait.neutral_foot = [vec3(v)?; 4],

        "tracking.kp" => c.tracking.kp = num(v)?,
        "tracking.kd" => c.tracking.kd = num(v)?,
        "tracking.max_angular_accel" => c.tracking.max_angular_accel = num(v)?,
        "tracking.max_linear_accel" => c.tracking.max_linear_accel = num(v)?,

        "controller.mode" => c.mode = ControllerMode::from_label(v).ok_or(Apply::Bad("open_loop, pid_roll or mpc"))?,

        "pid.kp" => c.pid.kp = num(v)?,
        "pid.ki" => c.pid.ki = num(v)?,
        "pid.kd" => c.pid.kd = num(v)?,
        "pid.integral_limit" => c.pid.integral_limit = num(v)?,
        "pid.max_moment" => c.pid.max_moment = num(v)?,

        "mpc.horizon" => c.mpc.horizon = count(v)? as usize,
        "mpc.dt" => c.mpc.dt = num(v)?,
        "mpc.q" => c.mpc.q = dvec(v, 3, "three weights (roll, pitch, yaw)")?,
        "mpc.r" => c.mpc.r = dvec(v, 6, "six weights (f_x .. m_z)")?,
        "mpc.u_min" => c.mpc.u_min = dvec(v, 6, "six bounds (f_x .. m_z)")?,
        "mpc.u_max" => c.mpc.u_max = dvec(v, 6, "six bounds (f_x .. m_z)")?,
        "mpc.h" => c.mpc.h = num(v)?,
        "mpc.tolerance" => c.mpc.tolerance = num(v)?,
        "mpc.max_iterations" => c.mpc.max_iterations = count(v)? as usize,
        "mpc.relinearize_every" => c.mpc.relinearize_every = count(v)? as usize,

        "sim.duration" => c.duration = num(v)?,
        "sim.dt" => c.dt = num(v)?,
        "sim.control_decimation" => c.control_decimation = count(v)?,
        "sim.log_decimation" => c.log_decimation = count(v)?,
        "sim.lock" => c.lock = lock(v)?,
        "sim.so3_projection" => {
            c.so3_projection = match v {
                "polar" => So3Projection::Polar,
                "none" => So3Projection::None,
                _ => return Err(Apply::Bad("polar or none")),
            }
        }
        "sim.foot_clearance" => c.foot_clearance = num(v)?,

        "init.x" => c.initial.position.x = num(v)?,
        "init.y" => c.initial.position.y = num(v)?,
        "init.height" => c.initial.height = Some(num(v)?),
        "init.roll" => c.initial.roll = num(v)?,
        "init.pitch" => c.initial.pitch = num(v)?,
        "init.yaw" => c.initial.yaw = num(v)?,
        "init.velocity" => c.initial.velocity = vec3(v)?,
        "init.angular_velocity" => c.initial.angular_velocity = vec3(v)?,

        "output.dir" => s.output_dir = Some(PathBuf::from(v)),
        _ => return Err(Apply::Unknown),
    }
    Ok(())
}

/// Writes every setting back out in the scenario format. Parsing the result
/// reproduces `scenario` exactly.
pub fn render_scenario(scenario: &Scenario) -> String {
    use std::fmt::Write;
    let c = &scenario.config;
    let mut out = String::new();
    let v3 = |v: &Vector3<f64>| format!("{}, {}, {}", v.x, v.y, v.z);
    let dv = |v: &DVector<f64>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("write to string");

    line("robot.mass", c.robot.mass.to_string());
    let i = c.robot.inertia;
    line("robot.inertia", (0..9).map(|k| i[(k / 3, k % 3)].to_string()).collect::<Vec<_>>().join(", "));
    line("robot.gravity", v3(&c.robot.gravity));
    line("robot.leg_min", c.robot.leg_min.to_string());
    line("robot.leg_max", c.robot.leg_max.to_string());
    for leg in LEGS {
        line(&format!("robot.hip.{}", leg.label()), v3(&c.robot.hip_offsets[leg.index()]));
    }
    for leg in LEGS {
        line(&format!("robot.thruster.{}", leg.label()), v3(&c.robot.thruster_offsets[leg.index()]));
    }
    let k = &c.contact;
    for (name, value) in [
        ("k_gz", k.k_gz),
        ("k_dz", k.k_dz),
        ("mu_c", k.mu_c),
        ("mu_s", k.mu_s),
        ("mu_v", k.mu_v),
        ("v_s", k.v_s),
        ("ground_height", k.ground_height),
    ] {
        line(&format!("contact.{name}"), value.to_string());
    }
    let g = &c.gait;
    line("gait.step_length", g.step_length.to_string());
    line("gait.step_height", g.step_height.to_string());
    line("gait.swing_out", g.swing_out.to_string());
    line("gait.gait_period", g.gait_period.to_string());
    line("gait.num_steps", g.num_steps.to_string());
    line("gait.align_finish", g.align_finish.to_string());
    for leg in LEGS {
        line(&format!("gait.neutral.{}", leg.label()), v3(&g.neutral_foot[leg.index()]));
    }
    let t = &c.tracking;
    line("tracking.kp", t.kp.to_string());
    line("tracking.kd", t.kd.to_string());
    line("tracking.max_angular_accel", t.max_angular_accel.to_string());
    line("tracking.max_linear_accel", t.max_linear_accel.to_string());
    line("controller.mode", c.mode.label().to_owned());
    let p = &c.pid;
    line("pid.kp", p.kp.to_string());
    line("pid.ki", p.ki.to_string());
    line("pid.kd", p.kd.to_string());
    line("pid.integral_limit", p.integral_limit.to_string());
    line("pid.max_moment", p.max_moment.to_string());
    let m = &c.mpc;
    line("mpc.horizon", m.horizon.to_string());
    line("mpc.dt", m.dt.to_string());
    line("mpc.q", dv(&m.q));
    line("mpc.r", dv(&m.r));
    line("mpc.u_min", dv(&m.u_min));
    line("mpc.u_max", dv(&m.u_max));
    line("mpc.h", m.h.to_string());
    line("mpc.tolerance", m.tolerance.to_string());
    line("mpc.max_iterations", m.max_iterations.to_string());
    line("mpc.relinearize_every", m.relinearize_every.to_string());
    line("sim.duration", c.duration.to_string());
    line("sim.dt", c.dt.to_string());
    line("sim.control_decimation", c.control_decimation.to_string());
    line("sim.log_decimation", c.log_decimation.to_string());
    let axes: Vec<&str> = [(c.lock.roll, "roll"), (c.lock.pitch, "pitch"), (c.lock.yaw, "yaw")]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
    line("sim.lock", if axes.is_empty() { "none".to_owned() } else { axes.join(", ") });
    line("sim.so3_projection", if c.so3_projection == So3Projection::Polar { "polar" } else { "none" }.to_owned());
    line("sim.foot_clearance", c.foot_clearance.to_string());
    let init = &c.initial;
    line("init.x", init.position.x.to_string());
    line("init.y", init.position.y.to_string());
    if let Some(h) = init.height {
        line("init.height", h.to_string());
    }
    line("init.roll", init.roll.to_string());
    line("init.pitch", init.pitch.to_string());
    line("init.yaw", init.yaw.to_string());
    line("init.velocity", v3(&init.velocity));
    line("init.angular_velocity", v3(&init.angular_velocity));
    if let Some(dir) = &scenario.output_dir {
        line("output.dir", dir.display().to_string());
    }
    out
}
