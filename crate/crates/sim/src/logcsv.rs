//! CSV log files.
//!
//! One header row, then one row per logged step. Floats are written with 17
//! significant digits so every value reads back bit for bit; flags are 0 or
//! 1. Column order:
//!
//! | columns | content |
//! |---|---|
//! | `time` | s |
//! | `p_x` .. `BL_l_dot` | the 42-entry state |
//! | `roll`, `pitch`, `yaw`, `gimbal_lock` | Z-Y-X Euler angles of `R_B` |
//! | `FR_grf_x` .. `BL_grf_z` | inertial GRF per foot |
//! | `FR_margin` .. `BL_margin` | friction-cone margin (`-inf` when unloaded) |
//! | `f_x` .. `m_z` | commanded body wrench |
//! | `FR_phi_des` .. `BL_l_des` | joint targets |
//! | `FR_foot_x` .. `BL_foot_z` | inertial foot positions |
//! | `FR_contact`, `FR_violation`, `FR_unilateral`, `FR_slip`, .. | per-foot flags |
//! | `gait_loops`, `mpc_warning` | sequencer progress, MPC cap hit |

use std::fs::File;
use std::io::Write;
use std::path::Path;

use hrom_core::gait::leg_forward;
use hrom_core::metrics::MetricSample;
use hrom_core::nalgebra::Vector3;
use hrom_core::sim::{LogRow, SimLog};
use hrom_core::state::{input_entry_name, state_entry_name, WRENCH_DIM};
use hrom_core::{LEGS, STATE_DIM};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("log has no column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}`")]
    Value { row: usize, column: String, value: String },
    #[error("log has no rows")]
    Empty,
}

pub fn header() -> Vec<String> {
    let mut h = vec!["time".to_owned()];
    h.extend((0..STATE_DIM).map(|i| state_entry_name(i).to_owned()));
    h.extend(["roll", "pitch", "yaw", "gimbal_lock"].map(str::to_owned));
    let per_leg = |h: &mut Vec<String>, suffixes: &[&str]| {
        for leg in LEGS {
            for s in suffixes {
                h.push(format!("{}_{s}", leg.label()));
            }
        }
    };
    per_leg(&mut h, &["grf_x", "grf_y", "grf_z"]);
    per_leg(&mut h, &["margin"]);
    h.extend((0..WRENCH_DIM).map(|i| input_entry_name(i).to_owned()));
    per_leg(&mut h, &["phi_des", "gamma_des", "l_des"]);
    per_leg(&mut h, &["foot_x", "foot_y", "foot_z"]);
    per_leg(&mut h, &["contact", "violation", "unilateral", "slip"]);
    h.extend(["gait_loops", "mpc_warning"].map(str::to_owned));
    h
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.to_owned()
}

fn record(row: &LogRow) -> Vec<String> {
    let mut r = vec![float(row.time)];
    r.extend(row.state.to_vector().iter().map(|&x| float(x)));
    r.extend([row.euler.roll, row.euler.pitch, row.euler.yaw].map(float));
    r.push(bit(row.euler.gimbal_lock));
    r.extend(row.grf.iter().flat_map(|f| f.iter().copied()).map(float));
    r.extend(row.margin.map(float));
    r.extend(row.wrench.iter().copied().map(float));
    r.extend(row.joint_targets.iter().flat_map(|q| q.iter().copied()).map(float));
    r.extend(row.feet.iter().flat_map(|p| p.iter().copied()).map(float));
    for i in 0..4 {
        r.extend([row.in_contact[i], row.cone_violation(i), row.unilateral_violation(i), row.slipping(i)].map(bit));
    }
    r.push(row.gait_loops.to_string());
    r.push(bit(row.mpc_warning));
    r
}

pub fn write_log<W: Write>(log: &SimLog, out: W) -> Result<(), LogError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for row in &log.rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_log_file(log: &SimLog, path: &Path) -> Result<(), LogError> {
    write_log(log, std::io::BufWriter::new(File::create(path)?))
}

/// Reads the columns the metrics use back from a log.
pub fn read_samples<R: std::io::Read>(input: R) -> Result<Vec<MetricSample>, LogError> {
    let mut rd = csv::Reader::from_reader(input);
    let names = rd.headers()?.clone();
    let col = |name: &str| names.iter().position(|h| h == name).ok_or_else(|| LogError::MissingColumn(name.to_owned()));
    let leg_cols = |suffix: &str| -> Result<[usize; 4], LogError> {
        let mut out = [0; 4];
        for leg in LEGS {
            out[leg.index()] = col(&format!("{}_{suffix}", leg.label()))?;
        }
        Ok(out)
    };
    let time = col("time")?;
    let pos = [col("p_x")?, col("p_y")?, col("p_z")?];
    let roll = col("roll")?;
    let feet = [leg_cols("foot_x")?, leg_cols("foot_y")?, leg_cols("foot_z")?];
    let joints = [leg_cols("phi")?, leg_cols("gamma")?, leg_cols("l")?];
    let violation = leg_cols("violation")?;
    let unilateral = leg_cols("unilateral")?;
    let slip = leg_cols("slip")?;
    let loops = col("gait_loops")?;
    let warning = col("mpc_warning")?;

    let mut samples = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let rec = rec?;
        let row = k + 1;
        let get = |c: usize| -> Result<f64, LogError> {
            let s = rec.get(c).unwrap_or("");
            s.parse::<f64>().map_err(|_| LogError::Value { row, column: names[c].to_owned(), value: s.to_owned() })
        };
        let flag = |c: usize| -> Result<bool, LogError> { Ok(get(c)? != 0.0) };
        let v3 = |cols: [usize; 3]| -> Result<Vector3<f64>, LogError> { Ok(Vector3::new(get(cols[0])?, get(cols[1])?, get(cols[2])?)) };
        let mut s = MetricSample {
            time: get(time)?,
            position: v3(pos)?,
            roll: get(roll)?,
            feet: [Vector3::zeros(); 4],
            legs: [Vector3::zeros(); 4],
            cone_violation: [false; 4],
            unilateral_violation: [false; 4],
            slipping: [false; 4],
            gait_loops: get(loops)? as u32,
            mpc_warning: flag(warning)?,
        };
        for i in 0..4 {
            s.feet[i] = v3([feet[0][i], feet[1][i], feet[2][i]])?;
            s.legs[i] = leg_forward(&v3([joints[0][i], joints[1][i], joints[2][i]])?);
            s.cone_violation[i] = flag(violation[i])?;
            s.unilateral_violation[i] = flag(unilateral[i])?;
            s.slipping[i] = flag(slip[i])?;
        }
        samples.push(s);
    }
    if samples.is_empty() {
        return Err(LogError::Empty);
    }
    Ok(samples)
}

pub fn read_samples_file(path: &Path) -> Result<Vec<MetricSample>, LogError> {
    read_samples(File::open(path)?)
}
