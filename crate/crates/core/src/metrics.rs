//! Scalar summaries of a simulation log.
//!
//! Metrics work on [`MetricSample`]s so that a log read back from disk gives
//! the same summary as the in-memory one.

use alloc::vec::Vec;

use nalgebra::Vector3;

use crate::dynamics::leg_vector;
use crate::sim::{LogRow, SimLog};

/// The per-row quantities the metrics need.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSample {
    pub time: f64,
    pub position: Vector3<f64>,
    pub roll: f64,
    /// Inertial-frame foot positions.
    pub feet: [Vector3<f64>; 4],
    /// Hip-frame foot positions reached by the legs.
    pub legs: [Vector3<f64>; 4],
    pub cone_violation: [bool; 4],
    pub unilateral_violation: [bool; 4],
    pub slipping: [bool; 4],
    pub gait_loops: u32,
    pub mpc_warning: bool,
}

impl From<&LogRow> for MetricSample {
    fn from(row: &LogRow) -> Self {
        Self {
            time: row.time,
            position: row.state.body.position,
            roll: row.euler.roll,
            feet: row.feet,
            legs: row.state.legs.map(|l| leg_vector(&l)),
            cone_violation: core::array::from_fn(|i| row.cone_violation(i)),
            unilateral_violation: core::array::from_fn(|i| row.unilateral_violation(i)),
            slipping: core::array::from_fn(|i| row.slipping(i)),
            gait_loops: row.gait_loops,
            mpc_warning: row.mpc_warning,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub samples: usize,
    pub duration: f64,
    /// Final minus initial body x.
    pub forward_displacement: f64,
    pub lateral_displacement: f64,
    pub roll_rms: f64,
    pub roll_max: f64,
    /// Foot-samples in contact outside the friction cone.
    pub cone_violations: usize,
    /// Foot-samples in contact with zero normal force.
    pub unilateral_violations: usize,
    /// Horizontal foot travel while slipping, per foot.
    pub slip: [f64; 4],
    pub gait_cycles: u32,
    /// Smallest distance between any two feet over the run.
    pub min_foot_separation: f64,
    /// Largest hip-frame lateral deviation of each foot from its start.
    pub lateral_excursion: [f64; 4],
    pub mpc_warnings: usize,
}

pub fn compute_metrics(samples: &[MetricSample]) -> Option<Metrics> {
    let first = samples.first()?;
    let last = samples.last()?;
    let n = samples.len() as f64;
    let roll_rms = libm::sqrt(samples.iter().map(|s| s.roll * s.roll).sum::<f64>() / n);
    let roll_max = samples.iter().map(|s| s.roll.abs()).fold(0.0, f64::max);
    let count = |f: fn(&MetricSample) -> [bool; 4]| samples.iter().map(|s| f(s).iter().filter(|&&b| b).count()).sum();

    let mut slip = [0.0; 4];
    for w in samples.windows(2) {
        for (i, total) in slip.iter_mut().enumerate() {
            if w[0].slipping[i] {
                let d = w[1].feet[i] - w[0].feet[i];
                *total += libm::hypot(d.x, d.y);
            }
        }
    }

    let mut min_sep = f64::INFINITY;
    for s in samples {
        for i in 0..4 {
            for j in i + 1..4 {
                min_sep = min_sep.min((s.feet[i] - s.feet[j]).norm());
            }
        }
    }

    let lateral_excursion =
        core::array::from_fn(|i| samples.iter().map(|s| (s.legs[i].y - first.legs[i].y).abs()).fold(0.0, f64::max));

    Some(Metrics {
        samples: samples.len(),
        duration: last.time - first.time,
        forward_displacement: last.position.x - first.position.x,
        lateral_displacement: last.position.y - first.position.y,
        roll_rms,
        roll_max,
        cone_violations: count(|s| s.cone_violation),
        unilateral_violations: count(|s| s.unilateral_violation),
        slip,
        gait_cycles: last.gait_loops,
        min_foot_separation: min_sep,
        lateral_excursion,
        mpc_warnings: samples.iter().filter(|s| s.mpc_warning).count(),
    })
}

impl SimLog {
    pub fn samples(&self) -> Vec<MetricSample> {
        self.rows.iter().map(MetricSample::from).collect()
    }

    pub fn metrics(&self) -> Option<Metrics> {
        compute_metrics(&self.samples())
    }
}
