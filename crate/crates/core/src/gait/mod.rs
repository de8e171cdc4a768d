//! Foot trajectory generation and scheduling.
//!
//! A leg's motion over one block is a Bézier curve of foot positions in that
//! leg's hip frame (origin at the hip joint, axes parallel to the body
//! frame). Four curves with a common control-point count form a
//! [`TrajectoryBlock`], conceptually a 12×n matrix. Blocks are stacked into a
//! [`SequenceBlock`] (12k×n) that repeats `loop_count` times, and a
//! [`GaitSchedule`] runs sequences back to back. The sequence manager walks
//! the schedule, the IK turns foot targets into joint targets, and the
//! tracking law turns joint errors into joint accelerations.

mod bezier;
mod ik;
mod sequencer;
mod tracking;
mod trot;

use alloc::vec::Vec;

use nalgebra::Vector3;
use thiserror::Error;

pub use bezier::BezierCurve;
pub use ik::{foot_rate_to_joint_rate, inverse_kinematics, leg_forward, LegWorkspace};
pub use sequencer::{sequencer_step, SequencerOutput, SequencerState};
pub use tracking::{joint_tracking_accel, TrackingGains};
pub use trot::{build_trot_schedule, build_trot_sequence, swing_curve, stance_curve, GaitParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaitError {
    #[error("a Bézier curve needs at least 2 control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("non-finite control point")]
    NonFiniteControlPoint,
    #[error("curve parameter s = {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("trajectory block curves disagree on control-point count ({0} vs {1})")]
    PointCountMismatch(usize, usize),
    #[error("block duration must be positive, got {0}")]
    Duration(f64),
    #[error("a sequence needs at least one block and a loop count of at least one")]
    EmptySequence,
    #[error("foot target at distance {length:.4} m is outside the leg workspace [{min}, {max}]")]
    Workspace { length: f64, min: f64, max: f64 },
    #[error("{leg} trajectory leaves the leg workspace at s = {s:.3} (length {length:.4} m, allowed [{min}, {max}])")]
    TrajectoryWorkspace { leg: &'static str, s: f64, length: f64, min: f64, max: f64 },
    #[error("foot target on the hip's lateral axis: gamma = {gamma} leaves phi undefined")]
    DegenerateLeg { gamma: f64 },
    #[error("invalid gait parameter {name} = {value}")]
    Parameter { name: &'static str, value: f64 },
}

/// Four leg curves over a common duration, indexed by [`crate::Leg`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBlock {
    curves: [BezierCurve; 4],
    duration: f64,
}

impl TrajectoryBlock {
    pub fn new(curves: [BezierCurve; 4], duration: f64) -> Result<Self, GaitError> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(GaitError::Duration(duration));
        }
        let n = curves[0].control_points().len();
        if let Some(c) = curves.iter().find(|c| c.control_points().len() != n) {
            return Err(GaitError::PointCountMismatch(n, c.control_points().len()));
        }
        Ok(Self { curves, duration })
    }

    pub fn curves(&self) -> &[BezierCurve; 4] {
        &self.curves
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn point_count(&self) -> usize {
        self.curves[0].control_points().len()
    }

    /// Row-major 12×n view: rows FR-x, FR-y, FR-z, BR-x, ...
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        let mut rows = Vec::with_capacity(12);
        for curve in &self.curves {
            for axis in 0..3 {
                rows.push(curve.control_points().iter().map(|p| p[axis]).collect());
            }
        }
        rows
    }

    /// Inverse of [`TrajectoryBlock::to_rows`].
    pub fn from_rows(rows: &[Vec<f64>], duration: f64) -> Result<Self, GaitError> {
        if rows.len() != 12 {
            return Err(GaitError::PointCountMismatch(12, rows.len()));
        }
        let n = rows[0].len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(GaitError::PointCountMismatch(n, r.len()));
        }
        let curve = |leg: usize| {
            let pts = (0..n).map(|j| Vector3::new(rows[3 * leg][j], rows[3 * leg + 1][j], rows[3 * leg + 2][j])).collect();
            BezierCurve::new(pts)
        };
        Self::new([curve(0)?, curve(1)?, curve(2)?, curve(3)?], duration)
    }
}

/// `k` stacked blocks played `loop_count` times.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceBlock {
    blocks: Vec<TrajectoryBlock>,
    loop_count: u32,
}

impl SequenceBlock {
    pub fn new(blocks: Vec<TrajectoryBlock>, loop_count: u32) -> Result<Self, GaitError> {
        if blocks.is_empty() || loop_count == 0 {
            return Err(GaitError::EmptySequence);
        }
        Ok(Self { blocks, loop_count })
    }

    pub fn blocks(&self) -> &[TrajectoryBlock] {
        &self.blocks
    }

    pub fn loop_count(&self) -> u32 {
        self.loop_count
    }

    /// Total scheduled time of all loops.
    pub fn duration(&self) -> f64 {
        self.blocks.iter().map(TrajectoryBlock::duration).sum::<f64>() * self.loop_count as f64
    }
}

/// Sequences executed back to back. An empty schedule holds the feet still.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaitSchedule {
    pub stages: Vec<SequenceBlock>,
}

impl From<SequenceBlock> for GaitSchedule {
    fn from(seq: SequenceBlock) -> Self {
        Self { stages: alloc::vec![seq] }
    }
}
