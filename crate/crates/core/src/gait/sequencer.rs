//! The sequence manager.
//!
//! It keeps the last commanded foot positions as memory. The active block's
//! curves are emitted with the offset between that memory and the curve's
//! first control point faded out linearly over the block, so a block that
//! does not start where the feet are (the first block after standing, a
//! hand-written matrix) still produces a continuous target. For chained
//! blocks the offset is zero and the curves are emitted verbatim.

use nalgebra::Vector3;

use super::{GaitSchedule, TrajectoryBlock};

/// Boundary snapping tolerance for the accumulated timing parameter.
const S_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SequencerState {
    pub stage: usize,
    pub block: usize,
    /// Completed loops of the current stage.
    pub loops_done: u32,
    /// Timing parameter within the active block, in `[0, 1]`.
    pub s: f64,
    /// Foot targets latched at the start of the active block.
    pub memory: [Vector3<f64>; 4],
    pub finished: bool,
    /// Completed loops over all stages.
    pub total_loops: u32,
    pub blocks_completed: u32,
}

impl SequencerState {
    pub fn new(initial_feet: [Vector3<f64>; 4]) -> Self {
        Self { stage: 0, block: 0, loops_done: 0, s: 0.0, memory: initial_feet, finished: false, total_loops: 0, blocks_completed: 0 }
    }

    fn active<'a>(&self, schedule: &'a GaitSchedule) -> Option<&'a TrajectoryBlock> {
        schedule.stages.get(self.stage).and_then(|seq| seq.blocks().get(self.block))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequencerOutput {
    /// Hip-frame foot targets, indexed by leg.
    pub targets: [Vector3<f64>; 4],
    /// Time derivative of the targets.
    pub velocities: [Vector3<f64>; 4],
    /// Set on the step that completed a block: the block's end positions.
    pub latched: Option<[Vector3<f64>; 4]>,
    pub finished: bool,
}

fn emit(block: &TrajectoryBlock, memory: &[Vector3<f64>; 4], s: f64) -> ([Vector3<f64>; 4], [Vector3<f64>; 4]) {
    let s = s.clamp(0.0, 1.0);
    let rate = 1.0 / block.duration();
    let mut pos = [Vector3::zeros(); 4];
    let mut vel = [Vector3::zeros(); 4];
    for (i, curve) in block.curves().iter().enumerate() {
        let offset = memory[i] - curve.first();
        // s is clamped to [0, 1], so evaluation cannot fail.
        pos[i] = curve.eval(s).unwrap_or_else(|_| curve.last()) + offset * (1.0 - s);
        vel[i] = (curve.derivative(s).unwrap_or_else(|_| Vector3::zeros()) - offset) * rate;
    }
    (pos, vel)
}

/// Advances the schedule by `dt` and returns the foot targets at the new
/// time together with the updated state.
pub fn sequencer_step(schedule: &GaitSchedule, state: &SequencerState, dt: f64) -> (SequencerOutput, SequencerState) {
    let mut next = state.clone();
    let hold = |st: &SequencerState, latched| SequencerOutput {
        targets: st.memory,
        velocities: [Vector3::zeros(); 4],
        latched,
        finished: true,
    };
    if state.finished {
        return (hold(&next, None), next);
    }
    let Some(block) = state.active(schedule) else {
        next.finished = true;
        return (hold(&next, None), next);
    };

    let s = state.s + dt / block.duration();
    if s < 1.0 - S_EPS {
        next.s = s;
        let (targets, velocities) = emit(block, &state.memory, s);
        return (SequencerOutput { targets, velocities, latched: None, finished: false }, next);
    }

    // Block complete: latch its end positions and move on.
    let (end, _) = emit(block, &state.memory, 1.0);
    next.memory = end;
    next.blocks_completed += 1;
    let overshoot = (s - 1.0).max(0.0) * block.duration();
    next.block += 1;
    let stage_len = schedule.stages[state.stage].blocks().len();
    if next.block == stage_len {
        next.block = 0;
        next.loops_done += 1;
        next.total_loops += 1;
        if next.loops_done == schedule.stages[state.stage].loop_count() {
            next.loops_done = 0;
            next.stage += 1;
        }
    }
    match next.active(schedule) {
        None => {
            next.finished = true;
            next.s = 1.0;
            (hold(&next, Some(end)), next)
        }
        Some(new_block) => {
            next.s = (overshoot / new_block.duration()).min(1.0);
            let (targets, velocities) = emit(new_block, &next.memory, next.s);
            (SequencerOutput { targets, velocities, latched: Some(end), finished: false }, next)
        }
    }
}
