//! Diagonal-pair trot built from five-point Bézier curves.
//!
//! Per leg and block, in the hip frame relative to the neutral foot `n`:
//!
//! ```text
//! swing   n + (−L/2, 0, 0)   n + (−3L/4, 0, 0)   n + (0, 8/3·σ·w, 8/3·h)   n + (3L/4, 0, 0)   n + (L/2, 0, 0)
//! stance  n + ( L/2, 0, 0)   n + (  L/4, 0, 0)   n                         n + (−L/4, 0, 0)   n + (−L/2, 0, 0)
//! ```
//!
//! `L` is the step length, `h` the step height, `w` the swing-out distance and
//! `σ` the leg's outward lateral sign. With the middle point alone lifted,
//! height and lateral offset follow `16 s²(1−s)²`, peaking at exactly `h`
//! and `w` at mid-swing with zero vertical velocity at lift-off and
//! touchdown. The swing end tangents are `−L` per block, matching the stance
//! drag speed, so the foot leaves and meets the ground at rest in the world.

use alloc::vec;

use nalgebra::Vector3;

use super::{BezierCurve, GaitError, GaitSchedule, LegWorkspace, SequenceBlock, TrajectoryBlock};
use crate::params::{Leg, LEGS};

const LIFT_WEIGHT: f64 = 8.0 / 3.0;
const WORKSPACE_SAMPLES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GaitParams {
    pub step_length: f64,
    pub step_height: f64,
    /// Outward lateral excursion at mid-swing (0 for the normal gait).
    pub swing_out: f64,
    /// Duration of one block (one swing of one diagonal pair).
    pub gait_period: f64,
    /// Number of full cycles (two blocks each). Zero means stand still.
    pub num_steps: u32,
    /// Neutral foot position per leg, hip frame.
    pub neutral_foot: [Vector3<f64>; 4],
    /// Append a half-step block that brings every foot back to neutral.
    pub align_finish: bool,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            step_length: 0.1,
            step_height: 0.1,
            swing_out: 0.0,
            gait_period: 0.5,
            num_steps: 10,
            neutral_foot: [Vector3::new(0.0, 0.0, -0.45); 4],
            align_finish: false,
        }
    }
}

impl GaitParams {
    pub fn validate(&self) -> Result<(), GaitError> {
        let bad = |name, value| Err(GaitError::Parameter { name, value });
        if !(self.step_height > 0.0 && self.step_height.is_finite()) {
            return bad("step_height", self.step_height);
        }
        if !(self.gait_period > 0.0 && self.gait_period.is_finite()) {
            return bad("gait_period", self.gait_period);
        }
        if !(self.step_length >= 0.0 && self.step_length.is_finite()) {
            return bad("step_length", self.step_length);
        }
        if !(self.swing_out >= 0.0 && self.swing_out.is_finite()) {
            return bad("swing_out", self.swing_out);
        }
        Ok(())
    }
}

/// Swing curve from `from` to `to` (neutral-relative x offsets).
pub fn swing_curve(neutral: &Vector3<f64>, from: f64, to: f64, height: f64, lateral: f64) -> BezierCurve {
    let span = to - from;
    let at = |x: f64, y: f64, z: f64| neutral + Vector3::new(x, y, z);
    let mid = 0.5 * (from + to);
    BezierCurve::new(vec![
        at(from, 0.0, 0.0),
        at(from - span / 4.0, 0.0, 0.0),
        at(mid, LIFT_WEIGHT * lateral, LIFT_WEIGHT * height),
        at(to + span / 4.0, 0.0, 0.0),
        at(to, 0.0, 0.0),
    ])
    .expect("five finite control points")
}

/// Straight stance drag at constant speed, padded to five points.
pub fn stance_curve(neutral: &Vector3<f64>, from: f64, to: f64) -> BezierCurve {
    let pts = (0..5).map(|k| neutral + Vector3::new(from + (to - from) * k as f64 / 4.0, 0.0, 0.0)).collect();
    BezierCurve::new(pts).expect("five finite control points")
}

fn check_workspace(block: &TrajectoryBlock, workspace: &LegWorkspace) -> Result<(), GaitError> {
    for leg in LEGS {
        let curve = &block.curves()[leg.index()];
        for i in 0..=WORKSPACE_SAMPLES {
            let s = i as f64 / WORKSPACE_SAMPLES as f64;
            let length = curve.eval(s)?.norm();
            if !workspace.contains(length) {
                return Err(GaitError::TrajectoryWorkspace {
                    leg: leg.label(),
                    s,
                    length,
                    min: workspace.min,
                    max: workspace.max,
                });
            }
        }
    }
    Ok(())
}

fn is_first_pair(leg: Leg) -> bool {
    matches!(leg, Leg::FrontRight | Leg::BackLeft)
}

/// Block where `swinging` legs move from `swing_from` to `swing_to` and the
/// rest drag from `stance_from` to `stance_to`.
fn pair_block(
    gait: &GaitParams,
    swing_first_pair: bool,
    swing: (f64, f64),
    stance: (f64, f64),
) -> Result<TrajectoryBlock, GaitError> {
    let curves = LEGS.map(|leg| {
        let n = &gait.neutral_foot[leg.index()];
        if is_first_pair(leg) == swing_first_pair {
            swing_curve(n, swing.0, swing.1, gait.step_height, leg.lateral_sign() * gait.swing_out)
        } else {
            stance_curve(n, stance.0, stance.1)
        }
    });
    TrajectoryBlock::new(curves, gait.gait_period)
}

/// One trot cycle: `{FR, BL}` swing while `{FL, BR}` stance, then the pairs
/// swap. The cycle is periodic in the hip frame, so it loops continuously.
pub fn build_trot_sequence(gait: &GaitParams, workspace: &LegWorkspace) -> Result<SequenceBlock, GaitError> {
    gait.validate()?;
    let half = gait.step_length / 2.0;
    let first = pair_block(gait, true, (-half, half), (half, -half))?;
    let second = pair_block(gait, false, (-half, half), (half, -half))?;
    check_workspace(&first, workspace)?;
    check_workspace(&second, workspace)?;
    SequenceBlock::new(vec![first, second], gait.num_steps.max(1))
}

/// The full program for `num_steps` cycles, optionally followed by a
/// half-step block that returns all feet to neutral. Starting from neutral
/// needs no extra block: the sequence manager blends the first block from
/// the remembered foot positions.
pub fn build_trot_schedule(gait: &GaitParams, workspace: &LegWorkspace) -> Result<GaitSchedule, GaitError> {
    gait.validate()?;
    if gait.num_steps == 0 {
        return Ok(GaitSchedule::default());
    }
    let mut schedule = GaitSchedule::from(build_trot_sequence(gait, workspace)?);
    if gait.align_finish {
        // A cycle ends with the first pair at −L/2 and the second at +L/2.
        let half = gait.step_length / 2.0;
        let closing = pair_block(gait, true, (-half, 0.0), (half, 0.0))?;
        check_workspace(&closing, workspace)?;
        schedule.stages.push(SequenceBlock::new(vec![closing], 1)?);
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WS: LegWorkspace = LegWorkspace { min: 0.2, max: 0.6 };

    #[test]
    fn two_blocks_of_five_points() {
        let seq = build_trot_sequence(&GaitParams::default(), &WS).unwrap();
        assert_eq!(seq.blocks().len(), 2);
        assert!(seq.blocks().iter().all(|b| b.point_count() == 5 && b.duration() == 0.5));
        assert_eq!(seq.loop_count(), 10);
    }

    #[test]
    fn swing_peak_and_pairs() {
        let gait = GaitParams::default();
        let seq = build_trot_sequence(&gait, &WS).unwrap();
        let first = &seq.blocks()[0];
        let fr = &first.curves()[Leg::FrontRight.index()];
        let peak = fr.eval(0.5).unwrap();
        assert!((peak.z - (gait.neutral_foot[0].z + gait.step_height)).abs() < 1e-12);
        // The other pair stays on its neutral height in block one.
        let fl = &first.curves()[Leg::FrontLeft.index()];
        assert!((0..=20).all(|i| (fl.eval(i as f64 / 20.0).unwrap().z - gait.neutral_foot[2].z).abs() < 1e-15));
        // Block two swaps the roles.
        let fl2 = &seq.blocks()[1].curves()[Leg::FrontLeft.index()];
        assert!(fl2.eval(0.5).unwrap().z > gait.neutral_foot[2].z + 0.09);
    }

    #[test]
    fn stepping_in_place_returns_to_start() {
        let gait = GaitParams { step_length: 0.0, ..GaitParams::default() };
        let seq = build_trot_sequence(&gait, &WS).unwrap();
        for block in seq.blocks() {
            for c in block.curves() {
                assert_eq!(c.first(), c.last());
            }
        }
    }

    #[test]
    fn normal_gait_has_constant_lateral_component() {
        let seq = build_trot_sequence(&GaitParams::default(), &WS).unwrap();
        for block in seq.blocks() {
            for c in block.curves() {
                let y0 = c.first().y;
                assert!((0..=50).all(|i| c.eval(i as f64 / 50.0).unwrap().y == y0));
            }
        }
    }

    #[test]
    fn narrow_gait_swings_outward() {
        let gait = GaitParams { step_length: 0.08, swing_out: 0.07, ..GaitParams::default() };
        let seq = build_trot_sequence(&gait, &WS).unwrap();
        let fr = &seq.blocks()[0].curves()[Leg::FrontRight.index()];
        let bl = &seq.blocks()[0].curves()[Leg::BackLeft.index()];
        assert!((fr.eval(0.5).unwrap().y + 0.07).abs() < 1e-12);
        assert!((bl.eval(0.5).unwrap().y - 0.07).abs() < 1e-12);
    }

    #[test]
    fn loops_are_continuous_and_cycle_displacement() {
        let gait = GaitParams::default();
        let seq = build_trot_sequence(&gait, &WS).unwrap();
        let (a, b) = (&seq.blocks()[0], &seq.blocks()[1]);
        for leg in LEGS {
            let i = leg.index();
            assert_eq!(a.curves()[i].last(), b.curves()[i].first());
            assert_eq!(b.curves()[i].last(), a.curves()[i].first());
            // Swing advance of each foot over one cycle equals one step length.
            let swing = if is_first_pair(leg) { &a.curves()[i] } else { &b.curves()[i] };
            let advance = swing.last() - swing.first();
            assert!((advance - Vector3::new(0.1, 0.0, 0.0)).amax() < 1e-15);
        }
    }

    #[test]
    fn lift_off_and_touchdown_velocity_match_stance() {
        let gait = GaitParams::default();
        let seq = build_trot_sequence(&gait, &WS).unwrap();
        let a = &seq.blocks()[0];
        let swing = &a.curves()[0];
        let stance = &a.curves()[2];
        for s in [0.0, 1.0] {
            assert!((swing.derivative(s).unwrap() - stance.derivative(s).unwrap()).amax() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_workspace() {
        let gait = GaitParams { step_height: 0.3, ..GaitParams::default() };
        assert!(matches!(build_trot_sequence(&gait, &WS), Err(GaitError::TrajectoryWorkspace { .. })));
        let gait = GaitParams { step_length: 0.9, ..GaitParams::default() };
        assert!(matches!(build_trot_sequence(&gait, &WS), Err(GaitError::TrajectoryWorkspace { .. })));
        let gait = GaitParams { step_height: 0.0, ..GaitParams::default() };
        assert!(matches!(build_trot_sequence(&gait, &WS), Err(GaitError::Parameter { name: "step_height", .. })));
    }

    #[test]
    fn schedule_variants() {
        let stand = GaitParams { num_steps: 0, ..GaitParams::default() };
        assert!(build_trot_schedule(&stand, &WS).unwrap().stages.is_empty());
        let aligned = GaitParams { align_finish: true, ..GaitParams::default() };
        let s = build_trot_schedule(&aligned, &WS).unwrap();
        assert_eq!(s.stages.len(), 2);
        let closing = &s.stages[1].blocks()[0];
        for (leg, c) in LEGS.iter().zip(closing.curves()) {
            assert!((c.last() - aligned.neutral_foot[leg.index()]).amax() < 1e-15);
        }
    }
}
