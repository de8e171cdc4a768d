//! Robot geometry and inertia.
//!
//! The numeric defaults are placeholders for a desk-scale robot. They are not
//! measured values of any physical platform; scenarios override them.

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Leg index set in the fixed order used by every array in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Leg {
    FrontRight = 0,
    BackRight = 1,
    FrontLeft = 2,
    BackLeft = 3,
}

pub const LEGS: [Leg; 4] = [Leg::FrontRight, Leg::BackRight, Leg::FrontLeft, Leg::BackLeft];

impl Leg {
    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn label(self) -> &'static str {
        match self {
            Leg::FrontRight => "FR",
            Leg::BackRight => "BR",
            Leg::FrontLeft => "FL",
            Leg::BackLeft => "BL",
        }
    }

    pub fn from_label(label: &str) -> Option<Leg> {
        LEGS.into_iter().find(|leg| leg.label() == label)
    }

    /// +1 for left legs, −1 for right legs (body y points left).
    pub const fn lateral_sign(self) -> f64 {
        match self {
            Leg::FrontLeft | Leg::BackLeft => 1.0,
            Leg::FrontRight | Leg::BackRight => -1.0,
        }
    }

    /// The other member of this leg's diagonal pair.
    pub const fn diagonal_partner(self) -> Leg {
        match self {
            Leg::FrontRight => Leg::BackLeft,
            Leg::BackLeft => Leg::FrontRight,
            Leg::FrontLeft => Leg::BackRight,
            Leg::BackRight => Leg::FrontLeft,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("body mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("body inertia must be symmetric positive definite")]
    InertiaNotSpd,
    #[error("hip offsets of {0} and {1} coincide")]
    CoincidentHips(&'static str, &'static str),
    #[error("hip offsets of {0} and {1} are not mirrored across the body x-z plane")]
    HipsNotMirrored(&'static str, &'static str),
    #[error("leg length bounds must satisfy 0 < l_min < l_max, got [{0}, {1}]")]
    LegBounds(f64, f64),
    #[error("non-finite robot parameter: {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotParams {
    pub mass: f64,
    /// Body-frame inertia tensor.
    pub inertia: Matrix3<f64>,
    /// Hip joint positions in the body frame, indexed by [`Leg`].
    pub hip_offsets: [Vector3<f64>; 4],
    /// Thruster positions in the body frame, indexed by [`Leg`] (one
    /// thruster per body corner).
    pub thruster_offsets: [Vector3<f64>; 4],
    pub gravity: Vector3<f64>,
    pub leg_min: f64,
    pub leg_max: f64,
}

pub const GRAVITY: f64 = 9.81;

impl Default for RobotParams {
    fn default() -> Self {
        let corner = |leg: Leg, x: f64, y: f64, z: f64| {
            let fore = matches!(leg, Leg::FrontRight | Leg::FrontLeft);
            Vector3::new(if fore { x } else { -x }, leg.lateral_sign() * y, z)
        };
        Self {
            mass: 10.0,
            inertia: Matrix3::from_diagonal(&Vector3::new(0.3, 0.5, 0.6)),
            hip_offsets: LEGS.map(|leg| corner(leg, 0.3, 0.1, 0.0)),
            thruster_offsets: LEGS.map(|leg| corner(leg, 0.25, 0.15, 0.2)),
            gravity: Vector3::new(0.0, 0.0, -GRAVITY),
            leg_min: 0.2,
            leg_max: 0.6,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let finite = |m: &[f64]| m.iter().all(|v| v.is_finite());
        if !self.mass.is_finite() {
            return Err(ParamsError::NonFinite("mass"));
        }
        if !finite(self.inertia.as_slice()) {
            return Err(ParamsError::NonFinite("inertia"));
        }
        if !self.hip_offsets.iter().all(|h| finite(h.as_slice())) {
            return Err(ParamsError::NonFinite("hip_offsets"));
        }
        if !self.thruster_offsets.iter().all(|h| finite(h.as_slice())) {
            return Err(ParamsError::NonFinite("thruster_offsets"));
        }
        if !finite(self.gravity.as_slice()) {
            return Err(ParamsError::NonFinite("gravity"));
        }
        if self.mass <= 0.0 {
            return Err(ParamsError::NonPositiveMass(self.mass));
        }
        let asym = (self.inertia - self.inertia.transpose()).amax();
        if asym > 1e-12 * self.inertia.amax() || self.inertia.cholesky().is_none() {
            return Err(ParamsError::InertiaNotSpd);
        }
        for (i, a) in LEGS.iter().enumerate() {
            for b in &LEGS[i + 1..] {
                if (self.hip_offsets[a.index()] - self.hip_offsets[b.index()]).norm() < 1e-9 {
                    return Err(ParamsError::CoincidentHips(a.label(), b.label()));
                }
            }
        }
        for (right, left) in [(Leg::FrontRight, Leg::FrontLeft), (Leg::BackRight, Leg::BackLeft)] {
            let r = self.hip_offsets[right.index()];
            let l = self.hip_offsets[left.index()];
            if (r - Vector3::new(l.x, -l.y, l.z)).amax() > 1e-9 {
                return Err(ParamsError::HipsNotMirrored(right.label(), left.label()));
            }
        }
        if !(self.leg_min > 0.0 && self.leg_min < self.leg_max && self.leg_max.is_finite()) {
            return Err(ParamsError::LegBounds(self.leg_min, self.leg_max));
        }
        Ok(())
    }

    pub fn inertia_inverse(&self) -> Matrix3<f64> {
        self.inertia.try_inverse().unwrap_or_else(Matrix3::zeros)
    }

    pub fn gravity_magnitude(&self) -> f64 {
        self.gravity.norm()
    }
}
