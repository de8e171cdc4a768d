//! Compliant flat ground with Stribeck friction, and friction-cone checks.

use libm::{exp, sqrt};
use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactParams {
    /// Ground spring stiffness, N/m.
    pub k_gz: f64,
    /// Ground damping, N·s/m.
    pub k_dz: f64,
    /// Coulomb (sliding) friction coefficient.
    pub mu_c: f64,
    /// Static friction coefficient; also the cone coefficient used for
    /// violation flags.
    pub mu_s: f64,
    /// Viscous friction coefficient, N·s/m.
    pub mu_v: f64,
    /// Stribeck velocity, m/s.
    pub v_s: f64,
    pub ground_height: f64,
}

impl Default for ContactParams {
    /// Friction coefficients of a plastic foot on concrete; the ground
    /// stiffness, damping, viscous term and Stribeck velocity are placeholders.
    fn default() -> Self {
        Self { k_gz: 1e4, k_dz: 200.0, mu_c: 0.3, mu_s: 0.5, mu_v: 0.1, v_s: 0.05, ground_height: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContactParamsError {
    #[error("ground stiffness k_gz must be positive, got {0}")]
    Stiffness(f64),
    #[error("ground damping k_dz must be non-negative, got {0}")]
    Damping(f64),
    #[error("Stribeck velocity v_s must be positive, got {0}")]
    StribeckVelocity(f64),
    #[error("friction coefficients must satisfy 0 <= mu_c <= mu_s, got mu_c = {mu_c}, mu_s = {mu_s}")]
    Friction { mu_c: f64, mu_s: f64 },
    #[error("viscous coefficient mu_v must be non-negative, got {0}")]
    Viscous(f64),
    #[error("ground height must be finite")]
    GroundHeight,
}

impl ContactParams {
    pub fn validate(&self) -> Result<(), ContactParamsError> {
        if !(self.k_gz > 0.0 && self.k_gz.is_finite()) {
            return Err(ContactParamsError::Stiffness(self.k_gz));
        }
        if !(self.k_dz >= 0.0 && self.k_dz.is_finite()) {
            return Err(ContactParamsError::Damping(self.k_dz));
        }
        if !(self.v_s > 0.0 && self.v_s.is_finite()) {
            return Err(ContactParamsError::StribeckVelocity(self.v_s));
        }
        if !(0.0 <= self.mu_c && self.mu_c <= self.mu_s && self.mu_s.is_finite()) {
            return Err(ContactParamsError::Friction { mu_c: self.mu_c, mu_s: self.mu_s });
        }
        if !(self.mu_v >= 0.0 && self.mu_v.is_finite()) {
            return Err(ContactParamsError::Viscous(self.mu_v));
        }
        if !self.ground_height.is_finite() {
            return Err(ContactParamsError::GroundHeight);
        }
        Ok(())
    }

    /// Velocity-dependent friction factor, between `mu_s` at rest and `mu_c`
    /// at high slip speed.
    pub fn stribeck_factor(&self, speed: f64) -> f64 {
        self.mu_c - (self.mu_c - self.mu_s) * exp(-(speed * speed) / (self.v_s * self.v_s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeStatus {
    Inside,
    /// Tangential-to-normal ratio at or beyond the coefficient.
    Outside,
    /// Normal force not strictly positive.
    Unilateral,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeCheck {
    /// `mu − ‖F_h‖ / F_z`; `-inf` when `F_z <= 0`.
    pub margin: f64,
    pub status: ConeStatus,
}

impl ConeCheck {
    pub fn is_violation(&self) -> bool {
        self.status != ConeStatus::Inside
    }
}

/// Friction-cone membership of a contact force. The boundary itself
/// (`margin == 0`) counts as a violation.
pub fn friction_cone_margin(force: &Vector3<f64>, mu: f64) -> ConeCheck {
    if force.z <= 0.0 {
        return ConeCheck { margin: f64::NEG_INFINITY, status: ConeStatus::Unilateral };
    }
    let tangential = sqrt(force.x * force.x + force.y * force.y);
    let margin = mu - tangential / force.z;
    let status = if margin <= 0.0 { ConeStatus::Outside } else { ConeStatus::Inside };
    ConeCheck { margin, status }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrfResult {
    /// Inertial-frame force on the foot.
    pub force: Vector3<f64>,
    pub in_contact: bool,
    /// Cone check against `mu_s`. Out of contact this reports the full
    /// coefficient as margin and [`ConeStatus::Inside`].
    pub cone: ConeCheck,
}

impl GrfResult {
    pub fn airborne(mu: f64) -> Self {
        Self {
            force: Vector3::zeros(),
            in_contact: false,
            cone: ConeCheck { margin: mu, status: ConeStatus::Inside },
        }
    }
}

fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Ground reaction force on a point foot.
///
/// Normal force is a spring-damper on penetration depth, clamped at zero so
/// the ground never pulls. Each tangential axis follows its own Stribeck law
/// driven by that axis' slip velocity, scaled by the clamped normal force.
pub fn ground_reaction_force(params: &ContactParams, foot_pos: &Vector3<f64>, foot_vel: &Vector3<f64>) -> GrfResult {
    let z = foot_pos.z - params.ground_height;
    if z > 0.0 {
        return GrfResult::airborne(params.mu_s);
    }
    let normal = (-params.k_gz * z - params.k_dz * foot_vel.z).max(0.0);
    let tangential = |v: f64| -params.stribeck_factor(v) * normal * sgn(v) - params.mu_v * v;
    let force = Vector3::new(tangential(foot_vel.x), tangential(foot_vel.y), normal);
    GrfResult { force, in_contact: true, cone: friction_cone_margin(&force, params.mu_s) }
}
