use nalgebra::Vector3;

/// PD-plus-feedforward joint tracking with acceleration saturation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackingGains {
    pub kp: f64,
    pub kd: f64,
    /// Bound on |φ̈| and |γ̈|, rad/s².
    pub max_angular_accel: f64,
    /// Bound on |l̈|, m/s².
    pub max_linear_accel: f64,
}

impl Default for TrackingGains {
    fn default() -> Self {
        Self { kp: 400.0, kd: 40.0, max_angular_accel: 2_000.0, max_linear_accel: 200.0 }
    }
}

/// `u_L = q̈_des + kp (q_des − q) + kd (q̇_des − q̇)` per joint, saturated.
/// Arrays are indexed by leg; each vector is `[phi, gamma, l]`.
pub fn joint_tracking_accel(
    q_des: &[Vector3<f64>; 4],
    qd_des: &[Vector3<f64>; 4],
    qdd_des: &[Vector3<f64>; 4],
    q: &[Vector3<f64>; 4],
    qd: &[Vector3<f64>; 4],
    gains: &TrackingGains,
) -> [Vector3<f64>; 4] {
    core::array::from_fn(|i| {
        let raw = qdd_des[i] + (q_des[i] - q[i]) * gains.kp + (qd_des[i] - qd[i]) * gains.kd;
        Vector3::new(
            raw.x.clamp(-gains.max_angular_accel, gains.max_angular_accel),
            raw.y.clamp(-gains.max_angular_accel, gains.max_angular_accel),
            raw.z.clamp(-gains.max_linear_accel, gains.max_linear_accel),
        )
    })
}
