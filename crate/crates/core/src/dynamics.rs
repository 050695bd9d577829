//! Rigid-body dynamics of the four-rotor tetrahedral vehicle and its
//! linearization about hover.
//!
//! Conventions: inertial NEU-style frame with z up for position, ZYX Euler
//! angles (roll phi, pitch theta, yaw psi), body-frame velocity V and rates
//! Omega. Rotor 4 sits on the body z-axis; rotors 1..3 sit over the base
//! corners, rotors 1 and 3 spin counter-clockwise, 2 and 4 clockwise.

use nalgebra::{Matrix3, SMatrix};
use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, Vec3};

/// Physical parameters of one four-rotor module.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TetracopterParams {
    /// Vehicle mass [kg].
    pub mass: f64,
    /// Body inertia tensor [kg m^2].
    pub inertia: Mat3,
    /// Rotor spin inertia about its axis [kg m^2].
    pub rotor_inertia: f64,
    /// Frame edge length [m]; sets the rotor moment arms.
    pub arm_length: f64,
    /// Thrust coefficient [N s^2]: one rotor produces k_thrust * omega^2.
    pub k_thrust: f64,
    /// Aerodynamic rotor drag torque coefficient [N m s^2].
    pub k_drag: f64,
    /// Rotor shaft friction torque coefficient [N m s].
    pub k_friction: f64,
    /// Translational drag coefficients per body axis [N s^2/m^2].
    pub drag_linear: Vec3,
    /// Rotational drag coefficients per body axis [N m s^2].
    pub drag_angular: Vec3,
    /// Gravitational acceleration [m/s^2].
    pub gravity: f64,
    /// Multiplier on k_thrust modelling installed-thrust losses; 1 = ideal.
    pub thrust_derate: f64,
    /// If set, aerodynamic drag uses raw squares v^2 instead of the
    /// sign-preserving v*|v| form, so drag no longer opposes negative
    /// velocities. Kept for comparison runs; leave off for simulation.
    pub unsigned_square_drag: bool,
}

impl Default for TetracopterParams {
    fn default() -> Self {
        Self {
            mass: 0.740,
            inertia: Matrix3::identity() * 0.0111,
            rotor_inertia: 2.0e-5,
            arm_length: 0.24455,
            k_thrust: 1.0e-5,
            k_drag: 1.5e-7,
            k_friction: 1.0e-6,
            drag_linear: Vec3::new(0.01, 0.01, 0.01),
            drag_angular: Vec3::new(1.0e-4, 1.0e-4, 1.0e-4),
            gravity: 9.81,
            thrust_derate: 1.0,
            unsigned_square_drag: false,
        }
    }
}

impl TetracopterParams {
    /// Thrust coefficient after derating.
    pub fn effective_k_thrust(&self) -> f64 {
        self.k_thrust * self.thrust_derate
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("mass", self.mass),
            ("rotor_inertia", self.rotor_inertia),
            ("arm_length", self.arm_length),
            ("k_thrust", self.k_thrust),
            ("gravity", self.gravity),
            ("thrust_derate", self.thrust_derate),
        ];
        for (name, v) in positives {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.thrust_derate > 1.0 {
            return Err(Error::Domain(format!(
                "thrust_derate must not exceed 1, got {}",
                self.thrust_derate
            )));
        }
        for (name, v) in [("k_drag", self.k_drag), ("k_friction", self.k_friction)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Domain(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if self.inertia.try_inverse().is_none() {
            return Err(Error::Domain("inertia tensor must be invertible".into()));
        }
        Ok(())
    }
}

/// Body inertia: a scalar J means J * I3; a 3x3 array is used verbatim.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InertiaSpec {
    Isotropic(f64),
    Full([[f64; 3]; 3]),
}

impl InertiaSpec {
    pub fn to_matrix(&self) -> Mat3 {
        match *self {
            InertiaSpec::Isotropic(j) => Matrix3::identity() * j,
            InertiaSpec::Full(rows) => Matrix3::from_fn(|i, j| rows[i][j]),
        }
    }
}

/// Vehicle-parameter overrides; omitted fields keep their current values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsPatch {
    pub mass: Option<f64>,
    pub inertia: Option<InertiaSpec>,
    pub rotor_inertia: Option<f64>,
    pub arm_length: Option<f64>,
    pub k_thrust: Option<f64>,
    pub k_drag: Option<f64>,
    pub k_friction: Option<f64>,
    pub drag_linear: Option<[f64; 3]>,
    pub drag_angular: Option<[f64; 3]>,
    pub gravity: Option<f64>,
    pub thrust_derate: Option<f64>,
    pub unsigned_square_drag: Option<bool>,
}

impl ParamsPatch {
    pub fn apply(&self, p: &mut TetracopterParams) {
        if let Some(v) = self.mass {
            p.mass = v;
        }
        if let Some(ref v) = self.inertia {
            p.inertia = v.to_matrix();
        }
        if let Some(v) = self.rotor_inertia {
            p.rotor_inertia = v;
        }
        if let Some(v) = self.arm_length {
            p.arm_length = v;
        }
        if let Some(v) = self.k_thrust {
            p.k_thrust = v;
        }
        if let Some(v) = self.k_drag {
            p.k_drag = v;
        }
        if let Some(v) = self.k_friction {
            p.k_friction = v;
        }
        if let Some(v) = self.drag_linear {
            p.drag_linear = Vec3::from_row_slice(&v);
        }
        if let Some(v) = self.drag_angular {
            p.drag_angular = Vec3::from_row_slice(&v);
        }
        if let Some(v) = self.gravity {
            p.gravity = v;
        }
        if let Some(v) = self.thrust_derate {
            p.thrust_derate = v;
        }
        if let Some(v) = self.unsigned_square_drag {
            p.unsigned_square_drag = v;
        }
    }

    /// Applies the patch to `base` and validates the result.
    pub fn applied_to(&self, mut base: TetracopterParams) -> Result<TetracopterParams> {
        self.apply(&mut base);
        base.validate()?;
        Ok(base)
    }
}

/// State-vector component names, in storage order.
pub const STATE_NAMES: [&str; 12] = [
    "x", "y", "z", "phi", "theta", "psi", "u", "v", "w", "p", "q", "r",
];

/// Input-vector component names: the four rotor speeds.
pub const INPUT_NAMES: [&str; 4] = ["w1", "w2", "w3", "w4"];

/// Twelve-dimensional rigid-body state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidState {
    /// Inertial position [m].
    pub position: Vec3,
    /// Euler angles (roll, pitch, yaw) [rad].
    pub attitude: Vec3,
    /// Body-frame translational velocity [m/s].
    pub velocity: Vec3,
    /// Body-frame angular rates (p, q, r) [rad/s].
    pub rates: Vec3,
}

impl RigidState {
    pub fn hover() -> Self {
        Self {
            position: Vec3::zeros(),
            attitude: Vec3::zeros(),
            velocity: Vec3::zeros(),
            rates: Vec3::zeros(),
        }
    }

    /// Flattens to [x y z, phi theta psi, u v w, p q r].
    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[0..3].copy_from_slice(self.position.as_slice());
        out[3..6].copy_from_slice(self.attitude.as_slice());
        out[6..9].copy_from_slice(self.velocity.as_slice());
        out[9..12].copy_from_slice(self.rates.as_slice());
        out
    }

    pub fn from_array(a: &[f64; 12]) -> Self {
        Self {
            position: Vec3::new(a[0], a[1], a[2]),
            attitude: Vec3::new(a[3], a[4], a[5]),
            velocity: Vec3::new(a[6], a[7], a[8]),
            rates: Vec3::new(a[9], a[10], a[11]),
        }
    }
}

/// Rotor speed command. Speeds are magnitudes [rad/s]; handedness is fixed
/// by the rotor index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorCommand {
    pub speeds: [f64; 4],
    /// Spin accelerations [rad/s^2]; enter only the shaft reaction torque.
    pub accels: [f64; 4],
}

impl RotorCommand {
    pub fn steady(speeds: [f64; 4]) -> Self {
        Self {
            speeds,
            accels: [0.0; 4],
        }
    }

    pub fn uniform(speed: f64) -> Self {
        Self::steady([speed; 4])
    }
}

/// Time derivative of `RigidState`, same block layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub position_dot: Vec3,
    pub attitude_dot: Vec3,
    pub velocity_dot: Vec3,
    pub rates_dot: Vec3,
}

impl StateDerivative {
    pub fn to_array(&self) -> [f64; 12] {
        let mut out = [0.0; 12];
        out[0..3].copy_from_slice(self.position_dot.as_slice());
        out[3..6].copy_from_slice(self.attitude_dot.as_slice());
        out[6..9].copy_from_slice(self.velocity_dot.as_slice());
        out[9..12].copy_from_slice(self.rates_dot.as_slice());
        out
    }
}

/// Hover linearization: x_dot = A x + B delta_omega with the state ordered
/// [x y z, phi theta psi, u v w, p q r] and per-rotor speed deltas as input.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a_matrix: SMatrix<f64, 12, 12>,
    pub b_matrix: SMatrix<f64, 12, 4>,
    /// Trim rotor speed [rad/s].
    pub hover_speed: f64,
}

/// Body-to-inertial rotation R = Rz(psi) Ry(theta) Rx(phi).
pub fn rotation_matrix(attitude: &Vec3) -> Mat3 {
    let (sp, cp) = attitude.x.sin_cos();
    let (st, ct) = attitude.y.sin_cos();
    let (ss, cs) = attitude.z.sin_cos();
    Matrix3::new(
        cs * ct,
        cs * st * sp - ss * cp,
        cs * st * cp + ss * sp,
        ss * ct,
        ss * st * sp + cs * cp,
        ss * st * cp - cs * sp,
        -st,
        ct * sp,
        ct * cp,
    )
}

/// Transform S with Omega = S * eta_dot; det S = cos(theta).
pub fn body_rate_transform(attitude: &Vec3) -> Result<Mat3> {
    let (sp, cp) = attitude.x.sin_cos();
    let (st, ct) = attitude.y.sin_cos();
    if ct.abs() < 1e-6 {
        return Err(Error::AttitudeSingularity { theta: attitude.y });
    }
    Ok(Matrix3::new(
        1.0, 0.0, -st, //
        0.0, cp, ct * sp, //
        0.0, -sp, ct * cp,
    ))
}

/// Inverse transform: eta_dot = S^-1 * Omega, in closed form.
pub fn body_rate_transform_inv(attitude: &Vec3) -> Result<Mat3> {
    let (sp, cp) = attitude.x.sin_cos();
    let (st, ct) = attitude.y.sin_cos();
    if ct.abs() < 1e-6 {
        return Err(Error::AttitudeSingularity { theta: attitude.y });
    }
    let tt = st / ct;
    Ok(Matrix3::new(
        1.0,
        sp * tt,
        cp * tt,
        0.0,
        cp,
        -sp,
        0.0,
        sp / ct,
        cp / ct,
    ))
}

/// Rotor speed at which four equal rotors balance gravity.
pub fn hover_speed(params: &TetracopterParams) -> Result<f64> {
    params.validate()?;
    Ok((params.mass * params.gravity / (4.0 * params.effective_k_thrust())).sqrt())
}

/// Drag nonlinearity: sign-preserving v|v| by default, raw v^2 when the
/// comparison flag is set.
fn quad_term(v: f64, unsigned: bool) -> f64 {
    if unsigned {
        v * v
    } else {
        v * v.abs()
    }
}

/// Thrust-induced body torque. The roll/pitch arms follow from rotors 1..3
/// sitting at radius a/(2 sqrt(3)) over the base corners at azimuths 240,
/// 0, 120 degrees and rotor 4 on the z-axis.
fn thrust_torque(params: &TetracopterParams, speeds: &[f64; 4]) -> Vec3 {
    let ak = params.arm_length * params.effective_k_thrust();
    let [w1, w2, w3, _] = speeds.map(|w| w * w);
    Vec3::new(
        ak * (w3 - w1) / 4.0,
        ak * ((w1 + w3) / 2.0 - w2) / (2.0 * 3.0_f64.sqrt()),
        0.0,
    )
}

/// Per-rotor shaft torques (gyroscopic + aerodynamic reaction + friction),
/// summed over the four rotors. Rotor j contributes with sign (-1)^j for
/// 1-based j: counter-clockwise rotors 1 and 3 negative.
fn rotor_torques(params: &TetracopterParams, state: &RigidState, cmd: &RotorCommand) -> Vec3 {
    let mut total = Vec3::zeros();
    for j in 0..4 {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        let w = cmd.speeds[j];
        total += sign
            * Vec3::new(
                params.rotor_inertia * w * state.rates.y,
                -params.rotor_inertia * w * state.rates.x,
                params.rotor_inertia * cmd.accels[j]
                    + params.k_drag * w * w
                    + params.k_friction * w,
            );
    }
    total
}

/// Full nonlinear state derivative.
pub fn derivative(
    state: &RigidState,
    cmd: &RotorCommand,
    params: &TetracopterParams,
) -> Result<StateDerivative> {
    params.validate()?;
    for w in cmd.speeds {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Domain(format!(
                "rotor speeds must be non-negative, got {w}"
            )));
        }
    }
    let rot = rotation_matrix(&state.attitude);
    let s_inv = body_rate_transform_inv(&state.attitude)?;
    let unsigned = params.unsigned_square_drag;

    let position_dot = rot * state.velocity;
    let attitude_dot = s_inv * state.rates;

    let thrust_sum: f64 = cmd.speeds.iter().map(|w| w * w).sum();
    let thrust = Vec3::new(0.0, 0.0, params.effective_k_thrust() * thrust_sum);
    let gravity_body = rot.transpose() * Vec3::new(0.0, 0.0, -params.gravity);
    let drag_force = Vec3::new(
        params.drag_linear.x * quad_term(state.velocity.x, unsigned),
        params.drag_linear.y * quad_term(state.velocity.y, unsigned),
        params.drag_linear.z * quad_term(state.velocity.z, unsigned),
    );
    let velocity_dot = -state.rates.cross(&state.velocity)
        + gravity_body
        + (thrust - drag_force) / params.mass;

    let body_drag_torque = Vec3::new(
        params.drag_angular.x * quad_term(state.rates.x, unsigned),
        params.drag_angular.y * quad_term(state.rates.y, unsigned),
        params.drag_angular.z * quad_term(state.rates.z, unsigned),
    );
    let torque = rotor_torques(params, state, cmd) + thrust_torque(params, &cmd.speeds)
        - body_drag_torque
        - state.rates.cross(&(params.inertia * state.rates));
    let inertia_inv = params
        .inertia
        .try_inverse()
        .ok_or_else(|| Error::Domain("inertia tensor must be invertible".into()))?;
    let rates_dot = inertia_inv * torque;

    Ok(StateDerivative {
        position_dot,
        attitude_dot,
        velocity_dot,
        rates_dot,
    })
}

/// Analytic hover linearization.
///
/// At the uniform trim the gyroscopic rotor terms cancel (the spin signs sum
/// to zero), the Coriolis and drag terms are second order, and only gravity
/// tilt, kinematic identity blocks, and rotor sensitivities remain.
pub fn linearize(params: &TetracopterParams) -> Result<LinearModel> {
    params.validate()?;
    let w0 = hover_speed(params)?;
    let kt = params.effective_k_thrust();
    let g = params.gravity;

    let mut a = SMatrix::<f64, 12, 12>::zeros();
    // Position and attitude kinematics: identity couplings at trim.
    for i in 0..3 {
        a[(i, 6 + i)] = 1.0;
        a[(3 + i, 9 + i)] = 1.0;
    }
    // Gravity tilt: u_dot = g theta, v_dot = -g phi.
    a[(6, 4)] = g;
    a[(7, 3)] = -g;

    let mut b = SMatrix::<f64, 12, 4>::zeros();
    // Vertical acceleration per rotor delta.
    let thrust_gain = 2.0 * kt * w0 / params.mass;
    for j in 0..4 {
        b[(8, j)] = thrust_gain;
    }
    // Moment sensitivities before dividing by inertia.
    let ak = params.arm_length * kt * w0;
    let yaw_gain = 2.0 * params.k_drag * w0 + params.k_friction;
    let roll = [-ak / 2.0, 0.0, ak / 2.0, 0.0];
    let s3 = 3.0_f64.sqrt();
    let pitch = [ak / (2.0 * s3), -ak / s3, ak / (2.0 * s3), 0.0];
    let yaw = [-yaw_gain, yaw_gain, -yaw_gain, yaw_gain];
    let inertia_inv = params
        .inertia
        .try_inverse()
        .ok_or_else(|| Error::Domain("inertia tensor must be invertible".into()))?;
    for j in 0..4 {
        let m = inertia_inv * Vec3::new(roll[j], pitch[j], yaw[j]);
        b[(9, j)] = m.x;
        b[(10, j)] = m.y;
        b[(11, j)] = m.z;
    }

    Ok(LinearModel {
        a_matrix: a,
        b_matrix: b,
        hover_speed: w0,
    })
}
