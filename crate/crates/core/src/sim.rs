//! Time-domain hover simulation with a body-rate PID loop.
//!
//! The controller mirrors a minimal flight stack: per-axis PID on the
//! body rates, mixed to rotor-speed deltas through the pseudo-inverse of
//! the moment rows of the linearized input map. There is no attitude or
//! position loop, so hover holds the rates near zero while altitude is
//! only passively stable.

use nalgebra::{DMatrix, Matrix3, SMatrix, Vector3};

use crate::dynamics::{
    self, LinearModel, RigidState, RotorCommand, TetracopterParams,
};
use crate::{Error, Result, Vec3};

/// Default integration step [s]; matches common flight-loop rates and
/// keeps runs bit-reproducible.
pub const DEFAULT_DT: f64 = 0.002;

/// Rate magnitude below which the vehicle counts as settled [rad/s].
pub const SETTLE_THRESHOLD: f64 = 0.01;

/// Tilt magnitude treated as loss of control [rad].
pub const DIVERGENCE_ANGLE: f64 = std::f64::consts::FRAC_PI_3;

/// Per-axis rate-loop PID gains (roll, pitch, yaw) and saturation limits.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PidGains {
    pub kp: [f64; 3],
    pub ki: [f64; 3],
    pub kd: [f64; 3],
    /// Per-axis cap on the accumulated rate-error integral [rad].
    pub integrator_limit: f64,
    /// Cap on any single rotor-speed delta [rad/s].
    pub output_limit: f64,
}

impl PidGains {
    pub fn validate(&self) -> Result<()> {
        let all = self.kp.iter().chain(&self.ki).chain(&self.kd);
        for &g in all {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Domain(format!(
                    "PID gains must be finite and non-negative, got {g}"
                )));
            }
        }
        if !(self.integrator_limit > 0.0 && self.output_limit > 0.0) {
            return Err(Error::Domain(
                "PID saturation limits must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Gains placing each closed rate loop critically damped: the mixed rate
/// dynamics reduce to double integrators per axis, so kp, ki = 6, 9 puts
/// both roll and pitch poles at -3 and kp, ki = 4, 4 puts yaw at -2.
pub fn default_gains() -> PidGains {
    PidGains {
        kp: [6.0, 6.0, 4.0],
        ki: [9.0, 9.0, 4.0],
        kd: [0.0, 0.0, 0.0],
        integrator_limit: 2.0,
        output_limit: 150.0,
    }
}

/// Maps desired body-rate accelerations to rotor-speed deltas through the
/// pseudo-inverse of the moment rows of the linearized input map. The
/// moment rows are orthogonal to the thrust row, so mixed deltas change
/// no net thrust.
#[derive(Debug, Clone)]
pub struct Mixer {
    map: SMatrix<f64, 4, 3>,
    moment_rows: SMatrix<f64, 3, 4>,
    thrust_row: SMatrix<f64, 1, 4>,
}

impl Mixer {
    pub fn from_model(model: &LinearModel) -> Result<Self> {
        let moment_rows: SMatrix<f64, 3, 4> = model.b_matrix.fixed_rows::<3>(9).into();
        let thrust_row: SMatrix<f64, 1, 4> = model.b_matrix.fixed_rows::<1>(8).into();
        let map = moment_rows
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Solver(format!("moment rows not invertible: {e}")))?;
        // The mixer must right-invert the moment rows; this fails only if
        // they lose rank, which the geometry forbids.
        let identity_err = (moment_rows * map - Matrix3::identity()).norm();
        if identity_err > 1e-8 {
            return Err(Error::Solver(format!(
                "mixer right-inverse error {identity_err}"
            )));
        }
        Ok(Self {
            map,
            moment_rows,
            thrust_row,
        })
    }

    /// Rotor-speed deltas realizing the requested rate acceleration.
    pub fn deltas(&self, rate_accel: &Vec3) -> [f64; 4] {
        let d = self.map * rate_accel;
        [d[0], d[1], d[2], d[3]]
    }

    pub fn moment_rows(&self) -> &SMatrix<f64, 3, 4> {
        &self.moment_rows
    }

    pub fn thrust_row(&self) -> &SMatrix<f64, 1, 4> {
        &self.thrust_row
    }
}

/// Stateful body-rate PID producing rotor-speed deltas.
#[derive(Debug, Clone)]
pub struct RatePid {
    gains: PidGains,
    mixer: Mixer,
    integral: Vec3,
    previous_error: Option<Vec3>,
}

impl RatePid {
    pub fn new(gains: PidGains, mixer: Mixer) -> Result<Self> {
        gains.validate()?;
        Ok(Self {
            gains,
            mixer,
            integral: Vector3::zeros(),
            previous_error: None,
        })
    }

    /// Accumulated per-axis rate-error integral [rad].
    pub fn integral(&self) -> Vec3 {
        self.integral
    }

    /// One controller update: rate error to four rotor-speed deltas.
    /// Saturation scales the whole delta vector (preserving the commanded
    /// moment direction and the zero-net-thrust property) and halts the
    /// integrator while active.
    pub fn rate_pid(&mut self, rates: &Vec3, setpoint: &Vec3, dt: f64) -> Result<[f64; 4]> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        let error = setpoint - rates;
        let mut next_integral = self.integral + error * dt;
        for i in 0..3 {
            next_integral[i] = next_integral[i]
                .clamp(-self.gains.integrator_limit, self.gains.integrator_limit);
        }
        let derivative = match self.previous_error {
            Some(prev) => (error - prev) / dt,
            None => Vector3::zeros(),
        };
        let mut command = Vector3::zeros();
        for i in 0..3 {
            command[i] = self.gains.kp[i] * error[i]
                + self.gains.ki[i] * next_integral[i]
                + self.gains.kd[i] * derivative[i];
        }
        let mut deltas = self.mixer.deltas(&command);
        let peak = deltas.iter().fold(0.0f64, |a, &d| a.max(d.abs()));
        if peak > self.gains.output_limit {
            let scale = self.gains.output_limit / peak;
            for d in &mut deltas {
                *d *= scale;
            }
            // Anti-windup: keep the integral frozen while saturated.
        } else {
            self.integral = next_integral;
        }
        self.previous_error = Some(error);
        Ok(deltas)
    }
}

/// One classical fourth-order Runge-Kutta step of the rigid-body state
/// under a held rotor command.
pub fn step_rk4(
    state: &RigidState,
    cmd: &RotorCommand,
    params: &TetracopterParams,
    dt: f64,
) -> Result<RigidState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let x0 = state.to_array();
    let k1 = dynamics::derivative(state, cmd, params)?.to_array();
    let k2 = dynamics::derivative(&offset(&x0, &k1, dt / 2.0), cmd, params)?.to_array();
    let k3 = dynamics::derivative(&offset(&x0, &k2, dt / 2.0), cmd, params)?.to_array();
    let k4 = dynamics::derivative(&offset(&x0, &k3, dt), cmd, params)?.to_array();
    let mut next = x0;
    for i in 0..12 {
        next[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(RigidState::from_array(&next))
}

fn offset(x: &[f64; 12], k: &[f64; 12], h: f64) -> RigidState {
    let mut y = *x;
    for i in 0..12 {
        y[i] += h * k[i];
    }
    RigidState::from_array(&y)
}

/// Fixed-step trajectory of one hover trial.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<RigidState>,
    pub speeds: Vec<[f64; 4]>,
    /// First time from which |rates| stays below the threshold.
    pub settled_at: Option<f64>,
    pub settle_threshold: f64,
    /// Tilt exceeded the divergence angle; the run stops early.
    pub diverged: bool,
    /// Largest |z| excursion over the run [m].
    pub altitude_drift: f64,
}

/// Simulates hover from a perturbed state under the rate PID. The initial
/// perturbation must be inside the linear-design envelope: attitude within
/// 0.2 rad and rates within 1 rad/s per axis.
pub fn hover_trial(
    params: &TetracopterParams,
    initial: &RigidState,
    gains: PidGains,
    duration: f64,
    dt: f64,
) -> Result<SimResult> {
    params.validate()?;
    if !(duration > 0.0 && dt > 0.0 && dt <= 0.005) {
        return Err(Error::Domain(
            "duration must be positive and dt in (0, 5 ms]".to_string(),
        ));
    }
    if initial.attitude.amax() > 0.2 || initial.rates.amax() > 1.0 {
        return Err(Error::Domain(
            "initial perturbation outside the linear envelope \
             (|attitude| <= 0.2 rad, |rates| <= 1 rad/s)"
                .to_string(),
        ));
    }
    let model = dynamics::linearize(params)?;
    let mixer = Mixer::from_model(&model)?;
    let mut pid = RatePid::new(gains, mixer)?;
    let hover = model.hover_speed;
    let setpoint = Vector3::zeros();

    let steps = (duration / dt).round() as usize;
    let mut state = *initial;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut speeds_log = Vec::with_capacity(steps + 1);
    let mut diverged = false;
    let mut altitude_drift = 0.0f64;
    for step in 0..=steps {
        let t = step as f64 * dt;
        altitude_drift = altitude_drift.max(state.position.z.abs());
        times.push(t);
        states.push(state);
        if state.attitude.norm() > DIVERGENCE_ANGLE {
            diverged = true;
            speeds_log.push([hover; 4]);
            break;
        }
        let deltas = pid.rate_pid(&state.rates, &setpoint, dt)?;
        let mut speeds = [0.0; 4];
        for i in 0..4 {
            speeds[i] = (hover + deltas[i]).max(0.0);
        }
        speeds_log.push(speeds);
        if step == steps {
            break;
        }
        state = step_rk4(&state, &RotorCommand::steady(speeds), params, dt)?;
    }

    // Settling time: latest suffix on which the rates stay below the
    // threshold.
    let mut settled_at = None;
    if !diverged {
        for (i, s) in states.iter().enumerate().rev() {
            if s.rates.norm() < SETTLE_THRESHOLD {
                settled_at = Some(times[i]);
            } else {
                break;
            }
        }
    }
    Ok(SimResult {
        dt,
        times,
        states,
        speeds: speeds_log,
        settled_at,
        settle_threshold: SETTLE_THRESHOLD,
        diverged,
        altitude_drift,
    })
}

/// Closed-loop matrix of the six-dimensional rate subsystem: body rates
/// plus the three controller integrators. Positions, attitude, and
/// velocities are pure integrators fed by this subsystem, so rate-loop
/// stability is decided here.
pub fn closed_loop_rate_matrix(model: &LinearModel, gains: &PidGains) -> Result<DMatrix<f64>> {
    gains.validate()?;
    let mixer = Mixer::from_model(model)?;
    let a_rr = model.a_matrix.fixed_view::<3, 3>(9, 9);
    let bp = mixer.moment_rows() * mixer.map;
    let mut cl = DMatrix::zeros(6, 6);
    for r in 0..3 {
        for c in 0..3 {
            let gain_term = bp[(r, c)] * gains.kp[c];
            cl[(r, c)] = a_rr[(r, c)] - gain_term;
            cl[(r, c + 3)] = -bp[(r, c)] * gains.ki[c];
        }
        // Integrators accumulate the rate errors.
        cl[(r + 3, r)] = 1.0;
    }
    Ok(cl)
}

/// Eigenvalues of the closed rate loop as (real, imaginary) pairs.
pub fn closed_loop_rate_eigenvalues(
    model: &LinearModel,
    gains: &PidGains,
) -> Result<Vec<(f64, f64)>> {
    let cl = closed_loop_rate_matrix(model, gains)?;
    let eig = cl.complex_eigenvalues();
    Ok(eig.iter().map(|c| (c.re, c.im)).collect())
}
