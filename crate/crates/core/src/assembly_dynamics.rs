//! Control-sensitivity maps of composite assemblies and their recursion.
//!
//! For a level-n assembly of four-rotor modules, the hover linearization of
//! net thrust and torque with respect to the 4^(n+1) rotor-speed deltas has
//! Kronecker structure: composing four level-n assemblies repeats the
//! thrust map, adds moment-arm cross products of the thrust map to the
//! torque map, and scales the rate-coupling map by the module count. All of
//! it assumes a uniform trim; mixed per-rotor trims are rejected.

use nalgebra::{DMatrix, Matrix3};

use crate::dynamics::{LinearModel, TetracopterParams};
use crate::geometry::TetrahedronGeometry;
use crate::inertia::{closed_form, RigidBodyParams};
use crate::{Error, Mat3, Result, Vec3};

/// Largest supported map level; the torque map at level 8 already has
/// 4^9 = 262144 columns.
pub const MAX_MAP_LEVEL: usize = 8;

/// Hover-linearized force/torque sensitivities of a level-n assembly.
///
/// Columns index individual rotors (4^(n+1) of them); rows are body axes.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyLinearMaps {
    pub level: usize,
    /// Net-force sensitivity [N s/rad], 3 x 4^(n+1).
    pub force: DMatrix<f64>,
    /// Thrust-moment sensitivity [N m s/rad], 3 x 4^(n+1).
    pub torque: DMatrix<f64>,
    /// Reaction-torque (drag/friction) sensitivity [N m s/rad], 3 x 4^(n+1).
    pub reaction: DMatrix<f64>,
    /// Sensitivity of gyroscopic torque to body rates [N m s], 3 x 3.
    pub rate_coupling: Mat3,
    /// Common trim rotor speed [rad/s].
    pub trim_speed: f64,
    /// True when every rotor shares the trim speed; the recursion and the
    /// closed form are only valid in that case.
    pub uniform_trim: bool,
}

fn skew(v: Vec3) -> Mat3 {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn ones_row(n: usize) -> DMatrix<f64> {
    DMatrix::from_element(1, n, 1.0)
}

/// Induced infinity norm (max absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum())
        .fold(0.0, f64::max)
}

/// Elementary (level-0) maps of one module at its uniform hover trim.
pub fn elementary_maps(
    model: &LinearModel,
    params: &TetracopterParams,
) -> Result<AssemblyLinearMaps> {
    elementary_maps_at(params, [model.hover_speed; 4])
}

/// Elementary maps linearized at explicit per-rotor trim speeds.
pub fn elementary_maps_at(
    params: &TetracopterParams,
    speeds: [f64; 4],
) -> Result<AssemblyLinearMaps> {
    params.validate()?;
    for w in speeds {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::Domain(format!(
                "trim speeds must be positive, got {w}"
            )));
        }
    }
    let kt = params.effective_k_thrust();
    let mean = speeds.iter().sum::<f64>() / 4.0;
    let uniform_trim = speeds.iter().all(|w| (w - mean).abs() <= 1e-9 * mean);

    let mut force = DMatrix::zeros(3, 4);
    for (j, w) in speeds.iter().enumerate() {
        force[(2, j)] = 2.0 * kt * w;
    }

    let ak = params.arm_length * kt;
    let s3 = 3.0_f64.sqrt();
    let mut torque = DMatrix::zeros(3, 4);
    torque[(0, 0)] = -ak * speeds[0] / 2.0;
    torque[(0, 2)] = ak * speeds[2] / 2.0;
    torque[(1, 0)] = ak * speeds[0] / (2.0 * s3);
    torque[(1, 1)] = -ak * speeds[1] / s3;
    torque[(1, 2)] = ak * speeds[2] / (2.0 * s3);

    let mut reaction = DMatrix::zeros(3, 4);
    let mut spin_sum = 0.0;
    for (j, w) in speeds.iter().enumerate() {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        reaction[(2, j)] = sign * (2.0 * params.k_drag * w + params.k_friction);
        spin_sum += sign * w;
    }

    // Gyroscopic torque I_r w (q, -p, 0) summed with spin signs couples the
    // body rates back into torque; it cancels exactly at a uniform trim.
    let gyro = params.rotor_inertia * spin_sum;
    let rate_coupling = Matrix3::new(0.0, gyro, 0.0, -gyro, 0.0, 0.0, 0.0, 0.0, 0.0);

    Ok(AssemblyLinearMaps {
        level: 0,
        force,
        torque,
        reaction,
        rate_coupling,
        trim_speed: mean,
        uniform_trim,
    })
}

fn check_uniform(maps: &AssemblyLinearMaps) -> Result<()> {
    if !maps.uniform_trim {
        return Err(Error::Unsupported(
            "assembly map recursion requires a uniform trim; \
             per-rotor trims differ"
                .to_string(),
        ));
    }
    Ok(())
}

/// One composition step: four level-n assemblies at offsets 2^n * r * p_i.
pub fn recurse_maps(
    maps: &AssemblyLinearMaps,
    geom: &TetrahedronGeometry,
) -> Result<AssemblyLinearMaps> {
    check_uniform(maps)?;
    if maps.level >= MAX_MAP_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "map level {} exceeds the supported maximum of {MAX_MAP_LEVEL}",
            maps.level + 1
        )));
    }
    let cols = maps.force.ncols();
    let step = 2f64.powi(maps.level as i32) * geom.circumradius;

    let mut force = DMatrix::zeros(3, 4 * cols);
    let mut torque = DMatrix::zeros(3, 4 * cols);
    let mut reaction = DMatrix::zeros(3, 4 * cols);
    for (i, p_i) in geom.unit_vectors.iter().enumerate() {
        let arm = skew(step * p_i);
        force
            .view_mut((0, i * cols), (3, cols))
            .copy_from(&maps.force);
        torque
            .view_mut((0, i * cols), (3, cols))
            .copy_from(&(&arm * &maps.force + &maps.torque));
        reaction
            .view_mut((0, i * cols), (3, cols))
            .copy_from(&maps.reaction);
    }

    Ok(AssemblyLinearMaps {
        level: maps.level + 1,
        force,
        torque,
        reaction,
        rate_coupling: 4.0 * maps.rate_coupling,
        trim_speed: maps.trim_speed,
        uniform_trim: true,
    })
}

/// The 3 x 16 block matrix [ [p_1]x M0f | ... | [p_4]x M0f ]. Stacking the
/// same control on all four children lies in its kernel because the vertex
/// directions sum to zero.
pub fn q_matrix(elementary: &AssemblyLinearMaps, geom: &TetrahedronGeometry) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(3, 16);
    for (i, p_i) in geom.unit_vectors.iter().enumerate() {
        q.view_mut((0, i * 4), (3, 4))
            .copy_from(&(skew(*p_i) * &elementary.force));
    }
    q
}

/// Closed form for the level-n maps from the elementary maps:
/// force and reaction repeat 4^n times, rate coupling scales by 4^n, and
/// the torque map unrolls the moment arms into a Kronecker sum
/// r * Q * sum_k 2^k (1_(4^(n-1-k)) (x) I4 (x) 1_(4^k) (x) I4).
pub fn closed_form_maps(
    elementary: &AssemblyLinearMaps,
    geom: &TetrahedronGeometry,
    level: usize,
) -> Result<AssemblyLinearMaps> {
    check_uniform(elementary)?;
    if elementary.level != 0 {
        return Err(Error::Domain(
            "closed form must start from level-0 maps".to_string(),
        ));
    }
    if level > MAX_MAP_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "map level {level} exceeds the supported maximum of {MAX_MAP_LEVEL}"
        )));
    }
    let reps = 4usize.pow(level as u32);
    let force = ones_row(reps).kronecker(&elementary.force);
    let reaction = ones_row(reps).kronecker(&elementary.reaction);

    let mut torque = ones_row(reps).kronecker(&elementary.torque);
    if level > 0 {
        let q = q_matrix(elementary, geom);
        let id4 = DMatrix::<f64>::identity(4, 4);
        let mut pattern = DMatrix::zeros(16, 4 * reps);
        for k in 0..level {
            let outer = ones_row(4usize.pow((level - 1 - k) as u32));
            let inner = ones_row(4usize.pow(k as u32));
            pattern += 2f64.powi(k as i32)
                * outer
                    .kronecker(&id4)
                    .kronecker(&inner)
                    .kronecker(&id4);
        }
        torque += geom.circumradius * &q * pattern;
    }

    Ok(AssemblyLinearMaps {
        level,
        force,
        torque,
        reaction,
        rate_coupling: reps as f64 * elementary.rate_coupling,
        trim_speed: elementary.trim_speed,
        uniform_trim: true,
    })
}

/// Norm growth of the maps across levels, with the matching inertia growth
/// and the resulting torque-response time-constant trend.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GrowthReport {
    pub levels: Vec<usize>,
    pub force_norms: Vec<f64>,
    pub torque_norms: Vec<f64>,
    /// force_norms[i+1] / force_norms[i]; exactly 4 (block repetition).
    pub force_ratios: Vec<f64>,
    /// torque_norms[i+1] / torque_norms[i]; approaches 8 from above.
    pub torque_ratios: Vec<f64>,
    /// Infinity norms of the assembly inertia tensor; the ratio approaches
    /// 16, so inertia outgrows control authority.
    pub inertia_norms: Vec<f64>,
    /// Ratio of consecutive (inertia / torque-map) quotients; the angular
    /// response time constant roughly doubles per level, approaching
    /// 16/8 = 2.
    pub response_time_ratios: Vec<f64>,
}

pub fn growth_report(
    model: &LinearModel,
    params: &TetracopterParams,
    geom: &TetrahedronGeometry,
    max_level: usize,
) -> Result<GrowthReport> {
    let elementary = elementary_maps(model, params)?;
    let body = RigidBodyParams::new(params.mass, params.inertia)?;
    let mut levels = Vec::new();
    let mut force_norms = Vec::new();
    let mut torque_norms = Vec::new();
    let mut inertia_norms = Vec::new();
    let mut maps = elementary;
    for level in 0..=max_level {
        levels.push(level);
        force_norms.push(inf_norm(&maps.force));
        torque_norms.push(inf_norm(&maps.torque));
        let j = closed_form(&body, geom.circumradius, level)?;
        let j_norm = (0..3)
            .map(|i| j.inertia.row(i).iter().map(|v| v.abs()).sum())
            .fold(0.0, f64::max);
        inertia_norms.push(j_norm);
        if level < max_level {
            maps = recurse_maps(&maps, geom)?;
        }
    }
    let ratio = |v: &[f64]| -> Vec<f64> { v.windows(2).map(|w| w[1] / w[0]).collect() };
    let force_ratios = ratio(&force_norms);
    let torque_ratios = ratio(&torque_norms);
    let quotients: Vec<f64> = inertia_norms
        .iter()
        .zip(&torque_norms)
        .map(|(j, t)| j / t)
        .collect();
    let response_time_ratios = ratio(&quotients);
    Ok(GrowthReport {
        levels,
        force_norms,
        torque_norms,
        force_ratios,
        torque_ratios,
        inertia_norms,
        response_time_ratios,
    })
}
