//! Propeller configurations of the four-face module.
//!
//! Each face carries one propeller with two independent choices, thrust
//! pushed inward or outward along the face normal and clockwise or
//! counter-clockwise spin, giving 256 raw configurations. Hover candidates
//! must produce zero net torque and nonzero net force at equal rotor
//! speeds; the survivors fall into three geometric classes determined by
//! how many faces push outward.

use nalgebra::Vector3;
use serde::Serialize;

use crate::geometry::TetrahedronGeometry;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThrustDirection {
    Inward,
    Outward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spin {
    Cw,
    Ccw,
}

/// One propeller: thrust sense along its face normal and spin handedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FaceProp {
    pub thrust: ThrustDirection,
    pub spin: Spin,
}

/// A full module configuration, one propeller per face. Face i is the face
/// opposite vertex i, with outward normal -p_i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PropConfig {
    pub faces: [FaceProp; 4],
}

impl PropConfig {
    /// Thrust sign per face: +1 pushes outward along the face normal.
    pub fn thrust_signs(&self) -> [f64; 4] {
        self.faces.map(|f| match f.thrust {
            ThrustDirection::Outward => 1.0,
            ThrustDirection::Inward => -1.0,
        })
    }

    /// Reaction-torque sign per face: the drag torque on the frame points
    /// along the outward normal for clockwise spin (viewed from outside).
    pub fn torque_signs(&self) -> [f64; 4] {
        self.faces.map(|f| match f.spin {
            Spin::Cw => 1.0,
            Spin::Ccw => -1.0,
        })
    }

    pub fn outward_count(&self) -> usize {
        self.faces
            .iter()
            .filter(|f| f.thrust == ThrustDirection::Outward)
            .count()
    }

    /// Common spin handedness, if all four propellers share one.
    pub fn common_spin(&self) -> Option<Spin> {
        let s = self.faces[0].spin;
        self.faces.iter().all(|f| f.spin == s).then_some(s)
    }

    /// The same thrust pattern with every spin reversed.
    pub fn spin_reversed(&self) -> Self {
        Self {
            faces: self.faces.map(|f| FaceProp {
                thrust: f.thrust,
                spin: match f.spin {
                    Spin::Cw => Spin::Ccw,
                    Spin::Ccw => Spin::Cw,
                },
            }),
        }
    }

    /// Applies a face permutation: the propeller on face i moves to face
    /// perm[i].
    pub fn permuted(&self, perm: &[usize; 4]) -> Self {
        let mut faces = self.faces;
        for i in 0..4 {
            faces[perm[i]] = self.faces[i];
        }
        Self { faces }
    }
}

/// All 256 distinct configurations, in a fixed enumeration order.
pub fn enumerate_all() -> Vec<PropConfig> {
    let options = [
        FaceProp { thrust: ThrustDirection::Inward, spin: Spin::Cw },
        FaceProp { thrust: ThrustDirection::Inward, spin: Spin::Ccw },
        FaceProp { thrust: ThrustDirection::Outward, spin: Spin::Cw },
        FaceProp { thrust: ThrustDirection::Outward, spin: Spin::Ccw },
    ];
    let mut out = Vec::with_capacity(256);
    for a in options {
        for b in options {
            for c in options {
                for d in options {
                    out.push(PropConfig { faces: [a, b, c, d] });
                }
            }
        }
    }
    out
}

/// Net force and torque about the centroid at per-propeller thrust
/// `thrust` and reaction-torque-to-thrust length ratio `torque_ratio`.
/// Thrust lines pass through the face centers along the face normals, so
/// each propeller's thrust moment about the centroid vanishes identically
/// and only the reaction torques survive.
pub fn net_wrench(
    config: &PropConfig,
    geometry: &TetrahedronGeometry,
    thrust: f64,
    torque_ratio: f64,
) -> (Vec3, Vec3) {
    per_rotor_wrench(config, geometry, &[thrust; 4], torque_ratio)
}

/// Net force and torque with an individual thrust per propeller.
pub fn per_rotor_wrench(
    config: &PropConfig,
    geometry: &TetrahedronGeometry,
    thrusts: &[f64; 4],
    torque_ratio: f64,
) -> (Vec3, Vec3) {
    let t = config.thrust_signs();
    let q = config.torque_signs();
    let mut force = Vector3::zeros();
    let mut torque = Vector3::zeros();
    for i in 0..4 {
        let normal = -geometry.unit_vectors[i];
        let center = (geometry.circumradius / 3.0) * normal;
        let f = thrusts[i] * t[i] * normal;
        force += f;
        torque += center.cross(&f) + torque_ratio * thrusts[i] * q[i] * normal;
    }
    (force, torque)
}

/// A configuration that can hover: zero net torque and nonzero net force
/// at equal speeds.
#[derive(Debug, Clone, Serialize)]
pub struct Survivor {
    pub config: PropConfig,
    /// Unit net-thrust direction in the body frame; hovering aligns it
    /// against gravity, and it is unique because the net force is nonzero.
    pub attitude: [f64; 3],
    /// Net thrust magnitude per unit propeller thrust.
    pub lift_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterOutcome {
    /// Zero net torque at equal speeds (all spins share a handedness).
    pub torque_balanced: Vec<PropConfig>,
    /// Torque-balanced and producing nonzero net force.
    pub survivors: Vec<Survivor>,
}

/// Equal-speed equilibrium filter. The torque condition is decided on the
/// sign structure alone: the four face normals sum to zero and any three
/// are linearly independent, so a signed sum of them vanishes exactly when
/// all signs agree, independent of the torque-to-thrust ratio.
pub fn filter_equilibrium(configs: &[PropConfig]) -> Result<FilterOutcome> {
    let geometry = TetrahedronGeometry::unit()?;
    let mut torque_balanced = Vec::new();
    let mut survivors = Vec::new();
    for &config in configs {
        if config.common_spin().is_none() {
            continue;
        }
        torque_balanced.push(config);
        let (force, _) = net_wrench(&config, &geometry, 1.0, 1.0);
        let magnitude = force.norm();
        // The same kernel argument decides the force condition: all-equal
        // thrust signs sum the normals to zero.
        let t = config.thrust_signs();
        if t.iter().all(|&v| v == t[0]) {
            continue;
        }
        let attitude = force / magnitude;
        survivors.push(Survivor {
            config,
            attitude: [attitude.x, attitude.y, attitude.z],
            lift_factor: magnitude,
        });
    }
    Ok(FilterOutcome {
        torque_balanced,
        survivors,
    })
}

/// A symmetry class of hover-capable configurations sharing one spin
/// handedness: an orbit of the rotation group, labeled by how many faces
/// push outward.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigClass {
    pub representative: PropConfig,
    pub representative_attitude: [f64; 3],
    pub class_size: usize,
    pub outward_count: usize,
    pub lift_factor: f64,
    pub members: Vec<PropConfig>,
}

/// The twelve rotations of the module expressed as even face permutations.
pub fn rotation_permutations() -> Vec<[usize; 4]> {
    let mut perms = Vec::with_capacity(12);
    let mut items = [0usize, 1, 2, 3];
    permute_collect(&mut items, 0, &mut perms);
    perms.retain(|p| permutation_parity(p) == 0);
    perms
}

fn permute_collect(items: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == 4 {
        out.push(*items);
        return;
    }
    for i in k..4 {
        items.swap(k, i);
        permute_collect(items, k + 1, out);
        items.swap(k, i);
    }
}

fn permutation_parity(perm: &[usize; 4]) -> usize {
    let mut inversions = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2
}

/// Groups the survivors of one spin handedness into rotation-group orbits.
/// Exactly three classes result, with outward counts 3, 1, 2 and sizes
/// 4, 4, 6.
pub fn reduce_symmetry(survivors: &[Survivor], spin: Spin) -> Result<Vec<ConfigClass>> {
    let filtered: Vec<&Survivor> = survivors
        .iter()
        .filter(|s| s.config.common_spin() == Some(spin))
        .collect();
    if filtered.is_empty() {
        return Err(Error::Domain(format!(
            "no survivors with common spin {spin:?}"
        )));
    }
    let perms = rotation_permutations();
    let mut classes: Vec<ConfigClass> = Vec::new();
    let mut assigned: Vec<bool> = vec![false; filtered.len()];
    for i in 0..filtered.len() {
        if assigned[i] {
            continue;
        }
        // Orbit closure of survivor i under the rotation group.
        let mut members = Vec::new();
        for perm in &perms {
            let image = filtered[i].config.permuted(perm);
            if !members.contains(&image) {
                members.push(image);
            }
        }
        let mut lift = filtered[i].lift_factor;
        for (j, other) in filtered.iter().enumerate() {
            if members.contains(&other.config) {
                if assigned[j] && j < i {
                    return Err(Error::Domain(
                        "rotation orbits do not partition the survivors".to_string(),
                    ));
                }
                assigned[j] = true;
                // Rotations preserve the net-thrust magnitude.
                if (other.lift_factor - lift).abs() > 1e-12 * lift.max(1.0) {
                    return Err(Error::Domain(
                        "lift factor varies within a rotation orbit".to_string(),
                    ));
                }
                lift = other.lift_factor;
            }
        }
        classes.push(ConfigClass {
            representative: filtered[i].config,
            representative_attitude: filtered[i].attitude,
            class_size: members.len(),
            outward_count: filtered[i].config.outward_count(),
            lift_factor: lift,
            members,
        });
    }
    Ok(classes)
}

/// Full pipeline report for one spin handedness.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigReport {
    pub total: usize,
    pub torque_balanced: usize,
    pub hover_capable: usize,
    pub per_spin_class: usize,
    pub classes: Vec<ConfigClass>,
}

pub fn classify(spin: Spin) -> Result<ConfigReport> {
    let all = enumerate_all();
    let outcome = filter_equilibrium(&all)?;
    let classes = reduce_symmetry(&outcome.survivors, spin)?;
    let per_spin_class = outcome
        .survivors
        .iter()
        .filter(|s| s.config.common_spin() == Some(spin))
        .count();
    Ok(ConfigReport {
        total: all.len(),
        torque_balanced: outcome.torque_balanced.len(),
        hover_capable: outcome.survivors.len(),
        per_spin_class,
        classes,
    })
}
