//! Mass-property recursion for self-similar assemblies.
//!
//! Composing four level-n bodies at the tetrahedral offsets multiplies the
//! mass by four and adds an isotropic parallel-axis term: the four offset
//! directions satisfy sum(I - p p^T) = (8/3) I, so orientation information
//! never enters the displacement term.

use nalgebra::Matrix3;

use crate::{Error, Mat3, Result};

/// Largest supported composition level; 4^30 already saturates f64 exactness.
pub const MAX_LEVEL: usize = 30;

/// Mass and centroidal inertia of a rigid body.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBodyParams {
    pub mass: f64,
    /// Centroidal inertia tensor [kg m^2], symmetric positive semidefinite
    /// with principal moments satisfying the triangle inequality.
    pub inertia: Mat3,
}

impl RigidBodyParams {
    pub fn new(mass: f64, inertia: Mat3) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Domain(format!(
                "mass must be positive and finite, got {mass}"
            )));
        }
        let scale = inertia.norm().max(1.0);
        if (inertia - inertia.transpose()).norm() > 1e-9 * scale {
            return Err(Error::Domain(
                "inertia tensor must be symmetric".to_string(),
            ));
        }
        let mut eig: Vec<f64> = inertia
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        if eig[0] < -1e-9 * scale {
            return Err(Error::Domain(format!(
                "inertia tensor must be positive semidefinite (min eigenvalue {:.3e})",
                eig[0]
            )));
        }
        if eig[0] + eig[1] < eig[2] * (1.0 - 1e-9) {
            return Err(Error::Domain(format!(
                "principal moments {eig:?} violate the triangle inequality"
            )));
        }
        Ok(Self { mass, inertia })
    }

    /// Uniform (isotropic) inertia diag(j, j, j).
    pub fn isotropic(mass: f64, j: f64) -> Result<Self> {
        Self::new(mass, Matrix3::identity() * j)
    }
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::ResourceLimit(format!(
            "level {level} exceeds the supported maximum of {MAX_LEVEL}"
        )));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "circumradius must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

/// Total mass of a level-n assembly built from elementary mass `m`.
pub fn assembly_mass(m: f64, level: usize) -> Result<f64> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    check_level(level)?;
    Ok(4f64.powi(level as i32) * m)
}

/// One composition step: four copies of the level-`level` body `current`
/// placed at offsets 2^level * r * p_i.
///
/// `current.mass` must be the full mass of the level-`level` assembly; the
/// parallel-axis term is (8/3) * 4^level * r^2 * current.mass * I.
pub fn compose_step(current: &RigidBodyParams, level: usize, r: f64) -> Result<RigidBodyParams> {
    check_level(level)?;
    check_radius(r)?;
    let shift = 8.0 / 3.0 * 4f64.powi(level as i32) * r * r * current.mass;
    Ok(RigidBodyParams {
        mass: 4.0 * current.mass,
        inertia: 4.0 * current.inertia + Matrix3::identity() * shift,
    })
}

/// Closed form for the level-n assembly of elementary body `elementary`:
/// J_n = (2/9) 16^n m r^2 I + 4^n (J0 - (2/9) m r^2 I), mass 4^n m.
pub fn closed_form(elementary: &RigidBodyParams, r: f64, level: usize) -> Result<RigidBodyParams> {
    check_level(level)?;
    check_radius(r)?;
    let limit = normalized_limit(elementary, r);
    let p16 = 16f64.powi(level as i32);
    let p4 = 4f64.powi(level as i32);
    Ok(RigidBodyParams {
        mass: p4 * elementary.mass,
        inertia: p16 * limit + p4 * (elementary.inertia - limit),
    })
}

/// Limit of J_n / 16^n: the isotropic tensor (2/9) m r^2 I. The elementary
/// shape is forgotten because the 4^n term is dominated by the 16^n term.
pub fn normalized_limit(elementary: &RigidBodyParams, r: f64) -> Mat3 {
    Matrix3::identity() * (2.0 / 9.0 * elementary.mass * r * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_assembly, make_tetrahedron};
    use crate::Vec3;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn default_body() -> RigidBodyParams {
        RigidBodyParams::isotropic(0.740, 0.0111).unwrap()
    }

    fn prototype_r() -> f64 {
        make_tetrahedron(0.24455).unwrap().circumradius
    }

    /// Physical inertia tensor from a random rigid point cloud. Point-mass
    /// tensors automatically satisfy symmetry, PSD, and triangle bounds.
    fn point_cloud_body(points: &[(f64, Vec3)]) -> RigidBodyParams {
        let mass: f64 = points.iter().map(|(m, _)| m).sum();
        let com: Vec3 = points.iter().map(|(m, p)| *m * p).sum::<Vec3>() / mass;
        let mut j = Mat3::zeros();
        for (m, p) in points {
            let d = p - com;
            j += *m * (Mat3::identity() * d.norm_squared() - d * d.transpose());
        }
        RigidBodyParams::new(mass, j).unwrap()
    }

    #[test]
    fn frozen_first_step_and_limit() {
        // Hand-evaluated: J1 = 4*0.0111 + (8/3)*0.740*r^2 with
        // r = 0.14975567914940652, and the limit (2/9)*0.740*r^2.
        let body = default_body();
        let r = prototype_r();
        let j1 = compose_step(&body, 0, r).unwrap();
        assert_abs_diff_eq!(j1.inertia[(0, 0)], 0.08865547984999997, epsilon = 1e-12);
        assert_abs_diff_eq!(j1.mass, 2.96, epsilon = 1e-12);
        let lim = normalized_limit(&body, r);
        assert_abs_diff_eq!(lim[(0, 0)], 0.0036879566541666645, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_matches_iterated_recursion() {
        let r = prototype_r();
        let body = default_body();
        let mut current = body.clone();
        for level in 0..=10 {
            let closed = closed_form(&body, r, level).unwrap();
            let scale = closed.inertia.norm();
            assert!((closed.inertia - current.inertia).norm() <= 1e-12 * scale);
            assert_relative_eq!(closed.mass, current.mass, epsilon = 1e-12);
            current = compose_step(&current, level, r).unwrap();
        }
    }

    #[test]
    fn recursion_matches_parallel_axis_sum_over_generated_poses() {
        // Independent oracle: sum J0 + m(|d|^2 I - d d^T) over every cell
        // center of the generated assembly.
        let geom = make_tetrahedron(0.24455).unwrap();
        let body = default_body();
        for depth in 0..=4 {
            let asm = generate_assembly(&geom, depth).unwrap();
            let mut oracle = Mat3::zeros();
            for c in &asm.module_poses {
                oracle += body.inertia
                    + body.mass * (Mat3::identity() * c.norm_squared() - c * c.transpose());
            }
            let closed = closed_form(&body, geom.circumradius, depth).unwrap();
            let scale = oracle.norm().max(1e-30);
            assert!(
                (closed.inertia - oracle).norm() <= 1e-9 * scale,
                "depth {depth}: closed form deviates from parallel-axis oracle"
            );
        }
    }

    #[test]
    fn frozen_level_three_value() {
        let closed = closed_form(&default_body(), prototype_r(), 3).unwrap();
        assert_relative_eq!(closed.inertia[(0, 0)], 15.580241229599991, epsilon = 1e-12);
        assert_relative_eq!(closed.mass, 47.36, epsilon = 1e-12);
    }

    #[test]
    fn normalized_inertia_converges_to_limit() {
        let body = point_cloud_body(&[
            (0.2, Vec3::new(0.1, 0.0, -0.05)),
            (0.3, Vec3::new(-0.07, 0.12, 0.0)),
            (0.25, Vec3::new(0.0, -0.1, 0.09)),
        ]);
        let r = 0.2;
        let lim = normalized_limit(&body, r);
        let mut prev_err = f64::INFINITY;
        for level in 1..=8 {
            let jn = closed_form(&body, r, level).unwrap();
            let err = (jn.inertia / 16f64.powi(level as i32) - lim).norm();
            assert!(err < prev_err, "normalized error must shrink");
            prev_err = err;
        }
        assert!(prev_err < 1e-4 * lim.norm());
    }

    #[test]
    fn assembly_mass_values_and_guard() {
        assert_relative_eq!(assembly_mass(0.740, 1).unwrap(), 2.96, epsilon = 1e-12);
        assert_relative_eq!(assembly_mass(0.740, 2).unwrap(), 11.84, epsilon = 1e-12);
        assert!(matches!(
            assembly_mass(0.740, MAX_LEVEL + 1),
            Err(Error::ResourceLimit(_))
        ));
        assert!(assembly_mass(-1.0, 2).is_err());
    }

    #[test]
    fn constructor_rejects_unphysical_tensors() {
        assert!(RigidBodyParams::new(0.0, Mat3::identity()).is_err());
        let mut asym = Mat3::identity();
        asym[(0, 1)] = 0.5;
        assert!(RigidBodyParams::new(1.0, asym).is_err());
        let indefinite = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -0.5));
        assert!(RigidBodyParams::new(1.0, indefinite).is_err());
        // Principal moments 1, 1, 5 break the triangle inequality.
        let thin = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, 5.0));
        assert!(RigidBodyParams::new(1.0, thin).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_equals_recursion_for_random_point_clouds(
            seeds in proptest::collection::vec((0.05..2.0f64, -0.5..0.5f64, -0.5..0.5f64, -0.5..0.5f64), 3..6),
            r in 0.05..5.0f64,
            depth in 0usize..7,
        ) {
            let points: Vec<(f64, Vec3)> = seeds
                .iter()
                .map(|&(m, x, y, z)| (m, Vec3::new(x, y, z)))
                .collect();
            let body = point_cloud_body(&points);
            let mut current = body.clone();
            for level in 0..depth {
                current = compose_step(&current, level, r).unwrap();
            }
            let closed = closed_form(&body, r, depth).unwrap();
            let scale = closed.inertia.norm().max(1e-12);
            prop_assert!((closed.inertia - current.inertia).norm() <= 1e-9 * scale);
            prop_assert!((closed.mass - current.mass).abs() <= 1e-9 * closed.mass);
        }
    }
}
