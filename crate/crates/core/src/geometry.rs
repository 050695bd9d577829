//! Regular-tetrahedron primitives and the self-similar assembly generator.
//!
//! A depth-n assembly is built from 4^n congruent tetrahedral cells. Each
//! cell carries one rotor disk inscribed in its base face; cells recurse by
//! translating a depth-(n-1) assembly along the four vertex directions with
//! step 2^(n-1) times the cell circumradius. Neighboring copies then share
//! edge-midpoint vertices and the projected rotor disks tile the base
//! incircle pattern at every depth.

use std::collections::HashMap;

use serde::Serialize;

use crate::{Error, Result, Vec3};

/// Largest supported recursion depth; 4^10 cells is already ~1M poses.
pub const MAX_DEPTH: usize = 10;

/// Fraction of the base-face area covered by the projected rotor disks.
/// Invariant across depth: pi / (3 sqrt(3)).
pub const DISK_AREA_RATIO: f64 = std::f64::consts::PI / (3.0 * 1.7320508075688772);

/// Upper bound for any circle packing of the plane (hexagonal packing
/// density expressed against the triangle tiling): 2 pi / (3 sqrt(3)).
pub const HEX_PACKING_BOUND: f64 = 2.0 * DISK_AREA_RATIO;

/// A regular tetrahedron in canonical orientation: centroid at the origin,
/// one vertex on +z, one base edge parallel to +x.
#[derive(Debug, Clone, PartialEq)]
pub struct TetrahedronGeometry {
    /// Edge length [m].
    pub edge_length: f64,
    /// Circumradius r = (sqrt(6)/4) * edge [m].
    pub circumradius: f64,
    /// Vertex height above the base plane: h = (sqrt(6)/3) * edge [m].
    pub height: f64,
    /// Unit vectors from centroid to the four vertices. p[3] is the apex;
    /// p[0..3] point to base vertices at azimuths 90, 210, 330 degrees.
    pub unit_vectors: [Vec3; 4],
}

impl TetrahedronGeometry {
    /// The canonical tetrahedron of unit edge length.
    pub fn unit() -> crate::Result<Self> {
        make_tetrahedron(1.0)
    }

    /// Vertex positions of a cell of this size centered at `center`.
    pub fn vertices_at(&self, center: Vec3) -> [Vec3; 4] {
        self.unit_vectors
            .map(|p| center + self.circumradius * p)
    }

    /// Centroid of the base face of a cell centered at `center` (the rotor
    /// mount point of an elementary cell).
    pub fn base_centroid_at(&self, center: Vec3) -> Vec3 {
        center - Vec3::new(0.0, 0.0, self.circumradius / 3.0)
    }
}

/// Characteristic lengths of a module with edge `a`, as used when checking
/// a physical frame against the ideal layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TetraDimensions {
    /// Distance from a base corner to the nearest rotor center: a / sqrt(3).
    pub x: f64,
    /// Lateral offset of a rotor center from the base edge, equal to the
    /// inscribed rotor radius: a / (2 sqrt(3)).
    pub d: f64,
    /// Module height: a sqrt(6) / 3.
    pub h: f64,
    /// Circumradius: a sqrt(6) / 4.
    pub circumradius: f64,
}

/// One rotor disk of an assembly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorDisk {
    /// Disk center (base-face centroid of the owning cell) [m].
    pub center: Vec3,
    /// Spin handedness about +z: +1 counter-clockwise, -1 clockwise.
    pub spin: i8,
}

/// A depth-n self-similar assembly of tetrahedral cells.
#[derive(Debug, Clone)]
pub struct FractalAssembly {
    pub depth: usize,
    /// Edge length of one cell [m].
    pub edge_length: f64,
    /// Cell centers; length 4^depth, centroid at the origin.
    pub module_poses: Vec<Vec3>,
    /// One rotor per cell, in pose order. Spins alternate +,-,+,- within
    /// each innermost group of four, which balances handedness for n >= 1.
    pub rotors: Vec<RotorDisk>,
    /// Common rotor disk radius: edge / (2 sqrt(3)) [m].
    pub rotor_radius: f64,
}

impl FractalAssembly {
    /// Edge length of the bounding tetrahedron: 2^depth * cell edge.
    pub fn bounding_edge(&self) -> f64 {
        (1u64 << self.depth) as f64 * self.edge_length
    }
}

/// Disk-coverage summary of an assembly's top view.
#[derive(Debug, Clone, Serialize)]
pub struct DiskReport {
    pub rotor_count: usize,
    /// Sum of projected rotor disk areas [m^2].
    pub total_disk_area: f64,
    /// Area of the bounding base triangle [m^2].
    pub base_area: f64,
    /// total_disk_area / base_area; equals pi/(3 sqrt(3)) at every depth.
    pub area_ratio: f64,
    /// Density of the hexagonal circle packing, for comparison.
    pub hex_packing_bound: f64,
    /// True if any two projected disks overlap beyond tolerance.
    pub overlap_found: bool,
    /// Smallest center distance among near pairs; 2*rotor_radius when disks
    /// are tangent. Infinity for a single rotor.
    pub min_center_distance: f64,
}

/// Builds the canonical regular tetrahedron of the given edge length.
pub fn make_tetrahedron(edge_length: f64) -> Result<TetrahedronGeometry> {
    if !(edge_length.is_finite() && edge_length > 0.0) {
        return Err(Error::Domain(format!(
            "edge length must be positive and finite, got {edge_length}"
        )));
    }
    let s = 2.0 * std::f64::consts::SQRT_2 / 3.0;
    let half = 0.5 * s;
    let sx = s * 3.0_f64.sqrt() / 2.0;
    let z = -1.0 / 3.0;
    let unit_vectors = [
        Vec3::new(0.0, s, z),
        Vec3::new(-sx, -half, z),
        Vec3::new(sx, -half, z),
        Vec3::new(0.0, 0.0, 1.0),
    ];
    Ok(TetrahedronGeometry {
        edge_length,
        circumradius: 6.0_f64.sqrt() / 4.0 * edge_length,
        height: 6.0_f64.sqrt() / 3.0 * edge_length,
        unit_vectors,
    })
}

/// Characteristic lengths for a module of edge `a`.
pub fn derive_dimensions(edge_length: f64) -> Result<TetraDimensions> {
    let geom = make_tetrahedron(edge_length)?;
    let sqrt3 = 3.0_f64.sqrt();
    Ok(TetraDimensions {
        x: edge_length / sqrt3,
        d: edge_length / (2.0 * sqrt3),
        h: geom.height,
        circumradius: geom.circumradius,
    })
}

/// Generates the depth-n assembly of `geom`-sized cells.
///
/// Cell order: the pose list of depth n is the concatenation, over the four
/// vertex directions, of the depth-(n-1) list shifted by 2^(n-1)*r*p_i, so
/// the innermost (elementary) index is `k % 4`.
pub fn generate_assembly(geom: &TetrahedronGeometry, depth: usize) -> Result<FractalAssembly> {
    if depth > MAX_DEPTH {
        return Err(Error::ResourceLimit(format!(
            "depth {depth} exceeds the supported maximum of {MAX_DEPTH}"
        )));
    }
    let r = geom.circumradius;
    let mut poses = vec![Vec3::zeros()];
    for level in 0..depth {
        let step = (1u64 << level) as f64 * r;
        let mut next = Vec::with_capacity(poses.len() * 4);
        for p_i in &geom.unit_vectors {
            let shift = step * p_i;
            next.extend(poses.iter().map(|c| shift + c));
        }
        poses = next;
    }
    const SPIN_PATTERN: [i8; 4] = [1, -1, 1, -1];
    let rotors = poses
        .iter()
        .enumerate()
        .map(|(k, &c)| RotorDisk {
            center: geom.base_centroid_at(c),
            spin: SPIN_PATTERN[k % 4],
        })
        .collect();
    Ok(FractalAssembly {
        depth,
        edge_length: geom.edge_length,
        module_poses: poses,
        rotors,
        rotor_radius: geom.edge_length / (2.0 * 3.0_f64.sqrt()),
    })
}

/// Computes disk-coverage statistics and checks every projected disk pair
/// for overlap. Pairs are found through a uniform grid of bin size equal to
/// the disk diameter, so the check is exact while staying near-linear.
pub fn rotor_disk_report(assembly: &FractalAssembly) -> DiskReport {
    let radius = assembly.rotor_radius;
    let diameter = 2.0 * radius;
    let n = assembly.rotors.len();

    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, rotor) in assembly.rotors.iter().enumerate() {
        let key = (
            (rotor.center.x / diameter).floor() as i64,
            (rotor.center.y / diameter).floor() as i64,
        );
        grid.entry(key).or_default().push(idx);
    }

    let mut min_center_distance = f64::INFINITY;
    let mut overlap_found = false;
    // Two centers closer than one diameter always land in the same or an
    // adjacent bin, so scanning the 3x3 neighborhood misses nothing.
    for (&(bx, by), cell) in &grid {
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                let Some(other) = grid.get(&(bx + dx, by + dy)) else {
                    continue;
                };
                for &i in cell {
                    for &j in other {
                        if j <= i {
                            continue;
                        }
                        let a = assembly.rotors[i].center;
                        let b = assembly.rotors[j].center;
                        let d2 = (a.x - b.x).powi(2) + (a.y - b.y).powi(2);
                        let d = d2.sqrt();
                        if d < min_center_distance {
                            min_center_distance = d;
                        }
                        if d < diameter - 1e-12 {
                            overlap_found = true;
                        }
                    }
                }
            }
        }
    }

    let total_disk_area = n as f64 * std::f64::consts::PI * radius * radius;
    let base_edge = assembly.bounding_edge();
    let base_area = 3.0_f64.sqrt() / 4.0 * base_edge * base_edge;
    DiskReport {
        rotor_count: n,
        total_disk_area,
        base_area,
        area_ratio: total_disk_area / base_area,
        hex_packing_bound: HEX_PACKING_BOUND,
        overlap_found,
        min_center_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn unit_vectors_satisfy_tetrahedral_identities() {
        let geom = make_tetrahedron(1.0).unwrap();
        let sum: Vec3 = geom.unit_vectors.iter().sum();
        assert_abs_diff_eq!(sum.norm(), 0.0, epsilon = 1e-15);
        for (i, p) in geom.unit_vectors.iter().enumerate() {
            assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-15);
            for q in geom.unit_vectors.iter().skip(i + 1) {
                assert_abs_diff_eq!(p.dot(q), -1.0 / 3.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn canonical_orientation_has_base_edge_along_x() {
        let geom = make_tetrahedron(1.0).unwrap();
        let v = geom.vertices_at(Vec3::zeros());
        // Base vertices 1 and 2 share the same y and z: edge parallel to +x.
        assert_abs_diff_eq!(v[1].y, v[2].y, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1].z, v[2].z, epsilon = 1e-15);
        assert_abs_diff_eq!((v[1] - v[2]).norm(), 1.0, epsilon = 1e-14);
        // Apex on +z.
        assert_abs_diff_eq!(v[3].x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[3].y, 0.0, epsilon = 1e-15);
        assert!(v[3].z > 0.0);
    }

    #[test]
    fn all_edges_have_unit_length() {
        let geom = make_tetrahedron(1.0).unwrap();
        let v = geom.vertices_at(Vec3::zeros());
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_relative_eq!((v[i] - v[j]).norm(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn frozen_dimensions_at_unit_and_prototype_edge() {
        // Independent closed forms: x = a/sqrt(3), d = a/(2 sqrt(3)),
        // h = a sqrt(6)/3, R = a sqrt(6)/4, evaluated by hand.
        let dims = derive_dimensions(1.0).unwrap();
        assert_abs_diff_eq!(dims.x, 0.5773502691896258, epsilon = 1e-12);
        assert_abs_diff_eq!(dims.d, 0.2886751345948129, epsilon = 1e-12);
        assert_abs_diff_eq!(dims.h, 0.8164965809277260, epsilon = 1e-12);
        assert_abs_diff_eq!(dims.circumradius, 0.6123724356957945, epsilon = 1e-12);

        let dims = derive_dimensions(0.24455).unwrap();
        assert_abs_diff_eq!(dims.x, 0.14119100833032297, epsilon = 1e-9);
        assert_abs_diff_eq!(dims.d, 0.07059550416516149, epsilon = 1e-9);
        assert_abs_diff_eq!(dims.h, 0.19967423886587538, epsilon = 1e-9);
        assert_abs_diff_eq!(dims.circumradius, 0.14975567914940652, epsilon = 1e-9);
    }

    #[test]
    fn assembly_counts_and_centroid() {
        let geom = make_tetrahedron(0.24455).unwrap();
        for depth in 0..=4 {
            let asm = generate_assembly(&geom, depth).unwrap();
            assert_eq!(asm.module_poses.len(), 4usize.pow(depth as u32));
            assert_eq!(asm.rotors.len(), asm.module_poses.len());
            let centroid: Vec3 =
                asm.module_poses.iter().sum::<Vec3>() / asm.module_poses.len() as f64;
            assert_abs_diff_eq!(centroid.norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn assembly_bounding_vertices_scale_as_power_of_two() {
        let geom = make_tetrahedron(0.24455).unwrap();
        let depth = 3;
        let asm = generate_assembly(&geom, depth).unwrap();
        let scale = (1u64 << depth) as f64;
        for p_i in &geom.unit_vectors {
            // The corner-most cell sits at (2^n - 1) r p_i and its outer
            // vertex lands exactly on the bounding tetrahedron vertex.
            let corner_pose = (scale - 1.0) * geom.circumradius * p_i;
            let found = asm
                .module_poses
                .iter()
                .any(|c| (c - corner_pose).norm() < 1e-12);
            assert!(found, "missing corner cell along {p_i:?}");
            let bounding_vertex = scale * geom.circumradius * p_i;
            let hit = asm.module_poses.iter().any(|c| {
                geom.vertices_at(*c)
                    .iter()
                    .any(|v| (v - bounding_vertex).norm() < 1e-12)
            });
            assert!(hit, "no cell vertex on bounding vertex along {p_i:?}");
        }
    }

    #[test]
    fn rotor_disks_are_tangent_at_depth_two() {
        let geom = make_tetrahedron(0.24455).unwrap();
        let asm = generate_assembly(&geom, 2).unwrap();
        // Brute-force oracle over all pairs, independent of the grid path.
        let mut min_d = f64::INFINITY;
        for i in 0..asm.rotors.len() {
            for j in (i + 1)..asm.rotors.len() {
                let a = asm.rotors[i].center;
                let b = asm.rotors[j].center;
                let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
                min_d = min_d.min(d);
            }
        }
        assert_relative_eq!(min_d, 2.0 * asm.rotor_radius, epsilon = 1e-12);
        let report = rotor_disk_report(&asm);
        assert!(!report.overlap_found);
        assert_relative_eq!(report.min_center_distance, min_d, epsilon = 1e-12);
    }

    #[test]
    fn disk_area_ratio_is_depth_invariant() {
        let geom = make_tetrahedron(0.24455).unwrap();
        for depth in 0..=4 {
            let asm = generate_assembly(&geom, depth).unwrap();
            let report = rotor_disk_report(&asm);
            assert_abs_diff_eq!(report.area_ratio, DISK_AREA_RATIO, epsilon = 1e-12);
            assert!(report.area_ratio < report.hex_packing_bound);
            assert!(!report.overlap_found);
        }
    }

    #[test]
    fn spins_are_balanced_for_positive_depth() {
        let geom = make_tetrahedron(1.0).unwrap();
        for depth in 1..=4 {
            let asm = generate_assembly(&geom, depth).unwrap();
            let ccw = asm.rotors.iter().filter(|r| r.spin == 1).count();
            assert_eq!(ccw * 2, asm.rotors.len());
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(make_tetrahedron(0.0).is_err());
        assert!(make_tetrahedron(-1.0).is_err());
        assert!(make_tetrahedron(f64::NAN).is_err());
        let geom = make_tetrahedron(1.0).unwrap();
        assert!(matches!(
            generate_assembly(&geom, MAX_DEPTH + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    proptest! {
        #[test]
        fn dimensions_scale_linearly(edge in 1e-3..1e3f64) {
            let base = derive_dimensions(1.0).unwrap();
            let dims = derive_dimensions(edge).unwrap();
            prop_assert!((dims.x - base.x * edge).abs() <= 1e-12 * edge);
            prop_assert!((dims.d - base.d * edge).abs() <= 1e-12 * edge);
            prop_assert!((dims.h - base.h * edge).abs() <= 1e-12 * edge);
            prop_assert!(
                (dims.circumradius - base.circumradius * edge).abs() <= 1e-12 * edge
            );
        }

        #[test]
        fn area_ratio_is_edge_invariant(edge in 1e-2..1e2f64, depth in 0usize..4) {
            let geom = make_tetrahedron(edge).unwrap();
            let asm = generate_assembly(&geom, depth).unwrap();
            let report = rotor_disk_report(&asm);
            prop_assert!((report.area_ratio - DISK_AREA_RATIO).abs() < 1e-11);
            prop_assert!(!report.overlap_found);
        }
    }
}
