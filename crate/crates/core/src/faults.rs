//! Motor-fault tolerance of the sixteen-rotor double-level assembly.
//!
//! Hover with failed rotors is a box-constrained least-squares problem:
//! squared rotor speeds must produce zero roll, pitch, and yaw moment while
//! carrying the full weight, each between zero and a thrust ceiling. The
//! search sweeps failure sets in ascending cardinality and reports the
//! smallest set that cannot hover.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::bvls::{self, BvlsProblem};
use crate::{Error, Result};

/// Default quadratic-blade coefficients: thrust k = rho C_L A r^2 / 2 and
/// reaction torque b = rho C_D A r^3 / 2 with C_L = 1, C_D = 0.06,
/// r = 63.5 mm, rho = 1.225 kg/m^3. Feasibility verdicts are invariant to
/// their absolute scale; only the torque/thrust ratio pattern matters.
pub const DEFAULT_K_LIFT: f64 = 3.128605949904793e-5;
pub const DEFAULT_K_DRAG: f64 = 1.191998866913726e-7;

/// Thrust-to-hover margin extrapolated from a bench measurement: 1.94x
/// weight at 75% throttle grows quadratically to 1.94 / 0.75^2 at full
/// throttle. At this margin one four-rotor failure pattern is yaw-limited,
/// so the minimum fatal set has four rotors.
pub const MEASURED_THRUST_MARGIN: f64 = 1.94 / (0.75 * 0.75);

/// Design thrust ceiling as a multiple of the per-rotor hover thrust.
/// Surviving every four-rotor failure requires a margin above ~4.0 (the
/// worst four-rotor pattern is yaw-limited just below it), and above ~8.0
/// a fifth failure also becomes survivable; 4.5 sits well inside the
/// interval where the minimum fatal set has exactly five rotors.
pub const DEFAULT_THRUST_MARGIN: f64 = 4.5;

/// One rotor of a planar allocation layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotor {
    /// Position in the body top view [m].
    pub x: f64,
    pub y: f64,
    /// Spin handedness: +1 counter-clockwise, -1 clockwise.
    pub spin: i8,
}

/// Planar rotor layout used for moment allocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RotorLayout {
    pub rotors: Vec<Rotor>,
    /// Thrust per squared speed [N s^2].
    pub k_lift: f64,
    /// Reaction torque per squared speed [N m s^2].
    pub k_drag: f64,
}

impl RotorLayout {
    /// The sixteen-rotor layout of the depth-2 assembly: four four-rotor
    /// modules, each keeping the elementary spin pattern. Coordinates are
    /// exact multiples of the module edge `a`.
    pub fn double_level(a: f64, k_lift: f64, k_drag: f64) -> Result<Self> {
        if !(a > 0.0 && k_lift > 0.0 && k_drag > 0.0) {
            return Err(Error::Domain(
                "edge and rotor coefficients must be positive".to_string(),
            ));
        }
        let s3 = 3.0_f64.sqrt();
        // (x/a, y/a, spin), numbered as in the moment expansion: rotors
        // 1..9 are the outer ring, 10..12 module tops, 13..16 the center
        // module.
        let table: [(f64, f64, i8); 16] = [
            (0.0, s3, 1),
            (-1.5, -s3 / 2.0, -1),
            (1.5, -s3 / 2.0, 1),
            (0.5, s3 / 2.0, 1),
            (-0.5, s3 / 2.0, -1),
            (-1.0, 0.0, 1),
            (-0.5, -s3 / 2.0, 1),
            (0.5, -s3 / 2.0, -1),
            (1.0, 0.0, 1),
            (0.0, 2.0 / s3, -1),
            (-1.0, -1.0 / s3, -1),
            (1.0, -1.0 / s3, -1),
            (0.0, 1.0 / s3, 1),
            (-0.5, -1.0 / (2.0 * s3), -1),
            (0.5, -1.0 / (2.0 * s3), 1),
            (0.0, 0.0, -1),
        ];
        Ok(Self {
            rotors: table
                .iter()
                .map(|&(x, y, spin)| Rotor {
                    x: a * x,
                    y: a * y,
                    spin,
                })
                .collect(),
            k_lift,
            k_drag,
        })
    }

    pub fn standard(a: f64) -> Result<Self> {
        Self::double_level(a, DEFAULT_K_LIFT, DEFAULT_K_DRAG)
    }

    /// Layout rotated about the body z-axis; spins are unchanged.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotors: self
                .rotors
                .iter()
                .map(|r| Rotor {
                    x: c * r.x - s * r.y,
                    y: s * r.x + c * r.y,
                    spin: r.spin,
                })
                .collect(),
            ..*self
        }
    }

    /// Mirror image across the y-z plane; handedness flips with the frame.
    pub fn mirrored(&self) -> Self {
        Self {
            rotors: self
                .rotors
                .iter()
                .map(|r| Rotor {
                    x: -r.x,
                    y: r.y,
                    spin: -r.spin,
                })
                .collect(),
            ..*self
        }
    }
}

/// Per-rotor thrust ceiling specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundSpec {
    /// Multiple of the per-rotor hover thrust for the given total mass.
    HoverMargin(f64),
    /// Absolute bound on squared rotor speed [rad^2/s^2].
    Absolute(f64),
}

/// Box-constrained hover allocation: rows are roll, pitch, yaw moment and
/// total thrust; variables are squared rotor speeds.
#[derive(Debug, Clone)]
pub struct FaultProblem {
    pub allocation: DMatrix<f64>,
    pub target: DVector<f64>,
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
    pub failed: Vec<usize>,
}

/// Builds the allocation for `total_mass` hovering on `layout` with the
/// given failure set pinned to zero.
pub fn build_allocation(
    layout: &RotorLayout,
    total_mass: f64,
    gravity: f64,
    bound: BoundSpec,
    failed: &[usize],
) -> Result<FaultProblem> {
    if !(total_mass > 0.0 && gravity > 0.0) {
        return Err(Error::Domain(
            "mass and gravity must be positive".to_string(),
        ));
    }
    let n = layout.rotors.len();
    for &f in failed {
        if f >= n {
            return Err(Error::Domain(format!(
                "failed rotor index {f} out of range (rotors: {n})"
            )));
        }
    }
    let mut allocation = DMatrix::zeros(4, n);
    for (i, r) in layout.rotors.iter().enumerate() {
        allocation[(0, i)] = layout.k_lift * r.y;
        allocation[(1, i)] = -layout.k_lift * r.x;
        allocation[(2, i)] = layout.k_drag * r.spin as f64;
        allocation[(3, i)] = layout.k_lift;
    }
    let weight = total_mass * gravity;
    let target = DVector::from_vec(vec![0.0, 0.0, 0.0, weight]);
    let ceiling = match bound {
        BoundSpec::HoverMargin(m) => {
            if !(m > 0.0) {
                return Err(Error::Domain(format!(
                    "thrust margin must be positive, got {m}"
                )));
            }
            m * weight / (n as f64 * layout.k_lift)
        }
        BoundSpec::Absolute(u) => {
            if !(u > 0.0) {
                return Err(Error::Domain(format!(
                    "absolute bound must be positive, got {u}"
                )));
            }
            u
        }
    };
    let mut upper = DVector::from_element(n, ceiling);
    for &f in failed {
        upper[f] = 0.0;
    }
    Ok(FaultProblem {
        allocation,
        target,
        lower: DVector::zeros(n),
        upper,
        failed: failed.to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct FaultSolution {
    /// Squared rotor speeds [rad^2/s^2].
    pub speeds_squared: DVector<f64>,
    /// ||allocation * f - target|| in physical units.
    pub residual_norm: f64,
    /// Residual relative to the weight target.
    pub relative_residual: f64,
    /// Hover achievable within bounds: relative residual below 1e-6.
    pub feasible: bool,
    /// First-order optimality of the normalized problem.
    pub kkt_residual: f64,
}

/// Solves one allocation. The problem is row/column normalized internally
/// (unit-box variables, unit-infinity-norm rows) so the reported KKT
/// residual is meaningful at any physical scale.
pub fn solve_allocation(problem: &FaultProblem) -> Result<FaultSolution> {
    let n = problem.allocation.ncols();
    let scale = problem.upper.amax().max(1e-30);
    let mut a = problem.allocation.clone() * scale;
    let mut b = problem.target.clone();
    for r in 0..a.nrows() {
        let row_scale = a.row(r).amax().max(1e-30);
        for c in 0..n {
            a[(r, c)] /= row_scale;
        }
        b[r] /= row_scale;
    }
    let lower = DVector::zeros(n);
    let upper = DVector::from_fn(n, |i, _| problem.upper[i] / scale);
    let normalized = BvlsProblem { a, b, lower, upper };
    let g_scale = (normalized.a.transpose() * &normalized.b).amax().max(1.0);
    let sol = bvls::solve_with_tol(&normalized, 1e-12 * g_scale)?;

    let speeds_squared = sol.x * scale;
    let residual_norm = (&problem.allocation * &speeds_squared - &problem.target).norm();
    let relative_residual = residual_norm / problem.target.norm();
    Ok(FaultSolution {
        speeds_squared,
        residual_norm,
        relative_residual,
        feasible: relative_residual < 1e-6,
        kkt_residual: sol.kkt_residual,
    })
}

/// Convenience wrapper: can the vehicle hover with this failure set?
pub fn is_feasible(
    layout: &RotorLayout,
    total_mass: f64,
    gravity: f64,
    bound: BoundSpec,
    failed: &[usize],
) -> Result<bool> {
    let problem = build_allocation(layout, total_mass, gravity, bound, failed)?;
    Ok(solve_allocation(&problem)?.feasible)
}

/// Outcome counts for one failure cardinality.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CardinalityStats {
    pub cardinality: usize,
    pub feasible: usize,
    pub infeasible: usize,
    /// First infeasible set encountered, in enumeration order.
    pub first_witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct FaultSearchResult {
    /// Smallest cardinality with an infeasible failure set, if found
    /// within the cardinality limit.
    pub min_failures: Option<usize>,
    pub witness: Option<Vec<usize>>,
    pub stats: Vec<CardinalityStats>,
    pub solves: usize,
}

/// Exhaustive ascending-cardinality search. Every cardinality scanned is
/// scanned completely, so the per-cardinality counts are exact; the search
/// stops after the first cardinality containing an infeasible set.
pub fn search_min_failures(
    layout: &RotorLayout,
    total_mass: f64,
    gravity: f64,
    bound: BoundSpec,
    max_cardinality: usize,
) -> Result<FaultSearchResult> {
    let n = layout.rotors.len();
    if max_cardinality > n {
        return Err(Error::Domain(format!(
            "cardinality limit {max_cardinality} exceeds rotor count {n}"
        )));
    }
    let mut stats = Vec::new();
    let mut solves = 0;
    for card in 0..=max_cardinality {
        let mut feasible = 0;
        let mut infeasible = 0;
        let mut first_witness = None;
        for combo in (0..n).combinations(card) {
            solves += 1;
            if is_feasible(layout, total_mass, gravity, bound, &combo)? {
                feasible += 1;
            } else {
                infeasible += 1;
                if first_witness.is_none() {
                    first_witness = Some(combo);
                }
            }
        }
        let found = first_witness.clone();
        stats.push(CardinalityStats {
            cardinality: card,
            feasible,
            infeasible,
            first_witness,
        });
        if let Some(witness) = found {
            return Ok(FaultSearchResult {
                min_failures: Some(card),
                witness: Some(witness),
                stats,
                solves,
            });
        }
    }
    Ok(FaultSearchResult {
        min_failures: None,
        witness: None,
        stats,
        solves,
    })
}

/// Minimum failure count as a function of the thrust-margin bound.
pub fn margin_sensitivity(
    layout: &RotorLayout,
    total_mass: f64,
    gravity: f64,
    margins: &[f64],
    max_cardinality: usize,
) -> Result<Vec<(f64, Option<usize>)>> {
    margins
        .iter()
        .map(|&m| {
            search_min_failures(
                layout,
                total_mass,
                gravity,
                BoundSpec::HoverMargin(m),
                max_cardinality,
            )
            .map(|r| (m, r.min_failures))
        })
        .collect()
}

/// Samples random failure-set chains and checks that adding failures never
/// turns an infeasible set feasible. Returns the number of chains checked.
pub fn check_monotonicity<R: Rng>(
    layout: &RotorLayout,
    total_mass: f64,
    gravity: f64,
    bound: BoundSpec,
    rng: &mut R,
    chains: usize,
) -> Result<usize> {
    let n = layout.rotors.len();
    for _ in 0..chains {
        let mut set: Vec<usize> = Vec::new();
        let mut was_infeasible = false;
        while set.len() < n.min(8) {
            let next = loop {
                let c = rng.random_range(0..n);
                if !set.contains(&c) {
                    break c;
                }
            };
            set.push(next);
            set.sort_unstable();
            let feasible = is_feasible(layout, total_mass, gravity, bound, &set)?;
            if was_infeasible && feasible {
                return Err(Error::Domain(format!(
                    "monotonicity violated: {set:?} is feasible but a subset was not"
                )));
            }
            was_infeasible = !feasible;
        }
    }
    Ok(chains)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvls::projected_gradient;
    use crate::geometry::{generate_assembly, make_tetrahedron};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;

    const MASS: f64 = 3.1;
    const G: f64 = 9.81;

    fn layout() -> RotorLayout {
        RotorLayout::standard(0.24455).unwrap()
    }

    fn margin() -> BoundSpec {
        BoundSpec::HoverMargin(DEFAULT_THRUST_MARGIN)
    }

    #[test]
    fn layout_is_balanced_and_tangent() {
        let l = layout();
        assert_eq!(l.rotors.len(), 16);
        let sx: f64 = l.rotors.iter().map(|r| r.x).sum();
        let sy: f64 = l.rotors.iter().map(|r| r.y).sum();
        let ss: i32 = l.rotors.iter().map(|r| r.spin as i32).sum();
        assert_abs_diff_eq!(sx, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sy, 0.0, epsilon = 1e-12);
        assert_eq!(ss, 0);
        // Nearest rotors are exactly one disk diameter a/sqrt(3) apart.
        let mut min_d = f64::INFINITY;
        for i in 0..16 {
            for j in (i + 1)..16 {
                let (a, b) = (l.rotors[i], l.rotors[j]);
                min_d = min_d.min(((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt());
            }
        }
        assert_relative_eq!(min_d, 0.24455 / 3.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn layout_matches_generated_depth_two_assembly() {
        // The hand-numbered table must be the same rotor set (positions
        // and spins) that the fractal generator produces at depth 2.
        let l = layout();
        let geom = make_tetrahedron(0.24455).unwrap();
        let asm = generate_assembly(&geom, 2).unwrap();
        assert_eq!(asm.rotors.len(), 16);
        for rotor in &l.rotors {
            let matched = asm.rotors.iter().any(|g| {
                (g.center.x - rotor.x).abs() < 1e-9
                    && (g.center.y - rotor.y).abs() < 1e-9
                    && g.spin == rotor.spin
            });
            assert!(matched, "no generated rotor at ({}, {})", rotor.x, rotor.y);
        }
    }

    #[test]
    fn nominal_allocation_is_feasible_with_tight_kkt() {
        let problem = build_allocation(&layout(), MASS, G, margin(), &[]).unwrap();
        assert_relative_eq!(problem.target[3], 30.411, epsilon = 1e-12);
        let sol = solve_allocation(&problem).unwrap();
        assert!(sol.feasible);
        assert!(sol.kkt_residual < 1e-10, "kkt {}", sol.kkt_residual);
        assert!(sol.relative_residual < 1e-9);
    }

    #[test]
    fn solver_agrees_with_projected_gradient_on_fault_cases() {
        let l = layout();
        for failed in [vec![0usize], vec![0, 5], vec![1, 7, 12], vec![0, 3, 4, 9, 12]] {
            let problem = build_allocation(&l, MASS, G, margin(), &failed).unwrap();
            let sol = solve_allocation(&problem).unwrap();
            // First-order optimality holds whether or not hover is
            // achievable; failed rotors are box-pinned, not KKT-scored.
            assert!(sol.kkt_residual < 1e-10, "kkt {} for {failed:?}", sol.kkt_residual);
            // Normalize the same way for the oracle.
            let scale = problem.upper.amax();
            let mut a = problem.allocation.clone() * scale;
            let mut b = problem.target.clone();
            for r in 0..4 {
                let rs = a.row(r).amax();
                for c in 0..16 {
                    a[(r, c)] /= rs;
                }
                b[r] /= rs;
            }
            let norm_problem = BvlsProblem {
                a,
                b,
                lower: DVector::zeros(16),
                upper: DVector::from_fn(16, |i, _| problem.upper[i] / scale),
            };
            let pg = projected_gradient(&norm_problem, 300_000).unwrap();
            let pg_res = (&norm_problem.a * &pg - &norm_problem.b).norm();
            let as_res = (&norm_problem.a * (&sol.speeds_squared / scale) - &norm_problem.b)
                .norm();
            assert!(
                as_res <= pg_res + 1e-6,
                "active set worse than oracle: {as_res} vs {pg_res} for {failed:?}"
            );
        }
    }

    #[test]
    fn all_positive_y_rotors_failing_is_infeasible() {
        // Hand analysis: killing rotors 1, 4, 5, 10, 13 (indices 0-based
        // 0, 3, 4, 9, 12) forces the pitch-balance load onto the y = 0
        // rotors, and the roll row then demands about eight hover-units
        // from one rotor; the set stays fatal for any margin below ~8.
        let witness = vec![0usize, 3, 4, 9, 12];
        assert!(!is_feasible(&layout(), MASS, G, margin(), &witness).unwrap());
        assert!(!is_feasible(&layout(), MASS, G, BoundSpec::HoverMargin(7.9), &witness).unwrap());
        assert!(is_feasible(&layout(), MASS, G, BoundSpec::HoverMargin(8.1), &witness).unwrap());
    }

    #[test]
    fn measured_margin_is_yaw_limited_by_one_quadruple() {
        // At the bench-extrapolated margin exactly one four-rotor set is
        // fatal: the left-side rotors 2, 6, 7, 11 (0-based 1, 5, 6, 10).
        // Its obstruction is the yaw row; it becomes survivable just
        // below a margin of 4.
        let l = layout();
        let m = BoundSpec::HoverMargin(MEASURED_THRUST_MARGIN);
        let result = search_min_failures(&l, MASS, G, m, 5).unwrap();
        assert_eq!(result.min_failures, Some(4));
        assert_eq!(result.witness, Some(vec![1, 5, 6, 10]));
        let card4 = &result.stats[4];
        assert_eq!(card4.infeasible, 1);
        assert_eq!(card4.feasible, 1819);
        assert!(is_feasible(&l, MASS, G, BoundSpec::HoverMargin(4.05), &[1, 5, 6, 10]).unwrap());
    }

    #[test]
    fn single_and_double_failures_are_survivable() {
        let l = layout();
        for i in 0..16 {
            assert!(
                is_feasible(&l, MASS, G, margin(), &[i]).unwrap(),
                "single failure {i} should be survivable"
            );
        }
        for i in 0..16 {
            for j in (i + 1)..16 {
                assert!(
                    is_feasible(&l, MASS, G, margin(), &[i, j]).unwrap(),
                    "double failure ({i},{j}) should be survivable"
                );
            }
        }
    }

    #[test]
    fn rotation_and_mirror_do_not_change_feasibility() {
        // Rotating the body frame mixes the moment rows and mirroring
        // negates pitch and yaw rows; both leave the constraint set, and
        // hence every feasibility verdict, unchanged.
        let l = layout();
        let rotated = l.rotated(2.0 * std::f64::consts::PI / 3.0);
        let mirrored = l.mirrored();
        let sets: [&[usize]; 5] = [&[2], &[0, 9], &[1, 6, 11], &[0, 3, 4, 9, 12], &[5, 8, 15]];
        for failed in sets {
            let base = is_feasible(&l, MASS, G, margin(), failed).unwrap();
            let rot = is_feasible(&rotated, MASS, G, margin(), failed).unwrap();
            let mir = is_feasible(&mirrored, MASS, G, margin(), failed).unwrap();
            assert_eq!(base, rot, "rotation changed verdict for {failed:?}");
            assert_eq!(base, mir, "mirror changed verdict for {failed:?}");
        }
    }

    #[test]
    fn monotonicity_holds_on_sampled_chains() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let checked =
            check_monotonicity(&layout(), MASS, G, margin(), &mut rng, 40).unwrap();
        assert_eq!(checked, 40);
    }

    #[test]
    fn exhaustive_search_finds_minimum_of_five_failures() {
        let result = search_min_failures(&layout(), MASS, G, margin(), 6).unwrap();
        assert_eq!(result.min_failures, Some(5));
        // Counts below the minimum are complete and all feasible.
        for card in 0..=4 {
            let s = &result.stats[card];
            assert_eq!(s.infeasible, 0, "cardinality {card} has infeasible sets");
            let expected = (0..card).fold(1usize, |acc, i| acc * (16 - i) / (i + 1));
            assert_eq!(s.feasible, expected);
        }
        // The stopping cardinality is fully enumerated: seven fatal
        // five-rotor patterns, forming rotated/reflected copies of the
        // three one-sided obstructions.
        let card5 = &result.stats[5];
        assert_eq!(card5.feasible + card5.infeasible, 4368);
        assert_eq!(card5.infeasible, 7);
        assert_eq!(result.witness, Some(vec![0, 3, 4, 9, 12]));
    }

    #[test]
    fn margin_sweep_matches_known_thresholds() {
        // A larger ceiling only enlarges the feasible box, so the minimum
        // failure count climbs monotonically: 1 below ~1.25, then one more
        // survivable failure at each known threshold.
        let sweep = margin_sensitivity(
            &layout(),
            MASS,
            G,
            &[1.2, 1.5, 2.0, MEASURED_THRUST_MARGIN, DEFAULT_THRUST_MARGIN, 6.0],
            6,
        )
        .unwrap();
        let counts: Vec<Option<usize>> = sweep.iter().map(|&(_, m)| m).collect();
        assert_eq!(
            counts,
            vec![Some(1), Some(2), Some(3), Some(4), Some(5), Some(5)]
        );
        for w in sweep.windows(2) {
            assert!(w[0].1.unwrap() <= w[1].1.unwrap());
        }
    }

    #[test]
    fn doubling_mass_with_fixed_ceiling_does_not_raise_min_failures() {
        let l = layout();
        let weight = MASS * G;
        let ceiling = DEFAULT_THRUST_MARGIN * weight / (16.0 * l.k_lift);
        let base = search_min_failures(&l, MASS, G, BoundSpec::Absolute(ceiling), 5).unwrap();
        let heavy =
            search_min_failures(&l, 2.0 * MASS, G, BoundSpec::Absolute(ceiling), 5).unwrap();
        let b = base.min_failures.unwrap_or(6);
        let h = heavy.min_failures.unwrap_or(6);
        assert!(h <= b, "doubled mass should not tolerate more failures");
    }
}
