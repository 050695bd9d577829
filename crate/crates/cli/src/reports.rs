//! Report builders: one function per subcommand, returning serializable
//! structs (JSON) or CSV text. Matrices serialize row-major with explicit
//! shape fields.

use nalgebra::Matrix3;
use serde::Serialize;
use tetrafractal_core::assembly_dynamics::{closed_form_maps, elementary_maps};
use tetrafractal_core::configs::{classify, ConfigReport, Spin};
use tetrafractal_core::dynamics::{linearize, RigidState, TetracopterParams};
use tetrafractal_core::error::Error;
use tetrafractal_core::faults::{
    build_allocation, margin_sensitivity, search_min_failures, BoundSpec, RotorLayout,
};
use tetrafractal_core::geometry::{
    derive_dimensions, generate_assembly, make_tetrahedron, rotor_disk_report, DiskReport,
};
use tetrafractal_core::inertia::{closed_form, compose_step, RigidBodyParams};
use tetrafractal_core::sim::{hover_trial, PidGains, SimResult};
use tetrafractal_core::truss::{
    scenario_sweep, ScenarioConfig, ScenarioKind, ScenarioOutcome, SectionProperties,
};
use tetrafractal_core::verify::CriterionResult;

use crate::params;

/// Row-major dense matrix with an explicit `[rows, cols]` shape.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixJson {
    pub shape: [usize; 2],
    pub data: Vec<f64>,
}

pub fn matrix_json(nrows: usize, ncols: usize, get: impl Fn(usize, usize) -> f64) -> MatrixJson {
    let mut data = Vec::with_capacity(nrows * ncols);
    for i in 0..nrows {
        for j in 0..ncols {
            data.push(get(i, j));
        }
    }
    MatrixJson {
        shape: [nrows, ncols],
        data,
    }
}

fn mat3_rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

#[derive(Serialize)]
pub struct RotorJson {
    pub center: [f64; 3],
    pub spin: i8,
}

#[derive(Serialize)]
pub struct GeometryReport {
    pub depth: usize,
    pub edge_length: f64,
    pub rotor_radius: f64,
    pub bounding_edge: f64,
    pub module_poses: Vec<[f64; 3]>,
    pub rotors: Vec<RotorJson>,
    pub disk_report: DiskReport,
}

pub fn geometry(depth: usize, edge: f64) -> Result<GeometryReport, Error> {
    let geom = make_tetrahedron(edge)?;
    let assembly = generate_assembly(&geom, depth)?;
    let disk_report = rotor_disk_report(&assembly);
    Ok(GeometryReport {
        depth,
        edge_length: edge,
        rotor_radius: assembly.rotor_radius,
        bounding_edge: assembly.bounding_edge(),
        module_poses: assembly.module_poses.iter().map(|p| [p.x, p.y, p.z]).collect(),
        rotors: assembly
            .rotors
            .iter()
            .map(|r| RotorJson {
                center: [r.center.x, r.center.y, r.center.z],
                spin: r.spin,
            })
            .collect(),
        disk_report,
    })
}

#[derive(Serialize)]
pub struct BodyJson {
    pub mass: f64,
    pub inertia: [[f64; 3]; 3],
}

#[derive(Serialize)]
pub struct InertiaCheck {
    pub recursion_vs_closed_form_error: f64,
}

#[derive(Serialize)]
pub struct InertiaReport {
    pub level: usize,
    pub edge_length: f64,
    pub elementary: BodyJson,
    pub mass: f64,
    pub inertia: [[f64; 3]; 3],
    pub check: InertiaCheck,
}

pub fn inertia(
    level: usize,
    mass: f64,
    edge: f64,
    elementary_inertia: Matrix3<f64>,
) -> Result<InertiaReport, Error> {
    let elementary = RigidBodyParams::new(mass, elementary_inertia)?;
    let r = derive_dimensions(edge)?.circumradius;
    let direct = closed_form(&elementary, r, level)?;
    let mut iterated = elementary.clone();
    for l in 0..level {
        iterated = compose_step(&iterated, l, r)?;
    }
    let denom = (0..3)
        .map(|i| direct.inertia.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(f64::MIN_POSITIVE, f64::max);
    let diff = iterated.inertia - direct.inertia;
    let err = (0..3)
        .map(|i| diff.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        / denom;
    Ok(InertiaReport {
        level,
        edge_length: edge,
        elementary: BodyJson {
            mass,
            inertia: mat3_rows(&elementary_inertia),
        },
        mass: direct.mass,
        inertia: mat3_rows(&direct.inertia),
        check: InertiaCheck {
            recursion_vs_closed_form_error: err,
        },
    })
}

#[derive(Serialize)]
pub struct ModelReport {
    pub state_order: [&'static str; 12],
    pub input_order: [&'static str; 4],
    pub hover_speed: f64,
    pub a: MatrixJson,
    pub b: MatrixJson,
}

pub use tetrafractal_core::dynamics::{INPUT_NAMES as INPUT_ORDER, STATE_NAMES as STATE_ORDER};

pub fn model(params: &TetracopterParams) -> Result<ModelReport, Error> {
    let model = linearize(params)?;
    Ok(ModelReport {
        state_order: STATE_ORDER,
        input_order: INPUT_ORDER,
        hover_speed: model.hover_speed,
        a: matrix_json(12, 12, |i, j| model.a_matrix[(i, j)]),
        b: matrix_json(12, 4, |i, j| model.b_matrix[(i, j)]),
    })
}

#[derive(Serialize)]
pub struct MapsReport {
    pub level: usize,
    pub rotor_count: usize,
    pub trim_speed: f64,
    pub uniform_trim: bool,
    pub force: MatrixJson,
    pub torque: MatrixJson,
    pub reaction: MatrixJson,
    pub rate_coupling: MatrixJson,
}

pub fn maps(level: usize, params: &TetracopterParams) -> Result<MapsReport, Error> {
    let model = linearize(params)?;
    let geom = make_tetrahedron(params.arm_length)?;
    let elementary = elementary_maps(&model, params)?;
    let maps = closed_form_maps(&elementary, &geom, level)?;
    let dmat = |m: &nalgebra::DMatrix<f64>| matrix_json(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    Ok(MapsReport {
        level,
        rotor_count: maps.force.ncols(),
        trim_speed: maps.trim_speed,
        uniform_trim: maps.uniform_trim,
        force: dmat(&maps.force),
        torque: dmat(&maps.torque),
        reaction: dmat(&maps.reaction),
        rate_coupling: matrix_json(3, 3, |i, j| maps.rate_coupling[(i, j)]),
    })
}

pub fn truss_config(defaults: &params::TrussDefaults) -> ScenarioConfig {
    ScenarioConfig {
        module_mass: defaults.module_mass,
        edge_length: defaults.edge_length,
        section: SectionProperties {
            elastic_modulus: defaults.elastic_modulus,
            area: defaults.area,
            moment_of_inertia: defaults.moment_of_inertia,
        },
        buckling_k: defaults.buckling_k,
        ..ScenarioConfig::default()
    }
}

/// Member-level forces CSV for one scenario solve.
pub fn truss_members_csv(outcome: &ScenarioOutcome) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "member_id",
        "node_i",
        "node_j",
        "length_m",
        "axial_N",
        "P_cr_N",
        "margin_N",
    ])
    .map_err(|e| e.to_string())?;
    for m in &outcome.margins {
        w.write_record([
            m.member.to_string(),
            m.node_i.to_string(),
            m.node_j.to_string(),
            m.length.to_string(),
            m.axial.to_string(),
            m.p_critical.to_string(),
            m.margin.to_string(),
        ])
        .map_err(|e| e.to_string())?;
    }
    csv_into_string(w)
}

/// Payload-sweep summary CSV, one row per payload.
pub fn truss_sweep_csv(
    kind: ScenarioKind,
    depth: usize,
    payloads: &[f64],
    config: &ScenarioConfig,
) -> Result<String, String> {
    let summaries = scenario_sweep(kind, depth, payloads, config).map_err(|e| e.to_string())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "payload_kg",
        "total_weight_N",
        "module_thrust_N",
        "thrust_ceiling_N",
        "thrust_warning",
        "max_tension_N",
        "max_compression_N",
        "max_displacement_m",
        "min_buckling_margin_N",
        "any_buckled",
        "reaction_norm_N",
        "equilibrium_residual",
    ])
    .map_err(|e| e.to_string())?;
    for s in &summaries {
        w.write_record([
            s.payload_kg.to_string(),
            s.total_weight_n.to_string(),
            s.module_thrust_n.to_string(),
            s.thrust_ceiling_n.to_string(),
            s.thrust_warning.to_string(),
            s.max_tension_n.to_string(),
            s.max_compression_n.to_string(),
            s.max_displacement_m.to_string(),
            s.min_buckling_margin_n.to_string(),
            s.any_buckled.to_string(),
            s.reaction_norm_n.to_string(),
            s.equilibrium_residual.to_string(),
        ])
        .map_err(|e| e.to_string())?;
    }
    csv_into_string(w)
}

#[derive(Serialize)]
pub struct BoundJson {
    pub kind: &'static str,
    pub value: f64,
}

#[derive(Serialize)]
pub struct SweepEntry {
    pub margin: f64,
    pub min_failures: Option<usize>,
}

#[derive(Serialize)]
pub struct FaultsReport {
    pub total_mass: f64,
    pub gravity: f64,
    pub k_lift: f64,
    pub k_drag: f64,
    pub bound: BoundJson,
    pub speed_squared_ceiling: f64,
    pub allocation: MatrixJson,
    pub target: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub min_failures: Option<usize>,
    pub witness: Option<Vec<usize>>,
    pub stats: Vec<tetrafractal_core::faults::CardinalityStats>,
    pub solves: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin_sweep: Option<Vec<SweepEntry>>,
}

pub fn faults(
    mass: f64,
    gravity: f64,
    fault_defaults: &params::FaultDefaults,
    bound: BoundSpec,
    max_cardinality: usize,
    sweep_margins: Option<&[f64]>,
) -> Result<FaultsReport, Error> {
    let layout = RotorLayout::double_level(
        fault_defaults.cell_edge,
        fault_defaults.k_lift,
        fault_defaults.k_drag,
    )?;
    let nominal = build_allocation(&layout, mass, gravity, bound, &[])?;
    let search = search_min_failures(&layout, mass, gravity, bound, max_cardinality)?;
    let margin_sweep = match sweep_margins {
        Some(margins) => Some(
            margin_sensitivity(&layout, mass, gravity, margins, max_cardinality)?
                .into_iter()
                .map(|(margin, min_failures)| SweepEntry {
                    margin,
                    min_failures,
                })
                .collect(),
        ),
        None => None,
    };
    let (kind, value) = match bound {
        BoundSpec::HoverMargin(v) => ("hover_margin", v),
        BoundSpec::Absolute(v) => ("absolute", v),
    };
    Ok(FaultsReport {
        total_mass: mass,
        gravity,
        k_lift: layout.k_lift,
        k_drag: layout.k_drag,
        bound: BoundJson { kind, value },
        speed_squared_ceiling: nominal.upper.max(),
        allocation: matrix_json(nominal.allocation.nrows(), nominal.allocation.ncols(), |i, j| {
            nominal.allocation[(i, j)]
        }),
        target: nominal.target.iter().copied().collect(),
        lower: nominal.lower.iter().copied().collect(),
        upper: nominal.upper.iter().copied().collect(),
        min_failures: search.min_failures,
        witness: search.witness,
        stats: search.stats,
        solves: search.solves,
        margin_sweep,
    })
}

#[derive(Serialize)]
pub struct ConfigsReport {
    pub spin: Spin,
    #[serde(flatten)]
    pub report: ConfigReport,
}

pub fn configs(spin: Spin) -> Result<ConfigsReport, Error> {
    Ok(ConfigsReport {
        spin,
        report: classify(spin)?,
    })
}

/// Trajectory CSV: time, the twelve states, then the four rotor speeds.
pub fn sim_csv(result: &SimResult) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = vec!["t"];
    header.extend(STATE_ORDER);
    header.extend(INPUT_ORDER);
    w.write_record(&header).map_err(|e| e.to_string())?;
    for (i, t) in result.times.iter().enumerate() {
        let mut row = Vec::with_capacity(17);
        row.push(t.to_string());
        for v in result.states[i].to_array() {
            row.push(v.to_string());
        }
        for v in result.speeds[i] {
            row.push(v.to_string());
        }
        w.write_record(&row).map_err(|e| e.to_string())?;
    }
    csv_into_string(w)
}

pub fn run_sim(
    params: &TetracopterParams,
    initial: &RigidState,
    gains: PidGains,
    duration: f64,
    dt: f64,
) -> Result<SimResult, Error> {
    hover_trial(params, initial, gains, duration, dt)
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_passed: bool,
    pub results: Vec<CriterionResult>,
}

fn csv_into_string(w: csv::Writer<Vec<u8>>) -> Result<String, String> {
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    String::from_utf8(bytes).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_json_is_row_major() {
        let m = matrix_json(2, 3, |i, j| (3 * i + j) as f64);
        assert_eq!(m.shape, [2, 3]);
        assert_eq!(m.data, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn inertia_report_check_is_tiny() {
        let r = inertia(4, 0.74, 0.4891, Matrix3::identity() * 0.0111).unwrap();
        assert!(r.check.recursion_vs_closed_form_error < 1e-12);
        assert!((r.mass - 0.74 * 256.0).abs() < 1e-12);
    }

    #[test]
    fn maps_report_shapes() {
        let params = TetracopterParams::default();
        let r = maps(2, &params).unwrap();
        assert_eq!(r.force.shape, [3, 64]);
        assert_eq!(r.rotor_count, 64);
        assert_eq!(r.force.data.len(), 192);
    }
}
