//! Python bindings for the tetrafractal analysis library.
//!
//! Every function returns plain Python data (dicts, lists, numbers) so the
//! results drop straight into numpy or pandas. Matrices are row-major
//! nested lists. Vehicle parameters are passed either as a `Params` object
//! or as a dict of field overrides; omitted fields keep their defaults.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use pythonize::{depythonize, pythonize};
use serde::Serialize;

use tetrafractal_core::assembly_dynamics::{
    closed_form_maps, elementary_maps, growth_report, AssemblyLinearMaps,
};
use tetrafractal_core::configs::{classify, Spin};
use tetrafractal_core::dynamics::{
    hover_speed as trim_speed_of, linearize, InertiaSpec, ParamsPatch, RigidState,
    TetracopterParams, INPUT_NAMES, STATE_NAMES,
};
use tetrafractal_core::faults::{
    margin_sensitivity, search_min_failures as search_faults, BoundSpec, CardinalityStats,
    RotorLayout, DEFAULT_K_DRAG, DEFAULT_K_LIFT, DEFAULT_THRUST_MARGIN,
};
use tetrafractal_core::geometry::{
    derive_dimensions, generate_assembly as build_assembly, make_tetrahedron, rotor_disk_report,
    DiskReport,
};
use tetrafractal_core::inertia::{closed_form, compose_step, normalized_limit, RigidBodyParams};
use tetrafractal_core::sim::{
    closed_loop_rate_eigenvalues, default_gains, hover_trial as run_hover_trial, PidGains,
    DEFAULT_DT,
};
use tetrafractal_core::truss::{
    scenario as run_scenario, MemberMargin, ScenarioConfig, ScenarioKind, ScenarioSummary,
};
use tetrafractal_core::{verify, Error, Mat3, Vec3};

fn core_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    Ok(pythonize(py, value)?)
}

fn from_py<'py, T: serde::de::DeserializeOwned>(obj: &Bound<'py, PyAny>) -> PyResult<T> {
    depythonize(obj).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rows<R, C, S>(m: &nalgebra::Matrix<f64, R, C, S>) -> Vec<Vec<f64>>
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S: nalgebra::RawStorage<f64, R, C>,
{
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn triple(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Vehicle parameters of one four-rotor module.
///
/// Construct with keyword overrides of the defaults, e.g.
/// `Params(mass=1.48, arm_length=0.3)`. `inertia` accepts a scalar J
/// (meaning J times the identity) or a full 3x3 nested list.
#[pyclass(module = "tetrafractal_py", from_py_object)]
#[derive(Clone)]
struct Params {
    inner: TetracopterParams,
}

#[derive(Serialize)]
struct ParamsOut {
    mass: f64,
    inertia: Vec<Vec<f64>>,
    rotor_inertia: f64,
    arm_length: f64,
    k_thrust: f64,
    k_drag: f64,
    k_friction: f64,
    drag_linear: [f64; 3],
    drag_angular: [f64; 3],
    gravity: f64,
    thrust_derate: f64,
    unsigned_square_drag: bool,
}

#[pymethods]
impl Params {
    #[new]
    #[pyo3(signature = (**overrides))]
    fn new(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut inner = TetracopterParams::default();
        if let Some(d) = overrides {
            let patch: ParamsPatch = from_py(d.as_any())?;
            patch.apply(&mut inner);
        }
        inner.validate().map_err(core_err)?;
        Ok(Self { inner })
    }

    /// Trim rotor speed [rad/s] at which four rotors carry the weight.
    fn hover_speed(&self) -> PyResult<f64> {
        trim_speed_of(&self.inner).map_err(core_err)
    }

    /// All parameter fields as a dict (inertia as row-major 3x3).
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let p = &self.inner;
        let out = ParamsOut {
            mass: p.mass,
            inertia: rows(&p.inertia),
            rotor_inertia: p.rotor_inertia,
            arm_length: p.arm_length,
            k_thrust: p.k_thrust,
            k_drag: p.k_drag,
            k_friction: p.k_friction,
            drag_linear: triple(&p.drag_linear),
            drag_angular: triple(&p.drag_angular),
            gravity: p.gravity,
            thrust_derate: p.thrust_derate,
            unsigned_square_drag: p.unsigned_square_drag,
        };
        to_py(py, &out)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.inner.mass
    }

    #[getter]
    fn arm_length(&self) -> f64 {
        self.inner.arm_length
    }

    #[getter]
    fn gravity(&self) -> f64 {
        self.inner.gravity
    }

    #[getter]
    fn inertia(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.inertia)
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(mass={}, arm_length={}, gravity={})",
            self.inner.mass, self.inner.arm_length, self.inner.gravity
        )
    }
}

/// Accepts a Params instance, a dict of overrides, or None for defaults.
fn resolve_params(obj: Option<&Bound<'_, PyAny>>) -> PyResult<TetracopterParams> {
    let mut p = TetracopterParams::default();
    if let Some(obj) = obj {
        if let Ok(wrapped) = obj.extract::<Params>() {
            return Ok(wrapped.inner);
        }
        let patch: ParamsPatch = from_py(obj)?;
        patch.apply(&mut p);
    }
    p.validate().map_err(core_err)?;
    Ok(p)
}

/// Accepts a gains dict (kp, ki, kd, integrator_limit, output_limit) or
/// None for the stock rate-loop tuning.
fn resolve_gains(obj: Option<&Bound<'_, PyAny>>) -> PyResult<PidGains> {
    match obj {
        None => Ok(default_gains()),
        Some(o) => {
            let g: PidGains = from_py(o)?;
            g.validate().map_err(core_err)?;
            Ok(g)
        }
    }
}

fn parse_spin(spin: &str) -> PyResult<Spin> {
    match spin.to_ascii_lowercase().as_str() {
        "ccw" => Ok(Spin::Ccw),
        "cw" => Ok(Spin::Cw),
        other => Err(PyValueError::new_err(format!(
            "unknown spin {other:?}; expected \"ccw\" or \"cw\""
        ))),
    }
}

fn parse_scenario(name: &str) -> PyResult<ScenarioKind> {
    match name.to_ascii_lowercase().as_str() {
        "rest" | "at_rest" => Ok(ScenarioKind::AtRest),
        "top" | "top_attach" => Ok(ScenarioKind::TopAttach),
        "bottom3" | "bottom_attach3" => Ok(ScenarioKind::BottomAttach3),
        other => Err(PyValueError::new_err(format!(
            "unknown scenario {other:?}; expected \"rest\", \"top\" or \"bottom3\""
        ))),
    }
}

fn parse_perturbation(dict: Option<&Bound<'_, PyDict>>) -> PyResult<RigidState> {
    let mut x = [0.0f64; 12];
    if let Some(d) = dict {
        for (key, value) in d.iter() {
            let name: String = key.extract()?;
            let idx = STATE_NAMES
                .iter()
                .position(|&n| n == name)
                .ok_or_else(|| {
                    PyValueError::new_err(format!(
                        "unknown state {name:?}; expected one of {}",
                        STATE_NAMES.join(", ")
                    ))
                })?;
            x[idx] = value.extract()?;
        }
    }
    Ok(RigidState::from_array(&x))
}

/// Derived dimensions of one module frame with the given edge length [m]:
/// corner-to-rotor distance x, rotor offset d (also the rotor disk
/// radius), height h, and circumradius.
#[pyfunction]
#[pyo3(signature = (edge=0.4891))]
fn dimensions(py: Python<'_>, edge: f64) -> PyResult<Bound<'_, PyAny>> {
    let d = derive_dimensions(edge).map_err(core_err)?;
    to_py(py, &d)
}

#[derive(Serialize)]
struct RotorOut {
    center: [f64; 3],
    spin: i8,
}

#[derive(Serialize)]
struct AssemblyOut {
    depth: usize,
    edge_length: f64,
    bounding_edge: f64,
    rotor_radius: f64,
    module_poses: Vec<[f64; 3]>,
    rotors: Vec<RotorOut>,
    disks: DiskReport,
}

/// Depth-n self-similar assembly: 4^n cell centers, one rotor disk per
/// cell with alternating spins, plus the top-view disk-coverage report
/// (the area ratio is pi/(3 sqrt(3)) at every depth).
#[pyfunction]
#[pyo3(signature = (depth=2, edge=0.4891))]
fn generate_assembly(py: Python<'_>, depth: usize, edge: f64) -> PyResult<Bound<'_, PyAny>> {
    let geom = make_tetrahedron(edge).map_err(core_err)?;
    let asm = build_assembly(&geom, depth).map_err(core_err)?;
    let out = AssemblyOut {
        depth: asm.depth,
        edge_length: asm.edge_length,
        bounding_edge: asm.bounding_edge(),
        rotor_radius: asm.rotor_radius,
        module_poses: asm.module_poses.iter().map(triple).collect(),
        rotors: asm
            .rotors
            .iter()
            .map(|r| RotorOut {
                center: triple(&r.center),
                spin: r.spin,
            })
            .collect(),
        disks: rotor_disk_report(&asm),
    };
    to_py(py, &out)
}

#[derive(Serialize)]
struct InertiaOut {
    level: usize,
    cell_circumradius: f64,
    elementary_mass: f64,
    mass: f64,
    inertia: Vec<Vec<f64>>,
    recursion_error: f64,
    normalized_limit: Vec<Vec<f64>>,
}

/// Mass and centroidal inertia of the level-n assembly of a cell with the
/// given mass and inertia (scalar J or 3x3 rows; defaults to the stock
/// module). Cross-checks the level recursion against the closed form and
/// reports the relative max-entry difference as `recursion_error`.
#[pyfunction]
#[pyo3(signature = (level, mass=0.74, inertia=None, edge=0.4891))]
fn assembly_inertia<'py>(
    py: Python<'py>,
    level: usize,
    mass: f64,
    inertia: Option<&Bound<'py, PyAny>>,
    edge: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let j0 = match inertia {
        Some(obj) => from_py::<InertiaSpec>(obj)?.to_matrix(),
        None => TetracopterParams::default().inertia,
    };
    let elementary = RigidBodyParams::new(mass, j0).map_err(core_err)?;
    let r = make_tetrahedron(edge).map_err(core_err)?.circumradius;
    let direct = closed_form(&elementary, r, level).map_err(core_err)?;
    let mut recursed = RigidBodyParams {
        mass: elementary.mass,
        inertia: elementary.inertia,
    };
    for lvl in 0..level {
        recursed = compose_step(&recursed, lvl, r).map_err(core_err)?;
    }
    let scale = max_abs(&direct.inertia).max(f64::MIN_POSITIVE);
    let out = InertiaOut {
        level,
        cell_circumradius: r,
        elementary_mass: mass,
        mass: direct.mass,
        inertia: rows(&direct.inertia),
        recursion_error: max_abs(&(recursed.inertia - direct.inertia)) / scale,
        normalized_limit: rows(&normalized_limit(&elementary, r)),
    };
    to_py(py, &out)
}

#[derive(Serialize)]
struct ModelOut {
    state_names: [&'static str; 12],
    input_names: [&'static str; 4],
    hover_speed: f64,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

/// Hover linearization of one module: state matrix A (12x12), input
/// matrix B (12x4) over rotor-speed deviations, and the trim speed.
#[pyfunction]
#[pyo3(name = "linearize", signature = (params=None))]
fn linearize_model<'py>(
    py: Python<'py>,
    params: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = resolve_params(params)?;
    let model = linearize(&p).map_err(core_err)?;
    let out = ModelOut {
        state_names: STATE_NAMES,
        input_names: INPUT_NAMES,
        hover_speed: model.hover_speed,
        a: rows(&model.a_matrix),
        b: rows(&model.b_matrix),
    };
    to_py(py, &out)
}

/// Trim rotor speed [rad/s] for the given (or default) parameters.
#[pyfunction]
#[pyo3(signature = (params=None))]
fn hover_speed(params: Option<&Bound<'_, PyAny>>) -> PyResult<f64> {
    let p = resolve_params(params)?;
    trim_speed_of(&p).map_err(core_err)
}

#[derive(Serialize)]
struct MapsOut {
    level: usize,
    rotor_count: usize,
    trim_speed: f64,
    uniform_trim: bool,
    force: Vec<Vec<f64>>,
    torque: Vec<Vec<f64>>,
    reaction: Vec<Vec<f64>>,
    rate_coupling: Vec<Vec<f64>>,
}

fn maps_out(maps: &AssemblyLinearMaps) -> MapsOut {
    MapsOut {
        level: maps.level,
        rotor_count: maps.force.ncols(),
        trim_speed: maps.trim_speed,
        uniform_trim: maps.uniform_trim,
        force: rows(&maps.force),
        torque: rows(&maps.torque),
        reaction: rows(&maps.reaction),
        rate_coupling: rows(&maps.rate_coupling),
    }
}

/// Control-sensitivity maps of the level-n assembly at uniform trim: net
/// force, thrust moment, and reaction torque per rotor-speed deviation
/// (each 3 x 4^(n+1)), plus the gyroscopic rate-coupling matrix.
#[pyfunction]
#[pyo3(signature = (level=1, params=None))]
fn assembly_maps<'py>(
    py: Python<'py>,
    level: usize,
    params: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = resolve_params(params)?;
    let model = linearize(&p).map_err(core_err)?;
    let geom = make_tetrahedron(p.arm_length).map_err(core_err)?;
    let elem = elementary_maps(&model, &p).map_err(core_err)?;
    let maps = closed_form_maps(&elem, &geom, level).map_err(core_err)?;
    to_py(py, &maps_out(&maps))
}

/// Per-level growth of the map norms up to `max_level`: force authority
/// grows 4x per level, torque authority approaches 8x, and the angular
/// response time ratio approaches 2x (inertia grows 16x).
#[pyfunction]
#[pyo3(signature = (max_level=5, params=None))]
fn growth<'py>(
    py: Python<'py>,
    max_level: usize,
    params: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = resolve_params(params)?;
    let model = linearize(&p).map_err(core_err)?;
    let geom = make_tetrahedron(p.arm_length).map_err(core_err)?;
    let rep = growth_report(&model, &p, &geom, max_level).map_err(core_err)?;
    to_py(py, &rep)
}

#[derive(Serialize)]
struct TrussOut {
    summary: ScenarioSummary,
    members: Vec<MemberMargin>,
}

/// Direct-stiffness solution of one load scenario on the depth-n truss:
/// "rest" (on its base corners), "top" (hover, payload at the apex), or
/// "bottom3" (hover, payload split across the base corners). Returns the
/// scenario summary and the per-member force/buckling table.
#[pyfunction]
#[pyo3(signature = (scenario="top", depth=2, payload=0.0, module_mass=None, edge=None))]
fn truss_scenario<'py>(
    py: Python<'py>,
    scenario: &str,
    depth: usize,
    payload: f64,
    module_mass: Option<f64>,
    edge: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let kind = parse_scenario(scenario)?;
    let mut config = ScenarioConfig::default();
    if let Some(m) = module_mass {
        config.module_mass = m;
    }
    if let Some(e) = edge {
        config.edge_length = e;
    }
    let outcome = run_scenario(kind, depth, payload, &config).map_err(core_err)?;
    let out = TrussOut {
        summary: outcome.summary,
        members: outcome.margins,
    };
    to_py(py, &out)
}

#[derive(Serialize)]
struct BoundOut {
    kind: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct FaultsOut {
    rotor_count: usize,
    total_mass: f64,
    gravity: f64,
    bound: BoundOut,
    min_failures: Option<usize>,
    witness: Option<Vec<usize>>,
    solves: usize,
    stats: Vec<CardinalityStats>,
}

fn make_bound(margin: Option<f64>, absolute: Option<f64>) -> PyResult<BoundSpec> {
    match (margin, absolute) {
        (Some(_), Some(_)) => Err(PyValueError::new_err(
            "pass either margin or absolute, not both",
        )),
        (None, Some(a)) => Ok(BoundSpec::Absolute(a)),
        (m, None) => Ok(BoundSpec::HoverMargin(m.unwrap_or(DEFAULT_THRUST_MARGIN))),
    }
}

fn standard_layout(cell_edge: f64, k_lift: f64, k_drag: f64) -> PyResult<RotorLayout> {
    RotorLayout::double_level(cell_edge, k_lift, k_drag).map_err(core_err)
}

/// Smallest number of motor failures that makes hover allocation
/// infeasible on the sixteen-rotor doubled layout. The thrust ceiling is
/// `margin` times the per-rotor hover thrust, or `absolute` [rad^2/s^2].
/// Exhaustive by cardinality; per-cardinality counts are exact.
#[pyfunction]
#[pyo3(signature = (mass=3.1, gravity=9.81, margin=None, absolute=None, max_cardinality=8,
                    cell_edge=0.24455, k_lift=DEFAULT_K_LIFT, k_drag=DEFAULT_K_DRAG))]
#[allow(clippy::too_many_arguments)]
fn search_min_failures(
    py: Python<'_>,
    mass: f64,
    gravity: f64,
    margin: Option<f64>,
    absolute: Option<f64>,
    max_cardinality: usize,
    cell_edge: f64,
    k_lift: f64,
    k_drag: f64,
) -> PyResult<Bound<'_, PyAny>> {
    let bound = make_bound(margin, absolute)?;
    let layout = standard_layout(cell_edge, k_lift, k_drag)?;
    let res = search_faults(&layout, mass, gravity, bound, max_cardinality).map_err(core_err)?;
    let bound_out = match bound {
        BoundSpec::HoverMargin(v) => BoundOut {
            kind: "hover_margin",
            value: v,
        },
        BoundSpec::Absolute(v) => BoundOut {
            kind: "absolute",
            value: v,
        },
    };
    let out = FaultsOut {
        rotor_count: layout.rotors.len(),
        total_mass: mass,
        gravity,
        bound: bound_out,
        min_failures: res.min_failures,
        witness: res.witness,
        solves: res.solves,
        stats: res.stats,
    };
    to_py(py, &out)
}

#[derive(Serialize)]
struct SweepOut {
    margin: f64,
    min_failures: Option<usize>,
}

/// Minimum fatal failure count as a function of the thrust-margin bound.
#[pyfunction]
#[pyo3(signature = (margins, mass=3.1, gravity=9.81, max_cardinality=8,
                    cell_edge=0.24455, k_lift=DEFAULT_K_LIFT, k_drag=DEFAULT_K_DRAG))]
#[allow(clippy::too_many_arguments)]
fn margin_sweep(
    py: Python<'_>,
    margins: Vec<f64>,
    mass: f64,
    gravity: f64,
    max_cardinality: usize,
    cell_edge: f64,
    k_lift: f64,
    k_drag: f64,
) -> PyResult<Bound<'_, PyAny>> {
    let layout = standard_layout(cell_edge, k_lift, k_drag)?;
    let table = margin_sensitivity(&layout, mass, gravity, &margins, max_cardinality)
        .map_err(core_err)?;
    let out: Vec<SweepOut> = table
        .into_iter()
        .map(|(margin, min_failures)| SweepOut {
            margin,
            min_failures,
        })
        .collect();
    to_py(py, &out)
}

/// Census of the 256 propeller configurations for the given base spin
/// ("ccw" or "cw"): torque-balanced count, hover-capable count, count
/// matching the base spin pattern, and the rotation-symmetry classes with
/// their lift factors.
#[pyfunction]
#[pyo3(signature = (spin="ccw"))]
fn classify_configs<'py>(py: Python<'py>, spin: &str) -> PyResult<Bound<'py, PyAny>> {
    let rep = classify(parse_spin(spin)?).map_err(core_err)?;
    to_py(py, &rep)
}

#[derive(Serialize)]
struct SimOut {
    dt: f64,
    state_names: [&'static str; 12],
    times: Vec<f64>,
    states: Vec<[f64; 12]>,
    speeds: Vec<[f64; 4]>,
    settled_at: Option<f64>,
    settle_threshold: f64,
    diverged: bool,
    altitude_drift: f64,
}

/// Nonlinear hover simulation under the rate PID from a perturbed state.
/// `perturbation` maps state names (x, y, z, phi, theta, psi, u, v, w, p,
/// q, r) to initial values; attitude must stay within 0.2 rad and rates
/// within 1 rad/s. Returns the full trajectory and settling time.
#[pyfunction]
#[pyo3(signature = (perturbation=None, duration=10.0, dt=DEFAULT_DT, params=None, gains=None))]
fn hover_trial<'py>(
    py: Python<'py>,
    perturbation: Option<&Bound<'py, PyDict>>,
    duration: f64,
    dt: f64,
    params: Option<&Bound<'py, PyAny>>,
    gains: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let p = resolve_params(params)?;
    let g = resolve_gains(gains)?;
    let initial = parse_perturbation(perturbation)?;
    let sim = run_hover_trial(&p, &initial, g, duration, dt).map_err(core_err)?;
    let states: Vec<[f64; 12]> = sim.states.iter().map(|s| s.to_array()).collect();
    let out = SimOut {
        dt: sim.dt,
        state_names: STATE_NAMES,
        times: sim.times,
        states,
        speeds: sim.speeds,
        settled_at: sim.settled_at,
        settle_threshold: sim.settle_threshold,
        diverged: sim.diverged,
        altitude_drift: sim.altitude_drift,
    };
    to_py(py, &out)
}

/// Eigenvalues of the closed rate loop as (real, imag) pairs; all real
/// parts are negative for a stable tuning.
#[pyfunction]
#[pyo3(signature = (params=None, gains=None))]
fn closed_loop_eigenvalues(
    params: Option<&Bound<'_, PyAny>>,
    gains: Option<&Bound<'_, PyAny>>,
) -> PyResult<Vec<(f64, f64)>> {
    let p = resolve_params(params)?;
    let g = resolve_gains(gains)?;
    let model = linearize(&p).map_err(core_err)?;
    closed_loop_rate_eigenvalues(&model, &g).map_err(core_err)
}

/// The stock rate-loop PID tuning as a dict.
#[pyfunction]
fn stock_gains(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &default_gains())
}

#[derive(Serialize)]
struct VerifyOut {
    seed: u64,
    all_passed: bool,
    results: Vec<verify::CriterionResult>,
}

/// Runs the complete ten-point verification suite (disk coverage, inertia
/// recursion, truss counts and load sweeps, linearization, map growth,
/// fault search, configuration census, hover simulation, dimensions).
/// Takes on the order of a minute.
#[pyfunction]
#[pyo3(signature = (seed=2026))]
fn run_verification(py: Python<'_>, seed: u64) -> PyResult<Bound<'_, PyAny>> {
    let results = verify::run_all(seed);
    let out = VerifyOut {
        seed,
        all_passed: verify::all_passed(&results),
        results,
    };
    to_py(py, &out)
}

/// Analysis toolkit for fractal tetrahedral multirotor assemblies:
/// fractal rotor placement, inertia recursion, hover linearization,
/// assembly control maps, truss load analysis, motor-fault search,
/// propeller-configuration census, and hover simulation.
#[pymodule]
fn tetrafractal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add(
        "DISK_AREA_RATIO",
        tetrafractal_core::geometry::DISK_AREA_RATIO,
    )?;
    m.add("GRAVITY", tetrafractal_core::GRAVITY)?;
    m.add("DEFAULT_THRUST_MARGIN", DEFAULT_THRUST_MARGIN)?;
    m.add(
        "MEASURED_THRUST_MARGIN",
        tetrafractal_core::faults::MEASURED_THRUST_MARGIN,
    )?;
    m.add_class::<Params>()?;
    m.add_function(wrap_pyfunction!(dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(generate_assembly, m)?)?;
    m.add_function(wrap_pyfunction!(assembly_inertia, m)?)?;
    m.add_function(wrap_pyfunction!(linearize_model, m)?)?;
    m.add_function(wrap_pyfunction!(hover_speed, m)?)?;
    m.add_function(wrap_pyfunction!(assembly_maps, m)?)?;
    m.add_function(wrap_pyfunction!(growth, m)?)?;
    m.add_function(wrap_pyfunction!(truss_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(search_min_failures, m)?)?;
    m.add_function(wrap_pyfunction!(margin_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(classify_configs, m)?)?;
    m.add_function(wrap_pyfunction!(hover_trial, m)?)?;
    m.add_function(wrap_pyfunction!(closed_loop_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(stock_gains, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
