//! `tetrafractal`: one binary, one subcommand per analysis.
//!
//! Exit codes: 0 success, 2 domain or input error, 3 failed verification
//! (`verify-all` only), 64 usage error. Identical inputs and seed produce
//! byte-identical outputs. JSON outputs match the files under `schemas/`.

mod params;
mod reports;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tetrafractal_core::configs::Spin;
use tetrafractal_core::dynamics::RigidState;
use tetrafractal_core::faults::BoundSpec;
use tetrafractal_core::truss::ScenarioKind;
use tetrafractal_core::verify;

const LONG_ABOUT: &str = "\
Analysis toolkit for fractal tetrahedral multirotor assemblies: geometry \
generation, inertia and control-map recursions, truss member forces, \
motor-fault search, propeller-configuration census, hover simulation, and \
a cross-checking verification suite.

All physical defaults live in config/defaults.json (annotated, embedded \
into the binary); --params/--gains JSON files override individual fields \
and are described by schemas/params.schema.json and gains.schema.json.

The TETRAFRACTAL_THREADS environment variable is validated and reserved \
for future use; all current solvers are single-threaded.";

#[derive(Parser)]
#[command(name = "tetrafractal", version, about = "Fractal tetrahedral assembly analysis", long_about = LONG_ABOUT)]
struct Cli {
    /// Seed for randomized property checks; defaults to the `seed` entry
    /// of config/defaults.json.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format; each subcommand supports exactly one (JSON unless
    /// noted) and rejects the other.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Fractal assembly poses, rotor disks, and coverage report (JSON).
    Geometry {
        /// Recursion depth n; the assembly has 4^n cells.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Cell edge length [m].
        #[arg(long)]
        edge: Option<f64>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assembly mass and inertia at level n, with a recursion cross-check
    /// (JSON).
    Inertia {
        /// Assembly level n.
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Elementary module mass [kg].
        #[arg(long)]
        mass: Option<f64>,
        /// Cell edge length [m].
        #[arg(long)]
        edge: Option<f64>,
        /// JSON file holding the elementary inertia: scalar or 3x3 array.
        #[arg(long)]
        inertia: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hover-trim linearized model: A, B, trim speed, orderings (JSON).
    Linearize {
        /// Vehicle parameter overrides (see schemas/params.schema.json).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level-n control sensitivity maps, row-major with shapes (JSON).
    #[command(name = "assembly-maps")]
    AssemblyMaps {
        /// Assembly level n.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Vehicle parameter overrides (see schemas/params.schema.json).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truss member forces for one load case, or a payload-sweep summary
    /// (CSV).
    Truss {
        /// Assembly depth n.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Load case: at rest on the base, payload hung from the apex, or
        /// payload split across the three base corners.
        #[arg(long, value_enum, default_value_t = ScenarioArg::Top)]
        scenario: ScenarioArg,
        /// Payload mass [kg].
        #[arg(long, default_value_t = 0.0, conflicts_with = "sweep")]
        payload: f64,
        /// Payload sweep start:end:step (e.g. 0:30:0.5); emits one summary
        /// row per payload instead of member forces.
        #[arg(long)]
        sweep: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive minimum-fatal-fault search on the sixteen-rotor doubled
    /// assembly (JSON).
    Faults {
        /// Total vehicle mass [kg].
        #[arg(long)]
        mass: Option<f64>,
        /// Rotor speed-squared ceiling: "auto" (default thrust margin),
        /// "measured" (bench-derived margin), "margin:X" (X times the
        /// equal-share hover value), or "abs:X".
        #[arg(long, default_value = "auto")]
        bounds: String,
        /// Largest failure-set cardinality to scan.
        #[arg(long = "max-card", default_value_t = 8)]
        max_card: usize,
        /// Comma-separated thrust margins for an extra sensitivity sweep.
        #[arg(long)]
        margins: Option<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Census of torque-balanced and hover-capable propeller
    /// configurations (JSON).
    Configs {
        /// Handedness assigned to outward-thrusting faces.
        #[arg(long, value_enum, default_value_t = SpinArg::Ccw)]
        spin: SpinArg,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-loop hover trial from a perturbed state; trajectory CSV.
    Sim {
        /// Initial perturbation, comma-separated key=value pairs over
        /// x,y,z,phi,theta,psi,u,v,w,p,q,r (e.g. "p=0.5,phi=0.05").
        #[arg(long, default_value = "")]
        perturb: String,
        /// Rate-loop PID gains file (see schemas/gains.schema.json).
        #[arg(long)]
        gains: Option<PathBuf>,
        /// Integration step [s].
        #[arg(long)]
        dt: Option<f64>,
        /// Trial duration [s].
        #[arg(long)]
        t: Option<f64>,
        /// Vehicle parameter overrides (see schemas/params.schema.json).
        #[arg(long)]
        params: Option<PathBuf>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all ten verification checks and print a pass/fail table.
    #[command(name = "verify-all")]
    VerifyAll {
        /// Also write the results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Rest,
    Top,
    Bottom3,
}

impl From<ScenarioArg> for ScenarioKind {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Rest => ScenarioKind::AtRest,
            ScenarioArg::Top => ScenarioKind::TopAttach,
            ScenarioArg::Bottom3 => ScenarioKind::BottomAttach3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpinArg {
    Cw,
    Ccw,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Self {
        match s {
            SpinArg::Cw => Spin::Cw,
            SpinArg::Ccw => Spin::Ccw,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    if let Err(msg) = validate_thread_env() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Reserved thread-count knob; must be a positive integer when set.
fn validate_thread_env() -> Result<(), String> {
    match std::env::var("TETRAFRACTAL_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!(
                "TETRAFRACTAL_THREADS must be a positive integer, got {v:?}"
            )),
        },
        Err(_) => Ok(()),
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    let expected = match cli.command {
        Command::Truss { .. } | Command::Sim { .. } => Format::Csv,
        _ => Format::Json,
    };
    if let Some(format) = cli.format {
        if format != expected {
            return Err(format!(
                "this subcommand emits {expected:?} output, not {format:?}"
            ));
        }
    }
    let defaults = params::defaults();

    match cli.command {
        Command::Geometry { depth, edge, out } => {
            let edge = edge.unwrap_or(defaults.geometry.edge_length);
            let report = reports::geometry(depth, edge).map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::Inertia {
            n,
            mass,
            edge,
            inertia,
            out,
        } => {
            let mass = mass.unwrap_or(defaults.params.mass.unwrap_or(0.74));
            let edge = edge.unwrap_or(defaults.geometry.edge_length);
            let tensor = match inertia {
                Some(path) => params::read_json::<params::InertiaSpec>(&path, "inertia")?
                    .to_matrix(),
                None => defaults
                    .params
                    .inertia
                    .as_ref()
                    .map(params::InertiaSpec::to_matrix)
                    .unwrap_or_else(|| nalgebra::Matrix3::identity() * 0.0111),
            };
            let report =
                reports::inertia(n, mass, edge, tensor).map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::Linearize { params: p, out } => {
            let params = params::load_params(p.as_deref())?;
            let report = reports::model(&params).map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::AssemblyMaps { n, params: p, out } => {
            let params = params::load_params(p.as_deref())?;
            let report = reports::maps(n, &params).map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::Truss {
            n,
            scenario,
            payload,
            sweep,
            out,
        } => {
            let config = reports::truss_config(&defaults.truss);
            let kind: ScenarioKind = scenario.into();
            let csv = match sweep {
                Some(spec) => {
                    let payloads = parse_sweep(&spec)?;
                    reports::truss_sweep_csv(kind, n, &payloads, &config)?
                }
                None => {
                    let outcome = tetrafractal_core::truss::scenario(kind, n, payload, &config)
                        .map_err(|e| e.to_string())?;
                    reports::truss_members_csv(&outcome)?
                }
            };
            write_text(out.as_deref(), &csv)
        }
        Command::Faults {
            mass,
            bounds,
            max_card,
            margins,
            out,
        } => {
            let mass = mass.unwrap_or(defaults.faults.total_mass);
            let bound = parse_bounds(&bounds, &defaults.faults)?;
            let sweep = margins.map(|m| parse_margins(&m)).transpose()?;
            let report = reports::faults(
                mass,
                defaults.params.gravity.unwrap_or(9.81),
                &defaults.faults,
                bound,
                max_card,
                sweep.as_deref(),
            )
            .map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::Configs { spin, out } => {
            let report = reports::configs(spin.into()).map_err(|e| e.to_string())?;
            write_json(out.as_deref(), &report)
        }
        Command::Sim {
            perturb,
            gains,
            dt,
            t,
            params: p,
            out,
        } => {
            let params = params::load_params(p.as_deref())?;
            let gains = params::load_gains(gains.as_deref())?;
            let dt = dt.unwrap_or(defaults.sim.dt);
            let duration = t.unwrap_or(defaults.sim.duration);
            let initial = parse_perturbation(&perturb)?;
            let result = reports::run_sim(&params, &initial, gains, duration, dt)
                .map_err(|e| e.to_string())?;
            let csv = reports::sim_csv(&result)?;
            write_text(out.as_deref(), &csv)?;
            match result.settled_at {
                Some(ts) => eprintln!(
                    "settled at {ts:.3} s (rates < {} rad/s); altitude drift {:.4} m",
                    result.settle_threshold, result.altitude_drift
                ),
                None => eprintln!(
                    "did not settle below {} rad/s within {duration} s{}",
                    result.settle_threshold,
                    if result.diverged { " (diverged)" } else { "" }
                ),
            }
            Ok(0)
        }
        Command::VerifyAll { out } => {
            let seed = cli.seed.unwrap_or(defaults.seed);
            let results = verify::run_all(seed);
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("[{status}] {:2}. {} - {}", r.id, r.name, r.details);
            }
            let all_passed = verify::all_passed(&results);
            if let Some(path) = out {
                let report = reports::VerifyReport {
                    seed,
                    all_passed,
                    results,
                };
                write_json_file(&path, &report)?;
            }
            Ok(if all_passed { 0 } else { 3 })
        }
    }
}

fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<u8, String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    write_text(out, &text)
}

fn write_json_file<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<u8, String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(0)
}

/// Parses "start:end:step" into an inclusive payload list.
fn parse_sweep(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("sweep must be start:end:step, got {spec:?}"));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("sweep value {p:?}: {e}"))
        })
        .collect::<Result<_, _>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && end >= start && start.is_finite() && end.is_finite()) {
        return Err(format!(
            "sweep needs start <= end and step > 0, got {spec:?}"
        ));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + step * i as f64).collect())
}

fn parse_bounds(spec: &str, defaults: &params::FaultDefaults) -> Result<BoundSpec, String> {
    let spec = spec.trim();
    if spec == "auto" {
        return Ok(BoundSpec::HoverMargin(defaults.thrust_margin));
    }
    if spec == "measured" {
        return Ok(BoundSpec::HoverMargin(defaults.measured_thrust_margin));
    }
    let parse_value = |v: &str| -> Result<f64, String> {
        let x: f64 = v
            .parse()
            .map_err(|e| format!("bound value {v:?}: {e}"))?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(format!("bound value must be positive, got {v}"))
        }
    };
    if let Some(v) = spec.strip_prefix("margin:") {
        return Ok(BoundSpec::HoverMargin(parse_value(v)?));
    }
    if let Some(v) = spec.strip_prefix("abs:") {
        return Ok(BoundSpec::Absolute(parse_value(v)?));
    }
    Err(format!(
        "bounds must be \"auto\", \"measured\", \"margin:X\", or \"abs:X\", got {spec:?}"
    ))
}

fn parse_margins(spec: &str) -> Result<Vec<f64>, String> {
    spec.split(',')
        .map(|p| {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|e| format!("margin {p:?}: {e}"))?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(format!("margins must be positive, got {p}"))
            }
        })
        .collect()
}

/// Parses "key=value,..." state perturbations into an initial state.
fn parse_perturbation(spec: &str) -> Result<RigidState, String> {
    let mut state = [0.0f64; 12];
    for pair in spec.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("perturbation {pair:?} is not key=value"))?;
        let idx = reports::STATE_ORDER
            .iter()
            .position(|&s| s == key.trim())
            .ok_or_else(|| {
                format!(
                    "unknown state {key:?}; valid keys: {}",
                    reports::STATE_ORDER.join(",")
                )
            })?;
        state[idx] = value
            .trim()
            .parse()
            .map_err(|e| format!("perturbation value {value:?}: {e}"))?;
    }
    Ok(RigidState::from_array(&state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing_is_inclusive() {
        let v = parse_sweep("0:30:0.5").unwrap();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], 0.0);
        assert_eq!(*v.last().unwrap(), 30.0);
        assert!(parse_sweep("5:1:0.5").is_err());
        assert!(parse_sweep("0:1:0").is_err());
        assert!(parse_sweep("0:1").is_err());
    }

    #[test]
    fn bounds_parsing() {
        let d = params::defaults().faults;
        assert!(matches!(
            parse_bounds("auto", &d),
            Ok(BoundSpec::HoverMargin(m)) if m == d.thrust_margin
        ));
        assert!(matches!(
            parse_bounds("measured", &d),
            Ok(BoundSpec::HoverMargin(m)) if m == d.measured_thrust_margin
        ));
        assert!(matches!(
            parse_bounds("margin:2.5", &d),
            Ok(BoundSpec::HoverMargin(m)) if m == 2.5
        ));
        assert!(matches!(
            parse_bounds("abs:1e5", &d),
            Ok(BoundSpec::Absolute(v)) if v == 1e5
        ));
        assert!(parse_bounds("margin:-1", &d).is_err());
        assert!(parse_bounds("nope", &d).is_err());
    }

    #[test]
    fn perturbation_parsing() {
        let s = parse_perturbation("p=0.5, phi=0.05").unwrap();
        assert_eq!(s.rates.x, 0.5);
        assert_eq!(s.attitude.x, 0.05);
        assert_eq!(s.position.norm(), 0.0);
        assert!(parse_perturbation("bogus=1").is_err());
        assert!(parse_perturbation("p~1").is_err());
    }

    #[test]
    fn embedded_defaults_match_library() {
        use tetrafractal_core::dynamics::TetracopterParams;
        use tetrafractal_core::faults;
        use tetrafractal_core::sim;
        use tetrafractal_core::truss::ScenarioConfig;

        let d = params::defaults();
        let lib = TetracopterParams::default();
        let mut from_file = TetracopterParams::default();
        d.params.apply(&mut from_file);
        assert_eq!(from_file.mass, lib.mass);
        assert_eq!(from_file.inertia, lib.inertia);
        assert_eq!(from_file.rotor_inertia, lib.rotor_inertia);
        assert_eq!(from_file.arm_length, lib.arm_length);
        assert_eq!(from_file.k_thrust, lib.k_thrust);
        assert_eq!(from_file.k_drag, lib.k_drag);
        assert_eq!(from_file.k_friction, lib.k_friction);
        assert_eq!(from_file.drag_linear, lib.drag_linear);
        assert_eq!(from_file.drag_angular, lib.drag_angular);
        assert_eq!(from_file.gravity, lib.gravity);
        assert_eq!(from_file.thrust_derate, lib.thrust_derate);
        assert_eq!(from_file.unsigned_square_drag, lib.unsigned_square_drag);

        let sc = ScenarioConfig::default();
        assert_eq!(d.truss.module_mass, sc.module_mass);
        assert_eq!(d.truss.edge_length, sc.edge_length);
        assert_eq!(d.truss.elastic_modulus, sc.section.elastic_modulus);
        assert_eq!(d.truss.area, sc.section.area);
        assert_eq!(d.truss.moment_of_inertia, sc.section.moment_of_inertia);
        assert_eq!(d.truss.buckling_k, sc.buckling_k);

        assert_eq!(d.faults.k_lift, faults::DEFAULT_K_LIFT);
        assert_eq!(d.faults.k_drag, faults::DEFAULT_K_DRAG);
        assert_eq!(d.faults.thrust_margin, faults::DEFAULT_THRUST_MARGIN);
        assert_eq!(
            d.faults.measured_thrust_margin,
            faults::MEASURED_THRUST_MARGIN
        );

        let g = sim::default_gains();
        assert_eq!(d.sim.gains.kp, g.kp);
        assert_eq!(d.sim.gains.ki, g.ki);
        assert_eq!(d.sim.gains.kd, g.kd);
        assert_eq!(d.sim.gains.integrator_limit, g.integrator_limit);
        assert_eq!(d.sim.gains.output_limit, g.output_limit);
        assert_eq!(d.sim.dt, sim::DEFAULT_DT);
        assert_eq!(d.seed, 2026);

        // Every default is annotated.
        for key in [
            "params.mass",
            "truss.moment_of_inertia",
            "faults.thrust_margin",
            "sim.gains",
            "seed",
        ] {
            assert!(d.notes.contains_key(key), "missing note for {key}");
        }
    }
}
