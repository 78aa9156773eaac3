//! Command-line front end: parameter sweeps to CSV, single steady-state
//! reports, and a self-test that cross-checks the independent solvers.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use triqdiode::correlations::{
    classical_correlation, mutual_information, negativity, quantum_discord, steady_state_mixture,
};
use triqdiode::liouvillian::{default_step, evolve_to_steady, residual};
use triqdiode::params::SystemParams;
use triqdiode::steady::{chr_null_states, rho1_closed_form, rho2_closed_form, steady_ihr};
use triqdiode::sweep::{preset, run_sweep, write_outputs, RunConfig, PRESET_IDS};
use triqdiode::thermo::heat_currents;
use triqdiode::DensityMatrix;

#[derive(Parser)]
#[command(
    name = "triqdiode",
    version,
    about = "Steady states, heat currents, and correlations of a three-qubit thermal diode"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep and write CSV files plus a JSON manifest.
    Run(RunArgs),
    /// Solve one steady state and print it with its heat report as JSON.
    Steady(SteadyArgs),
    /// Cross-check the independent steady-state solvers against each
    /// other; exits nonzero on any disagreement.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    /// Sweep configuration (JSON). Required unless --preset is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix for the CSV files and manifest.
    #[arg(long)]
    out: String,
    /// Worker threads; falls back to TRIQDIODE_THREADS, then to one
    /// thread per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Use a built-in figure preset instead of a configuration file.
    #[arg(long, value_parser = PRESET_IDS.to_vec())]
    preset: Option<String>,
}

#[derive(Args)]
struct SteadyArgs {
    /// Point configuration (JSON): {"params": {...}, "fraction": <0..1>}.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteadyConfig {
    params: SystemParams,
    #[serde(default = "default_fraction")]
    fraction: f64,
}

fn default_fraction() -> f64 {
    1.0
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Steady(args) => cmd_steady(args),
        Command::Validate => cmd_validate(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn init_threads(requested: Option<usize>) -> Result<(), String> {
    let n = match requested {
        Some(n) => Some(n),
        None => match std::env::var("TRIQDIODE_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| format!("TRIQDIODE_THREADS must be a number, got '{v}'"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err("thread count must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), String> {
    init_threads(args.threads)?;
    let config: RunConfig = match (&args.config, &args.preset) {
        (Some(_), Some(_)) => {
            return Err("pass either --config or --preset, not both".into());
        }
        (None, None) => {
            return Err("one of --config or --preset is required".into());
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?
        }
        (None, Some(id)) => preset(id).map_err(|e| e.to_string())?,
    };
    config.validate().map_err(|e| e.to_string())?;
    let rows = run_sweep(&config).map_err(|e| e.to_string())?;
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    let files = write_outputs(&args.out, &config, &rows).map_err(|e| e.to_string())?;
    for f in &files {
        println!("{f}");
    }
    if failures > 0 {
        eprintln!(
            "warning: {failures} of {} grid points failed; see row_errors in the manifest",
            rows.len()
        );
    }
    Ok(())
}

fn complex_json(z: triqdiode::C64) -> serde_json::Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

fn cmd_steady(args: SteadyArgs) -> Result<(), String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let config: SteadyConfig =
        serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?;
    let params = config.params;
    params.validate().map_err(|e| e.to_string())?;
    if !(0.0..=1.0).contains(&config.fraction) {
        return Err(format!(
            "fraction must lie in [0, 1], got {}",
            config.fraction
        ));
    }
    let common = params.common_active().map_err(|e| e.to_string())?;
    let rho = steady_state_mixture(&params, config.fraction).map_err(|e| e.to_string())?;
    let heat = heat_currents(&params, &rho).map_err(|e| e.to_string())?;
    let report = serde_json::json!({
        "params": params,
        "fraction": config.fraction,
        "crossing_dissipation": common,
        "steady_state": {
            "populations": (1..=8).map(|i| rho.population(i)).collect::<Vec<_>>(),
            "rho_25": complex_json(rho.elem(2, 5)),
            "rho_47": complex_json(rho.elem(4, 7)),
        },
        "heat": {
            "qubit_a": heat.qubit_a,
            "qubit_b": heat.qubit_b,
            "qubit_c": heat.qubit_c,
            "crossing": heat.crossing,
            "left_direct": heat.left_direct,
            "left": heat.left,
            "right": heat.right,
        },
        "correlations": {
            "mutual_information": mutual_information(&rho),
            "classical_correlation": classical_correlation(&rho),
            "quantum_discord": quantum_discord(&rho),
            "negativity": negativity(&rho),
        },
        "generator_residual": residual(&params, &rho).map_err(|e| e.to_string())?,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
    );
    Ok(())
}

/// The three solver routes must agree: null-space solve, closed forms,
/// and long-time integration.
fn cmd_validate() -> Result<(), String> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool, detail: String| {
        if ok {
            println!("ok   {name}");
        } else {
            println!("FAIL {name}: {detail}");
            failures += 1;
        }
    };

    let independent = SystemParams {
        omega_a: 3.0,
        omega_b: 5.0,
        omega_c: 2.0,
        g_ab: 0.1,
        g_bc: 0.1,
        g_ac: 0.1,
        kappa: 1e-3,
        t_left: 100.0,
        t_right: 21.0,
        mode: Default::default(),
    };
    let common = SystemParams {
        omega_c: 3.0,
        ..independent
    };

    match (steady_ihr(&independent), evolve_steady(&independent)) {
        (Ok(a), Ok(b)) => {
            let d = a.max_distance(&b);
            check(
                "separate-reservoir null space vs long-time integration",
                d < 1e-8,
                format!("distance {d:e}"),
            );
            let r = residual(&independent, &a).map_err(|e| e.to_string())?;
            check(
                "separate-reservoir generator residual",
                r < 1e-12,
                format!("residual {r:e}"),
            );
        }
        (a, b) => check(
            "separate-reservoir solvers",
            false,
            format!("{:?} / {:?}", a.err(), b.err()),
        ),
    }

    match (
        chr_null_states(&common),
        rho1_closed_form(&common),
        rho2_closed_form(&common),
    ) {
        (Ok(pair), Ok(r1), Ok(r2)) => {
            let d1 = pair.rho1.max_distance(&r1);
            let d2 = pair.rho2.max_distance(&r2);
            check(
                "common-reservoir closed forms vs null space",
                d1 < 1e-9 && d2 < 1e-9,
                format!("distances {d1:e}, {d2:e}"),
            );
            let (ra, rb) = (
                residual(&common, &r1).map_err(|e| e.to_string())?,
                residual(&common, &r2).map_err(|e| e.to_string())?,
            );
            check(
                "common-reservoir generator residuals",
                ra < 1e-12 && rb < 1e-12,
                format!("residuals {ra:e}, {rb:e}"),
            );
        }
        (a, b, c) => check(
            "common-reservoir solvers",
            false,
            format!("{:?} / {:?} / {:?}", a.err(), b.err(), c.err()),
        ),
    }

    match (
        steady_state_mixture(&common, 0.5),
        evolve_from_mixture(&common),
    ) {
        (Ok(a), Ok(b)) => {
            let d = a.max_distance(&b);
            check(
                "common-reservoir mixture vs long-time integration",
                d < 1e-8,
                format!("distance {d:e}"),
            );
        }
        (a, b) => check(
            "common-reservoir mixture route",
            false,
            format!("{:?} / {:?}", a.err(), b.err()),
        ),
    }

    if failures == 0 {
        println!("all checks passed");
        Ok(())
    } else {
        Err(format!("{failures} check(s) failed"))
    }
}

fn evolve_steady(params: &SystemParams) -> triqdiode::Result<DensityMatrix> {
    let rho0 = DensityMatrix::maximally_mixed();
    Ok(evolve_to_steady(params, &rho0, 4e7, default_step(params), 1e-13)?.rho)
}

/// Initial state whose conserved-subspace weight makes the mixing
/// fraction exactly one half.
fn evolve_from_mixture(params: &SystemParams) -> triqdiode::Result<DensityMatrix> {
    let rho0 = DensityMatrix::tilde_state(1).mix(&DensityMatrix::basis_state(1), 0.5);
    Ok(evolve_to_steady(params, &rho0, 4e7, default_step(params), 1e-13)?.rho)
}
