//! Batch evaluation: parameter sweeps over one or two axes, executed in
//! parallel with deterministic ordering, plus figure presets and the
//! CSV/JSON writers behind the command-line front end.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlations::{
    classical_correlation, mutual_information, mutual_information_asymmetry, negativity,
    quantum_discord, steady_state_mixture,
};
use crate::error::Error;
use crate::params::{DissipationMode, SystemParams};
use crate::thermo::{
    analytic_rho1_channels, analytic_rho2_channels, crossover_fractions, heat_currents,
    rectification,
};
use crate::Result;

/// Parameter selected by a sweep axis. `Omega` drives both `omega_a` and
/// `omega_c`; `G` drives both `g_ab` and `g_bc`; `P` drives the mixing
/// fraction of the two common-reservoir steady states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    TLeft,
    TRight,
    OmegaA,
    OmegaC,
    Omega,
    OmegaB,
    G,
    GAc,
    P,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::TLeft => "t_left",
            AxisParam::TRight => "t_right",
            AxisParam::OmegaA => "omega_a",
            AxisParam::OmegaC => "omega_c",
            AxisParam::Omega => "omega",
            AxisParam::OmegaB => "omega_b",
            AxisParam::G => "g",
            AxisParam::GAc => "g_ac",
            AxisParam::P => "p",
        }
    }

    fn apply(self, params: &mut SystemParams, fraction: &mut f64, value: f64) {
        match self {
            AxisParam::TLeft => params.t_left = value,
            AxisParam::TRight => params.t_right = value,
            AxisParam::OmegaA => params.omega_a = value,
            AxisParam::OmegaC => params.omega_c = value,
            AxisParam::Omega => {
                params.omega_a = value;
                params.omega_c = value;
            }
            AxisParam::OmegaB => params.omega_b = value,
            AxisParam::G => {
                params.g_ab = value;
                params.g_bc = value;
            }
            AxisParam::GAc => params.g_ac = value,
            AxisParam::P => *fraction = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + (self.stop - self.start) * t,
                    Spacing::Log => {
                        (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                    }
                }
            })
            .collect()
    }
}

/// Output groups a sweep can request; each becomes one CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Currents,
    ChannelSplit,
    PPoints,
    Rectification,
    Correlations,
    Asymmetry,
    SteadyState,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Currents => "currents",
            Quantity::ChannelSplit => "channel_split",
            Quantity::PPoints => "p_points",
            Quantity::Rectification => "rectification",
            Quantity::Correlations => "correlations",
            Quantity::Asymmetry => "asymmetry",
            Quantity::SteadyState => "steady_state",
        }
    }

    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Quantity::Currents => &[
                "q_qubit_a",
                "q_qubit_b",
                "q_qubit_c",
                "q_crossing",
                "q_left",
                "q_right",
            ],
            Quantity::ChannelSplit => &["q_left_direct", "q_left_crossing", "q_left", "q_right"],
            Quantity::PPoints => &["p_d", "p_c", "p_d_swapped", "p_c_swapped"],
            Quantity::Rectification => &["r", "r_defined", "q_forward", "q_reverse"],
            Quantity::Correlations => &[
                "mutual_information",
                "classical_correlation",
                "quantum_discord",
                "negativity",
            ],
            Quantity::Asymmetry => &["a_i", "a_i_defined", "i_forward", "i_reverse"],
            Quantity::SteadyState => &[
                "rho_11",
                "rho_22",
                "rho_33",
                "rho_44",
                "rho_55",
                "rho_66",
                "rho_77",
                "rho_88",
                "rho_25_re",
                "rho_25_im",
                "rho_47_re",
                "rho_47_im",
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub base: SystemParams,
    /// Fraction of the conducting component in the common-reservoir
    /// steady-state mixture; overridden by a `p` axis.
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    pub axes: Vec<AxisSpec>,
    pub outputs: Vec<Quantity>,
}

fn default_fraction() -> f64 {
    1.0
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "expected 1 or 2 sweep axes, got {}",
                self.axes.len()
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::Config("no output quantities requested".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if a.count < 2 {
                return Err(Error::Config(format!(
                    "axis {} needs at least 2 points",
                    a.param.name()
                )));
            }
            if !(a.start < a.stop) {
                return Err(Error::Config(format!(
                    "axis {} needs start < stop",
                    a.param.name()
                )));
            }
            if a.spacing == Spacing::Log && a.start <= 0.0 {
                return Err(Error::Config(format!(
                    "axis {} uses log spacing and needs start > 0",
                    a.param.name()
                )));
            }
            if self.axes.iter().skip(i + 1).any(|b| b.param == a.param) {
                return Err(Error::Config(format!(
                    "axis {} listed twice",
                    a.param.name()
                )));
            }
            if a.param == AxisParam::P {
                let common = self.base.mode != DissipationMode::ForceIndependent
                    && self.base.crossing_condition();
                if !common {
                    return Err(Error::Config(
                        "a p axis requires common-reservoir dissipation".into(),
                    ));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.fraction) {
            return Err(Error::Config(format!(
                "fraction must lie in [0, 1], got {}",
                self.fraction
            )));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<Vec<f64>> {
        let first = self.axes[0].values();
        match self.axes.get(1) {
            None => first.into_iter().map(|v| vec![v]).collect(),
            Some(second) => {
                let second = second.values();
                let mut out = Vec::with_capacity(first.len() * second.len());
                for &a in &first {
                    for &b in &second {
                        out.push(vec![a, b]);
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_values: Vec<f64>,
    /// Values per requested quantity, in `outputs` order; `NaN`-filled on
    /// a captured error.
    pub values: Vec<Vec<f64>>,
    pub crossing: bool,
    pub error: Option<String>,
}

fn nan_row(outputs: &[Quantity]) -> Vec<Vec<f64>> {
    outputs
        .iter()
        .map(|q| vec![f64::NAN; q.columns().len()])
        .collect()
}

fn evaluate_quantity(q: Quantity, params: &SystemParams, fraction: f64) -> Result<Vec<f64>> {
    match q {
        Quantity::Currents => {
            let rho = steady_state_mixture(params, fraction)?;
            let h = heat_currents(params, &rho)?;
            Ok(vec![
                h.qubit_a, h.qubit_b, h.qubit_c, h.crossing, h.left, h.right,
            ])
        }
        Quantity::ChannelSplit => {
            if params.common_active()? {
                let c1 = analytic_rho1_channels(params)?;
                let c2 = analytic_rho2_channels(params)?;
                let direct = (1.0 - fraction) * c1.direct + fraction * c2.direct;
                let crossing = (1.0 - fraction) * c1.crossing + fraction * c2.crossing;
                let left = (1.0 - fraction) * c1.left + fraction * c2.left;
                let right = (1.0 - fraction) * c1.right + fraction * c2.right;
                Ok(vec![direct, crossing, left, right])
            } else {
                let rho = steady_state_mixture(params, fraction)?;
                let h = heat_currents(params, &rho)?;
                Ok(vec![h.left, 0.0, h.left, h.right])
            }
        }
        Quantity::PPoints => {
            let fwd = crossover_fractions(params)?;
            let rev = crossover_fractions(&params.with_swapped_temperatures())?;
            Ok(vec![fwd.p_d, fwd.p_c, rev.p_d, rev.p_c])
        }
        Quantity::Rectification => {
            let r = rectification(params, fraction)?;
            Ok(vec![
                r.factor,
                if r.defined { 1.0 } else { 0.0 },
                r.forward,
                r.reverse,
            ])
        }
        Quantity::Correlations => {
            let rho = steady_state_mixture(params, fraction)?;
            Ok(vec![
                mutual_information(&rho),
                classical_correlation(&rho),
                quantum_discord(&rho),
                negativity(&rho),
            ])
        }
        Quantity::Asymmetry => {
            let a = mutual_information_asymmetry(params, fraction)?;
            Ok(vec![
                a.factor,
                if a.defined { 1.0 } else { 0.0 },
                a.forward,
                a.reverse,
            ])
        }
        Quantity::SteadyState => {
            let rho = steady_state_mixture(params, fraction)?;
            let mut v: Vec<f64> = (1..=8).map(|i| rho.population(i)).collect();
            let c25 = rho.elem(2, 5);
            let c47 = rho.elem(4, 7);
            v.extend([c25.re, c25.im, c47.re, c47.im]);
            Ok(v)
        }
    }
}

/// Evaluates every grid point in parallel; rows come back in lexicographic
/// axis order regardless of scheduling, and per-point failures are
/// captured in the row instead of aborting the sweep.
pub fn run_sweep(config: &RunConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let grid = config.grid();
    let rows: Vec<SweepRow> = grid
        .into_par_iter()
        .map(|axis_values| {
            let mut params = config.base;
            let mut fraction = config.fraction;
            for (spec, &v) in config.axes.iter().zip(&axis_values) {
                spec.param.apply(&mut params, &mut fraction, v);
            }
            let crossing = params.crossing_condition();
            let point = params.validate().and_then(|()| {
                config
                    .outputs
                    .iter()
                    .map(|&q| evaluate_quantity(q, &params, fraction))
                    .collect::<Result<Vec<_>>>()
            });
            match point {
                Ok(values) => SweepRow {
                    axis_values,
                    values,
                    crossing,
                    error: None,
                },
                Err(e) => SweepRow {
                    axis_values,
                    values: nan_row(&config.outputs),
                    crossing,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(rows)
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// One CSV per requested quantity (`<prefix>_<quantity>.csv`) plus a JSON
/// manifest (`<prefix>_manifest.json`) echoing the configuration, engine
/// version, column dictionary, and per-row crossing flags.
pub fn write_outputs(prefix: &str, config: &RunConfig, rows: &[SweepRow]) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for (qi, &q) in config.outputs.iter().enumerate() {
        let path = format!("{prefix}_{}.csv", q.name());
        let mut body = String::new();
        let mut header: Vec<&str> = config.axes.iter().map(|a| a.param.name()).collect();
        header.extend(q.columns());
        body.push_str(&header.join(","));
        body.push('\n');
        for row in rows {
            let mut fields: Vec<String> =
                row.axis_values.iter().map(|&v| format_value(v)).collect();
            fields.extend(row.values[qi].iter().map(|&v| format_value(v)));
            body.push_str(&fields.join(","));
            body.push('\n');
        }
        write_file(&path, &body)?;
        written.push(path);
    }

    let manifest = serde_json::json!({
        "engine": "triqdiode",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "units": "dimensionless, hbar = k_B = omega_0 = 1; entropies in bits",
        "log_base": 2,
        "csv": {
            "decimal": ".",
            "float_format": "scientific, 17 significant digits",
            "line_ending": "LF",
        },
        "columns": config
            .outputs
            .iter()
            .map(|q| (q.name(), q.columns()))
            .collect::<std::collections::BTreeMap<_, _>>(),
        "rows": rows.len(),
        "crossing_per_row": rows.iter().map(|r| r.crossing).collect::<Vec<_>>(),
        "row_errors": rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.error.as_ref().map(|e| (i, e.clone())))
            .collect::<Vec<_>>(),
    });
    let path = format!("{prefix}_manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    text.push('\n');
    write_file(&path, &text)?;
    written.push(path);
    Ok(written)
}

fn write_file(path: &str, contents: &str) -> Result<()> {
    std::fs::write(Path::new(path), contents).map_err(|source| Error::Io {
        path: path.to_string(),
        source,
    })
}

/// Serializes the rows of each quantity to in-memory CSV text, in the same
/// format as [`write_outputs`]; used for determinism checks.
pub fn render_csv(config: &RunConfig, rows: &[SweepRow], quantity: Quantity) -> Option<String> {
    let qi = config.outputs.iter().position(|&q| q == quantity)?;
    let mut out = String::new();
    let mut header: Vec<&str> = config.axes.iter().map(|a| a.param.name()).collect();
    header.extend(quantity.columns());
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let mut fields: Vec<String> = row.axis_values.iter().map(|&v| format_value(v)).collect();
        fields.extend(row.values[qi].iter().map(|&v| format_value(v)));
        let _ = writeln!(out, "{}", fields.join(","));
    }
    Some(out)
}

fn figure_base() -> SystemParams {
    SystemParams {
        omega_a: 3.0,
        omega_b: 5.0,
        omega_c: 3.0,
        g_ab: 0.1,
        g_bc: 0.1,
        g_ac: 0.1,
        kappa: 1e-3,
        t_left: 100.0,
        t_right: 21.0,
        mode: DissipationMode::Auto,
    }
}

fn axis(param: AxisParam, start: f64, stop: f64, count: usize) -> AxisSpec {
    AxisSpec {
        param,
        start,
        stop,
        count,
        spacing: Spacing::Linear,
    }
}

pub const PRESET_IDS: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3", "fig4ab", "fig7", "fig8", "fig9",
];

/// Ready-made configurations reproducing the published current, crossover,
/// rectification, and correlation plots. Surface plots default to a 61x61
/// grid; the exact ranges are echoed in the output manifest.
pub fn preset(id: &str) -> Result<RunConfig> {
    let base = figure_base();
    let independent = SystemParams {
        omega_c: 2.0,
        mode: DissipationMode::ForceIndependent,
        ..base
    };
    let surface = |base: SystemParams, inner: AxisSpec| RunConfig {
        base,
        fraction: 1.0,
        axes: vec![inner, axis(AxisParam::TLeft, 1.0, 100.0, 61)],
        outputs: vec![Quantity::Currents],
    };
    let config = match id {
        // Current surfaces against T_L and one internal parameter; the
        // a/c/e panels detune A and C and keep the reservoirs separate,
        // the b/d/f panels run the degenerate, common-reservoir case.
        "fig2a" => surface(independent, axis(AxisParam::OmegaC, 0.5, 5.0, 61)),
        "fig2b" => surface(base, axis(AxisParam::Omega, 1.0, 5.0, 61)),
        "fig2c" => surface(independent, axis(AxisParam::G, 0.02, 0.3, 61)),
        "fig2d" => surface(base, axis(AxisParam::G, 0.02, 0.3, 61)),
        "fig2e" => surface(independent, axis(AxisParam::GAc, 0.02, 0.3, 61)),
        "fig2f" => surface(base, axis(AxisParam::GAc, 0.02, 0.3, 61)),
        // Net and per-channel currents against the mixing fraction.
        "fig3" => RunConfig {
            base,
            fraction: 1.0,
            axes: vec![axis(AxisParam::P, 0.0, 1.0, 101)],
            outputs: vec![Quantity::Currents, Quantity::ChannelSplit],
        },
        // Crossover fractions against the hot-terminal temperature, with
        // the swapped-orientation columns covering the second panel.
        "fig4ab" => RunConfig {
            base,
            fraction: 1.0,
            axes: vec![axis(AxisParam::TLeft, 0.5, 100.0, 200)],
            outputs: vec![Quantity::PPoints],
        },
        // Rectification and information asymmetry in the far-detuned
        // regime omega = 1, omega_B = 5 against T_L.
        "fig7" => RunConfig {
            base: SystemParams {
                omega_a: 1.0,
                omega_c: 1.0,
                t_left: 5.0,
                t_right: 1.0,
                ..base
            },
            fraction: 1.0,
            axes: vec![axis(AxisParam::TLeft, 0.2, 10.0, 61)],
            outputs: vec![
                Quantity::Rectification,
                Quantity::Asymmetry,
                Quantity::Correlations,
            ],
        },
        // Crossover fractions against qubit frequency and temperature.
        "fig8" => RunConfig {
            base,
            fraction: 1.0,
            axes: vec![
                axis(AxisParam::Omega, 0.5, 5.0, 61),
                axis(AxisParam::TLeft, 1.0, 100.0, 61),
            ],
            outputs: vec![Quantity::PPoints],
        },
        // Crossover fractions against coupling strength and temperature.
        "fig9" => RunConfig {
            base,
            fraction: 1.0,
            axes: vec![
                axis(AxisParam::G, 0.01, 0.3, 61),
                axis(AxisParam::TLeft, 1.0, 100.0, 61),
            ],
            outputs: vec![Quantity::PPoints],
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset '{other}'; available: {}",
                PRESET_IDS.join(", ")
            )))
        }
    };
    Ok(config)
}
