//! Configuration resolution and run orchestration for the `braggsim` binary.
//!
//! Parameters come from three layers, later layers overriding earlier ones:
//! a named preset, a flat `key = value` config file, and command-line flags.
//! A resolved [`RunConfig`] drives one sweep and its serialization.

pub mod output;

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, ValueEnum};

use braggsim_core::lattice::{LatticeConfig, SolverOptions};
use braggsim_core::spectra::{Backend, FrequencyGrid, Lineshape, SweepRequest};
use braggsim_core::units;

pub use output::RunSummary;

const PI: f64 = std::f64::consts::PI;

#[derive(Parser, Debug, Default)]
#[command(
    name = "braggsim",
    about = "Bragg-scattering spectra of bosons in a 1D optical lattice",
    long_about = "Computes elastic and Stokes components of the light-scattering cross \
                  section (in units of the angular prefactor) for bosons in a 1D optical \
                  lattice, via exact diagonalization, strong-coupling perturbation theory, \
                  or Bogoliubov theory."
)]
pub struct Args {
    /// Named parameter set: fig2a-d, fig3a-c, fig4, fig5a-b, fig6.
    #[arg(long)]
    pub preset: Option<String>,
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lattice depth(s) in recoil units; comma-separated for a sweep.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub v0: Vec<f64>,
    /// Number of lattice sites M.
    #[arg(long)]
    pub sites: Option<usize>,
    /// Number of atoms N.
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Lattice period in nanometres.
    #[arg(long = "d0-nm")]
    pub d0_nm: Option<f64>,
    /// s-wave scattering length in Bohr radii.
    #[arg(long = "as-bohr")]
    pub as_bohr: Option<f64>,
    /// Transverse trap frequency in recoil units.
    #[arg(long = "omega-r")]
    pub omega_r: Option<f64>,
    /// Bragg angle(s) theta = q_x d0 in units of pi; comma-separated.
    #[arg(long = "theta-pi", value_delimiter = ',', num_args = 1..)]
    pub theta_pi: Vec<f64>,
    /// Which theory to run.
    #[arg(long, value_enum)]
    pub backend: Option<BackendChoice>,
    /// Drop the light-induced-hopping coupling J1 from the probe.
    #[arg(long = "no-light-hopping")]
    pub no_light_hopping: bool,
    /// Detection time in milliseconds.
    #[arg(long = "t-detect-ms")]
    pub t_detect_ms: Option<f64>,
    /// Frequency-grid minimum in recoil units (needs max and count too).
    #[arg(long = "freq-min")]
    pub freq_min: Option<f64>,
    /// Frequency-grid maximum in recoil units.
    #[arg(long = "freq-max")]
    pub freq_max: Option<f64>,
    /// Number of frequency-grid points.
    #[arg(long = "freq-count")]
    pub freq_count: Option<usize>,
    /// Integrate each spectrum over frequency and emit an intensity table.
    #[arg(long)]
    pub intensity: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    Exact,
    #[value(name = "mott-analytic")]
    MottAnalytic,
    Bogoliubov,
    All,
}

impl BackendChoice {
    pub fn backends(self) -> Vec<Backend> {
        match self {
            BackendChoice::Exact => vec![Backend::Exact],
            BackendChoice::MottAnalytic => vec![Backend::MottAnalytic],
            BackendChoice::Bogoliubov => vec![Backend::Bogoliubov],
            BackendChoice::All => {
                vec![Backend::Exact, Backend::MottAnalytic, Backend::Bogoliubov]
            }
        }
    }

    fn parse(text: &str) -> anyhow::Result<Self> {
        match text {
            "exact" => Ok(BackendChoice::Exact),
            "mott-analytic" => Ok(BackendChoice::MottAnalytic),
            "bogoliubov" => Ok(BackendChoice::Bogoliubov),
            "all" => Ok(BackendChoice::All),
            other => bail!(
                "unknown backend '{other}' (expected exact, mott-analytic, bogoliubov or all)"
            ),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            BackendChoice::Exact => "exact",
            BackendChoice::MottAnalytic => "mott-analytic",
            BackendChoice::Bogoliubov => "bogoliubov",
            BackendChoice::All => "all",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    /// CSV tables plus a JSON sidecar carrying the line labels.
    Csv,
    /// JSON documents only.
    Json,
}

impl OutputFormat {
    fn parse(text: &str) -> anyhow::Result<Self> {
        match text {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown format '{other}' (expected csv or json)"),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// A fully resolved run: every parameter explicit.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub v0_grid: Vec<f64>,
    /// Bragg angles in units of pi.
    pub theta_pi_grid: Vec<f64>,
    pub sites: usize,
    pub atoms: usize,
    pub d0_nm: f64,
    pub as_bohr: f64,
    pub omega_r: f64,
    pub backend: BackendChoice,
    pub include_j1: bool,
    pub t_detect_ms: f64,
    pub freq_grid: Option<FrequencyGrid>,
    pub intensity: bool,
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn lattice_template(&self) -> anyhow::Result<LatticeConfig> {
        LatticeConfig::new(
            self.v0_grid[0],
            self.d0_nm * 1e-9,
            units::RB87_MASS,
            self.as_bohr * units::BOHR_RADIUS,
            self.omega_r,
            self.sites,
            self.atoms,
        )
        .map_err(|e| anyhow!("invalid lattice parameters: {e}"))
    }

    pub fn sweep_request(&self) -> anyhow::Result<SweepRequest> {
        Ok(SweepRequest {
            config: self.lattice_template()?,
            solver: SolverOptions::default(),
            v0_grid: self.v0_grid.clone(),
            theta_grid: self.theta_pi_grid.iter().map(|t| t * PI).collect(),
            backends: self.backend.backends(),
            j1_options: vec![self.include_j1],
            t_detect: self.t_detect_ms * 1e-3,
            grid: self.freq_grid.clone(),
            lineshape: Lineshape::Diffraction,
        })
    }
}

/// Partial parameter set from one source (preset, file or flags).
#[derive(Debug, Default, Clone)]
struct Layer {
    v0: Option<Vec<f64>>,
    theta_pi: Option<Vec<f64>>,
    sites: Option<usize>,
    atoms: Option<usize>,
    d0_nm: Option<f64>,
    as_bohr: Option<f64>,
    omega_r: Option<f64>,
    backend: Option<BackendChoice>,
    include_j1: Option<bool>,
    t_detect_ms: Option<f64>,
    freq_min: Option<f64>,
    freq_max: Option<f64>,
    freq_count: Option<usize>,
    intensity: Option<bool>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

impl Layer {
    fn apply(&mut self, over: &Layer) {
        macro_rules! take {
            ($field:ident) => {
                if over.$field.is_some() {
                    self.$field = over.$field.clone();
                }
            };
        }
        take!(v0);
        take!(theta_pi);
        take!(sites);
        take!(atoms);
        take!(d0_nm);
        take!(as_bohr);
        take!(omega_r);
        take!(backend);
        take!(include_j1);
        take!(t_detect_ms);
        take!(freq_min);
        take!(freq_max);
        take!(freq_count);
        take!(intensity);
        take!(out);
        take!(format);
    }
}

fn uniform_grid(last: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| last * i as f64 / (count - 1) as f64).collect()
}

fn preset_layer(name: &str) -> anyhow::Result<Layer> {
    let mut layer = Layer::default();
    let full_circle_41 = uniform_grid(2.0, 41);
    let full_circle_101 = uniform_grid(2.0, 101);
    match name {
        "fig2a" => {
            layer.v0 = Some(vec![8.1]);
            layer.theta_pi = Some(vec![2.0 / 7.0]);
        }
        "fig2b" => {
            layer.v0 = Some(vec![0.1]);
            layer.theta_pi = Some(vec![2.0 / 7.0]);
        }
        "fig2c" => {
            layer.v0 = Some(vec![8.1]);
            layer.theta_pi = Some(vec![6.0 / 7.0]);
        }
        "fig2d" => {
            layer.v0 = Some(vec![0.1]);
            layer.theta_pi = Some(vec![6.0 / 7.0]);
        }
        "fig3a" => {
            layer.v0 = Some(vec![8.1]);
            layer.theta_pi = Some(full_circle_41);
        }
        "fig3b" => {
            layer.v0 = Some(vec![0.1]);
            layer.theta_pi = Some(full_circle_41);
        }
        "fig3c" => {
            layer.v0 = Some(vec![0.1]);
            layer.theta_pi = Some(full_circle_41);
            layer.as_bohr = Some(10.5);
        }
        "fig4" => {
            layer.v0 = Some((0..41).map(|i| 0.1 + 0.2 * i as f64).collect());
            layer.theta_pi = Some(vec![6.0 / 7.0]);
        }
        "fig5a" => {
            layer.v0 = Some(vec![8.1]);
            layer.theta_pi = Some(full_circle_101);
            layer.intensity = Some(true);
        }
        "fig5b" => {
            layer.v0 = Some(vec![0.1]);
            layer.theta_pi = Some(full_circle_101);
            layer.intensity = Some(true);
        }
        "fig6" => {
            layer.v0 = Some((0..17).map(|i| 0.1 + 0.5 * i as f64).collect());
            layer.theta_pi = Some(full_circle_101);
            layer.intensity = Some(true);
        }
        other => bail!(
            "unknown preset '{other}' (expected fig2a-d, fig3a-c, fig4, fig5a-b or fig6)"
        ),
    }
    Ok(layer)
}

fn parse_list(value: &str) -> anyhow::Result<Vec<f64>> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("malformed number '{}'", part.trim()))
        })
        .collect()
}

fn parse_bool(value: &str) -> anyhow::Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => bail!("malformed boolean '{other}' (expected true or false)"),
    }
}

/// Parse a flat `key = value` file.  Keys mirror the long flags; `#` starts
/// a comment.  Returns the layer plus any preset named in the file.
fn file_layer(text: &str) -> anyhow::Result<(Layer, Option<String>)> {
    let mut layer = Layer::default();
    let mut preset = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected 'key = value', got '{line}'", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let context = |e: anyhow::Error| e.context(format!("config key '{key}'"));
        match key {
            "preset" => preset = Some(value.to_string()),
            "v0" => layer.v0 = Some(parse_list(value).map_err(context)?),
            "theta-pi" => layer.theta_pi = Some(parse_list(value).map_err(context)?),
            "sites" => {
                layer.sites =
                    Some(value.parse().map_err(|_| anyhow!("config key 'sites': malformed value '{value}'"))?)
            }
            "atoms" => {
                layer.atoms =
                    Some(value.parse().map_err(|_| anyhow!("config key 'atoms': malformed value '{value}'"))?)
            }
            "d0-nm" => {
                layer.d0_nm =
                    Some(value.parse().map_err(|_| anyhow!("config key 'd0-nm': malformed value '{value}'"))?)
            }
            "as-bohr" => {
                layer.as_bohr =
                    Some(value.parse().map_err(|_| anyhow!("config key 'as-bohr': malformed value '{value}'"))?)
            }
            "omega-r" => {
                layer.omega_r =
                    Some(value.parse().map_err(|_| anyhow!("config key 'omega-r': malformed value '{value}'"))?)
            }
            "backend" => layer.backend = Some(BackendChoice::parse(value).map_err(context)?),
            "no-light-hopping" => {
                layer.include_j1 = Some(!parse_bool(value).map_err(context)?)
            }
            "t-detect-ms" => {
                layer.t_detect_ms = Some(value.parse().map_err(|_| {
                    anyhow!("config key 't-detect-ms': malformed value '{value}'")
                })?)
            }
            "freq-min" => {
                layer.freq_min = Some(value.parse().map_err(|_| {
                    anyhow!("config key 'freq-min': malformed value '{value}'")
                })?)
            }
            "freq-max" => {
                layer.freq_max = Some(value.parse().map_err(|_| {
                    anyhow!("config key 'freq-max': malformed value '{value}'")
                })?)
            }
            "freq-count" => {
                layer.freq_count = Some(value.parse().map_err(|_| {
                    anyhow!("config key 'freq-count': malformed value '{value}'")
                })?)
            }
            "intensity" => layer.intensity = Some(parse_bool(value).map_err(context)?),
            "out" => layer.out = Some(PathBuf::from(value)),
            "format" => layer.format = Some(OutputFormat::parse(value).map_err(context)?),
            other => bail!("unknown config key '{other}'"),
        }
    }
    Ok((layer, preset))
}

fn flag_layer(args: &Args) -> Layer {
    Layer {
        v0: (!args.v0.is_empty()).then(|| args.v0.clone()),
        theta_pi: (!args.theta_pi.is_empty()).then(|| args.theta_pi.clone()),
        sites: args.sites,
        atoms: args.atoms,
        d0_nm: args.d0_nm,
        as_bohr: args.as_bohr,
        omega_r: args.omega_r,
        backend: args.backend,
        include_j1: args.no_light_hopping.then_some(false),
        t_detect_ms: args.t_detect_ms,
        freq_min: args.freq_min,
        freq_max: args.freq_max,
        freq_count: args.freq_count,
        intensity: args.intensity.then_some(true),
        out: args.out.clone(),
        format: args.format,
    }
}

/// Resolve a [`RunConfig`] from flags and the optional config file.
/// Precedence: reference defaults < preset < config file < flags.
pub fn resolve(args: &Args) -> anyhow::Result<RunConfig> {
    let (from_file, file_preset) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            file_layer(&text)?
        }
        None => (Layer::default(), None),
    };
    let preset_name = args.preset.clone().or(file_preset);
    let mut merged = Layer::default();
    if let Some(name) = &preset_name {
        merged.apply(&preset_layer(name)?);
    }
    merged.apply(&from_file);
    merged.apply(&flag_layer(args));

    let v0_grid = merged.v0.unwrap_or_default();
    let theta_pi_grid = merged.theta_pi.unwrap_or_default();
    if v0_grid.is_empty() || theta_pi_grid.is_empty() {
        bail!(
            "missing required parameters: supply --preset, or both --v0 and --theta-pi \
             (directly or through --config)"
        );
    }
    let freq_grid = match (merged.freq_min, merged.freq_max, merged.freq_count) {
        (None, None, None) => None,
        (Some(min), Some(max), Some(count)) => Some(FrequencyGrid { min, max, count }),
        _ => bail!("freq-min, freq-max and freq-count must be given together"),
    };
    let config = RunConfig {
        preset: preset_name,
        v0_grid,
        theta_pi_grid,
        sites: merged.sites.unwrap_or(7),
        atoms: merged.atoms.unwrap_or(7),
        d0_nm: merged.d0_nm.unwrap_or(413.0),
        as_bohr: merged.as_bohr.unwrap_or(105.0),
        omega_r: merged.omega_r.unwrap_or(10.0),
        backend: merged.backend.unwrap_or(BackendChoice::Exact),
        include_j1: merged.include_j1.unwrap_or(true),
        t_detect_ms: merged.t_detect_ms.unwrap_or(3.0),
        freq_grid,
        intensity: merged.intensity.unwrap_or(false),
        out: merged.out.unwrap_or_else(|| PathBuf::from("braggsim-out")),
        format: merged.format.unwrap_or(OutputFormat::Csv),
    };
    config.lattice_template()?;
    Ok(config)
}

/// Execute a resolved run: sweep, then serialize everything under `out`.
pub fn run(config: &RunConfig) -> anyhow::Result<RunSummary> {
    let request = config.sweep_request()?;
    let cells = braggsim_core::spectra::sweep(&request)
        .map_err(|e| anyhow!("sweep failed: {e}"))?;
    output::write_run(config, &cells)
}
