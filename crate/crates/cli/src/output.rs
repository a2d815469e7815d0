//! Serialization of sweep results: per-cell spectra (CSV plus a JSON
//! sidecar carrying the line labels, or JSON alone), intensity tables, and
//! the run manifest that makes every dataset self-describing.
//!
//! Output is deterministic: fixed file naming, fixed row/key order, and no
//! timestamps, so identical configurations produce byte-identical trees.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use braggsim_core::spectra::{integrated_intensity, SweepCell};

use super::{OutputFormat, RunConfig};

const PI: f64 = std::f64::consts::PI;

/// What a run produced, for callers and tests.
#[derive(Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest_path: PathBuf,
    pub files: Vec<PathBuf>,
    pub cell_count: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LineRecord {
    pub shift: f64,
    pub weight: f64,
    pub component: String,
    pub label: String,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct BroadenedRecord {
    pub elastic: Vec<f64>,
    pub stokes: Vec<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CellManifest {
    pub index: usize,
    pub v0: f64,
    pub theta_over_pi: f64,
    pub backend: String,
    pub include_j1: bool,
    pub t_detect_ms: f64,
    /// Detection time in recoil units (the broadening parameter).
    pub scaled_time: f64,
    pub units_note: String,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
}

/// One spectrum as written to `cell_NNN.json`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CellDocument {
    pub lines: Vec<LineRecord>,
    pub grid: Vec<f64>,
    pub broadened: BroadenedRecord,
    pub manifest: CellManifest,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DerivedParameters {
    pub v0: f64,
    /// Hopping amplitude J in recoil units.
    pub j: f64,
    /// On-site interaction U in recoil units.
    pub u: f64,
    pub u_over_j: f64,
    /// Chemical potential at the configured filling, recoil units.
    pub mu: f64,
    /// Transverse oscillator length over the lattice period.
    pub xi_r_over_d0: f64,
    /// Recoil angular frequency (rad/s).
    pub omega_recoil: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct FrequencyGridRecord {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Parameters {
    pub sites: usize,
    pub atoms: usize,
    pub d0_nm: f64,
    pub a_s_bohr: f64,
    pub omega_r: f64,
    pub backend: String,
    pub include_j1: bool,
    pub t_detect_ms: f64,
    pub intensity: bool,
    pub format: String,
    pub v0_grid: Vec<f64>,
    pub theta_pi_grid: Vec<f64>,
    pub freq_grid: Option<FrequencyGridRecord>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Manifest {
    pub preset: Option<String>,
    pub parameters: Parameters,
    pub derived: Vec<DerivedParameters>,
    pub cells: Vec<CellManifest>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct IntensityRow {
    pub v0: f64,
    pub theta_over_pi: f64,
    pub backend: String,
    pub include_j1: bool,
    pub elastic: f64,
    pub stokes: f64,
    pub total: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct IntensityDocument {
    pub rows: Vec<IntensityRow>,
}

fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn cell_manifest(config: &RunConfig, index: usize, cell: &SweepCell, files: Vec<String>) -> CellManifest {
    CellManifest {
        index,
        v0: cell.v0,
        theta_over_pi: cell.theta / PI,
        backend: cell.backend.to_string(),
        include_j1: cell.include_j1,
        t_detect_ms: config.t_detect_ms,
        scaled_time: cell.spectrum.scaled_time,
        units_note: cell.spectrum.units_note.to_string(),
        warnings: cell.spectrum.warnings.clone(),
        files,
    }
}

fn write_spectrum_csv(path: &PathBuf, cell: &SweepCell) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record(["omega_over_omegaR", "sigma_per_A", "component", "backend"])?;
    let backend = cell.backend.to_string();
    for (component, curve) in [
        ("elastic", &cell.spectrum.broadened_elastic),
        ("stokes", &cell.spectrum.broadened_stokes),
    ] {
        for (nu, value) in cell.spectrum.grid.iter().zip(curve.iter()) {
            writer.write_record([format!("{nu}"), format!("{value:e}"), component.to_string(), backend.clone()])?;
        }
    }
    writer.flush()?;
    Ok(())
}

fn write_intensity_csv(path: &PathBuf, rows: &[IntensityRow]) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    writer.write_record([
        "v0",
        "theta_over_pi",
        "elastic",
        "stokes",
        "total",
        "backend",
        "include_j1",
    ])?;
    for row in rows {
        writer.write_record([
            format!("{}", row.v0),
            format!("{}", row.theta_over_pi),
            format!("{:e}", row.elastic),
            format!("{:e}", row.stokes),
            format!("{:e}", row.total),
            row.backend.clone(),
            format!("{}", row.include_j1),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Serialize a completed sweep under `config.out`.
pub fn write_run(config: &RunConfig, cells: &[SweepCell]) -> anyhow::Result<RunSummary> {
    fs::create_dir_all(&config.out)
        .with_context(|| format!("creating output directory {}", config.out.display()))?;
    let template = config.lattice_template()?;
    let mut files = Vec::new();
    let mut cell_manifests = Vec::new();

    if config.intensity {
        let mut rows = Vec::with_capacity(cells.len());
        for cell in cells {
            let intensity = integrated_intensity(&cell.spectrum)
                .map_err(|e| anyhow::anyhow!("integrating cell spectrum: {e}"))?;
            rows.push(IntensityRow {
                v0: cell.v0,
                theta_over_pi: cell.theta / PI,
                backend: cell.backend.to_string(),
                include_j1: cell.include_j1,
                elastic: intensity.elastic,
                stokes: intensity.stokes,
                total: intensity.line_sum,
            });
        }
        let (name, path) = match config.format {
            OutputFormat::Csv => {
                let path = config.out.join("intensity.csv");
                write_intensity_csv(&path, &rows)?;
                ("intensity.csv", path)
            }
            OutputFormat::Json => {
                let path = config.out.join("intensity.json");
                write_json(&path, &IntensityDocument { rows })?;
                ("intensity.json", path)
            }
        };
        files.push(path);
        for (index, cell) in cells.iter().enumerate() {
            cell_manifests.push(cell_manifest(config, index, cell, vec![name.to_string()]));
        }
    } else {
        for (index, cell) in cells.iter().enumerate() {
            let stem = format!("cell_{index:03}");
            let mut cell_files = Vec::new();
            if config.format == OutputFormat::Csv {
                let path = config.out.join(format!("{stem}.csv"));
                write_spectrum_csv(&path, cell)?;
                cell_files.push(format!("{stem}.csv"));
                files.push(path);
            }
            // The JSON document always exists: it carries the line labels.
            let manifest = cell_manifest(
                config,
                index,
                cell,
                std::iter::once(format!("{stem}.json"))
                    .chain(cell_files.iter().cloned())
                    .collect(),
            );
            let document = CellDocument {
                lines: cell
                    .spectrum
                    .lines
                    .iter()
                    .map(|l| LineRecord {
                        shift: l.shift,
                        weight: l.weight,
                        component: l.component.to_string(),
                        label: l.label.clone(),
                    })
                    .collect(),
                grid: cell.spectrum.grid.to_vec(),
                broadened: BroadenedRecord {
                    elastic: cell.spectrum.broadened_elastic.to_vec(),
                    stokes: cell.spectrum.broadened_stokes.to_vec(),
                },
                manifest: manifest.clone(),
            };
            let path = config.out.join(format!("{stem}.json"));
            write_json(&path, &document)?;
            files.push(path);
            cell_manifests.push(manifest);
        }
    }

    let mut derived = Vec::new();
    let mut seen = Vec::new();
    for cell in cells {
        if seen.contains(&cell.v0.to_bits()) {
            continue;
        }
        seen.push(cell.v0.to_bits());
        derived.push(DerivedParameters {
            v0: cell.v0,
            j: cell.params.j,
            u: cell.params.u,
            u_over_j: cell.params.u_over_j(),
            mu: cell.params.mu,
            xi_r_over_d0: template.xi_r() / template.d0,
            omega_recoil: template.omega_recoil(),
        });
    }
    let manifest = Manifest {
        preset: config.preset.clone(),
        parameters: Parameters {
            sites: config.sites,
            atoms: config.atoms,
            d0_nm: config.d0_nm,
            a_s_bohr: config.as_bohr,
            omega_r: config.omega_r,
            backend: config.backend.tag().to_string(),
            include_j1: config.include_j1,
            t_detect_ms: config.t_detect_ms,
            intensity: config.intensity,
            format: config.format.tag().to_string(),
            v0_grid: config.v0_grid.clone(),
            theta_pi_grid: config.theta_pi_grid.clone(),
            freq_grid: config.freq_grid.as_ref().map(|g| FrequencyGridRecord {
                min: g.min,
                max: g.max,
                count: g.count,
            }),
        },
        derived,
        cells: cell_manifests,
    };
    let manifest_path = config.out.join("manifest.json");
    write_json(&manifest_path, &manifest)?;
    files.push(manifest_path.clone());
    Ok(RunSummary {
        out_dir: config.out.clone(),
        manifest_path,
        files,
        cell_count: cells.len(),
    })
}
