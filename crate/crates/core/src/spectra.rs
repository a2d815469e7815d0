//! Spectral assembly shared by all backends.
//!
//! Every backend reduces to a list of spectral lines (an elastic line plus
//! Stokes lines at positive frequency shifts) with weights in units of the
//! angular prefactor A(Omega).  This module renders those lines through the
//! finite-detection-time kernel, evaluates the lattice grating factor and
//! the angular prefactor, computes integrated intensities, and drives
//! depth/angle sweeps with artifact reuse.
//!
//! Frequencies are handled in recoil units throughout: a line shift is
//! `(E_f - E_0)` in units of `hbar omega_R`, and the detection time enters
//! as the dimensionless product `T omega_R`.

use ndarray::prelude::*;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bogoliubov::{bogoliubov_modes, condensate_depletion, sf_elastic, sf_stokes};
use crate::error::{Error, Result};
use crate::hilbert::{
    build_hamiltonian, ground_state, probe_operator, EigenDecomposition, FockBasis,
    HamiltonianMatrix, ProbeOperatorMatrix,
};
use crate::lattice::{
    coupling_coefficients, solve_lattice, CouplingCoefficients, HubbardParams, LatticeConfig,
    SolverOptions,
};
use crate::mott::{mott_elastic, mott_ground_state, mott_stokes};

/// Speed of light (m/s), used only by the angular prefactor.
const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Lines carrying less than this fraction of a spectrum's total weight are
/// ignored when sizing grids and checking their coverage.
const COVERAGE_RELATIVE_WEIGHT: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Kernels and closed-form factors
// ---------------------------------------------------------------------------

/// Finite-time energy-conservation kernel `sin(omega T / 2) / (pi omega)`.
///
/// `omega` and `t` may be in any mutually inverse units.  The kernel
/// integrates to 1 over the real line and has negative side lobes; its
/// central-lobe width `4 pi / T` sets the frequency resolution.
pub fn diffraction_kernel(omega: f64, t: f64) -> f64 {
    let z = 0.5 * omega * t;
    t / (2.0 * std::f64::consts::PI) * sinc(z)
}

/// Non-negative alternative lineshape `(T / 2 pi) sinc^2(omega T / 2)`,
/// also normalized to unit integral.
pub fn sinc_squared_kernel(omega: f64, t: f64) -> f64 {
    let z = 0.5 * omega * t;
    let s = sinc(z);
    t / (2.0 * std::f64::consts::PI) * s * s
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-5 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// Lattice grating factor `sin^2(M q d0 / 2) / (M^2 sin^2(q d0 / 2))`,
/// evaluated at the reduced momentum `q_x_d0 = q_x d0`.
///
/// Takes the value 1 at reciprocal-lattice points `q d0 = 2 pi n` (removable
/// singularity) and vanishes at the intermediate chain momenta `2 pi s / M`.
pub fn bloch_momentum_factor(q_x_d0: f64, sites: usize) -> f64 {
    let m = sites as f64;
    let x = 0.5 * q_x_d0;
    // Reduce by the nearest multiple of pi: sin^2(M(k pi + d)) = sin^2(M d)
    // exactly, which keeps the ratio well conditioned near the removable
    // singularities.
    let delta = x - (x / std::f64::consts::PI).round() * std::f64::consts::PI;
    if delta.abs() < 1e-12 {
        return 1.0;
    }
    let num = (m * delta).sin();
    let den = delta.sin();
    (num * num) / (m * m * den * den)
}

/// Inputs of the angular prefactor A(Omega).
#[derive(Debug, Clone, PartialEq)]
pub struct AngularPrefactor {
    /// Dipole linewidth gamma (rad/s).
    pub gamma: f64,
    /// Detuning `omega_L - omega_0` (rad/s); must be nonzero.
    pub delta: f64,
    /// Rabi frequency Omega_0 (rad/s).
    pub omega0_rabi: f64,
    /// `|D . n|^2 / |D|^2`, the emission-direction projection in [0, 1].
    pub dipole_projection: f64,
}

/// `A(Omega) = (gamma / c)(Omega_0^2 / Delta^2)(3 / 8 pi)(1 - |D.n|^2/|D|^2)`.
pub fn angular_prefactor(p: &AngularPrefactor) -> Result<f64> {
    if p.delta == 0.0 {
        return Err(Error::domain(
            "angular prefactor diverges on resonance: detuning must be nonzero",
        ));
    }
    if !(0.0..=1.0).contains(&p.dipole_projection) {
        return Err(Error::domain(format!(
            "dipole projection {} must lie in [0, 1]",
            p.dipole_projection
        )));
    }
    Ok((p.gamma / SPEED_OF_LIGHT)
        * (p.omega0_rabi / p.delta).powi(2)
        * (3.0 / (8.0 * std::f64::consts::PI))
        * (1.0 - p.dipole_projection))
}

// ---------------------------------------------------------------------------
// Probe geometry and grids
// ---------------------------------------------------------------------------

/// Rendered lineshape for the delta functions of the scattering formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Lineshape {
    /// The finite-time kernel as printed, side lobes included.
    #[default]
    Diffraction,
    /// Normalized sinc^2, non-negative, for plotting-friendly curves.
    SincSquared,
}

/// Scattering geometry and detection window of one measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeGeometry {
    /// Momentum transfer in units of 1/d0 (that is, q * d0 per component).
    pub q_d0: [f64; 3],
    /// Detection/integration time (s).
    pub t_detect: f64,
    /// Drive angular frequency (rad/s); bookkeeping only.
    pub omega_laser: Option<f64>,
    pub lineshape: Lineshape,
}

impl ProbeGeometry {
    /// Geometry from the Bragg angle alone: `theta = q_x d0`, transverse
    /// components zero.
    pub fn from_theta(theta: f64, t_detect: f64) -> Result<Self> {
        ProbeGeometry::with_q([theta, 0.0, 0.0], t_detect)
    }

    pub fn with_q(q_d0: [f64; 3], t_detect: f64) -> Result<Self> {
        if !(t_detect > 0.0) {
            return Err(Error::domain(format!(
                "detection time {t_detect} s must be > 0"
            )));
        }
        Ok(ProbeGeometry { q_d0, t_detect, omega_laser: None, lineshape: Lineshape::default() })
    }

    /// Detection time in recoil units, `T omega_R`.
    pub fn scaled_time(&self, omega_recoil: f64) -> f64 {
        self.t_detect * omega_recoil
    }
}

/// Uniform frequency axis in recoil units.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn values(&self) -> Result<Array1<f64>> {
        if self.count < 2 {
            return Err(Error::domain(format!(
                "frequency grid needs at least 2 points, got {}",
                self.count
            )));
        }
        if !(self.max > self.min) {
            return Err(Error::domain(format!(
                "frequency grid needs max > min, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(Array1::linspace(self.min, self.max, self.count))
    }
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Which theory produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    MottAnalytic,
    Bogoliubov,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::MottAnalytic => "mott-analytic",
            Backend::Bogoliubov => "bogoliubov",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Elastic,
    Stokes,
}

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Component::Elastic => "elastic",
            Component::Stokes => "stokes",
        })
    }
}

/// One spectral line: `weight * delta(nu - shift)` before broadening.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Frequency shift in recoil units.
    pub shift: f64,
    /// Weight in units of A(Omega).
    pub weight: f64,
    pub component: Component,
    /// Backend plus quantum numbers, e.g. "exact:f=12" or "mott:r=2,s=1".
    pub label: String,
}

/// A fully assembled spectrum: the line list plus the broadened elastic and
/// Stokes curves on a shared frequency grid (recoil units, weights per
/// A(Omega)).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub backend: Backend,
    pub lines: Vec<SpectralLine>,
    pub grid: Array1<f64>,
    pub broadened_elastic: Array1<f64>,
    pub broadened_stokes: Array1<f64>,
    /// Detection time in recoil units used for the broadening.
    pub scaled_time: f64,
    pub units_note: &'static str,
    pub warnings: Vec<String>,
}

impl Spectrum {
    pub fn broadened_total(&self) -> Array1<f64> {
        &self.broadened_elastic + &self.broadened_stokes
    }

    pub fn elastic_weight(&self) -> f64 {
        self.component_weight(Component::Elastic)
    }

    pub fn stokes_weight(&self) -> f64 {
        self.component_weight(Component::Stokes)
    }

    fn component_weight(&self, component: Component) -> f64 {
        self.lines
            .iter()
            .filter(|l| l.component == component)
            .map(|l| l.weight)
            .sum()
    }
}

fn assemble(
    backend: Backend,
    lines: Vec<SpectralLine>,
    grid: Option<&FrequencyGrid>,
    default_span: (f64, f64),
    scaled_time: f64,
    lineshape: Lineshape,
    warnings: Vec<String>,
) -> Result<Spectrum> {
    // The kernel tails decay as cos(omega T / 2) / omega, so a window edge at
    // distance d truncates ~cos(d T / 2)/(pi d T / 2) of a line's weight.
    // Padding by an odd multiple of pi/T puts the edge on a cosine zero,
    // keeping the truncation error of every line well below 1%.
    let margin = 21.0 * std::f64::consts::PI / scaled_time;
    let axis = match grid {
        Some(spec) => spec.values()?,
        None => {
            let total: f64 = lines.iter().map(|l| l.weight).sum();
            let floor = total * COVERAGE_RELATIVE_WEIGHT;
            let (mut lo, mut hi) = default_span;
            for line in lines.iter().filter(|l| l.weight > floor) {
                lo = lo.min(line.shift - margin);
                hi = hi.max(line.shift + margin);
            }
            if !(hi > lo) {
                hi = lo + 1.0;
            }
            FrequencyGrid { min: lo, max: hi, count: 2000 }.values()?
        }
    };
    let kernel = match lineshape {
        Lineshape::Diffraction => diffraction_kernel,
        Lineshape::SincSquared => sinc_squared_kernel,
    };
    let mut elastic = Array1::<f64>::zeros(axis.len());
    let mut stokes = Array1::<f64>::zeros(axis.len());
    for line in lines.iter().filter(|l| l.weight != 0.0) {
        let target = match line.component {
            Component::Elastic => &mut elastic,
            Component::Stokes => &mut stokes,
        };
        for (value, &nu) in target.iter_mut().zip(axis.iter()) {
            *value += line.weight * kernel(nu - line.shift, scaled_time);
        }
    }
    Ok(Spectrum {
        backend,
        lines,
        grid: axis,
        broadened_elastic: elastic,
        broadened_stokes: stokes,
        scaled_time,
        units_note: "per A(Omega)",
        warnings,
    })
}

/// Spectrum from the exact eigendecomposition: elastic line `|<i|T|i>|^2` at
/// zero shift and one Stokes line `|<f|T|i>|^2` at `E_f - E_0` for every
/// excited eigenstate.
pub fn exact_spectrum(
    eig: &EigenDecomposition,
    probe: &ProbeOperatorMatrix,
    geometry: &ProbeGeometry,
    omega_recoil: f64,
    grid: Option<&FrequencyGrid>,
) -> Result<Spectrum> {
    let dim = eig.energies.len();
    if probe.matrix.nrows() != dim || probe.matrix.ncols() != dim {
        return Err(Error::Shape(format!(
            "probe operator is {}x{}, eigenbasis has dimension {dim}",
            probe.matrix.nrows(),
            probe.matrix.ncols()
        )));
    }
    let gs = ground_state(eig);
    let mut warnings = Vec::new();
    if let Some((a, b)) = gs.degenerate_with {
        warnings.push(format!(
            "ground state is nearly degenerate (levels {a} and {b} split by {:.3e}); \
             elastic/Stokes split at zero shift is ambiguous",
            eig.energies[b] - eig.energies[a]
        ));
    }
    let t_psi = probe.apply(&gs.amplitudes);
    let re = eig.states.t().dot(&t_psi.mapv(|c| c.re));
    let im = eig.states.t().dot(&t_psi.mapv(|c| c.im));
    let lines: Vec<SpectralLine> = (0..dim)
        .map(|f| {
            let weight = re[f] * re[f] + im[f] * im[f];
            if f == 0 {
                SpectralLine {
                    shift: 0.0,
                    weight,
                    component: Component::Elastic,
                    label: "exact:elastic".to_string(),
                }
            } else {
                SpectralLine {
                    shift: eig.energies[f] - eig.energies[0],
                    weight,
                    component: Component::Stokes,
                    label: format!("exact:f={f}"),
                }
            }
        })
        .collect();
    assemble(
        Backend::Exact,
        lines,
        grid,
        (0.0, 0.0),
        geometry.scaled_time(omega_recoil),
        geometry.lineshape,
        warnings,
    )
}

/// Convenience wrapper diagonalizing the Hamiltonian on the fly.
pub fn exact_stokes_spectrum(
    h: &HamiltonianMatrix,
    probe: &ProbeOperatorMatrix,
    geometry: &ProbeGeometry,
    omega_recoil: f64,
    grid: Option<&FrequencyGrid>,
) -> Result<Spectrum> {
    exact_spectrum(&h.eigendecompose()?, probe, geometry, omega_recoil, grid)
}

fn analytic_span(params: &HubbardParams) -> (f64, f64) {
    let g = params.filling.max(1.0);
    (0.0, params.u + 3.0 * params.j * (2.0 * g + 1.0))
}

/// Spectrum of the Mott perturbative backend at integer filling.
pub fn mott_spectrum(
    params: &HubbardParams,
    coupling: &CouplingCoefficients,
    geometry: &ProbeGeometry,
    sites: usize,
    filling: usize,
    omega_recoil: f64,
    grid: Option<&FrequencyGrid>,
) -> Result<Spectrum> {
    let state = mott_ground_state(params, sites, filling)?;
    let warnings = state.warning.clone().into_iter().collect();
    let mut lines = vec![SpectralLine {
        shift: 0.0,
        weight: mott_elastic(params, coupling, sites, filling),
        component: Component::Elastic,
        label: "mott:elastic".to_string(),
    }];
    for line in mott_stokes(params, coupling, sites, filling)? {
        lines.push(SpectralLine {
            shift: line.shift,
            weight: line.weight,
            component: Component::Stokes,
            label: format!("mott:r={},s={}", line.r, line.s),
        });
    }
    assemble(
        Backend::MottAnalytic,
        lines,
        grid,
        analytic_span(params),
        geometry.scaled_time(omega_recoil),
        geometry.lineshape,
        warnings,
    )
}

/// Spectrum of the Bogoliubov backend.
pub fn bogoliubov_spectrum(
    params: &HubbardParams,
    coupling: &CouplingCoefficients,
    geometry: &ProbeGeometry,
    sites: usize,
    atoms: usize,
    omega_recoil: f64,
    grid: Option<&FrequencyGrid>,
) -> Result<Spectrum> {
    let modes = bogoliubov_modes(params, sites, atoms)?;
    let mut warnings = Vec::new();
    let depletion = condensate_depletion(&modes, atoms);
    if depletion > 0.1 {
        warnings.push(format!(
            "condensate depletion {depletion:.3} exceeds 0.1; Bogoliubov theory is \
             outside its validity window"
        ));
    }
    let mut lines = vec![SpectralLine {
        shift: 0.0,
        weight: sf_elastic(&modes, coupling, sites, atoms),
        component: Component::Elastic,
        label: "bogoliubov:elastic".to_string(),
    }];
    for line in sf_stokes(&modes, coupling, sites, atoms) {
        lines.push(SpectralLine {
            shift: line.shift,
            weight: line.weight,
            component: Component::Stokes,
            label: format!("bogoliubov:n={}", line.n),
        });
    }
    assemble(
        Backend::Bogoliubov,
        lines,
        grid,
        analytic_span(params),
        geometry.scaled_time(omega_recoil),
        geometry.lineshape,
        warnings,
    )
}

// ---------------------------------------------------------------------------
// Integrated intensity and peak finding
// ---------------------------------------------------------------------------

/// The angle-resolved intensity `d sigma / d Omega`, reported both as the
/// exact line sum and as the trapezoid integral of the broadened curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedIntensity {
    pub elastic: f64,
    pub stokes: f64,
    /// elastic + stokes; the exact value.
    pub line_sum: f64,
    /// Trapezoid integral of the broadened total, for consistency checks.
    pub grid_integral: f64,
}

/// Integrate a spectrum over frequency.  The grid must span every
/// weight-bearing line by at least `10 / T` on both sides so the broadened
/// form is meaningful; the line-sum form is exact regardless of resolution.
pub fn integrated_intensity(spec: &Spectrum) -> Result<IntegratedIntensity> {
    let margin = 10.0 / spec.scaled_time;
    let (lo, hi) = (spec.grid[0], spec.grid[spec.grid.len() - 1]);
    let total: f64 = spec.lines.iter().map(|l| l.weight).sum();
    let floor = total * COVERAGE_RELATIVE_WEIGHT;
    for line in spec.lines.iter().filter(|l| l.weight > floor) {
        if line.shift - margin < lo || line.shift + margin > hi {
            return Err(Error::Coverage(format!(
                "grid [{lo}, {hi}] does not span line at {} +- {margin} ({})",
                line.shift, line.label
            )));
        }
    }
    let elastic = spec.elastic_weight();
    let stokes = spec.stokes_weight();
    Ok(IntegratedIntensity {
        elastic,
        stokes,
        line_sum: elastic + stokes,
        grid_integral: trapezoid(&spec.grid, &spec.broadened_total()),
    })
}

pub(crate) fn trapezoid(x: &Array1<f64>, y: &Array1<f64>) -> f64 {
    let mut sum = 0.0;
    for i in 1..x.len() {
        sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    sum
}

/// Indices of strict local maxima of `values` no lower than
/// `min_fraction * max(values)`.  Grid endpoints count as peaks when the
/// curve falls away from them.
pub fn resolvable_peaks(values: &Array1<f64>, min_fraction: f64) -> Vec<usize> {
    let n = values.len();
    if n < 2 {
        return Vec::new();
    }
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let threshold = top * min_fraction;
    let mut peaks = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || values[i] > values[i - 1];
        let right_ok = i == n - 1 || values[i] > values[i + 1];
        if left_ok && right_ok && values[i] >= threshold {
            peaks.push(i);
        }
    }
    peaks
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// A grid of runs over depth, angle, backend and the light-induced-hopping
/// toggle.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    /// Template configuration; its depth is replaced by each `v0_grid` entry.
    pub config: LatticeConfig,
    pub solver: SolverOptions,
    /// Depths in recoil units; empty means "use the template's depth".
    pub v0_grid: Vec<f64>,
    /// Bragg angles `theta = q_x d0`.
    pub theta_grid: Vec<f64>,
    pub backends: Vec<Backend>,
    /// Values of the light-induced-hopping toggle to run, e.g. `[true]` or
    /// `[true, false]` for a comparison sweep.
    pub j1_options: Vec<bool>,
    /// Detection time (s).
    pub t_detect: f64,
    /// Frequency grid; `None` picks the per-cell default.
    pub grid: Option<FrequencyGrid>,
    pub lineshape: Lineshape,
}

/// One completed cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub v0: f64,
    pub theta: f64,
    pub backend: Backend,
    pub include_j1: bool,
    pub params: HubbardParams,
    pub spectrum: Spectrum,
}

/// Run every (v0, theta, backend, j1) combination in deterministic order:
/// depth-major, then angle, backend, toggle.  Lattice and
/// eigendecomposition artifacts are computed once per depth and shared by
/// all of its cells; cells run in parallel.
pub fn sweep(req: &SweepRequest) -> Result<Vec<SweepCell>> {
    if req.theta_grid.is_empty() {
        return Err(Error::domain("sweep needs at least one Bragg angle"));
    }
    if req.backends.is_empty() {
        return Err(Error::domain("sweep needs at least one backend"));
    }
    if req.j1_options.is_empty() {
        return Err(Error::domain("sweep needs at least one hopping-toggle value"));
    }
    let depths: Vec<f64> = if req.v0_grid.is_empty() {
        vec![req.config.v0]
    } else {
        req.v0_grid.clone()
    };
    let needs_exact = req.backends.contains(&Backend::Exact);
    let basis = if needs_exact {
        Some(FockBasis::new(req.config.sites, req.config.atoms)?)
    } else {
        None
    };
    let mut cells = Vec::new();
    for &v0 in &depths {
        let config = LatticeConfig::new(
            v0,
            req.config.d0,
            req.config.mass,
            req.config.a_s,
            req.config.omega_r,
            req.config.sites,
            req.config.atoms,
        )?;
        let artifacts = solve_lattice(&config, &req.solver)?;
        let params = artifacts.hubbard.clone();
        let eig = match &basis {
            // Spectra use mu = 0: a chemical potential shifts all fixed-N
            // eigenvalues equally and cancels in the frequency shifts.
            Some(b) => Some(build_hamiltonian(b, params.j, params.u, 0.0).eigendecompose()?),
            None => None,
        };
        let omega_recoil = config.omega_recoil();
        let mut tasks = Vec::new();
        for &theta in &req.theta_grid {
            for &backend in &req.backends {
                for &include_j1 in &req.j1_options {
                    tasks.push((theta, backend, include_j1));
                }
            }
        }
        let results: Vec<Result<SweepCell>> = tasks
            .par_iter()
            .map(|&(theta, backend, include_j1)| {
                let geometry = ProbeGeometry {
                    q_d0: [theta, 0.0, 0.0],
                    t_detect: req.t_detect,
                    omega_laser: None,
                    lineshape: req.lineshape,
                };
                let mut coupling =
                    coupling_coefficients(&artifacts.wannier, &config, geometry.q_d0)?;
                if !include_j1 {
                    coupling.j1 = Complex64::new(0.0, 0.0);
                }
                let spectrum = match backend {
                    Backend::Exact => {
                        let probe = probe_operator(
                            basis.as_ref().expect("basis prepared for exact backend"),
                            &coupling,
                            include_j1,
                        );
                        exact_spectrum(
                            eig.as_ref().expect("eigendecomposition prepared"),
                            &probe,
                            &geometry,
                            omega_recoil,
                            req.grid.as_ref(),
                        )?
                    }
                    Backend::MottAnalytic => {
                        let filling = config.integer_filling().ok_or_else(|| {
                            Error::domain(format!(
                                "Mott backend needs integer filling, got {} atoms on {} sites",
                                config.atoms, config.sites
                            ))
                        })?;
                        mott_spectrum(
                            &params,
                            &coupling,
                            &geometry,
                            config.sites,
                            filling,
                            omega_recoil,
                            req.grid.as_ref(),
                        )?
                    }
                    Backend::Bogoliubov => bogoliubov_spectrum(
                        &params,
                        &coupling,
                        &geometry,
                        config.sites,
                        config.atoms,
                        omega_recoil,
                        req.grid.as_ref(),
                    )?,
                };
                Ok(SweepCell { v0, theta, backend, include_j1, params: params.clone(), spectrum })
            })
            .collect();
        for cell in results {
            cells.push(cell?);
        }
    }
    Ok(cells)
}
