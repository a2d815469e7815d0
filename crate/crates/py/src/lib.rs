//! Python bindings for the lattice Bragg-spectrum simulator.
//!
//! Exposes the solved lattice (Hubbard parameters, Wannier function, probe
//! couplings) and the three spectrum backends as a `braggsim` extension
//! module.  All frequencies are in recoil units and all spectral weights in
//! units of the angular prefactor A(Omega), as in the core crate.

use std::sync::OnceLock;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use braggsim_core::bogoliubov::{bogoliubov_modes, condensate_depletion};
use braggsim_core::hilbert::{build_hamiltonian, probe_operator, EigenDecomposition, FockBasis};
use braggsim_core::lattice::{
    coupling_coefficients, solve_lattice, LatticeArtifacts, LatticeConfig, SolverOptions,
};
use braggsim_core::spectra::{
    bogoliubov_spectrum, exact_spectrum, integrated_intensity, mott_spectrum, ProbeGeometry,
};
use braggsim_core::units;
use braggsim_core::Error;

fn to_py(error: Error) -> PyErr {
    match error {
        Error::Domain(_) | Error::Shape(_) => PyValueError::new_err(error.to_string()),
        _ => PyRuntimeError::new_err(error.to_string()),
    }
}

/// A solved 1D optical lattice: band structure, Wannier function and
/// Bose-Hubbard parameters for one depth.
///
/// Args:
///     v0: Lattice depth in recoil units.
///     sites: Number of lattice sites M.
///     atoms: Number of atoms N.
///     d0_nm: Lattice period in nanometres.
///     a_s_bohr: s-wave scattering length in Bohr radii.
///     omega_r: Transverse trap frequency in recoil units.
#[pyclass]
struct Lattice {
    config: LatticeConfig,
    artifacts: LatticeArtifacts,
    /// Exact eigenbasis, solved on first use and shared by later calls.
    exact: OnceLock<(FockBasis, EigenDecomposition)>,
}

impl Lattice {
    fn exact_parts(&self) -> PyResult<&(FockBasis, EigenDecomposition)> {
        if self.exact.get().is_none() {
            let basis =
                FockBasis::new(self.config.sites, self.config.atoms).map_err(to_py)?;
            let hubbard = &self.artifacts.hubbard;
            // mu = 0: a chemical potential cancels in the frequency shifts.
            let eig = build_hamiltonian(&basis, hubbard.j, hubbard.u, 0.0)
                .eigendecompose()
                .map_err(to_py)?;
            let _ = self.exact.set((basis, eig));
        }
        Ok(self.exact.get().expect("eigenbasis just initialized"))
    }

    fn geometry(&self, theta: f64, t_detect_ms: f64) -> PyResult<ProbeGeometry> {
        ProbeGeometry::from_theta(theta, t_detect_ms * 1e-3).map_err(to_py)
    }

    fn coupling_at(
        &self,
        theta: f64,
        include_j1: bool,
    ) -> PyResult<braggsim_core::lattice::CouplingCoefficients> {
        let mut coupling =
            coupling_coefficients(&self.artifacts.wannier, &self.config, [theta, 0.0, 0.0])
                .map_err(to_py)?;
        if !include_j1 {
            coupling.j1 = Complex64::new(0.0, 0.0);
        }
        Ok(coupling)
    }
}

#[pymethods]
impl Lattice {
    #[new]
    #[pyo3(signature = (v0, sites=7, atoms=7, d0_nm=413.0, a_s_bohr=105.0, omega_r=10.0))]
    fn new(
        v0: f64,
        sites: usize,
        atoms: usize,
        d0_nm: f64,
        a_s_bohr: f64,
        omega_r: f64,
    ) -> PyResult<Self> {
        let config = LatticeConfig::new(
            v0,
            d0_nm * 1e-9,
            units::RB87_MASS,
            a_s_bohr * units::BOHR_RADIUS,
            omega_r,
            sites,
            atoms,
        )
        .map_err(to_py)?;
        let artifacts = solve_lattice(&config, &SolverOptions::default()).map_err(to_py)?;
        Ok(Lattice { config, artifacts, exact: OnceLock::new() })
    }

    /// Lattice depth in recoil units.
    #[getter]
    fn v0(&self) -> f64 {
        self.config.v0
    }

    #[getter]
    fn sites(&self) -> usize {
        self.config.sites
    }

    #[getter]
    fn atoms(&self) -> usize {
        self.config.atoms
    }

    /// Nearest-neighbour hopping J in recoil units.
    #[getter]
    fn hopping(&self) -> f64 {
        self.artifacts.hubbard.j
    }

    /// On-site interaction U in recoil units.
    #[getter]
    fn interaction(&self) -> f64 {
        self.artifacts.hubbard.u
    }

    #[getter]
    fn u_over_j(&self) -> f64 {
        self.artifacts.hubbard.u_over_j()
    }

    /// Recoil angular frequency omega_R in rad/s.
    #[getter]
    fn omega_recoil(&self) -> f64 {
        self.config.omega_recoil()
    }

    #[getter]
    fn filling(&self) -> f64 {
        self.config.filling()
    }

    /// Wannier function of the lowest band: `(x, w)` with `x` in units of
    /// d0 and `w` normalized so that `integral w^2 dx = 1`.
    fn wannier(&self) -> (Vec<f64>, Vec<f64>) {
        (self.artifacts.wannier.x_d0.clone(), self.artifacts.wannier.w.clone())
    }

    /// Probe couplings `(j0, j1)` at Bragg angle `theta = q_x d0`: the
    /// density and light-induced-hopping channels of the scattering
    /// operator, both dimensionless.
    fn coupling(&self, theta: f64) -> PyResult<(Complex64, Complex64)> {
        let coupling = self.coupling_at(theta, true)?;
        Ok((coupling.j0, coupling.j1))
    }

    /// Bogoliubov quasiparticle modes as `(n, p_d0, epsilon, freq, u, v)`
    /// tuples: mode index, quasi-momentum times d0, tight-binding energy,
    /// quasiparticle frequency (recoil units) and the two amplitudes with
    /// `u^2 - v^2 = 1`.
    fn bogoliubov_modes(&self) -> PyResult<Vec<(i64, f64, f64, f64, f64, f64)>> {
        let modes =
            bogoliubov_modes(&self.artifacts.hubbard, self.config.sites, self.config.atoms)
                .map_err(to_py)?;
        Ok(modes
            .iter()
            .map(|m| (m.n, m.p_d0, m.epsilon, m.freq, m.u, m.v))
            .collect())
    }

    /// Condensate depletion fraction predicted by Bogoliubov theory.
    fn depletion(&self) -> PyResult<f64> {
        let modes =
            bogoliubov_modes(&self.artifacts.hubbard, self.config.sites, self.config.atoms)
                .map_err(to_py)?;
        Ok(condensate_depletion(&modes, self.config.atoms))
    }

    /// Elastic plus Stokes spectrum at Bragg angle `theta = q_x d0`.
    ///
    /// Args:
    ///     theta: Bragg angle, i.e. the momentum transfer along the lattice
    ///         in units of 1/d0.
    ///     backend: "exact", "mott-analytic" or "bogoliubov".
    ///     include_j1: Keep the light-induced-hopping channel of the probe.
    ///     t_detect_ms: Detection time in milliseconds.
    #[pyo3(signature = (theta, backend="exact", include_j1=true, t_detect_ms=3.0))]
    fn spectrum(
        &self,
        theta: f64,
        backend: &str,
        include_j1: bool,
        t_detect_ms: f64,
    ) -> PyResult<Spectrum> {
        let geometry = self.geometry(theta, t_detect_ms)?;
        let coupling = self.coupling_at(theta, include_j1)?;
        let omega_recoil = self.config.omega_recoil();
        let hubbard = &self.artifacts.hubbard;
        let inner = match backend {
            "exact" => {
                let (basis, eig) = self.exact_parts()?;
                let probe = probe_operator(basis, &coupling, include_j1);
                exact_spectrum(eig, &probe, &geometry, omega_recoil, None).map_err(to_py)?
            }
            "mott-analytic" => {
                let filling = self.config.integer_filling().ok_or_else(|| {
                    PyValueError::new_err(format!(
                        "the Mott backend needs integer filling, got {} atoms on {} sites",
                        self.config.atoms, self.config.sites
                    ))
                })?;
                mott_spectrum(
                    hubbard,
                    &coupling,
                    &geometry,
                    self.config.sites,
                    filling,
                    omega_recoil,
                    None,
                )
                .map_err(to_py)?
            }
            "bogoliubov" => bogoliubov_spectrum(
                hubbard,
                &coupling,
                &geometry,
                self.config.sites,
                self.config.atoms,
                omega_recoil,
                None,
            )
            .map_err(to_py)?,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown backend '{other}' (expected exact, mott-analytic or bogoliubov)"
                )))
            }
        };
        Ok(Spectrum { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Lattice(v0={}, sites={}, atoms={}, U/J={:.4})",
            self.config.v0,
            self.config.sites,
            self.config.atoms,
            self.artifacts.hubbard.u_over_j()
        )
    }
}

/// One computed spectrum: the list of delta lines and the finite-detection-
/// time broadened curves on a shared frequency grid.  Frequencies are in
/// recoil units, weights in units of the angular prefactor A(Omega).
#[pyclass]
struct Spectrum {
    inner: braggsim_core::spectra::Spectrum,
}

#[pymethods]
impl Spectrum {
    /// Backend tag: "exact", "mott-analytic" or "bogoliubov".
    #[getter]
    fn backend(&self) -> String {
        self.inner.backend.to_string()
    }

    /// Delta lines as `(shift, weight, component, label)` tuples, with
    /// `component` either "elastic" or "stokes".
    fn lines(&self) -> Vec<(f64, f64, String, String)> {
        self.inner
            .lines
            .iter()
            .map(|l| (l.shift, l.weight, l.component.to_string(), l.label.clone()))
            .collect()
    }

    /// Frequency grid of the broadened curves, in recoil units.
    #[getter]
    fn grid(&self) -> Vec<f64> {
        self.inner.grid.to_vec()
    }

    #[getter]
    fn broadened_elastic(&self) -> Vec<f64> {
        self.inner.broadened_elastic.to_vec()
    }

    #[getter]
    fn broadened_stokes(&self) -> Vec<f64> {
        self.inner.broadened_stokes.to_vec()
    }

    fn broadened_total(&self) -> Vec<f64> {
        self.inner.broadened_total().to_vec()
    }

    /// Total elastic line weight.
    fn elastic_weight(&self) -> f64 {
        self.inner.elastic_weight()
    }

    /// Total Stokes line weight.
    fn stokes_weight(&self) -> f64 {
        self.inner.stokes_weight()
    }

    /// Detection time in recoil units used for the broadening.
    #[getter]
    fn scaled_time(&self) -> f64 {
        self.inner.scaled_time
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    /// Angle-resolved intensity as `(elastic, stokes, line_sum,
    /// grid_integral)`: the exact line sums and the trapezoid integral of
    /// the broadened total, which agree up to broadening-truncation error.
    fn integrated(&self) -> PyResult<(f64, f64, f64, f64)> {
        let intensity = integrated_intensity(&self.inner).map_err(to_py)?;
        Ok((
            intensity.elastic,
            intensity.stokes,
            intensity.line_sum,
            intensity.grid_integral,
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Spectrum(backend={}, lines={}, elastic={:.4e}, stokes={:.4e})",
            self.inner.backend,
            self.inner.lines.len(),
            self.inner.elastic_weight(),
            self.inner.stokes_weight()
        )
    }
}

/// Finite-detection-time line kernel `sin(omega t / 2) / (pi omega)`;
/// integrates to 1 over the whole axis.
#[pyfunction]
fn diffraction_kernel(omega: f64, t: f64) -> f64 {
    braggsim_core::spectra::diffraction_kernel(omega, t)
}

/// Finite-lattice grating factor `sin^2(M q d0 / 2) / (M^2 sin^2(q d0 / 2))`.
#[pyfunction]
fn bloch_momentum_factor(q_x_d0: f64, sites: usize) -> f64 {
    braggsim_core::spectra::bloch_momentum_factor(q_x_d0, sites)
}

#[pymodule]
fn braggsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Lattice>()?;
    m.add_class::<Spectrum>()?;
    m.add_function(wrap_pyfunction!(diffraction_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_momentum_factor, m)?)?;
    Ok(())
}
