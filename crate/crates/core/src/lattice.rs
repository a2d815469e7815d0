//! Single-particle input for the Bose-Hubbard description: lowest-band
//! structure of the 1D optical lattice, the associated Wannier function, the
//! Hubbard parameters (J, U, mu) and the two coupling coefficients j0(q),
//! j1(q) through which the probe light talks to density and bond operators.
//!
//! The lattice potential is `V(x) = V0 sin^2(pi x / d0)` with a tight
//! transverse harmonic trap of frequency `omega_r`; transverse motion is
//! frozen in the Gaussian ground state and enters only through the
//! oscillator length `xi_r`.
//!
//! Reduced units: lengths in `d0`, energies/frequencies in the lattice
//! recoil `hbar omega_R`, `omega_R = hbar pi^2 / (2 m d0^2)`.  In these units
//! the single-particle Hamiltonian reads
//! `h = -(1/pi^2) d^2/dx^2 + v0 sin^2(pi x)`.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units;

/// Physical parameters of the lattice gas.
///
/// `v0` and `omega_r` are given in recoil units (`hbar omega_R` and
/// `omega_R`); `d0` and `a_s` are in meters, `mass` in kilograms.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeConfig {
    /// Lattice depth in units of `hbar omega_R`.
    pub v0: f64,
    /// Lattice period (m).
    pub d0: f64,
    /// Atomic mass (kg).
    pub mass: f64,
    /// s-wave scattering length (m).
    pub a_s: f64,
    /// Transverse trap frequency in units of `omega_R`.
    pub omega_r: f64,
    /// Number of lattice sites M.
    pub sites: usize,
    /// Number of atoms N.
    pub atoms: usize,
}

impl LatticeConfig {
    pub fn new(
        v0: f64,
        d0: f64,
        mass: f64,
        a_s: f64,
        omega_r: f64,
        sites: usize,
        atoms: usize,
    ) -> Result<Self> {
        if !v0.is_finite() || v0 < 0.0 {
            return Err(Error::domain(format!("lattice depth v0 = {v0} must be >= 0")));
        }
        if !(d0 > 0.0) {
            return Err(Error::domain(format!("lattice period d0 = {d0} must be > 0")));
        }
        if !(mass > 0.0) {
            return Err(Error::domain(format!("mass = {mass} must be > 0")));
        }
        if !a_s.is_finite() || a_s < 0.0 {
            return Err(Error::domain(format!("scattering length a_s = {a_s} must be >= 0")));
        }
        if !(omega_r > 0.0) {
            return Err(Error::domain(format!("trap frequency omega_r = {omega_r} must be > 0")));
        }
        if sites < 2 {
            return Err(Error::domain(format!("need at least 2 sites, got {sites}")));
        }
        if atoms < 1 {
            return Err(Error::domain(format!("need at least 1 atom, got {atoms}")));
        }
        Ok(LatticeConfig { v0, d0, mass, a_s, omega_r, sites, atoms })
    }

    /// Convenience constructor for the workhorse case: rubidium-87 with the
    /// depth, size and filling given explicitly and everything else at the
    /// reference values (d0 = 413 nm, a_s = 105 a0, omega_r = 10 omega_R).
    pub fn rubidium(v0: f64, sites: usize, atoms: usize) -> Result<Self> {
        LatticeConfig::new(
            v0,
            413e-9,
            units::RB87_MASS,
            105.0 * units::BOHR_RADIUS,
            10.0,
            sites,
            atoms,
        )
    }

    /// Recoil angular frequency `omega_R` (rad/s).
    pub fn omega_recoil(&self) -> f64 {
        units::recoil_frequency(self.mass, self.d0)
    }

    /// Transverse oscillator length `xi_r` (m).
    pub fn xi_r(&self) -> f64 {
        units::oscillator_length(self.mass, self.omega_r * self.omega_recoil())
    }

    /// Filling factor N/M.
    pub fn filling(&self) -> f64 {
        self.atoms as f64 / self.sites as f64
    }

    /// Integer filling g if the gas is commensurate, `None` otherwise.
    pub fn integer_filling(&self) -> Option<usize> {
        (self.atoms % self.sites == 0).then(|| self.atoms / self.sites)
    }
}

/// Discretization knobs for the band/Wannier solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Plane-wave cutoff: reciprocal vectors `2 pi n / d0` with |n| <= cutoff.
    pub plane_wave_cutoff: usize,
    /// Number of quasimomenta in the Brillouin zone (must be a multiple of
    /// the site number).  `None` picks a localization-based automatic value.
    pub k_count: Option<usize>,
    /// Quadrature points per lattice period for real-space integrals.
    pub points_per_period: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { plane_wave_cutoff: 16, k_count: None, points_per_period: 256 }
    }
}

/// Lowest-band Bloch data on a uniform quasimomentum grid.
#[derive(Debug, Clone)]
pub struct BandData {
    /// Quasimomenta `k d0`, ascending, spanning one Brillouin zone (-pi, pi].
    pub k_d0: Vec<f64>,
    /// Lowest-band energies E(k) in units of `hbar omega_R`.
    pub energies: Vec<f64>,
    /// Real plane-wave coefficients, row per k, column per reciprocal index
    /// n = -cutoff ..= cutoff.  Gauge: the Bloch function is real and
    /// positive at x = 0, i.e. the coefficient sum of every row is positive.
    pub coefficients: Array2<f64>,
    /// Plane-wave cutoff used.
    pub cutoff: usize,
    /// Lattice depth the band was solved for (units of `hbar omega_R`).
    pub v0: f64,
}

/// Automatic Brillouin-zone sampling for `solve_band_structure`.
///
/// The k-count doubles as the real-space window length in periods, so it is
/// chosen from the asymptotic decay rate of the Wannier function (set by the
/// band gap; for shallow lattices the two-band estimate `kappa = pi v0 / 8`
/// per period).  Shallow lattices therefore get a much wider window than the
/// deep-lattice floor of 16 periods per site.
pub fn auto_k_count(config: &LatticeConfig) -> usize {
    let kappa = (std::f64::consts::PI * config.v0.min(4.0) / 8.0).max(0.02);
    // e^(-2 kappa X) <= 1e-10 at half-window X
    let needed = (2.0 * 11.5 / kappa).ceil() as usize;
    let floor = 16 * config.sites;
    let step = 2 * config.sites; // keep the grid even and commensurate
    let raw = needed.max(floor).max(11);
    raw.div_ceil(step) * step
}

/// Solve the lowest band of `-(1/pi^2) d^2/dx^2 + v0 sin^2(pi x)` by
/// plane-wave expansion on a uniform Brillouin-zone grid.
///
/// `k_count` must be a positive multiple of the site number so the chain
/// momenta `2 pi s / M` all lie on the grid.  Energies are checked for
/// convergence against a cutoff enlarged by 4; failure to reach 1e-8 is a
/// resolution error.
pub fn solve_band_structure(
    config: &LatticeConfig,
    cutoff: usize,
    k_count: usize,
) -> Result<BandData> {
    if cutoff < 2 {
        return Err(Error::domain(format!("plane-wave cutoff {cutoff} too small (need >= 2)")));
    }
    if k_count == 0 || k_count % config.sites != 0 {
        return Err(Error::domain(format!(
            "k_count = {k_count} must be a positive multiple of the site number {}",
            config.sites
        )));
    }

    let kk = k_count as i64;
    let j_range: Vec<i64> = if k_count % 2 == 0 {
        (-kk / 2 + 1..=kk / 2).collect()
    } else {
        (-(kk - 1) / 2..=(kk - 1) / 2).collect()
    };
    let k_d0: Vec<f64> = j_range
        .iter()
        .map(|&j| 2.0 * std::f64::consts::PI * j as f64 / k_count as f64)
        .collect();

    let waves = 2 * cutoff + 1;
    let mut energies = Vec::with_capacity(k_count);
    let mut coefficients = Array2::<f64>::zeros((k_count, waves));

    for (row, &k) in k_d0.iter().enumerate() {
        let (e, c) = lowest_state(config.v0, k, cutoff)?;
        let (e_check, _) = lowest_state(config.v0, k, cutoff + 4)?;
        let tol = 1e-8 * e.abs().max(1.0);
        if (e - e_check).abs() > tol {
            return Err(Error::resolution(format!(
                "band energy at k d0 = {k:.4} changed by {:.3e} when the plane-wave \
                 cutoff was raised from {cutoff} to {}; increase the cutoff",
                (e - e_check).abs(),
                cutoff + 4
            )));
        }
        energies.push(e);
        coefficients.row_mut(row).assign(&c);
    }

    Ok(BandData { k_d0, energies, coefficients, cutoff, v0: config.v0 })
}

/// Lowest eigenpair of the plane-wave Hamiltonian at one quasimomentum,
/// gauge-fixed so the Bloch function is positive at the origin.
fn lowest_state(v0: f64, k_d0: f64, cutoff: usize) -> Result<(f64, Array1<f64>)> {
    let waves = 2 * cutoff + 1;
    let mut h = Array2::<f64>::zeros((waves, waves));
    for i in 0..waves {
        let n = i as f64 - cutoff as f64;
        let kn = (k_d0 + 2.0 * std::f64::consts::PI * n) / std::f64::consts::PI;
        h[[i, i]] = kn * kn + v0 / 2.0;
        if i + 1 < waves {
            h[[i, i + 1]] = -v0 / 4.0;
            h[[i + 1, i]] = -v0 / 4.0;
        }
    }
    let (vals, vecs) =
        h.eigh(UPLO::Lower).map_err(|e| Error::Linalg(format!("plane-wave eigensolve: {e}")))?;
    let mut c = vecs.column(0).to_owned();
    let at_origin: f64 = c.sum();
    if at_origin.abs() < 1e-8 {
        return Err(Error::Gauge(format!(
            "Bloch function vanishes at x = 0 for k d0 = {k_d0:.4}; cannot fix the phase"
        )));
    }
    if at_origin < 0.0 {
        c.mapv_inplace(|x| -x);
    }
    Ok((vals[0], c))
}

/// Lowest-band Wannier function of the central site on a uniform grid
/// covering the full quasimomentum ring (window length = k_count periods).
#[derive(Debug, Clone)]
pub struct WannierData {
    /// Grid positions in units of d0, uniform, symmetric about 0.
    pub x_d0: Vec<f64>,
    /// Wannier function w(x), real, in units of d0^(-1/2).
    pub w: Vec<f64>,
    /// Single-particle Hamiltonian applied to w (units `hbar omega_R` times
    /// d0^(-1/2)); used for the hopping integral.
    pub h_w: Vec<f64>,
    /// Quadrature points per lattice period.
    pub points_per_period: usize,
    /// Window length in periods (= number of quasimomenta).
    pub periods: usize,
    /// Copy of the quasimomentum grid (k d0) the function was built from.
    pub k_d0: Vec<f64>,
    /// Copy of the lowest-band energies, for the dispersion cross-check.
    pub band_energies: Vec<f64>,
}

/// Build the Wannier function `w(x) = (1/K) sum_k psi_k(x)` from gauge-fixed
/// Bloch functions, together with `h w` for the hopping integral.
///
/// The construction keeps the function real and even and normalized on the
/// ring; those properties are verified (1e-8 for the norm, 1e-6 for the
/// symmetry) and violations are reported as errors.
pub fn compute_wannier(band: &BandData, points_per_period: usize) -> Result<WannierData> {
    if points_per_period < 64 || points_per_period % 2 != 0 {
        return Err(Error::domain(format!(
            "points_per_period = {points_per_period} must be even and >= 64"
        )));
    }
    let kc = band.k_d0.len();
    let p = points_per_period;
    let waves = 2 * band.cutoff + 1;
    let n_pts = kc * p + 1;

    // Per-k tables: u_k on one period (times the intra-period Bloch phase)
    // and the period-to-period phase, so the double loop below is a plain
    // complex multiply-accumulate.
    let mut intra = Array2::<Complex64>::zeros((kc, p));
    for (a, &k) in band.k_d0.iter().enumerate() {
        for j in 0..p {
            let t = j as f64 / p as f64;
            let mut u = Complex64::new(0.0, 0.0);
            for i in 0..waves {
                let n = i as f64 - band.cutoff as f64;
                u += band.coefficients[[a, i]]
                    * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * n * t);
            }
            intra[[a, j]] = u * Complex64::from_polar(1.0, k * t);
        }
    }
    let half = kc as i64 / 2;
    let mut inter = Array2::<Complex64>::zeros((kc, kc + 1));
    for (a, &k) in band.k_d0.iter().enumerate() {
        for m in 0..=kc {
            inter[[a, m]] = Complex64::from_polar(1.0, k * (m as i64 - half) as f64);
        }
    }

    let mut w = vec![0.0_f64; n_pts];
    let mut h_w = vec![0.0_f64; n_pts];
    let mut worst_imag = 0.0_f64;
    for i in 0..n_pts {
        let (m, j) = (i / p, i % p);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut acc_h = Complex64::new(0.0, 0.0);
        for a in 0..kc {
            let phi = inter[[a, m]] * intra[[a, j]];
            acc += phi;
            acc_h += band.energies[a] * phi;
        }
        acc /= kc as f64;
        acc_h /= kc as f64;
        worst_imag = worst_imag.max(acc.im.abs());
        w[i] = acc.re;
        h_w[i] = acc_h.re;
    }
    let scale = w.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if worst_imag > 1e-10 * scale {
        return Err(Error::Gauge(format!(
            "Wannier function has spurious imaginary part {worst_imag:.3e}"
        )));
    }

    let x_d0: Vec<f64> =
        (0..n_pts).map(|i| i as f64 / p as f64 - kc as f64 / 2.0).collect();

    let data = WannierData {
        x_d0,
        w,
        h_w,
        points_per_period: p,
        periods: kc,
        k_d0: band.k_d0.clone(),
        band_energies: band.energies.clone(),
    };

    let norm = simpson(&data.square(), 1.0 / p as f64);
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::resolution(format!(
            "Wannier norm {norm:.12} deviates from 1 by more than 1e-8; \
             widen the window (k_count) or refine the quadrature grid"
        )));
    }
    let asym = (0..n_pts)
        .map(|i| (data.w[i] - data.w[n_pts - 1 - i]).abs())
        .fold(0.0_f64, f64::max);
    if asym > 1e-6 * scale {
        return Err(Error::Gauge(format!(
            "Wannier function asymmetry {asym:.3e} exceeds tolerance"
        )));
    }

    Ok(data)
}

impl WannierData {
    fn square(&self) -> Vec<f64> {
        self.w.iter().map(|&x| x * x).collect()
    }

    /// Value of the ring (periodic) array `values` at grid index `i` shifted
    /// left by one lattice period.
    fn ring_shifted(values: &[f64], i: usize, p: usize) -> f64 {
        let ring = values.len() - 1; // last grid point duplicates the first
        let src = (i as i64 - p as i64).rem_euclid(ring as i64) as usize;
        values[src]
    }

    /// Gaussian-equivalent width from the second moment, `xi = sqrt(2 <x^2>)`
    /// in units of d0; for a Gaussian `w ~ exp(-x^2 / 2 xi^2)` this recovers
    /// xi exactly.
    pub fn gaussian_width(&self) -> f64 {
        let h = 1.0 / self.points_per_period as f64;
        let m2: Vec<f64> =
            self.x_d0.iter().zip(&self.w).map(|(&x, &w)| x * x * w * w).collect();
        (2.0 * simpson(&m2, h)).sqrt()
    }
}

/// Bose-Hubbard parameters in recoil units.
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardParams {
    /// Nearest-neighbour hopping J (units of `hbar omega_R`), from the
    /// real-space Wannier integral.
    pub j: f64,
    /// Same quantity from the Fourier coefficient of the band dispersion;
    /// kept for diagnostics, agrees with `j` to better than 1%.
    pub j_dispersion: f64,
    /// On-site interaction U (units of `hbar omega_R`).
    pub u: f64,
    /// Reference chemical potential `mu = -2J + U N/M` (units of
    /// `hbar omega_R`); the grand-canonical value of the shallow-lattice gas.
    pub mu: f64,
    /// Filling factor N/M the reference mu was computed with.
    pub filling: f64,
}

impl HubbardParams {
    /// Interaction-to-hopping ratio U/J.
    pub fn u_over_j(&self) -> f64 {
        self.u / self.j
    }
}

/// Hubbard parameters from the Wannier function:
///
/// * `J = -Integral w(x) h w(x - d0) dx`, cross-checked against the
///   dispersion Fourier coefficient `-(1/K) sum_k E(k) cos(k d0)`;
/// * `U = 2 hbar omega_r a_s Integral w^4 dx`, the contact interaction
///   `4 pi hbar^2 a_s / m` reduced by the transverse Gaussian ground state
///   (`Integral |phi_0|^4 d^2rho = m omega_r / (2 pi hbar)`).
pub fn hubbard_parameters(wannier: &WannierData, config: &LatticeConfig) -> Result<HubbardParams> {
    let p = wannier.points_per_period;
    let h = 1.0 / p as f64;
    let n_pts = wannier.w.len();

    let j_fourier = -wannier
        .k_d0
        .iter()
        .zip(&wannier.band_energies)
        .map(|(&k, &e)| e * k.cos())
        .sum::<f64>()
        / wannier.k_d0.len() as f64;

    let integrand: Vec<f64> = (0..n_pts)
        .map(|i| wannier.w[i] * WannierData::ring_shifted(&wannier.h_w, i, p))
        .collect();
    let j_real = -simpson(&integrand, h);

    let scale = j_fourier.abs().max(1e-12);
    if (j_real - j_fourier).abs() > 0.01 * scale {
        return Err(Error::resolution(format!(
            "hopping from the real-space integral ({j_real:.6e}) and from the band \
             dispersion ({j_fourier:.6e}) disagree by more than 1%; the Wannier \
             window or quadrature grid is too coarse"
        )));
    }

    let w4: Vec<f64> = wannier.w.iter().map(|&x| x.powi(4)).collect();
    let u = 2.0 * config.omega_r * (config.a_s / config.d0) * simpson(&w4, h);

    let filling = config.filling();
    Ok(HubbardParams { j: j_real, j_dispersion: j_fourier, u, mu: -2.0 * j_real + u * filling, filling })
}

/// Probe coupling coefficients at momentum transfer q:
/// `j0(q) = f_perp Integral e^(i q_x x) w(x)^2 dx` (density channel) and
/// `j1(q) = f_perp Integral w(x) e^(i q_x x) w(x - d0) dx` (bond channel),
/// with the transverse factor `f_perp = exp(-(q_y^2 + q_z^2) xi_r^2 / 4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingCoefficients {
    /// Density (on-site) coupling.
    pub j0: Complex64,
    /// Bond (light-induced hopping) coupling.
    pub j1: Complex64,
    /// Momentum transfer in reduced units, `q * d0`.
    pub q_d0: [f64; 3],
}

/// Evaluate j0 and j1 at momentum transfer `q_d0` (components of q times d0).
pub fn coupling_coefficients(
    wannier: &WannierData,
    config: &LatticeConfig,
    q_d0: [f64; 3],
) -> Result<CouplingCoefficients> {
    if q_d0.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("momentum transfer must be finite".to_string()));
    }
    let p = wannier.points_per_period;
    let h = 1.0 / p as f64;
    let n_pts = wannier.w.len();
    let qx = q_d0[0];

    let xi_scaled = config.xi_r() / config.d0;
    let transverse = (-(q_d0[1] * q_d0[1] + q_d0[2] * q_d0[2]) * xi_scaled * xi_scaled / 4.0).exp();

    let mut density = Vec::with_capacity(n_pts);
    let mut bond = Vec::with_capacity(n_pts);
    for i in 0..n_pts {
        let phase = Complex64::from_polar(1.0, qx * wannier.x_d0[i]);
        density.push(phase * wannier.w[i] * wannier.w[i]);
        bond.push(phase * wannier.w[i] * WannierData::ring_shifted(&wannier.w, i, p));
    }
    let j0 = transverse * simpson_complex(&density, h);
    let j1 = transverse * simpson_complex(&bond, h);

    Ok(CouplingCoefficients { j0, j1, q_d0 })
}

/// Everything downstream modules need from the lattice solver.
#[derive(Debug, Clone)]
pub struct LatticeArtifacts {
    pub band: BandData,
    pub wannier: WannierData,
    pub hubbard: HubbardParams,
}

/// One-stop solver: band structure, Wannier function and Hubbard parameters.
pub fn solve_lattice(config: &LatticeConfig, opts: &SolverOptions) -> Result<LatticeArtifacts> {
    let k_count = opts.k_count.unwrap_or_else(|| auto_k_count(config));
    let band = solve_band_structure(config, opts.plane_wave_cutoff, k_count)?;
    let wannier = compute_wannier(&band, opts.points_per_period)?;
    let hubbard = hubbard_parameters(&wannier, config)?;
    Ok(LatticeArtifacts { band, wannier, hubbard })
}

/// Composite Simpson rule on a uniform grid with an odd number of points.
pub(crate) fn simpson(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "Simpson needs an odd point count");
    let mut acc = values[0] + values[values.len() - 1];
    for (i, &v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    acc * h / 3.0
}

pub(crate) fn simpson_complex(values: &[Complex64], h: f64) -> Complex64 {
    let re: Vec<f64> = values.iter().map(|z| z.re).collect();
    let im: Vec<f64> = values.iter().map(|z| z.im).collect();
    Complex64::new(simpson(&re, h), simpson(&im, h))
}
