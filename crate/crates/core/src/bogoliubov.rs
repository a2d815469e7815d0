//! Superfluid backend: Bogoliubov theory for the weakly interacting lattice
//! gas.
//!
//! Quasiparticles carry lattice quasi-momentum p = 2 pi n / (M d0) with the
//! tight-binding single-particle energy `eps(p) = 4 J sin^2(p d0 / 2)` and
//! dispersion `hbar Omega_p = sqrt(eps (eps + 2 U g))` at condensate density
//! g = N/M per site.  The scattering weights follow from the (u, v) mode
//! amplitudes; validity requires a small condensate depletion, which the
//! construction reports as a warning when exceeded.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{CouplingCoefficients, HubbardParams};
use crate::spectra::bloch_momentum_factor;

/// One Bogoliubov quasiparticle mode.
#[derive(Debug, Clone)]
pub struct BogoliubovMode {
    /// Integer mode index n with p = 2 pi n / (M d0), n != 0.
    pub n: i64,
    /// Quasi-momentum in units of 1/d0.
    pub p_d0: f64,
    /// Tight-binding single-particle energy 4 J sin^2(p d0 / 2).
    pub epsilon: f64,
    /// Quasiparticle frequency sqrt(eps (eps + 2 U g)), in recoil units.
    pub freq: f64,
    /// Particle amplitude, u^2 - v^2 = 1.
    pub u: f64,
    /// Hole amplitude.
    pub v: f64,
}

/// The M-1 quasiparticle modes on a ring of `sites` with `atoms` bosons.
/// Requires J > 0: at zero hopping every mode collapses to zero frequency
/// and the expansion is meaningless.
pub fn bogoliubov_modes(
    params: &HubbardParams,
    sites: usize,
    atoms: usize,
) -> Result<Vec<BogoliubovMode>> {
    if params.j <= 0.0 {
        return Err(Error::domain(format!(
            "Bogoliubov theory needs J > 0, got J = {}",
            params.j
        )));
    }
    if sites < 2 {
        return Err(Error::domain("Bogoliubov modes need at least 2 sites"));
    }
    let m = sites as f64;
    let g = atoms as f64 / m;
    let half = (sites / 2) as i64;
    let mut modes = Vec::with_capacity(sites - 1);
    for n in -half..=half {
        if n == 0 || (sites % 2 == 0 && n == -half) {
            continue;
        }
        let p_d0 = 2.0 * std::f64::consts::PI * n as f64 / m;
        let epsilon = 4.0 * params.j * (0.5 * p_d0).sin().powi(2);
        let freq = (epsilon * (epsilon + 2.0 * params.u * g)).sqrt();
        let (u, v) = if params.u == 0.0 {
            (1.0, 0.0)
        } else {
            let u2 = (epsilon + params.u * g + freq) / (2.0 * freq);
            let v2 = (epsilon + params.u * g - freq) / (2.0 * freq);
            (u2.sqrt(), v2.sqrt())
        };
        modes.push(BogoliubovMode { n, p_d0, epsilon, freq, u, v });
    }
    modes.sort_by_key(|mode| mode.n);
    Ok(modes)
}

/// Fraction of atoms outside the condensate, sum_p v_p^2 / N.
pub fn condensate_depletion(modes: &[BogoliubovMode], atoms: usize) -> f64 {
    modes.iter().map(|m| m.v * m.v).sum::<f64>() / atoms as f64
}

/// Elastic line weight of the superfluid, in units of A(Omega).  The
/// leading term is the full diffraction pattern N^2 delta_M(q_x) |j0 + 2 j1|^2;
/// the depletion correction mixes in the mode-resolved coupling at each p.
pub fn sf_elastic(
    modes: &[BogoliubovMode],
    coupling: &CouplingCoefficients,
    sites: usize,
    atoms: usize,
) -> f64 {
    let n = atoms as f64;
    let grating = bloch_momentum_factor(coupling.q_d0[0], sites);
    let j01 = coupling.j0 + coupling.j1 * 2.0;
    let mut correction = 0.0;
    for mode in modes {
        let at_p = coupling.j0 + coupling.j1 * (2.0 * mode.p_d0.cos());
        correction += mode.v * mode.v * (j01.conj() * at_p).re;
    }
    n * n * grating * (j01.norm_sqr() + 2.0 / n * correction)
}

/// One Stokes line of the superfluid.
#[derive(Debug, Clone)]
pub struct SfStokesLine {
    /// Mode index n of the quasiparticle created.
    pub n: i64,
    /// Frequency shift (the quasiparticle frequency), in recoil units.
    pub shift: f64,
    /// Weight in units of A(Omega).
    pub weight: f64,
}

/// Stokes lines of the superfluid: creating one quasiparticle at p absorbs
/// chain momentum p, so each mode carries the grating factor at q_x - p with
/// weight `N (eps_p / hbar Omega_p) |j0 + j1 (1 + e^{-i p d0})|^2`.
pub fn sf_stokes(
    modes: &[BogoliubovMode],
    coupling: &CouplingCoefficients,
    sites: usize,
    atoms: usize,
) -> Vec<SfStokesLine> {
    let n_atoms = atoms as f64;
    modes
        .iter()
        .map(|mode| {
            let grating = bloch_momentum_factor(coupling.q_d0[0] - mode.p_d0, sites);
            let phase = Complex64::from_polar(1.0, -mode.p_d0);
            let vertex = coupling.j0 + coupling.j1 * (Complex64::new(1.0, 0.0) + phase);
            let weight = n_atoms * (mode.epsilon / mode.freq) * vertex.norm_sqr() * grating;
            SfStokesLine { n: mode.n, shift: mode.freq, weight }
        })
        .collect()
}
