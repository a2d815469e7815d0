//! Strong-coupling (Mott-insulator) backend: first-order perturbation theory
//! in J/U around the commensurate Fock state |g, g, ..., g>.
//!
//! The excitations entering the Stokes spectrum are bound particle-hole
//! pairs.  At integer filling g the degenerate hopping problem for the pair
//! amplitudes c_{n,m} (extra particle at n, hole at m, c_{n,n} = 0),
//!
//! `(g+1)(c_{n+1,m} + c_{n-1,m}) + g(c_{n,m+1} + c_{n,m-1}) = A c_{n,m}`,
//!
//! is solved by trigonometric modes labelled (r, s) with r = 1..M-1,
//! s = 0..M-1 and `A_{r,s} = 2 (2g+1) cos(pi r / M) cos(pi s / M)`; the
//! excitation energy is `U - J A_{r,s}`.  The modes are exact in the large-g
//! limit and accurate to O(1/g) at finite filling, which the tests check
//! against direct diagonalization of the pair hopping problem.

use ndarray::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::FockBasis;
use crate::lattice::{CouplingCoefficients, HubbardParams};
use crate::spectra::bloch_momentum_factor;

/// One particle-hole excitation mode of the Mott insulator.
#[derive(Debug, Clone)]
pub struct ParticleHoleMode {
    /// Relative-motion quantum number, 1..M-1.
    pub r: usize,
    /// Centre-of-mass quantum number, 0..M-1.
    pub s: usize,
    /// Dimensionless hopping shift `A_{r,s}`; the excitation energy is
    /// `U - J * A_{r,s}` above the ground state.
    pub energy_shift: f64,
    /// Pair amplitudes c[n, m] (particle at n, hole at m), unit norm over
    /// the off-diagonal entries.
    pub coefficients: Array2<Complex64>,
}

/// All M(M-1) particle-hole modes for a chain of `sites` at integer filling
/// `g`, ordered by (r, s).
pub fn particle_hole_modes(sites: usize, filling: usize) -> Result<Vec<ParticleHoleMode>> {
    let m = sites;
    if m < 2 {
        return Err(Error::domain("particle-hole modes need at least 2 sites"));
    }
    if filling < 1 {
        return Err(Error::domain("integer filling must be at least 1"));
    }
    let g = filling as f64;
    let alpha = std::f64::consts::PI / m as f64;
    let norm = std::f64::consts::SQRT_2 / m as f64;
    let mut modes = Vec::with_capacity(m * (m - 1));
    for r in 1..m {
        for s in 0..m {
            let mut coefficients = Array2::<Complex64>::zeros((m, m));
            for n in 0..m {
                for mm in 0..m {
                    if n == mm {
                        continue;
                    }
                    let rel = if (r + s) % 2 == 1 {
                        (alpha * r as f64 * (n as f64 - mm as f64).abs()).sin()
                    } else {
                        (alpha * r as f64 * (n as f64 - mm as f64)).sin()
                    };
                    let com = Complex64::from_polar(1.0, alpha * s as f64 * (n + mm) as f64);
                    coefficients[[n, mm]] = norm * rel * com;
                }
            }
            let energy_shift =
                2.0 * (2.0 * g + 1.0) * (alpha * r as f64).cos() * (alpha * s as f64).cos();
            modes.push(ParticleHoleMode { r, s, energy_shift, coefficients });
        }
    }
    Ok(modes)
}

/// First-order perturbative ground state: the Fock state |g, ..., g> plus
/// the symmetric combination |S> of all nearest-neighbour particle-hole
/// states.
#[derive(Debug, Clone)]
pub struct MottPerturbativeState {
    /// Amplitude of the unperturbed Fock state, `1 - (J/U)^2 M g (g+1)`.
    pub amplitude_fock: f64,
    /// Amplitude of |S>, `(J/U) sqrt(2 M g (g+1))`.
    pub amplitude_pair: f64,
    pub sites: usize,
    pub filling: usize,
    /// Set when J/U is too large for first-order theory to be trustworthy.
    pub warning: Option<String>,
}

/// Build the perturbative ground state for the given Hubbard parameters.
pub fn mott_ground_state(
    params: &HubbardParams,
    sites: usize,
    filling: usize,
) -> Result<MottPerturbativeState> {
    if params.u <= 0.0 {
        return Err(Error::domain(format!(
            "Mott perturbation theory needs U > 0, got U = {}",
            params.u
        )));
    }
    if filling < 1 {
        return Err(Error::domain("integer filling must be at least 1"));
    }
    let (m, g) = (sites as f64, filling as f64);
    let x = params.j / params.u;
    let amplitude_pair = x * (2.0 * m * g * (g + 1.0)).sqrt();
    let amplitude_fock = 1.0 - x * x * m * g * (g + 1.0);
    let warning = (amplitude_pair > 0.5).then(|| {
        format!(
            "first-order Mott expansion is marginal: pair amplitude {amplitude_pair:.3} \
             at J/U = {x:.3}"
        )
    });
    Ok(MottPerturbativeState { amplitude_fock, amplitude_pair, sites, filling, warning })
}

impl MottPerturbativeState {
    /// Expand the state over a Fock basis (normalized), for overlaps with
    /// exact eigenvectors.
    pub fn fock_vector(&self, basis: &FockBasis) -> Result<Array1<f64>> {
        let m = self.sites;
        let g = self.filling as u32;
        if basis.sites != m || basis.atoms != m * self.filling {
            return Err(Error::Shape(format!(
                "basis is {} sites x {} atoms, state needs {} x {}",
                basis.sites,
                basis.atoms,
                m,
                m * self.filling
            )));
        }
        let mut v = Array1::<f64>::zeros(basis.len());
        let uniform = vec![g; m];
        v[basis.index_of(&uniform).expect("uniform state in basis")] = self.amplitude_fock;
        let pair_amp = self.amplitude_pair / (2.0 * m as f64).sqrt();
        for n in 0..m {
            for mm in [(n + 1) % m, (n + m - 1) % m] {
                let mut occ = uniform.clone();
                occ[n] += 1;
                occ[mm] -= 1;
                let idx = basis.index_of(&occ).expect("pair state in basis");
                v[idx] += pair_amp;
            }
        }
        let norm = v.dot(&v).sqrt();
        Ok(v.mapv(|x| x / norm))
    }
}

/// Elastic line weight of the Mott insulator, in units of the angular
/// prefactor A(Omega):
/// `N^2 delta_M(q_x) (|j0|^2 + 4 sqrt(g(g+1)) (J/U) Re(j0* j1))`.
pub fn mott_elastic(
    params: &HubbardParams,
    coupling: &CouplingCoefficients,
    sites: usize,
    filling: usize,
) -> f64 {
    let g = filling as f64;
    let n = (sites * filling) as f64;
    let grating = bloch_momentum_factor(coupling.q_d0[0], sites);
    let cross = (coupling.j0.conj() * coupling.j1).re;
    n * n
        * grating
        * (coupling.j0.norm_sqr()
            + 4.0 * (g * (g + 1.0)).sqrt() * (params.j / params.u) * cross)
}

/// One Stokes line of the Mott insulator.
#[derive(Debug, Clone)]
pub struct MottStokesLine {
    pub r: usize,
    pub s: usize,
    /// Frequency shift in the unit of J and U (recoil units upstream).
    pub shift: f64,
    /// Weight in units of A(Omega).
    pub weight: f64,
}

/// Stokes lines of the Mott insulator: one per particle-hole mode (r, s), at
/// shift `U - 2 J (2g+1) cos(pi r/M) cos(pi s/M)`.  The centre-of-mass label
/// fixes the momentum the mode absorbs, so its weight carries the grating
/// factor at `q_x - 2 pi s / (M d0)`; the bond channel (r+s odd) couples
/// through j1, the density channel (r+s even) through j0 at order J/U.
pub fn mott_stokes(
    params: &HubbardParams,
    coupling: &CouplingCoefficients,
    sites: usize,
    filling: usize,
) -> Result<Vec<MottStokesLine>> {
    if params.u <= 0.0 {
        return Err(Error::domain("Mott Stokes lines need U > 0"));
    }
    let m = sites;
    let g = filling as f64;
    let alpha = std::f64::consts::PI / m as f64;
    let strength = (8.0 * g * (g + 1.0)).sqrt();
    let mut lines = Vec::with_capacity(m * (m - 1));
    for r in 1..m {
        for s in 0..m {
            let shift = params.u
                - 2.0 * params.j * (2.0 * g + 1.0) * (alpha * r as f64).cos()
                    * (alpha * s as f64).cos();
            let b = if (r + s) % 2 == 1 {
                coupling.j1 * strength
            } else {
                coupling.j0
                    * (strength * 2.0 * (params.j / params.u) * (alpha * s as f64).sin())
            };
            let grating = bloch_momentum_factor(
                coupling.q_d0[0] - 2.0 * std::f64::consts::PI * s as f64 / m as f64,
                m,
            );
            let weight = (alpha * r as f64).sin().powi(2) * b.norm_sqr() * grating;
            lines.push(MottStokesLine { r, s, shift, weight });
        }
    }
    Ok(lines)
}
