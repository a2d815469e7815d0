//! Physical constants (SI) and the recoil units used throughout the crate.
//!
//! Internally every energy is expressed in units of the lattice recoil
//! `hbar * omega_R` with `omega_R = hbar pi^2 / (2 m d0^2)` (the photon recoil
//! of the lattice laser for a spacing of half the laser wavelength), and every
//! length in units of the lattice period `d0`.  The helpers here convert
//! between SI inputs and those reduced units.

/// Reduced Planck constant (J s), CODATA 2018 exact value.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Bohr radius (m), CODATA 2018.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Mass of a rubidium-87 atom (kg).
pub const RB87_MASS: f64 = 86.909_180_531 * ATOMIC_MASS_UNIT;

/// Lattice recoil angular frequency `omega_R = hbar pi^2 / (2 m d0^2)`
/// (rad/s) for an atom of mass `mass` (kg) in a lattice of period `d0` (m).
pub fn recoil_frequency(mass: f64, d0: f64) -> f64 {
    HBAR * std::f64::consts::PI.powi(2) / (2.0 * mass * d0 * d0)
}

/// Transverse harmonic-oscillator length `xi_r = sqrt(hbar / (m omega_r))`
/// (m) for trap frequency `omega_r` (rad/s).
pub fn oscillator_length(mass: f64, omega_r: f64) -> f64 {
    (HBAR / (mass * omega_r)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recoil_matches_rb87_lattice() {
        // 87Rb in a 413 nm lattice: omega_R/2pi should be a few kHz.
        let omega_r = recoil_frequency(RB87_MASS, 413e-9);
        let f = omega_r / (2.0 * std::f64::consts::PI);
        assert!((3.0e3..4.0e3).contains(&f), "omega_R/2pi = {f} Hz");
    }

    #[test]
    fn transverse_length_is_ten_scattering_lengths() {
        // At omega_r = 10 omega_R the radial wavepacket is ~10 a_s for
        // a_s = 105 a0 (the parameter set used throughout the examples).
        let omega_rec = recoil_frequency(RB87_MASS, 413e-9);
        let xi_r = oscillator_length(RB87_MASS, 10.0 * omega_rec);
        let a_s = 105.0 * BOHR_RADIUS;
        let ratio = xi_r / a_s;
        assert!((9.0..11.5).contains(&ratio), "xi_r/a_s = {ratio}");
    }
}
