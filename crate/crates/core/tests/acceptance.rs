//! End-to-end acceptance checks.  Each test prints one machine-readable
//! verdict line ("ACCEPTANCE <n> <name>: PASS|FAIL") before asserting, so a
//! full run yields a ten-line scorecard.
//!
//! Shared heavy artifacts (lattice solutions and eigendecompositions at the
//! reference depths) are computed once and reused across criteria.

use std::sync::OnceLock;

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use braggsim_core::bogoliubov::bogoliubov_modes;
use braggsim_core::hilbert::{
    build_hamiltonian, ground_state, probe_operator, EigenDecomposition, FockBasis,
};
use braggsim_core::lattice::{
    coupling_coefficients, solve_lattice, HubbardParams, LatticeArtifacts, LatticeConfig,
    SolverOptions,
};
use braggsim_core::mott::mott_ground_state;
use braggsim_core::spectra::{
    exact_spectrum, integrated_intensity, resolvable_peaks, Component, Lineshape, ProbeGeometry,
    Spectrum,
};

const PI: f64 = std::f64::consts::PI;
const T_DETECT: f64 = 3e-3;

fn report(number: u32, name: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {number} {name}: {}", if pass { "PASS" } else { "FAIL" });
    println!("  {detail}");
    assert!(pass, "criterion {number} ({name}): {detail}");
}

// ---------------------------------------------------------------------------
// Shared artifacts
// ---------------------------------------------------------------------------

struct Instance {
    config: LatticeConfig,
    lattice: LatticeArtifacts,
    basis: FockBasis,
    eig: EigenDecomposition,
}

impl Instance {
    fn solve(config: LatticeConfig) -> Instance {
        let lattice = solve_lattice(&config, &SolverOptions::default()).expect("lattice solve");
        let basis = FockBasis::new(config.sites, config.atoms).expect("basis");
        let eig = build_hamiltonian(&basis, lattice.hubbard.j, lattice.hubbard.u, 0.0)
            .eigendecompose()
            .expect("eigendecomposition");
        Instance { config, lattice, basis, eig }
    }

    fn spectrum(&self, theta: f64, include_j1: bool, lineshape: Lineshape) -> Spectrum {
        let mut geometry = ProbeGeometry::from_theta(theta, T_DETECT).expect("geometry");
        geometry.lineshape = lineshape;
        let coupling = coupling_coefficients(&self.lattice.wannier, &self.config, geometry.q_d0)
            .expect("couplings");
        let probe = probe_operator(&self.basis, &coupling, include_j1);
        exact_spectrum(&self.eig, &probe, &geometry, self.config.omega_recoil(), None)
            .expect("spectrum")
    }
}

/// M = N = 7 at the insulating reference depth V0 = 8.1.
fn deep() -> &'static Instance {
    static DEEP: OnceLock<Instance> = OnceLock::new();
    DEEP.get_or_init(|| Instance::solve(LatticeConfig::rubidium(8.1, 7, 7).unwrap()))
}

/// M = N = 7 at the superfluid reference depth V0 = 0.1.
fn shallow() -> &'static Instance {
    static SHALLOW: OnceLock<Instance> = OnceLock::new();
    SHALLOW.get_or_init(|| Instance::solve(LatticeConfig::rubidium(0.1, 7, 7).unwrap()))
}

/// V0 = 0.1 with the scattering length reduced tenfold, pushing U/J to ~0.1.
fn weak() -> &'static Instance {
    static WEAK: OnceLock<Instance> = OnceLock::new();
    WEAK.get_or_init(|| {
        let reference = LatticeConfig::rubidium(0.1, 7, 7).unwrap();
        let config = LatticeConfig::new(
            reference.v0,
            reference.d0,
            reference.mass,
            reference.a_s / 10.0,
            reference.omega_r,
            reference.sites,
            reference.atoms,
        )
        .unwrap();
        Instance::solve(config)
    })
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_hubbard_anchors() {
    let insulating = deep().lattice.hubbard.u_over_j();
    let superfluid = shallow().lattice.hubbard.u_over_j();
    let pass = (13.6..=20.4).contains(&insulating) && (0.7..=1.3).contains(&superfluid);
    report(
        1,
        "hubbard-anchors",
        pass,
        &format!("U/J = {insulating:.4} at V0 = 8.1, {superfluid:.4} at V0 = 0.1"),
    );
}

#[test]
fn criterion_2_mott_stokes_multiplicity() {
    let d = deep();
    // Non-negative lineshape so kernel ringing does not register as peaks.
    let spec = d.spectrum(2.0 * PI / 7.0, true, Lineshape::SincSquared);
    let peaks = resolvable_peaks(&spec.broadened_stokes, 0.15);
    let (u, j) = (d.lattice.hubbard.u, d.lattice.hubbard.j);
    let resolution = 2.0 * PI / spec.scaled_time;
    let centers: Vec<f64> = peaks.iter().map(|&i| spec.grid[i]).collect();
    let in_band = centers
        .iter()
        .all(|&c| c >= u - 6.0 * j - resolution && c <= u + 6.0 * j + resolution);
    let pass = (2..=6).contains(&peaks.len()) && in_band;
    report(
        2,
        "mott-stokes-multiplicity",
        pass,
        &format!(
            "{} peaks at {:?} (band [{:.4}, {:.4}])",
            peaks.len(),
            centers,
            u - 6.0 * j,
            u + 6.0 * j
        ),
    );
}

#[test]
fn criterion_3_single_peak_collapse() {
    let d = deep();
    let spec = d.spectrum(PI, true, Lineshape::SincSquared);
    let argmax = spec
        .broadened_stokes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let center = spec.grid[argmax];
    let resolution = 2.0 * PI / spec.scaled_time;
    let total = spec.stokes_weight();
    let near: f64 = spec
        .lines
        .iter()
        .filter(|l| l.component == Component::Stokes && (l.shift - center).abs() <= resolution)
        .map(|l| l.weight)
        .sum();
    let u = d.lattice.hubbard.u;
    let pass = near >= 0.8 * total && (center - u).abs() <= 0.15 * u;
    report(
        3,
        "single-peak-collapse",
        pass,
        &format!(
            "peak at {center:.4} (U = {u:.4}), {:.1}% of Stokes weight within +-2pi/T",
            100.0 * near / total
        ),
    );
}

#[test]
fn criterion_4_light_hopping_interference() {
    let s = shallow();
    let theta = 2.0 * PI / 7.0;
    let with = d_max(&s.spectrum(theta, true, Lineshape::SincSquared));
    let without = d_max(&s.spectrum(theta, false, Lineshape::SincSquared));
    let ratio = with / without;
    let pass = (1.3..=1.7).contains(&ratio);
    report(
        4,
        "light-hopping-interference",
        pass,
        &format!("tallest Stokes peak ratio {ratio:.4} (on {with:.4}, off {without:.4})"),
    );
}

fn d_max(spec: &Spectrum) -> f64 {
    spec.broadened_stokes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn criterion_5_sum_rule() {
    // The identity elastic + Stokes = <i|T'T|i> holds for any lattice
    // accuracy, so the band solves use a coarse k window to keep this fast.
    let opts = SolverOptions { plane_wave_cutoff: 16, k_count: Some(70), points_per_period: 128 };
    let basis = FockBasis::new(7, 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b4a66);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let v0 = rng.random_range(0.1..20.0);
        let theta = rng.random_range(0.0..2.0 * PI);
        let config = LatticeConfig::rubidium(v0, 7, 7).unwrap();
        let lattice = solve_lattice(&config, &opts).unwrap();
        let eig = build_hamiltonian(&basis, lattice.hubbard.j, lattice.hubbard.u, 0.0)
            .eigendecompose()
            .unwrap();
        let geometry = ProbeGeometry::from_theta(theta, T_DETECT).unwrap();
        let coupling =
            coupling_coefficients(&lattice.wannier, &config, geometry.q_d0).unwrap();
        let probe = probe_operator(&basis, &coupling, true);
        let spec =
            exact_spectrum(&eig, &probe, &geometry, config.omega_recoil(), None).unwrap();
        let gs = ground_state(&eig);
        let expectation: f64 =
            probe.apply(&gs.amplitudes).iter().map(|c| c.norm_sqr()).sum();
        let rel =
            ((spec.elastic_weight() + spec.stokes_weight()) - expectation).abs() / expectation;
        worst = worst.max(rel);
    }
    let pass = worst <= 1e-8;
    report(5, "sum-rule", pass, &format!("worst relative defect {worst:.3e} over 20 draws"));
}

#[test]
fn criterion_6_bogoliubov_identities() {
    let mut worst = 0.0_f64;
    for u_over_j in [0.1, 1.0] {
        let params = HubbardParams {
            j: 1.0,
            j_dispersion: 1.0,
            u: u_over_j,
            mu: 0.0,
            filling: 1.0,
        };
        let modes = bogoliubov_modes(&params, 7, 7).unwrap();
        for m in &modes {
            worst = worst.max((m.u * m.u - m.v * m.v - 1.0).abs());
            worst = worst.max((m.u * m.v - params.u / (2.0 * m.freq)).abs());
            let dispersion = m.epsilon * m.epsilon + 2.0 * params.u * m.epsilon;
            worst = worst.max((m.freq * m.freq - dispersion).abs() / dispersion);
        }
    }
    let pass = worst <= 1e-12;
    report(6, "bogoliubov-identities", pass, &format!("worst identity defect {worst:.3e}"));
}

#[test]
fn criterion_7_perturbative_fidelity() {
    let d = deep();
    let state = mott_ground_state(&d.lattice.hubbard, 7, 1).unwrap();
    let vector = state.fock_vector(&d.basis).unwrap();
    let overlap: f64 = vector.dot(&ground_state(&d.eig).amplitudes);
    let fidelity = overlap * overlap;
    let pass = fidelity >= 0.99;
    report(
        7,
        "perturbative-fidelity",
        pass,
        &format!("fidelity {fidelity:.6} at U/J = {:.3}", d.lattice.hubbard.u_over_j()),
    );
}

// Independent brute-force construction for criterion 8: occupation lists are
// enumerated by an ascending odometer and every matrix element is scored
// directly from the ladder-operator algebra, sharing no code with the
// library's basis or operator builders.
mod brute {
    use super::*;

    pub fn states(m: usize, n: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut occ = vec![0u32; m];
        loop {
            if occ.iter().sum::<u32>() == n {
                out.push(occ.clone());
            }
            let mut site = 0;
            loop {
                if site == m {
                    return out;
                }
                if occ[site] < n {
                    occ[site] += 1;
                    break;
                }
                occ[site] = 0;
                site += 1;
            }
        }
    }

    /// <bra| b_to' b_from |ket>
    fn hop(bra: &[u32], ket: &[u32], to: usize, from: usize) -> f64 {
        if ket[from] == 0 {
            return 0.0;
        }
        let mut moved = ket.to_vec();
        moved[from] -= 1;
        let amp = ((ket[from]) as f64).sqrt() * ((moved[to] + 1) as f64).sqrt();
        moved[to] += 1;
        if moved.as_slice() == bra {
            amp
        } else {
            0.0
        }
    }

    pub fn hamiltonian(states: &[Vec<u32>], m: usize, j: f64, u: f64, mu: f64) -> Array2<f64> {
        let dim = states.len();
        let mut h = Array2::<f64>::zeros((dim, dim));
        for (a, bra) in states.iter().enumerate() {
            for (b, ket) in states.iter().enumerate() {
                let mut value = 0.0;
                if a == b {
                    for &n in ket.iter() {
                        value += 0.5 * u * (n as f64) * (n as f64 - 1.0) - mu * n as f64;
                    }
                }
                for l in 0..m {
                    value -= j * hop(bra, ket, l, (l + m - 1) % m);
                    value -= j * hop(bra, ket, l, (l + 1) % m);
                }
                h[[a, b]] = value;
            }
        }
        h
    }

    pub fn probe(
        states: &[Vec<u32>],
        m: usize,
        j0: Complex64,
        j1: Complex64,
        q: f64,
    ) -> Array2<Complex64> {
        let dim = states.len();
        let mut t = Array2::<Complex64>::zeros((dim, dim));
        for (a, bra) in states.iter().enumerate() {
            for (b, ket) in states.iter().enumerate() {
                let mut value = Complex64::new(0.0, 0.0);
                for l in 0..m {
                    let phase = Complex64::from_polar(1.0, q * l as f64);
                    if a == b {
                        value += phase * j0 * ket[l] as f64;
                    }
                    let bond = hop(bra, ket, l, (l + 1) % m) + hop(bra, ket, (l + 1) % m, l);
                    value += phase * j1 * bond;
                }
                t[[a, b]] = value;
            }
        }
        t
    }
}

#[test]
fn criterion_8_small_instance_oracles() {
    let (j, u, mu) = (0.8, 1.9, 0.3);
    let j0 = Complex64::new(0.93, -0.21);
    let j1 = Complex64::new(0.11, 0.05);
    let q = 1.234;
    let mut worst = 0.0_f64;
    for m in 2..=4usize {
        for n in 1..=4u32 {
            let basis = FockBasis::new(m, n as usize).unwrap();
            let h = build_hamiltonian(&basis, j, u, mu);
            let coupling = braggsim_core::lattice::CouplingCoefficients {
                j0,
                j1,
                q_d0: [q, 0.0, 0.0],
            };
            let t = probe_operator(&basis, &coupling, true);
            let states = brute::states(m, n);
            let h_ref = brute::hamiltonian(&states, m, j, u, mu);
            let t_ref = brute::probe(&states, m, j0, j1, q);
            for (a, bra) in states.iter().enumerate() {
                let ia = basis.index_of(bra).expect("state present");
                for (b, ket) in states.iter().enumerate() {
                    let ib = basis.index_of(ket).expect("state present");
                    worst = worst.max((h.matrix[[ia, ib]] - h_ref[[a, b]]).abs());
                    worst = worst.max((t.matrix[[ia, ib]] - t_ref[[a, b]]).norm());
                }
            }
        }
    }
    // Closed-form spectrum of the two-site, two-atom system (mu = 0):
    // the antisymmetric state at U and the symmetric pair at
    // (U +- sqrt(U^2 + 64 J^2)) / 2, the double bond of the two-site ring
    // included.
    let basis = FockBasis::new(2, 2).unwrap();
    let eig = build_hamiltonian(&basis, j, u, 0.0).eigendecompose().unwrap();
    let root = (u * u + 64.0 * j * j).sqrt();
    let mut expected = [u, 0.5 * (u + root), 0.5 * (u - root)];
    expected.sort_by(f64::total_cmp);
    let mut closed_form_worst = 0.0_f64;
    for (computed, reference) in eig.energies.iter().zip(expected.iter()) {
        closed_form_worst = closed_form_worst.max((computed - reference).abs());
    }
    let pass = worst <= 1e-12 && closed_form_worst <= 1e-10;
    report(
        8,
        "small-instance-oracles",
        pass,
        &format!(
            "worst entry defect {worst:.3e}, closed-form eigenvalue defect {closed_form_worst:.3e}"
        ),
    );
}

#[test]
fn criterion_9_superfluid_dispersion() {
    let w = weak();
    let modes = bogoliubov_modes(&w.lattice.hubbard, 7, 7).unwrap();
    let mut detail = format!("U/J = {:.4};", w.lattice.hubbard.u_over_j());
    let mut pass = true;
    for mode_index in 1..=3i64 {
        let theta = 2.0 * PI * mode_index as f64 / 7.0;
        let spec = w.spectrum(theta, true, Lineshape::Diffraction);
        let dominant = spec
            .lines
            .iter()
            .filter(|l| l.component == Component::Stokes)
            .max_by(|a, b| a.weight.total_cmp(&b.weight))
            .unwrap();
        let predicted = modes.iter().find(|m| m.n == mode_index).unwrap().freq;
        let rel = (dominant.shift - predicted).abs() / predicted;
        detail.push_str(&format!(
            " theta = {mode_index}*2pi/7: line {:.5} vs Omega_p {predicted:.5} ({:.1}%);",
            dominant.shift,
            100.0 * rel
        ));
        pass &= rel <= 0.10;
    }
    report(9, "superfluid-dispersion", pass, &detail);
}

#[test]
fn criterion_10_grating_intensity() {
    let d = deep();
    let angles = Array1::linspace(0.0, 2.0 * PI, 101);
    let mut intensities = Vec::with_capacity(angles.len());
    for &theta in angles.iter() {
        let spec = d.spectrum(theta, true, Lineshape::Diffraction);
        intensities.push(integrated_intensity(&spec).unwrap().line_sum);
    }
    let argmax = intensities
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let max = intensities[argmax];
    let min = intensities.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = (argmax == 0 || argmax == angles.len() - 1) && min / max < 0.1;
    report(
        10,
        "grating-intensity",
        pass,
        &format!(
            "argmax at theta = {:.3} pi, min/max = {:.4}",
            angles[argmax] / PI,
            min / max
        ),
    );
}
