//! Exact diagonalization backend: Fock basis of the Bose-Hubbard chain, the
//! Hamiltonian
//!
//! `H = -J sum_l b_l^dag (b_{l-1} + b_{l+1}) + (U/2) sum_l n_l (n_l - 1) - mu sum_l n_l`
//!
//! with periodic boundary conditions, and the probe operator
//!
//! `T(q) = sum_l e^(i q_x l d0) [ j0 n_l + j1 (b_l^dag b_{l+1} + b_{l+1}^dag b_l) ]`
//!
//! whose matrix elements between eigenstates give the scattering spectrum.
//! Site indices are taken modulo M throughout, so the `l = M-1` bond carries
//! the wrap-around phase `e^(i q_x (M-1) d0)` exactly as written in the sum.
//! For M = 2 the two neighbour terms of each site coincide and the single
//! bond is counted twice; the matrices follow the operator definition
//! literally rather than special-casing that geometry.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::CouplingCoefficients;

/// Default cap on the many-body dimension (`build_basis` refuses above it).
pub const DEFAULT_BASIS_CAP: usize = 2_000_000;

/// A single occupation-number state |n_0, ..., n_{M-1}>.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FockState {
    pub occupations: Vec<u32>,
}

impl FockState {
    pub fn total(&self) -> u32 {
        self.occupations.iter().sum()
    }
}

/// The N-atom, M-site bosonic Fock basis, ordered lexicographically
/// descending on occupation vectors: (N, 0, ..., 0) first, (0, ..., 0, N)
/// last.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub sites: usize,
    pub atoms: usize,
    states: Vec<FockState>,
}

/// Number of compositions of N atoms over M sites, `binom(N + M - 1, N)`,
/// or `None` on overflow.
pub fn dimension(sites: usize, atoms: usize) -> Option<u128> {
    let (m, n) = (sites as u128, atoms as u128);
    let mut acc: u128 = 1;
    // binom(n + m - 1, m - 1) multiplicatively, smallest factors first
    for i in 1..m {
        acc = acc.checked_mul(n + i)?;
        acc /= i;
    }
    Some(acc)
}

impl FockBasis {
    /// Enumerate the basis (default capacity cap).
    pub fn new(sites: usize, atoms: usize) -> Result<Self> {
        Self::with_cap(sites, atoms, DEFAULT_BASIS_CAP)
    }

    /// Enumerate the basis, refusing dimensions above `cap`.
    pub fn with_cap(sites: usize, atoms: usize, cap: usize) -> Result<Self> {
        if sites < 1 {
            return Err(Error::domain("need at least one site"));
        }
        let dim = dimension(sites, atoms)
            .ok_or_else(|| Error::Capacity("basis dimension overflows u128".into()))?;
        if dim > cap as u128 {
            return Err(Error::Capacity(format!(
                "basis dimension {dim} exceeds the cap {cap} for M = {sites}, N = {atoms}"
            )));
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut current = vec![0u32; sites];
        fill(&mut states, &mut current, 0, atoms as u32);
        debug_assert_eq!(states.len() as u128, dim);
        Ok(FockBasis { sites, atoms, states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, index: usize) -> &FockState {
        &self.states[index]
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    /// Index of an occupation vector, by binary search in the descending
    /// lexicographic order.
    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.states
            .binary_search_by(|s| {
                s.occupations
                    .as_slice()
                    .cmp(occupations)
                    .reverse()
            })
            .ok()
    }
}

fn fill(states: &mut Vec<FockState>, current: &mut Vec<u32>, site: usize, remaining: u32) {
    if site == current.len() - 1 {
        current[site] = remaining;
        states.push(FockState { occupations: current.clone() });
        return;
    }
    for n in (0..=remaining).rev() {
        current[site] = n;
        fill(states, current, site + 1, remaining - n);
    }
}

/// Dense real-symmetric Bose-Hubbard Hamiltonian over a Fock basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub basis: FockBasis,
    pub matrix: Array2<f64>,
    pub j: f64,
    pub u: f64,
    pub mu: f64,
}

/// Build the Hamiltonian matrix for hopping `j`, interaction `u` and
/// chemical potential `mu` (all in the caller's energy unit).
pub fn build_hamiltonian(basis: &FockBasis, j: f64, u: f64, mu: f64) -> HamiltonianMatrix {
    let dim = basis.len();
    let m = basis.sites;
    let mut h = Array2::<f64>::zeros((dim, dim));
    let mut target = vec![0u32; m];
    for (col, state) in basis.states().iter().enumerate() {
        let occ = &state.occupations;
        let mut diag = 0.0;
        for &n in occ {
            let n = n as f64;
            diag += 0.5 * u * n * (n - 1.0) - mu * n;
        }
        h[[col, col]] += diag;
        // -J sum_l b_l^dag (b_{l-1} + b_{l+1}): move one boson onto site l
        // from either neighbour (both neighbour terms applied, so the M = 2
        // bond appears twice as the operator dictates).
        for l in 0..m {
            for source in [(l + m - 1) % m, (l + 1) % m] {
                if source == l || occ[source] == 0 {
                    continue;
                }
                target.copy_from_slice(occ);
                target[source] -= 1;
                target[l] += 1;
                let row = basis
                    .index_of(&target)
                    .expect("hopping conserves atom number");
                let amp = ((occ[l] as f64 + 1.0) * occ[source] as f64).sqrt();
                h[[row, col]] += -j * amp;
            }
        }
    }
    HamiltonianMatrix { basis: basis.clone(), matrix: h, j, u, mu }
}

/// Full spectrum of a Hamiltonian: energies ascending, eigenvectors in
/// columns, every column's first non-negligible amplitude made positive so
/// repeated runs give identical matrices.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub energies: Array1<f64>,
    pub states: Array2<f64>,
}

impl HamiltonianMatrix {
    pub fn eigendecompose(&self) -> Result<EigenDecomposition> {
        let (energies, mut states) = self
            .matrix
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Linalg(format!("dense symmetric eigensolve: {e}")))?;
        for mut col in states.columns_mut() {
            let lead = col.iter().find(|a| a.abs() > 1e-12).copied().unwrap_or(1.0);
            if lead < 0.0 {
                col.mapv_inplace(|x| -x);
            }
        }
        Ok(EigenDecomposition { energies, states })
    }
}

/// Ground state extracted from an eigendecomposition.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub amplitudes: Array1<f64>,
    /// Set when the first excited state lies within 1e-10 (relative to the
    /// spectral scale) of the ground energy; holds the two state indices.
    pub degenerate_with: Option<(usize, usize)>,
}

/// Ground state with a deterministic global phase; flags a quasi-degenerate
/// ground level instead of silently picking one member.
pub fn ground_state(eig: &EigenDecomposition) -> GroundState {
    let energy = eig.energies[0];
    let scale = eig
        .energies
        .iter()
        .fold(0.0_f64, |m, &e| m.max(e.abs()))
        .max(1.0);
    let degenerate_with = (eig.energies.len() > 1
        && (eig.energies[1] - energy).abs() < 1e-10 * scale)
        .then_some((0, 1));
    GroundState { energy, amplitudes: eig.states.column(0).to_owned(), degenerate_with }
}

/// Dense complex matrix of the probe operator T(q) over a Fock basis.
#[derive(Debug, Clone)]
pub struct ProbeOperatorMatrix {
    pub matrix: Array2<Complex64>,
    /// x-component of the momentum transfer, times d0.
    pub q_x_d0: f64,
    /// Whether the bond (j1) channel was included.
    pub include_j1: bool,
}

/// Build T(q) from the coupling coefficients; `include_j1 = false` drops the
/// light-induced hopping channel (density-only probe).
pub fn probe_operator(
    basis: &FockBasis,
    coupling: &CouplingCoefficients,
    include_j1: bool,
) -> ProbeOperatorMatrix {
    let dim = basis.len();
    let m = basis.sites;
    let q_x_d0 = coupling.q_d0[0];
    let j0 = coupling.j0;
    let j1 = if include_j1 { coupling.j1 } else { Complex64::new(0.0, 0.0) };
    let phases: Vec<Complex64> =
        (0..m).map(|l| Complex64::from_polar(1.0, q_x_d0 * l as f64)).collect();

    let mut t = Array2::<Complex64>::zeros((dim, dim));
    let mut target = vec![0u32; m];
    for (col, state) in basis.states().iter().enumerate() {
        let occ = &state.occupations;
        let mut diag = Complex64::new(0.0, 0.0);
        for (l, &n) in occ.iter().enumerate() {
            diag += phases[l] * n as f64;
        }
        t[[col, col]] += j0 * diag;
        if j1.norm_sqr() == 0.0 {
            continue;
        }
        for l in 0..m {
            let r = (l + 1) % m;
            if r == l {
                continue;
            }
            // b_l^dag b_{l+1}
            if occ[r] > 0 {
                target.copy_from_slice(occ);
                target[r] -= 1;
                target[l] += 1;
                let row = basis.index_of(&target).expect("bond hop conserves atom number");
                let amp = ((occ[l] as f64 + 1.0) * occ[r] as f64).sqrt();
                t[[row, col]] += phases[l] * j1 * amp;
            }
            // b_{l+1}^dag b_l
            if occ[l] > 0 {
                target.copy_from_slice(occ);
                target[l] -= 1;
                target[r] += 1;
                let row = basis.index_of(&target).expect("bond hop conserves atom number");
                let amp = ((occ[r] as f64 + 1.0) * occ[l] as f64).sqrt();
                t[[row, col]] += phases[l] * j1 * amp;
            }
        }
    }
    ProbeOperatorMatrix { matrix: t, q_x_d0, include_j1 }
}

impl ProbeOperatorMatrix {
    /// Apply T to a real state vector.
    pub fn apply(&self, state: &Array1<f64>) -> Array1<Complex64> {
        let complex = state.mapv(|x| Complex64::new(x, 0.0));
        self.matrix.dot(&complex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn basis_sizes_match_compositions() {
        // Independent count: recursive stars-and-bars enumeration.
        fn count(sites: usize, atoms: usize) -> usize {
            if sites == 1 {
                return 1;
            }
            (0..=atoms).map(|n| count(sites - 1, atoms - n)).sum()
        }
        for (m, n) in [(2, 1), (3, 3), (4, 2), (7, 7)] {
            let basis = FockBasis::new(m, n).unwrap();
            assert_eq!(basis.len(), count(m, n), "M = {m}, N = {n}");
        }
        assert_eq!(FockBasis::new(7, 7).unwrap().len(), 1716);
        assert_eq!(FockBasis::new(3, 3).unwrap().len(), 10);
    }

    #[test]
    fn basis_is_descending_lexicographic_and_indexable() {
        let basis = FockBasis::new(3, 3).unwrap();
        assert_eq!(basis.state(0).occupations, vec![3, 0, 0]);
        assert_eq!(basis.state(basis.len() - 1).occupations, vec![0, 0, 3]);
        for w in basis.states().windows(2) {
            assert!(w[0].occupations > w[1].occupations, "order violated");
        }
        for (i, s) in basis.states().iter().enumerate() {
            assert_eq!(basis.index_of(&s.occupations), Some(i));
        }
        assert_eq!(basis.index_of(&[1, 1, 0]), None); // wrong atom number
    }

    #[test]
    fn cap_is_enforced() {
        match FockBasis::with_cap(7, 7, 1000) {
            Err(Error::Capacity(_)) => {}
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    /// Independent brute-force construction of H and T: loops over *pairs*
    /// of states of its own ascending-order enumeration and scores each
    /// ordered bond of the ring, rather than scattering amplitudes from
    /// source columns.
    struct BruteForce {
        states: Vec<Vec<u32>>,
        lookup: HashMap<Vec<u32>, usize>,
    }

    impl BruteForce {
        fn new(m: usize, n: u32) -> Self {
            // odometer enumeration, ascending lexicographic
            let mut states = Vec::new();
            let mut current = vec![0u32; m];
            loop {
                if current.iter().sum::<u32>() == n {
                    states.push(current.clone());
                }
                let mut site = m;
                loop {
                    if site == 0 {
                        let lookup = states
                            .iter()
                            .enumerate()
                            .map(|(i, s)| (s.clone(), i))
                            .collect();
                        return BruteForce { states, lookup };
                    }
                    site -= 1;
                    if current[site] < n {
                        current[site] += 1;
                        for c in current.iter_mut().skip(site + 1) {
                            *c = 0;
                        }
                        break;
                    }
                }
            }
        }

        /// <bra| b_to^dag b_from |ket>, zero unless the occupations match.
        fn hop_element(&self, bra: &[u32], ket: &[u32], to: usize, from: usize) -> f64 {
            if to == from {
                return if bra == ket { ket[from] as f64 } else { 0.0 };
            }
            let mut moved = ket.to_vec();
            if moved[from] == 0 {
                return 0.0;
            }
            moved[from] -= 1;
            moved[to] += 1;
            if moved == bra {
                ((ket[to] as f64 + 1.0) * ket[from] as f64).sqrt()
            } else {
                0.0
            }
        }

        fn hamiltonian(&self, m: usize, j: f64, u: f64, mu: f64) -> Array2<f64> {
            let dim = self.states.len();
            let mut h = Array2::<f64>::zeros((dim, dim));
            for (a, bra) in self.states.iter().enumerate() {
                for (b, ket) in self.states.iter().enumerate() {
                    let mut val = 0.0;
                    if a == b {
                        for &n in ket {
                            let n = n as f64;
                            val += 0.5 * u * n * (n - 1.0) - mu * n;
                        }
                    }
                    for l in 0..m {
                        for src in [(l + m - 1) % m, (l + 1) % m] {
                            if src != l {
                                val += -j * self.hop_element(bra, ket, l, src);
                            }
                        }
                    }
                    h[[a, b]] = val;
                }
            }
            h
        }

        fn probe(&self, m: usize, j0: Complex64, j1: Complex64, q: f64) -> Array2<Complex64> {
            let dim = self.states.len();
            let mut t = Array2::<Complex64>::zeros((dim, dim));
            for (a, bra) in self.states.iter().enumerate() {
                for (b, ket) in self.states.iter().enumerate() {
                    let mut val = Complex64::new(0.0, 0.0);
                    for l in 0..m {
                        let phase = Complex64::from_polar(1.0, q * l as f64);
                        if a == b {
                            val += phase * j0 * ket[l] as f64;
                        }
                        let r = (l + 1) % m;
                        if r != l {
                            val += phase
                                * j1
                                * (self.hop_element(bra, ket, l, r)
                                    + self.hop_element(bra, ket, r, l));
                        }
                    }
                    t[[a, b]] = val;
                }
            }
            t
        }
    }

    fn coupling(j0: Complex64, j1: Complex64, q: f64) -> CouplingCoefficients {
        CouplingCoefficients { j0, j1, q_d0: [q, 0.0, 0.0] }
    }

    #[test]
    fn matrices_match_brute_force_up_to_four_sites() {
        let j0 = Complex64::new(0.93, -0.21);
        let j1 = Complex64::new(0.11, 0.05);
        for m in 2..=4usize {
            for n in 1..=4u32 {
                let basis = FockBasis::new(m, n as usize).unwrap();
                let brute = BruteForce::new(m, n);
                let q = 2.0 * std::f64::consts::PI / m as f64;
                let h = build_hamiltonian(&basis, 0.37, 1.9, 0.13);
                let hb = brute.hamiltonian(m, 0.37, 1.9, 0.13);
                let t = probe_operator(&basis, &coupling(j0, j1, q), true);
                let tb = brute.probe(m, j0, j1, q);
                for (a, bra) in brute.states.iter().enumerate() {
                    for (b, ket) in brute.states.iter().enumerate() {
                        let i = basis.index_of(bra).unwrap();
                        let k = basis.index_of(ket).unwrap();
                        assert!(
                            (h.matrix[[i, k]] - hb[[a, b]]).abs() < 1e-12,
                            "H mismatch at M={m} N={n} ({a},{b})"
                        );
                        assert!(
                            (t.matrix[[i, k]] - tb[[a, b]]).norm() < 1e-12,
                            "T mismatch at M={m} N={n} ({a},{b})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn two_site_eigenvalues_match_closed_form() {
        // M = N = 2 in the basis {|2,0>, |1,1>, |0,2>}: both ring bonds
        // coincide, the off-diagonal element is -2 sqrt(2) J, and the
        // spectrum is {U - 2 mu, U/2 - 2 mu +- sqrt(U^2/4 + 16 J^2)}.
        let (j, u, mu) = (0.8, 2.3, 0.41);
        let basis = FockBasis::new(2, 2).unwrap();
        let eig = build_hamiltonian(&basis, j, u, mu).eigendecompose().unwrap();
        let root = (u * u / 4.0 + 16.0 * j * j).sqrt();
        let mut expected = [u - 2.0 * mu, u / 2.0 - 2.0 * mu + root, u / 2.0 - 2.0 * mu - root];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, x) in eig.energies.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-10, "eigenvalue {e} vs closed form {x}");
        }
    }

    #[test]
    fn hamiltonian_is_symmetric_and_probe_adjoint_flips_q() {
        let basis = FockBasis::new(4, 3).unwrap();
        let h = build_hamiltonian(&basis, 1.0, 5.0, 0.2);
        let diff = (&h.matrix - &h.matrix.t()).mapv(f64::abs);
        assert!(diff.iter().all(|&x| x == 0.0));
        let c = coupling(Complex64::new(0.7, 0.1), Complex64::new(0.2, -0.3), 1.234);
        let t_plus = probe_operator(&basis, &c, true);
        let c_minus = coupling(c.j0.conj(), c.j1.conj(), -1.234);
        let t_minus = probe_operator(&basis, &c_minus, true);
        // T(q)^dag equals T(-q) with conjugated couplings.
        let adj = t_plus.matrix.t().mapv(|z| z.conj());
        let diff = (&adj - &t_minus.matrix).mapv(|z| z.norm());
        assert!(diff.iter().all(|&x| x < 1e-14));
    }

    #[test]
    fn atomic_limit_ground_state_is_unit_filling() {
        let basis = FockBasis::new(5, 5).unwrap();
        let eig = build_hamiltonian(&basis, 0.0, 4.0, 0.0).eigendecompose().unwrap();
        let gs = ground_state(&eig);
        assert_relative_eq!(gs.energy, 0.0, epsilon = 1e-12);
        let idx = basis.index_of(&[1, 1, 1, 1, 1]).unwrap();
        assert_relative_eq!(gs.amplitudes[idx].abs(), 1.0, epsilon = 1e-12);
        // J = 0 at integer filling leaves a unique Fock ground state; the
        // (many) degenerate *excited* levels do not trigger the flag.
        assert!(gs.degenerate_with.is_none());
    }

    #[test]
    fn single_particle_spectrum_is_tight_binding() {
        let (m, j, mu) = (6usize, 0.7, 0.11);
        let basis = FockBasis::new(m, 1).unwrap();
        let eig = build_hamiltonian(&basis, j, 3.0, mu).eigendecompose().unwrap();
        let mut expected: Vec<f64> = (0..m)
            .map(|n| -2.0 * j * (2.0 * std::f64::consts::PI * n as f64 / m as f64).cos() - mu)
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (e, x) in eig.energies.iter().zip(&expected) {
            assert_relative_eq!(e, x, epsilon = 1e-12);
        }
    }

    #[test]
    fn noninteracting_ground_energy_is_condensate() {
        let (m, n, j) = (5usize, 4usize, 0.9);
        let basis = FockBasis::new(m, n).unwrap();
        let eig = build_hamiltonian(&basis, j, 0.0, 0.0).eigendecompose().unwrap();
        assert_relative_eq!(eig.energies[0], -2.0 * j * n as f64, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_ground_state_is_flagged() {
        // U = 0, J = 0, mu = 0: every Fock state has energy zero.
        let basis = FockBasis::new(3, 2).unwrap();
        let eig = build_hamiltonian(&basis, 0.0, 0.0, 0.0).eigendecompose().unwrap();
        let gs = ground_state(&eig);
        assert_eq!(gs.degenerate_with, Some((0, 1)));
    }

    #[test]
    fn probe_without_bond_channel_at_zero_q_is_atom_number() {
        let basis = FockBasis::new(4, 3).unwrap();
        let c = coupling(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 0.0);
        let t = probe_operator(&basis, &c, false);
        for (i, row) in t.matrix.rows().into_iter().enumerate() {
            for (k, z) in row.iter().enumerate() {
                let expected = if i == k { 3.0 } else { 0.0 };
                assert!((z - Complex64::new(expected, 0.0)).norm() < 1e-14);
            }
        }
    }

    /// Simultaneous eigenbasis of H and the ring translation, used to verify
    /// the momentum selection rule of T(q).
    #[test]
    fn probe_matrix_elements_respect_momentum_selection() {
        let (m, n) = (4usize, 3usize);
        let basis = FockBasis::new(m, n).unwrap();
        let dim = basis.len();

        // Translation permutation: site l -> l + 1.
        let mut perm = Array2::<f64>::zeros((dim, dim));
        for (col, s) in basis.states().iter().enumerate() {
            let mut shifted = vec![0u32; m];
            for l in 0..m {
                shifted[(l + 1) % m] = s.occupations[l];
            }
            let row = basis.index_of(&shifted).unwrap();
            perm[[row, col]] = 1.0;
        }

        let h = build_hamiltonian(&basis, 0.6, 2.1, 0.0);
        let comm = h.matrix.dot(&perm) - perm.dot(&h.matrix);
        assert!(comm.iter().all(|&x| x.abs() < 1e-12), "H must commute with translation");
        let eig = h.eigendecompose().unwrap();

        // Within each degenerate cluster diagonalize a random Hermitian
        // combination of the restricted translation (unitary, normal), which
        // shares its eigenvectors; label every state by its momentum phase.
        let mut momentum_states: Vec<(usize, Array1<Complex64>)> = Vec::new();
        let mut start = 0;
        while start < dim {
            let mut stop = start + 1;
            while stop < dim && (eig.energies[stop] - eig.energies[start]).abs() < 1e-9 {
                stop += 1;
            }
            let block = eig.states.slice(s![.., start..stop]).to_owned();
            let restricted = block.t().dot(&perm).dot(&block);
            let b = restricted.mapv(|x| Complex64::new(x, 0.0));
            let b_dag = b.t().mapv(|z| z.conj());
            let herm = (&b + &b_dag).mapv(|z| 0.731 * z)
                + (&b - &b_dag).mapv(|z| Complex64::new(0.0, -0.389) * z);
            let (_, vecs) = herm.eigh(UPLO::Lower).unwrap();
            let blockc = block.mapv(|x| Complex64::new(x, 0.0));
            for col in vecs.columns() {
                let v = blockc.dot(&col.to_owned());
                let pv = perm.mapv(|x| Complex64::new(x, 0.0)).dot(&v);
                let lambda: Complex64 =
                    v.iter().zip(pv.iter()).map(|(a, b)| a.conj() * b).sum();
                assert!((lambda.norm() - 1.0).abs() < 1e-8, "translation not unitary on state");
                let sector = (lambda.arg() * m as f64 / (2.0 * std::f64::consts::PI)).round();
                let sector = ((sector as i64 % m as i64) + m as i64) as usize % m;
                momentum_states.push((sector, v));
            }
            start = stop;
        }
        assert_eq!(momentum_states.len(), dim);

        // T(q) with q d0 = 2 pi s*/M changes the momentum sector by exactly
        // s* (translation covariance: P T P^dag = e^{-i q d0} T).
        for s_star in 0..m {
            let q = 2.0 * std::f64::consts::PI * s_star as f64 / m as f64;
            let c = coupling(Complex64::new(0.8, 0.1), Complex64::new(0.3, -0.2), q);
            let t = probe_operator(&basis, &c, true);
            for (sa, va) in &momentum_states {
                let tva = t.matrix.dot(va);
                for (sb, vb) in &momentum_states {
                    let elem: Complex64 =
                        vb.iter().zip(tva.iter()).map(|(x, y)| x.conj() * y).sum();
                    // Convention check: <f|T|i> transfers +s* from i to f
                    // in the sector labelled by P v = e^{+i 2 pi s / M} v.
                    let allowed = (*sb + s_star) % m == *sa;
                    if !allowed {
                        assert!(
                            elem.norm() < 1e-10,
                            "forbidden element {:.2e} at sectors {sa} <- {sb}, s* = {s_star}",
                            elem.norm()
                        );
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_hamiltonians_are_symmetric_with_conserved_number(
            m in 2usize..5,
            n in 1usize..5,
            j in 0.0f64..2.0,
            u in 0.0f64..5.0,
        ) {
            let basis = FockBasis::new(m, n).unwrap();
            let h = build_hamiltonian(&basis, j, u, 0.3);
            for a in 0..basis.len() {
                for b in 0..basis.len() {
                    prop_assert!((h.matrix[[a, b]] - h.matrix[[b, a]]).abs() < 1e-13);
                }
                prop_assert_eq!(basis.state(a).total() as usize, n);
            }
        }
    }
}
