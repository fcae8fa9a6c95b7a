//! Stimulated-emission cloning in the exact emission-ladder basis, the
//! large-photon-number analytic solution, clone statistics, and the analytic
//! pair-production cloner with post-selection.
//!
//! The collective atom-field dynamics never leaves the span of N+1 ladder
//! states indexed by the number of additionally emitted photons, so the
//! exact evolution reduces to exponentiating a real tridiagonal matrix.

use crate::fock::FockState;
use crate::math::binomial;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StimulatedError {
    #[error("ladder index l={0} out of range 0..={1}")]
    LadderOutOfRange(usize, usize),
    #[error("need m >= 0 and N >= 1, got m={0}, N={1}")]
    BadLadderParams(usize, usize),
    #[error("interaction strength must satisfy 0 <= Gamma < 1, got {0}")]
    BadInteraction(f64),
    #[error("cutoff {cutoff} leaves a truncation tail of {tail:.3e} (> {budget:.1e})")]
    CutoffTooSmall { cutoff: usize, tail: f64, budget: f64 },
    #[error("post-selected photon number {m} has zero weight (need m >= {n_input})")]
    EmptySector { m: usize, n_input: usize },
}

pub type Result<T> = std::result::Result<T, StimulatedError>;

/// Coefficients f_l over the emission-ladder basis for m seed photons and
/// N atoms; f = (1, 0, ..., 0) at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StimulatedLadder {
    pub m_photons: usize,
    pub n_atoms: usize,
    pub f: DVector<C64>,
}

impl StimulatedLadder {
    /// Ladder state at t = 0.
    pub fn initial(m: usize, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(StimulatedError::BadLadderParams(m, n));
        }
        let mut f = DVector::zeros(n + 1);
        f[0] = C64::new(1.0, 0.0);
        Ok(StimulatedLadder { m_photons: m, n_atoms: n, f })
    }

    /// Emission probabilities p(l) = |f_l|^2.
    pub fn probabilities(&self) -> Vec<f64> {
        self.f.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm(&self) -> f64 {
        self.f.norm()
    }
}

/// Normalized ladder basis state with l additional photons, expanded over
/// the five collective modes (a1, a2, b1, b2, c).
///
/// Amplitude (-1)^i sqrt(C(m+l-i, m) / C(m+l+1, l)) on
/// |(m+l-i), i, i, (l-i), (N-l)⟩ for i = 0..=l.
pub fn f_basis_state(m: usize, n: usize, l: usize) -> Result<FockState> {
    if n < 1 {
        return Err(StimulatedError::BadLadderParams(m, n));
    }
    if l > n {
        return Err(StimulatedError::LadderOutOfRange(l, n));
    }
    let denom = binomial((m + l + 1) as u64, l as u64);
    let mut terms = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let amp = sign * (binomial((m + l - i) as u64, m as u64) / denom).sqrt();
        let occ = vec![
            (m + l - i) as u32,
            i as u32,
            i as u32,
            (l - i) as u32,
            (n - l) as u32,
        ];
        terms.push((occ, C64::new(amp, 0.0)));
    }
    Ok(FockState::superposition(5, &terms).expect("ladder state has unit norm"))
}

/// Tridiagonal coupling matrix of the ladder dynamics in units of the
/// coupling constant: T[l][l+1] = sqrt((l+1)(N-l)(m+l+2)), zero diagonal.
pub fn ladder_transfer_matrix(m: usize, n: usize) -> DMatrix<f64> {
    let dim = n + 1;
    let mut t = DMatrix::zeros(dim, dim);
    for l in 0..n {
        let v = (((l + 1) * (n - l) * (m + l + 2)) as f64).sqrt();
        t[(l, l + 1)] = v;
        t[(l + 1, l)] = v;
    }
    t
}

/// Exact ladder evolution f(t) = exp(-i gamma_t T) f(0) through the dense
/// eigendecomposition of the (N+1)-dimensional tridiagonal.
pub fn evolve_ladder(s: &StimulatedLadder, gamma_t: f64) -> StimulatedLadder {
    let t = ladder_transfer_matrix(s.m_photons, s.n_atoms);
    let eig = t.symmetric_eigen();
    // coefficients in the eigenbasis, phased, and back
    let dim = s.f.len();
    let mut coeffs = DVector::zeros(dim);
    for k in 0..dim {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            acc += C64::new(eig.eigenvectors[(i, k)], 0.0) * s.f[i];
        }
        coeffs[k] = acc * C64::from_polar(1.0, -eig.eigenvalues[k] * gamma_t);
    }
    let mut f = DVector::zeros(dim);
    for i in 0..dim {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..dim {
            acc += C64::new(eig.eigenvectors[(i, k)], 0.0) * coeffs[k];
        }
        f[i] = acc;
    }
    StimulatedLadder { m_photons: s.m_photons, n_atoms: s.n_atoms, f }
}

/// Closed-form ladder coefficients in the large-m regime:
/// f_l = (-i)^l sqrt(C(N,l)) cos^(N-l)(gamma sqrt(m) t) sin^l(gamma sqrt(m) t).
pub fn large_m_solution(m: usize, n: usize, gamma_t: f64) -> Result<StimulatedLadder> {
    if m < 1 || n < 1 {
        return Err(StimulatedError::BadLadderParams(m, n));
    }
    let theta = gamma_t * (m as f64).sqrt();
    let minus_i = C64::new(0.0, -1.0);
    let f = DVector::from_fn(n + 1, |l, _| {
        minus_i.powu(l as u32)
            * C64::new(
                binomial(n as u64, l as u64).sqrt()
                    * theta.cos().powi((n - l) as i32)
                    * theta.sin().powi(l as i32),
                0.0,
            )
    });
    Ok(StimulatedLadder { m_photons: m, n_atoms: n, f })
}

/// Per-sector emission statistics: probability of l extra photons and the
/// fidelity of the resulting m → m+l cloning event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneEvent {
    pub extra_photons: usize,
    pub probability: f64,
    pub fidelity: f64,
}

/// Fidelity of the l-th ladder state as the relative frequency of photons
/// in the seeded polarization: sum_i ((m+l-i)/(m+l)) C(m+l-i,m)/C(m+l+1,l).
pub fn ladder_fidelity(m: usize, l: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let denom = binomial((m + l + 1) as u64, l as u64);
    (0..=l)
        .map(|i| {
            let weight = binomial((m + l - i) as u64, m as u64) / denom;
            weight * (m + l - i) as f64 / (m + l) as f64
        })
        .sum()
}

/// Emission probabilities and per-sector fidelities of a ladder state.
pub fn clone_statistics(s: &StimulatedLadder) -> Vec<CloneEvent> {
    s.probabilities()
        .iter()
        .enumerate()
        .map(|(l, &p)| CloneEvent {
            extra_photons: l,
            probability: p,
            fidelity: ladder_fidelity(s.m_photons, l),
        })
        .collect()
}

/// Analytic pair-source configuration: N seed photons, interaction strength
/// Gamma = tanh(gamma t), and the extra-pair cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcConfig {
    pub n_input: usize,
    pub interaction: f64,
    pub cutoff: usize,
}

/// Truncation-tail probability budget for [`pdc_final_state`].
pub const PDC_TAIL_BUDGET: f64 = 1e-8;

/// Analytic final state of the pair source seeded with N photons in mode V1:
///
/// K Σ_k (-iΓ)^k sqrt(C(k+N,N)) |k+N⟩_V1 |k⟩_H2 ⊗ Σ_l (iΓ)^l |l⟩_H1 |l⟩_V2
///
/// over the modes (V1, H1, V2, H2), truncated at `cutoff` extra pairs per
/// sector and renormalized. Fails when the neglected tail exceeds the budget.
pub fn pdc_final_state(cfg: &PdcConfig) -> Result<FockState> {
    let g = cfg.interaction;
    if !(0.0..1.0).contains(&g) {
        return Err(StimulatedError::BadInteraction(g));
    }
    let n = cfg.n_input;
    let kmax = cfg.cutoff;

    // Exact sector norms: sum_k Γ^2k C(k+N,N) = (1-Γ²)^-(N+1) and the plain
    // geometric series for the cross-polarized pairs.
    let full_norm_sq = (1.0 - g * g).powi(-(n as i32 + 2));
    let stim_truncated: f64 = (0..=kmax)
        .map(|k| g.powi(2 * k as i32) * binomial((k + n) as u64, n as u64))
        .sum();
    let spont_truncated: f64 = (0..=kmax).map(|l| g.powi(2 * l as i32)).sum();
    let truncated_norm_sq = stim_truncated * spont_truncated;
    let tail = 1.0 - truncated_norm_sq / full_norm_sq;
    if tail > PDC_TAIL_BUDGET {
        return Err(StimulatedError::CutoffTooSmall {
            cutoff: kmax,
            tail,
            budget: PDC_TAIL_BUDGET,
        });
    }

    let minus_ig = C64::new(0.0, -g);
    let plus_ig = C64::new(0.0, g);
    let mut terms = Vec::with_capacity((kmax + 1) * (kmax + 1));
    for k in 0..=kmax {
        let stim = minus_ig.powu(k as u32)
            * C64::new(binomial((k + n) as u64, n as u64).sqrt(), 0.0);
        for l in 0..=kmax {
            let amp = stim * plus_ig.powu(l as u32);
            terms.push((vec![(k + n) as u32, l as u32, l as u32, k as u32], amp));
        }
    }
    Ok(FockState::superposition(4, &terms).expect("pair-source state is nonzero"))
}

/// Component of a pair-source state with a fixed total photon number M in
/// mode 1, renormalized.
#[derive(Debug, Clone)]
pub struct PostselectedPdc {
    pub state: FockState,
    pub m_total: usize,
}

impl PostselectedPdc {
    /// Single-clone fidelity of the mode-1 register as the relative
    /// frequency of photons sharing the seed polarization V.
    pub fn mode1_fidelity(&self) -> f64 {
        self.state
            .iter()
            .map(|(occ, z)| z.norm_sqr() * occ[0] as f64 / self.m_total as f64)
            .sum()
    }
}

/// Post-select on M total photons in spatial mode 1 (V1 + H1).
pub fn pdc_postselect(state: &FockState, n_input: usize, m_total: usize) -> Result<PostselectedPdc> {
    let terms: Vec<(Vec<u32>, C64)> = state
        .iter()
        .filter(|(occ, _)| (occ[0] + occ[1]) as usize == m_total)
        .map(|(occ, z)| (occ.clone(), *z))
        .collect();
    let weight: f64 = terms.iter().map(|(_, z)| z.norm_sqr()).sum();
    if m_total < n_input || weight < 1e-300 {
        return Err(StimulatedError::EmptySector { m: m_total, n_input });
    }
    let state = FockState::superposition(4, &terms).expect("nonzero sector");
    Ok(PostselectedPdc { state, m_total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloning::{gm_apply, gm_coefficients, optimal_fidelity};
    use crate::fock::{
        self, evolve, lambda_charges, lambda_schwinger, pdc_classical_pump, EvolutionParams,
    };
    use crate::qubit::{symmetric_state_in_basis, Ket};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ladder_state_zero_is_initial() {
        let f0 = f_basis_state(3, 2, 0).unwrap();
        assert_abs_diff_eq!(
            (f0.amplitude(&[3, 0, 0, 0, 2]) - c(1.0, 0.0)).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert_eq!(f0.support_len(), 1);
    }

    #[test]
    fn ladder_state_one_emission_frozen() {
        let f1 = f_basis_state(1, 1, 1).unwrap();
        assert_abs_diff_eq!(f1.amplitude(&[2, 0, 0, 1, 0]).re, (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(f1.amplitude(&[1, 1, 1, 0, 0]).re, -(1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn ladder_state_normalization_denominator() {
        // (2, 3, 2): amplitudes scale by 1/sqrt(C(5,2)) = 1/sqrt(10).
        let f2 = f_basis_state(2, 3, 2).unwrap();
        assert_abs_diff_eq!(f2.amplitude(&[4, 0, 0, 2, 1]).re, (6.0f64 / 10.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(f2.norm(), 1.0, epsilon = 1e-14);
        assert!(f_basis_state(2, 3, 4).is_err());
    }

    #[test]
    fn ladder_states_orthonormal() {
        for m in 0..=3usize {
            for n in 1..=3usize {
                for l in 0..=n {
                    for k in 0..=n {
                        let a = f_basis_state(m, n, l).unwrap();
                        let b = f_basis_state(m, n, k).unwrap();
                        let expected = if l == k { 1.0 } else { 0.0 };
                        assert_abs_diff_eq!(a.inner(&b).norm(), expected, epsilon = 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_matrix_small_cases() {
        let t = ladder_transfer_matrix(1, 1);
        assert_abs_diff_eq!(t[(0, 1)], 3.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(t[(1, 0)], 3.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(t[(0, 0)], 0.0, epsilon = 1e-15);

        for m in 0..6usize {
            let t = ladder_transfer_matrix(m, 1);
            assert_abs_diff_eq!(t[(0, 1)], ((m + 2) as f64).sqrt(), epsilon = 1e-14);
        }
    }

    #[test]
    fn transfer_matrix_large_m_scaling() {
        let m = 40_000usize;
        let n = 3;
        let t = ladder_transfer_matrix(m, n);
        for l in 0..n {
            let approx_entry = (m as f64).sqrt() * (((l + 1) * (n - l)) as f64).sqrt();
            assert!((t[(l, l + 1)] - approx_entry).abs() / approx_entry < 1e-4);
        }
    }

    #[test]
    fn ladder_exactness_against_full_hamiltonian() {
        // Applying the collective Hamiltonian to each ladder state must
        // reproduce the tridiagonal couplings exactly.
        let h = lambda_schwinger(1.0);
        for m in 0..=4usize {
            for n in 1..=4usize {
                let t = ladder_transfer_matrix(m, n);
                for l in 0..=n {
                    let applied = fock::apply_hamiltonian(&h, &f_basis_state(m, n, l).unwrap());
                    let mut expected = FockState::zero(5);
                    if l + 1 <= n {
                        expected = expected.add(
                            &f_basis_state(m, n, l + 1).unwrap().scaled(c(t[(l, l + 1)], 0.0)),
                        );
                    }
                    if l >= 1 {
                        expected = expected.add(
                            &f_basis_state(m, n, l - 1).unwrap().scaled(c(t[(l, l - 1)], 0.0)),
                        );
                    }
                    let diff = applied.add(&expected.scaled(c(-1.0, 0.0)));
                    assert!(
                        diff.norm() < 1e-12,
                        "recursion fails at m={m}, n={n}, l={l}: {}",
                        diff.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn evolve_zero_time_unchanged() {
        let s = StimulatedLadder::initial(2, 3).unwrap();
        let out = evolve_ladder(&s, 0.0);
        assert_abs_diff_eq!((out.f[0] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn one_atom_emission_probability() {
        let s = StimulatedLadder::initial(1, 1).unwrap();
        for &gt in &[0.1, 0.4, 0.9, 1.5] {
            let out = evolve_ladder(&s, gt);
            let expected = (3.0f64.sqrt() * gt).sin().powi(2);
            assert_abs_diff_eq!(out.f[1].norm_sqr(), expected, epsilon = 1e-12);
            assert_abs_diff_eq!(out.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ladder_evolution_matches_full_fock_dynamics() {
        // m=5, N=3 at gamma t = 0.4 against the exact block evolution of the
        // collective Hamiltonian, amplitude for amplitude.
        let (m, n, gt) = (5usize, 3usize, 0.4f64);
        let h = lambda_schwinger(1.0);
        let initial = FockState::basis(vec![m as u32, 0, 0, 0, n as u32]);
        let full = evolve(&h, &initial, &EvolutionParams::block(gt)).unwrap();
        let ladder = evolve_ladder(&StimulatedLadder::initial(m, n).unwrap(), gt);
        let mut covered = 0.0;
        for l in 0..=n {
            let fl = f_basis_state(m, n, l).unwrap();
            let overlap = fl.inner(&full);
            assert!(
                (overlap - ladder.f[l]).norm() < 1e-12,
                "f_{l} mismatch: {overlap} vs {}",
                ladder.f[l]
            );
            covered += overlap.norm_sqr();
        }
        // dynamics never leaves the ladder span
        assert_abs_diff_eq!(covered, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn charges_also_conserved_by_ladder_states() {
        let charges = lambda_charges();
        let f1 = f_basis_state(2, 2, 1).unwrap();
        let vals: Vec<f64> = charges.weights.iter().map(|w| f1.charge_expectation(w)).collect();
        // every ladder state of the m=2, N=2 family carries the same charges
        assert_abs_diff_eq!(vals[0], 2.0, epsilon = 1e-12); // n_a1 - n_b2 = m - l + ... stays 2
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn large_m_initial_condition() {
        let s = large_m_solution(100, 4, 0.0).unwrap();
        assert_abs_diff_eq!((s.f[0] - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        for l in 1..=4 {
            assert_abs_diff_eq!(s.f[l].norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn large_m_binomial_probabilities() {
        let (m, n) = (250usize, 3usize);
        let gt = 0.65 / (m as f64).sqrt();
        let s = large_m_solution(m, n, gt).unwrap();
        let theta = gt * (m as f64).sqrt();
        let p_single = theta.sin().powi(2);
        for l in 0..=n {
            let expected = binomial(n as u64, l as u64)
                * p_single.powi(l as i32)
                * (1.0 - p_single).powi((n - l) as i32);
            assert_abs_diff_eq!(s.f[l].norm_sqr(), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn large_m_matches_exact_ladder() {
        // m=400, N=3: exact and asymptotic probabilities agree to 1% at
        // several rescaled times.
        let (m, n) = (400usize, 3usize);
        for &theta in &[0.2, 0.8, 1.4] {
            let gt = theta / (m as f64).sqrt();
            let exact = evolve_ladder(&StimulatedLadder::initial(m, n).unwrap(), gt);
            let asym = large_m_solution(m, n, gt).unwrap();
            for l in 0..=n {
                assert!(
                    (exact.f[l].norm_sqr() - asym.f[l].norm_sqr()).abs() < 0.01,
                    "p({l}) differs beyond 1% at theta={theta}"
                );
            }
        }
    }

    #[test]
    fn clone_statistics_fidelities() {
        assert_abs_diff_eq!(ladder_fidelity(1, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ladder_fidelity(1, 1), 5.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ladder_fidelity(1, 2), optimal_fidelity(1, 3), epsilon = 1e-14);
        // general agreement with the qubit-cloning optimum
        for m in 1..=10usize {
            for l in 0..=4usize {
                assert_abs_diff_eq!(
                    ladder_fidelity(m, l),
                    optimal_fidelity(m, m + l),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn fidelity_bounded_by_optimum_on_grid() {
        for m in 1..=10usize {
            for n in 1..=4usize {
                let init = StimulatedLadder::initial(m, n).unwrap();
                for step in 0..8 {
                    let gt = 0.25 * (step + 1) as f64;
                    let out = evolve_ladder(&init, gt);
                    let stats = clone_statistics(&out);
                    let total: f64 = stats.iter().map(|e| e.probability).sum();
                    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
                    for e in stats {
                        assert!(
                            e.fidelity <= optimal_fidelity(m, m + e.extra_photons) + 1e-12,
                            "fidelity bound violated at m={m}, n={n}, l={}",
                            e.extra_photons
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn pdc_zero_interaction_is_seed_state() {
        let cfg = PdcConfig { n_input: 2, interaction: 0.0, cutoff: 4 };
        let out = pdc_final_state(&cfg).unwrap();
        assert_eq!(out.support_len(), 1);
        assert_abs_diff_eq!((out.amplitude(&[2, 0, 0, 0]) - c(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pdc_vacuum_seed_has_geometric_ladders() {
        let cfg = PdcConfig { n_input: 0, interaction: 0.15, cutoff: 12 };
        let out = pdc_final_state(&cfg).unwrap();
        // both pair ladders are geometric in the amplitude magnitude
        let a0 = out.amplitude(&[0, 0, 0, 0]).norm();
        let a1 = out.amplitude(&[1, 0, 0, 1]).norm();
        let a2 = out.amplitude(&[2, 0, 0, 2]).norm();
        assert_abs_diff_eq!(a1 / a0, 0.15, epsilon = 1e-10);
        assert_abs_diff_eq!(a2 / a1, 0.15, epsilon = 1e-10);
        let b1 = out.amplitude(&[0, 1, 1, 0]).norm();
        assert_abs_diff_eq!(b1 / a0, 0.15, epsilon = 1e-10);
    }

    #[test]
    fn pdc_amplitudes_factorize() {
        let cfg = PdcConfig { n_input: 1, interaction: 0.35, cutoff: 14 };
        let out = pdc_final_state(&cfg).unwrap();
        let a00 = out.amplitude(&[1, 0, 0, 0]);
        for k in 0..3u32 {
            for l in 0..3u32 {
                let joint = out.amplitude(&[1 + k, l, l, k]);
                let left = out.amplitude(&[1 + k, 0, 0, k]);
                let right = out.amplitude(&[1, l, l, 0]);
                assert!((joint * a00 - left * right).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pdc_matches_numeric_evolution() {
        // Gamma = tanh(gamma t): the analytic state must agree with the
        // sparse numeric evolution of the pair-production Hamiltonian.
        for n in 0..=2usize {
            let gt = 0.309519604203112; // atanh(0.3)
            let cfg = PdcConfig { n_input: n, interaction: 0.3, cutoff: 18 };
            let analytic = pdc_final_state(&cfg).unwrap();
            let h = pdc_classical_pump(1.0);
            let mut occ = vec![0u32; 4];
            occ[0] = n as u32;
            let numeric = evolve(&h, &FockState::basis(occ), &EvolutionParams::taylor(gt)).unwrap();
            let diff = analytic.add(&numeric.scaled(c(-1.0, 0.0)));
            let max_err = diff.iter().map(|(_, z)| z.norm()).fold(0.0f64, f64::max);
            assert!(max_err < 1e-6, "amplitude error {max_err} at n={n}");
        }
    }

    #[test]
    fn pdc_cutoff_guard_fires() {
        let cfg = PdcConfig { n_input: 1, interaction: 0.6, cutoff: 3 };
        match pdc_final_state(&cfg) {
            Err(StimulatedError::CutoffTooSmall { .. }) => {}
            other => panic!("expected cutoff diagnostic, got {other:?}"),
        }
    }

    #[test]
    fn postselect_trivial_sector() {
        let cfg = PdcConfig { n_input: 2, interaction: 0.25, cutoff: 12 };
        let out = pdc_final_state(&cfg).unwrap();
        let post = pdc_postselect(&out, 2, 2).unwrap();
        assert_abs_diff_eq!(post.mode1_fidelity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn postselect_fidelities_are_optimal() {
        let cfg = PdcConfig { n_input: 1, interaction: 0.3, cutoff: 16 };
        let out = pdc_final_state(&cfg).unwrap();
        let post = pdc_postselect(&out, 1, 2).unwrap();
        assert_abs_diff_eq!(post.mode1_fidelity(), 5.0 / 6.0, epsilon = 1e-10);

        let cfg = PdcConfig { n_input: 2, interaction: 0.3, cutoff: 16 };
        let out = pdc_final_state(&cfg).unwrap();
        let post = pdc_postselect(&out, 2, 3).unwrap();
        // independent oracle: relative-frequency sum over the 2->3 coefficients
        let g = gm_coefficients(2, 3).unwrap();
        assert_abs_diff_eq!(post.mode1_fidelity(), g.relative_frequency_fidelity(), epsilon = 1e-10);
        assert_abs_diff_eq!(post.mode1_fidelity(), 11.0 / 12.0, epsilon = 1e-10);
    }

    #[test]
    fn postselect_empty_sector_errors() {
        let cfg = PdcConfig { n_input: 2, interaction: 0.2, cutoff: 10 };
        let out = pdc_final_state(&cfg).unwrap();
        assert!(matches!(
            pdc_postselect(&out, 2, 1),
            Err(StimulatedError::EmptySector { .. })
        ));
    }

    #[test]
    fn postselected_state_is_the_cloner_output() {
        // Map the fixed-M component onto clones ⊗ ancilla labels. The pair
        // structure (V1 H2 - H1 V2) pins the label phases to (-1)^l relative
        // to the all-plus qubit convention.
        for (n, m) in [(1usize, 2usize), (1, 3), (2, 3), (2, 4)] {
            let cfg = PdcConfig { n_input: n, interaction: 0.25, cutoff: 16 };
            let full = pdc_final_state(&cfg).unwrap();
            let post = pdc_postselect(&full, n, m).unwrap();
            let anc_dim = m - n + 1;
            let v = Ket::basis(2, 0);
            let h_pol = Ket::basis(2, 1);
            let mut mapped = nalgebra::DVector::zeros((1usize << m) * anc_dim);
            for l in 0..anc_dim {
                let occ = vec![(m - l) as u32, l as u32, l as u32, (m - n - l) as u32];
                let amp = post.state.amplitude(&occ);
                if amp.norm() == 0.0 {
                    continue;
                }
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let clones = symmetric_state_in_basis(m, l, &v, &h_pol);
                for (ci, cz) in clones.amplitudes().iter().enumerate() {
                    mapped[ci * anc_dim + l] += amp * cz * c(sign, 0.0);
                }
            }
            let mapped = Ket::from_vector(mapped).unwrap();
            let gm = gm_apply(&v, n, m).unwrap();
            let overlap = mapped.inner(gm.state()).norm();
            assert!(
                overlap > 1.0 - 1e-10,
                "overlap {overlap} for ({n},{m})"
            );
        }
    }
}
