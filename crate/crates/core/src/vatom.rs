//! Single V-configuration atoms as universal but suboptimal cloners: mixed
//! initial ensembles, photon-count statistics, the fidelity curves they
//! imply, and the exact correspondence between entangled atom pairs and the
//! three-level-atom cloner.

use crate::fock::{
    self, block_decompose_capped, lambda_direct, rotate_two_modes, vatom, vatom_charges,
    BlockPropagator, EvolutionParams, FockError, FockState, Occupation,
};
use crate::math::binomial;
use crate::stimulated::{evolve_ladder, StimulatedLadder};
use crate::C64;
use nalgebra::DVector;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VatomError {
    #[error("need at least one atom")]
    NoAtoms,
    #[error("polarization amplitudes must not both vanish")]
    ZeroPolarization,
    #[error("pair correspondence violated: leakage {leakage:.3e} out of the antisymmetric sector")]
    EquivalenceViolation { leakage: f64 },
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type Result<T> = std::result::Result<T, VatomError>;

/// Default resource guard on the reachable dimension per ensemble branch.
pub const DEFAULT_DIM_CAP: usize = 60_000;

/// Statistical mixture of pure Fock-space branches.
#[derive(Debug, Clone)]
pub struct MixedEnsembleState {
    pub branches: Vec<(f64, FockState)>,
}

impl MixedEnsembleState {
    /// All 2^N equally weighted branches of N atoms drawn from the
    /// unpolarized excited mixture, with one incoming photon alpha a1 + beta a2.
    pub fn vatom_full(n_atoms: usize, alpha: C64, beta: C64) -> Result<Self> {
        let mut branches = Vec::with_capacity(1 << n_atoms);
        let w = 1.0 / (1u64 << n_atoms) as f64;
        for mask in 0..(1u64 << n_atoms) {
            let upper: Vec<bool> = (0..n_atoms).map(|k| mask >> k & 1 == 1).collect();
            branches.push((w, branch_state(n_atoms, &upper, alpha, beta)?));
        }
        Ok(MixedEnsembleState { branches })
    }

    /// One representative branch per excitation sector, weighted by the
    /// number of atom arrangements it stands for. Valid because the
    /// Hamiltonian is invariant under atom permutations, so photon counts
    /// depend only on how many atoms start in each upper level.
    pub fn vatom_representatives(n_atoms: usize, alpha: C64, beta: C64) -> Result<Self> {
        let total = (1u64 << n_atoms) as f64;
        let mut branches = Vec::with_capacity(n_atoms + 1);
        for k in 0..=n_atoms {
            let upper: Vec<bool> = (0..n_atoms).map(|i| i < k).collect();
            let w = binomial(n_atoms as u64, k as u64) / total;
            branches.push((w, branch_state(n_atoms, &upper, alpha, beta)?));
        }
        Ok(MixedEnsembleState { branches })
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|(w, _)| w).sum()
    }
}

fn branch_state(n_atoms: usize, upper_is_e1: &[bool], alpha: C64, beta: C64) -> Result<FockState> {
    if alpha.norm() == 0.0 && beta.norm() == 0.0 {
        return Err(VatomError::ZeroPolarization);
    }
    let n_modes = 2 + 3 * n_atoms;
    let mut occ1 = vec![0u32; n_modes];
    occ1[0] = 1;
    let mut occ2 = vec![0u32; n_modes];
    occ2[1] = 1;
    for (k, &e1) in upper_is_e1.iter().enumerate() {
        let base = fock::atom_modes::atom_base(k);
        let level = if e1 { base + 1 } else { base + 2 };
        occ1[level] = 1;
        occ2[level] = 1;
    }
    Ok(FockState::superposition(n_modes, &[(occ1, alpha), (occ2, beta)])?)
}

/// Joint photon-count distribution p(k right, l wrong) on a time grid.
#[derive(Debug, Clone)]
pub struct PhotonCountTable {
    pub n_atoms: usize,
    pub t_grid: Vec<f64>,
    /// One (k, l) -> probability map per grid point.
    pub p: Vec<BTreeMap<(u32, u32), f64>>,
}

impl PhotonCountTable {
    pub fn probability(&self, t_idx: usize, k: u32, l: u32) -> f64 {
        self.p[t_idx].get(&(k, l)).copied().unwrap_or(0.0)
    }

    /// Mean total photon number and mean number of right-polarized photons.
    pub fn photon_means(&self, t_idx: usize) -> (f64, f64) {
        let mut all = 0.0;
        let mut right = 0.0;
        for (&(k, l), &p) in &self.p[t_idx] {
            all += (k + l) as f64 * p;
            right += k as f64 * p;
        }
        (all, right)
    }
}

/// Evolve the unpolarized V-atom ensemble with one incoming photon in mode
/// a1 and tabulate photon counts over the time grid.
pub fn simulate_vatoms(n_atoms: usize, t_grid: &[f64]) -> Result<PhotonCountTable> {
    simulate_vatoms_polarized(n_atoms, t_grid, C64::new(1.0, 0.0), C64::new(0.0, 0.0))
}

/// Same with an arbitrary incoming polarization alpha a1† + beta a2†; counts
/// are taken in the rotated (right, wrong) basis defined by the input.
pub fn simulate_vatoms_polarized(
    n_atoms: usize,
    t_grid: &[f64],
    alpha: C64,
    beta: C64,
) -> Result<PhotonCountTable> {
    if n_atoms == 0 {
        return Err(VatomError::NoAtoms);
    }
    let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
    if norm < 1e-300 {
        return Err(VatomError::ZeroPolarization);
    }
    let (alpha, beta) = (alpha / norm, beta / norm);
    let ensemble = MixedEnsembleState::vatom_representatives(n_atoms, alpha, beta)?;
    simulate_ensemble(n_atoms, &ensemble, t_grid, alpha, beta)
}

/// Evolve an explicit ensemble branch by branch, using the conserved
/// excitation numbers to stay on small invariant blocks.
pub fn simulate_ensemble(
    n_atoms: usize,
    ensemble: &MixedEnsembleState,
    t_grid: &[f64],
    alpha: C64,
    beta: C64,
) -> Result<PhotonCountTable> {
    let h = vatom(1.0, n_atoms);
    let charges = vatom_charges(n_atoms);
    let rotate = beta.norm() > 0.0;
    // a1† = alpha* b_r† - beta b_w†, a2† = beta* b_r† + alpha b_w† maps the
    // lab modes onto the (right, wrong) basis of the incoming polarization.
    let v = [
        [alpha.conj(), -beta],
        [beta.conj(), alpha],
    ];

    let per_branch: Vec<Result<Vec<BTreeMap<(u32, u32), f64>>>> = ensemble
        .branches
        .par_iter()
        .map(|(w, branch)| {
            let blocks = block_decompose_capped(&h, branch, &charges, DEFAULT_DIM_CAP)?;
            let prepared: Vec<(Vec<Occupation>, BlockPropagator, DVector<C64>)> = blocks
                .iter()
                .map(|b| (b.basis.clone(), b.propagator(), b.project(branch)))
                .collect();
            let mut tables = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                let mut table: BTreeMap<(u32, u32), f64> = BTreeMap::new();
                if rotate {
                    let mut terms: Vec<(Occupation, C64)> = Vec::new();
                    for (basis, prop, v0) in &prepared {
                        let vt = prop.evolve(v0, t);
                        for (i, occ) in basis.iter().enumerate() {
                            if vt[i].norm_sqr() > 0.0 {
                                terms.push((occ.clone(), vt[i]));
                            }
                        }
                    }
                    let state = FockState::superposition(2 + 3 * n_atoms, &terms)?;
                    let rotated = rotate_two_modes(&state, 0, 1, v);
                    for (occ, p) in rotated.marginal_counts(&[0, 1]) {
                        *table.entry((occ[0], occ[1])).or_insert(0.0) += w * p;
                    }
                } else {
                    for (basis, prop, v0) in &prepared {
                        let vt = prop.evolve(v0, t);
                        for (i, occ) in basis.iter().enumerate() {
                            *table.entry((occ[0], occ[1])).or_insert(0.0) +=
                                w * vt[i].norm_sqr();
                        }
                    }
                }
                tables.push(table);
            }
            Ok(tables)
        })
        .collect();

    let mut p: Vec<BTreeMap<(u32, u32), f64>> = vec![BTreeMap::new(); t_grid.len()];
    for branch_tables in per_branch {
        for (t_idx, table) in branch_tables?.into_iter().enumerate() {
            for ((k, l), prob) in table {
                if prob > 0.0 {
                    *p[t_idx].entry((k, l)).or_insert(0.0) += prob;
                }
            }
        }
    }
    Ok(PhotonCountTable { n_atoms, t_grid: t_grid.to_vec(), p })
}

/// Fidelity curves over the time grid; entries are None where no cloning
/// event has any weight (the conditioning denominator vanishes).
#[derive(Debug, Clone)]
pub struct FidelityCurves {
    pub t_grid: Vec<f64>,
    pub f_clones: Vec<Option<f64>>,
    pub f_opt: Vec<Option<f64>>,
    pub f_rand: Vec<Option<f64>>,
}

/// Average relative frequency of right-polarized photons conditioned on at
/// least one emission, next to what an ensemble of ideal cloners and a
/// random photon source would achieve on the same size distribution.
pub fn fidelity_curves(table: &PhotonCountTable) -> FidelityCurves {
    let mut f_clones = Vec::with_capacity(table.t_grid.len());
    let mut f_opt = Vec::with_capacity(table.t_grid.len());
    let mut f_rand = Vec::with_capacity(table.t_grid.len());
    for t_idx in 0..table.t_grid.len() {
        let p10 = table.probability(t_idx, 1, 0);
        let p01 = table.probability(t_idx, 0, 1);
        let denom = 1.0 - p10 - p01;
        if denom < 1e-12 {
            f_clones.push(None);
            f_opt.push(None);
            f_rand.push(None);
            continue;
        }
        let mut clones = 0.0;
        let mut by_total: BTreeMap<u32, f64> = BTreeMap::new();
        for (&(k, l), &p) in &table.p[t_idx] {
            let n = k + l;
            if n < 2 {
                continue;
            }
            let pp = p / denom;
            clones += pp * k as f64 / n as f64;
            *by_total.entry(n).or_insert(0.0) += pp;
        }
        let mut opt = 0.0;
        let mut rand = 0.0;
        for (&n, &pp) in &by_total {
            let n = n as f64;
            opt += pp * (2.0 * n + 1.0) / (3.0 * n);
            rand += pp * (n + 1.0) / (2.0 * n);
        }
        f_clones.push(Some(clones));
        f_opt.push(Some(opt));
        f_rand.push(Some(rand));
    }
    FidelityCurves { t_grid: table.t_grid.clone(), f_clones, f_opt, f_rand }
}

/// Outcome of checking the entangled-pair construction against the
/// three-level-atom cloner.
#[derive(Debug, Clone)]
pub struct PairCorrespondence {
    pub n_pairs: usize,
    pub gamma_t: f64,
    /// Probability weight outside the antisymmetric pair sector.
    pub leakage: f64,
    /// Largest amplitude deviation from the direct three-level encoding.
    pub max_amplitude_error: f64,
    /// Probability of l additional photons, l = 0..=n_pairs.
    pub emission_probabilities: Vec<f64>,
    /// Largest deviation of those probabilities from the exact ladder.
    pub max_ladder_error: f64,
}

const PAIR_LABELS: usize = 3; // antisymmetric combinations per pair

/// Evolve N singlet pairs of V atoms with one seed photon and verify,
/// amplitude for amplitude, that the dynamics is the three-level-atom
/// cloner in disguise.
pub fn vpair_to_lambda_map(n_pairs: usize, gamma_t: f64) -> Result<PairCorrespondence> {
    if n_pairs == 0 {
        return Err(VatomError::NoAtoms);
    }
    let n_atoms = 2 * n_pairs;
    let h = vatom(1.0, n_atoms);
    let n_modes = 2 + 3 * n_atoms;

    // Initial state: one a1 photon, every pair in (e1 e2 - e2 e1)/sqrt(2).
    let mut terms: Vec<(Occupation, C64)> = Vec::new();
    let scale = (0.5f64).powi(n_pairs as i32).sqrt();
    for mask in 0..(1u32 << n_pairs) {
        let mut occ = vec![0u32; n_modes];
        occ[0] = 1;
        let mut sign = 1.0;
        for p in 0..n_pairs {
            let a = fock::atom_modes::atom_base(2 * p);
            let b = fock::atom_modes::atom_base(2 * p + 1);
            if mask >> p & 1 == 0 {
                occ[a + 1] = 1; // A in e1
                occ[b + 2] = 1; // B in e2
            } else {
                occ[a + 2] = 1;
                occ[b + 1] = 1;
                sign = -sign;
            }
        }
        terms.push((occ, C64::new(sign * scale, 0.0)));
    }
    let initial = FockState::superposition(n_modes, &terms)?;
    let evolved = fock::evolve(&h, &initial, &EvolutionParams::block(gamma_t))?;

    // Project onto the antisymmetric pair labels and compare with the direct
    // three-level encoding evolved for the same time.
    let lambda = lambda_direct(1.0, n_pairs);
    let lambda_modes = 2 + 3 * n_pairs;
    let mut lambda_occ = vec![0u32; lambda_modes];
    lambda_occ[0] = 1;
    for p in 0..n_pairs {
        lambda_occ[fock::atom_modes::atom_base(p) + 2] = 1; // level e
    }
    let lambda_evolved = fock::evolve(
        &lambda,
        &FockState::basis(lambda_occ),
        &EvolutionParams::block(gamma_t),
    )?;

    let photon_sectors: Vec<(u32, u32)> = {
        let mut s: Vec<(u32, u32)> = evolved.iter().map(|(occ, _)| (occ[0], occ[1])).collect();
        s.sort_unstable();
        s.dedup();
        s
    };

    let mut captured = 0.0;
    let mut max_amp_err: f64 = 0.0;
    let mut emission = vec![0.0; n_pairs + 1];
    let mut labels = vec![0usize; n_pairs];
    loop {
        for &(n1, n2) in &photon_sectors {
            let amp = pair_sector_amplitude(&evolved, n_modes, n_pairs, &labels, n1, n2);
            let w = amp.norm_sqr();
            captured += w;
            let extra = (n1 + n2) as usize - 1;
            if extra < emission.len() {
                emission[extra] += w;
            }
            // matching basis state of the direct three-level encoding:
            // label 0 -> e, 1 -> g1, 2 -> g2
            let mut occ = vec![0u32; lambda_modes];
            occ[0] = n1;
            occ[1] = n2;
            for (p, &lab) in labels.iter().enumerate() {
                let base = fock::atom_modes::atom_base(p);
                let m = match lab {
                    0 => base + 2, // e
                    1 => base,     // g1
                    _ => base + 1, // g2
                };
                occ[m] = 1;
            }
            let reference = lambda_evolved.amplitude(&occ);
            max_amp_err = max_amp_err.max((amp - reference).norm());
        }
        // next label assignment
        let mut i = 0;
        loop {
            if i == n_pairs {
                break;
            }
            labels[i] += 1;
            if labels[i] < PAIR_LABELS {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
        if i == n_pairs {
            break;
        }
    }

    let leakage = (1.0 - captured).max(0.0);
    if leakage > 1e-10 {
        return Err(VatomError::EquivalenceViolation { leakage });
    }

    let ladder = evolve_ladder(&StimulatedLadder::initial(1, n_pairs).unwrap(), gamma_t);
    let max_ladder_error = ladder
        .probabilities()
        .iter()
        .zip(&emission)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    Ok(PairCorrespondence {
        n_pairs,
        gamma_t,
        leakage,
        max_amplitude_error: max_amp_err,
        emission_probabilities: emission,
        max_ladder_error,
    })
}

/// Amplitude of the evolved state on ⊗_p |label_p⟩ ⊗ |n1, n2⟩ where the
/// labels run over the antisymmetric pair combinations.
fn pair_sector_amplitude(
    state: &FockState,
    n_modes: usize,
    n_pairs: usize,
    labels: &[usize],
    n1: u32,
    n2: u32,
) -> C64 {
    // Each label expands into two signed product components.
    let scale = (0.5f64).powi(n_pairs as i32).sqrt();
    let mut acc = C64::new(0.0, 0.0);
    for mask in 0..(1u32 << n_pairs) {
        let mut occ = vec![0u32; n_modes];
        occ[0] = n1;
        occ[1] = n2;
        let mut sign = 1.0;
        for (p, &lab) in labels.iter().enumerate() {
            let a = fock::atom_modes::atom_base(2 * p);
            let b = fock::atom_modes::atom_base(2 * p + 1);
            let second = mask >> p & 1 == 1;
            if second {
                sign = -sign;
            }
            // (g, e1, e2) offsets are (0, 1, 2)
            let (first_level, second_level) = match lab {
                0 => (1, 2), // e~  = (e1 e2 - e2 e1)/sqrt(2)
                1 => (0, 2), // g1~ = (g e2 - e2 g)/sqrt(2)
                _ => (1, 0), // g2~ = (e1 g - g e1)/sqrt(2)
            };
            let (la, lb) = if second {
                (second_level, first_level)
            } else {
                (first_level, second_level)
            };
            occ[a + la] = 1;
            occ[b + lb] = 1;
        }
        acc += C64::new(sign * scale, 0.0) * state.amplitude(&occ);
    }
    acc
}
