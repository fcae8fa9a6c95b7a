//! Sparse multimode bosonic Fock-space engine: monomial Hamiltonians,
//! operator application with exact matrix elements, conserved-charge block
//! decomposition, and time evolution.
//!
//! States are sparse maps from occupation tuples to complex amplitudes.
//! Hamiltonians are lists of ladder-operator monomials with an optional
//! automatic Hermitian-conjugate completion, plus optional per-mode
//! occupation caps so two- and three-level atoms can be encoded as hard-core
//! modes with projector-guarded ladder terms.

use crate::C64;
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;
use thiserror::Error;

/// Occupation numbers per mode, the sparse basis label.
pub type Occupation = Vec<u32>;

#[derive(Debug, Error)]
pub enum FockError {
    #[error("mode {0} out of range for {1} modes")]
    ModeOutOfRange(usize, usize),
    #[error("occupation tuple has {0} modes, expected {1}")]
    WrongModeCount(usize, usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error(
        "Taylor series did not reach tolerance {tolerance:.1e} within {max_terms} terms; \
         use the block-diagonalization method for this system"
    )]
    TaylorNotConverged { tolerance: f64, max_terms: usize },
    #[error(
        "Taylor stepping needs more than {max_steps} substeps for this time span; \
         use the block-diagonalization method for this system"
    )]
    TaylorTooManySteps { max_steps: usize },
    #[error("taylor_tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("reachable basis exceeds the configured cap of {0} states")]
    ReachableTooLarge(usize),
    #[error("term {term_index} violates charge {charge_index}: {from:?} -> {to:?}")]
    ChargeNotConserved {
        term_index: usize,
        charge_index: usize,
        from: Occupation,
        to: Occupation,
    },
    #[error("block matrix is not Hermitian (deviation {0:.3e})")]
    NonHermitianBlock(f64),
    #[error("unknown system name `{0}`")]
    UnknownSystem(String),
}

pub type Result<T> = std::result::Result<T, FockError>;

const PRUNE_THRESHOLD: f64 = 1e-14;

/// Sparse pure state over a fixed number of bosonic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    amps: BTreeMap<Occupation, C64>,
}

impl FockState {
    pub fn vacuum(n_modes: usize) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(vec![0; n_modes], C64::new(1.0, 0.0));
        FockState { n_modes, amps }
    }

    /// Single occupation-basis state |occ⟩.
    pub fn basis(occ: Occupation) -> Self {
        let n_modes = occ.len();
        let mut amps = BTreeMap::new();
        amps.insert(occ, C64::new(1.0, 0.0));
        FockState { n_modes, amps }
    }

    /// The zero vector (not a physical state; useful as an accumulator).
    pub fn zero(n_modes: usize) -> Self {
        FockState { n_modes, amps: BTreeMap::new() }
    }

    /// Superposition from (occupation, amplitude) pairs; merges duplicates,
    /// drops exact zeros, and normalizes.
    pub fn superposition(n_modes: usize, terms: &[(Occupation, C64)]) -> Result<Self> {
        let mut amps = BTreeMap::new();
        for (occ, z) in terms {
            if occ.len() != n_modes {
                return Err(FockError::WrongModeCount(occ.len(), n_modes));
            }
            *amps.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) += z;
        }
        amps.retain(|_, z| z.norm_sqr() > 0.0);
        let s = FockState { n_modes, amps };
        s.normalized()
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitude(&self, occ: &[u32]) -> C64 {
        self.amps.get(occ).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.amps.iter()
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(FockError::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, z: C64) -> Self {
        let amps = self.amps.iter().map(|(k, v)| (k.clone(), v * z)).collect();
        FockState { n_modes: self.n_modes, amps }
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &FockState) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (occ, a) in self.amps.iter() {
            acc += a.conj() * other.amplitude(occ);
        }
        acc
    }

    pub fn add(&self, other: &FockState) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub(crate) fn add_assign(&mut self, other: &FockState) {
        for (occ, z) in other.amps.iter() {
            *self.amps.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) += z;
        }
    }

    /// Drop amplitudes below the given magnitude.
    pub fn pruned(&self, threshold: f64) -> Self {
        let amps = self
            .amps
            .iter()
            .filter(|(_, z)| z.norm() >= threshold)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        FockState { n_modes: self.n_modes, amps }
    }

    /// Probability marginal of the occupations of the listed modes.
    pub fn marginal_counts(&self, modes: &[usize]) -> BTreeMap<Vec<u32>, f64> {
        let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (occ, z) in self.amps.iter() {
            let key: Vec<u32> = modes.iter().map(|&m| occ[m]).collect();
            *out.entry(key).or_insert(0.0) += z.norm_sqr();
        }
        out
    }

    /// Expectation of an integer-weighted linear functional of occupations.
    pub fn charge_expectation(&self, weights: &[i64]) -> f64 {
        self.amps
            .iter()
            .map(|(occ, z)| {
                let q: i64 = occ
                    .iter()
                    .zip(weights)
                    .map(|(&n, &w)| n as i64 * w)
                    .sum();
                q as f64 * z.norm_sqr()
            })
            .sum()
    }
}

/// One ladder operator acting on a specific mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    Create(usize),
    Annihilate(usize),
}

impl LadderOp {
    fn dagger(self) -> Self {
        match self {
            LadderOp::Create(m) => LadderOp::Annihilate(m),
            LadderOp::Annihilate(m) => LadderOp::Create(m),
        }
    }

    fn mode(self) -> usize {
        match self {
            LadderOp::Create(m) | LadderOp::Annihilate(m) => m,
        }
    }
}

/// Monomial term: coefficient times a product of ladder operators.
/// Operators are listed in product order; the rightmost acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianTerm {
    pub coeff: C64,
    pub ops: Vec<LadderOp>,
}

impl HamiltonianTerm {
    pub fn new(coeff: C64, ops: Vec<LadderOp>) -> Self {
        HamiltonianTerm { coeff, ops }
    }

    fn hermitian_conjugate(&self) -> Self {
        HamiltonianTerm {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().rev().map(|op| op.dagger()).collect(),
        }
    }

    /// Net occupation change per mode induced by this term.
    fn charge_shift(&self, n_modes: usize) -> Vec<i64> {
        let mut shift = vec![0i64; n_modes];
        for op in &self.ops {
            match op {
                LadderOp::Create(m) => shift[*m] += 1,
                LadderOp::Annihilate(m) => shift[*m] -= 1,
            }
        }
        shift
    }
}

/// Hamiltonian as a list of monomials with optional h.c. completion and
/// optional per-mode occupation caps (`u32::MAX` = unbounded).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub n_modes: usize,
    pub terms: Vec<HamiltonianTerm>,
    pub hermitize: bool,
    pub mode_caps: Vec<u32>,
}

impl HamiltonianSpec {
    pub fn new(n_modes: usize, terms: Vec<HamiltonianTerm>, hermitize: bool) -> Result<Self> {
        for t in &terms {
            for op in &t.ops {
                if op.mode() >= n_modes {
                    return Err(FockError::ModeOutOfRange(op.mode(), n_modes));
                }
            }
        }
        Ok(HamiltonianSpec {
            n_modes,
            terms,
            hermitize,
            mode_caps: vec![u32::MAX; n_modes],
        })
    }

    pub fn with_caps(mut self, caps: Vec<u32>) -> Self {
        assert_eq!(caps.len(), self.n_modes);
        self.mode_caps = caps;
        self
    }

    /// Terms including the h.c. completion when `hermitize` is set.
    pub fn effective_terms(&self) -> Vec<HamiltonianTerm> {
        let mut all = self.terms.clone();
        if self.hermitize {
            all.extend(self.terms.iter().map(|t| t.hermitian_conjugate()));
        }
        all
    }

    /// Apply one term to a single basis state. Returns None when the
    /// amplitude vanishes (annihilated vacuum or capped creation).
    fn apply_term_to_basis(
        &self,
        term: &HamiltonianTerm,
        occ: &[u32],
    ) -> Option<(Occupation, C64)> {
        let mut occ = occ.to_vec();
        let mut amp = term.coeff;
        for op in term.ops.iter().rev() {
            match *op {
                LadderOp::Create(m) => {
                    if occ[m] + 1 > self.mode_caps[m] {
                        return None;
                    }
                    amp *= C64::new(((occ[m] + 1) as f64).sqrt(), 0.0);
                    occ[m] += 1;
                }
                LadderOp::Annihilate(m) => {
                    if occ[m] == 0 {
                        return None;
                    }
                    amp *= C64::new((occ[m] as f64).sqrt(), 0.0);
                    occ[m] -= 1;
                }
            }
        }
        Some((occ, amp))
    }
}

/// Apply the Hamiltonian once. The result is unnormalized; annihilating the
/// vacuum contributes nothing rather than erroring.
pub fn apply_hamiltonian(h: &HamiltonianSpec, s: &FockState) -> FockState {
    let mut amps: BTreeMap<Occupation, C64> = BTreeMap::new();
    for term in h.effective_terms() {
        for (occ, z) in s.iter() {
            if let Some((new_occ, factor)) = h.apply_term_to_basis(&term, occ) {
                *amps.entry(new_occ).or_insert(C64::new(0.0, 0.0)) += z * factor;
            }
        }
    }
    FockState { n_modes: s.n_modes(), amps }
}

/// How [`evolve`] integrates the Schrödinger dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolveMethod {
    /// Scaled-and-stepped Taylor expansion of exp(-iHt) with sparse pruning.
    Taylor,
    /// Exact exponentiation on the finite reachable invariant block.
    BlockDiagonalize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    /// Dimensionless evolution time; multiplies the Hamiltonian as given, so
    /// with unit-coupling builders it is the product of coupling and time.
    pub gamma_t: f64,
    pub method: EvolveMethod,
    pub taylor_tolerance: f64,
    /// Resource guard for the reachable-basis closure.
    pub max_basis_dim: usize,
}

impl EvolutionParams {
    pub fn taylor(gamma_t: f64) -> Self {
        EvolutionParams {
            gamma_t,
            method: EvolveMethod::Taylor,
            taylor_tolerance: 1e-12,
            max_basis_dim: 200_000,
        }
    }

    pub fn block(gamma_t: f64) -> Self {
        EvolutionParams {
            gamma_t,
            method: EvolveMethod::BlockDiagonalize,
            taylor_tolerance: 1e-12,
            max_basis_dim: 200_000,
        }
    }
}

/// Evolve `s` under exp(-i H gamma_t).
pub fn evolve(h: &HamiltonianSpec, s: &FockState, p: &EvolutionParams) -> Result<FockState> {
    match p.method {
        EvolveMethod::Taylor => evolve_taylor(h, s, p),
        EvolveMethod::BlockDiagonalize => {
            let charges = ChargeSpec::none();
            let blocks = block_decompose_capped(h, s, &charges, p.max_basis_dim)?;
            Ok(evolve_in_blocks(&blocks, s, p.gamma_t))
        }
    }
}

fn evolve_taylor(h: &HamiltonianSpec, s: &FockState, p: &EvolutionParams) -> Result<FockState> {
    const MAX_TERMS: usize = 200;
    const MAX_SUBSTEPS: usize = 50_000;
    if p.taylor_tolerance <= 0.0 {
        return Err(FockError::BadTolerance(p.taylor_tolerance));
    }
    let mut state = s.clone();
    let mut remaining = p.gamma_t.abs();
    let sign = p.gamma_t.signum();
    let mut steps = 0usize;
    while remaining > 1e-15 {
        steps += 1;
        if steps > MAX_SUBSTEPS {
            return Err(FockError::TaylorTooManySteps { max_steps: MAX_SUBSTEPS });
        }
        // Keep the local expansion parameter ||H psi|| * dt modest so the
        // series converges in a few dozen terms even while stimulated
        // emission inflates the matrix elements.
        let h_psi = apply_hamiltonian(h, &state);
        let scale = h_psi.norm().max(1e-9);
        let dt = remaining.min(0.35 / scale);
        let mut acc = state.clone();
        let mut krylov = h_psi.scaled(C64::new(0.0, -sign * dt));
        acc.add_assign(&krylov);
        let mut converged = krylov.norm() < p.taylor_tolerance;
        for k in 2..=MAX_TERMS {
            if converged {
                break;
            }
            krylov = apply_hamiltonian(h, &krylov)
                .scaled(C64::new(0.0, -sign * dt / k as f64))
                .pruned(PRUNE_THRESHOLD);
            acc.add_assign(&krylov);
            if krylov.norm() < p.taylor_tolerance {
                converged = true;
            }
        }
        if !converged {
            return Err(FockError::TaylorNotConverged {
                tolerance: p.taylor_tolerance,
                max_terms: MAX_TERMS,
            });
        }
        state = acc.pruned(PRUNE_THRESHOLD);
        remaining -= dt;
    }
    Ok(state)
}

/// Integer-weighted linear functionals of the occupations that the dynamics
/// is expected to conserve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChargeSpec {
    pub weights: Vec<Vec<i64>>,
}

impl ChargeSpec {
    pub fn new(weights: Vec<Vec<i64>>) -> Self {
        ChargeSpec { weights }
    }

    pub fn none() -> Self {
        ChargeSpec { weights: Vec::new() }
    }

    pub fn values(&self, occ: &[u32]) -> Vec<i64> {
        self.weights
            .iter()
            .map(|w| occ.iter().zip(w).map(|(&n, &c)| n as i64 * c).sum())
            .collect()
    }
}

/// One invariant block: charge values, ordered sub-basis, dense sub-matrix.
#[derive(Debug, Clone)]
pub struct Block {
    pub charges: Vec<i64>,
    pub basis: Vec<Occupation>,
    pub matrix: DMatrix<C64>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Components of a state on this block's basis.
    pub fn project(&self, s: &FockState) -> DVector<C64> {
        DVector::from_fn(self.dim(), |i, _| s.amplitude(&self.basis[i]))
    }

    /// Exact propagator on the block via Hermitian eigendecomposition.
    pub fn propagator(&self) -> BlockPropagator {
        let eig = self.matrix.clone().symmetric_eigen();
        BlockPropagator {
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        }
    }
}

/// Cached eigendecomposition of one block, reusable across times and
/// initial vectors.
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl BlockPropagator {
    /// exp(-i H t) v.
    pub fn evolve(&self, v: &DVector<C64>, t: f64) -> DVector<C64> {
        let coeffs = self.eigenvectors.adjoint() * v;
        let phased = DVector::from_fn(coeffs.len(), |i, _| {
            coeffs[i] * C64::from_polar(1.0, -self.eigenvalues[i] * t)
        });
        &self.eigenvectors * phased
    }
}

/// Close the reachable set from the support of `s` under the Hamiltonian and
/// split it into blocks of equal charge values, verifying that every term
/// conserves every charge along the way.
pub fn block_decompose(
    h: &HamiltonianSpec,
    s: &FockState,
    charges: &ChargeSpec,
) -> Result<Vec<Block>> {
    block_decompose_capped(h, s, charges, 200_000)
}

pub fn block_decompose_capped(
    h: &HamiltonianSpec,
    s: &FockState,
    charges: &ChargeSpec,
    max_dim: usize,
) -> Result<Vec<Block>> {
    let terms = h.effective_terms();
    // Static consistency check: each term must leave every charge unchanged.
    for (ti, term) in terms.iter().enumerate() {
        let shift = term.charge_shift(h.n_modes);
        for (ci, w) in charges.weights.iter().enumerate() {
            let delta: i64 = shift.iter().zip(w).map(|(&d, &c)| d * c).sum();
            if delta != 0 {
                // Report with a concrete violating transition when one exists.
                for (occ, _) in s.iter() {
                    if let Some((to, _)) = h.apply_term_to_basis(term, occ) {
                        return Err(FockError::ChargeNotConserved {
                            term_index: ti % h.terms.len(),
                            charge_index: ci,
                            from: occ.clone(),
                            to,
                        });
                    }
                }
                return Err(FockError::ChargeNotConserved {
                    term_index: ti % h.terms.len(),
                    charge_index: ci,
                    from: vec![0; h.n_modes],
                    to: vec![0; h.n_modes],
                });
            }
        }
    }

    // Breadth-first closure of the support.
    let mut seen: BTreeMap<Occupation, ()> = BTreeMap::new();
    let mut frontier: Vec<Occupation> = Vec::new();
    for (occ, _) in s.iter() {
        if seen.insert(occ.clone(), ()).is_none() {
            frontier.push(occ.clone());
        }
    }
    while let Some(occ) = frontier.pop() {
        for term in &terms {
            if let Some((new_occ, _)) = h.apply_term_to_basis(term, &occ) {
                if seen.insert(new_occ.clone(), ()).is_none() {
                    if seen.len() > max_dim {
                        return Err(FockError::ReachableTooLarge(max_dim));
                    }
                    frontier.push(new_occ);
                }
            }
        }
    }

    // Group by charge values.
    let mut groups: BTreeMap<Vec<i64>, Vec<Occupation>> = BTreeMap::new();
    for (occ, _) in seen.iter() {
        groups.entry(charges.values(occ)).or_default().push(occ.clone());
    }

    let mut blocks = Vec::new();
    for (charge_values, basis) in groups {
        let index: BTreeMap<Occupation, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, occ)| (occ.clone(), i))
            .collect();
        let dim = basis.len();
        let mut matrix = DMatrix::zeros(dim, dim);
        for (j, occ) in basis.iter().enumerate() {
            for term in &terms {
                if let Some((new_occ, amp)) = h.apply_term_to_basis(term, occ) {
                    if let Some(&i) = index.get(&new_occ) {
                        matrix[(i, j)] += amp;
                    }
                }
            }
        }
        let herm_dev = (&matrix - matrix.adjoint()).norm();
        if herm_dev > 1e-12 * (1.0 + matrix.norm()) {
            return Err(FockError::NonHermitianBlock(herm_dev));
        }
        blocks.push(Block { charges: charge_values, basis, matrix });
    }
    Ok(blocks)
}

/// Evolve a state through precomputed blocks; components outside the block
/// bases are dropped (they must be zero for a valid decomposition).
pub fn evolve_in_blocks(blocks: &[Block], s: &FockState, t: f64) -> FockState {
    let mut amps: BTreeMap<Occupation, C64> = BTreeMap::new();
    for block in blocks {
        let v = block.project(s);
        if v.norm() < 1e-300 {
            continue;
        }
        let evolved = block.propagator().evolve(&v, t);
        for (i, occ) in block.basis.iter().enumerate() {
            if evolved[i].norm() > 0.0 {
                *amps.entry(occ.clone()).or_insert(C64::new(0.0, 0.0)) += evolved[i];
            }
        }
    }
    FockState { n_modes: s.n_modes(), amps }
}

/// Re-express two modes in a rotated single-photon basis.
///
/// `v` gives the old creation operators in terms of the new ones:
/// a_i† = v[0][0] b_i† + v[0][1] b_j† and a_j† = v[1][0] b_i† + v[1][1] b_j†.
/// `v` must be unitary for the result to stay normalized.
pub fn rotate_two_modes(s: &FockState, i: usize, j: usize, v: [[C64; 2]; 2]) -> FockState {
    let mut amps: BTreeMap<Occupation, C64> = BTreeMap::new();
    let fact = |n: u32| -> f64 { (1..=n).map(|x| x as f64).product::<f64>().max(1.0) };
    for (occ, z) in s.iter() {
        let (ni, nj) = (occ[i], occ[j]);
        for p in 0..=ni {
            for q in 0..=nj {
                let a_new = p + q;
                let b_new = ni + nj - p - q;
                let coeff = crate::math::binomial(ni as u64, p as u64)
                    * crate::math::binomial(nj as u64, q as u64);
                let amp = z
                    * v[0][0].powu(p)
                    * v[0][1].powu(ni - p)
                    * v[1][0].powu(q)
                    * v[1][1].powu(nj - q)
                    * C64::new(
                        coeff * (fact(a_new) * fact(b_new) / (fact(ni) * fact(nj))).sqrt(),
                        0.0,
                    );
                let mut new_occ = occ.clone();
                new_occ[i] = a_new;
                new_occ[j] = b_new;
                *amps.entry(new_occ).or_insert(C64::new(0.0, 0.0)) += amp;
            }
        }
    }
    FockState { n_modes: s.n_modes(), amps }
        .pruned(0.0)
}

/// Mode layout of the collective three-level-atom cloner (five oscillators).
pub mod lambda_modes {
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    pub const B1: usize = 2;
    pub const B2: usize = 3;
    pub const C: usize = 4;
}

/// Collective inverted-medium Hamiltonian gamma (a1 b2 - a2 b1) c† + h.c.
/// on the five modes of [`lambda_modes`].
pub fn lambda_schwinger(gamma: f64) -> HamiltonianSpec {
    use lambda_modes::*;
    use LadderOp::*;
    HamiltonianSpec::new(
        5,
        vec![
            HamiltonianTerm::new(C64::new(gamma, 0.0), vec![Annihilate(A1), Annihilate(B2), Create(C)]),
            HamiltonianTerm::new(C64::new(-gamma, 0.0), vec![Annihilate(A2), Annihilate(B1), Create(C)]),
        ],
        true,
    )
    .expect("static mode indices are valid")
}

/// Conserved charges of [`lambda_schwinger`]: n_a1 - n_b2, n_a2 - n_b1, and
/// n_c + n_b1 + n_b2.
pub fn lambda_charges() -> ChargeSpec {
    ChargeSpec::new(vec![
        vec![1, 0, 0, -1, 0],
        vec![0, 1, -1, 0, 0],
        vec![0, 0, 1, 1, 1],
    ])
}

/// Mode layout of atom ensembles encoded atom-by-atom: two photon modes,
/// then a hard-core triple per atom.
pub mod atom_modes {
    pub const A1: usize = 0;
    pub const A2: usize = 1;
    /// First mode of atom k's triple.
    pub fn atom_base(k: usize) -> usize {
        2 + 3 * k
    }
}

/// V-configuration atoms: ground level g coupled to upper levels e1/e2 by
/// photon creation into modes a1/a2. Atom k occupies hard-core modes
/// (g, e1, e2) = (base, base+1, base+2) with exactly one excitation.
pub fn vatom(gamma: f64, n_atoms: usize) -> HamiltonianSpec {
    use atom_modes::*;
    use LadderOp::*;
    let n_modes = 2 + 3 * n_atoms;
    let mut terms = Vec::new();
    for k in 0..n_atoms {
        let g = atom_base(k);
        let (e1, e2) = (g + 1, g + 2);
        terms.push(HamiltonianTerm::new(
            C64::new(gamma, 0.0),
            vec![Create(A1), Create(g), Annihilate(e1)],
        ));
        terms.push(HamiltonianTerm::new(
            C64::new(gamma, 0.0),
            vec![Create(A2), Create(g), Annihilate(e2)],
        ));
    }
    let mut caps = vec![u32::MAX; n_modes];
    for c in caps.iter_mut().skip(2) {
        *c = 1;
    }
    HamiltonianSpec::new(n_modes, terms, true)
        .expect("static mode indices are valid")
        .with_caps(caps)
}

/// Conserved charges of [`vatom`]: N1 = n_a1 + (number of e1 atoms) and
/// N2 = n_a2 + (number of e2 atoms).
pub fn vatom_charges(n_atoms: usize) -> ChargeSpec {
    let n_modes = 2 + 3 * n_atoms;
    let mut w1 = vec![0i64; n_modes];
    let mut w2 = vec![0i64; n_modes];
    w1[0] = 1;
    w2[1] = 1;
    for k in 0..n_atoms {
        let g = atom_modes::atom_base(k);
        w1[g + 1] = 1;
        w2[g + 2] = 1;
    }
    ChargeSpec::new(vec![w1, w2])
}

/// Three-level atoms in the direct per-atom encoding, gamma (a1 |e><g1| +
/// a2 |e><g2|) + h.c.; atom k occupies hard-core modes (g1, g2, e).
/// Used as a small-N oracle against the collective form.
pub fn lambda_direct(gamma: f64, n_atoms: usize) -> HamiltonianSpec {
    use atom_modes::*;
    use LadderOp::*;
    let n_modes = 2 + 3 * n_atoms;
    let mut terms = Vec::new();
    for k in 0..n_atoms {
        let g1 = atom_base(k);
        let (g2, e) = (g1 + 1, g1 + 2);
        terms.push(HamiltonianTerm::new(
            C64::new(gamma, 0.0),
            vec![Annihilate(A1), Create(e), Annihilate(g1)],
        ));
        terms.push(HamiltonianTerm::new(
            C64::new(gamma, 0.0),
            vec![Annihilate(A2), Create(e), Annihilate(g2)],
        ));
    }
    let mut caps = vec![u32::MAX; n_modes];
    for c in caps.iter_mut().skip(2) {
        *c = 1;
    }
    HamiltonianSpec::new(n_modes, terms, true)
        .expect("static mode indices are valid")
        .with_caps(caps)
}

/// Mode layout of the pair-production source in the classical-pump limit.
pub mod pdc_modes {
    pub const V1: usize = 0;
    pub const H1: usize = 1;
    pub const V2: usize = 2;
    pub const H2: usize = 3;
}

/// Pair-production Hamiltonian gamma (a†_V1 a†_H2 - a†_H1 a†_V2) + h.c. on
/// the four modes of [`pdc_modes`].
pub fn pdc_classical_pump(gamma: f64) -> HamiltonianSpec {
    use pdc_modes::*;
    use LadderOp::*;
    HamiltonianSpec::new(
        4,
        vec![
            HamiltonianTerm::new(C64::new(gamma, 0.0), vec![Create(V1), Create(H2)]),
            HamiltonianTerm::new(C64::new(-gamma, 0.0), vec![Create(H1), Create(V2)]),
        ],
        true,
    )
    .expect("static mode indices are valid")
}

/// Conserved charges of [`pdc_classical_pump`]: n_V1 - n_H2 and n_H1 - n_V2.
pub fn pdc_charges() -> ChargeSpec {
    ChargeSpec::new(vec![vec![1, 0, 0, -1], vec![0, 1, -1, 0]])
}

/// String-keyed access to the named systems.
pub fn named_hamiltonian(name: &str, gamma: f64, atoms: usize) -> Result<HamiltonianSpec> {
    match name {
        "lambda_schwinger" => Ok(lambda_schwinger(gamma)),
        "vatom" => Ok(vatom(gamma, atoms)),
        "pdc_classical_pump" => Ok(pdc_classical_pump(gamma)),
        "lambda_direct" => Ok(lambda_direct(gamma, atoms)),
        other => Err(FockError::UnknownSystem(other.to_string())),
    }
}
