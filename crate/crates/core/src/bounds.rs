//! Cloning bounds from linearity and positivity alone: the covariant 1→2
//! optimization, the general 1→N angular-momentum linear program, remote
//! preparation of arbitrary mixtures through the purifying system, and the
//! mixture-indistinguishability harness that separates completely positive
//! maps from nonlinear ones.

use crate::linprog::{self, Constraint};
use crate::math::binomial_exact;
use crate::qubit::{self, DensityMatrix, Ket, QubitError};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("j (as 2j={0}) has the wrong parity or range for N={1}")]
    BadAngularMomentum(usize, usize),
    #[error("need N >= 1")]
    BadCloneNumber,
    #[error("linear program failed: {0}")]
    Lp(#[from] linprog::LpError),
    #[error("target mixture deviates from the state by trace distance {0:.3e}")]
    MixtureInconsistent(f64),
    #[error("decompositions describe different states (trace distance {0:.3e})")]
    DecompositionMismatch(f64),
    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error(transparent)]
    State(#[from] QubitError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

// ---------------------------------------------------------------------------
// covariant 1 -> 2 bound
// ---------------------------------------------------------------------------

/// Parameters of the covariant permutation-symmetric two-qubit output
/// rho(m) = (1/4)(1 + eta1 m·sigma ⊗ 1 + eta2 1 ⊗ m·sigma + t sigma·sigma
/// + t_xy m·(sigma × sigma)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariantTwoQubitParams {
    pub eta1: f64,
    pub eta2: f64,
    pub t: f64,
    pub t_xy: f64,
}

impl CovariantTwoQubitParams {
    /// Positivity of the output state in closed form.
    pub fn is_feasible(&self) -> bool {
        let sum = self.eta1 + self.eta2;
        let diff = self.eta1 - self.eta2;
        1.0 + self.t - sum.abs() >= -1e-15
            && 1.0 - self.t
                >= (4.0 * self.t * self.t + 4.0 * self.t_xy * self.t_xy + diff * diff).sqrt()
                    - 1e-15
    }

    /// The two-qubit output matrix for the input Bloch vector along z.
    pub fn density_along_z(&self) -> DMatrix<C64> {
        let i2 = qubit::identity(2);
        let (sx, sy, sz) = (qubit::pauli_x(), qubit::pauli_y(), qubit::pauli_z());
        let mut m = i2.kronecker(&i2);
        m += sz.kronecker(&i2) * C64::new(self.eta1, 0.0);
        m += i2.kronecker(&sz) * C64::new(self.eta2, 0.0);
        let dot = sx.kronecker(&sx) + sy.kronecker(&sy) + sz.kronecker(&sz);
        m += dot * C64::new(self.t, 0.0);
        let cross = sx.kronecker(&sy) - sy.kronecker(&sx);
        m += cross * C64::new(self.t_xy, 0.0);
        m * C64::new(0.25, 0.0)
    }
}

/// Result of the covariant 1→2 optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneToTwoBound {
    pub params: CovariantTwoQubitParams,
    pub fidelity: f64,
    /// Tr(rho P_m ⊗ P_m) at the optimum.
    pub joint_projection: f64,
}

/// Maximize the symmetric-clone fidelity F = (1 + eta)/2 over the positive
/// covariant outputs: coarse grid, then coordinate bisection to 1e-9.
pub fn optimize_1to2() -> OneToTwoBound {
    let feasible = |eta: f64, t: f64, t_xy: f64| {
        CovariantTwoQubitParams { eta1: eta, eta2: eta, t, t_xy }.is_feasible()
    };

    // Coarse scan.
    let mut best = (0.0f64, 0.0f64, 0.0f64); // (eta, t, t_xy)
    for it in -100..=100 {
        let t = it as f64 * 0.01;
        for ie in 0..=100 {
            let eta = ie as f64 * 0.01;
            if eta > best.0 && feasible(eta, t, 0.0) {
                best = (eta, t, 0.0);
            }
        }
    }

    // Coordinate refinement: push t to its feasibility edge, then eta.
    let (mut eta, mut t, mut t_xy) = best;
    for _ in 0..60 {
        if feasible(eta, t, 0.0) {
            t_xy = 0.0;
        }
        // largest feasible t given eta, t_xy
        let mut lo = t;
        let mut hi = 1.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if feasible(eta, mid, t_xy) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        t = lo;
        // largest feasible eta given t, t_xy
        let mut lo = eta;
        let mut hi = 1.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if feasible(mid, t, t_xy) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if (lo - eta).abs() < 1e-12 {
            eta = lo;
            break;
        }
        eta = lo;
    }

    let params = CovariantTwoQubitParams { eta1: eta, eta2: eta, t, t_xy };
    OneToTwoBound {
        params,
        fidelity: (1.0 + eta) / 2.0,
        joint_projection: (1.0 + 2.0 * eta + t) / 4.0,
    }
}

// ---------------------------------------------------------------------------
// general 1 -> N bound
// ---------------------------------------------------------------------------

/// Number of irreducible representations with total angular momentum j
/// (passed as 2j) in the N-fold product of qubits:
/// d_j = C(N, N/2 - j) - C(N, N/2 - j - 1).
pub fn multiplicity(n: usize, twoj: usize) -> Result<u64> {
    if n < 1 {
        return Err(BoundsError::BadCloneNumber);
    }
    if twoj > n || twoj % 2 != n % 2 {
        return Err(BoundsError::BadAngularMomentum(twoj, n));
    }
    let k = (n - twoj) / 2;
    let a = binomial_exact(n as u64, k as u64);
    let b = if k == 0 { 0 } else { binomial_exact(n as u64, k as u64 - 1) };
    Ok((a - b) as u64)
}

/// The 2j values appearing for N qubits, ascending.
pub fn twoj_values(n: usize) -> Vec<usize> {
    (0..=n).filter(|tj| tj % 2 == n % 2).collect()
}

/// Variables of the 1→N optimization at its solution: one (A_j, B_j) pair
/// per angular momentum sector.
#[derive(Debug, Clone)]
pub struct BoundProblem {
    pub n: usize,
    pub twoj: Vec<usize>,
    pub d: Vec<u64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Closed-form optimum of the scaling factor, 1/3 + 2/(3N).
pub fn bound_1ton_closed_form(n: usize) -> f64 {
    1.0 / 3.0 + 2.0 / (3.0 * n as f64)
}

/// Maximize the clone scaling factor s = (2/3N) sum_j A_j j(j+1) subject to
/// sum_j B_j = 1 and B_j + m A_j >= 0 for every eigenvalue pair (j, m),
/// through the generic simplex. For even N the variable A_0 multiplies only
/// m = 0 and is dropped; lambda(0,0) reduces to B_0 >= 0.
pub fn bound_1ton(n: usize) -> Result<(f64, BoundProblem)> {
    if n < 1 {
        return Err(BoundsError::BadCloneNumber);
    }
    let twoj = twoj_values(n);
    let n_b = twoj.len();
    // Variable layout: B_j | A_j+ | A_j- (free A split), A only for 2j > 0.
    let a_sectors: Vec<usize> = twoj.iter().copied().filter(|&tj| tj > 0).collect();
    let n_a = a_sectors.len();
    let n_vars = n_b + 2 * n_a;

    let jj = |tj: usize| tj as f64 * (tj as f64 + 2.0) / 4.0; // j(j+1)

    let mut objective = vec![0.0; n_vars];
    for (ai, &tj) in a_sectors.iter().enumerate() {
        let w = 2.0 / (3.0 * n as f64) * jj(tj);
        objective[n_b + 2 * ai] = w;
        objective[n_b + 2 * ai + 1] = -w;
    }

    let mut constraints = Vec::new();
    // normalization
    let mut norm_row = vec![0.0; n_vars];
    for bi in 0..n_b {
        norm_row[bi] = 1.0;
    }
    constraints.push(Constraint::Eq(norm_row, 1.0));
    // positivity of every eigenvalue lambda(j, m) = B_j + m A_j
    for (bi, &tj) in twoj.iter().enumerate() {
        let mut twom = -(tj as i64);
        while twom <= tj as i64 {
            let m = twom as f64 / 2.0;
            let mut row = vec![0.0; n_vars];
            row[bi] = 1.0;
            if let Some(ai) = a_sectors.iter().position(|&x| x == tj) {
                row[n_b + 2 * ai] = m;
                row[n_b + 2 * ai + 1] = -m;
            }
            constraints.push(Constraint::GreaterEq(row, 0.0));
            twom += 2;
        }
    }

    let sol = linprog::maximize(&objective, &constraints)?;

    let mut d = Vec::with_capacity(n_b);
    for &tj in &twoj {
        d.push(multiplicity(n, tj)?);
    }
    let mut a = vec![0.0; n_b];
    let mut b = vec![0.0; n_b];
    for bi in 0..n_b {
        b[bi] = sol.x[bi];
    }
    for (ai, &tj) in a_sectors.iter().enumerate() {
        let bi = twoj.iter().position(|&x| x == tj).unwrap();
        a[bi] = sol.x[n_b + 2 * ai] - sol.x[n_b + 2 * ai + 1];
    }
    Ok((sol.objective, BoundProblem { n, twoj, d, a, b }))
}

/// Total angular momentum operators on the 2^N qubit space.
pub fn collective_spin_ops(n: usize) -> (DMatrix<C64>, DMatrix<C64>) {
    let dim = 1usize << n;
    let half = C64::new(0.5, 0.0);
    let mut jx = DMatrix::zeros(dim, dim);
    let mut jy = DMatrix::zeros(dim, dim);
    let mut jz = DMatrix::zeros(dim, dim);
    for k in 0..n {
        let mut ox = DMatrix::identity(1, 1);
        let mut oy = DMatrix::identity(1, 1);
        let mut oz = DMatrix::identity(1, 1);
        for q in 0..n {
            let (x, y, z) = if q == k {
                (qubit::pauli_x(), qubit::pauli_y(), qubit::pauli_z())
            } else {
                (qubit::identity(2), qubit::identity(2), qubit::identity(2))
            };
            ox = ox.kronecker(&x);
            oy = oy.kronecker(&y);
            oz = oz.kronecker(&z);
        }
        jx += ox * half;
        jy += oy * half;
        jz += oz * half;
    }
    let j2 = &jx * &jx + &jy * &jy + &jz * &jz;
    (jz, j2)
}

// ---------------------------------------------------------------------------
// remote preparation
// ---------------------------------------------------------------------------

/// A remote-preparation instance: the local state, its purification data,
/// and the pure-state mixture to prepare by measuring the purifier.
#[derive(Debug, Clone)]
pub struct RemotePrepProblem {
    pub rho: DensityMatrix,
    /// (lambda_k, |v_k>, |g_k>) with |g_k> the purifier basis.
    pub schmidt: Vec<(f64, Ket, Ket)>,
    pub target: Vec<(f64, Ket)>,
}

impl RemotePrepProblem {
    /// Validates that the target mixture reconstructs `rho` within 1e-10.
    pub fn new(rho: DensityMatrix, target: Vec<(f64, Ket)>) -> Result<Self> {
        let dim = rho.dim();
        let mut mix = DMatrix::zeros(dim, dim);
        for (x, psi) in &target {
            mix += psi.density().matrix() * C64::new(*x, 0.0);
        }
        let mix = DensityMatrix::new(mix)?;
        let dist = mix.trace_distance(&rho);
        if dist > 1e-10 {
            return Err(BoundsError::MixtureInconsistent(dist));
        }
        let eig = rho.matrix().clone().symmetric_eigen();
        let mut schmidt = Vec::new();
        let mut kept: Vec<(f64, usize)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 1e-12)
            .map(|(k, &l)| (l, k))
            .collect();
        kept.sort_by(|a, b| b.0.total_cmp(&a.0));
        let rank = kept.len();
        for (slot, (lambda, k)) in kept.into_iter().enumerate() {
            let v = Ket::from_vector(eig.eigenvectors.column(k).into_owned())?;
            schmidt.push((lambda, v, Ket::basis(rank, slot)));
        }
        Ok(RemotePrepProblem { rho, schmidt, target })
    }

    pub fn rank(&self) -> usize {
        self.schmidt.len()
    }

    /// The purification sum_k sqrt(lambda_k) |v_k>|g_k> over system ⊗
    /// purifier.
    pub fn purification(&self) -> Ket {
        let r = self.rank();
        let dim = self.rho.dim();
        let mut v = DVector::zeros(dim * r);
        for (lambda, sys, pur) in &self.schmidt {
            let scaled = sys.amplitudes() * C64::new(lambda.sqrt(), 0.0);
            for i in 0..dim {
                for k in 0..r {
                    v[i * r + k] += scaled[i] * pur.amplitude(k);
                }
            }
        }
        Ket::from_vector(v).expect("purification of a unit-trace state")
    }
}

/// Rank-one POVM on the purifier's support.
#[derive(Debug, Clone)]
pub struct Povm {
    pub effects: Vec<DMatrix<C64>>,
}

impl Povm {
    pub fn dim(&self) -> usize {
        self.effects.first().map_or(0, |e| e.nrows())
    }

    /// Deviation of sum_i E_i from the identity.
    pub fn completeness_error(&self) -> f64 {
        let d = self.dim();
        let mut total = DMatrix::zeros(d, d);
        for e in &self.effects {
            total += e;
        }
        (total - qubit::identity(d)).norm()
    }
}

/// Build the measurement on the purifier whose outcome i leaves the system
/// in x_i |psi_i><psi_i|: effects |a_i><a_i| with
/// <g_k|a_i> = sqrt(x_i) conj(<v_k|psi_i>) / sqrt(lambda_k).
pub fn remote_prepare(p: &RemotePrepProblem) -> Result<Povm> {
    let r = p.rank();
    let mut effects = Vec::with_capacity(p.target.len());
    for (x, psi) in &p.target {
        let mut a = DVector::zeros(r);
        for (k, (lambda, v, _)) in p.schmidt.iter().enumerate() {
            let c = v.inner(psi); // <v_k|psi>
            a[k] = C64::new((x / lambda).sqrt(), 0.0) * c.conj();
        }
        effects.push(&a * a.adjoint());
    }
    let povm = Povm { effects };
    let err = povm.completeness_error();
    if err > 1e-10 {
        return Err(BoundsError::MixtureInconsistent(err));
    }
    Ok(povm)
}

/// State of the system after outcome i, unnormalized:
/// Tr_B[(1 ⊗ E_i) |phi><phi|].
pub fn heralded_state(p: &RemotePrepProblem, effect: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = p.rho.dim();
    let r = p.rank();
    let phi = p.purification();
    let proj = phi.amplitudes() * phi.amplitudes().adjoint();
    let big = qubit::identity(dim).kronecker(effect);
    let prod = big * proj;
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..r {
                acc += prod[(i * r + k, j * r + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// mixtures under CP and nonlinear maps
// ---------------------------------------------------------------------------

/// Completely positive trace-preserving map in Kraus form.
#[derive(Debug, Clone)]
pub struct CpMap {
    kraus: Vec<DMatrix<C64>>,
}

impl CpMap {
    pub fn new(kraus: Vec<DMatrix<C64>>) -> Result<Self> {
        let d = kraus.first().map_or(0, |k| k.ncols());
        let mut total = DMatrix::zeros(d, d);
        for k in &kraus {
            total += k.adjoint() * k;
        }
        let dev = (total - qubit::identity(d)).norm();
        if dev > 1e-10 {
            return Err(BoundsError::NotTracePreserving(dev));
        }
        Ok(CpMap { kraus })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let d = rho.dim();
        let mut out = DMatrix::zeros(d, d);
        for k in &self.kraus {
            out += k * rho.matrix() * k.adjoint();
        }
        DensityMatrix::new(out).expect("CP map preserves states")
    }
}

/// Statistical mixture of (possibly mixed) branch states.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub branches: Vec<(f64, DensityMatrix)>,
}

impl Decomposition {
    pub fn from_pure(branches: &[(f64, Ket)]) -> Self {
        Decomposition {
            branches: branches.iter().map(|(w, k)| (*w, k.density())).collect(),
        }
    }

    pub fn total(&self) -> DensityMatrix {
        let d = self.branches[0].1.dim();
        let mut m = DMatrix::zeros(d, d);
        for (w, rho) in &self.branches {
            m += rho.matrix() * C64::new(*w, 0.0);
        }
        DensityMatrix::new(m).expect("convex mixture of states")
    }
}

/// The reference nonlinear map rho -> rho^2 / Tr(rho^2): purity sharpening.
/// It fixes pure states but amplifies the Bloch vector of mixed ones, so
/// branchwise application distinguishes decompositions of the same state.
pub fn purity_sharpening(rho: &DensityMatrix) -> DensityMatrix {
    let sq = rho.matrix() * rho.matrix();
    let tr = sq.trace();
    DensityMatrix::new(sq / tr).expect("normalized square of a state")
}

/// Projective measurements in the three Pauli bases (for qubits).
pub fn pauli_measurements() -> Vec<Vec<DMatrix<C64>>> {
    let half = C64::new(0.5, 0.0);
    let i2 = qubit::identity(2);
    [qubit::pauli_z(), qubit::pauli_x(), qubit::pauli_y()]
        .into_iter()
        .map(|s| {
            vec![
                (&i2 + &s) * half,
                (&i2 - &s) * half,
            ]
        })
        .collect()
}

/// Largest difference in any outcome probability, over the measurement set,
/// between the two decompositions after mapping each branch through `map`.
///
/// Linear maps give zero by construction; the nonlinear reference map does
/// not.
pub fn mixture_gap<F>(
    map: F,
    decomp_a: &Decomposition,
    decomp_b: &Decomposition,
    measurements: &[Vec<DMatrix<C64>>],
) -> Result<f64>
where
    F: Fn(&DensityMatrix) -> DensityMatrix,
{
    let dist = decomp_a.total().trace_distance(&decomp_b.total());
    if dist > 1e-10 {
        return Err(BoundsError::DecompositionMismatch(dist));
    }
    let mapped = |d: &Decomposition| -> DMatrix<C64> {
        let dim = d.branches[0].1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (w, rho) in &d.branches {
            m += map(rho).matrix() * C64::new(*w, 0.0);
        }
        m
    };
    let ma = mapped(decomp_a);
    let mb = mapped(decomp_b);
    let mut gap: f64 = 0.0;
    for basis in measurements {
        for effect in basis {
            let pa = (effect * &ma).trace().re;
            let pb = (effect * &mb).trace().re;
            gap = gap.max((pa - pb).abs());
        }
    }
    Ok(gap)
}

/// The witness pair for the nonlinear reference map: two decompositions of
/// the maximally mixed qubit, one balanced in the x basis, one unbalanced
/// along z with a mixed branch. Pure branches are fixed points of the map,
/// so the unbalanced mixed branch is what creates the visible gap.
pub fn witness_decompositions() -> (Decomposition, Decomposition) {
    let third = 1.0 / 3.0;
    let down_half = qubit::BlochVector { x: 0.0, y: 0.0, z: -0.5 }
        .density()
        .expect("valid Bloch vector");
    let a = Decomposition {
        branches: vec![
            (third, Ket::basis(2, 0).density()),
            (2.0 * third, down_half),
        ],
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = Ket::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
    let minus = Ket::new(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]).unwrap();
    let b = Decomposition::from_pure(&[(0.5, plus), (0.5, minus)]);
    (a, b)
}
