//! Finite-dimensional state/operator algebra: kets, density matrices, tensor
//! products, partial traces, fidelities, and symmetric-subspace projectors.
//!
//! Multi-qubit registers use big-endian ordering throughout the crate: the
//! first subsystem is the most significant index. All values are immutable;
//! every operation returns a new value.

use crate::math::binomial;
use crate::C64;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Hermiticity / trace tolerance for density-matrix validation.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue positivity tolerance; matrices here are at most a few hundred
/// dimensional, so this absorbs all floating-point drift.
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QubitError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("state vector has zero norm")]
    ZeroNorm,
    #[error("dimension must be positive")]
    EmptyState,
    #[error("subsystem dims {dims:?} do not factor dimension {dim}")]
    BadFactorization { dims: Vec<usize>, dim: usize },
    #[error("subsystem index {0} out of range")]
    SubsystemOutOfRange(usize),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0:?}, expected 1")]
    BadTrace(C64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
}

pub type Result<T> = std::result::Result<T, QubitError>;

/// Pure state of a d-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: DVector<C64>,
}

impl Ket {
    /// Build a ket from amplitudes and normalize it.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amps))
    }

    pub fn from_vector(v: DVector<C64>) -> Result<Self> {
        if v.is_empty() {
            return Err(QubitError::EmptyState);
        }
        let n = v.norm();
        if n < 1e-300 {
            return Err(QubitError::ZeroNorm);
        }
        Ok(Ket { amps: v / C64::new(n, 0.0) })
    }

    /// Computational basis state |k⟩ in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut v = DVector::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        Ket { amps: v }
    }

    /// Qubit state alpha|0⟩ + beta|1⟩.
    pub fn qubit(alpha: C64, beta: C64) -> Result<Self> {
        Self::new(vec![alpha, beta])
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, i: usize) -> C64 {
        self.amps[i]
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Kronecker product; `self` is the most significant factor.
    pub fn tensor(&self, other: &Ket) -> Ket {
        Ket { amps: self.amps.kronecker(&other.amps) }
    }

    /// Multiply by a global phase (or any unit-modulus scalar).
    pub fn phase_mul(&self, z: C64) -> Ket {
        Ket { amps: self.amps.clone() * z }
    }

    /// Projector |ψ⟩⟨ψ| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let m = &self.amps * self.amps.adjoint();
        DensityMatrix { mat: m }
    }

    /// ⟨ψ|A|ψ⟩ for a Hermitian operator A; the imaginary part is discarded.
    pub fn expectation(&self, op: &DMatrix<C64>) -> f64 {
        (self.amps.adjoint() * op * &self.amps)[(0, 0)].re
    }

    pub fn apply(&self, op: &DMatrix<C64>) -> Result<Ket> {
        if op.ncols() != self.dim() {
            return Err(QubitError::DimensionMismatch(op.ncols(), self.dim()));
        }
        Self::from_vector(op * &self.amps)
    }
}

/// Orthogonal complement of a qubit state: for ψ = α|0⟩ + β|1⟩ this is
/// ψ⊥ = −β*|0⟩ + α*|1⟩, so every qubit register can be expressed in the
/// (ψ, ψ⊥) basis.
pub fn qubit_orthogonal(psi: &Ket) -> Ket {
    assert_eq!(psi.dim(), 2, "qubit_orthogonal expects a qubit");
    let a = psi.amplitude(0);
    let b = psi.amplitude(1);
    Ket { amps: DVector::from_vec(vec![-b.conj(), a.conj()]) }
}

/// Mixed state of a d-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validate Hermiticity, unit trace, and positivity.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.is_empty() {
            return Err(QubitError::DimensionMismatch(mat.nrows(), mat.ncols()));
        }
        let herm_dev = (&mat - mat.adjoint()).norm();
        if herm_dev > HERMITICITY_TOL * (1.0 + mat.norm()) {
            return Err(QubitError::NotHermitian(herm_dev));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(QubitError::BadTrace(tr));
        }
        let rho = DensityMatrix { mat };
        let min_ev = rho
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_ev < -POSITIVITY_TOL {
            return Err(QubitError::NotPositive(min_ev));
        }
        Ok(rho)
    }

    /// Completely mixed state 1/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0 / dim as f64, 0.0);
        }
        DensityMatrix { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Real eigenvalues of the (Hermitian) matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let sym = self.mat.clone().symmetric_eigen();
        let mut ev: Vec<f64> = sym.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Kronecker product; `self` is the most significant factor.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { mat: self.mat.kronecker(&other.mat) }
    }

    /// Trace out every subsystem not listed in `keep`.
    ///
    /// `dims` lists the subsystem dimensions in big-endian order and must
    /// factor the total dimension; `keep` holds indices into `dims`.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        let total: usize = dims.iter().product();
        if total != self.dim() || dims.iter().any(|&d| d == 0) {
            return Err(QubitError::BadFactorization { dims: dims.to_vec(), dim: self.dim() });
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.iter().any(|&k| k >= dims.len()) {
            return Err(QubitError::SubsystemOutOfRange(*keep.iter().max().unwrap()));
        }
        let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();

        // Strides of each subsystem in the flat big-endian index.
        let mut stride = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dims[i + 1];
        }

        let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
        let out_dim: usize = kept_dims.iter().product();
        let traced_count: usize = traced_dims.iter().product();

        // Map a mixed-radix counter over a dim list to a flat-index offset.
        let offset = |counter: &[usize], subs: &[usize]| -> usize {
            counter.iter().zip(subs).map(|(&c, &s)| c * stride[s]).sum()
        };
        let unrank = |mut r: usize, dims: &[usize]| -> Vec<usize> {
            let mut c = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                c[i] = r % dims[i];
                r /= dims[i];
            }
            c
        };

        let mut out = DMatrix::zeros(out_dim, out_dim);
        for a in 0..out_dim {
            let ca = unrank(a, &kept_dims);
            let oa = offset(&ca, &keep);
            for b in 0..out_dim {
                let cb = unrank(b, &kept_dims);
                let ob = offset(&cb, &keep);
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..traced_count {
                    let ct = unrank(t, &traced_dims);
                    let ot = offset(&ct, &traced);
                    acc += self.mat[(oa + ot, ob + ot)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { mat: out })
    }

    /// Fidelity ⟨ψ|ρ|ψ⟩ of this state with a pure reference.
    pub fn fidelity_with(&self, psi: &Ket) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(QubitError::DimensionMismatch(psi.dim(), self.dim()));
        }
        let v = psi.amplitudes();
        let z = (v.adjoint() * &self.mat * v)[(0, 0)];
        debug_assert!(z.im.abs() < 1e-10);
        Ok(z.re)
    }

    /// Trace distance (1/2)‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        let diff = &self.mat - &other.mat;
        let ev = diff.symmetric_eigen().eigenvalues;
        0.5 * ev.iter().map(|l| l.abs()).sum::<f64>()
    }

    /// Bloch vector of a qubit state, m_i = Tr(ρ σ_i).
    pub fn bloch_vector(&self) -> Result<BlochVector> {
        if self.dim() != 2 {
            return Err(QubitError::DimensionMismatch(self.dim(), 2));
        }
        let m = &self.mat;
        Ok(BlochVector {
            x: 2.0 * m[(1, 0)].re,
            y: 2.0 * m[(1, 0)].im,
            z: (m[(0, 0)] - m[(1, 1)]).re,
        })
    }
}

/// Bloch vector of a qubit state ρ = (1 + m·σ)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// ρ = (1 + m·σ)/2; requires |m| ≤ 1 (up to tolerance).
    pub fn density(&self) -> Result<DensityMatrix> {
        if self.norm() > 1.0 + 1e-12 {
            return Err(QubitError::NotPositive(0.5 * (1.0 - self.norm())));
        }
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(0.5 * (1.0 + self.z), 0.0);
        m[(1, 1)] = C64::new(0.5 * (1.0 - self.z), 0.0);
        m[(0, 1)] = C64::new(0.5 * self.x, -0.5 * self.y);
        m[(1, 0)] = C64::new(0.5 * self.x, 0.5 * self.y);
        Ok(DensityMatrix { mat: m })
    }
}

/// Projector onto the completely symmetric subspace of n qubits.
#[derive(Debug, Clone)]
pub struct SymmetricProjector {
    n_qubits: usize,
    mat: DMatrix<C64>,
}

impl SymmetricProjector {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Rank of the projector, n + 1 for n qubits.
    pub fn rank(&self) -> usize {
        self.mat.trace().re.round() as usize
    }

    /// P A P, unnormalized.
    pub fn sandwich(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        &self.mat * a * &self.mat
    }
}

/// Build the symmetric projector P = Σ_k |D_{n,k}⟩⟨D_{n,k}| from the
/// orthonormal symmetrized basis.
pub fn symmetric_projector(n: usize) -> SymmetricProjector {
    assert!(n >= 1, "need at least one qubit");
    let dim = 1usize << n;
    let mut mat = DMatrix::zeros(dim, dim);
    for k in 0..=n {
        let d = dicke_ket(n, k);
        mat += d.amplitudes() * d.amplitudes().adjoint();
    }
    SymmetricProjector { n_qubits: n, mat }
}

/// Symmetrized n-qubit basis state with k qubits in |1⟩: equal amplitude
/// 1/sqrt(C(n,k)) on every bitstring of weight k.
pub fn dicke_ket(n: usize, k: usize) -> Ket {
    assert!(k <= n);
    let dim = 1usize << n;
    let amp = 1.0 / binomial(n as u64, k as u64).sqrt();
    let mut v = DVector::zeros(dim);
    for idx in 0..dim {
        if (idx as u64).count_ones() as usize == k {
            v[idx] = C64::new(amp, 0.0);
        }
    }
    Ket { amps: v }
}

/// Normalized symmetric state |(n−k)ψ, kψ⊥⟩: the weight-k symmetrized basis
/// state expressed in the (ψ, ψ⊥) single-qubit basis.
pub fn rotated_dicke(n: usize, k: usize, psi: &Ket) -> Ket {
    symmetric_state_in_basis(n, k, psi, &qubit_orthogonal(psi))
}

/// Weight-k symmetrized n-qubit state over an explicit single-qubit basis
/// pair (e0, e1): n−k qubits carry e0 and k carry e1, phases included.
pub fn symmetric_state_in_basis(n: usize, k: usize, e0: &Ket, e1: &Ket) -> Ket {
    let u = DMatrix::from_columns(&[
        e0.amplitudes().column(0).into_owned(),
        e1.amplitudes().column(0).into_owned(),
    ]);
    let mut big = DMatrix::identity(1, 1);
    for _ in 0..n {
        big = big.kronecker(&u);
    }
    let d = dicke_ket(n, k);
    Ket { amps: big * d.amplitudes() }
}

/// Pauli matrices and identity on one qubit.
pub fn pauli_x() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(1.0, 0.0),
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
    ])
}

pub fn pauli_y() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0), C64::new(0.0, -1.0),
        C64::new(0.0, 1.0), C64::new(0.0, 0.0),
    ])
}

pub fn pauli_z() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[
        C64::new(1.0, 0.0), C64::new(0.0, 0.0),
        C64::new(0.0, 0.0), C64::new(-1.0, 0.0),
    ])
}

pub fn identity(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim, dim)
}

/// Kronecker power of a single-system operator.
pub fn kron_power(op: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let mut out = DMatrix::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(op);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_ket, random_unitary};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tensor_basis_case() {
        // |0> ⊗ |0> -> (1,0,0,0)
        let z = Ket::basis(2, 0);
        let t = z.tensor(&z);
        assert_eq!(t.dim(), 4);
        assert_abs_diff_eq!(t.amplitude(0).re, 1.0, epsilon = 1e-15);
        for i in 1..4 {
            assert_eq!(t.amplitude(i), c(0.0, 0.0));
        }
    }

    #[test]
    fn tensor_ordering_convention() {
        // (|0>+|1>)/√2 ⊗ |1> -> (0, 1/√2, 0, 1/√2): left factor most significant.
        let plus = Ket::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let one = Ket::basis(2, 1);
        let t = plus.tensor(&one);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(t.amplitude(1).re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(t.amplitude(3).re, s, epsilon = 1e-15);
        assert_eq!(t.amplitude(0), c(0.0, 0.0));
        assert_eq!(t.amplitude(2), c(0.0, 0.0));
    }

    #[test]
    fn tensor_trace_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_ket(3, &mut rng).density();
        let prod = rho.tensor(&DensityMatrix::maximally_mixed(2));
        assert_abs_diff_eq!(prod.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(prod.trace().im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_product_state() {
        // Tr_B |00><00| = |0><0|
        let zz = Ket::basis(2, 0).tensor(&Ket::basis(2, 0)).density();
        let a = zz.partial_trace(&[2, 2], &[0]).unwrap();
        assert_abs_diff_eq!(a.matrix()[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(a.matrix()[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_singlet() {
        let s = Ket::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let red = s.density().partial_trace(&[2, 2], &[0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(red.trace_distance(&mixed) < 1e-12);
    }

    #[test]
    fn partial_trace_bh_clone() {
        // Frozen reference state: sqrt(2/3)|001> + sqrt(1/6)(|010>+|100>);
        // the first-qubit marginal is diag(5/6, 1/6).
        let mut v = vec![c(0.0, 0.0); 8];
        v[1] = c((2.0f64 / 3.0).sqrt(), 0.0);
        v[2] = c((1.0f64 / 6.0).sqrt(), 0.0);
        v[4] = c((1.0f64 / 6.0).sqrt(), 0.0);
        let rho = Ket::new(v).unwrap().density();
        let red = rho.partial_trace(&[2, 2, 2], &[0]).unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 5.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 1.0 / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn partial_trace_recovers_left_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let a = random_ket(3, &mut rng).density();
            let b = random_ket(4, &mut rng).density();
            let joint = a.tensor(&b);
            let red = joint.partial_trace(&[3, 4], &[0]).unwrap();
            assert!(red.trace_distance(&a) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let psi = random_ket(12, &mut rng).density();
        let red = psi.partial_trace(&[2, 3, 2], &[1]).unwrap();
        assert_abs_diff_eq!(red.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_dimension_error() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(rho.partial_trace(&[2, 2], &[0]).is_err());
    }

    #[test]
    fn fidelity_pure_self() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_ket(4, &mut rng);
        assert_abs_diff_eq!(psi.density().fidelity_with(&psi).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = random_ket(2, &mut rng);
        let f = DensityMatrix::maximally_mixed(2).fidelity_with(&psi).unwrap();
        assert_abs_diff_eq!(f, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_global_phase_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_ket(3, &mut rng);
        let rho = random_ket(3, &mut rng).density();
        let phase = C64::from_polar(1.0, 1.234);
        let f1 = rho.fidelity_with(&psi).unwrap();
        let f2 = rho.fidelity_with(&psi.phase_mul(phase)).unwrap();
        assert_abs_diff_eq!(f1, f2, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_projector_small() {
        // n=1: identity
        let p1 = symmetric_projector(1);
        assert!((p1.matrix() - identity(2)).norm() < 1e-14);
        assert_eq!(p1.rank(), 2);

        // n=2: annihilates exactly the singlet
        let p2 = symmetric_projector(2);
        assert_eq!(p2.rank(), 3);
        let s = Ket::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((p2.matrix() * s.amplitudes()).norm() < 1e-14);

        // n=3: rank 4
        assert_eq!(symmetric_projector(3).rank(), 4);
    }

    #[test]
    fn symmetric_projector_idempotent_hermitian() {
        for n in 1..=4 {
            let p = symmetric_projector(n);
            let m = p.matrix();
            assert!((m * m - m).norm() < 1e-10);
            assert!((m - m.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn symmetric_projector_commutes_with_collective_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            let p = symmetric_projector(n);
            for _ in 0..20 {
                let u = random_unitary(2, &mut rng);
                let un = kron_power(&u, n);
                let comm = p.matrix() * &un - un * p.matrix();
                assert!(comm.norm() < 1e-9, "commutator norm {}", comm.norm());
            }
        }
    }

    #[test]
    fn rotated_dicke_matches_plain_for_zero() {
        let z = Ket::basis(2, 0);
        for n in 1..=4 {
            for k in 0..=n {
                let a = rotated_dicke(n, k, &z);
                let b = dicke_ket(n, k);
                assert!((a.inner(&b).norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let psi = random_ket(2, &mut rng);
        let rho = psi.density();
        let m = rho.bloch_vector().unwrap();
        assert!(m.is_pure(1e-12));
        let back = m.density().unwrap();
        assert!(back.trace_distance(&rho) < 1e-12);
    }

    #[test]
    fn density_validation_rejects_bad_trace() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.7, 0.0), c(0.7, 0.0)]));
        assert!(DensityMatrix::new(m).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn amplitudes(dim: usize) -> impl Strategy<Value = Vec<C64>> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
                .prop_filter("nonzero norm", |v| {
                    v.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-3
                })
                .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
        }

        proptest! {
            #[test]
            fn tensor_then_trace_recovers_left(
                a in amplitudes(3),
                b in amplitudes(4),
            ) {
                let left = Ket::new(a).unwrap().density();
                let right = Ket::new(b).unwrap().density();
                let joint = left.tensor(&right);
                let back = joint.partial_trace(&[3, 4], &[0]).unwrap();
                prop_assert!(back.trace_distance(&left) < 1e-12);
            }

            #[test]
            fn fidelity_lies_in_unit_interval(
                a in amplitudes(4),
                b in amplitudes(4),
            ) {
                let rho = Ket::new(a).unwrap().density();
                let psi = Ket::new(b).unwrap();
                let f = rho.fidelity_with(&psi).unwrap();
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
            }

            #[test]
            fn symmetric_projector_fixes_rotated_dicke(
                k in 0usize..=3,
                re in -1.0f64..1.0,
                im in -1.0f64..1.0,
            ) {
                prop_assume!(re * re + im * im > 1e-3);
                let psi = Ket::new(vec![c(1.0, 0.0), c(re, im)]).unwrap();
                let state = rotated_dicke(3, k, &psi);
                let projected = state.apply(symmetric_projector(3).matrix()).unwrap();
                prop_assert!((projected.inner(&state).norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}
