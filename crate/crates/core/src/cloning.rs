//! Optimal universal cloning transformations on qubit registers: the
//! symmetric N→M family, its Werner projection form, the 1→2 asymmetric
//! family in d dimensions, and the fidelity formulas.
//!
//! Clone registers are stored expanded over the full 2^M space so partial
//! traces work directly; the ancilla register is a single (M−N+1)-dimensional
//! label system (only orthonormality of the ancilla states matters; phases
//! beyond that are a convention and are fixed so the 1→2 special case
//! reproduces the familiar three-qubit copying transformation exactly).

use crate::qubit::{
    qubit_orthogonal, rotated_dicke, symmetric_state_in_basis, DensityMatrix, Ket, QubitError,
};
use crate::{qubit, C64};
use nalgebra::DVector;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CloneError {
    #[error("need 1 <= N <= M, got N={0}, M={1}")]
    BadCopyNumbers(usize, usize),
    #[error("input must be a qubit (dim 2), got dim {0}")]
    NotAQubit(usize),
    #[error("asymmetric parameters must not both vanish")]
    ZeroParameters,
    #[error("dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error(transparent)]
    State(#[from] QubitError),
}

pub type Result<T> = std::result::Result<T, CloneError>;

/// Coefficients of the N→M symmetric cloning transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct GmCoefficients {
    pub n_in: usize,
    pub m_out: usize,
    /// alpha_j for j = 0..=M−N.
    pub alpha: Vec<f64>,
}

/// alpha_j = sqrt((N+1)/(M+1)) * sqrt((M−N)!(M−j)! / ((M−N−j)! M!)).
pub fn gm_coefficients(n: usize, m: usize) -> Result<GmCoefficients> {
    if n < 1 || n > m {
        return Err(CloneError::BadCopyNumbers(n, m));
    }
    let alpha = (0..=m - n)
        .map(|j| {
            // (M-N)!/(M-N-j)! and (M-j)!/M! as falling-factorial ratios to
            // stay well inside f64 range.
            let mut ratio = (n as f64 + 1.0) / (m as f64 + 1.0);
            for i in 0..j {
                ratio *= (m - n - i) as f64;
            }
            for i in 0..j {
                ratio /= (m - i) as f64;
            }
            ratio.sqrt()
        })
        .collect();
    Ok(GmCoefficients { n_in: n, m_out: m, alpha })
}

impl GmCoefficients {
    /// Single-clone fidelity as the mean relative frequency of correct
    /// copies, sum_j ((M−j)/M) alpha_j^2.
    pub fn relative_frequency_fidelity(&self) -> f64 {
        let m = self.m_out as f64;
        self.alpha
            .iter()
            .enumerate()
            .map(|(j, a)| (m - j as f64) / m * a * a)
            .sum()
    }
}

/// Optimal N→M cloning fidelity (NM + M + N) / (M (N + 2)).
pub fn optimal_fidelity(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (n * m + m + n) / (m * (n + 2.0))
}

/// Output of the symmetric cloning transformation: M clones expanded over
/// the full 2^M register, followed by one (M−N+1)-dimensional ancilla label.
#[derive(Debug, Clone)]
pub struct CloneOutput {
    state: Ket,
    n_clones: usize,
    n_in: usize,
    input: Ket,
}

impl CloneOutput {
    pub fn state(&self) -> &Ket {
        &self.state
    }

    pub fn n_clones(&self) -> usize {
        self.n_clones
    }

    /// Number of ancilla systems consumed by the transformation, M − N.
    pub fn n_ancillas(&self) -> usize {
        self.n_clones - self.n_in
    }

    /// Dimension of the folded ancilla label space, M − N + 1.
    pub fn ancilla_dim(&self) -> usize {
        self.n_clones - self.n_in + 1
    }

    /// Subsystem dimensions of `state` in big-endian order: M qubits, then
    /// the ancilla label.
    pub fn layout(&self) -> Vec<usize> {
        let mut dims = vec![2; self.n_clones];
        dims.push(self.ancilla_dim());
        dims
    }

    /// Joint density matrix of the M clones (ancilla traced out).
    pub fn clone_register_density(&self) -> DensityMatrix {
        let keep: Vec<usize> = (0..self.n_clones).collect();
        self.state
            .density()
            .partial_trace(&self.layout(), &keep)
            .expect("layout matches state dimension")
    }

    /// Reduced density matrix of a single clone.
    pub fn clone_marginal(&self, k: usize) -> DensityMatrix {
        assert!(k < self.n_clones);
        self.state
            .density()
            .partial_trace(&self.layout(), &[k])
            .expect("layout matches state dimension")
    }

    /// Fidelity of one clone with the input state.
    pub fn clone_fidelity(&self, k: usize) -> f64 {
        self.clone_marginal(k)
            .fidelity_with(&self.input)
            .expect("clone marginal is a qubit")
    }

    /// Expand the ancilla labels into physical qubits, R_j = |(M−1−j)ψ⊥, jψ⟩.
    ///
    /// Only defined for N = 1, where the label space and the (M−1)-qubit
    /// ancilla register have the same size.
    pub fn expanded_ancillas(&self) -> Option<Ket> {
        if self.n_in != 1 {
            return None;
        }
        let m = self.n_clones;
        if m == 1 {
            return Some(self.state.clone());
        }
        let anc_dim = self.ancilla_dim();
        let perp = qubit_orthogonal(&self.input);
        let full_dim = (1usize << m) * (1usize << (m - 1));
        let mut out = DVector::zeros(full_dim);
        for j in 0..anc_dim {
            // R_j carries M−1−j copies of ψ⊥ and j of ψ: the weight-j
            // symmetrized state in the (ψ⊥, ψ) basis.
            let r_j = symmetric_state_in_basis(m - 1, j, &perp, &self.input);
            for c in 0..(1usize << m) {
                let amp_c = self.state.amplitude(c * anc_dim + j);
                if amp_c.norm() == 0.0 {
                    continue;
                }
                for (a, amp_a) in r_j.amplitudes().iter().enumerate() {
                    out[c * (1 << (m - 1)) + a] += amp_c * amp_a;
                }
            }
        }
        Some(Ket::from_vector(out).expect("expanded state is normalized"))
    }
}

/// Apply the N→M symmetric cloning transformation to N copies of `psi`.
///
/// The output is sum_j alpha_j |(M−j)ψ, jψ⊥⟩ ⊗ |j⟩ with the ancilla labels
/// orthonormal.
pub fn gm_apply(psi: &Ket, n: usize, m: usize) -> Result<CloneOutput> {
    if psi.dim() != 2 {
        return Err(CloneError::NotAQubit(psi.dim()));
    }
    let coeffs = gm_coefficients(n, m)?;
    let anc_dim = m - n + 1;
    let dim = (1usize << m) * anc_dim;
    let mut out = DVector::zeros(dim);
    for (j, &alpha) in coeffs.alpha.iter().enumerate() {
        let clones = rotated_dicke(m, j, psi);
        for (c, amp) in clones.amplitudes().iter().enumerate() {
            out[c * anc_dim + j] += amp * alpha;
        }
    }
    Ok(CloneOutput {
        state: Ket::from_vector(out)?,
        n_clones: m,
        n_in: n,
        input: psi.clone(),
    })
}

/// Werner form of the optimal clone register: the normalized projection of
/// sigma^⊗N ⊗ (1/2)^⊗(M−N) onto the completely symmetric subspace.
pub fn werner_output(sigma: &DensityMatrix, n: usize, m: usize) -> Result<DensityMatrix> {
    if sigma.dim() != 2 {
        return Err(CloneError::NotAQubit(sigma.dim()));
    }
    if n < 1 || n > m {
        return Err(CloneError::BadCopyNumbers(n, m));
    }
    let mut arg = sigma.clone();
    for _ in 1..n {
        arg = arg.tensor(sigma);
    }
    let mixed = DensityMatrix::maximally_mixed(2);
    for _ in 0..m - n {
        arg = arg.tensor(&mixed);
    }
    let p = qubit::symmetric_projector(m);
    let sand = p.sandwich(arg.matrix());
    let tr = sand.trace();
    Ok(DensityMatrix::new(sand / tr)?)
}

/// Parameters of the 1→2 asymmetric universal cloner in d dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricParams {
    pub a: C64,
    pub b: C64,
    pub d: usize,
}

impl AsymmetricParams {
    pub fn new(a: C64, b: C64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(CloneError::BadDimension(d));
        }
        if a.norm() == 0.0 && b.norm() == 0.0 {
            return Err(CloneError::ZeroParameters);
        }
        Ok(AsymmetricParams { a, b, d })
    }
}

/// Final state A ψ₁ E₂₃ + B ψ₂ E₁₃ of the asymmetric cloner, normalized.
///
/// For qubits E is the singlet (|01⟩−|10⟩)/√2; for d ≥ 3 it is the maximally
/// entangled pair Σ_n |n,n⟩/√d. Subsystems 1 and 2 are the clones, 3 the
/// anti-clone.
pub fn asymmetric_apply(psi: &Ket, a: C64, b: C64) -> Result<Ket> {
    let d = psi.dim();
    let params = AsymmetricParams::new(a, b, d)?;
    let pair = entangled_pair(d);
    let mut out = DVector::zeros(d * d * d);
    for (i, amp_psi) in psi.amplitudes().iter().enumerate() {
        for s in 0..d {
            for t in 0..d {
                let e = pair[s * d + t];
                if e == C64::new(0.0, 0.0) {
                    continue;
                }
                // A ψ₁ E₂₃
                out[i * d * d + s * d + t] += params.a * amp_psi * e;
                // B ψ₂ E₁₃
                out[s * d * d + i * d + t] += params.b * amp_psi * e;
            }
        }
    }
    Ok(Ket::from_vector(out)?)
}

fn entangled_pair(d: usize) -> DVector<C64> {
    let mut v = DVector::zeros(d * d);
    if d == 2 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[1] = C64::new(s, 0.0);
        v[2] = C64::new(-s, 0.0);
    } else {
        let s = 1.0 / (d as f64).sqrt();
        for n in 0..d {
            v[n * d + n] = C64::new(s, 0.0);
        }
    }
    v
}

/// Reduced state of one subsystem of a 3-subsystem pure state.
pub fn three_party_marginal(state: &Ket, d: usize, which: usize) -> DensityMatrix {
    state
        .density()
        .partial_trace(&[d, d, d], &[which])
        .expect("state has dimension d^3")
}
