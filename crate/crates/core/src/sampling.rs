//! Seeded random states, unitaries, and mixtures for tests and sweeps.
//!
//! Everything takes an explicit RNG so callers stay bit-reproducible.

use crate::qubit::{DensityMatrix, Ket};
use crate::C64;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-random pure state of the given dimension.
pub fn random_ket<R: Rng>(dim: usize, rng: &mut R) -> Ket {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    Ket::from_vector(v).expect("gaussian vector has nonzero norm")
}

/// Haar-random unitary via QR of a Ginibre matrix, with the phase convention
/// fixed by making the R diagonal positive.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _, | gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random density matrix of the given rank: a uniform mixture of `rank`
/// Haar-random pure states with Dirichlet-ish weights.
pub fn random_density<R: Rng>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    assert!(rank >= 1);
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut m = DMatrix::zeros(dim, dim);
    for w in weights {
        let k = random_ket(dim, rng);
        m += (k.amplitudes() * k.amplitudes().adjoint()) * C64::new(w, 0.0);
    }
    DensityMatrix::new(m).expect("convex mixture of pure states is a state")
}

fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Random completely positive trace-preserving map with `n_kraus` Kraus
/// operators, carved out of a Haar-random unitary on dim * n_kraus.
pub fn random_cp_map<R: Rng>(dim: usize, n_kraus: usize, rng: &mut R) -> crate::bounds::CpMap {
    let big = random_unitary(dim * n_kraus, rng);
    let kraus: Vec<DMatrix<C64>> = (0..n_kraus)
        .map(|e| {
            DMatrix::from_fn(dim, dim, |i, j| big[(e * dim + i, j)])
        })
        .collect();
    crate::bounds::CpMap::new(kraus).expect("isometry columns give a trace-preserving map")
}

/// Random decomposition of `rho` into `m` weighted pure states, via an
/// isometry applied to the scaled eigenvectors. Requires m >= rank.
pub fn random_pure_decomposition<R: Rng>(
    rho: &DensityMatrix,
    m: usize,
    rng: &mut R,
) -> Vec<(f64, Ket)> {
    let dim = rho.dim();
    let eig = rho.matrix().clone().symmetric_eigen();
    let kept: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 1e-12)
        .map(|(k, &l)| (l, k))
        .collect();
    assert!(m >= kept.len(), "need at least rank elements");
    let u = random_unitary(m, rng);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut w = DVector::zeros(dim);
        for (col, &(lambda, k)) in kept.iter().enumerate() {
            let scale = u[(i, col)] * C64::new(lambda.sqrt(), 0.0);
            for r in 0..dim {
                w[r] += scale * eig.eigenvectors[(r, k)];
            }
        }
        let weight = w.norm_squared();
        if weight > 1e-14 {
            out.push((weight, Ket::from_vector(w).expect("nonzero weight")));
        }
    }
    out
}
