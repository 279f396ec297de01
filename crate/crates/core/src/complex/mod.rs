//! Weighted projective 2-designs in `C^d` and the entanglement-breaking rank of
//! the depolarizing channel.
//!
//! Tensor products use the Kronecker convention `(x ⊗ y)[i·d + j] = x_i y_j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

mod catalog;
mod channel;
mod prune;

pub use catalog::{ebr_bound_table, mub_ensemble, sic_catalog, sic_from_fiducial, weyl_heisenberg_orbit, EbrBound};
pub use channel::{
    choi_from_kraus, depolarizing_channel, design_to_kraus, kraus_from_choi, kraus_to_design, transpose_compose,
    Channel, EbrCertificate, Provenance, Representation,
};
pub use prune::caratheodory_prune;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default tolerance for verification.
pub const VERIFY_TOL: f64 = 1e-9;
/// Tolerance for certificates.
pub const CERT_TOL: f64 = 1e-12;
/// How far a norm or weight sum may stray from 1 on construction.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector {k} is not a unit vector (norm {norm})")]
    NotUnit { k: usize, norm: f64 },
    #[error("weights must be nonnegative and sum to 1")]
    InvalidWeights,
    #[error("supplied terms do not reproduce the Choi matrix (residual {residual:e})")]
    ChoiMismatch { residual: f64 },
    #[error("not a weighted projective 2-design (residual {residual:e})")]
    NotADesign { residual: f64 },
    #[error("Kraus term {k} is not symmetric (antisymmetric part {residual:e})")]
    AsymmetricTerm { k: usize, residual: f64 },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, ComplexError>;

/// Unit vectors in `C^d` with a probability vector of weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CEnsemble {
    d: usize,
    vectors: Vec<CVector>,
    weights: Vec<f64>,
}

impl CEnsemble {
    /// Uniform weights `1/n`.
    pub fn new(d: usize, vectors: Vec<CVector>) -> Result<Self> {
        let n = vectors.len();
        Self::with_weights(d, vectors, vec![1.0 / n as f64; n])
    }

    pub fn with_weights(d: usize, vectors: Vec<CVector>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(ComplexError::DimensionMismatch(format!(
                "{} vectors but {} weights",
                vectors.len(),
                weights.len()
            )));
        }
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(ComplexError::DimensionMismatch(format!(
                    "vector {k} has length {}, expected {d}",
                    v.len()
                )));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(ComplexError::NotUnit { k, norm });
            }
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (total - 1.0).abs() > UNIT_TOL {
            return Err(ComplexError::InvalidWeights);
        }
        Ok(CEnsemble { d, vectors, weights })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The union with both halves scaled by `lambda` and `1 - lambda`.
    pub fn mix(&self, other: &CEnsemble, lambda: f64) -> Result<CEnsemble> {
        if self.d != other.d {
            return Err(ComplexError::DimensionMismatch(format!("d = {} and d = {}", self.d, other.d)));
        }
        let vectors = self.vectors.iter().chain(&other.vectors).cloned().collect();
        let weights = self.weights.iter().map(|w| w * lambda).chain(other.weights.iter().map(|w| w * (1.0 - lambda)));
        CEnsemble::with_weights(self.d, vectors, weights.collect())
    }
}

/// `x ⊗ y`.
pub fn kron(x: &CVector, y: &CVector) -> CVector {
    CVector::from_fn(x.len() * y.len(), |idx, _| x[idx / y.len()] * y[idx % y.len()])
}

/// `Π_d^(2)`: the orthogonal projection onto the symmetric subspace of `C^d ⊗ C^d`.
pub fn sym_projector(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j, k, l) = (r / d, r % d, c / d, c % d);
        let hits = u8::from(i == k && j == l) + u8::from(i == l && j == k);
        Complex64::new(0.5 * f64::from(hits), 0.0)
    })
}

/// `1 / C(d + t - 1, t)`.
pub fn design_bound(d: usize, t: u32) -> f64 {
    let mut binom = 1.0f64;
    for i in 0..t as usize {
        binom = binom * (d + i) as f64 / (i + 1) as f64;
    }
    1.0 / binom
}

/// `Σ_k Σ_l w_k w_l |<x_k, x_l>|^{2t}`, which is the usual `1/n^2` average
/// for uniform weights.
pub fn frame_potential(ens: &CEnsemble, t: u32) -> f64 {
    let (vs, ws) = (&ens.vectors, &ens.weights);
    let rows: Vec<f64> = (0..vs.len())
        .into_par_iter()
        .map(|k| (0..vs.len()).map(|l| ws[l] * vs[k].dotc(&vs[l]).norm_sqr().powi(t as i32)).sum::<f64>() * ws[k])
        .collect();
    rows.iter().sum()
}

/// Sums in a fixed binary tree so the result does not depend on scheduling.
pub(crate) fn pairwise_sum(mut terms: Vec<CMatrix>) -> Option<CMatrix> {
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        terms = next;
    }
    terms.pop()
}

const CHUNK: usize = 8;

/// `Σ_k c_k v_k v_k*` over a fixed chunking, summed pairwise.
pub(crate) fn outer_sum(dim: usize, terms: &[(f64, CVector)]) -> CMatrix {
    let partial: Vec<CMatrix> = terms
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = CMatrix::zeros(dim, dim);
            for (c, v) in chunk {
                acc.gerc(Complex64::new(*c, 0.0), v, v, Complex64::new(1.0, 0.0));
            }
            acc
        })
        .collect();
    pairwise_sum(partial).unwrap_or_else(|| CMatrix::zeros(dim, dim))
}

/// Largest entry modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Σ_k w_k (x_k ⊗ x_k)(x_k ⊗ x_k)*`.
pub fn second_moment(ens: &CEnsemble) -> CMatrix {
    let terms: Vec<(f64, CVector)> = ens.vectors.iter().zip(&ens.weights).map(|(x, &w)| (w, kron(x, x))).collect();
    outer_sum(ens.d * ens.d, &terms)
}

/// Max-norm residual of `Σ w_k (x_k ⊗ x_k)(x_k ⊗ x_k)* - 2/(d(d+1)) Π_d^(2)`.
pub fn check_weighted_2design(ens: &CEnsemble) -> f64 {
    let d = ens.d as f64;
    let target = sym_projector(ens.d) * Complex64::new(2.0 / (d * (d + 1.0)), 0.0);
    max_norm(&(second_moment(ens) - target))
}

/// Whether the ensemble is a weighted 2-design to within `tol`.
pub fn is_weighted_2design(ens: &CEnsemble, tol: f64) -> bool {
    check_weighted_2design(ens) <= tol
}

/// `|<x, y>|^2`.
pub fn overlap(x: &CVector, y: &CVector) -> f64 {
    x.dotc(y).norm_sqr()
}

#[cfg(test)]
mod tests;
