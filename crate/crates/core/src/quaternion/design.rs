//! Quaternionic projective 2-designs in `H^d` and the subspaces
//! `S(x) = {x z x* : Re z = 0}` of the anti-Hermitian matrices.

use nalgebra::{Matrix3, Matrix4};
use rayon::prelude::*;

use super::{QError, QMatrix, QVector, Quaternion, Result};

/// How far a norm may stray from 1 on construction.
pub const UNIT_TOL: f64 = 1e-9;

/// Unit vectors in `H^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QEnsemble {
    d: usize,
    vectors: Vec<QVector>,
}

impl QEnsemble {
    pub fn new(d: usize, vectors: Vec<QVector>) -> Result<Self> {
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(QError::DimensionMismatch(format!("vector {k} has length {}, expected {d}", v.len())));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(QError::NotUnit { k, norm });
            }
        }
        Ok(QEnsemble { d, vectors })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[QVector] {
        &self.vectors
    }

    /// `|x_k* x_l|^2` for all pairs, row-major.
    pub fn squared_overlaps(&self) -> Vec<f64> {
        let vs = &self.vectors;
        (0..vs.len() * vs.len())
            .into_par_iter()
            .map(|idx| vs[idx / vs.len()].inner(&vs[idx % vs.len()]).norm_sqr())
            .collect()
    }
}

/// `n = d + 2(d^2 - d)`, the size of a tight design in `H^d`.
pub fn tight_q_design_size(d: usize) -> usize {
    2 * d * d - d
}

/// The averages over all pairs of `<x_k x_k*, x_l x_l*> = |x_k* x_l|^2` and
/// of its square. A 2-design attains `1/d` and `3/(d(2d+1))`.
pub fn q_design_moments(ens: &QEnsemble) -> (f64, f64) {
    let sq = ens.squared_overlaps();
    let n2 = (ens.n() * ens.n()) as f64;
    (sq.iter().sum::<f64>() / n2, sq.iter().map(|s| s * s).sum::<f64>() / n2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QDesignReport {
    pub passes: bool,
    pub first: f64,
    pub second: f64,
    /// The common off-diagonal `|x_k* x_l|^2`, if there is one.
    pub angle: Option<f64>,
    /// First pair whose overlap differs from that of pair `(0, 1)`.
    pub witness: Option<(usize, usize)>,
    pub moments_match: bool,
    pub size_matches: bool,
}

/// Moments within `tol` of `(1/d, 3/(d(2d+1)))`, a single off-diagonal overlap
/// and `n = 2d^2 - d`.
pub fn check_tight_q_design(ens: &QEnsemble, tol: f64) -> QDesignReport {
    let (d, n) = (ens.d() as f64, ens.n());
    let (first, second) = q_design_moments(ens);
    let moments_match = (first - 1.0 / d).abs() <= tol && (second - 3.0 / (d * (2.0 * d + 1.0))).abs() <= tol;
    let sq = ens.squared_overlaps();
    let mut angle = None;
    let mut witness = None;
    'pairs: for k in 0..n {
        for l in k + 1..n {
            let v = sq[k * n + l];
            match angle {
                None => angle = Some(v),
                Some(b) if (v - b).abs() > tol => {
                    witness = Some((k, l));
                    break 'pairs;
                }
                Some(_) => {}
            }
        }
    }
    if witness.is_some() {
        angle = None;
    }
    let size_matches = n == tight_q_design_size(ens.d());
    QDesignReport {
        passes: moments_match && witness.is_none() && size_matches,
        first,
        second,
        angle,
        witness,
        moments_match,
        size_matches,
    }
}

/// The orthogonal basis `(x i x*, x j x*, x k x*)` of `S(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    pub x: QVector,
    pub elements: [QMatrix; 3],
}

pub fn s_basis(x: &QVector) -> Result<SubspaceBasis> {
    if x.norm_sqr() == 0.0 {
        return Err(QError::ZeroVector);
    }
    let elements = [Quaternion::I, Quaternion::J, Quaternion::K].map(|u| x.sandwich(u));
    Ok(SubspaceBasis { x: x.clone(), elements })
}

const UNITS: [Quaternion; 3] = [Quaternion::I, Quaternion::J, Quaternion::K];

/// `G[u, v] = Re(conj(u) (x* y) v (y* x))` for `u, v ∈ {i, j, k}`, the
/// cross-Gramian of the bases of `S(x)` and `S(y)`.
pub fn cross_gramian(x: &QVector, y: &QVector) -> Matrix3<f64> {
    let g = x.inner(y);
    let h = g.conj();
    Matrix3::from_fn(|a, b| (UNITS[a].conj() * g * UNITS[b] * h).r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusionCertificate {
    pub n: usize,
    pub d: usize,
    /// Dimension of each subspace.
    pub r: usize,
    /// `d(2d+1)`, the dimension of the ambient space of Hermitian matrices.
    pub dim_v: usize,
    /// `max ‖G_kl^T G_kl - |x_k* x_l|^4 I‖` over pairs.
    pub isoclinic_residual: f64,
    pub equi_isoclinic: bool,
    /// The common `α` with `G_kl^T G_kl = α I` for all `k ≠ l`.
    pub alpha: Option<f64>,
    /// First pair whose `α` differs from that of pair `(0, 1)`.
    pub witness: Option<(usize, usize)>,
    /// `(1/n^2) Σ_k Σ_l ‖G_kl‖_F^2`.
    pub potential: f64,
    /// `r^2 / dim V = 9/(d(2d+1))`.
    pub target: f64,
    pub tight: bool,
}

/// Equi-isoclinicity of `{S(x_k)}` and its fusion frame potential, both
/// within `tol`.
pub fn certify_fusion_frame(ens: &QEnsemble, tol: f64) -> FusionCertificate {
    let (n, d) = (ens.n(), ens.d());
    let vs = ens.vectors();
    let pairs: Vec<(f64, f64, f64)> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            let g = cross_gramian(&vs[k], &vs[l]);
            let gtg = g.transpose() * g;
            let alpha = gtg.trace() / 3.0;
            let expected = vs[k].inner(&vs[l]).norm_sqr().powi(2);
            let residual = (gtg - Matrix3::identity() * expected).abs().max().max((alpha - expected).abs());
            (alpha, residual, g.norm_squared())
        })
        .collect();
    let isoclinic_residual = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    let potential = pairs.iter().map(|p| p.2).sum::<f64>() / (n * n) as f64;
    let mut alpha = None;
    let mut witness = None;
    'pairs: for k in 0..n {
        for l in k + 1..n {
            let a = pairs[k * n + l].0;
            match alpha {
                None => alpha = Some(a),
                Some(b) if (a - b).abs() > tol => {
                    witness = Some((k, l));
                    break 'pairs;
                }
                Some(_) => {}
            }
        }
    }
    let equi_isoclinic = witness.is_none() && isoclinic_residual <= tol;
    if !equi_isoclinic {
        alpha = None;
    }
    let dim_v = d * (2 * d + 1);
    let target = 9.0 / dim_v as f64;
    FusionCertificate {
        n,
        d,
        r: 3,
        dim_v,
        isoclinic_residual,
        equi_isoclinic,
        alpha,
        witness,
        potential,
        target,
        tight: (potential - target).abs() <= tol,
    }
}

/// Six unit vectors in `H^2`: `x_1 = (1, 0)` and
/// `x_{a+1} = (sqrt(2/5), sqrt(3/5) u_a)`, where `u_1, ..., u_5` are unit
/// quaternions at the vertices of a regular simplex in `R^4`, so that
/// `Re(conj(u_a) u_b) = -1/4`. The simplex comes from the Cholesky factor of
/// the leading 4×4 block of its Gram matrix, and `u_5 = -(u_1 + ... + u_4)`.
pub fn simplex_design_d2() -> QEnsemble {
    let gram = Matrix4::from_fn(|a, b| if a == b { 1.0 } else { -0.25 });
    let l = gram.cholesky().expect("the simplex Gram block is positive definite").l();
    let mut units: Vec<Quaternion> =
        (0..4).map(|a| Quaternion::new(l[(a, 0)], l[(a, 1)], l[(a, 2)], l[(a, 3)])).collect();
    let last = units.iter().fold(Quaternion::ZERO, |acc, &u| acc + u);
    units.push(-last);
    let (s, t) = ((2.0f64 / 5.0).sqrt(), (3.0f64 / 5.0).sqrt());
    let mut vectors = vec![QVector::basis(2, 0)];
    vectors.extend(units.into_iter().map(|u| QVector(vec![Quaternion::real(s), u.scale(t)])));
    QEnsemble::new(2, vectors).expect("unit vectors by construction")
}
