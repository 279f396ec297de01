//! Quaternion vectors and matrices over the real inner product
//! `<A, B> = Re tr(A* B)`, quaternionic 2-designs and the equi-isoclinic
//! fusion frames `{S(x_k)}` they induce.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

use crate::complex::CMatrix;

mod design;
mod optimize;

pub use design::{
    certify_fusion_frame, check_tight_q_design, cross_gramian, q_design_moments, s_basis, simplex_design_d2,
    tight_q_design_size, FusionCertificate, QDesignReport, QEnsemble, SubspaceBasis,
};
pub use optimize::{optimize_design, optimize_seeds, potential, potential_gradient, OptimizeConfig, OptimizeResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("vector {k} is not a unit vector (norm {norm})")]
    NotUnit { k: usize, norm: f64 },
}

pub type Result<T> = std::result::Result<T, QError>;

/// The quaternion `r + i·𝐢 + j·𝐣 + k·𝐤`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub r: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(r: f64, i: f64, j: f64, k: f64) -> Self {
        Quaternion { r, i, j, k }
    }

    pub fn real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.i, self.j, self.k]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.r, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.r * self.r + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.r * s, self.i * s, self.j * s, self.k * s)
    }

    /// Real dot product of the coordinate vectors, which is `Re(conj(self) other)`.
    pub fn dot(self, other: Self) -> f64 {
        self.r * other.r + self.i * other.i + self.j * other.j + self.k * other.k
    }

    /// `f(a + bi + cj + dk) = [[a + bi, c + di], [-c + di, a - bi]]`, an
    /// injective algebra homomorphism into `C^{2×2}`.
    pub fn complex_embed(self) -> [[Complex64; 2]; 2] {
        [
            [Complex64::new(self.r, self.i), Complex64::new(self.j, self.k)],
            [Complex64::new(-self.j, self.k), Complex64::new(self.r, -self.i)],
        ]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.r + o.r, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.r - o.r, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a, b, c, d) = (self.r, self.i, self.j, self.k);
        let (e, f, g, h) = (o.r, o.i, o.j, o.k);
        Quaternion::new(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.r, self.i, self.j, self.k)
    }
}

/// A column vector in `H^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct QVector(pub Vec<Quaternion>);

impl QVector {
    pub fn zeros(d: usize) -> Self {
        QVector(vec![Quaternion::ZERO; d])
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.0[i] = Quaternion::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `x q`, scaling on the right.
    pub fn mul_right(&self, q: Quaternion) -> Self {
        QVector(self.0.iter().map(|&x| x * q).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        QVector(self.0.iter().map(|x| x.scale(s)).collect())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(QError::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    /// `x* y = Σ conj(x_i) y_i`.
    pub fn inner(&self, other: &QVector) -> Quaternion {
        assert_eq!(self.len(), other.len(), "vector lengths differ");
        self.0.iter().zip(&other.0).fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// `x y*`.
    pub fn outer(&self, other: &QVector) -> QMatrix {
        QMatrix::from_fn(self.len(), other.len(), |r, c| self.0[r] * other.0[c].conj())
    }

    /// `x z x*`.
    pub fn sandwich(&self, z: Quaternion) -> QMatrix {
        QMatrix::from_fn(self.len(), self.len(), |r, c| self.0[r] * z * self.0[c].conj())
    }

    /// Real coordinates, four per entry.
    pub fn coords(&self) -> Vec<f64> {
        self.0.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn from_coords(c: &[f64]) -> Self {
        QVector(c.chunks_exact(4).map(|q| Quaternion::new(q[0], q[1], q[2], q[3])).collect())
    }
}

/// A dense row-major quaternion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        Self::from_fn(d, d, |r, c| if r == c { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let data = (0..rows * cols).map(|idx| f(idx / cols.max(1), idx % cols.max(1))).collect();
        QMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.data[r * self.cols + c] = q;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(QError::DimensionMismatch(format!(
                "{}×{} times {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(Quaternion::ZERO, |acc, t| acc + self.get(r, t) * other.get(t, c))
        }))
    }

    fn same_shape(&self, other: &QMatrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(QError::DimensionMismatch(format!(
                "{}×{} and {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.same_shape(other)?;
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|q| q.scale(s)).collect() }
    }

    /// Sum of the diagonal, a quaternion.
    pub fn trace(&self) -> Quaternion {
        (0..self.rows.min(self.cols)).fold(Quaternion::ZERO, |acc, t| acc + self.get(t, t))
    }

    /// Real coordinates in row-major order, four per entry.
    pub fn coords(&self) -> Vec<f64> {
        self.data.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    /// The entrywise lift through [`Quaternion::complex_embed`] to a
    /// `2·rows × 2·cols` complex matrix.
    pub fn complex_embed(&self) -> CMatrix {
        CMatrix::from_fn(2 * self.rows, 2 * self.cols, |r, c| self.get(r / 2, c / 2).complex_embed()[r % 2][c % 2])
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.sub(&self.adjoint()).map(|m| m.max_norm() <= tol).unwrap_or(false)
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.add(&self.adjoint()).map(|m| m.max_norm() <= tol).unwrap_or(false)
    }
}

/// `<A, B> = Re tr(A* B)`.
pub fn re_trace_inner(a: &QMatrix, b: &QMatrix) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.adjoint().matmul(b)?.trace().r)
}
