//! Exact vectors and matrices over `F_{q^2}`.
//!
//! The Hermitian form is `<x, y> = x* y`, conjugate-linear in the first slot,
//! with conjugation the Frobenius map `a ↦ a^q`. Tensor products use the
//! row-major convention: index `(i, j)` of `x ⊗ y` is `i * dim(y) + j`, with the
//! first factor most significant.

use std::sync::Arc;

use thiserror::Error;

use crate::field::{FieldCtx, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands belong to different fields")]
    ContextMismatch,
    #[error("the symmetric projector needs 1/2, unavailable in characteristic 2")]
    EvenCharacteristic,
    #[error("matrix side {0} is not a perfect square")]
    NotSquareBlock(usize),
    #[error("matrix is singular")]
    Singular,
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Largest `d` for which `Π_d^{(2)}` is materialized densely.
pub const DENSE_PROJECTOR_CAP: usize = 16;

fn same_ctx(a: &Arc<FieldCtx>, b: &Arc<FieldCtx>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(LinalgError::ContextMismatch)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FFVector {
    ctx: Arc<FieldCtx>,
    entries: Vec<FieldElement>,
}

impl FFVector {
    pub fn new(ctx: Arc<FieldCtx>, entries: Vec<FieldElement>) -> Result<Self> {
        for e in &entries {
            ctx.check(e)?;
        }
        Ok(FFVector { ctx, entries })
    }

    pub(crate) fn from_trusted(ctx: Arc<FieldCtx>, entries: Vec<FieldElement>) -> Self {
        FFVector { ctx, entries }
    }

    pub fn zeros(ctx: Arc<FieldCtx>, d: usize) -> Self {
        let z = ctx.zero();
        FFVector { entries: vec![z; d], ctx }
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn basis(ctx: Arc<FieldCtx>, d: usize, i: usize) -> Self {
        let mut v = Self::zeros(ctx, d);
        v.entries[i] = v.ctx.one();
        v
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &FieldElement {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        let entries = self.entries.iter().map(|e| self.ctx.mul(s, e)).collect();
        FFVector::from_trusted(self.ctx.clone(), entries)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_ctx(&self.ctx, &other.ctx)?;
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch(format!("{} vs {}", self.len(), other.len())));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| self.ctx.add(a, b)).collect();
        Ok(FFVector::from_trusted(self.ctx.clone(), entries))
    }

    /// Entrywise conjugate.
    pub fn conj(&self) -> Self {
        let entries = self.entries.iter().map(|e| self.ctx.conj(e)).collect();
        FFVector::from_trusted(self.ctx.clone(), entries)
    }

    /// `x ⊗ y` in row-major order.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        same_ctx(&self.ctx, &other.ctx)?;
        let mut entries = Vec::with_capacity(self.len() * other.len());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(self.ctx.mul(a, b));
            }
        }
        Ok(FFVector::from_trusted(self.ctx.clone(), entries))
    }

    /// Outer product `x y*`.
    pub fn outer(&self, other: &Self) -> Result<FFMatrix> {
        same_ctx(&self.ctx, &other.ctx)?;
        let cy = other.conj();
        let mut m = FFMatrix::zeros(self.ctx.clone(), self.len(), other.len());
        for (i, a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in cy.entries.iter().enumerate() {
                m.entries[i * m.cols + j] = self.ctx.mul(a, b);
            }
        }
        Ok(m)
    }
}

/// `<x, y> = Σ_i conj(x_i) y_i`.
pub fn herm_inner(x: &FFVector, y: &FFVector) -> Result<FieldElement> {
    same_ctx(&x.ctx, &y.ctx)?;
    if x.len() != y.len() {
        return Err(LinalgError::DimensionMismatch(format!("{} vs {}", x.len(), y.len())));
    }
    if !x.ctx.is_quadratic() {
        return Err(FieldError::NotQuadraticExtension(x.ctx.degree()).into());
    }
    Ok(conj_dot(&x.ctx, &x.entries, &y.entries))
}

/// `Σ_i conj(a_i) b_i` with a single final reduction; zero entries are skipped.
pub(crate) fn conj_dot(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = ctx.acc_buffer();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        ctx.mul_acc(&mut acc, &ctx.conj(x), y);
    }
    ctx.reduce_acc(&mut acc)
}

/// `Σ_i a_i b_i` with a single final reduction.
pub(crate) fn plain_dot(ctx: &FieldCtx, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let mut acc = ctx.acc_buffer();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        ctx.mul_acc(&mut acc, x, y);
    }
    ctx.reduce_acc(&mut acc)
}

/// A bank of lazily reduced sums `Σ a·b`, one per slot. Call [`AccBank::tick`]
/// once per summand group so the raw `u64` buffers are flushed before they
/// could overflow.
pub(crate) struct AccBank<'a> {
    ctx: &'a FieldCtx,
    width: usize,
    buf: Vec<u64>,
    totals: Vec<FieldElement>,
    pending: usize,
}

impl<'a> AccBank<'a> {
    const FLUSH_EVERY: usize = 1 << 18;

    pub(crate) fn new(ctx: &'a FieldCtx, slots: usize) -> Self {
        let width = 2 * ctx.degree() - 1;
        AccBank { ctx, width, buf: vec![0; slots * width], totals: vec![ctx.zero(); slots], pending: 0 }
    }

    #[inline]
    pub(crate) fn add(&mut self, slot: usize, a: &FieldElement, b: &FieldElement) {
        let w = self.width;
        self.ctx.mul_acc(&mut self.buf[slot * w..(slot + 1) * w], a, b);
    }

    pub(crate) fn tick(&mut self) {
        self.pending += 1;
        if self.pending == Self::FLUSH_EVERY {
            self.flush();
        }
    }

    fn flush(&mut self) {
        let w = self.width;
        for (slot, total) in self.totals.iter_mut().enumerate() {
            let chunk = &mut self.buf[slot * w..(slot + 1) * w];
            if chunk.iter().any(|&c| c != 0) {
                let part = self.ctx.reduce_acc(chunk);
                *total = self.ctx.add(total, &part);
            }
        }
        self.pending = 0;
    }

    pub(crate) fn finish(mut self) -> Vec<FieldElement> {
        self.flush();
        self.totals
    }
}

/// Nonzero entries of a vector with their positions.
pub(crate) fn support(v: &FFVector) -> Vec<(usize, FieldElement)> {
    v.entries.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(i, e)| (i, e.clone())).collect()
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FFMatrix {
    ctx: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

/// Result of Gaussian elimination.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rank: usize,
    /// Pivot column of each nonzero row of the reduced form.
    pub pivots: Vec<usize>,
    /// Reduced row echelon form.
    pub reduced: FFMatrix,
    /// Basis of the right nullspace, one vector per free column.
    pub nullspace: Vec<FFVector>,
}

impl FFMatrix {
    pub fn zeros(ctx: Arc<FieldCtx>, rows: usize, cols: usize) -> Self {
        let z = ctx.zero();
        FFMatrix { entries: vec![z; rows * cols], ctx, rows, cols }
    }

    pub fn identity(ctx: Arc<FieldCtx>, d: usize) -> Self {
        let mut m = Self::zeros(ctx, d, d);
        for i in 0..d {
            m.entries[i * d + i] = m.ctx.one();
        }
        m
    }

    pub fn from_entries(ctx: Arc<FieldCtx>, rows: usize, cols: usize, entries: Vec<FieldElement>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        for e in &entries {
            ctx.check(e)?;
        }
        Ok(FFMatrix { ctx, rows, cols, entries })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(ctx: Arc<FieldCtx>, rows: usize, columns: &[FFVector]) -> Result<Self> {
        let mut m = Self::zeros(ctx, rows, columns.len());
        for (j, v) in columns.iter().enumerate() {
            same_ctx(&m.ctx, &v.ctx)?;
            if v.len() != rows {
                return Err(LinalgError::DimensionMismatch(format!("column of length {}", v.len())));
            }
            for i in 0..rows {
                m.entries[i * m.cols + j] = v.entries[i].clone();
            }
        }
        Ok(m)
    }

    /// Row-major flattening into a vector of length `rows * cols`.
    pub fn vectorize(&self) -> FFVector {
        FFVector::from_trusted(self.ctx.clone(), self.entries.clone())
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> FFVector {
        let entries = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        FFVector::from_trusted(self.ctx.clone(), entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        same_ctx(&self.ctx, &other.ctx)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| self.ctx.add(a, b)).collect();
        Ok(FFMatrix { entries, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| self.ctx.sub(a, b)).collect();
        Ok(FFMatrix { entries, ..self.clone_shape() })
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a = self.ctx.add(a, b);
        }
        Ok(())
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        let entries = self.entries.iter().map(|e| self.ctx.mul(s, e)).collect();
        FFMatrix { entries, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> Self {
        FFMatrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, entries: Vec::new() }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        same_ctx(&self.ctx, &other.ctx)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ctx = &self.ctx;
        let mut out = Self::zeros(ctx.clone(), self.rows, other.cols);
        let mut acc = ctx.acc_buffer();
        for i in 0..self.rows {
            for j in 0..other.cols {
                for l in 0..self.cols {
                    let a = self.get(i, l);
                    let b = other.get(l, j);
                    if !a.is_zero() && !b.is_zero() {
                        ctx.mul_acc(&mut acc, a, b);
                    }
                }
                out.entries[i * other.cols + j] = ctx.reduce_acc(&mut acc);
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &FFVector) -> Result<FFVector> {
        same_ctx(&self.ctx, &v.ctx)?;
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch(format!("{} columns vs length {}", self.cols, v.len())));
        }
        let entries = (0..self.rows)
            .map(|i| plain_dot(&self.ctx, &self.entries[i * self.cols..(i + 1) * self.cols], &v.entries))
            .collect();
        Ok(FFVector::from_trusted(self.ctx.clone(), entries))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ctx.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// `A*`, the conjugate transpose.
    pub fn conj_transpose(&self) -> Self {
        let mut out = self.transpose();
        for e in out.entries.iter_mut() {
            *e = self.ctx.conj(e);
        }
        out
    }

    pub fn trace(&self) -> FieldElement {
        (0..self.rows.min(self.cols)).fold(self.ctx.zero(), |acc, i| self.ctx.add(&acc, self.get(i, i)))
    }

    /// Kronecker product with block layout: block `(i, j)` is `A_{ij} B`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        same_ctx(&self.ctx, &other.ctx)?;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(self.ctx.clone(), r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.entries[(i * other.rows + k) * c + j * other.cols + l] = self.ctx.mul(a, other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Gaussian elimination; pivots are the first nonzero entries scanning
    /// columns left to right and rows top to bottom.
    pub fn echelon(&self) -> Echelon {
        let ctx = self.ctx.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    m.entries.swap(pr * m.cols + j, row * m.cols + j);
                }
            }
            let inv = ctx.inv(m.get(row, col)).expect("pivot is nonzero");
            for j in col..m.cols {
                let v = ctx.mul(&inv, m.get(row, j));
                m.entries[row * m.cols + j] = v;
            }
            let pivot_row: Vec<FieldElement> = m.entries[row * m.cols..(row + 1) * m.cols].to_vec();
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    if pivot_row[j].is_zero() {
                        continue;
                    }
                    let t = ctx.mul(&f, &pivot_row[j]);
                    let v = ctx.sub(m.get(r, j), &t);
                    m.entries[r * m.cols + j] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        let rank = pivots.len();
        let mut nullspace = Vec::new();
        for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
            let mut v = FFVector::zeros(ctx.clone(), m.cols);
            v.entries[free] = ctx.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v.entries[pc] = ctx.neg(m.get(r, free));
            }
            nullspace.push(v);
        }
        Echelon { rank, pivots, reduced: m, nullspace }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.ctx.clone(), n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.entries[i * 2 * n + j] = self.get(i, j).clone();
            }
            aug.entries[i * 2 * n + n + i] = self.ctx.one();
        }
        let ech = aug.echelon();
        if ech.pivots.iter().take(n).copied().ne(0..n) {
            return Err(LinalgError::Singular);
        }
        let mut out = Self::zeros(self.ctx.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                out.entries[i * n + j] = ech.reduced.get(i, n + j).clone();
            }
        }
        Ok(out)
    }
}

/// Rank of a list of vectors (as columns).
pub fn rank_of(vectors: &[FFVector]) -> Result<usize> {
    let Some(first) = vectors.first() else { return Ok(0) };
    Ok(FFMatrix::from_columns(first.ctx.clone(), first.len(), vectors)?.rank())
}

/// `Π_d^{(2)} = ½ Σ_{i,j} (e_i e_i* ⊗ e_j e_j* + e_i e_j* ⊗ e_j e_i*)`, the
/// orthogonal projection onto symmetric tensors, as a dense `d² × d²` matrix.
pub fn sym_projector(ctx: &Arc<FieldCtx>, d: usize) -> Result<FFMatrix> {
    if ctx.p() == 2 {
        return Err(LinalgError::EvenCharacteristic);
    }
    let half = ctx.inv(&ctx.from_int(2))?;
    let mut m = FFMatrix::zeros(ctx.clone(), d * d, d * d);
    // Row (i, j) maps e_k ⊗ e_l to ½(δ_{ik}δ_{jl} + δ_{il}δ_{jk}).
    for i in 0..d {
        for j in 0..d {
            let r = i * d + j;
            let a = ctx.add(m.get(r, i * d + j), &half);
            m.set(r, i * d + j, a);
            let b = ctx.add(m.get(r, j * d + i), &half);
            m.set(r, j * d + i, b);
        }
    }
    Ok(m)
}

/// Symmetrization `x ↦ Π x` without materializing the projector.
pub fn symmetrize(x: &FFVector, d: usize) -> Result<FFVector> {
    if x.ctx.p() == 2 {
        return Err(LinalgError::EvenCharacteristic);
    }
    if x.len() != d * d {
        return Err(LinalgError::DimensionMismatch(format!("length {} is not {d}²", x.len())));
    }
    let ctx = &x.ctx;
    let half = ctx.inv(&ctx.from_int(2))?;
    let entries = (0..d * d)
        .map(|r| {
            let (i, j) = (r / d, r % d);
            ctx.mul(&half, &ctx.add(&x.entries[i * d + j], &x.entries[j * d + i]))
        })
        .collect();
    Ok(FFVector::from_trusted(ctx.clone(), entries))
}

/// `tr_1`, extending `tr_1(A ⊗ B) = tr(A) B` linearly.
pub fn partial_trace_1(m: &FFMatrix) -> Result<FFMatrix> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquareBlock(m.rows));
    }
    let d = (m.rows as f64).sqrt().round() as usize;
    if d * d != m.rows {
        return Err(LinalgError::NotSquareBlock(m.rows));
    }
    let ctx = &m.ctx;
    let mut out = FFMatrix::zeros(ctx.clone(), d, d);
    for k in 0..d {
        for l in 0..d {
            let v = (0..d).fold(ctx.zero(), |acc, i| ctx.add(&acc, m.get(i * d + k, i * d + l)));
            out.set(k, l, v);
        }
    }
    Ok(out)
}
