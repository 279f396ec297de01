//! Tight frames, equiangular tight frames and `(a, c1, c2)`-projective
//! 2-designs over `F_{q^2}`.
//!
//! All verifiers are exact. Sums over the ensemble are accumulated with lazy
//! reduction and skip zero coordinates, which matters for the sparse Gabor
//! ensembles.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::fflinalg::{support, AccBank, FFMatrix, FFVector, LinalgError};
use crate::field::{FieldCtx, FieldElement, FieldError};

mod fixtures;
mod gabor;

pub use fixtures::{fixture_suite, tight_heisenberg_design, Fixture};
pub use gabor::{
    gabor_ensemble, harmonic_etf, heisenberg_orbit, param_search, singer_difference_set, structural_gabor_verify,
    verify_difference_set, DifferenceSet, GaborMeta, TableRow,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("subspace is degenerate under the Hermitian form")]
    DegenerateSubspace,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("estimated cost {cost} exceeds the budget {budget}")]
    BudgetExceeded { cost: u128, budget: u128 },
    #[error("symmetric tensors need 1/2, unavailable in characteristic 2")]
    EvenCharacteristic,
    #[error("the decomposition identity needs c2 != 0")]
    ZeroC2,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("divisibility hypothesis fails: {0}")]
    DivisibilityViolated(String),
    #[error("ensemble carries no Gabor metadata")]
    MetadataMissing,
    #[error("ensemble vectors do not match their Gabor metadata")]
    MetadataMismatch,
    #[error("d = {d} does not divide q + 1")]
    OrderHypothesisFails { d: usize },
    #[error("not a difference set modulo {0}")]
    NotADifferenceSet(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, DesignError>;

/// Default cap on `n·d^4` for the explicit tensor-moment check.
pub const NAIVE_BUDGET: u128 = 100_000_000;
/// Default cap on `d^4·n` for the Ψ-map check.
pub const PSI_BUDGET: u128 = 1_000_000_000;
/// Default cap on `n^2·d` for a full Gram computation.
pub const GRAM_BUDGET: u128 = 1_000_000_000;

/// A finite list of vectors in `F_{q^2}^d`.
#[derive(Clone, Debug)]
pub struct FFEnsemble {
    ctx: Arc<FieldCtx>,
    d: usize,
    vectors: Vec<FFVector>,
    gabor: Option<GaborMeta>,
}

impl FFEnsemble {
    pub fn new(ctx: Arc<FieldCtx>, d: usize, vectors: Vec<FFVector>) -> Result<Self> {
        if !ctx.is_quadratic() {
            return Err(FieldError::NotQuadraticExtension(ctx.degree()).into());
        }
        for v in &vectors {
            if v.len() != d {
                return Err(
                    LinalgError::DimensionMismatch(format!("vector of length {} in dimension {d}", v.len())).into()
                );
            }
            if **v.ctx() != *ctx {
                return Err(LinalgError::ContextMismatch.into());
            }
        }
        Ok(FFEnsemble { ctx, d, vectors, gabor: None })
    }

    pub fn with_gabor(mut self, meta: GaborMeta) -> Self {
        self.gabor = Some(meta);
        self
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[FFVector] {
        &self.vectors
    }

    pub fn gabor(&self) -> Option<&GaborMeta> {
        self.gabor.as_ref()
    }

    /// Concatenation; construction metadata is dropped.
    pub fn union(&self, other: &FFEnsemble) -> Result<Self> {
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        FFEnsemble::new(self.ctx.clone(), self.d, vectors)
    }

    /// Every vector multiplied by `s`; construction metadata is dropped.
    pub fn scaled(&self, s: &FieldElement) -> Self {
        let vectors = self.vectors.iter().map(|v| v.scale(s)).collect();
        FFEnsemble { ctx: self.ctx.clone(), d: self.d, vectors, gabor: None }
    }

    fn cost(&self, d_power: u32, n_power: u32) -> u128 {
        (self.d as u128).pow(d_power) * (self.n() as u128).pow(n_power)
    }

    fn conj_supports(&self) -> Vec<Vec<(usize, FieldElement)>> {
        self.vectors.par_iter().map(|v| support(v).into_iter().map(|(i, e)| (i, self.ctx.conj(&e))).collect()).collect()
    }
}

/// `Σ_i cx_i · y_i` where `cx` already holds conjugated nonzero entries.
fn sparse_dot(ctx: &FieldCtx, cx: &[(usize, FieldElement)], y: &FFVector) -> FieldElement {
    let mut acc = ctx.acc_buffer();
    for (i, c) in cx {
        let yi = y.get(*i);
        if !yi.is_zero() {
            ctx.mul_acc(&mut acc, c, yi);
        }
    }
    ctx.reduce_acc(&mut acc)
}

/// Frame operator `S = Σ x_k x_k*`, computed from the supports.
pub fn frame_operator(ens: &FFEnsemble) -> FFMatrix {
    let ctx = &ens.ctx;
    let d = ens.d;
    let mut bank = AccBank::new(ctx, d * d);
    for v in &ens.vectors {
        let s = support(v);
        let cs: Vec<FieldElement> = s.iter().map(|(_, e)| ctx.conj(e)).collect();
        for (i, xi) in &s {
            for ((j, _), cxj) in s.iter().zip(&cs) {
                bank.add(i * d + j, xi, cxj);
            }
        }
        bank.tick();
    }
    FFMatrix::from_entries(ctx.clone(), d, d, bank.finish()).expect("shape")
}

/// Returns `c` when `{x_k}` is a `c`-tight frame for `V` (all of `F^d` when
/// `subspace` is `None`).
pub fn check_tight_frame(ens: &FFEnsemble, subspace: Option<&[FFVector]>) -> Result<Option<FieldElement>> {
    let ctx = &ens.ctx;
    let (proj, dim) = match subspace {
        None => (FFMatrix::identity(ctx.clone(), ens.d), ens.d),
        Some(basis) => {
            let b = FFMatrix::from_columns(ctx.clone(), ens.d, basis)?;
            if b.rank() < basis.len() {
                return Err(DesignError::PreconditionViolated("subspace basis is linearly dependent".into()));
            }
            let bstar = b.conj_transpose();
            let gram = bstar.matmul(&b)?;
            let ginv = gram.inverse().map_err(|_| DesignError::DegenerateSubspace)?;
            (b.matmul(&ginv)?.matmul(&bstar)?, basis.len())
        }
    };
    if subspace.is_some() {
        for x in &ens.vectors {
            if proj.matvec(x)? != *x {
                return Ok(None);
            }
        }
    }
    let s = frame_operator(ens);
    let c = match proj.entries().iter().position(|e| !e.is_zero()) {
        Some(idx) => ctx.div(&s.entries()[idx], &proj.entries()[idx])?,
        None => ctx.zero(),
    };
    if s != proj.scale(&c) || ctx.conj(&c) != c {
        return Ok(None);
    }
    if c.is_zero() && crate::fflinalg::rank_of(&ens.vectors)? != dim {
        return Ok(None);
    }
    Ok(Some(c))
}

/// ETF parameters `(a, b, c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtfParams {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
}

/// Why an ensemble is not an ETF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtfFailure {
    Empty,
    UnequalNorm {
        k: usize,
    },
    UnequalAngle {
        k: usize,
        l: usize,
    },
    NotTight,
    /// A parameter relation that every ETF satisfies failed; this indicates
    /// a bug rather than a property of the input.
    RelationViolated(&'static str),
}

impl fmt::Display for EtfFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EtfFailure::Empty => write!(f, "empty ensemble"),
            EtfFailure::UnequalNorm { k } => write!(f, "norm of vector {k} differs from vector 0"),
            EtfFailure::UnequalAngle { k, l } => write!(f, "angle of pair ({k}, {l}) differs"),
            EtfFailure::NotTight => write!(f, "not a tight frame"),
            EtfFailure::RelationViolated(which) => write!(f, "parameter relation {which} fails"),
        }
    }
}

/// Common norm `<x_k, x_k>` or the first vector that deviates.
pub fn common_norm(ens: &FFEnsemble) -> std::result::Result<FieldElement, EtfFailure> {
    let supports = ens.conj_supports();
    common_norm_from(ens, &supports)
}

fn common_norm_from(
    ens: &FFEnsemble,
    supports: &[Vec<(usize, FieldElement)>],
) -> std::result::Result<FieldElement, EtfFailure> {
    let ctx = &ens.ctx;
    let norms: Vec<FieldElement> = ens.vectors.par_iter().zip(supports).map(|(v, s)| sparse_dot(ctx, s, v)).collect();
    let a = norms.first().ok_or(EtfFailure::Empty)?.clone();
    match norms.iter().position(|x| *x != a) {
        Some(k) => Err(EtfFailure::UnequalNorm { k }),
        None => Ok(a),
    }
}

/// Common angle `<x_k, x_l>^{q+1}` over all pairs `k != l`, or the first
/// deviating pair. A single vector has angle 0 by convention.
pub fn common_angle(ens: &FFEnsemble) -> std::result::Result<FieldElement, EtfFailure> {
    let supports = ens.conj_supports();
    common_angle_from(ens, &supports)
}

fn common_angle_from(
    ens: &FFEnsemble,
    supports: &[Vec<(usize, FieldElement)>],
) -> std::result::Result<FieldElement, EtfFailure> {
    let ctx = &ens.ctx;
    let n = ens.n();
    if n == 0 {
        return Err(EtfFailure::Empty);
    }
    if n == 1 {
        return Ok(ctx.zero());
    }
    let b = ctx.norm(&sparse_dot(ctx, &supports[0], &ens.vectors[1]));
    let bad = (0..n).into_par_iter().find_map_first(|k| {
        (k + 1..n).find(|&l| ctx.norm(&sparse_dot(ctx, &supports[k], &ens.vectors[l])) != b).map(|l| (k, l))
    });
    match bad {
        Some((k, l)) => Err(EtfFailure::UnequalAngle { k, l }),
        None => Ok(b),
    }
}

/// Cross-checks the relations `n·a = c·dim V` and `a(c - a) = (n - 1)·b`.
fn check_relations(ctx: &FieldCtx, n: usize, dim: usize, p: &EtfParams) -> std::result::Result<(), EtfFailure> {
    let n_el = ctx.from_int((n % ctx.p() as usize) as i64);
    let dim_el = ctx.from_int((dim % ctx.p() as usize) as i64);
    if ctx.mul(&n_el, &p.a) != ctx.mul(&p.c, &dim_el) {
        return Err(EtfFailure::RelationViolated("na = c dim V"));
    }
    let lhs = ctx.mul(&p.a, &ctx.sub(&p.c, &p.a));
    let rhs = ctx.mul(&ctx.sub(&n_el, &ctx.one()), &p.b);
    if n >= 2 && lhs != rhs {
        return Err(EtfFailure::RelationViolated("a(c - a) = (n - 1) b"));
    }
    Ok(())
}

/// Full exact ETF check over all `n(n-1)/2` pairs.
pub fn check_etf(ens: &FFEnsemble) -> std::result::Result<EtfParams, EtfFailure> {
    let supports = ens.conj_supports();
    let a = common_norm_from(ens, &supports)?;
    let b = common_angle_from(ens, &supports)?;
    let c = match check_tight_frame(ens, None) {
        Ok(Some(c)) => c,
        _ => return Err(EtfFailure::NotTight),
    };
    let params = EtfParams { a, b, c };
    check_relations(&ens.ctx, ens.n(), ens.d, &params)?;
    Ok(params)
}

/// Outcome of the Gerzon-bound audit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GerzonReport {
    pub n: usize,
    pub d: usize,
    /// `n <= d^2`.
    pub bound_holds: bool,
    /// Rank of `{x_k x_k*}`, computed when `n = d^2`.
    pub span_rank: Option<usize>,
    /// At equality: the rank is `d^2` (a != 0) or `d^2 - 1` (a = 0).
    pub span_as_expected: Option<bool>,
    /// At equality with `a = 0`: `Σ x_k x_k* = 0` is the only dependency.
    pub unique_dependency: Option<bool>,
}

/// Audits the Gerzon bound for an `(a, b)`-equiangular system with `a^2 != b`.
pub fn check_gerzon(ens: &FFEnsemble, a: &FieldElement, b: &FieldElement) -> Result<GerzonReport> {
    let ctx = &ens.ctx;
    if ctx.mul(a, a) == *b {
        return Err(DesignError::PreconditionViolated("a^2 = b".into()));
    }
    let supports = ens.conj_supports();
    if common_norm_from(ens, &supports).map_or(true, |x| x != *a)
        || common_angle_from(ens, &supports).map_or(true, |x| ens.n() > 1 && x != *b)
    {
        return Err(DesignError::PreconditionViolated(
            "ensemble is not an equiangular system with the given parameters".into(),
        ));
    }
    let (n, d) = (ens.n(), ens.d);
    let mut report = GerzonReport {
        n,
        d,
        bound_holds: n <= d * d,
        span_rank: None,
        span_as_expected: None,
        unique_dependency: None,
    };
    if n != d * d {
        return Ok(report);
    }
    let columns: Vec<FFVector> =
        ens.vectors.iter().map(|x| x.outer(x).map(|m| m.vectorize())).collect::<std::result::Result<_, _>>()?;
    let ech = FFMatrix::from_columns(ctx.clone(), d * d, &columns)?.echelon();
    report.span_rank = Some(ech.rank);
    if a.is_zero() {
        report.span_as_expected = Some(ech.rank == d * d - 1);
        let unique = match ech.nullspace.as_slice() {
            [v] => {
                let first = v.get(0);
                !first.is_zero() && v.entries().iter().all(|e| e == first)
            }
            _ => false,
        };
        report.unique_dependency = Some(unique);
    } else {
        report.span_as_expected = Some(ech.rank == d * d);
    }
    Ok(report)
}

/// `rank {x_k ⊗ x_k} = d(d+1)/2`, the span condition for symmetric tensors.
fn spans_symmetric_tensors(ens: &FFEnsemble) -> Result<bool> {
    let d = ens.d;
    let tensors: Vec<FFVector> = ens.vectors.iter().map(|x| x.tensor(x)).collect::<std::result::Result<_, _>>()?;
    Ok(crate::fflinalg::rank_of(&tensors)? == d * (d + 1) / 2)
}

fn design_preconditions(ens: &FFEnsemble, cost: u128, budget: u128) -> Result<()> {
    if ens.ctx.p() == 2 {
        return Err(DesignError::EvenCharacteristic);
    }
    if cost > budget {
        return Err(DesignError::BudgetExceeded { cost, budget });
    }
    if ens.d == 0 {
        return Err(DesignError::PreconditionViolated("dimension 0".into()));
    }
    Ok(())
}

/// `c2` when `Σ (x_k⊗x_k)(x_k⊗x_k)* = c2·Π` with the span condition, using the
/// explicit `d^2 × d^2` moment matrix. Default budget.
pub fn check_2design_naive(ens: &FFEnsemble) -> Result<Option<FieldElement>> {
    check_2design_naive_within(ens, NAIVE_BUDGET)
}

pub fn check_2design_naive_within(ens: &FFEnsemble, budget: u128) -> Result<Option<FieldElement>> {
    design_preconditions(ens, ens.cost(4, 1), budget)?;
    let ctx = &ens.ctx;
    let d = ens.d;
    let dd = d * d;
    let mut bank = AccBank::new(ctx, dd * dd);
    for x in &ens.vectors {
        let s = support(x);
        let t: Vec<(usize, FieldElement)> = s
            .iter()
            .flat_map(|(i, xi)| s.iter().map(move |(j, xj)| (i * d + j, (xi, xj))))
            .map(|(r, (xi, xj))| (r, ctx.mul(xi, xj)))
            .collect();
        let ct: Vec<FieldElement> = t.iter().map(|(_, e)| ctx.conj(e)).collect();
        for (r, tr) in &t {
            for ((c, _), tc) in t.iter().zip(&ct) {
                bank.add(r * dd + c, tr, tc);
            }
        }
        bank.tick();
    }
    let m = bank.finish();
    let c2 = m[0].clone();
    let half_c2 = ctx.div(&c2, &ctx.from_int(2))?;
    let zero = ctx.zero();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let hits = usize::from(i == k && j == l) + usize::from(i == l && j == k);
                    let want = match hits {
                        0 => zero.clone(),
                        1 => half_c2.clone(),
                        _ => c2.clone(),
                    };
                    if m[(i * d + j) * dd + k * d + l] != want {
                        return Ok(None);
                    }
                }
            }
        }
    }
    if c2.is_zero() && !spans_symmetric_tensors(ens)? {
        return Ok(None);
    }
    Ok(Some(c2))
}

/// `c2` via the map `Ψ(e_i e_j*) = Σ_k conj(x_k[j]) x_k[i] x_k x_k*`, which must
/// equal `(c2/2)(e_j e_i* + δ_ij I)`. Default budget.
pub fn check_2design_psi(ens: &FFEnsemble) -> Result<Option<FieldElement>> {
    check_2design_psi_within(ens, PSI_BUDGET)
}

pub fn check_2design_psi_within(ens: &FFEnsemble, budget: u128) -> Result<Option<FieldElement>> {
    design_preconditions(ens, ens.cost(4, 1), budget)?;
    let ctx = &ens.ctx;
    let d = ens.d;
    let mut bank = AccBank::new(ctx, d * d * d * d);
    for x in &ens.vectors {
        let s = support(x);
        // Nonzero entries of x x*: (i, j) -> x_i conj(x_j).
        let g: Vec<(usize, FieldElement)> = s
            .iter()
            .flat_map(|(i, xi)| s.iter().map(move |(j, xj)| (i * d + j, xi, xj)))
            .map(|(ij, xi, xj)| (ij, ctx.mul(xi, &ctx.conj(xj))))
            .collect();
        for (ij, gij) in &g {
            for (ab, gab) in &g {
                bank.add(ij * d * d + ab, gij, gab);
            }
        }
        bank.tick();
    }
    let psi = bank.finish();
    let c2 = psi[0].clone();
    let half_c2 = ctx.div(&c2, &ctx.from_int(2))?;
    let zero = ctx.zero();
    for i in 0..d {
        for j in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let hits = usize::from(j == a && i == b) + usize::from(i == j && a == b);
                    let want = match hits {
                        0 => zero.clone(),
                        1 => half_c2.clone(),
                        _ => c2.clone(),
                    };
                    if psi[((i * d + j) * d + a) * d + b] != want {
                        return Ok(None);
                    }
                }
            }
        }
    }
    if c2.is_zero() && !spans_symmetric_tensors(ens)? {
        return Ok(None);
    }
    Ok(Some(c2))
}

/// Verification path attached to a claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    NaiveTensor,
    PsiMap,
    TheoremRoute,
    StructuralGabor,
    FullGram,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::NaiveTensor => "naive-tensor",
            Method::PsiMap => "psi-map",
            Method::TheoremRoute => "theorem-route",
            Method::StructuralGabor => "structural-gabor",
            Method::FullGram => "full-gram",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        [Method::NaiveTensor, Method::PsiMap, Method::TheoremRoute, Method::StructuralGabor, Method::FullGram]
            .into_iter()
            .find(|m| m.tag() == tag)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Design parameters `(a, c1, c2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignParams {
    pub a: FieldElement,
    pub c1: FieldElement,
    pub c2: FieldElement,
}

/// Reasons a tight-design certificate was not issued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertFailure {
    EvenCharacteristic,
    SizeNotSquare { n: usize, d: usize },
    NotEtf(EtfFailure),
    ASquaredEqualsB,
    RelationFails,
    CharacteristicConditionFails,
    BudgetExceeded,
    CrossCheckMismatch,
    Error(String),
}

impl fmt::Display for CertFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertFailure::EvenCharacteristic => write!(f, "design claims need odd characteristic"),
            CertFailure::SizeNotSquare { n, d } => write!(f, "n = {n} differs from d^2 = {}", d * d),
            CertFailure::NotEtf(e) => write!(f, "not an ETF: {e}"),
            CertFailure::ASquaredEqualsB => write!(f, "a^2 = b"),
            CertFailure::RelationFails => write!(f, "a^2 - b != b c1 / a"),
            CertFailure::CharacteristicConditionFails => write!(f, "a = 0 but d != -1 mod p"),
            CertFailure::BudgetExceeded => write!(f, "verification exceeds the compute budget"),
            CertFailure::CrossCheckMismatch => write!(f, "independent Ψ-map check disagrees"),
            CertFailure::Error(e) => write!(f, "{e}"),
        }
    }
}

/// Verified claims about a finite-field ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FFCertificate {
    pub n: usize,
    pub d: usize,
    pub tight_frame: Option<FieldElement>,
    pub ntf: Option<(FieldElement, FieldElement)>,
    pub equiangular: Option<(FieldElement, FieldElement)>,
    pub etf: Option<EtfParams>,
    pub etf_method: Option<Method>,
    pub design: Option<DesignParams>,
    pub method: Option<Method>,
    /// Independent verification of the design claim, when run.
    pub cross_check: Option<Method>,
    pub failures: Vec<CertFailure>,
}

fn structural_applicable(ens: &FFEnsemble) -> bool {
    let Some(meta) = ens.gabor() else { return false };
    let d = meta.set.modulus() as u64;
    ens.ctx.subfield_order().is_ok_and(|q| crate::field::divides(d, &(q + 1u32)))
}

/// Certifies a tight projective 2-design from `n = d^2` and ETF parameters
/// `(a, b, c1)` satisfying `a^2 != b`, `a^2 - b = b c1 / a` when `a != 0` and
/// `d = -1 mod p` when `a = 0`; then `c2 = 2(a^2 - b)`.
pub fn certify_tight_2design(ens: &FFEnsemble) -> FFCertificate {
    let ctx = &ens.ctx;
    let (n, d) = (ens.n(), ens.d);
    let mut cert = FFCertificate {
        n,
        d,
        tight_frame: None,
        ntf: None,
        equiangular: None,
        etf: None,
        etf_method: None,
        design: None,
        method: None,
        cross_check: None,
        failures: Vec::new(),
    };

    if structural_applicable(ens) {
        match structural_gabor_verify(ens) {
            Ok(Some(p)) => {
                cert.etf = Some(p);
                cert.etf_method = Some(Method::StructuralGabor);
            }
            Ok(None) => cert.failures.push(CertFailure::NotEtf(EtfFailure::NotTight)),
            Err(e) => cert.failures.push(CertFailure::Error(e.to_string())),
        }
    } else if ens.cost(1, 2) <= GRAM_BUDGET {
        let supports = ens.conj_supports();
        let a = common_norm_from(ens, &supports);
        let b = common_angle_from(ens, &supports);
        cert.tight_frame = check_tight_frame(ens, None).ok().flatten();
        match check_etf(ens) {
            Ok(p) => {
                cert.etf = Some(p);
                cert.etf_method = Some(Method::FullGram);
            }
            Err(e) => cert.failures.push(CertFailure::NotEtf(e)),
        }
        if let (Ok(a), Some(c)) = (&a, &cert.tight_frame) {
            cert.ntf = Some((a.clone(), c.clone()));
        }
        if let (Ok(a), Ok(b)) = (a, b) {
            cert.equiangular = Some((a, b));
        }
    } else {
        cert.failures.push(CertFailure::BudgetExceeded);
    }
    if let Some(p) = &cert.etf {
        cert.tight_frame = Some(p.c.clone());
        cert.ntf = Some((p.a.clone(), p.c.clone()));
        cert.equiangular = Some((p.a.clone(), p.b.clone()));
    }

    if ctx.p() == 2 {
        cert.failures.push(CertFailure::EvenCharacteristic);
        return cert;
    }
    if n != d * d {
        cert.failures.push(CertFailure::SizeNotSquare { n, d });
    }
    let Some(EtfParams { a, b, c }) = cert.etf.clone() else { return cert };
    let a2 = ctx.mul(&a, &a);
    let gap = ctx.sub(&a2, &b);
    if gap.is_zero() {
        cert.failures.push(CertFailure::ASquaredEqualsB);
    }
    if a.is_zero() {
        if (d + 1) % ctx.p() as usize != 0 {
            cert.failures.push(CertFailure::CharacteristicConditionFails);
        }
    } else if gap != ctx.div(&ctx.mul(&b, &c), &a).expect("a != 0") {
        cert.failures.push(CertFailure::RelationFails);
    }
    if !cert.failures.is_empty() {
        return cert;
    }
    let params = DesignParams { a, c1: c, c2: ctx.scale_int(&gap, 2) };
    if ens.cost(4, 1) <= PSI_BUDGET {
        match check_2design_psi(ens) {
            Ok(Some(c2)) if c2 == params.c2 => cert.cross_check = Some(Method::PsiMap),
            _ => {
                cert.failures.push(CertFailure::CrossCheckMismatch);
                return cert;
            }
        }
    }
    cert.design = Some(params);
    cert.method = Some(Method::TheoremRoute);
    cert
}

/// Checks all three design conditions, choosing the moment check by size:
/// explicit tensors for `d <= 8`, the Ψ map within its budget, and the
/// tight-design certificate beyond that.
pub fn check_projective_2design(ens: &FFEnsemble) -> Result<Option<(DesignParams, Method)>> {
    if ens.ctx.p() == 2 {
        return Err(DesignError::EvenCharacteristic);
    }
    if ens.d <= 8 && ens.cost(4, 1) <= NAIVE_BUDGET || ens.cost(4, 1) <= PSI_BUDGET {
        let Ok(a) = common_norm(ens) else { return Ok(None) };
        let Some(c1) = check_tight_frame(ens, None)? else { return Ok(None) };
        let (c2, method) = if ens.d <= 8 && ens.cost(4, 1) <= NAIVE_BUDGET {
            (check_2design_naive(ens)?, Method::NaiveTensor)
        } else {
            (check_2design_psi(ens)?, Method::PsiMap)
        };
        return Ok(c2.map(|c2| (DesignParams { a, c1, c2 }, method)));
    }
    let cert = certify_tight_2design(ens);
    if cert.failures.contains(&CertFailure::BudgetExceeded) {
        return Err(DesignError::BudgetExceeded { cost: ens.cost(4, 1), budget: PSI_BUDGET });
    }
    Ok(cert.design.map(|p| (p, Method::TheoremRoute)))
}

/// Checks `A = (2/c2) Σ x_k x_k* A x_k x_k* - tr(A)·I` exactly.
pub fn decomposition_of_a_check(ens: &FFEnsemble, c2: &FieldElement, a_mat: &FFMatrix) -> Result<bool> {
    let ctx = &ens.ctx;
    if c2.is_zero() {
        return Err(DesignError::ZeroC2);
    }
    let d = ens.d;
    if a_mat.rows() != d || a_mat.cols() != d {
        return Err(LinalgError::DimensionMismatch(format!("A is {}x{}", a_mat.rows(), a_mat.cols())).into());
    }
    let mut bank = AccBank::new(ctx, d * d);
    let mut acc = ctx.acc_buffer();
    for x in &ens.vectors {
        let s = support(x);
        let cs: Vec<FieldElement> = s.iter().map(|(_, e)| ctx.conj(e)).collect();
        // x* A x over the support.
        for ((i, _), cxi) in s.iter().zip(&cs) {
            for (j, xj) in &s {
                let aij = a_mat.get(*i, *j);
                if !aij.is_zero() {
                    ctx.mul_acc(&mut acc, &ctx.mul(cxi, aij), xj);
                }
            }
        }
        let xax = ctx.reduce_acc(&mut acc);
        if xax.is_zero() {
            continue;
        }
        for (i, xi) in &s {
            let w = ctx.mul(&xax, xi);
            for ((j, _), cxj) in s.iter().zip(&cs) {
                bank.add(i * d + j, &w, cxj);
            }
        }
        bank.tick();
    }
    let sum = FFMatrix::from_entries(ctx.clone(), d, d, bank.finish())?;
    let scale = ctx.div(&ctx.from_int(2), c2)?;
    let rhs = sum.scale(&scale).sub(&FFMatrix::identity(ctx.clone(), d).scale(&a_mat.trace()))?;
    Ok(rhs == *a_mat)
}

/// For a tight frame with constant 0, asserts `n >= 2 dim V` (here `V = F^d`).
pub fn check_vanishing_bound(ens: &FFEnsemble) -> Result<bool> {
    match check_tight_frame(ens, None)? {
        Some(c) if c.is_zero() => Ok(ens.n() >= 2 * ens.d),
        _ => Err(DesignError::PreconditionViolated("not a tight frame with constant 0".into())),
    }
}
