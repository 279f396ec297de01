//! Linear maps `C^{d×d} → C^{m×m}` given by Kraus operators or a Choi matrix,
//! and the correspondence between weighted 2-designs and rank-one Kraus
//! decompositions of the depolarizing channel.

use std::sync::OnceLock;

use num_complex::Complex64;

use super::{
    check_weighted_2design, kron, max_norm, outer_sum, sym_projector, CEnsemble, CMatrix, CVector, ComplexError, Result,
};

/// Singular-value ratio below which an operator counts as rank one.
pub const RANK_ONE_RATIO: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum Representation {
    /// `Φ(X) = Σ R_k X R_k*`.
    Kraus(Vec<CMatrix>),
    /// `C_Φ = Σ_{i,j} e_i e_j* ⊗ Φ(e_i e_j*)`.
    Choi(CMatrix),
}

#[derive(Clone, Debug)]
pub struct Channel {
    d_in: usize,
    d_out: usize,
    repr: Representation,
    choi: OnceLock<CMatrix>,
}

impl Channel {
    /// Every operator must be `m × d`.
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| ComplexError::DimensionMismatch("empty Kraus list".into()))?;
        let (m, d) = first.shape();
        if let Some(k) = kraus.iter().position(|r| r.shape() != (m, d)) {
            return Err(ComplexError::DimensionMismatch(format!("Kraus operator {k} is not {m}×{d}")));
        }
        Ok(Channel { d_in: d, d_out: m, repr: Representation::Kraus(kraus), choi: OnceLock::new() })
    }

    pub fn from_choi(d_in: usize, d_out: usize, choi: CMatrix) -> Result<Self> {
        let n = d_in * d_out;
        if choi.shape() != (n, n) {
            return Err(ComplexError::DimensionMismatch(format!("Choi matrix must be {n}×{n}")));
        }
        Ok(Channel { d_in, d_out, repr: Representation::Choi(choi), choi: OnceLock::new() })
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn kraus(&self) -> Option<&[CMatrix]> {
        match &self.repr {
            Representation::Kraus(k) => Some(k),
            Representation::Choi(_) => None,
        }
    }

    /// The Choi matrix, computed once for Kraus channels.
    pub fn choi(&self) -> &CMatrix {
        match &self.repr {
            Representation::Choi(c) => c,
            Representation::Kraus(k) => self.choi.get_or_init(|| choi_from_kraus(k)),
        }
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        assert_eq!(x.shape(), (self.d_in, self.d_in), "input must be d_in × d_in");
        match &self.repr {
            Representation::Kraus(kraus) => {
                kraus.iter().fold(CMatrix::zeros(self.d_out, self.d_out), |acc, r| acc + r * x * r.adjoint())
            }
            Representation::Choi(c) => {
                let m = self.d_out;
                let mut out = CMatrix::zeros(m, m);
                for i in 0..self.d_in {
                    for j in 0..self.d_in {
                        let xij = x[(i, j)];
                        if xij != Complex64::default() {
                            out += c.view((i * m, j * m), (m, m)) * xij;
                        }
                    }
                }
                out
            }
        }
    }

    /// Trace-preservation residual: `‖Σ R* R - I‖` for Kraus lists, and the
    /// partial trace of the Choi matrix over the output minus `I` otherwise.
    pub fn completeness_residual(&self) -> f64 {
        match &self.repr {
            Representation::Kraus(kraus) => {
                let sum = kraus.iter().fold(CMatrix::zeros(self.d_in, self.d_in), |acc, r| acc + r.adjoint() * r);
                max_norm(&(sum - CMatrix::identity(self.d_in, self.d_in)))
            }
            Representation::Choi(c) => {
                let m = self.d_out;
                let reduced =
                    CMatrix::from_fn(self.d_in, self.d_in, |i, j| (0..m).map(|k| c[(i * m + k, j * m + k)]).sum());
                max_norm(&(reduced - CMatrix::identity(self.d_in, self.d_in)))
            }
        }
    }

    /// Largest residual of `self` against `other` over the basis `e_i e_j*`.
    pub fn distance_on_basis(&self, other: &Channel) -> f64 {
        assert_eq!((self.d_in, self.d_out), (other.d_in, other.d_out));
        let mut worst = 0.0f64;
        for i in 0..self.d_in {
            for j in 0..self.d_in {
                let e = unit_matrix(self.d_in, i, j);
                worst = worst.max(max_norm(&(self.apply(&e) - other.apply(&e))));
            }
        }
        worst
    }
}

fn unit_matrix(d: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(d, d);
    e[(i, j)] = Complex64::new(1.0, 0.0);
    e
}

/// Vectorization `v[i·m + k] = R[k, i]`, so that `R = a b^T` maps to `b ⊗ a`.
fn column_stack(r: &CMatrix) -> CVector {
    let (m, d) = r.shape();
    CVector::from_fn(d * m, |idx, _| r[(idx % m, idx / m)])
}

/// `C_Φ` for `Φ(X) = Σ R_k X R_k*`, which is `Σ vec(R_k) vec(R_k)*`.
pub fn choi_from_kraus(kraus: &[CMatrix]) -> CMatrix {
    let Some(first) = kraus.first() else { return CMatrix::zeros(0, 0) };
    let (m, d) = first.shape();
    let terms: Vec<(f64, CVector)> = kraus.iter().map(|r| (1.0, column_stack(r))).collect();
    outer_sum(d * m, &terms)
}

/// `X ↦ (X + tr X · I)/(d + 1)`.
pub fn depolarizing_channel(d: usize) -> Channel {
    assert!(d >= 1, "dimension must be positive");
    let scale = 1.0 / (d as f64 + 1.0);
    let choi = CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, k, j, l) = (r / d, r % d, c / d, c % d);
        // block (i, j) is (e_i e_j* + δ_ij I)/(d + 1)
        let hits = u8::from(k == i && l == j) + u8::from(i == j && k == l);
        Complex64::new(scale * f64::from(hits), 0.0)
    });
    Channel::from_choi(d, d, choi).expect("square Choi matrix")
}

/// Dominant singular triple `(σ_1, u, v)` by power iteration, with the tail
/// ratio `‖R - σ_1 u v*‖_F / σ_1`, an upper bound for `σ_2 / σ_1`.
pub(crate) fn rank_one_factor(r: &CMatrix) -> (f64, CVector, CVector, f64) {
    let (m, d) = r.shape();
    let Some(j) = (0..d).max_by(|&a, &b| r.column(a).norm().total_cmp(&r.column(b).norm())) else {
        return (0.0, CVector::zeros(m), CVector::zeros(d), 0.0);
    };
    let start = r.column(j).norm();
    if start == 0.0 {
        let mut e = CVector::zeros(m);
        if m > 0 {
            e[0] = Complex64::new(1.0, 0.0);
        }
        return (0.0, e, CVector::zeros(d), 0.0);
    }
    let gram = r * r.adjoint();
    let mut u: CVector = r.column(j) / Complex64::new(start, 0.0);
    for _ in 0..200 {
        let w = &gram * &u;
        let next = &w / Complex64::new(w.norm(), 0.0);
        let moved = (&next - &u).norm();
        u = next;
        if moved < 1e-15 {
            break;
        }
    }
    let rv = r.adjoint() * &u;
    let sigma = rv.norm();
    let v = rv / Complex64::new(sigma, 0.0);
    let tail = (r - &u * v.adjoint() * Complex64::new(sigma, 0.0)).norm();
    (sigma, u, v, tail / sigma)
}

/// `X ↦ Φ(X)^T`. Rank-one Kraus terms `x y^T` are carried to `conj(x) y^T`;
/// anything else falls back to transposing the blocks of the Choi matrix.
pub fn transpose_compose(ch: &Channel) -> Channel {
    if let Some(kraus) = ch.kraus() {
        let factors: Vec<_> = kraus.iter().map(rank_one_factor).collect();
        if factors.iter().all(|f| f.3 < RANK_ONE_RATIO) {
            let transported = factors
                .into_iter()
                .map(|(sigma, u, v, _)| {
                    // R = σ u v* = x y^T with x = σ u and y = conj(v)
                    let x = u * Complex64::new(sigma, 0.0);
                    x.conjugate() * v.adjoint()
                })
                .collect();
            return Channel::from_kraus(transported).expect("shapes preserved");
        }
    }
    let (d, m) = (ch.d_in, ch.d_out);
    let c = ch.choi();
    let transposed = CMatrix::from_fn(d * m, d * m, |r, s| {
        let (i, k, j, l) = (r / m, r % m, s / m, s % m);
        c[(i * m + l, j * m + k)]
    });
    Channel::from_choi(d, m, transposed).expect("same shape")
}

/// Kraus operators `a_k b_k^T` once `Σ (b_k ⊗ a_k)(b_k ⊗ a_k)*` is checked
/// against `C_Φ`. Here `b_k ∈ C^d` and `a_k ∈ C^m`.
pub fn kraus_from_choi(ch: &Channel, terms: &[(CVector, CVector)], tol: f64) -> Result<Vec<CMatrix>> {
    let (d, m) = (ch.d_in, ch.d_out);
    if let Some(k) = terms.iter().position(|(a, b)| a.len() != m || b.len() != d) {
        return Err(ComplexError::DimensionMismatch(format!("term {k} does not have shape (C^{m}, C^{d})")));
    }
    let stacked: Vec<(f64, CVector)> = terms.iter().map(|(a, b)| (1.0, kron(b, a))).collect();
    let residual = max_norm(&(outer_sum(d * m, &stacked) - ch.choi()));
    if residual > tol {
        return Err(ComplexError::ChoiMismatch { residual });
    }
    Ok(terms.iter().map(|(a, b)| a * b.transpose()).collect())
}

/// Where a witness ensemble came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Sic,
    Mub,
    Imported,
    Pruned,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Sic => "SIC",
            Provenance::Mub => "MUB",
            Provenance::Imported => "imported",
            Provenance::Pruned => "pruned",
        }
    }
}

/// `ebr(𝔷_d) <= bound`, witnessed by a weighted 2-design of that size.
#[derive(Clone, Debug)]
pub struct EbrCertificate {
    pub d: usize,
    pub bound: usize,
    pub witness: CEnsemble,
    pub provenance: Provenance,
    pub tolerance: f64,
    pub moment_residual: f64,
    pub completeness_residual: f64,
    /// Over the basis `e_i e_j*` against the defining formula of `𝔷_d`.
    pub reconstruction_residual: f64,
    /// Largest `σ_2 / σ_1` among the Kraus operators.
    pub max_rank_ratio: f64,
}

impl EbrCertificate {
    pub fn holds(&self) -> bool {
        self.bound == self.witness.n()
            && self.max_rank_ratio < RANK_ONE_RATIO
            && [self.moment_residual, self.completeness_residual, self.reconstruction_residual]
                .iter()
                .all(|&r| r <= self.tolerance)
    }
}

/// The rank-one Kraus operators `R_k = sqrt(d w_k) conj(x_k) x_k^T` of `𝔷_d`
/// built from a weighted 2-design, with a certificate at tolerance `tol`.
pub fn design_to_kraus(ens: &CEnsemble, provenance: Provenance, tol: f64) -> Result<(Vec<CMatrix>, EbrCertificate)> {
    let moment_residual = check_weighted_2design(ens);
    if moment_residual > tol {
        return Err(ComplexError::NotADesign { residual: moment_residual });
    }
    let d = ens.d();
    let kraus: Vec<CMatrix> = ens
        .vectors()
        .iter()
        .zip(ens.weights())
        .map(|(x, &w)| x.conjugate() * x.transpose() * Complex64::new((d as f64 * w).sqrt(), 0.0))
        .collect();
    let channel = Channel::from_kraus(kraus.clone())?;
    let max_rank_ratio = kraus.iter().map(|r| rank_one_factor(r).3).fold(0.0, f64::max);
    let cert = EbrCertificate {
        d,
        bound: ens.n(),
        witness: ens.clone(),
        provenance,
        tolerance: tol,
        moment_residual,
        completeness_residual: channel.completeness_residual(),
        reconstruction_residual: channel.distance_on_basis(&depolarizing_channel(d)),
        max_rank_ratio,
    };
    Ok((kraus, cert))
}

/// Recovers a weighted 2-design from rank-one Kraus operators `a_k b_k^T` of
/// `T ∘ 𝔷_d`. Each `b_k ⊗ a_k` must be symmetric; the unit vector is its
/// dominant singular vector with the first nonzero coordinate made real
/// positive, and the weight is `σ_1^2 / d`.
pub fn kraus_to_design(kraus: &[CMatrix], tol: f64) -> Result<CEnsemble> {
    let first = kraus.first().ok_or_else(|| ComplexError::DimensionMismatch("empty Kraus list".into()))?;
    let d = first.nrows();
    if let Some(k) = kraus.iter().position(|r| r.shape() != (d, d)) {
        return Err(ComplexError::DimensionMismatch(format!("Kraus operator {k} is not {d}×{d}")));
    }
    let stacked: Vec<CVector> = kraus.iter().map(column_stack).collect();
    for (k, t) in stacked.iter().enumerate() {
        let residual = (0..d * d).map(|idx| (t[idx] - t[(idx % d) * d + idx / d]).norm() / 2.0).fold(0.0, f64::max);
        if residual > tol {
            return Err(ComplexError::AsymmetricTerm { k, residual });
        }
    }
    let terms: Vec<(f64, CVector)> = stacked.iter().map(|t| (1.0, t.clone())).collect();
    let target = sym_projector(d) * Complex64::new(2.0 / (d as f64 + 1.0), 0.0);
    let residual = max_norm(&(outer_sum(d * d, &terms) - target));
    if residual > tol {
        return Err(ComplexError::ChoiMismatch { residual });
    }

    let mut vectors = Vec::with_capacity(kraus.len());
    let mut weights = Vec::with_capacity(kraus.len());
    for t in &stacked {
        // t = sqrt(d w) x ⊗ x reshaped is sqrt(d w) x x^T
        let square = CMatrix::from_fn(d, d, |i, j| t[i * d + j]);
        let (sigma, u, _, _) = rank_one_factor(&square);
        vectors.push(fix_phase(u));
        weights.push(sigma * sigma / d as f64);
    }
    CEnsemble::with_weights(d, vectors, weights)
}

/// Rotates `x` so its first coordinate of modulus above `1e-8` is real positive.
pub fn fix_phase(x: CVector) -> CVector {
    match x.iter().find(|z| z.norm() > 1e-8) {
        Some(&z) => x * (z.conj() / z.norm()),
        None => x,
    }
}
