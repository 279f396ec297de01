//! Singer difference sets, harmonic ETFs and the Gabor ensembles
//! `{M^s T^t 1_D}` built from them.

use std::sync::Arc;

use rayon::prelude::*;

use super::{check_relations, check_tight_frame, DesignError, EtfParams, FFEnsemble, Result};
use crate::fflinalg::FFVector;
use crate::field::factor::{is_prime_u64, prime_power};
use crate::field::{build_field, divides, FieldCtx, FieldElement, FieldError};

/// A `(d, |D|, λ)` difference set in `Z/dZ`, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    modulus: usize,
    elements: Vec<usize>,
    lambda: usize,
}

impl DifferenceSet {
    /// Validates `elements` exhaustively.
    pub fn new(modulus: usize, elements: Vec<usize>) -> Result<Self> {
        let mut elements: Vec<usize> = elements.into_iter().map(|x| x % modulus.max(1)).collect();
        elements.sort_unstable();
        elements.dedup();
        let lambda = verify_difference_set(modulus, &elements).ok_or(DesignError::NotADifferenceSet(modulus))?;
        Ok(DifferenceSet { modulus, elements, lambda })
    }

    /// Like [`DifferenceSet::new`] but also insists on a claimed `λ`.
    pub fn with_lambda(modulus: usize, elements: Vec<usize>, lambda: usize) -> Result<Self> {
        let set = Self::new(modulus, elements)?;
        if set.lambda != lambda {
            return Err(DesignError::NotADifferenceSet(modulus));
        }
        Ok(set)
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn contains(&self, x: usize) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }
}

/// `λ` if every nonzero residue is a difference of exactly `λ` ordered pairs of
/// distinct elements and `|D|(|D|-1) = λ(d-1)`.
pub fn verify_difference_set(modulus: usize, elements: &[usize]) -> Option<usize> {
    if modulus < 2 || elements.iter().any(|&x| x >= modulus) {
        return None;
    }
    let mut counts = vec![0usize; modulus];
    for &x in elements {
        for &y in elements {
            if x != y {
                counts[(x + modulus - y) % modulus] += 1;
            }
        }
    }
    let lambda = counts[1];
    let k = elements.len();
    (counts[1..].iter().all(|&c| c == lambda) && k * k.saturating_sub(1) == lambda * (modulus - 1)).then_some(lambda)
}

/// Lexicographically least translate of a set mod `d` (its minimum is then 0).
fn canonical_translate(d: usize, set: &[usize]) -> Vec<usize> {
    set.iter()
        .map(|&shift| {
            let mut t: Vec<usize> = set.iter().map(|&x| (x + d - shift) % d).collect();
            t.sort_unstable();
            t
        })
        .min()
        .unwrap_or_default()
}

/// The Singer set `{i : Tr(β^i) = 0}` of the plane `PG(2, r)`, with `β`
/// primitive in `F_{r^3}` and `Tr` the trace to `F_r`, in canonical translate.
pub fn singer_difference_set(r: u64) -> Result<DifferenceSet> {
    let (p, e) = prime_power(r).ok_or(DesignError::NotPrimePower(r))?;
    let d = (r * r + r + 1) as usize;
    let ctx = build_field(p, 3 * e as usize)?;
    let beta = ctx.primitive_element()?;
    let mut set = Vec::with_capacity(r as usize + 1);
    let mut power = ctx.one();
    for i in 0..d {
        if ctx.subfield_trace(&power)?.is_zero() {
            set.push(i);
        }
        power = ctx.mul(&power, &beta);
    }
    let set = DifferenceSet::with_lambda(d, canonical_translate(d, &set), 1)?;
    debug_assert_eq!(set.elements.len() as u64, r + 1);
    Ok(set)
}

/// Construction record of a Gabor ensemble.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaborMeta {
    pub p: u64,
    pub k: usize,
    pub r: u64,
    pub set: DifferenceSet,
    pub alpha: FieldElement,
    pub omega: FieldElement,
}

/// `ω^j` for `j` in `0..d`.
fn powers(ctx: &FieldCtx, omega: &FieldElement, d: usize) -> Vec<FieldElement> {
    let mut out = Vec::with_capacity(d);
    let mut cur = ctx.one();
    for _ in 0..d {
        out.push(cur.clone());
        cur = ctx.mul(&cur, omega);
    }
    out
}

/// The orbit `{M^s T^t f}` for `s, t` in `Z/dZ`, listed with index `s·d + t`,
/// where `(Tf)(x) = f(x - 1)` and `(Mf)(x) = ω^x f(x)`.
pub fn heisenberg_orbit(ctx: &Arc<FieldCtx>, omega: &FieldElement, f: &FFVector) -> Result<FFEnsemble> {
    let d = f.len();
    let pw = powers(ctx, omega, d);
    let mut vectors = Vec::with_capacity(d * d);
    for s in 0..d {
        for t in 0..d {
            let entries = (0..d)
                .map(|x| {
                    let fx = f.get((x + d - t) % d);
                    if fx.is_zero() {
                        fx.clone()
                    } else {
                        ctx.mul(&pw[s * x % d], fx)
                    }
                })
                .collect();
            vectors.push(FFVector::new(ctx.clone(), entries)?);
        }
    }
    FFEnsemble::new(ctx.clone(), d, vectors)
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let (mut b, mut r) = (base as u128 % m as u128, 1u128 % m as u128);
    while exp > 0 {
        if exp & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    r as u64
}

fn check_gabor_hypotheses(p: u64, k: usize, r: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(FieldError::NonPrimeModulus(p).into());
    }
    if prime_power(r).is_none() {
        return Err(DesignError::NotPrimePower(r));
    }
    if !(r - 1).is_multiple_of(p) {
        return Err(DesignError::DivisibilityViolated(format!("{p} does not divide r - 1 = {}", r - 1)));
    }
    let d = r * r + r + 1;
    if !(pow_mod(p, k as u64, d) + 1).is_multiple_of(d) {
        return Err(DesignError::DivisibilityViolated(format!("{d} does not divide {p}^{k} + 1")));
    }
    Ok(d)
}

/// The `d^2` vectors `M^s T^t 1_D` in `F_{q^2}^d` with `q = p^k`,
/// `d = r^2 + r + 1` and `D` the Singer set.
pub fn gabor_ensemble(p: u64, k: usize, r: u64) -> Result<FFEnsemble> {
    let d = check_gabor_hypotheses(p, k, r)?;
    let ctx = Arc::new(build_field(p, 2 * k)?.with_designated_primitive()?);
    let alpha = ctx.primitive_element()?;
    let omega = ctx.root_of_unity(d)?;
    let set = singer_difference_set(r)?;
    let indicator = indicator(&ctx, &set);
    let ens = heisenberg_orbit(&ctx, &omega, &indicator)?;
    Ok(ens.with_gabor(GaborMeta { p, k, r, set, alpha, omega }))
}

fn indicator(ctx: &Arc<FieldCtx>, set: &DifferenceSet) -> FFVector {
    let entries = (0..set.modulus).map(|x| if set.contains(x) { ctx.one() } else { ctx.zero() }).collect();
    FFVector::new(ctx.clone(), entries).expect("entries from ctx")
}

/// ETF parameters of a Gabor ensemble from the `d^2` canonical products
/// `<1_D, M^a T^b 1_D>`. When `d | q + 1` every Gram entry is a canonical
/// product times a power of `ω`, whose `(q+1)`-th power is 1.
pub fn structural_gabor_verify(ens: &FFEnsemble) -> Result<Option<EtfParams>> {
    let meta = ens.gabor().ok_or(DesignError::MetadataMissing)?;
    let ctx = ens.ctx();
    let set = &meta.set;
    let d = set.modulus;
    let q = ctx.subfield_order()?;
    if !divides(d as u64, &(&q + 1u32)) {
        return Err(DesignError::OrderHypothesisFails { d });
    }
    if ctx.pow(&meta.omega, &(q + 1u32)) != ctx.one() || ctx.pow_u64(&meta.omega, d as u64) != ctx.one() {
        return Err(DesignError::MetadataMismatch);
    }
    let expected = heisenberg_orbit(ctx, &meta.omega, &indicator(ctx, set))?;
    if ens.d() != d || ens.vectors() != expected.vectors() {
        return Err(DesignError::MetadataMismatch);
    }

    let pw = powers(ctx, &meta.omega, d);
    // z(a, b) = Σ_{x ∈ D ∩ (D + b)} ω^{a x}
    let canonical: Vec<FieldElement> = (0..d * d)
        .into_par_iter()
        .map(|ab| {
            let (a, b) = (ab / d, ab % d);
            set.elements
                .iter()
                .map(|&y| (y + b) % d)
                .filter(|&x| set.contains(x))
                .fold(ctx.zero(), |acc, x| ctx.add(&acc, &pw[a * x % d]))
        })
        .collect();
    let a = canonical[0].clone();
    let Some(first) = canonical.get(1) else { return Ok(None) };
    let b = ctx.norm(first);
    if canonical[1..].par_iter().any(|z| ctx.norm(z) != b) {
        return Ok(None);
    }
    let Some(c) = check_tight_frame(ens, None)? else { return Ok(None) };
    let params = EtfParams { a, b, c };
    if check_relations(ctx, ens.n(), d, &params).is_err() {
        return Ok(None);
    }
    Ok(Some(params))
}

/// Columns of the `|D| × d` submatrix of `[ω^{ij}]` on the rows in `D`.
pub fn harmonic_etf(ctx: &Arc<FieldCtx>, set: &DifferenceSet) -> Result<FFEnsemble> {
    let d = set.modulus;
    let omega = ctx.root_of_unity(d as u64)?;
    let pw = powers(ctx, &omega, d);
    let vectors = (0..d)
        .map(|j| FFVector::new(ctx.clone(), set.elements.iter().map(|&i| pw[i * j % d].clone()).collect()))
        .collect::<std::result::Result<_, _>>()?;
    FFEnsemble::new(ctx.clone(), set.elements.len(), vectors)
}

/// One admissible parameter triple with the smallest `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub d: u64,
    pub p: u64,
    pub k: u64,
    pub r: u64,
    /// `p > 3`: the ETF is then a tight projective 2-design.
    pub design: bool,
}

/// All `(p, r)` with `p <= p_max` prime, `r <= r_max` a prime power and
/// `p | r - 1` for which some `k <= k_max` has `r^2 + r + 1 | p^k + 1`,
/// reported with the least such `k` and sorted by `(d, p)`.
pub fn param_search(p_max: u64, k_max: u64, r_max: u64) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for r in (2..=r_max).filter(|&r| prime_power(r).is_some()) {
        let d = r * r + r + 1;
        for p in (2..=p_max.min(r - 1)).filter(|&p| is_prime_u64(p) && (r - 1) % p == 0) {
            let mut pk = 1u64;
            for k in 1..=k_max {
                pk = (pk as u128 * p as u128 % d as u128) as u64;
                if (pk + 1).is_multiple_of(d) {
                    rows.push(TableRow { d, p, k, r, design: p > 3 });
                    break;
                }
            }
        }
    }
    rows.sort_by_key(|row| (row.d, row.p));
    rows
}
