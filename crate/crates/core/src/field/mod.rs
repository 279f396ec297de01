//! Exact arithmetic in `F_{p^k}`.
//!
//! A [`FieldCtx`] fixes a prime `p`, a degree `k` and a monic irreducible
//! modulus of degree `k` over `F_p`; elements are coefficient vectors of
//! length `k`, constant term first. The same `(p, k)` always produces the same
//! modulus: the smallest monic irreducible polynomial when coefficient vectors
//! are read as base-`p` integers with the constant term least significant.
//!
//! When `k` is even the context also carries the conjugation `a ↦ a^q` with
//! `q = p^{k/2}`, so `F_{p^k}` plays the role of `F_{q^2}`. When `3 | k` it
//! carries `a ↦ a^r` with `r = p^{k/3}` for traces down to `F_r`. Both maps are
//! `F_p`-linear and are stored as precomputed matrices.

pub mod factor;
pub mod poly;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use self::poly::Poly;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 64;
/// Primes must be below this bound.
pub const MAX_PRIME: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrimeModulus(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field F_{p}^{k} exceeds the size budget (p < 2^16, k <= 64)")]
    SizeBudgetExceeded { p: u64, k: usize },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operand does not belong to this field context")]
    ContextMismatch,
    #[error("field of degree {0} over F_p has no quadratic subfield structure")]
    NotQuadraticExtension(usize),
    #[error("field of degree {0} over F_p has no cubic subfield structure")]
    NotCubicExtension(usize),
    #[error("could not factor the multiplicative group order within budget")]
    FactorizationBudgetExceeded,
    #[error("{d} does not divide the multiplicative group order")]
    OrderDoesNotDivide { d: u64 },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// An element of `F_{p^k}` as a coefficient vector of length `k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) Vec<u32>);

impl FieldElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The coefficient vector read as a base-`p` integer.
    pub fn index(&self, p: u32) -> BigUint {
        self.0.iter().rev().fold(BigUint::zero(), |acc, &c| acc * p + c)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `F_p`-linear map on coefficient vectors; column `j` is the image of `x^j`.
#[derive(Clone, PartialEq, Eq)]
struct LinearMap {
    cols: Vec<Vec<u32>>,
}

/// Arithmetic operations accepted by [`FieldCtx::arith`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(BigUint),
}

/// Immutable description of `F_{p^k}`.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    k: usize,
    modulus: Vec<u32>,
    /// Nonzero terms `(j, -f_j mod p)` of the modulus below the leading term.
    reduction: Vec<(usize, u32)>,
    order: BigUint,
    conj: Option<LinearMap>,
    cubic: Option<LinearMap>,
    primitive: Option<FieldElement>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx").field("p", &self.p).field("k", &self.k).field("modulus", &self.modulus).finish()
    }
}

/// Smallest monic irreducible of degree `k` over `F_p` in ascending base-`p`
/// order of the low coefficients.
fn smallest_irreducible(p: u32, k: usize) -> Poly {
    if k == 1 {
        return vec![0, 1];
    }
    let mut v: u128 = 0;
    loop {
        let mut f = poly::digits(v, p, k);
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return f;
        }
        v += 1;
    }
}

/// Builds the deterministic context for `F_{p^k}`.
pub fn build_field(p: u64, k: usize) -> Result<FieldCtx> {
    if k == 0 {
        return Err(FieldError::DegreeZero);
    }
    if !factor::is_prime_u64(p) {
        return Err(FieldError::NonPrimeModulus(p));
    }
    if p >= MAX_PRIME || k > MAX_DEGREE {
        return Err(FieldError::SizeBudgetExceeded { p, k });
    }
    let p = p as u32;
    let modulus = smallest_irreducible(p, k);
    FieldCtx::with_modulus(p, modulus)
}

impl FieldCtx {
    /// Context for an explicitly supplied monic irreducible modulus.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let modulus = poly::trim(modulus);
        let k = poly::degree(&modulus).unwrap_or(0);
        if k == 0 {
            return Err(FieldError::DegreeZero);
        }
        if !factor::is_prime_u64(p as u64) {
            return Err(FieldError::NonPrimeModulus(p as u64));
        }
        if p as u64 >= MAX_PRIME || k > MAX_DEGREE {
            return Err(FieldError::SizeBudgetExceeded { p: p as u64, k });
        }
        if modulus[k] != 1 || modulus.iter().any(|&c| c >= p) || !poly::is_irreducible(&modulus, p) {
            return Err(FieldError::ContextMismatch);
        }
        let reduction = modulus[..k].iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, &c)| (j, p - c)).collect();
        let mut ctx = FieldCtx {
            p,
            k,
            modulus,
            reduction,
            order: BigUint::from(p).pow(k as u32),
            conj: None,
            cubic: None,
            primitive: None,
        };
        if k.is_multiple_of(2) {
            ctx.conj = Some(ctx.power_map(&BigUint::from(p).pow((k / 2) as u32)));
        }
        if k.is_multiple_of(3) {
            ctx.cubic = Some(ctx.power_map(&BigUint::from(p).pow((k / 3) as u32)));
        }
        Ok(ctx)
    }

    /// The matrix of `a ↦ a^e` for a power `e` of `p`.
    fn power_map(&self, e: &BigUint) -> LinearMap {
        let xe = poly::pow_rem(&[0, 1], e, &self.modulus, self.p);
        let mut cols = Vec::with_capacity(self.k);
        let mut cur: Poly = vec![1];
        for _ in 0..self.k {
            cols.push(self.pad(&cur));
            cur = poly::mul_rem(&cur, &xe, &self.modulus, self.p);
        }
        LinearMap { cols }
    }

    fn pad(&self, a: &[u32]) -> Vec<u32> {
        let mut v = a.to_vec();
        v.resize(self.k, 0);
        v
    }

    fn apply_map(&self, map: &LinearMap, e: &FieldElement) -> FieldElement {
        let mut acc = vec![0u64; self.k];
        for (j, &c) in e.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (a, &m) in acc.iter_mut().zip(&map.cols[j]) {
                *a += c as u64 * m as u64;
            }
        }
        FieldElement(acc.into_iter().map(|a| (a % self.p as u64) as u32).collect())
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Extension degree over `F_p`.
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> &BigUint {
        &self.order
    }

    /// `q = p^{k/2}` when this context is a quadratic extension.
    pub fn subfield_order(&self) -> Result<BigUint> {
        if !self.k.is_multiple_of(2) {
            return Err(FieldError::NotQuadraticExtension(self.k));
        }
        Ok(BigUint::from(self.p).pow((self.k / 2) as u32))
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(vec![0; self.k])
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        let mut c = vec![0; self.k];
        c[0] = v.rem_euclid(self.p as i64) as u32;
        FieldElement(c)
    }

    /// Validates a coefficient vector against this context.
    pub fn element(&self, coeffs: Vec<u32>) -> Result<FieldElement> {
        let e = FieldElement(coeffs);
        self.check(&e)?;
        Ok(e)
    }

    /// Element whose coefficient vector is the base-`p` expansion of `v`.
    pub fn from_index(&self, v: u128) -> FieldElement {
        FieldElement(poly::digits(v, self.p, self.k))
    }

    pub fn check(&self, e: &FieldElement) -> Result<()> {
        if e.0.len() != self.k || e.0.iter().any(|&c| c >= self.p) {
            return Err(FieldError::ContextMismatch);
        }
        Ok(())
    }

    /// Prime-field value of an element lying in `F_p`.
    pub fn as_prime_field(&self, e: &FieldElement) -> Option<u32> {
        e.0[1..].iter().all(|&c| c == 0).then_some(e.0[0])
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + y) % p).collect())
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(a.0.iter().zip(&b.0).map(|(&x, &y)| (x + p - y) % p).collect())
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        let p = self.p;
        FieldElement(a.0.iter().map(|&x| (p - x) % p).collect())
    }

    /// Multiplication by a prime-field scalar.
    pub fn scale_int(&self, a: &FieldElement, s: i64) -> FieldElement {
        let p = self.p as u64;
        let s = s.rem_euclid(p as i64) as u64;
        FieldElement(a.0.iter().map(|&x| (x as u64 * s % p) as u32).collect())
    }

    /// Adds the unreduced product coefficients of `a·b` into `acc`, which must
    /// have length `2k - 1`. Accumulation is safe for up to `2^20` products.
    #[inline]
    pub fn mul_acc(&self, acc: &mut [u64], a: &FieldElement, b: &FieldElement) {
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (slot, &y) in acc[i..i + self.k].iter_mut().zip(&b.0) {
                *slot += x * y as u64;
            }
        }
    }

    /// Reduces an accumulator filled by [`FieldCtx::mul_acc`] and clears it.
    pub fn reduce_acc(&self, acc: &mut [u64]) -> FieldElement {
        let p = self.p as u64;
        for a in acc.iter_mut() {
            *a %= p;
        }
        for i in (self.k..acc.len()).rev() {
            let c = acc[i] % p;
            if c == 0 {
                continue;
            }
            let base = i - self.k;
            for &(j, nf) in &self.reduction {
                acc[base + j] += c * nf as u64;
            }
        }
        let out = FieldElement(acc[..self.k].iter().map(|&a| (a % p) as u32).collect());
        acc.fill(0);
        out
    }

    pub fn acc_buffer(&self) -> Vec<u64> {
        vec![0u64; 2 * self.k - 1]
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let mut acc = self.acc_buffer();
        self.mul_acc(&mut acc, a, b);
        self.reduce_acc(&mut acc)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let (g, s) = poly::ext_gcd_inverse_part(&poly::trim(a.0.clone()), &self.modulus, self.p);
        debug_assert_eq!(g, vec![1]);
        Ok(FieldElement(self.pad(&s)))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, e: &BigUint) -> FieldElement {
        let mut result = self.one();
        for i in (0..e.bits()).rev() {
            result = self.mul(&result, &result);
            if e.bit(i) {
                result = self.mul(&result, a);
            }
        }
        result
    }

    pub fn pow_u64(&self, a: &FieldElement, e: u64) -> FieldElement {
        self.pow(a, &BigUint::from(e))
    }

    /// Checked arithmetic entry point: validates operands before dispatch.
    pub fn arith(&self, op: ArithOp, operands: &[&FieldElement]) -> Result<FieldElement> {
        for e in operands {
            self.check(e)?;
        }
        let binary = |f: &dyn Fn(&FieldElement, &FieldElement) -> FieldElement| match operands {
            [a, b] => Ok(f(a, b)),
            _ => Err(FieldError::ContextMismatch),
        };
        match op {
            ArithOp::Add => binary(&|a, b| self.add(a, b)),
            ArithOp::Sub => binary(&|a, b| self.sub(a, b)),
            ArithOp::Mul => binary(&|a, b| self.mul(a, b)),
            ArithOp::Inv => match operands {
                [a] => self.inv(a),
                _ => Err(FieldError::ContextMismatch),
            },
            ArithOp::Pow(e) => match operands {
                [a] => Ok(self.pow(a, &e)),
                _ => Err(FieldError::ContextMismatch),
            },
        }
    }

    /// The conjugation `a ↦ a^q` of `F_{q^2}` over `F_q`.
    pub fn frobenius(&self, e: &FieldElement) -> Result<FieldElement> {
        let map = self.conj.as_ref().ok_or(FieldError::NotQuadraticExtension(self.k))?;
        Ok(self.apply_map(map, e))
    }

    /// Conjugation for contexts known to be quadratic extensions.
    #[inline]
    pub fn conj(&self, e: &FieldElement) -> FieldElement {
        self.apply_map(self.conj.as_ref().expect("quadratic extension"), e)
    }

    pub fn is_quadratic(&self) -> bool {
        self.conj.is_some()
    }

    /// Membership in the fixed field of the conjugation.
    pub fn in_subfield(&self, e: &FieldElement) -> Result<bool> {
        Ok(&self.frobenius(e)? == e)
    }

    /// `e^{q+1}`, the Hermitian norm of a scalar.
    pub fn norm(&self, e: &FieldElement) -> FieldElement {
        self.mul(&self.conj(e), e)
    }

    /// Trace from `F_{r^3}` down to `F_r`: `e + e^r + e^{r^2}`.
    pub fn subfield_trace(&self, e: &FieldElement) -> Result<FieldElement> {
        let map = self.cubic.as_ref().ok_or(FieldError::NotCubicExtension(self.k))?;
        let e1 = self.apply_map(map, e);
        let e2 = self.apply_map(map, &e1);
        Ok(self.add(&self.add(e, &e1), &e2))
    }

    /// Multiplicative order of the group, `p^k - 1`.
    pub fn group_order(&self) -> BigUint {
        &self.order - 1u32
    }

    fn group_order_primes(&self, rho_budget: u64) -> Result<Vec<BigUint>> {
        factor::prime_factors_pow_minus_one(self.p as u64, self.k as u64, rho_budget)
            .ok_or(FieldError::FactorizationBudgetExceeded)
    }

    /// Whether `e` generates the multiplicative group.
    pub fn is_primitive(&self, e: &FieldElement, primes: &[BigUint]) -> bool {
        if e.is_zero() {
            return false;
        }
        let n = self.group_order();
        let one = self.one();
        primes.iter().all(|l| self.pow(e, &(&n / l)) != one)
    }

    /// First element in ascending base-`p` order whose multiplicative order is
    /// `p^k - 1`, or the designated one if set.
    pub fn primitive_element(&self) -> Result<FieldElement> {
        if let Some(a) = &self.primitive {
            return Ok(a.clone());
        }
        self.primitive_element_with_budget(factor::DEFAULT_RHO_BUDGET)
    }

    pub fn primitive_element_with_budget(&self, rho_budget: u64) -> Result<FieldElement> {
        let primes = self.group_order_primes(rho_budget)?;
        let mut v: u128 = 1;
        loop {
            let e = self.from_index(v);
            if self.is_primitive(&e, &primes) {
                return Ok(e);
            }
            v += 1;
        }
    }

    /// Returns a copy of this context with its primitive element cached.
    pub fn with_designated_primitive(mut self) -> Result<Self> {
        self.primitive = Some(self.primitive_element()?);
        Ok(self)
    }

    /// `α^{(p^k - 1)/d}` for the primitive element `α`; its order is exactly `d`.
    pub fn root_of_unity(&self, d: u64) -> Result<FieldElement> {
        let n = self.group_order();
        let db = BigUint::from(d);
        if d == 0 || !(&n % &db).is_zero() {
            return Err(FieldError::OrderDoesNotDivide { d });
        }
        let alpha = self.primitive_element()?;
        Ok(self.pow(&alpha, &(n / db)))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, e: &FieldElement) -> Result<BigUint> {
        if e.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let mut n = self.group_order();
        let one = self.one();
        for l in self.group_order_primes(factor::DEFAULT_RHO_BUDGET)? {
            while (&n % &l).is_zero() && self.pow(e, &(&n / &l)) == one {
                n /= &l;
            }
        }
        Ok(n)
    }

    /// All elements in enumeration order; only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let n = self.order.to_u128().expect("small field");
        (0..n).map(move |v| self.from_index(v))
    }

    pub fn is_one(&self, e: &FieldElement) -> bool {
        e.0[0] == 1 && e.0[1..].iter().all(|&c| c == 0)
    }
}

/// True when `BigUint` divides.
pub(crate) fn divides(d: u64, n: &BigUint) -> bool {
    d != 0 && (n % d).is_zero()
}
