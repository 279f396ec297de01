//! Dense polynomials over a prime field `F_p`.
//!
//! Coefficients are stored constant term first. Results are always trimmed so
//! that the last coefficient is nonzero; the zero polynomial is the empty
//! vector.

use num_bigint::BigUint;

pub type Poly = Vec<u32>;

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

pub(crate) fn inv_mod(a: u32, p: u32) -> Option<u32> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (p as i64, (a % p) as i64);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    Some(t.rem_euclid(p as i64) as u32)
}

pub fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Degree, with `None` for the zero polynomial.
pub fn degree(a: &[u32]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn add(a: &[u32], b: &[u32], p: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + y) % p
        })
        .collect();
    trim(out)
}

pub fn sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub fn mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc[i + j] = (acc[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(acc.into_iter().map(|c| c as u32).collect())
}

/// Quotient and remainder of `a` by a nonzero `b`.
pub fn div_rem(a: &[u32], b: &[u32], p: u32) -> (Poly, Poly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv_mod(b[db], p).expect("leading coefficient is a unit");
    let mut r: Vec<u32> = trim(a.to_vec());
    let Some(dr) = degree(&r) else {
        return (Vec::new(), Vec::new());
    };
    if dr < db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u32; dr - db + 1];
    for i in (db..=dr).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        let f = mul_mod(c, lead_inv, p);
        q[i - db] = f;
        for (j, &bj) in b[..=db].iter().enumerate() {
            let t = mul_mod(f, bj, p);
            let idx = i - db + j;
            r[idx] = (r[idx] + p - t) % p;
        }
    }
    r.truncate(db);
    (trim(q), trim(r))
}

pub fn rem(a: &[u32], b: &[u32], p: u32) -> Poly {
    div_rem(a, b, p).1
}

pub fn monic(a: &[u32], p: u32) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let inv = inv_mod(a[d], p).expect("nonzero leading coefficient");
            a[..=d].iter().map(|&c| mul_mod(c, inv, p)).collect()
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Extended Euclid: returns `(g, s)` with `s·a ≡ g (mod m)` and `g` monic.
pub fn ext_gcd_inverse_part(a: &[u32], m: &[u32], p: u32) -> (Poly, Poly) {
    let (mut r0, mut r1) = (trim(m.to_vec()), trim(a.to_vec()));
    let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = div_rem(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    match degree(&r0) {
        None => (Vec::new(), Vec::new()),
        Some(d) => {
            let inv = inv_mod(r0[d], p).unwrap();
            let g = r0.iter().map(|&c| mul_mod(c, inv, p)).collect();
            let s = s0.iter().map(|&c| mul_mod(c, inv, p)).collect();
            (trim(g), trim(s))
        }
    }
}

pub fn mul_rem(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Poly {
    rem(&mul(a, b, p), m, p)
}

/// `base^exp mod m` by square-and-multiply.
pub fn pow_rem(base: &[u32], exp: &BigUint, m: &[u32], p: u32) -> Poly {
    let mut result: Poly = rem(&[1], m, p);
    let b = rem(base, m, p);
    for i in (0..exp.bits()).rev() {
        result = mul_rem(&result, &result, m, p);
        if exp.bit(i) {
            result = mul_rem(&result, &b, m, p);
        }
    }
    result
}

/// Ben-Or irreducibility test: `f` of degree `n` is irreducible iff
/// `gcd(x^{p^i} - x, f) = 1` for every `1 <= i <= n/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let Some(n) = degree(f) else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x: Poly = vec![0, 1];
    let pe = BigUint::from(p);
    let mut xp = rem(&x, f, p);
    for _ in 1..=n / 2 {
        xp = pow_rem(&xp, &pe, f, p);
        let g = gcd(&sub(&xp, &x, p), f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Coefficient vector of the integer `v` in base `p`, constant term first,
/// padded to `len` digits.
pub fn digits(mut v: u128, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for c in out.iter_mut() {
        *c = (v % p as u128) as u32;
        v /= p as u128;
    }
    out
}
