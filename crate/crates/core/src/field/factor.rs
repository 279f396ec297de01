//! Integer factorization for group orders `p^n - 1`.
//!
//! `p^n - 1` is first split into cyclotomic values `Φ_e(p)` for `e | n`, and
//! each piece is factored by trial division followed by Pollard–Brent rho.
//! The rho phase runs under an iteration budget; exhausting it is an error,
//! never a silently unverified result.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_BOUND: u32 = 1 << 16;
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Default Pollard–Brent iteration budget per composite cofactor.
pub const DEFAULT_RHO_BUDGET: u64 = 5_000_000;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if n == b as u64 {
            return true;
        }
        if n.is_multiple_of(b as u64) {
            return false;
        }
    }
    let n128 = n as u128;
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let powmod = |mut b: u128, mut e: u64| {
        let mut r = 1u128;
        b %= n128;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % n128;
            }
            b = b * b % n128;
            e >>= 1;
        }
        r
    };
    'outer: for &a in &MR_BASES[..12] {
        let mut x = powmod(a as u128, d);
        if x == 1 || x == n128 - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n128;
            if x == n128 - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Miller–Rabin with the first thirteen prime bases. Deterministic below
/// `3.3 * 10^24`; a strong probable-prime test above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'outer: for &a in &MR_BASES {
        let a = BigUint::from(a);
        if (n % &a).is_zero() {
            return false;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime-power test for small integers: returns `(prime, exponent)`.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut m = n;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            return (m == 1).then_some((p, e));
        }
        p += 1;
    }
    Some((n, 1))
}

fn pollard_brent(n: &BigUint, seed: u64, budget: u64) -> Option<BigUint> {
    let one = BigUint::one();
    let c = BigUint::from(seed % 1000 + 1);
    let f = |x: &BigUint| (x * x + &c) % n;
    let mut y = BigUint::from(seed + 2) % n;
    let m = 128u64;
    let mut g = one.clone();
    let mut r = 1u64;
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut spent = 0u64;
    while g == one {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0u64;
        while k < r && g == one {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            g = q.gcd(n);
            k += m;
            spent += m;
            if spent > budget {
                return None;
            }
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if g != one {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(n: &BigUint, rho_budget: u64) -> Option<Vec<BigUint>> {
    let mut primes = Vec::new();
    let mut rest = n.clone();
    if rest.is_zero() {
        return Some(primes);
    }
    for t in 2..TRIAL_BOUND {
        if rest.is_one() {
            break;
        }
        let tb = BigUint::from(t);
        if (&rest % &tb).is_zero() {
            primes.push(tb.clone());
            while (&rest % &tb).is_zero() {
                rest /= &tb;
            }
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            primes.push(m);
            continue;
        }
        let mut found = None;
        for seed in 0..8 {
            if let Some(f) = pollard_brent(&m, seed, rho_budget / 8) {
                found = Some(f);
                break;
            }
        }
        let f = found?;
        let cof = &m / &f;
        stack.push(f);
        stack.push(cof);
    }
    primes.sort();
    primes.dedup();
    Some(primes)
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// The cyclotomic value `Φ_e(p)`.
pub fn cyclotomic_value(e: u64, p: u64) -> BigUint {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    let pb = BigUint::from(p);
    for f in divisors(e) {
        let term = pb.pow(f as u32) - BigUint::one();
        match mobius(e / f) {
            1 => num *= term,
            -1 => den *= term,
            _ => {}
        }
    }
    num / den
}

/// Distinct primes dividing `p^n - 1`.
pub fn prime_factors_pow_minus_one(p: u64, n: u64, rho_budget: u64) -> Option<Vec<BigUint>> {
    let mut primes = Vec::new();
    for e in divisors(n) {
        primes.extend(prime_factors(&cyclotomic_value(e, p), rho_budget)?);
    }
    primes.sort();
    primes.dedup();
    Some(primes)
}
