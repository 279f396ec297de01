//! Known weighted 2-designs and the table of upper bounds on `ebr(𝔷_d)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_weighted_2design, overlap, CEnsemble, CVector, ComplexError, Result};
use crate::field::factor::{is_prime_u64, prime_power};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn basis_vector(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = c(1.0, 0.0);
    v
}

/// `d + 1` mutually unbiased bases, listed basis by basis. For `d = 2` these
/// are the eigenbases of `Z`, `X` and `Y`; for an odd prime they are the
/// computational basis and the quadratic-phase bases
/// `v_{a,b}(x) = ω^{a x^2 + b x} / sqrt(d)`.
pub fn mub_ensemble(d: usize) -> Result<CEnsemble> {
    let mut vectors: Vec<CVector> = (0..d).map(|i| basis_vector(d, i)).collect();
    if d == 2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
            for sign in [1.0, -1.0] {
                vectors.push(CVector::from_vec(vec![c(h, 0.0), phase * sign * h]));
            }
        }
    } else if d % 2 == 1 && is_prime_u64(d as u64) {
        let scale = 1.0 / (d as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                vectors.push(CVector::from_fn(d, |x, _| {
                    let e = (a * x * x + b * x) % d;
                    Complex64::from_polar(scale, 2.0 * PI * e as f64 / d as f64)
                }));
            }
        }
    } else {
        return Err(ComplexError::UnsupportedDimension(d));
    }
    CEnsemble::new(d, vectors)
}

/// The orbit `{X^a Z^b f}` with `(X f)(x) = f(x - 1)` and
/// `(Z f)(x) = e^{2πi x/d} f(x)`, indexed `a·d + b`.
pub fn weyl_heisenberg_orbit(f: &CVector) -> Vec<CVector> {
    let d = f.len();
    let mut out = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            out.push(CVector::from_fn(d, |x, _| {
                Complex64::from_polar(1.0, 2.0 * PI * ((b * x) % d) as f64 / d as f64) * f[(x + d - a) % d]
            }));
        }
    }
    out
}

/// Checks that `vectors` are `d^2` unit vectors with all pairwise
/// `|<x, y>|^2 = 1/(d+1)` to within `tol` and returns the uniform ensemble.
fn verified_sic(d: usize, vectors: Vec<CVector>, tol: f64) -> Result<CEnsemble> {
    let ens = CEnsemble::new(d, vectors)?;
    let target = 1.0 / (d as f64 + 1.0);
    let vs = ens.vectors();
    let worst = (0..vs.len())
        .flat_map(|k| (k + 1..vs.len()).map(move |l| (k, l)))
        .map(|(k, l)| (overlap(&vs[k], &vs[l]) - target).abs())
        .fold(0.0, f64::max);
    if ens.n() != d * d || worst > tol {
        return Err(ComplexError::NotADesign { residual: worst.max(check_weighted_2design(&ens)) });
    }
    Ok(ens)
}

/// Imports a numerical SIC fiducial: normalizes it, builds its Weyl–Heisenberg
/// orbit and verifies equiangularity before returning it.
pub fn sic_from_fiducial(fiducial: &CVector, tol: f64) -> Result<CEnsemble> {
    let norm = fiducial.norm();
    if norm == 0.0 {
        return Err(ComplexError::NotUnit { k: 0, norm });
    }
    let f = fiducial / c(norm, 0.0);
    verified_sic(f.len(), weyl_heisenberg_orbit(&f), tol)
}

/// The tetrahedron for `d = 2` and the Hesse configuration, the orbit of
/// `(0, 1, -1)/sqrt(2)`, for `d = 3`.
pub fn sic_catalog(d: usize) -> Result<CEnsemble> {
    match d {
        2 => {
            let (a, b) = ((1.0f64 / 3.0).sqrt(), (2.0f64 / 3.0).sqrt());
            let mut vectors = vec![basis_vector(2, 0)];
            for j in 0..3 {
                vectors.push(CVector::from_vec(vec![c(a, 0.0), Complex64::from_polar(b, 2.0 * PI * j as f64 / 3.0)]));
            }
            verified_sic(2, vectors, 1e-12)
        }
        3 => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            sic_from_fiducial(&CVector::from_vec(vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0)]), 1e-12)
        }
        _ => Err(ComplexError::UnsupportedDimension(d)),
    }
}

/// One upper bound on `ebr(𝔷_d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EbrBound {
    pub label: String,
    pub bound: u64,
    /// A witness can be built here; otherwise the bound is only recorded.
    pub constructive: bool,
}

fn bound(label: impl Into<String>, bound: u64, constructive: bool) -> EbrBound {
    EbrBound { label: label.into(), bound, constructive }
}

/// Every bound that applies to `d`, sorted by value then label.
pub fn ebr_bound_table(d: u64) -> Vec<EbrBound> {
    let mut out = Vec::new();
    let d2 = d * d;
    if d == 1 {
        out.push(bound("trivial", 1, true));
    }
    if d == 2 || d == 3 {
        out.push(bound("sic", d2, true));
    }
    if prime_power(d).is_some() {
        let constructive = d == 2 || (d % 2 == 1 && is_prime_u64(d));
        out.push(bound("mub", d2 + d, constructive));
        out.push(bound("prime-power", d2 + d - 1, false));
    }
    if let Some(k) = (1..=100_000u64).find(|k| prime_power(k * d + 1).is_some()) {
        out.push(bound(format!("kd+1 prime power (k = {k})"), k * d2 + 2 * d, false));
    }
    if let Some((p, _)) = prime_power(d + 1) {
        out.push(bound("d+1 prime power", d2 + (p + 1) * d, false));
    }
    if d >= 2 && prime_power(d - 1).is_some() {
        out.push(bound("d-1 prime power", d2 + 1, false));
    }
    let half = d * (d + 1) / 2;
    out.push(bound("caratheodory", half * half, false));
    out.sort_by(|a, b| (a.bound, &a.label).cmp(&(b.bound, &b.label)));
    out
}
