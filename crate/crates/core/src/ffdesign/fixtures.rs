//! Small odd-characteristic ensembles used to exercise the design verifiers:
//! tight designs found as Heisenberg orbits, ensembles derived from them, and
//! assorted non-designs. Everything is deterministic.

use std::sync::Arc;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{certify_tight_2design, common_angle, heisenberg_orbit, FFEnsemble, Result};
use crate::fflinalg::FFVector;
use crate::field::{build_field, FieldCtx};

/// A named ensemble.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub ensemble: FFEnsemble,
}

fn fixture(name: impl Into<String>, ensemble: FFEnsemble) -> Fixture {
    Fixture { name: name.into(), ensemble }
}

/// First fiducial `f` in enumeration order (coordinates in ascending index
/// order, first coordinate least significant) whose Heisenberg orbit over
/// `F_{q^2}^d`, `q = p^k`, is certified as a tight projective 2-design.
/// Gives up after `limit` candidates.
pub fn tight_heisenberg_design(p: u64, k: usize, d: usize, limit: u64) -> Result<Option<FFEnsemble>> {
    let ctx = Arc::new(build_field(p, 2 * k)?.with_designated_primitive()?);
    let omega = ctx.root_of_unity(d as u64)?;
    let big_q = ctx.order().to_u64().expect("small field");
    let total = big_q.checked_pow(d as u32).unwrap_or(u64::MAX).min(limit);
    for v in 1..total {
        let mut rest = v;
        let entries = (0..d)
            .map(|_| {
                let digit = rest % big_q;
                rest /= big_q;
                ctx.from_index(digit as u128)
            })
            .collect();
        let f = FFVector::new(ctx.clone(), entries)?;
        let orbit = heisenberg_orbit(&ctx, &omega, &f)?;
        if common_angle(&orbit).is_err() {
            continue;
        }
        if certify_tight_2design(&orbit).design.is_some() {
            return Ok(Some(orbit));
        }
    }
    Ok(None)
}

fn random_ensemble(ctx: &Arc<FieldCtx>, d: usize, n: usize, rng: &mut ChaCha8Rng) -> FFEnsemble {
    let order = ctx.order().to_u128().expect("small field");
    let vectors = (0..n)
        .map(|_| {
            let entries = (0..d).map(|_| ctx.from_index(rng.gen_range(0..order))).collect();
            FFVector::new(ctx.clone(), entries).expect("entries from ctx")
        })
        .collect();
    FFEnsemble::new(ctx.clone(), d, vectors).expect("consistent shapes")
}

fn standard_basis(ctx: &Arc<FieldCtx>, d: usize) -> FFEnsemble {
    let vectors = (0..d).map(|i| FFVector::basis(ctx.clone(), d, i)).collect();
    FFEnsemble::new(ctx.clone(), d, vectors).expect("consistent shapes")
}

/// The verifier test suite: at least twenty ensembles with `d <= 8` over
/// fields of odd characteristic, mixing designs and non-designs.
pub fn fixture_suite() -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for (p, k, d) in [(3u64, 1usize, 2usize), (5, 1, 3)] {
        let q = p.pow(k as u32);
        let Some(tight) = tight_heisenberg_design(p, k, d, 200_000)? else { continue };
        let ctx = tight.ctx().clone();
        let tag = format!("f{}-d{d}", q * q);
        let alpha = ctx.primitive_element()?;
        out.push(fixture(format!("{tag}-tight"), tight.clone()));
        out.push(fixture(format!("{tag}-doubled"), tight.union(&tight)?));
        out.push(fixture(format!("{tag}-scaled"), tight.scaled(&alpha)));
        out.push(fixture(format!("{tag}-with-scaled-copy"), tight.union(&tight.scaled(&alpha))?));
        let mut truncated = tight.vectors().to_vec();
        truncated.pop();
        out.push(fixture(format!("{tag}-truncated"), FFEnsemble::new(ctx.clone(), d, truncated)?));
        // A copy scaled by λ with N(λ)^2 = -1 cancels the moment sum exactly.
        let minus_one = ctx.from_int(-1);
        let lambda = ctx.elements().find(|l| {
            let n = ctx.norm(l);
            ctx.mul(&n, &n) == minus_one
        });
        if let Some(lambda) = lambda {
            out.push(fixture(format!("{tag}-vanishing"), tight.union(&tight.scaled(&lambda))?));
        }
    }

    let f9 = Arc::new(build_field(3, 2)?);
    let f25 = Arc::new(build_field(5, 2)?);
    let f49 = Arc::new(build_field(7, 2)?);
    for (ctx, name) in [(&f9, "f9"), (&f25, "f25")] {
        for d in [1, 2, 3, 4] {
            out.push(fixture(format!("{name}-d{d}-standard-basis"), standard_basis(ctx, d)));
        }
    }
    for (ctx, name, d, n) in [
        (&f9, "f9", 2, 4),
        (&f9, "f9", 2, 9),
        (&f25, "f25", 2, 5),
        (&f25, "f25", 3, 9),
        (&f49, "f49", 3, 12),
        (&f9, "f9", 5, 25),
        (&f25, "f25", 8, 20),
        (&f9, "f9", 1, 3),
        (&f49, "f49", 1, 2),
    ] {
        out.push(fixture(format!("{name}-d{d}-random-{n}"), random_ensemble(ctx, d, n, &mut rng)));
    }
    out.push(fixture("f9-d3-empty", FFEnsemble::new(f9.clone(), 3, Vec::new())?));
    out.push(fixture("f25-d1-zero-vector", FFEnsemble::new(f25.clone(), 1, vec![FFVector::zeros(f25.clone(), 1)])?));
    Ok(out)
}
