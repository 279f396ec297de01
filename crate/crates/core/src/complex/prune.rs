//! Conic Carathéodory reduction of a weighted 2-design.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_weighted_2design, CEnsemble, CVector, ComplexError, Result};

/// `σ_min / σ_max` at or below which the moment columns count as dependent.
const DEPENDENCE_RATIO: f64 = 1e-9;
/// Points whose moment vectors have normalized inner product above this are
/// the same line.
const SAME_LINE: f64 = 1.0 - 1e-12;

/// Real coordinates of `(x ⊗ x)(x ⊗ x)*` restricted to the symmetric
/// subspace, in an orthonormal basis for the Hermitian operators there. The
/// Euclidean inner product of two such vectors is `|<x, y>|^4`.
fn moment_coordinates(x: &CVector) -> Vec<f64> {
    let d = x.len();
    let mut y = Vec::with_capacity(d * (d + 1) / 2);
    for i in 0..d {
        for j in i..d {
            let v = x[i] * x[j];
            y.push(if i == j { v } else { v * std::f64::consts::SQRT_2 });
        }
    }
    let mut out = Vec::with_capacity(y.len() * y.len());
    for p in 0..y.len() {
        out.push(y[p].norm_sqr());
        for q in p + 1..y.len() {
            let z = y[p] * y[q].conj();
            out.push(std::f64::consts::SQRT_2 * z.re);
            out.push(std::f64::consts::SQRT_2 * z.im);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A sub-ensemble of size at most `C(d+1, 2)^2` with the same second moment.
///
/// Repeated lines are merged first. Then, while the moment vectors of the
/// surviving points are linearly dependent, the weights move along the null
/// direction of least singular value until the first weight reaches zero
/// (smallest index on ties) and that point is dropped.
pub fn caratheodory_prune(ens: &CEnsemble, tol: f64) -> Result<CEnsemble> {
    let input_residual = check_weighted_2design(ens);
    if input_residual > tol {
        return Err(ComplexError::NotADesign { residual: input_residual });
    }
    let coords: Vec<Vec<f64>> = ens.vectors().iter().map(moment_coordinates).collect();
    let mut weights = ens.weights().to_vec();

    for k in 0..coords.len() {
        if weights[k] == 0.0 {
            continue;
        }
        for l in k + 1..coords.len() {
            if weights[l] != 0.0 && dot(&coords[k], &coords[l]) > SAME_LINE {
                weights[k] += weights[l];
                weights[l] = 0.0;
            }
        }
    }

    let mut active: Vec<usize> = (0..coords.len()).filter(|&k| weights[k] > 0.0).collect();
    let mut changed = weights != ens.weights();
    loop {
        let s = active.len();
        if s <= 1 {
            break;
        }
        let gram = DMatrix::from_fn(s, s, |a, b| dot(&coords[active[a]], &coords[active[b]]));
        let eig = SymmetricEigen::new(gram);
        let (mut imin, mut imax) = (0, 0);
        for i in 0..s {
            if eig.eigenvalues[i] < eig.eigenvalues[imin] {
                imin = i;
            }
            if eig.eigenvalues[i] > eig.eigenvalues[imax] {
                imax = i;
            }
        }
        let (lo, hi) = (eig.eigenvalues[imin].max(0.0).sqrt(), eig.eigenvalues[imax].sqrt());
        let dimension = coords[0].len();
        if lo > DEPENDENCE_RATIO * hi {
            if s > dimension {
                return Err(ComplexError::NumericalBreakdown(format!(
                    "{s} moment vectors in dimension {dimension} look independent (ratio {:e})",
                    lo / hi
                )));
            }
            break;
        }
        let mut c: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
        if c.iter().find(|v| v.abs() > 1e-12).is_some_and(|v| *v < 0.0) {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        let mut hit: Option<(usize, f64)> = None;
        for (a, &ca) in c.iter().enumerate() {
            if ca > 0.0 {
                let theta = weights[active[a]] / ca;
                if hit.is_none_or(|(_, best)| theta < best) {
                    hit = Some((a, theta));
                }
            }
        }
        let Some((drop, theta)) = hit else {
            return Err(ComplexError::NumericalBreakdown("null direction has no positive component".into()));
        };
        for (a, &ca) in c.iter().enumerate() {
            let w = &mut weights[active[a]];
            *w = (*w - theta * ca).max(0.0);
        }
        weights[active[drop]] = 0.0;
        changed = true;
        active.retain(|&k| weights[k] > 0.0);
    }

    if !changed {
        return Ok(ens.clone());
    }
    let total: f64 = active.iter().map(|&k| weights[k]).sum();
    let vectors = active.iter().map(|&k| ens.vectors()[k].clone()).collect();
    let pruned = CEnsemble::with_weights(ens.d(), vectors, active.iter().map(|&k| weights[k] / total).collect())?;
    let residual = check_weighted_2design(&pruned);
    if residual > tol {
        return Err(ComplexError::NumericalBreakdown(format!("pruned residual {residual:e} exceeds {tol:e}")));
    }
    Ok(pruned)
}
