//! Projected gradient descent for the second-moment frame potential on the
//! product of unit spheres in `H^d`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::design::QEnsemble;
use super::{QVector, Quaternion};

/// `(1/n^2) Σ_k Σ_l |x_k* x_l|^4`.
pub fn potential(xs: &[QVector]) -> f64 {
    let n = xs.len();
    let total: f64 = (0..n).map(|k| (0..n).map(|l| xs[k].inner(&xs[l]).norm_sqr().powi(2)).sum::<f64>()).sum();
    total / (n * n) as f64
}

/// Gradient of [`potential`] in the real coordinates of each `x_k`:
/// `(8/n^2) Σ_l |g_kl|^2 x_l g_lk` with `g_kl = x_k* x_l`.
pub fn potential_gradient(xs: &[QVector]) -> Vec<QVector> {
    let n = xs.len();
    let scale = 8.0 / (n * n) as f64;
    (0..n)
        .map(|k| {
            let mut acc = QVector::zeros(xs[k].len());
            for x_l in xs {
                let g_lk = x_l.inner(&xs[k]);
                let term = x_l.mul_right(g_lk).scale(g_lk.norm_sqr() * scale);
                acc.0.iter_mut().zip(term.0).for_each(|(a, b)| *a += b);
            }
            acc
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    pub iters: usize,
    pub initial_step: f64,
    /// Stop once the gap to `3/(d(2d+1))` falls below this.
    pub target_gap: f64,
    /// Halvings per line search before giving up.
    pub max_halvings: u32,
    pub armijo: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { iters: 20_000, initial_step: 0.5, target_gap: 1e-14, max_halvings: 60, armijo: 1e-4 }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub seed: u64,
    pub ensemble: QEnsemble,
    /// Potential at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> QVector {
    loop {
        let v = QVector((0..d).map(|_| Quaternion::from_array([0; 4].map(|_| rng.gen_range(-1.0..1.0)))).collect());
        if v.norm() > 1e-3 {
            return v.normalized().expect("nonzero");
        }
    }
}

fn retract(xs: &[QVector], dirs: &[QVector], t: f64) -> Vec<QVector> {
    xs.iter()
        .zip(dirs)
        .map(|(x, g)| {
            let moved = QVector(x.0.iter().zip(&g.0).map(|(&a, &b)| a - b.scale(t)).collect());
            moved.normalized().unwrap_or_else(|_| x.clone())
        })
        .collect()
}

/// Descends from a seeded random start with Armijo backtracking (halving) and
/// per-vector renormalization as the retraction. Never fails: a run that
/// stalls or exhausts its iterations reports `converged = false`.
pub fn optimize_design(d: usize, n: usize, seed: u64, config: &OptimizeConfig) -> OptimizeResult {
    assert!(d >= 1 && n >= 1, "need d >= 1 and n >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs: Vec<QVector> = (0..n).map(|_| random_unit(d, &mut rng)).collect();
    let bound = 3.0 / (d * (2 * d + 1)) as f64;
    let mut p = potential(&xs);
    let mut trace = vec![p];
    let mut step = config.initial_step;
    let mut iterations = 0;
    while iterations < config.iters && p - bound >= config.target_gap {
        let grad = potential_gradient(&xs);
        // project onto the tangent space of each sphere
        let dirs: Vec<QVector> = xs
            .iter()
            .zip(grad)
            .map(|(x, g)| {
                let radial: f64 = x.0.iter().zip(&g.0).map(|(a, b)| a.dot(*b)).sum();
                QVector(g.0.iter().zip(&x.0).map(|(&gi, &xi)| gi - xi.scale(radial)).collect())
            })
            .collect();
        let slope: f64 = dirs.iter().map(QVector::norm_sqr).sum();
        if slope == 0.0 {
            break;
        }
        let mut accepted = None;
        for _ in 0..=config.max_halvings {
            let candidate = retract(&xs, &dirs, step);
            let pc = potential(&candidate);
            if pc <= p - config.armijo * step * slope {
                accepted = Some((candidate, pc));
                break;
            }
            step /= 2.0;
        }
        let Some((next, pc)) = accepted else { break };
        xs = next;
        p = pc;
        trace.push(p);
        iterations += 1;
        step = (step * 2.0).min(config.initial_step * 8.0);
    }
    let gap = p - bound;
    OptimizeResult {
        seed,
        ensemble: QEnsemble::new(d, xs).expect("retraction keeps unit norms"),
        trace,
        gap,
        converged: gap < config.target_gap,
        iterations,
    }
}

/// Independent runs, one per seed.
pub fn optimize_seeds(d: usize, n: usize, seeds: &[u64], config: &OptimizeConfig) -> Vec<OptimizeResult> {
    seeds.par_iter().map(|&s| optimize_design(d, n, s, config)).collect()
}
