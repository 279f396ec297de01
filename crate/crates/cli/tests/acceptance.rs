//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Expected values come from independent oracles written here (direct
//! formulas, explicit basis sums) rather than from the library under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use designforge::complex::{
    caratheodory_prune, depolarizing_channel, design_to_kraus, kraus_to_design, mub_ensemble, sic_catalog,
    transpose_compose, CEnsemble, CMatrix, Channel, Provenance, CERT_TOL, VERIFY_TOL,
};
use designforge::ffdesign::{
    certify_tight_2design, check_2design_naive, check_2design_psi, check_etf, fixture_suite, gabor_ensemble,
    structural_gabor_verify, Method,
};
use designforge::fflinalg::{herm_inner, FFVector};
use designforge::field::{build_field, FieldCtx, FieldElement};
use designforge::quaternion::{
    certify_fusion_frame, check_tight_q_design, optimize_seeds, potential, potential_gradient, q_design_moments,
    re_trace_inner, simplex_design_d2, OptimizeConfig, QMatrix, QVector, Quaternion,
};
use designforge_cli::commands::{search, search_csv};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner(seed: u8, cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

fn sample<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).expect("strategy").current()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `(I + F)/2` with `F` the swap on `C^d ⊗ C^d`, indexed `(i·d + k, j·d + l)`.
fn swap_projector(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, s| {
        let (i, k, j, l) = (r / d, r % d, s / d, s % d);
        let id = f64::from(u8::from(r == s));
        let swap = f64::from(u8::from(i == l && k == j));
        c((id + swap) / 2.0, 0.0)
    })
}

fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = c(1.0, 0.0);
    m
}

// ---------------------------------------------------------------- criteria

fn gabor_small() -> Check {
    let ens = gabor_ensemble(2, 6, 3).map_err(|e| e.to_string())?;
    ensure(ens.n() == 169 && ens.d() == 13, || format!("shape {}x{}", ens.n(), ens.d()))?;
    let ctx = ens.ctx();
    // Singer set with r = 3: <v, v> = r + 1 = 4, N(<u, v>) = r = 3.
    let (diag, off) = (ctx.from_int(4), ctx.from_int(3));
    let vs = ens.vectors();
    for (i, u) in vs.iter().enumerate() {
        for (j, v) in vs.iter().enumerate() {
            let g = herm_inner(u, v).map_err(|e| e.to_string())?;
            let ok = if i == j { g == diag } else { ctx.norm(&g) == off };
            ensure(ok, || format!("Gram entry ({i}, {j}) off"))?;
        }
    }
    let etf = check_etf(&ens).map_err(|e| e.to_string())?;
    ensure((etf.a.clone(), etf.b.clone(), etf.c.clone()) == (ctx.zero(), ctx.one(), ctx.zero()), || {
        format!("ETF parameters {etf:?}")
    })?;
    Ok("all 169^2 products exact; (a, b, c) = (0, 1, 0) mod 2".into())
}

fn gabor_large() -> Check {
    let ens = gabor_ensemble(7, 12, 8).map_err(|e| e.to_string())?;
    let ctx = ens.ctx().clone();
    ensure(ens.n() == 5329 && ens.d() == 73, || "shape".into())?;
    let p = structural_gabor_verify(&ens).map_err(|e| e.to_string())?.ok_or("structural verifier rejected")?;
    ensure(p.a == ctx.from_int(2) && p.b == ctx.from_int(1) && p.c == ctx.from_int(2 * 73), || {
        format!("structural parameters {p:?}")
    })?;
    let cert = certify_tight_2design(&ens);
    ensure(cert.failures.is_empty(), || format!("failures {:?}", cert.failures))?;
    ensure(cert.method == Some(Method::TheoremRoute), || format!("method {:?}", cert.method))?;
    let design = cert.design.ok_or("no design certificate")?;
    ensure(design.c2 == ctx.from_int(6), || format!("c2 = {:?}", design.c2))?;
    // c2 = 2(a^2 - b) = 6, a^2 != b and a^2 - b = b c1 / a
    let gap = ctx.sub(&ctx.mul(&p.a, &p.a), &p.b);
    ensure(design.c2 == ctx.scale_int(&gap, 2), || "c2 != 2(a^2 - b)".into())?;
    ensure(!gap.is_zero(), || "a^2 = b".into())?;
    let rhs = ctx.div(&ctx.mul(&p.b, &design.c1), &p.a).map_err(|e| e.to_string())?;
    ensure(gap == rhs, || "a^2 - b != b c1 / a".into())?;

    let mut rng = runner(73, 1);
    let pairs = proptest::collection::vec((0..ens.n(), 0..ens.n()), 100_000);
    let vs = ens.vectors();
    for (i, j) in sample(&mut rng, &pairs) {
        let g = herm_inner(&vs[i], &vs[j]).map_err(|e| e.to_string())?;
        let ok = if i == j { g == p.a } else { ctx.norm(&g) == p.b };
        ensure(ok, || format!("sampled Gram entry ({i}, {j}) disagrees"))?;
    }
    Ok("(2, 1, 6) structural, c2 = 6 via theorem-route, 1e5 sampled Gram entries agree".into())
}

fn table() -> Check {
    // d, p, k, r and the gray (design) columns.
    let expected: [(u64, u64, u64, u64, bool); 14] = [
        (13, 2, 6, 3, false),
        (57, 2, 9, 7, false),
        (73, 7, 12, 8, true),
        (307, 2, 51, 17, false),
        (757, 2, 378, 27, false),
        (993, 2, 15, 31, false),
        (1723, 2, 287, 41, false),
        (1723, 5, 287, 41, true),
        (2257, 2, 90, 47, false),
        (2257, 23, 30, 47, true),
        (2451, 2, 63, 49, false),
        (3541, 2, 118, 59, false),
        (3541, 29, 590, 59, true),
        (5113, 2, 213, 71, false),
    ];
    let rows = search(100, 600, 71);
    let got: Vec<_> = rows.iter().map(|r| (r.d, r.p, r.k, r.r, r.design)).collect();
    ensure(got == expected, || format!("rows {got:?}"))?;
    let csv = search_csv(&rows);
    ensure(csv.lines().count() == 15 && csv.starts_with("d,p,k,r,design\n"), || "csv shape".into())?;
    ensure(search(1, 600, 71).is_empty(), || "empty range produced rows".into())?;
    Ok("14 rows, design flags at (73,7), (1723,5), (2257,23), (3541,29)".into())
}

fn verifier_equivalence() -> Check {
    let suite = fixture_suite().map_err(|e| e.to_string())?;
    ensure(suite.len() >= 20, || format!("only {} fixtures", suite.len()))?;
    let mut designs = 0;
    for f in &suite {
        ensure(f.ensemble.d() <= 8, || format!("{} has d > 8", f.name))?;
        let naive = check_2design_naive(&f.ensemble).map_err(|e| format!("{}: {e}", f.name))?;
        let psi = check_2design_psi(&f.ensemble).map_err(|e| format!("{}: {e}", f.name))?;
        ensure(naive == psi, || format!("{}: naive {naive:?} vs psi {psi:?}", f.name))?;
        designs += usize::from(naive.is_some());
    }
    ensure(designs > 0 && designs < suite.len(), || "suite lacks designs or non-designs".into())?;
    Ok(format!("{} fixtures ({designs} designs) agree on flag and c2", suite.len()))
}

fn choi_identity() -> Check {
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let choi = transpose_compose(&depolarizing_channel(d)).choi().clone();
        let target = swap_projector(d) * c(2.0 / (d as f64 + 1.0), 0.0);
        let r = max_abs(&(choi - target));
        ensure(r < 1e-12, || format!("d = {d}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("d = 2..8, worst residual {worst:.1e}"))
}

/// Completeness and reconstruction residuals of Kraus operators, against
/// `X ↦ (X + tr X · I)/(d + 1)` on every `e_i e_j*`.
fn kraus_residuals(d: usize, kraus: &[CMatrix]) -> (f64, f64, f64) {
    let completeness =
        kraus.iter().fold(CMatrix::zeros(d, d), |acc, r| acc + r.adjoint() * r) - CMatrix::identity(d, d);
    let mut recon: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let x = unit(d, i, j);
            let image = kraus.iter().fold(CMatrix::zeros(d, d), |acc, r| acc + r * &x * r.adjoint());
            let trace = if i == j { 1.0 } else { 0.0 };
            let expected = (x + CMatrix::identity(d, d) * c(trace, 0.0)) * c(1.0 / (d as f64 + 1.0), 0.0);
            recon = recon.max(max_abs(&(image - expected)));
        }
    }
    // rank one iff ‖R‖_F^4 = ‖R* R‖_F^2
    let rank_gap = kraus
        .iter()
        .map(|r| {
            let f2 = r.norm_squared();
            ((f2 * f2 - (r.adjoint() * r).norm_squared()) / (f2 * f2)).abs()
        })
        .fold(0.0, f64::max);
    (max_abs(&completeness), recon, rank_gap)
}

fn ebr_certificates() -> Check {
    let mut cases: Vec<(String, CEnsemble, Provenance, usize)> = vec![
        ("SIC d=2".into(), sic_catalog(2).map_err(|e| e.to_string())?, Provenance::Sic, 4),
        ("SIC d=3".into(), sic_catalog(3).map_err(|e| e.to_string())?, Provenance::Sic, 9),
    ];
    for d in [2, 3, 5, 7] {
        cases.push((format!("MUB d={d}"), mub_ensemble(d).map_err(|e| e.to_string())?, Provenance::Mub, d * d + d));
    }
    for (name, ens, prov, bound) in cases {
        let (kraus, cert) = design_to_kraus(&ens, prov, CERT_TOL).map_err(|e| format!("{name}: {e}"))?;
        ensure(cert.holds() && cert.bound == bound && kraus.len() == bound, || {
            format!("{name}: bound {} with {} operators", cert.bound, kraus.len())
        })?;
        let (comp, recon, rank_gap) = kraus_residuals(ens.d(), &kraus);
        ensure(comp < 1e-12 && recon < 1e-12 && rank_gap < 1e-10, || {
            format!("{name}: completeness {comp:e}, reconstruction {recon:e}, rank gap {rank_gap:e}")
        })?;
    }
    Ok("bounds 4, 9 and d^2 + d for d = 2, 3, 5, 7 with residuals < 1e-12".into())
}

fn round_trip() -> Check {
    let mut ensembles = vec![sic_catalog(2), sic_catalog(3)];
    ensembles.extend([2, 3, 5, 7].map(mub_ensemble));
    for ens in ensembles {
        let ens = ens.map_err(|e| e.to_string())?;
        let (kraus, _) = design_to_kraus(&ens, Provenance::Imported, CERT_TOL).map_err(|e| e.to_string())?;
        let transported = transpose_compose(&Channel::from_kraus(kraus).map_err(|e| e.to_string())?);
        let back = kraus_to_design(transported.kraus().ok_or("no Kraus form")?, 1e-10).map_err(|e| e.to_string())?;
        ensure(back.n() == ens.n(), || "size changed".into())?;
        let mut used = vec![false; back.n()];
        for (x, &w) in ens.vectors().iter().zip(ens.weights()) {
            let hit = (0..back.n()).find(|&m| {
                !used[m] && x.dotc(&back.vectors()[m]).norm() > 1.0 - 1e-10 && (back.weights()[m] - w).abs() < 1e-10
            });
            let m = hit.ok_or_else(|| format!("d = {}: a vector was not recovered", ens.d()))?;
            used[m] = true;
        }
    }
    Ok("SIC d = 2, 3 and MUB d = 2, 3, 5, 7 recovered up to phase".into())
}

fn caratheodory() -> Check {
    let mixed = sic_catalog(2).and_then(|s| s.mix(&mub_ensemble(2)?, 0.5)).map_err(|e| e.to_string())?;
    ensure(mixed.n() == 10, || format!("mixed design has {} points", mixed.n()))?;
    let pruned = caratheodory_prune(&mixed, VERIFY_TOL).map_err(|e| e.to_string())?;
    // weighted 2-design iff Σ w_k w_l |<x_k, x_l>|^4 = 2/(d(d+1)) with Σ w = 1
    let (vs, ws) = (pruned.vectors(), pruned.weights());
    let fp: f64 = (0..vs.len())
        .flat_map(|k| (0..vs.len()).map(move |l| (k, l)))
        .map(|(k, l)| ws[k] * ws[l] * vs[k].dotc(&vs[l]).norm_sqr().powi(2))
        .sum();
    let residual = (fp - 1.0 / 3.0).abs().max((ws.iter().sum::<f64>() - 1.0).abs());
    ensure(pruned.n() <= 9, || format!("{} points after pruning", pruned.n()))?;
    ensure(ws.iter().all(|&w| w >= 0.0), || "negative weight".into())?;
    ensure(residual < 1e-9, || format!("moment residual {residual:e}"))?;
    Ok(format!("10 -> {} points, residual {residual:.1e}", pruned.n()))
}

fn quaternion_pipeline() -> Check {
    let ens = simplex_design_d2();
    ensure(ens.n() == 6, || "size".into())?;
    let (first, second) = q_design_moments(&ens);
    ensure((first - 0.5).abs() < 1e-12 && (second - 0.3).abs() < 1e-12, || format!("moments ({first}, {second})"))?;
    let rep = check_tight_q_design(&ens, 1e-12);
    ensure(rep.passes, || format!("{rep:?}"))?;
    ensure(rep.angle.is_some_and(|b| (b - 0.4).abs() < 1e-12), || format!("angle {:?}", rep.angle))?;

    // Cross-Gramians from the real trace inner product of the basis matrices.
    let units = [Quaternion::I, Quaternion::J, Quaternion::K];
    let basis = |x: &QVector| units.map(|u| x.sandwich(u));
    let vs = ens.vectors();
    let mut potential_sum = 0.0;
    let mut pairs = 0;
    for (k, x) in vs.iter().enumerate() {
        for (l, y) in vs.iter().enumerate() {
            let (bx, by) = (basis(x), basis(y));
            let mut g = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    g[a][b] = re_trace_inner(&bx[a], &by[b]).map_err(|e| e.to_string())?;
                }
            }
            potential_sum += g.iter().flatten().map(|v| v * v).sum::<f64>();
            if k < l {
                pairs += 1;
                for a in 0..3 {
                    for b in 0..3 {
                        let gtg: f64 = (0..3).map(|m| g[m][a] * g[m][b]).sum();
                        let want = if a == b { 0.16 } else { 0.0 };
                        ensure((gtg - want).abs() < 1e-10, || format!("pair ({k}, {l}): G^T G entry {gtg}"))?;
                    }
                }
            }
        }
    }
    let potential = potential_sum / 36.0;
    ensure(pairs == 15, || "pair count".into())?;
    ensure((potential - 0.9).abs() < 1e-12, || format!("potential {potential}"))?;
    let cert = certify_fusion_frame(&ens, 1e-10);
    ensure(cert.equi_isoclinic && cert.tight, || format!("{cert:?}"))?;
    ensure(cert.alpha.is_some_and(|a| (a - 0.16).abs() < 1e-10), || format!("alpha {:?}", cert.alpha))?;
    ensure((cert.potential - 0.9).abs() < 1e-12, || format!("certificate potential {}", cert.potential))?;
    Ok("moments (1/2, 3/10), b = 2/5, alpha = 0.16 on 15 pairs, potential 9/10".into())
}

fn optimizer() -> Check {
    let seeds: Vec<u64> = (0..10).collect();
    let runs = optimize_seeds(2, 6, &seeds, &OptimizeConfig::default());
    let good = runs.iter().filter(|r| r.gap < 1e-8 && check_tight_q_design(&r.ensemble, 1e-6).passes).count();
    ensure(good >= 8, || format!("only {good}/10 runs converged"))?;

    let mut rng = runner(10, 1);
    let mut worst: f64 = 0.0;
    for (d, n) in [(2, 6), (3, 5), (2, 3)] {
        let coords = sample(&mut rng, &proptest::collection::vec(-1.0..1.0f64, 4 * d * n));
        let xs: Vec<QVector> = coords.chunks(4 * d).map(|c| QVector::from_coords(c).normalized().unwrap()).collect();
        let grad: Vec<f64> = potential_gradient(&xs).iter().flat_map(QVector::coords).collect();
        let flat: Vec<f64> = xs.iter().flat_map(QVector::coords).collect();
        let at = |v: &[f64]| potential(&v.chunks(4 * d).map(QVector::from_coords).collect::<Vec<_>>());
        let h = 1e-5;
        let mut err = 0.0;
        for i in 0..flat.len() {
            let (mut plus, mut minus) = (flat.clone(), flat.clone());
            plus[i] += h;
            minus[i] -= h;
            let fd = (at(&plus) - at(&minus)) / (2.0 * h);
            err += (fd - grad[i]).powi(2);
        }
        let rel = err.sqrt() / grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        ensure(rel < 1e-6, || format!("gradient relative error {rel:e} at d = {d}, n = {n}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("{good}/10 seeds reach gap < 1e-8; gradient relative error {worst:.1e}"))
}

// ---------------------------------------------------------------- properties

fn property(name: &str, result: Result<(), TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    result.map_err(|e| format!("{name}: {e}"))
}

fn field_element(ctx: Arc<FieldCtx>) -> BoxedStrategy<FieldElement> {
    proptest::collection::vec(0..ctx.p(), ctx.degree())
        .prop_map(move |c| ctx.element(c).expect("coefficients below p"))
        .boxed()
}

fn complex_matrix(d: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(-1.0..1.0f64, 2 * d * d)
        .prop_map(move |v| CMatrix::from_fn(d, d, |i, j| c(v[2 * (i * d + j)], v[2 * (i * d + j) + 1])))
}

fn q_matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    proptest::collection::vec(-1.0..1.0f64, 4 * rows * cols).prop_map(move |v| {
        QMatrix::from_fn(rows, cols, |i, j| {
            let o = 4 * (i * cols + j);
            Quaternion::new(v[o], v[o + 1], v[o + 2], v[o + 3])
        })
    })
}

fn properties() -> Check {
    let fields = [build_field(3, 4), build_field(7, 24), build_field(2, 12)];
    for (idx, f) in fields.into_iter().enumerate() {
        let ctx = Arc::new(f.map_err(|e| e.to_string())?);
        let el = field_element(ctx.clone());
        let seed = idx as u8;
        property(
            "field axioms",
            runner(seed, 64).run(&(el.clone(), el.clone(), el.clone()), |(a, b, c)| {
                prop_assert_eq!(ctx.mul(&ctx.mul(&a, &b), &c), ctx.mul(&a, &ctx.mul(&b, &c)));
                prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
                if !a.is_zero() {
                    prop_assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
                }
                Ok(())
            }),
        )?;
        property(
            "Frobenius",
            runner(seed + 10, 64).run(&(el.clone(), el.clone()), |(a, b)| {
                prop_assert_eq!(ctx.conj(&ctx.mul(&a, &b)), ctx.mul(&ctx.conj(&a), &ctx.conj(&b)));
                prop_assert_eq!(ctx.conj(&ctx.add(&a, &b)), ctx.add(&ctx.conj(&a), &ctx.conj(&b)));
                prop_assert_eq!(ctx.conj(&ctx.conj(&a)), a);
                Ok(())
            }),
        )?;
        let vec3 = proptest::collection::vec(el.clone(), 3);
        property(
            "Hermitian symmetry",
            runner(seed + 20, 32).run(&(vec3.clone(), vec3), |(x, y)| {
                let x = FFVector::new(ctx.clone(), x).unwrap();
                let y = FFVector::new(ctx.clone(), y).unwrap();
                prop_assert_eq!(herm_inner(&x, &y).unwrap(), ctx.conj(&herm_inner(&y, &x).unwrap()));
                Ok(())
            }),
        )?;
    }

    for d in 2..=6 {
        let p = swap_projector(d);
        ensure(max_abs(&(&p * &p - &p)) < 1e-12, || format!("projector not idempotent at d = {d}"))?;
    }
    for d in 2..=5 {
        let t = transpose_compose(&depolarizing_channel(d));
        property(
            "Choi probes",
            runner(30 + d as u8, 32).run(&complex_matrix(d), |x| {
                let expected = (x.transpose() + CMatrix::identity(d, d) * x.trace()) * c(1.0 / (d as f64 + 1.0), 0.0);
                prop_assert!(max_abs(&(t.apply(&x) - expected)) < 1e-12);
                Ok(())
            }),
        )?;
    }

    property(
        "Re tr cyclicity",
        runner(40, 64).run(&(q_matrix(2, 3), q_matrix(3, 2)), |(a, b)| {
            let ab = a.matmul(&b).unwrap().trace().r;
            let ba = b.matmul(&a).unwrap().trace().r;
            prop_assert!((ab - ba).abs() < 1e-12);
            Ok(())
        }),
    )?;
    property(
        "Hermitian vs anti-Hermitian",
        runner(41, 64).run(&(q_matrix(3, 3), q_matrix(3, 3)), |(m, n)| {
            let h = m.add(&m.adjoint()).unwrap();
            let s = n.sub(&n.adjoint()).unwrap();
            prop_assert!(re_trace_inner(&h, &s).unwrap().abs() < 1e-12);
            Ok(())
        }),
    )?;

    for d in 1..=5 {
        let mut coords = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for u in [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K] {
                    let mut m = QMatrix::zeros(d, d);
                    m.set(i, j, u);
                    let (h, s) = (m.add(&m.adjoint()).unwrap(), m.sub(&m.adjoint()).unwrap());
                    coords.push(h.coords());
                    coords.push(s.coords());
                }
            }
        }
        let r = rank(coords);
        ensure(r == 4 * d * d, || format!("Hermitian + anti-Hermitian span has dimension {r} at d = {d}"))?;
    }
    Ok("field axioms, Frobenius, Hermitian symmetry, projector, Choi probes, Re tr, orthogonality, 4d^2".into())
}

fn rank(mut rows: Vec<Vec<f64>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs())) else { break };
        if rows[p][col].abs() < 1e-9 {
            continue;
        }
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r {
                let f = rows[i][col] / rows[r][col];
                for j in col..cols {
                    rows[i][j] -= f * rows[r][j];
                }
            }
        }
        r += 1;
    }
    r
}

// ---------------------------------------------------------------- harness

fn main() -> ExitCode {
    let criteria: [(&str, f64, fn() -> Check); 11] = [
        ("Gabor ETF, small exact (2, 6, 3)", 10.0, gabor_small),
        ("Gabor tight 2-design, d = 73", 60.0, gabor_large),
        ("parameter table reproduction", 120.0, table),
        ("naive and Psi 2-design verifiers agree", 60.0, verifier_equivalence),
        ("Choi identity, d = 2..8", 5.0, choi_identity),
        ("entanglement-breaking rank certificates", 10.0, ebr_certificates),
        ("design -> Kraus -> design round trip", 5.0, round_trip),
        ("Caratheodory pruning of the 10-point design", 5.0, caratheodory),
        ("quaternionic simplex design and fusion frame", 5.0, quaternion_pipeline),
        ("optimizer sanity and gradient check", 120.0, optimizer),
        ("randomized property suites", 120.0, properties),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let outcome =
            outcome.and_then(|m| if secs < limit { Ok(m) } else { Err(format!("{secs:.1} s exceeds {limit} s")) });
        match outcome {
            Ok(msg) => println!("PASS  {:>2}  {name} ({secs:.2} s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2}  {name} ({secs:.2} s): {msg}", i + 1);
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
