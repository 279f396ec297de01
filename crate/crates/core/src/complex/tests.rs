use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vector(d: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_unit(d: usize, rng: &mut impl Rng) -> CVector {
    let v = random_vector(d, rng);
    let n = v.norm();
    v / c(n, 0.0)
}

fn random_matrix(r: usize, s: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(r, s, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn basis(d: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = c(1.0, 0.0);
    v
}

/// `(I + SWAP)/2` assembled from the action of SWAP on product basis vectors.
fn swap_projector(d: usize) -> CMatrix {
    let mut swap = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            swap += kron(&basis(d, j), &basis(d, i)) * kron(&basis(d, i), &basis(d, j)).adjoint();
        }
    }
    (CMatrix::identity(d * d, d * d) + swap) * c(0.5, 0.0)
}

/// `X ↦ (X + tr X · I)/(d + 1)` evaluated directly.
fn depolarize(x: &CMatrix) -> CMatrix {
    let d = x.nrows();
    (x + CMatrix::identity(d, d) * x.trace()) / c(d as f64 + 1.0, 0.0)
}

#[test]
fn symmetric_projector_matches_swap_oracle() {
    for d in 1..=5 {
        assert!(max_norm(&(sym_projector(d) - swap_projector(d))) < 1e-15);
    }
}

#[test]
fn frame_potential_examples() {
    for d in 1..=4 {
        let ens = CEnsemble::new(d, (0..d).map(|i| basis(d, i)).collect()).unwrap();
        assert!((frame_potential(&ens, 1) - 1.0 / d as f64).abs() < 1e-15);
    }
    let sic = sic_catalog(2).unwrap();
    assert!((frame_potential(&sic, 2) - 1.0 / 3.0).abs() < 1e-14);
    assert!((design_bound(2, 2) - 1.0 / 3.0).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let single = CEnsemble::new(3, vec![random_unit(3, &mut rng)]).unwrap();
    for t in 1..4 {
        assert!((frame_potential(&single, t) - 1.0).abs() < 1e-14);
    }
}

#[test]
fn ensemble_validation() {
    assert!(matches!(
        CEnsemble::new(2, vec![CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])]),
        Err(ComplexError::NotUnit { k: 0, .. })
    ));
    assert_eq!(CEnsemble::with_weights(1, vec![basis(1, 0)], vec![0.5]), Err(ComplexError::InvalidWeights));
    assert!(matches!(CEnsemble::new(2, vec![basis(3, 0)]), Err(ComplexError::DimensionMismatch(_))));
}

#[test]
fn catalog_designs_pass_the_moment_check() {
    assert!(check_weighted_2design(&sic_catalog(2).unwrap()) < 1e-12);
    assert!(check_weighted_2design(&sic_catalog(3).unwrap()) < 1e-12);
    assert!(check_weighted_2design(&mub_ensemble(3).unwrap()) < 1e-10);
    for d in [2, 3, 5, 7] {
        let mub = mub_ensemble(d).unwrap();
        assert_eq!(mub.n(), d * (d + 1));
        assert!(check_weighted_2design(&mub) < 1e-10, "d = {d}");
    }
    let mub5 = mub_ensemble(5).unwrap();
    assert!((frame_potential(&mub5, 2) - 1.0 / 15.0).abs() < 1e-12);
    assert_eq!(sic_catalog(4).unwrap_err(), ComplexError::UnsupportedDimension(4));
    assert_eq!(mub_ensemble(4).unwrap_err(), ComplexError::UnsupportedDimension(4));
    assert_eq!(mub_ensemble(9).unwrap_err(), ComplexError::UnsupportedDimension(9));
}

#[test]
fn small_ensembles_are_not_designs() {
    // A rank-one projector is far from a multiple of the symmetric projector.
    let one = CEnsemble::new(2, vec![basis(2, 0)]).unwrap();
    assert!(check_weighted_2design(&one) > 0.3);
    let ons = CEnsemble::new(3, (0..3).map(|i| basis(3, i)).collect()).unwrap();
    assert!(check_weighted_2design(&ons) > 0.1);
}

#[test]
fn mub_overlaps() {
    for d in [2usize, 3, 5] {
        let mub = mub_ensemble(d).unwrap();
        let vs = mub.vectors();
        for k in 0..vs.len() {
            for l in 0..vs.len() {
                let o = overlap(&vs[k], &vs[l]);
                let expected = if k / d != l / d {
                    1.0 / d as f64
                } else if k == l {
                    1.0
                } else {
                    0.0
                };
                assert!((o - expected).abs() < 1e-12, "d = {d}, ({k}, {l})");
            }
        }
    }
}

#[test]
fn sic_overlaps() {
    for d in [2usize, 3] {
        let sic = sic_catalog(d).unwrap();
        let vs = sic.vectors();
        assert_eq!(vs.len(), d * d);
        for k in 0..vs.len() {
            for l in k + 1..vs.len() {
                assert!((overlap(&vs[k], &vs[l]) - 1.0 / (d as f64 + 1.0)).abs() < 1e-12);
            }
        }
    }
    // A non-fiducial is rejected on import.
    assert!(matches!(sic_from_fiducial(&basis(3, 0), 1e-9), Err(ComplexError::NotADesign { .. })));
}

#[test]
fn depolarizing_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in 1..=5 {
        let z = depolarizing_channel(d);
        assert!(max_norm(&(z.apply(&CMatrix::identity(d, d)) - CMatrix::identity(d, d))) < 1e-15);
        let x = random_matrix(d, d, &mut rng);
        assert!((z.apply(&x).trace() - x.trace()).norm() < 1e-13);
        assert!(max_norm(&(z.apply(&x) - depolarize(&x))) < 1e-14);
        assert!(z.completeness_residual() < 1e-15);
    }
    let z2 = depolarizing_channel(2);
    let out = z2.apply(&(basis(2, 0) * basis(2, 0).adjoint()));
    let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![c(2.0 / 3.0, 0.0), c(1.0 / 3.0, 0.0)]));
    assert!(max_norm(&(out - expected)) < 1e-15);
}

#[test]
fn identity_channel_choi() {
    let id = Channel::from_kraus(vec![CMatrix::identity(2, 2)]).unwrap();
    let mut expected = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let eij = basis(2, i) * basis(2, j).adjoint();
            expected += eij.kronecker(&eij);
        }
    }
    assert!(max_norm(&(id.choi() - expected)) < 1e-15);
}

#[test]
fn transposed_depolarizing_choi_is_a_scaled_symmetric_projector() {
    for d in 2..=8 {
        let choi = transpose_compose(&depolarizing_channel(d)).choi().clone();
        let target = swap_projector(d) * c(2.0 / (d as f64 + 1.0), 0.0);
        assert!(max_norm(&(choi - target)) < 1e-12, "d = {d}");
    }
}

/// `(w ⊗ x)^T C (y ⊗ z)` against `x^T Φ(w y^T) z`.
fn choi_probe_gap(ch: &Channel, rng: &mut impl Rng) -> f64 {
    let (d, m) = (ch.d_in(), ch.d_out());
    let (w, x, y, z) = (random_vector(d, rng), random_vector(m, rng), random_vector(d, rng), random_vector(m, rng));
    let lhs = (kron(&w, &x).transpose() * ch.choi() * kron(&y, &z))[(0, 0)];
    let rhs = (x.transpose() * ch.apply(&(&w * y.transpose())) * &z)[(0, 0)];
    (lhs - rhs).norm()
}

#[test]
fn choi_identity_probes() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let kraus: Vec<CMatrix> = (0..3).map(|_| random_matrix(2, 3, &mut rng)).collect();
    let channels =
        [depolarizing_channel(3), transpose_compose(&depolarizing_channel(4)), Channel::from_kraus(kraus).unwrap()];
    for ch in &channels {
        for _ in 0..100 {
            assert!(choi_probe_gap(ch, &mut rng) < 1e-12);
        }
    }
}

#[test]
fn transpose_is_an_involution_and_transports_rank_one_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pairs: Vec<(CVector, CVector)> =
        (0..4).map(|_| (random_vector(3, &mut rng), random_vector(3, &mut rng))).collect();
    let phi = Channel::from_kraus(pairs.iter().map(|(x, y)| x * y.transpose()).collect()).unwrap();
    let lemma = Channel::from_kraus(pairs.iter().map(|(x, y)| x.conjugate() * y.transpose()).collect()).unwrap();
    let t_phi = transpose_compose(&phi);
    assert!(t_phi.kraus().is_some());
    for i in 0..3 {
        for j in 0..3 {
            let e = basis(3, i) * basis(3, j).adjoint();
            let direct = phi.apply(&e).transpose();
            assert!(max_norm(&(t_phi.apply(&e) - &direct)) < 1e-12);
            assert!(max_norm(&(lemma.apply(&e) - &direct)) < 1e-12);
        }
    }
    for ch in [phi, depolarizing_channel(3), Channel::from_kraus(vec![random_matrix(3, 3, &mut rng)]).unwrap()] {
        let back = transpose_compose(&transpose_compose(&ch));
        for _ in 0..5 {
            let x = random_matrix(3, 3, &mut rng);
            assert!(max_norm(&(back.apply(&x) - ch.apply(&x))) < 1e-12);
        }
    }
    let tz = transpose_compose(&depolarizing_channel(4));
    assert!(max_norm(&(tz.apply(&CMatrix::identity(4, 4)) - CMatrix::identity(4, 4))) < 1e-15);
}

#[test]
fn kraus_from_choi_examples() {
    let id1 = Channel::from_kraus(vec![CMatrix::identity(1, 1)]).unwrap();
    let kraus = kraus_from_choi(&id1, &[(basis(1, 0), basis(1, 0))], 1e-12).unwrap();
    let x = CMatrix::from_element(1, 1, c(0.3, -0.7));
    assert!(max_norm(&(Channel::from_kraus(kraus).unwrap().apply(&x) - &x)) < 1e-15);

    // Terms a = x_k, b = sqrt(d w_k) x_k from the tetrahedron decompose T∘𝔷_2.
    let sic = sic_catalog(2).unwrap();
    let tz = transpose_compose(&depolarizing_channel(2));
    let terms: Vec<(CVector, CVector)> =
        sic.vectors().iter().zip(sic.weights()).map(|(x, w)| (x.clone(), x * c((2.0 * w).sqrt(), 0.0))).collect();
    let kraus = kraus_from_choi(&tz, &terms, 1e-12).unwrap();
    assert!(max_norm(&(choi_from_kraus(&kraus) - tz.choi())) < 1e-12);

    let bad = vec![(basis(2, 0), basis(2, 0))];
    assert!(matches!(kraus_from_choi(&tz, &bad, 1e-9), Err(ComplexError::ChoiMismatch { .. })));
}

fn assert_certificate(ens: &CEnsemble, provenance: Provenance, bound: usize) {
    let (kraus, cert) = design_to_kraus(ens, provenance, CERT_TOL).unwrap();
    assert_eq!(kraus.len(), bound);
    assert_eq!(cert.bound, bound);
    assert!(cert.holds(), "{cert:?}");
    assert!(cert.completeness_residual < 1e-12 && cert.reconstruction_residual < 1e-12);
}

#[test]
fn ebr_certificates_from_catalog_designs() {
    assert_certificate(&sic_catalog(2).unwrap(), Provenance::Sic, 4);
    assert_certificate(&sic_catalog(3).unwrap(), Provenance::Sic, 9);
    for d in [2, 3, 5, 7] {
        assert_certificate(&mub_ensemble(d).unwrap(), Provenance::Mub, d * d + d);
    }
    let ons = CEnsemble::new(2, vec![basis(2, 0), basis(2, 1)]).unwrap();
    assert!(matches!(design_to_kraus(&ons, Provenance::Imported, 1e-9), Err(ComplexError::NotADesign { .. })));
}

fn assert_same_up_to_phase(a: &CEnsemble, b: &CEnsemble) {
    assert_eq!(a.n(), b.n());
    for k in 0..a.n() {
        assert!(a.vectors()[k].dotc(&b.vectors()[k]).norm() > 1.0 - 1e-10);
        assert!((a.weights()[k] - b.weights()[k]).abs() < 1e-10);
    }
}

fn round_trip(ens: &CEnsemble) -> CEnsemble {
    let (kraus, _) = design_to_kraus(ens, Provenance::Imported, CERT_TOL).unwrap();
    let transported = transpose_compose(&Channel::from_kraus(kraus).unwrap());
    kraus_to_design(transported.kraus().unwrap(), 1e-10).unwrap()
}

#[test]
fn kraus_to_design_inverts_design_to_kraus() {
    for ens in [sic_catalog(2).unwrap(), sic_catalog(3).unwrap(), mub_ensemble(3).unwrap(), mub_ensemble(5).unwrap()] {
        let back = round_trip(&ens);
        assert_same_up_to_phase(&ens, &back);
        assert!(check_weighted_2design(&back) < 1e-12);
    }
    let trivial = kraus_to_design(&[CMatrix::identity(1, 1)], 1e-12).unwrap();
    assert_eq!(trivial.n(), 1);
    assert!((trivial.weights()[0] - 1.0).abs() < 1e-15);
}

#[test]
fn antisymmetric_perturbation_is_flagged() {
    let sic = sic_catalog(2).unwrap();
    let mut kraus: Vec<CMatrix> =
        sic.vectors().iter().zip(sic.weights()).map(|(x, w)| x * x.transpose() * c((2.0 * w).sqrt(), 0.0)).collect();
    assert!(kraus_to_design(&kraus, 1e-10).is_ok());
    kraus[1][(0, 1)] += c(1e-3, 0.0);
    kraus[1][(1, 0)] -= c(1e-3, 0.0);
    assert!(matches!(kraus_to_design(&kraus, 1e-10), Err(ComplexError::AsymmetricTerm { k: 1, .. })));
}

#[test]
fn caratheodory_prunes_the_mixed_design() {
    let mixed = sic_catalog(2).unwrap().mix(&mub_ensemble(2).unwrap(), 0.5).unwrap();
    assert_eq!(mixed.n(), 10);
    let input = check_weighted_2design(&mixed);
    let pruned = caratheodory_prune(&mixed, VERIFY_TOL).unwrap();
    assert!(pruned.n() <= 9);
    let residual = check_weighted_2design(&pruned);
    assert!(residual < 1e-9);
    assert!(residual <= (10.0 * input).max(1e-14));
    assert!(pruned.n() >= 4);
}

#[test]
fn caratheodory_leaves_independent_designs_alone() {
    let sic = sic_catalog(2).unwrap();
    assert_eq!(caratheodory_prune(&sic, VERIFY_TOL).unwrap(), sic);
}

#[test]
fn caratheodory_merges_duplicates() {
    let sic = sic_catalog(3).unwrap();
    let doubled = sic.mix(&sic, 0.5).unwrap();
    let pruned = caratheodory_prune(&doubled, VERIFY_TOL).unwrap();
    assert_eq!(pruned.n(), 9);
    for (k, v) in pruned.vectors().iter().enumerate() {
        assert!(v.dotc(&sic.vectors()[k]).norm() > 1.0 - 1e-12);
        assert!((pruned.weights()[k] - 1.0 / 9.0).abs() < 1e-12);
    }
    let ons = CEnsemble::new(2, vec![basis(2, 0), basis(2, 1)]).unwrap();
    assert!(matches!(caratheodory_prune(&ons, VERIFY_TOL), Err(ComplexError::NotADesign { .. })));
}

#[test]
fn caratheodory_on_a_union_of_mubs() {
    let mub = mub_ensemble(3).unwrap();
    let mixed = mub.mix(&sic_catalog(3).unwrap(), 0.3).unwrap();
    let pruned = caratheodory_prune(&mixed, VERIFY_TOL).unwrap();
    assert!(pruned.n() <= 36 && pruned.n() <= mixed.n());
    assert!(check_weighted_2design(&pruned) < 1e-9);
}

#[test]
fn bound_table_examples() {
    let find = |d: u64, label: &str| ebr_bound_table(d).into_iter().find(|b| b.label.starts_with(label));
    assert_eq!(find(4, "d-1 prime power").unwrap().bound, 17);
    assert_eq!(find(4, "prime-power").unwrap().bound, 19);
    let mub4 = find(4, "mub").unwrap();
    assert_eq!((mub4.bound, mub4.constructive), (20, false));
    assert_eq!(find(6, "kd+1").unwrap().bound, 48);
    let best2 = ebr_bound_table(2).into_iter().find(|b| b.constructive).unwrap();
    assert_eq!((best2.label.as_str(), best2.bound), ("sic", 4));
    let best3 = ebr_bound_table(3).into_iter().find(|b| b.constructive).unwrap();
    assert_eq!(best3.bound, 9);
    // d + 1 = 5: d^2 + (p + 1) d
    assert_eq!(find(4, "d+1").unwrap().bound, 40);
    assert_eq!(find(3, "caratheodory").unwrap().bound, 36);
}

#[test]
fn weighted_designs_have_at_least_d_squared_points() {
    let mut all = vec![sic_catalog(2).unwrap(), sic_catalog(3).unwrap()];
    all.extend([2, 3, 5, 7].map(|d| mub_ensemble(d).unwrap()));
    all.push(caratheodory_prune(&all[0].mix(&all[2], 0.5).unwrap(), VERIFY_TOL).unwrap());
    for ens in &all {
        assert!(is_weighted_2design(ens, VERIFY_TOL));
        assert!(ens.n() >= ens.d() * ens.d());
        let fp = frame_potential(ens, 2);
        assert!((fp - design_bound(ens.d(), 2)).abs() < 1e-10);
    }
}

fn unit_strategy(d: usize) -> impl Strategy<Value = CVector> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let x = CVector::from_iterator(v.len(), v.into_iter().map(|(a, b)| c(a, b)));
            let n = x.norm();
            x / c(n, 0.0)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn choi_of_rank_one_kraus_is_the_sum_of_factor_outer_products(
        pairs in proptest::collection::vec((unit_strategy(3), unit_strategy(2)), 1..5)
    ) {
        // Kraus a b^T with a ∈ C^2, b ∈ C^3.
        let kraus: Vec<CMatrix> = pairs.iter().map(|(b, a)| a * b.transpose()).collect();
        let ch = Channel::from_kraus(kraus).unwrap();
        let mut expected = CMatrix::zeros(6, 6);
        for (b, a) in &pairs {
            let v = kron(b, a);
            expected += &v * v.adjoint();
        }
        prop_assert!(max_norm(&(ch.choi() - &expected)) < 1e-12);
        let terms: Vec<(CVector, CVector)> = pairs.iter().map(|(b, a)| (a.clone(), b.clone())).collect();
        prop_assert!(kraus_from_choi(&ch, &terms, 1e-12).is_ok());
    }

    #[test]
    fn choi_probes_on_random_channels(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, m) = (rng.gen_range(1..4), rng.gen_range(1..4));
        let kraus: Vec<CMatrix> = (0..rng.gen_range(1..4)).map(|_| random_matrix(m, d, &mut rng)).collect();
        let ch = Channel::from_kraus(kraus).unwrap();
        prop_assert!(choi_probe_gap(&ch, &mut rng) < 1e-12);
        let t = transpose_compose(&ch);
        prop_assert!(choi_probe_gap(&t, &mut rng) < 1e-12);
    }

    #[test]
    fn round_trip_on_unitarily_rotated_sics(seed in any::<u64>()) {
        // A unitary image of a design is a design.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_matrix(2, 2, &mut rng).qr().q();
        let sic = sic_catalog(2).unwrap();
        let rotated = CEnsemble::new(2, sic.vectors().iter().map(|x| &q * x).collect()).unwrap();
        let back = round_trip(&rotated);
        assert_same_up_to_phase(&rotated, &back);
    }
}
