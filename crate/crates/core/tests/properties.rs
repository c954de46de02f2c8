use eschlab_core::curvature::{eschenburg_zero_criterion, flat_families, CurvatureEngine, TwoPlane};
use eschlab_core::rng::seeded;
use eschlab_core::su3::{ad_bracket, adjoint, haar_su3, inner0, random_vector, split_kp};
use eschlab_core::triples::{
    apply_move, canonical_form, classify, is_admissible, wilking_candidate_filter, CandidateVerdict, Move,
    MoveSet, PQPair, Perm3,
};
use eschlab_core::wilking::{
    almpos_case_engine, hg_values, identity_residuals, pole_distance, replay_wilking_certificate,
    DoubledVector,
};
use eschlab_core::Tolerances;
use proptest::prelude::*;

fn small_pair() -> impl Strategy<Value = PQPair> {
    let t = || prop::array::uniform3(-5i64..=5);
    (t(), -5i64..=5, -5i64..=5).prop_filter_map("sums must agree", |(p, q1, q2)| {
        let q3 = p.iter().sum::<i64>() - q1 - q2;
        PQPair::new(p, [q1, q2, q3]).ok()
    })
}

fn admissible_pair() -> impl Strategy<Value = PQPair> {
    small_pair().prop_filter("admissible", is_admissible)
}

fn moves() -> impl Strategy<Value = Move> {
    prop_oneof![
        (-3i64..=3).prop_map(Move::Shift),
        Just(Move::Negate),
        (0usize..6).prop_map(|i| Move::PermP(Perm3::ALL[i])),
        (0usize..6).prop_map(|i| Move::PermQ(Perm3::ALL[i])),
        Just(Move::SwapPQ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn moves_preserve_admissibility_and_isometric_class(pair in small_pair(), word in prop::collection::vec(moves(), 1..6)) {
        let admissible = is_admissible(&pair);
        let mut cur = pair;
        for mv in &word {
            let next = apply_move(&cur, *mv).unwrap();
            prop_assert_eq!(is_admissible(&next), admissible);
            if admissible && mv.eschenburg_isometry() {
                prop_assert_eq!(classify(&next).unwrap().class, classify(&cur).unwrap().class);
            }
            cur = next;
        }
    }

    #[test]
    fn canonical_form_is_an_orbit_invariant(pair in admissible_pair(), word in prop::collection::vec(moves(), 0..6)) {
        for set in [MoveSet::EschenburgIsometries, MoveSet::WilkingIsometries, MoveSet::AllDiffeos] {
            let c = canonical_form(&pair, set).unwrap();
            prop_assert_eq!(canonical_form(&c, set).unwrap(), c);
            let mut cur = pair;
            for mv in word.iter().filter(|m| set.contains(**m)) {
                cur = apply_move(&cur, *mv).unwrap();
            }
            prop_assert_eq!(canonical_form(&cur, set).unwrap(), c);
        }
    }

    #[test]
    fn new_candidates_meet_the_sign_conditions(q in prop::array::uniform3(-9i64..=9)) {
        if let Ok(r) = wilking_candidate_filter(q) {
            if r.verdict == CandidateVerdict::NewCandidate {
                let [q1, q2, q3] = r.q;
                prop_assert!(q1 + q2 + q3 > 0 && q1 > 0 && q1 > q2 && q2 * q3 < 0, "{:?}", r.q);
                prop_assert!(!r.subcases.is_empty());
            } else {
                prop_assert!(r.subcases.is_empty());
            }
        }
    }

    #[test]
    fn h_g_identities_away_from_poles(theta in 0.01f64..3.13, idx in 0usize..6) {
        let qs = [[3, 1, -2], [2, -1, 3], [5, -2, 3], [4, 1, -3], [5, 2, -3], [3, -2, 5]];
        let q = qs[idx];
        prop_assume!(pole_distance(theta, q) > 0.05);
        let r = identity_residuals(theta, q).unwrap();
        prop_assert!(r.algebraic_max() < 1e-10, "{:?}", r);
        prop_assert!(r.fd_max() < 1e-6, "{:?}", r);
        let v = hg_values(theta, q).unwrap();
        prop_assert!(v.h.is_some());
    }

    #[test]
    fn su3_algebra_closure(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (x, y) = (random_vector(&mut rng), random_vector(&mut rng));
        let g = haar_su3(&mut rng);
        prop_assert!(g.drift() < 1e-12);
        let (k, p) = split_kp(&x);
        prop_assert!(inner0(&k, &p).abs() < 1e-12);
        // Ad preserves the bi-invariant form and brackets
        let gx = adjoint(&g, &x);
        let gy = adjoint(&g, &y);
        prop_assert!((inner0(&gx, &gy) - inner0(&x, &y)).abs() < 1e-10);
        let lhs = adjoint(&g, &ad_bracket(&x, &y));
        let rhs = ad_bracket(&gx, &gy);
        prop_assert!(lhs.coords().iter().zip(rhs.coords().iter()).all(|(a, b)| (a - b).abs() < 1e-9));
    }

    #[test]
    fn doubled_lift_reconstructs(seed in any::<u64>(), t in 0.2f64..5.0) {
        let mut rng = seeded(seed);
        let base = haar_su3(&mut rng);
        let x = random_vector(&mut rng);
        let lift = DoubledVector::lift(&base, &x, t).unwrap();
        prop_assert!(lift.reconstruction_defect(&base, t).unwrap() < 1e-10);
    }

    #[test]
    fn flat_families_satisfy_the_criterion(seed in any::<u64>(), t in 0.1f64..10.0) {
        let mut rng = seeded(seed);
        let engine = CurvatureEngine::deformed(t).unwrap();
        for (x, y) in [flat_families::adk_y1(&mut rng), flat_families::y3_k(&mut rng)] {
            let plane = TwoPlane::new(x, y);
            prop_assert!(eschenburg_zero_criterion(&plane, t, 1e-10).unwrap());
            prop_assert!(engine.sectional_curvature(&plane).unwrap().abs() < 1e-8);
        }
    }
}

#[test]
fn engine_certificates_replay() {
    for q in [[3, 1, -2], [2, -1, 3], [1, -1, 2], [5, -2, 3]] {
        let report = almpos_case_engine(q, 1.0).unwrap();
        let cert = &report.analysis.certificate;
        assert!(cert.passes(&Tolerances::default()), "{q:?}");
        let again = replay_wilking_certificate(cert).unwrap();
        assert!(again.passes(&Tolerances::default()));
        assert_eq!(again.residuals, cert.residuals);
    }
}
