use majlat::ladder::{hadamard, r_vector};
use majlat::oracle_sim::embed;
use majlat::protocols::{apply_two_outcome, kraus_diagonals, max_abs_diff, monotone_slack};
use majlat::schmidt::{majorization_margin, majorized_by};
use majlat::{
    canonicalize, compare, join, join_many, meet, meet_many, p_max, plan_greedy, plan_multi_source, plan_multi_target,
    plan_thrifty, plan_vidal, ratio_ladder, ConversionPlan, MajOrder, NamedState, ProbVec,
};
use proptest::prelude::*;

const EPS: f64 = 1e-9;

fn probvec(d: usize) -> impl Strategy<Value = ProbVec> {
    prop::collection::vec(0.001f64..1.0, d).prop_map(|w| {
        let total: f64 = w.iter().sum();
        ProbVec::new(w.into_iter().map(|x| x / total).collect()).unwrap()
    })
}

fn pair() -> impl Strategy<Value = (ProbVec, ProbVec)> {
    (2usize..=8).prop_flat_map(|d| (probvec(d), probvec(d)))
}

fn triple() -> impl Strategy<Value = (ProbVec, ProbVec, ProbVec)> {
    (2usize..=8).prop_flat_map(|d| (probvec(d), probvec(d), probvec(d)))
}

fn named(p: &ProbVec, q: &ProbVec) -> (NamedState, NamedState) {
    (NamedState::new("psi", p.clone()), NamedState::new("phi", q.clone()))
}

proptest! {
    #[test]
    fn canonical_form_ignores_order(raw in prop::collection::vec(0.001f64..1.0, 1..9), seed in any::<u64>()) {
        let total: f64 = raw.iter().sum();
        let v: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mut shuffled = v.clone();
        let n = shuffled.len();
        shuffled.rotate_left((seed % n as u64) as usize);
        let a = canonicalize(&v).unwrap();
        prop_assert_eq!(&a, &canonicalize(&shuffled).unwrap());
        prop_assert!(a.as_slice().windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(&canonicalize(a.as_slice()).unwrap(), &a);
    }

    #[test]
    fn compare_is_antisymmetric((p, q) in pair()) {
        prop_assert_eq!(compare(&p, &q), compare(&q, &p).reverse());
        prop_assert_eq!(compare(&p, &p), MajOrder::Equivalent);
    }

    #[test]
    fn meet_and_join_bound_both((p, q) in pair()) {
        let (m, j) = (meet(&p, &q), join(&p, &q));
        for v in [&p, &q] {
            prop_assert!(majorization_margin(&m, v) >= -EPS);
            prop_assert!(majorization_margin(v, &j) >= -EPS);
        }
        prop_assert!(max_abs_diff(&m, &meet(&q, &p)) <= 1e-12);
        prop_assert!(max_abs_diff(&j, &join(&q, &p)) <= 1e-12);
        prop_assert!(max_abs_diff(&meet(&p, &j), &p) <= EPS);
        prop_assert!(max_abs_diff(&join(&p, &m), &p) <= EPS);
    }

    #[test]
    fn meet_and_join_are_associative((p, q, r) in triple()) {
        let left = meet(&meet(&p, &q), &r);
        let right = meet(&p, &meet(&q, &r));
        prop_assert!(max_abs_diff(&left, &right) <= 1e-12);
        let left = join(&join(&p, &q), &r);
        let right = join(&p, &join(&q, &r));
        prop_assert!(max_abs_diff(&left, &right) <= 1e-12);
        let all = [p.clone(), q.clone(), r.clone()];
        prop_assert!(max_abs_diff(&meet_many(&all).unwrap(), &meet(&p, &meet(&q, &r))) <= 1e-12);
        prop_assert!(max_abs_diff(&join_many(&all).unwrap(), &join(&p, &join(&q, &r))) <= 1e-12);
    }

    #[test]
    fn p_max_matches_majorization((p, q) in pair()) {
        let pm = p_max(&p, &q).unwrap();
        prop_assert!(pm > 0.0 && pm <= 1.0);
        if majorized_by(&p, &q) {
            prop_assert!(pm >= 1.0 - EPS);
        }
        if majorization_margin(&p, &q) < -1e-6 {
            prop_assert!(pm < 1.0);
        }
    }

    #[test]
    fn ladder_reaches_an_intermediate_deterministically((p, q) in pair()) {
        let ladder = ratio_ladder(&p, &q).unwrap();
        prop_assert!(ladder.validate().is_ok());
        prop_assert!((ladder.r1() - p_max(&p, &q).unwrap()).abs() <= 1e-12);
        let chi = hadamard(r_vector(&ladder).values(), q.as_slice());
        prop_assert!((chi.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let chi = ProbVec::new(chi).unwrap();
        prop_assert!(majorized_by(&p, &chi));

        let kraus = kraus_diagonals(&ladder);
        prop_assert!(kraus.completeness_error() <= 1e-12);
        let out = apply_two_outcome(&chi, &kraus).unwrap();
        prop_assert!((out.success_prob - ladder.r1()).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&out.success, &q) <= 1e-12);
    }

    #[test]
    fn plans_agree_and_survive_json((p, q) in pair()) {
        let (src, tgt) = named(&p, &q);
        let plans = [plan_vidal(&src, &tgt).unwrap(), plan_greedy(&src, &tgt).unwrap(), plan_thrifty(&src, &tgt).unwrap()];
        for plan in &plans {
            prop_assert!(plan.validate().is_ok());
            prop_assert!((plan.success_prob - plans[0].success_prob).abs() <= 1e-12);
            for step in &plan.steps {
                prop_assert!(monotone_slack(step) >= -EPS);
            }
            let back: ConversionPlan = serde_json::from_str(&serde_json::to_string(plan).unwrap()).unwrap();
            prop_assert_eq!(&back, plan);
        }
        if compare(&p, &q) == MajOrder::Incomparable {
            let (xi, nu) = (plans[1].residual.as_ref().unwrap(), plans[2].residual.as_ref().unwrap());
            prop_assert!(majorization_margin(nu, xi) >= -EPS);
        }
    }

    #[test]
    fn multi_state_plans_keep_worst_case((p, q, r) in triple()) {
        let (psi, phi) = named(&p, &q);
        let phi2 = NamedState::new("phi2", r.clone());
        let mt = plan_multi_target(&psi, &[phi.clone(), phi2.clone()]).unwrap();
        prop_assert!(mt.validate().is_ok());
        let worst = p_max(&p, &q).unwrap().min(p_max(&p, &r).unwrap());
        prop_assert!((mt.success_prob - worst).abs() <= 1e-12);

        let ms = plan_multi_source(&[psi.clone(), phi2], &phi).unwrap();
        prop_assert!(ms.validate().is_ok());
        let worst = p_max(&p, &q).unwrap().min(p_max(&r, &q).unwrap());
        prop_assert!((ms.success_prob - worst).abs() <= 1e-12);
    }

    #[test]
    fn embedded_states_keep_their_spectrum(p in (1usize..=8).prop_flat_map(probvec)) {
        let s = embed(&p);
        prop_assert!((s.norm_squared() - 1.0).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&s.schmidt_spectrum().unwrap(), &p) <= 1e-9);
    }
}
