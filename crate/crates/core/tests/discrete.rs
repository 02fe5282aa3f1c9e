use contattn::discrete::*;
use contattn::oracle::{finite_diff_jacobian, simplex_projection_bruteforce, FiniteDiffSpec};
use nalgebra::DVector;
use proptest::collection::vec;
use proptest::prelude::*;

fn sv(v: Vec<f64>) -> ScoreVector {
    ScoreVector::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sparsemax_is_the_simplex_projection(v in vec(-3.0f64..3.0, 1..9)) {
        let f = sv(v);
        let a = sparsemax(&f);
        let b = simplex_projection_bruteforce(&f).unwrap();
        for (x, y) in a.probs.iter().zip(&b.probs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn outputs_live_on_the_simplex(v in vec(-20.0f64..20.0, 1..30), alpha in 1.05f64..3.0) {
        let f = sv(v);
        for p in [softmax(&f), sparsemax(&f), alpha_entmax(&f, alpha).unwrap()] {
            prop_assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.probs.iter().all(|&x| x >= 0.0));
            for (x, m) in p.probs.iter().zip(&p.support_mask) {
                prop_assert_eq!(*x > 0.0, *m);
            }
        }
    }

    #[test]
    fn raising_a_score_never_lowers_its_probability(
        v in vec(-2.0f64..2.0, 2..8), idx in 0usize..8, bump in 0.0f64..1.0
    ) {
        let i = idx % v.len();
        let mut raised = v.clone();
        raised[i] += bump;
        let (f, g) = (sv(v), sv(raised));
        prop_assert!(sparsemax(&g).probs[i] >= sparsemax(&f).probs[i] - 1e-15);
        prop_assert!(softmax(&g).probs[i] >= softmax(&f).probs[i] - 1e-15);
    }

    #[test]
    fn softmax_jacobian_rows_sum_to_zero(v in vec(-5.0f64..5.0, 1..10)) {
        let j = jacobian_discrete(&sv(v), DiscreteKind::Softmax);
        for r in 0..j.nrows() {
            prop_assert!(j.row(r).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn jacobians_match_finite_differences(v in vec(-2.0f64..2.0, 2..7)) {
        let step = 1e-6;
        let f = sv(v.clone());
        let tau = sparsemax_threshold(&f);
        // skip points where a +/- 2 step perturbation could change the support
        prop_assume!(v.iter().all(|x| (x - tau).abs() > 4.0 * step));
        let x = DVector::from_vec(v);
        for (kind, map) in [
            (DiscreteKind::Softmax, softmax as fn(&ScoreVector) -> SimplexVector),
            (DiscreteKind::Sparsemax, sparsemax),
        ] {
            let fd = finite_diff_jacobian(
                |y| Ok(DVector::from_vec(map(&sv(y.iter().copied().collect())).probs)),
                &x,
                FiniteDiffSpec { step },
            ).unwrap();
            prop_assert!((jacobian_discrete(&f, kind) - fd).amax() < 1e-6);
        }
    }
}

#[test]
fn entmax_interpolates_between_softmax_and_sparsemax() {
    let f = sv(vec![1.0, 0.8, 0.1, -0.5]);
    let soft = softmax(&f).support_size();
    let sparse = sparsemax(&f).support_size();
    let mid = alpha_entmax(&f, 1.5).unwrap().support_size();
    assert!(soft >= mid && mid >= sparse);
    assert_eq!(soft, 4);
    assert!(sparse < 4);
}
