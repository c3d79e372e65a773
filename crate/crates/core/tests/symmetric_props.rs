use mqwitness::sample;
use mqwitness::states::{self, Bipartition};
use mqwitness::symmetric::{self, psmq_classify, psmq_state, PsmqVerdict};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn psmq_states_are_symmetric(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = sample::random_psmq(n, &mut rng);
        let s = psmq_state(&coeffs).unwrap();
        prop_assert!(symmetric::is_permutation_symmetric(&s.density(), 1e-12));
    }

    #[test]
    fn dichotomy_matches_rank_oracle(seed in any::<u64>(), n in 2usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = sample::random_psmq(n, &mut rng);
        let s = psmq_state(&coeffs).unwrap();
        let ranks: Vec<usize> = Bipartition::all_canonical(n)
            .iter()
            .map(|cut| states::schmidt_rank(&s, cut, 1e-8).unwrap())
            .collect();
        let all_one = ranks.iter().all(|&r| r == 1);
        prop_assert!(all_one || ranks.iter().all(|&r| r >= 2), "partial split {:?}", ranks);
        let verdict = psmq_classify(&coeffs, symmetric::DEFAULT_FIT_TOL);
        prop_assert_eq!(verdict.is_separable(), all_one);
        if let PsmqVerdict::FullySeparable { a, b } = verdict {
            let refit = symmetric::PsmqCoefficients::product(n, a, b).unwrap();
            let back = psmq_state(&refit).unwrap();
            prop_assert!(back.distance_up_to_phase(&s.normalized().unwrap()) <= 1e-8);
        }
    }
}

#[test]
fn mixed_examples_are_physical() {
    let [rho1, rho2, rho3] = symmetric::msmq_examples().unwrap();
    for rho in [&rho1, &rho2, &rho3] {
        assert!((rho.trace() - 1.0).abs() <= 1e-12);
        assert!(rho.eigenvalues().iter().all(|&e| e >= -1e-12));
        assert!(symmetric::is_permutation_symmetric(rho, 1e-12));
    }
}

#[test]
fn rho3_is_symmetric_ppt_but_not_a_diagonal_mixture() {
    let [_, rho2, rho3] = symmetric::msmq_examples().unwrap();
    assert!(states::is_ppt_everywhere(&rho3, 1e-12).unwrap());
    // rho2 mixes |000> and |111> incoherently; rho3 keeps the GHZ coherence
    assert!(rho2.matrix()[(0, 7)].norm() <= 1e-15);
    assert!((rho3.matrix()[(0, 7)].re - 2.0 / 19.0).abs() <= 1e-12);
}
