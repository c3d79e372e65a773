use mqwitness::sample;
use mqwitness::smq::{self, DEFAULT_EPS_ZERO};
use mqwitness::states::{self, Bipartition, PureState};
use mqwitness::transform::{self, find_ilo_to_smq, TransformOutcome};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smq_found_contract(seed in any::<u64>(), n in 3usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sample::random_genuinely_entangled(n, &mut rng);
        let TransformOutcome::SmqFound { chain, .. } = find_ilo_to_smq(&s, seed, 256).unwrap() else {
            return Err(TestCaseError::fail("genuinely entangled input declared separable"));
        };
        for op in chain.ops() {
            prop_assert!(op.det().norm() > 1e-12);
        }
        let image = states::apply_chain(&s, &chain).unwrap().normalized().unwrap();
        prop_assert!(smq::classify_smq(&image, DEFAULT_EPS_ZERO).is_ok());
        prop_assert!(states::is_genuinely_entangled(&image, 1e-8).unwrap());

        let u = transform::unitarize(&chain).unwrap().unitary_chain;
        prop_assert!(u.max_unitarity_defect() <= 1e-10);
        let image = states::apply_chain(&s, &u).unwrap().normalized().unwrap();
        prop_assert!(smq::classify_smq(&image, DEFAULT_EPS_ZERO).is_ok());
    }

    #[test]
    fn separable_verdicts_are_consistent(seed in any::<u64>(), n in 2usize..=5, k in 1usize..=4) {
        let k = k.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: PureState = sample::random_state(k, &mut rng).tensor(&sample::random_state(n - k, &mut rng));
        prop_assert!(!states::is_genuinely_entangled(&s, 1e-8).unwrap());
        let TransformOutcome::Separable(sep) = find_ilo_to_smq(&s, seed, 16).unwrap() else {
            return Err(TestCaseError::fail("product input reached SMQ form"));
        };
        let cut = Bipartition::new(n, &sep.factor_qubits).unwrap();
        prop_assert_eq!(states::schmidt_rank(&s, &cut, 1e-8).unwrap(), 1);
        if let Some(q) = sep.separating_qubit {
            prop_assert!(transform::check_separability_pattern(&s, q, 1e-8).unwrap());
        }
        prop_assert!(sep.recombine(n).unwrap().distance_up_to_phase(&s) <= 1e-8);
    }
}
