mod common;

use blockstruct::blockmat::{validate_profile, BlockKind};
use blockstruct::oracle::{feasible_enum, DEFAULT_BUDGET};
use blockstruct::reduce::{
    build_multistage, build_nfold, lift_nfold_to_treefold, project_solution, two_stage_instance, two_stage_satisfied,
    ReductionCertificate, SourceWitness, SubsetSumInstance,
};
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;

fn nfold_feasible(a: &[i64], b: i64, sigma1: usize) -> Option<bool> {
    let ss = SubsetSumInstance::from_i64(a, b).unwrap();
    let (inst, _) = build_nfold(&ss, sigma1).ok()?;
    Some(feasible_enum(&inst, DEFAULT_BUDGET).unwrap().feasible)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn nfold_agrees_with_brute_force(a in prop::collection::vec(0i64..40, 0..=5), b in 1i64..=40, sigma1 in 1usize..=6) {
        let a: Vec<i64> = a.into_iter().map(|x| x % b).collect();
        if let Some(f) = nfold_feasible(&a, b, sigma1) {
            prop_assert_eq!(f, subset_sum_brute(&a, b));
        }
    }

    #[test]
    fn item_order_does_not_matter(a in prop::collection::vec(0i64..20, 1..=4), b in 2i64..=20, sigma1 in 1usize..=4, rot in 0usize..4) {
        let a: Vec<i64> = a.into_iter().map(|x| x % b).collect();
        let mut rotated = a.clone();
        rotated.rotate_left(rot % a.len());
        prop_assert_eq!(nfold_feasible(&a, b, sigma1), nfold_feasible(&rotated, b, sigma1));
    }

    #[test]
    fn subset_sum_witnesses_round_trip(
        chosen in prop::collection::vec(1i64..15, 2..=3),
        others in prop::collection::vec(0i64..100, 0..=2),
        sigma1 in 1usize..=3,
    ) {
        let b: i64 = chosen.iter().sum();
        let a: Vec<i64> = chosen.iter().copied().chain(others.iter().map(|v| v % b)).collect();
        let x: Vec<bool> = (0..a.len()).map(|i| i < chosen.len()).collect();
        let ss = SubsetSumInstance::from_i64(&a, b).unwrap();
        let Ok((inst, cert)) = build_nfold(&ss, sigma1) else { return Ok(()) };
        let y = cert.extend(&SourceWitness::Selection(x.clone())).unwrap();
        prop_assert!(inst.is_feasible(&y));
        prop_assert_eq!(project_solution(&inst, &cert, &y).unwrap(), SourceWitness::Selection(x));
    }
}

#[test]
fn treefold_lift_preserves_feasibility() {
    for (a, b) in [(vec![3i64, 5, 6], 8i64), (vec![3, 5, 6], 7), (vec![2, 4], 7), (vec![1, 9, 14, 20], 30)] {
        let ss = SubsetSumInstance::from_i64(&a, b).unwrap();
        for sigma1 in 1..=3 {
            let Ok((nfold, cert)) = build_nfold(&ss, sigma1) else { continue };
            for tau in 2..=4 {
                let Ok((lifted, _, lcert)) = lift_nfold_to_treefold(&nfold, &cert, tau) else { continue };
                let p = lifted.profile().unwrap();
                assert_eq!(p.kind(), BlockKind::TreeFold);
                assert_eq!(p.tau(), tau);
                assert!(validate_profile(lifted.matrix(), p).unwrap());
                let res = feasible_enum(&lifted, DEFAULT_BUDGET).unwrap();
                assert_eq!(res.feasible, subset_sum_brute(&a, b), "{a:?} {b} {sigma1} {tau}");
                if let Some(w) = res.witness {
                    let SourceWitness::Selection(x) = project_solution(&lifted, &lcert, &w).unwrap() else { panic!() };
                    assert!(ss.is_solution(&x));
                }
            }
        }
    }
}

#[test]
fn multistage_matches_two_stage_source() {
    let mut r = rng(12);
    let z_bound = BigInt::from(1);
    let mut feasible = 0;
    for round in 0..12 {
        let t = 2 + round % 3;
        let blocks: Vec<_> = (0..1 + round % 2).map(|_| random_block(t, &mut r)).collect();
        let (inst, cert) = build_multistage(&blocks, 2 + round % 2, &z_bound).unwrap();
        assert!(validate_profile(inst.matrix(), inst.profile().unwrap()).unwrap());
        let source = feasible_enum(&two_stage_instance(&blocks, &z_bound).unwrap(), DEFAULT_BUDGET).unwrap();
        let target = feasible_enum(&inst, DEFAULT_BUDGET).unwrap();
        assert_eq!(source.feasible, target.feasible, "round {round}");
        if let Some(w) = target.witness {
            feasible += 1;
            let SourceWitness::TwoStage { r, z } = project_solution(&inst, &cert, &w).unwrap() else { panic!() };
            assert!(two_stage_satisfied(&blocks, &r, &z).unwrap());
            let back = cert.extend(&SourceWitness::TwoStage { r, z }).unwrap();
            assert!(inst.is_feasible(&back));
        }
    }
    assert!(feasible > 0);
}

#[test]
fn certificate_kinds_must_match() {
    let ss = SubsetSumInstance::from_i64(&[1, 2], 3).unwrap();
    let (_, cert) = build_nfold(&ss, 1).unwrap();
    assert!(matches!(cert, ReductionCertificate::SubsetSum(_)));
    let wrong = SourceWitness::TwoStage { r: 0.into(), z: vec![] };
    assert!(cert.extend(&wrong).is_err());
}
