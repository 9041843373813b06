mod common;

use common::{all_nss_tables, all_tables, oracle_nss, oracle_valid, random_table, tripartite_nss};
use pfqn::causality::constant_input_parties;
use pfqn::catalog;
use pfqn::validate::{
    enumerate_injective, is_valid_bruteforce, is_valid_recursive, output_reduce, reduce,
    FallbackPolicy, Validator,
};
use pfqn::{PartyShape, ProcessTable};

const TRIPARTITE_VALID: usize = 744;
const TRIPARTITE_VALID_NON_CAUSAL: usize = 64;

fn agree(w: &ProcessTable) -> bool {
    let oracle = oracle_valid(w);
    let brute = is_valid_bruteforce(w).unwrap().valid;
    let rec = is_valid_recursive(w).unwrap().valid;
    assert_eq!(brute, oracle, "bruteforce vs oracle on {w:?}");
    assert_eq!(rec, oracle, "recursive vs oracle on {w:?}");
    oracle
}

#[test]
fn tripartite_binary_suite() {
    let mut valid = 0;
    let mut non_causal = 0;
    for w in tripartite_nss() {
        if agree(&w) {
            valid += 1;
            if !common::oracle_causal(&w) {
                non_causal += 1;
            }
        }
    }
    assert_eq!(valid, TRIPARTITE_VALID);
    assert_eq!(non_causal, TRIPARTITE_VALID_NON_CAUSAL);
}

#[test]
fn loop_shaped_tables() {
    // x1 = g(a3), x2 = h(a1), x3 = k(a2) for every g, h, k on one bit
    for code in 0..64usize {
        let f = common::digits(code, &[4, 4, 4]);
        let bit = |t: usize, v: usize| (t >> v) & 1;
        let w = ProcessTable::from_fn(vec![PartyShape::sq(2); 3], |a| {
            vec![bit(f[0], a[2]), bit(f[1], a[0]), bit(f[2], a[1])]
        })
        .unwrap();
        let valid = agree(&w);
        // a loop is valid exactly when the cycle is broken by a constant
        let constant = f.iter().any(|&t| t == 0 || t == 3);
        assert_eq!(valid, constant, "{f:?}");
    }
}

#[test]
fn bipartite_suites() {
    let mut valid = 0;
    for w in all_tables(vec![PartyShape::sq(2); 2]) {
        valid += usize::from(agree(&w));
    }
    assert!(valid > 0);
    for w in all_tables(vec![PartyShape::sq(2), PartyShape::sq(3)]) {
        agree(&w);
    }
    for w in all_nss_tables(vec![PartyShape::sq(3); 2]) {
        agree(&w);
    }
}

#[test]
fn random_mixed_suite() {
    let mut rng = common::rng(11);
    let mut valid = 0;
    for _ in 0..1500 {
        let w = random_table(&mut rng, 4);
        valid += usize::from(agree(&w));
    }
    assert!(valid > 100, "suite too thin: {valid} valid");
}

#[test]
fn fallback_policies_agree() {
    let strict = Validator {
        fallback: FallbackPolicy::AnyPartyWithout,
        ..Validator::default()
    };
    let mut rng = common::rng(5);
    for _ in 0..1500 {
        let w = random_table(&mut rng, 4);
        assert_eq!(
            strict.recursive(&w).unwrap().valid,
            Validator::default().recursive(&w).unwrap().valid
        );
    }
}

#[test]
fn valid_implies_non_self_signaling() {
    let mut rng = common::rng(3);
    for _ in 0..800 {
        let w = random_table(&mut rng, 3);
        if oracle_valid(&w) {
            assert!(oracle_nss(&w));
        }
    }
    for w in all_tables(vec![PartyShape::sq(2); 2]) {
        if oracle_valid(&w) {
            assert!(oracle_nss(&w));
        }
    }
}

fn all_local_maps(shape: PartyShape) -> Vec<Vec<usize>> {
    let count = shape.a_size.pow(shape.x_size as u32);
    (0..count)
        .map(|c| common::digits(c, &vec![shape.a_size; shape.x_size]))
        .collect()
}

#[test]
fn reductions_of_valid_tables_stay_valid() {
    for w in tripartite_nss().filter(oracle_valid) {
        for k in 0..3 {
            for f in all_local_maps(w.shapes()[k]) {
                let r = reduce(&w, k, &f).unwrap();
                assert!(oracle_valid(&r), "{w:?} reduced at {k} by {f:?}");
            }
        }
    }
}

#[test]
fn reductions_commute() {
    let mut rng = common::rng(17);
    let mut checked = 0;
    for _ in 0..300 {
        let w = random_table(&mut rng, 4);
        if w.parties() < 2 || !oracle_nss(&w) {
            continue;
        }
        for k in 0..w.parties() {
            for j in (0..w.parties()).filter(|&j| j != k) {
                for a_j in 0..w.shapes()[j].a_size {
                    for f in all_local_maps(w.shapes()[k]) {
                        // after dropping one party the other's index may shift
                        let k_after_j = if k > j { k - 1 } else { k };
                        let j_after_k = if j > k { j - 1 } else { j };
                        let left = reduce(&output_reduce(&w, j, a_j).unwrap(), k_after_j, &f).unwrap();
                        let right = output_reduce(&reduce(&w, k, &f).unwrap(), j_after_k, a_j).unwrap();
                        assert_eq!(left, right);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn output_reductions_alone_do_not_certify_validity() {
    let w = catalog::gyni3();
    assert!(!agree(&w));
    for k in 0..3 {
        for a in 0..2 {
            assert!(oracle_valid(&output_reduce(&w, k, a).unwrap()));
        }
    }
    let ids: Vec<_> = enumerate_injective(w.shapes()[0]).collect();
    assert_eq!(ids, vec![vec![0, 1], vec![1, 0]]);
    assert!(!oracle_valid(&reduce(&w, 0, &ids[0]).unwrap()));
}

#[test]
fn catalog_tables_against_oracle() {
    for (w, valid) in [
        (catalog::lugano(), true),
        (catalog::gyni3(), false),
        (catalog::qutrit_lugano(), true),
        (catalog::ngpf(), true),
        (catalog::controlled_lugano(), true),
        (catalog::fourpartite_trit(), true),
        (catalog::domino_quasi(), false),
        (catalog::two_way_2x3(), false),
        (catalog::one_way_2x3(), true),
    ] {
        assert_eq!(oracle_valid(&w), valid, "{w:?}");
        assert_eq!(is_valid_recursive(&w).unwrap().valid, valid);
    }
    assert_eq!(constant_input_parties(&catalog::ngpf()), vec![3]);
}

#[test]
fn witnesses_replay() {
    let mut rng = common::rng(23);
    for _ in 0..500 {
        let w = random_table(&mut rng, 3);
        for report in [is_valid_bruteforce(&w).unwrap(), is_valid_recursive(&w).unwrap()] {
            if let Some(wit) = report.witness {
                let fps = pfqn::validate::fixed_points(&w, &wit.intervention).unwrap();
                assert_ne!(fps.len(), 1);
                assert_eq!(fps, wit.fixed_points);
            }
        }
    }
}
