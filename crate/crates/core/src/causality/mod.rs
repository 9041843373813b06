//! Causal structure of valid process functions.

mod game;

use std::collections::HashMap;

use serde::Serialize;

pub use game::{
    best_causal_value, best_causal_value_capped, causal_bound, correlations, swap_value,
    swap_value_capped, CausalStrategy, GameValue,
};

use crate::error::{Error, Result};
use crate::table::ProcessTable;
use crate::validate::{self, output_reduce, Validator, Witness};

/// Parties whose setting `w_k` is constant, ascending.
pub fn constant_input_parties(w: &ProcessTable) -> Vec<usize> {
    (0..w.parties())
        .filter(|&k| w.is_constant_component(k))
        .collect()
}

/// Why a valid table is not causal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalWitness {
    /// Output reductions `(party, value)` leading from the input table to a
    /// sub-table with no constant-input party. Parties use input numbering.
    pub path: Vec<(usize, usize)>,
}

impl CausalWitness {
    pub fn no_constant_input(&self) -> bool {
        self.path.is_empty()
    }
}

/// `Ok(None)` when `w` is causal. Rejects invalid tables.
pub fn is_causal(w: &ProcessTable) -> Result<Option<CausalWitness>> {
    let report = validate::is_valid_recursive(w)?;
    if !report.valid {
        return Err(Error::InvalidProcess(
            "causality is only defined for valid process functions".into(),
        ));
    }
    Ok(causal_witness(w))
}

/// Causality test without the validity precondition check.
pub(crate) fn causal_witness(w: &ProcessTable) -> Option<CausalWitness> {
    let mut memo = HashMap::new();
    non_causal_path(w, &mut memo).map(|path| CausalWitness { path })
}

fn non_causal_path(
    w: &ProcessTable,
    memo: &mut HashMap<Vec<u8>, Option<Vec<(usize, usize)>>>,
) -> Option<Vec<(usize, usize)>> {
    if w.parties() <= 1 {
        return None;
    }
    let key = w.canonical_key();
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let roots = constant_input_parties(w);
    let result = if roots.is_empty() {
        Some(vec![])
    } else {
        roots.iter().find_map(|&k| {
            (0..w.shapes()[k].a_size).find_map(|a_k| {
                let child = output_reduce(w, k, a_k).expect("in range");
                non_causal_path(&child, memo).map(|rest| {
                    let mut path = vec![(k, a_k)];
                    path.extend(
                        rest.into_iter()
                            .map(|(p, v)| (if p >= k { p + 1 } else { p }, v)),
                    );
                    path
                })
            })
        })
    };
    memo.insert(key, result.clone());
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Validity {
    Invalid,
    Valid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Causality {
    Causal,
    NonCausal,
    NotApplicable,
}

/// Outcome of the exhaustive cross-check run alongside the recursive decider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CrossCheck {
    Agreed,
    Disagreed,
    Skipped { interventions: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub validity: Validity,
    pub causality: Causality,
    pub has_global_past: bool,
    pub genuinely_non_causal: bool,
    pub constant_input_parties: Vec<usize>,
    pub validity_witness: Option<Witness>,
    pub causal_witness: Option<CausalWitness>,
    pub cross_check: CrossCheck,
}

pub fn classify(w: &ProcessTable) -> Result<Verdict> {
    classify_with(w, &Validator::default())
}

pub fn classify_with(w: &ProcessTable, validator: &Validator) -> Result<Verdict> {
    let report = validator.recursive(w)?;
    let cross_check = match validator.bruteforce(w) {
        Ok(brute) if brute.valid == report.valid => CrossCheck::Agreed,
        Ok(_) => CrossCheck::Disagreed,
        Err(Error::TooLarge { size, .. }) => CrossCheck::Skipped {
            interventions: size,
        },
        Err(e) => return Err(e),
    };
    let roots = constant_input_parties(w);
    if !report.valid {
        return Ok(Verdict {
            validity: Validity::Invalid,
            causality: Causality::NotApplicable,
            has_global_past: false,
            genuinely_non_causal: false,
            constant_input_parties: roots,
            validity_witness: report.witness,
            causal_witness: None,
            cross_check,
        });
    }
    let causal_witness = causal_witness(w);
    let non_causal = causal_witness.is_some();
    let has_global_past = !roots.is_empty();
    Ok(Verdict {
        validity: Validity::Valid,
        causality: if non_causal {
            Causality::NonCausal
        } else {
            Causality::Causal
        },
        has_global_past,
        genuinely_non_causal: non_causal && !has_global_past,
        constant_input_parties: roots,
        validity_witness: None,
        causal_witness,
        cross_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::index::PartyShape;

    #[test]
    fn lugano_is_genuinely_non_causal() {
        let v = classify(&catalog::lugano()).unwrap();
        assert_eq!(v.validity, Validity::Valid);
        assert_eq!(v.causality, Causality::NonCausal);
        assert!(!v.has_global_past);
        assert!(v.genuinely_non_causal);
        assert_eq!(v.cross_check, CrossCheck::Agreed);
        assert!(v.causal_witness.unwrap().no_constant_input());
    }

    #[test]
    fn one_way_bipartite_is_causal() {
        let w = ProcessTable::from_fn(vec![PartyShape::sq(2); 2], |a| vec![0, a[0]]).unwrap();
        assert_eq!(is_causal(&w).unwrap(), None);
        assert_eq!(constant_input_parties(&w), vec![0]);
    }

    #[test]
    fn constant_table_has_every_party_in_its_past() {
        let w = ProcessTable::from_fn(vec![PartyShape::sq(2); 3], |_| vec![1, 0, 1]).unwrap();
        assert_eq!(constant_input_parties(&w), vec![0, 1, 2]);
        assert_eq!(classify(&w).unwrap().causality, Causality::Causal);
    }

    #[test]
    fn ngpf_fails_through_control_value_one() {
        let w = catalog::ngpf();
        assert_eq!(constant_input_parties(&w), vec![3]);
        let wit = is_causal(&w).unwrap().unwrap();
        assert_eq!(wit.path, vec![(3, 1)]);
        let v = classify(&w).unwrap();
        assert!(v.has_global_past && !v.genuinely_non_causal);
    }

    #[test]
    fn gyni_is_rejected() {
        let w = catalog::gyni3();
        assert!(matches!(is_causal(&w), Err(Error::InvalidProcess(_))));
        let v = classify(&w).unwrap();
        assert_eq!(v.validity, Validity::Invalid);
        assert_eq!(v.causality, Causality::NotApplicable);
        assert!(v.validity_witness.is_some());
    }

    #[test]
    fn classify_is_idempotent() {
        let w = catalog::controlled_lugano();
        assert_eq!(classify(&w).unwrap(), classify(&w).unwrap());
    }

    #[test]
    fn oversized_cross_check_is_skipped() {
        let v = classify_with(&catalog::lugano(), &Validator::with_cap(8)).unwrap();
        assert_eq!(v.cross_check, CrossCheck::Skipped { interventions: 64 });
        assert_eq!(v.causality, Causality::NonCausal);
    }
}
