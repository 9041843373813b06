//! Guess-the-process games: each party receives `i_k` and must announce
//! `o_k = w_k(i)`; inputs are uniform.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{JointIndexer, PartyShape};
use crate::table::{ExtendedIntervention, ProcessTable};
use crate::validate::{Validator, DEFAULT_CAP};

/// `1 − 1/∏ sizes`.
pub fn causal_bound(i_sizes: &[usize]) -> Ratio<u64> {
    let total: u64 = i_sizes.iter().map(|&s| s as u64).product();
    Ratio::new(total - 1, total)
}

/// A deterministic strategy with dynamic causal order.
///
/// `party` acts first, answering `responses[i]` to its input `i`; the rest
/// of the parties then follow `next[i]`, which may depend on every input
/// already revealed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalStrategy {
    pub party: usize,
    pub responses: Vec<usize>,
    pub next: Vec<Option<Box<CausalStrategy>>>,
}

impl CausalStrategy {
    /// Joint response to joint input `i`.
    pub fn respond(&self, i: &[usize]) -> Vec<usize> {
        let mut o = vec![0; i.len()];
        let mut node = Some(self);
        while let Some(s) = node {
            o[s.party] = s.responses[i[s.party]];
            node = s.next[i[s.party]].as_deref();
        }
        o
    }

    /// Parties in the order they act for input `i`.
    pub fn order(&self, i: &[usize]) -> Vec<usize> {
        let mut order = vec![];
        let mut node = Some(self);
        while let Some(s) = node {
            order.push(s.party);
            node = s.next[i[s.party]].as_deref();
        }
        order
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameValue {
    #[serde(serialize_with = "ratio_string")]
    pub value: Ratio<u64>,
    pub strategy: Option<CausalStrategy>,
}

fn ratio_string<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

fn require_swap_convention(shapes: &[PartyShape]) -> Result<()> {
    match shapes.iter().position(|s| !s.is_swap_convention()) {
        Some(k) => Err(Error::Shape(format!(
            "party {k}: game needs |I|=|A| and |O|=|X|"
        ))),
        None => Ok(()),
    }
}

/// Upper bound on memo states times parties.
fn search_estimate(shapes: &[PartyShape]) -> u128 {
    let per_party: u128 = shapes
        .iter()
        .map(|s| 1 + (s.i_size as u128) * (s.o_size as u128))
        .fold(1u128, |a, b| a.saturating_mul(b));
    per_party.saturating_mul(shapes.len() as u128)
}

pub fn best_causal_value(w: &ProcessTable) -> Result<GameValue> {
    best_causal_value_capped(w, DEFAULT_CAP)
}

/// Exact optimum over deterministic causal strategies. Ties prefer the
/// lowest party, then the lowest response.
pub fn best_causal_value_capped(w: &ProcessTable, cap: u64) -> Result<GameValue> {
    let shapes = w.shapes();
    require_swap_convention(shapes)?;
    let estimate = search_estimate(shapes);
    if estimate > cap as u128 {
        return Err(Error::TooLarge {
            what: "causal strategy search".into(),
            size: estimate,
            cap,
        });
    }
    let total = JointIndexer::inputs(shapes).len() as u64;
    let mut dp = Game {
        w,
        targets: w.setting_indices(),
        a_ix: w.outcome_indexer(),
        x_ix: w.setting_indexer(),
        memo: HashMap::new(),
    };
    let mut state = vec![None; shapes.len()];
    if shapes.is_empty() {
        return Ok(GameValue {
            value: Ratio::from_integer(1),
            strategy: None,
        });
    }
    let wins = dp.value(&mut state);
    let strategy = dp.strategy(&mut state);
    Ok(GameValue {
        value: Ratio::new(wins, total),
        strategy,
    })
}

struct Game<'a> {
    w: &'a ProcessTable,
    targets: Vec<usize>,
    a_ix: JointIndexer,
    x_ix: JointIndexer,
    // state → (wins, best next party)
    memo: HashMap<Vec<Option<(usize, usize)>>, (u64, usize)>,
}

impl Game<'_> {
    fn value(&mut self, state: &mut Vec<Option<(usize, usize)>>) -> u64 {
        if state.iter().all(Option::is_some) {
            let i: Vec<usize> = state.iter().map(|s| s.unwrap().0).collect();
            let o: Vec<usize> = state.iter().map(|s| s.unwrap().1).collect();
            let a = self.a_ix.encode(&i);
            return u64::from(self.targets[a] == self.x_ix.encode(&o));
        }
        if let Some(&(v, _)) = self.memo.get(state) {
            return v;
        }
        let shapes = self.w.shapes().to_vec();
        let mut best = (0, usize::MAX);
        for (m, s) in shapes.iter().enumerate() {
            if state[m].is_some() {
                continue;
            }
            let mut sum = 0;
            for i_m in 0..s.i_size {
                sum += self.best_response(state, m, i_m).1;
            }
            if best.1 == usize::MAX || sum > best.0 {
                best = (sum, m);
            }
        }
        self.memo.insert(state.clone(), best);
        best.0
    }

    fn best_response(
        &mut self,
        state: &mut Vec<Option<(usize, usize)>>,
        m: usize,
        i_m: usize,
    ) -> (usize, u64) {
        let mut best = (0, 0);
        for o_m in 0..self.w.shapes()[m].o_size {
            state[m] = Some((i_m, o_m));
            let v = self.value(state);
            state[m] = None;
            if o_m == 0 || v > best.1 {
                best = (o_m, v);
            }
        }
        best
    }

    fn strategy(&mut self, state: &mut Vec<Option<(usize, usize)>>) -> Option<CausalStrategy> {
        if state.iter().all(Option::is_some) {
            return None;
        }
        self.value(state);
        let m = self.memo[state.as_slice()].1;
        let i_size = self.w.shapes()[m].i_size;
        let mut responses = Vec::with_capacity(i_size);
        let mut next = Vec::with_capacity(i_size);
        for i_m in 0..i_size {
            let (o_m, _) = self.best_response(state, m, i_m);
            responses.push(o_m);
            state[m] = Some((i_m, o_m));
            next.push(self.strategy(state).map(Box::new));
            state[m] = None;
        }
        Some(CausalStrategy {
            party: m,
            responses,
            next,
        })
    }
}

pub fn swap_value(w: &ProcessTable) -> Result<Ratio<u64>> {
    swap_value_capped(w, DEFAULT_CAP)
}

/// Success probability of the swap strategy `a_k = i_k`, `o_k = x_k`.
/// Invalid tables are rejected with a fixed-point witness.
pub fn swap_value_capped(w: &ProcessTable, cap: u64) -> Result<Ratio<u64>> {
    let shapes = w.shapes();
    let swap = ExtendedIntervention::swap(shapes)?;
    let validator = Validator::with_cap(cap);
    let report = match validator.bruteforce(w) {
        Err(Error::TooLarge { .. }) => validator.recursive(w)?,
        other => other?,
    };
    if let Some(wit) = report.witness {
        return Err(Error::Inconsistent(format!(
            "intervention {:?} leaves {} fixed points",
            wit.intervention.maps,
            wit.fixed_points.len()
        )));
    }
    let o = correlations(w, &swap)?;
    let targets = w.setting_indices();
    let o_ix = JointIndexer::responses(shapes);
    let wins = o
        .iter()
        .enumerate()
        .filter(|&(i, o)| targets[i] == o_ix.encode(o))
        .count();
    Ok(Ratio::new(wins as u64, o.len() as u64))
}

/// Joint response `o` for every joint input index `i`, obtained from the
/// unique fixed point of `x = w(f_a(x, i))`.
pub fn correlations(w: &ProcessTable, f: &ExtendedIntervention) -> Result<Vec<Vec<usize>>> {
    let shapes = w.shapes();
    f.check_against(shapes)?;
    let i_ix = JointIndexer::inputs(shapes);
    let x_ix = w.setting_indexer();
    let a_ix = w.outcome_indexer();
    let targets = w.setting_indices();
    let mut out = Vec::with_capacity(i_ix.len());
    for i in i_ix.iter() {
        let mut found = vec![];
        for x in 0..x_ix.len() {
            let xd = x_ix.decode(x);
            let a: Vec<usize> = (0..shapes.len())
                .map(|k| f.local(shapes, k, xd[k], i[k]).0)
                .collect();
            if targets[a_ix.encode(&a)] == x {
                found.push(xd);
            }
        }
        if found.len() != 1 {
            return Err(Error::Inconsistent(format!(
                "input {i:?} yields fixed points {found:?}"
            )));
        }
        let x = &found[0];
        out.push(
            (0..shapes.len())
                .map(|k| f.local(shapes, k, x[k], i[k]).1)
                .collect(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn bipartite(f: impl Fn(usize, usize) -> [usize; 2]) -> ProcessTable {
        ProcessTable::from_fn(vec![PartyShape::sq(2); 2], |a| f(a[0], a[1]).to_vec()).unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(causal_bound(&[2, 2, 2]), Ratio::new(7, 8));
        assert_eq!(causal_bound(&[3, 3, 3]), Ratio::new(26, 27));
        assert_eq!(causal_bound(&[5]), Ratio::new(4, 5));
    }

    #[test]
    fn lugano_game() {
        let w = catalog::lugano();
        let g = best_causal_value(&w).unwrap();
        assert_eq!(g.value, Ratio::new(3, 4));
        let s = g.strategy.unwrap();
        let wins = w
            .outcome_indexer()
            .iter()
            .filter(|i| s.respond(i) == w.apply(i).unwrap())
            .count();
        assert_eq!(wins, 6);
        assert_eq!(swap_value(&w).unwrap(), Ratio::from_integer(1));
    }

    #[test]
    fn winnable_games() {
        let constant = bipartite(|_, _| [1, 0]);
        assert_eq!(best_causal_value(&constant).unwrap().value, Ratio::from_integer(1));
        assert_eq!(swap_value(&constant).unwrap(), Ratio::from_integer(1));
        let one_way = bipartite(|a, _| [0, a]);
        let g = best_causal_value(&one_way).unwrap();
        assert_eq!(g.value, Ratio::from_integer(1));
        assert_eq!(g.strategy.unwrap().party, 0);
    }

    #[test]
    fn strategy_visits_every_party_once() {
        let w = catalog::lugano();
        let s = best_causal_value(&w).unwrap().strategy.unwrap();
        for i in w.outcome_indexer().iter() {
            let mut order = s.order(&i);
            order.sort();
            assert_eq!(order, vec![0, 1, 2]);
        }
    }

    #[test]
    fn gyni_swap_is_inconsistent() {
        let w = catalog::gyni3();
        assert!(matches!(swap_value(&w), Err(Error::Inconsistent(_))));
        let identity = ExtendedIntervention::from_fn(w.shapes(), |_, x, _| (x, x)).unwrap();
        assert!(matches!(correlations(&w, &identity), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn lugano_swap_correlations_reproduce_the_table() {
        let w = catalog::lugano();
        let swap = ExtendedIntervention::swap(w.shapes()).unwrap();
        let o = correlations(&w, &swap).unwrap();
        for (i, digits) in w.outcome_indexer().iter().enumerate() {
            assert_eq!(o[i], w.apply(&digits).unwrap());
        }
        let constant = ExtendedIntervention::from_fn(w.shapes(), |k, _, _| (k % 2, 1)).unwrap();
        assert!(correlations(&w, &constant)
            .unwrap()
            .iter()
            .all(|o| o == &vec![1, 1, 1]));
    }

    #[test]
    fn game_needs_swap_convention() {
        let shapes = vec![PartyShape::with_io(2, 2, 3, 2).unwrap(); 2];
        let w = ProcessTable::from_fn(shapes, |_| vec![0, 0]).unwrap();
        assert!(matches!(best_causal_value(&w), Err(Error::Shape(_))));
        assert!(matches!(swap_value(&w), Err(Error::Shape(_))));
    }

    #[test]
    fn cap_applies_to_game_search() {
        assert!(matches!(
            best_causal_value_capped(&catalog::lugano(), 10),
            Err(Error::TooLarge { .. })
        ));
    }
}
