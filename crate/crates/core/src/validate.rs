//! Validity of candidate process tables.
//!
//! Two independent deciders live here: an exhaustive scan over every joint
//! intervention, and a recursive characterization in terms of output
//! reductions and reductions by injective local maps. Both return a
//! [`ValidityReport`] carrying a concrete intervention witness when the
//! table is invalid.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::{JointIndexer, PartyShape};
use crate::table::{Intervention, ProcessTable};

/// Default bound on the number of joint interventions a brute-force scan may visit.
pub const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfSignalingWitness {
    pub party: usize,
    pub a: Vec<usize>,
    pub a_prime: Vec<usize>,
}

/// First pair of joint outcomes, differing only in digit `party`, on which
/// `w_party` disagrees. Scans parties ascending, then outcomes in index order.
pub fn self_signaling_witness(w: &ProcessTable) -> Option<SelfSignalingWitness> {
    let a_ix = w.outcome_indexer();
    (0..w.parties()).find_map(|k| party_self_signaling(w, &a_ix, k))
}

fn party_self_signaling(
    w: &ProcessTable,
    a_ix: &JointIndexer,
    k: usize,
) -> Option<SelfSignalingWitness> {
    let stride = a_ix.stride(k);
    let size = a_ix.radices()[k];
    for a in 0..a_ix.len() {
        let digit = a_ix.digit(a, k);
        if digit != 0 {
            continue;
        }
        let reference = w.component(k, a);
        for v in 1..size {
            let other = a + v * stride;
            if w.component(k, other) != reference {
                return Some(SelfSignalingWitness {
                    party: k,
                    a: a_ix.decode(a),
                    a_prime: a_ix.decode(other),
                });
            }
        }
    }
    None
}

pub fn is_non_self_signaling(w: &ProcessTable) -> bool {
    self_signaling_witness(w).is_none()
}

/// All joint settings `x` with `w(f(x)) = x`, in index order.
pub fn fixed_points(w: &ProcessTable, f: &Intervention) -> Result<Vec<Vec<usize>>> {
    let composed = w.compose(f)?;
    let x_ix = w.setting_indexer();
    Ok(composed
        .iter()
        .enumerate()
        .filter(|&(x, &y)| x == y)
        .map(|(x, _)| x_ix.decode(x))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Recursive,
}

/// An intervention under which `w∘f` does not have exactly one fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub intervention: Intervention,
    pub fixed_points: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    /// Joint interventions whose fixed points were counted.
    pub interventions: u64,
    /// Distinct tables visited by the recursion.
    pub nodes: u64,
    pub memo_hits: u64,
}

/// One reduction on the path from the input table to a failing sub-table.
/// Parties are numbered as in the input table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Step {
    Output { party: usize, value: usize },
    Injective { party: usize, map: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Cause {
    SelfSignaling { party: usize },
    /// Two parties, each signalling to the other.
    TwoWaySignaling,
    /// Found by the exhaustive scan at a node without injective maps.
    Bruteforce,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub path: Vec<Step>,
    pub cause: Cause,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub method: Method,
    pub witness: Option<Witness>,
    /// Where the recursion failed (recursive method only).
    pub failure: Option<Failure>,
    pub stats: Stats,
    /// Some node fell back to the exhaustive scan because no injective
    /// reduction was available there.
    pub fallback_used: bool,
}

/// When the recursive decider also runs the exhaustive scan at a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FallbackPolicy {
    /// Only when no party of the node admits an injective map.
    #[default]
    NoInjectiveAtAll,
    /// Whenever at least one party of the node admits no injective map.
    AnyPartyWithout,
}

#[derive(Debug, Clone, Copy)]
pub struct Validator {
    pub cap: u64,
    pub fallback: FallbackPolicy,
}

impl Default for Validator {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            fallback: FallbackPolicy::default(),
        }
    }
}

/// Exhaustive decider with the default cap.
pub fn is_valid_bruteforce(w: &ProcessTable) -> Result<ValidityReport> {
    Validator::default().bruteforce(w)
}

/// Recursive decider with the default settings.
pub fn is_valid_recursive(w: &ProcessTable) -> Result<ValidityReport> {
    Validator::default().recursive(w)
}

/// Injective maps `X_k → A_k` in lexicographic order of their graphs.
pub fn enumerate_injective(shape: PartyShape) -> impl Iterator<Item = Vec<usize>> {
    (0..shape.a_size).permutations(shape.x_size)
}

/// Drop party `k` after wiring its setting back to its outcome through `f_k`.
pub fn reduce(w: &ProcessTable, k: usize, f_k: &[usize]) -> Result<ProcessTable> {
    let shapes = w.shapes();
    check_party(w, k)?;
    if f_k.len() != shapes[k].x_size {
        return Err(Error::Shape(format!(
            "local map covers {} settings, party {k} has {}",
            f_k.len(),
            shapes[k].x_size
        )));
    }
    if let Some(&value) = f_k.iter().find(|&&v| v >= shapes[k].a_size) {
        return Err(Error::Range {
            party: k,
            value,
            size: shapes[k].a_size,
        });
    }
    let a_ix = w.outcome_indexer();
    if let Some(s) = party_self_signaling(w, &a_ix, k) {
        return Err(Error::SelfSignaling {
            party: k,
            a: s.a,
            a_prime: s.a_prime,
        });
    }
    let stride = a_ix.stride(k);
    Ok(drop_party(w, k, |base| {
        let a_k = f_k[w.component(k, base)];
        base + a_k * stride
    }))
}

/// Fix party `k`'s outcome to `a_k` and drop its setting.
pub fn output_reduce(w: &ProcessTable, k: usize, a_k: usize) -> Result<ProcessTable> {
    check_party(w, k)?;
    let size = w.shapes()[k].a_size;
    if a_k >= size {
        return Err(Error::Range {
            party: k,
            value: a_k,
            size,
        });
    }
    let stride = w.outcome_indexer().stride(k);
    Ok(drop_party(w, k, |base| base + a_k * stride))
}

fn check_party(w: &ProcessTable, k: usize) -> Result<()> {
    if k >= w.parties() {
        return Err(Error::Shape(format!(
            "party {k} does not exist in a {}-party table",
            w.parties()
        )));
    }
    Ok(())
}

// `pick` maps the full joint outcome index with digit k = 0 to the row used.
fn drop_party(w: &ProcessTable, k: usize, pick: impl Fn(usize) -> usize) -> ProcessTable {
    let mut shapes = w.shapes().to_vec();
    shapes.remove(k);
    let full = w.outcome_indexer();
    let rest = JointIndexer::outcomes(&shapes);
    let rows = rest
        .iter()
        .map(|mut digits| {
            digits.insert(k, 0);
            let mut row = w.row(pick(full.encode(&digits))).to_vec();
            row.remove(k);
            row
        })
        .collect();
    ProcessTable::new(shapes, rows).expect("sub-table of a well-formed table")
}

impl Validator {
    pub fn with_cap(cap: u64) -> Self {
        Self {
            cap,
            ..Self::default()
        }
    }

    pub fn bruteforce(&self, w: &ProcessTable) -> Result<ValidityReport> {
        let (witness, examined) = scan(w, self.cap)?;
        Ok(ValidityReport {
            valid: witness.is_none(),
            method: Method::Bruteforce,
            witness,
            failure: None,
            stats: Stats {
                interventions: examined,
                ..Stats::default()
            },
            fallback_used: false,
        })
    }

    pub fn recursive(&self, w: &ProcessTable) -> Result<ValidityReport> {
        let mut r = Recursion {
            config: *self,
            memo: HashMap::new(),
            stats: Stats::default(),
            fallback_used: false,
        };
        let node = r.visit(w)?;
        let (witness, failure) = match node {
            Node::Valid => (None, None),
            Node::Invalid { maps, failure } => {
                let intervention = Intervention { maps };
                let fixed_points = fixed_points(w, &intervention)?;
                debug_assert_ne!(fixed_points.len(), 1);
                (
                    Some(Witness {
                        intervention,
                        fixed_points,
                    }),
                    Some(failure),
                )
            }
        };
        Ok(ValidityReport {
            valid: witness.is_none(),
            method: Method::Recursive,
            witness,
            failure,
            stats: r.stats,
            fallback_used: r.fallback_used,
        })
    }
}

/// Exhaustive scan. Returns the first witness in enumeration order and the
/// number of interventions examined.
fn scan(w: &ProcessTable, cap: u64) -> Result<(Option<Witness>, u64)> {
    let shapes = w.shapes();
    let total = Intervention::count(shapes);
    if total > cap as u128 {
        return Err(Error::TooLarge {
            what: "joint intervention space".into(),
            size: total,
            cap,
        });
    }
    let a_ix = w.outcome_indexer();
    let x_ix = w.setting_indexer();
    let w_idx = w.setting_indices();
    let x_digits: Vec<Vec<usize>> = x_ix.iter().collect();
    let a_strides: Vec<usize> = (0..shapes.len()).map(|k| a_ix.stride(k)).collect();

    // concatenated graphs, last entry fastest
    let radices: Vec<usize> = shapes
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.a_size, s.x_size))
        .collect();
    let offsets: Vec<usize> = shapes
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.x_size;
            Some(o)
        })
        .collect();
    let mut graph = vec![0usize; radices.len()];
    let mut examined = 0u64;
    loop {
        examined += 1;
        let mut count = 0;
        for (x, digits) in x_digits.iter().enumerate() {
            let a: usize = digits
                .iter()
                .enumerate()
                .map(|(k, &xk)| graph[offsets[k] + xk] * a_strides[k])
                .sum();
            if w_idx[a] == x {
                count += 1;
                if count > 1 {
                    break;
                }
            }
        }
        if count != 1 {
            let maps = shapes
                .iter()
                .zip(&offsets)
                .map(|(s, &o)| graph[o..o + s.x_size].to_vec())
                .collect();
            let intervention = Intervention { maps };
            let fixed_points = fixed_points(w, &intervention)?;
            return Ok((
                Some(Witness {
                    intervention,
                    fixed_points,
                }),
                examined,
            ));
        }
        let mut pos = radices.len();
        loop {
            if pos == 0 {
                return Ok((None, examined));
            }
            pos -= 1;
            graph[pos] += 1;
            if graph[pos] < radices[pos] {
                break;
            }
            graph[pos] = 0;
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Valid,
    Invalid {
        maps: Vec<Vec<usize>>,
        failure: Failure,
    },
}

struct Recursion {
    config: Validator,
    memo: HashMap<Vec<u8>, Node>,
    stats: Stats,
    fallback_used: bool,
}

impl Recursion {
    fn visit(&mut self, w: &ProcessTable) -> Result<Node> {
        let key = w.canonical_key();
        if let Some(hit) = self.memo.get(&key) {
            self.stats.memo_hits += 1;
            return Ok(hit.clone());
        }
        self.stats.nodes += 1;
        let node = self.decide(w)?;
        self.memo.insert(key, node.clone());
        Ok(node)
    }

    fn decide(&mut self, w: &ProcessTable) -> Result<Node> {
        if let Some(s) = self_signaling_witness(w) {
            return Ok(Node::Invalid {
                maps: self_signaling_intervention(w, &s),
                failure: Failure {
                    path: vec![],
                    cause: Cause::SelfSignaling { party: s.party },
                },
            });
        }
        let n = w.parties();
        if n <= 1 {
            // non-self-signaling single party tables are constant
            return Ok(Node::Valid);
        }
        if n == 2 {
            if w.is_constant_component(0) || w.is_constant_component(1) {
                return Ok(Node::Valid);
            }
            return Ok(Node::Invalid {
                maps: two_way_intervention(w),
                failure: Failure {
                    path: vec![],
                    cause: Cause::TwoWaySignaling,
                },
            });
        }

        let shapes = w.shapes().to_vec();
        for (k, s) in shapes.iter().enumerate() {
            for a_k in 0..s.a_size {
                let child = output_reduce(w, k, a_k)?;
                if let Node::Invalid { maps, failure } = self.visit(&child)? {
                    return Ok(lift(
                        maps,
                        failure,
                        k,
                        vec![a_k; s.x_size],
                        Step::Output { party: k, value: a_k },
                    ));
                }
            }
        }
        for (k, &s) in shapes.iter().enumerate() {
            for f_k in enumerate_injective(s) {
                let child = reduce(w, k, &f_k)?;
                if let Node::Invalid { maps, failure } = self.visit(&child)? {
                    return Ok(lift(
                        maps,
                        failure,
                        k,
                        f_k.clone(),
                        Step::Injective { party: k, map: f_k },
                    ));
                }
            }
        }

        let lacking = shapes.iter().filter(|s| s.x_size > s.a_size).count();
        let fall_back = match self.config.fallback {
            FallbackPolicy::NoInjectiveAtAll => lacking == n,
            FallbackPolicy::AnyPartyWithout => lacking > 0,
        };
        if fall_back {
            self.fallback_used = true;
            let (witness, examined) = scan(w, self.config.cap)?;
            self.stats.interventions += examined;
            if let Some(wit) = witness {
                return Ok(Node::Invalid {
                    maps: wit.intervention.maps,
                    failure: Failure {
                        path: vec![],
                        cause: Cause::Bruteforce,
                    },
                });
            }
        }
        Ok(Node::Valid)
    }
}

// Re-insert the removed party `k` with local map `g`; child party indices shift.
fn lift(
    mut maps: Vec<Vec<usize>>,
    failure: Failure,
    k: usize,
    g: Vec<usize>,
    step: Step,
) -> Node {
    maps.insert(k, g);
    let shift = |p: usize| if p >= k { p + 1 } else { p };
    let mut path = vec![step];
    path.extend(failure.path.into_iter().map(|s| match s {
        Step::Output { party, value } => Step::Output {
            party: shift(party),
            value,
        },
        Step::Injective { party, map } => Step::Injective {
            party: shift(party),
            map,
        },
    }));
    let cause = match failure.cause {
        Cause::SelfSignaling { party } => Cause::SelfSignaling {
            party: shift(party),
        },
        c => c,
    };
    Node::Invalid {
        maps,
        failure: Failure { path, cause },
    }
}

// Others answer constantly with the witness outcome; party k is wired so
// that its own setting never reproduces itself. Zero fixed points.
fn self_signaling_intervention(w: &ProcessTable, s: &SelfSignalingWitness) -> Vec<Vec<usize>> {
    let k = s.party;
    let shapes = w.shapes();
    let a_ix = w.outcome_indexer();
    let p = s.a[k];
    let q = s.a_prime[k];
    let u = w.component(k, a_ix.encode(&s.a));
    let mut maps: Vec<Vec<usize>> = shapes
        .iter()
        .zip(&s.a)
        .map(|(sh, &v)| vec![v; sh.x_size])
        .collect();
    maps[k] = (0..shapes[k].x_size)
        .map(|y| if y == u { q } else { p })
        .collect();
    maps
}

// Crossed wiring of two mutually signalling parties; zero fixed points.
fn two_way_intervention(w: &ProcessTable) -> Vec<Vec<usize>> {
    let shapes = w.shapes();
    let a_ix = w.outcome_indexer();
    let h0 = |a1: usize| w.component(0, a_ix.encode(&[0, a1]));
    let h1 = |a0: usize| w.component(1, a_ix.encode(&[a0, 0]));
    let (c, c2) = first_distinguishing_pair(shapes[1].a_size, h0);
    let (b, b2) = first_distinguishing_pair(shapes[0].a_size, h1);
    let u = h0(c);
    let v2 = h1(b2);
    let f0 = (0..shapes[0].x_size)
        .map(|y| if y == u { b2 } else { b })
        .collect();
    let f1 = (0..shapes[1].x_size)
        .map(|y| if y == v2 { c2 } else { c })
        .collect();
    vec![f0, f1]
}

fn first_distinguishing_pair(size: usize, h: impl Fn(usize) -> usize) -> (usize, usize) {
    let first = h(0);
    let other = (1..size)
        .find(|&v| h(v) != first)
        .expect("component depends on the other party");
    (0, other)
}
