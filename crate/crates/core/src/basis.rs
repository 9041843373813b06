//! Product bases and their local setting structure.
//!
//! Local vectors are compared up to a global phase: `u ≅ v` iff
//! `|⟨u|v⟩| > 1 − tol`, and `u ⊥ v` iff `|⟨u|v⟩| < tol`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{JointIndexer, PartyShape};
use crate::linalg::{c, inner, kron_all, ket, random_unitary, Cmat, Cvec, C64};
use crate::table::ProcessTable;

#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    pub locals: Vec<Cvec>,
}

impl ProductState {
    pub fn new(locals: Vec<Cvec>) -> Self {
        Self { locals }
    }

    /// `⟨self|other⟩` as a product of local overlaps.
    pub fn inner(&self, other: &ProductState) -> C64 {
        self.locals
            .iter()
            .zip(&other.locals)
            .fold(c(1.0, 0.0), |acc, (u, v)| acc * inner(u, v))
    }

    pub fn dense(&self) -> Cvec {
        kron_all(&self.locals)
    }
}

/// One labelled event `(a | x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub a: Vec<usize>,
    pub x: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLabeling {
    pub events: Vec<Event>,
}

impl EventLabeling {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events }
    }

    /// Parse compact strings such as `"02|11"` (single-digit alphabets).
    pub fn from_compact(items: &[&str]) -> Result<Self> {
        let digits = |s: &str| -> Result<Vec<usize>> {
            s.chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::Labels(format!("bad digit `{ch}`")))
                })
                .collect()
        };
        let events = items
            .iter()
            .map(|item| {
                let (a, x) = item
                    .split_once('|')
                    .ok_or_else(|| Error::Labels(format!("`{item}` lacks `|`")))?;
                Ok(Event {
                    a: digits(a)?,
                    x: digits(x)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self { events })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductBasis {
    pub dims: Vec<usize>,
    pub states: Vec<ProductState>,
    pub labels: Option<EventLabeling>,
}

impl ProductBasis {
    pub fn new(dims: Vec<usize>, states: Vec<ProductState>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Shape("local dimensions must be positive".into()));
        }
        for (j, s) in states.iter().enumerate() {
            if s.locals.len() != dims.len() {
                return Err(Error::Shape(format!(
                    "state {j} has {} factors, expected {}",
                    s.locals.len(),
                    dims.len()
                )));
            }
            for (k, (v, &d)) in s.locals.iter().zip(&dims).enumerate() {
                if v.len() != d {
                    return Err(Error::Shape(format!(
                        "state {j}, party {k}: dimension {} instead of {d}",
                        v.len()
                    )));
                }
            }
        }
        Ok(Self {
            dims,
            states,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: EventLabeling) -> Result<Self> {
        if labels.events.len() != self.states.len() {
            return Err(Error::Labels(format!(
                "{} labels for {} states",
                labels.events.len(),
                self.states.len()
            )));
        }
        for (j, e) in labels.events.iter().enumerate() {
            if e.a.len() != self.dims.len() || e.x.len() != self.dims.len() {
                return Err(Error::Labels(format!("label {j} has the wrong length")));
            }
            if let Some(k) = (0..self.dims.len()).find(|&k| e.a[k] >= self.dims[k]) {
                return Err(Error::Labels(format!(
                    "label {j}: outcome {} of party {k} exceeds dimension {}",
                    e.a[k], self.dims[k]
                )));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn computational(dims: &[usize]) -> Self {
        let states = JointIndexer::new(dims.to_vec())
            .iter()
            .map(|a| ProductState::new(a.iter().zip(dims).map(|(&ak, &d)| ket(d, ak)).collect()))
            .collect();
        Self {
            dims: dims.to_vec(),
            states,
            labels: None,
        }
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn expected_size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Apply `v` to party `k`'s factor of every state in `which`.
    pub fn rotate_local(&mut self, k: usize, v: &Cmat, which: impl Fn(usize) -> bool) {
        for (j, s) in self.states.iter_mut().enumerate() {
            if which(j) {
                s.locals[k] = v * &s.locals[k];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Completeness {
    pub complete: bool,
    pub count: usize,
    pub expected: usize,
    /// Largest `|⟨ψ^j|ψ^{j'}⟩ − δ_{jj'}|`.
    pub max_deviation: f64,
}

pub fn is_complete_orthonormal(s: &ProductBasis, tol: f64) -> Completeness {
    let mut dev: f64 = 0.0;
    for (j, sj) in s.states.iter().enumerate() {
        for (l, sl) in s.states.iter().enumerate().skip(j) {
            let target = if j == l { 1.0 } else { 0.0 };
            dev = dev.max((sj.inner(sl) - c(target, 0.0)).norm());
        }
    }
    let expected = s.expected_size();
    Completeness {
        complete: s.states.len() == expected && dev < tol,
        count: s.states.len(),
        expected,
        max_deviation: dev,
    }
}

pub(crate) fn same_up_to_phase(u: &Cvec, v: &Cvec, tol: f64) -> bool {
    inner(u, v).norm() > 1.0 - tol
}

pub(crate) fn orthogonal(u: &Cvec, v: &Cvec, tol: f64) -> bool {
    inner(u, v).norm() < tol
}

/// Distinct local vectors of one party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCatalog {
    /// Representatives in first-occurrence order.
    pub reps: Vec<Cvec>,
    /// First basis state in which each representative occurs.
    pub first_state: Vec<usize>,
    /// Representative index of every basis state.
    pub of_state: Vec<usize>,
}

pub fn dedup_local(s: &ProductBasis, k: usize, tol: f64) -> LocalCatalog {
    let mut cat = LocalCatalog {
        reps: vec![],
        first_state: vec![],
        of_state: Vec::with_capacity(s.states.len()),
    };
    for (j, state) in s.states.iter().enumerate() {
        let v = &state.locals[k];
        let r = match cat.reps.iter().position(|u| same_up_to_phase(u, v, tol)) {
            Some(r) => r,
            None => {
                cat.reps.push(v.clone());
                cat.first_state.push(j);
                cat.reps.len() - 1
            }
        };
        cat.of_state.push(r);
    }
    cat
}

/// The local settings of one party: `settings[x][a]` is a catalog index.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyPartition {
    pub catalog: LocalCatalog,
    pub settings: Vec<Vec<usize>>,
    /// `(x, a)` of every catalog entry.
    pub label_of: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettingPartition {
    pub parties: Vec<PartyPartition>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AmbiguityKind {
    /// The vector is orthogonal to catalog entries `u` and `v`, which are
    /// not orthogonal to each other.
    SpansSettings { u: usize, v: usize },
    /// A maximal orthogonal family has `size` members instead of `d_k`.
    WrongSize { size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguityWitness {
    pub party: usize,
    /// Catalog index of the offending local vector.
    pub vector: usize,
    /// First basis state containing it.
    pub state: usize,
    pub kind: AmbiguityKind,
}

/// Split the distinct local vectors of party `k` into orthonormal settings,
/// or report the first vector (in catalog order) that prevents it.
pub fn orthogonality_partition(
    s: &ProductBasis,
    k: usize,
    tol: f64,
) -> std::result::Result<PartyPartition, AmbiguityWitness> {
    let catalog = dedup_local(s, k, tol);
    let n = catalog.reps.len();
    let d = s.dims[k];
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && orthogonal(&catalog.reps[i], &catalog.reps[j], tol))
                .collect()
        })
        .collect();
    let witness = |vector: usize, kind| AmbiguityWitness {
        party: k,
        vector,
        state: catalog.first_state[vector],
        kind,
    };
    for v in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        for (i, &u) in nbrs.iter().enumerate() {
            if let Some(&w) = nbrs[i + 1..].iter().find(|&&w| !adj[u][w]) {
                return Err(witness(v, AmbiguityKind::SpansSettings { u, v: w }));
            }
        }
    }
    let mut label_of = vec![(usize::MAX, 0); n];
    let mut settings: Vec<Vec<usize>> = vec![];
    for v in 0..n {
        if label_of[v].0 != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&u| u == v || adj[v][u]).collect();
        if members.len() != d {
            return Err(witness(
                v,
                AmbiguityKind::WrongSize {
                    size: members.len(),
                },
            ));
        }
        let x = settings.len();
        for (a, &u) in members.iter().enumerate() {
            label_of[u] = (x, a);
        }
        settings.push(members);
    }
    Ok(PartyPartition {
        catalog,
        settings,
        label_of,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnambiguityReport {
    pub unambiguous: bool,
    pub partition: Option<SettingPartition>,
    /// One witness per ambiguous party.
    pub witnesses: Vec<AmbiguityWitness>,
}

pub fn is_unambiguous(s: &ProductBasis, tol: f64) -> Result<UnambiguityReport> {
    let comp = is_complete_orthonormal(s, tol);
    if !comp.complete {
        return Err(Error::NotABasis {
            deviation: comp.max_deviation,
            count: comp.count,
            expected: comp.expected,
        });
    }
    let mut parties = vec![];
    let mut witnesses = vec![];
    for k in 0..s.parties() {
        match orthogonality_partition(s, k, tol) {
            Ok(p) => parties.push(p),
            Err(w) => witnesses.push(w),
        }
    }
    if !witnesses.is_empty() {
        return Ok(UnambiguityReport {
            unambiguous: false,
            partition: None,
            witnesses,
        });
    }
    for p in &parties {
        for (i, u) in p.catalog.reps.iter().enumerate() {
            for (j, v) in p.catalog.reps.iter().enumerate().skip(i + 1) {
                let same_setting = p.label_of[i].0 == p.label_of[j].0;
                assert_eq!(
                    orthogonal(u, v, tol),
                    same_setting,
                    "clique partition must separate orthogonality"
                );
            }
        }
    }
    Ok(UnambiguityReport {
        unambiguous: true,
        partition: Some(SettingPartition { parties }),
        witnesses,
    })
}

/// Labels read off a setting partition: settings and outcomes numbered by
/// first occurrence.
pub fn canonical_labels(s: &ProductBasis, partition: &SettingPartition) -> EventLabeling {
    let events = (0..s.states.len())
        .map(|j| {
            let (x, a): (Vec<usize>, Vec<usize>) = partition
                .parties
                .iter()
                .map(|p| p.label_of[p.catalog.of_state[j]])
                .unzip();
            Event { a, x }
        })
        .collect();
    EventLabeling { events }
}

fn exclusive(e: &Event, f: &Event) -> bool {
    (0..e.a.len()).any(|k| e.x[k] == f.x[k] && e.a[k] != f.a[k])
}

/// First pair of events (index order) sharing no party with equal setting
/// and different outcome.
pub fn pairwise_exclusivity(labels: &EventLabeling) -> Option<(usize, usize)> {
    let ev = &labels.events;
    (0..ev.len()).find_map(|j| {
        (j + 1..ev.len())
            .find(|&l| !exclusive(&ev[j], &ev[l]))
            .map(|l| (j, l))
    })
}

pub fn exclusivity_violations(labels: &EventLabeling) -> Vec<(usize, usize)> {
    let ev = &labels.events;
    (0..ev.len())
        .flat_map(|j| (j + 1..ev.len()).map(move |l| (j, l)))
        .filter(|&(j, l)| !exclusive(&ev[j], &ev[l]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakReport {
    pub weakly_unambiguous: bool,
    /// `(party, state j, state l)`: the same local vector labelled with two settings.
    pub shared_vectors: Vec<(usize, usize, usize)>,
    pub exclusivity_violation: Option<(usize, usize)>,
}

pub fn is_weakly_unambiguous(s: &ProductBasis, tol: f64) -> Result<WeakReport> {
    let labels = s
        .labels
        .as_ref()
        .ok_or_else(|| Error::Labels("weak unambiguity needs explicit labels".into()))?;
    let mut shared = vec![];
    for k in 0..s.parties() {
        let cat = dedup_local(s, k, tol);
        let mut setting_of: Vec<Option<(usize, usize)>> = vec![None; cat.reps.len()];
        for (j, &r) in cat.of_state.iter().enumerate() {
            let x = labels.events[j].x[k];
            match setting_of[r] {
                None => setting_of[r] = Some((x, j)),
                Some((x0, j0)) if x0 != x => shared.push((k, j0, j)),
                _ => {}
            }
        }
    }
    let exclusivity_violation = pairwise_exclusivity(labels);
    Ok(WeakReport {
        weakly_unambiguous: shared.is_empty() && exclusivity_violation.is_none(),
        shared_vectors: shared,
        exclusivity_violation,
    })
}

/// Table `x = w(a)` read off a labelling; every joint outcome must occur once.
/// Setting alphabets are sized by the largest label used.
pub fn labels_to_table(dims: &[usize], labels: &EventLabeling) -> Result<ProcessTable> {
    let n = dims.len();
    let x_sizes: Vec<usize> = (0..n)
        .map(|k| labels.events.iter().map(|e| e.x[k] + 1).max().unwrap_or(1))
        .collect();
    let shapes: Vec<PartyShape> = x_sizes
        .iter()
        .zip(dims)
        .map(|(&x, &d)| PartyShape::new(x, d))
        .collect::<Result<_>>()?;
    let a_ix = JointIndexer::new(dims.to_vec());
    let mut rows: Vec<Option<Vec<usize>>> = vec![None; a_ix.len()];
    for (j, e) in labels.events.iter().enumerate() {
        let a = a_ix
            .try_encode(&e.a)
            .map_err(|err| Error::Labels(format!("label {j}: {err}")))?;
        if rows[a].is_some() {
            return Err(Error::Labels(format!(
                "joint outcome {:?} labels more than one state",
                e.a
            )));
        }
        rows[a] = Some(e.x.clone());
    }
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(a, r)| {
            r.ok_or_else(|| {
                Error::Labels(format!("joint outcome {:?} is never labelled", a_ix.decode(a)))
            })
        })
        .collect::<Result<_>>()?;
    ProcessTable::new(shapes, rows)
}

pub const DEFAULT_RETRIES: usize = 64;

pub fn repair_rotation(s: &ProductBasis, seed: u64, tol: f64) -> Result<ProductBasis> {
    repair_rotation_with(s, seed, tol, DEFAULT_RETRIES)
}

/// Rotate settings involved in accidental cross-setting orthogonality by
/// seeded random unitaries until the basis is unambiguous. Labels are kept.
pub fn repair_rotation_with(
    s: &ProductBasis,
    seed: u64,
    tol: f64,
    retries: usize,
) -> Result<ProductBasis> {
    let weak = is_weakly_unambiguous(s, tol)?;
    if !weak.weakly_unambiguous {
        return Err(Error::Ambiguous(
            "repair needs a weakly unambiguous basis".into(),
        ));
    }
    if is_unambiguous(s, tol)?.unambiguous {
        return Ok(s.clone());
    }
    let labels = s.labels.as_ref().expect("checked above");
    let mut targets: Vec<(usize, usize)> = vec![];
    for k in 0..s.parties() {
        for (j, sj) in s.states.iter().enumerate() {
            for (l, sl) in s.states.iter().enumerate().skip(j + 1) {
                let (xj, xl) = (labels.events[j].x[k], labels.events[l].x[k]);
                if xj != xl && orthogonal(&sj.locals[k], &sl.locals[k], tol) {
                    let t = (k, xj.max(xl));
                    if !targets.contains(&t) {
                        targets.push(t);
                    }
                }
            }
        }
    }
    targets.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..retries {
        let mut out = s.clone();
        for &(k, x) in &targets {
            let v = random_unitary(s.dims[k], &mut rng);
            out.rotate_local(k, &v, |j| labels.events[j].x[k] == x);
        }
        if is_unambiguous(&out, tol)?.unambiguous {
            return Ok(out);
        }
    }
    Err(Error::RetriesExhausted(retries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::DEFAULT_TOL;

    #[test]
    fn shift_structure() {
        let s = catalog::shift_basis();
        assert!(is_complete_orthonormal(&s, DEFAULT_TOL).complete);
        let cat = dedup_local(&s, 0, DEFAULT_TOL);
        let names: Vec<_> = cat.reps.iter().map(|v| catalog::local_name(v).unwrap()).collect();
        assert_eq!(names, ["0", "+", "1", "-"]);
        let p = orthogonality_partition(&s, 0, DEFAULT_TOL).unwrap();
        assert_eq!(p.settings, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn missing_state_is_incomplete() {
        let mut s = catalog::shift_basis();
        s.states.pop();
        let c = is_complete_orthonormal(&s, DEFAULT_TOL);
        assert!(!c.complete);
        assert_eq!((c.count, c.expected), (7, 8));
        assert!(matches!(is_unambiguous(&s, DEFAULT_TOL), Err(Error::NotABasis { .. })));
    }

    #[test]
    fn computational_basis_has_one_setting() {
        let s = ProductBasis::computational(&[2, 3]);
        assert!(is_complete_orthonormal(&s, DEFAULT_TOL).complete);
        assert_eq!(dedup_local(&s, 1, DEFAULT_TOL).reps.len(), 3);
        let r = is_unambiguous(&s, DEFAULT_TOL).unwrap();
        assert!(r.unambiguous);
        for p in r.partition.unwrap().parties {
            assert_eq!(p.settings.len(), 1);
        }
    }

    #[test]
    fn compact_labels() {
        let l = EventLabeling::from_compact(&["02|11", "1|0"]).unwrap();
        assert_eq!(l.events[0].a, vec![0, 2]);
        assert_eq!(l.events[0].x, vec![1, 1]);
        assert!(EventLabeling::from_compact(&["02"]).is_err());
    }

    #[test]
    fn single_event_is_exclusive() {
        let l = EventLabeling::from_compact(&["0|0"]).unwrap();
        assert_eq!(pairwise_exclusivity(&l), None);
    }

    #[test]
    fn labels_to_table_rejects_duplicates() {
        let l = EventLabeling::from_compact(&["0|0", "0|1"]).unwrap();
        assert!(matches!(labels_to_table(&[2], &l), Err(Error::Labels(_))));
        let l = EventLabeling::from_compact(&["0|0", "1|1"]).unwrap();
        let w = labels_to_table(&[2], &l).unwrap();
        assert_eq!(w.apply(&[1]).unwrap(), vec![1]);
    }

    #[test]
    fn weak_needs_labels() {
        assert!(matches!(
            is_weakly_unambiguous(&catalog::shift_basis(), DEFAULT_TOL),
            Err(Error::Labels(_))
        ));
    }

    #[test]
    fn repair_is_identity_on_unambiguous_input() {
        let s = catalog::shift_basis();
        let labels = canonical_labels(
            &s,
            &is_unambiguous(&s, DEFAULT_TOL).unwrap().partition.unwrap(),
        );
        let s = s.with_labels(labels).unwrap();
        assert_eq!(repair_rotation(&s, 3, DEFAULT_TOL).unwrap(), s);
    }
}
