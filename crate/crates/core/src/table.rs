//! Candidate process tables and local interventions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::{JointIndexer, PartyShape};

/// A candidate map `w: A → X`, stored as one joint setting vector per joint
/// outcome index. Validity is not enforced here; see [`crate::validate`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProcessTable {
    shapes: Vec<PartyShape>,
    // row-major: entry `a * n + k` is the k-th digit of w(a)
    entries: Vec<usize>,
}

impl ProcessTable {
    pub fn new(shapes: Vec<PartyShape>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let a_ix = JointIndexer::outcomes(&shapes);
        let x_ix = JointIndexer::settings(&shapes);
        if rows.len() != a_ix.len() {
            return Err(Error::Shape(format!(
                "table has {} rows, expected {}",
                rows.len(),
                a_ix.len()
            )));
        }
        let mut entries = Vec::with_capacity(rows.len() * shapes.len());
        for row in &rows {
            x_ix.check(row)?;
            entries.extend_from_slice(row);
        }
        Ok(Self { shapes, entries })
    }

    /// Build a table by evaluating `f` on every joint outcome.
    pub fn from_fn(shapes: Vec<PartyShape>, f: impl Fn(&[usize]) -> Vec<usize>) -> Result<Self> {
        let rows = JointIndexer::outcomes(&shapes).iter().map(|a| f(&a)).collect();
        Self::new(shapes, rows)
    }

    pub fn shapes(&self) -> &[PartyShape] {
        &self.shapes
    }

    pub fn parties(&self) -> usize {
        self.shapes.len()
    }

    pub fn outcome_indexer(&self) -> JointIndexer {
        JointIndexer::outcomes(&self.shapes)
    }

    pub fn setting_indexer(&self) -> JointIndexer {
        JointIndexer::settings(&self.shapes)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        self.entries.chunks(self.shapes.len().max(1))
    }

    /// Setting vector stored for joint outcome index `a`.
    pub fn row(&self, a: usize) -> &[usize] {
        let n = self.shapes.len();
        &self.entries[a * n..(a + 1) * n]
    }

    pub fn component(&self, k: usize, a: usize) -> usize {
        self.entries[a * self.shapes.len() + k]
    }

    /// `x = w(a)`.
    pub fn apply(&self, a: &[usize]) -> Result<Vec<usize>> {
        let idx = self.outcome_indexer().try_encode(a)?;
        Ok(self.row(idx).to_vec())
    }

    /// Joint setting index of `w(a)` for every joint outcome index `a`.
    pub fn setting_indices(&self) -> Vec<usize> {
        let x_ix = self.setting_indexer();
        self.rows().map(|r| x_ix.encode(r)).collect()
    }

    /// `w_k` takes a single value over all joint outcomes.
    pub fn is_constant_component(&self, k: usize) -> bool {
        let first = self.component(k, 0);
        (0..self.outcome_indexer().len()).all(|a| self.component(k, a) == first)
    }

    pub fn is_constant(&self) -> bool {
        (0..self.parties()).all(|k| self.is_constant_component(k))
    }

    /// The table `x ↦ w(f(x))` over joint setting indices.
    pub fn compose(&self, f: &Intervention) -> Result<Vec<usize>> {
        f.check_against(&self.shapes)?;
        let a_ix = self.outcome_indexer();
        let x_ix = self.setting_indexer();
        let w = self.setting_indices();
        Ok((0..x_ix.len())
            .map(|x| w[a_ix.encode(&f.apply_digits(&x_ix.decode(x)))])
            .collect())
    }

    /// Byte key identifying the table, used for memoization.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut key = Vec::with_capacity(4 * self.shapes.len() + self.entries.len());
        key.push(self.shapes.len() as u8);
        for s in &self.shapes {
            key.extend_from_slice(&[s.x_size as u8, s.a_size as u8]);
        }
        if self.shapes.iter().all(|s| s.x_size <= 256) {
            key.extend(self.entries.iter().map(|&e| e as u8));
        } else {
            key.extend(self.entries.iter().flat_map(|&e| (e as u32).to_le_bytes()));
        }
        key
    }

    /// Same table with new game register sizes.
    pub fn with_shapes(&self, shapes: Vec<PartyShape>) -> Result<Self> {
        if shapes.len() != self.shapes.len()
            || shapes
                .iter()
                .zip(&self.shapes)
                .any(|(s, t)| s.x_size != t.x_size || s.a_size != t.a_size)
        {
            return Err(Error::Shape("alphabet sizes must not change".into()));
        }
        Ok(Self {
            shapes,
            entries: self.entries.clone(),
        })
    }
}

impl fmt::Debug for ProcessTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<_> = self.shapes.iter().map(|s| (s.x_size, s.a_size)).collect();
        f.debug_struct("ProcessTable")
            .field("shapes", &sizes)
            .field("rows", &self.rows().collect::<Vec<_>>())
            .finish()
    }
}

/// Deterministic local maps `f_k: X_k → A_k`, one graph per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Intervention {
    pub maps: Vec<Vec<usize>>,
}

impl Intervention {
    pub fn new(shapes: &[PartyShape], maps: Vec<Vec<usize>>) -> Result<Self> {
        let f = Self { maps };
        f.check_against(shapes)?;
        Ok(f)
    }

    pub fn identity(shapes: &[PartyShape]) -> Result<Self> {
        if let Some(k) = shapes.iter().position(|s| s.x_size != s.a_size) {
            return Err(Error::Shape(format!(
                "party {k} has |X| != |A|, no identity map"
            )));
        }
        Ok(Self {
            maps: shapes.iter().map(|s| (0..s.x_size).collect()).collect(),
        })
    }

    pub fn constant(shapes: &[PartyShape], a: &[usize]) -> Result<Self> {
        JointIndexer::outcomes(shapes).check(a)?;
        Ok(Self {
            maps: shapes.iter().zip(a).map(|(s, &v)| vec![v; s.x_size]).collect(),
        })
    }

    pub(crate) fn check_against(&self, shapes: &[PartyShape]) -> Result<()> {
        if self.maps.len() != shapes.len() {
            return Err(Error::Shape(format!(
                "intervention has {} parties, table has {}",
                self.maps.len(),
                shapes.len()
            )));
        }
        for (party, (map, s)) in self.maps.iter().zip(shapes).enumerate() {
            if map.len() != s.x_size {
                return Err(Error::Shape(format!(
                    "party {party}: map covers {} settings, expected {}",
                    map.len(),
                    s.x_size
                )));
            }
            if let Some(&value) = map.iter().find(|&&v| v >= s.a_size) {
                return Err(Error::Range {
                    party,
                    value,
                    size: s.a_size,
                });
            }
        }
        Ok(())
    }

    /// `f(x)` digit-wise.
    pub fn apply_digits(&self, x: &[usize]) -> Vec<usize> {
        self.maps.iter().zip(x).map(|(m, &xk)| m[xk]).collect()
    }

    /// Every joint intervention, in mixed-radix order of the concatenated
    /// graphs `f_1(0), f_1(1), ..., f_n(|X_n|-1)` with the last entry fastest.
    pub fn enumerate(shapes: &[PartyShape]) -> InterventionIter {
        InterventionIter {
            shapes: shapes.to_vec(),
            current: Some(shapes.iter().map(|s| vec![0; s.x_size]).collect()),
        }
    }

    /// Size of the joint intervention space, `∏ |A_k|^{|X_k|}`.
    pub fn count(shapes: &[PartyShape]) -> u128 {
        shapes.iter().fold(1u128, |acc, s| {
            acc.saturating_mul((s.a_size as u128).saturating_pow(s.x_size as u32))
        })
    }
}

pub struct InterventionIter {
    shapes: Vec<PartyShape>,
    current: Option<Vec<Vec<usize>>>,
}

impl Iterator for InterventionIter {
    type Item = Intervention;

    fn next(&mut self) -> Option<Intervention> {
        let out = self.current.clone()?;
        let mut next = out.clone();
        let mut carried = true;
        'outer: for (k, map) in next.iter_mut().enumerate().rev() {
            for entry in map.iter_mut().rev() {
                *entry += 1;
                if *entry < self.shapes[k].a_size {
                    carried = false;
                    break 'outer;
                }
                *entry = 0;
            }
        }
        self.current = if carried { None } else { Some(next) };
        Some(Intervention { maps: out })
    }
}

/// Local maps `f_k: X_k × I_k → A_k × O_k`.
///
/// `maps[k][x * i_size + i]` holds `(a_k, o_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedIntervention {
    pub maps: Vec<Vec<(usize, usize)>>,
}

impl ExtendedIntervention {
    pub fn from_fn(
        shapes: &[PartyShape],
        f: impl Fn(usize, usize, usize) -> (usize, usize),
    ) -> Result<Self> {
        let maps = shapes
            .iter()
            .enumerate()
            .map(|(k, s)| {
                (0..s.x_size)
                    .flat_map(|x| (0..s.i_size).map(move |i| (x, i)))
                    .map(|(x, i)| f(k, x, i))
                    .collect()
            })
            .collect();
        let g = Self { maps };
        g.check_against(shapes)?;
        Ok(g)
    }

    /// The swap strategy `a_k = i_k`, `o_k = x_k`.
    pub fn swap(shapes: &[PartyShape]) -> Result<Self> {
        if let Some(k) = shapes.iter().position(|s| !s.is_swap_convention()) {
            return Err(Error::Shape(format!(
                "party {k} does not follow |I|=|A|, |O|=|X|"
            )));
        }
        Self::from_fn(shapes, |_, x, i| (i, x))
    }

    pub(crate) fn check_against(&self, shapes: &[PartyShape]) -> Result<()> {
        if self.maps.len() != shapes.len() {
            return Err(Error::Shape(format!(
                "extended intervention has {} parties, table has {}",
                self.maps.len(),
                shapes.len()
            )));
        }
        for (party, (map, s)) in self.maps.iter().zip(shapes).enumerate() {
            if map.len() != s.x_size * s.i_size {
                return Err(Error::Shape(format!(
                    "party {party}: table covers {} (x, i) pairs, expected {}",
                    map.len(),
                    s.x_size * s.i_size
                )));
            }
            for &(a, o) in map {
                if a >= s.a_size {
                    return Err(Error::Range {
                        party,
                        value: a,
                        size: s.a_size,
                    });
                }
                if o >= s.o_size {
                    return Err(Error::Range {
                        party,
                        value: o,
                        size: s.o_size,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn local(&self, shapes: &[PartyShape], k: usize, x: usize, i: usize) -> (usize, usize) {
        self.maps[k][x * shapes[k].i_size + i]
    }
}
