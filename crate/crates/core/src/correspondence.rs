//! Conversions between process tables and unambiguous product bases.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{
    canonical_labels, is_complete_orthonormal, is_unambiguous, is_weakly_unambiguous,
    labels_to_table, same_up_to_phase, AmbiguityWitness, Completeness, Event, EventLabeling,
    ProductBasis, ProductState,
};
use crate::causality::{classify, Causality, Verdict};
use crate::error::{Error, Result};
use crate::index::PartyShape;
use crate::linalg::{
    fourier, hadamard, max_identity_deviation, random_unitary, unitarity_deviation, Cmat,
};
use crate::table::ProcessTable;
use crate::validate;

/// `parties[k][x]` is the unitary `U_k^x`; column `a` is the local state `(a|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFamily {
    parties: Vec<Vec<Cmat>>,
}

impl UnitaryFamily {
    pub fn new(parties: Vec<Vec<Cmat>>, tol: f64) -> Result<Self> {
        for (k, family) in parties.iter().enumerate() {
            let d = family.first().map(|m| m.nrows()).ok_or_else(|| {
                Error::Unitaries(format!("party {k} has no settings"))
            })?;
            for (x, m) in family.iter().enumerate() {
                if m.nrows() != d || m.ncols() != d {
                    return Err(Error::Unitaries(format!(
                        "party {k}, setting {x}: {}x{} matrix, expected {d}x{d}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let dev = unitarity_deviation(m);
                if dev >= tol {
                    return Err(Error::Unitaries(format!(
                        "party {k}, setting {x} is not unitary (deviation {dev:e})"
                    )));
                }
            }
        }
        Ok(Self { parties })
    }

    pub fn parties(&self) -> &[Vec<Cmat>] {
        &self.parties
    }

    pub fn dim(&self, k: usize) -> usize {
        self.parties[k][0].nrows()
    }

    pub fn settings(&self, k: usize) -> usize {
        self.parties[k].len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryWitness {
    pub party: usize,
    pub x: usize,
    pub x_prime: usize,
    pub a: usize,
    pub a_prime: usize,
    /// `|⟨a'|(U^{x'})†U^x|a⟩|`.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryConditionReport {
    /// Off-diagonal cross-setting overlaps all nonzero.
    pub off_diagonal: bool,
    /// Local states of different settings are never orthogonal or identical.
    pub locally_unambiguous: bool,
    pub witness: Option<UnitaryWitness>,
}

impl UnitaryConditionReport {
    pub fn satisfied(&self) -> bool {
        self.off_diagonal && self.locally_unambiguous
    }

    /// The off-diagonal condition alone passes but the local states are
    /// still ambiguous.
    pub fn is_gap(&self) -> bool {
        self.off_diagonal && !self.locally_unambiguous
    }
}

pub fn check_unitary_condition(u: &UnitaryFamily, tol: f64) -> UnitaryConditionReport {
    let mut report = UnitaryConditionReport {
        off_diagonal: true,
        locally_unambiguous: true,
        witness: None,
    };
    for k in 0..u.parties.len() {
        party_condition(u, k, tol, &mut report);
    }
    report
}

fn party_condition(u: &UnitaryFamily, k: usize, tol: f64, report: &mut UnitaryConditionReport) {
    let family = &u.parties[k];
    let d = u.dim(k);
    for (x, ux) in family.iter().enumerate() {
        for (x2, ux2) in family.iter().enumerate() {
            let g = ux2.adjoint() * ux;
            for a in 0..d {
                for a2 in 0..d {
                    let overlap = g[(a2, a)].norm();
                    let witness = || UnitaryWitness {
                        party: k,
                        x,
                        x_prime: x2,
                        a,
                        a_prime: a2,
                        overlap,
                    };
                    if x == x2 {
                        if a != a2 && overlap >= tol {
                            // within-setting orthogonality
                            report.off_diagonal = false;
                            report.witness.get_or_insert_with(witness);
                        }
                        continue;
                    }
                    if a != a2 && overlap < tol {
                        report.off_diagonal = false;
                        report.witness.get_or_insert_with(witness);
                    }
                    if overlap < tol || overlap > 1.0 - tol {
                        report.locally_unambiguous = false;
                        if report.off_diagonal {
                            report.witness.get_or_insert_with(witness);
                        }
                    }
                }
            }
        }
    }
}

pub const DEFAULT_RETRIES: usize = 64;

/// `U^0 = 1`, `U^1` = Hadamard (`d = 2`) or Fourier (`d ≥ 3`), further
/// settings seeded random unitaries, resampled until the condition holds.
pub fn default_unitaries(shapes: &[PartyShape], seed: u64) -> Result<UnitaryFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parties = Vec::with_capacity(shapes.len());
    for s in shapes {
        let d = s.a_size;
        let mut fixed = vec![Cmat::identity(d, d)];
        if s.x_size > 1 {
            fixed.push(if d == 2 { hadamard() } else { fourier(d) });
        }
        let mut attempt = 0;
        let family = loop {
            let mut family = fixed.clone();
            while family.len() < s.x_size {
                family.push(random_unitary(d, &mut rng));
            }
            family.truncate(s.x_size);
            let single = UnitaryFamily {
                parties: vec![family.clone()],
            };
            if check_unitary_condition(&single, crate::linalg::DEFAULT_TOL).satisfied() {
                break family;
            }
            attempt += 1;
            if attempt >= DEFAULT_RETRIES {
                return Err(Error::RetriesExhausted(DEFAULT_RETRIES));
            }
        };
        parties.push(family);
    }
    Ok(UnitaryFamily { parties })
}

fn check_family_fits(w: &ProcessTable, u: &UnitaryFamily) -> Result<()> {
    if u.parties.len() != w.parties() {
        return Err(Error::Shape(format!(
            "{} unitary families for {} parties",
            u.parties.len(),
            w.parties()
        )));
    }
    for (k, s) in w.shapes().iter().enumerate() {
        if u.dim(k) != s.a_size {
            return Err(Error::Shape(format!(
                "party {k}: unitaries act on dimension {}, outcomes number {}",
                u.dim(k),
                s.a_size
            )));
        }
        if u.settings(k) < s.x_size {
            return Err(Error::Unitaries(format!(
                "party {k} has {} settings but only {} unitaries",
                s.x_size,
                u.settings(k)
            )));
        }
    }
    Ok(())
}

/// States `⊗_k U_k^{w_k(a)} |a_k⟩` in joint-outcome order, labelled
/// `(a | w(a))`, with no validity or unambiguity checks.
pub fn encode_unchecked(w: &ProcessTable, u: &UnitaryFamily) -> Result<ProductBasis> {
    check_family_fits(w, u)?;
    let a_ix = w.outcome_indexer();
    let mut states = Vec::with_capacity(a_ix.len());
    let mut events = Vec::with_capacity(a_ix.len());
    for (idx, a) in a_ix.iter().enumerate() {
        let x = w.row(idx).to_vec();
        let locals = (0..w.parties())
            .map(|k| u.parties[k][x[k]].column(a[k]).into_owned())
            .collect();
        states.push(ProductState::new(locals));
        events.push(Event { a, x });
    }
    let dims = w.shapes().iter().map(|s| s.a_size).collect();
    ProductBasis::new(dims, states)?.with_labels(EventLabeling::new(events))
}

pub fn pf_to_basis(w: &ProcessTable, u: &UnitaryFamily, tol: f64) -> Result<ProductBasis> {
    let report = validate::is_valid_recursive(w)?;
    if !report.valid {
        return Err(Error::InvalidProcess(
            "only valid process functions encode into bases".into(),
        ));
    }
    check_family_fits(w, u)?;
    let cond = check_unitary_condition(u, tol);
    if !cond.satisfied() {
        return Err(Error::Unitaries(format!(
            "unambiguity condition fails: {:?}",
            cond.witness
        )));
    }
    encode_unchecked(w, u)
}

/// Derive the process table of a basis. Explicit labels are used when
/// present (weak unambiguity required); otherwise canonical labels.
pub fn basis_to_pf(s: &ProductBasis, tol: f64) -> Result<(ProcessTable, EventLabeling)> {
    let labels = match &s.labels {
        Some(labels) => {
            let comp = is_complete_orthonormal(s, tol);
            if !comp.complete {
                return Err(Error::NotABasis {
                    deviation: comp.max_deviation,
                    count: comp.count,
                    expected: comp.expected,
                });
            }
            let weak = is_weakly_unambiguous(s, tol)?;
            if !weak.weakly_unambiguous {
                return Err(Error::Ambiguous(format!(
                    "labels are not weakly unambiguous: shared {:?}, exclusivity {:?}",
                    weak.shared_vectors, weak.exclusivity_violation
                )));
            }
            labels.clone()
        }
        None => {
            let report = is_unambiguous(s, tol)?;
            match report.partition {
                Some(p) => canonical_labels(s, &p),
                None => {
                    return Err(Error::Ambiguous(format!(
                        "no canonical labels: {:?}",
                        report.witnesses
                    )))
                }
            }
        }
    };
    let w = labels_to_table(&s.dims, &labels)?;
    if !validate::is_valid_recursive(&w)?.valid {
        return Err(Error::InvalidProcess(
            "table derived from a basis failed validation".into(),
        ));
    }
    Ok((w, labels))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DpvmReport {
    pub passes: bool,
    /// Largest `|⟨v_a|v_a'⟩ − δ_{aa'}|`.
    pub gram_deviation: f64,
    /// Largest entry of `|Σ_a E_a − 1|`.
    pub completeness_deviation: f64,
}

/// Check that the rank-one effects `E_a = ⊗_k |(a_k|w_k(a))⟩⟨(a_k|w_k(a))|`
/// form a projective measurement.
pub fn dpvm_check(w: &ProcessTable, u: &UnitaryFamily, tol: f64) -> Result<DpvmReport> {
    let basis = encode_unchecked(w, u)?;
    let vectors: Vec<_> = basis.states.iter().map(ProductState::dense).collect();
    let dim: usize = basis.dims.iter().product();
    let m = Cmat::from_columns(&vectors);
    let gram_deviation = max_identity_deviation(&(m.adjoint() * &m));
    let sum = &m * m.adjoint();
    let completeness_deviation = if sum.nrows() == dim {
        max_identity_deviation(&sum)
    } else {
        f64::INFINITY
    };
    Ok(DpvmReport {
        passes: gram_deviation < tol && completeness_deviation < tol,
        gram_deviation,
        completeness_deviation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    NotABasis,
    Ambiguous,
    UnambiguousCausal,
    UnambiguousQnlwe,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisVerdict {
    pub kind: BasisKind,
    pub completeness: Completeness,
    pub derived_pf: Option<ProcessTable>,
    pub labels: Option<EventLabeling>,
    pub pf_verdict: Option<Verdict>,
    pub witnesses: Vec<AmbiguityWitness>,
}

/// Completeness, then unambiguity, then the causal verdict of the derived table.
pub fn classify_basis(s: &ProductBasis, tol: f64) -> Result<BasisVerdict> {
    let completeness = is_complete_orthonormal(s, tol);
    let mut verdict = BasisVerdict {
        kind: BasisKind::NotABasis,
        completeness,
        derived_pf: None,
        labels: None,
        pf_verdict: None,
        witnesses: vec![],
    };
    if !completeness.complete {
        return Ok(verdict);
    }
    let report = is_unambiguous(s, tol)?;
    let Some(partition) = report.partition else {
        verdict.kind = BasisKind::Ambiguous;
        verdict.witnesses = report.witnesses;
        return Ok(verdict);
    };
    let labels = canonical_labels(s, &partition);
    let w = labels_to_table(&s.dims, &labels)?;
    let pf_verdict = classify(&w)?;
    verdict.kind = match pf_verdict.causality {
        Causality::Causal => BasisKind::UnambiguousCausal,
        Causality::NonCausal => BasisKind::UnambiguousQnlwe,
        Causality::NotApplicable => {
            return Err(Error::InvalidProcess(
                "unambiguous basis produced an invalid table".into(),
            ))
        }
    };
    verdict.derived_pf = Some(w);
    verdict.labels = Some(labels);
    verdict.pf_verdict = Some(pf_verdict);
    Ok(verdict)
}

/// Bijection `j ↦ l` with `|⟨ψ_j|φ_l⟩| > 1 − tol`, if the state sets agree.
pub fn same_state_set(s: &ProductBasis, t: &ProductBasis, tol: f64) -> Option<Vec<usize>> {
    if s.dims != t.dims || s.states.len() != t.states.len() {
        return None;
    }
    let mut used = vec![false; t.states.len()];
    let mut map = Vec::with_capacity(s.states.len());
    for sj in &s.states {
        let l = (0..t.states.len()).find(|&l| {
            !used[l]
                && sj
                    .locals
                    .iter()
                    .zip(&t.states[l].locals)
                    .all(|(u, v)| same_up_to_phase(u, v, tol))
        })?;
        used[l] = true;
        map.push(l);
    }
    Some(map)
}

// keeps builders in the catalog terse
pub(crate) fn family(parties: Vec<Vec<Cmat>>) -> UnitaryFamily {
    UnitaryFamily::new(parties, 1e-9).expect("unitary fixtures")
}
