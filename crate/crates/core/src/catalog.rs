//! Named reference instances with their expected classifications.
//!
//! Amplitudes are generated from exact expressions (`1/√2`, `1/√3`,
//! `ω = e^{2πi/3}`) rather than stored as literals.

use num_rational::Ratio;

use crate::basis::{
    is_unambiguous, is_weakly_unambiguous, labels_to_table, EventLabeling, ProductBasis,
    ProductState,
};
use crate::causality::{self, Causality, Validity};
use crate::correspondence::{classify_basis, family, pf_to_basis, same_state_set, BasisKind, UnitaryFamily};
use crate::error::{Error, Result};
use crate::index::PartyShape;
use crate::linalg::{c, embed, fourier, hadamard, ket, omega, real_state, Cmat, Cvec, DEFAULT_TOL};
use crate::table::ProcessTable;
use crate::validate;

fn bits(n: usize, f: impl Fn(&[usize]) -> Vec<usize>) -> ProcessTable {
    ProcessTable::from_fn(vec![PartyShape::sq(2); n], f).expect("binary table")
}

fn delta(a: usize, b: usize) -> usize {
    usize::from(a == b)
}

pub fn lugano() -> ProcessTable {
    bits(3, |a| vec![a[2] * (a[1] ^ 1), a[0] * (a[2] ^ 1), a[1] * (a[0] ^ 1)])
}

/// The cyclic loop `x1 := a2, x2 := a3, x3 := a1`.
pub fn gyni3() -> ProcessTable {
    bits(3, |a| vec![a[1], a[2], a[0]])
}

/// Party 3 switches the others between a fixed order and a Lugano process.
pub fn ngpf() -> ProcessTable {
    bits(4, |a| {
        let (a1, a2, a3, a4) = (a[0], a[1], a[2], a[3]);
        vec![
            (1 - a4) + a4 * a3 * (a2 ^ 1),
            (1 - a4) * a1 + a4 * a1 * (a3 ^ 1),
            (1 - a4) * a2 + a4 * a2 * (a1 ^ 1),
            0,
        ]
    })
}

/// Party 0 selects one of two Lugano processes on the others.
pub fn controlled_lugano() -> ProcessTable {
    bits(4, |a| {
        let (a1, a2, a3, a4) = (a[0], a[1], a[2], a[3]);
        vec![
            0,
            (1 - a1) * a4 * (a3 ^ 1) + a1 * a3 * (a4 ^ 1),
            (1 - a1) * a2 * (a4 ^ 1) + a1 * a4 * (a2 ^ 1),
            (1 - a1) * a3 * (a2 ^ 1) + a1 * a2 * (a3 ^ 1),
        ]
    })
}

/// Three-trit analogue of the Lugano process.
pub fn qutrit_lugano() -> ProcessTable {
    let comp = |b: usize, c: usize| delta(b, 0) * (delta(c, 1) + 2 * delta(c, 2));
    ProcessTable::from_fn(vec![PartyShape::sq(3); 3], |a| {
        vec![comp(a[1], a[2]), comp(a[2], a[0]), comp(a[0], a[1])]
    })
    .expect("ternary table")
}

/// Party 0 has a trit outcome and a bit setting; the others are binary.
pub fn fourpartite_trit() -> ProcessTable {
    let shapes = vec![
        PartyShape::new(2, 3).expect("sizes"),
        PartyShape::sq(2),
        PartyShape::sq(2),
        PartyShape::sq(2),
    ];
    ProcessTable::from_fn(shapes, |a| {
        let (a1, a2, a3, a4) = (a[0], a[1], a[2], a[3]);
        vec![
            usize::from(a2 == a3 && a3 == a4),
            (1 - delta(a1, 0)) * a4 * (a3 ^ 1),
            (1 - delta(a1, 1)) * a2 * (a4 ^ 1),
            (1 - delta(a1, 2)) * a3 * (a2 ^ 1),
        ]
    })
    .expect("mixed table")
}

/// Two-way quasi-process behind the domino basis: `x1 = a2 + 2 mod 3`,
/// `x2` swaps outcomes 0 and 1 of party 0 and keeps 2.
pub fn domino_quasi() -> ProcessTable {
    let flip = |v: usize| match v {
        0 => 1,
        1 => 0,
        v => v,
    };
    ProcessTable::from_fn(vec![PartyShape::sq(3); 2], |a| vec![(a[1] + 2) % 3, flip(a[0])])
        .expect("ternary table")
}

/// `x1 = 0`, `x2 = a1` on a qubit and a qutrit.
pub fn one_way_2x3() -> ProcessTable {
    let shapes = vec![PartyShape::new(1, 2).expect("sizes"), PartyShape::new(2, 3).expect("sizes")];
    ProcessTable::from_fn(shapes, |a| vec![0, a[0]]).expect("table")
}

/// `x1 = δ_{a2,2}`, `x2 = a1` on a qubit and a qutrit.
pub fn two_way_2x3() -> ProcessTable {
    let shapes = vec![PartyShape::sq(2), PartyShape::new(2, 3).expect("sizes")];
    ProcessTable::from_fn(shapes, |a| vec![delta(a[1], 2), a[0]]).expect("table")
}

/// The second qutrit basis `diag(1, ω, 1)·F₃`.
pub fn beta3() -> Cmat {
    let mut d = Cmat::identity(3, 3);
    d[(1, 1)] = omega(3);
    d * fourier(3)
}

/// Local state for a token of a basis listing.
///
/// `0 1 2` computational, `+ -` on `{0,1}`, `+' -'` on `{1,2}`,
/// `aN` / `bN` columns of `F₃` / [`beta3`].
pub fn local(token: &str, d: usize) -> Option<Cvec> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pair = |i: usize, j: usize, sign: f64| {
        let mut v = Cvec::zeros(d);
        v[i] = c(h, 0.0);
        v[j] = c(sign * h, 0.0);
        v
    };
    let column = |m: Cmat, i: usize| m.column(i).into_owned();
    Some(match token {
        "0" | "1" | "2" => {
            let i: usize = token.parse().ok()?;
            (i < d).then(|| ket(d, i))?
        }
        "+" => pair(0, 1, 1.0),
        "-" => pair(0, 1, -1.0),
        "+'" if d >= 3 => pair(1, 2, 1.0),
        "-'" if d >= 3 => pair(1, 2, -1.0),
        "a0" | "a1" | "a2" if d == 3 => column(fourier(3), token[1..].parse().ok()?),
        "b0" | "b1" | "b2" if d == 3 => column(beta3(), token[1..].parse().ok()?),
        _ => return None,
    })
}

const TOKENS: [&str; 13] = [
    "0", "1", "2", "+", "-", "+'", "-'", "a0", "a1", "a2", "b0", "b1", "b2",
];

/// Name of a local vector among the listing tokens, up to phase.
pub fn local_name(v: &Cvec) -> Option<&'static str> {
    TOKENS.iter().copied().find(|t| {
        local(t, v.len()).is_some_and(|u| (u.dotc(v).norm() - 1.0).abs() < 1e-9)
    })
}

fn tokenize(state: &str) -> Vec<String> {
    let mut out: Vec<String> = vec![];
    for ch in state.chars() {
        match ch {
            '\'' => out.last_mut().expect("prime follows a symbol").push(ch),
            '0'..='9' if matches!(out.last().map(String::as_str), Some("a" | "b")) => {
                out.last_mut().expect("checked").push(ch)
            }
            _ => out.push(ch.to_string()),
        }
    }
    out
}

/// Build a basis from compact listings such as `"+01"` or `"a1000"`.
pub fn basis_from_listing(dims: &[usize], listing: &[&str]) -> ProductBasis {
    let states = listing
        .iter()
        .map(|s| {
            let tokens = tokenize(s);
            assert_eq!(tokens.len(), dims.len(), "listing entry {s}");
            ProductState::new(
                tokens
                    .iter()
                    .zip(dims)
                    .map(|(t, &d)| local(t, d).unwrap_or_else(|| panic!("token {t} in {s}")))
                    .collect(),
            )
        })
        .collect();
    ProductBasis::new(dims.to_vec(), states).expect("listing shape")
}

fn labelled(dims: &[usize], listing: &[&str], labels: &[&str]) -> ProductBasis {
    basis_from_listing(dims, listing)
        .with_labels(EventLabeling::from_compact(labels).expect("labels"))
        .expect("label shape")
}

pub fn shift_basis() -> ProductBasis {
    basis_from_listing(
        &[2, 2, 2],
        &["000", "+01", "01+", "01-", "1+0", "-01", "1-0", "111"],
    )
}

/// Events of the SHIFT basis in listing order.
pub fn shift_labels() -> EventLabeling {
    EventLabeling::from_compact(&[
        "000|000", "001|100", "010|001", "011|001", "100|010", "101|100", "110|010", "111|000",
    ])
    .expect("labels")
}

pub fn qutrit_basis() -> ProductBasis {
    basis_from_listing(
        &[3, 3, 3],
        &[
            "000", "a001", "b002", "01a0", "01a1", "01a2", "02b0", "02b1", "02b2", "1a00", "a101",
            "b102", "1a10", "111", "112", "1a20", "121", "122", "2b00", "a201", "b202", "2b10",
            "211", "212", "2b20", "221", "222",
        ],
    )
}

/// Listing order follows the joint outcome order. Entry 15 carries `α₁`,
/// the value the table assigns to `a = (1,1,1,1)`.
pub fn fourpartite_basis() -> ProductBasis {
    basis_from_listing(
        &[3, 2, 2, 2],
        &[
            "a0000", "0001", "001+", "001-", "01+0", "0101", "01-0", "a0111", "a1000", "1+01",
            "101+", "101-", "1100", "1-01", "1110", "a1111", "a2000", "2+01", "2010", "2011",
            "21+0", "2-01", "21-0", "a2111",
        ],
    )
}

pub fn controlled_lugano_basis() -> ProductBasis {
    basis_from_listing(
        &[2, 2, 2, 2],
        &[
            "0000", "0+01", "001+", "001-", "01+0", "0-01", "01-0", "0111", "1000", "10+1",
            "1+10", "10-1", "110+", "110-", "1-10", "1111",
        ],
    )
}

pub fn domino_basis() -> ProductBasis {
    labelled(
        &[3, 3],
        &["0+", "0-", "+2", "+'0", "11", "-2", "-'0", "2+'", "2-'"],
        &[
            "00|21", "01|01", "02|11", "10|20", "11|00", "12|10", "20|22", "21|02", "22|12",
        ],
    )
}

/// `1`, Hadamard on `{0,1}`, Hadamard on `{1,2}`, for both parties.
pub fn domino_unitaries() -> UnitaryFamily {
    let f = vec![Cmat::identity(3, 3), embed(3, 0, &hadamard()), embed(3, 1, &hadamard())];
    family(vec![f.clone(), f])
}

pub fn one_way_basis() -> ProductBasis {
    labelled(
        &[2, 3],
        &["00", "01", "02", "1+", "1-", "12"],
        &["00|00", "01|00", "02|00", "10|01", "11|01", "12|01"],
    )
}

pub fn quasi_basis() -> ProductBasis {
    labelled(
        &[2, 3],
        &["00", "01", "1+", "1-", "+2", "-2"],
        &["00|00", "01|00", "10|01", "11|01", "02|10", "12|11"],
    )
}

/// Bob's second setting `{(0+1+2)/√3, (0−1)/√2, (0+1−2·2)/√6}` is
/// orthogonal to `|2⟩` by accident.
pub fn accidental_basis() -> ProductBasis {
    let q = |i| ket(2, i);
    let t = |i| ket(3, i);
    let second = [
        real_state(&[1.0, 1.0, 1.0]),
        real_state(&[1.0, -1.0, 0.0]),
        real_state(&[1.0, 1.0, -2.0]),
    ];
    let mut states: Vec<ProductState> = (0..3)
        .map(|i| ProductState::new(vec![q(0), t(i)]))
        .collect();
    states.extend(second.iter().map(|v| ProductState::new(vec![q(1), v.clone()])));
    ProductBasis::new(vec![2, 3], states)
        .expect("shape")
        .with_labels(
            EventLabeling::from_compact(&["00|00", "01|00", "02|00", "10|01", "11|01", "12|01"])
                .expect("labels"),
        )
        .expect("label shape")
}

pub fn hadamard2() -> UnitaryFamily {
    family(vec![vec![Cmat::identity(2, 2), hadamard()]])
}

pub fn fourier3() -> UnitaryFamily {
    family(vec![vec![Cmat::identity(3, 3), fourier(3)]])
}

/// `{1, H}` on every party.
pub fn hadamard_family(n: usize) -> UnitaryFamily {
    family(vec![vec![Cmat::identity(2, 2), hadamard()]; n])
}

/// `{1, F₃, β}` on each of three qutrits.
pub fn qutrit_unitaries() -> UnitaryFamily {
    family(vec![vec![Cmat::identity(3, 3), fourier(3), beta3()]; 3])
}

/// `{1, F₃}` on party 0, `{1, H}` on the binary parties.
pub fn fourpartite_unitaries() -> UnitaryFamily {
    let mut parties = vec![vec![Cmat::identity(3, 3), fourier(3)]];
    parties.extend(vec![vec![Cmat::identity(2, 2), hadamard()]; 3]);
    family(parties)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Pf,
    Basis,
    Labeling,
    Unitaries,
}

/// What the live pipeline must reproduce for an entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Expected {
    pub validity: Option<Validity>,
    pub causality: Option<Causality>,
    pub constant_inputs: Option<Vec<usize>>,
    pub best_causal: Option<Ratio<u64>>,
    pub basis_kind: Option<BasisKind>,
    pub weakly_unambiguous: Option<bool>,
    /// Table read off the explicit labels.
    pub labelled_validity: Option<Validity>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: EntryKind,
    pub provenance: &'static str,
    pub table: Option<ProcessTable>,
    pub basis: Option<ProductBasis>,
    pub unitaries: Option<UnitaryFamily>,
    pub expected: Expected,
}

const NAMES: [&str; 13] = [
    "lugano",
    "shift",
    "gyni3",
    "qutrit-lugano",
    "fourpartite-trit",
    "controlled-lugano",
    "ngpf",
    "domino",
    "one-way-basis",
    "quasi-basis",
    "accidental-basis",
    "hadamard2",
    "fourier3",
];

pub fn list() -> Vec<&'static str> {
    NAMES.to_vec()
}

fn entry(name: &'static str, kind: EntryKind, provenance: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        kind,
        provenance,
        table: None,
        basis: None,
        unitaries: None,
        expected: Expected::default(),
    }
}

fn valid(causality: Causality, constant_inputs: Vec<usize>) -> Expected {
    Expected {
        validity: Some(Validity::Valid),
        causality: Some(causality),
        constant_inputs: Some(constant_inputs),
        ..Expected::default()
    }
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    use EntryKind::*;
    let e = match name {
        "lugano" => CatalogEntry {
            table: Some(lugano()),
            expected: Expected {
                best_causal: Some(Ratio::new(3, 4)),
                ..valid(Causality::NonCausal, vec![])
            },
            ..entry("lugano", Pf, "tripartite binary process, x1 := a3(a2 ⊕ 1) and cyclic")
        },
        "shift" => CatalogEntry {
            basis: Some(shift_basis()),
            table: Some(lugano()),
            unitaries: Some(hadamard_family(3)),
            expected: Expected {
                basis_kind: Some(BasisKind::UnambiguousQnlwe),
                ..Expected::default()
            },
            ..entry("shift", Basis, "eight-state three-qubit SHIFT basis")
        },
        "gyni3" => CatalogEntry {
            table: Some(gyni3()),
            expected: Expected {
                validity: Some(Validity::Invalid),
                ..Expected::default()
            },
            ..entry("gyni3", Pf, "guess-your-neighbour-input loop x1 := a2, x2 := a3, x3 := a1")
        },
        "qutrit-lugano" => CatalogEntry {
            table: Some(qutrit_lugano()),
            basis: Some(qutrit_basis()),
            unitaries: Some(qutrit_unitaries()),
            expected: Expected {
                basis_kind: Some(BasisKind::UnambiguousQnlwe),
                ..valid(Causality::NonCausal, vec![])
            },
            ..entry("qutrit-lugano", Pf, "three-qutrit process and its 27-state basis")
        },
        "fourpartite-trit" => CatalogEntry {
            table: Some(fourpartite_trit()),
            basis: Some(fourpartite_basis()),
            unitaries: Some(fourpartite_unitaries()),
            expected: Expected {
                basis_kind: Some(BasisKind::UnambiguousQnlwe),
                ..valid(Causality::NonCausal, vec![])
            },
            ..entry("fourpartite-trit", Pf, "four-partite process with one trit outcome and its 24-state basis")
        },
        "controlled-lugano" => CatalogEntry {
            table: Some(controlled_lugano()),
            basis: Some(controlled_lugano_basis()),
            unitaries: Some(hadamard_family(4)),
            expected: Expected {
                basis_kind: Some(BasisKind::UnambiguousQnlwe),
                ..valid(Causality::NonCausal, vec![0])
            },
            ..entry("controlled-lugano", Pf, "party 0 classically selects one of two Lugano processes")
        },
        "ngpf" => CatalogEntry {
            table: Some(ngpf()),
            expected: valid(Causality::NonCausal, vec![3]),
            ..entry("ngpf", Pf, "party 3 switches between a fixed order (a4 = 0) and Lugano (a4 = 1)")
        },
        "domino" => CatalogEntry {
            basis: Some(domino_basis()),
            table: Some(domino_quasi()),
            unitaries: Some(domino_unitaries()),
            expected: Expected {
                basis_kind: Some(BasisKind::Ambiguous),
                weakly_unambiguous: Some(false),
                validity: Some(Validity::Invalid),
                labelled_validity: Some(Validity::Invalid),
                ..Expected::default()
            },
            ..entry("domino", Basis, "two-qutrit domino basis with its two-way quasi-process")
        },
        "one-way-basis" => CatalogEntry {
            basis: Some(one_way_basis()),
            table: Some(one_way_2x3()),
            expected: Expected {
                basis_kind: Some(BasisKind::Ambiguous),
                weakly_unambiguous: Some(false),
                labelled_validity: Some(Validity::Valid),
                ..valid(Causality::Causal, vec![0])
            },
            ..entry("one-way-basis", Labeling, "ambiguous 2x3 basis whose labelling gives x1 = 0, x2 = a1")
        },
        "quasi-basis" => CatalogEntry {
            basis: Some(quasi_basis()),
            table: Some(two_way_2x3()),
            expected: Expected {
                basis_kind: Some(BasisKind::Ambiguous),
                weakly_unambiguous: Some(false),
                validity: Some(Validity::Invalid),
                labelled_validity: Some(Validity::Invalid),
                ..Expected::default()
            },
            ..entry("quasi-basis", Labeling, "ambiguous 2x3 basis with quasi-process x1 = δ(a2, 2), x2 = a1")
        },
        "accidental-basis" => CatalogEntry {
            basis: Some(accidental_basis()),
            table: Some(one_way_2x3()),
            expected: Expected {
                basis_kind: Some(BasisKind::Ambiguous),
                weakly_unambiguous: Some(true),
                labelled_validity: Some(Validity::Valid),
                ..valid(Causality::Causal, vec![0])
            },
            ..entry("accidental-basis", Basis, "weakly unambiguous 2x3 basis with an accidental orthogonality")
        },
        "hadamard2" => CatalogEntry {
            unitaries: Some(hadamard2()),
            ..entry("hadamard2", Unitaries, "qubit settings {1, H}")
        },
        "fourier3" => CatalogEntry {
            unitaries: Some(fourier3()),
            ..entry("fourier3", Unitaries, "qutrit settings {1, F3}")
        },
        other => return Err(Error::UnknownEntry(other.to_string())),
    };
    Ok(e)
}

impl CatalogEntry {
    /// Mismatches between the live pipeline and the stored expectations.
    pub fn self_test(&self) -> Result<Vec<String>> {
        let mut bad = vec![];
        let mut check = |what: &str, ok: bool| {
            if !ok {
                bad.push(format!("{}: {what}", self.name));
            }
        };
        let x = &self.expected;
        if let Some(w) = &self.table {
            let v = causality::classify(w)?;
            if let Some(e) = x.validity {
                check("validity", v.validity == e);
            }
            if let Some(e) = x.causality {
                check("causality", v.causality == e);
            }
            if let Some(e) = &x.constant_inputs {
                check("constant-input parties", &v.constant_input_parties == e);
            }
            if let Some(e) = x.best_causal {
                check("best causal value", causality::best_causal_value(w)?.value == e);
            }
            if let (Some(u), Some(s), Validity::Valid) = (&self.unitaries, &self.basis, v.validity) {
                let generated = pf_to_basis(w, u, DEFAULT_TOL)?;
                check("generated basis", same_state_set(&generated, s, DEFAULT_TOL).is_some());
            }
        }
        if let Some(s) = &self.basis {
            if let Some(e) = x.basis_kind {
                check("basis kind", classify_basis(s, DEFAULT_TOL)?.kind == e);
            }
            if let Some(e) = x.weakly_unambiguous {
                check("weak unambiguity", is_weakly_unambiguous(s, DEFAULT_TOL)?.weakly_unambiguous == e);
            }
            if let (Some(e), Some(labels)) = (x.labelled_validity, &s.labels) {
                let derived = labels_to_table(&s.dims, labels)?;
                let ok = validate::is_valid_recursive(&derived)?.valid;
                check("labelled table validity", ok == (e == Validity::Valid));
                if let Some(w) = &self.table {
                    check("labelled table", &derived == w);
                }
            }
            if self.kind == EntryKind::Basis && x.basis_kind == Some(BasisKind::UnambiguousQnlwe) {
                check("unambiguity", is_unambiguous(s, DEFAULT_TOL)?.unambiguous);
            }
        }
        if let Some(u) = &self.unitaries {
            if self.kind == EntryKind::Unitaries {
                check(
                    "unitary condition",
                    crate::correspondence::check_unitary_condition(u, DEFAULT_TOL).satisfied(),
                );
            }
        }
        Ok(bad)
    }
}
