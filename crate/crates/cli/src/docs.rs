//! JSON file formats for tables, bases and unitary families.

use pfqn::basis::Event;
use pfqn::linalg::{c, Cmat, Cvec};
use pfqn::{EventLabeling, PartyShape, ProcessTable, ProductBasis, ProductState, UnitaryFamily};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Complex number as `[re, im]`.
pub type Complex = [f64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartyDoc {
    pub x_size: usize,
    pub a_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub o_size: Option<usize>,
}

/// A process table: `table[a]` is the setting vector for joint outcome
/// index `a`, last party fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfDocument {
    pub parties: Vec<PartyDoc>,
    pub table: Vec<Vec<usize>>,
}

impl PfDocument {
    pub fn from_table(w: &ProcessTable) -> Self {
        let parties = w
            .shapes()
            .iter()
            .map(|s| {
                let plain = PartyShape::new(s.x_size, s.a_size).expect("shape of a table");
                let custom = plain != *s;
                PartyDoc {
                    x_size: s.x_size,
                    a_size: s.a_size,
                    i_size: custom.then_some(s.i_size),
                    o_size: custom.then_some(s.o_size),
                }
            })
            .collect();
        Self {
            parties,
            table: w.rows().map(<[usize]>::to_vec).collect(),
        }
    }

    pub fn to_table(&self) -> Result<ProcessTable, CliError> {
        let shapes = self
            .parties
            .iter()
            .map(|p| {
                let plain = PartyShape::new(p.x_size, p.a_size)?;
                PartyShape::with_io(
                    p.x_size,
                    p.a_size,
                    p.i_size.unwrap_or(plain.i_size),
                    p.o_size.unwrap_or(plain.o_size),
                )
            })
            .collect::<pfqn::Result<Vec<_>>>()?;
        Ok(ProcessTable::new(shapes, self.table.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDoc {
    pub a: Vec<usize>,
    pub x: Vec<usize>,
}

pub fn labels_to_docs(labels: &EventLabeling) -> Vec<EventDoc> {
    labels
        .events
        .iter()
        .map(|e| EventDoc {
            a: e.a.clone(),
            x: e.x.clone(),
        })
        .collect()
}

fn vector_doc(v: &Cvec) -> Vec<Complex> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn vector(v: &[Complex]) -> Cvec {
    Cvec::from_iterator(v.len(), v.iter().map(|&[re, im]| c(re, im)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDocument {
    pub dims: Vec<usize>,
    /// `states[j][k]` is party `k`'s factor of state `j`.
    pub states: Vec<Vec<Vec<Complex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<EventDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl BasisDocument {
    pub fn from_basis(s: &ProductBasis, tol: Option<f64>) -> Self {
        Self {
            dims: s.dims.clone(),
            states: s
                .states
                .iter()
                .map(|st| st.locals.iter().map(vector_doc).collect())
                .collect(),
            labels: s.labels.as_ref().map(labels_to_docs),
            tol,
        }
    }

    pub fn to_basis(&self) -> Result<ProductBasis, CliError> {
        let states = self
            .states
            .iter()
            .map(|st| ProductState::new(st.iter().map(|v| vector(v)).collect()))
            .collect();
        let basis = ProductBasis::new(self.dims.clone(), states)?;
        Ok(match &self.labels {
            Some(labels) => basis.with_labels(EventLabeling::new(
                labels
                    .iter()
                    .map(|e| Event {
                        a: e.a.clone(),
                        x: e.x.clone(),
                    })
                    .collect(),
            ))?,
            None => basis,
        })
    }
}

/// `parties[k][x]` is the matrix `U_k^x`, as rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitariesDocument {
    pub parties: Vec<Vec<Vec<Vec<Complex>>>>,
}

impl UnitariesDocument {
    pub fn from_family(u: &UnitaryFamily) -> Self {
        Self {
            parties: u
                .parties()
                .iter()
                .map(|ms| {
                    ms.iter()
                        .map(|m| {
                            m.row_iter()
                                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_family(&self, tol: f64) -> Result<UnitaryFamily, CliError> {
        let mut parties = Vec::with_capacity(self.parties.len());
        for (k, ms) in self.parties.iter().enumerate() {
            let mut family = Vec::with_capacity(ms.len());
            for (x, rows) in ms.iter().enumerate() {
                let n = rows.len();
                if rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::Document(format!(
                        "party {k}, setting {x}: matrix is not square"
                    )));
                }
                family.push(Cmat::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1])));
            }
            parties.push(family);
        }
        Ok(UnitaryFamily::new(parties, tol)?)
    }
}
