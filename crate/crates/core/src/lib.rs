pub mod basis;
pub mod catalog;
pub mod causality;
pub mod correspondence;
pub mod error;
pub mod index;
pub mod linalg;
pub mod table;
pub mod validate;

pub use basis::{EventLabeling, ProductBasis, ProductState};
pub use correspondence::UnitaryFamily;
pub use error::{Error, Result};
pub use index::{JointIndexer, PartyShape};
pub use table::{ExtendedIntervention, Intervention, ProcessTable};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/process-tables.md")]
    mod process_tables {}
    #[doc = include_str!("../../../book/src/causality.md")]
    mod causality {}
    #[doc = include_str!("../../../book/src/product-bases.md")]
    mod product_bases {}
    #[doc = include_str!("../../../book/src/correspondence.md")]
    mod correspondence {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
