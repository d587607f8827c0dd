//! Exact computations with elementary locally compact abelian groups
//! `R^a + Z^b + T^c + F`, monic two-term complexes of such groups, and
//! precompactly generated groups presented by dense finitely generated
//! subgroups.

pub mod corpus;
pub mod elca;
pub mod error;
pub mod fgab;
pub mod heart;
pub mod linalg;
pub mod oracle;
pub mod pga;
pub mod scalars;

pub use error::{Error, Result};
