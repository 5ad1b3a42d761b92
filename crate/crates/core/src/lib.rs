//! Classification of minimal 1-saturating sets in PG(2,q).
//!
//! Layers, bottom up: [`field`] (table arithmetic in GF(q)), [`plane`]
//! (incidence of PG(2,q)), [`collineation`] (PGL/PΓL action), [`saturation`]
//! (the defining predicates), [`classify`] (canonical forms, stabilizers and
//! the search), [`groups`] (stabilizer labels), [`codes`] (parity-check
//! export) and [`report`] (file formats and tables). [`verify`] holds the
//! brute-force oracles used to cross-check small planes.

pub mod classify;
pub mod codes;
pub mod collineation;
pub mod error;
pub mod field;
pub mod groups;
pub mod plane;
pub mod report;
pub mod saturation;
pub mod verify;

pub use classify::{classify, ClassRecord, SearchConfig};
pub use collineation::{Collineation, Variant};
pub use error::{Error, Result};
pub use field::{FieldSpec, FieldTable};
pub use plane::{PlaneModel, PointSet};
