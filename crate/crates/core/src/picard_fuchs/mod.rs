//! Budgeted derivation of the first Picard-Fuchs operator of a pencil, and
//! the edge labels built from it.

mod label;
mod ode;

pub use label::{host_tag, label_edge, EdgeLabel, FailureKind, LabelStore, LabelStoreError};
pub use ode::{first_ode, first_ode_with, is_singular_point, verify_at, Outcome, PicardFuchsOperator};
