//! Planner for period computations on pencils of quartic surfaces.

pub mod algebra;
pub mod budget;
pub mod connection;
pub mod dataset;
pub mod features;
pub mod jacobian;
pub mod learn;
pub mod picard_fuchs;
pub mod scheduler;
pub mod store;
