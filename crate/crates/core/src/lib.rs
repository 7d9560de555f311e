//! Deterministic coordination of social web service commitments.

pub mod compatibility;
pub mod governance;
pub mod ids;
pub mod model;
pub mod oracle;
pub mod scenario;
pub mod scheduler;
pub mod simulator;
pub mod trace;
