//! Trace-driven, microsecond-resolution simulator of Wi-Fi multi-link
//! channel access.
//!
//! The crate simulates one AP/STA pair contending against recorded (or
//! synthesized) spectrum activity on up to two radio links, under four
//! access policies: single-link, independent dual-link, primary-slaved
//! dual-link, and dual-link with deferred allocation. Channel bonding with
//! preamble puncturing composes with any policy. A closed-form throughput
//! model and an experiment harness with CSV outputs sit on top.

pub mod bonding;
pub mod cli;
pub mod engine;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod policies;
pub mod seeding;
pub mod trace;
pub mod traffic;

pub use bonding::BondedLink;
pub use engine::{run, LinkRole, PacketRecord, TimingConfig};
pub use error::{Error, Result};
pub use metrics::{summarize, ExperimentSummary};
pub use policies::PolicyId;
pub use trace::BinaryTrace;
pub use traffic::ArrivalSchedule;
