//! Planning toolkit for non-wire alternatives (NWAs).
//!
//! Co-optimizes investment in and operation of distributed energy resources
//! together with the timing of a traditional capacity-expansion project,
//! protects the plan against interval uncertainty, and assesses it by Monte
//! Carlo dispatch with load shedding.
//!
//! The crate is organized bottom-up:
//!
//! * [`timegrid`] – horizon indexing and discounting.
//! * [`lp`] – sparse LP model and a bounded revised simplex solver with duals.
//! * [`capex`] – expansion-year decision rule and its present cost.
//! * [`nwa`] – the generic NWA block and the EE/PV/DR/ES instantiations.
//! * [`robust`] – interval-uncertain LPs and their budgeted robust counterpart.
//! * [`plan`] – the joint planning problem, solved sequentially over the
//!   expansion year or by Dantzig–Wolfe column generation.
//! * [`scenario`] – scenario ingestion, growth, envelopes and sampling.
//! * [`assess`] – Monte Carlo evaluation and protection-level selection.
//! * [`config`] – the JSON configuration consumed by the command-line tool.

pub mod assess;
pub mod capex;
pub mod config;
mod error;
pub mod lp;
pub mod model;
pub mod nwa;
pub mod plan;
pub mod robust;
pub mod scenario;
pub mod timegrid;

pub use error::{Error, Result};

pub use model::{SystemModel, Tariff};
pub use timegrid::{Discount, TimeGrid};
