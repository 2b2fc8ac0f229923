//! Seeded verification campaigns over the `cayley-core` library, their JSON
//! and CSV reports, and the configuration behind the `cayley-variation` CLI.

pub mod campaigns;
pub mod config;
pub mod error;
pub mod report;
pub mod runner;

pub use config::{CampaignConfig, Command, Format};
pub use error::HarnessError;
pub use report::{CampaignReport, PropertyResult};
