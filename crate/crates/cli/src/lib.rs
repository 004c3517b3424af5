//! Experiment driver: scenario files, the pipeline behind each verb, and
//! text or record-formatted reports.

pub mod report;
pub mod scenario;
pub mod verbs;

pub use report::{Format, Record, Report, Status};
pub use scenario::{Scenario, System};
pub use verbs::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read {0}: {1}")]
    Io(String, String),

    #[error(transparent)]
    Core(#[from] cocycle_core::Error),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        source: cocycle_core::Error,
    },
}

/// Runs one verb by name.
pub fn run(verb: Verb, scenario: &Scenario) -> Result<Report, CliError> {
    match verb {
        Verb::Bunching => verbs::run_bunching(scenario),
        Verb::Holonomy => verbs::run_holonomy(scenario),
        Verb::Closing => verbs::run_closing(scenario),
        Verb::Reconstruct => verbs::run_reconstruct(scenario),
        Verb::Verify => verbs::run_verify(scenario),
        Verb::PeriodicData => verbs::run_periodic_data(scenario),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Verb {
    Bunching,
    Holonomy,
    Closing,
    Reconstruct,
    Verify,
    PeriodicData,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Bunching => "bunching",
            Verb::Holonomy => "holonomy",
            Verb::Closing => "closing",
            Verb::Reconstruct => "reconstruct",
            Verb::Verify => "verify",
            Verb::PeriodicData => "periodic-data",
        }
    }
}
