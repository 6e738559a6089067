//! File formats, instance generation, and batch experiments around
//! `hgt-core`. The `hgt` binary in this crate is a thin wrapper over
//! these modules.

pub mod formats;
pub mod generator;
pub mod sweep;

/// Identification strategy selector shared by the CLI surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Protocol {
    NonAdaptive,
    TwoStage,
    ThreeStage,
}
