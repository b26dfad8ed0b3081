//! Convergence studies on a fixed catalog of test integrands: running them,
//! fitting rates to the results, and writing CSV or JSON.

pub mod catalog;
pub mod emit;
pub mod fit;
pub mod lemma;
pub mod study;

pub use catalog::{catalog_lookup, CatalogEntry, CatalogParams, IntegrandKind};
pub use emit::{
    emit, parse_records, read_records, render, Emittable, OutputFormat, RECORD_COLUMNS,
};
pub use fit::{fit_rate, RateFit, RateModel};
pub use lemma::{lemma_grid, LemmaCheck};
pub use study::{default_threshold_exponent, run_study, StudyConfig, StudyMode, StudyRecord};
