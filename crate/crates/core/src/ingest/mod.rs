//! Reading measurements, persisting models, and the built-in published model.

mod measurements;
mod model_file;
mod paper;

pub use measurements::{
    parse_measurements, parse_measurements_named, MeasurementSet, RDSample, SourceInfo, HEADER,
    MAX_PSNR_DB,
};
pub use model_file::{load_model, model_checksum, save_model, SCHEMA_VERSION};
pub use paper::{builtin_paper_model, PAPER_PROVENANCE, PAPER_SEED, PAPER_VALID_RANGE};
