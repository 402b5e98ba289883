//! File formats: the `.3dna` project document and sequence exports.

mod export;
mod project_file;

pub use export::{
    export_csv, export_latex, export_report, parse_csv_rows, parse_latex_rows, CSV_HEADER,
};
pub use project_file::{
    export_project, import_project, CachedSequences, ImportedProject, FORMAT_TAG, FORMAT_VERSION,
};
