//! Run configuration, field files, CSV output and run manifests.

mod config;
mod csv;
mod field;
mod manifest;

pub use config::{
    CurveSpec, FieldFormat, FreestreamBlock, GasBlock, GeometryBlock, InnerBoundary, MeshBlock,
    OutputBlock, RunConfig, RunSetup, SolverBlock,
};
pub use csv::{read_regions, write_regions, write_residuals, REGION_HEADER, RESIDUAL_HEADER};
pub use field::{FieldFile, FIELD_COLUMNS, FIELD_VERSION};
pub use manifest::{Manifest, RunSummary};
