//! Independent oracles for the discretization and the characteristic analysis.

mod checks;
mod manufactured;
mod mms;
mod surface;
mod taylor_maccoll;

pub use checks::{
    freestream_oracle, jacobian_fidelity, mms_short, oracle_equivalence, potential_consistency,
    pseudo_time_speeds, random_metric, random_state, run_suite, steady_spectrum, type_transition,
    CheckRecord, Suite, VerifyOptions,
};
pub use manufactured::{
    general_residual, general_residual_with, mutated_source, spherical_residual_oracle,
    to_spherical_form, ManufacturedField, SourceFn, SphericalFreestream, TrigField, TrigTerm,
};
pub use mms::{mms_convergence, truncation_error, MmsCase, MmsReport};
pub use surface::{compare_surface_pressure, SurfaceComparison};
pub use taylor_maccoll::{taylor_maccoll, ProfileSample, TaylorMaccollSolution};
