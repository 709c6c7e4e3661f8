pub mod algebra;
pub mod ideal;
pub mod module;

pub use algebra::GradedAlgebra;
pub use ideal::{
    coherence_probe, colon_degree_ideal, ideal_min_generators, IdealKind, MonoidIdeal, ProbeRow, ProbeTable,
};
pub use module::{
    check_exactness, projection_formula_check, unit_check, GradedMap, GradedModule, GradedModuleSpec, PresentedSpace,
};
