//! Exact integer and rational linear algebra over lattices and cones.

pub mod cone;
pub mod integer;
pub mod vector;

pub use cone::{cone_contains, enumerate_points, enumerate_scaled, facet_inequalities, RationalCone};
pub use integer::{hermite_normal_form, smith_normal_form, IntegerMatrix, SnfDecomposition};
pub use vector::{dot, RationalVector};
