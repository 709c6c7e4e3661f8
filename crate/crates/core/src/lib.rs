pub mod cli;
pub mod error;
pub mod field;
pub mod graded;
pub mod infquot;
pub mod kummer;
pub mod lattice;
pub mod monoid;
pub mod parabolic;
