//! Command-line front end: κ-expression parsing, sample files and plots.

pub mod config;
pub mod expr;
pub mod io;
pub mod plot;
pub mod run;
