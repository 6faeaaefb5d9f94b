//! Numerical laboratory for nodal counts and magnetic spectra of discrete and
//! metric graphs.
//!
//! The crate is organized as a stack: [`graph`] supplies the combinatorial
//! substrate (validation, cycle bases, girth, subdivision); [`discrete`] builds
//! flux-dependent Laplacians and nodal counts; [`magnetic`] differentiates
//! eigenvalues with respect to fluxes and compares nodal surpluses with Morse
//! indices; [`metric`] handles quantum graphs through a real secular function;
//! [`torus`] lifts the secular function to the Barra–Gaspard torus; and
//! [`discretize`] bridges metric and discrete spectra via the arccos branch
//! map. [`cli`] exposes everything as subcommands over JSON/CSV files.

pub mod cli;
pub mod discrete;
pub mod discretize;
pub mod ensemble;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod magnetic;
pub mod metric;
pub mod torus;
