//! Grid files, test functions, convergence studies and the command line.

pub mod cli;
pub mod experiment;
pub mod field_io;
pub mod registry;

pub use experiment::{run_experiment, ExperimentSpec, OrderReport};
pub use field_io::{read_field, write_field};
pub use registry::TestFunction;
