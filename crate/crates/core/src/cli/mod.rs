//! Instance files, command dispatch and report emission behind the `lipext` binary.

pub mod instance;
pub mod report;
pub mod run;

pub use instance::{instance_text, load_instance, parse_instance, Instance, LoadError};
pub use report::{render, Format, Report};
pub use run::{exit, run_instance, run_path, usage, Command, Options, Outcome};
