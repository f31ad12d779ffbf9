//! Front end for the `nptspace` binary: the matrix file format, the
//! verification report, the bundled fixture and the subcommands.

pub mod commands;
pub mod fixture;
pub mod format;
pub mod report;

pub use commands::{run, Cli, CliError};
pub use format::MatrixFile;
pub use report::{verify_matrix, VerificationReport, VerifyTolerances};
