//! Command-line front end for the circle bin packing solvers: JSON file
//! formats, SVG drawings and the `cbpp` subcommands.
//!
//! Exit codes are stable: 0 success, 1 usage or parse error, 2 I/O error
//! on output, 3 infeasible solution.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod render;

pub use commands::{execute, Cli};
pub use error::{CliError, CliResult};

/// Parse `args`, run the command and return the process exit code. Errors
/// are reported on `err`, normal output on `out`.
pub fn run_with_args<I, T>(
    args: I,
    out: &mut dyn std::io::Write,
    err: &mut dyn std::io::Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { CliError::USAGE } else { CliError::OK };
        }
    };
    match execute(cli, out) {
        Ok(()) => CliError::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
