//! Library entry of the `conevol` command-line tool.
//!
//! Exit codes: `0` success, `1` a negative mathematical verdict (SCC
//! violated, volume bound failed, a solved pentagon failing its
//! diagnostics), `2` usage, I/O, input or numerical errors.

mod args;
mod commands;
pub mod emit;
pub mod range;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Parses `argv` (program name first), runs the command and writes its
/// output to `out` and diagnostics to `err`.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let result = commands::run(&cli).and_then(|e| {
        emit::write(out, &e, cli.format)?;
        Ok(e.ok)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NEGATIVE,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
