//! The `lcsamp` command-line tool: JSON run configs, command dispatch and
//! self-describing reports.

mod config;
mod run;

pub use config::{
    parse_config, CliArgs, Command, CovSettings, ModeName, RunConfig, DEFAULT_BOUND_CASES, DEFAULT_FINAL_SAMPLES,
};
pub use run::{
    execute, exit_code_for, run_command, samples_csv, target_spec, RunOutput, EXIT_FAILURE, EXIT_OK, EXIT_USAGE,
    REPORT_SCHEMA,
};

use clap::Parser;

/// Entry point shared by the binary: parses `args`, runs, and returns the
/// process exit code. Errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match CliArgs::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match parse_config(&cli).and_then(|cfg| run_command(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lcsamp: {e}");
            exit_code_for(&e)
        }
    }
}
