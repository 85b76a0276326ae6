//! Command-line tool and HTTP service over the `rdladder` models.

pub mod args;
pub mod commands;
pub mod error;
pub mod server;
pub mod verify;
pub mod wire;

use std::io::Write;

use rdladder::Advisor;

use crate::args::{Cli, Command};
use crate::error::{exit, CliError, CliResult};

/// Runs a parsed command, writing its output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    let text = match cli.command {
        Command::Train(a) => commands::cmd_train(&a.input, &a.out, a.k, a.seed, &a.grid, a.format)?,
        Command::VerifyPaper(a) => {
            let (text, report) = commands::cmd_verify_paper(a.format)?;
            write_out(out, &text)?;
            return if report.passed() { Ok(()) } else { Err(CliError::Verification(report.failures())) };
        }
        Command::Recommend(a) => commands::cmd_recommend(
            &a.source,
            &a.input,
            a.target_bitrate,
            a.modes,
            a.decision.config(),
            a.format,
        )?,
        Command::Plotdata(a) => commands::cmd_plotdata(&a.source, &a.cluster, a.decision.config(), a.format)?,
        Command::Serve(a) => {
            let advisor = Advisor::new(commands::load_source(&a.source)?, a.decision.config())?;
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| CliError::Internal(format!("starting runtime: {e}")))?;
            return runtime
                .block_on(server::serve(advisor, a.bind, |addr| {
                    eprintln!("listening on http://{addr}{}", server::ROUTE);
                }))
                .map_err(|e| CliError::Input(format!("serving on {}: {e}", a.bind)));
        }
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Internal(format!("writing output: {e}")))
}

/// Maps a result to the process exit status, reporting errors on stderr.
pub fn exit_code(result: CliResult<()>) -> i32 {
    match result {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
