use clap::Parser;
use rdladder_cli::args::Cli;
use rdladder_cli::error::exit;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { exit::INPUT } else { exit::SUCCESS });
        }
    };
    let result = std::panic::catch_unwind(|| rdladder_cli::run(cli, &mut std::io::stdout().lock()));
    let code = match result {
        Ok(r) => rdladder_cli::exit_code(r),
        Err(_) => exit::INTERNAL,
    };
    std::process::exit(code);
}
