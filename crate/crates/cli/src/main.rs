use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use pfqn_cli::commands::{run, Cli};
use pfqn_cli::{CliError, ErrorReport};

fn fail(report: ErrorReport) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&report).expect("serializable"));
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::Usage(e.render().to_string()).report()),
    };
    match run(&cli) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout(), "{}", out.render(cli.global.format));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.report()),
    }
}
