use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use lyapbound_cli::args::Cli;
use lyapbound_cli::commands::run;
use lyapbound_cli::exit::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(rendered) => {
            for w in &rendered.warnings {
                eprintln!("{w}");
            }
            let written = match &rendered.out {
                Some(path) => std::fs::write(path, &rendered.text)
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
                None => std::io::stdout()
                    .write_all(rendered.text.as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
            };
            if let Err(e) = written {
                eprintln!("{}", e.diagnostic());
                return ExitCode::from(e.code() as u8);
            }
            ExitCode::from(rendered.exit as u8)
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.code() as u8)
        }
    }
}
