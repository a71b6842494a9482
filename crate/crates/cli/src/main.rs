use std::process::ExitCode;

use clap::Parser;

use selfloc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.resolve_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    env_logger::Builder::new().filter_level(config.verbosity.filter()).format_timestamp(None).init();
    match run(cli.command, &config) {
        Ok(report) => {
            let dir = config.outputs.dir.display();
            println!("{} finished, a0 = {:?}; report in {dir}", report.provenance.subcommand, report.scalars.a0.value());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
