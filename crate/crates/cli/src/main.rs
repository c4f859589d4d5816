use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use glnlab_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.common.out {
        Some(path) => File::create(path).map_err(CliError::from).and_then(|f| {
            let mut w = BufWriter::new(f);
            run(&cli, &mut w)?;
            w.flush()?;
            Ok(())
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(&cli, &mut lock).and_then(|_| lock.flush().map_err(CliError::from))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
