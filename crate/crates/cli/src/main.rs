use clap::Parser;
use crg_cli::{run, Artifact, Cli, CliError, RunConfig};
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

fn write_artifacts(out: Option<&Path>, artifacts: &[Artifact]) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in artifacts {
                std::fs::write(dir.join(&a.name), &a.bytes)?;
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for a in artifacts {
                stdout.write_all(&a.bytes)?;
            }
            stdout.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = crg_cli::threads_from_env().and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let config = RunConfig::from_cli(cli)?;
        let result = run(&config);
        Ok((config, result))
    });
    let (config, result) = match outcome {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("crglab: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let (artifacts, failure) = match result {
        Ok(a) => (a, None),
        Err(CliError::Audit { message, artifacts }) => (artifacts, Some(CliError::audit(message))),
        Err(e) => (Vec::new(), Some(e)),
    };
    if let Err(e) = write_artifacts(config.out.as_deref(), &artifacts) {
        eprintln!("crglab: writing output: {e}");
        return ExitCode::from(1);
    }
    match failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("crglab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
