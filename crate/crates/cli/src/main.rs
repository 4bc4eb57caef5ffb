mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Report;
use config::RunConfig;
use error::CliError;

fn write_out(cfg: &RunConfig, contents: &str) -> Result<(), CliError> {
    if let Some(path) = &cfg.out {
        std::fs::write(path, contents).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn emit(cfg: &RunConfig, r: &Report) -> Result<i32, CliError> {
    print!("{}", r.render(cfg.format));
    write_out(cfg, &r.file_contents(cfg.format))?;
    Ok(r.code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Project {
            problem,
            form,
            check_dual,
            common,
        } => {
            let cfg = commands::resolve(Some(&problem), &common)?;
            emit(&cfg, &commands::project(&cfg, form, check_dual)?)
        }
        Command::Certify { problem, common } => {
            let cfg = commands::resolve(Some(&problem), &common)?;
            emit(&cfg, &commands::certify(&cfg)?)
        }
        Command::Psatz {
            problem,
            eps,
            dmax,
            mode,
            samples,
            common,
        } => {
            let mut cfg = commands::resolve(Some(&problem), &common)?;
            let mut extra = std::collections::BTreeMap::new();
            for (k, v) in [
                ("eps", eps.map(|v| v.to_string())),
                ("dmax", dmax.map(|v| v.to_string())),
                ("mode", mode),
                ("samples", samples.map(|v| v.to_string())),
            ] {
                if let Some(v) = v {
                    extra.insert(k.to_string(), v);
                }
            }
            cfg.apply(&extra)?;
            emit(&cfg, &commands::psatz(&cfg)?)
        }
        Command::MomentsCheck {
            moments,
            system,
            d,
            f,
            carleman,
            common,
        } => {
            let problem = args::ProblemArgs {
                system,
                ..Default::default()
            };
            let cfg = commands::resolve(Some(&problem), &common)?;
            emit(&cfg, &commands::moments_check(&cfg, &moments, d, f.as_deref(), carleman)?)
        }
        Command::ExportSdpa {
            problem,
            problem_kind,
            common,
        } => {
            let cfg = commands::resolve(Some(&problem), &common)?;
            let text = commands::export(&cfg, problem_kind)?;
            if cfg.out.is_some() {
                write_out(&cfg, &text)?;
            } else {
                print!("{text}");
            }
            Ok(error::EXIT_OK)
        }
        Command::ReproMotzkin { common } => {
            let cfg = commands::resolve(None, &common)?;
            emit(&cfg, &commands::repro_motzkin(&cfg)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_INPUT as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
