mod args;
mod commands;
mod config;
mod failure;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};
use xlex::textprep::LanguageResources;

use args::{Cli, Command};
use commands::Context;
use config::FileConfig;
use failure::{Failure, EXIT_USAGE};
use manifest::RunManifest;

fn version() -> &'static str {
    let v = format!("{} (lexicon format {})", env!("CARGO_PKG_VERSION"), xlex::LEXICON_FORMAT_VERSION);
    Box::leak(v.into_boxed_str())
}

fn parse() -> Result<Cli, clap::Error> {
    let matches = Cli::command().version(version()).try_get_matches()?;
    Cli::from_arg_matches(&matches)
}

fn main() -> ExitCode {
    let cli = match parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("xlex: error: {f}");
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let owned;
    let res = match cli.resources.as_ref().or(file.resources.as_ref()) {
        Some(dir) => {
            owned = LanguageResources::from_dir(dir)?;
            &owned
        }
        None => LanguageResources::bundled(),
    };
    let threads = cli.threads.or(file.threads);

    let name = match &cli.command {
        Command::Build(_) => "build",
        Command::MergeLm(_) => "merge-lm",
        Command::Classify(_) => "classify",
        Command::Evaluate(_) => "evaluate",
        Command::Grid(_) => "grid",
        Command::Bench(_) => "bench",
    };
    let mut manifest = RunManifest::start(name, version());
    if let Some(path) = &cli.config {
        manifest.input(path);
    }
    let mut cx = Context { res, file: &file, manifest: &mut manifest };
    xlex::par::with_threads(threads, || match &cli.command {
        Command::Build(a) => commands::build(a, &mut cx),
        Command::MergeLm(a) => commands::merge_lm(a, &mut cx),
        Command::Classify(a) => commands::classify(a, &mut cx),
        Command::Evaluate(a) => commands::evaluate_cmd(a, &mut cx),
        Command::Grid(a) => commands::grid(a, &mut cx),
        Command::Bench(a) => commands::bench(a, &mut cx),
    })??;

    if let Some(path) = &cli.manifest {
        manifest.finish(path)?;
    }
    Ok(())
}
