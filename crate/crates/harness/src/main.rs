use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kgnr_core::config::RunConfig;
use kgnr_core::Error;
use kgnr_harness::experiments::Registry;

#[derive(Parser)]
#[command(name = "kgnr", about = "Klein-Gordon to Schrodinger limit experiments")]
struct Cli {
    /// key = value config file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (overrides out_dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// worker threads for per-c runs
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// extra key=value overrides, applied after the config file
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// fields, densities and currents at c = 1, 3, 6
    Example1,
    /// Cauchy-problem sweep over c_list
    Sweep,
    /// retarded forced problem sweep
    Forced,
    /// natural-scale Cauchy problem
    Natural,
    /// classical paths of both branches
    Trajectory,
    /// operator order table
    Orders,
    /// spectral free-field comparison
    Free,
    /// Green's function cross-check
    Greens,
    /// Klein-Gordon solve only
    Kg,
    /// Schrodinger solve only
    Schrodinger,
    /// charge and current comparison
    Current,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::Example1 => "example1",
            Cmd::Sweep => "sweep",
            Cmd::Forced => "forced",
            Cmd::Natural => "natural",
            Cmd::Trajectory => "trajectory",
            Cmd::Orders => "orders",
            Cmd::Free => "free",
            Cmd::Greens => "greens",
            Cmd::Kg => "kg",
            Cmd::Schrodinger => "schrodinger",
            Cmd::Current => "current",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("could not set up {j} workers: {e}");
        }
    }
    let reg = Registry::builtin();
    let exp = reg.get(cli.cmd.name()).expect("every subcommand is registered");
    match exp.run(&cfg, &cfg.out_dir) {
        Ok(o) => {
            for l in &o.lines {
                println!("{l}");
            }
            for b in &o.bands {
                println!("{b}");
            }
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
