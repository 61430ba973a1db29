use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use holoherm_verify::{exit_code, write_reports, Format, Suite, SuiteConfig, VerificationReport};

#[derive(Parser)]
#[command(name = "verify", about = "Run the holoherm verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated values of s, overriding the config.
    #[arg(long, global = true, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    #[arg(long, global = true)]
    nmax: Option<usize>,
    #[arg(long, global = true)]
    nodes: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    RunAll,
    Orthonormal,
    Reproduce,
    Ellipse,
    Isomorphism,
    Kernels,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Json,
    Csv,
}

const EXIT_CONFIG: u8 = 2;

fn load_config(cli: &Cli) -> Result<SuiteConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => SuiteConfig::load(path).map_err(|e| e.to_string())?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = &cli.s {
        cfg.s_values = s.clone();
    }
    if let Some(n) = cli.nmax {
        cfg.n_max = n;
    }
    if let Some(n) = cli.nodes {
        cfg.nodes = n;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_path = out.clone();
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn print_summary(reports: &[VerificationReport]) {
    for r in reports {
        println!(
            "{:<12} {}  ({:.2} s)",
            r.suite,
            if r.pass { "PASS" } else { "FAIL" },
            r.wall_time.as_secs_f64()
        );
        for c in &r.checks {
            let value = match c.comparison {
                holoherm_verify::Comparison::Above => c.min_residual,
                _ => c.max_residual,
            };
            let value = value.map_or("-".to_string(), |v| format!("{v:.3e}"));
            let tol = c.tolerance.map_or("-".to_string(), |t| format!("{t:.0e}"));
            println!(
                "  {:<32} {:<4} {:>10} tol {:>6}  {}/{} cases failing",
                c.key,
                if c.pass { "ok" } else { "FAIL" },
                value,
                tol,
                c.failing_cases().len(),
                c.cases.len()
            );
            for e in &c.errors {
                println!("    error: {e}");
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("verify: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let started = Instant::now();
    let suites: Vec<Suite> = match cli.command {
        Command::RunAll => Suite::ALL.to_vec(),
        Command::Orthonormal => vec![Suite::Orthonormal],
        Command::Reproduce => vec![Suite::Reproduce],
        Command::Ellipse => vec![Suite::Ellipse],
        Command::Isomorphism => vec![Suite::Isomorphism],
        Command::Kernels => vec![Suite::Kernels],
    };
    let reports: Vec<VerificationReport> = suites.iter().map(|s| s.run(&cfg)).collect();
    print_summary(&reports);
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Csv => Format::Csv,
    };
    match write_reports(&reports, &cfg.output_path, format) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!(
                "verify: cannot write reports to {}: {e}",
                cfg.output_path.display()
            );
            return ExitCode::from(1);
        }
    }
    println!("total wall time {:.2} s", started.elapsed().as_secs_f64());
    ExitCode::from(exit_code(&reports) as u8)
}
