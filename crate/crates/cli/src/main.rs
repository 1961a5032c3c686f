use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use phigamma_cli::commands::{self, Flags};

#[derive(Parser)]
#[command(name = "phigamma", version, about = "Filtered (phi,N)-modules and their (phi,Gamma)-modules over the Robba ring")]
struct Cli {
    #[command(flatten)]
    flags: FlagArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FlagArgs {
    /// Residue characteristic; must match the input file when it fixes p.
    #[arg(long, global = true)]
    p: Option<u64>,
    /// p-adic precision budget for approximated constants.
    #[arg(long = "prec-p", global = true)]
    prec_p: Option<i64>,
    /// t-adic truncation order.
    #[arg(long = "t-prec", global = true)]
    t_prec: Option<i64>,
    /// Coefficient window for X, as KMIN:KMAX.
    #[arg(long = "x-window", global = true, value_name = "KMIN:KMAX", value_parser = parse_window)]
    x_window: Option<(i64, i64)>,
    /// Levels of the localization maps, as N0:N1.
    #[arg(long, global = true, value_name = "N0:N1", value_parser = parse_levels)]
    levels: Option<(u32, u32)>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a module, compare t_N and t_H, test admissibility and list slopes.
    Analyze { module: PathBuf },
    /// Harder-Narasimhan and Newton slopes with the filtration steps.
    Slopes { module: PathBuf },
    /// Glue the (phi,Gamma)-module, verify it and certify the determinant slope.
    Construct { module: PathBuf },
    /// Run the verification checks on the glued module.
    Verify { module: PathBuf },
    /// Glue, then read the filtered module back from the result.
    Recover { module: PathBuf },
    /// Growth order of a series.
    Ord { series: PathBuf },
    /// Image of a series under the localization map at one level.
    Iota {
        series: PathBuf,
        #[arg(long)]
        level: u32,
    },
    /// Decide whether a candidate element lies in the overconvergent module.
    Membership {
        candidate: PathBuf,
        /// Use the zero-order form of the criterion.
        #[arg(long = "zero-order")]
        zero_order: bool,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Only these criteria (repeatable); all by default.
        #[arg(long = "criterion", value_name = "ID")]
        criteria: Vec<u32>,
    },
}

fn split_pair(s: &str) -> Result<(&str, &str), String> {
    s.split_once(':').ok_or_else(|| format!("expected A:B, got '{s}'"))
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = split_pair(s)?;
    let a: i64 = a.trim().parse().map_err(|_| format!("bad KMIN '{a}'"))?;
    let b: i64 = b.trim().parse().map_err(|_| format!("bad KMAX '{b}'"))?;
    if a > b {
        return Err(format!("KMIN {a} exceeds KMAX {b}"));
    }
    Ok((a, b))
}

fn parse_levels(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = split_pair(s)?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad N0 '{a}'"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad N1 '{b}'"))?;
    if a < 1 || a > b {
        return Err(format!("need 1 <= N0 <= N1, got {a}:{b}"));
    }
    Ok((a, b))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let f = cli.flags;
    let flags = Flags {
        p: f.p,
        prec: f.prec_p,
        t_prec: f.t_prec,
        window: f.x_window,
        levels: f.levels,
    };
    let res = match cli.command {
        Command::Analyze { module } => commands::analyze(&flags, &module),
        Command::Slopes { module } => commands::slopes(&flags, &module),
        Command::Construct { module } => commands::construct(&flags, &module),
        Command::Verify { module } => commands::verify(&flags, &module),
        Command::Recover { module } => commands::recover(&flags, &module),
        Command::Ord { series } => commands::ord(&flags, &series),
        Command::Iota { series, level } => commands::iota(&flags, &series, level),
        Command::Membership { candidate, zero_order } => commands::membership(&flags, &candidate, zero_order),
        Command::Selftest { criteria } => commands::selftest(&flags, &criteria),
    };
    match res {
        Ok(report) => {
            if f.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("json values serialize"));
            } else {
                for l in &report.text {
                    println!("{l}");
                }
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            if f.json {
                println!("{}", serde_json::to_string_pretty(&e.to_json()).expect("json values serialize"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
