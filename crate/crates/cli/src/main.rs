mod commands;
mod rule;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use padic_ds::number_theory::DEFAULT_PRIME_CAP;

#[derive(Parser, Debug)]
#[command(name = "padic-ds", version, about = "Exact finite-stage measures of p-adic Duffin-Schaeffer sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the support table of an approximation function.
    Construct(ConstructArgs),
    /// Measure the stage union of a family over a range of n.
    Measure(MeasureArgs),
    /// Run verification checks and report verdicts as JSON.
    Verify(VerifyArgs),
    /// Test whether x lies in the measure spectrum of C or B.
    Spectrum(SpectrumArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RuleName {
    Zero,
    Theorem1,
    Theorem2,
    RealPrime,
}

/// The prime `p`, or `inf` for the real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Place {
    Prime(u64),
    Infinite,
}

fn parse_place(s: &str) -> Result<Place, String> {
    if matches!(s, "inf" | "infinity" | "oo") {
        return Ok(Place::Infinite);
    }
    let p: u64 = s.parse().map_err(|_| format!("{s:?} is neither a prime nor \"inf\""))?;
    if !padic_ds::number_theory::is_prime(p) {
        return Err(format!("{p} is not prime"));
    }
    Ok(Place::Prime(p))
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("range {s:?} is not of the form N:T"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("range {s} is empty"));
    }
    Ok((lo, hi))
}

#[derive(Args, Debug, Clone)]
struct RuleArgs {
    /// Prime p, or `inf`.
    #[arg(long, default_value = "2", value_parser = parse_place)]
    p: Place,
    #[arg(long, value_enum, default_value = "zero")]
    rule: RuleName,
    /// Digits x_0 x_1 ... for theorem1, e.g. `101`.
    #[arg(long)]
    digits: Option<String>,
    /// Target x as `num/den` for theorem2 and real-prime.
    #[arg(long)]
    x: Option<String>,
    /// Depth at which the theorem2 schedules are cut.
    #[arg(long, default_value_t = 6)]
    depth: u32,
    /// Bound for prime searches.
    #[arg(long, env = "PADIC_DS_CAP", default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    /// Replace psi by p psi wherever psi(n)/n is a power of p.
    #[arg(long)]
    primed: bool,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Largest n in the table.
    #[arg(long, default_value_t = 100)]
    cap: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// One of a, c, b, fa, fk.
    #[arg(long, default_value = "c")]
    family: padic_ds::ds_sets::FamilyTag,
    /// Stage range `N:T`.
    #[arg(long, default_value = "1:100", value_parser = parse_range)]
    range: (u64, u64),
    /// Largest shell index in the decomposition.
    #[arg(long, default_value_t = 4)]
    k_max: u32,
    /// Include the union's residue classes.
    #[arg(long)]
    classes: bool,
    /// Add labeled decimal approximations.
    #[arg(long)]
    approx: bool,
    /// Worker threads; never changes the numbers.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// A check name or `all`.
    #[arg(long, default_value = "all")]
    check: String,
    #[arg(long, value_parser = parse_place)]
    p: Option<Place>,
    #[arg(long)]
    n: Option<u64>,
    /// psi(n) as `num/den`.
    #[arg(long)]
    psi: Option<String>,
    /// Upper end of the exhaustive range of the selected check.
    #[arg(long)]
    max_n: Option<u64>,
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long, env = "PADIC_DS_CAP", default_value_t = DEFAULT_PRIME_CAP)]
    prime_cap: u64,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long, value_parser = parse_place)]
    p: Place,
    /// Either c or b.
    #[arg(long, default_value = "c")]
    family: padic_ds::ds_sets::FamilyTag,
    /// Test membership of x.
    #[arg(long, conflicts_with = "digits")]
    x: Option<String>,
    /// Evaluate the spectrum value of these binary digits instead.
    #[arg(long)]
    digits: Option<String>,
    #[arg(long)]
    approx: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(args) => commands::construct(args),
        Command::Measure(args) => commands::measure(args),
        Command::Verify(args) => commands::verify(args),
        Command::Spectrum(args) => commands::spectrum(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
