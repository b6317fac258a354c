use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infoclone::fock_oracle::{DEFAULT_DIMENSION_BUDGET, DEFAULT_LEVELS};
use infoclone::measurement::DEFAULT_BINS;
use infoclone::Complex64;

#[derive(Debug, Parser)]
#[command(
    name = "infoclone",
    version,
    about = "Information cloning of coherent states: transfer matrices, Fock-space checks and fidelity statistics"
)]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the primary output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Directory for outputs when --output is not given.
    #[arg(long, env = "INFOCLONE_OUTPUT_DIR", global = true)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a transfer matrix and report its unitarity deviation.
    Transfer(NetworkArgs),
    /// Information-clone a coherent state into N copies.
    Clone(CloneArgs),
    /// Check the coherent-state prediction against truncated Fock-space evolution.
    FockVerify(FockArgs),
    /// Monte Carlo measurement fidelity with information cloning.
    McInfo(McArgs),
    /// Monte Carlo measurement fidelity with the Gaussian cloner.
    McGauss(McGaussArgs),
    /// Sample a fidelity density on a uniform grid over [0, 1].
    Pdf(PdfArgs),
    /// Mean-fidelity comparison of the two schemes.
    Table(TableArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Coupling strengths r_1..r_N.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        conflicts_with = "copies"
    )]
    pub r: Vec<f64>,

    /// Coupling phases, one per strength (default all zero).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, requires = "r")]
    pub delta: Vec<f64>,

    /// Interaction time; defaults to the cloning time 3π/(2r).
    #[arg(long, allow_negative_numbers = true)]
    pub time: Option<f64>,

    /// Symmetric network with N unit couplings.
    #[arg(long)]
    pub copies: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CloneArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,

    #[arg(long)]
    pub copies: usize,
}

#[derive(Debug, Args)]
pub struct FockArgs {
    #[command(flatten)]
    pub network: NetworkArgs,

    /// Source-mode amplitude.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    pub alpha: Complex64,

    /// Amplitude of every target mode.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    pub beta: Complex64,

    /// Fock levels kept per mode.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    pub truncation: usize,

    /// Largest total Fock dimension allowed.
    #[arg(long, default_value_t = DEFAULT_DIMENSION_BUDGET)]
    pub budget: usize,

    /// Write the evolved state amplitudes as CSV.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// M, copies of the unknown state.
    #[arg(long, default_value_t = 1)]
    pub sources: usize,

    /// N, clones per source copy.
    #[arg(long)]
    pub copies: usize,

    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1)]
    pub workers: usize,

    /// True coherent amplitude.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1,0")]
    pub alpha: Complex64,

    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,

    /// Also write the JSON summary here.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McGaussArgs {
    #[command(flatten)]
    pub run: McArgs,

    #[arg(long, value_enum, default_value_t = NoiseArg::Printed)]
    pub noise: NoiseArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    /// Per-copy quadrature variance (A+2)/A.
    Printed,
    /// Per-copy quadrature variance (A+2)/(2A).
    Mixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Info,
    Gauss,
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeArg,

    #[arg(long, default_value_t = 1)]
    pub sources: usize,

    /// Required for the Gaussian scheme.
    #[arg(long)]
    pub copies: Option<usize>,

    /// Grid points including both endpoints.
    #[arg(long, default_value_t = 10_001)]
    pub points: usize,

    #[arg(long, value_enum, default_value_t = NoiseArg::Printed)]
    pub noise: NoiseArg,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Cases as M:N pairs, e.g. 1:2,2:4.
    #[arg(long, value_delimiter = ',', value_parser = parse_case)]
    pub cases: Vec<(usize, usize)>,
}

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let part = |p: &str| {
        p.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("not a finite number: {p:?}"))
    };
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn parse_case(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(':').ok_or_else(|| format!("expected M:N, got {s:?}"))?;
    let count = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    Ok((count(m)?, count(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("2,1").unwrap(), Complex64::new(2.0, 1.0));
        assert_eq!(parse_complex("-0.5, 3e-1").unwrap(), Complex64::new(-0.5, 0.3));
        assert!(parse_complex("2").is_err());
        assert!(parse_complex("nan,0").is_err());
    }

    #[test]
    fn case_flags() {
        assert_eq!(parse_case("2:4").unwrap(), (2, 4));
        assert!(parse_case("2-4").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
