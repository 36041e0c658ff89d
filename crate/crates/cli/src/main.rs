//! `ckzeta`: sweeps, single computations and verification suites for the
//! coefficients `c_k = Σ_j (−1)^j C(k, j) / ζ(2j + 2)`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ckzeta::coefficients::Method;

const CSV_HELP: &str = "\
CSV columns (fixed order):
  ck, sweep   k,method,value,radius,error_bound,precision_bits,working_bits,n_cutoff,kernel
  invzeta     K,partial_sum_re,partial_sum_im,radius,term_tail_estimate,reference_re,reference_im,region
  mertens     x,M
  qk          k,value,radius,main_term,integral_term,truncation_n
  fit         k,log_k,log_abs_c,leverage,high_leverage
  limit       k,c_k,scaled
  verify      suite,passed,detail
  beta        lambda,k,integral,displayed,half,residual_displayed,residual_half,better
Lines starting with '#' carry run metadata.

Exit codes: 0 success, 1 usage error, 2 computation or integrity failure.";

#[derive(Parser, Debug, Serialize)]
#[command(name = "ckzeta", version, about, after_long_help = CSV_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct GlobalArgs {
    /// Target precision in bits.
    #[arg(long, short = 'p', global = true, default_value_t = 64)]
    pub precision: u32,
    /// Output format.
    #[arg(long, short = 'f', global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Coefficient cache (JSON lines). Defaults to
    /// $CKZETA_CACHE_DIR/coefficients.jsonl when that variable is set.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Ignore any configured cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Directory for the default cache file.
    #[arg(long, global = true, env = "CKZETA_CACHE_DIR", hide_env_values = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, short = 'j', global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Sieve segment length.
    #[arg(long, global = true, default_value_t = ckzeta::mobius::DEFAULT_SEGMENT)]
    pub segment_size: u64,
    /// JSON file overriding the numerical defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Binomial,
    Mobius,
    Mertens,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Binomial => Method::Binomial,
            MethodArg::Mobius => Method::Mobius,
            MethodArg::Mertens => Method::Mertens,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceArg {
    Binomial,
    Mobius,
    Hybrid,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// One coefficient c_k.
    Ck(CkArgs),
    /// c_k over a range of k, through the cache.
    Sweep(SweepArgs),
    /// Partial sum of 1/ζ(s) = Σ c_k P_k(s/2).
    Invzeta(InvzetaArgs),
    /// Mertens function values and growth.
    Mertens(MertensArgs),
    /// The majorant q_k and its main term.
    Qk(QkArgs),
    /// Log-log exponent fit of |c_k|.
    Fit(FitArgs),
    /// c_k·k^{3/4}·log²k for contiguous k ≥ 2.
    Limit(LimitArgs),
    /// Cross-method and identity suites.
    Verify(VerifyArgs),
    /// Quadrature check of ∫_0^1 x^λ (1 − x²)^k dx against both constants.
    Beta(BetaArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct CkArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub k: u64,
    #[arg(long, short = 'm', value_enum, default_value_t = MethodArg::Binomial)]
    pub method: MethodArg,
    /// Truncation N (Möbius / Mertens).
    #[arg(long, allow_negative_numbers = true)]
    pub n_cutoff: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k_min: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub k_max: u64,
    #[arg(long, short = 'm', value_enum, default_value_t = MethodArg::Binomial)]
    pub method: MethodArg,
    /// Truncation N (Möbius / Mertens).
    #[arg(long, allow_negative_numbers = true)]
    pub n_cutoff: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct InvzetaArgs {
    /// Real part of s.
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    /// Imaginary part of s.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Truncation order K.
    #[arg(long = "K", short = 'K', allow_negative_numbers = true)]
    pub k_max: u64,
    /// Where the coefficients come from.
    #[arg(long, value_enum, default_value_t = SourceArg::Hybrid)]
    pub source: SourceArg,
    /// Largest k taken from the binomial method under `hybrid`.
    #[arg(long, default_value_t = 1000)]
    pub binomial_max_k: u64,
    /// Möbius cutoff N for coefficients not taken from the binomial method.
    #[arg(long, default_value_t = 100_000)]
    pub n_cutoff: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct MertensArgs {
    /// Sieve M(x) for 1 ≤ x ≤ x_max.
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: u64,
    /// Extra points at which to report M(x).
    #[arg(long, value_delimiter = ',')]
    pub at: Vec<u64>,
    /// Grid spacing of the stored partial sums.
    #[arg(long, default_value_t = 1 << 16)]
    pub checkpoint_every: u64,
    /// Write the table to this checkpoint file.
    #[arg(long)]
    pub save: Option<PathBuf>,
    /// Read the table from this checkpoint file instead of sieving.
    #[arg(long)]
    pub load: Option<PathBuf>,
    /// Lower end of the |M(x)|/√x scan.
    #[arg(long, default_value_t = 2)]
    pub growth_min: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct QkArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub k: u64,
    /// Truncation N; the tail adds at most 1/N.
    #[arg(long, default_value_t = 1_000_000, allow_negative_numbers = true)]
    pub n_cutoff: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct FitArgs {
    #[arg(long, default_value_t = 100)]
    pub k_min: u64,
    #[arg(long, default_value_t = 1000)]
    pub k_max: u64,
    #[arg(long, short = 'm', value_enum, default_value_t = MethodArg::Binomial)]
    pub method: MethodArg,
    /// Truncation N (Möbius / Mertens).
    #[arg(long)]
    pub n_cutoff: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    #[arg(long, default_value_t = 1000)]
    pub k_max: u64,
    #[arg(long, short = 'm', value_enum, default_value_t = MethodArg::Binomial)]
    pub method: MethodArg,
    /// Truncation N (Möbius / Mertens).
    #[arg(long)]
    pub n_cutoff: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Smaller parameters (seconds instead of minutes).
    #[arg(long)]
    pub quick: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BetaArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: u64,
    /// Gauss–Legendre order per panel.
    #[arg(long, default_value_t = 20)]
    pub order: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(if report.failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("ckzeta {}: {e}", commands::name(&cli.command));
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
