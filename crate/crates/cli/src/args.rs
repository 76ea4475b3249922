use clap::{Args, Parser, Subcommand, ValueEnum};
use oddzeta_core::{NegativeControl, Rational};

pub const MIN_PREC: u32 = 64;
pub const MAX_PREC: u32 = 8192;

#[derive(Debug, Parser)]
#[command(
    name = "oddzeta",
    version,
    about = "Exact Bernoulli data, multiprecision zeta values and numerical checks of Ramanujan's odd-zeta formula"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Bernoulli number B_n as an exact fraction.
    Bernoulli { n: usize },
    /// Evaluate zeta(s) for an integer s >= 2.
    Zeta {
        s: i64,
        #[command(flatten)]
        prec: PrecArg,
    },
    /// Evaluate sum n^-s / (e^(2 pi t n) - 1).
    Lambert {
        s: i64,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        t: Rational,
        #[command(flatten)]
        prec: PrecArg,
    },
    /// Evaluate zeta(4m+3) through the coth series at pi.
    FastZeta {
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        prec: PrecArg,
    },
    /// Verify one identity instance.
    Verify(VerifyArgs),
    /// Verify the exponential and coth forms over a grid of (m, t), plus the
    /// Lerch rows that fit under m-max.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct PrecArg {
    /// Precision in bits.
    #[arg(long = "prec", default_value_t = 256, value_parser = clap::value_parser!(u32).range(MIN_PREC as i64..=MAX_PREC as i64))]
    pub bits: u32,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<std::path::PathBuf>,
    /// Corrupt the computation on purpose; the check is expected to fail.
    #[arg(long, value_enum)]
    pub negative_control: Option<Control>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub identity: IdentityArg,
    /// Order m; for telescope, the depth n.
    #[arg(long)]
    pub m: u32,
    /// alpha = pi t, beta = pi / t. Not accepted by lerch or convolution.
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    pub t: Option<Rational>,
    #[command(flatten)]
    pub prec: PrecArg,
    /// Truncation of the double sums (convolution, telescope).
    #[arg(long)]
    pub n_trunc: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub m_max: u32,
    /// Comma-separated list such as 1,2,3/2.
    #[arg(long, allow_hyphen_values = true)]
    pub t_list: String,
    #[command(flatten)]
    pub prec: PrecArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    Ramanujan,
    Coth,
    Lerch,
    Convolution,
    Telescope,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Control {
    FlipSign,
    BreakConstraint,
}

impl From<Control> for NegativeControl {
    fn from(c: Control) -> Self {
        match c {
            Control::FlipSign => NegativeControl::FlipCoefficientSign,
            Control::BreakConstraint => NegativeControl::BreakConstraint,
        }
    }
}

/// Accepts `p/q` or `p` with decimal integers. Decimal fractions are refused
/// so that `alpha * beta = pi^2` stays exact.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p, Some(q)),
        None => (s, None),
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    let num_ok = digits(num.strip_prefix('-').unwrap_or(num));
    if !num_ok || !den.is_none_or(digits) {
        return Err(format!(
            "expected a rational p/q or an integer p, got '{s}'"
        ));
    }
    if den.is_some_and(|q| q.bytes().all(|b| b == b'0')) {
        return Err("denominator must be nonzero".into());
    }
    Rational::parse(s)
        .map(Rational::from)
        .map_err(|e| format!("invalid rational '{s}': {e}"))
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, String> {
    if s.trim().is_empty() {
        return Err("t-list must not be empty".into());
    }
    s.split(',').map(|x| parse_rational(x.trim())).collect()
}
