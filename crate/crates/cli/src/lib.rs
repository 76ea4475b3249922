//! Command-line front end for `oddzeta-core`.
//!
//! Exit codes: 0 on success or a passing verification, 1 when a verification
//! fails, 2 for usage and domain errors (always a one-line diagnostic on
//! stderr).

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use oddzeta_core::exact::{bernoulli, euler_zeta_coefficient};
use oddzeta_core::identities::{
    fast_odd_zeta, telescope_check_with, verify_convolution_recursion_with,
    verify_coth_variant_with, verify_lerch_with, verify_ramanujan_with, QuasiZetaSequences,
};
use oddzeta_core::realseries::{lambert_sum, pi, zeta_integer};
use oddzeta_core::{
    BernoulliCache, IdentityParams, IdentityReport, NegativeControl, Rational, Real,
};

pub mod args;
mod grid;
mod render;

pub use args::{Cli, Command, Format};
pub use grid::{report_grid, GridReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_CONVOLUTION_TRUNCATION: u64 = 4000;
pub const DEFAULT_TELESCOPE_TRUNCATION: u64 = 3000;

/// A failure that ends the run with [`EXIT_USAGE`].
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::error::Error> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Parse `args` (including the program name) and execute. Normal output goes
/// to `out` unless `--out` names a file; diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .next()
                .unwrap_or("error: invalid arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, UsageError> {
    match command {
        Command::Bernoulli { n } => {
            writeln!(out, "{}", bernoulli(n, BernoulliCache::global()))?;
            Ok(EXIT_PASS)
        }
        Command::Zeta { s, prec } => {
            let z = zeta_integer(s, prec.bits)?;
            writeln!(out, "{z}")?;
            if s % 2 == 0 {
                let c = euler_zeta_coefficient((s / 2) as u32)?;
                writeln!(out, "= {c} * pi^{s}")?;
            }
            Ok(EXIT_PASS)
        }
        Command::Lambert { s, t, prec } => {
            if t <= 0 {
                return Err(UsageError("t must be positive".into()));
            }
            let a = pi(prec.bits + 64)?.into_float() * &t;
            let (v, _) = lambert_sum(s, &Real::new(&a, prec.bits + 64)?, prec.bits)?;
            writeln!(out, "{v}")?;
            Ok(EXIT_PASS)
        }
        Command::FastZeta { m, prec } => {
            let (v, trunc) = fast_odd_zeta(m, prec.bits)?;
            writeln!(out, "{v}")?;
            writeln!(err, "terms: {}", trunc.terms)?;
            Ok(EXIT_PASS)
        }
        Command::Verify(v) => {
            let control = v.output.negative_control.map(NegativeControl::from);
            let report = verify_one(&v, control)?;
            let body = match v.output.format {
                Format::Json => render::json(&report)?,
                Format::Text => render::text(&report),
            };
            emit(&body, v.output.out.as_deref(), out)?;
            Ok(outcome(&report, err))
        }
        Command::Report(r) => {
            let t_list = args::parse_rational_list(&r.t_list).map_err(UsageError)?;
            let control = r.output.negative_control.map(NegativeControl::from);
            let grid = report_grid(r.m_max, &t_list, r.prec.bits, control)?;
            let body = match r.output.format {
                Format::Json => render::json(&grid)?,
                Format::Text => render::grid_text(&grid),
            };
            emit(&body, r.output.out.as_deref(), out)?;
            Ok(if grid.all_pass { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

fn verify_one(
    v: &args::VerifyArgs,
    control: Option<NegativeControl>,
) -> Result<IdentityReport, UsageError> {
    use args::IdentityArg::*;
    let prec = v.prec.bits;
    let t = || v.t.clone().unwrap_or_else(|| Rational::from(1));
    let no_t = |name: &str| match &v.t {
        Some(_) => Err(UsageError(format!("--t is not used by {name}"))),
        None => Ok(()),
    };
    let no_truncation = |name: &str| match v.n_trunc {
        Some(_) => Err(UsageError(format!("--n-trunc is not used by {name}"))),
        None => Ok(()),
    };
    Ok(match v.identity {
        Ramanujan => {
            no_truncation("ramanujan")?;
            verify_ramanujan_with(&IdentityParams::new(v.m, t(), prec)?, control)?
        }
        Coth => {
            no_truncation("coth")?;
            verify_coth_variant_with(&IdentityParams::new(v.m, t(), prec)?, control)?
        }
        Lerch => {
            no_t("lerch")?;
            no_truncation("lerch")?;
            verify_lerch_with(v.m, prec, control)?
        }
        Convolution => {
            no_t("convolution")?;
            let n = v.n_trunc.unwrap_or(DEFAULT_CONVOLUTION_TRUNCATION);
            verify_convolution_recursion_with(v.m, n, prec, control)?
        }
        Telescope => {
            let t = t();
            if t <= 0 {
                return Err(UsageError("t must be positive".into()));
            }
            let q = QuasiZetaSequences::alpha_pi(t, v.m)?;
            let k = v.n_trunc.unwrap_or(DEFAULT_TELESCOPE_TRUNCATION);
            telescope_check_with(&q, k, prec, control)?
        }
    })
}

fn outcome(report: &IdentityReport, err: &mut dyn Write) -> i32 {
    for c in report.internal_checks.iter().filter(|c| !c.holds) {
        let _ = writeln!(err, "internal check failed: {}", c.name);
    }
    if report.pass && report.internal_checks_hold() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn emit(body: &str, path: Option<&std::path::Path>, out: &mut dyn Write) -> Result<(), UsageError> {
    match path {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", p.display()))),
        None => Ok(out.write_all(body.as_bytes())?),
    }
}
