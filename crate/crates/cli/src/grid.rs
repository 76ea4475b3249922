use oddzeta_core::identities::{
    verify_coth_variant_with, verify_lerch_with, verify_ramanujan_with,
};
use oddzeta_core::{Error, IdentityParams, IdentityReport, NegativeControl, Rational};
use serde::Serialize;

/// Every report of a grid run, in grid order.
#[derive(Debug, Serialize)]
pub struct GridReport {
    pub m_max: u32,
    pub t_list: Vec<String>,
    pub prec_bits: u32,
    /// Every row passed and every internal check held.
    pub all_pass: bool,
    pub reports: Vec<IdentityReport>,
}

/// For each `m` in `1..=m_max` and each `t`, the exponential and coth forms;
/// then Lerch's case for every `m_L` with `4 m_L + 3 <= 2 m_max + 1`, i.e.
/// the exponents the grid already covers.
pub fn report_grid(
    m_max: u32,
    t_list: &[Rational],
    prec: u32,
    control: Option<NegativeControl>,
) -> Result<GridReport, Error> {
    if m_max == 0 {
        return Err(Error::TooSmall {
            name: "m-max",
            min: 1,
            value: 0,
        });
    }
    if t_list.is_empty() {
        return Err(Error::UnsupportedSequence(
            "t-list must not be empty".into(),
        ));
    }
    let mut reports = Vec::new();
    for m in 1..=m_max {
        for t in t_list {
            let p = IdentityParams::new(m, t.clone(), prec)?;
            reports.push(verify_ramanujan_with(&p, control)?);
            reports.push(verify_coth_variant_with(&p, control)?);
        }
    }
    for m in (0..).take_while(|m| 2 * m < m_max) {
        reports.push(verify_lerch_with(m, prec, control)?);
    }
    Ok(GridReport {
        m_max,
        t_list: t_list.iter().map(|t| t.to_string()).collect(),
        prec_bits: prec,
        all_pass: reports.iter().all(|r| r.pass && r.internal_checks_hold()),
        reports,
    })
}
