use std::fmt::Write;

use oddzeta_core::IdentityReport;
use serde::Serialize;

use crate::grid::GridReport;

pub fn json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

// Numbers are printed with the same shortest round-trip formatting as the
// JSON output so the two modes carry identical content.
pub fn text(r: &IdentityReport) -> String {
    let mut s = String::new();
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        s,
        "{} m={} t={} prec={}: {verdict}",
        r.identity, r.m, r.t, r.prec_bits
    );
    let _ = writeln!(s, "  lhs            = {}", r.lhs);
    let _ = writeln!(s, "  rhs            = {}", r.rhs);
    let _ = writeln!(s, "  abs_diff_log2  = {}", r.abs_diff_log2);
    let _ = writeln!(s, "  tolerance_log2 = {}", r.tolerance_log2);
    for t in &r.truncations {
        let _ = writeln!(
            s,
            "  truncation     = {} terms, tail_log2 {}",
            t.terms, t.tail_bound_log2
        );
    }
    s
}

pub fn grid_text(g: &GridReport) -> String {
    let mut s = String::new();
    for r in &g.reports {
        s.push_str(&text(r));
    }
    let _ = writeln!(s, "all_pass = {}", g.all_pass);
    s
}
