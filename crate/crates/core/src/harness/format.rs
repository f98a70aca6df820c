use std::fmt::Write as _;
use std::path::Path;

use super::experiment::SweepRow;
use super::slope::SlopeFit;
use crate::error::{Error, Result};

const CSV_HEADER: &str =
    "policy,k,T,replications,seed,nash_regret,nash_regret_se,avg_regret,nr0,nr1,welfare_is_zero";

pub fn csv_header() -> &'static str {
    CSV_HEADER
}

/// C-style `%.17g`: 17 significant digits, trailing zeros dropped,
/// scientific notation when the exponent is below -4 or at least 17.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_owned());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

pub fn csv_row(row: &SweepRow) -> String {
    let r = &row.report;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        row.policy,
        row.k,
        row.horizon,
        row.replications,
        row.seed,
        format_g17(r.nash_regret),
        format_g17(r.nash_regret_se),
        format_g17(r.average_regret),
        format_g17(r.nr0),
        format_g17(r.nr1),
        r.welfare_is_zero
    )
}

/// Results table with LF line endings.
pub fn results_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    out
}

pub fn slopes_csv(fits: &[SlopeFit]) -> String {
    let mut out = String::from("policy,slope,half_width_95,points_used\n");
    for f in fits {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            f.policy,
            format_g17(f.slope),
            format_g17(f.half_width),
            f.points_used
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
