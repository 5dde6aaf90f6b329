use std::io::Write;

use crate::error::Result;

use super::SimulationRecord;

pub const RESULT_HEADER: &str = "t,G,T_a,T_w,T_bs,T_c,Q_u,eta_i";
pub const RESULT_HEADER_ELECTRICAL: &str = "t,G,T_a,T_w,T_bs,T_c,Q_u,eta_i,eta_e,P_mp,V_mp,I_mp";

/// Plain decimal with `digits` significant digits, trailing zeros trimmed;
/// scientific notation outside `[1e-5, 1e15)`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    // round first so the exponent reflects carries (9.999995 → 10.0000)
    let rounded: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    let exponent = rounded.abs().log10().floor() as i32;
    if !(-5..15).contains(&exponent) {
        return format!("{:.*e}", digits - 1, rounded);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| format_significant(v, 6)).unwrap_or_default()
}

/// Writes the result table. Electrical columns appear when any record
/// carries an electrical state.
pub fn write_records_csv(records: &[SimulationRecord], mut out: impl Write) -> Result<()> {
    let electrical = records.iter().any(|r| r.electrical.is_some());
    writeln!(
        out,
        "{}",
        if electrical { RESULT_HEADER_ELECTRICAL } else { RESULT_HEADER }
    )?;
    for r in records {
        let mut row: Vec<String> = [r.t, r.g, r.t_a, r.t_w, r.t_bs, r.t_c, r.q_u]
            .iter()
            .map(|v| format_significant(*v, 6))
            .collect();
        row.push(cell(r.eta_i));
        if electrical {
            let e = r.electrical;
            row.push(cell(e.and_then(|e| e.eta_e)));
            row.push(cell(e.map(|e| e.p_mp)));
            row.push(cell(e.map(|e| e.v_mp)));
            row.push(cell(e.map(|e| e.i_mp)));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
