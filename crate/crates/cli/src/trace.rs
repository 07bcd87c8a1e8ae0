//! CSV traces: one row per nonzero amplitude per step.

use std::fmt::Write as _;

use coinwalk::{BasisLabel, Complex64, WalkState};
use serde::Serialize;

use crate::error::CliError;

pub const CSV_HEADER: &str = "step,position,coin1,coin2,re,im";

/// One amplitude of one traced state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub position: i64,
    pub coin1: usize,
    pub coin2: usize,
    pub re: f64,
    pub im: f64,
}

pub fn trace_rows(trace: &[WalkState]) -> Vec<TraceRow> {
    trace
        .iter()
        .enumerate()
        .flat_map(|(step, s)| {
            s.terms().map(move |(l, a)| TraceRow {
                step,
                position: l.position,
                coin1: l.coins[0],
                coin2: l.coins[1],
                re: a.re,
                im: a.im,
            })
        })
        .collect()
}

/// Header plus rows; amplitudes carry 17 significant digits so that parsing
/// them back is exact.
pub fn emit_csv(trace: &[WalkState]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in trace_rows(trace) {
        writeln!(out, "{},{},{},{},{:.16e},{:.16e}", r.step, r.position, r.coin1, r.coin2, r.re, r.im)
            .expect("writing to a String cannot fail");
    }
    out
}

/// Inverse of [`emit_csv`]: the terms of each step, in file order.
pub fn parse_csv(text: &str) -> Result<Vec<Vec<(BasisLabel, Complex64)>>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(CliError::Config(format!("bad trace header {other:?}"))),
    }
    let mut steps: Vec<Vec<(BasisLabel, Complex64)>> = Vec::new();
    for (no, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let bad = || CliError::Config(format!("bad trace row {}: {line:?}", no + 2));
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad());
        }
        let step: usize = fields[0].parse().map_err(|_| bad())?;
        let position: i64 = fields[1].parse().map_err(|_| bad())?;
        let c1: usize = fields[2].parse().map_err(|_| bad())?;
        let c2: usize = fields[3].parse().map_err(|_| bad())?;
        let re: f64 = fields[4].parse().map_err(|_| bad())?;
        let im: f64 = fields[5].parse().map_err(|_| bad())?;
        if step + 1 < steps.len() {
            return Err(bad());
        }
        steps.resize_with(step + 1, Vec::new);
        steps[step].push((BasisLabel::new(position, vec![c1, c2]), Complex64::new(re, im)));
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use coinwalk::{plan_line, run_transfer};

    #[test]
    fn header_only_for_empty_trace() {
        assert_eq!(emit_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn round_trip_is_exact() {
        let payload = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let report = run_transfer(&plan_line(3).unwrap(), &payload).unwrap();
        let parsed = parse_csv(&emit_csv(&report.trace)).unwrap();
        assert_eq!(parsed.len(), report.trace.len());
        for (terms, state) in parsed.iter().zip(&report.trace) {
            let want: Vec<_> = state.terms().map(|(l, a)| (l.clone(), *a)).collect();
            assert_eq!(terms, &want);
        }
    }
}
