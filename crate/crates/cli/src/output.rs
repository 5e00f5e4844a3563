//! CSV tables.
//!
//! Numbers use Rust's shortest round-trip formatting, with an exponent for very
//! large or small magnitudes. It is locale-free and identical on every run.
//! A non-finite value aborts the write.

use std::collections::BTreeMap;
use std::io::Write;

use irscoop::rates::theorem2_oob_gain_high_snr;
use irscoop::sim::checks::CheckResult;
use irscoop::{Campaign, EventLabel, RateReport, SweepAxis, SweepPoint, SystemConfig};

use crate::RunError;

/// Header label of a sweep axis, with its unit.
pub fn axis_label(axis: Option<SweepAxis>) -> &'static str {
    match axis {
        None => "point[index]",
        Some(SweepAxis::N) => "N[elements]",
        Some(SweepAxis::N2) => "N2[elements]",
        Some(SweepAxis::Snr) => "tx_snr[dB]",
        Some(SweepAxis::Zeta) => "zeta[1]",
        Some(SweepAxis::Weights) => "w_k[1]",
        Some(SweepAxis::M) => "M[operators]",
        Some(SweepAxis::L) => "L[paths]",
    }
}

/// Events an operator can see with `m` operators.
pub fn event_support(m: usize) -> Vec<EventLabel> {
    if m == 2 {
        vec![EventLabel::A, EventLabel::B, EventLabel::C, EventLabel::D]
    } else {
        (0..m).map(EventLabel::Multi).collect()
    }
}

/// One row of a result table: column name to value, in header order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub cells: Vec<(String, f64)>,
}

impl Row {
    fn put(&mut self, name: impl Into<String>, v: f64) {
        self.cells.push((name.into(), v));
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.cells.iter().find(|(n, _)| n == name).map(|c| c.1)
    }
}

/// Row for one campaign; `value` goes in the axis column as written.
pub fn report_row(axis: Option<SweepAxis>, value: f64, cfg: &SystemConfig, r: &RateReport) -> Result<Row, RunError> {
    let mut row = Row::default();
    row.put(axis_label(axis), value);
    let m = cfg.num_operators;
    for op in 0..m {
        row.put(format!("se_op{op}[bits/s/Hz]"), r.per_operator_se[op]);
        row.put(format!("se_stderr_op{op}[bits/s/Hz]"), r.per_operator_se_stderr[op]);
        row.put(format!("no_oob_se_op{op}[bits/s/Hz]"), r.per_operator_no_oob_se[op]);
        row.put(format!("jensen_se_op{op}[bits/s/Hz]"), r.per_operator_jensen_se[op]);
        row.put(format!("analytic_se_op{op}[bits/s/Hz]"), r.analytic_se[op]);
        row.put(format!("analytic_no_oob_se_op{op}[bits/s/Hz]"), r.analytic_no_oob_se[op]);
        row.put(
            format!("delta_oob_sim_op{op}[bits/s/Hz]"),
            r.per_operator_se[op] - r.per_operator_no_oob_se[op],
        );
        row.put(
            format!("delta_oob_analytic_op{op}[bits/s/Hz]"),
            r.analytic_se[op] - r.analytic_no_oob_se[op],
        );
        row.put(format!("rel_error_op{op}[1]"), r.rel_error[op]);
    }
    for op in 0..m {
        let freq = r.event_frequencies(op);
        for e in event_support(m) {
            row.put(format!("freq_op{op}_{}[1]", e.name()), freq.get(&e).copied().unwrap_or(0.0));
        }
    }
    row.put("sum_se[bits/s/Hz]", r.per_operator_se.iter().sum());
    if m == 2 && cfg.snr > 0.0 {
        let sides = Campaign::new(cfg.clone())?.side_budgets()?;
        for (op, s) in sides.iter().enumerate() {
            row.put(
                format!("oob_gain_high_snr_op{op}[bits/s/Hz]"),
                theorem2_oob_gain_high_snr(s, cfg.scheme.cooperates())?,
            );
        }
    }
    if let Some((name, _)) = row.cells.iter().find(|(_, v)| !v.is_finite()) {
        return Err(RunError::Runtime(format!("non-finite value in column {name}")));
    }
    Ok(row)
}

/// Rows of a sweep; `written` are the axis values as the user gave them.
pub fn sweep_rows(axis: SweepAxis, written: &[f64], points: &[SweepPoint]) -> Result<Vec<Row>, RunError> {
    written
        .iter()
        .zip(points)
        .map(|(&v, p)| report_row(Some(axis), v, &p.config, &p.report))
        .collect()
}

/// Writes rows sharing one header.
pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    if let Some(first) = rows.first() {
        w.write_record(first.cells.iter().map(|c| c.0.as_str()))?;
    }
    for r in rows {
        w.write_record(r.cells.iter().map(|c| format!("{:?}", c.1)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes labelled rows with a leading text column.
pub fn write_labelled<W: Write>(out: W, label: &str, rows: &[(String, Row)]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    if let Some((_, first)) = rows.first() {
        let header = std::iter::once(label).chain(first.cells.iter().map(|c| c.0.as_str()));
        w.write_record(header)?;
    }
    for (name, r) in rows {
        let rec = std::iter::once(name.clone()).chain(r.cells.iter().map(|c| format!("{:?}", c.1)));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_checks<W: Write>(out: W, checks: &[CheckResult]) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "passed", "detail"])?;
    for c in checks {
        w.write_record([c.name.as_str(), if c.passed { "true" } else { "false" }, c.detail.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_rows`] back into columns.
pub fn read_columns(text: &str) -> Result<BTreeMap<String, Vec<f64>>, RunError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut cols: BTreeMap<String, Vec<f64>> = header.iter().map(|h| (h.clone(), Vec::new())).collect();
    for rec in r.records() {
        for (h, v) in header.iter().zip(rec?.iter()) {
            let x = v
                .parse()
                .map_err(|_| RunError::Runtime(format!("column {h}: `{v}` is not a number")))?;
            cols.get_mut(h).expect("column from header").push(x);
        }
    }
    Ok(cols)
}
