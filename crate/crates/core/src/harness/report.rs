//! Markdown and CSV rendering of experiment reports.

use std::fmt::Write;

use super::{ExperimentReport, OutputFormat, SelectionReport};
use crate::eval::ForecastReport;

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    notes: Vec<String>,
}

impl Table {
    fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new(), notes: Vec::new() }
    }

    fn markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        if !self.notes.is_empty() {
            out.push('\n');
            for note in &self.notes {
                let _ = writeln!(out, "{note}");
            }
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        // Writing to a Vec cannot fail.
        let _ = w.write_record(&self.header);
        for row in &self.rows {
            let _ = w.write_record(row);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }
}

fn selection_table(report: &SelectionReport) -> Table {
    let mut table = Table::new(
        ["n", "p", "r", "metric"]
            .into_iter()
            .map(String::from)
            .chain(report.methods.iter().map(|m| m.label().to_string())),
    );
    if report.methods.is_empty() {
        return table;
    }
    for tier in &report.tiers {
        let t = tier.tier;
        let metrics: [(&str, Box<dyn Fn(&crate::eval::SelectionTally) -> String>); 4] = [
            ("E", Box::new(|s| s.e_count.to_string())),
            ("SS", Box::new(|s| s.ss_count.to_string())),
            ("TP", Box::new(|s| format!("{:.2}", s.tp_mean()))),
            ("FP", Box::new(|s| format!("{:.2}", s.fp_mean()))),
        ];
        for (name, f) in metrics {
            let mut row = vec![t.n.to_string(), t.p.to_string(), t.r.to_string(), name.to_string()];
            row.extend(tier.tallies.iter().map(|s| f(s)));
            table.rows.push(row);
        }
        for ((m, s), err) in report.methods.iter().zip(&tier.tallies).zip(&tier.first_errors) {
            if s.failures > 0 {
                table.notes.push(format!(
                    "n = {}: {m} failed in {} of {} replications (first error: {})",
                    t.n,
                    s.failures,
                    s.reps + s.failures,
                    err.as_deref().unwrap_or("unknown")
                ));
            }
        }
    }
    table
}

fn forecast_table(report: &ForecastReport<f64>) -> Table {
    let base = report.reference.label();
    let mut table = Table::new([
        "method".to_string(),
        "RMSE".into(),
        "MAE".into(),
        format!("DM stat vs {base}"),
        format!("DM p vs {base}"),
    ]);
    for s in &report.summary {
        let (stat, p) = match &s.dm_vs_reference {
            Some(dm) => (format!("{:.4}", dm.statistic), format!("{:.4}", dm.p_value)),
            None => ("".into(), "".into()),
        };
        table.rows.push(vec![s.method.label().into(), format!("{:.6}", s.rmse), format!("{:.6}", s.mae), stat, p]);
    }
    table.notes.push(format!("{} one-step forecasts", report.records.len()));
    table
}

fn key_values(pairs: Vec<(&str, String)>) -> Table {
    let mut table = Table::new(["quantity", "value"]);
    table.rows = pairs.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
    table
}

/// Renders a report. Selection tables have one block of E, SS, TP, FP rows per
/// tier and one column per method; TP and FP are replication means.
pub fn emit_tables(report: &ExperimentReport, format: OutputFormat) -> String {
    let table = match report {
        ExperimentReport::Selection(sel) => selection_table(sel),
        ExperimentReport::Forecast(f) => forecast_table(f),
        ExperimentReport::Example21 { a, n, limit, oga_n, oga_p, oga } => key_values(vec![
            ("a", a.to_string()),
            ("n", n.to_string()),
            ("mean (F1-F2)/n", format!("{:.6}", limit.mean_scaled_diff)),
            ("limit (1+2a)/(1-a^2)", format!("{:.6}", limit.limit)),
            ("OGA n", oga_n.to_string()),
            ("OGA p", oga_p.to_string()),
            ("first pick y(t-1)", format!("{:.4}", oga.first_pick_y1)),
            ("y(t-2) never picked", format!("{:.4}", oga.y2_missed)),
        ]),
        ExperimentReport::Example22 { n, points } => {
            let mut t = Table::new(["n", "lambda", "correct selection"]);
            t.rows = points
                .iter()
                .map(|p| vec![n.to_string(), format!("{:.4}", p.lambda), format!("{:.4}", p.correct)])
                .collect();
            t
        }
        ExperimentReport::Example31 { k, n, mspe } => key_values(vec![
            ("k", k.to_string()),
            ("n", n.to_string()),
            ("n(MSPE_k - 1), full order", format!("{:.4}", mspe.full)),
            ("n(MSPE_k - 1), single lag", format!("{:.4}", mspe.single)),
            ("ratio", format!("{:.4}", mspe.ratio())),
        ]),
    };
    match format {
        OutputFormat::Md => table.markdown(),
        OutputFormat::Csv => table.csv(),
    }
}
