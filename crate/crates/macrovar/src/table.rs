//! Text and CSV rendering of the result tables.

use crate::causality::{GrangerOutcome, SampleTable};
use crate::pipeline::UnitRootRow;
use crate::var::LagSelectionTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut widths = vec![0usize; cols];
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, cell)| format!("{cell:<width$}", width = widths[j]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn csv_join(rows: &[Vec<String>]) -> String {
    rows.iter()
        .map(|r| r.join(","))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

/// Stationarity table. Stars mark stationarity at the 1% level per test
/// (rejection for ADF, non-rejection for KPSS).
pub fn render_unit_root(rows: &[UnitRootRow], format: Format) -> String {
    let star = |yes: bool| if yes { "*" } else { "" };
    let mut grid: Vec<Vec<String>> = vec![vec![
        "variable".into(),
        "level".into(),
        "ADF".into(),
        "KPSS".into(),
        "first difference".into(),
        "ADF".into(),
        "KPSS".into(),
        "confirmed".into(),
    ]];
    for r in rows {
        grid.push(vec![
            r.name.clone(),
            r.level_label.clone(),
            format!("{:.3}{}", r.level_adf.statistic, star(r.level_adf.stationary_at_1pct())),
            format!("{:.3}{}", r.level_kpss.statistic, star(r.level_kpss.stationary_at_1pct())),
            format!("d[{}]", r.level_label),
            format!("{:.3}{}", r.diff_adf.statistic, star(r.diff_adf.stationary_at_1pct())),
            format!("{:.3}{}", r.diff_kpss.statistic, star(r.diff_kpss.stationary_at_1pct())),
            match (r.level_confirmed_stationary(), r.diff_confirmed_stationary()) {
                (true, _) => "stationary".into(),
                (false, true) => "diff-stationary".into(),
                (false, false) => "inconclusive".into(),
            },
        ]);
    }
    match format {
        Format::Text => {
            let mut s = align(&grid);
            s.push_str("* stationary at the 1% level for that test\n");
            s
        }
        Format::Csv => csv_join(&grid),
    }
}

/// Causality tables, one block per sample window. Stars: ** at 5%, * at 10%.
pub fn render_granger(tables: &[SampleTable], format: Format) -> String {
    let star = |p: f64| {
        if p < 0.05 {
            "**"
        } else if p < 0.10 {
            "*"
        } else {
            ""
        }
    };
    match format {
        Format::Text => {
            let mut out = String::new();
            for t in tables {
                out.push_str(&format!("sample {} ({}..{})\n", t.label, t.from, t.to));
                let mut grid: Vec<Vec<String>> = vec![vec![
                    "null hypothesis".into(),
                    "chi2".into(),
                    "p-value".into(),
                ]];
                for row in &t.rows {
                    match row {
                        GrangerOutcome::Stat(r) => grid.push(vec![
                            format!("{} does not cause {}", r.cause, r.effect),
                            format!("{:.3}", r.chi2),
                            format!("{:.3}{}", r.pvalue, star(r.pvalue)),
                        ]),
                        GrangerOutcome::Unavailable(reason) => grid.push(vec![
                            format!("n/a ({reason})"),
                            "n/a".into(),
                            "n/a".into(),
                        ]),
                    }
                }
                out.push_str(&align(&grid));
                out.push('\n');
            }
            out.push_str("** p < 0.05, * p < 0.10\n");
            out
        }
        Format::Csv => {
            let mut grid: Vec<Vec<String>> = vec![vec![
                "sample".into(),
                "cause".into(),
                "effect".into(),
                "chi2".into(),
                "pvalue".into(),
                "significance".into(),
            ]];
            for t in tables {
                for row in &t.rows {
                    match row {
                        GrangerOutcome::Stat(r) => grid.push(vec![
                            t.label.to_string(),
                            r.cause.clone(),
                            r.effect.clone(),
                            format!("{:.6}", r.chi2),
                            format!("{:.6}", r.pvalue),
                            star(r.pvalue).to_string(),
                        ]),
                        GrangerOutcome::Unavailable(reason) => grid.push(vec![
                            t.label.to_string(),
                            "n/a".into(),
                            "n/a".into(),
                            "n/a".into(),
                            "n/a".into(),
                            reason.replace(',', ";"),
                        ]),
                    }
                }
            }
            csv_join(&grid)
        }
    }
}

/// Lag-order comparison, argmin per criterion flagged with `<-`.
pub fn render_lag_selection(table: &LagSelectionTable, format: Format) -> String {
    let mut grid: Vec<Vec<String>> = vec![vec![
        "p".into(),
        "AIC".into(),
        "BIC".into(),
        "HQ".into(),
    ]];
    for row in &table.rows {
        let mark = |best: usize, fmt: f64| {
            if row.p == best && format == Format::Text {
                format!("{fmt:.4} <-")
            } else {
                format!("{fmt:.4}")
            }
        };
        grid.push(vec![
            row.p.to_string(),
            mark(table.best_aic, row.criteria.aic),
            mark(table.best_bic, row.criteria.bic),
            mark(table.best_hq, row.criteria.hq),
        ]);
    }
    match format {
        Format::Text => align(&grid),
        Format::Csv => csv_join(&grid),
    }
}
