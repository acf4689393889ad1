// SPDX-License-Identifier: Apache-2.0

//! Tables as CSV and Markdown. Percents are printed from the stored scaled
//! values, never recomputed.

use std::fmt::Write as _;

use super::{Analysis, NamedAnalysis, ReportError};
use crate::annotation::LayerAgreement;
use crate::sampling::MentionCountHistogram;
use crate::stats::{ContingencyTable, DeltaTable, DistributionTable, Percent, Rate};

fn pct(p: Option<Percent>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| ReportError::Io(e.into_error()))
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn md_table(out: &mut String, header: &[String], rows: &[Vec<String>], numeric_from: usize) {
    let _ = writeln!(out, "| {} |", header.iter().map(|h| md_cell(h)).collect::<Vec<_>>().join(" | "));
    let align: Vec<&str> = (0..header.len()).map(|i| if i >= numeric_from { "---:" } else { "---" }).collect();
    let _ = writeln!(out, "| {} |", align.join(" | "));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.iter().map(|c| md_cell(c)).collect::<Vec<_>>().join(" | "));
    }
}

fn distribution(t: &DistributionTable) -> (Vec<String>, Vec<Vec<String>>) {
    let header = vec![t.dimension.clone(), "count".into(), "percent".into()];
    let mut rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| vec![r.category.clone(), r.count.to_string(), pct(r.percent)])
        .collect();
    rows.push(vec!["TOTAL".into(), t.total.to_string(), String::new()]);
    (header, rows)
}

fn contingency_long(t: &ContingencyTable) -> (Vec<String>, Vec<Vec<String>>) {
    let header = vec![
        t.row_dimension.clone(),
        t.column_dimension.clone(),
        "count".into(),
        "percent_of_total".into(),
    ];
    let mut rows = Vec::new();
    for (ri, r) in t.row_categories.iter().enumerate() {
        for (ci, c) in t.column_categories.iter().enumerate() {
            rows.push(vec![
                r.clone(),
                c.clone(),
                t.cells[ri][ci].to_string(),
                pct(Percent::of(t.cells[ri][ci], t.grand_total, t.percent_precision)),
            ]);
        }
    }
    (header, rows)
}

fn contingency_grid(t: &ContingencyTable) -> (Vec<String>, Vec<Vec<String>>) {
    let cell = |n: u64| match Percent::of(n, t.grand_total, t.percent_precision) {
        Some(p) => format!("{n} ({p}%)"),
        None => n.to_string(),
    };
    let mut header = vec![format!("{} \\ {}", t.row_dimension, t.column_dimension)];
    header.extend(t.column_categories.iter().cloned());
    header.push("TOTAL".into());
    let mut rows: Vec<Vec<String>> = t
        .row_categories
        .iter()
        .enumerate()
        .map(|(ri, r)| {
            let mut row = vec![r.clone()];
            row.extend(t.cells[ri].iter().map(|&n| cell(n)));
            row.push(cell(t.row_totals[ri]));
            row
        })
        .collect();
    let mut total = vec!["TOTAL".to_string()];
    total.extend(t.column_totals.iter().map(|&n| cell(n)));
    total.push(t.grand_total.to_string());
    rows.push(total);
    (header, rows)
}

fn delta(t: &DeltaTable) -> (Vec<String>, Vec<Vec<String>>) {
    let header = vec![t.dimension.clone(), "percent".into(), "baseline_percent".into(), "delta".into()];
    let rows = t
        .rows
        .iter()
        .map(|r| {
            vec![
                r.category.clone(),
                pct(r.percent),
                pct(r.baseline_percent),
                r.delta.map(Percent::signed).unwrap_or_default(),
            ]
        })
        .collect();
    (header, rows)
}

/// Alpha to three decimals in Markdown, shortest round-trip form in CSV.
fn agreement(entries: &[LayerAgreement], md: bool) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["layer", "alpha", "n_units", "n_annotators", "n_missing", "undefined"]
        .map(String::from)
        .to_vec();
    let rows = entries
        .iter()
        .map(|e| match &e.result {
            Some(r) => vec![
                e.layer.clone(),
                if md { format!("{:.3}", r.alpha) } else { r.alpha.to_string() },
                r.n_units.to_string(),
                r.n_annotators.to_string(),
                r.n_missing.to_string(),
                String::new(),
            ],
            None => vec![
                e.layer.clone(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.undefined.clone().unwrap_or_default(),
            ],
        })
        .collect();
    (header, rows)
}

fn rates(items: &[(&str, Rate)], decimals: u8) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["measure", "numerator", "denominator", "percent"].map(String::from).to_vec();
    let rows = items
        .iter()
        .map(|(name, r)| {
            vec![
                name.to_string(),
                r.numerator.to_string(),
                r.denominator.to_string(),
                pct(r.percent(decimals)),
            ]
        })
        .collect();
    (header, rows)
}

fn counts(h: &MentionCountHistogram) -> (Vec<String>, Vec<Vec<String>>) {
    let header = ["rank", "software_key", "mentions"].map(String::from).to_vec();
    let rows = h
        .entries
        .iter()
        .enumerate()
        .map(|(i, (k, c))| vec![(i + 1).to_string(), k.clone(), c.to_string()])
        .collect();
    (header, rows)
}

fn counts_summary(h: &MentionCountHistogram) -> (Vec<String>, Vec<Vec<String>>) {
    let s = h.summary();
    let share = |c: u64| pct(Percent::of(c, s.distinct_keys, 1));
    let header = ["measure", "value", "percent_of_distinct"].map(String::from).to_vec();
    let rows = vec![
        vec!["mentions".into(), s.total_mentions.to_string(), String::new()],
        vec!["distinct software".into(), s.distinct_keys.to_string(), String::new()],
        vec!["exactly 1 mention".into(), s.keys_with_one.to_string(), share(s.keys_with_one)],
        vec!["more than 10 mentions".into(), s.keys_over_10.to_string(), share(s.keys_over_10)],
        vec!["more than 50 mentions".into(), s.keys_over_50.to_string(), share(s.keys_over_50)],
    ];
    (header, rows)
}

const RATE_DECIMALS: u8 = 1;

fn link_rates(a: &Analysis) -> Option<Vec<(&'static str, Rate)>> {
    match a {
        Analysis::Links { stats } => Some(vec![
            ("multi_target", stats.multi_target),
            ("wrong_target", stats.wrong_target),
            ("unlinked", stats.unlinked),
        ]),
        Analysis::Extraction { stats } => Some(vec![
            ("incorrect_extraction", stats.incorrect_extraction),
            ("not_software", stats.not_software),
        ]),
        _ => None,
    }
}

/// The analysis as one CSV table.
pub fn to_csv(a: &NamedAnalysis) -> Result<Vec<u8>, ReportError> {
    let (header, rows) = match &a.analysis {
        Analysis::Distribution { table } => distribution(table),
        Analysis::Contingency { table } => contingency_long(table),
        Analysis::Comparison { table } => delta(table),
        Analysis::Agreement { entries } => agreement(entries, false),
        Analysis::Counts { histogram } => counts(histogram),
        Analysis::Levene { result, groups } => (
            ["F", "df_between", "df_within", "p", "groups"].map(String::from).to_vec(),
            vec![vec![
                result.f.to_string(),
                result.df_between.to_string(),
                result.df_within.to_string(),
                result.p.to_string(),
                groups.join(" | "),
            ]],
        ),
        other => rates(&link_rates(other).expect("rate analysis"), RATE_DECIMALS),
    };
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(&h, rows)
}

/// The analysis as a Markdown section.
pub fn to_markdown(a: &NamedAnalysis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "## {}\n", md_cell(if a.title.is_empty() { &a.name } else { &a.title }));
    if !a.description.is_empty() {
        let _ = writeln!(out, "{}\n", a.description);
    }
    match &a.analysis {
        Analysis::Distribution { table } => {
            let (h, r) = distribution(table);
            md_table(&mut out, &h, &r, 1);
        }
        Analysis::Contingency { table } => {
            let (h, r) = contingency_grid(table);
            md_table(&mut out, &h, &r, 1);
        }
        Analysis::Comparison { table } => {
            let (h, r) = delta(table);
            md_table(&mut out, &h, &r, 1);
        }
        Analysis::Agreement { entries } => {
            let (h, r) = agreement(entries, true);
            md_table(&mut out, &h, &r, 1);
        }
        Analysis::Counts { histogram } => {
            let (h, r) = counts_summary(histogram);
            md_table(&mut out, &h, &r, 1);
        }
        Analysis::Levene { result, groups } => {
            let _ = writeln!(
                out,
                "Levene's test ({}): F({}, {}) = {:.2}, p = {:.4}",
                groups.join(" vs "),
                result.df_between,
                result.df_within,
                result.f,
                result.p
            );
        }
        other => {
            let (h, r) = rates(&link_rates(other).expect("rate analysis"), RATE_DECIMALS);
            md_table(&mut out, &h, &r, 1);
        }
    }
    out.push('\n');
    out
}
