//! Report emitters.

use lift_core::report::Report;
use serde::Serialize;

use crate::config::Format;

#[derive(Serialize)]
struct Row<'a> {
    suite: &'a str,
    case_id: &'a str,
    inputs: String,
    lhs: &'a str,
    rhs: &'a str,
    ratio: &'a str,
    abs_err: String,
    status: String,
}

fn status(r: &Report) -> String {
    serde_json::to_value(r.status)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn rows(reports: &[Report]) -> Vec<Row<'_>> {
    reports
        .iter()
        .map(|r| Row {
            suite: &r.suite,
            case_id: &r.case_id,
            inputs: r.inputs.to_string(),
            lhs: &r.lhs,
            rhs: &r.rhs,
            ratio: r.ratio.as_deref().unwrap_or(""),
            abs_err: r.abs_err.map(|e| format!("{:e}", e)).unwrap_or_default(),
            status: status(r),
        })
        .collect()
}

pub fn render(suite: &str, reports: &[Report], format: Format) -> String {
    match format {
        Format::Json => {
            let doc = serde_json::json!({
                "suite": suite,
                "passed": lift_core::report::all_passed(reports),
                "reports": reports,
            });
            serde_json::to_string_pretty(&doc).expect("reports serialize") + "\n"
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            for r in rows(reports) {
                w.serialize(r).expect("csv row");
            }
            String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8")
        }
        Format::Markdown => {
            let cell = |s: &str| s.replace('|', "\\|");
            let mut out = String::from("| suite | case | lhs | rhs | ratio | status |\n|---|---|---|---|---|---|\n");
            for r in rows(reports) {
                out.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {} |\n",
                    cell(r.suite),
                    cell(r.case_id),
                    cell(r.lhs),
                    cell(r.rhs),
                    cell(r.ratio),
                    r.status
                ));
            }
            out
        }
    }
}
