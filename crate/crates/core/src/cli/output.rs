//! Text and JSON renderings of task outcomes. Both go through
//! [`residual_rows`], so they list the same residuals.

use serde::Serialize;

use super::tasks::{Status, TaskOutcome};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualRow {
    pub check: String,
    pub probe: String,
    pub value: String,
}

#[derive(Debug, Serialize)]
pub struct TaskJson<'a> {
    pub task: &'a str,
    pub status: &'static str,
    pub residuals: Vec<ResidualRow>,
    pub elapsed_ms: u64,
    pub notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<&'a str>,
}

#[derive(Debug, Serialize)]
pub struct RunJson<'a> {
    pub source: &'a str,
    pub status: &'static str,
    pub tasks: Vec<TaskJson<'a>>,
}

/// Keeps each residual on one line.
fn one_line(s: &str) -> String {
    s.split('\n').map(str::trim_end).collect::<Vec<_>>().join(" / ")
}

pub fn residual_rows(o: &TaskOutcome) -> Vec<ResidualRow> {
    o.report
        .residuals
        .iter()
        .map(|r| ResidualRow { check: one_line(&r.check), probe: one_line(&r.probe), value: one_line(&r.value.to_string()) })
        .collect()
}

pub fn overall(outcomes: &[TaskOutcome]) -> Status {
    if outcomes.iter().any(|o| o.status == Status::Error) {
        Status::Error
    } else if outcomes.iter().any(|o| o.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    }
}

pub fn text(outcomes: &[TaskOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&format!("task {}: {} ({} ms)\n", o.id, o.status.as_str(), o.elapsed_ms));
        if let Some(e) = &o.error {
            s.push_str(&format!("  error: {}\n", one_line(e)));
        }
        for r in residual_rows(o) {
            s.push_str(&format!("  [{}] {} => {}\n", r.check, r.probe, r.value));
        }
        for n in &o.report.notes {
            s.push_str(&format!("  note: {}\n", one_line(n)));
        }
    }
    let pass = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    s.push_str(&format!("{}: {pass} of {} tasks passed\n", overall(outcomes).as_str(), outcomes.len()));
    s
}

pub fn json(source: &str, outcomes: &[TaskOutcome]) -> String {
    let run = RunJson {
        source,
        status: overall(outcomes).as_str(),
        tasks: outcomes
            .iter()
            .map(|o| TaskJson {
                task: &o.id,
                status: o.status.as_str(),
                residuals: residual_rows(o),
                elapsed_ms: o.elapsed_ms,
                notes: &o.report.notes,
                error: o.error.as_deref(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&run).expect("plain data serializes")
}
