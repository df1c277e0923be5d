//! Structured results of CLI commands and experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Reported value with no pass/fail meaning.
    Observed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|c| c.to_string()).collect());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

/// Outcome of one command. Everything except `timing` is a deterministic
/// function of the command's arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub tool_version: String,
    pub parameters: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            parameters: BTreeMap::new(),
            verdicts: Vec::new(),
            tables: Vec::new(),
            timing: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn verdict(&mut self, name: &str, status: Status, detail: impl Into<String>) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
        self
    }

    /// Records a pass or fail verdict.
    pub fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> &mut Self {
        self.verdict(name, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    pub fn observe(&mut self, name: &str, detail: impl Into<String>) -> &mut Self {
        self.verdict(name, Status::Observed, detail)
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }

    pub fn find(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn without_timing(&self) -> RunReport {
        RunReport {
            timing: None,
            ..self.clone()
        }
    }

    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_machine(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "== {} (triplesys {})", self.command, self.tool_version).unwrap();
        if !self.parameters.is_empty() {
            let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "parameters: {}", params.join(" ")).unwrap();
        }
        for table in &self.tables {
            writeln!(out, "-- {}", table.name).unwrap();
            let widths: Vec<usize> = (0..table.columns.len())
                .map(|i| {
                    table
                        .rows
                        .iter()
                        .filter_map(|r| r.get(i))
                        .map(String::len)
                        .chain(std::iter::once(table.columns[i].len()))
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |cells: &[String]| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(&table.columns)).unwrap();
            for row in &table.rows {
                writeln!(out, "{}", line(row)).unwrap();
            }
        }
        for v in &self.verdicts {
            let tag = match v.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Observed => "INFO",
            };
            writeln!(out, "[{tag}] {}: {}", v.name, v.detail).unwrap();
        }
        if let Some(t) = &self.timing {
            writeln!(out, "elapsed: {} ms", t.elapsed_ms).unwrap();
        }
        out
    }
}
