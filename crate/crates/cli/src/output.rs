//! CSV and summary formatting.

use std::fmt::Write as _;

/// Fixed 17-significant-digit rendering so that output is byte-reproducible.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let escaped: Vec<String> = cells.iter().map(|c| escape(c)).collect();
        writeln!(self.text, "{}", escaped.join(",")).unwrap();
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

fn escape(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// One line of a verification summary.
#[derive(Debug, Clone)]
pub struct Assertion {
    pub suite: &'static str,
    pub label: String,
    pub observed: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Default)]
pub struct Summary {
    pub lines: Vec<Assertion>,
}

impl Summary {
    pub fn push(&mut self, suite: &'static str, label: impl Into<String>, observed: impl Into<String>, expected: impl Into<String>, pass: bool) {
        self.lines.push(Assertion { suite, label: label.into(), observed: observed.into(), expected: expected.into(), pass });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut t = Table::new(&["suite", "assertion", "observed", "expected", "pass"]);
        for l in &self.lines {
            t.row(&[l.suite.to_string(), l.label.clone(), l.observed.clone(), l.expected.clone(), l.pass.to_string()]);
        }
        t.into_string()
    }
}
