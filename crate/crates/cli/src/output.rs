use std::io::{IsTerminal, Write};

use serde::Serialize;

use crate::OutputFormat;

/// A report as CSV lines, a JSON document and summary lines.
pub struct Report<'a, T: Serialize> {
    pub header: &'a str,
    pub rows: Vec<String>,
    pub json: &'a T,
    pub summary: Vec<String>,
}

impl<T: Serialize> Report<'_, T> {
    /// Writes the report. CSV summaries go to stderr so stdout stays
    /// machine-readable.
    pub fn emit(&self, fmt: OutputFormat) {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        let res = match fmt {
            OutputFormat::Csv => {
                for s in &self.summary {
                    eprintln!("{s}");
                }
                writeln!(out, "{}", self.header).and_then(|_| self.rows.iter().try_for_each(|r| writeln!(out, "{r}")))
            }
            OutputFormat::Json => {
                let text = serde_json::to_string_pretty(self.json).expect("report serializes");
                writeln!(out, "{text}")
            }
            OutputFormat::Pretty => {
                let mut text = align(self.header, &self.rows);
                if !self.summary.is_empty() {
                    text.push('\n');
                    for s in &self.summary {
                        text.push_str(s);
                        text.push('\n');
                    }
                }
                out.write_all(text.as_bytes())
            }
        };
        if let Err(e) = res.and_then(|_| out.flush()) {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                eprintln!("error: writing output: {e}");
            }
        }
    }
}

/// Space-aligned columns from CSV lines.
fn align(header: &str, rows: &[String]) -> String {
    let cells: Vec<Vec<&str>> = std::iter::once(header)
        .chain(rows.iter().map(String::as_str))
        .map(|l| l.split(',').collect())
        .collect();
    let ncol = cells.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| cells.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    let mut text = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        text.push_str(line.join("  ").trim_end());
        text.push('\n');
    }
    text
}

/// Progress on stderr, only when it is a terminal.
pub fn progress(msg: impl FnOnce() -> String) {
    let err = std::io::stderr();
    if err.is_terminal() {
        let _ = write!(err.lock(), "\r\x1b[K{}", msg());
    }
}

pub fn progress_done() {
    let err = std::io::stderr();
    if err.is_terminal() {
        let _ = write!(err.lock(), "\r\x1b[K");
    }
}

pub fn percent(k: usize, n: usize) -> String {
    if n == 0 || k == n {
        "100%".to_string()
    } else {
        format!("{:.1}%", 100.0 * k as f64 / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn align_pads_columns() {
        let t = align("a,bb", &["ccc,d".to_string()]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }

    #[test]
    fn percent_format() {
        assert_eq!(percent(7, 7), "100%");
        assert_eq!(percent(1, 3), "33.3%");
    }
}
