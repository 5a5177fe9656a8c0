//! Plain tables rendered as CSV or aligned Markdown.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Csv,
    Md,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Md),
            other => Err(Error::Parse(format!("unknown report format `{other}` (csv|md)"))),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Md => "md",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>, rows: Vec<Vec<String>>) -> Self {
        Self { header, rows }
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Md => self.to_markdown(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        for row in std::iter::once(&self.header).chain(&self.rows) {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_markdown(&self) -> String {
        let cols = self.header.len().max(self.rows.iter().map(Vec::len).max().unwrap_or(0));
        let cell = |row: &Vec<String>, j: usize| row.get(j).map(String::as_str).unwrap_or("").to_string();
        let widths: Vec<usize> = (0..cols)
            .map(|j| {
                std::iter::once(&self.header)
                    .chain(&self.rows)
                    .map(|r| cell(r, j).chars().count())
                    .max()
                    .unwrap_or(0)
                    .max(3)
            })
            .collect();
        let line = |row: &Vec<String>| {
            let cells: Vec<String> = (0..cols).map(|j| format!("{:<w$}", cell(row, j), w = widths[j])).collect();
            format!("| {} |\n", cells.join(" | "))
        };
        let mut out = line(&self.header);
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&format!("| {} |\n", rule.join(" | ")));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Table {
        Table::new(
            vec!["train".into(), "SQU".into()],
            vec![vec!["SQU".into(), "99.6".into()], vec!["a,b".into(), "1".into()]],
        )
    }

    #[test]
    fn csv_quotes_commas() {
        assert_eq!(t().to_csv(), "train,SQU\nSQU,99.6\n\"a,b\",1\n");
    }

    #[test]
    fn markdown_is_aligned() {
        assert_eq!(t().to_markdown(), "| train | SQU  |\n| ----- | ---- |\n| SQU   | 99.6 |\n| a,b   | 1    |\n");
    }

    #[test]
    fn formats() {
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Md);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
