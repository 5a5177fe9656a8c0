//! Median over seeds and train × test generalization matrices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::metrics::report::Table;

pub fn median_over_seeds(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Eval("median of an empty list".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Eval("median of a list containing NaN".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let mid = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

/// Rows are training datasets, columns test datasets. A cell is diagonal when
/// its train and test names match; averages cover off-diagonal cells only.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizationMatrix {
    pub train: Vec<String>,
    pub test: Vec<String>,
    pub cells: Vec<Vec<f64>>,
    pub row_avgs: Vec<Option<f64>>,
    pub col_avgs: Vec<Option<f64>>,
}

/// Builds the matrix from per-seed values keyed by `(train, test)`. Each cell
/// is the median over seeds; averages use the unrounded medians.
pub fn generalization_matrix(
    results: &BTreeMap<(String, String), Vec<f64>>,
    train: &[String],
    test: &[String],
) -> Result<GeneralizationMatrix> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::Eval("generalization matrix needs at least one row and column".into()));
    }
    let cells = train
        .iter()
        .map(|tr| {
            test.iter()
                .map(|te| {
                    let seeds = results
                        .get(&(tr.clone(), te.clone()))
                        .ok_or_else(|| Error::Eval(format!("missing cell ({tr}, {te})")))?;
                    median_over_seeds(seeds)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let row_avgs = train
        .iter()
        .enumerate()
        .map(|(i, tr)| mean(test.iter().enumerate().filter(|(_, te)| *te != tr).map(|(j, _)| cells[i][j]).collect()))
        .collect();
    let col_avgs = test
        .iter()
        .enumerate()
        .map(|(j, te)| mean(train.iter().enumerate().filter(|(_, tr)| *tr != te).map(|(i, _)| cells[i][j]).collect()))
        .collect();
    Ok(GeneralizationMatrix {
        train: train.to_vec(),
        test: test.to_vec(),
        cells,
        row_avgs,
        col_avgs,
    })
}

impl GeneralizationMatrix {
    pub fn has_averages(&self) -> bool {
        self.row_avgs.iter().any(Option::is_some)
    }

    /// Values multiplied by `scale` and printed with `decimals` places. The
    /// "Avg." column and row are omitted when there is no off-diagonal cell.
    pub fn to_table(&self, scale: f64, decimals: usize) -> Table {
        let fmt = |v: f64| format!("{:.*}", decimals, v * scale);
        let avg = self.has_averages();
        let mut header = vec!["train".to_string()];
        header.extend(self.test.iter().cloned());
        if avg {
            header.push("Avg.".into());
        }
        let mut rows: Vec<Vec<String>> = self
            .train
            .iter()
            .zip(&self.cells)
            .zip(&self.row_avgs)
            .map(|((name, cells), ra)| {
                let mut row = vec![name.clone()];
                row.extend(cells.iter().map(|&c| fmt(c)));
                if avg {
                    row.push(ra.map(fmt).unwrap_or_default());
                }
                row
            })
            .collect();
        if avg {
            let mut last = vec!["Avg.".to_string()];
            last.extend(self.col_avgs.iter().map(|c| c.map(fmt).unwrap_or_default()));
            last.push(String::new());
            rows.push(last);
        }
        Table::new(header, rows)
    }
}
