use serde::Serialize;
use serde_json::{json, Value};

use super::cv::PrecisionReport;
use crate::features::FeatureSet;

/// One JSON object per fold followed by a summary carrying `config`.
/// Every line ends in `\n`.
pub fn jsonl_records(report: &PrecisionReport, config: &impl Serialize) -> serde_json::Result<String> {
    let mut out = String::new();
    for fold in &report.folds {
        let precision = if fold.total == 0 {
            Value::Null
        } else {
            json!(fold.correct as f64 / fold.total as f64)
        };
        let line = json!({
            "record": "fold",
            "fold": fold.fold,
            "correct": fold.correct,
            "total": fold.total,
            "precision": precision,
        });
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    let summary = json!({
        "record": "summary",
        "config": serde_json::to_value(config)?,
        "learner": report.learner,
        "features": report.features,
        "mode": report.mode,
        "closed": report.is_closed(),
        "n_folds": report.n_folds,
        "seed": report.seed,
        "correct": report.correct(),
        "total": report.total(),
        "precision": report.precision(),
    });
    out.push_str(&serde_json::to_string(&summary)?);
    out.push('\n');
    Ok(out)
}

/// Open and closed precision for one method under one feature set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TableCell {
    pub open: Option<f64>,
    pub closed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub method: String,
    /// Indexed by feature-set number minus one.
    pub cells: [TableCell; 3],
}

fn percent(p: Option<f64>, closed: bool) -> String {
    match p {
        None => "---".to_owned(),
        Some(p) if closed => format!("({:.2}%)", 100.0 * p),
        Some(p) => format!("{:.2}%", 100.0 * p),
    }
}

/// Method × feature-set matrix; each feature set has an open column and a
/// parenthesised closed column.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut grid: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["Method".to_owned()];
    for fs in FeatureSet::ALL {
        header.push(format!("FS{} open", fs.number()));
        header.push(format!("FS{} closed", fs.number()));
    }
    grid.push(header);
    for row in rows {
        let mut line = vec![row.method.clone()];
        for cell in &row.cells {
            line.push(percent(cell.open, false));
            line.push(percent(cell.closed, true));
        }
        grid.push(line);
    }

    let widths: Vec<usize> = (0..grid[0].len())
        .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (r, line) in grid.iter().enumerate() {
        let cells: Vec<String> = line
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let pad = widths[c] - s.chars().count();
                if c == 0 {
                    format!("{s}{}", " ".repeat(pad))
                } else {
                    format!("{}{s}", " ".repeat(pad))
                }
            })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
        if r == 0 {
            let total = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}
