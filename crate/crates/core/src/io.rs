//! Text input formats.
//!
//! * Counts CSV: one table row per line, comma-separated nonnegative
//!   integers. An optional header line is detected when the first line is not
//!   all-numeric; a leading non-numeric column on every data row is taken as
//!   row labels.
//! * Pairs CSV: two fields `x,y` per line. A column whose every value parses
//!   as a finite number is numeric and gets binned; any other column is
//!   categorical. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::binning::{bin_axis, BinningSpec, Discretized};
use crate::error::{Error, Result};
use crate::table::JointTable;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l.split(',').map(str::trim).collect()))
        }
    })
}

fn is_number(s: &str) -> bool {
    s.parse::<f64>().is_ok_and(f64::is_finite)
}

pub fn parse_counts_csv(text: &str) -> Result<JointTable> {
    let mut lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    if lines.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    let header = if lines[0].1.iter().any(|f| !is_number(f)) {
        Some(lines.remove(0))
    } else {
        None
    };
    if lines.is_empty() {
        return Err(Error::Parse { line: 0, message: "header but no data rows".into() });
    }
    let labeled = lines.iter().all(|(_, f)| !f.is_empty() && !is_number(f[0]));
    let mut rows = Vec::with_capacity(lines.len());
    let mut row_labels = Vec::new();
    for (line, fields) in &lines {
        let values = if labeled {
            row_labels.push(fields[0].to_string());
            &fields[1..]
        } else {
            &fields[..]
        };
        let parsed: std::result::Result<Vec<i64>, _> = values.iter().map(|f| f.parse::<i64>()).collect();
        match parsed {
            Ok(v) => rows.push(v),
            Err(_) => {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("expected integer counts, got {:?}", values.join(",")),
                })
            }
        }
    }
    let ncols = rows[0].len();
    if let Some(pos) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Parse {
            line: lines[pos].0,
            message: format!("expected {ncols} columns, found {}", rows[pos].len()),
        });
    }
    let col_labels = header.and_then(|(_, h)| {
        let h: Vec<String> = h.iter().map(|s| s.to_string()).collect();
        if h.len() == ncols {
            Some(h)
        } else if h.len() == ncols + 1 {
            Some(h[1..].to_vec())
        } else {
            None
        }
    });
    let row_labels = labeled.then_some(row_labels);
    JointTable::from_counts_labeled(&rows, row_labels, col_labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Categorical(Vec<String>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn from_fields(fields: Vec<&str>) -> Self {
        if fields.iter().all(|f| is_number(f)) {
            Column::Numeric(fields.iter().map(|f| f.parse().expect("checked numeric")).collect())
        } else {
            Column::Categorical(fields.iter().map(|f| f.to_string()).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairsData {
    pub x: Column,
    pub y: Column,
    pub header: Option<(String, String)>,
}

impl PairsData {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub fn parse_pairs_csv(text: &str, header: HeaderMode) -> Result<PairsData> {
    let lines: Vec<(usize, Vec<&str>)> = content_lines(text).collect();
    for (line, fields) in &lines {
        if fields.len() != 2 {
            return Err(Error::Parse { line: *line, message: format!("expected 2 fields, found {}", fields.len()) });
        }
    }
    let has_header = match header {
        HeaderMode::Present => true,
        HeaderMode::Absent => false,
        HeaderMode::Auto => {
            // A non-numeric first field over an otherwise numeric column.
            lines.len() > 1
                && (0..2).any(|c| !is_number(lines[0].1[c]) && lines[1..].iter().all(|(_, f)| is_number(f[c])))
        }
    };
    let (head, body) = if has_header {
        match lines.split_first() {
            Some((h, rest)) => (Some((h.1[0].to_string(), h.1[1].to_string())), rest),
            None => (None, &lines[..]),
        }
    } else {
        (None, &lines[..])
    };
    if body.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    let x = Column::from_fields(body.iter().map(|(_, f)| f[0]).collect());
    let y = Column::from_fields(body.iter().map(|(_, f)| f[1]).collect());
    Ok(PairsData { x, y, header: head })
}

struct AxisAssignment {
    index: Vec<usize>,
    bins: usize,
    edges: Vec<f64>,
    labels: Option<Vec<String>>,
    warnings: Vec<String>,
}

fn assign(col: &Column, k: usize, spec: &BinningSpec, range: Option<(f64, f64)>, axis: &str) -> Result<AxisAssignment> {
    match col {
        Column::Numeric(v) => {
            let b = bin_axis(v, k, spec.strategy, range).map_err(|e| match e {
                Error::InvalidArgument(m) => Error::InvalidArgument(format!("{axis} axis: {m}")),
                other => other,
            })?;
            Ok(AxisAssignment {
                index: b.index,
                bins: b.bins,
                edges: b.edges,
                labels: None,
                warnings: b.warnings.into_iter().map(|w| format!("{axis}: {w}")).collect(),
            })
        }
        Column::Categorical(v) => {
            let mut levels = BTreeMap::new();
            for s in v {
                let next = levels.len();
                levels.entry(s.as_str()).or_insert(next);
            }
            // Sorted label order.
            let order: BTreeMap<&str, usize> = levels.keys().enumerate().map(|(i, k)| (*k, i)).collect();
            Ok(AxisAssignment {
                index: v.iter().map(|s| order[s.as_str()]).collect(),
                bins: order.len(),
                edges: Vec::new(),
                labels: Some(order.keys().map(|s| s.to_string()).collect()),
                warnings: Vec::new(),
            })
        }
    }
}

/// Cross-tabulates pairs: numeric axes are binned with `spec`, categorical
/// axes use their sorted distinct labels.
pub fn tabulate_pairs(data: &PairsData, spec: &BinningSpec) -> Result<Discretized> {
    let n = data.len();
    let any_numeric = matches!(data.x, Column::Numeric(_)) || matches!(data.y, Column::Numeric(_));
    let (kx, ky) = if any_numeric {
        if n < 4 {
            return Err(Error::InvalidArgument(format!("need at least 4 pairs, got {n}")));
        }
        spec.bin_counts(n)?
    } else {
        (0, 0)
    };
    let ax = assign(&data.x, kx, spec, spec.x_range, "x")?;
    let ay = assign(&data.y, ky, spec, spec.y_range, "y")?;
    let mut counts = DMatrix::<u64>::zeros(ax.bins, ay.bins);
    for (&i, &j) in ax.index.iter().zip(&ay.index) {
        counts[(i, j)] += 1;
    }
    let rows: Vec<Vec<i64>> = (0..ax.bins).map(|i| counts.row(i).iter().map(|&c| c as i64).collect()).collect();
    let table = JointTable::from_counts_labeled(&rows, ax.labels, ay.labels)?;
    let mut warnings = ax.warnings;
    warnings.extend(ay.warnings);
    if table.was_pruned() {
        warnings.push(format!(
            "dropped {} empty row(s) and {} empty column(s)",
            table.pruned_rows().len(),
            table.pruned_cols().len()
        ));
    }
    Ok(Discretized { table, x_edges: ax.edges, y_edges: ay.edges, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binning::{BinRule, Strategy};

    #[test]
    fn counts_plain() {
        let t = parse_counts_csv("10,20\n20,10\n").unwrap();
        assert_eq!(t.to_rows(), vec![vec![10, 20], vec![20, 10]]);
        assert!(t.col_labels().is_none());
    }

    #[test]
    fn counts_with_header_and_row_labels() {
        let t = parse_counts_csv("group,yes,no\nA, 3, 4\nB, 5, 6\n").unwrap();
        assert_eq!(t.to_rows(), vec![vec![3, 4], vec![5, 6]]);
        assert_eq!(t.col_labels().unwrap(), &["yes".to_string(), "no".to_string()]);
        assert_eq!(t.row_labels().unwrap(), &["A".to_string(), "B".to_string()]);
        let t = parse_counts_csv("yes,no\n3,4\n5,6\n").unwrap();
        assert_eq!(t.col_labels().unwrap().len(), 2);
    }

    #[test]
    fn counts_errors() {
        assert!(matches!(parse_counts_csv(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_counts_csv("1,2\n3,x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_counts_csv("1,2\n3,4,5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_counts_csv("1,2\n3,-4\n"), Err(Error::InvalidEntry { .. })));
        assert!(matches!(parse_counts_csv("1.5,2\n3,4\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn pairs_numeric_with_header() {
        let d = parse_pairs_csv("x,y\n0,0\n1,1\n2,2\n3,3\n", HeaderMode::Auto).unwrap();
        assert_eq!(d.header, Some(("x".into(), "y".into())));
        assert_eq!(d.len(), 4);
        let spec = BinningSpec::new(BinRule::Fixed(2, 2), Strategy::EqualWidth);
        let out = tabulate_pairs(&d, &spec).unwrap();
        assert_eq!(out.table.to_rows(), vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn pairs_categorical() {
        let d = parse_pairs_csv("b,u\na,v\nb,v\na,u\na,u\n", HeaderMode::Auto).unwrap();
        assert!(d.header.is_none());
        let out = tabulate_pairs(&d, &BinningSpec::default()).unwrap();
        assert_eq!(out.table.row_labels().unwrap(), &["a".to_string(), "b".to_string()]);
        assert_eq!(out.table.to_rows(), vec![vec![2, 1], vec![1, 1]]);
        let d = parse_pairs_csv("x,y\nb,u\na,v\n", HeaderMode::Present).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn pairs_mixed_columns() {
        let text = "a,0.1\na,0.2\nb,5\nb,6\na,0.3\nb,7\n";
        let d = parse_pairs_csv(text, HeaderMode::Absent).unwrap();
        assert!(matches!(d.y, Column::Numeric(_)));
        let spec = BinningSpec::new(BinRule::Fixed(2, 2), Strategy::EqualFrequency);
        let out = tabulate_pairs(&d, &spec).unwrap();
        assert_eq!(out.table.to_rows(), vec![vec![3, 0], vec![0, 3]]);
    }

    #[test]
    fn pairs_wrong_arity() {
        assert!(matches!(parse_pairs_csv("1,2,3\n", HeaderMode::Auto), Err(Error::Parse { line: 1, .. })));
    }
}
