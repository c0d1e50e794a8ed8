//! CSV datasets with a `# key = value` metadata block.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which parses back
//! to the same `f64`. Missing values are the literal `NA`.

use std::fmt::Write as _;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub columns: &'static [&'static str],
}

pub const TRAJECTORY: Schema = Schema {
    name: "trajectory",
    columns: &["t", "x", "p", "t_cl", "t_conf", "t_corr", "v", "h_total"],
};

pub const SWEEP: Schema = Schema {
    name: "sweep",
    columns: &[
        "p0",
        "p0_over_sigma",
        "t_ret_coherent",
        "t_ret_classical",
        "t_ret_free",
        "classification",
    ],
};

pub const ENERGY: Schema = Schema {
    name: "energy",
    columns: &["x", "p", "t_cl", "t_conf", "t_corr", "v", "h_total"],
};

pub const MISSING: &str = "NA";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{schema} row {row} has {found} cells, schema has {expected} columns")]
    Arity {
        schema: &'static str,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Renders a whole dataset. Rows are checked against the schema before
/// anything is produced.
pub fn render(
    schema: &Schema,
    metadata: &[(String, String)],
    rows: &[Vec<Cell>],
) -> Result<String, CsvError> {
    if let Some((row, cells)) = rows
        .iter()
        .enumerate()
        .find(|(_, r)| r.len() != schema.columns.len())
    {
        return Err(CsvError::Arity {
            schema: schema.name,
            row,
            expected: schema.columns.len(),
            found: cells.len(),
        });
    }
    let mut out = String::new();
    for (key, value) in metadata {
        let _ = writeln!(out, "# {key} = {value}");
    }
    out.push_str(&schema.columns.join(","));
    out.push('\n');
    for cells in rows {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            match cell {
                Cell::Num(v) => out.push_str(&format_float(*v)),
                Cell::Text(s) => out.push_str(s),
                Cell::Missing => out.push_str(MISSING),
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv<W: Write>(
    out: &mut W,
    schema: &Schema,
    metadata: &[(String, String)],
    rows: &[Vec<Cell>],
) -> Result<(), CsvError> {
    let text = render(schema, metadata, rows)?;
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// A dataset read back from text.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Parsed {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Parsed {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    /// Numeric column; `NA` cells become `None`.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        self.column(name)?
            .into_iter()
            .map(|cell| {
                if cell == MISSING {
                    Some(None)
                } else {
                    cell.parse().ok().map(Some)
                }
            })
            .collect()
    }
}

pub fn parse(text: &str) -> Parsed {
    let mut parsed = Parsed::default();
    for line in text.lines() {
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                parsed
                    .metadata
                    .push((k.trim().to_owned(), v.trim().to_owned()));
            }
        } else if parsed.columns.is_empty() {
            parsed.columns = line.split(',').map(str::to_owned).collect();
        } else if !line.is_empty() {
            parsed
                .rows
                .push(line.split(',').map(str::to_owned).collect());
        }
    }
    parsed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_when_empty() {
        let text = render(&ENERGY, &[], &[]).unwrap();
        assert_eq!(text, "x,p,t_cl,t_conf,t_corr,v,h_total\n");
    }

    #[test]
    fn metadata_block_precedes_header() {
        let meta = vec![
            ("dataset".to_owned(), "sweep".to_owned()),
            ("sigma".to_owned(), "1.0".to_owned()),
        ];
        let text = render(&SWEEP, &meta, &[]).unwrap();
        assert!(text.starts_with("# dataset = sweep\n# sigma = 1.0\np0,"));
    }

    #[test]
    fn missing_values_are_na() {
        let row = vec![
            Cell::from(0.5),
            Cell::from(0.5),
            Cell::from(None::<f64>),
            Cell::from(Some(2.0)),
            Cell::from(10.0),
            Cell::from("deflection"),
        ];
        let text = render(&SWEEP, &[], &[row]).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "5.0000000000000000e-1,5.0000000000000000e-1,NA,2.0000000000000000e0,1.0000000000000000e1,deflection"
        );
        assert!(!line.ends_with(','));
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let err = render(&TRAJECTORY, &[], &[vec![Cell::from(1.0)]]).unwrap_err();
        assert!(matches!(
            err,
            CsvError::Arity {
                expected: 8,
                found: 1,
                row: 0,
                ..
            }
        ));
    }

    #[test]
    fn floats_round_trip_exactly() {
        let values = [
            0.1,
            -2.5,
            1.0 / 3.0,
            std::f64::consts::PI * 1e-300,
            6.02214076e23,
            f64::MIN_POSITIVE,
            f64::MAX,
            -0.0,
        ];
        let rows: Vec<Vec<Cell>> = values
            .chunks(1)
            .map(|c| (0..7).map(|_| Cell::from(c[0])).collect())
            .collect();
        let parsed = parse(&render(&ENERGY, &[], &rows).unwrap());
        let back: Vec<f64> = parsed
            .numbers("h_total")
            .unwrap()
            .into_iter()
            .map(Option::unwrap)
            .collect();
        for (a, b) in values.iter().zip(&back) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn parse_reads_metadata_and_na() {
        let text =
            "# model = classical\nx,p,t_cl,t_conf,t_corr,v,h_total\n1e0,2e0,NA,0e0,0e0,NA,NA\n";
        let parsed = parse(text);
        assert_eq!(parsed.meta("model"), Some("classical"));
        assert_eq!(parsed.numbers("x").unwrap(), vec![Some(1.0)]);
        assert_eq!(parsed.numbers("v").unwrap(), vec![None]);
    }
}
