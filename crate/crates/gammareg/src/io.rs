//! Sample CSV input, report CSV output and JSON number handling.

use std::path::Path;
use std::sync::Arc;

use gammareg_core::{ExtReal, Grid, Point, SampledFunction};
use serde_json::Value;

use crate::CliError;

const AXES: [&str; 3] = ["x", "y", "z"];
const DUAL_AXES: [&str; 3] = ["p", "q", "r"];

fn samples_error(message: impl Into<String>) -> CliError {
    CliError::Spec {
        key: "samples".into(),
        message: message.into(),
    }
}

/// Reads `x[,y[,z]],value` rows and assigns each to the grid node within
/// `eps_geom`. Every node needs exactly one row.
pub fn read_samples(path: &Path, grid: Arc<Grid>) -> Result<SampledFunction, CliError> {
    let dim = grid.dim();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| samples_error(e.to_string()))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| samples_error(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut want: Vec<&str> = AXES[..dim].to_vec();
    want.push("value");
    if header != want {
        return Err(samples_error(format!(
            "header must be `{}`, got `{}`",
            want.join(","),
            header.join(",")
        )));
    }
    let mut values: Vec<Option<ExtReal>> = vec![None; grid.len()];
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| samples_error(e.to_string()))?;
        let line = i + 2;
        let num = |s: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| samples_error(format!("line {line}: `{s}` is not a finite number")))
        };
        let coords: Vec<f64> = (0..dim).map(|k| num(&row[k])).collect::<Result<_, _>>()?;
        let value = match &row[dim] {
            "inf" => ExtReal::INFINITY,
            s => ExtReal::finite(num(s)?),
        };
        let p = Point::new(&coords);
        let node = grid
            .find_node(&p)
            .ok_or_else(|| samples_error(format!("line {line}: no grid node at {coords:?}")))?;
        if values[node].replace(value).is_some() {
            return Err(samples_error(format!("line {line}: node at {coords:?} given twice")));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(n, v)| v.ok_or_else(|| samples_error(format!("no value for the node at {:?}", grid.node(n)))))
        .collect::<Result<Vec<_>, _>>()?;
    SampledFunction::new(grid, values).map_err(|e| samples_error(e.to_string()))
}

/// Shortest round-trip decimal; `+inf` as `inf`.
pub fn fmt_num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// JSON number, or a string for non-finite values.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(fmt_num(v)), Value::Number)
}

pub fn ext(v: ExtReal) -> Value {
    num(v.value())
}

pub fn point(p: &Point) -> Value {
    Value::Array(p.coords().iter().map(|&c| num(c)).collect())
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&c| num(c)).collect())
}

/// Comma-separated table with LF line endings.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        let mut text = columns.join(",");
        text.push('\n');
        Table { text }
    }

    /// Header with the coordinate names for `dim` primal axes, then `rest`.
    pub fn with_coords(dim: usize, rest: &[&str]) -> Table {
        let mut cols: Vec<&str> = AXES[..dim].to_vec();
        cols.extend_from_slice(rest);
        Table::new(&cols)
    }

    /// Same with slope-space axis names.
    pub fn with_slopes(dim: usize, rest: &[&str]) -> Table {
        let mut cols: Vec<&str> = DUAL_AXES[..dim].to_vec();
        cols.extend_from_slice(rest);
        Table::new(&cols)
    }

    /// Appends a row: a leading label (if any), the point, then the numbers.
    pub fn row(&mut self, label: Option<&str>, p: Option<&Point>, vals: &[f64]) {
        let mut first = true;
        let mut sep = |t: &mut String| {
            if !first {
                t.push(',');
            }
            first = false;
        };
        if let Some(l) = label {
            sep(&mut self.text);
            self.text.push_str(l);
        }
        for &c in p.map(Point::coords).unwrap_or(&[]) {
            sep(&mut self.text);
            self.text.push_str(&fmt_num(c));
        }
        for &v in vals {
            sep(&mut self.text);
            self.text.push_str(&fmt_num(v));
        }
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gammareg_core::Domain;
    use std::io::Write;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -2.5e-300, 1e21, 123456.789, -0.0, 3.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
    }

    #[test]
    fn table_layout() {
        let mut t = Table::with_coords(2, &["h"]);
        t.row(None, Some(&Point::new(&[0.5, 1.0])), &[f64::INFINITY]);
        t.row(Some("a"), None, &[1.25]);
        assert_eq!(t.as_str(), "x,y,h\n0.5,1,inf\na,1.25\n");
    }

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::build(Domain::new_box(&[0.0], &[1.0]).unwrap(), &[2]).unwrap())
    }

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn samples_in_any_order() {
        let f = write("x,value\n1,inf\n0,2\n0.5000000000001,1\n");
        let h = read_samples(f.path(), grid()).unwrap();
        assert_eq!(h.value(0), ExtReal::finite(2.0));
        assert_eq!(h.value(1), ExtReal::finite(1.0));
        assert!(h.value(2).is_infinite());
    }

    #[test]
    fn bad_samples_are_rejected() {
        for text in [
            "x,v\n0,1\n0.5,1\n1,1\n",
            "x,value\n0,1\n0.5,1\n",
            "x,value\n0,1\n0.5,1\n1,1\n0.7,1\n",
            "x,value\n0,1\n0,2\n0.5,1\n1,1\n",
            "x,value\n0,-inf\n0.5,1\n1,1\n",
            "x,value\n0,inf\n0.5,inf\n1,inf\n",
        ] {
            let f = write(text);
            match read_samples(f.path(), grid()) {
                Err(CliError::Spec { key, .. }) => assert_eq!(key, "samples"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
