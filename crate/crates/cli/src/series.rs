//! Series file emission and parsing.
//!
//! CSV: comma-separated, one header row, LF line endings, numeric-only body.
//! JSON: a single object with a `params` stamp, the `columns` list, and
//! `rows` as arrays of numbers. Both carry every value with 17 significant
//! digits so cross-solver diffs stay meaningful.

use crate::error::CliError;

/// 17 significant decimal digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.16e}", x)
}

/// A parameter stamp entry for the JSON header.
#[derive(Debug, Clone)]
pub enum ParamValue {
    Num(f64),
    Int(u64),
    Str(&'static str),
    Null,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn write_csv(series: &Series) -> String {
    let mut out = String::new();
    out.push_str(&series.columns.join(","));
    out.push('\n');
    for row in &series.rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_json(series: &Series, params: &[(&str, ParamValue)]) -> String {
    let mut out = String::from("{\n  \"params\": {");
    for (i, (key, value)) in params.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("\n    ");
        out.push_str(&format!("{key:?}: "));
        match value {
            ParamValue::Num(x) => out.push_str(&fmt_float(*x)),
            ParamValue::Int(n) => out.push_str(&n.to_string()),
            ParamValue::Str(s) => out.push_str(&format!("{s:?}")),
            ParamValue::Null => out.push_str("null"),
        }
    }
    out.push_str("\n  },\n  \"columns\": [");
    for (i, c) in series.columns.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&format!("{c:?}"));
    }
    out.push_str("],\n  \"rows\": [");
    for (i, row) in series.rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("\n    [");
        let cells: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        out.push_str(&cells.join(", "));
        out.push(']');
    }
    out.push_str("\n  ]\n}\n");
    out
}

pub fn parse_csv(text: &str) -> Result<Series, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Runtime("malformed series file: missing header row".into()))?;
    let columns: Vec<String> = header.split(',').map(str::to_owned).collect();
    if columns.iter().any(|c| c.is_empty()) {
        return Err(CliError::Runtime(
            "malformed series file: empty column name".into(),
        ));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(CliError::Runtime(format!(
                "malformed series file: row {} has {} cells, expected {}",
                k + 1,
                cells.len(),
                columns.len()
            )));
        }
        let row = cells
            .iter()
            .map(|c| {
                c.parse::<f64>().map_err(|_| {
                    CliError::Runtime(format!(
                        "malformed series file: row {} has non-numeric cell {c:?}",
                        k + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(row);
    }
    Ok(Series { columns, rows })
}

/// Parse a JSON series document; also returns the flattened parameter stamp
/// for use in plot titles.
pub fn parse_json(text: &str) -> Result<(Series, Option<String>), CliError> {
    let doc: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::Runtime(format!("malformed series file: {e}")))?;
    let columns = doc
        .get("columns")
        .and_then(|c| c.as_array())
        .ok_or_else(|| CliError::Runtime("malformed series file: missing columns".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_owned)
                .ok_or_else(|| CliError::Runtime("malformed series file: bad column name".into()))
        })
        .collect::<Result<Vec<String>, CliError>>()?;
    let rows = doc
        .get("rows")
        .and_then(|r| r.as_array())
        .ok_or_else(|| CliError::Runtime("malformed series file: missing rows".into()))?
        .iter()
        .map(|row| {
            let cells = row
                .as_array()
                .ok_or_else(|| CliError::Runtime("malformed series file: bad row".into()))?;
            if cells.len() != columns.len() {
                return Err(CliError::Runtime(format!(
                    "malformed series file: row has {} cells, expected {}",
                    cells.len(),
                    columns.len()
                )));
            }
            cells
                .iter()
                .map(|v| {
                    v.as_f64().ok_or_else(|| {
                        CliError::Runtime("malformed series file: non-numeric cell".into())
                    })
                })
                .collect::<Result<Vec<f64>, CliError>>()
        })
        .collect::<Result<Vec<Vec<f64>>, CliError>>()?;
    let title = doc.get("params").and_then(|p| p.as_object()).map(|obj| {
        obj.iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<String>>()
            .join(" ")
    });
    Ok((Series { columns, rows }, title))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            0.0,
            -0.0,
            1.0,
            -1.0,
            0.05,
            1.0 / 3.0,
            9.999999999999e-13,
            123456.789,
        ] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, if x == 0.0 { 0.0 } else { x }, "{s}");
        }
        assert_eq!(fmt_float(-0.0), "0.0000000000000000e0");
    }

    #[test]
    fn csv_round_trip() {
        let series = Series {
            columns: vec!["tau".into(), "W".into()],
            rows: vec![vec![0.0, -1.0], vec![0.05, -0.999]],
        };
        let text = write_csv(&series);
        assert!(text.starts_with("tau,W\n"));
        assert!(!text.contains('\r'));
        let back = parse_csv(&text).unwrap();
        assert_eq!(back.columns, series.columns);
        assert_eq!(back.rows, series.rows);
    }

    #[test]
    fn csv_parse_rejects_damage() {
        assert!(parse_csv("tau,W\n1.0\n").is_err());
        assert!(parse_csv("tau,W\n1.0,abc\n").is_err());
    }

    #[test]
    fn json_round_trip_with_params() {
        let series = Series {
            columns: vec!["tau".into(), "S".into()],
            rows: vec![vec![0.0, 0.0], vec![0.05, 0.1]],
        };
        let text = write_json(
            &series,
            &[
                ("lambda1", ParamValue::Num(0.3)),
                ("solver", ParamValue::Str("exact")),
            ],
        );
        let (back, title) = parse_json(&text).unwrap();
        assert_eq!(back.columns, series.columns);
        assert_eq!(back.rows, series.rows);
        assert!(title.unwrap().contains("lambda1"));
    }
}
