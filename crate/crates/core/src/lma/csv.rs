//! Feature CSV: the 55 canonical names followed by `label,group_id,window_start`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::layout::{FEATURE_COUNT, FEATURE_NAMES};
use super::WindowFeatures;

const TRAILING: [&str; 3] = ["label", "group_id", "window_start"];

/// Formats with 9 significant digits, like C's `%.9g`.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    let sci = format!("{v:.8e}");
    // rounding can bump the exponent (9.999999999 → 1.00000000e1)
    let exp = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse::<i32>().ok())
        .unwrap_or(exp);
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let (mantissa, e) = sci.split_once('e').expect("scientific format");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureTable {
    pub rows: Vec<WindowFeatures>,
}

pub fn write_features_csv(rows: &[WindowFeatures], writer: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let map = |e: csv::Error| Error::invalid(format!("csv: {e}"));
    w.write_record(FEATURE_NAMES.iter().copied().chain(TRAILING))
        .map_err(map)?;
    for row in rows {
        let mut rec: Vec<String> = row.values.iter().map(|v| format_sig9(*v)).collect();
        rec.push(row.label.clone().unwrap_or_default());
        rec.push(row.group_id.clone());
        rec.push(row.window_start.to_string());
        w.write_record(&rec).map_err(map)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn read_features_csv(reader: impl Read) -> Result<FeatureTable> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = r
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected: Vec<&str> = FEATURE_NAMES.iter().copied().chain(TRAILING).collect();
    let found: Vec<&str> = headers.iter().collect();
    if found != expected {
        let first_bad = expected
            .iter()
            .zip(&found)
            .position(|(a, b)| a != b)
            .unwrap_or(expected.len().min(found.len()));
        return Err(Error::SchemaMismatch(format!(
            "feature CSV header differs from the canonical layout at column {first_bad} ({} columns, {} expected)",
            found.len(),
            expected.len()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let mut values = [0.0; FEATURE_COUNT];
        for (k, v) in values.iter_mut().enumerate() {
            *v = rec[k].trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                message: format!("column `{}`: {e}", FEATURE_NAMES[k]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column `{}` is not finite", FEATURE_NAMES[k]),
                });
            }
        }
        let label = &rec[FEATURE_COUNT];
        rows.push(WindowFeatures {
            values,
            label: (!label.is_empty()).then(|| label.to_string()),
            group_id: rec[FEATURE_COUNT + 1].to_string(),
            window_start: rec[FEATURE_COUNT + 2]
                .trim()
                .parse()
                .map_err(|e| Error::Parse {
                    line,
                    message: format!("window_start: {e}"),
                })?,
        });
    }
    Ok(FeatureTable { rows })
}

impl FeatureTable {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        read_features_csv(std::io::BufReader::new(f))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        write_features_csv(&self.rows, std::io::BufWriter::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1.0), "1");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(-2.5), "-2.5");
        assert_eq!(format_sig9(123456789.4), "123456789");
        assert_eq!(format_sig9(9.9999999999), "10");
        assert_eq!(format_sig9(1.5e-7), "1.5e-7");
        assert_eq!(format_sig9(6.02214076e23), "6.02214076e23");
        for v in [0.1234567891, 987.654321987, 1e-5, 1.2345678987654] {
            let back: f64 = format_sig9(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-8);
        }
    }

    #[test]
    fn round_trip_and_schema_check() {
        let row = WindowFeatures {
            values: std::array::from_fn(|i| i as f64 * 0.5),
            window_start: 7,
            label: Some("pop".into()),
            group_id: "pop-01".into(),
        };
        let mut buf = Vec::new();
        write_features_csv(std::slice::from_ref(&row), &mut buf).unwrap();
        let table = read_features_csv(buf.as_slice()).unwrap();
        assert_eq!(table.rows, vec![row]);

        let text = String::from_utf8(buf)
            .unwrap()
            .replacen("body_dist_lhand_rhand", "x", 1);
        assert!(matches!(
            read_features_csv(text.as_bytes()),
            Err(Error::SchemaMismatch(_))
        ));
    }
}
