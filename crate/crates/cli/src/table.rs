use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::scenario::Format;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub scenario: Value,
    pub version: String,
    pub seed: u64,
    pub wall_time_s: f64,
    /// Scalar results that do not fit the row layout.
    pub summary: BTreeMap<String, f64>,
}

/// Homogeneous numeric rows under named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Option<Metadata>,
}

#[derive(Serialize, Deserialize)]
struct JsonColumn {
    name: String,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    columns: Vec<JsonColumn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Metadata>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { columns, rows: Vec::new(), metadata: None }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row length must match the column count");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        let j = self.columns.iter().position(|c| c == name)?;
        self.rows.last().map(|r| r[j])
    }
}

/// Seventeen significant digits, enough to re-read every f64 exactly.
fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV carries only the header and rows, so identical inputs give identical
/// bytes. JSON adds the metadata block.
pub fn emit(table: &ResultTable, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let csv_err = |e: csv::Error| CliError::Table(e.to_string());
            w.write_record(&table.columns).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|&x| format_float(x))).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| CliError::Table(e.to_string()))
        }
        Format::Json => {
            let columns = table
                .columns
                .iter()
                .enumerate()
                .map(|(j, name)| JsonColumn { name: name.clone(), values: table.rows.iter().map(|r| r[j]).collect() })
                .collect();
            let doc = JsonTable { columns, metadata: table.metadata.clone() };
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Table(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn parse(bytes: &[u8], format: Format) -> Result<ResultTable, CliError> {
    match format {
        Format::Csv => {
            let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
            let columns: Vec<String> = r
                .headers()
                .map_err(|e| CliError::Table(e.to_string()))?
                .iter()
                .map(str::to_string)
                .collect();
            let mut table = ResultTable::new(columns);
            for rec in r.records() {
                let rec = rec.map_err(|e| CliError::Table(e.to_string()))?;
                let row = rec
                    .iter()
                    .map(|f| f.parse::<f64>().map_err(|e| CliError::Table(format!("{f:?}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != table.columns.len() {
                    return Err(CliError::Table("row length differs from header".into()));
                }
                table.rows.push(row);
            }
            Ok(table)
        }
        Format::Json => {
            let doc: JsonTable = serde_json::from_slice(bytes).map_err(|e| CliError::Table(e.to_string()))?;
            let n = doc.columns.first().map_or(0, |c| c.values.len());
            if doc.columns.iter().any(|c| c.values.len() != n) {
                return Err(CliError::Table("columns have different lengths".into()));
            }
            let rows = (0..n).map(|i| doc.columns.iter().map(|c| c.values[i]).collect()).collect();
            Ok(ResultTable { columns: doc.columns.into_iter().map(|c| c.name).collect(), rows, metadata: doc.metadata })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(vec!["t".into(), "N".into()]);
        t.push(vec![0.0, 1e5]);
        t.push(vec![0.1, 99_999.123_456_789_01]);
        t.push(vec![-3.5e-300, f64::MAX]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new(vec!["a".into(), "b".into()]);
        assert_eq!(emit(&t, Format::Csv).unwrap(), b"a,b\n");
        assert_eq!(parse(b"a,b\n", Format::Csv).unwrap(), t);
    }

    #[test]
    fn tenth_round_trips_bit_exactly() {
        let mut t = ResultTable::new(vec!["x".into()]);
        t.push(vec![0.1]);
        let csv = emit(&t, Format::Csv).unwrap();
        assert_eq!(std::str::from_utf8(&csv).unwrap(), "x\n1.0000000000000001e-1\n");
        assert_eq!(parse(&csv, Format::Csv).unwrap().rows[0][0].to_bits(), 0.1f64.to_bits());
    }

    #[test]
    fn json_round_trip_keeps_metadata() {
        let mut t = sample();
        t.metadata = Some(Metadata {
            scenario: serde_json::json!({"kind": "bec", "parameters": {"k1": 0.001}}),
            version: "0.1.0".into(),
            seed: 7,
            wall_time_s: 0.25,
            summary: BTreeMap::from([("final".to_string(), 0.9046)]),
        });
        assert_eq!(parse(&emit(&t, Format::Json).unwrap(), Format::Json).unwrap(), t);
    }

    #[test]
    fn csv_uses_lf_only() {
        let csv = emit(&sample(), Format::Csv).unwrap();
        assert!(!csv.contains(&b'\r'));
        assert_eq!(csv.iter().filter(|&&b| b == b'\n').count(), 4);
    }

    proptest! {
        #[test]
        fn any_finite_table_round_trips(
            rows in proptest::collection::vec(proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 3), 0..20)
        ) {
            let mut t = ResultTable::new(vec!["a".into(), "b".into(), "c".into()]);
            for r in rows {
                t.push(r);
            }
            for f in [Format::Csv, Format::Json] {
                let back = parse(&emit(&t, f).unwrap(), f).unwrap();
                prop_assert_eq!(back.columns.clone(), t.columns.clone());
                for (a, b) in back.rows.iter().flatten().zip(t.rows.iter().flatten()) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
        }
    }
}
