//! One row per solution: the twelve features, the missing-data flags and
//! the cascade size. Persisted as CSV with a fixed column order.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES, FLAG_NAMES};

pub const PI_COLUMN: &str = "pi";
pub const LABEL_COLUMN: &str = "config_label";
pub const INDEX_COLUMN: &str = "solution_index";

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub solution_index: usize,
    pub features: FeatureVector,
    pub pi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTable {
    pub config_label: String,
    pub n_agents: usize,
    pub rows: Vec<RunRow>,
}

/// Header names in file order.
pub fn header() -> Vec<&'static str> {
    FEATURE_NAMES
        .iter()
        .chain(FLAG_NAMES.iter())
        .copied()
        .chain([PI_COLUMN, LABEL_COLUMN, INDEX_COLUMN])
        .collect()
}

/// Reals are written with 17 significant digits, which round-trips every
/// `f64` exactly.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

impl RunTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn percolations(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.pi).collect()
    }

    /// Values of one feature column by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = FEATURE_NAMES.iter().position(|n| *n == name)?;
        Some(self.rows.iter().map(|r| r.features.values()[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header()).map_err(csv_error)?;
        for row in &self.rows {
            let f = &row.features;
            let record = [
                real(f.seed_mean_degree),
                f.seed_max_degree.to_string(),
                real(f.nbr_min_degree),
                real(f.nbr_mean_degree),
                real(f.nbr_max_degree),
                real(f.nbr_min_threshold),
                real(f.nbr_mean_threshold),
                real(f.nbr_max_threshold),
                f.below_count.to_string(),
                real(f.step1_min_threshold),
                real(f.step1_mean_threshold),
                real(f.step1_max_threshold),
                flag(f.nbr_missing).into(),
                flag(f.step1_missing).into(),
                real(row.pi),
                self.config_label.clone(),
                row.solution_index.to_string(),
            ];
            w.write_record(&record).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses a table. The file does not carry the population size, so it
    /// is supplied by the caller.
    pub fn read_csv<R: Read>(input: R, n_agents: usize) -> Result<RunTable> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        let mut index = Vec::new();
        for name in header() {
            let pos = headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Data(format!("missing column `{name}`")))?;
            index.push(pos);
        }

        let mut rows = Vec::new();
        let mut label: Option<String> = None;
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            let field = |k: usize| -> &str { record.get(index[k]).unwrap_or("") };
            let real = |k: usize| -> Result<f64> {
                field(k).trim().parse::<f64>().map_err(|e| Error::Csv {
                    line,
                    message: format!("column `{}`: {e}", header()[k]),
                })
            };
            let count = |k: usize| -> Result<usize> {
                field(k).trim().parse::<usize>().map_err(|e| Error::Csv {
                    line,
                    message: format!("column `{}`: {e}", header()[k]),
                })
            };
            let boolean = |k: usize| -> Result<bool> {
                match field(k).trim() {
                    "1" | "true" => Ok(true),
                    "0" | "false" => Ok(false),
                    other => Err(Error::Csv {
                        line,
                        message: format!(
                            "column `{}`: expected 0 or 1, got `{other}`",
                            header()[k]
                        ),
                    }),
                }
            };
            let features = FeatureVector {
                seed_mean_degree: real(0)?,
                seed_max_degree: count(1)?,
                nbr_min_degree: real(2)?,
                nbr_mean_degree: real(3)?,
                nbr_max_degree: real(4)?,
                nbr_min_threshold: real(5)?,
                nbr_mean_threshold: real(6)?,
                nbr_max_threshold: real(7)?,
                below_count: count(8)?,
                step1_min_threshold: real(9)?,
                step1_mean_threshold: real(10)?,
                step1_max_threshold: real(11)?,
                nbr_missing: boolean(12)?,
                step1_missing: boolean(13)?,
            };
            let pi = real(14)?;
            if !(0.0..=1.0).contains(&pi) {
                return Err(Error::Csv {
                    line,
                    message: format!("pi = {pi} is outside [0, 1]"),
                });
            }
            if label.is_none() {
                label = Some(field(15).to_string());
            }
            rows.push(RunRow {
                solution_index: count(16)?,
                features,
                pi,
            });
        }
        Ok(RunTable {
            config_label: label.unwrap_or_default(),
            n_agents,
            rows,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => Error::Csv {
            line,
            message: format!("{kind:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize, pi: f64) -> RunRow {
        RunRow {
            solution_index: i,
            features: FeatureVector {
                seed_mean_degree: 10.2,
                seed_max_degree: 14,
                nbr_min_degree: 3.0,
                nbr_mean_degree: 9.875,
                nbr_max_degree: 19.0,
                nbr_min_threshold: 0.1,
                nbr_mean_threshold: 1.0 / 3.0,
                nbr_max_threshold: 0.99,
                below_count: 4,
                step1_min_threshold: 0.5,
                step1_mean_threshold: 0.5,
                step1_max_threshold: 0.5,
                nbr_missing: false,
                step1_missing: i.is_multiple_of(2),
            },
            pi,
        }
    }

    fn table() -> RunTable {
        RunTable {
            config_label: "demo, with comma".into(),
            n_agents: 1000,
            rows: (0..3)
                .map(|i| row(i, 0.005 + i as f64 * 0.1234567))
                .collect(),
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let t = table();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("seed_mean_deg,seed_max_deg,nbr_min_deg,"));
        assert!(text
            .lines()
            .next()
            .unwrap()
            .ends_with("pi,config_label,solution_index"));
        assert_eq!(text.lines().count(), 4);
        let back = RunTable::read_csv(buf.as_slice(), 1000).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn missing_column_is_named() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf)
            .unwrap()
            .replacen("below", "under", 1);
        match RunTable::read_csv(text.as_bytes(), 1000) {
            Err(Error::Data(msg)) => assert!(msg.contains("`below`"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_file_reports_line() {
        let mut buf = Vec::new();
        table().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 30];
        match RunTable::read_csv(cut.as_bytes(), 1000) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
