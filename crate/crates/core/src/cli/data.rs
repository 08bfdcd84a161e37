//! Stratum data files: a header `stratum_id,N_h,n_h,c_h` and one row of
//! integers per stratum.

use std::io::Read;

use crate::design::{Design, StratumCounts};
use crate::error::{Error, Result};

pub const HEADER: [&str; 4] = ["stratum_id", "N_h", "n_h", "c_h"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumRow {
    pub stratum_id: u64,
    pub population_size: u64,
    pub sample_size: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumData {
    pub rows: Vec<StratumRow>,
}

impl StratumData {
    /// Parse rows. Syntax problems are [`Error::Parse`] with a 1-based file
    /// line and column; no semantic checks are made here.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        let mut saw_header = false;
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| {
                let row = e.position().map_or(i + 1, |p| p.line() as usize);
                Error::Parse {
                    row,
                    column: 0,
                    message: e.to_string(),
                }
            })?;
            let row = record.position().map_or(i + 1, |p| p.line() as usize);
            if !saw_header {
                saw_header = true;
                for (c, expected) in HEADER.iter().enumerate() {
                    if record.get(c) != Some(*expected) {
                        return Err(Error::Parse {
                            row,
                            column: c + 1,
                            message: format!("expected header {}", HEADER.join(",")),
                        });
                    }
                }
                if record.len() != HEADER.len() {
                    return Err(Error::Parse {
                        row,
                        column: HEADER.len() + 1,
                        message: format!("expected header {}", HEADER.join(",")),
                    });
                }
                continue;
            }
            if record.len() != HEADER.len() {
                return Err(Error::Parse {
                    row,
                    column: record.len().min(HEADER.len()) + 1,
                    message: format!("expected {} fields, found {}", HEADER.len(), record.len()),
                });
            }
            let mut values = [0u64; 4];
            for (c, field) in record.iter().enumerate() {
                values[c] = field.parse().map_err(|_| Error::Parse {
                    row,
                    column: c + 1,
                    message: format!("{} must be a nonnegative integer, got {field:?}", HEADER[c]),
                })?;
            }
            rows.push(StratumRow {
                stratum_id: values[0],
                population_size: values[1],
                sample_size: values[2],
                count: values[3],
            });
        }
        if !saw_header {
            return Err(Error::Parse {
                row: 1,
                column: 1,
                message: "empty file".into(),
            });
        }
        Ok(StratumData { rows })
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(std::fs::File::open(path)?)
    }

    /// Build the public design and the sample counts.
    pub fn to_design(&self) -> Result<(Design, StratumCounts)> {
        if self.rows.is_empty() {
            return Err(Error::InvalidDesign("the data file has no strata".into()));
        }
        let mut ids: Vec<u64> = self.rows.iter().map(|r| r.stratum_id).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidDesign(format!("duplicate stratum_id {}", w[0])));
        }
        let sizes: Vec<(u64, u64)> = self
            .rows
            .iter()
            .map(|r| (r.population_size, r.sample_size))
            .collect();
        let design = Design::from_sizes(&sizes)?;
        let counts = StratumCounts::new(self.rows.iter().map(|r| r.count).collect());
        counts.validate(&design)?;
        Ok((design, counts))
    }
}
