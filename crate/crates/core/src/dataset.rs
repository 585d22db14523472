//! Sample matrices and CSV ingestion.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// `n` points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    coords: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset from one vector per point.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyDataset)?;
        let d = first.as_ref().len();
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(coords, d)
    }

    /// Builds a dataset from a row-major coordinate buffer of width `d`.
    pub fn from_flat(coords: Vec<f64>, d: usize) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if coords.len() % d != 0 {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        let n = coords.len() / d;
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate {
                point: pos / d,
                column: pos % d,
            });
        }
        Ok(Self { coords, n, d })
    }

    /// 1-d convenience constructor.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `f` to every point, producing a dataset of dimension `d_out`.
    pub fn map_points<F>(&self, d_out: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut out = vec![0.0; self.n * d_out];
        for (src, dst) in self.points().zip(out.chunks_exact_mut(d_out)) {
            f(src, dst);
        }
        Self::from_flat(out, d_out)
    }

    /// Multiplies every coordinate by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::from_flat(self.coords.iter().map(|v| v * s).collect(), self.d)
    }

    /// Reads a dataset from CSV: one row per sample, `d` numeric columns.
    ///
    /// A first row that does not parse as numbers is treated as a header.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut coords = Vec::new();
        let mut d = None;
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(|f| f.parse::<f64>()).collect();
            let row = match parsed {
                Ok(row) => row,
                Err(_) if line == 0 => continue,
                Err(e) => {
                    return Err(Error::CorruptEntry {
                        line: line + 1,
                        reason: e.to_string(),
                    })
                }
            };
            match d {
                None => d = Some(row.len()),
                Some(expected) if expected != row.len() => {
                    return Err(Error::DimensionMismatch {
                        expected,
                        got: row.len(),
                    })
                }
                _ => {}
            }
            coords.extend(row);
        }
        Self::from_flat(coords, d.ok_or(Error::EmptyDataset)?)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Writes the points as headerless CSV, one row per sample.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_singleton() {
        assert!(matches!(Dataset::from_flat(vec![], 1), Err(Error::EmptyDataset)));
        let rows: Vec<Vec<f64>> = vec![];
        assert!(matches!(Dataset::from_rows(&rows), Err(Error::EmptyDataset)));
        assert!(matches!(Dataset::from_scalars(&[1.0]), Err(Error::TooFewPoints(1))));
    }

    #[test]
    fn rejects_ragged_rows_and_nan() {
        let err = Dataset::from_rows(&[vec![0.0, 1.0], vec![2.0]]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, got: 1 }));
        let err = Dataset::from_rows(&[vec![0.0, 1.0], vec![2.0, f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCoordinate { point: 1, column: 1 }));
    }

    #[test]
    fn csv_with_and_without_header() {
        let with = "x,y\n0,1\n2,3.5\n";
        let without = "0,1\n2,3.5\n";
        let a = Dataset::read_csv(with.as_bytes()).unwrap();
        let b = Dataset::read_csv(without.as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.n(), 2);
        assert_eq!(a.d(), 2);
        assert_eq!(a.point(1), &[2.0, 3.5]);
    }

    #[test]
    fn csv_bad_row_is_reported() {
        let err = Dataset::read_csv("0,1\n2,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::CorruptEntry { line: 2, .. }));
    }

    #[test]
    fn csv_write_read_round_trip() {
        let ds = Dataset::from_rows(&[vec![0.1, -2.5e-7], vec![3.0, 1.0 / 3.0]]).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(Dataset::read_csv(buf.as_slice()).unwrap(), ds);
    }
}
