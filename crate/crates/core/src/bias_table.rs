//! Persistent collection of debiasing constants.
//!
//! Stored as CSV with header
//! `version,k,d,alpha,estimator,kernel,bias,stderr,trials,m_trunc,seed`.
//! Floats are written in shortest round-trip form so a load after a store
//! reproduces every field bit for bit.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::bias::{BiasEntry, BiasKey, EstimatorKind};
use crate::error::{Error, Result};
use crate::kernels::KernelFamily;

pub const FORMAT_VERSION: u32 = 1;

const BUILTIN: &str = include_str!("../data/default_bias_table.csv");

const HEADER: [&str; 11] = [
    "version",
    "k",
    "d",
    "alpha",
    "estimator",
    "kernel",
    "bias",
    "stderr",
    "trials",
    "m_trunc",
    "seed",
];

/// Bias constants keyed by `(k, d, alpha, estimator)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BiasTable {
    entries: BTreeMap<BiasKey, BiasEntry>,
}

impl BiasTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts an entry, returning the one it replaced.
    pub fn insert(&mut self, entry: BiasEntry) -> Option<BiasEntry> {
        self.entries.insert(entry.key(), entry)
    }

    pub fn get(&self, key: &BiasKey) -> Option<&BiasEntry> {
        self.entries.get(key)
    }

    pub fn lookup(&self, k: usize, d: usize, alpha: f64, kind: EstimatorKind) -> Result<&BiasEntry> {
        let key = BiasKey::new(k, d, alpha, kind);
        self.entries
            .get(&key)
            .ok_or_else(|| Error::MissingBiasEntry(key.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &BiasEntry> {
        self.entries.values()
    }

    /// Adds every entry of `other`, replacing duplicates.
    pub fn merge(&mut self, other: BiasTable) {
        self.entries.extend(other.entries);
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(HEADER)?;
        for e in self.entries.values() {
            let (estimator, kernel) = match e.kind {
                EstimatorKind::Kde(f) => ("kde", f.name()),
                EstimatorKind::Llde => ("llde", "-"),
            };
            out.write_record([
                FORMAT_VERSION.to_string(),
                e.k.to_string(),
                e.d.to_string(),
                e.alpha.to_string(),
                estimator.to_string(),
                kernel.to_string(),
                e.bias.to_string(),
                e.stderr.to_string(),
                e.trials.to_string(),
                e.m_trunc.to_string(),
                e.seed.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parses a table. Input must end with a line terminator; a missing one
    /// means the file was cut short and is reported as corrupt.
    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        if !text.is_empty() && !text.ends_with('\n') {
            return Err(corrupt(
                text.lines().count(),
                "missing line terminator (truncated file?)".into(),
            ));
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut records = reader.records();
        let header = match records.next() {
            Some(rec) => rec.map_err(|e| corrupt(1, e.to_string()))?,
            None => return Err(corrupt(1, "missing header".into())),
        };
        if header.iter().ne(HEADER.iter().copied()) {
            return Err(corrupt(
                1,
                format!("unexpected header '{}'", header.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut table = BiasTable::new();
        for (i, rec) in records.enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| corrupt(line, e.to_string()))?;
            let entry = parse_record(&rec, line)?;
            let key = entry.key();
            if table.insert(entry).is_some() {
                return Err(corrupt(line, format!("duplicate entry {key}")));
            }
        }
        Ok(table)
    }

    pub fn store<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read(BufReader::new(File::open(path)?))
    }

    /// The table shipped with the crate: Gaussian-kernel KDE and LLDE
    /// constants for `k` in 4..=9, `d` in {1, 2, 3, 6}, `alpha` in {2, 3}.
    pub fn builtin() -> Result<Self> {
        Self::read(BUILTIN.as_bytes())
    }
}

impl FromIterator<BiasEntry> for BiasTable {
    fn from_iter<I: IntoIterator<Item = BiasEntry>>(iter: I) -> Self {
        let mut t = BiasTable::new();
        for e in iter {
            t.insert(e);
        }
        t
    }
}

fn corrupt(line: usize, reason: String) -> Error {
    Error::CorruptEntry { line, reason }
}

fn parse_record(rec: &csv::StringRecord, line: usize) -> Result<BiasEntry> {
    let version = rec.get(0).unwrap_or("");
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::FormatVersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    if rec.len() != HEADER.len() {
        return Err(corrupt(
            line,
            format!("expected {} fields, found {}", HEADER.len(), rec.len()),
        ));
    }
    fn field<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize, line: usize) -> Result<T> {
        let raw = &rec[idx];
        raw.parse()
            .map_err(|_| corrupt(line, format!("bad {} '{raw}'", HEADER[idx])))
    }
    let kind = match &rec[4] {
        "kde" => EstimatorKind::Kde(
            rec[5]
                .parse::<KernelFamily>()
                .map_err(|_| corrupt(line, format!("bad kernel '{}'", &rec[5])))?,
        ),
        "llde" => EstimatorKind::Llde,
        other => return Err(corrupt(line, format!("bad estimator '{other}'"))),
    };
    let entry = BiasEntry {
        k: field(rec, 1, line)?,
        d: field(rec, 2, line)?,
        alpha: field(rec, 3, line)?,
        kind,
        bias: field(rec, 6, line)?,
        stderr: field(rec, 7, line)?,
        trials: field(rec, 8, line)?,
        m_trunc: field(rec, 9, line)?,
        seed: field(rec, 10, line)?,
    };
    if entry.k == 0 || entry.d == 0 || entry.trials == 0 {
        return Err(corrupt(line, "k, d and trials must be positive".into()));
    }
    if !(entry.bias > 0.0) || !entry.bias.is_finite() || !(entry.stderr >= 0.0) || !entry.alpha.is_finite() {
        return Err(corrupt(
            line,
            "bias must be positive and finite, stderr nonnegative".into(),
        ));
    }
    Ok(entry)
}
