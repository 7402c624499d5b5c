//! Scan records and their JSONL / CSV encodings.
//!
//! Big integers are written as decimal strings. The JSONL schema is versioned
//! and unknown fields are rejected on read.

use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Factorizer;
use crate::cf::{expand, RootSpec};
use crate::equation::{equations, normalize_to_abc, ResultingEquation};
use crate::error::{Error, Result};
use crate::metrics::{approximation_gain, equation_metrics, format_metric};

pub const SCHEMA_VERSION: u32 = 1;

pub const FLAG_FACTORIZATION_SKIPPED: &str = "factorization-skipped";
pub const FLAG_ABC_HIT: &str = "abc-hit";
pub const FLAG_PROBABLE_PRIME: &str = "probable-prime";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRecord {
    pub schema: u32,
    pub k: u64,
    pub s: u32,
    pub n: usize,
    pub p: String,
    pub q: String,
    pub d: String,
    pub g: u64,
    pub a: String,
    pub b: String,
    pub c: String,
    pub rad_abc: Option<String>,
    pub quality: Option<f64>,
    pub approx_gain: Option<f64>,
    pub power_gain: Option<f64>,
    pub flags: Vec<String>,
}

impl ScanRecord {
    pub fn key(&self) -> (u64, u32, usize) {
        (self.k, self.s, self.n)
    }

    /// Record for one equation. A factorization that runs over budget leaves
    /// the radical-based fields empty and sets a flag.
    pub fn from_equation(eq: &ResultingEquation, factorizer: &Factorizer) -> Result<Self> {
        let triple = normalize_to_abc(eq)?;
        let root = eq.root();
        let mut record = ScanRecord {
            schema: SCHEMA_VERSION,
            k: root.k(),
            s: root.s(),
            n: eq.n(),
            p: eq.p().to_string(),
            q: eq.q().to_string(),
            d: eq.d().to_string(),
            g: eq.g(),
            a: triple.a().to_string(),
            b: triple.b().to_string(),
            c: triple.c().to_string(),
            rad_abc: None,
            quality: None,
            approx_gain: approximation_gain(eq).ok(),
            power_gain: None,
            flags: Vec::new(),
        };
        match equation_metrics(eq, &[], factorizer) {
            Ok(m) => {
                record.rad_abc = Some(m.rad_abc.to_string());
                record.quality = Some(m.quality);
                record.power_gain = m.power_gain;
                if m.is_hit {
                    record.flags.push(FLAG_ABC_HIT.into());
                }
                if m.probable_primes {
                    record.flags.push(FLAG_PROBABLE_PRIME.into());
                }
            }
            Err(Error::FactorizationBudgetExceeded { .. }) => {
                record.flags.push(FLAG_FACTORIZATION_SKIPPED.into());
            }
            Err(e) => return Err(e),
        }
        Ok(record)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn from_json_line(line: &str, line_no: usize) -> Result<Self> {
        let r: ScanRecord = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            line: line_no,
            message: e.to_string(),
        })?;
        if r.schema != SCHEMA_VERSION {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: format!("unsupported schema {}", r.schema),
            });
        }
        Ok(r)
    }
}

/// Records for every equation of `root` up to `depth` convergents.
pub fn root_records(root: RootSpec, depth: usize, factorizer: &Factorizer) -> Result<Vec<ScanRecord>> {
    let cf = expand(root, depth)?;
    equations(root, &cf.convergents())?
        .iter()
        .map(|eq| ScanRecord::from_equation(eq, factorizer))
        .collect()
}

/// Records for all non-power `k` in range, sorted by `(k, n)`.
pub fn scan_records(
    s: u32,
    k_range: RangeInclusive<u64>,
    depth: usize,
    factorizer: &Factorizer,
) -> Result<Vec<ScanRecord>> {
    let per_k: Vec<Result<Vec<ScanRecord>>> = k_range
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|k| RootSpec::new(k, s).ok())
        .map(|root| root_records(root, depth, factorizer))
        .collect();
    let mut out = Vec::new();
    for r in per_k {
        out.extend(r?);
    }
    out.sort_by_key(|r| (r.k, r.n));
    Ok(out)
}

pub fn read_jsonl(path: &Path) -> Result<Vec<ScanRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(ScanRecord::from_json_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(records: &[ScanRecord], mut w: W) -> Result<()> {
    for r in records {
        writeln!(w, "{}", r.to_json_line())?;
    }
    w.flush()?;
    Ok(())
}

const CSV_HEADER: [&str; 15] = [
    "k", "s", "n", "p", "q", "d", "g", "a", "b", "c", "rad_abc", "quality", "approx_gain", "power_gain", "flags",
];

fn opt_metric(x: Option<f64>) -> String {
    x.map(format_metric).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[ScanRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        out.write_record([
            r.k.to_string(),
            r.s.to_string(),
            r.n.to_string(),
            r.p.clone(),
            r.q.clone(),
            r.d.clone(),
            r.g.to_string(),
            r.a.clone(),
            r.b.clone(),
            r.c.clone(),
            r.rad_abc.clone().unwrap_or_default(),
            opt_metric(r.quality),
            opt_metric(r.approx_gain),
            opt_metric(r.power_gain),
            r.flags.join(";"),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub appended: usize,
    pub existing: usize,
}

/// Append the records of a scan to a JSONL file, skipping `(k, s, n)` keys
/// already present. Running the same scan twice appends nothing.
pub fn resume_scan(
    path: &Path,
    s: u32,
    k_range: RangeInclusive<u64>,
    depth: usize,
    factorizer: &Factorizer,
) -> Result<ScanSummary> {
    let existing: BTreeSet<_> = if path.exists() {
        read_jsonl(path)?.iter().map(ScanRecord::key).collect()
    } else {
        BTreeSet::new()
    };
    let fresh: Vec<ScanRecord> = scan_records(s, k_range, depth, factorizer)?
        .into_iter()
        .filter(|r| !existing.contains(&r.key()))
        .collect();
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    write_jsonl(&fresh, BufWriter::new(file))?;
    Ok(ScanSummary {
        appended: fresh.len(),
        existing: existing.len(),
    })
}
