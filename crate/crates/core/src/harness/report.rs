//! Report rows and their CSV / JSON encodings.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rational::{to_big, Rational};

/// One checked relation `lhs <relation> rhs` on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub suite: String,
    pub instance: u64,
    pub check: String,
    pub lhs: String,
    pub relation: String,
    pub rhs: String,
    /// `rhs - lhs`; nonnegative for every holding `<=` row.
    pub margin: String,
    pub holds: bool,
    /// `exact`, `float` or `sampled`.
    pub arithmetic: String,
    pub detail: String,
    /// Wall time in milliseconds, only filled when timing is requested.
    pub runtime_ms: Option<u64>,
}

/// Relation between the two sides of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

impl Rel {
    fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "==",
        }
    }

    fn test<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            Rel::Le => a <= b,
            Rel::Lt => a < b,
            Rel::Eq => a == b,
        }
    }
}

fn fmt_big(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl ReportRecord {
    fn base(suite: &str, instance: u64, check: &str, rel: Rel) -> Self {
        ReportRecord {
            suite: suite.into(),
            instance,
            check: check.into(),
            lhs: String::new(),
            relation: rel.symbol().into(),
            rhs: String::new(),
            margin: String::new(),
            holds: false,
            arithmetic: "exact".into(),
            detail: String::new(),
            runtime_ms: None,
        }
    }

    pub fn exact(suite: &str, instance: u64, check: &str, lhs: &Rational, rel: Rel, rhs: &Rational) -> Self {
        Self::big(suite, instance, check, &to_big(lhs), rel, &to_big(rhs))
    }

    pub fn big(suite: &str, instance: u64, check: &str, lhs: &BigRational, rel: Rel, rhs: &BigRational) -> Self {
        ReportRecord {
            lhs: fmt_big(lhs),
            rhs: fmt_big(rhs),
            margin: fmt_big(&(rhs - lhs)),
            holds: rel.test(lhs, rhs),
            ..Self::base(suite, instance, check, rel)
        }
    }

    pub fn count(suite: &str, instance: u64, check: &str, lhs: u64, rel: Rel, rhs: u64) -> Self {
        ReportRecord {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            margin: (i128::from(rhs) - i128::from(lhs)).to_string(),
            holds: rel.test(&lhs, &rhs),
            ..Self::base(suite, instance, check, rel)
        }
    }

    pub fn float(suite: &str, instance: u64, check: &str, lhs: f64, rel: Rel, rhs: f64) -> Self {
        ReportRecord {
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            margin: (rhs - lhs).to_string(),
            holds: rel.test(&lhs, &rhs),
            arithmetic: "float".into(),
            ..Self::base(suite, instance, check, rel)
        }
    }

    pub fn sampled(self) -> Self {
        ReportRecord { arithmetic: "sampled".into(), ..self }
    }

    pub fn with_detail(self, detail: impl Into<String>) -> Self {
        ReportRecord { detail: detail.into(), ..self }
    }
}

pub fn to_json(records: &[ReportRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn from_json(s: &str) -> Result<Vec<ReportRecord>> {
    Ok(serde_json::from_str(s)?)
}

pub fn write_csv<W: Write>(records: &[ReportRecord], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_csv(records: &[ReportRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(records, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ReportRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// Rows that do not hold.
pub fn failures(records: &[ReportRecord]) -> Vec<&ReportRecord> {
    records.iter().filter(|r| !r.holds).collect()
}
