//! Comma-separated company and relationship files.
//!
//! Missing values are empty fields. Relationship shares are written as
//! percentages in (0, 100] and held in memory as fractions.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::graph::{Company, CompanyId, GicsSector, Relationship};
use crate::scalar::Scalar;

pub const COMPANY_HEADER: [&str; 8] = [
    "id",
    "name",
    "has_public_identifier",
    "cds_5y_bps",
    "default_prob",
    "market_cap_billions",
    "gics_sector",
    "country_of_risk",
];

pub const RELATIONSHIP_HEADER: [&str; 4] = [
    "supplier_id",
    "customer_id",
    "revenue_share_pct",
    "cost_share_pct",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("bad header: expected `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_companies<T: Scalar>(path: &Path) -> Result<Vec<Company<T>>, IngestError> {
    read_companies(open(path)?)
}

pub fn parse_relationships<T: Scalar>(path: &Path) -> Result<Vec<Relationship<T>>, IngestError> {
    read_relationships(open(path)?)
}

fn reader<R: Read>(input: R, expected: &[&str]) -> Result<csv::Reader<R>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let found: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    if found != expected {
        return Err(IngestError::Header {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(rdr)
}

struct Fields<'a> {
    record: &'a csv::StringRecord,
    line: u64,
}

impl Fields<'_> {
    fn err(&self, message: impl Into<String>) -> IngestError {
        IngestError::Row {
            line: self.line,
            message: message.into(),
        }
    }

    fn text(&self, i: usize) -> &str {
        self.record.get(i).unwrap_or("").trim()
    }

    fn required(&self, i: usize, name: &str) -> Result<&str, IngestError> {
        let s = self.text(i);
        if s.is_empty() {
            Err(self.err(format!("{name} is empty")))
        } else {
            Ok(s)
        }
    }

    fn number<T: Scalar>(&self, i: usize, name: &str) -> Result<Option<T>, IngestError> {
        let s = self.text(i);
        if s.is_empty() {
            return Ok(None);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| self.err(format!("{name} `{s}` is not a number")))?;
        if !v.is_finite() {
            return Err(self.err(format!("{name} `{s}` is not finite")));
        }
        Ok(Some(T::c(v)))
    }

    fn boolean(&self, i: usize, name: &str) -> Result<bool, IngestError> {
        match self.text(i).to_ascii_lowercase().as_str() {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" | "" => Ok(false),
            other => Err(self.err(format!("{name} `{other}` is not a boolean"))),
        }
    }

    fn percentage<T: Scalar>(&self, i: usize, name: &str) -> Result<Option<T>, IngestError> {
        match self.number::<T>(i, name)? {
            None => Ok(None),
            Some(pct) if pct > T::zero() && pct <= T::c(100.0) => Ok(Some(pct / T::c(100.0))),
            Some(pct) => Err(self.err(format!("{name} {pct} outside (0,100]"))),
        }
    }
}

fn check_width(f: &Fields<'_>, width: usize) -> Result<(), IngestError> {
    if f.record.len() != width {
        return Err(f.err(format!("expected {width} fields, found {}", f.record.len())));
    }
    Ok(())
}

/// The whole input is rejected on the first malformed row.
pub fn read_companies<T: Scalar, R: Read>(input: R) -> Result<Vec<Company<T>>, IngestError> {
    let mut rdr = reader(input, &COMPANY_HEADER)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let f = Fields {
            record: &record,
            line,
        };
        check_width(&f, COMPANY_HEADER.len())?;
        let sector_text = f.required(6, "gics_sector")?;
        let gics_sector: GicsSector = sector_text
            .parse()
            .map_err(|e: crate::graph::UnknownSector| f.err(e.to_string()))?;
        out.push(Company {
            id: CompanyId(f.required(0, "id")?.to_owned()),
            name: f.text(1).to_owned(),
            has_public_identifier: f.boolean(2, "has_public_identifier")?,
            cds_5y_bps: f.number(3, "cds_5y_bps")?,
            default_prob: f.number(4, "default_prob")?,
            market_cap_billions: f.number(5, "market_cap_billions")?,
            gics_sector,
            country_of_risk: f.required(7, "country_of_risk")?.to_owned(),
        });
    }
    Ok(out)
}

pub fn read_relationships<T: Scalar, R: Read>(
    input: R,
) -> Result<Vec<Relationship<T>>, IngestError> {
    let mut rdr = reader(input, &RELATIONSHIP_HEADER)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let f = Fields {
            record: &record,
            line,
        };
        check_width(&f, RELATIONSHIP_HEADER.len())?;
        out.push(Relationship {
            supplier_id: CompanyId(f.required(0, "supplier_id")?.to_owned()),
            customer_id: CompanyId(f.required(1, "customer_id")?.to_owned()),
            revenue_share: f.percentage(2, "revenue_share_pct")?,
            cost_share: f.percentage(3, "cost_share_pct")?,
        });
    }
    Ok(out)
}

fn opt<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| format!("{}", x)).unwrap_or_default()
}

fn pct<T: Scalar>(v: Option<T>) -> String {
    opt(v.map(|x| x * T::c(100.0)))
}

pub fn write_companies<T: Scalar, W: Write>(
    out: W,
    companies: &[Company<T>],
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COMPANY_HEADER)?;
    for c in companies {
        w.write_record([
            c.id.as_str(),
            &c.name,
            if c.has_public_identifier {
                "true"
            } else {
                "false"
            },
            &opt(c.cds_5y_bps),
            &opt(c.default_prob),
            &opt(c.market_cap_billions),
            c.gics_sector.name(),
            &c.country_of_risk,
        ])?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_relationships<T: Scalar, W: Write>(
    out: W,
    relationships: &[Relationship<T>],
) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RELATIONSHIP_HEADER)?;
    for r in relationships {
        w.write_record([
            r.supplier_id.as_str(),
            r.customer_id.as_str(),
            &pct(r.revenue_share),
            &pct(r.cost_share),
        ])?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}
