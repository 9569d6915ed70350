//! The sweep CSV schema (version 1).
//!
//! One row per grid cell. Reals are written with 17 significant digits so
//! that a read-back is bit-exact; missing values are empty fields.

use crate::error::{Error, Result};
use crate::practice::DPHistory;
use std::io::{Read, Write};

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 25] = [
    "schema_version",
    "cell_id",
    "strategy",
    "xi",
    "exponent",
    "d",
    "n",
    "phi",
    "p",
    "lambda",
    "rho",
    "gamma",
    "beta",
    "beta_tilde",
    "m",
    "m_prime",
    "m_tilde",
    "m0",
    "nu0",
    "theory_error",
    "empirical_mean",
    "empirical_std",
    "trials",
    "seed",
    "error_code",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepRow {
    pub cell_id: usize,
    pub strategy: String,
    pub xi: Option<f64>,
    pub exponent: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub phi: Option<f64>,
    pub p: Option<f64>,
    pub lambda: Option<f64>,
    pub rho: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub m: Option<f64>,
    pub m_prime: Option<f64>,
    pub m_tilde: Option<f64>,
    pub m0: Option<f64>,
    pub nu0: Option<f64>,
    pub theory_error: Option<f64>,
    pub empirical_mean: Option<f64>,
    pub empirical_std: Option<f64>,
    pub trials: Option<usize>,
    pub seed: u64,
    /// Empty when the cell evaluated cleanly.
    pub error_code: String,
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn real(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_default()
}

fn int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.cell_id.to_string(),
            self.strategy.clone(),
            real(self.xi),
            real(self.exponent),
            int(self.d),
            int(self.n),
            real(self.phi),
            real(self.p),
            real(self.lambda),
            real(self.rho),
            real(self.gamma),
            real(self.beta),
            real(self.beta_tilde),
            real(self.m),
            real(self.m_prime),
            real(self.m_tilde),
            real(self.m0),
            real(self.nu0),
            real(self.theory_error),
            real(self.empirical_mean),
            real(self.empirical_std),
            int(self.trials),
            self.seed.to_string(),
            self.error_code.clone(),
        ]
    }
}

pub fn write_rows<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.fields())?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

/// Columns of the pool-growth history CSV.
pub const DP_COLUMNS: [&str; 8] = [
    "kind",
    "step",
    "pool_size",
    "validation_accuracy",
    "test_error_exact",
    "patience_counter",
    "patience_limit",
    "augmented",
];

pub fn write_dp_history<W: Write>(writer: W, history: &DPHistory) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(DP_COLUMNS)?;
    for e in &history.events {
        w.write_record([
            e.kind.as_str().to_string(),
            e.step.to_string(),
            e.pool_size.to_string(),
            real(e.validation_accuracy),
            format_real(e.test_error_exact),
            e.patience_counter.to_string(),
            e.patience_limit
                .map(|v| v.to_string())
                .unwrap_or_else(|| "inf".into()),
            e.augmented.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn opt<T: std::str::FromStr>(column: &str, s: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<T>()
        .map(Some)
        .map_err(|e| Error::Parse(format!("column `{column}`: bad value `{s}`: {e}")))
}

fn req<T: std::str::FromStr>(column: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    opt(column, s)?.ok_or_else(|| Error::Parse(format!("column `{column}` must not be empty")))
}

/// Reads a sweep CSV, checking the header and schema version.
pub fn read_rows<R: Read>(reader: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    let missing: Vec<String> = COLUMNS
        .iter()
        .filter(|c| !headers.iter().any(|h| h == **c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingColumns(missing));
    }
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .expect("checked above")
    };
    let idx: Vec<usize> = COLUMNS.iter().map(|c| index(c)).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let f = |i: usize| record.get(idx[i]).unwrap_or("");
        let version: u32 = req(COLUMNS[0], f(0))?;
        if version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {version}"
            )));
        }
        rows.push(SweepRow {
            cell_id: req(COLUMNS[1], f(1))?,
            strategy: f(2).to_string(),
            xi: opt(COLUMNS[3], f(3))?,
            exponent: opt(COLUMNS[4], f(4))?,
            d: opt(COLUMNS[5], f(5))?,
            n: opt(COLUMNS[6], f(6))?,
            phi: opt(COLUMNS[7], f(7))?,
            p: opt(COLUMNS[8], f(8))?,
            lambda: opt(COLUMNS[9], f(9))?,
            rho: opt(COLUMNS[10], f(10))?,
            gamma: opt(COLUMNS[11], f(11))?,
            beta: opt(COLUMNS[12], f(12))?,
            beta_tilde: opt(COLUMNS[13], f(13))?,
            m: opt(COLUMNS[14], f(14))?,
            m_prime: opt(COLUMNS[15], f(15))?,
            m_tilde: opt(COLUMNS[16], f(16))?,
            m0: opt(COLUMNS[17], f(17))?,
            nu0: opt(COLUMNS[18], f(18))?,
            theory_error: opt(COLUMNS[19], f(19))?,
            empirical_mean: opt(COLUMNS[20], f(20))?,
            empirical_std: opt(COLUMNS[21], f(21))?,
            trials: opt(COLUMNS[22], f(22))?,
            seed: req(COLUMNS[23], f(23))?,
            error_code: f(24).to_string(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> SweepRow {
        SweepRow {
            cell_id: 3,
            strategy: "kh:xi=1.0".into(),
            xi: Some(1.0),
            d: Some(350),
            n: Some(700),
            phi: Some(0.5),
            p: Some(0.682_689_492_137_085_9),
            lambda: Some(1e-6),
            theory_error: Some(0.1 + 0.2),
            seed: u64::MAX,
            ..SweepRow::default()
        }
    }

    #[test]
    fn header_is_fixed() {
        let text = rows_to_string(&[]).unwrap();
        assert_eq!(text.trim_end(), COLUMNS.join(","));
    }

    #[test]
    fn round_trip() {
        let mut b = sample();
        b.cell_id = 4;
        b.error_code = "interpolation_threshold".into();
        b.xi = Some(f64::INFINITY);
        let rows = vec![sample(), b];
        let text = rows_to_string(&rows).unwrap();
        assert_eq!(read_rows(text.as_bytes()).unwrap(), rows);
    }

    #[test]
    fn blanks_for_missing_values() {
        let text = rows_to_string(&[sample()]).unwrap();
        let line = text.lines().nth(1).unwrap();
        // exponent is the fifth field
        assert_eq!(line.split(',').nth(4), Some(""));
        assert!(line.contains(",9.9999999999999995e-7,"), "{line}");
    }

    #[test]
    fn missing_columns_reported_by_name() {
        let err = read_rows("schema_version,cell_id\n1,0\n".as_bytes()).unwrap_err();
        match err {
            Error::MissingColumns(cols) => {
                assert!(cols.contains(&"theory_error".to_string()));
                assert!(!cols.contains(&"cell_id".to_string()));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_other_versions() {
        let mut text = rows_to_string(&[sample()]).unwrap();
        text = text.replacen("\n1,", "\n2,", 1);
        assert!(read_rows(text.as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn reals_round_trip_exactly(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let mut row = sample();
            row.m0 = Some(x);
            let text = rows_to_string(std::slice::from_ref(&row)).unwrap();
            let back = read_rows(text.as_bytes()).unwrap();
            prop_assert_eq!(back[0].m0.unwrap().to_bits(), x.to_bits());
        }
    }
}
