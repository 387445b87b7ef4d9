//! Hourly resource CSV: `hour,irradiance_kwh_m2,wind_ms,load_kw[,renewable_kw]`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::Scenario;

pub const HOUR: &str = "hour";
pub const IRRADIANCE: &str = "irradiance_kwh_m2";
pub const WIND: &str = "wind_ms";
pub const LOAD: &str = "load_kw";
/// Optional measured renewable output, required only for fitting.
pub const RENEWABLE: &str = "renewable_kw";

pub fn load_hourly_csv(path: &Path) -> Result<Scenario> {
    let file = std::fs::File::open(path)?;
    read_hourly_csv(file)
}

fn csv_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        row,
        column: column.into(),
        message: message.into(),
    }
}

/// Parses the hourly CSV. Row numbers in errors count data rows from 1.
pub fn read_hourly_csv<R: Read>(reader: R) -> Result<Scenario> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| csv_err(0, "header", e.to_string()))?
        .clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let mut cols = [0usize; 4];
    for (slot, name) in cols.iter_mut().zip([HOUR, IRRADIANCE, WIND, LOAD]) {
        *slot = position(name).ok_or_else(|| csv_err(0, name, "missing column"))?;
    }
    let renewable_col = position(RENEWABLE);

    let mut start_hour = None;
    let mut irr = Vec::new();
    let mut wind = Vec::new();
    let mut load = Vec::new();
    let mut observed = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_err(row, "record", e.to_string()))?;
        let field = |col: usize, name: &str| -> Result<&str> {
            record
                .get(col)
                .ok_or_else(|| csv_err(row, name, "missing field"))
        };
        let num = |col: usize, name: &str| -> Result<f64> {
            let text = field(col, name)?;
            text.parse::<f64>()
                .map_err(|_| csv_err(row, name, format!("`{text}` is not a number")))
        };
        let hour_text = field(cols[0], HOUR)?;
        let hour = hour_text
            .parse::<usize>()
            .map_err(|_| csv_err(row, HOUR, format!("`{hour_text}` is not an hour index")))?;
        start_hour.get_or_insert(hour);
        irr.push(num(cols[1], IRRADIANCE)?);
        wind.push(num(cols[2], WIND)?);
        load.push(num(cols[3], LOAD)?);
        if let Some(c) = renewable_col {
            observed.push(num(c, RENEWABLE)?);
        }
    }

    let steps = load.len();
    let scenario = Scenario::new(start_hour.unwrap_or(0), steps, irr, wind, load)?;
    if renewable_col.is_some() {
        scenario.with_observed_renewable(observed)
    } else {
        Ok(scenario)
    }
}

/// Writes a scenario in the hourly CSV layout; values round-trip exactly.
pub fn write_hourly_csv<W: Write>(scenario: &Scenario, mut out: W) -> Result<()> {
    let observed = scenario.observed_renewable();
    write!(out, "{HOUR},{IRRADIANCE},{WIND},{LOAD}")?;
    if observed.is_some() {
        write!(out, ",{RENEWABLE}")?;
    }
    writeln!(out)?;
    for t in 0..scenario.steps() {
        write!(
            out,
            "{},{},{},{}",
            scenario.start_hour() + t,
            scenario.irradiance()[t],
            scenario.wind_speed()[t],
            scenario.load()[t]
        )?;
        if let Some(obs) = observed {
            write!(out, ",{}", obs[t])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::synth::{generate_synthetic, SyntheticProfile};
    use proptest::prelude::*;

    fn rows(n: usize) -> String {
        let mut s = String::from("hour,irradiance_kwh_m2,wind_ms,load_kw\n");
        for h in 0..n {
            s.push_str(&format!("{h},0.{h},8,200\n"));
        }
        s
    }

    #[test]
    fn well_formed_day() {
        let s = read_hourly_csv(rows(24).as_bytes()).unwrap();
        assert_eq!(s.steps(), 24);
        assert!(s.observed_renewable().is_none());
    }

    #[test]
    fn missing_column_is_named() {
        let text = "hour,irradiance_kwh_m2,load_kw\n0,0.1,200\n";
        match read_hourly_csv(text.as_bytes()).unwrap_err() {
            Error::Parse { column, .. } => assert_eq!(column, WIND),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn textual_wind_cites_row() {
        let text = "hour,irradiance_kwh_m2,wind_ms,load_kw\n0,0.1,8,200\n1,0.2,breezy,210\n";
        match read_hourly_csv(text.as_bytes()).unwrap_err() {
            Error::Parse { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, WIND);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_load_fails_validation() {
        let text = "hour,irradiance_kwh_m2,wind_ms,load_kw\n0,0.1,8,-3\n";
        assert!(matches!(
            read_hourly_csv(text.as_bytes()),
            Err(Error::NegativeValue { .. })
        ));
    }

    #[test]
    fn observed_column_is_optional() {
        let text = "hour,irradiance_kwh_m2,wind_ms,load_kw,renewable_kw\n5,0.1,8,200,230.5\n";
        let s = read_hourly_csv(text.as_bytes()).unwrap();
        assert_eq!(s.start_hour(), 5);
        assert_eq!(s.observed_renewable(), Some(&[230.5][..]));
    }

    proptest! {
        #[test]
        fn synthetic_round_trips_bit_exactly(days in 1usize..4, seed in any::<u64>(), jitter in 0.0..3.0f64) {
            let p = SyntheticProfile { wind_jitter: jitter, ..SyntheticProfile::default() };
            let s = generate_synthetic(days, &p, seed).unwrap();
            let mut buf = Vec::new();
            write_hourly_csv(&s, &mut buf).unwrap();
            prop_assert_eq!(read_hourly_csv(buf.as_slice()).unwrap(), s);
        }
    }
}
