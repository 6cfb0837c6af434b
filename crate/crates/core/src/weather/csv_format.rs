//! Plain CSV weather layout: one header row, then one row per hour.
//! Values are written with shortest round-trip formatting, so a CSV round
//! trip is lossless.

use std::io::{Read, Write};

use super::{derive_dew_point, HourlyWeatherRecord, Location, Timestamp, WeatherYear};
use crate::error::{Error, Result};
use crate::psychro::STANDARD_PRESSURE;

pub const HEADER: [&str; 12] = [
    "month",
    "day",
    "hour",
    "dry_bulb_C",
    "dew_point_C",
    "rh_pct",
    "pressure_Pa",
    "ghi_Whm2",
    "dni_Whm2",
    "dhi_Whm2",
    "wind_mps",
    "wind_dir_deg",
];

pub(super) fn parse<R: Read>(source: R) -> Result<WeatherYear> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::parse(
            1,
            format!(
                "expected header {:?}, found {:?}",
                HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut records = Vec::with_capacity(super::HOURS_PER_YEAR);
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", HEADER.len(), row.len()),
            ));
        }
        let opt = |i: usize| -> Result<Option<f64>> {
            let raw = &row[i];
            if raw.is_empty() {
                return Ok(None);
            }
            raw.parse::<f64>()
                .map(Some)
                .map_err(|_| Error::parse(line, format!("{}: cannot parse {raw:?}", HEADER[i])))
        };
        let req =
            |i: usize| -> Result<f64> { opt(i)?.ok_or_else(|| Error::parse(line, format!("{} is empty", HEADER[i]))) };
        let int = |i: usize| -> Result<u8> {
            row[i]
                .parse::<u8>()
                .map_err(|_| Error::parse(line, format!("{}: cannot parse {:?}", HEADER[i], &row[i])))
        };
        let timestamp = Timestamp {
            month: int(0)?,
            day: int(1)?,
            hour: int(2)?,
        };
        if !timestamp.is_valid() {
            return Err(Error::parse(line, format!("invalid timestamp {timestamp:?}")));
        }
        let dry_bulb = req(3)?;
        let rel_humidity = req(5)?;
        if !(0.0..=100.0).contains(&rel_humidity) {
            return Err(Error::invalid(line, "rel_humidity", rel_humidity));
        }
        let dew_point = match opt(4)? {
            Some(v) => v,
            None => derive_dew_point(dry_bulb, rel_humidity, line)?,
        };
        let rec = HourlyWeatherRecord {
            timestamp,
            dry_bulb,
            dew_point,
            rel_humidity,
            pressure: opt(6)?.unwrap_or(STANDARD_PRESSURE),
            ghi: req(7)?,
            dni: req(8)?,
            dhi: req(9)?,
            wind_speed: req(10)?,
            wind_direction: req(11)?,
        };
        rec.validate(line)?;
        records.push(rec);
    }
    WeatherYear::new(Location::default(), records)
}

pub(super) fn write<W: Write>(year: &WeatherYear, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for r in year.records() {
        w.write_record([
            r.timestamp.month.to_string(),
            r.timestamp.day.to_string(),
            r.timestamp.hour.to_string(),
            r.dry_bulb.to_string(),
            r.dew_point.to_string(),
            r.rel_humidity.to_string(),
            r.pressure.to_string(),
            r.ghi.to_string(),
            r.dni.to_string(),
            r.dhi.to_string(),
            r.wind_speed.to_string(),
            r.wind_direction.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
