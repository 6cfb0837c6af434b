//! Typical-year hourly weather: records, calendar, and file formats.

mod csv_format;
mod epw;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychro;

pub use csv_format::HEADER as CSV_HEADER;
pub use epw::EpwPassthrough;

pub const HOURS_PER_YEAR: usize = 8760;
pub const DAYS_IN_MONTH: [usize; 12] = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];

/// Hour-of-year position. `hour` runs 1–24 and labels the hour ending at that
/// clock time, as in EPW files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Timestamp {
    pub month: u8,
    pub day: u8,
    pub hour: u8,
}

impl Timestamp {
    pub fn from_hour_index(index: usize) -> Self {
        assert!(index < HOURS_PER_YEAR, "hour index {index} out of range");
        let mut day_of_year = index / 24;
        let hour = (index % 24) as u8 + 1;
        let mut month = 0;
        while day_of_year >= DAYS_IN_MONTH[month] {
            day_of_year -= DAYS_IN_MONTH[month];
            month += 1;
        }
        Self {
            month: month as u8 + 1,
            day: day_of_year as u8 + 1,
            hour,
        }
    }

    /// 1-based day of the (non-leap) year.
    pub fn day_of_year(&self) -> usize {
        DAYS_IN_MONTH[..usize::from(self.month) - 1].iter().sum::<usize>() + usize::from(self.day)
    }

    pub fn hour_index(&self) -> usize {
        (self.day_of_year() - 1) * 24 + usize::from(self.hour) - 1
    }

    fn is_valid(&self) -> bool {
        (1..=12).contains(&self.month)
            && self.day >= 1
            && usize::from(self.day) <= DAYS_IN_MONTH[usize::from(self.month) - 1]
            && (1..=24).contains(&self.hour)
    }
}

/// Index range of the hours belonging to `month` (1–12).
pub fn month_hours(month: usize) -> Range<usize> {
    assert!((1..=12).contains(&month), "month {month} out of range");
    let start = DAYS_IN_MONTH[..month - 1].iter().sum::<usize>() * 24;
    start..start + DAYS_IN_MONTH[month - 1] * 24
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyWeatherRecord {
    pub timestamp: Timestamp,
    /// °C
    pub dry_bulb: f64,
    /// °C
    pub dew_point: f64,
    /// percent, 0–100
    pub rel_humidity: f64,
    /// Pa
    pub pressure: f64,
    /// Hourly irradiation, Wh/m² (numerically the hour-mean W/m²).
    pub ghi: f64,
    pub dni: f64,
    pub dhi: f64,
    /// m/s
    pub wind_speed: f64,
    /// degrees from north
    pub wind_direction: f64,
}

impl HourlyWeatherRecord {
    /// Outdoor humidity ratio, derived from dew point and pressure.
    pub fn humidity_ratio(&self) -> Result<f64> {
        psychro::humidity_ratio_from_dew_point(self.dew_point, self.pressure)
    }

    /// Checks the record invariants. `line` is used for diagnostics only.
    pub fn validate(&self, line: usize) -> Result<()> {
        let finite = [
            ("dry_bulb", self.dry_bulb),
            ("dew_point", self.dew_point),
            ("rel_humidity", self.rel_humidity),
            ("pressure", self.pressure),
            ("ghi", self.ghi),
            ("dni", self.dni),
            ("dhi", self.dhi),
            ("wind_speed", self.wind_speed),
            ("wind_direction", self.wind_direction),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(line, field, v));
            }
        }
        if !(-60.0..=70.0).contains(&self.dry_bulb) {
            return Err(Error::invalid(line, "dry_bulb", self.dry_bulb));
        }
        if !(0.0..=100.0).contains(&self.rel_humidity) {
            return Err(Error::invalid(line, "rel_humidity", self.rel_humidity));
        }
        if self.dew_point > self.dry_bulb + 0.5 || self.dew_point < -60.0 {
            return Err(Error::invalid(line, "dew_point", self.dew_point));
        }
        if !(30_000.0..=120_000.0).contains(&self.pressure) {
            return Err(Error::invalid(line, "pressure", self.pressure));
        }
        for (field, v) in [("ghi", self.ghi), ("dni", self.dni), ("dhi", self.dhi)] {
            if v < 0.0 {
                return Err(Error::invalid(line, field, v));
            }
        }
        if self.ghi == 0.0 && self.dni != 0.0 {
            return Err(Error::invalid(line, "dni", self.dni));
        }
        if self.ghi == 0.0 && self.dhi != 0.0 {
            return Err(Error::invalid(line, "dhi", self.dhi));
        }
        if self.wind_speed < 0.0 {
            return Err(Error::invalid(line, "wind_speed", self.wind_speed));
        }
        if !(0.0..=360.0).contains(&self.wind_direction) {
            return Err(Error::invalid(line, "wind_direction", self.wind_direction));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub name: String,
    /// degrees north
    pub latitude: f64,
    /// degrees east
    pub longitude: f64,
    /// hours from UTC
    pub timezone: f64,
    /// m
    pub elevation: f64,
}

impl Default for Location {
    fn default() -> Self {
        Self {
            name: "unknown".into(),
            latitude: 0.0,
            longitude: 0.0,
            timezone: 0.0,
            elevation: 0.0,
        }
    }
}

/// One non-leap year of hourly weather, in chronological order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherYear {
    pub location: Location,
    records: Vec<HourlyWeatherRecord>,
    epw: Option<EpwPassthrough>,
}

impl WeatherYear {
    pub fn new(location: Location, records: Vec<HourlyWeatherRecord>) -> Result<Self> {
        Self::with_passthrough(location, records, None)
    }

    pub(crate) fn with_passthrough(
        location: Location,
        records: Vec<HourlyWeatherRecord>,
        epw: Option<EpwPassthrough>,
    ) -> Result<Self> {
        if records.len() != HOURS_PER_YEAR {
            return Err(Error::Structure(format!(
                "expected {HOURS_PER_YEAR} hourly records, found {}",
                records.len()
            )));
        }
        for (i, rec) in records.iter().enumerate() {
            let expected = Timestamp::from_hour_index(i);
            if rec.timestamp != expected {
                return Err(Error::Structure(format!(
                    "record {} has timestamp {:02}/{:02} hour {}, expected {:02}/{:02} hour {}",
                    i + 1,
                    rec.timestamp.month,
                    rec.timestamp.day,
                    rec.timestamp.hour,
                    expected.month,
                    expected.day,
                    expected.hour
                )));
            }
            rec.validate(i + 1)?;
        }
        Ok(Self { location, records, epw })
    }

    pub fn records(&self) -> &[HourlyWeatherRecord] {
        &self.records
    }

    /// Applies `f` to every record and re-validates the result.
    pub fn map_records<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &HourlyWeatherRecord) -> Result<HourlyWeatherRecord>,
    {
        let records = self
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| f(i, r))
            .collect::<Result<Vec<_>>>()?;
        Self::with_passthrough(self.location.clone(), records, self.epw.clone())
    }

    pub fn with_location(mut self, location: Location) -> Self {
        self.location = location;
        self
    }

    pub fn epw_passthrough(&self) -> Option<&EpwPassthrough> {
        self.epw.as_ref()
    }

    /// Arithmetic mean of `field` over all hours of `month` (1–12).
    pub fn monthly_mean(&self, field: WeatherField, month: usize) -> Result<f64> {
        if !(1..=12).contains(&month) {
            return Err(Error::domain("month", month as f64, "1..=12"));
        }
        let range = month_hours(month);
        let n = range.len() as f64;
        let mut sum = 0.0;
        for rec in &self.records[range] {
            sum += field.get(rec)?;
        }
        Ok(sum / n)
    }

    pub fn annual_mean(&self, field: WeatherField) -> Result<f64> {
        let mut sum = 0.0;
        for rec in &self.records {
            sum += field.get(rec)?;
        }
        Ok(sum / HOURS_PER_YEAR as f64)
    }
}

/// Selector for a per-hour weather quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeatherField {
    DryBulb,
    DewPoint,
    RelHumidity,
    Pressure,
    Ghi,
    Dni,
    Dhi,
    WindSpeed,
    /// Derived from dew point and pressure.
    HumidityRatio,
}

impl WeatherField {
    pub fn get(self, rec: &HourlyWeatherRecord) -> Result<f64> {
        Ok(match self {
            WeatherField::DryBulb => rec.dry_bulb,
            WeatherField::DewPoint => rec.dew_point,
            WeatherField::RelHumidity => rec.rel_humidity,
            WeatherField::Pressure => rec.pressure,
            WeatherField::Ghi => rec.ghi,
            WeatherField::Dni => rec.dni,
            WeatherField::Dhi => rec.dhi,
            WeatherField::WindSpeed => rec.wind_speed,
            WeatherField::HumidityRatio => rec.humidity_ratio()?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeatherFormat {
    Epw,
    Csv,
}

impl WeatherFormat {
    /// Guess the format from a file extension; anything but `.csv` is EPW.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => WeatherFormat::Csv,
            _ => WeatherFormat::Epw,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            WeatherFormat::Epw => "epw",
            WeatherFormat::Csv => "csv",
        }
    }
}

impl FromStr for WeatherFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epw" => Ok(WeatherFormat::Epw),
            "csv" => Ok(WeatherFormat::Csv),
            other => Err(Error::Config(format!("unknown weather format {other:?}"))),
        }
    }
}

pub fn parse_weather<R: Read>(source: R, format: WeatherFormat) -> Result<WeatherYear> {
    match format {
        WeatherFormat::Epw => epw::parse(source),
        WeatherFormat::Csv => csv_format::parse(source),
    }
}

pub fn write_weather<W: Write>(year: &WeatherYear, format: WeatherFormat, sink: W) -> Result<()> {
    match format {
        WeatherFormat::Epw => epw::write(year, sink),
        WeatherFormat::Csv => csv_format::write(year, sink),
    }
}

pub fn read_weather_file(path: &Path) -> Result<WeatherYear> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_weather(BufReader::new(file), WeatherFormat::from_path(path)).map_err(|e| e.in_file(path))
}

pub fn write_weather_file(year: &WeatherYear, path: &Path, format: WeatherFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::from(e).in_file(path))?;
    let mut out = BufWriter::new(file);
    write_weather(year, format, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Fills a missing dew point from dry-bulb and relative humidity.
pub(crate) fn derive_dew_point(dry_bulb: f64, rel_humidity_pct: f64, line: usize) -> Result<f64> {
    let rh = (rel_humidity_pct / 100.0).clamp(1e-4, 1.0);
    psychro::dew_point(dry_bulb, rh).map_err(|_| Error::invalid(line, "dry_bulb", dry_bulb))
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// A physically consistent year built from a closure giving dry-bulb per hour index.
    pub fn synthetic_year(mut dry_bulb: impl FnMut(usize) -> f64) -> WeatherYear {
        let records = (0..HOURS_PER_YEAR)
            .map(|i| {
                let t = dry_bulb(i);
                let rh = 0.5;
                HourlyWeatherRecord {
                    timestamp: Timestamp::from_hour_index(i),
                    dry_bulb: t,
                    dew_point: psychro::dew_point(t, rh).unwrap(),
                    rel_humidity: rh * 100.0,
                    pressure: psychro::STANDARD_PRESSURE,
                    ghi: 0.0,
                    dni: 0.0,
                    dhi: 0.0,
                    wind_speed: 2.0,
                    wind_direction: 180.0,
                }
            })
            .collect();
        WeatherYear::new(Location::default(), records).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::synthetic_year;
    use super::*;

    #[test]
    fn calendar_round_trip() {
        for i in 0..HOURS_PER_YEAR {
            let ts = Timestamp::from_hour_index(i);
            assert!(ts.is_valid());
            assert_eq!(ts.hour_index(), i);
        }
        assert_eq!(
            Timestamp::from_hour_index(0),
            Timestamp {
                month: 1,
                day: 1,
                hour: 1
            }
        );
        assert_eq!(
            Timestamp::from_hour_index(8759),
            Timestamp {
                month: 12,
                day: 31,
                hour: 24
            }
        );
    }

    #[test]
    fn month_lengths() {
        let total: usize = (1..=12).map(|m| month_hours(m).len()).sum();
        assert_eq!(total, HOURS_PER_YEAR);
        assert_eq!(month_hours(1).len(), 744);
        assert_eq!(month_hours(2).len(), 672);
    }

    #[test]
    fn monthly_mean_examples() {
        let year = synthetic_year(|_| 20.0);
        for m in 1..=12 {
            assert_eq!(year.monthly_mean(WeatherField::DryBulb, m).unwrap(), 20.0);
        }
        let year = synthetic_year(|i| if i < 372 { 10.0 } else { 20.0 });
        assert_eq!(year.monthly_mean(WeatherField::DryBulb, 1).unwrap(), 15.0);
        assert!(year.monthly_mean(WeatherField::DryBulb, 13).is_err());
    }

    #[test]
    fn monthly_mean_matches_loop_oracle() {
        let year = synthetic_year(|i| 15.0 + 10.0 * ((i as f64) * 0.37).sin());
        for month in 1..=12u8 {
            let mut sum = 0.0;
            let mut count = 0usize;
            for r in year.records() {
                if r.timestamp.month == month {
                    sum += r.dry_bulb;
                    count += 1;
                }
            }
            let got = year.monthly_mean(WeatherField::DryBulb, month as usize).unwrap();
            assert!((got - sum / count as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn record_count_and_order_enforced() {
        let year = synthetic_year(|_| 20.0);
        let mut recs = year.records().to_vec();
        recs.push(recs[0].clone());
        assert!(matches!(
            WeatherYear::new(Location::default(), recs.clone()),
            Err(Error::Structure(_))
        ));
        recs.pop();
        recs.swap(10, 11);
        assert!(matches!(
            WeatherYear::new(Location::default(), recs),
            Err(Error::Structure(_))
        ));
    }
}
