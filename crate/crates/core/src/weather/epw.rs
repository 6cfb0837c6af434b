//! EnergyPlus weather (EPW) reader and writer for the fields the simulator
//! uses. Columns we do not model are kept verbatim and written back.

use std::io::{BufRead, BufReader, Read, Write};

use super::{derive_dew_point, HourlyWeatherRecord, Location, Timestamp, WeatherYear};
use crate::error::{Error, Result};
use crate::psychro::STANDARD_PRESSURE;

const HEADER_LINES: usize = 8;
const FIELD_COUNT: usize = 35;

const COL_YEAR: usize = 0;
const COL_MONTH: usize = 1;
const COL_DAY: usize = 2;
const COL_HOUR: usize = 3;
const COL_MINUTE: usize = 4;
const COL_DRY_BULB: usize = 6;
const COL_DEW_POINT: usize = 7;
const COL_RH: usize = 8;
const COL_PRESSURE: usize = 9;
const COL_GHI: usize = 13;
const COL_DNI: usize = 14;
const COL_DHI: usize = 15;
const COL_WIND_DIR: usize = 20;
const COL_WIND_SPEED: usize = 21;

/// Missing-value sentinels for every EPW column, used for columns we have no
/// data for.
const MISSING: [&str; FIELD_COUNT] = [
    "1990",
    "",
    "",
    "",
    "60",
    "?9?9?9?9E0?9?9?9?9?9?9?9?9?9?9?9?9?9?9?9*9*9?9?9?9",
    "99.9",
    "99.9",
    "999",
    "999999",
    "9999",
    "9999",
    "9999",
    "9999",
    "9999",
    "9999",
    "999999",
    "999999",
    "999999",
    "9999",
    "999",
    "999",
    "99",
    "99",
    "9999",
    "99999",
    "9",
    "999999999",
    "999",
    ".999",
    "999",
    "99",
    "999",
    "999",
    "99",
];

/// Header lines and unmodelled columns carried through from a parsed EPW file.
#[derive(Debug, Clone, PartialEq)]
pub struct EpwPassthrough {
    pub header: Vec<String>,
    /// Raw fields of every data line, in record order.
    pub rows: Vec<Vec<String>>,
}

fn parse_f64(fields: &[&str], col: usize, name: &'static str, line: usize) -> Result<Option<f64>> {
    let raw = fields
        .get(col)
        .ok_or_else(|| Error::parse(line, format!("missing column {} ({name})", col + 1)))?
        .trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::parse(line, format!("{name}: cannot parse {raw:?} as a number")))
}

fn required(fields: &[&str], col: usize, name: &'static str, line: usize) -> Result<f64> {
    parse_f64(fields, col, name, line)?.ok_or_else(|| Error::parse(line, format!("{name} is empty")))
}

fn reject_sentinel(value: f64, sentinel: f64, name: &'static str, line: usize) -> Result<f64> {
    if value >= sentinel {
        Err(Error::invalid(line, name, format!("{value} (missing-value sentinel)")))
    } else {
        Ok(value)
    }
}

fn parse_location(line: &str, line_no: usize) -> Result<Location> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() < 10 {
        return Err(Error::parse(line_no, "LOCATION line needs 10 fields"));
    }
    let num = |i: usize, name: &'static str| -> Result<f64> {
        f[i].parse::<f64>()
            .map_err(|_| Error::parse(line_no, format!("LOCATION {name}: cannot parse {:?}", f[i])))
    };
    let latitude = num(6, "latitude")?;
    if !(-90.0..=90.0).contains(&latitude) {
        return Err(Error::invalid(line_no, "latitude", latitude));
    }
    Ok(Location {
        name: f[1].to_string(),
        latitude,
        longitude: num(7, "longitude")?,
        timezone: num(8, "timezone")?,
        elevation: num(9, "elevation")?,
    })
}

pub(super) fn parse<R: Read>(source: R) -> Result<WeatherYear> {
    let reader = BufReader::new(source);
    let mut header = Vec::with_capacity(HEADER_LINES);
    let mut location = None;
    let mut records = Vec::with_capacity(super::HOURS_PER_YEAR);
    let mut rows = Vec::with_capacity(super::HOURS_PER_YEAR);

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if idx < HEADER_LINES {
            if line.starts_with("LOCATION") {
                location = Some(parse_location(line, line_no)?);
            }
            header.push(line.to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() <= COL_WIND_SPEED {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected at least {} fields, found {}",
                    COL_WIND_SPEED + 1,
                    fields.len()
                ),
            ));
        }
        let int = |col: usize, name: &'static str| -> Result<u8> {
            fields[col]
                .trim()
                .parse::<u8>()
                .map_err(|_| Error::parse(line_no, format!("{name}: cannot parse {:?}", fields[col])))
        };
        let timestamp = Timestamp {
            month: int(COL_MONTH, "month")?,
            day: int(COL_DAY, "day")?,
            hour: int(COL_HOUR, "hour")?,
        };
        if !timestamp.is_valid() {
            return Err(Error::parse(line_no, format!("invalid timestamp {timestamp:?}")));
        }

        let dry_bulb = reject_sentinel(
            required(&fields, COL_DRY_BULB, "dry_bulb", line_no)?,
            99.9,
            "dry_bulb",
            line_no,
        )?;
        let rel_humidity = reject_sentinel(
            required(&fields, COL_RH, "rel_humidity", line_no)?,
            999.0,
            "rel_humidity",
            line_no,
        )?;
        if !(0.0..=100.0).contains(&rel_humidity) {
            return Err(Error::invalid(line_no, "rel_humidity", rel_humidity));
        }
        let dew_point = match parse_f64(&fields, COL_DEW_POINT, "dew_point", line_no)? {
            Some(v) => reject_sentinel(v, 99.9, "dew_point", line_no)?,
            None => derive_dew_point(dry_bulb, rel_humidity, line_no)?,
        };
        let pressure = match parse_f64(&fields, COL_PRESSURE, "pressure", line_no)? {
            Some(v) => reject_sentinel(v, 999_999.0, "pressure", line_no)?,
            None => STANDARD_PRESSURE,
        };
        let ghi = reject_sentinel(required(&fields, COL_GHI, "ghi", line_no)?, 9999.0, "ghi", line_no)?;
        let dni = reject_sentinel(required(&fields, COL_DNI, "dni", line_no)?, 9999.0, "dni", line_no)?;
        let dhi = reject_sentinel(required(&fields, COL_DHI, "dhi", line_no)?, 9999.0, "dhi", line_no)?;
        let wind_direction = reject_sentinel(
            required(&fields, COL_WIND_DIR, "wind_direction", line_no)?,
            999.0,
            "wind_direction",
            line_no,
        )?;
        let wind_speed = reject_sentinel(
            required(&fields, COL_WIND_SPEED, "wind_speed", line_no)?,
            999.0,
            "wind_speed",
            line_no,
        )?;

        let rec = HourlyWeatherRecord {
            timestamp,
            dry_bulb,
            dew_point,
            rel_humidity,
            pressure,
            ghi,
            dni,
            dhi,
            wind_speed,
            wind_direction,
        };
        rec.validate(line_no)?;
        records.push(rec);
        rows.push(fields.iter().map(|s| s.to_string()).collect());
    }

    if header.len() < HEADER_LINES {
        return Err(Error::Structure(format!(
            "EPW header has {} lines, expected {HEADER_LINES}",
            header.len()
        )));
    }
    let location = location.ok_or_else(|| Error::Structure("EPW header has no LOCATION line".into()))?;
    WeatherYear::with_passthrough(location, records, Some(EpwPassthrough { header, rows }))
}

/// Rounds to `decimals` places and clears negative zero so output is stable.
fn fmt_fixed(v: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let r = (v * scale).round() / scale + 0.0;
    format!("{r:.decimals$}")
}

fn location_line(loc: &Location, original: Option<&str>) -> String {
    let mut f: Vec<String> = match original {
        Some(line) => line.split(',').map(|s| s.to_string()).collect(),
        None => vec![
            "LOCATION".into(),
            String::new(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
        ],
    };
    f.resize(10, String::new());
    f[1] = loc.name.clone();
    f[6] = format!("{}", loc.latitude);
    f[7] = format!("{}", loc.longitude);
    f[8] = format!("{}", loc.timezone);
    f[9] = format!("{}", loc.elevation);
    f.join(",")
}

fn default_header(loc: &Location) -> Vec<String> {
    vec![
        location_line(loc, None),
        "DESIGN CONDITIONS,0".into(),
        "TYPICAL/EXTREME PERIODS,0".into(),
        "GROUND TEMPERATURES,0".into(),
        "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0".into(),
        "COMMENTS 1,roomclim".into(),
        "COMMENTS 2,".into(),
        "DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31".into(),
    ]
}

pub(super) fn write<W: Write>(year: &WeatherYear, mut sink: W) -> Result<()> {
    let header = match year.epw_passthrough() {
        Some(p) => p
            .header
            .iter()
            .map(|l| {
                if l.starts_with("LOCATION") {
                    location_line(&year.location, Some(l))
                } else {
                    l.clone()
                }
            })
            .collect(),
        None => default_header(&year.location),
    };
    for line in &header {
        writeln!(sink, "{line}")?;
    }

    let mut fields: Vec<String> = Vec::with_capacity(FIELD_COUNT);
    for (i, rec) in year.records().iter().enumerate() {
        fields.clear();
        match year.epw_passthrough().and_then(|p| p.rows.get(i)) {
            Some(raw) => fields.extend(raw.iter().cloned()),
            None => fields.extend(MISSING.iter().map(|s| s.to_string())),
        }
        if fields.len() < FIELD_COUNT {
            let have = fields.len();
            fields.extend(MISSING[have..].iter().map(|s| s.to_string()));
        }
        if fields[COL_YEAR].is_empty() {
            fields[COL_YEAR] = MISSING[COL_YEAR].into();
        }
        if fields[COL_MINUTE].is_empty() {
            fields[COL_MINUTE] = MISSING[COL_MINUTE].into();
        }
        let ts = rec.timestamp;
        fields[COL_MONTH] = ts.month.to_string();
        fields[COL_DAY] = ts.day.to_string();
        fields[COL_HOUR] = ts.hour.to_string();
        fields[COL_DRY_BULB] = fmt_fixed(rec.dry_bulb, 1);
        fields[COL_DEW_POINT] = fmt_fixed(rec.dew_point, 1);
        fields[COL_RH] = fmt_fixed(rec.rel_humidity, 0);
        fields[COL_PRESSURE] = fmt_fixed(rec.pressure, 0);
        let ghi = fmt_fixed(rec.ghi, 0);
        // Keep "no global means no components" true after rounding.
        if ghi == "0" {
            fields[COL_DNI] = "0".into();
            fields[COL_DHI] = "0".into();
        } else {
            fields[COL_DNI] = fmt_fixed(rec.dni, 0);
            fields[COL_DHI] = fmt_fixed(rec.dhi, 0);
        }
        fields[COL_GHI] = ghi;
        fields[COL_WIND_DIR] = fmt_fixed(rec.wind_direction, 0);
        fields[COL_WIND_SPEED] = fmt_fixed(rec.wind_speed, 1);
        writeln!(sink, "{}", fields.join(","))?;
    }
    Ok(())
}
