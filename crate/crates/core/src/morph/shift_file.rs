//! Monthly-shift interchange file: one CSV row per (grid point, month).

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{GcmShiftTable, GridPoint, MonthShift, Period, Scenario};
use crate::error::{Error, Result};

pub const SHIFT_HEADER: [&str; 11] = [
    "gcm_id",
    "scenario",
    "period",
    "lat",
    "lon",
    "month",
    "dT_C",
    "alpha",
    "q_scale",
    "ghi_scale",
    "wind_scale",
];

type TableKey = (String, Scenario, Period);
// Grid points keyed by the bit patterns of (lat, lon) so identical text maps together.
type PointKey = (u64, u64);
type PointRows = (f64, f64, [Option<MonthShift>; 12]);

/// Reads a shift file holding exactly one (GCM, scenario, period) table.
pub fn ingest_shift_file<R: Read>(source: R) -> Result<GcmShiftTable> {
    let mut tables = ingest_shift_tables(source)?;
    match tables.len() {
        1 => Ok(tables.pop().unwrap()),
        n => Err(Error::Structure(format!(
            "expected one (gcm, scenario, period) table, found {n}"
        ))),
    }
}

/// Reads a shift file that may hold several tables, returned sorted by
/// (gcm_id, scenario, period).
pub fn ingest_shift_tables<R: Read>(source: R) -> Result<Vec<GcmShiftTable>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != SHIFT_HEADER {
        return Err(Error::parse(1, format!("expected header {}", SHIFT_HEADER.join(","))));
    }

    let mut acc: BTreeMap<TableKey, BTreeMap<PointKey, PointRows>> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        if row.len() != SHIFT_HEADER.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", SHIFT_HEADER.len(), row.len()),
            ));
        }
        let num = |i: usize| -> Result<f64> {
            row[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::parse(line, format!("{}: cannot parse {:?}", SHIFT_HEADER[i], &row[i])))
        };
        let gcm_id = row[0].to_string();
        if gcm_id.is_empty() {
            return Err(Error::invalid(line, "gcm_id", "(empty)"));
        }
        let scenario: Scenario = row[1].parse().map_err(|_| Error::invalid(line, "scenario", &row[1]))?;
        let period: Period = row[2].parse().map_err(|_| Error::invalid(line, "period", &row[2]))?;
        let lat = num(3)?;
        if !(-90.0..=90.0).contains(&lat) {
            return Err(Error::invalid(line, "lat", lat));
        }
        let lon = num(4)?;
        let month: usize = row[5].parse().map_err(|_| Error::invalid(line, "month", &row[5]))?;
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(line, "month", month));
        }
        let alpha = if row[7].is_empty() { 0.0 } else { num(7)? };
        let shift = MonthShift {
            dt: num(6)?,
            alpha,
            q_scale: num(8)?,
            ghi_scale: num(9)?,
            wind_scale: num(10)?,
        };
        for (field, v) in [
            ("q_scale", shift.q_scale),
            ("ghi_scale", shift.ghi_scale),
            ("wind_scale", shift.wind_scale),
        ] {
            if v <= 0.0 {
                return Err(Error::invalid(line, field, v));
            }
        }
        if alpha <= -1.0 {
            return Err(Error::invalid(line, "alpha", alpha));
        }

        let point = acc
            .entry((gcm_id, scenario, period))
            .or_default()
            .entry((lat.to_bits(), lon.to_bits()))
            .or_insert((lat, lon, [None; 12]));
        if point.2[month - 1].is_some() {
            return Err(Error::parse(
                line,
                format!("duplicate month {month} for grid point ({lat}, {lon})"),
            ));
        }
        point.2[month - 1] = Some(shift);
    }

    if acc.is_empty() {
        return Err(Error::Structure("shift file has no rows".into()));
    }
    let mut tables = Vec::with_capacity(acc.len());
    for ((gcm_id, scenario, period), points) in acc {
        let mut grid = Vec::with_capacity(points.len());
        for (_, (lat, lon, months)) in points {
            let mut full = [MonthShift::IDENTITY; 12];
            for (m, slot) in months.iter().enumerate() {
                full[m] = slot.ok_or_else(|| {
                    Error::Structure(format!(
                        "{gcm_id} {scenario} {period}: grid point ({lat}, {lon}) is missing month {}",
                        m + 1
                    ))
                })?;
            }
            grid.push(GridPoint { lat, lon, months: full });
        }
        tables.push(GcmShiftTable {
            gcm_id,
            scenario,
            period,
            grid,
        });
    }
    Ok(tables)
}

pub fn write_shift_tables<W: Write>(tables: &[GcmShiftTable], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(SHIFT_HEADER)?;
    for t in tables {
        for p in &t.grid {
            for (m, s) in p.months.iter().enumerate() {
                w.write_record([
                    t.gcm_id.clone(),
                    t.scenario.to_string(),
                    t.period.to_string(),
                    p.lat.to_string(),
                    p.lon.to_string(),
                    (m + 1).to_string(),
                    s.dt.to_string(),
                    if s.alpha == 0.0 {
                        String::new()
                    } else {
                        s.alpha.to_string()
                    },
                    s.q_scale.to_string(),
                    s.ghi_scale.to_string(),
                    s.wind_scale.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(rows: impl IntoIterator<Item = String>) -> String {
        let mut s = SHIFT_HEADER.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r);
            s.push('\n');
        }
        s
    }

    fn rows(points: &[(f64, f64)], skip_month: Option<usize>) -> Vec<String> {
        let mut out = Vec::new();
        for &(lat, lon) in points {
            for m in 1..=12 {
                if Some(m) == skip_month {
                    continue;
                }
                out.push(format!("GCM-A,RCP4.5,2030s,{lat},{lon},{m},1.2,,1.05,1.0,0.98"));
            }
        }
        out
    }

    #[test]
    fn four_point_file() {
        let pts = [(20.0, 75.0), (20.0, 77.5), (22.5, 75.0), (22.5, 77.5)];
        let t = ingest_shift_file(file(rows(&pts, None)).as_bytes()).unwrap();
        assert_eq!(t.grid.len(), 4);
        assert_eq!(t.row_count(), 48);
        assert_eq!(t.grid[0].months[6].alpha, 0.0);
        assert_eq!(t.scenario, Scenario::Rcp45);
        assert_eq!(t.period, Period::P2030s);
    }

    #[test]
    fn missing_month_is_named() {
        let err = ingest_shift_file(file(rows(&[(20.0, 75.0)], Some(7))).as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        assert!(err.to_string().contains("month 7"), "{err}");
    }

    #[test]
    fn negative_scale_rejected() {
        let mut r = rows(&[(20.0, 75.0)], None);
        r[3] = "GCM-A,RCP4.5,2030s,20,75,4,1.2,,-1.05,1.0,0.98".into();
        let err = ingest_shift_file(file(r).as_bytes()).unwrap_err();
        match err {
            Error::Validation { field, line, .. } => {
                assert_eq!(field, "q_scale");
                assert_eq!(line, 5);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn duplicate_and_bad_fields() {
        let mut r = rows(&[(20.0, 75.0)], None);
        r.push(r[0].clone());
        assert!(ingest_shift_file(file(r).as_bytes()).is_err());
        let mut r = rows(&[(20.0, 75.0)], None);
        r[0] = "GCM-A,RCP2.6,2030s,20,75,1,1.2,,1.05,1.0,0.98".into();
        assert!(matches!(
            ingest_shift_file(file(r).as_bytes()),
            Err(Error::Validation { field: "scenario", .. })
        ));
    }

    #[test]
    fn multi_table_round_trip() {
        let mut all = rows(&[(20.0, 75.0)], None);
        all.extend(
            rows(&[(20.0, 75.0)], None)
                .into_iter()
                .map(|r| r.replace("GCM-A", "GCM-B")),
        );
        let tables = ingest_shift_tables(file(all).as_bytes()).unwrap();
        assert_eq!(tables.len(), 2);
        assert!(ingest_shift_file(file(rows(&[(20.0, 75.0)], None)).as_bytes()).is_ok());
        let mut buf = Vec::new();
        write_shift_tables(&tables, &mut buf).unwrap();
        assert_eq!(ingest_shift_tables(buf.as_slice()).unwrap(), tables);
    }
}
