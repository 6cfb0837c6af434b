//! Future-weather construction by morphing a baseline year with monthly
//! climate-model shifts.
//!
//! Pipeline: ingest per-GCM shift tables, interpolate each to the site,
//! collapse the ensemble into min/median/max classes by temperature shift,
//! then shift-and-stretch the baseline hour by hour.

mod classes;
mod idw;
mod shift_file;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychro;
use crate::solar;
use crate::weather::{month_hours, HourlyWeatherRecord, WeatherField, WeatherYear, HOURS_PER_YEAR};

pub use classes::{build_model_classes, median_of, ClassKind, ModelClass, ModelClasses};
pub use idw::{great_circle_km, idw_interpolate, Idw, COINCIDENCE_KM};
pub use shift_file::{ingest_shift_file, ingest_shift_tables, write_shift_tables, SHIFT_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "RCP4.5")]
    Rcp45,
    #[serde(rename = "RCP8.5")]
    Rcp85,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Rcp45, Scenario::Rcp85];
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Rcp45 => "RCP4.5",
            Scenario::Rcp85 => "RCP8.5",
        })
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RCP4.5" | "RCP45" => Ok(Scenario::Rcp45),
            "RCP8.5" | "RCP85" => Ok(Scenario::Rcp85),
            _ => Err(Error::Config(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Period {
    #[serde(rename = "2030s")]
    P2030s,
    #[serde(rename = "2060s")]
    P2060s,
    #[serde(rename = "2090s")]
    P2090s,
}

impl Period {
    pub const ALL: [Period; 3] = [Period::P2030s, Period::P2060s, Period::P2090s];

    /// Inclusive range of years the period averages over.
    pub fn years(self) -> (u16, u16) {
        match self {
            Period::P2030s => (2026, 2045),
            Period::P2060s => (2056, 2075),
            Period::P2090s => (2081, 2100),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Period::P2030s => "2030s",
            Period::P2060s => "2060s",
            Period::P2090s => "2090s",
        })
    }
}

impl FromStr for Period {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2030s" => Ok(Period::P2030s),
            "2060s" => Ok(Period::P2060s),
            "2090s" => Ok(Period::P2090s),
            _ => Err(Error::Config(format!("unknown period {s:?}"))),
        }
    }
}

/// Monthly change applied to each weather variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthShift {
    /// Additive dry-bulb shift, °C.
    pub dt: f64,
    /// Stretch of hourly anomalies about the monthly mean.
    pub alpha: f64,
    /// Multiplier on humidity ratio.
    pub q_scale: f64,
    pub ghi_scale: f64,
    pub wind_scale: f64,
}

impl MonthShift {
    pub const IDENTITY: MonthShift = MonthShift {
        dt: 0.0,
        alpha: 0.0,
        q_scale: 1.0,
        ghi_scale: 1.0,
        wind_scale: 1.0,
    };

    fn changes_temperature(&self) -> bool {
        self.dt != 0.0 || self.alpha != 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub lat: f64,
    pub lon: f64,
    pub months: [MonthShift; 12],
}

/// Monthly shifts of one GCM (ensemble-averaged) for one scenario and period.
#[derive(Debug, Clone, PartialEq)]
pub struct GcmShiftTable {
    pub gcm_id: String,
    pub scenario: Scenario,
    pub period: Period,
    pub grid: Vec<GridPoint>,
}

impl GcmShiftTable {
    pub fn row_count(&self) -> usize {
        self.grid.len() * 12
    }

    /// Interpolates every variable and month to the site.
    pub fn localize(&self, lat: f64, lon: f64, idw: &Idw) -> Result<LocalShifts> {
        if self.grid.is_empty() {
            return Err(Error::Structure(format!("{} has an empty grid", self.gcm_id)));
        }
        let points: Vec<(f64, f64)> = self.grid.iter().map(|p| (p.lat, p.lon)).collect();
        let chosen = idw.nearest(&points, (lat, lon));
        let mut months = [MonthShift::IDENTITY; 12];
        for (m, out) in months.iter_mut().enumerate() {
            let field = |get: fn(&MonthShift) -> f64| -> Result<f64> {
                let grid: Vec<(f64, f64, f64)> = chosen
                    .iter()
                    .map(|&i| (self.grid[i].lat, self.grid[i].lon, get(&self.grid[i].months[m])))
                    .collect();
                idw_interpolate(&grid, (lat, lon), idw.power)
            };
            *out = MonthShift {
                dt: field(|s| s.dt)?,
                alpha: field(|s| s.alpha)?,
                q_scale: field(|s| s.q_scale)?,
                ghi_scale: field(|s| s.ghi_scale)?,
                wind_scale: field(|s| s.wind_scale)?,
            };
        }
        Ok(LocalShifts {
            gcm_id: self.gcm_id.clone(),
            scenario: self.scenario,
            period: self.period,
            months,
        })
    }
}

/// One GCM's monthly shifts interpolated to a site.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalShifts {
    pub gcm_id: String,
    pub scenario: Scenario,
    pub period: Period,
    pub months: [MonthShift; 12],
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphOutcome {
    pub year: WeatherYear,
    /// Hours whose scaled humidity ratio had to be clamped to saturation.
    pub saturation_clamps: usize,
}

/// Morphs `baseline` with one shift per calendar month.
///
/// Dry-bulb: `T' = T + ΔT + α(T − ⟨T⟩)`. Humidity ratio is scaled, clamped to
/// saturation at `T'`, and RH and dew point are re-derived. Global horizontal
/// irradiance is scaled and re-split into beam and diffuse parts. Variables
/// whose shift is the identity for a month are copied unchanged.
pub fn morph_year(baseline: &WeatherYear, shifts: &[MonthShift; 12]) -> Result<MorphOutcome> {
    let mut month_of_hour = vec![0usize; HOURS_PER_YEAR];
    let mut mean_t = [0.0; 12];
    for m in 1..=12 {
        for i in month_hours(m) {
            month_of_hour[i] = m - 1;
        }
        mean_t[m - 1] = baseline.monthly_mean(WeatherField::DryBulb, m)?;
    }

    let new_ghi: Vec<f64> = baseline
        .records()
        .iter()
        .zip(&month_of_hour)
        .map(|(r, &m)| r.ghi * shifts[m].ghi_scale)
        .collect();
    let needs_split = shifts.iter().any(|s| s.ghi_scale != 1.0);
    let splits = if needs_split {
        solar::decompose_ghi_series(&baseline.location, &new_ghi)
    } else {
        Vec::new()
    };

    let mut clamps = 0usize;
    let year = baseline.map_records(|i, r| {
        let m = month_of_hour[i];
        let s = &shifts[m];
        let mut out = r.clone();

        if s.changes_temperature() || s.q_scale != 1.0 {
            out.dry_bulb = r.dry_bulb + s.dt + s.alpha * (r.dry_bulb - mean_t[m]);
            let mut w = r.humidity_ratio()? * s.q_scale;
            let w_sat = psychro::saturation_humidity_ratio(out.dry_bulb, r.pressure)?;
            if w > w_sat {
                w = w_sat;
                clamps += 1;
            }
            let rh = psychro::rh_from_humidity_ratio(w, out.dry_bulb, r.pressure)?.min(1.0);
            out.rel_humidity = rh * 100.0;
            out.dew_point = if rh > 0.0 {
                psychro::dew_point(out.dry_bulb, rh)?.min(out.dry_bulb)
            } else {
                -60.0
            };
        }
        if s.ghi_scale != 1.0 {
            let sp = &splits[i];
            out.ghi = new_ghi[i];
            out.dni = sp.dni;
            out.dhi = sp.dhi;
        }
        out.wind_speed = r.wind_speed * s.wind_scale;
        Ok::<HourlyWeatherRecord, Error>(out)
    })?;
    Ok(MorphOutcome {
        year,
        saturation_clamps: clamps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weather::test_support::synthetic_year;

    fn sinusoid_year() -> WeatherYear {
        synthetic_year(|i| 25.0 + 6.0 * ((i % 24) as f64 / 24.0 * std::f64::consts::TAU).sin() + (i as f64 / 900.0))
    }

    #[test]
    fn identity_morph_is_exact() {
        let base = sinusoid_year();
        let out = morph_year(&base, &[MonthShift::IDENTITY; 12]).unwrap();
        assert_eq!(out.year, base);
        assert_eq!(out.saturation_clamps, 0);
    }

    #[test]
    fn january_shift_moves_mean_exactly() {
        let base = sinusoid_year();
        let mut shifts = [MonthShift::IDENTITY; 12];
        shifts[0].dt = 1.43;
        let out = morph_year(&base, &shifts).unwrap().year;
        let before = base.monthly_mean(WeatherField::DryBulb, 1).unwrap();
        let after = out.monthly_mean(WeatherField::DryBulb, 1).unwrap();
        assert!((after - before - 1.43).abs() < 1e-9);
        for i in month_hours(1) {
            let anomaly_before = base.records()[i].dry_bulb - before;
            let anomaly_after = out.records()[i].dry_bulb - after;
            assert!((anomaly_before - anomaly_after).abs() < 1e-9);
        }
        // February untouched.
        for i in month_hours(2) {
            assert_eq!(out.records()[i], base.records()[i]);
        }
    }

    #[test]
    fn stretch_preserves_mean_and_widens_spread() {
        let base = sinusoid_year();
        let mut shifts = [MonthShift::IDENTITY; 12];
        for s in &mut shifts {
            s.alpha = 0.1;
        }
        let out = morph_year(&base, &shifts).unwrap().year;
        for m in 1..=12 {
            let range = month_hours(m);
            let mb = base.monthly_mean(WeatherField::DryBulb, m).unwrap();
            let ma = out.monthly_mean(WeatherField::DryBulb, m).unwrap();
            assert!((ma - mb).abs() < 1e-9);
            let var = |y: &WeatherYear, mean: f64| {
                y.records()[range.clone()]
                    .iter()
                    .map(|r| (r.dry_bulb - mean).powi(2))
                    .sum::<f64>()
            };
            assert!(var(&out, ma) > var(&base, mb));
        }
    }

    #[test]
    fn humidity_scaling_and_clamp() {
        let base = sinusoid_year();
        let mut shifts = [MonthShift::IDENTITY; 12];
        shifts[5].q_scale = 1.1;
        shifts[6].q_scale = 3.0; // forces saturation at RH 50 %
        let out = morph_year(&base, &shifts).unwrap();
        let wb = base.monthly_mean(WeatherField::HumidityRatio, 6).unwrap();
        let wa = out.year.monthly_mean(WeatherField::HumidityRatio, 6).unwrap();
        assert!((wa / wb - 1.1).abs() < 1e-9);
        assert_eq!(out.saturation_clamps, month_hours(7).len());
        let wb7 = base.monthly_mean(WeatherField::HumidityRatio, 7).unwrap();
        let wa7 = out.year.monthly_mean(WeatherField::HumidityRatio, 7).unwrap();
        assert!(wa7 / wb7 <= 3.0);
        for r in &out.year.records()[month_hours(7)] {
            assert!(r.rel_humidity <= 100.0);
            assert!(r.dew_point <= r.dry_bulb);
        }
    }
}
