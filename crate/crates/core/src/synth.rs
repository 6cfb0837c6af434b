//! Deterministic synthetic inputs: typical-year weather for eight Indian
//! cities built from approximate monthly climatology, and a six-GCM ensemble
//! of monthly shift tables on a 2.5° grid. These stand in for licensed
//! weather files and downscaled projections in demos and tests; they are
//! plausible, not measured.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::morph::{GcmShiftTable, GridPoint, MonthShift, Period, Scenario};
use crate::psychro;
use crate::solar;
use crate::weather::{HourlyWeatherRecord, Location, Timestamp, WeatherYear, DAYS_IN_MONTH, HOURS_PER_YEAR};

/// Monthly climatology of one site.
#[derive(Debug, Clone, PartialEq)]
pub struct CityClimate {
    pub name: &'static str,
    pub latitude: f64,
    pub longitude: f64,
    pub elevation: f64,
    /// Exterior wall azimuths of the room in this city.
    pub wall_azimuths: [f64; 2],
    /// Monthly mean dry-bulb, °C.
    pub mean_temp: [f64; 12],
    /// Mean daily temperature range, K.
    pub diurnal_range: [f64; 12],
    /// Monthly mean relative humidity, percent.
    pub mean_rh: [f64; 12],
    /// Monthly mean daily clearness index.
    pub clearness: [f64; 12],
}

const NORTH_EAST: [f64; 2] = [0.0, 90.0];

pub const INDIAN_CITIES: [CityClimate; 8] = [
    CityClimate {
        name: "Ahmedabad",
        latitude: 23.03,
        longitude: 72.58,
        elevation: 55.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [20.5, 23.0, 27.5, 31.5, 33.5, 32.0, 29.0, 28.0, 28.5, 28.0, 24.5, 21.5],
        diurnal_range: [15.0, 15.0, 15.0, 14.0, 12.0, 8.0, 6.0, 6.0, 8.0, 12.0, 14.0, 15.0],
        mean_rh: [45.0, 38.0, 32.0, 35.0, 50.0, 65.0, 80.0, 82.0, 75.0, 55.0, 45.0, 48.0],
        clearness: [0.62, 0.64, 0.65, 0.65, 0.62, 0.50, 0.38, 0.38, 0.50, 0.60, 0.62, 0.62],
    },
    CityClimate {
        name: "Bengaluru",
        latitude: 12.97,
        longitude: 77.59,
        elevation: 920.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [21.0, 23.0, 25.5, 27.0, 26.5, 24.0, 23.2, 23.2, 23.5, 23.2, 22.0, 20.8],
        diurnal_range: [12.0, 13.0, 13.0, 12.0, 11.0, 8.0, 7.0, 7.0, 8.0, 9.0, 10.0, 11.0],
        mean_rh: [62.0, 55.0, 50.0, 55.0, 65.0, 75.0, 78.0, 78.0, 75.0, 75.0, 70.0, 66.0],
        clearness: [0.60, 0.62, 0.62, 0.58, 0.55, 0.45, 0.40, 0.42, 0.46, 0.48, 0.52, 0.56],
    },
    CityClimate {
        name: "Chennai",
        latitude: 13.08,
        longitude: 80.27,
        elevation: 10.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [24.7, 26.0, 27.8, 30.3, 32.5, 31.8, 30.5, 30.0, 29.5, 28.0, 26.0, 25.0],
        diurnal_range: [9.0, 10.0, 10.0, 9.0, 10.0, 10.0, 9.0, 9.0, 9.0, 8.0, 7.0, 8.0],
        mean_rh: [72.0, 70.0, 70.0, 72.0, 65.0, 58.0, 62.0, 66.0, 70.0, 78.0, 80.0, 76.0],
        clearness: [0.55, 0.60, 0.62, 0.60, 0.55, 0.48, 0.45, 0.46, 0.48, 0.42, 0.40, 0.46],
    },
    CityClimate {
        name: "Hyderabad",
        latitude: 17.39,
        longitude: 78.49,
        elevation: 505.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [22.0, 24.5, 28.0, 31.0, 32.5, 28.5, 26.5, 26.0, 26.0, 25.5, 23.0, 21.5],
        diurnal_range: [13.0, 14.0, 14.0, 13.0, 12.0, 8.0, 6.0, 6.0, 7.0, 9.0, 11.0, 12.0],
        mean_rh: [55.0, 48.0, 42.0, 40.0, 42.0, 60.0, 70.0, 72.0, 72.0, 65.0, 58.0, 57.0],
        clearness: [0.62, 0.64, 0.64, 0.62, 0.60, 0.46, 0.40, 0.40, 0.46, 0.55, 0.60, 0.60],
    },
    CityClimate {
        name: "Kolkata",
        latitude: 22.57,
        longitude: 88.36,
        elevation: 9.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [19.5, 23.0, 27.5, 30.5, 31.0, 30.5, 29.5, 29.3, 29.2, 28.0, 24.0, 20.0],
        diurnal_range: [12.0, 12.0, 11.0, 9.0, 8.0, 6.0, 5.0, 5.0, 5.0, 6.0, 9.0, 11.0],
        mean_rh: [65.0, 60.0, 58.0, 68.0, 74.0, 80.0, 84.0, 85.0, 84.0, 78.0, 70.0, 68.0],
        clearness: [0.55, 0.56, 0.55, 0.55, 0.50, 0.38, 0.35, 0.36, 0.40, 0.48, 0.54, 0.55],
    },
    CityClimate {
        name: "Mumbai",
        latitude: 19.08,
        longitude: 72.88,
        elevation: 14.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [24.5, 25.3, 27.3, 28.8, 30.3, 29.5, 27.8, 27.4, 27.8, 28.8, 27.8, 25.8],
        diurnal_range: [9.0, 9.0, 8.0, 6.0, 5.0, 4.0, 3.0, 3.0, 4.0, 6.0, 8.0, 9.0],
        mean_rh: [60.0, 62.0, 65.0, 70.0, 72.0, 80.0, 86.0, 86.0, 83.0, 75.0, 65.0, 62.0],
        clearness: [0.58, 0.60, 0.60, 0.60, 0.58, 0.40, 0.30, 0.32, 0.42, 0.55, 0.57, 0.57],
    },
    CityClimate {
        name: "New Delhi",
        latitude: 28.61,
        longitude: 77.21,
        elevation: 216.0,
        wall_azimuths: NORTH_EAST,
        mean_temp: [14.0, 17.5, 23.0, 29.0, 33.0, 33.5, 31.0, 30.0, 29.0, 25.5, 20.0, 15.5],
        diurnal_range: [13.0, 13.0, 14.0, 15.0, 14.0, 11.0, 7.0, 7.0, 9.0, 14.0, 15.0, 14.0],
        mean_rh: [65.0, 55.0, 45.0, 30.0, 30.0, 45.0, 70.0, 75.0, 68.0, 55.0, 55.0, 65.0],
        clearness: [0.52, 0.56, 0.58, 0.58, 0.56, 0.50, 0.40, 0.42, 0.50, 0.58, 0.56, 0.52],
    },
    CityClimate {
        name: "Srinagar",
        latitude: 34.08,
        longitude: 74.80,
        elevation: 1585.0,
        wall_azimuths: [180.0, 270.0],
        mean_temp: [2.5, 4.5, 9.5, 14.0, 18.5, 22.5, 24.5, 24.0, 20.0, 13.5, 7.5, 3.5],
        diurnal_range: [9.0, 10.0, 11.0, 12.0, 13.0, 13.0, 11.0, 11.0, 13.0, 15.0, 14.0, 10.0],
        mean_rh: [80.0, 75.0, 70.0, 62.0, 58.0, 55.0, 65.0, 68.0, 62.0, 60.0, 70.0, 80.0],
        clearness: [0.42, 0.45, 0.48, 0.52, 0.58, 0.62, 0.58, 0.56, 0.60, 0.60, 0.52, 0.42],
    },
];

pub fn city(name: &str) -> Option<&'static CityClimate> {
    INDIAN_CITIES.iter().find(|c| c.name.eq_ignore_ascii_case(name))
}

fn rng_for(label: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(Sha256::digest(label.as_bytes()).into())
}

/// Standard-atmosphere pressure at `elevation` m, Pa.
pub fn pressure_at(elevation: f64) -> f64 {
    psychro::STANDARD_PRESSURE * (1.0 - 2.25577e-5 * elevation).powf(5.25588)
}

/// Builds a year from per-hour dry-bulb (°C), relative humidity (%) and
/// global horizontal irradiance (W/m²). Dew point follows from the first two
/// and GHI is split into beam and diffuse with the logistic model.
pub fn year_from_hours(
    location: Location,
    pressure: f64,
    mut hour: impl FnMut(usize) -> (f64, f64, f64),
) -> Result<WeatherYear> {
    let raw: Vec<(f64, f64, f64)> = (0..HOURS_PER_YEAR).map(&mut hour).collect();
    let ghi: Vec<f64> = raw.iter().map(|h| h.2).collect();
    let splits = solar::decompose_ghi_series(&location, &ghi);
    let records = raw
        .iter()
        .zip(&splits)
        .enumerate()
        .map(|(i, (&(t, rh, _), split))| {
            let dew = if rh > 0.0 {
                psychro::dew_point(t, (rh / 100.0).min(1.0))?
            } else {
                -60.0
            };
            Ok(HourlyWeatherRecord {
                timestamp: Timestamp::from_hour_index(i),
                dry_bulb: t,
                dew_point: dew.max(-60.0),
                rel_humidity: rh,
                pressure,
                ghi: split.ghi,
                dni: split.dni,
                dhi: split.dhi,
                wind_speed: 2.0,
                wind_direction: 180.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    WeatherYear::new(location, records)
}

/// Constant dry-bulb and humidity with no sun.
pub fn constant_year(dry_bulb: f64, rel_humidity: f64) -> Result<WeatherYear> {
    year_from_hours(Location::default(), psychro::STANDARD_PRESSURE, |_| {
        (dry_bulb, rel_humidity, 0.0)
    })
}

impl CityClimate {
    pub fn location(&self) -> Location {
        Location {
            name: self.name.to_string(),
            latitude: self.latitude,
            longitude: self.longitude,
            timezone: 5.5,
            elevation: self.elevation,
        }
    }

    /// Deterministic typical year; the random stream is seeded from the city name.
    pub fn typical_year(&self) -> Result<WeatherYear> {
        let mut rng = rng_for(self.name);
        let day_noise = Normal::new(0.0, 1.3).expect("valid normal");
        let location = self.location();

        // Day-level anomalies of temperature, moisture and cloudiness.
        let days = HOURS_PER_YEAR / 24;
        let mut t_anom = Vec::with_capacity(days);
        let mut td_anom = Vec::with_capacity(days);
        let mut kt_anom = Vec::with_capacity(days);
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..days {
            a = 0.7 * a + day_noise.sample(&mut rng);
            b = 0.6 * b + day_noise.sample(&mut rng);
            t_anom.push(a);
            td_anom.push(b);
            kt_anom.push(rng.gen_range(-0.18..0.12));
        }

        let mid_days = month_mid_days();
        let interp = |table: &[f64; 12], day: f64| -> f64 {
            // Piecewise-linear between mid-month values, wrapping over the year.
            let n = 365.0;
            let mut k = 11;
            for (m, &mid) in mid_days.iter().enumerate() {
                if day >= mid {
                    k = m;
                }
            }
            let (d0, v0) = if day < mid_days[0] {
                (mid_days[11] - n, table[11])
            } else {
                (mid_days[k], table[k])
            };
            let next = if day < mid_days[0] { 0 } else { (k + 1) % 12 };
            let d1 = if next == 0 && day >= mid_days[0] {
                mid_days[0] + n
            } else {
                mid_days[next]
            };
            v0 + (table[next] - v0) * (day - d0) / (d1 - d0)
        };

        let pressure = pressure_at(self.elevation);
        let mut hourly = Vec::with_capacity(HOURS_PER_YEAR);
        for i in 0..HOURS_PER_YEAR {
            let day = i / 24;
            let clock = (i % 24) as f64 + 0.5;
            let dayf = day as f64 + clock / 24.0;
            let t_mean = interp(&self.mean_temp, dayf) + t_anom[day];
            let range = interp(&self.diurnal_range, dayf);
            let t = t_mean + 0.5 * range * (std::f64::consts::TAU * (clock - 15.0) / 24.0).cos();
            let rh_mean = interp(&self.mean_rh, dayf).clamp(5.0, 98.0) / 100.0;
            let dew_mean = psychro::dew_point(t_mean, rh_mean)? + 0.6 * td_anom[day];
            let dew = dew_mean.min(t);
            let rh = 100.0 * (psychro::saturation_vapor_pressure(dew)? / psychro::saturation_vapor_pressure(t)?);

            let pos = solar::position_for_hour(&location, Timestamp::from_hour_index(i));
            let e0 = pos.extraterrestrial_horizontal();
            let ghi = if pos.altitude > 0.0 {
                let kt = (interp(&self.clearness, dayf) + kt_anom[day] + rng.gen_range(-0.04..0.04)).clamp(0.05, 0.78);
                (kt * e0).round()
            } else {
                0.0
            };
            hourly.push((t, rh.min(100.0), ghi));
        }
        year_from_hours(location, pressure, |i| hourly[i])
    }
}

fn month_mid_days() -> [f64; 12] {
    let mut out = [0.0; 12];
    let mut start = 0.0;
    for (m, &len) in DAYS_IN_MONTH.iter().enumerate() {
        out[m] = start + len as f64 / 2.0;
        start += len as f64;
    }
    out
}

pub const DEMO_GCMS: [&str; 6] = ["GCM-A", "GCM-B", "GCM-C", "GCM-D", "GCM-E", "GCM-F"];

/// Ensemble-mean warming by scenario and period, K.
fn base_warming(scenario: Scenario, period: Period) -> f64 {
    match (scenario, period) {
        (Scenario::Rcp45, Period::P2030s) => 1.0,
        (Scenario::Rcp45, Period::P2060s) => 1.7,
        (Scenario::Rcp45, Period::P2090s) => 2.1,
        (Scenario::Rcp85, Period::P2030s) => 1.1,
        (Scenario::Rcp85, Period::P2060s) => 2.4,
        (Scenario::Rcp85, Period::P2090s) => 3.9,
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

/// Six synthetic GCM tables for one scenario and period over India,
/// 5–37.5 °N and 67.5–97.5 °E.
pub fn demo_shift_tables(scenario: Scenario, period: Period) -> Vec<GcmShiftTable> {
    let sensitivity = [0.75, 0.9, 1.0, 1.05, 1.15, 1.3];
    let base = base_warming(scenario, period);
    DEMO_GCMS
        .iter()
        .zip(sensitivity)
        .enumerate()
        .map(|(g, (&id, factor))| {
            let phase = g as f64 * 0.9;
            let mut grid = Vec::new();
            for ilat in 0..14 {
                for ilon in 0..13 {
                    let lat = 5.0 + 2.5 * ilat as f64;
                    let lon = 67.5 + 2.5 * ilon as f64;
                    let months = std::array::from_fn(|m| {
                        let season = 1.0 + 0.15 * (std::f64::consts::TAU * m as f64 / 12.0 + phase).cos();
                        let spatial = 1.0 + 0.012 * (lat - 20.0) - 0.004 * (lon - 80.0);
                        let dt = round_to(base * factor * season * spatial, 2);
                        MonthShift {
                            dt,
                            alpha: round_to(0.05 * (factor - 1.0), 3),
                            q_scale: round_to(1.0 + 0.045 * dt, 4),
                            ghi_scale: round_to(1.0 - 0.004 * dt, 4),
                            wind_scale: round_to(1.0 + 0.02 * (factor - 1.0), 4),
                        }
                    });
                    grid.push(GridPoint { lat, lon, months });
                }
            }
            GcmShiftTable {
                gcm_id: id.to_string(),
                scenario,
                period,
                grid,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weather::WeatherField;

    #[test]
    fn typical_years_are_deterministic_and_plausible() {
        let c = city("Chennai").unwrap();
        let a = c.typical_year().unwrap();
        let b = c.typical_year().unwrap();
        assert_eq!(a, b);
        for m in 1..=12 {
            let mean = a.monthly_mean(WeatherField::DryBulb, m).unwrap();
            assert!((mean - c.mean_temp[m - 1]).abs() < 3.0, "month {m}: {mean}");
        }
        let s = city("srinagar").unwrap().typical_year().unwrap();
        assert!(s.monthly_mean(WeatherField::DryBulb, 1).unwrap() < 8.0);
        assert!(s.records().iter().map(|r| r.ghi).sum::<f64>() > 1.0e6);
    }

    #[test]
    fn constant_year_has_no_sun() {
        let y = constant_year(30.0, 20.0).unwrap();
        assert!(y.records().iter().all(|r| r.ghi == 0.0 && r.dry_bulb == 30.0));
    }

    #[test]
    fn shift_tables_cover_grid() {
        let t = demo_shift_tables(Scenario::Rcp85, Period::P2090s);
        assert_eq!(t.len(), 6);
        assert!(t.iter().all(|g| g.grid.len() == 182));
        assert!(t[5].grid[0].months[0].dt > t[0].grid[0].months[0].dt);
    }
}
