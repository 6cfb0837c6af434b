//! Sun position, logistic (BRL) diffuse-fraction decomposition of global
//! horizontal irradiance, plane-of-surface irradiance under an isotropic sky,
//! and shading of vertical windows by horizontal overhangs.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::weather::{HourlyWeatherRecord, Location, Timestamp, WeatherYear, HOURS_PER_YEAR};

pub const SOLAR_CONSTANT: f64 = 1367.0;

/// Below this altitude all global irradiance is treated as diffuse.
pub const LOW_SUN_GUARD_DEG: f64 = 1.0;

/// Logistic coefficients (intercept, kt, AST, altitude°, daily KT, persistence).
pub const BRL_COEFFICIENTS: [f64; 6] = [-5.38, 6.63, 0.006, -0.007, 1.75, 1.31];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPosition {
    /// degrees above the horizon
    pub altitude: f64,
    /// degrees clockwise from north, in [0, 360)
    pub azimuth: f64,
    /// hours, 0–24
    pub apparent_solar_time: f64,
    /// Extraterrestrial normal irradiance for the day, W/m².
    pub extraterrestrial_normal: f64,
}

impl SolarPosition {
    pub fn sin_altitude(&self) -> f64 {
        self.altitude.to_radians().sin()
    }

    /// Extraterrestrial irradiance on a horizontal plane, W/m² (0 at night).
    pub fn extraterrestrial_horizontal(&self) -> f64 {
        (self.extraterrestrial_normal * self.sin_altitude()).max(0.0)
    }
}

/// Sun position from Fourier-series declination and equation of time.
///
/// `local_time` is local standard time in decimal hours (0–24) on the
/// 1-based `day_of_year`; `timezone` is in hours east of UTC.
pub fn solar_position(
    latitude: f64,
    longitude: f64,
    timezone: f64,
    day_of_year: usize,
    local_time: f64,
) -> SolarPosition {
    let gamma = 2.0 * PI * ((day_of_year as f64 - 1.0) + (local_time - 12.0) / 24.0) / 365.0;
    let (s1, c1) = gamma.sin_cos();
    let (s2, c2) = (2.0 * gamma).sin_cos();
    let (s3, c3) = (3.0 * gamma).sin_cos();

    let declination =
        0.006918 - 0.399912 * c1 + 0.070257 * s1 - 0.006758 * c2 + 0.000907 * s2 - 0.002697 * c3 + 0.00148 * s3;
    let eot_minutes = 229.18 * (0.000075 + 0.001868 * c1 - 0.032077 * s1 - 0.014615 * c2 - 0.040849 * s2);
    let distance_factor = 1.000110 + 0.034221 * c1 + 0.001280 * s1 + 0.000719 * c2 + 0.000077 * s2;

    let ast = (local_time + (4.0 * (longitude - 15.0 * timezone) + eot_minutes) / 60.0).rem_euclid(24.0);
    let hour_angle = (15.0 * (ast - 12.0)).to_radians();
    let lat = latitude.to_radians();

    let sin_alt = lat.sin() * declination.sin() + lat.cos() * declination.cos() * hour_angle.cos();
    let altitude = sin_alt.clamp(-1.0, 1.0).asin();

    // North and east components of the sun direction on the horizon plane.
    let east = -declination.cos() * hour_angle.sin();
    let north = declination.sin() * lat.cos() - declination.cos() * hour_angle.cos() * lat.sin();
    let azimuth = east.atan2(north).to_degrees().rem_euclid(360.0);

    SolarPosition {
        altitude: altitude.to_degrees(),
        azimuth: if azimuth >= 360.0 { 0.0 } else { azimuth },
        apparent_solar_time: ast,
        extraterrestrial_normal: SOLAR_CONSTANT * distance_factor,
    }
}

/// Sun position at the middle of the hour labelled by `ts`.
pub fn position_for_hour(location: &Location, ts: Timestamp) -> SolarPosition {
    solar_position(
        location.latitude,
        location.longitude,
        location.timezone,
        ts.day_of_year(),
        f64::from(ts.hour) - 0.5,
    )
}

/// Predictors of the logistic diffuse-fraction model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrlPredictors {
    pub clearness_index: f64,
    /// hours
    pub apparent_solar_time: f64,
    /// degrees
    pub altitude: f64,
    pub daily_clearness: f64,
    pub persistence: f64,
}

pub fn brl_diffuse_fraction(p: &BrlPredictors) -> f64 {
    let [b0, b1, b2, b3, b4, b5] = BRL_COEFFICIENTS;
    let z = b0
        + b1 * p.clearness_index
        + b2 * p.apparent_solar_time
        + b3 * p.altitude
        + b4 * p.daily_clearness
        + b5 * p.persistence;
    1.0 / (1.0 + z.exp())
}

/// Hourly clearness index, capped at 1. Zero when the sun is down.
pub fn clearness_index(ghi: f64, position: &SolarPosition) -> f64 {
    let eh = position.extraterrestrial_horizontal();
    if eh <= 0.0 || ghi <= 0.0 {
        0.0
    } else {
        (ghi / eh).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IrradianceSplit {
    /// W/m²
    pub ghi: f64,
    pub dni: f64,
    pub dhi: f64,
    pub diffuse_fraction: f64,
    pub clearness_index: f64,
}

impl IrradianceSplit {
    /// Uses the components already stored in a weather record.
    pub fn from_record(rec: &HourlyWeatherRecord, position: &SolarPosition) -> Self {
        Self {
            ghi: rec.ghi,
            dni: rec.dni,
            dhi: rec.dhi,
            diffuse_fraction: if rec.ghi > 0.0 {
                (rec.dhi / rec.ghi).clamp(0.0, 1.0)
            } else {
                0.0
            },
            clearness_index: clearness_index(rec.ghi, position),
        }
    }
}

/// Day-level context of the logistic model for one hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrlContext {
    pub daily_clearness: f64,
    pub persistence: f64,
}

/// Splits one hour's global horizontal irradiance into beam-normal and
/// diffuse-horizontal parts.
///
/// Beam-normal is capped at the extraterrestrial value; the diffuse part then
/// takes the remainder so `dhi + dni·sin(alt) = ghi` still holds.
pub fn split_ghi(ghi: f64, context: &BrlContext, position: &SolarPosition) -> IrradianceSplit {
    if ghi <= 0.0 {
        return IrradianceSplit::default();
    }
    let kt = clearness_index(ghi, position);
    if position.altitude <= LOW_SUN_GUARD_DEG {
        return IrradianceSplit {
            ghi,
            dni: 0.0,
            dhi: ghi,
            diffuse_fraction: 1.0,
            clearness_index: kt,
        };
    }
    let d = brl_diffuse_fraction(&BrlPredictors {
        clearness_index: kt,
        apparent_solar_time: position.apparent_solar_time,
        altitude: position.altitude,
        daily_clearness: context.daily_clearness,
        persistence: context.persistence,
    });
    let sin_alt = position.sin_altitude();
    let dni = ((1.0 - d) * ghi / sin_alt).min(position.extraterrestrial_normal);
    let dhi = ghi - dni * sin_alt;
    IrradianceSplit {
        ghi,
        dni,
        dhi,
        diffuse_fraction: dhi / ghi,
        clearness_index: kt,
    }
}

/// Applies the logistic decomposition to every hour of a year. Daily
/// clearness is taken over the sunlit hours of each day; persistence is the
/// mean clearness of the neighbouring sunlit hours of the same day, falling
/// back to one side at sunrise and sunset.
pub fn decompose_ghi_series(location: &Location, ghi: &[f64]) -> Vec<IrradianceSplit> {
    assert_eq!(ghi.len(), HOURS_PER_YEAR);
    let positions: Vec<SolarPosition> = (0..HOURS_PER_YEAR)
        .map(|i| position_for_hour(location, Timestamp::from_hour_index(i)))
        .collect();
    let kt: Vec<f64> = ghi
        .iter()
        .zip(&positions)
        .map(|(g, p)| clearness_index(*g, p))
        .collect();
    let sunlit = |i: usize| positions[i].altitude > 0.0;

    let mut out = Vec::with_capacity(HOURS_PER_YEAR);
    for day in 0..HOURS_PER_YEAR / 24 {
        let hours = day * 24..day * 24 + 24;
        let (mut g_sum, mut e_sum) = (0.0, 0.0);
        for i in hours.clone() {
            if sunlit(i) {
                g_sum += ghi[i];
                e_sum += positions[i].extraterrestrial_horizontal();
            }
        }
        let daily = if e_sum > 0.0 { (g_sum / e_sum).min(1.0) } else { 0.0 };
        for i in hours.clone() {
            let prev = (i > hours.start && sunlit(i - 1)).then(|| kt[i - 1]);
            let next = (i + 1 < hours.end && sunlit(i + 1)).then(|| kt[i + 1]);
            let persistence = match (prev, next) {
                (Some(a), Some(b)) => 0.5 * (a + b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => kt[i],
            };
            let ctx = BrlContext {
                daily_clearness: daily,
                persistence,
            };
            out.push(split_ghi(ghi[i], &ctx, &positions[i]));
        }
    }
    out
}

/// Replaces the beam and diffuse columns of a year with the logistic split of
/// its global horizontal irradiance.
pub fn resplit_year(year: &WeatherYear) -> Result<WeatherYear> {
    let ghi: Vec<f64> = year.records().iter().map(|r| r.ghi).collect();
    let splits = decompose_ghi_series(&year.location, &ghi);
    year.map_records(|i, r| {
        Ok(HourlyWeatherRecord {
            dni: splits[i].dni,
            dhi: splits[i].dhi,
            ..r.clone()
        })
    })
}

/// Orientation of a plane surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Surface {
    /// Outward normal, degrees clockwise from north.
    pub azimuth: f64,
    /// degrees from horizontal; 90 for walls
    pub tilt: f64,
}

impl Surface {
    pub fn vertical(azimuth: f64) -> Self {
        Self { azimuth, tilt: 90.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SurfaceIrradiance {
    /// W/m²
    pub beam: f64,
    pub sky_diffuse: f64,
    pub ground_reflected: f64,
}

impl SurfaceIrradiance {
    pub fn total(&self) -> f64 {
        self.beam + self.sky_diffuse + self.ground_reflected
    }

    pub fn diffuse(&self) -> f64 {
        self.sky_diffuse + self.ground_reflected
    }
}

/// Cosine of the angle between the sun direction and the surface normal.
pub fn incidence_cosine(position: &SolarPosition, surface: &Surface) -> f64 {
    let alt = position.altitude.to_radians();
    let tilt = surface.tilt.to_radians();
    let rel = (position.azimuth - surface.azimuth).to_radians();
    alt.cos() * rel.cos() * tilt.sin() + alt.sin() * tilt.cos()
}

pub fn incident_on_surface(
    split: &IrradianceSplit,
    position: &SolarPosition,
    surface: &Surface,
    ground_albedo: f64,
) -> SurfaceIrradiance {
    let cos_tilt = surface.tilt.to_radians().cos();
    let beam = if position.altitude > 0.0 {
        split.dni * incidence_cosine(position, surface).max(0.0)
    } else {
        0.0
    };
    SurfaceIrradiance {
        beam,
        sky_diffuse: split.dhi * (1.0 + cos_tilt) / 2.0,
        ground_reflected: split.ghi * ground_albedo * (1.0 - cos_tilt) / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowGeometry {
    /// m
    pub width: f64,
    /// m
    pub height: f64,
    /// degrees clockwise from north
    pub azimuth: f64,
}

/// Horizontal overhang above a vertical window. The overhang is taken to run
/// past both window edges, so only the vertical shadow projection matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Overhang {
    /// Projection from the wall, m.
    pub depth: f64,
    /// Height of the overhang above the window head, m.
    pub gap: f64,
}

/// Fraction of a vertical window's area that the overhang keeps out of direct
/// sun. Returns 0 when no beam reaches the window.
pub fn overhang_shaded_fraction(position: &SolarPosition, window: &WindowGeometry, overhang: &Overhang) -> f64 {
    if overhang.depth <= 0.0 || window.height <= 0.0 || position.altitude <= 0.0 {
        return 0.0;
    }
    if position.altitude >= 90.0 - 1e-9 {
        return 1.0;
    }
    let cos_rel = (position.azimuth - window.azimuth).to_radians().cos();
    if cos_rel <= 0.0 {
        return 0.0;
    }
    // Tangent of the profile angle.
    let tan_profile = position.altitude.to_radians().tan() / cos_rel;
    let shadow = overhang.depth * tan_profile - overhang.gap;
    (shadow / window.height).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn pos(altitude: f64, azimuth: f64) -> SolarPosition {
        SolarPosition {
            altitude,
            azimuth,
            apparent_solar_time: 12.0,
            extraterrestrial_normal: SOLAR_CONSTANT,
        }
    }

    #[test]
    fn equator_equinox_noon_is_overhead() {
        // Scan around noon on 21 March at the prime meridian.
        let max_alt = (0..=240)
            .map(|k| solar_position(0.0, 0.0, 0.0, 80, 11.0 + k as f64 / 120.0).altitude)
            .fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(max_alt, 90.0, epsilon = 1.0);
    }

    #[test]
    fn midnight_is_dark() {
        for &(lat, lon, tz) in &[
            (28.6, 77.2, 5.5),
            (-33.9, 151.2, 10.0),
            (51.5, 0.0, 0.0),
            (0.0, -60.0, -4.0),
        ] {
            for doy in [1, 80, 172, 266, 355] {
                let p = solar_position(lat, lon, tz, doy, 0.0);
                assert!(p.altitude < 0.0, "lat {lat} doy {doy}: {}", p.altitude);
            }
        }
    }

    #[test]
    fn brl_examples() {
        let overcast = brl_diffuse_fraction(&BrlPredictors {
            clearness_index: 0.0,
            apparent_solar_time: 12.0,
            altitude: 30.0,
            daily_clearness: 0.0,
            persistence: 0.0,
        });
        // 1/(1+exp(-5.38 + 0.072 - 0.21)) by hand.
        assert_abs_diff_eq!(overcast, 1.0 / (1.0 + (-5.518f64).exp()), epsilon = 1e-12);
        assert!(overcast > 0.9);

        let clear = brl_diffuse_fraction(&BrlPredictors {
            clearness_index: 0.8,
            apparent_solar_time: 12.0,
            altitude: 60.0,
            daily_clearness: 0.75,
            persistence: 0.8,
        });
        assert!(clear < 0.35, "{clear}");
    }

    #[test]
    fn split_guards() {
        let ctx = BrlContext {
            daily_clearness: 0.5,
            persistence: 0.5,
        };
        let night = split_ghi(0.0, &ctx, &pos(-10.0, 0.0));
        assert_eq!((night.dni, night.dhi), (0.0, 0.0));
        let low = split_ghi(50.0, &ctx, &pos(0.5, 90.0));
        assert_eq!((low.dni, low.dhi), (0.0, 50.0));
    }

    #[test]
    fn incident_examples() {
        let split = IrradianceSplit {
            ghi: 600.0,
            dni: 700.0,
            dhi: 600.0 - 700.0 * 45f64.to_radians().sin(),
            diffuse_fraction: 0.0,
            clearness_index: 0.0,
        };
        let p = pos(45.0, 180.0);
        let behind = incident_on_surface(&split, &p, &Surface::vertical(0.0), 0.2);
        assert_eq!(behind.beam, 0.0);
        let flat = incident_on_surface(
            &split,
            &p,
            &Surface {
                azimuth: 0.0,
                tilt: 0.0,
            },
            0.2,
        );
        assert_abs_diff_eq!(flat.total(), 600.0, epsilon = 1.0);

        let diffuse_only = IrradianceSplit {
            ghi: 200.0,
            dni: 0.0,
            dhi: 200.0,
            ..Default::default()
        };
        let v = incident_on_surface(&diffuse_only, &p, &Surface::vertical(90.0), 0.3);
        assert_abs_diff_eq!(v.total(), 200.0 / 2.0 + 200.0 * 0.3 / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn overhang_examples() {
        let w = WindowGeometry {
            width: 1.5,
            height: 1.0,
            azimuth: 180.0,
        };
        let none = Overhang { depth: 0.0, gap: 0.0 };
        assert_eq!(overhang_shaded_fraction(&pos(40.0, 180.0), &w, &none), 0.0);
        let some = Overhang { depth: 0.3, gap: 0.0 };
        assert_eq!(overhang_shaded_fraction(&pos(90.0, 123.0), &w, &some), 1.0);
    }

    #[test]
    fn north_wall_gets_less_beam_than_south() {
        // Clear-sky-ish year at a northern-hemisphere site.
        let loc = Location {
            name: "test".into(),
            latitude: 28.6,
            longitude: 77.2,
            timezone: 5.5,
            elevation: 200.0,
        };
        let ghi: Vec<f64> = (0..HOURS_PER_YEAR)
            .map(|i| 0.7 * position_for_hour(&loc, Timestamp::from_hour_index(i)).extraterrestrial_horizontal())
            .collect();
        let splits = decompose_ghi_series(&loc, &ghi);
        let (mut north, mut south) = (0.0, 0.0);
        for (i, s) in splits.iter().enumerate() {
            let p = position_for_hour(&loc, Timestamp::from_hour_index(i));
            north += incident_on_surface(s, &p, &Surface::vertical(0.0), 0.2).beam;
            south += incident_on_surface(s, &p, &Surface::vertical(180.0), 0.2).beam;
        }
        assert!(north < south, "north {north} south {south}");
    }

    proptest! {
        #[test]
        fn diffuse_fraction_in_unit_interval(kt in 0.0f64..1.5, ast in 0.0f64..24.0, alt in -90.0f64..90.0,
                                             daily in 0.0f64..1.2, psi in 0.0f64..1.2) {
            let base = BrlPredictors { clearness_index: kt, apparent_solar_time: ast, altitude: alt,
                                       daily_clearness: daily, persistence: psi };
            let d = brl_diffuse_fraction(&base);
            prop_assert!(d > 0.0 && d < 1.0);
            let brighter = brl_diffuse_fraction(&BrlPredictors { clearness_index: kt + 0.05, ..base });
            prop_assert!(brighter < d);
        }

        #[test]
        fn split_reconstructs_ghi(ghi in 1.0f64..1100.0, alt in 1.5f64..89.0, daily in 0.0f64..1.0, psi in 0.0f64..1.0) {
            let p = pos(alt, 150.0);
            let s = split_ghi(ghi, &BrlContext { daily_clearness: daily, persistence: psi }, &p);
            prop_assert!((s.dhi + s.dni * p.sin_altitude() - ghi).abs() < 1.0);
            prop_assert!(s.dni >= 0.0 && s.dhi >= 0.0);
            prop_assert!((0.0..=1.0).contains(&s.diffuse_fraction));
        }

        #[test]
        fn shading_monotone_in_depth(alt in 0.1f64..89.0, az in 0.0f64..360.0, d1 in 0.0f64..2.0, extra in 0.0f64..1.0, gap in 0.0f64..0.5) {
            let w = WindowGeometry { width: 1.5, height: 1.0, azimuth: 90.0 };
            let p = pos(alt, az);
            let a = overhang_shaded_fraction(&p, &w, &Overhang { depth: d1, gap });
            let b = overhang_shaded_fraction(&p, &w, &Overhang { depth: d1 + extra, gap });
            prop_assert!(b >= a);
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
