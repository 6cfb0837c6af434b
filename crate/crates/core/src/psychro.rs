//! Moist-air property relations.
//!
//! Saturation vapour pressure follows the Magnus form
//! `p_ws = 610.94 · exp(17.625·t / (t + 243.04))`, which is accurate to a few
//! tenths of a percent between −40 °C and 50 °C and inverts in closed form,
//! so dew point needs no iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ratio of the molar masses of water vapour and dry air.
pub const MOLAR_MASS_RATIO: f64 = 0.621945;

/// Standard sea-level barometric pressure, Pa.
pub const STANDARD_PRESSURE: f64 = 101_325.0;

const MAGNUS_A: f64 = 610.94;
const MAGNUS_B: f64 = 17.625;
const MAGNUS_C: f64 = 243.04;

const T_MIN: f64 = -60.0;
const T_MAX: f64 = 90.0;

/// Constant air properties used by the zone heat and moisture balances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AirConstants {
    /// kg/m³
    pub rho_air: f64,
    /// J/(kg·K)
    pub c_p: f64,
    /// J/kg
    pub h_fg: f64,
}

impl Default for AirConstants {
    fn default() -> Self {
        Self {
            rho_air: 1.204,
            c_p: 1006.0,
            h_fg: 2.501e6,
        }
    }
}

impl AirConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rho_air", self.rho_air), ("c_p", self.c_p), ("h_fg", self.h_fg)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// State of a parcel of moist air.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoistAirState {
    /// °C
    pub dry_bulb: f64,
    /// kg water per kg dry air
    pub humidity_ratio: f64,
    /// Pa
    pub pressure: f64,
}

impl MoistAirState {
    pub fn new(dry_bulb: f64, humidity_ratio: f64, pressure: f64) -> Result<Self> {
        if humidity_ratio.is_nan() || humidity_ratio < 0.0 {
            return Err(Error::domain("humidity_ratio", humidity_ratio, ">= 0"));
        }
        let w_sat = saturation_humidity_ratio(dry_bulb, pressure)?;
        if humidity_ratio > w_sat + 1e-6 {
            return Err(Error::domain(
                "humidity_ratio",
                humidity_ratio,
                "<= saturation humidity ratio",
            ));
        }
        Ok(Self {
            dry_bulb,
            humidity_ratio,
            pressure,
        })
    }

    pub fn relative_humidity(&self) -> Result<f64> {
        rh_from_humidity_ratio(self.humidity_ratio, self.dry_bulb, self.pressure)
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if (T_MIN..=T_MAX).contains(&t) {
        Ok(())
    } else {
        Err(Error::domain("temperature", t, "-60..=90 °C"))
    }
}

fn check_rh(rh: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rh) {
        Ok(())
    } else {
        Err(Error::domain("relative_humidity", rh, "0..=1"))
    }
}

/// Saturation vapour pressure over water, Pa.
pub fn saturation_vapor_pressure(t: f64) -> Result<f64> {
    check_temperature(t)?;
    Ok(magnus(t))
}

#[inline]
fn magnus(t: f64) -> f64 {
    MAGNUS_A * (MAGNUS_B * t / (t + MAGNUS_C)).exp()
}

/// Humidity ratio of air at dry-bulb `t` (°C), relative humidity `rh` (0–1)
/// and total pressure `p` (Pa).
pub fn humidity_ratio_from_rh(t: f64, rh: f64, p: f64) -> Result<f64> {
    check_rh(rh)?;
    let p_w = rh * saturation_vapor_pressure(t)?;
    if p <= p_w {
        return Err(Error::domain("pressure", p, "> partial vapour pressure"));
    }
    Ok(MOLAR_MASS_RATIO * p_w / (p - p_w))
}

/// Relative humidity (0–1) of air with humidity ratio `w`. Values above
/// saturation are returned as-is (> 1) so callers can detect them.
pub fn rh_from_humidity_ratio(w: f64, t: f64, p: f64) -> Result<f64> {
    if w.is_nan() || w < 0.0 {
        return Err(Error::domain("humidity_ratio", w, ">= 0"));
    }
    let p_ws = saturation_vapor_pressure(t)?;
    Ok(vapor_pressure_from_humidity_ratio(w, p) / p_ws)
}

pub fn saturation_humidity_ratio(t: f64, p: f64) -> Result<f64> {
    humidity_ratio_from_rh(t, 1.0, p)
}

/// Partial pressure of water vapour, Pa.
pub fn vapor_pressure_from_humidity_ratio(w: f64, p: f64) -> f64 {
    p * w / (MOLAR_MASS_RATIO + w)
}

/// Dew-point temperature from dry-bulb and relative humidity (0–1].
pub fn dew_point(t: f64, rh: f64) -> Result<f64> {
    check_temperature(t)?;
    if !(rh > 0.0 && rh <= 1.0) {
        return Err(Error::domain("relative_humidity", rh, "(0, 1]"));
    }
    if rh == 1.0 {
        return Ok(t);
    }
    let gamma = rh.ln() + MAGNUS_B * t / (t + MAGNUS_C);
    Ok(MAGNUS_C * gamma / (MAGNUS_B - gamma))
}

/// Humidity ratio of air whose dew point is `t_dew`.
pub fn humidity_ratio_from_dew_point(t_dew: f64, p: f64) -> Result<f64> {
    let p_w = saturation_vapor_pressure(t_dew)?;
    if p <= p_w {
        return Err(Error::domain("pressure", p, "> partial vapour pressure"));
    }
    Ok(MOLAR_MASS_RATIO * p_w / (p - p_w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Independent evaluation of the Magnus relation, written out in full.
    fn magnus_oracle(t: f64) -> f64 {
        610.94 * f64::exp(17.625 * t / (t + 243.04))
    }

    #[test]
    fn saturation_pressure_matches_oracle_and_tables() {
        let p0 = saturation_vapor_pressure(0.0).unwrap();
        assert_abs_diff_eq!(p0, 611.0, epsilon = 1.0);
        assert_abs_diff_eq!(p0, magnus_oracle(0.0), epsilon = 1e-9);

        // Oracle value frozen: 2333.4406 Pa.
        let p20 = saturation_vapor_pressure(20.0).unwrap();
        assert_abs_diff_eq!(p20, 2333.4406, epsilon = 1e-3);
        // Psychrometric tables give 611.2 Pa and 2338.8 Pa.
        assert!((p0 - 611.2).abs() / 611.2 < 0.004);
        assert!((p20 - 2338.8).abs() / 2338.8 < 0.004);

        assert!(saturation_vapor_pressure(25.0).unwrap() > p20);
    }

    #[test]
    fn saturation_pressure_domain() {
        assert!(saturation_vapor_pressure(-60.1).is_err());
        assert!(saturation_vapor_pressure(90.1).is_err());
        assert!(saturation_vapor_pressure(f64::NAN).is_err());
        assert!(saturation_vapor_pressure(-60.0).is_ok());
    }

    #[test]
    fn dehumidification_threshold_state() {
        let w = humidity_ratio_from_rh(26.0, 0.65, 101_325.0).unwrap();
        let p_w = 0.65 * magnus_oracle(26.0);
        let oracle = 0.621945 * p_w / (101_325.0 - p_w);
        assert_abs_diff_eq!(w, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(w, 0.01375, epsilon = 0.0002);
    }

    #[test]
    fn dry_air_and_bad_rh() {
        assert_eq!(humidity_ratio_from_rh(12.0, 0.0, 90_000.0).unwrap(), 0.0);
        assert!(humidity_ratio_from_rh(12.0, 1.01, 90_000.0).is_err());
        assert!(humidity_ratio_from_rh(12.0, -0.01, 90_000.0).is_err());
    }

    #[test]
    fn dew_point_examples() {
        assert_abs_diff_eq!(dew_point(20.0, 1.0).unwrap(), 20.0, epsilon = 1e-6);
        // Inverted Magnus by hand: γ = ln 0.5 + 17.625·25/268.04, Td = 243.04γ/(17.625 − γ).
        let gamma = 0.5f64.ln() + 17.625 * 25.0 / 268.04;
        let oracle = 243.04 * gamma / (17.625 - gamma);
        let td = dew_point(25.0, 0.5).unwrap();
        assert_abs_diff_eq!(td, oracle, epsilon = 1e-9);
        assert_abs_diff_eq!(td, 13.9, epsilon = 0.3);
        assert!(dew_point(25.0, 0.0).is_err());
        assert!(dew_point(25.0, 0.4).unwrap() < td);
    }

    #[test]
    fn moist_air_state_rejects_supersaturation() {
        let w_sat = saturation_humidity_ratio(20.0, STANDARD_PRESSURE).unwrap();
        assert!(MoistAirState::new(20.0, w_sat, STANDARD_PRESSURE).is_ok());
        assert!(MoistAirState::new(20.0, w_sat + 1e-4, STANDARD_PRESSURE).is_err());
        assert!(MoistAirState::new(20.0, -1e-4, STANDARD_PRESSURE).is_err());
    }

    proptest! {
        #[test]
        fn rh_round_trip(t in -40.0f64..50.0, rh in 0.0f64..=1.0, p in 80_000.0f64..105_000.0) {
            let w = humidity_ratio_from_rh(t, rh, p).unwrap();
            let back = rh_from_humidity_ratio(w, t, p).unwrap();
            prop_assert!((back - rh).abs() <= 1e-9 * rh.max(1e-12) + 1e-15);
        }

        #[test]
        fn humidity_ratio_increases_with_rh_and_t(t in -40.0f64..49.0, rh in 0.01f64..0.99, p in 80_000.0f64..105_000.0) {
            let w = humidity_ratio_from_rh(t, rh, p).unwrap();
            prop_assert!(humidity_ratio_from_rh(t, rh + 0.01, p).unwrap() > w);
            prop_assert!(humidity_ratio_from_rh(t + 0.5, rh, p).unwrap() > w);
        }

        #[test]
        fn dew_point_below_dry_bulb(t in -20.0f64..50.0, rh in 0.05f64..0.999) {
            let td = dew_point(t, rh).unwrap();
            prop_assert!(td < t);
            prop_assert!(dew_point(t, (rh + 0.001).min(1.0)).unwrap() > td);
            // Dew point and humidity ratio agree through the vapour pressure.
            let p = 95_000.0;
            let w1 = humidity_ratio_from_rh(t, rh, p).unwrap();
            let w2 = humidity_ratio_from_dew_point(td, p).unwrap();
            prop_assert!((w1 - w2).abs() <= 1e-12 + 1e-9 * w1);
        }
    }
}
