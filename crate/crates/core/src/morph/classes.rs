use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LocalShifts, MonthShift, Period, Scenario};
use crate::error::{Error, Result};

/// The even-count median is rounded to 1/MEDIAN_STEPS °C.
const MEDIAN_STEPS: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Min,
    Median,
    Max,
}

impl ClassKind {
    pub const ALL: [ClassKind; 3] = [ClassKind::Min, ClassKind::Median, ClassKind::Max];
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassKind::Min => "min",
            ClassKind::Median => "median",
            ClassKind::Max => "max",
        })
    }
}

impl FromStr for ClassKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" => Ok(ClassKind::Min),
            "median" => Ok(ClassKind::Median),
            "max" => Ok(ClassKind::Max),
            _ => Err(Error::Config(format!("unknown model class {s:?}"))),
        }
    }
}

/// A synthetic projection built month by month from one statistic of the
/// ensemble's temperature shifts. Other variables come from the GCM whose
/// temperature shift equals (min, max) or lies nearest (median) the statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelClass {
    pub kind: ClassKind,
    pub scenario: Scenario,
    pub period: Period,
    pub months: [MonthShift; 12],
    /// GCM that supplied the companion variables, per month.
    pub companion_gcm: [String; 12],
}

impl ModelClass {
    pub fn monthly_temperature_shift(&self) -> [f64; 12] {
        self.months.map(|m| m.dt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelClasses {
    pub min: ModelClass,
    pub median: ModelClass,
    pub max: ModelClass,
}

impl ModelClasses {
    pub fn get(&self, kind: ClassKind) -> &ModelClass {
        match kind {
            ClassKind::Min => &self.min,
            ClassKind::Median => &self.median,
            ClassKind::Max => &self.max,
        }
    }
}

/// Statistical median; the mean of the two middle values for even counts,
/// rounded to 1e-9.
pub fn median_of(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        let mid = 0.5 * (v[n / 2 - 1] + v[n / 2]);
        (mid * MEDIAN_STEPS).round() / MEDIAN_STEPS
    }
}

pub fn build_model_classes(ensemble: &[LocalShifts]) -> Result<ModelClasses> {
    if ensemble.len() < 2 {
        return Err(Error::Structure(format!(
            "model classes need at least 2 GCMs, got {}",
            ensemble.len()
        )));
    }
    let (scenario, period) = (ensemble[0].scenario, ensemble[0].period);
    if let Some(odd) = ensemble.iter().find(|g| g.scenario != scenario || g.period != period) {
        return Err(Error::Structure(format!(
            "mixed ensemble: {} is {} {}, expected {scenario} {period}",
            odd.gcm_id, odd.scenario, odd.period
        )));
    }

    // Candidates in gcm_id order so ties resolve lexicographically.
    let mut members: Vec<&LocalShifts> = ensemble.iter().collect();
    members.sort_by(|a, b| a.gcm_id.cmp(&b.gcm_id));

    let build = |kind: ClassKind| {
        let mut months = [MonthShift::IDENTITY; 12];
        let mut companion_gcm: [String; 12] = Default::default();
        for m in 0..12 {
            let shifts: Vec<f64> = members.iter().map(|g| g.months[m].dt).collect();
            let stat = match kind {
                ClassKind::Min => shifts.iter().copied().fold(f64::INFINITY, f64::min),
                ClassKind::Max => shifts.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ClassKind::Median => median_of(&shifts),
            };
            let mut best = 0;
            for (i, s) in shifts.iter().enumerate() {
                // Distances within 1e-12 count as ties.
                if (s - stat).abs() < (shifts[best] - stat).abs() - 1e-12 {
                    best = i;
                }
            }
            months[m] = MonthShift {
                dt: stat,
                ..members[best].months[m]
            };
            companion_gcm[m] = members[best].gcm_id.clone();
        }
        ModelClass {
            kind,
            scenario,
            period,
            months,
            companion_gcm,
        }
    };

    Ok(ModelClasses {
        min: build(ClassKind::Min),
        median: build(ClassKind::Median),
        max: build(ClassKind::Max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gcm(id: &str, dt: f64, q: f64) -> LocalShifts {
        LocalShifts {
            gcm_id: id.into(),
            scenario: Scenario::Rcp45,
            period: Period::P2030s,
            months: [MonthShift {
                dt,
                q_scale: q,
                ..MonthShift::IDENTITY
            }; 12],
        }
    }

    #[test]
    fn worked_example() {
        let ens: Vec<_> = [0.71, 0.86, 1.37, 1.49, 1.62, 1.63]
            .iter()
            .enumerate()
            .map(|(i, &dt)| gcm(&format!("G{i}"), dt, 1.0 + i as f64 / 100.0))
            .collect();
        let c = build_model_classes(&ens).unwrap();
        assert_eq!(c.min.months[0].dt, 0.71);
        assert_eq!(c.median.months[0].dt, 1.43);
        assert_eq!(c.max.months[0].dt, 1.63);
        assert_eq!(c.min.companion_gcm[0], "G0");
        assert_eq!(c.max.companion_gcm[0], "G5");
        // 1.37 and 1.49 are equally near 1.43; the lexicographically first wins.
        assert_eq!(c.median.companion_gcm[0], "G2");
        assert_eq!(c.median.months[0].q_scale, 1.02);
    }

    #[test]
    fn identical_and_odd() {
        let same: Vec<_> = (0..4).map(|i| gcm(&format!("G{i}"), 2.5, 1.0)).collect();
        let c = build_model_classes(&same).unwrap();
        assert_eq!(
            (c.min.months[3].dt, c.median.months[3].dt, c.max.months[3].dt),
            (2.5, 2.5, 2.5)
        );
        let odd = vec![gcm("a", 1.0, 1.0), gcm("b", 4.0, 1.0), gcm("c", 2.0, 1.0)];
        assert_eq!(build_model_classes(&odd).unwrap().median.months[0].dt, 2.0);
    }

    #[test]
    fn too_few_or_mixed() {
        assert!(build_model_classes(&[gcm("a", 1.0, 1.0)]).is_err());
        let mut other = gcm("b", 1.0, 1.0);
        other.period = Period::P2090s;
        assert!(build_model_classes(&[gcm("a", 1.0, 1.0), other]).is_err());
    }

    proptest! {
        #[test]
        fn class_ordering(dts in proptest::collection::vec(proptest::collection::vec(-2.0f64..8.0, 12), 2..9)) {
            let ens: Vec<LocalShifts> = dts.iter().enumerate().map(|(i, d)| {
                let mut g = gcm(&format!("g{i:02}"), 0.0, 1.0);
                for (month, &dt) in g.months.iter_mut().zip(d) { month.dt = dt; }
                g
            }).collect();
            let c = build_model_classes(&ens).unwrap();
            for m in 0..12 {
                prop_assert!(c.min.months[m].dt <= c.median.months[m].dt);
                prop_assert!(c.median.months[m].dt <= c.max.months[m].dt);
            }
        }
    }
}
