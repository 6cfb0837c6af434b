//! Single-zone room: archetype description, sub-hourly heat and moisture
//! balance of the zone air, and an ideal-loads heating/cooling system.

mod sim;
pub mod wall;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::psychro::AirConstants;
use crate::solar::Overhang;

pub use sim::{
    simulate_year, simulate_year_with, step_zone, AnnualResult, BalanceDiagnostics, HourlyTrace, HvacDemand, HvacMode,
    SimulationSettings, StepOutcome, ZoneModel, ZoneState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// m
    pub thickness: f64,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
}

impl Layer {
    pub const fn new(thickness: f64, conductivity: f64, density: f64, specific_heat: f64) -> Self {
        Self {
            thickness,
            conductivity,
            density,
            specific_heat,
        }
    }
}

/// 15 mm cement plaster / 230 mm brick / 15 mm plaster.
pub fn default_layers() -> Vec<Layer> {
    vec![
        Layer::new(0.015, 0.72, 1760.0, 840.0),
        Layer::new(0.230, 0.81, 1920.0, 800.0),
        Layer::new(0.015, 0.72, 1760.0, 840.0),
    ]
}

/// An exterior wall. Layers run from outside to inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSpec {
    pub name: String,
    /// Outward normal, degrees clockwise from north.
    pub azimuth: f64,
    /// Wall area including any windows, m².
    pub gross_area: f64,
    pub layers: Vec<Layer>,
    pub exterior_absorptance: f64,
    /// Interior film coefficient, W/(m²·K).
    pub h_in: f64,
    /// Exterior film coefficient, W/(m²·K).
    pub h_out: f64,
}

impl WallSpec {
    /// Air-to-air steady transmittance including both films, W/(m²·K).
    pub fn u_value(&self) -> f64 {
        let r_layers: f64 = self.layers.iter().map(|l| l.thickness / l.conductivity).sum();
        1.0 / (1.0 / self.h_in + r_layers + 1.0 / self.h_out)
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config(format!("wall {} needs at least one layer", self.name)));
        }
        positive(&format!("wall {} gross_area", self.name), self.gross_area)?;
        positive(&format!("wall {} h_in", self.name), self.h_in)?;
        positive(&format!("wall {} h_out", self.name), self.h_out)?;
        fraction(
            &format!("wall {} exterior_absorptance", self.name),
            self.exterior_absorptance,
        )?;
        for l in &self.layers {
            for (what, v) in [
                ("thickness", l.thickness),
                ("conductivity", l.conductivity),
                ("density", l.density),
                ("specific_heat", l.specific_heat),
            ] {
                positive(&format!("wall {} layer {what}", self.name), v)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    /// Index into the archetype's walls.
    pub wall: usize,
    /// m
    pub width: f64,
    /// m
    pub height: f64,
    /// W/(m²·K)
    pub u_value: f64,
    pub shgc: f64,
    pub interior_shade_multiplier: f64,
    pub overhang: Option<Overhang>,
}

impl WindowSpec {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Daily clock interval `[start, end)` in hours, wrapping past midnight when
/// `start > end`. Equal bounds give an empty interval; `0..24` is all day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailyInterval {
    pub start: f64,
    pub end: f64,
}

impl DailyInterval {
    pub const ALWAYS: DailyInterval = DailyInterval { start: 0.0, end: 24.0 };
    pub const NEVER: DailyInterval = DailyInterval { start: 0.0, end: 0.0 };

    pub const fn new(start: f64, end: f64) -> Self {
        Self { start, end }
    }

    /// `clock` is the time of day in hours.
    pub fn contains(&self, clock: f64) -> bool {
        let c = clock.rem_euclid(24.0);
        if self.start <= self.end {
            self.start <= c && c < self.end
        } else {
            c >= self.start || c < self.end
        }
    }

    pub fn hours_per_day(&self) -> f64 {
        if self.start <= self.end {
            self.end - self.start
        } else {
            24.0 - self.start + self.end
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        let ok = |h: f64| (0.0..=24.0).contains(&h);
        if ok(self.start) && ok(self.end) {
            Ok(())
        } else {
            Err(Error::Config(format!("{what} interval must lie within 0..24 h")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancySchedule {
    /// Occupied period; the HVAC system is available only then.
    pub occupied: DailyInterval,
    pub occupants: u32,
    /// W per person
    pub sensible_gain_per_person: f64,
    /// W per person, released as vapour at the latent heat of the air constants.
    pub latent_gain_per_person: f64,
    /// W
    pub lighting_power: f64,
    pub lighting: DailyInterval,
}

impl Default for OccupancySchedule {
    fn default() -> Self {
        Self {
            occupied: DailyInterval::new(21.0, 7.0),
            occupants: 2,
            sensible_gain_per_person: 70.0,
            latent_gain_per_person: 45.0,
            lighting_power: 54.0,
            lighting: DailyInterval::new(21.0, 23.0),
        }
    }
}

impl OccupancySchedule {
    /// Sensible internal gain (W) and vapour release (kg/s) at `clock`.
    pub fn gains(&self, clock: f64, h_fg: f64) -> (f64, f64) {
        let mut sensible = 0.0;
        let mut vapour = 0.0;
        if self.occupied.contains(clock) {
            let n = f64::from(self.occupants);
            sensible += n * self.sensible_gain_per_person;
            vapour += n * self.latent_gain_per_person / h_fg;
        }
        if self.lighting.contains(clock) {
            sensible += self.lighting_power;
        }
        (sensible, vapour)
    }

    /// Removes occupants and lights but keeps the occupied period.
    pub fn without_gains(&self) -> Self {
        Self {
            occupants: 0,
            lighting_power: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Setpoints {
    /// °C
    pub heating: f64,
    /// °C
    pub cooling: f64,
    /// Upper relative-humidity limit, percent.
    pub dehumidify_rh: f64,
}

impl Default for Setpoints {
    fn default() -> Self {
        Self {
            heating: 18.0,
            cooling: 26.0,
            dehumidify_rh: 65.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomArchetype {
    /// m
    pub width: f64,
    pub depth: f64,
    pub height: f64,
    pub walls: Vec<WallSpec>,
    pub windows: Vec<WindowSpec>,
    pub infiltration_ach: f64,
    pub schedule: OccupancySchedule,
    pub setpoints: Setpoints,
    pub air: AirConstants,
    pub ground_albedo: f64,
}

impl Default for RoomArchetype {
    fn default() -> Self {
        ArchetypeConfig::default().build().expect("default archetype is valid")
    }
}

impl RoomArchetype {
    pub fn volume(&self) -> f64 {
        self.width * self.depth * self.height
    }

    pub fn gross_wall_area(&self) -> f64 {
        self.walls.iter().map(|w| w.gross_area).sum()
    }

    pub fn window_area(&self) -> f64 {
        self.windows.iter().map(WindowSpec::area).sum()
    }

    pub fn window_area_on(&self, wall: usize) -> f64 {
        self.windows
            .iter()
            .filter(|w| w.wall == wall)
            .map(WindowSpec::area)
            .sum()
    }

    /// Opaque area of one wall, m².
    pub fn net_wall_area_of(&self, wall: usize) -> f64 {
        self.walls[wall].gross_area - self.window_area_on(wall)
    }

    pub fn net_wall_area(&self) -> f64 {
        self.gross_wall_area() - self.window_area()
    }

    /// Infiltration dry-air mass flow, kg/s.
    pub fn infiltration_mass_flow(&self) -> f64 {
        self.air.rho_air * self.volume() * self.infiltration_ach / 3600.0
    }

    /// Infiltration volume flow, L/s.
    pub fn infiltration_litres_per_second(&self) -> f64 {
        self.volume() * self.infiltration_ach / 3.6
    }

    /// Steady envelope conductance Σ U·A of opaque walls and glazing, W/K.
    pub fn envelope_ua(&self) -> f64 {
        let walls: f64 = (0..self.walls.len())
            .map(|i| self.walls[i].u_value() * self.net_wall_area_of(i))
            .sum();
        let windows: f64 = self.windows.iter().map(|w| w.u_value * w.area()).sum();
        walls + windows
    }

    pub fn validate(&self) -> Result<()> {
        positive("width", self.width)?;
        positive("depth", self.depth)?;
        positive("height", self.height)?;
        if !(self.infiltration_ach >= 0.0 && self.infiltration_ach.is_finite()) {
            return Err(Error::Config(format!(
                "infiltration_ach must be >= 0, got {}",
                self.infiltration_ach
            )));
        }
        self.air.validate()?;
        fraction("ground_albedo", self.ground_albedo)?;
        for w in &self.walls {
            w.validate()?;
        }
        for (i, win) in self.windows.iter().enumerate() {
            if win.wall >= self.walls.len() {
                return Err(Error::Config(format!("window {i} refers to missing wall {}", win.wall)));
            }
            positive("window width", win.width)?;
            positive("window height", win.height)?;
            positive("window u_value", win.u_value)?;
            if !(win.shgc > 0.0 && win.shgc <= 1.0) {
                return Err(Error::Config(format!(
                    "window shgc must lie in (0, 1], got {}",
                    win.shgc
                )));
            }
            fraction("interior_shade_multiplier", win.interior_shade_multiplier)?;
            if let Some(o) = win.overhang {
                if !(o.depth >= 0.0 && o.gap >= 0.0) {
                    return Err(Error::Config("overhang depth and gap must be >= 0".into()));
                }
            }
        }
        for i in 0..self.walls.len() {
            if self.net_wall_area_of(i) <= 0.0 {
                return Err(Error::Config(format!(
                    "windows cover all of wall {}",
                    self.walls[i].name
                )));
            }
        }
        let s = &self.schedule;
        s.occupied.validate("occupied")?;
        s.lighting.validate("lighting")?;
        for (what, v) in [
            ("sensible_gain_per_person", s.sensible_gain_per_person),
            ("latent_gain_per_person", s.latent_gain_per_person),
            ("lighting_power", s.lighting_power),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{what} must be >= 0, got {v}")));
            }
        }
        let sp = &self.setpoints;
        if sp.heating.is_nan() || sp.cooling.is_nan() || sp.heating >= sp.cooling {
            return Err(Error::Config(format!(
                "heating setpoint {} must be below cooling setpoint {}",
                sp.heating, sp.cooling
            )));
        }
        if !(sp.dehumidify_rh > 0.0 && sp.dehumidify_rh <= 100.0) {
            return Err(Error::Config(format!(
                "dehumidify_rh must lie in (0, 100], got {}",
                sp.dehumidify_rh
            )));
        }
        Ok(())
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be > 0, got {v}")))
    }
}

fn fraction(what: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must lie in 0..=1, got {v}")))
    }
}

/// Flat, file-friendly description of the two-exterior-wall room. Wall 1
/// spans the room width, wall 2 its depth; each carries one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchetypeConfig {
    /// width, depth, height in m
    pub dimensions: [f64; 3],
    pub wall_azimuths: [f64; 2],
    pub layers: Vec<Layer>,
    pub exterior_absorptance: f64,
    pub h_in: f64,
    pub h_out: f64,
    pub window_width: f64,
    pub window_height: f64,
    pub window_u: f64,
    pub shgc: f64,
    pub shade_multiplier: f64,
    pub overhang_depth: f64,
    pub overhang_gap: f64,
    pub infiltration_ach: f64,
    pub occupants: u32,
    pub sensible_gain_per_person: f64,
    pub latent_gain_per_person: f64,
    pub lighting_power: f64,
    pub occupied: DailyInterval,
    pub lighting: DailyInterval,
    pub setpoints: Setpoints,
    pub ground_albedo: f64,
    pub air: AirConstants,
}

impl Default for ArchetypeConfig {
    fn default() -> Self {
        let schedule = OccupancySchedule::default();
        Self {
            dimensions: [3.33, 4.03, 3.18],
            wall_azimuths: [0.0, 90.0],
            layers: default_layers(),
            exterior_absorptance: 0.6,
            h_in: 8.3,
            h_out: 17.0,
            window_width: 1.5,
            window_height: 1.0,
            window_u: 5.8,
            shgc: 0.82,
            shade_multiplier: 0.7,
            overhang_depth: 0.6,
            overhang_gap: 0.0,
            infiltration_ach: 0.75,
            occupants: schedule.occupants,
            sensible_gain_per_person: schedule.sensible_gain_per_person,
            latent_gain_per_person: schedule.latent_gain_per_person,
            lighting_power: schedule.lighting_power,
            occupied: schedule.occupied,
            lighting: schedule.lighting,
            setpoints: Setpoints::default(),
            ground_albedo: 0.2,
            air: AirConstants::default(),
        }
    }
}

impl ArchetypeConfig {
    pub fn build(&self) -> Result<RoomArchetype> {
        let [width, depth, height] = self.dimensions;
        let wall = |name: &str, azimuth: f64, length: f64| WallSpec {
            name: name.into(),
            azimuth,
            gross_area: length * height,
            layers: self.layers.clone(),
            exterior_absorptance: self.exterior_absorptance,
            h_in: self.h_in,
            h_out: self.h_out,
        };
        let walls = vec![
            wall("wall_1", self.wall_azimuths[0], width),
            wall("wall_2", self.wall_azimuths[1], depth),
        ];
        let overhang = (self.overhang_depth > 0.0).then_some(Overhang {
            depth: self.overhang_depth,
            gap: self.overhang_gap,
        });
        let windows = (0..2)
            .map(|i| WindowSpec {
                wall: i,
                width: self.window_width,
                height: self.window_height,
                u_value: self.window_u,
                shgc: self.shgc,
                interior_shade_multiplier: self.shade_multiplier,
                overhang,
            })
            .collect();
        let archetype = RoomArchetype {
            width,
            depth,
            height,
            walls,
            windows,
            infiltration_ach: self.infiltration_ach,
            schedule: OccupancySchedule {
                occupied: self.occupied,
                occupants: self.occupants,
                sensible_gain_per_person: self.sensible_gain_per_person,
                latent_gain_per_person: self.latent_gain_per_person,
                lighting_power: self.lighting_power,
                lighting: self.lighting,
            },
            setpoints: self.setpoints,
            air: self.air,
            ground_albedo: self.ground_albedo,
        };
        archetype.validate()?;
        Ok(archetype)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_geometry() {
        let a = RoomArchetype::default();
        assert_abs_diff_eq!(a.volume(), 3.33 * 4.03 * 3.18, epsilon = 1e-12);
        assert_abs_diff_eq!(a.gross_wall_area(), 23.4, epsilon = 0.1);
        assert_abs_diff_eq!(a.net_wall_area(), 20.4, epsilon = 0.1);
        assert_abs_diff_eq!(a.window_area(), 3.0, epsilon = 1e-12);
        assert_eq!((a.walls[0].azimuth, a.walls[1].azimuth), (0.0, 90.0));
        // 0.75 ACH of the default volume is about 8.9 L/s.
        assert_abs_diff_eq!(a.infiltration_litres_per_second(), 8.886, epsilon = 0.01);
    }

    #[test]
    fn wall_u_value_by_hand() {
        let a = RoomArchetype::default();
        let r = 1.0 / 8.3 + 0.015 / 0.72 + 0.23 / 0.81 + 0.015 / 0.72 + 1.0 / 17.0;
        assert_abs_diff_eq!(a.walls[0].u_value(), 1.0 / r, epsilon = 1e-12);
    }

    #[test]
    fn intervals_wrap_midnight() {
        let night = DailyInterval::new(21.0, 7.0);
        assert!(night.contains(21.0) && night.contains(23.9) && night.contains(0.0) && night.contains(6.99));
        assert!(!night.contains(7.0) && !night.contains(12.0) && !night.contains(20.99));
        assert_eq!(night.hours_per_day(), 10.0);
        assert!(DailyInterval::ALWAYS.contains(23.99) && DailyInterval::ALWAYS.contains(0.0));
        assert!(!DailyInterval::NEVER.contains(0.0));
    }

    #[test]
    fn invalid_archetypes() {
        let base = ArchetypeConfig::default();
        let bad = [
            ArchetypeConfig {
                setpoints: Setpoints {
                    heating: 26.0,
                    ..base.setpoints
                },
                ..base.clone()
            },
            ArchetypeConfig {
                shgc: 1.2,
                ..base.clone()
            },
            ArchetypeConfig {
                layers: Vec::new(),
                ..base.clone()
            },
            ArchetypeConfig {
                dimensions: [base.dimensions[0], base.dimensions[1], 0.0],
                ..base.clone()
            },
        ];
        for c in bad {
            assert!(c.build().is_err());
        }
    }

    #[test]
    fn config_from_toml() {
        let c: ArchetypeConfig = toml::from_str("wall_azimuths = [180, 270]\ninfiltration_ach = 0.5\n").unwrap();
        let a = c.build().unwrap();
        assert_eq!(a.walls[0].azimuth, 180.0);
        assert_eq!(a.infiltration_ach, 0.5);
        assert_eq!(a.schedule, OccupancySchedule::default());
        assert!(toml::from_str::<ArchetypeConfig>("bogus = 1").is_err());
    }
}
