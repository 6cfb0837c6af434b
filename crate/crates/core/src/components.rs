//! Attribution of annual heating and cooling energy to building elements by
//! adding the elements to a walls-only room one at a time.
//!
//! The walls-only result is normalised by the gross wall area and rescaled to
//! the opaque area of the full room. Each added element gets the increment it
//! causes; the windows also take the walls-only energy of the wall area they
//! replace, whatever their position in the ordering. The components therefore
//! telescope to the full room's total, and in a linear regime they do not
//! depend on the ordering.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weather::WeatherYear;
use crate::zone::{simulate_year_with, AnnualResult, RoomArchetype, SimulationSettings};

/// Totals below this magnitude (kWh) get no percentage shares.
pub const SHARE_THRESHOLD_KWH: f64 = 10.0;

/// Elements added after the walls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Windows,
    Infiltration,
    Internal,
}

impl Element {
    pub const ALL: [Element; 3] = [Element::Windows, Element::Infiltration, Element::Internal];

    fn bit(self) -> usize {
        match self {
            Element::Windows => 1,
            Element::Infiltration => 2,
            Element::Internal => 4,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Element::Windows => "windows",
            Element::Infiltration => "infiltration",
            Element::Internal => "internal",
        })
    }
}

impl FromStr for Element {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "windows" | "win" => Ok(Element::Windows),
            "infiltration" | "inf" => Ok(Element::Infiltration),
            "internal" | "int" => Ok(Element::Internal),
            _ => Err(Error::Config(format!("unknown building element {s:?}"))),
        }
    }
}

/// Order in which the non-wall elements are added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering(pub [Element; 3]);

impl Ordering {
    /// The six permutations in lexicographic order.
    pub const ALL: [Ordering; 6] = [
        Ordering([Element::Windows, Element::Infiltration, Element::Internal]),
        Ordering([Element::Windows, Element::Internal, Element::Infiltration]),
        Ordering([Element::Infiltration, Element::Windows, Element::Internal]),
        Ordering([Element::Infiltration, Element::Internal, Element::Windows]),
        Ordering([Element::Internal, Element::Windows, Element::Infiltration]),
        Ordering([Element::Internal, Element::Infiltration, Element::Windows]),
    ];

    pub fn new(elements: [Element; 3]) -> Result<Self> {
        let mask = elements.iter().fold(0, |m, e| m | e.bit());
        if mask != 7 {
            return Err(Error::Config(format!(
                "ordering must be a permutation of windows, infiltration, internal; got {}",
                Ordering(elements)
            )));
        }
        Ok(Ordering(elements))
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "walls>{}>{}>{}", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s
            .split(['>', ','])
            .map(str::trim)
            .filter(|p| !p.eq_ignore_ascii_case("walls"))
            .collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("ordering {s:?} must name three elements")));
        }
        Ordering::new([parts[0].parse()?, parts[1].parse()?, parts[2].parse()?])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadMode {
    Heating,
    Cooling,
}

impl LoadMode {
    pub const ALL: [LoadMode; 2] = [LoadMode::Heating, LoadMode::Cooling];
}

impl fmt::Display for LoadMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LoadMode::Heating => "heating",
            LoadMode::Cooling => "cooling",
        })
    }
}

/// The room with only the walls plus a subset of the other elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelVariant {
    mask: usize,
}

impl ModelVariant {
    pub const WALLS_ONLY: ModelVariant = ModelVariant { mask: 0 };
    pub const FULL: ModelVariant = ModelVariant { mask: 7 };

    pub fn with(elements: &[Element]) -> Self {
        Self {
            mask: elements.iter().fold(0, |m, e| m | e.bit()),
        }
    }

    pub fn includes(&self, e: Element) -> bool {
        self.mask & e.bit() != 0
    }

    /// Excluded windows leave the wall whole; excluded infiltration sets the
    /// air-change rate to zero; excluded internal gains remove occupants and
    /// lights while the system keeps its occupied-hours availability.
    pub fn archetype(&self, full: &RoomArchetype) -> RoomArchetype {
        let mut a = full.clone();
        if !self.includes(Element::Windows) {
            a.windows.clear();
        }
        if !self.includes(Element::Infiltration) {
            a.infiltration_ach = 0.0;
        }
        if !self.includes(Element::Internal) {
            a.schedule = a.schedule.without_gains();
        }
        a
    }
}

/// Annual energy of one variant, kWh.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct VariantEnergy {
    sensible: f64,
    latent: f64,
}

impl VariantEnergy {
    fn of(r: &AnnualResult, mode: LoadMode) -> Self {
        match mode {
            LoadMode::Heating => Self {
                sensible: r.heating_kwh,
                latent: 0.0,
            },
            LoadMode::Cooling => Self {
                sensible: r.cooling_sensible_kwh,
                latent: r.cooling_latent_kwh,
            },
        }
    }

    fn total(&self) -> f64 {
        self.sensible + self.latent
    }

    fn minus(&self, other: &Self) -> Self {
        Self {
            sensible: self.sensible - other.sensible,
            latent: self.latent - other.latent,
        }
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            sensible: self.sensible * k,
            latent: self.latent * k,
        }
    }
}

/// Walls-only energy normalised by gross wall area and applied to the net area.
pub fn wall_component(walls_only_kwh: f64, gross_area: f64, net_area: f64) -> f64 {
    walls_only_kwh / gross_area * net_area
}

/// Signed per-element energies for one ordering and mode, kWh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentBreakdown {
    pub mode: LoadMode,
    pub ordering: Ordering,
    pub walls: f64,
    pub windows: f64,
    pub infiltration_sensible: f64,
    pub infiltration_latent: f64,
    pub internal_sensible: f64,
    pub internal_latent: f64,
    pub total: f64,
}

pub const COMPONENT_NAMES: [&str; 6] = ["walls", "windows", "inf_sen", "inf_lat", "int_sen", "int_lat"];

impl ComponentBreakdown {
    pub fn components(&self) -> [f64; 6] {
        [
            self.walls,
            self.windows,
            self.infiltration_sensible,
            self.infiltration_latent,
            self.internal_sensible,
            self.internal_latent,
        ]
    }

    pub fn sum(&self) -> f64 {
        self.components().iter().sum()
    }

    /// Shares of |total|, percent, signs preserved; `None` for near-zero totals.
    pub fn percentages(&self) -> Option<[f64; 6]> {
        (self.total.abs() >= SHARE_THRESHOLD_KWH).then(|| self.components().map(|c| 100.0 * c / self.total.abs()))
    }

    pub fn element_total(&self, e: Element) -> f64 {
        match e {
            Element::Windows => self.windows,
            Element::Infiltration => self.infiltration_sensible + self.infiltration_latent,
            Element::Internal => self.internal_sensible + self.internal_latent,
        }
    }
}

/// Annual results of all eight variants of one room under one weather year.
#[derive(Debug, Clone)]
pub struct VariantResults {
    results: Vec<AnnualResult>,
    gross_area: f64,
    net_area: f64,
}

impl VariantResults {
    /// Simulates the eight variants in parallel.
    pub fn compute(archetype: &RoomArchetype, weather: &WeatherYear, settings: &SimulationSettings) -> Result<Self> {
        archetype.validate()?;
        let results = (0..8usize)
            .into_par_iter()
            .map(|mask| simulate_year_with(&ModelVariant { mask }.archetype(archetype), weather, settings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            results,
            gross_area: archetype.gross_wall_area(),
            net_area: archetype.net_wall_area(),
        })
    }

    pub fn result(&self, variant: ModelVariant) -> &AnnualResult {
        &self.results[variant.mask]
    }

    pub fn full(&self) -> &AnnualResult {
        self.result(ModelVariant::FULL)
    }

    fn energy(&self, mask: usize, mode: LoadMode) -> VariantEnergy {
        VariantEnergy::of(&self.results[mask], mode)
    }

    pub fn breakdown(&self, ordering: Ordering, mode: LoadMode) -> ComponentBreakdown {
        let walls_only = self.energy(0, mode);
        let walls_part = walls_only.scaled(self.net_area / self.gross_area);
        let mut out = ComponentBreakdown {
            mode,
            ordering,
            walls: walls_part.total(),
            windows: 0.0,
            infiltration_sensible: 0.0,
            infiltration_latent: 0.0,
            internal_sensible: 0.0,
            internal_latent: 0.0,
            total: self.energy(7, mode).total(),
        };
        let replaced_wall = walls_only.minus(&walls_part);
        let mut mask = 0;
        let mut previous = walls_only;
        for e in ordering.0 {
            mask |= e.bit();
            let current = self.energy(mask, mode);
            let inc = current.minus(&previous);
            match e {
                Element::Windows => out.windows = inc.total() + replaced_wall.total(),
                Element::Infiltration => {
                    out.infiltration_sensible = inc.sensible;
                    out.infiltration_latent = inc.latent;
                }
                Element::Internal => {
                    out.internal_sensible = inc.sensible;
                    out.internal_latent = inc.latent;
                }
            }
            previous = current;
        }
        out
    }

    pub fn all_orderings(&self, mode: LoadMode) -> OrderingSweep {
        OrderingSweep::new(Ordering::ALL.iter().map(|o| self.breakdown(*o, mode)).collect())
    }
}

/// Breakdowns for all six orderings of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingSweep {
    pub breakdowns: Vec<ComponentBreakdown>,
    /// Max − min of each component's percentage share across orderings,
    /// percentage points; `None` when shares are suppressed.
    pub spread: Option<[f64; 6]>,
}

impl OrderingSweep {
    fn new(breakdowns: Vec<ComponentBreakdown>) -> Self {
        let shares: Option<Vec<[f64; 6]>> = breakdowns.iter().map(ComponentBreakdown::percentages).collect();
        let spread = shares.map(|s| {
            std::array::from_fn(|k| {
                let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[k]), hi.max(p[k]))
                });
                hi - lo
            })
        });
        Self { breakdowns, spread }
    }
}

pub fn attribute_loads(
    archetype: &RoomArchetype,
    weather: &WeatherYear,
    ordering: Ordering,
    mode: LoadMode,
    settings: &SimulationSettings,
) -> Result<ComponentBreakdown> {
    Ordering::new(ordering.0)?;
    Ok(VariantResults::compute(archetype, weather, settings)?.breakdown(ordering, mode))
}

pub fn attribute_all_orderings(
    archetype: &RoomArchetype,
    weather: &WeatherYear,
    mode: LoadMode,
    settings: &SimulationSettings,
) -> Result<OrderingSweep> {
    Ok(VariantResults::compute(archetype, weather, settings)?.all_orderings(mode))
}
