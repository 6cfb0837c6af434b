use serde::{Deserialize, Serialize};

use super::wall::WallSolver;
use super::RoomArchetype;
use crate::error::{Error, Result};
use crate::psychro;
use crate::solar::{self, IrradianceSplit, Surface, WindowGeometry};
use crate::weather::{HourlyWeatherRecord, Location, Timestamp, WeatherYear, HOURS_PER_YEAR};

/// Free-floating temperatures within this margin of a setpoint do not
/// switch the system on.
const SETPOINT_SLACK: f64 = 1e-9;
const HUMIDITY_SLACK: f64 = 1e-12;
const J_PER_KWH: f64 = 3.6e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSettings {
    /// Sub-step length, s. Must divide one hour.
    pub timestep_s: f64,
    /// Warm-up ends once a repeated day changes no temperature by more than this, K.
    pub warmup_tolerance: f64,
    pub warmup_max_days: usize,
    /// Keep an hourly trace in the result.
    pub trace: bool,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            timestep_s: 600.0,
            warmup_tolerance: 0.01,
            warmup_max_days: 30,
            trace: false,
        }
    }
}

impl SimulationSettings {
    pub fn steps_per_hour(&self) -> Result<usize> {
        let n = 3600.0 / self.timestep_s;
        if self.timestep_s.is_nan() || self.timestep_s <= 0.0 || (n - n.round()).abs() > 1e-9 || n.round() < 1.0 {
            return Err(Error::Config(format!(
                "timestep {} s does not divide one hour",
                self.timestep_s
            )));
        }
        Ok(n.round() as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoneState {
    /// °C
    pub t_zone: f64,
    /// kg/kg
    pub w_zone: f64,
    /// Node temperatures of each wall, outside to inside, °C.
    pub wall_nodes: Vec<Vec<f64>>,
}

impl ZoneState {
    /// Interior surface temperature of each wall, °C.
    pub fn surface_temps(&self, model: &ZoneModel) -> Vec<f64> {
        self.wall_nodes
            .iter()
            .zip(&model.walls)
            .map(|(nodes, w)| w.surface_temperature(*nodes.last().unwrap(), self.t_zone))
            .collect()
    }

    fn max_change(&self, other: &ZoneState) -> f64 {
        let nodes = self
            .wall_nodes
            .iter()
            .flatten()
            .zip(other.wall_nodes.iter().flatten())
            .map(|(a, b)| (a - b).abs());
        nodes.fold((self.t_zone - other.t_zone).abs(), f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HvacMode {
    Off,
    Heating,
    CoolingSensible,
    Dehumidify,
}

impl HvacMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HvacMode::Off => "off",
            HvacMode::Heating => "heating",
            HvacMode::CoolingSensible => "cooling_sensible",
            HvacMode::Dehumidify => "dehumidify",
        }
    }
}

/// Energy the ideal system delivers over a step or an aggregate of steps, J.
/// All fields are non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HvacDemand {
    pub heating_j: f64,
    pub cooling_sensible_j: f64,
    /// Moisture removal expressed as latent heat.
    pub latent_j: f64,
}

impl HvacDemand {
    /// Heating takes precedence, then sensible cooling, then dehumidification.
    pub fn mode(&self) -> HvacMode {
        if self.heating_j > 0.0 {
            HvacMode::Heating
        } else if self.cooling_sensible_j > 0.0 {
            HvacMode::CoolingSensible
        } else if self.latent_j > 0.0 {
            HvacMode::Dehumidify
        } else {
            HvacMode::Off
        }
    }

    /// Net sensible energy added to the zone; negative when cooling.
    pub fn sensible_j(&self) -> f64 {
        self.heating_j - self.cooling_sensible_j
    }

    pub fn is_active(&self) -> bool {
        self.mode() != HvacMode::Off
    }

    fn accumulate(&mut self, other: &HvacDemand) {
        self.heating_j += other.heating_j;
        self.cooling_sensible_j += other.cooling_sensible_j;
        self.latent_j += other.latent_j;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub demand: HvacDemand,
    pub occupied: bool,
    /// |zone-air heat balance + system sensible rate|, W.
    pub sensible_residual: f64,
    /// |zone-air moisture balance − system latent rate|, W.
    pub moisture_residual: f64,
    /// Zone relative humidity at the end of the step, percent.
    pub rel_humidity: f64,
}

/// Worst-case checks gathered over every sub-step of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceDiagnostics {
    pub max_sensible_residual_w: f64,
    pub max_moisture_residual_w: f64,
    pub occupied_t_min: f64,
    pub occupied_t_max: f64,
    pub occupied_rh_max: f64,
    /// Largest system energy delivered in any unoccupied sub-step, J.
    pub unoccupied_demand_max_j: f64,
    pub steps: usize,
}

impl Default for BalanceDiagnostics {
    fn default() -> Self {
        Self {
            max_sensible_residual_w: 0.0,
            max_moisture_residual_w: 0.0,
            occupied_t_min: f64::INFINITY,
            occupied_t_max: f64::NEG_INFINITY,
            occupied_rh_max: f64::NEG_INFINITY,
            unoccupied_demand_max_j: 0.0,
            steps: 0,
        }
    }
}

impl BalanceDiagnostics {
    fn record(&mut self, state: &ZoneState, out: &StepOutcome) {
        self.steps += 1;
        self.max_sensible_residual_w = self.max_sensible_residual_w.max(out.sensible_residual);
        self.max_moisture_residual_w = self.max_moisture_residual_w.max(out.moisture_residual);
        let d = out.demand;
        if out.occupied {
            self.occupied_t_min = self.occupied_t_min.min(state.t_zone);
            self.occupied_t_max = self.occupied_t_max.max(state.t_zone);
            self.occupied_rh_max = self.occupied_rh_max.max(out.rel_humidity);
        } else {
            let total = d.heating_j + d.cooling_sensible_j + d.latent_j;
            self.unoccupied_demand_max_j = self.unoccupied_demand_max_j.max(total);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourlyTrace {
    pub month: u8,
    pub day: u8,
    pub hour: u8,
    pub t_zone: f64,
    pub w_zone: f64,
    pub rh_zone: f64,
    pub heating_wh: f64,
    pub cooling_sensible_wh: f64,
    pub latent_wh: f64,
    pub mode: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnualResult {
    pub heating_kwh: f64,
    pub cooling_sensible_kwh: f64,
    pub cooling_latent_kwh: f64,
    pub cooling_total_kwh: f64,
    /// Hours with any non-zero system demand.
    pub usage_hours: usize,
    pub warmup_days: usize,
    pub diagnostics: BalanceDiagnostics,
    pub trace: Option<Vec<HourlyTrace>>,
}

impl AnnualResult {
    fn from_demand(total: HvacDemand, usage_hours: usize, warmup_days: usize, diagnostics: BalanceDiagnostics) -> Self {
        let cooling_sensible_kwh = total.cooling_sensible_j / J_PER_KWH;
        let cooling_latent_kwh = total.latent_j / J_PER_KWH;
        Self {
            heating_kwh: total.heating_j / J_PER_KWH,
            cooling_sensible_kwh,
            cooling_latent_kwh,
            cooling_total_kwh: cooling_sensible_kwh + cooling_latent_kwh,
            usage_hours,
            warmup_days,
            diagnostics,
            trace: None,
        }
    }

    /// Sensible share of cooling energy, percent; `None` when there is no cooling.
    pub fn sensible_share_pct(&self) -> Option<f64> {
        (self.cooling_total_kwh > 0.0).then(|| 100.0 * self.cooling_sensible_kwh / self.cooling_total_kwh)
    }

    pub fn latent_share_pct(&self) -> Option<f64> {
        (self.cooling_total_kwh > 0.0).then(|| 100.0 * self.cooling_latent_kwh / self.cooling_total_kwh)
    }

    /// e.g. `"2410 (78 %)"`.
    pub fn sensible_cell(&self) -> String {
        format_share(self.cooling_sensible_kwh, self.sensible_share_pct())
    }

    pub fn latent_cell(&self) -> String {
        format_share(self.cooling_latent_kwh, self.latent_share_pct())
    }
}

pub(crate) fn format_share(kwh: f64, pct: Option<f64>) -> String {
    match pct {
        Some(p) => format!("{kwh:.0} ({p:.0} %)"),
        None => format!("{kwh:.0}"),
    }
}

/// Hour-constant driving conditions.
#[derive(Debug, Clone)]
struct HourDrivers {
    t_out: f64,
    w_out: f64,
    pressure: f64,
    /// Sol-air excess α·I/h_out per wall, K.
    sol_air_excess: Vec<f64>,
    /// Solar heat admitted through all windows, W.
    window_solar: f64,
}

/// Outdoor conditions and clock for one sub-step.
struct Forcing<'a> {
    t_out: f64,
    w_out: f64,
    pressure: f64,
    /// Sol-air excess per wall, K.
    sol_air_excess: &'a [f64],
    window_solar: f64,
    /// Time of day at the middle of the step, h.
    clock: f64,
}

#[derive(Debug, Default)]
struct Scratch {
    rhs: Vec<f64>,
    zero_zone: Vec<Vec<f64>>,
}

/// Precomputed simulation model for one archetype and sub-step length.
#[derive(Debug, Clone)]
pub struct ZoneModel {
    archetype: RoomArchetype,
    settings: SimulationSettings,
    steps_per_hour: usize,
    /// Backward-Euler solvers over half a sub-step.
    walls: Vec<WallSolver>,
    net_areas: Vec<f64>,
    window_ua: f64,
    infiltration_mcp: f64,
    infiltration_mass: f64,
    /// ρ·V·c_p, J/K
    air_heat_capacity: f64,
    /// ρ·V, kg
    air_mass: f64,
}

impl ZoneModel {
    pub fn new(archetype: RoomArchetype, settings: SimulationSettings) -> Result<Self> {
        archetype.validate()?;
        let steps_per_hour = settings.steps_per_hour()?;
        let walls = archetype
            .walls
            .iter()
            .map(|w| WallSolver::new(w, 0.5 * settings.timestep_s))
            .collect::<Result<Vec<_>>>()?;
        let net_areas = (0..archetype.walls.len())
            .map(|i| archetype.net_wall_area_of(i))
            .collect();
        let window_ua = archetype.windows.iter().map(|w| w.u_value * w.area()).sum();
        let infiltration_mass = archetype.infiltration_mass_flow();
        let air_mass = archetype.air.rho_air * archetype.volume();
        Ok(Self {
            settings,
            steps_per_hour,
            walls,
            net_areas,
            window_ua,
            infiltration_mcp: infiltration_mass * archetype.air.c_p,
            infiltration_mass,
            air_heat_capacity: air_mass * archetype.air.c_p,
            air_mass,
            archetype,
        })
    }

    pub fn archetype(&self) -> &RoomArchetype {
        &self.archetype
    }

    pub fn settings(&self) -> &SimulationSettings {
        &self.settings
    }

    /// A state with air and every wall node at `t`.
    pub fn uniform_state(&self, t: f64, w: f64) -> ZoneState {
        ZoneState {
            t_zone: t,
            w_zone: w,
            wall_nodes: self.walls.iter().map(|s| vec![t; s.node_count()]).collect(),
        }
    }

    fn hour_drivers(&self, location: &Location, rec: &HourlyWeatherRecord) -> Result<HourDrivers> {
        let a = &self.archetype;
        let position = solar::position_for_hour(location, rec.timestamp);
        let split = IrradianceSplit::from_record(rec, &position);
        let on_wall: Vec<_> = a
            .walls
            .iter()
            .map(|w| solar::incident_on_surface(&split, &position, &Surface::vertical(w.azimuth), a.ground_albedo))
            .collect();
        let sol_air_excess = a
            .walls
            .iter()
            .zip(&on_wall)
            .map(|(w, irr)| w.exterior_absorptance * irr.total() / w.h_out)
            .collect();
        let mut window_solar = 0.0;
        for win in &a.windows {
            let irr = on_wall[win.wall];
            let shaded = match win.overhang {
                Some(o) => {
                    let geom = WindowGeometry {
                        width: win.width,
                        height: win.height,
                        azimuth: a.walls[win.wall].azimuth,
                    };
                    solar::overhang_shaded_fraction(&position, &geom, &o)
                }
                None => 0.0,
            };
            let admitted = irr.beam * (1.0 - shaded) + irr.diffuse();
            window_solar += win.shgc * win.interior_shade_multiplier * admitted * win.area();
        }
        Ok(HourDrivers {
            t_out: rec.dry_bulb,
            w_out: rec.humidity_ratio()?,
            pressure: rec.pressure,
            sol_air_excess,
            window_solar,
        })
    }

    fn check_state(&self, state: &ZoneState) -> Result<()> {
        let shape_ok = state.wall_nodes.len() == self.walls.len()
            && state
                .wall_nodes
                .iter()
                .zip(&self.walls)
                .all(|(n, w)| n.len() == w.node_count());
        if !shape_ok {
            return Err(Error::Config("zone state does not match the archetype's walls".into()));
        }
        if state.w_zone.is_nan() || state.w_zone < 0.0 || !state.t_zone.is_finite() {
            return Err(Error::Numerical(format!(
                "invalid zone state T={} W={}",
                state.t_zone, state.w_zone
            )));
        }
        Ok(())
    }

    /// Advances `state` by one sub-step with the implicit midpoint rule: a
    /// backward-Euler half step to the midpoint, then linear extrapolation to
    /// the end. The system load is the midpoint rate, so its energy over the
    /// step equals the change in stored heat plus the midpoint flows.
    fn step(&self, state: &mut ZoneState, f: &Forcing<'_>, scratch: &mut Scratch) -> Result<StepOutcome> {
        let a = &self.archetype;
        let dt = self.settings.timestep_s;
        let half = 0.5 * dt;
        let (q_internal, vapour) = a.schedule.gains(f.clock, a.air.h_fg);
        let occupied = a.schedule.occupied.contains(f.clock);

        // Wall gains are affine in the midpoint zone temperature: g0 + g1·T.
        let Scratch {
            rhs: rhs_buf,
            zero_zone,
        } = scratch;
        zero_zone.resize(self.walls.len(), Vec::new());
        let (mut g0, mut g1) = (0.0, 0.0);
        for (i, wall) in self.walls.iter().enumerate() {
            let zero = &mut zero_zone[i];
            wall.solve_zero_zone(&state.wall_nodes[i], f.t_out + f.sol_air_excess[i], rhs_buf, zero)?;
            let last = wall.node_count() - 1;
            let ga = self.net_areas[i] * wall.g_int();
            g0 += ga * zero[last];
            g1 += ga * (wall.unit_response()[last] - 1.0);
        }

        // An ideal system switching on outside the band pulls the air to the
        // setpoint at the start of the step.
        let sp = a.setpoints;
        let t_zone = state.t_zone;
        let t_old = if occupied && t_zone < sp.heating - SETPOINT_SLACK {
            sp.heating
        } else if occupied && t_zone > sp.cooling + SETPOINT_SLACK {
            sp.cooling
        } else {
            t_zone
        };
        let pull_down = self.air_heat_capacity * (t_old - t_zone);
        let c_dt = self.air_heat_capacity / half;
        let k_out = self.infiltration_mcp + self.window_ua;
        let rhs = c_dt * t_old + q_internal + f.window_solar + k_out * f.t_out + g0;
        let diag = c_dt + k_out - g1;
        let t_free = 2.0 * rhs / diag - t_old;
        let t_new = if occupied && t_free < sp.heating - SETPOINT_SLACK {
            sp.heating
        } else if occupied && t_free > sp.cooling + SETPOINT_SLACK {
            sp.cooling
        } else {
            t_free
        };
        if !t_new.is_finite() {
            return Err(Error::Numerical("zone temperature is not finite".into()));
        }
        let t_mid = 0.5 * (t_old + t_new);
        let q_system = if t_new == t_free { 0.0 } else { diag * t_mid - rhs };

        // Interior surface exchange at the midpoint, then extrapolate the nodes.
        let mut surfaces = 0.0;
        for (i, wall) in self.walls.iter().enumerate() {
            let unit = wall.unit_response();
            let last = wall.node_count() - 1;
            let t_last = zero_zone[i][last] + t_mid * unit[last];
            let t_si = wall.surface_temperature(t_last, t_mid);
            surfaces += a.walls[i].h_in * self.net_areas[i] * (t_si - t_mid);
            for (node, (z, u)) in state.wall_nodes[i].iter_mut().zip(zero_zone[i].iter().zip(unit)) {
                *node = 2.0 * (z + t_mid * u) - *node;
            }
        }
        state.t_zone = t_new;

        // Moisture: storage, infiltration exchange, occupant vapour.
        let m_dt = self.air_mass / half;
        let w_start = state.w_zone;
        let w_start_limit = psychro::humidity_ratio_from_rh(t_old, sp.dehumidify_rh / 100.0, f.pressure)?;
        let w_old = if occupied && w_start > w_start_limit + HUMIDITY_SLACK {
            w_start_limit
        } else {
            w_start
        };
        let supply = m_dt * w_old + vapour + self.infiltration_mass * f.w_out;
        let w_free = 2.0 * supply / (m_dt + self.infiltration_mass) - w_old;
        let w_limit = psychro::humidity_ratio_from_rh(t_new, sp.dehumidify_rh / 100.0, f.pressure)?;
        let w_new = if occupied && w_free > w_limit + HUMIDITY_SLACK {
            w_limit
        } else {
            w_free
        };
        if w_new.is_nan() || w_new < 0.0 {
            return Err(Error::Numerical(format!("zone humidity ratio {w_new} is invalid")));
        }
        let w_mid = 0.5 * (w_old + w_new);
        let removal = if w_new == w_free {
            0.0
        } else {
            supply - (m_dt + self.infiltration_mass) * w_mid
        };
        state.w_zone = w_new;

        // Zone-air balances at the midpoint, evaluated term by term.
        let windows = self.window_ua * (f.t_out - t_mid) + f.window_solar;
        let infiltration = self.infiltration_mcp * (f.t_out - t_mid);
        let storage = c_dt * (t_mid - t_old);
        let q_sys_sensible = q_internal + surfaces + windows + infiltration - storage;
        let sensible_residual = (q_sys_sensible + q_system).abs();

        let h_fg = a.air.h_fg;
        let q_sys_latent = h_fg * (vapour + self.infiltration_mass * (f.w_out - w_mid) - m_dt * (w_mid - w_old));
        let moisture_residual = (q_sys_latent - removal * h_fg).abs();

        let demand = HvacDemand {
            heating_j: q_system.max(0.0) * dt + pull_down.max(0.0),
            cooling_sensible_j: (-q_system).max(0.0) * dt + (-pull_down).max(0.0),
            latent_j: removal.max(0.0) * h_fg * dt + self.air_mass * (w_start - w_old) * h_fg,
        };
        let rel_humidity = 100.0 * psychro::rh_from_humidity_ratio(w_new, t_new, f.pressure)?;
        Ok(StepOutcome {
            demand,
            occupied,
            sensible_residual,
            moisture_residual,
            rel_humidity,
        })
    }

    /// Runs the sub-steps of one hour, interpolating outdoor temperature,
    /// humidity and pressure linearly from the previous hour. Forcing is
    /// evaluated at the middle of each sub-step.
    fn advance_hour(
        &self,
        state: &mut ZoneState,
        [prev, cur, next]: [&HourDrivers; 3],
        hour_of_day: usize,
        scratch: &mut Scratch,
        diagnostics: Option<&mut BalanceDiagnostics>,
    ) -> Result<HvacDemand> {
        let n = self.steps_per_hour;
        let dt_h = self.settings.timestep_s / 3600.0;
        let mut total = HvacDemand::default();
        let mut diag_sink = diagnostics;
        let mut sol_air = cur.sol_air_excess.clone();
        for k in 0..n {
            let f = (k as f64 + 0.5) / n as f64;
            let lerp = |a: f64, b: f64| a + f * (b - a);
            let clock = hour_of_day as f64 + (k as f64 + 0.5) * dt_h;
            // Solar values are hour means, anchored at the middle of their hour.
            let solar = |p: f64, c: f64, nx: f64| {
                if f <= 0.5 {
                    p + (f + 0.5) * (c - p)
                } else {
                    c + (f - 0.5) * (nx - c)
                }
            };
            for (i, s) in sol_air.iter_mut().enumerate() {
                *s = solar(prev.sol_air_excess[i], cur.sol_air_excess[i], next.sol_air_excess[i]);
            }
            let forcing = Forcing {
                t_out: lerp(prev.t_out, cur.t_out),
                w_out: lerp(prev.w_out, cur.w_out),
                pressure: lerp(prev.pressure, cur.pressure),
                sol_air_excess: &sol_air,
                window_solar: solar(prev.window_solar, cur.window_solar, next.window_solar),
                clock,
            };
            let out = self.step(state, &forcing, scratch)?;
            if let Some(d) = diag_sink.as_deref_mut() {
                d.record(state, &out);
            }
            total.accumulate(&out.demand);
        }
        Ok(total)
    }

    /// Warm-up on repeated 1 January, then one pass over the year.
    pub fn run(&self, weather: &WeatherYear) -> Result<AnnualResult> {
        let records = weather.records();
        let drivers = records
            .iter()
            .map(|r| self.hour_drivers(&weather.location, r))
            .collect::<Result<Vec<_>>>()?;
        let sp = self.archetype.setpoints;
        let mut state = self.uniform_state(drivers[0].t_out.clamp(sp.heating, sp.cooling), drivers[0].w_out);
        let mut scratch = Scratch::default();

        let mut warmup_days = 0;
        while warmup_days < self.settings.warmup_max_days {
            let before = state.clone();
            for h in 0..24 {
                let prev = &drivers[if h == 0 { 23 } else { h - 1 }];
                self.advance_hour(
                    &mut state,
                    [prev, &drivers[h], &drivers[(h + 1) % 24]],
                    h,
                    &mut scratch,
                    None,
                )?;
            }
            warmup_days += 1;
            if state.max_change(&before) < self.settings.warmup_tolerance {
                break;
            }
        }

        let mut diagnostics = BalanceDiagnostics::default();
        let mut total = HvacDemand::default();
        let mut usage_hours = 0;
        let mut trace = self.settings.trace.then(|| Vec::with_capacity(HOURS_PER_YEAR));
        for h in 0..HOURS_PER_YEAR {
            let prev = &drivers[if h == 0 { HOURS_PER_YEAR - 1 } else { h - 1 }];
            let cur = &drivers[h];
            let next = &drivers[(h + 1) % HOURS_PER_YEAR];
            let hour = self.advance_hour(
                &mut state,
                [prev, cur, next],
                h % 24,
                &mut scratch,
                Some(&mut diagnostics),
            )?;
            if hour.is_active() {
                usage_hours += 1;
            }
            total.accumulate(&hour);
            if let Some(tr) = trace.as_mut() {
                let ts: Timestamp = records[h].timestamp;
                tr.push(HourlyTrace {
                    month: ts.month,
                    day: ts.day,
                    hour: ts.hour,
                    t_zone: state.t_zone,
                    w_zone: state.w_zone,
                    rh_zone: 100.0 * psychro::rh_from_humidity_ratio(state.w_zone, state.t_zone, cur.pressure)?,
                    heating_wh: hour.heating_j / 3600.0,
                    cooling_sensible_wh: hour.cooling_sensible_j / 3600.0,
                    latent_wh: hour.latent_j / 3600.0,
                    mode: hour.mode().as_str(),
                });
            }
        }
        let mut result = AnnualResult::from_demand(total, usage_hours, warmup_days, diagnostics);
        result.trace = trace;
        Ok(result)
    }
}

/// Advances a zone by one step of length `dt` under constant outdoor
/// conditions taken from `weather`. `clock` is the time of day (h) at the
/// middle of the step.
pub fn step_zone(
    state: &ZoneState,
    weather: &HourlyWeatherRecord,
    location: &Location,
    archetype: &RoomArchetype,
    dt: f64,
    clock: f64,
) -> Result<(ZoneState, HvacDemand)> {
    let settings = SimulationSettings {
        timestep_s: dt,
        ..SimulationSettings::default()
    };
    let model = ZoneModel::new(archetype.clone(), settings)?;
    model.check_state(state)?;
    let drivers = model.hour_drivers(location, weather)?;
    let mut next = state.clone();
    let forcing = Forcing {
        t_out: drivers.t_out,
        w_out: drivers.w_out,
        pressure: drivers.pressure,
        sol_air_excess: &drivers.sol_air_excess,
        window_solar: drivers.window_solar,
        clock,
    };
    let out = model.step(&mut next, &forcing, &mut Scratch::default())?;
    Ok((next, out.demand))
}

pub fn simulate_year(archetype: &RoomArchetype, weather: &WeatherYear) -> Result<AnnualResult> {
    simulate_year_with(archetype, weather, &SimulationSettings::default())
}

pub fn simulate_year_with(
    archetype: &RoomArchetype,
    weather: &WeatherYear,
    settings: &SimulationSettings,
) -> Result<AnnualResult> {
    ZoneModel::new(archetype.clone(), *settings)?.run(weather)
}
