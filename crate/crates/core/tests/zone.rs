use roomclim::synth;
use roomclim::zone::{simulate_year, step_zone, ArchetypeConfig, RoomArchetype, SimulationSettings, ZoneModel};

fn model() -> ZoneModel {
    ZoneModel::new(RoomArchetype::default(), SimulationSettings::default()).unwrap()
}

#[test]
fn unoccupied_equilibrium_step_is_idle() {
    let m = model();
    let weather = synth::constant_year(24.0, 50.0).unwrap();
    let rec = &weather.records()[0];
    let state = m.uniform_state(24.0, rec.humidity_ratio().unwrap());
    let (next, demand) = step_zone(&state, rec, &weather.location, m.archetype(), 600.0, 12.0).unwrap();
    assert!(!demand.is_active());
    assert!((next.t_zone - 24.0).abs() < 1e-9);
}

#[test]
fn occupied_hot_room_is_pulled_to_the_cooling_setpoint() {
    let m = model();
    let weather = synth::constant_year(32.0, 40.0).unwrap();
    let rec = &weather.records()[0];
    let state = m.uniform_state(32.0, rec.humidity_ratio().unwrap());
    let (next, demand) = step_zone(&state, rec, &weather.location, m.archetype(), 600.0, 22.0).unwrap();
    assert_eq!(next.t_zone, 26.0);
    assert!(demand.cooling_sensible_j > 0.0);
    assert_eq!(demand.heating_j, 0.0);
}

#[test]
fn occupied_cold_room_is_heated() {
    let m = model();
    let weather = synth::constant_year(5.0, 60.0).unwrap();
    let rec = &weather.records()[0];
    let state = m.uniform_state(10.0, rec.humidity_ratio().unwrap());
    let (next, demand) = step_zone(&state, rec, &weather.location, m.archetype(), 600.0, 23.0).unwrap();
    assert_eq!(next.t_zone, 18.0);
    assert!(demand.heating_j > 0.0);
    assert_eq!(demand.cooling_sensible_j, 0.0);
}

#[test]
fn climates_rank_as_expected() {
    let run = |name: &str| {
        let c = synth::city(name).unwrap();
        let a = ArchetypeConfig {
            wall_azimuths: c.wall_azimuths,
            ..ArchetypeConfig::default()
        }
        .build()
        .unwrap();
        simulate_year(&a, &c.typical_year().unwrap()).unwrap()
    };
    let (hot, cold) = (run("Chennai"), run("Srinagar"));
    assert!(hot.cooling_total_kwh > cold.cooling_total_kwh);
    assert!(cold.heating_kwh > hot.heating_kwh);
    assert_eq!(hot.heating_kwh, 0.0);
    assert!(hot.cooling_latent_kwh > 0.0);
}

#[test]
fn hourly_trace_sums_to_the_annual_totals() {
    let c = synth::city("Kolkata").unwrap();
    let a = ArchetypeConfig {
        wall_azimuths: c.wall_azimuths,
        ..ArchetypeConfig::default()
    }
    .build()
    .unwrap();
    let settings = SimulationSettings {
        trace: true,
        ..SimulationSettings::default()
    };
    let r = ZoneModel::new(a, settings)
        .unwrap()
        .run(&c.typical_year().unwrap())
        .unwrap();
    let trace = r.trace.as_ref().unwrap();
    assert_eq!(trace.len(), 8760);
    let cool: f64 = trace.iter().map(|h| h.cooling_sensible_wh).sum::<f64>() / 1000.0;
    let lat: f64 = trace.iter().map(|h| h.latent_wh).sum::<f64>() / 1000.0;
    assert!((cool - r.cooling_sensible_kwh).abs() < 1e-6 * r.cooling_sensible_kwh.max(1.0));
    assert!((lat - r.cooling_latent_kwh).abs() < 1e-6 * r.cooling_latent_kwh.max(1.0));
}
