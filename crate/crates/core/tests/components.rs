use roomclim::components::{attribute_loads, Element, LoadMode, Ordering, VariantResults};
use roomclim::synth;
use roomclim::zone::{ArchetypeConfig, SimulationSettings};

#[test]
fn every_ordering_telescopes_to_the_full_model() {
    let c = synth::city("Hyderabad").unwrap();
    let a = ArchetypeConfig {
        wall_azimuths: c.wall_azimuths,
        ..ArchetypeConfig::default()
    }
    .build()
    .unwrap();
    let w = c.typical_year().unwrap();
    let v = VariantResults::compute(&a, &w, &SimulationSettings::default()).unwrap();
    for mode in LoadMode::ALL {
        let full = match mode {
            LoadMode::Heating => v.full().heating_kwh,
            LoadMode::Cooling => v.full().cooling_total_kwh,
        };
        let sweep = v.all_orderings(mode);
        assert_eq!(sweep.breakdowns.len(), 6);
        for b in &sweep.breakdowns {
            assert_eq!(b.total, full);
            assert!(
                (b.sum() - full).abs() <= 1e-9 * full.abs().max(1.0),
                "{} {mode}",
                b.ordering
            );
        }
    }
    let cooling = v.breakdown(Ordering::ALL[0], LoadMode::Cooling);
    assert!(cooling.element_total(Element::Internal) > 0.0);
    assert!(cooling.windows > 0.0);
}

#[test]
fn single_ordering_matches_the_sweep() {
    let c = synth::city("Bengaluru").unwrap();
    let a = ArchetypeConfig {
        wall_azimuths: c.wall_azimuths,
        ..ArchetypeConfig::default()
    }
    .build()
    .unwrap();
    let w = c.typical_year().unwrap();
    let settings = SimulationSettings::default();
    let ordering: Ordering = "walls>internal>windows>infiltration".parse().unwrap();
    let one = attribute_loads(&a, &w, ordering, LoadMode::Cooling, &settings).unwrap();
    let sweep = VariantResults::compute(&a, &w, &settings)
        .unwrap()
        .all_orderings(LoadMode::Cooling);
    let same = sweep.breakdowns.iter().find(|b| b.ordering == ordering).unwrap();
    assert_eq!(&one, same);
}

#[test]
fn orderings_must_be_permutations() {
    assert!("walls>windows>windows>internal".parse::<Ordering>().is_err());
    assert!("windows>infiltration".parse::<Ordering>().is_err());
    assert!(Ordering::new([Element::Internal, Element::Windows, Element::Infiltration]).is_ok());
}
