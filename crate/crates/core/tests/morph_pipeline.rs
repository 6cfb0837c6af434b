use roomclim::morph::{
    build_model_classes, ingest_shift_tables, morph_year, write_shift_tables, ClassKind, Idw, MonthShift, Period,
    Scenario,
};
use roomclim::synth;
use roomclim::weather::WeatherField;

#[test]
fn shift_tables_survive_a_file_round_trip() {
    let tables = synth::demo_shift_tables(Scenario::Rcp85, Period::P2090s);
    let mut buf = Vec::new();
    write_shift_tables(&tables, &mut buf).unwrap();
    let back = ingest_shift_tables(buf.as_slice()).unwrap();
    assert_eq!(back.len(), tables.len());
    for (a, b) in tables.iter().zip(&back) {
        assert_eq!(a.gcm_id, b.gcm_id);
        assert_eq!(a.row_count(), b.row_count());
    }
}

#[test]
fn classes_order_and_morph_shifts_monthly_means() {
    let city = synth::city("New Delhi").unwrap();
    let baseline = city.typical_year().unwrap();
    let idw = Idw::default();
    let local: Vec<_> = synth::demo_shift_tables(Scenario::Rcp45, Period::P2060s)
        .iter()
        .map(|t| t.localize(city.latitude, city.longitude, &idw).unwrap())
        .collect();
    let classes = build_model_classes(&local).unwrap();
    for m in 0..12 {
        let (lo, mid, hi) = (
            classes.min.months[m].dt,
            classes.median.months[m].dt,
            classes.max.months[m].dt,
        );
        assert!(lo <= mid && mid <= hi, "month {m}: {lo} {mid} {hi}");
    }
    let class = classes.get(ClassKind::Max);
    let out = morph_year(&baseline, &class.months).unwrap();
    for m in 1..=12 {
        let before = baseline.monthly_mean(WeatherField::DryBulb, m).unwrap();
        let after = out.year.monthly_mean(WeatherField::DryBulb, m).unwrap();
        assert!((after - before - class.months[m - 1].dt).abs() < 1e-9, "month {m}");
    }
}

#[test]
fn identity_morph_returns_the_baseline() {
    let baseline = synth::city("Srinagar").unwrap().typical_year().unwrap();
    let out = morph_year(&baseline, &[MonthShift::IDENTITY; 12]).unwrap();
    assert_eq!(out.year, baseline);
    assert_eq!(out.saturation_clamps, 0);
}

#[test]
fn humidity_scaling_never_exceeds_saturation() {
    let baseline = synth::city("Mumbai").unwrap().typical_year().unwrap();
    let wet = MonthShift {
        q_scale: 1.6,
        ..MonthShift::IDENTITY
    };
    let out = morph_year(&baseline, &[wet; 12]).unwrap();
    assert!(out.saturation_clamps > 0);
    assert!(out.year.records().iter().all(|r| r.rel_humidity <= 100.0));
}
