use roomclim::synth;
use roomclim::weather::{parse_weather, write_weather, WeatherFormat, WeatherYear, HOURS_PER_YEAR};
use roomclim::Error;

fn demo_year() -> WeatherYear {
    synth::city("Chennai").unwrap().typical_year().unwrap()
}

fn render(year: &WeatherYear, format: WeatherFormat) -> String {
    let mut buf = Vec::new();
    write_weather(year, format, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn epw_round_trip_is_lossless_at_file_precision() {
    let year = demo_year();
    let text = render(&year, WeatherFormat::Epw);
    let back = parse_weather(text.as_bytes(), WeatherFormat::Epw).unwrap();
    assert_eq!(back.records().len(), HOURS_PER_YEAR);
    assert_eq!(render(&back, WeatherFormat::Epw), text);
    for (a, b) in year.records().iter().zip(back.records()) {
        assert_eq!(a.timestamp, b.timestamp);
        assert!((a.dry_bulb - b.dry_bulb).abs() <= 0.05 + 1e-9);
        assert!((a.ghi - b.ghi).abs() <= 0.5 + 1e-9);
    }
}

#[test]
fn csv_round_trip_keeps_header_and_values() {
    let year = demo_year();
    let text = render(&year, WeatherFormat::Csv);
    let header = text.lines().next().unwrap();
    assert_eq!(header, roomclim::weather::CSV_HEADER.join(","));
    let back = parse_weather(text.as_bytes(), WeatherFormat::Csv).unwrap();
    assert_eq!(render(&back, WeatherFormat::Csv), text);
}

#[test]
fn extra_record_is_a_structure_error() {
    let text = render(&demo_year(), WeatherFormat::Csv);
    let last = text.lines().last().unwrap().to_string();
    let longer = format!("{text}{last}\n");
    match parse_weather(longer.as_bytes(), WeatherFormat::Csv) {
        Err(Error::Structure(msg)) => assert!(msg.contains("8761") || msg.contains("8760"), "{msg}"),
        other => panic!("expected a structure error, got {other:?}"),
    }
}

#[test]
fn out_of_range_humidity_names_the_field() {
    let text = render(&demo_year(), WeatherFormat::Csv);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[100].split(',').map(String::from).collect();
    fields[5] = "120".into();
    lines[100] = fields.join(",");
    let bad = lines.join("\n") + "\n";
    match parse_weather(bad.as_bytes(), WeatherFormat::Csv) {
        Err(Error::Validation { field, .. }) => assert_eq!(field, "rel_humidity"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn truncated_epw_is_rejected() {
    let text = render(&demo_year(), WeatherFormat::Epw);
    let cut: String = text.lines().take(500).map(|l| format!("{l}\n")).collect();
    assert!(parse_weather(cut.as_bytes(), WeatherFormat::Epw).is_err());
}
