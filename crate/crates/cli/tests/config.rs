use std::path::Path;

use proptest::prelude::*;
use uavmon::baselines::BaselineKind;
use uavmon::model::{Point, PresetName};
use uavmon_cli::config::{Algorithm, ConfigError, RunConfig};

fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    RunConfig::from_toml(text, Path::new("test.toml"))
}

#[test]
fn empty_file_gives_defaults() {
    let cfg = parse("").unwrap();
    let params = cfg.params().unwrap();
    assert_eq!(params.sd_distance, 200.0);
    assert_eq!(params.altitude, 100.0);
    assert_eq!(params.delta(), 0.1);
    assert_eq!(params.slots, 300);
    assert_eq!(params.max_speed, 40.0);
    assert_eq!(params.initial_energy, 7000.0);
    assert_eq!(cfg.propulsion.blade_power + cfg.propulsion.induced_power, 121.4);
    assert_eq!(cfg.solar.irradiance, 1367.0);
    assert_eq!(cfg.algorithm, Algorithm::Alg2);
    assert_eq!(cfg.scenario().unwrap().name, "NF");
}

#[test]
fn presets_and_custom_endpoints() {
    let nf = parse("[scenario]\npreset = \"NF\"\n").unwrap().scenario().unwrap();
    assert_eq!((nf.start, nf.end), (Point::new(300.0, 200.0), Point::new(200.0, 400.0)));
    let custom = parse("[scenario]\nstart = { x = 0, y = 0 }\nend = { x = 50.5, y = 10 }\n")
        .unwrap()
        .scenario()
        .unwrap();
    assert_eq!(custom.end, Point::new(50.5, 10.0));
    assert!(parse("[scenario]\npreset = \"JF\"\nstart = { x = 0, y = 0 }\n").is_err());
}

#[test]
fn invalid_values_are_rejected() {
    assert!(matches!(parse("[system]\ndelta = -0.1\n"), Err(ConfigError::Model(_))));
    assert!(parse("[system]\nhorizon = 30\ndelta = 0.7\n").is_err());
    assert!(parse("[propulsion]\ndrag_ratio = 1.5\n").is_err());
    assert!(parse("[optimizer.ao.solver]\nbarrier_factor = 1.0\n").is_err());
    // Too short a horizon to reach the end at top speed.
    assert!(parse("[system]\nhorizon = 1\ndelta = 0.5\n").is_err());
}

#[test]
fn unknown_keys_report_their_line() {
    let err = parse("seed = 1\n\n[system]\naltitude = 100\nwingspan = 3\n").unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, ConfigError::Parse { .. }));
    assert!(msg.contains("wingspan") && msg.contains("line 5"), "{msg}");
}

#[test]
fn algorithms_parse_and_need_their_sections() {
    let cfg = parse("algorithm = \"baseline:round-trip\"\n").unwrap();
    assert_eq!(cfg.algorithm, Algorithm::Baseline(BaselineKind::RoundTrip));
    let cfg = parse("algorithm = \"baseline:two-lines\"\n[baseline]\nwaypoint = { x = 150, y = 250 }\n").unwrap();
    assert_eq!(
        cfg.baseline_kind(),
        Some(BaselineKind::TwoLines {
            waypoint: Point::new(150.0, 250.0)
        })
    );
    assert!(parse("algorithm = \"alg3\"\n").is_err());
    assert!(parse("algorithm = \"baseline:zigzag\"\n").is_err());
    assert!(parse("algorithm = \"alg1-nlos\"\n").is_err());
    assert!(parse("algorithm = \"alg1-two-link\"\n").is_err());
    assert!(parse("algorithm = \"alg1-non-outage\"\n[non_outage]\np_non = 1.5\n").is_err());
    assert!(parse("algorithm = \"alg1-non-outage\"\n[non_outage]\np_non = 0.5\n").is_ok());
    assert!(parse("algorithm = \"alg1-two-link\"\n[two_link]\ns2 = 50\n").is_ok());
    let nlos = "algorithm = \"alg1-nlos\"\n[nlos]\nlos_c = 10\nlos_d = 0.6\npath_loss_exponent = 2\n\
                nlos_attenuation = 0.2\neta1 = 1e-12\neta2 = 0\n";
    assert!(parse(nlos).is_ok());
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::Alg1),
        Just(Algorithm::Alg2),
        Just(Algorithm::Alg1NonOutage),
        (0usize..6).prop_map(|i| Algorithm::Baseline(BaselineKind::ALL[i])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialized_config_loads_back_equal(
        algorithm in algorithm(),
        seed in any::<u64>(),
        preset in prop_oneof![Just(None), Just(Some(PresetName::Jf)), Just(Some(PresetName::If))],
        slots in 20usize..400,
        sigma2 in prop::option::of(1e-20..1e-10f64),
        altitude in 50.0..150.0f64,
        energy in 1000.0..1e5f64,
        p_non in 0.0..=1.0f64,
        drag in 0.05..0.5f64,
        multi_start in any::<bool>(),
    ) {
        let mut cfg = RunConfig { algorithm, seed, ..RunConfig::default() };
        cfg.scenario.preset = preset;
        cfg.system.horizon = 30.0;
        cfg.system.delta = 30.0 / slots as f64;
        cfg.system.sigma2 = sigma2;
        cfg.system.altitude = altitude;
        cfg.system.initial_energy = energy;
        cfg.non_outage = Some(uavmon::jamming_opt::NonOutageConfig { p_non });
        cfg.propulsion.drag_ratio = drag;
        cfg.optimizer.multi_start = multi_start;
        cfg.output_dir = Some("runs/a b".into());
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text, Path::new("round.toml")).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
