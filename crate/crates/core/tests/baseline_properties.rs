use proptest::prelude::*;
use uavmon::baselines::{evaluate, generate, BaselineKind, DEFAULT_WAYPOINT};
use uavmon::jamming_opt::JammingProfile;
use uavmon::model::*;

fn nf_fine() -> (Scenario, SystemParams, PropulsionParams, SolarParams) {
    (
        Scenario::preset(PresetName::Nf),
        SystemParams::default().with_timing(30.0, 0.1).unwrap(),
        PropulsionParams::default(),
        SolarParams::default(),
    )
}

#[test]
fn published_propulsion_energies() {
    let (nf, params, pp, sp) = nf_fine();
    let table = [
        (BaselineKind::RoundTrip, 1255.2),
        (BaselineKind::FlyFirst, 2850.0),
        (BaselineKind::HoverFirst, 2850.0),
        (BaselineKind::LowSpeed, 2427.5),
        (
            BaselineKind::TwoLines {
                waypoint: DEFAULT_WAYPOINT,
            },
            1968.6,
        ),
    ];
    for (kind, expect) in table {
        let got = evaluate(&kind, &nf, &params, &pp, &sp).unwrap().total_propulsion();
        assert!((got / expect - 1.0).abs() <= 0.02, "{}: {got} vs {expect}", kind.name());
    }
}

#[test]
fn cruise_then_hover_costs_the_same_as_hover_then_cruise() {
    let (nf, params, pp, sp) = nf_fine();
    let a = evaluate(&BaselineKind::FlyFirst, &nf, &params, &pp, &sp).unwrap();
    let b = evaluate(&BaselineKind::HoverFirst, &nf, &params, &pp, &sp).unwrap();
    assert!((a.total_propulsion() - b.total_propulsion()).abs() <= 1e-9 * a.total_propulsion());
}

#[test]
fn calibrated_jamming_ratios() {
    let (nf, params, pp, _) = nf_fine();
    let energy = |kind: BaselineKind, p: &SystemParams| {
        let traj = generate(&kind, &nf, p, &pp).unwrap();
        JammingProfile::closed_form(&traj, p).energy(p.delta())
    };
    let low = energy(BaselineKind::LowSpeed, &params);
    let calibrated = SystemParams {
        sigma2_override: Some(params.noise_power() * 623.7 / low),
        ..params.clone()
    };
    let hover = energy(BaselineKind::HoverFirst, &calibrated);
    let two = energy(
        BaselineKind::TwoLines {
            waypoint: DEFAULT_WAYPOINT,
        },
        &calibrated,
    );
    assert!((hover / 396.3 - 1.0).abs() <= 0.10, "{hover}");
    assert!((two / 412.8 - 1.0).abs() <= 0.10, "{two}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jamming_scales_with_noise_over_gain(s in 0.1..10.0f64, b in 0.1..10.0f64, which in 0usize..6) {
        let nf = Scenario::preset(PresetName::Nf);
        let params = SystemParams::default().with_timing(30.0, 0.5).unwrap();
        let pp = PropulsionParams::default();
        let kind = BaselineKind::ALL[which];
        let traj = generate(&kind, &nf, &params, &pp).unwrap();
        let base = JammingProfile::closed_form(&traj, &params).energy(params.delta());
        let scaled = SystemParams {
            sigma2_override: Some(params.noise_power() * s),
            beta0: params.beta0 * b,
            ..params.clone()
        };
        let e = JammingProfile::closed_form(&traj, &scaled).energy(params.delta());
        prop_assert!((e - base * s / b).abs() <= 1e-9 * base.max(1e-300) * s / b);
    }
}
