//! Every scenario serializes to a document that parses back to it.

use proptest::prelude::*;
use qrf_cli::config::{
    parse_config, Experiment, ExperimentKind, Gaussian, Grid, Output, Params, SbsSettings, Scenario, StateB,
    TimeSamples, TimeUnit, Times, Units,
};

fn positive() -> impl Strategy<Value = f64> {
    (1e-3f64..1e3).prop_union(1e-40f64..1e-20)
}

fn grid() -> impl Strategy<Value = Grid> {
    (-1e3f64..1e3, 1e-6f64..1e3, 2usize..5000).prop_map(|(p_min, span, n)| Grid {
        p_min,
        p_max: p_min + span,
        n,
    })
}

fn gaussian() -> impl Strategy<Value = Gaussian> {
    (any::<f64>().prop_filter("finite", |v| v.is_finite()), positive())
        .prop_map(|(center, width)| Gaussian { center, width })
}

fn state_b() -> impl Strategy<Value = StateB> {
    prop_oneof![
        gaussian().prop_map(StateB::Gaussian),
        (-1e3f64..1e3, -1e3f64..1e3, positive()).prop_map(|(beta, beta_prime, width)| StateB::Cat {
            beta,
            beta_prime,
            width
        }),
    ]
}

fn times() -> impl Strategy<Value = Times> {
    let samples = prop_oneof![
        (0.0f64..1e6, 1e-9f64..1e6, 2usize..500).prop_map(|(t0, d, n)| TimeSamples::Linspace { t0, t1: t0 + d, n }),
        prop::collection::vec(1e-9f64..1e3, 1..20).prop_map(|steps| {
            let mut t = 0.0;
            TimeSamples::Values(
                steps
                    .into_iter()
                    .map(|s| {
                        t += s;
                        t
                    })
                    .collect(),
            )
        }),
    ];
    (samples, prop::bool::ANY).prop_map(|(samples, tau)| Times {
        samples,
        unit: if tau { TimeUnit::Tau } else { TimeUnit::Absolute },
    })
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        (prop::bool::ANY, positive(), positive(), positive(), positive()),
        state_b(),
        gaussian(),
        prop::option::of(gaussian()),
        grid(),
        grid(),
        times(),
        (0usize..6, -1e3f64..1e3, -1e3f64..1e3, prop::collection::vec(1e-3f64..10.0, 2..6)),
        ("[a-z][a-z0-9_]{0,12}", prop::option::of("[a-z]{1,8}"), prop::bool::ANY),
    )
        .prop_map(|(p, state_b, state_c, c2, grid_b, grid_c, times, e, o)| {
            let kind = ExperimentKind::ALL[e.0];
            let sbs = (kind == ExperimentKind::SbsScan).then(|| {
                let mut edges = vec![-50.0];
                for w in &e.3 {
                    edges.push(edges.last().unwrap() + w);
                }
                SbsSettings {
                    bin_edges: edges,
                    coh_max: 0.05,
                    overlap_max: 0.1,
                }
            });
            Scenario {
                params: Params {
                    units: if p.0 { Units::Si } else { Units::Natural },
                    hbar: p.1,
                    m_a: p.2,
                    m_b: p.3,
                    m_c: p.4,
                },
                state_b,
                state_c,
                state_c2: if sbs.is_some() { c2 } else { None },
                grid_b,
                grid_c,
                times,
                experiment: Experiment {
                    kind,
                    pi_b: e.1,
                    pi_b_prime: e.2,
                    sbs,
                },
                output: Output {
                    name: o.0,
                    dir: o.1,
                    plot: o.2,
                },
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn serialized_scenarios_parse_back(s in scenario()) {
        let text = s.to_ini();
        let parsed = parse_config(&text);
        prop_assert_eq!(parsed, Ok(s), "{}", text);
    }
}
