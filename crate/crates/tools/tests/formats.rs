//! Round trips of every file format, and rejection of malformed input.

use proptest::prelude::*;

use bellpoly::formats::{
    behavior_from_json, behavior_to_json, correlators_from_csv, correlators_to_csv, inequalities_from_csv,
    inequalities_to_csv, membership_from_json, membership_to_json, read_vertex_file, setup_from_json, setup_to_json,
    vertex_file_string, AnyBehavior, Catalog, CatalogEntry,
};
use bellpoly::manifest::RunManifest;
use bellpoly_core::correlators::to_correlators;
use bellpoly_core::lp::membership;
use bellpoly_core::quantum::{behavior_from_setup, named_setup, SETUP_NAMES};
use bellpoly_core::scalar::rational;
use bellpoly_core::vertices::build_vertices;
use bellpoly_core::{catalog, Behavior, BellInequality, ModelSpec, Rational, Scenario, Space};

fn table_strategy() -> impl Strategy<Value = Behavior<Rational>> {
    (2usize..=4).prop_flat_map(|n| {
        let s = Scenario::new(n).unwrap();
        let k = s.n_settings();
        prop::collection::vec(prop::collection::vec(0i64..9, k), k).prop_map(move |rows| {
            let table = rows
                .iter()
                .flat_map(|row| {
                    let total: i64 = row.iter().map(|w| w + 1).sum();
                    row.iter().map(move |w| rational(w + 1, total))
                })
                .collect();
            Behavior::new(s, table).unwrap()
        })
    })
}

fn inequality_strategy() -> impl Strategy<Value = BellInequality> {
    (2usize..=3, any::<bool>()).prop_flat_map(|(n, prob)| {
        let s = Scenario::new(n).unwrap();
        let space = if prob { Space::Probability } else { Space::Correlator };
        (prop::collection::vec((-20i64..20, 1i64..5), space.dim(&s)), -9i64..9).prop_map(move |(c, b)| {
            let coeffs = c.into_iter().map(|(p, q)| rational(p, q)).collect();
            BellInequality::new(s, space, coeffs, rational(b, 1)).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn behavior_json_round_trip(b in table_strategy()) {
        let text = behavior_to_json(&b, None);
        prop_assert_eq!(behavior_from_json(&text, "b.json").unwrap(), AnyBehavior::Rational(b.clone()));
        let f = b.to_f64();
        let back = behavior_from_json(&behavior_to_json(&f, None), "b.json").unwrap();
        prop_assert_eq!(back, AnyBehavior::Float(f));
    }

    #[test]
    fn correlator_csv_round_trip(b in table_strategy()) {
        let c = to_correlators(&b);
        prop_assert_eq!(correlators_from_csv::<Rational>(&correlators_to_csv(&c), "c.csv").unwrap(), c);
    }

    #[test]
    fn inequality_csv_round_trip(ineqs in prop::collection::vec(inequality_strategy(), 1..4)) {
        let text = inequalities_to_csv(&ineqs, Some(&RunManifest::new(&["t".into()], "rational", 3)));
        prop_assert_eq!(inequalities_from_csv::<Rational>(&text, "i.csv").unwrap(), ineqs);
    }
}

#[test]
fn vertex_files_round_trip_in_both_spaces() {
    for model in ["L[3]", "PTO[A<B]", "NS[AB]", "NS[2]"] {
        let v = build_vertices(&ModelSpec::parse(model).unwrap()).unwrap();
        let text = vertex_file_string(&v, v.space(), None).unwrap();
        let back = read_vertex_file(text.as_bytes(), "v.txt").unwrap();
        assert_eq!(back.points(), v.points(), "{model}");
        if v.model().is_non_signaling() {
            // probability-space files of NS models load in correlator space
            let text = vertex_file_string(&v, Space::Probability, None).unwrap();
            let back = read_vertex_file(text.as_bytes(), "v.txt").unwrap();
            assert_eq!(back.space(), Space::Correlator);
            assert_eq!(back.points(), v.points(), "{model}");
        }
    }
}

#[test]
fn membership_certificates_round_trip() {
    let pg = behavior_from_setup(&named_setup("GHZ3_paper").unwrap()).unwrap();
    let l3 = build_vertices(&ModelSpec::local(3).unwrap()).unwrap();
    let cert = membership(&pg, &l3).unwrap();
    assert!(!cert.inside);
    let back = membership_from_json::<f64>(&membership_to_json(&cert, None), "m.json").unwrap();
    assert_eq!(back.inside, cert.inside);
    let (a, b) = (back.separating.unwrap(), cert.separating.unwrap());
    assert_eq!(a.coeffs(), b.coeffs());
    assert_eq!(a.bound(), b.bound());

    let u: Behavior<Rational> = Behavior::uniform(Scenario::tripartite());
    let cert = membership(&u, &l3).unwrap();
    assert!(cert.inside);
    let back = membership_from_json::<Rational>(&membership_to_json(&cert, None), "m.json").unwrap();
    assert_eq!(back.weights, cert.weights);
}

#[test]
fn setups_round_trip() {
    for name in SETUP_NAMES {
        let s = named_setup(name).unwrap();
        let back = setup_from_json(&setup_to_json(&s, None)).unwrap();
        let (p, q) = (behavior_from_setup(&s).unwrap(), behavior_from_setup(&back).unwrap());
        assert!(p.max_abs_diff(&q) < 1e-15, "{name}");
    }
}

#[test]
fn catalog_round_trip() {
    let c = Catalog {
        families: vec![CatalogEntry { hash: "ab".into(), orbit_size: 8, representative: "00,1\nBOUND,2\n".into() }],
        manifest: Some(RunManifest::new(&["bellpoly".into(), "canon".into()], "rational", 1)),
    };
    assert_eq!(Catalog::from_json(&c.to_json()).unwrap(), c);
}

#[test]
fn malformed_inputs_are_rejected() {
    let chsh = bellpoly::formats::inequality_to_csv(&catalog::chsh());
    let cases: Vec<(&str, String)> = vec![
        ("no bound", chsh.replace("BOUND,2\n", "")),
        ("bad coefficient", chsh.replace(",1\n", ",x\n")),
        ("bad pattern", chsh.replacen("0,0,", "0,Q,", 1)),
        ("mixed blocks", format!("00,1\nP,00,++,1\nBOUND,1\n")),
    ];
    for (what, text) in cases {
        assert!(inequalities_from_csv::<Rational>(&text, "i.csv").is_err(), "{what}");
    }
    assert!(behavior_from_json("{", "b.json").is_err());
    assert!(behavior_from_json(r#"{"n": 2, "backend": "decimal", "entries": []}"#, "b.json").is_err());
    // rows that do not sum to one
    let u: Behavior<Rational> = Behavior::uniform(Scenario::bipartite());
    let bad = behavior_to_json(&u, None).replacen("\"1/4\"", "\"1/2\"", 1);
    assert!(behavior_from_json(&bad, "b.json").is_err());
    assert!(read_vertex_file("model=L[2] n=3 count=0\n".as_bytes(), "v.txt").is_err());
    assert!(read_vertex_file("model=L[2] n=2 count=1 space=correlator\n1,1\n".as_bytes(), "v.txt").is_err());
    assert!(read_vertex_file("".as_bytes(), "v.txt").is_err());
}
