//! Acceptance run: one PASS/FAIL line per criterion, with the failing
//! sub-checks listed underneath. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use bellpoly::parallel;
use bellpoly::reproduce::{self, ReproduceOptions, Target};
use bellpoly_core::correlators::to_correlators;
use bellpoly_core::lp::{max_over_vertices, membership, visibility};
use bellpoly_core::polytope::{canonicalize, enumerate_facets, enumerate_vertices, integer_normal_form, RelabelingGroup};
use bellpoly_core::quantum::{self, behavior_from_setup, linalg::C64, named_setup, Observable, QuantumSetup, SeesawOptions};
use bellpoly_core::scalar::rational;
use bellpoly_core::vertices::{build_vertices, enumerate_local};
use bellpoly_core::{catalog, Behavior, BellInequality, ModelSpec, NoiseModel, Rational, Scenario, Space, VertexSet};

struct Sub {
    item: String,
    detail: String,
    pass: bool,
}

fn sub(item: impl Into<String>, pass: bool, detail: impl Into<String>) -> Sub {
    Sub { item: item.into(), detail: detail.into(), pass }
}

fn from_report(target: Target) -> Vec<Sub> {
    match reproduce::run(target, &ReproduceOptions::default()) {
        Ok(report) => report
            .checks
            .into_iter()
            .map(|c| sub(c.item, c.pass, format!("computed {} expected {}", c.computed, c.expected)))
            .collect(),
        Err(e) => vec![sub(target.name(), false, format!("error: {e}"))],
    }
}

fn table_i() -> Vec<Sub> {
    from_report(Target::Table1)
}

fn table_ii() -> Vec<Sub> {
    from_report(Target::Table2)
}

fn svetlichny() -> Vec<Sub> {
    let sv = catalog::svetlichny();
    let q = quantum::value(&sv, &named_setup("GHZ3_paper").unwrap()).unwrap();
    let target = 4.0 * std::f64::consts::SQRT_2;
    let (max, _) = max_over_vertices(&sv, &build_vertices(&ModelSpec::svetlichny()).unwrap()).unwrap();
    vec![
        sub("GHZ3 value = 4 sqrt2 (1e-10)", (q - target).abs() <= 1e-10, format!("{q:.12}")),
        sub("max over SV[2|1] = 4", max == rational(4, 1), format!("{max}")),
    ]
}

fn common_boundary() -> Vec<Sub> {
    from_report(Target::GhzBoundary)
}

fn vertex_counts() -> Vec<Sub> {
    from_report(Target::SymVertices)
}

fn i_opt() -> Vec<Sub> {
    from_report(Target::IneqOpt)
}

fn i_ns3() -> Vec<Sub> {
    let ineq = catalog::i_ns3();
    let (max, _) = max_over_vertices(&ineq, &build_vertices(&ModelSpec::ns22()).unwrap()).unwrap();
    let res = parallel::seesaw(&ineq, &SeesawOptions { restarts: 200, seed: 1, ..Default::default() }).unwrap();
    let best = res.best.value;
    let reached = best >= 12.8062 - reproduce::SEESAW_TOL;
    if !reached {
        eprintln!("warning: see-saw stopped at {best:.6} < 12.8062 - 1e-2 (heuristic)");
    }
    vec![
        sub("max over NS[2/2] = 10", max == rational(10, 1), format!("{max}")),
        sub("see-saw, 200 restarts >= 12.8062 - 1e-2 (heuristic)", reached, format!("{best:.6}")),
    ]
}

fn facet_round_trip() -> Vec<Sub> {
    let s = Scenario::bipartite();
    let local = enumerate_local(s);
    let points: Vec<Vec<Rational>> = local.points().iter().map(|p| p.to_rationals()).collect();
    let h = enumerate_facets(&points).unwrap();
    let facets: Vec<BellInequality> = h
        .facets
        .iter()
        .map(|f| BellInequality::new(s, Space::Correlator, f.normal.clone(), f.rhs.clone()).unwrap())
        .collect();
    let positivity: Vec<_> = (0..s.table_len())
        .map(|i| {
            let (x, a) = s.split_index(i);
            integer_normal_form(&catalog::positivity(s, x, a))
        })
        .collect();
    let chsh = integer_normal_form(&canonicalize(&catalog::chsh()).inequality);
    let n_pos = facets.iter().filter(|f| positivity.contains(&integer_normal_form(f))).count();
    let n_chsh = facets.iter().filter(|f| integer_normal_form(&canonicalize(f).inequality) == chsh).count();
    let mut back = enumerate_vertices(&h).unwrap();
    let mut original = points.clone();
    back.sort();
    original.sort();
    vec![
        sub("24 facets", facets.len() == 24, format!("{}", facets.len())),
        sub("16 positivity facets", n_pos == 16, format!("{n_pos}")),
        sub("8 CHSH facets", n_chsh == 8, format!("{n_chsh}")),
        sub("H->V recovers the 16 points", back == original, format!("{} points", back.len())),
    ]
}

// ---------------------------------------------------------------------------
// criterion 9: compact, fixed-seed versions of the property suites

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn setup_strategy(n: usize) -> impl Strategy<Value = QuantumSetup> {
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n),
        prop::collection::vec((0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU), 2 * n),
    )
        .prop_filter("state too small", |(amps, _)| amps.iter().map(|(r, i)| r * r + i * i).sum::<f64>() > 0.05)
        .prop_map(|(amps, angles)| {
            let obs = angles
                .chunks(2)
                .map(|c| [Observable::from_angles(c[0].0, c[0].1), Observable::from_angles(c[1].0, c[1].1)])
                .collect();
            QuantumSetup::normalized(amps.into_iter().map(|(r, i)| C64::new(r, i)).collect(), obs).unwrap()
        })
}

fn table_strategy() -> impl Strategy<Value = Behavior<Rational>> {
    let s = Scenario::tripartite();
    prop::collection::vec(prop::collection::vec(1i64..7, 8), 8).prop_map(move |rows| {
        let table = rows
            .iter()
            .flat_map(|row| {
                let total: i64 = row.iter().sum();
                row.iter().map(move |w| rational(*w, total))
            })
            .collect();
        Behavior::new(s, table).unwrap()
    })
}

fn model(spec: &str) -> VertexSet {
    build_vertices(&ModelSpec::parse(spec).unwrap()).unwrap()
}

fn outcome(label: &str, result: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Sub {
    match result {
        Ok(()) => sub(label, true, "ok"),
        Err(e) => sub(label, false, format!("{e}")),
    }
}

fn property_suites() -> Vec<Sub> {
    let mut out = Vec::new();

    let r = runner(32).run(&(2usize..=4).prop_flat_map(setup_strategy), |setup| {
        let b = behavior_from_setup(&setup).unwrap();
        let n = setup.n_parties();
        for mask in 1..(1usize << n) - 1 {
            let parties: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
            prop_assert!(b.check_ns(&parties), "subset {:?}", parties);
        }
        Ok(())
    });
    out.push(outcome("(a) quantum behaviors are non-signaling", r));

    let chains: Vec<Vec<VertexSet>> = vec![
        ["L[3]", "NS[AB]", "NS[hull=AB,AC]", "NS[2/1]"].iter().map(|m| model(m)).collect(),
        ["L[3]", "PTO[A<B]", "PTO[order=A<B<C]", "PTO[2/1]", "SV[2|1]"].iter().map(|m| model(m)).collect(),
    ];
    let r = runner(6).run(&setup_strategy(3), |setup| {
        let b = behavior_from_setup(&setup).unwrap();
        let noise = NoiseModel::uniform(b.scenario());
        for chain in &chains {
            let mut last = 0.0;
            for m in chain {
                let v = visibility(&b, m, &noise).unwrap().v_max;
                prop_assert!(v >= last - 1e-7, "{} gives {} < {}", m.model(), v, last);
                last = v;
            }
        }
        Ok(())
    });
    out.push(outcome("(b) visibilities monotone along inclusions", r));

    let l3 = &chains[0][0];
    let r = runner(12).run(&setup_strategy(3), |setup| {
        let b = behavior_from_setup(&setup).unwrap();
        let cert = membership(&b, l3).unwrap();
        if let Some(sep) = cert.separating.filter(|_| !cert.inside) {
            for p in l3.to_space(sep.space()).unwrap().points() {
                let lhs: f64 = p.to_f64().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
                prop_assert!(lhs <= sep.bound() + 1e-9);
            }
            let coords = match sep.space() {
                Space::Probability => b.table().to_vec(),
                Space::Correlator => to_correlators(&b).coords().to_vec(),
            };
            let lhs: f64 = coords.iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
            prop_assert!(lhs > sep.bound() + 1e-9);
        }
        Ok(())
    });
    out.push(outcome("(c) float separating inequalities", r));
    let pto = &chains[1][1];
    let r = runner(12).run(&table_strategy(), |b| {
        let cert = membership(&b, pto).unwrap();
        if let Some(sep) = cert.separating.filter(|_| !cert.inside) {
            for p in pto.to_space(sep.space()).unwrap().points() {
                let lhs: Rational = p.to_rationals().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
                prop_assert!(lhs <= *sep.bound());
            }
            let lhs: Rational = b.table().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
            prop_assert!(lhs > *sep.bound());
        }
        Ok(())
    });
    out.push(outcome("(c) exact separating inequalities", r));

    let groups = [RelabelingGroup::new(Scenario::bipartite()), RelabelingGroup::new(Scenario::tripartite())];
    let ineqs = (0usize..2).prop_flat_map(|k| {
        let s = Scenario::new(k + 2).unwrap();
        (Just(k), prop::collection::vec(-3i64..=3, s.correlator_len()), 1i64..10, any::<prop::sample::Index>())
    });
    let r = runner(100).run(&ineqs, |(k, coeffs, bound, g)| {
        let group = &groups[k];
        let s = group.scenario();
        let make = |c: Vec<i64>| {
            BellInequality::new(s, Space::Correlator, c.into_iter().map(|x| rational(x, 1)).collect(), rational(bound, 1))
                .unwrap()
        };
        let canon = parallel::canonicalize(&make(coeffs.clone()), group);
        let again = parallel::canonicalize(&canon.inequality, group);
        prop_assert_eq!(&again.inequality, &canon.inequality);
        let image = make(group.apply(g.index(group.len()), &coeffs));
        let other = parallel::canonicalize(&image, group);
        prop_assert_eq!(&other.inequality, &canon.inequality);
        prop_assert_eq!(other.orbit_size, canon.orbit_size);
        Ok(())
    });
    out.push(outcome("(d) canonical form idempotent and orbit-constant (100 cases)", r));

    let targets = [&chains[1][1], &chains[1][2]];
    let r = runner(8).run(&(table_strategy(), 0usize..2), |(b, t)| {
        let vertices = targets[t];
        let exact = visibility(&b, vertices, &NoiseModel::uniform(b.scenario())).unwrap().v_max;
        let fb = b.to_f64();
        let float = visibility(&fb, vertices, &NoiseModel::uniform(fb.scenario())).unwrap().v_max;
        let exact = bellpoly_core::Scalar::to_f64(&exact);
        prop_assert!((float - exact).abs() < 1e-9, "{} vs {}", exact, float);
        Ok(())
    });
    out.push(outcome("(e) rational and float LP agree to 1e-9", r));
    out
}

fn main() -> ExitCode {
    // libtest-style flags (e.g. from `cargo test -- --nocapture`) are ignored
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Vec<Sub>); 9] = [
        ("table1 visibilities (W3 across models)", table_i),
        ("table2 visibilities", table_ii),
        ("Svetlichny value and bound", svetlichny),
        ("common boundary at 1/sqrt2", common_boundary),
        ("NS[2/2] and symmetrized vertex counts", vertex_counts),
        ("I_opt bound, value and thresholds", i_opt),
        ("I_NS3 bound and see-saw", i_ns3),
        ("bipartite facet round trip", facet_round_trip),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let subs = check();
        let passed = subs.iter().filter(|s| s.pass).count();
        let ok = passed == subs.len();
        println!(
            "{} {label}: {name} ({passed}/{} checks, {:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            subs.len(),
            start.elapsed().as_secs_f64()
        );
        for s in subs.iter().filter(|s| !s.pass) {
            println!("       {}: {}", s.item, s.detail);
        }
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
