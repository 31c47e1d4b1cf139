//! Property tests: no-signaling of quantum behaviors, model inclusions,
//! certificate validity, canonical forms and backend agreement.

use std::sync::OnceLock;

use proptest::prelude::*;

use bellpoly_core::correlators::to_correlators;
use bellpoly_core::lp::{membership, visibility};
use bellpoly_core::polytope::{canonicalize, RelabelingGroup};
use bellpoly_core::quantum::{behavior_from_setup, linalg::C64, Observable, QuantumSetup};
use bellpoly_core::scalar::rational;
use bellpoly_core::vertices::build_vertices;
use bellpoly_core::{Behavior, BellInequality, ModelSpec, NoiseModel, Rational, Scenario, Space, VertexSet};

fn setup_strategy(n: usize) -> impl Strategy<Value = QuantumSetup> {
    let dim = 1 << n;
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim),
        prop::collection::vec((0.0f64..std::f64::consts::PI, 0.0f64..std::f64::consts::TAU), 2 * n),
    )
        .prop_filter("state too small", |(amps, _)| amps.iter().map(|(r, i)| r * r + i * i).sum::<f64>() > 0.05)
        .prop_map(move |(amps, angles)| {
            let state = amps.into_iter().map(|(r, i)| C64::new(r, i)).collect();
            let obs = angles
                .chunks(2)
                .map(|c| [Observable::from_angles(c[0].0, c[0].1), Observable::from_angles(c[1].0, c[1].1)])
                .collect();
            QuantumSetup::normalized(state, obs).unwrap()
        })
}

/// Random signaling table: nonnegative integer weights per input row.
fn table_strategy(n: usize) -> impl Strategy<Value = Behavior<Rational>> {
    let s = Scenario::new(n).unwrap();
    let k = s.n_settings();
    prop::collection::vec(prop::collection::vec(0i64..6, k), k).prop_map(move |rows| {
        let table = rows
            .iter()
            .flat_map(|row| {
                let total: i64 = row.iter().map(|w| w + 1).sum();
                row.iter().map(move |w| rational(w + 1, total))
            })
            .collect();
        Behavior::new(s, table).unwrap()
    })
}

fn models(specs: &[&str]) -> Vec<VertexSet> {
    specs.iter().map(|m| build_vertices(&ModelSpec::parse(m).unwrap()).unwrap()).collect()
}

const NS_CHAIN: [&str; 4] = ["L[3]", "NS[AB]", "NS[hull=AB,AC]", "NS[2/1]"];
const PTO_CHAIN: [&str; 5] = ["L[3]", "PTO[A<B]", "PTO[order=A<B<C]", "PTO[2/1]", "SV[2|1]"];

fn ns_chain() -> &'static [VertexSet] {
    static CHAIN: OnceLock<Vec<VertexSet>> = OnceLock::new();
    CHAIN.get_or_init(|| models(&NS_CHAIN))
}

fn pto_chain() -> &'static [VertexSet] {
    static CHAIN: OnceLock<Vec<VertexSet>> = OnceLock::new();
    CHAIN.get_or_init(|| models(&PTO_CHAIN))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantum_behaviors_are_non_signaling(setup in (2usize..=4).prop_flat_map(setup_strategy)) {
        let b = behavior_from_setup(&setup).unwrap();
        let n = setup.n_parties();
        for mask in 1..(1usize << n) - 1 {
            let parties: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
            prop_assert!(b.check_ns(&parties), "subset {parties:?}");
        }
        prop_assert!(b.table().iter().all(|p| *p >= -1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn visibility_grows_along_model_inclusions(setup in setup_strategy(3), pick in any::<prop::sample::Index>()) {
        let b = behavior_from_setup(&setup).unwrap();
        let noise = NoiseModel::uniform(b.scenario());
        for chain in [ns_chain(), pto_chain()] {
            let mut last = 0.0;
            for (i, model) in chain.iter().enumerate() {
                let v = visibility(&b, model, &noise).unwrap().v_max;
                prop_assert!(v >= last - 1e-7, "{} below {}: {v} < {last}", model.model(), i);
                last = v;
                // a vertex of each smaller model lies in the next one
                if let Some(bigger) = chain.get(i + 1) {
                    let j = pick.index(model.len());
                    let point = model.behavior(j).unwrap();
                    let inside = if point.is_non_signaling() || !bigger.model().is_non_signaling() {
                        membership(&point, bigger).unwrap().inside
                    } else {
                        false
                    };
                    prop_assert!(inside, "vertex {j} of {} outside {}", model.model(), bigger.model());
                }
            }
        }
    }

    #[test]
    fn float_certificates_separate(setup in setup_strategy(3)) {
        let b = behavior_from_setup(&setup).unwrap();
        let l3 = &ns_chain()[0];
        let cert = membership(&b, l3).unwrap();
        if cert.inside {
            return Ok(());
        }
        let sep = cert.separating.unwrap();
        let v = l3.to_space(sep.space()).unwrap();
        for p in v.points() {
            let lhs: f64 = p.to_f64().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
            prop_assert!(lhs <= sep.bound() + 1e-9);
        }
        prop_assert!(lhs_on(&sep, &b) > sep.bound() + 1e-9);
    }

    #[test]
    fn exact_certificates_separate(b in table_strategy(3)) {
        let pto = &pto_chain()[1];
        let cert = membership(&b, pto).unwrap();
        if cert.inside {
            let mut sum = vec![rational(0, 1); b.table().len()];
            let mut total = rational(0, 1);
            for (j, w) in &cert.weights {
                prop_assert!(*w >= rational(0, 1));
                total += w.clone();
                for (s, c) in sum.iter_mut().zip(pto.point(*j).to_rationals()) {
                    *s += w * c;
                }
            }
            prop_assert_eq!(total, rational(1, 1));
            prop_assert_eq!(sum.as_slice(), b.table());
        } else {
            let sep = cert.separating.unwrap();
            prop_assert_eq!(sep.space(), Space::Probability);
            for p in pto.points() {
                let lhs: Rational = p.to_rationals().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
                prop_assert!(lhs <= *sep.bound());
            }
            let lhs: Rational = b.table().iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum();
            prop_assert!(lhs > *sep.bound());
        }
    }

    #[test]
    fn rational_and_float_visibilities_agree(b in table_strategy(3), model in 1usize..3) {
        let vertices = &pto_chain()[model];
        let exact = visibility(&b, vertices, &NoiseModel::uniform(b.scenario())).unwrap().v_max;
        let fb = b.to_f64();
        let float = visibility(&fb, vertices, &NoiseModel::uniform(fb.scenario())).unwrap().v_max;
        prop_assert!((float - bellpoly_core::Scalar::to_f64(&exact)).abs() < 1e-9, "{exact} vs {float}");
    }
}

fn lhs_on(sep: &BellInequality<f64>, b: &Behavior<f64>) -> f64 {
    let coords = match sep.space() {
        Space::Probability => b.table().to_vec(),
        Space::Correlator => to_correlators(b).coords().to_vec(),
    };
    coords.iter().zip(sep.coeffs()).map(|(x, c)| x * c).sum()
}

fn inequality_strategy() -> impl Strategy<Value = BellInequality> {
    (2usize..=3).prop_flat_map(|n| {
        let s = Scenario::new(n).unwrap();
        (prop::collection::vec(-3i64..=3, s.correlator_len()), 1i64..10).prop_map(move |(c, bound)| {
            BellInequality::new(s, Space::Correlator, c.into_iter().map(|x| rational(x, 1)).collect(), rational(bound, 1))
                .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn canonical_form_is_idempotent_and_orbit_constant(ineq in inequality_strategy(), g in any::<prop::sample::Index>()) {
        let group = RelabelingGroup::new(ineq.scenario());
        let canon = canonicalize(&ineq);
        let again = canonicalize(&canon.inequality);
        prop_assert_eq!(&again.inequality, &canon.inequality);
        prop_assert_eq!(again.orbit_size, canon.orbit_size);
        let image = BellInequality::new(
            ineq.scenario(),
            Space::Correlator,
            group.apply(g.index(group.len()), ineq.coeffs()),
            ineq.bound().clone(),
        )
        .unwrap();
        let other = canonicalize(&image);
        prop_assert_eq!(&other.inequality, &canon.inequality);
        prop_assert_eq!(other.orbit_size, canon.orbit_size);
        prop_assert_eq!(group.len() % canon.orbit_size, 0);
    }
}
