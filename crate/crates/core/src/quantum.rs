//! Qubit behaviors from explicit states and ±1 observables, named setups from
//! the literature, state-visibility thresholds and a see-saw maximizer.

pub mod linalg;

use alloc::string::String;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::behavior::Behavior;
use crate::correlators::{CorrelatorVector, Pattern, Slot};
use crate::error::{Error, Result};
use crate::inequality::BellInequality;
use crate::scalar::{Rational, Scalar};
use crate::scenario::Scenario;
use linalg::{apply_single, inner, norm, top_eigenpair, Matrix, C64};

/// A ±1-valued qubit observable `n·σ` stored by its unit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observable {
    bloch: [f64; 3],
}

impl Observable {
    /// Accepts vectors of unit length within `1e-9` and renormalizes them.
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let len = libm::sqrt(bloch.iter().map(|x| x * x).sum());
        if !len.is_finite() || (len - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidBehavior(alloc::format!("Bloch vector of length {len}")));
        }
        Ok(Self { bloch: bloch.map(|x| x / len) })
    }

    pub fn sigma_x() -> Self {
        Self { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn sigma_y() -> Self {
        Self { bloch: [0.0, 1.0, 0.0] }
    }

    pub fn sigma_z() -> Self {
        Self { bloch: [0.0, 0.0, 1.0] }
    }

    /// `cos(theta) σz + sin(theta) (cos(phi) σx + sin(phi) σy)`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let s = libm::sin(theta);
        Self { bloch: [s * libm::cos(phi), s * libm::sin(phi), libm::cos(theta)] }
    }

    pub fn neg(self) -> Self {
        Self { bloch: self.bloch.map(|x| -x) }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        let [x, y, z] = self.bloch;
        [[C64::new(z, 0.0), C64::new(x, -y)], [C64::new(x, y), C64::new(-z, 0.0)]]
    }

    /// Projector onto outcome `+1` (bit 0) or `-1` (bit 1).
    pub fn projector(&self, outcome_bit: usize) -> [[C64; 2]; 2] {
        let s = if outcome_bit == 0 { 0.5 } else { -0.5 };
        let m = self.matrix();
        let half = C64::new(0.5, 0.0);
        [[half + m[0][0] * s, m[0][1] * s], [m[1][0] * s, half + m[1][1] * s]]
    }

    fn as_matrix(&self) -> Matrix {
        let m = self.matrix();
        Matrix { dim: 2, data: alloc::vec![m[0][0], m[0][1], m[1][0], m[1][1]] }
    }
}

/// Pure state, two observables per party, and optional white-noise weight:
/// `ρ = w |ψ><ψ| + (1 - w) 1/2^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumSetup {
    state: Vec<C64>,
    observables: Vec<[Observable; 2]>,
    visibility: f64,
}

impl QuantumSetup {
    pub fn new(state: Vec<C64>, observables: Vec<[Observable; 2]>, visibility: f64) -> Result<Self> {
        let n = observables.len();
        Scenario::new(n)?;
        if state.len() != 1 << n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "state of dimension {} for {n} qubits",
                state.len()
            )));
        }
        let nrm = norm(&state);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBehavior(alloc::format!("state norm {nrm}")));
        }
        if !(0.0..=1.0).contains(&visibility) {
            return Err(Error::WeightOutOfRange(alloc::format!("{visibility}")));
        }
        Ok(Self { state, observables, visibility })
    }

    /// Normalizes `state` first.
    pub fn normalized(mut state: Vec<C64>, observables: Vec<[Observable; 2]>) -> Result<Self> {
        let nrm = norm(&state);
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::InvalidBehavior("zero state".into()));
        }
        for z in state.iter_mut() {
            *z /= nrm;
        }
        Self::new(state, observables, 1.0)
    }

    pub fn n_parties(&self) -> usize {
        self.observables.len()
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.n_parties()).expect("validated")
    }

    pub fn state(&self) -> &[C64] {
        &self.state
    }

    pub fn observables(&self) -> &[[Observable; 2]] {
        &self.observables
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    pub fn with_visibility(mut self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::WeightOutOfRange(alloc::format!("{w}")));
        }
        self.visibility = w;
        Ok(self)
    }

    /// `<ψ| ⊗ O |ψ>` for the observables selected by `pattern` (pure part only).
    pub fn pure_expectation(&self, pattern: &Pattern) -> f64 {
        let n = self.n_parties();
        let mut phi = self.state.clone();
        for (party, slot) in pattern.slots().into_iter().enumerate() {
            if let Slot::Setting(s) = slot {
                apply_single(&mut phi, n, party, &self.observables[party][s as usize].matrix());
            }
        }
        inner(&self.state, &phi).re
    }

    /// Correlators of `ρ`; white noise scales them by `w`.
    pub fn correlators(&self) -> CorrelatorVector<f64> {
        let s = self.scenario();
        let coords = Pattern::all(&s).map(|p| self.visibility * self.pure_expectation(&p)).collect();
        CorrelatorVector::new(s, coords).expect("length")
    }
}

/// Probability table `tr(ρ ⊗_i Π_i(a_i|x_i))`.
pub fn behavior_from_setup(setup: &QuantumSetup) -> Result<Behavior<f64>> {
    let s = setup.scenario();
    let n = s.n_parties();
    let k = s.n_settings();
    let w = setup.visibility;
    let noise = (1.0 - w) / k as f64;
    let mut table = alloc::vec![0.0; s.table_len()];
    for x in 0..k {
        for a in 0..k {
            let mut phi = setup.state.clone();
            for party in 0..n {
                let obs = &setup.observables[party][s.bit(x, party)];
                apply_single(&mut phi, n, party, &obs.projector(s.bit(a, party)));
            }
            let p = w * inner(&setup.state, &phi).re + noise;
            // rounding can leave tiny negatives on zero-probability events
            table[s.index(x, a)] = if p < 0.0 && p > -1e-13 { 0.0 } else { p };
        }
    }
    Behavior::new(s, table)
}

/// Left-hand side of `ineq` on the setup's behavior.
pub fn value(ineq: &BellInequality<Rational>, setup: &QuantumSetup) -> Result<f64> {
    ineq.scenario().check_same(&setup.scenario())?;
    ineq.to_f64().value(&behavior_from_setup(setup)?)
}

pub const SETUP_NAMES: [&str; 5] = ["W3_paper", "GHZ3_paper", "PSI_OPT", "GHZ4", "W4"];

const W3_ALPHA: f64 = 3.6241;
const W3_BETA: f64 = 2.0221;

fn basis_state(n: usize, terms: &[(&str, f64)]) -> Vec<C64> {
    let mut psi = alloc::vec![C64::new(0.0, 0.0); 1 << n];
    for (bits, amp) in terms {
        let idx = usize::from_str_radix(bits, 2).expect("binary literal");
        psi[idx] += C64::new(*amp, 0.0);
    }
    psi
}

fn combo(a: f64, oa: Observable, b: f64, ob: Observable) -> Observable {
    let (x, y) = (oa.bloch(), ob.bloch());
    Observable::new([a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]]).expect("unit")
}

/// Setups addressable by name (case-insensitive).
///
/// * `W3_paper`: W state with `A_{0,1} = cos α σz ± sin α σx`,
///   `B_0 = C_0 = -σz`, `B_1 = cos β σz + sin β σx`, `C_1 = cos β σz - sin β σx`
///   (α = 3.6241, β = 2.0221 rad);
/// * `GHZ3_paper`: GHZ state with `A = (σx, σy)`, `B = ((σx - σy)/√2, (σx + σy)/√2)`,
///   `C = (-σy, σx)`;
/// * `PSI_OPT`: `[(2 - √5)|0001> + |1110> + perms] / (2 √(10 - 4√5))` measured with
///   `(-σz, σx)` on every party;
/// * `GHZ4`: four-qubit GHZ state with `(σx, σy)` on every party;
/// * `W4`: four-qubit W state with `(-σz, σx)` on every party.
pub fn named_setup(name: &str) -> Result<QuantumSetup> {
    let (x, y, z) = (Observable::sigma_x(), Observable::sigma_y(), Observable::sigma_z());
    let r2 = core::f64::consts::FRAC_1_SQRT_2;
    match name.to_ascii_uppercase().as_str() {
        "W3_PAPER" | "W3" => {
            let (ca, sa) = (libm::cos(W3_ALPHA), libm::sin(W3_ALPHA));
            let (cb, sb) = (libm::cos(W3_BETA), libm::sin(W3_BETA));
            let amp = 1.0 / libm::sqrt(3.0);
            QuantumSetup::new(
                basis_state(3, &[("100", amp), ("010", amp), ("001", amp)]),
                alloc::vec![
                    [combo(ca, z, sa, x), combo(ca, z, -sa, x)],
                    [z.neg(), combo(cb, z, sb, x)],
                    [z.neg(), combo(cb, z, -sb, x)],
                ],
                1.0,
            )
        }
        "GHZ3_PAPER" | "GHZ3" => QuantumSetup::new(
            basis_state(3, &[("000", r2), ("111", r2)]),
            alloc::vec![[x, y], [combo(r2, x, -r2, y), combo(r2, x, r2, y)], [y.neg(), x]],
            1.0,
        ),
        "PSI_OPT" => {
            let s5 = libm::sqrt(5.0);
            let c = 1.0 / (2.0 * libm::sqrt(10.0 - 4.0 * s5));
            let a = (2.0 - s5) * c;
            let terms = [
                ("0001", a),
                ("0010", a),
                ("0100", a),
                ("1000", a),
                ("1110", c),
                ("1101", c),
                ("1011", c),
                ("0111", c),
            ];
            QuantumSetup::normalized(basis_state(4, &terms), alloc::vec![[z.neg(), x]; 4])
        }
        "GHZ4" => QuantumSetup::new(basis_state(4, &[("0000", r2), ("1111", r2)]), alloc::vec![[x, y]; 4], 1.0),
        "W4" => QuantumSetup::new(
            basis_state(4, &[("1000", 0.5), ("0100", 0.5), ("0010", 0.5), ("0001", 0.5)]),
            alloc::vec![[z.neg(), x]; 4],
            1.0,
        ),
        _ => Err(Error::UnknownName(String::from(name))),
    }
}

/// Smallest state weight `w` at which `w|ψ><ψ| + (1-w) 1/2^n` reaches the bound:
/// `(bound - value(noise)) / (value(ψ) - value(noise))`.
pub fn state_visibility_threshold(ineq: &BellInequality<Rational>, setup: &QuantumSetup) -> Result<f64> {
    let pure = setup.clone().with_visibility(1.0)?;
    let at_state = value(ineq, &pure)?;
    let at_noise = value(ineq, &pure.with_visibility(0.0)?)?;
    let bound = ineq.bound().to_f64();
    if (at_state - bound).abs() <= 1e-12 {
        return Ok(1.0);
    }
    if at_state < bound || at_noise > bound {
        return Err(Error::NoViolation { value: alloc::format!("{at_state}"), bound: alloc::format!("{bound}") });
    }
    Ok((bound - at_noise) / (at_state - at_noise))
}

// ---------------------------------------------------------------------------
// see-saw

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Stop a restart when a sweep improves by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Optimize measurements only, for this state.
    pub fixed_state: Option<Vec<C64>>,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { restarts: 50, max_sweeps: 2000, tol: 1e-13, seed: 1, fixed_state: None }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub value: f64,
    pub setup: QuantumSetup,
    pub sweeps: usize,
    /// Whether the objective never decreased (beyond 1e-9) across updates.
    pub monotone: bool,
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub best: SeesawRun,
    /// Best value of every restart, in restart order.
    pub values: Vec<f64>,
    pub monotone: bool,
}

/// An inequality in correlator form, prepared for see-saw sweeps.
#[derive(Clone, Debug)]
pub struct SeesawProblem {
    n: usize,
    terms: Vec<(Vec<Slot>, f64)>,
    offset: f64,
}

impl SeesawProblem {
    pub fn new(ineq: &BellInequality<Rational>) -> Self {
        let corr = ineq.to_correlator_form();
        let s = ineq.scenario();
        let offset = (ineq.bound() - corr.bound()).to_f64();
        let terms = corr
            .terms()
            .map(|(i, c)| (Pattern::from_index(&s, i).slots(), c.to_f64()))
            .collect();
        Self { n: s.n_parties(), terms, offset }
    }

    fn objective(&self, psi: &[C64], obs: &[[Observable; 2]]) -> f64 {
        let mut total = self.offset;
        for (slots, c) in &self.terms {
            let mut phi = psi.to_vec();
            for (party, slot) in slots.iter().enumerate() {
                if let Slot::Setting(s) = slot {
                    apply_single(&mut phi, self.n, party, &obs[party][*s as usize].matrix());
                }
            }
            total += c * inner(psi, &phi).re;
        }
        total
    }

    /// Best observable for `(party, setting)` with everything else fixed.
    fn best_observable(&self, psi: &[C64], obs: &[[Observable; 2]], party: usize, setting: u8) -> Option<Observable> {
        let paulis = [Observable::sigma_x(), Observable::sigma_y(), Observable::sigma_z()];
        let mut r = [0.0; 3];
        for (slots, c) in &self.terms {
            if slots[party] != Slot::Setting(setting) {
                continue;
            }
            let mut phi = psi.to_vec();
            for (p, slot) in slots.iter().enumerate() {
                if p == party {
                    continue;
                }
                if let Slot::Setting(s) = slot {
                    apply_single(&mut phi, self.n, p, &obs[p][*s as usize].matrix());
                }
            }
            for (k, sigma) in paulis.iter().enumerate() {
                let mut chi = phi.clone();
                apply_single(&mut chi, self.n, party, &sigma.matrix());
                r[k] += c * inner(psi, &chi).re;
            }
        }
        let len = libm::sqrt(r.iter().map(|v| v * v).sum());
        (len > 1e-14).then(|| Observable { bloch: r.map(|v| v / len) })
    }

    fn bell_operator(&self, obs: &[[Observable; 2]]) -> Matrix {
        let dim = 1 << self.n;
        let mut b = Matrix::zeros(dim);
        for (slots, c) in &self.terms {
            let mut m = Matrix::identity(1);
            for (party, slot) in slots.iter().enumerate() {
                let factor = match slot {
                    Slot::Skip => Matrix::identity(2),
                    Slot::Setting(s) => obs[party][*s as usize].as_matrix(),
                };
                m = m.kron(&factor);
            }
            b.add_scaled(&m, *c);
        }
        b
    }

    /// One restart: random Bloch vectors from `rng`, then alternating updates.
    pub fn run(&self, opts: &SeesawOptions, restart: usize) -> Result<SeesawRun> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
        let mut obs: Vec<[Observable; 2]> = (0..self.n).map(|_| [random_observable(&mut rng), random_observable(&mut rng)]).collect();
        let mut psi = match &opts.fixed_state {
            Some(state) => {
                if state.len() != 1 << self.n {
                    return Err(Error::DimensionMismatch("fixed state dimension".into()));
                }
                state.clone()
            }
            None => top_eigenpair(&self.bell_operator(&obs)).1,
        };
        let mut current = self.objective(&psi, &obs);
        let mut monotone = true;
        let mut sweeps = 0;
        while sweeps < opts.max_sweeps {
            sweeps += 1;
            let start = current;
            for party in 0..self.n {
                for setting in 0..2u8 {
                    if let Some(o) = self.best_observable(&psi, &obs, party, setting) {
                        let previous = obs[party][setting as usize];
                        obs[party][setting as usize] = o;
                        let next = self.objective(&psi, &obs);
                        if next < current - 1e-9 {
                            monotone = false;
                        }
                        if next < current {
                            obs[party][setting as usize] = previous;
                        } else {
                            current = next;
                        }
                    }
                }
            }
            if opts.fixed_state.is_none() {
                let candidate = top_eigenpair(&self.bell_operator(&obs)).1;
                let next = self.objective(&candidate, &obs);
                if next < current - 1e-9 {
                    monotone = false;
                }
                if next >= current {
                    psi = candidate;
                    current = next;
                }
            }
            if current - start < opts.tol {
                break;
            }
        }
        let setup = QuantumSetup::normalized(psi, obs)?;
        Ok(SeesawRun { value: current, setup, sweeps, monotone })
    }
}

fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniformly distributed point on the Bloch sphere.
fn random_observable(rng: &mut ChaCha8Rng) -> Observable {
    let z = 2.0 * uniform01(rng) - 1.0;
    let phi = 2.0 * core::f64::consts::PI * uniform01(rng);
    let r = libm::sqrt((1.0 - z * z).max(0.0));
    Observable { bloch: [r * libm::cos(phi), r * libm::sin(phi), z] }
}

/// Best-of-restarts see-saw lower bound on the quantum maximum of the
/// left-hand side of `ineq` over qubit projective measurements.
pub fn seesaw_maximize(ineq: &BellInequality<Rational>, opts: &SeesawOptions) -> Result<SeesawResult> {
    let problem = SeesawProblem::new(ineq);
    let runs = (0..opts.restarts.max(1)).map(|r| problem.run(opts, r)).collect::<Result<Vec<_>>>()?;
    Ok(collect_runs(runs))
}

/// Reduces restart results to the best one (ties go to the earliest restart).
pub fn collect_runs(runs: Vec<SeesawRun>) -> SeesawResult {
    let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let monotone = runs.iter().all(|r| r.monotone);
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    SeesawResult { best, values, monotone }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn product_state_is_deterministic() {
        let z = Observable::sigma_z();
        let setup = QuantumSetup::new(basis_state(2, &[("00", 1.0)]), alloc::vec![[z, z], [z, z]], 1.0).unwrap();
        let b = behavior_from_setup(&setup).unwrap();
        for x in 0..4 {
            assert!((b.prob(x, 0) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ghz3_svetlichny_value() {
        let v = value(&catalog::svetlichny(), &named_setup("GHZ3_paper").unwrap()).unwrap();
        assert!((v - 4.0 * core::f64::consts::SQRT_2).abs() < 1e-10);
    }

    #[test]
    fn named_setups_are_non_signaling() {
        for name in SETUP_NAMES {
            let b = behavior_from_setup(&named_setup(name).unwrap()).unwrap();
            assert!(b.is_non_signaling(), "{name}");
        }
    }

    #[test]
    fn psi_opt_value() {
        let v = value(&catalog::i_opt(), &named_setup("PSI_OPT").unwrap()).unwrap();
        assert!((v - (11.0 + 8.0 * libm::sqrt(5.0))).abs() < 1e-9);
    }

    #[test]
    fn seesaw_reaches_tsirelson() {
        let r = seesaw_maximize(&catalog::chsh(), &SeesawOptions { restarts: 5, ..Default::default() }).unwrap();
        assert!((r.best.value - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-6);
        assert!(r.monotone);
    }

    #[test]
    fn threshold_boundary_cases() {
        let setup = named_setup("GHZ3_paper").unwrap();
        let mut ineq = catalog::svetlichny();
        ineq.set_bound(crate::scalar::rational(4, 1));
        let w = state_visibility_threshold(&ineq, &setup).unwrap();
        assert!((w - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        ineq.set_bound(crate::scalar::rational(100, 1));
        assert!(matches!(state_visibility_threshold(&ineq, &setup), Err(Error::NoViolation { .. })));
    }
}
