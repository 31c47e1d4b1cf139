//! Conditional probability tables `P(a|x)`.

use alloc::format;
use alloc::vec::Vec;



use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::scenario::Scenario;

/// A full conditional probability table in canonical `(inputs, outcomes)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior<T> {
    scenario: Scenario,
    table: Vec<T>,
}

fn normalization_tolerance<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_ratio(1, 1_000_000_000_000)
    }
}

impl<T: Scalar> Behavior<T> {
    /// Builds a behavior, checking nonnegativity and normalization.
    pub fn new(scenario: Scenario, table: Vec<T>) -> Result<Self> {
        let behavior = Self { scenario, table };
        behavior.validate()?;
        Ok(behavior)
    }

    /// Skips validation; callers guarantee a valid table.
    pub(crate) fn new_unchecked(scenario: Scenario, table: Vec<T>) -> Self {
        debug_assert_eq!(table.len(), scenario.table_len());
        Self { scenario, table }
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let k = scenario.n_settings();
        let mut table = Vec::with_capacity(scenario.table_len());
        for x in 0..k {
            for a in 0..k {
                table.push(f(x, a));
            }
        }
        Self::new(scenario, table)
    }

    /// Every entry equal to `1/2^n`.
    pub fn uniform(scenario: Scenario) -> Self {
        let p = T::from_ratio(1, scenario.n_settings() as i64);
        Self::new_unchecked(scenario, alloc::vec![p; scenario.table_len()])
    }

    /// Local deterministic point: `outcome_bit(party, input)` gives the outcome
    /// bit (`0` for `+1`, `1` for `-1`) of each party.
    pub fn deterministic(scenario: Scenario, outcome_bit: impl Fn(usize, usize) -> usize) -> Self {
        let n = scenario.n_parties();
        let mut table = alloc::vec![T::zero(); scenario.table_len()];
        for x in 0..scenario.n_settings() {
            let a = (0..n).fold(0, |acc, p| (acc << 1) | (outcome_bit(p, scenario.bit(x, p)) & 1));
            table[scenario.index(x, a)] = T::one();
        }
        Self::new_unchecked(scenario, table)
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.scenario;
        if self.table.len() != s.table_len() {
            return Err(Error::LengthMismatch { expected: s.table_len(), found: self.table.len() });
        }
        let tol = normalization_tolerance::<T>();
        let neg_tol = -tol.clone();
        let k = s.n_settings();
        for x in 0..k {
            let mut sum = T::zero();
            for a in 0..k {
                let p = &self.table[s.index(x, a)];
                if *p < neg_tol {
                    return Err(Error::InvalidBehavior(format!(
                        "negative entry {p} at inputs {x}, outcomes {a}"
                    )));
                }
                sum += p.clone();
            }
            sum -= T::one();
            if sum.abs() > tol {
                return Err(Error::InvalidBehavior(format!(
                    "inputs {x} not normalized (deviation {sum})"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    #[inline]
    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn into_table(self) -> Vec<T> {
        self.table
    }

    #[inline]
    pub fn prob(&self, inputs: usize, outcomes: usize) -> &T {
        &self.table[self.scenario.index(inputs, outcomes)]
    }

    /// Entrywise `v * self + (1 - v) * noise`.
    pub fn mix(&self, v: &T, noise: &NoiseModel<T>) -> Result<Self> {
        if *v < T::zero() || *v > T::one() {
            return Err(Error::WeightOutOfRange(format!("{v}")));
        }
        self.scenario.check_same(&noise.reference.scenario)?;
        let w = T::one() - v.clone();
        let table = self
            .table
            .iter()
            .zip(&noise.reference.table)
            .map(|(p, q)| {
                let mut r = p.mul_ref(v);
                r.add_mul_assign(&w, q);
                r
            })
            .collect();
        Ok(Self::new_unchecked(self.scenario, table))
    }

    /// Marginal probability that the parties in `mask` (packed like inputs)
    /// produce the outcome bits of `outcomes` restricted to `mask`, for the
    /// full input tuple `inputs`.
    pub fn marginal(&self, mask: usize, inputs: usize, outcomes: usize) -> T {
        let k = self.scenario.n_settings();
        let mut sum = T::zero();
        for a in 0..k {
            if a & mask == outcomes & mask {
                sum += self.table[self.scenario.index(inputs, a)].clone();
            }
        }
        sum
    }

    /// `true` iff the marginal on `parties` does not depend on the inputs of the
    /// remaining parties. Exact for rationals, within `1e-10` for doubles.
    pub fn check_ns(&self, parties: &[usize]) -> bool {
        let s = self.scenario;
        let mask = parties.iter().fold(0, |m, &p| m | s.party_mask(p));
        self.check_ns_mask(mask)
    }

    pub(crate) fn check_ns_mask(&self, mask: usize) -> bool {
        let k = self.scenario.n_settings();
        let full = k - 1;
        if mask == 0 || mask == full {
            return true;
        }
        for x in 0..k {
            let reference = x & mask;
            if x == reference {
                continue;
            }
            let mut a = 0usize;
            loop {
                let m1 = self.marginal(mask, x, a);
                let m0 = self.marginal(mask, reference, a);
                if !m1.approx_eq(&m0) {
                    return false;
                }
                // next outcome pattern on the masked bits
                a = ((a | (full & !mask)) + 1) & mask;
                if a == 0 {
                    break;
                }
            }
        }
        true
    }

    /// No-signaling with respect to every nonempty proper subset of parties.
    pub fn is_non_signaling(&self) -> bool {
        let full = self.scenario.n_settings() - 1;
        (1..full).all(|mask| self.check_ns_mask(mask))
    }

    /// Relabels parties: old party `i` becomes party `perm[i]`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let s = self.scenario;
        check_permutation(perm, s.n_parties())?;
        let remap = |packed: usize| {
            (0..s.n_parties()).fold(0, |acc, p| {
                if s.bit(packed, p) == 1 {
                    acc | s.party_mask(perm[p])
                } else {
                    acc
                }
            })
        };
        let mut table = alloc::vec![T::zero(); s.table_len()];
        for (i, p) in self.table.iter().enumerate() {
            let (x, a) = s.split_index(i);
            table[s.index(remap(x), remap(a))] = p.clone();
        }
        Ok(Self::new_unchecked(s, table))
    }

    pub fn to_f64(&self) -> Behavior<f64> {
        Behavior::new_unchecked(self.scenario, self.table.iter().map(Scalar::to_f64).collect())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| libm::fabs(p.to_f64() - q.to_f64()))
            .fold(0.0, f64::max)
    }
}

impl Behavior<Rational> {
    pub fn convert<U: Scalar>(&self) -> Behavior<U> {
        Behavior::new_unchecked(self.scenario, self.table.iter().map(U::from_rational).collect())
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = alloc::vec![false; n];
    if perm.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: perm.len() });
    }
    for &p in perm {
        if p >= n || core::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidModel(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Reference behavior mixed in as noise; uniform by default.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel<T> {
    pub reference: Behavior<T>,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn uniform(scenario: Scenario) -> Self {
        Self { reference: Behavior::uniform(scenario) }
    }

    pub fn new(reference: Behavior<T>) -> Result<Self> {
        reference.validate()?;
        Ok(Self { reference })
    }
}
