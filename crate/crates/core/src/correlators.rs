//! Correlator coordinates `<A_x B_y ...>` of a behavior.
//!
//! A [`Pattern`] assigns each party either [`Slot::Skip`] or one of its two
//! settings. Patterns are numbered in base 3 with party `A` most significant
//! (`Skip = 0`, setting `0` = 1, setting `1` = 2); the all-skip pattern is
//! excluded, so the coordinate of pattern `code` sits at `code - 1`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;



use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Skip,
    Setting(u8),
}

impl Slot {
    fn digit(self) -> u32 {
        match self {
            Slot::Skip => 0,
            Slot::Setting(s) => 1 + s as u32,
        }
    }

    fn from_digit(d: u32) -> Self {
        match d {
            0 => Slot::Skip,
            d => Slot::Setting((d - 1) as u8),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    n: u8,
    code: u32,
}

impl Pattern {
    pub fn from_index(scenario: &Scenario, index: usize) -> Self {
        debug_assert!(index < scenario.correlator_len());
        Self { n: scenario.n_parties() as u8, code: index as u32 + 1 }
    }

    pub fn from_slots(slots: &[Slot]) -> Result<Self> {
        if slots.iter().all(|s| *s == Slot::Skip) {
            return Err(Error::InvalidBehavior("all-skip correlator pattern".into()));
        }
        if slots.iter().any(|s| matches!(s, Slot::Setting(x) if *x > 1)) {
            return Err(Error::InvalidBehavior("setting outside {0, 1}".into()));
        }
        let code = slots.iter().fold(0u32, |acc, s| acc * 3 + s.digit());
        Ok(Self { n: slots.len() as u8, code })
    }

    #[inline]
    pub fn index(&self) -> usize {
        self.code as usize - 1
    }

    pub fn n_parties(&self) -> usize {
        self.n as usize
    }

    pub fn slot(&self, party: usize) -> Slot {
        let shift = self.n as usize - 1 - party;
        Slot::from_digit((self.code / 3u32.pow(shift as u32)) % 3)
    }

    pub fn slots(&self) -> Vec<Slot> {
        (0..self.n as usize).map(|p| self.slot(p)).collect()
    }

    /// Party mask (packed like inputs) of the non-skipped parties.
    pub fn support(&self) -> usize {
        let n = self.n as usize;
        (0..n).fold(0, |m, p| if self.slot(p) == Slot::Skip { m } else { m | (1 << (n - 1 - p)) })
    }

    /// Packed settings of the non-skipped parties (skipped parties read as 0).
    pub fn settings(&self) -> usize {
        let n = self.n as usize;
        (0..n).fold(0, |m, p| match self.slot(p) {
            Slot::Setting(1) => m | (1 << (n - 1 - p)),
            _ => m,
        })
    }

    /// Number of non-skipped parties.
    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn all(scenario: &Scenario) -> impl Iterator<Item = Pattern> + '_ {
        (0..scenario.correlator_len()).map(move |i| Pattern::from_index(scenario, i))
    }

    /// Parses `"0,1,I"` (or without separators, `"01I"`).
    pub fn parse(s: &str) -> Result<Self> {
        let mut slots = Vec::new();
        for (pos, c) in s.chars().enumerate() {
            match c {
                'I' | 'i' | '-' => slots.push(Slot::Skip),
                '0' => slots.push(Slot::Setting(0)),
                '1' => slots.push(Slot::Setting(1)),
                ',' | ' ' => {}
                _ => {
                    return Err(Error::Parse {
                        position: pos,
                        message: alloc::format!("unexpected `{c}` in correlator pattern"),
                    })
                }
            }
        }
        Self::from_slots(&slots)
    }

    /// Compact form without separators, e.g. `"01I"`.
    pub fn compact(&self) -> String {
        self.slots()
            .into_iter()
            .map(|s| match s {
                Slot::Skip => 'I',
                Slot::Setting(0) => '0',
                Slot::Setting(_) => '1',
            })
            .collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.slots().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match s {
                Slot::Skip => f.write_str("I")?,
                Slot::Setting(x) => write!(f, "{x}")?,
            }
        }
        Ok(())
    }
}

/// The `3^n - 1` correlators of a behavior.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorVector<T> {
    scenario: Scenario,
    coords: Vec<T>,
}

impl<T: Scalar> CorrelatorVector<T> {
    pub fn new(scenario: Scenario, coords: Vec<T>) -> Result<Self> {
        if coords.len() != scenario.correlator_len() {
            return Err(Error::LengthMismatch {
                expected: scenario.correlator_len(),
                found: coords.len(),
            });
        }
        Ok(Self { scenario, coords })
    }

    pub fn zeros(scenario: Scenario) -> Self {
        Self { scenario, coords: alloc::vec![T::zero(); scenario.correlator_len()] }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    pub fn get(&self, pattern: &Pattern) -> &T {
        &self.coords[pattern.index()]
    }

    pub fn scaled(&self, v: &T) -> Self {
        Self { scenario: self.scenario, coords: self.coords.iter().map(|c| c.mul_ref(v)).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(p, q)| libm::fabs(p.to_f64() - q.to_f64()))
            .fold(0.0, f64::max)
    }
}

#[inline]
fn parity_sign(bits: usize) -> bool {
    bits.count_ones() % 2 == 1
}

/// Correlators of `behavior`. For a party set `S`, `<S at x_S>` averages the
/// product of outcomes over the inputs of the parties outside `S`; on
/// non-signaling behaviors that average is independent of those inputs.
pub fn to_correlators<T: Scalar>(behavior: &Behavior<T>) -> CorrelatorVector<T> {
    let s = behavior.scenario();
    let k = s.n_settings();
    let coords = Pattern::all(&s)
        .map(|pattern| {
            let support = pattern.support();
            let settings = pattern.settings();
            let mut sum = T::zero();
            let mut count = 0i64;
            for x in (0..k).filter(|x| x & support == settings) {
                count += 1;
                for a in 0..k {
                    let p = behavior.prob(x, a);
                    if parity_sign(a & support) {
                        sum -= p.clone();
                    } else {
                        sum += p.clone();
                    }
                }
            }
            if count > 1 {
                sum = sum.div_ref(&T::from_ratio(count, 1));
            }
            sum
        })
        .collect();
    CorrelatorVector { scenario: s, coords }
}

/// Inverse of [`to_correlators`] on non-signaling behaviors:
/// `P(a|x) = 2^-n * sum_S prod_{i in S} a_i <S at x_S>`.
pub fn from_correlators<T: Scalar>(correlators: &CorrelatorVector<T>) -> Result<Behavior<T>> {
    let table = reconstruct_table(correlators);
    let tol = T::tolerance();
    for (index, p) in table.iter().enumerate() {
        if *p < -tol.clone() {
            return Err(Error::NegativeProbability { index, value: alloc::format!("{p}") });
        }
    }
    Ok(Behavior::new_unchecked(correlators.scenario, table))
}

pub(crate) fn reconstruct_table<T: Scalar>(correlators: &CorrelatorVector<T>) -> Vec<T> {
    let s = correlators.scenario;
    let k = s.n_settings();
    let patterns: Vec<(usize, usize)> =
        Pattern::all(&s).map(|p| (p.support(), p.settings())).collect();
    let scale = T::from_ratio(1, k as i64);
    let mut table = Vec::with_capacity(s.table_len());
    for x in 0..k {
        for a in 0..k {
            let mut sum = T::one();
            for ((support, settings), c) in patterns.iter().zip(&correlators.coords) {
                if x & support != *settings || c.is_zero() {
                    continue;
                }
                if parity_sign(a & support) {
                    sum -= c.clone();
                } else {
                    sum += c.clone();
                }
            }
            table.push(sum.mul_ref(&scale));
        }
    }
    table
}
