use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest party count accepted; tables grow as 4^n.
pub const MAX_PARTIES: usize = 8;

/// An `n`-party scenario with two inputs (`0`, `1`) and two outputs (`+1`, `-1`)
/// per party.
///
/// Input and outcome tuples are packed into integers with party `A` in the most
/// significant bit. An outcome bit `0` means `+1`, bit `1` means `-1`. Table
/// entries are ordered lexicographically in `(inputs, outcomes)`, i.e.
/// `index = inputs * 2^n + outcomes`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    n_parties: usize,
}

impl Scenario {
    pub fn new(n_parties: usize) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n_parties) {
            return Err(Error::InvalidScenario(format!(
                "party count {n_parties} outside 2..={MAX_PARTIES}"
            )));
        }
        Ok(Self { n_parties })
    }

    pub fn bipartite() -> Self {
        Self { n_parties: 2 }
    }

    pub fn tripartite() -> Self {
        Self { n_parties: 3 }
    }

    pub fn fourpartite() -> Self {
        Self { n_parties: 4 }
    }

    #[inline]
    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn n_inputs(&self) -> usize {
        2
    }

    pub fn n_outputs(&self) -> usize {
        2
    }

    /// Number of input tuples (also the number of outcome tuples), `2^n`.
    #[inline]
    pub fn n_settings(&self) -> usize {
        1 << self.n_parties
    }

    /// Length of the probability table, `4^n`.
    #[inline]
    pub fn table_len(&self) -> usize {
        1 << (2 * self.n_parties)
    }

    /// Length of a correlator vector, `3^n - 1`.
    pub fn correlator_len(&self) -> usize {
        3usize.pow(self.n_parties as u32) - 1
    }

    #[inline]
    pub fn index(&self, inputs: usize, outcomes: usize) -> usize {
        (inputs << self.n_parties) | outcomes
    }

    #[inline]
    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index >> self.n_parties, index & (self.n_settings() - 1))
    }

    /// Bit of `party` inside a packed input or outcome tuple.
    #[inline]
    pub fn bit(&self, packed: usize, party: usize) -> usize {
        (packed >> (self.n_parties - 1 - party)) & 1
    }

    #[inline]
    pub fn party_mask(&self, party: usize) -> usize {
        1 << (self.n_parties - 1 - party)
    }

    /// `+1` or `-1` for `party` in a packed outcome tuple.
    #[inline]
    pub fn outcome_sign(&self, outcomes: usize, party: usize) -> i64 {
        1 - 2 * self.bit(outcomes, party) as i64
    }

    pub fn pack(&self, bits: &[usize]) -> usize {
        debug_assert_eq!(bits.len(), self.n_parties);
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1))
    }

    pub fn unpack(&self, packed: usize) -> Vec<usize> {
        (0..self.n_parties).map(|p| self.bit(packed, p)).collect()
    }

    pub fn check_same(&self, other: &Scenario) -> Result<()> {
        if self != other {
            return Err(Error::ScenarioMismatch {
                expected: self.n_parties,
                found: other.n_parties,
            });
        }
        Ok(())
    }
}

/// Party label `A`, `B`, `C`, ...
pub fn party_label(party: usize) -> char {
    (b'A' + party as u8) as char
}

pub fn party_from_label(c: char) -> Option<usize> {
    let c = c.to_ascii_uppercase();
    if c.is_ascii_uppercase() {
        Some((c as u8 - b'A') as usize)
    } else {
        None
    }
}

/// Formats a packed input tuple as digits (`"010"`).
pub fn format_inputs(scenario: &Scenario, inputs: usize) -> alloc::string::String {
    (0..scenario.n_parties())
        .map(|p| if scenario.bit(inputs, p) == 0 { '0' } else { '1' })
        .collect()
}

/// Formats a packed outcome tuple as signs (`"+-+"`).
pub fn format_outcomes(scenario: &Scenario, outcomes: usize) -> alloc::string::String {
    (0..scenario.n_parties())
        .map(|p| if scenario.bit(outcomes, p) == 0 { '+' } else { '-' })
        .collect()
}

pub fn parse_inputs(scenario: &Scenario, s: &str) -> Option<usize> {
    let bits: Option<Vec<usize>> = s
        .chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect();
    let bits = bits?;
    (bits.len() == scenario.n_parties()).then(|| scenario.pack(&bits))
}

pub fn parse_outcomes(scenario: &Scenario, s: &str) -> Option<usize> {
    let bits: Option<Vec<usize>> = s
        .chars()
        .map(|c| match c {
            '+' | '0' => Some(0),
            '-' | '1' => Some(1),
            _ => None,
        })
        .collect();
    let bits = bits?;
    (bits.len() == scenario.n_parties()).then(|| scenario.pack(&bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let s = Scenario::new(4).unwrap();
        assert_eq!(s.table_len(), 256);
        assert_eq!(s.correlator_len(), 80);
        assert_eq!(Scenario::tripartite().correlator_len(), 26);
        assert!(Scenario::new(1).is_err());
    }

    #[test]
    fn packing() {
        let s = Scenario::tripartite();
        let x = s.pack(&[1, 0, 1]);
        assert_eq!(x, 0b101);
        assert_eq!(s.bit(x, 0), 1);
        assert_eq!(s.bit(x, 1), 0);
        assert_eq!(format_inputs(&s, x), "101");
        assert_eq!(format_outcomes(&s, 0b011), "+--");
        assert_eq!(parse_outcomes(&s, "+--"), Some(0b011));
        assert_eq!(s.outcome_sign(0b011, 0), 1);
        assert_eq!(s.outcome_sign(0b011, 2), -1);
        assert_eq!(s.split_index(s.index(5, 3)), (5, 3));
    }
}
