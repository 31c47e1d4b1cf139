//! Named inequalities.
//!
//! Pattern strings list one symbol per party (`0`, `1` or `I` for a party
//! that is not measured). Symmetric families expand a pattern to all of its
//! distinct party permutations, each carrying the same coefficient.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::correlators::Pattern;
use crate::error::{Error, Result};
use crate::inequality::{BellInequality, Space};
use crate::model::ModelSpec;
use crate::scalar::{rational, rational_int, Rational};
use crate::scenario::Scenario;

/// All distinct permutations of the symbols of `pattern`.
pub fn distinct_permutations(pattern: &str) -> Vec<String> {
    let mut chars: Vec<char> = pattern.chars().collect();
    chars.sort_unstable();
    let mut out = Vec::new();
    // next-permutation over the sorted multiset
    loop {
        out.push(chars.iter().collect());
        let Some(i) = (1..chars.len()).rev().find(|&i| chars[i - 1] < chars[i]) else {
            return out;
        };
        let j = (i..chars.len()).rev().find(|&j| chars[j] > chars[i - 1]).expect("exists");
        chars.swap(i - 1, j);
        chars[i..].reverse();
    }
}

/// Correlator-space inequality from `(coefficient, pattern)` pairs expanded
/// over party permutations.
pub fn symmetric(scenario: Scenario, terms: &[(i64, &str)], bound: i64) -> Result<BellInequality> {
    let mut expanded: Vec<(Pattern, Rational)> = Vec::new();
    for &(c, pat) in terms {
        if pat.chars().count() != scenario.n_parties() {
            return Err(Error::Parse { position: 0, message: alloc::format!("pattern {pat:?} has wrong length") });
        }
        let perms: BTreeSet<String> = distinct_permutations(pat).into_iter().collect();
        for p in perms {
            expanded.push((Pattern::parse(&p)?, rational_int(c)));
        }
    }
    BellInequality::from_terms(scenario, &expanded, rational_int(bound))
}

/// `<A0B0> + <A0B1> + <A1B0> - <A1B1> <= 2`.
pub fn chsh() -> BellInequality {
    let terms: Vec<(Pattern, Rational)> = [("00", 1), ("01", 1), ("10", 1), ("11", -1)]
        .iter()
        .map(|&(p, c)| (Pattern::parse(p).expect("valid"), rational_int(c)))
        .collect();
    BellInequality::from_terms(Scenario::bipartite(), &terms, rational_int(2))
        .expect("valid")
        .with_model(ModelSpec::local(2).expect("valid"))
}

/// `-<000> + <001> + <011> - <111> + permutations <= 4`.
pub fn svetlichny() -> BellInequality {
    symmetric(Scenario::tripartite(), &[(-1, "000"), (1, "001"), (1, "011"), (-1, "111")], 4)
        .expect("valid")
        .with_model(ModelSpec::svetlichny())
}

/// Four-party symmetric inequality with bound 19 on `NS[2/2]`.
pub fn i_opt() -> BellInequality {
    symmetric(
        Scenario::fourpartite(),
        &[
            (1, "0000"),
            (2, "0011"),
            (-8, "1111"),
            (-3, "000I"),
            (2, "011I"),
            (-1, "00II"),
            (2, "11II"),
            (-1, "0III"),
        ],
        19,
    )
    .expect("valid")
    .with_model(ModelSpec::ns22())
}

/// Four-party symmetric inequality with bound 10 on `NS[2/2]`.
pub fn i_ns3() -> BellInequality {
    symmetric(
        Scenario::fourpartite(),
        &[(1, "00II"), (1, "11II"), (2, "0000"), (-1, "1000"), (-1, "1100"), (1, "1110"), (2, "1111")],
        10,
    )
    .expect("valid")
    .with_model(ModelSpec::ns22())
}

/// `-P(a|x) <= 0`.
pub fn positivity(scenario: Scenario, inputs: usize, outcomes: usize) -> BellInequality {
    let mut coeffs = alloc::vec![rational(0, 1); scenario.table_len()];
    coeffs[scenario.index(inputs, outcomes)] = rational(-1, 1);
    BellInequality::new(scenario, Space::Probability, coeffs, rational(0, 1)).expect("valid")
}

/// Looks up a named inequality (`chsh`, `svetlichny`, `i_opt`, `i_ns3`).
pub fn named(name: &str) -> Result<BellInequality> {
    match name.to_ascii_lowercase().replace('-', "_").as_str() {
        "chsh" => Ok(chsh()),
        "svetlichny" | "sv" => Ok(svetlichny()),
        "i_opt" | "iopt" => Ok(i_opt()),
        "i_ns3" | "ins3" => Ok(i_ns3()),
        _ => Err(Error::UnknownName(name.into())),
    }
}

pub const NAMES: [&str; 4] = ["chsh", "svetlichny", "i_opt", "i_ns3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_counts() {
        assert_eq!(distinct_permutations("0011").len(), 6);
        assert_eq!(distinct_permutations("000I").len(), 4);
        assert_eq!(distinct_permutations("011I").len(), 12);
        assert_eq!(distinct_permutations("111").len(), 1);
    }

    #[test]
    fn svetlichny_has_eight_terms() {
        let s = svetlichny();
        assert_eq!(s.terms().count(), 8);
        assert_eq!(s.terms().filter(|(_, c)| **c < rational(0, 1)).count(), 2);
    }
}
