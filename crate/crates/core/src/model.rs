//! Model specifications and their text grammar.
//!
//! ```text
//! L[3]  L[4]             local polytope
//! SV[2|1]                two-way signaling pairs (Svetlichny)
//! PTO[2/1]               all one-way signaling pairs and time orders
//! PTO[A<B]               one pair, A signals to B
//! PTO[order=B<C<A]       pairs consistent with one total order
//! PTO[hull=A<B,B<A]      hull of pair / order sub-models
//! NS[AB]                 non-signaling resource shared by A and B
//! NS[2/1]  NS[hull=AB,AC]
//! NS[2/2]  NS[3/1]       four-partite groupings
//! ```

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scenario::{party_from_label, party_label, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairDirection {
    /// The first party may signal to the second (`A<B`).
    FirstToSecond,
    /// The second party may signal to the first (`B<A`).
    SecondToFirst,
    /// Both ways (Svetlichny pair).
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Local,
    Svetlichny,
    /// One-way signaling from `first` to `second` within the pair, local rest.
    PtoPair { first: usize, second: usize },
    /// Union of the three directed pairs consistent with a total order.
    PtoOrder(Vec<usize>),
    PtoFull,
    PtoHull(Vec<ModelSpec>),
    NsPair(usize, usize),
    Ns21,
    NsHull(Vec<(usize, usize)>),
    Ns22,
    Ns31,
    /// The full non-signaling polytope of the scenario.
    NonSignaling,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub scenario: Scenario,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, scenario: Scenario) -> Result<Self> {
        let spec = Self { kind, scenario };
        spec.validate()?;
        Ok(spec)
    }

    pub fn local(n: usize) -> Result<Self> {
        Self::new(ModelKind::Local, Scenario::new(n)?)
    }

    pub fn svetlichny() -> Self {
        Self { kind: ModelKind::Svetlichny, scenario: Scenario::tripartite() }
    }

    pub fn pto_pair(first: usize, second: usize) -> Result<Self> {
        Self::new(ModelKind::PtoPair { first, second }, Scenario::tripartite())
    }

    pub fn pto_order(order: &[usize]) -> Result<Self> {
        Self::new(ModelKind::PtoOrder(order.to_vec()), Scenario::tripartite())
    }

    pub fn pto_full() -> Self {
        Self { kind: ModelKind::PtoFull, scenario: Scenario::tripartite() }
    }

    pub fn pto_hull(parts: Vec<ModelSpec>) -> Result<Self> {
        Self::new(ModelKind::PtoHull(parts), Scenario::tripartite())
    }

    pub fn ns_pair(a: usize, b: usize) -> Result<Self> {
        Self::new(ModelKind::NsPair(a, b), Scenario::tripartite())
    }

    pub fn ns21() -> Self {
        Self { kind: ModelKind::Ns21, scenario: Scenario::tripartite() }
    }

    pub fn ns_hull(pairs: Vec<(usize, usize)>) -> Result<Self> {
        Self::new(ModelKind::NsHull(pairs), Scenario::tripartite())
    }

    pub fn ns22() -> Self {
        Self { kind: ModelKind::Ns22, scenario: Scenario::fourpartite() }
    }

    pub fn ns31() -> Self {
        Self { kind: ModelKind::Ns31, scenario: Scenario::fourpartite() }
    }

    pub fn non_signaling(n: usize) -> Result<Self> {
        Self::new(ModelKind::NonSignaling, Scenario::new(n)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.scenario.n_parties();
        let party = |p: usize| {
            if p < n {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("party {} outside scenario", party_label(p))))
            }
        };
        let pair = |a: usize, b: usize| {
            party(a)?;
            party(b)?;
            if a == b {
                return Err(Error::InvalidModel("pair needs two distinct parties".into()));
            }
            Ok(())
        };
        match &self.kind {
            ModelKind::Local | ModelKind::NonSignaling => Ok(()),
            ModelKind::Svetlichny | ModelKind::PtoFull | ModelKind::Ns21 => {
                if n == 3 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel("2|1 models are tripartite".into()))
                }
            }
            ModelKind::Ns22 | ModelKind::Ns31 => {
                if n == 4 {
                    Ok(())
                } else {
                    Err(Error::InvalidModel("NS[2/2] and NS[3/1] are four-partite".into()))
                }
            }
            ModelKind::PtoPair { first, second } => pair(*first, *second),
            ModelKind::NsPair(a, b) => pair(*a, *b),
            ModelKind::PtoOrder(order) => {
                crate::behavior::check_permutation(order, n)
                    .map_err(|_| Error::InvalidModel("time order must list every party once".into()))
            }
            ModelKind::PtoHull(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidModel("empty hull".into()));
                }
                for p in parts {
                    if p.scenario != self.scenario {
                        return Err(Error::InvalidModel("hull parts must share the scenario".into()));
                    }
                    match p.kind {
                        ModelKind::PtoPair { .. } | ModelKind::PtoOrder(_) => p.validate()?,
                        _ => {
                            return Err(Error::InvalidModel(
                                "PTO hull parts must be pairs or orders".into(),
                            ))
                        }
                    }
                }
                Ok(())
            }
            ModelKind::NsHull(pairs) => {
                if pairs.is_empty() {
                    return Err(Error::InvalidModel("empty hull".into()));
                }
                pairs.iter().try_for_each(|&(a, b)| pair(a, b))
            }
        }
    }

    /// `true` when every vertex of the model is non-signaling.
    pub fn is_non_signaling(&self) -> bool {
        matches!(
            self.kind,
            ModelKind::Local
                | ModelKind::NsPair(..)
                | ModelKind::Ns21
                | ModelKind::NsHull(_)
                | ModelKind::Ns22
                | ModelKind::Ns31
                | ModelKind::NonSignaling
        )
    }

    /// Renames parties: old party `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        crate::behavior::check_permutation(perm, self.scenario.n_parties())?;
        let kind = match &self.kind {
            ModelKind::PtoPair { first, second } => {
                ModelKind::PtoPair { first: perm[*first], second: perm[*second] }
            }
            ModelKind::PtoOrder(order) => ModelKind::PtoOrder(order.iter().map(|p| perm[*p]).collect()),
            ModelKind::PtoHull(parts) => {
                ModelKind::PtoHull(parts.iter().map(|p| p.relabel(perm)).collect::<Result<_>>()?)
            }
            ModelKind::NsPair(a, b) => {
                let (a, b) = (perm[*a], perm[*b]);
                ModelKind::NsPair(a.min(b), a.max(b))
            }
            ModelKind::NsHull(pairs) => ModelKind::NsHull(
                pairs
                    .iter()
                    .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
                    .collect(),
            ),
            other => other.clone(),
        };
        Self::new(kind, self.scenario)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser { text, pos: 0 }.model()
    }
}

impl core::str::FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.into() })
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected `{token}`"))
        }
    }

    fn party(&mut self) -> Result<usize> {
        match self.peek() {
            Some(c) if c.is_ascii_uppercase() => {
                self.pos += 1;
                Ok(party_from_label(c).expect("uppercase"))
            }
            _ => self.err("expected a party label"),
        }
    }

    fn number(&mut self) -> Result<usize> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.text[start..self.pos].parse().or_else(|_| self.err("number too large"))
    }

    /// `X<Y` or `X<Y<Z`.
    fn chain(&mut self) -> Result<Vec<usize>> {
        let mut parties = alloc::vec![self.party()?];
        while self.eat("<") {
            parties.push(self.party()?);
        }
        Ok(parties)
    }

    fn pto_item(&mut self, scenario: Scenario) -> Result<ModelSpec> {
        let start = self.pos;
        let chain = self.chain()?;
        let kind = match chain.len() {
            2 => ModelKind::PtoPair { first: chain[0], second: chain[1] },
            k if k == scenario.n_parties() => ModelKind::PtoOrder(chain),
            _ => {
                self.pos = start;
                return self.err("expected a pair `X<Y` or a full time order");
            }
        };
        ModelSpec::new(kind, scenario).map_err(|e| Error::Parse { position: start, message: e.to_string() })
    }

    fn ns_pair(&mut self) -> Result<(usize, usize)> {
        let start = self.pos;
        let a = self.party()?;
        self.eat(",");
        let b = self.party()?;
        if a == b {
            self.pos = start;
            return self.err("pair needs two distinct parties");
        }
        Ok((a.min(b), a.max(b)))
    }

    fn model(mut self) -> Result<ModelSpec> {
        let tri = Scenario::tripartite();
        let spec = if self.eat("L[") {
            let n = self.number()?;
            let scenario = Scenario::new(n).or_else(|e| self.err(e.to_string()))?;
            self.expect("]")?;
            ModelSpec { kind: ModelKind::Local, scenario }
        } else if self.eat("SV[") {
            self.expect("2|1")?;
            self.expect("]")?;
            ModelSpec::svetlichny()
        } else if self.eat("PTO[") {
            let spec = if self.eat("2/1") {
                ModelSpec::pto_full()
            } else if self.eat("order=") {
                let start = self.pos;
                let order = self.chain()?;
                ModelSpec::new(ModelKind::PtoOrder(order), tri)
                    .map_err(|e| Error::Parse { position: start, message: e.to_string() })?
            } else if self.eat("hull=") {
                let mut parts = alloc::vec![self.pto_item(tri)?];
                while self.eat(",") {
                    parts.push(self.pto_item(tri)?);
                }
                ModelSpec::new(ModelKind::PtoHull(parts), tri)?
            } else {
                let start = self.pos;
                let chain = self.chain()?;
                if chain.len() != 2 {
                    self.pos = start;
                    return self.err("expected `X<Y`, `order=...`, `hull=...` or `2/1`");
                }
                ModelSpec::new(ModelKind::PtoPair { first: chain[0], second: chain[1] }, tri)
                    .map_err(|e| Error::Parse { position: start, message: e.to_string() })?
            };
            self.expect("]")?;
            spec
        } else if self.eat("NS[") {
            let spec = if self.eat("2/1") {
                ModelSpec::ns21()
            } else if self.eat("2/2") {
                ModelSpec::ns22()
            } else if self.eat("3/1") {
                ModelSpec::ns31()
            } else if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                let n = self.number()?;
                let scenario = Scenario::new(n).or_else(|e| self.err(e.to_string()))?;
                ModelSpec { kind: ModelKind::NonSignaling, scenario }
            } else if self.eat("hull=") {
                let mut pairs = alloc::vec![self.ns_pair()?];
                while self.eat(",") {
                    pairs.push(self.ns_pair()?);
                }
                ModelSpec::new(ModelKind::NsHull(pairs), tri)?
            } else {
                let start = self.pos;
                let (a, b) = self.ns_pair()?;
                ModelSpec::new(ModelKind::NsPair(a, b), tri)
                    .map_err(|e| Error::Parse { position: start, message: e.to_string() })?
            };
            self.expect("]")?;
            spec
        } else {
            return self.err("unknown model; expected L[..], SV[..], PTO[..] or NS[..]");
        };
        if self.pos != self.text.len() {
            return self.err("unexpected trailing input");
        }
        Ok(spec)
    }
}

fn write_chain(f: &mut fmt::Formatter<'_>, parties: &[usize]) -> fmt::Result {
    for (i, p) in parties.iter().enumerate() {
        if i > 0 {
            f.write_str("<")?;
        }
        write!(f, "{}", party_label(*p))?;
    }
    Ok(())
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ModelKind::Local => write!(f, "L[{}]", self.scenario.n_parties()),
            ModelKind::Svetlichny => f.write_str("SV[2|1]"),
            ModelKind::PtoFull => f.write_str("PTO[2/1]"),
            ModelKind::PtoPair { first, second } => {
                f.write_str("PTO[")?;
                write_chain(f, &[*first, *second])?;
                f.write_str("]")
            }
            ModelKind::PtoOrder(order) => {
                f.write_str("PTO[order=")?;
                write_chain(f, order)?;
                f.write_str("]")
            }
            ModelKind::PtoHull(parts) => {
                f.write_str("PTO[hull=")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match &p.kind {
                        ModelKind::PtoPair { first, second } => write_chain(f, &[*first, *second])?,
                        ModelKind::PtoOrder(order) => write_chain(f, order)?,
                        _ => unreachable!("validated hull part"),
                    }
                }
                f.write_str("]")
            }
            ModelKind::NsPair(a, b) => write!(f, "NS[{}{}]", party_label(*a), party_label(*b)),
            ModelKind::Ns21 => f.write_str("NS[2/1]"),
            ModelKind::NsHull(pairs) => {
                f.write_str("NS[hull=")?;
                for (i, (a, b)) in pairs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}{}", party_label(*a), party_label(*b))?;
                }
                f.write_str("]")
            }
            ModelKind::Ns22 => f.write_str("NS[2/2]"),
            ModelKind::Ns31 => f.write_str("NS[3/1]"),
            ModelKind::NonSignaling => write!(f, "NS[{}]", self.scenario.n_parties()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_round_trip() {
        for text in [
            "L[3]", "L[4]", "SV[2|1]", "PTO[2/1]", "PTO[A<B]", "PTO[C<A]", "PTO[order=B<C<A]",
            "PTO[hull=A<B,B<A]", "PTO[hull=A<B<C,C<B<A]", "NS[AB]", "NS[2/1]", "NS[hull=AB,AC]",
            "NS[2/2]", "NS[3/1]", "NS[2]", "NS[3]",
        ] {
            let spec = ModelSpec::parse(text).unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!(ModelSpec::parse("NS[B,A]").unwrap().to_string(), "NS[AB]");
    }

    #[test]
    fn direction_is_not_fuzzy() {
        let ab = ModelSpec::parse("PTO[A<B]").unwrap();
        let ba = ModelSpec::parse("PTO[B<A]").unwrap();
        assert_ne!(ab, ba);
        assert_eq!(ab.kind, ModelKind::PtoPair { first: 0, second: 1 });
    }

    #[test]
    fn parse_errors_carry_positions() {
        let pos = |s: &str| match ModelSpec::parse(s) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("XYZ"), 0);
        assert_eq!(pos("PTO[A<A]"), 4);
        assert_eq!(pos("PTO[A<B"), 7);
        assert_eq!(pos("L[3]x"), 4);
        assert_eq!(pos("PTO[order=A<B]"), 10);
        assert_eq!(pos("L[1]"), 3);
        assert_eq!(pos("PTO[A<D]"), 4);
    }

    #[test]
    fn relabel_specs() {
        let spec = ModelSpec::parse("PTO[order=A<B<C]").unwrap();
        let r = spec.relabel(&[1, 2, 0]).unwrap();
        assert_eq!(r.to_string(), "PTO[order=B<C<A]");
        let ns = ModelSpec::parse("NS[hull=AB,AC]").unwrap();
        assert_eq!(ns.relabel(&[2, 1, 0]).unwrap().to_string(), "NS[hull=BC,AC]");
    }
}
