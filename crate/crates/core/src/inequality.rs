//! Linear Bell-like inequalities `coeffs . coords <= bound`.

use alloc::format;
use alloc::vec::Vec;



use crate::behavior::Behavior;
use crate::correlators::{reconstruct_table, to_correlators, CorrelatorVector, Pattern};
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::point::ExactPoint;
use crate::scalar::{Rational, Scalar};
use crate::scenario::Scenario;

/// Coordinate space of a point or a linear functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    /// Full table `P(a|x)`, length `4^n`.
    Probability,
    /// Correlators, length `3^n - 1`.
    Correlator,
}

impl Space {
    pub fn dim(&self, scenario: &Scenario) -> usize {
        match self {
            Space::Probability => scenario.table_len(),
            Space::Correlator => scenario.correlator_len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellInequality<T = Rational> {
    scenario: Scenario,
    space: Space,
    coeffs: Vec<T>,
    bound: T,
    model: Option<ModelSpec>,
}

impl<T: Scalar> BellInequality<T> {
    pub fn new(scenario: Scenario, space: Space, coeffs: Vec<T>, bound: T) -> Result<Self> {
        let dim = space.dim(&scenario);
        if coeffs.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, found: coeffs.len() });
        }
        Ok(Self { scenario, space, coeffs, bound, model: None })
    }

    /// Correlator inequality from `(pattern, coefficient)` terms; repeated
    /// patterns accumulate.
    pub fn from_terms(scenario: Scenario, terms: &[(Pattern, T)], bound: T) -> Result<Self> {
        let mut coeffs = alloc::vec![T::zero(); scenario.correlator_len()];
        for (p, c) in terms {
            if p.n_parties() != scenario.n_parties() {
                return Err(Error::ScenarioMismatch {
                    expected: scenario.n_parties(),
                    found: p.n_parties(),
                });
            }
            coeffs[p.index()] += c.clone();
        }
        Self::new(scenario, Space::Correlator, coeffs, bound)
    }

    pub fn with_model(mut self, model: ModelSpec) -> Self {
        self.model = Some(model);
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn bound(&self) -> &T {
        &self.bound
    }

    pub fn model(&self) -> Option<&ModelSpec> {
        self.model.as_ref()
    }

    pub fn set_bound(&mut self, bound: T) {
        self.bound = bound;
    }

    pub fn coeff(&self, pattern: &Pattern) -> Option<&T> {
        match self.space {
            Space::Correlator => Some(&self.coeffs[pattern.index()]),
            Space::Probability => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    fn dot(&self, coords: &[T]) -> T {
        let mut acc = T::zero();
        for (c, x) in self.coeffs.iter().zip(coords) {
            acc.add_mul_assign(c, x);
        }
        acc
    }

    /// Left-hand side on a behavior.
    pub fn value(&self, behavior: &Behavior<T>) -> Result<T> {
        self.scenario.check_same(&behavior.scenario())?;
        Ok(match self.space {
            Space::Probability => self.dot(behavior.table()),
            Space::Correlator => self.dot(to_correlators(behavior).coords()),
        })
    }

    /// Left-hand side on correlators (the behavior they describe must be
    /// non-signaling for probability-space inequalities to be meaningful).
    pub fn value_correlators(&self, correlators: &CorrelatorVector<T>) -> Result<T> {
        self.scenario.check_same(&correlators.scenario())?;
        Ok(match self.space {
            Space::Correlator => self.dot(correlators.coords()),
            Space::Probability => self.dot(&reconstruct_table(correlators)),
        })
    }

    pub fn is_violated_by(&self, behavior: &Behavior<T>) -> Result<bool> {
        let mut v = self.value(behavior)?;
        v -= self.bound.clone();
        Ok(v > T::tolerance())
    }

    /// Equivalent probability-space form, valid on every behavior (the
    /// correlator map is linear on the full table).
    pub fn to_probability_form(&self) -> Self {
        if self.space == Space::Probability {
            return self.clone();
        }
        let s = self.scenario;
        let k = s.n_settings();
        let mut coeffs = alloc::vec![T::zero(); s.table_len()];
        for (pattern, c) in Pattern::all(&s).zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let support = pattern.support();
            let settings = pattern.settings();
            let share = c.div_ref(&T::from_ratio(1 << (s.n_parties() - pattern.weight()), 1));
            for x in (0..k).filter(|x| x & support == settings) {
                for a in 0..k {
                    let entry = &mut coeffs[s.index(x, a)];
                    if (a & support).count_ones() % 2 == 1 {
                        *entry -= share.clone();
                    } else {
                        *entry += share.clone();
                    }
                }
            }
        }
        Self { scenario: s, space: Space::Probability, coeffs, bound: self.bound.clone(), model: self.model.clone() }
    }

    /// Equivalent correlator form on non-signaling behaviors. The constant term
    /// of the expansion is moved into the bound.
    pub fn to_correlator_form(&self) -> Self {
        if self.space == Space::Correlator {
            return self.clone();
        }
        let s = self.scenario;
        let k = s.n_settings();
        let scale = T::from_ratio(1, k as i64);
        let mut constant = T::zero();
        let mut coeffs = alloc::vec![T::zero(); s.correlator_len()];
        for (i, g) in self.coeffs.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let (x, a) = s.split_index(i);
            let g = g.mul_ref(&scale);
            constant += g.clone();
            for pattern in Pattern::all(&s) {
                let support = pattern.support();
                if x & support != pattern.settings() {
                    continue;
                }
                let entry = &mut coeffs[pattern.index()];
                if (a & support).count_ones() % 2 == 1 {
                    *entry -= g.clone();
                } else {
                    *entry += g.clone();
                }
            }
        }
        let mut bound = self.bound.clone();
        bound -= constant;
        Self { scenario: s, space: Space::Correlator, coeffs, bound, model: self.model.clone() }
    }

    /// Expresses the inequality in `space`.
    pub fn in_space(&self, space: Space) -> Self {
        match space {
            Space::Probability => self.to_probability_form(),
            Space::Correlator => self.to_correlator_form(),
        }
    }

    pub fn to_f64(&self) -> BellInequality<f64> {
        BellInequality {
            scenario: self.scenario,
            space: self.space,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
            bound: self.bound.to_f64(),
            model: self.model.clone(),
        }
    }
}

impl BellInequality<Rational> {
    /// Exact value on a stored vertex expressed in `space`.
    pub fn value_point(&self, point: &ExactPoint, space: Space) -> Result<Rational> {
        if point.len() != space.dim(&self.scenario) {
            return Err(Error::DimensionMismatch(format!(
                "point of length {} in {space:?} space",
                point.len()
            )));
        }
        if space == self.space {
            Ok(point.dot(&self.coeffs))
        } else {
            let converted = self.in_space(space);
            // correlator forms carry the constant term in the bound
            let offset = &self.bound - &converted.bound;
            Ok(point.dot(&converted.coeffs) + offset)
        }
    }

    pub fn convert<U: Scalar>(&self) -> BellInequality<U> {
        BellInequality {
            scenario: self.scenario,
            space: self.space,
            coeffs: self.coeffs.iter().map(U::from_rational).collect(),
            bound: U::from_rational(&self.bound),
            model: self.model.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_traits::Zero;

    #[test]
    fn forms_agree_on_non_signaling_behaviors() {
        let s = Scenario::bipartite();
        let terms: Vec<(Pattern, Rational)> = ["00", "01", "10", "11", "0I", "I1"]
            .iter()
            .zip([1, 1, 1, -1, 2, -3])
            .map(|(p, c)| (Pattern::parse(p).unwrap(), rational(c, 1)))
            .collect();
        let ineq = BellInequality::from_terms(s, &terms, rational(2, 1)).unwrap();
        let prob = ineq.to_probability_form();
        let back = prob.to_correlator_form();
        assert_eq!(back.coeffs(), ineq.coeffs());
        assert_eq!(back.bound(), ineq.bound());
        let b: Behavior<Rational> = Behavior::deterministic(s, |p, x| (p * x) % 2);
        assert_eq!(ineq.value(&b).unwrap(), prob.value(&b).unwrap());
    }

    #[test]
    fn probability_to_correlator_moves_constant() {
        let s = Scenario::bipartite();
        let mut coeffs = alloc::vec![rational(0, 1); 16];
        coeffs[0] = rational(-1, 1);
        let pos = BellInequality::new(s, Space::Probability, coeffs, rational(0, 1)).unwrap();
        let c = pos.to_correlator_form();
        assert_eq!(*c.bound(), rational(1, 4));
        assert!(c.coeffs().iter().all(|x| *x == rational(-1, 4) || x.is_zero()));
    }
}
