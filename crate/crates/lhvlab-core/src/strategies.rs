//! Deterministic local strategies: the o^m maps from settings to outcomes
//! shared by the Bell and steering deciders.

use crate::error::{Error, Result};

/// Default cap on the number of enumerated strategies.
pub const STRATEGY_CAP: usize = 1 << 20;

/// A single map J: settings → outcomes, stored as assignment[x] = J(x)
/// with 0-based outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    assignment: Vec<usize>,
    outcomes: usize,
}

impl DeterministicStrategy {
    pub fn settings(&self) -> usize {
        self.assignment.len()
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    /// J(x).
    pub fn outcome(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Lexicographic rank within the full space, treating assignment[0] as
    /// the most significant digit.
    pub fn rank(&self) -> usize {
        self.assignment
            .iter()
            .fold(0, |acc, &a| acc * self.outcomes + a)
    }

    pub fn from_rank(rank: usize, settings: usize, outcomes: usize) -> Self {
        let mut assignment = vec![0; settings];
        let mut r = rank;
        for x in (0..settings).rev() {
            assignment[x] = r % outcomes;
            r /= outcomes;
        }
        Self { assignment, outcomes }
    }

    /// The deterministic response distribution δ_{a,J(x)} over outcomes.
    pub fn response_distribution(&self, x: usize) -> Result<Vec<f64>> {
        if x >= self.settings() {
            return Err(Error::Domain(format!(
                "setting index {x} out of range for m = {}",
                self.settings()
            )));
        }
        let mut pd = vec![0.0; self.outcomes];
        pd[self.assignment[x]] = 1.0;
        Ok(pd)
    }
}

/// The full space Ω of deterministic strategies, in lexicographic order.
#[derive(Debug, Clone)]
pub struct StrategySpace {
    strategies: Vec<DeterministicStrategy>,
    settings: usize,
    outcomes: usize,
}

impl StrategySpace {
    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn settings(&self) -> usize {
        self.settings
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn strategy(&self, k: usize) -> &DeterministicStrategy {
        &self.strategies[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &DeterministicStrategy> {
        self.strategies.iter()
    }
}

/// Number of strategies o^m, or a capacity error against `cap`.
pub fn strategy_count(m: usize, o: usize, cap: usize) -> Result<usize> {
    let mut n: u128 = 1;
    for _ in 0..m {
        n = n.saturating_mul(o as u128);
        if n > cap as u128 {
            return Err(Error::Capacity {
                required: (o as u128).saturating_pow(m as u32),
                cap,
            });
        }
    }
    Ok(n as usize)
}

/// Enumerate all o^m strategies in lexicographic order.
pub fn enumerate_strategies(m: usize, o: usize, cap: usize) -> Result<StrategySpace> {
    if m == 0 || o == 0 {
        return Err(Error::Domain(format!(
            "strategy space needs m ≥ 1 and o ≥ 1, got m = {m}, o = {o}"
        )));
    }
    let n = strategy_count(m, o, cap)?;
    let strategies = (0..n)
        .map(|rank| DeterministicStrategy::from_rank(rank, m, o))
        .collect();
    Ok(StrategySpace {
        strategies,
        settings: m,
        outcomes: o,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_setting_two_outcomes() {
        let sp = enumerate_strategies(1, 2, STRATEGY_CAP).unwrap();
        assert_eq!(sp.len(), 2);
        assert_eq!(sp.strategy(0).assignment(), &[0]);
        assert_eq!(sp.strategy(1).assignment(), &[1]);
    }

    #[test]
    fn counting_matches_o_pow_m() {
        assert_eq!(enumerate_strategies(2, 2, STRATEGY_CAP).unwrap().len(), 4);
        let sp = enumerate_strategies(3, 3, STRATEGY_CAP).unwrap();
        assert_eq!(sp.len(), 27);
        // All distinct.
        for i in 0..sp.len() {
            for j in (i + 1)..sp.len() {
                assert_ne!(sp.strategy(i).assignment(), sp.strategy(j).assignment());
            }
        }
        // Lexicographic order.
        for w in sp.strategies.windows(2) {
            assert!(w[0].assignment() < w[1].assignment());
        }
    }

    #[test]
    fn cap_exceeded_reports_required_size() {
        match enumerate_strategies(30, 4, 1 << 20) {
            Err(Error::Capacity { required, cap }) => {
                assert_eq!(required, 4u128.pow(30));
                assert_eq!(cap, 1 << 20);
            }
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn response_distribution_is_one_hot() {
        let j = DeterministicStrategy::from_rank(1, 2, 2); // assignment (0,1)
        assert_eq!(j.response_distribution(0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(j.response_distribution(1).unwrap(), vec![0.0, 1.0]);
        assert!(j.response_distribution(2).is_err());
        for x in 0..2 {
            let pd = j.response_distribution(x).unwrap();
            assert_eq!(pd.iter().sum::<f64>(), 1.0);
        }
    }
}
