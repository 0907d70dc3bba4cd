//! Shapley value of the game `val(u) = E(max_{j∈u} xⱼ)` for independent
//! exponential lifetimes with rates `λⱼ`.
//!
//! Both the expected maximum and the attribution are alternating sums over
//! subsets of reciprocal rate sums, accumulated with Neumaier compensation.

use crate::error::{Error, Result};
use crate::game::{ShapleyResult, ValueFunction, EXACT_MAX_PLAYERS};
use crate::index_set::{check_players, full_mask, IndexSet};

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialRates {
    lambda: Vec<f64>,
}

impl ExponentialRates {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        check_players(lambda.len())?;
        if let Some(bad) = lambda.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::domain(format!("rate {bad} must be positive and finite")));
        }
        Ok(Self { lambda })
    }

    pub fn rates(&self) -> &[f64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    fn rate_sum(&self, v: u32) -> f64 {
        IndexSet::from_mask_unchecked(self.len(), v)
            .iter()
            .map(|j| self.lambda[j])
            .sum()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// `E(M_u) = Σ_{∅≠v⊆u} (−1)^{|v|−1} / Σ_{j∈v} λⱼ`.
pub fn expected_max(rates: &ExponentialRates, u: IndexSet) -> Result<f64> {
    if u.players() != rates.len() {
        return Err(Error::dimension(format!(
            "set over {} players, {} rates",
            u.players(),
            rates.len()
        )));
    }
    if u.is_empty() {
        return Err(Error::domain("expected maximum over an empty set"));
    }
    let mut acc = CompensatedSum::default();
    for v in u.subsets().skip(1) {
        let sign = if v.len() % 2 == 1 { 1.0 } else { -1.0 };
        acc.add(sign / rates.rate_sum(v.mask()));
    }
    Ok(acc.value())
}

/// The expected-maximum game with `val(∅) = 0`.
#[derive(Debug, Clone)]
pub struct ExpectedMaxGame {
    rates: ExponentialRates,
}

impl ExpectedMaxGame {
    pub fn new(rates: ExponentialRates) -> Self {
        Self { rates }
    }
}

impl ValueFunction for ExpectedMaxGame {
    fn players(&self) -> usize {
        self.rates.len()
    }

    fn value(&self, u: IndexSet) -> f64 {
        if u.is_empty() {
            0.0
        } else {
            expected_max(&self.rates, u).expect("set matches rates")
        }
    }
}

/// `φⱼ = Σ_{w∋j} (−1)^{|w|−1} / (|w| · Σ_{ℓ∈w} λ_ℓ)`.
pub fn maxexp_shapley(rates: &ExponentialRates) -> Result<ShapleyResult> {
    let d = rates.len();
    if d > EXACT_MAX_PLAYERS {
        return Err(Error::capacity(
            "max-exponential Shapley",
            d,
            EXACT_MAX_PLAYERS,
            format!("2^{d} inclusion–exclusion terms"),
        ));
    }
    let mut phi = vec![CompensatedSum::default(); d];
    for w in 1..=full_mask(d) {
        let size = w.count_ones();
        let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign / (size as f64 * rates.rate_sum(w));
        for j in IndexSet::from_mask_unchecked(d, w).iter() {
            phi[j].add(term);
        }
    }
    let full = IndexSet::full(d)?;
    Ok(ShapleyResult {
        phi: phi.into_iter().map(CompensatedSum::value).collect(),
        total: expected_max(rates, full)?,
        calls: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::shapley_exact;

    fn rates(l: &[f64]) -> ExponentialRates {
        ExponentialRates::new(l.to_vec()).unwrap()
    }

    #[test]
    fn single_and_pair() {
        let r = rates(&[2.5]);
        assert_eq!(expected_max(&r, IndexSet::full(1).unwrap()).unwrap(), 0.4);
        let r = rates(&[1.0, 1.0]);
        assert!((expected_max(&r, IndexSet::full(2).unwrap()).unwrap() - 1.5).abs() < 1e-15);
        assert!(expected_max(&r, IndexSet::empty(2).unwrap()).is_err());
    }

    #[test]
    fn three_player_formula() {
        let (l1, l2, l3) = (1.0, 2.0, 3.0);
        let r = maxexp_shapley(&rates(&[l1, l2, l3])).unwrap();
        let expect = 1.0 / l1 - 0.5 / (l1 + l2) - 0.5 / (l1 + l3) + 1.0 / (3.0 * (l1 + l2 + l3));
        assert!((r.phi[0] - expect).abs() < 1e-15);
        assert!(r.efficiency_gap() < 1e-14);
    }

    #[test]
    fn equal_rates_split_evenly() {
        let r = maxexp_shapley(&rates(&[0.7; 5])).unwrap();
        for p in &r.phi {
            assert!((p - r.total / 5.0).abs() < 1e-14);
        }
        let one = maxexp_shapley(&rates(&[4.0])).unwrap();
        assert_eq!(one.phi, vec![0.25]);
    }

    #[test]
    fn agrees_with_enumeration() {
        let r = rates(&[0.3, 1.7, 2.2, 0.9, 5.0, 1.1]);
        let closed = maxexp_shapley(&r).unwrap();
        let game = shapley_exact(&ExpectedMaxGame::new(r)).unwrap();
        for j in 0..6 {
            assert!((closed.phi[j] - game.phi[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(ExponentialRates::new(vec![]).is_err());
        assert!(ExponentialRates::new(vec![1.0, 0.0]).is_err());
        assert!(ExponentialRates::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }
}
