//! Exact Shapley attribution for cooperative games over at most 30 players.
//!
//! The value of every coalition is evaluated once into a dense table indexed by
//! bitmask, then the attributions are accumulated in ascending mask order, so
//! results do not depend on how the table was filled.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index_set::{check_players, full_mask, IndexSet};

/// Player cap for subset enumeration (`2^d` evaluations).
pub const EXACT_MAX_PLAYERS: usize = 25;
/// Player cap for ordering enumeration (`d!` orders).
pub const PERMUTATION_MAX_PLAYERS: usize = 9;

/// A coalition game `u ↦ val(u)` with `val(∅) = 0`.
///
/// Implementations must be pure: equal coalitions give equal values.
pub trait ValueFunction: Sync {
    fn players(&self) -> usize;
    fn value(&self, u: IndexSet) -> f64;
}

impl<V: ValueFunction + ?Sized> ValueFunction for &V {
    fn players(&self) -> usize {
        (**self).players()
    }

    fn value(&self, u: IndexSet) -> f64 {
        (**self).value(u)
    }
}

/// Game given by an explicit table of `2^d` values indexed by mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGame {
    d: usize,
    values: Vec<f64>,
}

impl TableGame {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        check_players(d)?;
        if d > EXACT_MAX_PLAYERS {
            return Err(Error::capacity(
                "game table",
                d,
                EXACT_MAX_PLAYERS,
                format!("2^{d} entries"),
            ));
        }
        if values.len() != 1 << d {
            return Err(Error::dimension(format!(
                "table has {} entries, expected 2^{d} = {}",
                values.len(),
                1usize << d
            )));
        }
        if values[0] != 0.0 {
            return Err(Error::domain(format!("val(∅) = {} but must be 0", values[0])));
        }
        Ok(Self { d, values })
    }

    /// Tabulates any game.
    pub fn tabulate<V: ValueFunction + ?Sized>(val: &V) -> Result<Self> {
        let values = evaluate_all(val)?;
        Self::new(val.players(), values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl ValueFunction for TableGame {
    fn players(&self) -> usize {
        self.d
    }

    fn value(&self, u: IndexSet) -> f64 {
        self.values[u.mask() as usize]
    }
}

/// Game backed by a closure.
pub struct FnGame<F> {
    d: usize,
    f: F,
}

impl<F> FnGame<F>
where
    F: Fn(IndexSet) -> f64 + Sync,
{
    pub fn new(d: usize, f: F) -> Self {
        Self { d, f }
    }
}

impl<F> ValueFunction for FnGame<F>
where
    F: Fn(IndexSet) -> f64 + Sync,
{
    fn players(&self) -> usize {
        self.d
    }

    fn value(&self, u: IndexSet) -> f64 {
        if u.is_empty() {
            0.0
        } else {
            (self.f)(u)
        }
    }
}

/// Pointwise sum of two games on the same players, for additivity checks.
pub struct SumGame<A, B>(pub A, pub B);

impl<A: ValueFunction, B: ValueFunction> ValueFunction for SumGame<A, B> {
    fn players(&self) -> usize {
        self.0.players()
    }

    fn value(&self, u: IndexSet) -> f64 {
        self.0.value(u) + self.1.value(u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyResult {
    pub phi: Vec<f64>,
    /// `val(1:d)`.
    pub total: f64,
    /// Number of value-function evaluations.
    pub calls: usize,
}

impl ShapleyResult {
    pub fn players(&self) -> usize {
        self.phi.len()
    }

    /// `|Σφⱼ − total|`.
    pub fn efficiency_gap(&self) -> f64 {
        (self.phi.iter().sum::<f64>() - self.total).abs()
    }

    /// Attributions divided by the total value.
    pub fn normalized(&self) -> Vec<f64> {
        self.phi.iter().map(|p| p / self.total).collect()
    }
}

/// `(1/d)·C(d−1,k)^{−1}`, the weight of a size-`k` coalition not containing the player.
pub fn shapley_weight(d: usize, k: usize) -> Result<f64> {
    check_players(d)?;
    if k >= d {
        return Err(Error::domain(format!("coalition size k = {k} must be below d = {d}")));
    }
    Ok(1.0 / (d as f64 * binomial(d - 1, k)))
}

/// `C(n, k)` by the multiplicative formula. Every partial product is itself a
/// binomial coefficient, so the result is exact while it stays below 2^53.
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0f64;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

fn check_exact_capacity(d: usize) -> Result<()> {
    if d > EXACT_MAX_PLAYERS {
        return Err(Error::capacity(
            "exact Shapley enumeration",
            d,
            EXACT_MAX_PLAYERS,
            format!("2^{d} value evaluations"),
        ));
    }
    Ok(())
}

/// Evaluates `val` on all `2^d` coalitions, in parallel; the result is indexed by mask.
pub fn evaluate_all<V: ValueFunction + ?Sized>(val: &V) -> Result<Vec<f64>> {
    let d = val.players();
    check_players(d)?;
    check_exact_capacity(d)?;
    let n = 1u32 << d;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|m| val.value(IndexSet::from_mask_unchecked(d, m)))
        .collect();
    if values[0] != 0.0 {
        return Err(Error::domain(format!("val(∅) = {} but must be 0", values[0])));
    }
    Ok(values)
}

/// Shapley values from a full table of coalition values indexed by mask.
pub fn shapley_from_table(d: usize, values: &[f64]) -> Result<Vec<f64>> {
    check_players(d)?;
    check_exact_capacity(d)?;
    if values.len() != 1 << d {
        return Err(Error::dimension(format!(
            "table has {} entries, expected 2^{d}",
            values.len()
        )));
    }
    let weights: Vec<f64> = (0..d).map(|k| shapley_weight(d, k)).collect::<Result<_>>()?;
    let n = 1u32 << d;
    let phi = (0..d)
        .into_par_iter()
        .map(|j| {
            let bit = 1u32 << j;
            let mut acc = 0.0;
            for m in 0..n {
                if m & bit == 0 {
                    let k = m.count_ones() as usize;
                    acc += weights[k] * (values[(m | bit) as usize] - values[m as usize]);
                }
            }
            acc
        })
        .collect();
    Ok(phi)
}

/// Exact Shapley values by the subset-weight formula.
pub fn shapley_exact<V: ValueFunction + ?Sized>(val: &V) -> Result<ShapleyResult> {
    let d = val.players();
    check_players(d)?;
    check_exact_capacity(d)?;
    let values = evaluate_all(val)?;
    let phi = shapley_from_table(d, &values)?;
    Ok(ShapleyResult {
        phi,
        total: values[full_mask(d) as usize],
        calls: values.len(),
    })
}

/// Exact Shapley values by averaging marginal contributions over all `d!` orders.
pub fn shapley_permutation<V: ValueFunction + ?Sized>(val: &V) -> Result<ShapleyResult> {
    let d = val.players();
    check_players(d)?;
    if d > PERMUTATION_MAX_PLAYERS {
        return Err(Error::capacity(
            "permutation Shapley enumeration",
            d,
            PERMUTATION_MAX_PLAYERS,
            format!("{d}! orderings"),
        ));
    }
    let values = evaluate_all(val)?;
    let mut phi = vec![0.0; d];
    let mut order: Vec<usize> = (0..d).collect();
    let mut orders = 0u64;
    loop {
        let mut prefix = 0u32;
        for &j in &order {
            let next = prefix | (1 << j);
            phi[j] += values[next as usize] - values[prefix as usize];
            prefix = next;
        }
        orders += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    for p in &mut phi {
        *p /= orders as f64;
    }
    Ok(ShapleyResult {
        phi,
        total: values[full_mask(d) as usize],
        calls: values.len(),
    })
}

/// Lexicographic successor; returns `false` after the last permutation.
pub(crate) fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = a.len() - 1;
    while a[k] <= a[i - 1] {
        k -= 1;
    }
    a.swap(i - 1, k);
    a[i..].reverse();
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`check_axioms`]. Additivity needs two games and is left to the
/// caller (see [`SumGame`]).
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub efficiency: AxiomCheck,
    /// One entry per player detected as a dummy.
    pub dummy: Vec<(usize, AxiomCheck)>,
    /// One entry per detected interchangeable pair `(i, j)`, `i < j`.
    pub symmetry: Vec<((usize, usize), AxiomCheck)>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.efficiency.passed
            && self.dummy.iter().all(|(_, c)| c.passed)
            && self.symmetry.iter().all(|(_, c)| c.passed)
    }
}

/// Tolerances used by [`check_axioms`], relative to `max(1, max|val|)`.
#[derive(Debug, Clone, Copy)]
pub struct AxiomTolerances {
    /// Two values closer than this are treated as equal when detecting dummies
    /// and interchangeable pairs.
    pub detect: f64,
    pub efficiency: f64,
    pub dummy: f64,
    pub symmetry: f64,
}

impl Default for AxiomTolerances {
    fn default() -> Self {
        Self {
            detect: 1e-14,
            efficiency: 1e-9,
            dummy: 1e-12,
            symmetry: 1e-10,
        }
    }
}

pub fn check_axioms<V: ValueFunction + ?Sized>(val: &V, result: &ShapleyResult) -> Result<AxiomReport> {
    check_axioms_with(val, result, AxiomTolerances::default())
}

/// Exhaustive axiom report; intended for test-scale games.
pub fn check_axioms_with<V: ValueFunction + ?Sized>(
    val: &V,
    result: &ShapleyResult,
    tol: AxiomTolerances,
) -> Result<AxiomReport> {
    let d = val.players();
    if result.players() != d {
        return Err(Error::dimension(format!(
            "result has {} players, game has {d}",
            result.players()
        )));
    }
    let values = evaluate_all(val)?;
    let scale = values.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let n = 1u32 << d;

    let total = values[full_mask(d) as usize];
    let gap = (result.phi.iter().sum::<f64>() - total).abs();
    let efficiency = AxiomCheck {
        passed: gap <= tol.efficiency * total.abs().max(1.0),
        detail: format!("|Σφ − val(1:d)| = {gap:.3e}"),
    };

    let mut dummy = Vec::new();
    for j in 0..d {
        let bit = 1u32 << j;
        let is_dummy = (0..n)
            .filter(|m| m & bit == 0)
            .all(|m| (values[(m | bit) as usize] - values[m as usize]).abs() <= tol.detect * scale);
        if is_dummy {
            let p = result.phi[j];
            dummy.push((
                j,
                AxiomCheck {
                    passed: p.abs() <= tol.dummy * scale,
                    detail: format!("dummy player {j}: φ = {p:.3e}"),
                },
            ));
        }
    }

    let mut symmetry = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let (bi, bj) = (1u32 << i, 1u32 << j);
            let interchangeable = (0..n).filter(|m| m & (bi | bj) == 0).all(|m| {
                (values[(m | bi) as usize] - values[(m | bj) as usize]).abs() <= tol.detect * scale
            });
            if interchangeable {
                let diff = (result.phi[i] - result.phi[j]).abs();
                symmetry.push((
                    (i, j),
                    AxiomCheck {
                        passed: diff <= tol.symmetry * scale,
                        detail: format!("players {i},{j}: |φᵢ − φⱼ| = {diff:.3e}"),
                    },
                ));
            }
        }
    }

    Ok(AxiomReport {
        efficiency,
        dummy,
        symmetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(d: usize, v: &[f64]) -> TableGame {
        TableGame::new(d, v.to_vec()).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(shapley_weight(2, 0).unwrap(), 0.5);
        assert_eq!(shapley_weight(1, 0).unwrap(), 1.0);
        assert!((shapley_weight(3, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!(shapley_weight(3, 3).is_err());
        assert!(shapley_weight(0, 0).is_err());
        assert!(shapley_weight(31, 0).is_err());
    }

    #[test]
    fn weight_normalization_up_to_thirty() {
        for d in 1..=30 {
            let s: f64 = (0..d)
                .map(|k| binomial(d - 1, k) * shapley_weight(d, k).unwrap())
                .sum();
            assert!((s - 1.0).abs() < 1e-12, "d = {d}: {s}");
        }
    }

    #[test]
    fn binomial_exact() {
        assert_eq!(binomial(29, 14), 77_558_760.0);
        assert_eq!(binomial(5, 0), 1.0);
        assert_eq!(binomial(5, 5), 1.0);
    }

    #[test]
    fn single_player_takes_all() {
        let r = shapley_exact(&table(1, &[0.0, 5.0])).unwrap();
        assert_eq!(r.phi, vec![5.0]);
        assert_eq!(r.calls, 2);
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        for a in [-3.0, 0.0, 0.7, 10.0] {
            let g = table(2, &[0.0, a, a, 4.0]);
            let r = shapley_exact(&g).unwrap();
            assert_eq!(r.phi, vec![2.0, 2.0]);
            let p = shapley_permutation(&g).unwrap();
            assert_eq!(p.phi, vec![2.0, 2.0]);
        }
    }

    #[test]
    fn cardinality_game() {
        let g = FnGame::new(3, |u: IndexSet| u.len() as f64);
        let r = shapley_permutation(&g).unwrap();
        for p in r.phi {
            assert!((p - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dummy_player() {
        let s = 2.5;
        let g = table(2, &[0.0, s, 0.0, s]);
        let r = shapley_exact(&g).unwrap();
        assert_eq!(r.phi, vec![s, 0.0]);
        let rep = check_axioms(&g, &r).unwrap();
        assert_eq!(rep.dummy.len(), 1);
        assert_eq!(rep.dummy[0].0, 1);
        assert!(rep.all_passed());
    }

    #[test]
    fn symmetry_detected() {
        let g = table(3, &[0.0, 1.0, 1.0, 3.0, 0.5, 2.0, 2.0, 4.0]);
        let r = shapley_exact(&g).unwrap();
        let rep = check_axioms(&g, &r).unwrap();
        assert!(rep.symmetry.iter().any(|((i, j), c)| (*i, *j) == (0, 1) && c.passed));
        assert!(rep.all_passed());
    }

    #[test]
    fn wrong_attribution_fails_report() {
        let g = table(2, &[0.0, 1.0, 1.0, 2.0]);
        let bad = ShapleyResult {
            phi: vec![1.5, 0.4],
            total: 2.0,
            calls: 0,
        };
        let rep = check_axioms(&g, &bad).unwrap();
        assert!(!rep.efficiency.passed);
        assert!(!rep.all_passed());
    }

    #[test]
    fn capacity_errors() {
        let g = FnGame::new(26, |u: IndexSet| u.len() as f64);
        match shapley_exact(&g) {
            Err(Error::Capacity { cost, .. }) => assert!(cost.contains("2^26")),
            other => panic!("expected capacity error, got {other:?}"),
        }
        let g = FnGame::new(10, |u: IndexSet| u.len() as f64);
        assert!(matches!(shapley_permutation(&g), Err(Error::Capacity { .. })));
    }

    #[test]
    fn nonzero_empty_value_rejected() {
        assert!(TableGame::new(1, vec![1.0, 2.0]).is_err());
        assert!(TableGame::new(2, vec![0.0, 2.0]).is_err());
    }

    #[test]
    fn permutation_successor_counts() {
        let mut a = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut a) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(a, vec![3, 2, 1, 0]);
    }
}
