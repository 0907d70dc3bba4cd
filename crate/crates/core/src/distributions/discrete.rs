//! Finite-support joint distributions and their exact variance-explained games.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::game::ValueFunction;
use crate::index_set::IndexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub x: Vec<f64>,
    pub p: f64,
    pub y: f64,
}

/// Grouping key for a coordinate value: exact bit pattern, with `-0.0` folded into `0.0`.
#[inline]
fn key(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// A joint law on finitely many distinct points `x`, each carrying an output `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    d: usize,
    atoms: Vec<Atom>,
}

impl DiscreteJoint {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let d = atoms
            .first()
            .map(|a| a.x.len())
            .ok_or_else(|| Error::domain("joint needs at least one atom"))?;
        IndexSet::empty(d)?;
        let mut seen = HashMap::new();
        let mut total = 0.0;
        for (i, a) in atoms.iter().enumerate() {
            if a.x.len() != d {
                return Err(Error::dimension(format!(
                    "atom {i} has {} coordinates, expected {d}",
                    a.x.len()
                )));
            }
            if !(a.p > 0.0) || !a.p.is_finite() {
                return Err(Error::domain(format!("atom {i} has probability {}", a.p)));
            }
            if !a.y.is_finite() || a.x.iter().any(|v| !v.is_finite()) {
                return Err(Error::domain(format!("atom {i} has non-finite values")));
            }
            let k: Vec<u64> = a.x.iter().map(|&v| key(v)).collect();
            if let Some(prev) = seen.insert(k, i) {
                return Err(Error::domain(format!("atoms {prev} and {i} share the same x")));
            }
            total += a.p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { d, atoms })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.p * a.y).sum()
    }

    /// `var(y)`.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms.iter().map(|a| a.p * (a.y - mu).powi(2)).sum()
    }

    /// `var(E(y | x_u))`, by grouping atoms that agree on the `u` coordinates.
    pub fn explained_variance(&self, u: IndexSet) -> f64 {
        if u.is_empty() {
            return 0.0;
        }
        let idx = u.to_vec();
        let mut groups: BTreeMap<Vec<u64>, (f64, f64)> = BTreeMap::new();
        for a in &self.atoms {
            let k = idx.iter().map(|&j| key(a.x[j])).collect();
            let g = groups.entry(k).or_insert((0.0, 0.0));
            g.0 += a.p;
            g.1 += a.p * a.y;
        }
        let mu = self.mean();
        groups
            .values()
            .map(|&(mass, sum)| {
                let dev = sum / mass - mu;
                mass * dev * dev
            })
            .sum()
    }
}

/// The game `u ↦ var(E(y | x_u))` of a discrete joint.
#[derive(Debug, Clone)]
pub struct DiscreteGame {
    joint: DiscreteJoint,
}

impl DiscreteGame {
    pub fn joint(&self) -> &DiscreteJoint {
        &self.joint
    }
}

impl ValueFunction for DiscreteGame {
    fn players(&self) -> usize {
        self.joint.d
    }

    fn value(&self, u: IndexSet) -> f64 {
        self.joint.explained_variance(u)
    }
}

pub fn discrete_value_function(joint: &DiscreteJoint) -> DiscreteGame {
    DiscreteGame {
        joint: joint.clone(),
    }
}

/// Applies `relabel` to coordinate `j` of every atom. `relabel` must be
/// injective on the values coordinate `j` actually takes.
pub fn bijection_transform<F>(joint: &DiscreteJoint, j: usize, relabel: F) -> Result<DiscreteJoint>
where
    F: Fn(f64) -> f64,
{
    if j >= joint.d {
        return Err(Error::domain(format!("coordinate {j} out of range for d = {}", joint.d)));
    }
    let mut images: HashMap<u64, u64> = HashMap::new();
    let mut preimages: HashMap<u64, u64> = HashMap::new();
    for a in &joint.atoms {
        let from = a.x[j];
        let to = relabel(from);
        if !to.is_finite() {
            return Err(Error::domain(format!("relabel maps {from} to {to}")));
        }
        images.insert(key(from), key(to));
        if let Some(&other) = preimages.get(&key(to)) {
            if other != key(from) {
                return Err(Error::domain(format!(
                    "relabel is not injective: {} and {from} both map to {to}",
                    f64::from_bits(other)
                )));
            }
        }
        preimages.insert(key(to), key(from));
    }
    let atoms = joint
        .atoms
        .iter()
        .map(|a| {
            let mut x = a.x.clone();
            x[j] = relabel(x[j]);
            Atom { x, p: a.p, y: a.y }
        })
        .collect();
    DiscreteJoint::new(atoms)
}
