//! Functional ANOVA for independent inputs on finite product grids.
//!
//! With independent inputs the integrals defining the effects reduce to
//! weighted sums over the grid, so every quantity here is exact up to
//! floating-point rounding.

use crate::error::{Error, Result};
use crate::game::{ShapleyResult, TableGame};
use crate::index_set::{full_mask, IndexSet};

/// Largest dimension accepted by [`anova_decompose`].
pub const ANOVA_MAX_DIM: usize = 12;

/// One independent input: its levels and their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridAxis {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(Error::dimension(format!(
                "axis with {} values and {} weights",
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::domain("axis weights must be positive and finite"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("axis weights sum to {total}, not 1")));
        }
        Ok(Self { values, weights })
    }

    /// Equally weighted levels.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        Self::new(values, vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Product of independent axes. Grid points are laid out row-major: the last
/// axis varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductGrid {
    axes: Vec<GridAxis>,
    strides: Vec<usize>,
    size: usize,
}

impl ProductGrid {
    pub fn new(axes: Vec<GridAxis>) -> Result<Self> {
        let d = axes.len();
        if d == 0 || d > ANOVA_MAX_DIM {
            return Err(Error::capacity(
                "ANOVA grid",
                d,
                ANOVA_MAX_DIM,
                "dense tables over every subset",
            ));
        }
        let mut strides = vec![1usize; d];
        for k in (0..d - 1).rev() {
            strides[k] = strides[k + 1] * axes[k + 1].len();
        }
        let size = strides[0] * axes[0].len();
        Ok(Self { axes, strides, size })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[GridAxis] {
        &self.axes
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Level index of `axis` at flat position `flat`.
    #[inline]
    pub fn level(&self, flat: usize, axis: usize) -> usize {
        (flat / self.strides[axis]) % self.axes[axis].len()
    }

    /// Coordinates of the grid point at `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.axes[k].values[self.level(flat, k)])
            .collect()
    }

    /// Probability of the grid point at `flat`.
    pub fn probability(&self, flat: usize) -> f64 {
        (0..self.dim())
            .map(|k| self.axes[k].weights[self.level(flat, k)])
            .product()
    }

    /// Tabulates `f` over the grid.
    pub fn tabulate(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.size).map(|i| f(&self.point(i))).collect()
    }

    /// `E(g | x_u)` broadcast back over the whole grid.
    fn conditional_mean(&self, table: &[f64], u: IndexSet) -> Vec<f64> {
        let d = self.dim();
        // Flat index of the u-coordinates alone, in the same row-major layout.
        let key = |flat: usize| -> usize {
            let mut k = 0;
            for a in 0..d {
                if u.contains(a) {
                    k = k * self.axes[a].len() + self.level(flat, a);
                }
            }
            k
        };
        let m_u: usize = u.iter().map(|a| self.axes[a].len()).product();
        let mut sums = vec![0.0; m_u];
        let mut mass = vec![0.0; m_u];
        for (i, &g) in table.iter().enumerate() {
            let p = self.probability(i);
            let k = key(i);
            sums[k] += p * g;
            mass[k] += p;
        }
        (0..self.size).map(|i| {
            let k = key(i);
            sums[k] / mass[k]
        })
        .collect()
    }
}

/// Effects `f_u` and variance components `σ²_u` for every `u ⊆ 1:d`, indexed by mask.
#[derive(Debug, Clone)]
pub struct AnovaDecomposition {
    grid: ProductGrid,
    effects: Vec<Vec<f64>>,
    components: Vec<f64>,
    variance: f64,
}

impl AnovaDecomposition {
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &ProductGrid {
        &self.grid
    }

    /// `f_u` tabulated over the grid.
    pub fn effect(&self, u: IndexSet) -> &[f64] {
        &self.effects[u.mask() as usize]
    }

    /// `f_∅`, the mean.
    pub fn mean(&self) -> f64 {
        self.effects[0][0]
    }

    /// `σ²_u`.
    pub fn component(&self, u: IndexSet) -> f64 {
        self.components[u.mask() as usize]
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Total variance `σ²`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    fn full(&self) -> IndexSet {
        IndexSet::from_mask_unchecked(self.dim(), full_mask(self.dim()))
    }

    /// The game `u ↦ τ̲²_u`.
    pub fn lower_index_game(&self) -> TableGame {
        let values = self
            .full()
            .subsets()
            .map(|u| sobol_lower(self, u))
            .collect();
        TableGame::new(self.dim(), values).expect("closed index of ∅ is zero")
    }
}

/// Decomposes `table` (values of `f` over `grid`, row-major) into ANOVA effects.
pub fn anova_decompose(table: &[f64], grid: &ProductGrid) -> Result<AnovaDecomposition> {
    if table.len() != grid.len() {
        return Err(Error::dimension(format!(
            "table has {} entries, grid has {} points",
            table.len(),
            grid.len()
        )));
    }
    let d = grid.dim();
    let n_sets = 1usize << d;
    let mut effects: Vec<Vec<f64>> = Vec::with_capacity(n_sets);
    // Masks of proper subsets are numerically smaller, so effects of every
    // v ⊊ u are available when u is reached.
    for mask in 0..n_sets as u32 {
        let u = IndexSet::from_mask_unchecked(d, mask);
        let mut residual = table.to_vec();
        for v in u.subsets().filter(|v| *v != u) {
            for (r, e) in residual.iter_mut().zip(&effects[v.mask() as usize]) {
                *r -= e;
            }
        }
        effects.push(grid.conditional_mean(&residual, u));
    }
    let probs: Vec<f64> = (0..grid.len()).map(|i| grid.probability(i)).collect();
    let mut components: Vec<f64> = effects
        .iter()
        .map(|e| e.iter().zip(&probs).map(|(x, p)| p * x * x).sum())
        .collect();
    components[0] = 0.0;
    let mean = effects[0][0];
    let variance = table
        .iter()
        .zip(&probs)
        .map(|(y, p)| p * (y - mean) * (y - mean))
        .sum();
    Ok(AnovaDecomposition {
        grid: grid.clone(),
        effects,
        components,
        variance,
    })
}

/// Closed Sobol' index `τ̲²_u = Σ_{v⊆u} σ²_v`.
pub fn sobol_lower(dec: &AnovaDecomposition, u: IndexSet) -> f64 {
    u.subsets().map(|v| dec.component(v)).sum()
}

/// Total Sobol' index `τ̄²_u = Σ_{v∩u≠∅} σ²_v`.
pub fn sobol_upper(dec: &AnovaDecomposition, u: IndexSet) -> f64 {
    dec.full()
        .subsets()
        .filter(|v| v.intersects(u))
        .map(|v| dec.component(v))
        .sum()
}

/// Shapley values for the game `val(u) = τ̲²_u`, read off the variance
/// components: each `σ²_u` is split equally among the members of `u`.
pub fn shapley_from_components(dec: &AnovaDecomposition) -> ShapleyResult {
    let d = dec.dim();
    let mut phi = vec![0.0; d];
    for u in dec.full().subsets().filter(|u| !u.is_empty()) {
        let share = dec.component(u) / u.len() as f64;
        for j in u.iter() {
            phi[j] += share;
        }
    }
    ShapleyResult {
        phi,
        total: sobol_lower(dec, dec.full()),
        calls: 0,
    }
}
