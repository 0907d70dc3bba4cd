//! Deterministic invariant battery behind `shapfx selftest`.

use nalgebra::DMatrix;
use rand::Rng;
use shapfx_core::anova::{anova_decompose, shapley_from_components, sobol_lower, sobol_upper, GridAxis, ProductGrid};
use shapfx_core::closed_forms::{
    fgm_exponential_shapley, fgm_uniform_shapley, gaussian_linear_shapley, lognormal_bivariate_shapley,
    three_point_shapley, FgmProblem, GaussianLinearProblem, LognormalBivariateProblem, ThreePointProblem,
};
use shapfx_core::distributions::{discrete_value_function, stream_rng, GaussianModel, Margin, Response, StreamRng};
use shapfx_core::estimator::{estimate_shapley, McConfig, ValueForm};
use shapfx_core::game::{check_axioms, shapley_permutation};
use shapfx_core::maxexp::{maxexp_shapley, ExpectedMaxGame, ExponentialRates};
use shapfx_core::{shapley_exact, IndexSet, TableGame};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = shapfx_core::Result<(bool, String)>;

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn monotone_game(d: usize, rng: &mut StreamRng) -> shapfx_core::Result<TableGame> {
    let n = 1usize << d;
    let dividends: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let values = (0..n)
        .map(|u| if u == 0 { 0.0 } else { (1..n).filter(|v| v & !u == 0).map(|v| dividends[v]).sum() })
        .collect();
    TableGame::new(d, values)
}

fn axioms() -> Outcome {
    let mut rng = stream_rng(1, 0);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let g = monotone_game(1 + k % 8, &mut rng)?;
        let r = shapley_exact(&g)?;
        if !check_axioms(&g, &r)?.all_passed() || r.phi.iter().any(|&p| p < -1e-12) {
            return Ok((false, format!("game {k} violates an axiom")));
        }
        worst = worst.max(r.efficiency_gap());
    }
    Ok((true, format!("20 games, worst efficiency gap {worst:.1e}")))
}

fn engines() -> Outcome {
    let mut rng = stream_rng(2, 0);
    let g = monotone_game(6, &mut rng)?;
    let diff = max_abs_diff(&shapley_exact(&g)?.phi, &shapley_permutation(&g)?.phi);
    Ok((diff < 1e-10, format!("max |Δφ| = {diff:.1e}")))
}

fn gaussian() -> Outcome {
    let mut rng = stream_rng(3, 0);
    let a = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-1.0..1.0));
    let sigma = &a * a.transpose() + DMatrix::identity(5, 5) * 0.2;
    let beta = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
    let p = GaussianLinearProblem::new(vec![0.0; 5], sigma, 0.0, beta)?;
    let diff = max_abs_diff(&gaussian_linear_shapley(&p)?.phi, &shapley_exact(&p.game()?)?.phi);
    let rho: f64 = 0.6;
    let proj = GaussianLinearProblem::new(
        vec![0.0; 2],
        DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]),
        0.0,
        vec![1.0, 0.0],
    )?;
    let phi2 = gaussian_linear_shapley(&proj)?.phi[1];
    let gap = (phi2 - rho * rho / 2.0).abs();
    Ok((diff < 1e-10 && gap < 1e-12, format!("closed vs enumeration {diff:.1e}; projection {gap:.1e}")))
}

fn three_point() -> Outcome {
    let mut worst = 0.0f64;
    for (p, y) in [
        ([0.5, 0.3, 0.2], [0.0, 1.0, 2.0]),
        ([0.1, 0.6, 0.3], [1.0, -1.0, 4.0]),
        ([0.0, 0.4, 0.6], [2.0, 0.0, 5.0]),
    ] {
        let prob = ThreePointProblem::new(p, y)?;
        let oracle = shapley_exact(&discrete_value_function(&prob.to_joint()?))?;
        worst = worst.max(max_abs_diff(&three_point_shapley(&prob)?.phi(), &oracle.phi));
    }
    Ok((worst < 1e-12, format!("max |Δφ| = {worst:.1e}")))
}

fn maxexp() -> Outcome {
    let rates = ExponentialRates::new(vec![0.5, 1.0, 1.5, 2.0, 3.0, 7.0, 0.2, 1.1])?;
    let diff = max_abs_diff(&maxexp_shapley(&rates)?.phi, &shapley_exact(&ExpectedMaxGame::new(rates))?.phi);
    let (l1, l2, l3) = (1.0, 2.0, 3.0);
    let formula = 1.0 / l1 - 0.5 / (l1 + l2) - 0.5 / (l1 + l3) + 1.0 / (3.0 * (l1 + l2 + l3));
    let phi1 = maxexp_shapley(&ExponentialRates::new(vec![l1, l2, l3])?)?.phi[0];
    let gap = (phi1 - formula).abs();
    Ok((diff < 1e-10 && gap < 1e-14, format!("enumeration {diff:.1e}; d = 3 formula {gap:.1e}")))
}

fn bracketing() -> Outcome {
    let mut rng = stream_rng(4, 0);
    let axes = (0..4)
        .map(|_| GridAxis::uniform(vec![0.0, 1.0, 2.0]))
        .collect::<shapfx_core::Result<Vec<_>>>()?;
    let grid = ProductGrid::new(axes)?;
    let table: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let dec = anova_decompose(&table, &grid)?;
    let phi = shapley_from_components(&dec).phi;
    let ok = (0..4).all(|j| {
        let u = IndexSet::from_mask(4, 1 << j).expect("valid singleton");
        sobol_lower(&dec, u) <= phi[j] + 1e-9 && phi[j] <= sobol_upper(&dec, u) + 1e-9
    });
    Ok((ok, format!("φ = {phi:.4?}")))
}

fn fgm_independence() -> Outcome {
    let beta = [2.0, 1.0];
    let u = fgm_uniform_shapley(&FgmProblem::new(0.0, beta, Margin::Uniform)?)?;
    let e = fgm_exponential_shapley(&FgmProblem::new(0.0, beta, Margin::Exponential)?)?;
    let share = beta[0] * beta[0] / (beta[0] * beta[0] + beta[1] * beta[1]);
    let gap = (u.share1() - share).abs().max((e.share1() - share).abs());
    Ok((gap < 1e-15, format!("θ = 0 share gap {gap:.1e}")))
}

fn lognormal() -> Outcome {
    let mut worst = 0.0f64;
    for rho in [-0.9, -0.3, 0.0, 0.4, 0.8] {
        let a = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([2.0, 1.0], rho)?)?;
        let b = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([2.0, -1.0], -rho)?)?;
        worst = worst.max((a.share1() - b.share1()).abs());
    }
    let end = lognormal_bivariate_shapley(&LognormalBivariateProblem::new([4.0, 1.0], 1.0)?)?.share1();
    let ok = worst < 1e-12 && (end - 0.5).abs() < 1e-12;
    Ok((ok, format!("(β₂, ρ) → (−β₂, −ρ) gap {worst:.1e}; ρ = 1 share {end}")))
}

fn monte_carlo() -> Outcome {
    let m = GaussianModel::bivariate(0.5, Response::linear(vec![1.0, 0.0]))?;
    let r = estimate_shapley(&m, &McConfig::new(100, 100, 5, ValueForm::Vce)?)?;
    let z = (r.phi_hat[1] - 0.125) / r.se[1];
    Ok((z.abs() < 4.0, format!("φ̂₂ = {:.4} (se {:.4})", r.phi_hat[1], r.se[1])))
}

/// Runs every check; an engine error counts as a failure.
pub fn run_selftest() -> Vec<SelfCheck> {
    let battery: [(&'static str, fn() -> Outcome); 9] = [
        ("axioms on random monotone games", axioms),
        ("permutation and subset engines agree", engines),
        ("gaussian closed form", gaussian),
        ("three-point closed form", three_point),
        ("max-exponential closed form", maxexp),
        ("independent-input bracketing", bracketing),
        ("fgm independence limit", fgm_independence),
        ("lognormal symmetry and endpoint", lognormal),
        ("monte carlo projection", monte_carlo),
    ];
    battery
        .iter()
        .map(|&(name, f)| match f() {
            Ok((passed, detail)) => SelfCheck { name, passed, detail },
            Err(e) => SelfCheck {
                name,
                passed: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
