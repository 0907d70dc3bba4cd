use proptest::prelude::*;
use shapfx_core::game::{check_axioms, shapley_exact, shapley_permutation, SumGame, TableGame};
use shapfx_core::IndexSet;

/// Random monotone game: `val(u) = Σ_{v⊆u} m(v)` with nonnegative dividends `m`.
fn monotone_table(d: usize, dividends: &[f64]) -> TableGame {
    let n = 1usize << d;
    let mut values = vec![0.0; n];
    for u in 1..n {
        values[u] = (1..n).filter(|v| v & !u == 0).map(|v| dividends[v]).sum();
    }
    TableGame::new(d, values).unwrap()
}

fn arbitrary_table(d: usize, raw: &[f64]) -> TableGame {
    let mut values = raw[..1 << d].to_vec();
    values[0] = 0.0;
    TableGame::new(d, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn efficiency_holds(d in 1usize..=8, raw in prop::collection::vec(-10.0f64..10.0, 256)) {
        let g = arbitrary_table(d, &raw);
        let r = shapley_exact(&g).unwrap();
        prop_assert!(r.efficiency_gap() <= 1e-9 * r.total.abs().max(1.0));
        prop_assert_eq!(r.calls, 1 << d);
    }

    #[test]
    fn monotone_games_are_nonnegative(d in 1usize..=8, div in prop::collection::vec(0.0f64..1.0, 256)) {
        let g = monotone_table(d, &div);
        let r = shapley_exact(&g).unwrap();
        prop_assert!(r.phi.iter().all(|&p| p >= -1e-12));
    }

    #[test]
    fn engines_agree(d in 1usize..=7, raw in prop::collection::vec(-5.0f64..5.0, 128)) {
        let g = arbitrary_table(d, &raw);
        let a = shapley_exact(&g).unwrap();
        let b = shapley_permutation(&g).unwrap();
        for j in 0..d {
            prop_assert!((a.phi[j] - b.phi[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn additivity(d in 1usize..=6, r1 in prop::collection::vec(-5.0f64..5.0, 64), r2 in prop::collection::vec(-5.0f64..5.0, 64)) {
        let (a, b) = (arbitrary_table(d, &r1), arbitrary_table(d, &r2));
        let pa = shapley_exact(&a).unwrap();
        let pb = shapley_exact(&b).unwrap();
        let ps = shapley_exact(&SumGame(a, b)).unwrap();
        for j in 0..d {
            prop_assert!((ps.phi[j] - pa.phi[j] - pb.phi[j]).abs() < 1e-10);
        }
    }
}

#[test]
fn additivity_on_fixed_three_player_tables() {
    let a = TableGame::new(3, vec![0.0, 1.0, 2.0, 4.0, 0.5, 1.5, 2.5, 6.0]).unwrap();
    let b = TableGame::new(3, vec![0.0, -1.0, 0.3, 0.0, 2.0, 1.0, 2.0, 3.0]).unwrap();
    let pa = shapley_exact(&a).unwrap();
    let pb = shapley_exact(&b).unwrap();
    let ps = shapley_exact(&SumGame(a, b)).unwrap();
    for j in 0..3 {
        assert!((ps.phi[j] - pa.phi[j] - pb.phi[j]).abs() < 1e-10);
    }
}

#[test]
fn seeded_monotone_game_engines_agree() {
    // Fixed dividends from a small LCG; d = 5.
    let mut state = 12345u64;
    let div: Vec<f64> = (0..32)
        .map(|_| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    let g = monotone_table(5, &div);
    let a = shapley_exact(&g).unwrap();
    let b = shapley_permutation(&g).unwrap();
    for j in 0..5 {
        assert!((a.phi[j] - b.phi[j]).abs() < 1e-10);
    }
    let report = check_axioms(&g, &a).unwrap();
    assert!(report.all_passed());
}

#[test]
fn dummy_detection_in_larger_game() {
    // Player 2 never changes the value.
    let d = 4;
    let values = (0..16u32)
        .map(|m| {
            let u = IndexSet::from_mask(d, m & !0b100).unwrap();
            (u.len() as f64).powi(2)
        })
        .collect();
    let g = TableGame::new(d, values).unwrap();
    let r = shapley_exact(&g).unwrap();
    let rep = check_axioms(&g, &r).unwrap();
    assert_eq!(rep.dummy.iter().map(|(j, _)| *j).collect::<Vec<_>>(), vec![2]);
    assert!(rep.all_passed());
    assert!(r.phi[2].abs() < 1e-12);
}
