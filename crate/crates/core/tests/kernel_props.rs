use approx::assert_relative_eq;
use idtlab::kernels::{check_scaling, cov_matrix, fbm_cov, lamperti_cov, psd_check, spectral_cov};
use idtlab::linalg::symmetric_eigenvalues;
use idtlab::{Kernel, SpectralMeasure, TimeGrid};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn grid_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..4000, 1..10).prop_map(|s| s.into_iter().map(|k| k as f64 / 400.0).collect())
}

fn measure_strategy() -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((0.0f64..3.0, 0.05f64..2.0), 1..=7).prop_map(|half| SpectralMeasure::symmetrized(&half).unwrap())
}

fn nalgebra_min_eig(k: &Kernel, grid: &TimeGrid) -> f64 {
    let pts = grid.points();
    let m = DMatrix::from_fn(pts.len(), pts.len(), |i, j| k.cov(pts[i], pts[j]).unwrap());
    m.symmetric_eigenvalues().min()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn half_hurst_is_brownian(s in 0.0f64..50.0, t in 0.0f64..50.0) {
        prop_assert_eq!(fbm_cov(0.5, s, t).unwrap(), s.min(t));
    }

    #[test]
    fn fbm_scales_with_twice_hurst(h in 0.02f64..0.98, a in 0.1f64..10.0, pts in grid_strategy()) {
        let k = Kernel::fbm(h).unwrap();
        let grid = TimeGrid::new(pts).unwrap();
        let rep = check_scaling(&k, 2.0 * h, a, &grid, 1e-10).unwrap();
        prop_assert!(rep.pass, "statistic {}", rep.statistic);
    }

    #[test]
    fn fbm_is_symmetric_with_unit_diagonal_at_one(h in 0.02f64..0.98, s in 0.0f64..20.0, t in 0.0f64..20.0) {
        prop_assert_eq!(fbm_cov(h, s, t).unwrap(), fbm_cov(h, t, s).unwrap());
        assert_relative_eq!(fbm_cov(h, 1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn spectral_scales(alpha in 0.1f64..2.5, mu in measure_strategy(), a in 0.1f64..10.0, pts in grid_strategy()) {
        let k = Kernel::spectral(alpha, mu).unwrap();
        let grid = TimeGrid::new(pts).unwrap();
        let rep = check_scaling(&k, alpha, a, &grid, 1e-10).unwrap();
        prop_assert!(rep.pass, "statistic {}", rep.statistic);
    }

    #[test]
    fn spectral_diagonal_is_mass_times_power(alpha in 0.1f64..2.5, mu in measure_strategy(), t in 0.01f64..20.0) {
        let c = spectral_cov(alpha, &mu, t, t).unwrap();
        assert_relative_eq!(c, mu.total_mass() * t.powf(alpha), max_relative = 1e-12);
    }

    #[test]
    fn kernels_are_psd_and_agree_with_nalgebra(h in 0.05f64..0.95, alpha in 0.1f64..2.0, mu in measure_strategy(), pts in grid_strategy()) {
        let grid = TimeGrid::new(pts).unwrap();
        for k in [Kernel::fbm(h).unwrap(), Kernel::spectral(alpha, mu.clone()).unwrap()] {
            let m = cov_matrix(&k, &grid).unwrap();
            let ours = psd_check(&m).unwrap();
            let oracle = nalgebra_min_eig(&k, &grid);
            let scale = m.max_abs().max(1.0);
            prop_assert!(ours >= -1e-8 * scale, "min eigenvalue {}", ours);
            prop_assert!((ours - oracle).abs() <= 1e-9 * scale, "ours {} nalgebra {}", ours, oracle);
        }
    }

    #[test]
    fn eigenvalues_match_nalgebra(entries in prop::collection::vec(-5.0f64..5.0, 21)) {
        // 6x6 symmetric matrix from its upper triangle.
        let n = 6;
        let mut idx = 0;
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i..n {
                rows[i][j] = entries[idx];
                rows[j][i] = entries[idx];
                idx += 1;
            }
        }
        let ours = symmetric_eigenvalues(&idtlab::SymMatrix::from_rows(&rows).unwrap()).unwrap();
        let mut oracle: Vec<f64> = DMatrix::from_fn(n, n, |i, j| rows[i][j]).symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(f64::total_cmp);
        let mut ours = ours;
        ours.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", ours, oracle);
        }
    }

    #[test]
    fn lamperti_is_shift_invariant(h in 0.05f64..0.95, y in -3.0f64..3.0, z in -3.0f64..3.0, shift in -3.0f64..3.0) {
        let k = Kernel::fbm(h).unwrap();
        let a = lamperti_cov(&k, 2.0 * h, y + shift, z + shift).unwrap();
        let b = lamperti_cov(&k, 2.0 * h, y, z).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn lamperti_fbm_closed_form(h in 0.05f64..0.95, d in -6.0f64..6.0) {
        let k = Kernel::fbm(h).unwrap();
        let closed = (h * d).cosh() - 0.5 * (2.0 * (d.abs() / 2.0).sinh()).powf(2.0 * h);
        let got = lamperti_cov(&k, 2.0 * h, d, 0.0).unwrap();
        prop_assert!((got - closed).abs() <= 1e-10, "{} vs {}", got, closed);
    }

    #[test]
    fn wrong_exponent_fails_scaling(h in 0.05f64..0.45, a in 1.5f64..4.0) {
        let k = Kernel::fbm(h).unwrap();
        let grid = TimeGrid::new(vec![0.5, 1.0, 2.0]).unwrap();
        let rep = check_scaling(&k, 2.0 * h + 0.5, a, &grid, 1e-3).unwrap();
        prop_assert!(!rep.pass);
    }
}

#[test]
fn single_precision_kernels_track_double() {
    let k32 = idtlab::Kernel32::fbm(0.3).unwrap();
    let g32 = idtlab::TimeGrid32::new(vec![0.25, 0.5, 1.0, 2.0]).unwrap();
    let rep = check_scaling(&k32, 0.6f32, 2.0f32, &g32, 1e-5).unwrap();
    assert!(rep.pass, "{}", rep.statistic);
    let c32 = k32.cov(1.0f32, 2.0f32).unwrap();
    assert_relative_eq!(c32 as f64, fbm_cov(0.3, 1.0, 2.0).unwrap(), max_relative = 1e-6);
}
