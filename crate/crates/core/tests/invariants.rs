//! Property tests that cross module boundaries, each against an oracle
//! computed directly from dense vectors and matrices.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

use magiclab::boolfn::{
    dmin_bound_from_chi, nonquadraticity, overlap_from_weight, phase_state, BooleanFunction,
};
use magiclab::haar::{haar_sample, sample_rng};
use magiclab::mbqc::{outcome_distribution, MeasurementLayout};
use magiclab::measures::{dmin, extent, free_robustness, reconstruction_error};
use magiclab::solvers::{solve_lp, LinearProgram, LpStatus};
use magiclab::stabenum::{enumerate_stabilizer_states, StabilizerDictionary};
use magiclab::state::{DenseState, C64};

fn qubit_dict(n: usize) -> &'static StabilizerDictionary {
    static DICTS: [OnceLock<StabilizerDictionary>; 4] = [const { OnceLock::new() }; 4];
    DICTS[n - 1].get_or_init(|| enumerate_stabilizer_states(n, 2).unwrap())
}

fn random_function(n: usize, seed: u64) -> BooleanFunction {
    let mut rng = sample_rng(seed, n as u64);
    let table: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
    BooleanFunction::from_fn(n, |x| table[x]).unwrap()
}

/// Applies a 2×2 gate to `site` of a qubit vector.
fn apply_gate(amps: &mut [C64], site: usize, g: [[C64; 2]; 2]) {
    let bit = 1 << site;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = g[0][0] * a + g[0][1] * b;
            amps[i | bit] = g[1][0] * a + g[1][1] * b;
        }
    }
}

fn hadamard() -> [[C64; 2]; 2] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn phase_gate() -> [[C64; 2]; 2] {
    [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn overlap_matches_weight_formula(n in 1usize..=8, seed in any::<u64>()) {
        let f = random_function(n, seed);
        let g = random_function(n, seed ^ 0x9e37_79b9);
        let direct = phase_state(&f).unwrap().inner(&phase_state(&g).unwrap()).unwrap();
        let formula = overlap_from_weight(&f, &g).unwrap();
        prop_assert!((direct.re - formula).abs() < 1e-12);
        prop_assert!(direct.im.abs() < 1e-12);
    }

    #[test]
    fn chi_bound_dominates_measured_dmin(n in 1usize..=4, seed in any::<u64>()) {
        let f = random_function(n, seed);
        let chi = nonquadraticity(&f).unwrap().chi;
        let measured = dmin(&phase_state(&f).unwrap(), qubit_dict(n)).unwrap().dmin;
        if chi < 1 << (n - 1) {
            let bound = dmin_bound_from_chi(&f).unwrap();
            prop_assert!(measured <= bound + 1e-9, "chi {} bound {} dmin {}", chi, bound, measured);
        }
        // Quadratic functions give stabilizer states.
        if chi == 0 {
            prop_assert!(measured.abs() < 1e-9);
        }
    }

    #[test]
    fn local_cliffords_preserve_dmin(n in 1usize..=3, seed in any::<u64>(), word in prop::collection::vec(0u8..2, 1..18)) {
        let psi = haar_sample(n, &mut sample_rng(seed, 0)).unwrap();
        let mut amps = psi.amps.clone();
        for (i, &g) in word.iter().enumerate() {
            apply_gate(&mut amps, i % n, if g == 0 { hadamard() } else { phase_gate() });
        }
        let moved = DenseState::new(n, 2, amps).unwrap();
        let a = dmin(&psi, qubit_dict(n)).unwrap().dmin;
        let b = dmin(&moved, qubit_dict(n)).unwrap().dmin;
        prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
    }

    #[test]
    fn outcome_distribution_matches_sequential_projection(n in 1usize..=3, k in 1usize..=3, seed in any::<u64>()) {
        let k = k.min(n);
        let psi = haar_sample(n, &mut sample_rng(seed, 1)).unwrap();
        let layout = MeasurementLayout::random(n, k, &mut sample_rng(seed, 2)).unwrap();
        let dist = outcome_distribution(&psi, &layout).unwrap();
        let start = DVector::from_vec(psi.amps.clone());
        let mats: Vec<DMatrix<C64>> = layout.observables.iter().map(|p| p.to_matrix()).collect();
        let total: f64 = dist.probabilities.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        for (y, &p) in dist.probabilities.iter().enumerate() {
            let signs = dist.signs(y);
            let project = |order: &mut dyn Iterator<Item = usize>| {
                let mut v = start.clone();
                for i in order {
                    let s = C64::new(signs[i] as f64, 0.0);
                    v = (&v + &mats[i] * &v * s) * C64::new(0.5, 0.0);
                }
                v.norm_squared()
            };
            let forward = project(&mut (0..k));
            let backward = project(&mut (0..k).rev());
            prop_assert!((forward - p).abs() < 1e-10 && (backward - p).abs() < 1e-10);
            prop_assert!(p >= -1e-12);
        }
        let top = dist.probabilities.iter().cloned().fold(0.0, f64::max);
        prop_assert!(top * (1usize << k) as f64 >= 1.0 - 1e-10);
    }

    #[test]
    fn extent_is_bracketed(n in 1usize..=2, seed in any::<u64>()) {
        let psi = haar_sample(n, &mut sample_rng(seed, 3)).unwrap();
        let ext = extent(&psi, qubit_dict(n)).unwrap();
        // The computational basis gives a feasible decomposition.
        let basis_l1: f64 = psi.amps.iter().map(|a| a.norm()).sum();
        let l1 = ext.xi.sqrt();
        prop_assert!(l1 <= basis_l1 + 1e-8);
        prop_assert!(ext.xi_lower <= ext.xi + 1e-9);
        prop_assert!(ext.xi >= 1.0 - 1e-9);
        // Largest overlap gives the dual bound ξ ≥ 1/F.
        let fidelity = dmin(&psi, qubit_dict(n)).unwrap().fidelity;
        prop_assert!(ext.xi >= 1.0 / fidelity - 1e-6);
    }

    #[test]
    fn pseudomixture_reconstructs_state(n in 1usize..=2, seed in any::<u64>()) {
        let rho = haar_sample(n, &mut sample_rng(seed, 4)).unwrap().density_matrix();
        let rob = free_robustness(&rho, qubit_dict(n)).unwrap();
        prop_assert!(reconstruction_error(&rho, qubit_dict(n), &rob.pseudomixture) < 1e-8);
        let l1: f64 = rob.pseudomixture.iter().map(|t| t.coeff.abs()).sum();
        prop_assert!((l1 - (1.0 + 2.0 * rob.r)).abs() < 1e-8);
        prop_assert!(rob.r >= -1e-12);
        prop_assert!(rob.lp.duality_gap < 1e-8);
    }

    #[test]
    fn lp_optimum_is_certified(m in 1usize..=4, extra in 1usize..=5, seed in any::<u64>()) {
        let k = m + extra;
        let mut rng = sample_rng(seed, 5);
        let a = DMatrix::from_fn(m, k, |_, _| rng.random_range(-1.0..1.0));
        let x0: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (a.clone() * DVector::from_vec(x0.clone())).iter().cloned().collect();
        let sol = solve_lp(&LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap()).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(sol.duality_gap() < 1e-8);
        let x = DVector::from_vec(sol.primal.clone());
        let residual = (&a * &x).iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        prop_assert!(residual < 1e-8);
        prop_assert!(sol.primal.iter().all(|&v| v >= -1e-9));
        let cx: f64 = c.iter().zip(&sol.primal).map(|(u, v)| u * v).sum();
        let cx0: f64 = c.iter().zip(&x0).map(|(u, v)| u * v).sum();
        prop_assert!((cx - sol.objective).abs() < 1e-8);
        prop_assert!(cx <= cx0 + 1e-9);
        // Reduced costs of the returned dual are nonnegative.
        let y = DVector::from_vec(sol.dual.clone());
        let reduced = DVector::from_vec(c) - a.transpose() * y;
        prop_assert!(reduced.iter().all(|&r| r >= -1e-8));
    }
}
