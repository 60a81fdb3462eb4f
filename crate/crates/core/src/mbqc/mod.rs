//! Pauli-measurement outcome distributions, the stabilizer-fidelity cap on
//! outcome probabilities, and the guess-and-check search that replaces a
//! low-magic measurement-based computation.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{gf2_rank, BitMatrix};
use crate::haar::sample_rng;
use crate::pauli::{pauli_commutes, PauliOperator};
use crate::state::{DenseState, C64};

/// Largest register measured densely.
pub const MAX_MBQC_QUBITS: usize = 12;

/// Slack on `max p(y) ≤ 2^{n−k−dmin}`.
pub const PBOUND_TOL: f64 = 1e-9;

/// Commuting, independent Hermitian qubit Paulis measured together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementLayout {
    pub n: usize,
    pub observables: Vec<PauliOperator>,
}

impl MeasurementLayout {
    pub fn new(observables: Vec<PauliOperator>) -> Result<Self> {
        let Some(first) = observables.first() else {
            return Err(Error::InvalidInput(
                "layout needs at least one observable".into(),
            ));
        };
        let n = first.n;
        for p in &observables {
            if p.d != 2 || p.n != n {
                return Err(Error::DimensionMismatch(format!(
                    "observable {p} is not a Pauli on {n} qubits"
                )));
            }
            let sq = p.mul(p)?;
            if !sq.is_identity_up_to_phase() || sq.phase != 0 {
                return Err(Error::InvalidInput(format!(
                    "observable {p} is not Hermitian"
                )));
            }
            if p.is_identity_up_to_phase() {
                return Err(Error::InvalidInput(format!("observable {p} is trivial")));
            }
        }
        for (i, p) in observables.iter().enumerate() {
            for q in &observables[i + 1..] {
                if !pauli_commutes(p, q)? {
                    return Err(Error::InvalidInput(format!("{p} and {q} do not commute")));
                }
            }
        }
        let rows: Vec<Vec<bool>> = observables
            .iter()
            .map(|p| p.symplectic_vector().iter().map(|&v| v == 1).collect())
            .collect();
        if gf2_rank(&BitMatrix::from_rows(&rows)) < observables.len() {
            return Err(Error::InvalidInput(
                "observables are not independent".into(),
            ));
        }
        Ok(MeasurementLayout { n, observables })
    }

    /// Parses qubit Pauli strings such as `+XXI`, `-ZIZ`.
    pub fn from_strings<S: AsRef<str>>(texts: &[S]) -> Result<Self> {
        let ops = texts
            .iter()
            .map(|t| PauliOperator::parse(t.as_ref(), 2))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    pub fn k(&self) -> usize {
        self.observables.len()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.observables.iter().map(|p| p.to_string()).collect()
    }

    /// Draws a random layout of `k` observables by rejection: each candidate
    /// must commute with and be independent of those already chosen.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= k <= n (k={k}, n={n})"
            )));
        }
        let mut chosen: Vec<PauliOperator> = Vec::with_capacity(k);
        while chosen.len() < k {
            let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let z: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let mut p = PauliOperator::hermitian_qubit(&x, &z);
            if rng.random() {
                p.phase = (p.phase + 2) % 4;
            }
            if p.is_identity_up_to_phase() {
                continue;
            }
            let mut commutes = true;
            for q in &chosen {
                commutes &= pauli_commutes(&p, q)?;
            }
            if !commutes {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(p);
            if let Ok(layout) = Self::new(trial) {
                chosen = layout.observables;
            }
        }
        Self::new(chosen)
    }
}

/// Joint outcome probabilities. Bit `i` of the outcome index is set when
/// observable `i` reads `−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub layout: MeasurementLayout,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn signs(&self, outcome: usize) -> Vec<i8> {
        (0..self.layout.k())
            .map(|i| if (outcome >> i) & 1 == 1 { -1 } else { 1 })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn max_p(&self) -> f64 {
        self.probabilities.iter().copied().fold(0.0, f64::max)
    }
}

/// `Π_y ψ` with `Π_y = ∏_i (1 + y_i P_i)/2`.
fn project(psi: &[C64], ops: &[&PauliOperator], signs: &[f64]) -> Vec<C64> {
    let mut v = psi.to_vec();
    let mut pv = vec![C64::new(0.0, 0.0); v.len()];
    for (p, &s) in ops.iter().zip(signs) {
        p.apply_into(&v, &mut pv);
        for (a, b) in v.iter_mut().zip(&pv) {
            *a = (*a + b * s) * 0.5;
        }
    }
    v
}

fn check_state(psi: &DenseState, layout: &MeasurementLayout) -> Result<()> {
    if psi.d != 2 || psi.n != layout.n {
        return Err(Error::DimensionMismatch(format!(
            "state on (n={}, d={}) measured with a {}-qubit layout",
            psi.n, psi.d, layout.n
        )));
    }
    if psi.n > MAX_MBQC_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "dense outcome distribution for n={} (max {MAX_MBQC_QUBITS})",
            psi.n
        )));
    }
    Ok(())
}

/// `p(y) = ‖Π_y ψ‖²` for every outcome string.
pub fn outcome_distribution(
    psi: &DenseState,
    layout: &MeasurementLayout,
) -> Result<OutcomeDistribution> {
    check_state(psi, layout)?;
    let k = layout.k();
    let ops: Vec<&PauliOperator> = layout.observables.iter().collect();
    let probabilities = (0..1usize << k)
        .into_par_iter()
        .map(|y| {
            let signs: Vec<f64> = (0..k)
                .map(|i| if (y >> i) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            project(&psi.amps, &ops, &signs)
                .iter()
                .map(|a| a.norm_sqr())
                .sum()
        })
        .collect();
    Ok(OutcomeDistribution {
        layout: layout.clone(),
        probabilities,
    })
}

/// Outcome distribution checked against `2^{n−k−dmin}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PboundReport {
    pub layout: Vec<String>,
    pub distribution: Vec<f64>,
    pub max_p: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn pbound(n: usize, k: usize, dmin: f64) -> f64 {
    2f64.powf(n as f64 - k as f64 - dmin)
}

pub fn pbound_check(
    psi: &DenseState,
    layout: &MeasurementLayout,
    dmin: f64,
) -> Result<PboundReport> {
    let dist = outcome_distribution(psi, layout)?;
    let max_p = dist.max_p();
    let bound = pbound(layout.n, layout.k(), dmin);
    Ok(PboundReport {
        layout: layout.to_strings(),
        max_p,
        bound,
        pass: max_p <= bound + PBOUND_TOL,
        distribution: dist.probabilities,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub success: bool,
    pub repetitions: u64,
}

/// Draws uniform `k`-bit strings until `verifier` accepts one or `budget`
/// draws are spent.
pub fn randomized_search<F, R>(
    verifier: F,
    k: usize,
    budget: u64,
    rng: &mut R,
) -> Result<SearchOutcome>
where
    F: Fn(u64) -> bool,
    R: Rng + ?Sized,
{
    if budget == 0 {
        return Err(Error::InvalidInput("search budget must be >= 1".into()));
    }
    if k == 0 || k > 63 {
        return Err(Error::InvalidInput(format!(
            "string length k={k} outside 1..=63"
        )));
    }
    let mask = (1u64 << k) - 1;
    for t in 1..=budget {
        if verifier(rng.random::<u64>() & mask) {
            return Ok(SearchOutcome {
                success: true,
                repetitions: t,
            });
        }
    }
    Ok(SearchOutcome {
        success: false,
        repetitions: budget,
    })
}

/// Independent searches, trial `i` on stream `i` of `seed`.
pub fn search_trials<F>(
    verifier: &F,
    k: usize,
    budget: u64,
    trials: u64,
    seed: u64,
) -> Result<Vec<SearchOutcome>>
where
    F: Fn(u64) -> bool + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| randomized_search(verifier, k, budget, &mut sample_rng(seed, i)))
        .collect()
}

/// `3·log₂3·2^{n−dmin−1}`, the reference repetition count.
pub fn reference_t_bound(n: usize, dmin: f64) -> f64 {
    3.0 * 3f64.log2() * 2f64.powf(n as f64 - dmin - 1.0)
}

/// Toy verifier accepting a fixed random set of `k`-bit strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedVerifier {
    pub k: usize,
    accepted: HashSet<u64>,
}

impl PlantedVerifier {
    pub fn new<R: Rng + ?Sized>(k: usize, size: usize, rng: &mut R) -> Result<Self> {
        if k == 0 || k > 24 {
            return Err(Error::InvalidInput(format!(
                "planted set needs 1 <= k <= 24 (k={k})"
            )));
        }
        if size > 1 << k {
            return Err(Error::InvalidInput(format!(
                "{size} strings do not fit in 2^{k}"
            )));
        }
        let accepted = sample(rng, 1 << k, size)
            .into_iter()
            .map(|v| v as u64)
            .collect();
        Ok(PlantedVerifier { k, accepted })
    }

    pub fn size(&self) -> usize {
        self.accepted.len()
    }

    pub fn accepts(&self, y: u64) -> bool {
        self.accepted.contains(&y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{hypergraph_state, Hypergraph};
    use crate::haar::haar_sample;
    use crate::measures::dmin;
    use crate::stabenum::enumerate_stabilizer_states;

    fn layout(texts: &[&str]) -> MeasurementLayout {
        MeasurementLayout::from_strings(texts).unwrap()
    }

    #[test]
    fn product_state_distributions() {
        let zero = DenseState::basis(3, 2, 0).unwrap();
        let d = outcome_distribution(&zero, &layout(&["XII", "IXI"])).unwrap();
        assert!(d.probabilities.iter().all(|p| (p - 0.25).abs() < 1e-12));
        let d = outcome_distribution(&zero, &layout(&["ZII"])).unwrap();
        assert!((d.probabilities[0] - 1.0).abs() < 1e-12);
        assert_eq!(d.signs(1), vec![-1]);
        let d = outcome_distribution(&zero, &layout(&["-ZII"])).unwrap();
        assert!((d.probabilities[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_is_stabilized() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut bell = DenseState::basis(2, 2, 0).unwrap();
        bell.amps[0] = C64::new(h, 0.0);
        bell.amps[3] = C64::new(h, 0.0);
        let d = outcome_distribution(&bell, &layout(&["XX", "ZZ"])).unwrap();
        assert!((d.probabilities[0] - 1.0).abs() < 1e-12);
        let d = outcome_distribution(&bell, &layout(&["YY"])).unwrap();
        assert!((d.probabilities[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_layouts_rejected() {
        assert!(MeasurementLayout::from_strings(&["XI", "ZI"]).is_err());
        assert!(MeasurementLayout::from_strings(&["ZZ", "ZI", "IZ"]).is_err());
        assert!(MeasurementLayout::from_strings(&["ZI", "-ZI"]).is_err());
        assert!(MeasurementLayout::from_strings(&["iXI"]).is_err());
        assert!(MeasurementLayout::from_strings(&["II"]).is_err());
        assert!(MeasurementLayout::from_strings(&["XI", "XII"]).is_err());
        assert!(MeasurementLayout::new(vec![]).is_err());
        let psi = DenseState::uniform(3, 2).unwrap();
        assert!(outcome_distribution(&psi, &layout(&["XX"])).is_err());
    }

    #[test]
    fn ccz_cap() {
        let psi = hypergraph_state(&Hypergraph::new(3, [vec![0, 1, 2]]).unwrap()).unwrap();
        let dm = (16.0f64 / 9.0).log2();
        for texts in [
            ["ZII", "IZI", "IIZ"],
            ["XII", "IXI", "IIX"],
            ["XXX", "ZZI", "IZZ"],
        ] {
            let r = pbound_check(&psi, &layout(&texts), dm).unwrap();
            assert!((r.bound - 9.0 / 16.0).abs() < 1e-12);
            assert!(r.pass, "{texts:?}: {} > {}", r.max_p, r.bound);
            assert!((r.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        // |+++⟩ is a closest stabilizer state, so the X layout meets the cap.
        let r = pbound_check(&psi, &layout(&["XII", "IXI", "IIX"]), dm).unwrap();
        assert!((r.max_p - 9.0 / 16.0).abs() < 1e-12);
    }

    /// Oracle: sequential projective measurement with renormalisation after
    /// each outcome, in reverse order.
    fn sequential(psi: &DenseState, l: &MeasurementLayout, y: usize) -> f64 {
        let mut v = psi.amps.clone();
        let mut p = 1.0;
        for i in (0..l.k()).rev() {
            let s = if (y >> i) & 1 == 1 { -1.0 } else { 1.0 };
            let pv = l.observables[i].apply(&v);
            let proj: Vec<C64> = v.iter().zip(&pv).map(|(a, b)| (a + b * s) * 0.5).collect();
            let q: f64 = proj.iter().map(|a| a.norm_sqr()).sum();
            p *= q;
            if q < 1e-300 {
                return 0.0;
            }
            v = proj.iter().map(|a| a / q.sqrt()).collect();
        }
        p
    }

    #[test]
    fn random_layouts_on_haar_states() {
        let dict = enumerate_stabilizer_states(3, 2).unwrap();
        let mut rng = sample_rng(21, 0);
        for _ in 0..5 {
            let psi = haar_sample(3, &mut rng).unwrap();
            let dm = dmin(&psi, &dict).unwrap().dmin;
            for _ in 0..20 {
                let k = rng.random_range(1..=3);
                let l = MeasurementLayout::random(3, k, &mut rng).unwrap();
                let r = pbound_check(&psi, &l, dm).unwrap();
                assert!(r.pass);
                assert!((r.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!(r.distribution.iter().all(|&p| p >= -1e-12));
                assert!(r.max_p * (1u64 << k) as f64 >= 1.0 - 1e-12);
                for (y, &p) in r.distribution.iter().enumerate() {
                    assert!((p - sequential(&psi, &l, y)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn search_statistics() {
        let mut rng = sample_rng(22, 0);
        let all = randomized_search(|_| true, 5, 10, &mut rng).unwrap();
        assert_eq!(
            all,
            SearchOutcome {
                success: true,
                repetitions: 1
            }
        );
        let none = randomized_search(|_| false, 5, 10, &mut rng).unwrap();
        assert_eq!(
            none,
            SearchOutcome {
                success: false,
                repetitions: 10
            }
        );
        assert!(randomized_search(|_| true, 5, 0, &mut rng).is_err());

        let k = 6;
        let planted = PlantedVerifier::new(k, 32, &mut rng).unwrap();
        let verify = |y: u64| planted.accepts(y);
        let mut reps: Vec<u64> = search_trials(&verify, k, 1000, 1000, 23)
            .unwrap()
            .iter()
            .map(|o| o.repetitions)
            .collect();
        reps.sort_unstable();
        assert!(reps[499] <= 2);

        // One draw each: success count is Binomial(N, |G|/2^k).
        let planted = PlantedVerifier::new(k, 20, &mut rng).unwrap();
        let verify = |y: u64| planted.accepts(y);
        let n = 4000u64;
        let hits = search_trials(&verify, k, 1, n, 24)
            .unwrap()
            .iter()
            .filter(|o| o.success)
            .count() as f64;
        let p = 20.0 / 64.0;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((hits - n as f64 * p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn reference_bound_value() {
        let t = reference_t_bound(3, (16.0f64 / 9.0).log2());
        assert!((t - 3.0 * 3f64.log2() * 4.0 * 9.0 / 16.0).abs() < 1e-12);
        assert!((t - 10.70).abs() < 0.01);
        assert!((pbound(3, 3, 0.0) - 1.0).abs() < 1e-15);
    }
}
