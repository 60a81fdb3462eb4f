use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sample::{haar_sample, sample_rng};
use super::stats::{dmin_tail_curve, dmin_union_bound};
use crate::error::{Error, Result};
use crate::measures::{dmin, extent, RobustnessProgram};
use crate::stabenum::{count_stabilizer_states, StabilizerDictionary};

/// Largest register with a full stabilizer dictionary in memory.
pub const MAX_EXPERIMENT_QUBITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Also solve for the stabilizer extent of each sample.
    pub with_dmax: bool,
    /// Also solve for the free robustness of each sample.
    pub with_lr: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            n,
            samples,
            seed,
            with_dmax: false,
            with_lr: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_EXPERIMENT_QUBITS {
            return Err(Error::InvalidInput(format!(
                "experiment n={} outside 1..={MAX_EXPERIMENT_QUBITS}",
                self.n
            )));
        }
        if self.samples == 0 {
            return Err(Error::InvalidInput(
                "experiment needs at least one sample".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: u64,
    pub dmin: f64,
    pub dmax: Option<f64>,
    pub lr: Option<f64>,
}

/// Empirical `Pr{dmin ≤ γ}` beside the two analytic tail bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub gamma: f64,
    pub empirical: f64,
    /// `exp(0.54·n² − 2^{n−γ})`.
    pub tail_curve: f64,
    /// `|STAB_n|·(1 − 2^{−γ})^{2^n−1}`.
    pub union_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DminSummary {
    pub count: u64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DminExperiment {
    pub config: ExperimentConfig,
    pub records: Vec<SampleRecord>,
    pub summary: DminSummary,
}

impl DminExperiment {
    pub fn dmin_values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.dmin).collect()
    }

    /// One row per sample: `sample,dmin,dmax,lr`; missing values are empty.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        let mut out = String::from("sample,dmin,dmax,lr\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{:.17e},{},{}\n",
                r.id,
                r.dmin,
                opt(r.dmax),
                opt(r.lr)
            ));
        }
        out
    }
}

/// Empirical distribution of `dmin` over Haar samples; sample `i` draws from
/// stream `i` of the seed, so results do not depend on thread count.
pub fn dmin_distribution(
    cfg: &ExperimentConfig,
    dict: &StabilizerDictionary,
) -> Result<DminExperiment> {
    cfg.validate()?;
    if dict.n != cfg.n || dict.d != 2 {
        return Err(Error::DimensionMismatch(format!(
            "experiment on {} qubits but dictionary for (n={}, d={})",
            cfg.n, dict.n, dict.d
        )));
    }
    let program = if cfg.with_lr {
        Some(RobustnessProgram::new(dict)?)
    } else {
        None
    };
    let records = (0..cfg.samples)
        .into_par_iter()
        .map(|id| {
            let psi = haar_sample(cfg.n, &mut sample_rng(cfg.seed, id))?;
            let dm = dmin(&psi, dict)?.dmin;
            let dmax = if cfg.with_dmax {
                Some(extent(&psi, dict)?.dmax)
            } else {
                None
            };
            let lr = match &program {
                Some(p) => Some(p.solve(&psi.density_matrix())?.lr),
                None => None,
            };
            Ok(SampleRecord {
                id,
                dmin: dm,
                dmax,
                lr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(cfg.n, &records);
    Ok(DminExperiment {
        config: cfg.clone(),
        records,
        summary,
    })
}

fn summarize(n: usize, records: &[SampleRecord]) -> DminSummary {
    let mut v: Vec<f64> = records.iter().map(|r| r.dmin).collect();
    v.sort_by(f64::total_cmp);
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let median = if v.len() % 2 == 1 {
        v[v.len() / 2]
    } else {
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    };
    let stab = count_stabilizer_states(n, 2) as f64;
    let top = v[v.len() - 1];
    let curve = (0..=40)
        .map(|i| {
            let gamma = top * i as f64 / 40.0;
            let below = v.partition_point(|&x| x <= gamma);
            CurvePoint {
                gamma,
                empirical: below as f64 / m,
                tail_curve: dmin_tail_curve(n, gamma),
                union_bound: dmin_union_bound(n, stab, gamma),
            }
        })
        .collect();
    DminSummary {
        count: v.len() as u64,
        mean,
        std_dev: var.sqrt(),
        min: v[0],
        max: top,
        median,
        curve,
    }
}
