use std::fs;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use magiclab::boolfn::{
    dmin_bound_from_chi_value, hypergraph_state, nonquadraticity, welch_function, BooleanFunction,
    Hypergraph, MAX_CHI_VARS,
};
use magiclab::haar::{dmin_distribution, haar_sample_qudit, sample_rng, ExperimentConfig};
use magiclab::lattice::{build_lattice_state, lattice_bound, Lattice};
use magiclab::mbqc::{pbound_check, MeasurementLayout};
use magiclab::measures::{dmin, golden_state, magic_report};
use magiclab::stabenum::cache::{cache_path, cache_root, load_or_generate};
use magiclab::stabenum::count_stabilizer_states;
use magiclab::state::DenseState;
use magiclab::wigner::{mana_lr_check, wigner};

use crate::state_file::StateFile;
use crate::{Cli, Command, StateKind};

/// Largest lattice for which dense measures are computed.
const LATTICE_MEASURES_MAX: usize = 4;
/// Largest lattice whose dense state may be written out.
const LATTICE_DUMP_MAX: usize = 12;

pub fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Measures { .. } => "measures",
        Command::Chi { .. } => "chi",
        Command::Lattice { .. } => "lattice",
        Command::Wigner { .. } => "wigner",
        Command::Mbqc { .. } => "mbqc",
        Command::Haar { .. } => "haar",
        Command::Enum { .. } => "enum",
        Command::Welch { .. } => "welch",
        Command::State { .. } => "state",
    }
}

pub fn run(cli: &Cli) -> Result<Value> {
    match &cli.command {
        Command::Measures { state } => {
            let psi = StateFile::load(state)?.to_state()?;
            let dict = load_or_generate(&cache_root(), psi.n, psi.d)?;
            Ok(serde_json::to_value(magic_report(&psi, &dict)?)?)
        }
        Command::Chi { anf, n } => {
            let f = BooleanFunction::parse_anf(anf, *n)?;
            chi_report(&f)
        }
        Command::Lattice {
            kind,
            rows,
            cols,
            boundary,
            phase,
            measures,
            dump_state,
        } => {
            let lattice = Lattice::new((*kind).into(), *rows, *cols, (*boundary).into())?;
            let state = build_lattice_state(&lattice, (*phase).into())?;
            let report = lattice_bound(&state)?;
            let n = lattice.n;
            let dense_measures = if *measures {
                if n > LATTICE_MEASURES_MAX {
                    bail!("dense measures need n <= {LATTICE_MEASURES_MAX} (lattice has {n})");
                }
                let psi = state.state()?;
                let dict = load_or_generate(&cache_root(), n, 2)?;
                Some(serde_json::to_value(magic_report(&psi, &dict)?)?)
            } else {
                None
            };
            if let Some(path) = dump_state {
                if n > LATTICE_DUMP_MAX {
                    bail!("state dump needs n <= {LATTICE_DUMP_MAX} (lattice has {n})");
                }
                StateFile::from_state(&state.state()?).save(path)?;
            }
            let b = &report.bound;
            Ok(json!({
                "lattice": {
                    "kind": lattice.kind,
                    "rows": lattice.rows,
                    "cols": lattice.cols,
                    "boundary": lattice.boundary,
                    "phase": state.phase,
                    "n": n,
                    "sites": lattice.sites,
                },
                "hypergraph": state.hypergraph,
                "bound": {
                    "centers": report.decomposition.centers,
                    "s": b.s,
                    "h_histogram": b.h_histogram,
                    "chi_bound": b.chi_bound,
                    "magic_bound": b.magic_bound,
                    "magic_bound_per_qubit": report.magic_bound_per_qubit,
                    "separable_reference": report.separable_reference,
                },
                "measures": dense_measures,
                "state_file": dump_state,
            }))
        }
        Command::Wigner { state, csv } => {
            let psi = StateFile::load(state)?.to_state()?;
            if psi.d != 3 {
                bail!("wigner needs a qutrit state (got d={})", psi.d);
            }
            let rho = psi.density_matrix();
            let w = wigner(&rho)?;
            if let Some(path) = csv {
                fs::write(path, w.to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let dict = load_or_generate(&cache_root(), psi.n, 3)?;
            let check = mana_lr_check(&rho, &dict)?;
            Ok(json!({
                "n": psi.n,
                "total": w.total(),
                "check": check,
                "csv": csv,
            }))
        }
        Command::Mbqc { state, layout, k } => {
            let psi = StateFile::load(state)?.to_state()?;
            if psi.d != 2 {
                bail!("mbqc needs a qubit state (got d={})", psi.d);
            }
            let layout = match (layout, k) {
                (Some(text), _) => {
                    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
                    MeasurementLayout::from_strings(&parts)?
                }
                (None, Some(k)) => {
                    MeasurementLayout::random(psi.n, *k, &mut sample_rng(cli.seed, 0))?
                }
                (None, None) => bail!("mbqc needs --layout or --k"),
            };
            if layout.n != psi.n {
                bail!(
                    "layout acts on {} qubits but the state has {}",
                    layout.n,
                    psi.n
                );
            }
            let dict = load_or_generate(&cache_root(), psi.n, 2)?;
            let dm = dmin(&psi, &dict)?.dmin;
            let report = pbound_check(&psi, &layout, dm)?;
            let mut value = serde_json::to_value(&report)?;
            value["dmin"] = json!(dm);
            Ok(value)
        }
        Command::Haar {
            n,
            samples,
            dmax,
            lr,
            csv,
        } => {
            let mut cfg = ExperimentConfig::new(*n, *samples, cli.seed);
            cfg.with_dmax = *dmax;
            cfg.with_lr = *lr;
            cfg.validate()?;
            let dict = load_or_generate(&cache_root(), *n, 2)?;
            let exp = dmin_distribution(&cfg, &dict)?;
            if let Some(path) = csv {
                fs::write(path, exp.to_csv())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(json!({
                "config": exp.config,
                "summary": exp.summary,
                "csv": csv,
            }))
        }
        Command::Enum { n, d } => {
            let root = cache_root();
            let dict = load_or_generate(&root, *n, *d)?;
            Ok(json!({
                "n": n,
                "d": d,
                "count": dict.len(),
                "expected": count_stabilizer_states(*n, *d).to_string(),
                "path": cache_path(&root, *n, *d),
            }))
        }
        Command::Welch { n } => {
            let f = welch_function(*n)?;
            if *n <= MAX_CHI_VARS {
                chi_report(&f)
            } else {
                Ok(json!({ "n": n, "anf": f.anf_string() }))
            }
        }
        Command::State { kind, n, d, out } => {
            let psi = named_state(*kind, *n, *d, cli.seed)?;
            let file = StateFile::from_state(&psi);
            file.save(out)?;
            Ok(json!({ "kind": format!("{kind:?}").to_lowercase(), "n": n, "d": d, "path": out }))
        }
    }
}

fn chi_report(f: &BooleanFunction) -> Result<Value> {
    let n = f.n();
    let nq = nonquadraticity(f)?;
    let half = 1u64 << (n.max(1) - 1);
    // The bound is undefined once χ reaches 2^{n−1}.
    let bound = if nq.chi < half {
        Some(dmin_bound_from_chi_value(n, nq.chi)?)
    } else {
        None
    };
    Ok(json!({
        "n": n,
        "anf": f.anf_string(),
        "chi": nq.chi,
        "nearest_quadratic": nq.argmin.anf_string(),
        "dmin_bound": bound,
        "dmax_bound": bound,
    }))
}

fn named_state(kind: StateKind, n: usize, d: usize, seed: u64) -> Result<DenseState> {
    if d != 2 && matches!(kind, StateKind::Golden | StateKind::Ccz) {
        bail!("{kind:?} state is defined for qubits only");
    }
    Ok(match kind {
        StateKind::Golden => golden_state(n)?,
        StateKind::Haar => haar_sample_qudit(n, d, &mut sample_rng(seed, 0))?,
        StateKind::Plus => DenseState::uniform(n, d)?,
        StateKind::Ccz => {
            if n < 3 {
                bail!("CCZ state needs n >= 3");
            }
            hypergraph_state(&Hypergraph::new(n, [vec![0, 1, 2]])?)?
        }
    })
}
