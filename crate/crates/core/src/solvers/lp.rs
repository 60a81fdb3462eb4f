//! Dense two-phase primal simplex with dual extraction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LP_TOL: f64 = 1e-9;
/// Smallest pivot element accepted by the ratio test.
const PIVOT_TOL: f64 = 1e-8;
/// Primal infeasibility tolerated inside the ratio test.
const FEAS_TOL: f64 = 1e-11;

/// Sign restriction on a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarBound {
    NonNegative,
    Free,
}

/// `min cᵀx  s.t.  A x = b`, with per-variable sign restrictions.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub bounds: Vec<VarBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per original constraint row (0 for rows dropped as
    /// redundant).
    pub dual: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_infeasibility: f64,
    /// Optimal basis as standard-form column indices (variable indices when
    /// no variable is free); empty unless optimal.
    pub basis: Vec<usize>,
}

impl LpSolution {
    fn non_optimal(status: LpStatus, nvars: usize, nrows: usize, iterations: usize) -> Self {
        LpSolution {
            status,
            primal: vec![0.0; nvars],
            dual: vec![0.0; nrows],
            objective: f64::NAN,
            dual_objective: f64::NAN,
            iterations,
            primal_residual: f64::NAN,
            dual_infeasibility: f64::NAN,
            basis: Vec::new(),
        }
    }

    pub fn duality_gap(&self) -> f64 {
        (self.objective - self.dual_objective).abs()
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, a: DMatrix<f64>, b: Vec<f64>) -> Result<Self> {
        let bounds = vec![VarBound::NonNegative; objective.len()];
        Self::with_bounds(objective, a, b, bounds)
    }

    pub fn with_bounds(
        objective: Vec<f64>,
        a: DMatrix<f64>,
        b: Vec<f64>,
        bounds: Vec<VarBound>,
    ) -> Result<Self> {
        if a.ncols() != objective.len() || a.nrows() != b.len() || bounds.len() != objective.len() {
            return Err(Error::DimensionMismatch(format!(
                "LP with {} costs, {}x{} matrix, {} rhs, {} bounds",
                objective.len(),
                a.nrows(),
                a.ncols(),
                b.len(),
                bounds.len()
            )));
        }
        Ok(LinearProgram {
            objective,
            a,
            b,
            bounds,
        })
    }
}

/// Indices of a maximal linearly independent subset of the rows of `[A | b]`
/// restricted to `A`; returns `Err(())` if a dependent row has an
/// inconsistent right-hand side.
fn independent_rows(a: &DMatrix<f64>, b: &[f64]) -> std::result::Result<Vec<usize>, ()> {
    let (m, n) = (a.nrows(), a.ncols());
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1.0);
    let tol = 1e-9 * scale;
    // Gram–Schmidt over rows, keeping an orthonormal basis of accepted rows.
    let mut basis: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut keep = Vec::new();
    for (i, &bi) in b.iter().enumerate().take(m) {
        let mut v: DVector<f64> = a.row(i).transpose().into_owned();
        let mut rhs = bi;
        for _ in 0..2 {
            for (q, qb) in &basis {
                let c = q.dot(&v);
                v -= q * c;
                rhs -= c * qb;
            }
        }
        let nrm = v.norm();
        if nrm > tol * (n as f64).sqrt() {
            keep.push(i);
            basis.push((v / nrm, rhs / nrm));
        } else if rhs.abs() > 1e-7 * scale.max(bi.abs()) {
            return Err(());
        }
    }
    Ok(keep)
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let prow: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                let row = &mut self.t[i * w..(i + 1) * w];
                for (x, &pv) in row.iter_mut().zip(&prow) {
                    *x -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Writes `c` into the objective row and prices out the basis.
    fn set_objective(&mut self, c: &[f64]) {
        let (m, w) = (self.m, self.width);
        self.t[m * w..(m + 1) * w].fill(0.0);
        self.t[m * w..m * w + c.len()].copy_from_slice(c);
        for r in 0..m {
            let cb = c[self.basis[r]];
            if cb != 0.0 {
                for j in 0..w {
                    let v = self.at(r, j);
                    self.t[m * w + j] -= cb * v;
                }
            }
        }
    }

    /// Runs simplex on the objective stored in row `m` over columns
    /// `0..ncols`, stopping early once the objective drops to `stop_at`.
    /// Returns `Ok(true)` at optimality, `Ok(false)` if unbounded.
    fn run(
        &mut self,
        ncols: usize,
        stop_at: f64,
        iterations: &mut usize,
        max_iter: usize,
    ) -> Result<bool> {
        let rhs = self.width - 1;
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        loop {
            if *iterations >= max_iter {
                return Err(Error::Solver(format!(
                    "simplex exceeded {max_iter} iterations"
                )));
            }
            // The objective row stores minus the current objective value.
            let obj = -self.at(self.m, rhs);
            if obj <= stop_at {
                return Ok(true);
            }
            if obj >= last_obj - 1e-12 * obj.abs().max(1.0) {
                stall += 1;
            } else {
                stall = 0;
            }
            last_obj = last_obj.min(obj);
            let bland = stall > BLAND_AFTER;
            // Entering column: most negative reduced cost, or the first
            // negative one under Bland's rule once the objective stalls.
            let mut enter = None;
            let mut best = -LP_TOL;
            for j in 0..ncols {
                let rc = self.at(self.m, j);
                if rc < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = rc;
                }
            }
            let Some(c) = enter else {
                return Ok(true);
            };
            // Two-pass ratio test: find the smallest ratio with the rhs
            // relaxed by a feasibility tolerance, then among rows within that
            // bound take the largest pivot. Bland's rule instead needs the
            // exact minimum ratio and the smallest basic index.
            let slack = if bland { 0.0 } else { FEAS_TOL };
            let mut bound = f64::INFINITY;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    bound = bound.min((self.at(i, rhs).max(0.0) + slack) / a);
                }
            }
            if bound == f64::INFINITY {
                return Ok(false);
            }
            if bland {
                bound += 1e-12 * bound.abs().max(1.0);
            }
            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_TOL && self.at(i, rhs).max(0.0) / a <= bound {
                    let better = match leave {
                        None => true,
                        Some(l) if bland => self.basis[i] < self.basis[l],
                        Some(l) => a > self.at(l, c),
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let r = leave.expect("a row attains the ratio bound");
            self.pivot(r, c);
            *iterations += 1;
        }
    }
}

/// Stalled iterations before switching from Dantzig to Bland pricing.
const BLAND_AFTER: usize = 1000;
/// Relative size of the right-hand-side perturbation.
const PERTURBATION: f64 = 1e-9;

/// Deterministic, distinct offsets in `[1, 2)·PERTURBATION·scale`.
fn perturbation(k: usize, scale: f64) -> f64 {
    PERTURBATION * scale * (1.0 + ((k + 1) as f64 * 0.618_033_988_749_895).fract())
}

enum Outcome {
    Optimal(Vec<usize>),
    Infeasible,
    Unbounded,
}

/// Two-phase simplex on `A x = b, x ≥ 0` with `b ≥ 0` and independent rows.
fn two_phase(
    a: &DMatrix<f64>,
    b: &[f64],
    c: &[f64],
    scale: f64,
    perturb: bool,
    iterations: &mut usize,
) -> Result<Outcome> {
    let (m, n) = (a.nrows(), a.ncols());
    // Columns: n structural, m artificial, then rhs.
    let width = n + m + 1;
    let mut tab = Tableau {
        m,
        width,
        t: vec![0.0; (m + 1) * width],
        basis: (n..n + m).collect(),
    };
    for k in 0..m {
        for j in 0..n {
            tab.t[k * width + j] = a[(k, j)];
        }
        tab.t[k * width + n + k] = 1.0;
        let offset = if perturb { perturbation(k, scale) } else { 0.0 };
        tab.t[k * width + width - 1] = b[k] + offset;
    }
    // Phase 1 objective: minimize the sum of artificials, priced out.
    for j in 0..n {
        let s: f64 = (0..m).map(|k| tab.at(k, j)).sum();
        tab.t[m * width + j] = -s;
    }
    let s: f64 = (0..m).map(|k| tab.at(k, width - 1)).sum();
    tab.t[m * width + width - 1] = -s;

    let max_iter = *iterations + 50 * (n + m) + 10_000;
    // Any basis with (numerically) zero artificials is feasible.
    tab.run(n + m, 1e-12 * scale, iterations, max_iter)?;
    let residual = -tab.at(m, width - 1);
    // A perturbed program must be feasible outright; the exact one may
    // leave rounding-level artificials behind.
    let limit = if perturb { 1e-12 * scale } else { 1e-7 * scale };
    if residual > limit {
        return Ok(Outcome::Infeasible);
    }
    // Drive remaining artificials out of the basis.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| tab.at(r, j).abs() > 1e-9) {
                tab.pivot(r, j);
            }
        }
    }
    if tab.basis.iter().any(|&v| v >= n) {
        return Err(Error::Solver(
            "artificial variable stuck in basis after presolve".into(),
        ));
    }

    let mut cost = c.to_vec();
    cost.resize(n + m, 0.0);
    tab.set_objective(&cost);
    // Artificial columns may not re-enter: only scan structural columns.
    if !tab.run(n, f64::NEG_INFINITY, iterations, max_iter)? {
        return Ok(Outcome::Unbounded);
    }
    Ok(Outcome::Optimal(tab.basis))
}

/// Standard form `A x = b, x ≥ 0` of a program, with free variables split.
struct StandardForm {
    col_map: Vec<(usize, f64)>,
    a: DMatrix<f64>,
    c: Vec<f64>,
}

impl StandardForm {
    fn new(p: &LinearProgram) -> Self {
        let mut col_map: Vec<(usize, f64)> = Vec::new();
        for (j, bound) in p.bounds.iter().enumerate() {
            col_map.push((j, 1.0));
            if *bound == VarBound::Free {
                col_map.push((j, -1.0));
            }
        }
        let a = DMatrix::from_fn(p.b.len(), col_map.len(), |i, k| {
            let (j, s) = col_map[k];
            s * p.a[(i, j)]
        });
        let c = col_map.iter().map(|&(j, s)| s * p.objective[j]).collect();
        StandardForm { col_map, a, c }
    }
}

/// Solves the program; infeasible and unbounded programs are reported via
/// [`LpStatus`], never by panicking.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    let (n_orig, m_orig) = (p.objective.len(), p.b.len());
    let std = StandardForm::new(p);
    let n = std.col_map.len();

    let rows = match independent_rows(&std.a, &p.b) {
        Ok(r) => r,
        Err(()) => {
            return Ok(LpSolution::non_optimal(
                LpStatus::Infeasible,
                n_orig,
                m_orig,
                0,
            ))
        }
    };
    let m = rows.len();
    let sign: Vec<f64> = rows
        .iter()
        .map(|&i| if p.b[i] < 0.0 { -1.0 } else { 1.0 })
        .collect();

    let a_rows = DMatrix::from_fn(m, n, |k, j| sign[k] * std.a[(rows[k], j)]);
    let b_rows: Vec<f64> = rows.iter().zip(&sign).map(|(&i, s)| s * p.b[i]).collect();
    let scale = p.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut iterations = 0;
    // Perturbing b removes the primal degeneracy that stalls the simplex on
    // stabilizer-like inputs. A basis optimal for a small enough
    // perturbation is optimal for b itself; if the perturbed program turns
    // out infeasible, fall back to the exact one.
    let mut outcome = two_phase(&a_rows, &b_rows, &std.c, scale, true, &mut iterations)?;
    if matches!(outcome, Outcome::Infeasible) {
        outcome = two_phase(&a_rows, &b_rows, &std.c, scale, false, &mut iterations)?;
    }
    match outcome {
        Outcome::Optimal(basis) => finish(p, &std, &rows, &basis, iterations),
        Outcome::Infeasible => Ok(LpSolution::non_optimal(
            LpStatus::Infeasible,
            n_orig,
            m_orig,
            iterations,
        )),
        Outcome::Unbounded => Ok(LpSolution::non_optimal(
            LpStatus::Unbounded,
            n_orig,
            m_orig,
            iterations,
        )),
    }
}

/// Phase-2 simplex started from a caller-supplied basis: `basis` lists one
/// column per row, the rows must be independent, every variable must be
/// nonnegative and `B⁻¹b ≥ 0`. Skips phase 1, so repeated solves of a
/// growing program can restart from the previous optimal basis.
pub fn solve_lp_from_basis(p: &LinearProgram, basis: &[usize]) -> Result<LpSolution> {
    let (n, m) = (p.objective.len(), p.b.len());
    if p.bounds.contains(&VarBound::Free) {
        return Err(Error::Unsupported("warm start with free variables".into()));
    }
    if basis.len() != m || basis.iter().any(|&j| j >= n) {
        return Err(Error::InvalidInput(format!(
            "warm-start basis needs {m} column indices below {n}"
        )));
    }
    let bmat = p.a.select_columns(basis);
    let lu = bmat.lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("warm-start basis is singular".into()))?;
    let scale = p.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let xb = &inv * DVector::from_column_slice(&p.b);
    if xb.iter().any(|&v| v < -1e-9 * scale) {
        return Err(Error::InvalidInput(
            "warm-start basis is not primal feasible".into(),
        ));
    }
    let body = &inv * &p.a;
    let width = n + 1;
    let mut tab = Tableau {
        m,
        width,
        t: vec![0.0; (m + 1) * width],
        basis: basis.to_vec(),
    };
    for r in 0..m {
        for j in 0..n {
            tab.t[r * width + j] = body[(r, j)];
        }
        // Perturb in basis coordinates so the start stays feasible.
        tab.t[r * width + n] = xb[r].max(0.0) + perturbation(r, scale);
    }
    tab.set_objective(&p.objective);
    let mut iterations = 0;
    let max_iter = 50 * (n + m) + 10_000;
    if !tab.run(n, f64::NEG_INFINITY, &mut iterations, max_iter)? {
        return Ok(LpSolution::non_optimal(
            LpStatus::Unbounded,
            n,
            m,
            iterations,
        ));
    }
    let std = StandardForm::new(p);
    finish(p, &std, &(0..m).collect::<Vec<_>>(), &tab.basis, iterations)
}

/// Recomputes primal and dual from the optimal basis with the exact `b`.
fn finish(
    p: &LinearProgram,
    std: &StandardForm,
    rows: &[usize],
    basis: &[usize],
    iterations: usize,
) -> Result<LpSolution> {
    let (n_orig, m_orig) = (p.objective.len(), p.b.len());
    let m = rows.len();
    let scale = p.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let bmat = DMatrix::from_fn(m, m, |k, r| std.a[(rows[k], basis[r])]);
    let rhs = DVector::from_iterator(m, rows.iter().map(|&i| p.b[i]));
    let lu = bmat.clone().lu();
    let xb = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Solver("singular optimal basis".into()))?;
    let cb = DVector::from_iterator(m, basis.iter().map(|&j| std.c[j]));
    let y_rows = bmat
        .transpose()
        .lu()
        .solve(&cb)
        .ok_or_else(|| Error::Solver("singular optimal basis".into()))?;

    let mut x_std = vec![0.0; std.col_map.len()];
    for (r, &j) in basis.iter().enumerate() {
        x_std[j] = xb[r].max(0.0);
    }
    let mut primal = vec![0.0; n_orig];
    for (k, &(j, s)) in std.col_map.iter().enumerate() {
        primal[j] += s * x_std[k];
    }
    let mut dual = vec![0.0; m_orig];
    for (k, &i) in rows.iter().enumerate() {
        dual[i] = y_rows[k];
    }

    let objective: f64 = p.objective.iter().zip(&primal).map(|(c, x)| c * x).sum();
    let dual_objective: f64 = p.b.iter().zip(&dual).map(|(b, y)| b * y).sum();
    let ax = &p.a * DVector::from_column_slice(&primal);
    let primal_residual = ax
        .iter()
        .zip(&p.b)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    let aty = p.a.transpose() * DVector::from_column_slice(&dual);
    let dual_infeasibility = (0..n_orig)
        .map(|j| {
            let rc = p.objective[j] - aty[j];
            match p.bounds[j] {
                VarBound::NonNegative => (-rc).max(0.0),
                VarBound::Free => rc.abs(),
            }
        })
        .fold(0.0, f64::max);
    if primal_residual > 1e-7 * scale {
        return Err(Error::Solver(format!(
            "optimal basis reproduces the right-hand side only to {primal_residual:.1e}"
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        dual,
        objective,
        dual_objective,
        iterations,
        primal_residual,
        dual_infeasibility,
        basis: basis.to_vec(),
    })
}
