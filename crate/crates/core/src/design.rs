//! G-optimal experimental design over a finite action set.
//!
//! By the Kiefer-Wolfowitz equivalence theorem the G-optimal design (minimise
//! the worst leverage `max_a a^T M(Q)^{-1} a`) coincides with the D-optimal
//! one (maximise `log det M(Q)`), and the optimal worst leverage is exactly
//! `d` for a spanning set. The solver runs Frank-Wolfe on `log det` with
//! away steps and closed-form line search (the Wolfe-Atwood variant), which
//! also keeps the support small. The certificate at every iterate is the
//! worst leverage itself.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, null_vector, pivoted_basis, solve_dense, Cholesky, SymMatrix};
use crate::math;
use crate::model::ActionSet;

/// Relative residual below which a direction counts as numerically absent.
pub const RANK_TOL: f64 = 1e-10;
/// Atoms lighter than this are dropped when pruning.
pub const PRUNE_WEIGHT: f64 = 1e-7;

const POLISH_MAX_SUPPORT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignOptions {
    /// Target `g(Q) <= d (1 + tolerance)`.
    pub tolerance: f64,
    /// Iteration cap; `None` means `10 * K * d`.
    pub max_iters: Option<usize>,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { tolerance: 1e-3, max_iters: None }
    }
}

impl DesignOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self { tolerance, ..Self::default() }
    }
}

/// A sparse design: probability weights over action indices.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignWeights {
    support: Vec<usize>,
    weights: Vec<f64>,
    /// Worst leverage `max_a a^T M(Q)^{-1} a`.
    pub g_value: f64,
    /// `g_value - d`; zero exactly at the optimum.
    pub duality_gap: f64,
    /// Whether the tolerance was met within the iteration budget.
    pub converged: bool,
    pub iterations: usize,
    /// Dimension the leverage is measured in (the rank of the action set).
    pub dim: usize,
}

impl DesignWeights {
    /// Support indices, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Weights aligned with [`support`](Self::support).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn weight_of(&self, index: usize) -> f64 {
        self.support.binary_search(&index).map(|p| self.weights[p]).unwrap_or(0.0)
    }

    pub fn to_dense(&self, k: usize) -> Vec<f64> {
        let mut w = vec![0.0; k];
        for (i, q) in self.pairs() {
            w[i] = q;
        }
        w
    }

    /// Remaps support indices through `map` (used when solving on a subset).
    pub fn remap(mut self, map: &[usize]) -> Self {
        let mut pairs: Vec<(usize, f64)> = self.pairs().map(|(i, w)| (map[i], w)).collect();
        pairs.sort_by_key(|p| p.0);
        self.support = pairs.iter().map(|p| p.0).collect();
        self.weights = pairs.iter().map(|p| p.1).collect();
        self
    }
}

/// Evaluates `g(Q) = max_a a^T (sum_b Q(b) b b^T)^{-1} a` for given weights.
pub fn g_of(actions: &ActionSet, weights: &[(usize, f64)]) -> Result<f64> {
    for &(i, w) in weights {
        actions.check_index(i)?;
        if !(w >= 0.0) {
            return Err(Error::InvalidConfig(alloc::format!("negative weight {w} on action {i}")));
        }
    }
    let m = moment(actions, weights.iter().copied());
    let chol = m.cholesky()?;
    let mut scratch = vec![0.0; actions.dim()];
    Ok(actions
        .iter()
        .map(|a| chol.inv_quad_form_with(a, &mut scratch))
        .fold(f64::NEG_INFINITY, f64::max))
}

fn moment(actions: &ActionSet, weights: impl Iterator<Item = (usize, f64)>) -> SymMatrix {
    let mut m = SymMatrix::zeros(actions.dim());
    for (i, w) in weights {
        if w > 0.0 {
            m.add_outer(actions.action(i), w);
        }
    }
    m
}

/// Solves the G-optimal design on a spanning action set.
///
/// Returns a design with `g <= d (1 + tolerance)` and at most `d(d+1)/2`
/// atoms. When the iteration budget runs out first, the best iterate is
/// returned with `converged == false`.
pub fn solve_g_optimal(actions: &ActionSet, opts: &DesignOptions) -> Result<DesignWeights> {
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "design tolerance must be positive, got {}",
            opts.tolerance
        )));
    }
    let d = actions.dim();
    let basis = pivoted_basis(actions.iter(), d, RANK_TOL);
    if basis.rank() < d {
        return Err(Error::RankDeficient { rank: basis.rank(), dim: d });
    }
    let max_iters = opts.max_iters.unwrap_or(10 * actions.len() * d);
    let mut solver = Solver::new(actions, &basis.pivots);
    Ok(solver.run(opts.tolerance, max_iters))
}

/// Like [`solve_g_optimal`] but accepts sets that do not span `R^d`: the
/// design is solved in the coordinates of the span, so the optimum leverage
/// is the rank rather than `d`.
pub fn solve_g_optimal_in_span(actions: &ActionSet, opts: &DesignOptions) -> Result<DesignWeights> {
    let d = actions.dim();
    let basis = pivoted_basis(actions.iter(), d, RANK_TOL);
    let r = basis.rank();
    if r == d {
        return solve_g_optimal(actions, opts);
    }
    if r == 0 {
        return Err(Error::RankDeficient { rank: 0, dim: d });
    }
    let mut coords = Vec::with_capacity(actions.len() * r);
    for a in actions.iter() {
        coords.extend(basis.basis.iter().map(|q| dot(q, a)));
    }
    // projections onto an orthonormal basis cannot grow the norm
    let projected = ActionSet::from_flat(r, coords)?;
    solve_g_optimal(&projected, opts)
}

enum Step {
    Toward(f64),
    /// step size, whether the atom leaves the support
    Away(f64, bool),
    Pairwise(f64, bool),
}

struct Solver<'a> {
    actions: &'a ActionSet,
    d: usize,
    w: Vec<f64>,
    lev: Vec<f64>,
    scratch: Vec<f64>,
    chol: Option<Cholesky>,
}

impl<'a> Solver<'a> {
    fn new(actions: &'a ActionSet, init: &[usize]) -> Self {
        let k = actions.len();
        let d = actions.dim();
        let mut w = vec![0.0; k];
        for &i in init {
            w[i] = 1.0 / init.len() as f64;
        }
        Self { actions, d, w, lev: vec![0.0; k], scratch: vec![0.0; d], chol: None }
    }

    /// Recomputes all leverages; returns false if `M` lost definiteness.
    fn refresh(&mut self) -> bool {
        let m = moment(self.actions, self.w.iter().copied().enumerate());
        let Ok(chol) = m.cholesky() else { return false };
        for (l, a) in self.lev.iter_mut().zip(self.actions.iter()) {
            *l = chol.inv_quad_form_with(a, &mut self.scratch);
        }
        self.chol = Some(chol);
        true
    }

    fn argmax_lev(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, &l) in self.lev.iter().enumerate() {
            if l > best.1 {
                best = (i, l);
            }
        }
        best
    }

    fn argmin_lev_on_support(&self) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (i, (&l, &w)) in self.lev.iter().zip(&self.w).enumerate() {
            if w > 0.0 && l < best.1 {
                best = (i, l);
            }
        }
        best
    }

    /// Newton steps on `log det M` restricted to the current support (kept
    /// on the simplex); atoms driven to zero leave the support.
    fn polish(&mut self, steps: usize) {
        let d = self.d;
        for _ in 0..steps {
            let support: Vec<usize> = (0..self.w.len()).filter(|&i| self.w[i] > 0.0).collect();
            let s = support.len();
            if !(2..=POLISH_MAX_SUPPORT).contains(&s) {
                return;
            }
            let m = moment(self.actions, self.w.iter().copied().enumerate());
            let Ok(chol) = m.cholesky() else { return };
            let f0 = chol.log_det();
            let solved: Vec<Vec<f64>> = support.iter().map(|&i| chol.solve(self.actions.action(i))).collect();
            // KKT system [P 1; 1^T 0] [step; nu] = [grad; 0] with P_ij = (a_i^T M^-1 a_j)^2
            let n = s + 1;
            let mut kkt = vec![0.0; n * n];
            let mut rhs = vec![0.0; n];
            let mut diag_max = 0.0f64;
            for (r, &i) in support.iter().enumerate() {
                for (c, x) in solved.iter().enumerate() {
                    let cij = dot(self.actions.action(i), x);
                    kkt[r * n + c] = cij * cij;
                }
                diag_max = diag_max.max(kkt[r * n + r]);
                rhs[r] = dot(self.actions.action(i), &solved[r]);
                kkt[r * n + s] = 1.0;
                kkt[s * n + r] = 1.0;
            }
            for r in 0..s {
                kkt[r * n + r] += 1e-12 * diag_max;
            }
            let Some(sol) = solve_dense(&kkt, n, &rhs) else { return };
            let dir = &sol[..s];
            let decrement: f64 = dir.iter().zip(&rhs).map(|(x, g)| x * g).sum();
            if !(decrement > 1e-15 * d as f64) {
                return;
            }
            let mut t = 1.0f64;
            let mut blocking = None;
            for (k, &i) in support.iter().enumerate() {
                if dir[k] < 0.0 && self.w[i] / -dir[k] < t {
                    t = self.w[i] / -dir[k];
                    blocking = Some(k);
                }
            }
            let old: Vec<f64> = support.iter().map(|&i| self.w[i]).collect();
            loop {
                for (k, &i) in support.iter().enumerate() {
                    self.w[i] = (old[k] + t * dir[k]).max(0.0);
                }
                if let Some(k) = blocking {
                    self.w[support[k]] = 0.0;
                }
                let total: f64 = support.iter().map(|&i| self.w[i]).sum();
                support.iter().for_each(|&i| self.w[i] /= total);
                let m = moment(self.actions, self.w.iter().copied().enumerate());
                if let Ok(c) = m.cholesky() {
                    if c.log_det() >= f0 {
                        break;
                    }
                }
                t *= 0.5;
                blocking = None;
                if t < 1e-10 {
                    for (k, &i) in support.iter().enumerate() {
                        self.w[i] = old[k];
                    }
                    return;
                }
            }
        }
    }

    /// `a_i^T M^{-1} a_j` for the current moment matrix.
    fn cross_leverage(&mut self, i: usize, j: usize) -> f64 {
        let chol = self.chol.as_ref().expect("refreshed");
        let x = chol.solve(self.actions.action(j));
        dot(self.actions.action(i), &x)
    }

    /// Wolfe-Atwood iterations until `max lev <= d (1 + tol)` or the budget
    /// is spent. Returns (converged, best weights seen, their max leverage,
    /// iterations used).
    fn iterate(&mut self, tol: f64, budget: usize) -> (bool, Vec<f64>, f64, usize) {
        let d = self.d as f64;
        let target = d * (1.0 + tol);
        let mut best_w = self.w.clone();
        let mut best_g = f64::INFINITY;
        let mut it = 0;
        loop {
            if !self.refresh() {
                break;
            }
            let (jp, gmax) = self.argmax_lev();
            if gmax < best_g {
                best_g = gmax;
                best_w.clone_from(&self.w);
            }
            if gmax <= target {
                return (true, best_w, best_g, it);
            }
            if it >= budget {
                break;
            }
            it += 1;
            let (jm, gmin) = self.argmin_lev_on_support();
            // toward step on the most under-covered action
            let lt = (gmax / d - 1.0) / (gmax - 1.0);
            let mut step = Step::Toward(lt);
            let mut gain = (d - 1.0) * math::ln(1.0 - lt) + math::ln(1.0 - lt + lt * gmax);
            if jm != usize::MAX && jm != jp && self.w[jm] < 1.0 {
                let wj = self.w[jm];
                // away step off the least useful support atom
                let drop = wj / (1.0 - wj);
                let la = if gmin > 1.0 { ((1.0 - gmin / d) / (gmin - 1.0)).min(drop) } else { drop };
                if la > 0.0 {
                    let ga = (d - 1.0) * math::ln(1.0 + la) + math::ln(1.0 + la - la * gmin);
                    if ga > gain {
                        step = Step::Away(la, la >= drop);
                        gain = ga;
                    }
                }
                // exchange mass between the two
                let cross = self.cross_leverage(jp, jm);
                let curv = gmax * gmin - cross * cross;
                let lp = if curv > 0.0 { ((gmax - gmin) / (2.0 * curv)).min(wj) } else { wj };
                let gp = math::ln(1.0 + lp * (gmax - gmin) - lp * lp * curv.max(0.0));
                if gp > gain {
                    step = Step::Pairwise(lp, lp >= wj);
                }
            }
            match step {
                Step::Toward(l) => {
                    self.w.iter_mut().for_each(|x| *x *= 1.0 - l);
                    self.w[jp] += l;
                }
                Step::Away(l, drops) => {
                    self.w.iter_mut().for_each(|x| *x *= 1.0 + l);
                    self.w[jm] = if drops { 0.0 } else { self.w[jm] - l };
                }
                Step::Pairwise(l, drops) => {
                    self.w[jp] += l;
                    self.w[jm] = if drops { 0.0 } else { self.w[jm] - l };
                }
            }
            self.polish(3);
        }
        (false, best_w, best_g, it)
    }

    fn run(&mut self, tol: f64, max_iters: usize) -> DesignWeights {
        let d = self.d;
        let cap = d * (d + 1) / 2;
        let bound = d as f64 * (1.0 + tol);
        // leave half the tolerance as headroom for pruning
        let inner_tol = tol / 2.0;
        let mut used = 0;
        let mut last: Option<DesignWeights> = None;
        for _round in 0..8 {
            let (conv, w, _, its) = self.iterate(inner_tol, max_iters.saturating_sub(used));
            used += its;
            let pruned = prune(self.actions, &w, cap);
            let g = g_of(self.actions, &pruned).unwrap_or(f64::INFINITY);
            let candidate = finish(pruned, g, d, g <= bound, used);
            let better = last.as_ref().is_none_or(|l| candidate.g_value <= l.g_value);
            if candidate.converged || !conv || used >= max_iters {
                return if better || candidate.converged { candidate } else { last.unwrap() };
            }
            // pruning cost too much; resume from the pruned design
            self.w.iter_mut().for_each(|x| *x = 0.0);
            for (i, q) in candidate.pairs() {
                self.w[i] = q;
            }
            if better {
                last = Some(candidate);
            }
        }
        let mut out = last.expect("at least one round ran");
        out.converged = out.g_value <= bound;
        out
    }
}

fn finish(pairs: Vec<(usize, f64)>, g: f64, d: usize, converged: bool, iterations: usize) -> DesignWeights {
    DesignWeights {
        support: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        g_value: g,
        duality_gap: g - d as f64,
        converged,
        iterations,
        dim: d,
    }
}

/// Drops light atoms, renormalises, then applies Caratheodory reduction on
/// the moment matrix until at most `cap` atoms remain.
fn prune(actions: &ActionSet, w: &[f64], cap: usize) -> Vec<(usize, f64)> {
    let mut pairs: Vec<(usize, f64)> =
        w.iter().copied().enumerate().filter(|&(_, x)| x >= PRUNE_WEIGHT).collect();
    if pairs.is_empty() {
        // degenerate: keep the heaviest atom
        let (i, _) = w.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
        pairs.push((i, 1.0));
    }
    normalise(&mut pairs);
    let d = actions.dim();
    while pairs.len() > cap {
        let rows = cap;
        let cols = pairs.len();
        let mut mat = vec![0.0; rows * cols];
        for (c, &(idx, _)) in pairs.iter().enumerate() {
            let a = actions.action(idx);
            let mut r = 0;
            for i in 0..d {
                for j in i..d {
                    mat[r * cols + c] = a[i] * a[j];
                    r += 1;
                }
            }
        }
        let Some(mut z) = null_vector(&mat, rows, cols, 1e-12) else { break };
        if !z.iter().any(|&x| x > 0.0) {
            z.iter_mut().for_each(|x| *x = -*x);
        }
        let mut step = f64::INFINITY;
        let mut hit = 0;
        for (c, (&zc, &(_, wc))) in z.iter().zip(&pairs).enumerate() {
            if zc > 0.0 && wc / zc < step {
                step = wc / zc;
                hit = c;
            }
        }
        for (p, zc) in pairs.iter_mut().zip(&z) {
            p.1 -= step * zc;
        }
        pairs[hit].1 = 0.0;
        pairs.retain(|p| p.1 > 0.0);
        normalise(&mut pairs);
    }
    pairs
}

fn normalise(pairs: &mut [(usize, f64)]) {
    let s: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.iter_mut().for_each(|p| p.1 /= s);
}
