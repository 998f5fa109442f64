//! Bounded revised simplex.
//!
//! Every row `i` gets a logical variable `r_i = a_i · x` whose bounds encode
//! the relation, so the constraint system is `[A  -I] (x, r) = 0` and every
//! basis starts from the all-logical one. Solves run the dual simplex until
//! the basis is primal feasible, then the primal simplex until it is dual
//! feasible. With boxed structurals the first phase starts dual feasible and
//! the second is a short clean-up.

use super::factor::{Factor, Singular};
use super::{Basis, BasisStatus, LpError, LpModel, LpSolution, LpStatus, Relation, Row, FEASIBILITY_TOL, OPTIMALITY_TOL};

const PIVOT_TOL: f64 = 1e-9;
/// Smallest pivot the ratio tests accept.
const RATIO_PIVOT_TOL: f64 = 1e-7;
const PRIMAL_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_SWITCH: usize = 300;
const NONE: usize = usize::MAX;
/// Base size of the cost perturbation used by the dual phase.
const PERTURBATION: f64 = 5e-7;
/// Consecutive degenerate dual pivots tolerated before perturbing.
const PERTURB_AFTER: usize = 50;

enum Phase {
    Done,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct SimplexEngine {
    n: usize,
    m: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    row_start: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Minimization costs, the negated objective.
    cost: Vec<f64>,
    status: Vec<BasisStatus>,
    basis: Vec<usize>,
    pos_of: Vec<usize>,
    x: Vec<f64>,
    d: Vec<f64>,
    factor: Option<Factor>,
    result: Option<LpStatus>,
    iterations: usize,
    alpha: Vec<f64>,
    touched: Vec<usize>,
    /// Devex reference weights of the basis positions, used by the dual phase.
    dual_weight: Vec<f64>,
}

impl SimplexEngine {
    pub fn new(model: &LpModel) -> Self {
        let n = model.columns.len();
        let mut e = SimplexEngine {
            n,
            m: 0,
            col_start: vec![0; n + 1],
            col_row: Vec::new(),
            col_val: Vec::new(),
            row_start: vec![0],
            row_col: Vec::new(),
            row_val: Vec::new(),
            lower: model.columns.iter().map(|c| c.lower).collect(),
            upper: model.columns.iter().map(|c| c.upper).collect(),
            cost: model.columns.iter().map(|c| -c.objective).collect(),
            status: vec![BasisStatus::AtLower; n],
            basis: Vec::new(),
            pos_of: vec![NONE; n],
            x: vec![0.0; n],
            d: vec![0.0; n],
            factor: None,
            result: None,
            iterations: 0,
            alpha: vec![0.0; n],
            touched: Vec::new(),
            dual_weight: Vec::new(),
        };
        for j in 0..n {
            e.status[j] = if e.cost[j] >= 0.0 {
                BasisStatus::AtLower
            } else {
                BasisStatus::AtUpper
            };
            e.place_nonbasic(j);
        }
        e.add_rows(&model.rows);
        e
    }

    pub fn num_columns(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.m
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Append rows; their logicals enter the basis, which keeps dual feasibility.
    pub fn add_rows(&mut self, rows: &[Row]) {
        if rows.is_empty() {
            return;
        }
        for row in rows {
            for &(j, a) in &row.coefficients {
                if a != 0.0 {
                    self.row_col.push(j);
                    self.row_val.push(a);
                }
            }
            self.row_start.push(self.row_col.len());
            let (lo, hi) = row.range();
            let act: f64 = row.coefficients.iter().map(|&(j, a)| a * self.x[j]).sum();
            let var = self.lower.len();
            self.lower.push(lo);
            self.upper.push(hi);
            self.cost.push(0.0);
            self.status.push(BasisStatus::Basic);
            self.pos_of.push(self.basis.len());
            self.basis.push(var);
            self.x.push(act);
            self.d.push(0.0);
            self.alpha.push(0.0);
        }
        self.m += rows.len();
        self.rebuild_columns();
        self.factor = None;
        self.result = None;
    }

    fn rebuild_columns(&mut self) {
        let mut count = vec![0usize; self.n + 1];
        for &j in &self.row_col {
            count[j + 1] += 1;
        }
        for j in 0..self.n {
            count[j + 1] += count[j];
        }
        self.col_start = count.clone();
        self.col_row = vec![0; self.row_col.len()];
        self.col_val = vec![0.0; self.row_col.len()];
        let mut next = count;
        for i in 0..self.m {
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.row_col[k];
                self.col_row[next[j]] = i;
                self.col_val[next[j]] = self.row_val[k];
                next[j] += 1;
            }
        }
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.lower[col], self.upper[col])
    }

    pub fn set_bounds(&mut self, col: usize, lower: f64, upper: f64) {
        assert!(col < self.n, "bounds can only be set on structural columns");
        self.lower[col] = lower;
        self.upper[col] = upper;
        if self.status[col] != BasisStatus::Basic {
            self.place_nonbasic(col);
        }
        self.result = None;
    }

    /// The current model: structural bounds as set, all rows appended so far.
    pub fn model(&self) -> LpModel {
        let mut model = LpModel::new();
        for j in 0..self.n {
            model.add_column(self.lower[j], self.upper[j], -self.cost[j]);
        }
        for i in 0..self.m {
            let coefficients = (self.row_start[i]..self.row_start[i + 1]).map(|k| (self.row_col[k], self.row_val[k])).collect();
            let (lo, hi) = (self.lower[self.n + i], self.upper[self.n + i]);
            let row = if lo == hi {
                Row::new(coefficients, Relation::Eq, lo)
            } else if lo.is_finite() {
                Row::new(coefficients, Relation::Ge, lo)
            } else {
                Row::new(coefficients, Relation::Le, hi)
            };
            model.add_row(row);
        }
        model
    }

    pub fn set_objective(&mut self, objective: &[f64]) {
        assert_eq!(objective.len(), self.n);
        for (c, &o) in self.cost.iter_mut().zip(objective) {
            *c = -o;
        }
        self.result = None;
    }

    pub fn basis_snapshot(&self) -> Basis {
        Basis {
            columns: self.status[..self.n].to_vec(),
            rows: self.status[self.n..].to_vec(),
        }
    }

    /// Install a warm-start basis. Missing row entries are taken as basic;
    /// an inconsistent basis falls back to the all-logical one.
    pub fn set_basis(&mut self, basis: &Basis) {
        if basis.columns.len() != self.n || basis.rows.len() > self.m {
            return;
        }
        let mut status = basis.columns.clone();
        status.extend(basis.rows.iter().copied());
        status.resize(self.n + self.m, BasisStatus::Basic);
        let basic: Vec<usize> = (0..status.len()).filter(|&j| status[j] == BasisStatus::Basic).collect();
        if basic.len() != self.m {
            return;
        }
        self.status = status;
        self.pos_of = vec![NONE; self.n + self.m];
        for (p, &j) in basic.iter().enumerate() {
            self.pos_of[j] = p;
        }
        self.basis = basic;
        for j in 0..self.n + self.m {
            if self.status[j] != BasisStatus::Basic {
                self.place_nonbasic(j);
            }
        }
        self.factor = None;
        self.result = None;
    }

    pub fn status(&self) -> Option<LpStatus> {
        self.result
    }

    pub fn primal(&self) -> &[f64] {
        &self.x[..self.n]
    }

    pub fn objective(&self) -> f64 {
        -self.cost[..self.n]
            .iter()
            .zip(&self.x[..self.n])
            .map(|(c, x)| c * x)
            .sum::<f64>()
    }

    pub fn solution(&self) -> LpSolution {
        let primal = self.primal().to_vec();
        let row_activity = (0..self.m)
            .map(|i| {
                (self.row_start[i]..self.row_start[i + 1])
                    .map(|k| self.row_val[k] * primal[self.row_col[k]])
                    .sum()
            })
            .collect();
        LpSolution {
            status: self.result.unwrap_or(LpStatus::Infeasible),
            objective: self.objective(),
            primal,
            row_activity,
            basis: self.basis_snapshot(),
        }
    }

    fn place_nonbasic(&mut self, j: usize) {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        let status = match self.status[j] {
            BasisStatus::AtUpper if hi.is_finite() => BasisStatus::AtUpper,
            BasisStatus::AtUpper | BasisStatus::AtLower | BasisStatus::Free if lo.is_finite() => BasisStatus::AtLower,
            _ if hi.is_finite() => BasisStatus::AtUpper,
            _ => BasisStatus::Free,
        };
        self.status[j] = status;
        self.x[j] = match status {
            BasisStatus::AtLower => lo,
            BasisStatus::AtUpper => hi,
            _ => 0.0,
        };
    }

    fn column_entries(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| (self.col_row[k], self.col_val[k]))
                .collect()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            (self.col_start[j]..self.col_start[j + 1])
                .map(|k| self.col_val[k] * y[self.col_row[k]])
                .sum()
        } else {
            -y[j - self.n]
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        for _ in 0..4 {
            let cols: Vec<Vec<(usize, f64)>> = self.basis.iter().map(|&j| self.column_entries(j)).collect();
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = Some(f);
                    return Ok(());
                }
                Err(Singular { positions, rows }) => {
                    for (p, r) in positions.into_iter().zip(rows) {
                        let out = self.basis[p];
                        let logical = self.n + r;
                        self.basis[p] = logical;
                        self.pos_of[logical] = p;
                        self.status[logical] = BasisStatus::Basic;
                        self.pos_of[out] = NONE;
                        let (lo, hi) = (self.lower[out], self.upper[out]);
                        self.status[out] = if hi.is_finite() && (!lo.is_finite() || hi - self.x[out] < self.x[out] - lo) {
                            BasisStatus::AtUpper
                        } else {
                            BasisStatus::AtLower
                        };
                        self.place_nonbasic(out);
                    }
                }
            }
        }
        Err(LpError::SingularBasis)
    }

    fn factor(&self) -> &Factor {
        self.factor.as_ref().expect("basis factored")
    }

    fn compute_primal(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.status[j] == BasisStatus::Basic || self.x[j] == 0.0 {
                continue;
            }
            let v = self.x[j];
            if j < self.n {
                for k in self.col_start[j]..self.col_start[j + 1] {
                    rhs[self.col_row[k]] -= self.col_val[k] * v;
                }
            } else {
                rhs[j - self.n] += v;
            }
        }
        let xb = self.factor().ftran(&mut rhs);
        for (p, v) in xb.into_iter().enumerate() {
            self.x[self.basis[p]] = v;
        }
    }

    fn compute_duals(&mut self) {
        let mut cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        let y = self.factor().btran(&mut cb);
        for j in 0..self.n + self.m {
            self.d[j] = if self.status[j] == BasisStatus::Basic {
                0.0
            } else {
                self.cost[j] - self.column_dot(j, &y)
            };
        }
    }

    fn fresh_state(&mut self) -> Result<(), LpError> {
        self.refactor()?;
        self.compute_primal();
        self.compute_duals();
        Ok(())
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        let below = self.lower[j] - v;
        let above = v - self.upper[j];
        below.max(above).max(0.0)
    }

    fn max_dual_infeasibility(&self) -> f64 {
        (0..self.n + self.m)
            .map(|j| match self.status[j] {
                BasisStatus::Basic => 0.0,
                _ if self.is_fixed(j) => 0.0,
                BasisStatus::AtLower => -self.d[j],
                BasisStatus::AtUpper => self.d[j],
                BasisStatus::Free => self.d[j].abs(),
            })
            .fold(0.0, f64::max)
    }

    fn iteration_cap(&self) -> usize {
        20_000 + 50 * (self.n + self.m)
    }

    pub fn solve(&mut self) -> Result<LpStatus, LpError> {
        let cap = self.iteration_cap();
        let start = self.iterations;
        for round in 0..6 {
            // The dual phase may perturb the costs; the primal clean-up then
            // works with the true ones.
            let costs = self.cost.clone();
            // A warm start keeps a factorization whose eta file is still short.
            let reuse = round == 0 && self.factor.as_ref().is_some_and(|f| f.update_count() < REFACTOR_EVERY / 2);
            let prepared = if reuse {
                self.compute_primal();
                self.compute_duals();
                Ok(())
            } else {
                self.fresh_state()
            };
            let dual = prepared.and_then(|_| {
                self.flip_to_dual_feasible();
                if round > 0 {
                    self.perturb_costs(round);
                    self.compute_duals();
                    self.shift_to_dual_feasible();
                }
                self.dual_phase(start + cap, round > 0)
            });
            self.cost = costs;
            match dual? {
                Phase::Infeasible => {
                    self.result = Some(LpStatus::Infeasible);
                    return Ok(LpStatus::Infeasible);
                }
                Phase::Unbounded => unreachable!("dual phase never reports unboundedness"),
                Phase::Done => {}
            }
            self.compute_duals();
            match self.primal_phase(start + cap)? {
                Phase::Unbounded => {
                    self.result = Some(LpStatus::Unbounded);
                    return Ok(LpStatus::Unbounded);
                }
                Phase::Infeasible => continue,
                Phase::Done => {}
            }
            self.fresh_state()?;
            let primal_ok = (0..self.n + self.m).all(|j| {
                let scale = 1.0 + self.lower[j].abs().min(self.upper[j].abs()).min(1e6);
                self.primal_infeasibility(j) <= FEASIBILITY_TOL * scale
            });
            if primal_ok && self.max_dual_infeasibility() <= OPTIMALITY_TOL * 10.0 {
                self.result = Some(LpStatus::Optimal);
                return Ok(LpStatus::Optimal);
            }
        }
        Err(LpError::IterationLimit(self.iterations - start))
    }

    /// Shift every structural cost by a small deterministic amount in the
    /// direction that keeps its current status dual feasible. Later solve
    /// rounds, entered only after trouble, perturb more.
    fn perturb_costs(&mut self, round: usize) {
        let scale = PERTURBATION * 10f64.powi(round.min(3) as i32);
        let mut state = 0x2545_F491_4F6C_DD1Du64;
        for j in 0..self.n {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let size = scale * (1.0 + u) * (1.0 + self.cost[j].abs());
            let (lo, hi) = (self.lower[j], self.upper[j]);
            let up = match self.status[j] {
                BasisStatus::AtLower => true,
                BasisStatus::AtUpper => false,
                _ if lo.is_finite() && hi.is_finite() => self.x[j] - lo <= hi - self.x[j],
                _ => lo.is_finite(),
            };
            if lo != hi {
                self.cost[j] += if up { size } else { -size };
            }
        }
    }

    /// Shift the costs of dual infeasible nonbasic variables so that their
    /// reduced costs have the right sign. The primal point does not move.
    fn shift_to_dual_feasible(&mut self) {
        for j in 0..self.n + self.m {
            if self.is_fixed(j) {
                continue;
            }
            let d = self.d[j];
            let target = match self.status[j] {
                BasisStatus::AtLower if d < 0.0 => PERTURBATION,
                BasisStatus::AtUpper if d > 0.0 => -PERTURBATION,
                BasisStatus::Free if d != 0.0 => 0.0,
                _ => continue,
            };
            self.cost[j] += target - d;
            self.d[j] = target;
        }
    }

    /// Move boxed nonbasic variables to the bound their reduced cost prefers.
    fn flip_to_dual_feasible(&mut self) {
        let mut flipped = false;
        for j in 0..self.n + self.m {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if !lo.is_finite() || !hi.is_finite() || lo == hi {
                continue;
            }
            let status = match self.status[j] {
                BasisStatus::AtLower if self.d[j] < -OPTIMALITY_TOL => BasisStatus::AtUpper,
                BasisStatus::AtUpper if self.d[j] > OPTIMALITY_TOL => BasisStatus::AtLower,
                _ => continue,
            };
            self.status[j] = status;
            self.x[j] = if status == BasisStatus::AtUpper { hi } else { lo };
            flipped = true;
        }
        if flipped {
            self.compute_primal();
        }
    }

    fn compute_alpha_row(&mut self, rho: &[f64]) {
        for (i, &r) in rho.iter().enumerate() {
            if r.abs() < 1e-13 {
                continue;
            }
            for k in self.row_start[i]..self.row_start[i + 1] {
                let j = self.row_col[k];
                if self.alpha[j] == 0.0 {
                    self.touched.push(j);
                }
                self.alpha[j] += r * self.row_val[k];
                if self.alpha[j] == 0.0 {
                    self.alpha[j] = f64::MIN_POSITIVE;
                }
            }
            let j = self.n + i;
            if self.alpha[j] == 0.0 {
                self.touched.push(j);
            }
            self.alpha[j] = -r;
        }
    }

    fn clear_alpha(&mut self) {
        for &j in &self.touched {
            self.alpha[j] = 0.0;
        }
        self.touched.clear();
    }

    fn choose_leaving(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (p, &j) in self.basis.iter().enumerate() {
            let infeas = self.primal_infeasibility(j);
            let tol = PRIMAL_TOL * (1.0 + self.x[j].abs());
            if infeas <= tol {
                continue;
            }
            // Dual Devex: infeasibility squared over the row's reference weight.
            let score = infeas * infeas / self.dual_weight[p];
            let better = match best {
                None => true,
                Some((b, bp)) => {
                    if bland {
                        j < self.basis[bp]
                    } else {
                        score > b
                    }
                }
            };
            if better {
                best = Some((score, p));
            }
        }
        best.map(|(_, p)| p)
    }

    fn dual_phase(&mut self, limit: usize, mut perturbed: bool) -> Result<Phase, LpError> {
        let mut degenerate = 0usize;
        self.dual_weight = vec![1.0; self.m];
        let mut confirmed = false;
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            if self.factor().update_count() >= REFACTOR_EVERY {
                self.fresh_state()?;
            }
            if !perturbed && degenerate > PERTURB_AFTER {
                // Stalling on dual degeneracy: the costs of the many zero-cost columns tie.
                perturbed = true;
                self.perturb_costs(0);
                self.compute_duals();
                self.shift_to_dual_feasible();
                degenerate = 0;
            }
            let bland = degenerate > DEGENERATE_SWITCH;
            let Some(p) = self.choose_leaving(bland) else {
                return Ok(Phase::Done);
            };
            let leaving = self.basis[p];
            let (dir, target) = if self.x[leaving] < self.lower[leaving] {
                (1.0, self.lower[leaving])
            } else {
                (-1.0, self.upper[leaving])
            };
            let mut e = vec![0.0; self.m];
            e[p] = 1.0;
            let rho = self.factor().btran(&mut e);
            self.compute_alpha_row(&rho);

            // Harris two-pass ratio test over nonbasic columns able to move.
            let mut candidates: Vec<(usize, f64, f64)> = Vec::new();
            let mut bound = f64::INFINITY;
            for &j in &self.touched {
                if self.status[j] == BasisStatus::Basic || self.is_fixed(j) {
                    continue;
                }
                let a = self.alpha[j];
                if a.abs() < RATIO_PIVOT_TOL {
                    continue;
                }
                let sigma = if a > 0.0 { -dir } else { dir };
                let movable = match self.status[j] {
                    BasisStatus::AtLower => sigma > 0.0,
                    BasisStatus::AtUpper => sigma < 0.0,
                    BasisStatus::Free => true,
                    BasisStatus::Basic => false,
                };
                if !movable {
                    continue;
                }
                let slack = (self.d[j] * sigma).max(0.0);
                bound = bound.min((slack + OPTIMALITY_TOL) / a.abs());
                candidates.push((j, slack / a.abs(), a.abs()));
            }
            let entering = if bland {
                candidates
                    .iter()
                    .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
                    .map(|c| c.0)
            } else {
                candidates
                    .iter()
                    .filter(|c| c.1 <= bound)
                    .max_by(|a, b| a.2.total_cmp(&b.2).then(b.0.cmp(&a.0)))
                    .map(|c| c.0)
            };
            let Some(q) = entering else {
                self.clear_alpha();
                if !confirmed && self.factor().update_count() > 0 {
                    confirmed = true;
                    self.fresh_state()?;
                    continue;
                }
                return Ok(Phase::Infeasible);
            };
            confirmed = false;

            let mut aq = vec![0.0; self.m];
            for (r, v) in self.column_entries(q) {
                aq[r] = v;
            }
            let col = self.factor().ftran(&mut aq);
            let pivot = col[p];
            if (pivot - self.alpha[q]).abs() > 1e-6 * (1.0 + pivot.abs()) || pivot.abs() < PIVOT_TOL {
                self.clear_alpha();
                if self.factor().update_count() == 0 {
                    return Err(LpError::SingularBasis);
                }
                self.fresh_state()?;
                continue;
            }
            let theta_d = self.d[q] / pivot;
            for &j in &self.touched {
                if self.status[j] != BasisStatus::Basic {
                    self.d[j] -= theta_d * self.alpha[j];
                }
            }
            self.clear_alpha();
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            let t = (self.x[leaving] - target) / pivot;
            for (i, &c) in col.iter().enumerate() {
                if c != 0.0 {
                    self.x[self.basis[i]] -= c * t;
                }
            }
            self.x[q] += t;
            self.x[leaving] = target;
            let wp = self.dual_weight[p];
            for (i, &c) in col.iter().enumerate() {
                if i != p && c != 0.0 {
                    let r = c / pivot;
                    self.dual_weight[i] = self.dual_weight[i].max(r * r * wp);
                }
            }
            self.dual_weight[p] = (wp / (pivot * pivot)).max(1.0);
            self.swap(p, q, if dir > 0.0 { BasisStatus::AtLower } else { BasisStatus::AtUpper });
            self.factor.as_mut().expect("basis factored").update(p, &col);
            self.iterations += 1;
            degenerate = if theta_d.abs() < 1e-12 { degenerate + 1 } else { 0 };
        }
    }

    fn swap(&mut self, p: usize, entering: usize, leaving_status: BasisStatus) {
        let leaving = self.basis[p];
        self.basis[p] = entering;
        self.pos_of[entering] = p;
        self.status[entering] = BasisStatus::Basic;
        self.pos_of[leaving] = NONE;
        self.status[leaving] = leaving_status;
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n + self.m {
            if self.status[j] == BasisStatus::Basic || self.is_fixed(j) {
                continue;
            }
            let d = self.d[j];
            let sigma = match self.status[j] {
                BasisStatus::AtLower if d < -OPTIMALITY_TOL => 1.0,
                BasisStatus::AtUpper if d > OPTIMALITY_TOL => -1.0,
                BasisStatus::Free if d.abs() > OPTIMALITY_TOL => -d.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, sigma));
            }
            if best.map_or(true, |b| d.abs() > b.2) {
                best = Some((j, sigma, d.abs()));
            }
        }
        best.map(|(j, s, _)| (j, s))
    }

    fn primal_phase(&mut self, limit: usize) -> Result<Phase, LpError> {
        let mut degenerate = 0usize;
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            if self.factor().update_count() >= REFACTOR_EVERY {
                self.fresh_state()?;
                if self.basis.iter().any(|&j| self.primal_infeasibility(j) > PRIMAL_TOL * (1.0 + self.x[j].abs())) {
                    return Ok(Phase::Infeasible);
                }
            }
            let bland = degenerate > DEGENERATE_SWITCH;
            let Some((q, sigma)) = self.choose_entering(bland) else {
                return Ok(Phase::Done);
            };
            let mut aq = vec![0.0; self.m];
            for (r, v) in self.column_entries(q) {
                aq[r] = v;
            }
            let col = self.factor().ftran(&mut aq);

            // Basic variable i moves at rate -col[i] * sigma per unit step.
            let mut bound = f64::INFINITY;
            for (i, &c) in col.iter().enumerate() {
                if c.abs() < PIVOT_TOL {
                    continue;
                }
                let j = self.basis[i];
                let rate = -c * sigma;
                let room = if rate < 0.0 {
                    self.x[j] - self.lower[j] + PRIMAL_TOL
                } else {
                    self.upper[j] + PRIMAL_TOL - self.x[j]
                };
                bound = bound.min(room.max(0.0) / rate.abs());
            }
            let mut leave: Option<(usize, f64, f64)> = None;
            for (i, &c) in col.iter().enumerate() {
                if c.abs() < PIVOT_TOL {
                    continue;
                }
                let j = self.basis[i];
                let rate = -c * sigma;
                let room = if rate < 0.0 {
                    self.x[j] - self.lower[j]
                } else {
                    self.upper[j] - self.x[j]
                };
                if !room.is_finite() {
                    continue;
                }
                let ratio = room.max(0.0) / rate.abs();
                if ratio > bound {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((bi, br, ba)) => {
                        if bland {
                            ratio < br || (ratio == br && j < self.basis[bi])
                        } else {
                            c.abs() > ba
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, c.abs()));
                }
            }
            let flip = self.upper[q] - self.lower[q];
            if flip.is_finite() && leave.map_or(true, |(_, r, _)| flip <= r) {
                for (i, &c) in col.iter().enumerate() {
                    if c != 0.0 {
                        self.x[self.basis[i]] -= c * sigma * flip;
                    }
                }
                self.status[q] = if sigma > 0.0 {
                    BasisStatus::AtUpper
                } else {
                    BasisStatus::AtLower
                };
                self.place_nonbasic(q);
                self.iterations += 1;
                degenerate = 0;
                continue;
            }
            let Some((p, t, _)) = leave else {
                return Ok(Phase::Unbounded);
            };
            for (i, &c) in col.iter().enumerate() {
                if c != 0.0 {
                    self.x[self.basis[i]] -= c * sigma * t;
                }
            }
            self.x[q] += sigma * t;
            let leaving = self.basis[p];
            let rate = -col[p] * sigma;
            let leaving_status = if rate < 0.0 {
                self.x[leaving] = self.lower[leaving];
                BasisStatus::AtLower
            } else {
                self.x[leaving] = self.upper[leaving];
                BasisStatus::AtUpper
            };
            self.swap(p, q, leaving_status);
            self.factor.as_mut().expect("basis factored").update(p, &col);
            self.compute_duals();
            self.iterations += 1;
            degenerate = if t < 1e-12 { degenerate + 1 } else { 0 };
        }
    }
}
