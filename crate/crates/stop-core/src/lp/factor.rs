//! Sparse LU factorization of a simplex basis plus product-form updates.
//!
//! Rows of the factored matrix are constraint rows; columns are basis
//! positions. `ftran` maps a row-indexed right-hand side to a
//! position-indexed solution, `btran` the transpose.

const DROP: f64 = 1e-14;
const PIVOT_MIN: f64 = 1e-11;
const THRESHOLD: f64 = 0.01;
const MARKOWITZ_COLUMNS: usize = 4;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Positions left without a pivot.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, same length as `positions`.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    position: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Factor {
    dim: usize,
    pivot_row: Vec<usize>,
    pivot_pos: Vec<usize>,
    pivot_val: Vec<f64>,
    l_start: Vec<usize>,
    l_entries: Vec<(usize, f64)>,
    u_start: Vec<usize>,
    u_entries: Vec<(usize, f64)>,
    etas: Vec<Eta>,
}

struct Active {
    col_entries: Vec<Vec<(usize, f64)>>,
    row_cols: Vec<Vec<usize>>,
    row_done: Vec<bool>,
    col_done: Vec<bool>,
}

impl Active {
    fn value(&self, row: usize, col: usize) -> f64 {
        self.col_entries[col]
            .iter()
            .find(|&&(r, _)| r == row)
            .map_or(0.0, |&(_, v)| v)
    }

    fn detach_row(&mut self, row: usize) {
        let cols = std::mem::take(&mut self.row_cols[row]);
        for c in cols {
            let entries = &mut self.col_entries[c];
            if let Some(k) = entries.iter().position(|&(r, _)| r == row) {
                entries.swap_remove(k);
            }
        }
        self.row_done[row] = true;
    }

    fn detach_col(&mut self, col: usize) {
        let entries = std::mem::take(&mut self.col_entries[col]);
        for (r, _) in entries {
            let cols = &mut self.row_cols[r];
            if let Some(k) = cols.iter().position(|&c| c == col) {
                cols.swap_remove(k);
            }
        }
        self.col_done[col] = true;
    }
}

impl Factor {
    /// Factor the square matrix whose `k`-th column is `columns[k]`.
    pub(crate) fn new(dim: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), dim);
        let mut act = Active {
            col_entries: vec![Vec::new(); dim],
            row_cols: vec![Vec::new(); dim],
            row_done: vec![false; dim],
            col_done: vec![false; dim],
        };
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col {
                if v.abs() > DROP {
                    act.col_entries[c].push((r, v));
                    act.row_cols[r].push(c);
                }
            }
        }
        let mut f = Factor {
            dim,
            l_start: vec![0],
            u_start: vec![0],
            ..Default::default()
        };

        let mut col_queue: Vec<usize> = (0..dim).filter(|&c| act.col_entries[c].len() == 1).collect();
        let mut row_queue: Vec<usize> = (0..dim).filter(|&r| act.row_cols[r].len() == 1).collect();
        loop {
            let mut progressed = false;
            while let Some(c) = col_queue.pop() {
                if act.col_done[c] || act.col_entries[c].len() != 1 {
                    continue;
                }
                let (r, v) = act.col_entries[c][0];
                if v.abs() < PIVOT_MIN {
                    continue;
                }
                let others: Vec<usize> = act.row_cols[r].iter().copied().filter(|&j| j != c).collect();
                let u: Vec<(usize, f64)> = others.iter().map(|&j| (j, act.value(r, j))).collect();
                act.detach_col(c);
                act.detach_row(r);
                for &j in &others {
                    if act.col_entries[j].len() == 1 {
                        col_queue.push(j);
                    }
                }
                f.push_pivot(r, c, v, &[], &u);
                progressed = true;
            }
            while let Some(r) = row_queue.pop() {
                if act.row_done[r] || act.row_cols[r].len() != 1 {
                    continue;
                }
                let c = act.row_cols[r][0];
                let v = act.value(r, c);
                let col_max = act.col_entries[c].iter().fold(0.0f64, |m, &(_, x)| m.max(x.abs()));
                if v.abs() < PIVOT_MIN || v.abs() < THRESHOLD * col_max {
                    continue;
                }
                let l: Vec<(usize, f64)> = act.col_entries[c]
                    .iter()
                    .filter(|&&(i, _)| i != r)
                    .map(|&(i, a)| (i, a / v))
                    .collect();
                act.detach_col(c);
                act.detach_row(r);
                for &(i, _) in &l {
                    if act.row_cols[i].len() == 1 {
                        row_queue.push(i);
                    }
                }
                f.push_pivot(r, c, v, &l, &[]);
                progressed = true;
                if !col_queue.is_empty() {
                    break;
                }
            }
            if !progressed && col_queue.is_empty() {
                break;
            }
        }

        // Markowitz elimination on the remaining nucleus. Only the few
        // sparsest columns are searched for a pivot.
        let mut nucleus: Vec<usize> = (0..dim).filter(|&c| !act.col_done[c]).collect();
        while f.pivot_pos.len() < dim {
            nucleus.retain(|&c| !act.col_done[c]);
            let mut cands = [(usize::MAX, usize::MAX); MARKOWITZ_COLUMNS];
            for &c in &nucleus {
                let key = (act.col_entries[c].len(), c);
                if key.0 == 0 || key >= cands[MARKOWITZ_COLUMNS - 1] {
                    continue;
                }
                let at = cands.partition_point(|&k| k < key);
                cands.copy_within(at..MARKOWITZ_COLUMNS - 1, at + 1);
                cands[at] = key;
            }
            if cands[0].0 == usize::MAX {
                break;
            }
            let mut best: Option<(usize, f64, usize, usize)> = None;
            for &(count, c) in cands.iter().filter(|k| k.0 != usize::MAX) {
                let col_max = act.col_entries[c].iter().fold(0.0f64, |m, &(_, x)| m.max(x.abs()));
                if col_max < PIVOT_MIN {
                    continue;
                }
                for &(r, v) in &act.col_entries[c] {
                    if v.abs() < THRESHOLD * col_max {
                        continue;
                    }
                    let cost = (act.row_cols[r].len() - 1) * (count - 1);
                    let better = match best {
                        None => true,
                        Some((bc, bv, _, _)) => cost < bc || (cost == bc && v.abs() > bv),
                    };
                    if better {
                        best = Some((cost, v.abs(), r, c));
                    }
                }
            }
            let Some((_, _, r, c)) = best else { break };
            let v = act.value(r, c);
            let u: Vec<(usize, f64)> = act.row_cols[r]
                .iter()
                .copied()
                .filter(|&j| j != c)
                .map(|j| (j, act.value(r, j)))
                .collect();
            let l: Vec<(usize, f64)> = act.col_entries[c]
                .iter()
                .filter(|&&(i, _)| i != r)
                .map(|&(i, a)| (i, a / v))
                .collect();
            act.detach_col(c);
            act.detach_row(r);
            for &(i, li) in &l {
                for &(j, urj) in &u {
                    let delta = li * urj;
                    let entries = &mut act.col_entries[j];
                    match entries.iter_mut().find(|(row, _)| *row == i) {
                        Some(e) => e.1 -= delta,
                        None => {
                            entries.push((i, -delta));
                            act.row_cols[i].push(j);
                        }
                    }
                }
            }
            f.push_pivot(r, c, v, &l, &u);
        }

        if f.pivot_pos.len() < dim {
            let positions: Vec<usize> = (0..dim).filter(|&c| !act.col_done[c]).collect();
            let rows: Vec<usize> = (0..dim).filter(|&r| !act.row_done[r]).collect();
            return Err(Singular { positions, rows });
        }
        Ok(f)
    }

    fn push_pivot(&mut self, row: usize, pos: usize, val: f64, l: &[(usize, f64)], u: &[(usize, f64)]) {
        self.pivot_row.push(row);
        self.pivot_pos.push(pos);
        self.pivot_val.push(val);
        self.l_entries.extend(l.iter().filter(|e| e.1.abs() > DROP));
        self.l_start.push(self.l_entries.len());
        self.u_entries.extend(u.iter().filter(|e| e.1.abs() > DROP));
        self.u_start.push(self.u_entries.len());
    }

    pub(crate) fn update_count(&self) -> usize {
        self.etas.len()
    }

    /// Record that position `position` now holds a column whose ftran is `alpha`.
    pub(crate) fn update(&mut self, position: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != position && a.abs() > DROP)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            position,
            pivot: alpha[position],
            entries,
        });
    }

    /// Solve `B x = rhs`; `rhs` is indexed by row, the result by position.
    pub(crate) fn ftran(&self, rhs: &mut [f64]) -> Vec<f64> {
        for k in 0..self.dim {
            let v = rhs[self.pivot_row[k]];
            if v != 0.0 {
                for &(i, l) in &self.l_entries[self.l_start[k]..self.l_start[k + 1]] {
                    rhs[i] -= l * v;
                }
            }
        }
        let mut x = vec![0.0; self.dim];
        for k in (0..self.dim).rev() {
            let mut v = rhs[self.pivot_row[k]];
            for &(p, u) in &self.u_entries[self.u_start[k]..self.u_start[k + 1]] {
                v -= u * x[p];
            }
            x[self.pivot_pos[k]] = v / self.pivot_val[k];
        }
        for eta in &self.etas {
            let xp = x[eta.position] / eta.pivot;
            x[eta.position] = xp;
            if xp != 0.0 {
                for &(i, a) in &eta.entries {
                    x[i] -= a * xp;
                }
            }
        }
        x
    }

    /// Solve `Bᵀ y = rhs`; `rhs` is indexed by position, the result by row.
    pub(crate) fn btran(&self, rhs: &mut [f64]) -> Vec<f64> {
        for eta in self.etas.iter().rev() {
            let mut v = rhs[eta.position];
            for &(i, a) in &eta.entries {
                v -= a * rhs[i];
            }
            rhs[eta.position] = v / eta.pivot;
        }
        let mut y = vec![0.0; self.dim];
        for k in 0..self.dim {
            let v = rhs[self.pivot_pos[k]] / self.pivot_val[k];
            if v != 0.0 {
                for &(p, u) in &self.u_entries[self.u_start[k]..self.u_start[k + 1]] {
                    rhs[p] -= u * v;
                }
            }
            y[self.pivot_row[k]] = v;
        }
        for k in (0..self.dim).rev() {
            let r = self.pivot_row[k];
            let mut v = y[r];
            for &(i, l) in &self.l_entries[self.l_start[k]..self.l_start[k + 1]] {
                v -= l * y[i];
            }
            y[r] = v;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_columns(a: &[[f64; 3]; 3]) -> Vec<Vec<(usize, f64)>> {
        (0..3)
            .map(|c| (0..3).filter(|&r| a[r][c] != 0.0).map(|r| (r, a[r][c])).collect())
            .collect()
    }

    fn mul(a: &[[f64; 3]; 3], x: &[f64]) -> Vec<f64> {
        (0..3).map(|r| (0..3).map(|c| a[r][c] * x[c]).sum()).collect()
    }

    #[test]
    fn solves_dense_system_both_ways() {
        let a = [[2.0, 1.0, 0.0], [4.0, 3.0, 1.0], [0.0, 5.0, 7.0]];
        let f = Factor::new(3, &dense_columns(&a)).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = f.ftran(&mut b.to_vec());
        for (l, r) in mul(&a, &x).iter().zip(b) {
            assert!((l - r).abs() < 1e-12);
        }
        let y = f.btran(&mut b.to_vec());
        for c in 0..3 {
            let v: f64 = (0..3).map(|r| a[r][c] * y[r]).sum();
            assert!((v - b[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn product_form_update_matches_refactor() {
        let a = [[2.0, 1.0, 0.0], [4.0, 3.0, 1.0], [0.0, 5.0, 7.0]];
        let mut f = Factor::new(3, &dense_columns(&a)).unwrap();
        let new_col = [1.0, -1.0, 2.0];
        let alpha = f.ftran(&mut new_col.to_vec());
        f.update(1, &alpha);
        let mut b2 = a;
        for r in 0..3 {
            b2[r][1] = new_col[r];
        }
        let rhs = [0.5, -2.0, 4.0];
        let x = f.ftran(&mut rhs.to_vec());
        for (l, r) in mul(&b2, &x).iter().zip(rhs) {
            assert!((l - r).abs() < 1e-12);
        }
        let y = f.btran(&mut rhs.to_vec());
        for c in 0..3 {
            let v: f64 = (0..3).map(|r| b2[r][c] * y[r]).sum();
            assert!((v - rhs[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_singular_positions() {
        let cols = vec![vec![(0, 1.0)], vec![(0, 2.0)]];
        let err = Factor::new(2, &cols).unwrap_err();
        assert_eq!(err.positions.len(), 1);
        assert_eq!(err.rows, vec![1]);
    }
}
