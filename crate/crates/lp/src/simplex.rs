//! Bounded-variable primal simplex with an explicit dense basis inverse.
//!
//! Every row gets a slack so that rows read `a·x + s = b`; the slack's
//! bounds encode the row sense. Rows whose slack cannot start feasible get
//! an artificial variable, and phase one drives those to zero.

use crate::Status;

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;

/// A connected piece of a model in column form.
#[derive(Debug, Clone)]
pub struct Block {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Sparse columns of the structural variables: (row, coefficient).
    pub cols: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    /// Bounds of each row's slack, `b - a·x`.
    pub slack_lower: Vec<f64>,
    pub slack_upper: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub status: Status,
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum At {
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
    Basic,
}

struct Tableau<'a> {
    block: &'a Block,
    n: usize,
    m: usize,
    /// Column of artificial `k` is `art_sign[k] * e_{art_row[k]}`.
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<At>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    feas_tol: f64,
    iterations: usize,
    max_iterations: usize,
}

/// The basis inverse is dense, so memory grows with the square of the rows.
pub const MAX_DENSE_ROWS: usize = 10_000;

pub fn solve_block(
    block: &Block,
    feas_tol: f64,
    opt_tol: f64,
) -> Result<BlockSolution, crate::LpError> {
    let n = block.cost.len();
    let m = block.rhs.len();
    if m > MAX_DENSE_ROWS {
        return Err(crate::LpError::TooLarge(m));
    }
    let mut lower: Vec<f64> = block.lower.clone();
    let mut upper: Vec<f64> = block.upper.clone();
    lower.extend_from_slice(&block.slack_lower);
    upper.extend_from_slice(&block.slack_upper);

    let mut x = vec![0.0; n + m];
    let mut state = vec![At::Basic; n + m];
    for j in 0..n {
        let (v, s) = initial_bound(lower[j], upper[j]);
        x[j] = v;
        state[j] = s;
    }
    let mut residual = block.rhs.clone();
    for (j, col) in block.cols.iter().enumerate() {
        if x[j] != 0.0 {
            for &(i, a) in col {
                residual[i] -= a * x[j];
            }
        }
    }
    let mut basis = Vec::with_capacity(m);
    let mut art_row = Vec::new();
    let mut art_sign = Vec::new();
    for (i, &r) in residual.iter().enumerate() {
        let s = n + i;
        if r >= lower[s] - feas_tol && r <= upper[s] + feas_tol {
            x[s] = r;
            state[s] = At::Basic;
            basis.push(s);
        } else {
            let (bound, at) = if r < lower[s] {
                (lower[s], At::Lower)
            } else {
                (upper[s], At::Upper)
            };
            x[s] = bound;
            state[s] = at;
            let a = n + m + art_row.len();
            art_row.push(i);
            art_sign.push(if r > bound { 1.0 } else { -1.0 });
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push((r - bound).abs());
            state.push(At::Basic);
            basis.push(a);
        }
    }
    let mut binv = vec![0.0; m * m];
    for (r, &j) in basis.iter().enumerate() {
        // Slack and artificial columns are signed unit vectors on their own row.
        let (row, sign) = if j < n + m { (j - n, 1.0) } else { (art_row[j - n - m], art_sign[j - n - m]) };
        debug_assert_eq!(row, r);
        binv[r * m + row] = 1.0 / sign;
    }
    let total = n + m + art_row.len();
    let mut t = Tableau {
        block,
        n,
        m,
        art_row,
        art_sign,
        lower,
        upper,
        x,
        state,
        basis,
        binv,
        feas_tol,
        iterations: 0,
        max_iterations: 20 * total + 10_000,
    };

    if !t.art_row.is_empty() {
        let mut phase1 = vec![0.0; total];
        for c in phase1.iter_mut().skip(n + m) {
            *c = 1.0;
        }
        t.run(&phase1, opt_tol, true)?;
        let infeasibility: f64 = t.x[n + m..].iter().sum();
        let scale = 1.0 + block.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if infeasibility > feas_tol * scale {
            return Ok(BlockSolution {
                status: Status::Infeasible,
                x: t.x[..n].to_vec(),
                iterations: t.iterations,
            });
        }
        for a in n + m..total {
            t.upper[a] = 0.0;
            if t.state[a] != At::Basic {
                t.x[a] = 0.0;
                t.state[a] = At::Lower;
            }
        }
    }

    let mut phase2 = vec![0.0; total];
    phase2[..n].copy_from_slice(&block.cost);
    let cmax = block.cost.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let status = if cmax == 0.0 {
        Status::Optimal
    } else {
        t.run(&phase2, opt_tol * cmax, false)?
    };
    t.refactor()?;
    Ok(BlockSolution {
        status,
        x: t.x[..n].to_vec(),
        iterations: t.iterations,
    })
}

fn initial_bound(lo: f64, up: f64) -> (f64, At) {
    if lo.is_finite() {
        (lo, At::Lower)
    } else if up.is_finite() {
        (up, At::Upper)
    } else {
        (0.0, At::Zero)
    }
}

impl Tableau<'_> {
    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if j < self.n {
            out.extend_from_slice(&self.block.cols[j]);
        } else if j < self.n + self.m {
            out.push((j - self.n, 1.0));
        } else {
            let k = j - self.n - self.m;
            out.push((self.art_row[k], self.art_sign[k]));
        }
    }

    /// Minimizes `cost · x` from the current basis; phase one never reports unboundedness.
    fn run(&mut self, cost: &[f64], opt_tol: f64, phase_one: bool) -> Result<Status, crate::LpError> {
        let m = self.m;
        let total = cost.len();
        let mut y = vec![0.0; m];
        let mut alpha = vec![0.0; m];
        let mut col = Vec::new();
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut since_refactor = 0usize;
        let refactor_every = 100usize.max(m / 2);
        loop {
            if self.iterations >= self.max_iterations {
                return Err(crate::LpError::IterationLimit(self.iterations));
            }
            if since_refactor >= refactor_every {
                self.refactor()?;
                since_refactor = 0;
            }
            // Duals.
            y.iter_mut().for_each(|v| *v = 0.0);
            for (r, &j) in self.basis.iter().enumerate() {
                let cb = cost[j];
                if cb != 0.0 {
                    let row = &self.binv[r * m..(r + 1) * m];
                    for (yi, b) in y.iter_mut().zip(row) {
                        *yi += cb * b;
                    }
                }
            }
            // Pricing.
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..total {
                let st = self.state[j];
                if st == At::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                self.column(j, &mut col);
                let d = cost[j] - col.iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                let dir = match st {
                    At::Lower if d < -opt_tol => 1.0,
                    At::Upper if d > opt_tol => -1.0,
                    At::Zero if d < -opt_tol => 1.0,
                    At::Zero if d > opt_tol => -1.0,
                    _ => continue,
                };
                if bland {
                    entering = Some((j, d, dir));
                    break;
                }
                if entering.map_or(true, |(_, best, _)| d.abs() > best.abs()) {
                    entering = Some((j, d, dir));
                }
            }
            let Some((q, _, dir)) = entering else {
                return Ok(Status::Optimal);
            };
            self.column(q, &mut col);
            alpha.iter_mut().for_each(|v| *v = 0.0);
            for &(i, a) in &col {
                for r in 0..m {
                    alpha[r] += self.binv[r * m + i] * a;
                }
            }
            // Harris ratio test: x_B changes by -dir * theta * alpha. The
            // first pass finds the step allowed with bounds relaxed by the
            // feasibility tolerance, the second takes the largest pivot
            // within that step.
            let amax = alpha.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let pivot_tol = PIVOT_TOL * amax.max(1.0);
            let limit_of = |r: usize, relax: f64| -> Option<(f64, bool)> {
                let rate = -dir * alpha[r];
                if rate.abs() <= pivot_tol {
                    return None;
                }
                let j = self.basis[r];
                if rate < 0.0 {
                    (self.lower[j] > f64::NEG_INFINITY)
                        .then(|| ((self.x[j] - self.lower[j] + relax) / -rate, false))
                } else {
                    (self.upper[j] < f64::INFINITY)
                        .then(|| ((self.upper[j] - self.x[j] + relax) / rate, true))
                }
            };
            let span = self.upper[q] - self.lower[q];
            let mut relaxed = f64::INFINITY;
            for r in 0..m {
                if let Some((limit, _)) = limit_of(r, self.feas_tol) {
                    relaxed = relaxed.min(limit);
                }
            }
            let mut theta = span;
            let mut leave: Option<(usize, bool)> = None;
            if relaxed < span {
                let mut best = 0.0f64;
                for r in 0..m {
                    if let Some((limit, to_upper)) = limit_of(r, 0.0) {
                        if limit > relaxed {
                            continue;
                        }
                        let size = alpha[r].abs();
                        let better = match leave {
                            None => true,
                            Some((b, _)) if bland => self.basis[r] < self.basis[b],
                            Some(_) => size > best,
                        };
                        if better {
                            best = size;
                            theta = limit.max(0.0);
                            leave = Some((r, to_upper));
                        }
                    }
                }
            }
            if theta == f64::INFINITY {
                if phase_one {
                    return Err(crate::LpError::Numerical("unbounded phase one".into()));
                }
                return Ok(Status::Unbounded);
            }
            self.iterations += 1;
            since_refactor += 1;
            if theta <= self.feas_tol * 1e-3 {
                degenerate += 1;
                if degenerate > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            self.x[q] += dir * theta;
            for r in 0..m {
                if alpha[r] != 0.0 {
                    let j = self.basis[r];
                    self.x[j] -= dir * theta * alpha[r];
                }
            }
            match leave {
                None => {
                    // Bound flip.
                    if dir > 0.0 {
                        self.x[q] = self.upper[q];
                        self.state[q] = At::Upper;
                    } else {
                        self.x[q] = self.lower[q];
                        self.state[q] = At::Lower;
                    }
                }
                Some((r, to_upper)) => {
                    let j = self.basis[r];
                    if to_upper {
                        self.x[j] = self.upper[j];
                        self.state[j] = At::Upper;
                    } else {
                        self.x[j] = self.lower[j];
                        self.state[j] = At::Lower;
                    }
                    self.state[q] = At::Basic;
                    self.basis[r] = q;
                    self.pivot(r, &alpha);
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[r];
        for c in 0..m {
            self.binv[r * m + c] /= p;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (prow, after) = rest.split_at_mut(m);
        for (i, row) in before.chunks_exact_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
            }
        }
        for (i, row) in after.chunks_exact_mut(m).enumerate() {
            let f = alpha[r + 1 + i];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
            }
        }
    }

    /// Recomputes the basis inverse and the basic values from scratch.
    fn refactor(&mut self) -> Result<(), crate::LpError> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        let mut b = vec![0.0; m * m];
        let mut col = Vec::new();
        for (r, &j) in self.basis.iter().enumerate() {
            self.column(j, &mut col);
            for &(i, a) in &col {
                b[i * m + r] = a;
            }
        }
        match invert(b, m) {
            Some(inv) => self.binv = inv,
            None => return Err(crate::LpError::Numerical("singular basis".into())),
        }
        let mut rhs = self.block.rhs.clone();
        for j in 0..self.x.len() {
            if self.state[j] != At::Basic && self.x[j] != 0.0 {
                self.column(j, &mut col);
                for &(i, a) in &col {
                    rhs[i] -= a * self.x[j];
                }
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.x[self.basis[r]] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }
}

/// Gauss–Jordan inverse with partial pivoting, row-major.
fn invert(mut a: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i * m + c].abs().total_cmp(&a[j * m + c].abs()))?;
        if a[p * m + c].abs() < 1e-13 {
            return None;
        }
        if p != c {
            for k in 0..m {
                a.swap(p * m + k, c * m + k);
                inv.swap(p * m + k, c * m + k);
            }
        }
        let d = a[c * m + c];
        for k in 0..m {
            a[c * m + k] /= d;
            inv[c * m + k] /= d;
        }
        for i in 0..m {
            if i != c {
                let f = a[i * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[i * m + k] -= f * a[c * m + k];
                        inv[i * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
    }
    Some(inv)
}
