//! Linear programs over named variables and rows.
//!
//! [`solve`] splits a model into independent blocks (variables linked
//! through shared rows) and solves each one on its own. Blocks up to
//! [`SolveOptions::simplex_max_rows`] rows go to the built-in
//! bounded-variable primal simplex; larger blocks go to an interior-point
//! solver. [`export_lp_text`] writes the model for external solvers.
//!
//! ```
//! use tsagg_lp::{solve, LinearProgram, Sense, SolveOptions, Status};
//!
//! let mut lp = LinearProgram::new();
//! let g1 = lp.add_var("g1", 0.0, 6.0, 1.0).unwrap();
//! let g2 = lp.add_var("g2", 0.0, 6.0, 2.0).unwrap();
//! lp.add_constraint("demand", [(g1, 1.0), (g2, 1.0)], Sense::Eq, 10.0).unwrap();
//! let res = solve(&lp, &SolveOptions::default()).unwrap();
//! assert_eq!(res.status, Status::Optimal);
//! assert_eq!(res.objective, 14.0);
//! ```

mod interior;
mod model;
mod simplex;
mod text;

use std::time::{Duration, Instant};

use thiserror::Error;

pub use model::{ConId, Constraint, LinearProgram, Sense, VarId, Variable};
pub use text::{export_lp_text, parse_lp_text};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("variable `{name}` has invalid bounds [{lower}, {upper}]")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("iteration limit reached after {0} iterations")]
    IterationLimit(usize),
    #[error("block with {0} rows is too large for the dense simplex")]
    TooLarge(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Simplex for blocks up to `simplex_max_rows` rows, interior point above.
    Auto,
    Simplex,
    InteriorPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub method: Method,
    pub simplex_max_rows: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            optimality_tol: 1e-7,
            method: Method::Auto,
            simplex_max_rows: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    pub objective: f64,
    /// One value per variable, in model order.
    pub primal: Vec<f64>,
    pub iterations: usize,
    pub wall_time: Duration,
    /// Number of independent blocks the model was split into.
    pub blocks: usize,
}

impl SolveResult {
    pub fn value(&self, v: VarId) -> f64 {
        self.primal[v.0]
    }
}

/// Cheapest value of a variable that appears in no row.
fn lone_variable(v: &Variable) -> Result<f64, Status> {
    if v.cost > 0.0 {
        if v.lower.is_finite() { Ok(v.lower) } else { Err(Status::Unbounded) }
    } else if v.cost < 0.0 {
        if v.upper.is_finite() { Ok(v.upper) } else { Err(Status::Unbounded) }
    } else if v.lower.is_finite() {
        Ok(v.lower)
    } else if v.upper.is_finite() {
        Ok(v.upper)
    } else {
        Ok(0.0)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Minimizes the model. Infeasibility and unboundedness are reported in
/// [`SolveResult::status`]; errors signal numerical trouble.
pub fn solve(lp: &LinearProgram, opts: &SolveOptions) -> Result<SolveResult, LpError> {
    let start = Instant::now();
    let n = lp.n_vars();
    let mut primal = vec![0.0; n];
    let mut status = Status::Optimal;
    let mut iterations = 0;

    let mut parent: Vec<usize> = (0..n).collect();
    for c in lp.constraints() {
        if let Some((first, _)) = c.terms.first() {
            let mut root = find(&mut parent, first.0);
            for (v, _) in &c.terms[1..] {
                let r = find(&mut parent, v.0);
                if r != root {
                    let (lo, hi) = (r.min(root), r.max(root));
                    parent[hi] = lo;
                    root = lo;
                }
            }
        } else {
            let ok = match c.sense {
                Sense::Le => 0.0 <= c.rhs + opts.feasibility_tol,
                Sense::Ge => 0.0 >= c.rhs - opts.feasibility_tol,
                Sense::Eq => c.rhs.abs() <= opts.feasibility_tol,
            };
            if !ok {
                status = Status::Infeasible;
            }
        }
    }
    for i in 0..n {
        find(&mut parent, i);
    }

    // Group variables and rows by block root, in order of first variable.
    let mut block_of_root = vec![usize::MAX; n];
    let mut block_vars: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        if block_of_root[r] == usize::MAX {
            block_of_root[r] = block_vars.len();
            block_vars.push(Vec::new());
        }
        block_vars[block_of_root[r]].push(i);
    }
    let mut block_rows: Vec<Vec<usize>> = vec![Vec::new(); block_vars.len()];
    for (ci, c) in lp.constraints().iter().enumerate() {
        if let Some((first, _)) = c.terms.first() {
            let r = find(&mut parent, first.0);
            block_rows[block_of_root[r]].push(ci);
        }
    }

    let mut local = vec![usize::MAX; n];
    for (vars, rows) in block_vars.iter().zip(&block_rows) {
        if rows.is_empty() {
            for &j in vars {
                match lone_variable(&lp.variables()[j]) {
                    Ok(x) => primal[j] = x,
                    Err(s) => status = worse(status, s),
                }
            }
            continue;
        }
        for (l, &j) in vars.iter().enumerate() {
            local[j] = l;
        }
        let block = make_block(lp, vars, rows, &local);
        let use_simplex = match opts.method {
            Method::Simplex => true,
            Method::InteriorPoint => false,
            Method::Auto => rows.len() <= opts.simplex_max_rows,
        };
        let sol = if use_simplex {
            simplex::solve_block(&block, opts.feasibility_tol, opts.optimality_tol)?
        } else {
            interior::solve_block(&block, opts.feasibility_tol, opts.optimality_tol)?
        };
        iterations += sol.iterations;
        status = worse(status, sol.status);
        for (l, &j) in vars.iter().enumerate() {
            primal[j] = sol.x[l];
        }
    }

    let objective = lp.objective_value(&primal);
    Ok(SolveResult {
        status,
        objective,
        primal,
        iterations,
        wall_time: start.elapsed(),
        blocks: block_vars.len(),
    })
}

fn worse(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Infeasible, _) | (_, Status::Infeasible) => Status::Infeasible,
        (Status::Unbounded, _) | (_, Status::Unbounded) => Status::Unbounded,
        _ => Status::Optimal,
    }
}

fn make_block(lp: &LinearProgram, vars: &[usize], rows: &[usize], local: &[usize]) -> simplex::Block {
    let mut cols = vec![Vec::new(); vars.len()];
    let mut rhs = Vec::with_capacity(rows.len());
    let mut slack_lower = Vec::with_capacity(rows.len());
    let mut slack_upper = Vec::with_capacity(rows.len());
    for (r, &ci) in rows.iter().enumerate() {
        let c = &lp.constraints()[ci];
        for (v, a) in &c.terms {
            cols[local[v.0]].push((r, *a));
        }
        rhs.push(c.rhs);
        let (lo, up) = match c.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (0.0, 0.0),
        };
        slack_lower.push(lo);
        slack_upper.push(up);
    }
    let v = lp.variables();
    simplex::Block {
        cost: vars.iter().map(|&j| v[j].cost).collect(),
        lower: vars.iter().map(|&j| v[j].lower).collect(),
        upper: vars.iter().map(|&j| v[j].upper).collect(),
        cols,
        rhs,
        slack_lower,
        slack_upper,
    }
}
