//! Large blocks: conic interior-point solve through `clarabel`.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus, ZeroConeT,
};

use crate::simplex::{Block, BlockSolution};
use crate::{LpError, Status};

pub fn solve_block(block: &Block, feas_tol: f64, opt_tol: f64) -> Result<BlockSolution, LpError> {
    let n = block.cost.len();
    let m = block.rhs.len();
    // Row r of the block maps to (conic row, sign).
    let mut map = vec![(0usize, 1.0f64); m];
    let mut b = Vec::with_capacity(m + 2 * n);
    let mut next = 0;
    for r in 0..m {
        if block.slack_lower[r] == block.slack_upper[r] {
            map[r] = (next, 1.0);
            b.push(block.rhs[r] - block.slack_lower[r]);
            next += 1;
        }
    }
    let n_eq = next;
    for r in 0..m {
        if block.slack_lower[r] != block.slack_upper[r] {
            // Slack in [0, inf) means a·x <= b, slack in (-inf, 0] means a·x >= b.
            if block.slack_upper[r] == f64::INFINITY {
                map[r] = (next, 1.0);
                b.push(block.rhs[r] - block.slack_lower[r]);
            } else {
                map[r] = (next, -1.0);
                b.push(-(block.rhs[r] - block.slack_upper[r]));
            }
            next += 1;
        }
    }
    let mut ti = Vec::new();
    let mut tj = Vec::new();
    let mut tv = Vec::new();
    for (j, col) in block.cols.iter().enumerate() {
        for &(r, a) in col {
            let (row, sign) = map[r];
            ti.push(row);
            tj.push(j);
            tv.push(sign * a);
        }
    }
    for j in 0..n {
        if block.lower[j].is_finite() {
            ti.push(next);
            tj.push(j);
            tv.push(-1.0);
            b.push(-block.lower[j]);
            next += 1;
        }
        if block.upper[j].is_finite() {
            ti.push(next);
            tj.push(j);
            tv.push(1.0);
            b.push(block.upper[j]);
            next += 1;
        }
    }
    let a = CscMatrix::new_from_triplets(next, n, ti, tj, tv);
    let p = CscMatrix::zeros((n, n));
    let cones = [ZeroConeT(n_eq), NonnegativeConeT(next - n_eq)];
    let tight = (feas_tol.min(opt_tol) * 1e-3).max(1e-12);
    // Equilibration with default regularization converges on most blocks;
    // some badly scaled ones only finish without it.
    let attempts = [(true, 1e-8), (false, 1e-11), (true, 1e-7)];
    let mut fallback: Option<(f64, Status, Vec<f64>, usize)> = None;
    let mut last_failure = None;
    for (equilibrate, reg) in attempts {
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(400)
            .tol_gap_abs(tight)
            .tol_gap_rel(tight)
            .tol_feas(tight)
            .equilibrate_enable(equilibrate)
            .static_regularization_constant(reg)
            .iterative_refinement_reltol(1e-14)
            .iterative_refinement_abstol(1e-14)
            .iterative_refinement_max_iter(20)
            .build()
            .map_err(|e| LpError::Numerical(format!("{e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &block.cost, &a, &b, &cones, settings)
            .map_err(|e| LpError::Numerical(format!("{e:?}")))?;
        solver.solve();
        let status = match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => Status::Optimal,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => Status::Infeasible,
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => Status::Unbounded,
            other => {
                last_failure = Some(other);
                continue;
            }
        };
        let x: Vec<f64> = solver
            .solution
            .x
            .iter()
            .enumerate()
            .map(|(j, v)| v.clamp(block.lower[j], block.upper[j]))
            .collect();
        let iterations = solver.info.iterations as usize;
        let exact = matches!(
            solver.solution.status,
            SolverStatus::Solved | SolverStatus::PrimalInfeasible | SolverStatus::DualInfeasible
        );
        let info = &solver.info;
        let residual = info.gap_rel.max(info.res_primal).max(info.res_dual);
        // Stalling just short of the tight target is still far inside the
        // caller's tolerances.
        if exact || (status == Status::Optimal && residual <= tight * 10.0) {
            return Ok(BlockSolution { status, x, iterations });
        }
        if fallback.as_ref().map_or(true, |f| residual < f.0) {
            fallback = Some((residual, status, x, iterations));
        }
    }
    match fallback {
        Some((_, status, x, iterations)) => Ok(BlockSolution { status, x, iterations }),
        None => Err(LpError::Numerical(format!("interior point stopped: {last_failure:?}"))),
    }
}
