//! Brute-force reference implementations for tests. Deliberately naive.

/// A Ward merge described by the members of the two merged clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct RefMerge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Increase of the within-cluster sum of squares.
    pub cost: f64,
}

/// Ward agglomeration on a full distance matrix with the Lance–Williams
/// update, picking the globally cheapest pair at every step. Ties go to the
/// lexicographically smallest pair of cluster ids, a cluster's id being its
/// smallest member.
pub fn naive_ward(points: &[Vec<f64>]) -> Vec<RefMerge> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            d[i][j] = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
        }
    }
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut alive = vec![true; n];
    let mut out = Vec::new();
    for _ in 1..n {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                if alive[i] && alive[j] && d[i][j] < best.2 {
                    best = (i, j, d[i][j]);
                }
            }
        }
        let (i, j, dij) = best;
        let (ni, nj) = (members[i].len() as f64, members[j].len() as f64);
        for k in 0..n {
            if alive[k] && k != i && k != j {
                let nk = members[k].len() as f64;
                let v = ((ni + nk) * d[i][k] + (nj + nk) * d[j][k] - nk * dij) / (ni + nj + nk);
                d[i][k] = v;
                d[k][i] = v;
            }
        }
        out.push(RefMerge {
            left: members[i].clone(),
            right: members[j].clone(),
            cost: dij / 2.0,
        });
        let moved = std::mem::take(&mut members[j]);
        members[i].extend(moved);
        members[i].sort_unstable();
        alive[j] = false;
    }
    out
}

/// Within-cluster sum of squares of a labelled partition.
pub fn partition_sse(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let dim = points.first().map_or(0, Vec::len);
    let mut sum = vec![vec![0.0; dim]; k];
    let mut count = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        count[l] += 1;
        for (s, v) in sum[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| {
            p.iter()
                .zip(&sum[l])
                .map(|(v, s)| {
                    let c = s / count[l] as f64;
                    (v - c) * (v - c)
                })
                .sum::<f64>()
        })
        .sum()
}

/// Two-cluster partition with minimal SSE by enumerating every split.
pub fn best_bipartition(points: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = points.len();
    assert!((2..=20).contains(&n));
    let mut best = (Vec::new(), f64::INFINITY);
    // Point 0 always carries label 0, so each split is seen once.
    for mask in 1u32..(1 << (n - 1)) {
        let labels: Vec<usize> = (0..n)
            .map(|i| if i > 0 && mask & (1 << (i - 1)) != 0 { 1 } else { 0 })
            .collect();
        let sse = partition_sse(points, &labels);
        if sse < best.1 {
            best = (labels, sse);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

/// Small dense LP: minimize `cost · x` subject to rows and finite bounds.
#[derive(Debug, Clone)]
pub struct DenseLp {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
}

/// Optimal objective by enumerating every vertex of the feasible box-polytope;
/// `None` if no vertex is feasible. Bounds must be finite.
pub fn vertex_enumeration(lp: &DenseLp, tol: f64) -> Option<f64> {
    let n = lp.cost.len();
    let mut planes: Vec<(Vec<f64>, f64, bool)> = Vec::new();
    for (a, sense, b) in &lp.rows {
        planes.push((a.clone(), *b, *sense == Sense::Eq));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower[j], false));
        planes.push((e, lp.upper[j], false));
    }
    let required: Vec<usize> = (0..planes.len()).filter(|&i| planes[i].2).collect();
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    choose(planes.len(), n, 0, &mut pick, &mut |idx: &[usize]| {
        if required.len() <= n && required.iter().any(|r| !idx.contains(r)) {
            return;
        }
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(lp, &x, tol) {
                let z: f64 = lp.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                if best.map_or(true, |b| z < b) {
                    best = Some(z);
                }
            }
        }
    });
    best
}

fn choose(m: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..m {
        if m - i < k - pick.len() {
            break;
        }
        pick.push(i);
        choose(m, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Gaussian elimination with partial pivoting; `None` for (near-)singular systems.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn feasible(lp: &DenseLp, x: &[f64], tol: f64) -> bool {
    let bounds = x
        .iter()
        .enumerate()
        .all(|(j, v)| *v >= lp.lower[j] - tol && *v <= lp.upper[j] + tol);
    bounds
        && lp.rows.iter().all(|(a, sense, b)| {
            let lhs: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
            match sense {
                Sense::Le => lhs <= b + tol,
                Sense::Ge => lhs >= b - tol,
                Sense::Eq => (lhs - b).abs() <= tol,
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merit_order() {
        let lp = DenseLp {
            cost: vec![1.0, 2.0],
            lower: vec![0.0, 0.0],
            upper: vec![6.0, 6.0],
            rows: vec![(vec![1.0, 1.0], Sense::Eq, 10.0)],
        };
        assert_eq!(vertex_enumeration(&lp, 1e-9), Some(14.0));
    }

    #[test]
    fn two_pairs_partition() {
        let pts: Vec<Vec<f64>> = [0.0, 1.0, 10.0, 11.0].iter().map(|x| vec![*x]).collect();
        let (labels, sse) = best_bipartition(&pts);
        assert_eq!(labels, vec![0, 0, 1, 1]);
        assert_eq!(sse, 1.0);
        let merges = naive_ward(&pts);
        assert_eq!(merges[0].left, vec![0]);
        assert_eq!(merges[2].cost, 100.0);
    }
}
