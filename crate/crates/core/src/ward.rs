//! Ward clustering via the nearest-neighbor chain.
//!
//! Only centroids and sizes of the active clusters are kept; the Ward
//! distance between two clusters is recomputed from them when needed,
//! which equals the Lance–Williams recurrence on squared Euclidean
//! distances. Active clusters are identified by their smallest member.

use std::collections::BTreeSet;

use crate::{AggError, CandidateMatrix, CandidateMode};

/// One agglomeration step in dendrogram order.
///
/// Labels follow the usual linkage-matrix convention: leaves are
/// `0..n`, the cluster created by merge `i` is `n + i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    /// Increase of the total within-cluster sum of squares.
    pub cost: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_leaves(&self) -> usize {
        self.n
    }

    /// Merges ordered by non-decreasing cost.
    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Flat clustering with `k` clusters, labelled by first-occurring member.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>, AggError> {
        if k == 0 || k > self.n {
            return Err(AggError::ClusterCount { k, n: self.n });
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        let mut leaf_of: Vec<usize> = (0..self.n).collect();
        for m in &self.merges[..self.n - k] {
            let ra = find(&mut parent, leaf_of[m.left]);
            let rb = find(&mut parent, leaf_of[m.right]);
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            parent[hi] = lo;
            leaf_of.push(lo);
        }
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let r = find(&mut parent, i);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out.push(label[r]);
        }
        Ok(out)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Cluster means in normalized space, one row of candidate dimension per cluster.
    pub centroids: Vec<Vec<f64>>,
    pub mode: CandidateMode,
    pub attribute_names: Vec<String>,
}

impl ClusterResult {
    /// Builds a result from any labelling of the candidates. Labels are
    /// renumbered by first-occurring member and centroids recomputed.
    pub fn from_assignment(
        candidates: &CandidateMatrix,
        labels: &[usize],
    ) -> Result<Self, AggError> {
        if labels.len() != candidates.n_candidates() {
            return Err(AggError::Shape(format!(
                "{} labels for {} candidates",
                labels.len(),
                candidates.n_candidates()
            )));
        }
        let mut renumber = std::collections::HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = renumber.len();
                *renumber.entry(*l).or_insert(next)
            })
            .collect();
        let k = renumber.len();
        let dim = candidates.dim();
        let mut sizes = vec![0usize; k];
        let mut centroids = vec![vec![0.0; dim]; k];
        for (row, &c) in candidates.rows().zip(&assignment) {
            sizes[c] += 1;
            for (acc, v) in centroids[c].iter_mut().zip(row) {
                *acc += v;
            }
        }
        for (centroid, &size) in centroids.iter_mut().zip(&sizes) {
            for v in centroid.iter_mut() {
                *v /= size as f64;
            }
        }
        Ok(Self {
            k,
            assignment,
            sizes,
            centroids,
            mode: candidates.mode(),
            attribute_names: candidates.attribute_names().to_vec(),
        })
    }

    pub fn n_candidates(&self) -> usize {
        self.assignment.len()
    }

    /// Members of each cluster in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

fn ward_distance(ca: &[f64], na: usize, cb: &[f64], nb: usize) -> f64 {
    let sq: f64 = ca.iter().zip(cb).map(|(x, y)| (x - y) * (x - y)).sum();
    let (na, nb) = (na as f64, nb as f64);
    2.0 * na * nb / (na + nb) * sq
}

/// Full Ward merge tree of the candidates.
pub fn ward_linkage(candidates: &CandidateMatrix) -> Dendrogram {
    let n = candidates.n_candidates();
    let dim = candidates.dim();
    let mut centroid: Vec<f64> = candidates.rows().flatten().copied().collect();
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    // Linked list of active slots so each scan skips merged ones.
    let mut next_active: Vec<usize> = (1..=n).collect();
    let mut prev_active: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
    let mut head = 0usize;
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::new();

    let c = |i: usize| i * dim..(i + 1) * dim;

    for _ in 1..n {
        if chain.is_empty() {
            chain.push(head);
        }
        let (a, b) = loop {
            let a = *chain.last().unwrap();
            let prev = if chain.len() >= 2 {
                Some(chain[chain.len() - 2])
            } else {
                None
            };
            let ca = &centroid[c(a)];
            let (mut best, mut best_d) = match prev {
                Some(p) => (p, ward_distance(ca, size[a], &centroid[c(p)], size[p])),
                None => (usize::MAX, f64::INFINITY),
            };
            let mut j = head;
            while j < n {
                if j != a && Some(j) != prev {
                    let d = ward_distance(ca, size[a], &centroid[c(j)], size[j]);
                    if d < best_d {
                        best = j;
                        best_d = d;
                    }
                }
                j = next_active[j];
            }
            if Some(best) == prev {
                chain.pop();
                chain.pop();
                break (a, best);
            }
            chain.push(best);
        };
        let (lo, hi) = (a.min(b), a.max(b));
        let d = ward_distance(
            &centroid[c(lo)],
            size[lo],
            &centroid[c(hi)],
            size[hi],
        );
        raw.push((lo, hi, d / 2.0));
        let (nl, nh) = (size[lo] as f64, size[hi] as f64);
        for f in 0..dim {
            let merged = (nl * centroid[lo * dim + f] + nh * centroid[hi * dim + f]) / (nl + nh);
            centroid[lo * dim + f] = merged;
        }
        size[lo] += size[hi];
        active[hi] = false;
        let (p, q) = (prev_active[hi], next_active[hi]);
        if hi == head {
            head = q;
        } else {
            next_active[p] = q;
        }
        if q < n {
            prev_active[q] = p;
        }
    }
    debug_assert_eq!(active.iter().filter(|x| **x).count(), n.min(1));

    // Stable sort keeps chain order among equal costs.
    raw.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut label_of_slot: Vec<usize> = (0..n).collect();
    let mut slot_size = vec![1usize; n];
    let merges = raw
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi, cost))| {
            let (l, r) = (label_of_slot[lo], label_of_slot[hi]);
            slot_size[lo] += slot_size[hi];
            label_of_slot[lo] = n + i;
            Merge {
                left: l.min(r),
                right: l.max(r),
                cost,
                size: slot_size[lo],
            }
        })
        .collect();
    Dendrogram { n, merges }
}

/// Ward clustering of the candidates into `k` clusters represented by their centroids.
pub fn ward_cluster(candidates: &CandidateMatrix, k: usize) -> Result<ClusterResult, AggError> {
    let n = candidates.n_candidates();
    if k == 0 || k > n {
        return Err(AggError::ClusterCount { k, n });
    }
    let labels = ward_linkage(candidates).cut(k)?;
    ClusterResult::from_assignment(candidates, &labels)
}

/// Moves the candidate holding each named attribute's maximum into its own cluster.
pub fn inject_extreme_candidates(
    candidates: &CandidateMatrix,
    result: &ClusterResult,
    attributes: &[&str],
) -> Result<ClusterResult, AggError> {
    if result.assignment.len() != candidates.n_candidates() {
        return Err(AggError::Shape(
            "cluster result does not belong to these candidates".into(),
        ));
    }
    let mut extremes = BTreeSet::new();
    for name in attributes {
        let a = candidates
            .attribute_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AggError::UnknownAttribute(name.to_string()))?;
        let features = candidates.features_of(a);
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, row) in candidates.rows().enumerate() {
            let m = row[features.clone()].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if m > best.1 {
                best = (i, m);
            }
        }
        extremes.insert(best.0);
    }
    let mut labels = result.assignment.clone();
    let mut sizes = result.sizes.clone();
    let mut next = result.k;
    for i in extremes {
        let c = labels[i];
        if sizes[c] > 1 {
            sizes[c] -= 1;
            labels[i] = next;
            sizes.push(1);
            next += 1;
        }
    }
    if next == result.k {
        return Ok(result.clone());
    }
    ClusterResult::from_assignment(candidates, &labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64]) -> CandidateMatrix {
        CandidateMatrix::from_rows(&xs.iter().map(|x| vec![*x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_pairs() {
        let c = one_d(&[0.0, 1.0, 10.0, 11.0]);
        let r = ward_cluster(&c, 2).unwrap();
        assert_eq!(r.assignment, vec![0, 0, 1, 1]);
        assert_eq!(r.sizes, vec![2, 2]);
        assert_eq!(r.centroids, vec![vec![0.5], vec![10.5]]);
    }

    #[test]
    fn extremes_of_single_cluster() {
        let c = one_d(&[0.0, 1.0, 10.0, 11.0]);
        let r = ward_cluster(&c, 1).unwrap();
        assert_eq!(r.centroids[0][0], 5.5);
        let e = inject_extreme_candidates(&c, &r, &["x0"]).unwrap();
        assert_eq!(e.k, 2);
        assert_eq!(e.assignment, vec![0, 0, 0, 1]);
        assert!((e.centroids[0][0] - 11.0 / 3.0).abs() < 1e-15);
        let again = inject_extreme_candidates(&c, &e, &["x0"]).unwrap();
        assert_eq!(again, e);
        assert!(matches!(
            inject_extreme_candidates(&c, &r, &["nope"]),
            Err(AggError::UnknownAttribute(_))
        ));
    }

    #[test]
    fn shared_extreme_gives_one_singleton() {
        let c = CandidateMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![0.2, 0.1]]).unwrap();
        let r = ward_cluster(&c, 1).unwrap();
        let e = inject_extreme_candidates(&c, &r, &["x0", "x1"]).unwrap();
        assert_eq!(e.k, 2);
        assert_eq!(e.assignment, vec![0, 1, 0]);
    }

    #[test]
    fn endpoints() {
        let c = one_d(&[3.0, 1.0, 2.0]);
        let all = ward_cluster(&c, 3).unwrap();
        assert_eq!(all.assignment, vec![0, 1, 2]);
        assert_eq!(all.centroids, vec![vec![3.0], vec![1.0], vec![2.0]]);
        let one = ward_cluster(&c, 1).unwrap();
        assert_eq!(one.centroids, vec![vec![2.0]]);
        assert!(ward_cluster(&c, 0).is_err());
        assert!(ward_cluster(&c, 4).is_err());
    }

    #[test]
    fn ties_prefer_smallest_pair() {
        let c = one_d(&[0.0, 1.0, 2.0, 3.0]);
        let d = ward_linkage(&c);
        assert_eq!((d.merges()[0].left, d.merges()[0].right), (0, 1));
        assert_eq!((d.merges()[1].left, d.merges()[1].right), (2, 3));
    }
}
