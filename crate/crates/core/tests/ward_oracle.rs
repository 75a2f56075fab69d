use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsagg_core::{ward_cluster, ward_linkage, CandidateMatrix};
use tsagg_oracles::{best_bipartition, naive_ward, partition_sse};

/// Replays the dendrogram and returns each merge as (members, members, cost).
fn member_merges(rows: &[Vec<f64>]) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let c = CandidateMatrix::from_rows(rows).unwrap();
    let d = ward_linkage(&c);
    let n = rows.len();
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    d.merges()
        .iter()
        .map(|m| {
            let (l, r) = (members[m.left].clone(), members[m.right].clone());
            let mut joined = [l.clone(), r.clone()].concat();
            joined.sort_unstable();
            members.push(joined);
            if l[0] < r[0] {
                (l, r, m.cost)
            } else {
                (r, l, m.cost)
            }
        })
        .collect()
}

#[test]
fn nn_chain_matches_naive_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let n = rng.gen_range(2..=8);
        let dim = 1 + trial % 2;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
            .collect();
        let got = member_merges(&rows);
        let want = naive_ward(&rows);
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            let (wl, wr) = if w.left[0] < w.right[0] {
                (&w.left, &w.right)
            } else {
                (&w.right, &w.left)
            };
            assert_eq!((&g.0, &g.1), (wl, wr), "trial {trial}");
            assert!((g.2 - w.cost).abs() <= 1e-12 * w.cost.max(1.0), "trial {trial}");
        }
    }
}

#[test]
fn two_pair_instance_is_sse_optimal() {
    let rows: Vec<Vec<f64>> = [0.0, 1.0, 10.0, 11.0].iter().map(|x| vec![*x]).collect();
    let r = ward_cluster(&CandidateMatrix::from_rows(&rows).unwrap(), 2).unwrap();
    let (best, best_sse) = best_bipartition(&rows);
    assert_eq!(r.assignment, best);
    assert_eq!(partition_sse(&rows, &r.assignment), best_sse);
}

#[test]
fn merge_costs_sum_to_total_sse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows: Vec<Vec<f64>> = (0..300)
        .map(|_| (0..3).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let d = ward_linkage(&CandidateMatrix::from_rows(&rows).unwrap());
    let total: f64 = d.merges().iter().map(|m| m.cost).sum();
    let sse = partition_sse(&rows, &vec![0; rows.len()]);
    assert!((total - sse).abs() < 1e-9 * sse);
    for k in [1, 2, 7, 50, 299, 300] {
        let labels = d.cut(k).unwrap();
        let kept: f64 = d.merges()[..300 - k].iter().map(|m| m.cost).sum();
        assert!((partition_sse(&rows, &labels) - kept).abs() < 1e-9 * sse.max(1.0));
    }
}
