//! Density-based clustering of scalar values.

use std::collections::VecDeque;

/// Cluster assignment of one input value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assignment {
    Cluster(usize),
    Noise,
}

/// DBSCAN over one-dimensional data.
///
/// Neighbourhoods are closed (`|a - b| <= eps`) and include the point itself,
/// so a point is a core point when at least `min_pts` values lie within `eps`
/// of it. Points are visited in ascending order, so cluster 0 always contains
/// the smallest clustered value and cluster ids increase with value.
pub fn dbscan_1d(values: &[f64], eps: f64, min_pts: usize) -> Vec<Assignment> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    // neighbours of a sorted position form a contiguous window
    let region = |pos: usize| -> (usize, usize) {
        let x = sorted[pos];
        let mut lo = pos;
        while lo > 0 && (x - sorted[lo - 1]).abs() <= eps {
            lo -= 1;
        }
        let mut hi = pos;
        while hi + 1 < n && (sorted[hi + 1] - x).abs() <= eps {
            hi += 1;
        }
        (lo, hi)
    };

    let mut labels: Vec<Option<Assignment>> = vec![None; n];
    let mut next_cluster = 0;
    for pos in 0..n {
        if labels[pos].is_some() {
            continue;
        }
        let (lo, hi) = region(pos);
        if hi - lo + 1 < min_pts {
            labels[pos] = Some(Assignment::Noise);
            continue;
        }
        let cluster = next_cluster;
        next_cluster += 1;
        labels[pos] = Some(Assignment::Cluster(cluster));
        let mut queue: VecDeque<usize> = (lo..=hi).filter(|&q| q != pos).collect();
        while let Some(q) = queue.pop_front() {
            match labels[q] {
                Some(Assignment::Noise) => {
                    // border point reached from a core point
                    labels[q] = Some(Assignment::Cluster(cluster));
                    continue;
                }
                Some(Assignment::Cluster(_)) => continue,
                None => labels[q] = Some(Assignment::Cluster(cluster)),
            }
            let (qlo, qhi) = region(q);
            if qhi - qlo + 1 >= min_pts {
                queue.extend(qlo..=qhi);
            }
        }
    }

    let mut out = vec![Assignment::Noise; n];
    for (pos, &orig) in order.iter().enumerate() {
        out[orig] = labels[pos].unwrap_or(Assignment::Noise);
    }
    out
}
