//! Seeded k-means (k-means++ initialization, Lloyd iterations).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_ITERATIONS: usize = 300;
pub const CENTROID_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Sum of squared distances after each Lloyd iteration.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
}

impl KMeansResult {
    pub fn objective(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(0.0)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding. Returns fewer than `k` centers when the data has fewer
/// than `k` distinct points.
fn plus_plus(points: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.gen_range(0..n as u64) as usize].to_vec());
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            break;
        }
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = n - 1;
        for (i, &d) in d2.iter().enumerate() {
            acc += d;
            if d > 0.0 && acc >= target {
                chosen = i;
                break;
            }
        }
        // guard against float shortfall landing on a zero-weight tail point
        if d2[chosen] == 0.0 {
            chosen = d2.iter().rposition(|&d| d > 0.0).expect("total > 0");
        }
        let c = points[chosen].to_vec();
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &c));
        }
        centers.push(c);
    }
    centers
}

fn assign(points: &[&[f64]], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut objective = 0.0;
    let assignments = points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            objective += best_d;
            best
        })
        .collect();
    (assignments, objective)
}

pub fn kmeans(points: &[&[f64]], k: usize, seed: u64) -> KMeansResult {
    assert!(k >= 1, "k must be at least 1");
    if points.is_empty() {
        return KMeansResult {
            assignments: Vec::new(),
            centroids: Vec::new(),
            objective_history: Vec::new(),
            iterations: 0,
        };
    }
    let dim = points[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus(points, k, &mut rng);
    let mut history = Vec::new();
    let mut assignments = Vec::new();
    let mut iterations = 0;

    for _ in 0..MAX_ITERATIONS {
        iterations += 1;
        assignments = assign(points, &centroids).0;
        let mut sums = vec![vec![0.0; dim]; centroids.len()];
        let mut counts = vec![0usize; centroids.len()];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p.iter()) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for (c, (sum, &count)) in sums.into_iter().zip(&counts).enumerate() {
            if count == 0 {
                continue; // empty cluster keeps its centroid
            }
            let updated: Vec<f64> = sum.into_iter().map(|s| s / count as f64).collect();
            shift = shift.max(sq_dist(&updated, &centroids[c]).sqrt());
            centroids[c] = updated;
        }
        let objective: f64 = points
            .iter()
            .zip(&assignments)
            .map(|(p, &a)| sq_dist(p, &centroids[a]))
            .sum();
        history.push(objective);
        if shift < CENTROID_TOLERANCE {
            break;
        }
    }
    KMeansResult {
        assignments,
        centroids,
        objective_history: history,
        iterations,
    }
}
