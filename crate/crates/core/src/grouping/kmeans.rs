use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-9;
pub const RESTARTS: usize = 10;

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn centroid(points: &[&[f64]]) -> Vec<f64> {
    let dim = points.first().map_or(0, |p| p.len());
    let mut c = vec![0.0; dim];
    for p in points {
        c.iter_mut().zip(p.iter()).for_each(|(s, x)| *s += x);
    }
    let n = points.len().max(1) as f64;
    c.iter_mut().for_each(|s| *s /= n);
    c
}

/// Lloyd's algorithm with k-means++ seeding, restarted [`RESTARTS`] times
/// from one seeded stream; the run with the lowest inertia wins, the earliest
/// on ties.
///
/// Returns the cluster index of every point. `k` is reduced to the number of
/// points. A cluster that loses all its points takes the point farthest from
/// its own centroid, as long as that distance is positive.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let k = k.min(points.len());
    if k == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..RESTARTS {
        let (assign, centers) = lloyd(points, k, &mut rng);
        let cost = inertia(points, &assign, &centers);
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, assign));
        }
    }
    best.expect("at least one restart").1
}

fn inertia(points: &[Vec<f64>], assign: &[usize], centers: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .zip(assign)
        .map(|(p, &c)| sq_dist(p, &centers[c]))
        .sum()
}

fn lloyd(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<Vec<f64>>) {
    let n = points.len();
    let mut centers = plus_plus(points, k, rng);
    let mut assign = vec![0; n];

    for _ in 0..MAX_ITERATIONS {
        for (i, p) in points.iter().enumerate() {
            assign[i] = nearest(p, &centers);
        }
        refill_empty(points, &mut assign, &centers, k);
        let mut shift: f64 = 0.0;
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<&[f64]> = (0..n)
                .filter(|&i| assign[i] == c)
                .map(|i| points[i].as_slice())
                .collect();
            if members.is_empty() {
                continue;
            }
            let next = centroid(&members);
            shift = shift.max(sq_dist(center, &next).sqrt());
            *center = next;
        }
        if shift < TOLERANCE {
            break;
        }
    }
    (assign, centers)
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best.0
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![rng.random_range(0..n)];
    while chosen.len() < k {
        let d2: Vec<f64> = points
            .iter()
            .map(|p| {
                chosen
                    .iter()
                    .map(|&c| sq_dist(p, &points[c]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, d) in d2.iter().enumerate() {
                if *d > 0.0 && target < *d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if d2[pick] == 0.0 {
                pick = d2.iter().rposition(|d| *d > 0.0).unwrap();
            }
            pick
        } else {
            // every point coincides with a chosen centre
            (0..n).find(|i| !chosen.contains(i)).unwrap()
        };
        chosen.push(next);
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn refill_empty(points: &[Vec<f64>], assign: &mut [usize], centers: &[Vec<f64>], k: usize) {
    for c in 0..k {
        if assign.contains(&c) {
            continue;
        }
        let mut counts = vec![0usize; k];
        assign.iter().for_each(|&a| counts[a] += 1);
        let far = (0..points.len())
            .filter(|&i| counts[assign[i]] > 1)
            .map(|i| (i, sq_dist(&points[i], &centers[assign[i]])))
            .filter(|(_, d)| *d > 0.0)
            .fold(None::<(usize, f64)>, |best, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        if let Some((i, _)) = far {
            assign[i] = c;
        }
    }
}
