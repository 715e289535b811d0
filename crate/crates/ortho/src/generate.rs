//! Random connected multigraphs: a uniform spanning tree plus uniform extra
//! edges.

use std::collections::BTreeSet;

use ortho_core::graph::Multigraph;
use ortho_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tree with `n` vertices from a uniformly random Prüfer sequence.
fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &seq {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &seq {
        let leaf = leaves.pop_first().expect("a tree always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let a = leaves.pop_first().unwrap();
    let b = leaves.pop_first().unwrap();
    edges.push((a, b));
    edges
}

/// Connected multigraph with `round(n * avg_degree / 2)` edges. The first
/// `n - 1` edges form a uniformly random spanning tree; the rest join
/// uniformly random vertex pairs, so parallel edges and loops occur.
pub fn generate_random_multigraph(n: usize, avg_degree: f64, seed: u64) -> Result<Multigraph, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(avg_degree >= 0.0 && avg_degree.is_finite()) {
        return Err(Error::InvalidArgument("average degree must be finite and non-negative".into()));
    }
    let m = (n as f64 * avg_degree / 2.0).round() as usize;
    if m + 1 < n {
        return Err(Error::InvalidArgument(format!("{m} edges cannot connect {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = random_tree(n, &mut rng);
    while pairs.len() < m {
        pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    Multigraph::from_pairs(n, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn sizes_and_connectivity() {
        let g = generate_random_multigraph(5, 4.0, 1).unwrap();
        assert_eq!(g.m(), 10);
        assert!(g.is_connected());
        let g = generate_random_multigraph(1, 0.0, 1).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        assert!(generate_random_multigraph(10, 1.0, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_random_multigraph(40, 4.0, 9).unwrap(), generate_random_multigraph(40, 4.0, 9).unwrap());
        assert_ne!(generate_random_multigraph(40, 4.0, 9).unwrap(), generate_random_multigraph(40, 4.0, 10).unwrap());
    }

    #[test]
    fn spanning_trees_look_uniform() {
        // Cayley: 16 labelled trees on 4 vertices, each with probability 1/16.
        let mut counts: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let runs = 16_000;
        for _ in 0..runs {
            let mut t: Vec<(usize, usize)> = random_tree(4, &mut rng).into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
            t.sort();
            *counts.entry(t).or_default() += 1;
        }
        assert_eq!(counts.len(), 16);
        for &c in counts.values() {
            assert!((c as f64 - 1000.0).abs() < 150.0, "{c}");
        }
    }
}
