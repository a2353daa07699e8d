//! Seeded random instances for property checks and fuzz scenarios.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::action::{MonodromyAction, Word};
use crate::covering::CoveringGraph;
use crate::error::Result;
use crate::graph::Graph;

/// Connected graph on `n` vertices: a random tree plus each further pair
/// with probability `extra`. Conductances and measures are drawn from
/// `[0.2, 2]`, potentials from `[-1, 1]` when `weighted`; otherwise all are
/// unit and the potential vanishes.
pub fn connected_graph<R: Rng>(rng: &mut R, n: usize, extra: f64, weighted: bool) -> Result<Graph> {
    let mut edges = Vec::new();
    let weight = |rng: &mut R| if weighted { rng.gen_range(0.2..2.0) } else { 1.0 };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push((u, v, weight(rng)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) && rng.gen_bool(extra) {
                edges.push((u, v, weight(rng)));
            }
        }
    }
    let measure = (0..n).map(|_| weight(rng)).collect();
    let potential = (0..n).map(|_| if weighted { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
    Graph::new(n, edges, measure, potential)
}

fn permutation<R: Rng>(rng: &mut R, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.shuffle(rng);
    p
}

/// Random covering of a random weighted base (2 to `max_base` vertices, some
/// loops) by a permutation action of two generators on 1 to `max_fiber`
/// points, with random short voltages.
pub fn finite_cover<R: Rng>(rng: &mut R, max_base: usize, max_fiber: usize) -> Result<CoveringGraph> {
    let n = rng.gen_range(2..=max_base.max(2));
    let tree = connected_graph(rng, n, 0.3, true)?;
    let mut edges: Vec<(usize, usize, f64)> = tree.edges().iter().map(|e| (e.u, e.v, e.conductance)).collect();
    if rng.gen_bool(0.3) {
        let x = rng.gen_range(0..n);
        edges.push((x, x, rng.gen_range(0.2..2.0)));
    }
    let base = Graph::new(n, edges, tree.measure().to_vec(), tree.potential().to_vec())?;
    let k = rng.gen_range(1..=max_fiber.max(1));
    let action = MonodromyAction::permutation(
        vec!["a".into(), "b".into()],
        vec![permutation(rng, k), permutation(rng, k)],
    )?;
    let choices = [
        Word::trivial(),
        Word::letter(0, false),
        Word::letter(0, true),
        Word::letter(1, false),
        Word::letter(1, true),
        Word::letter(0, false).concat(&Word::letter(1, false)),
    ];
    let voltage = (0..base.edges().len())
        .map(|_| choices.choose(rng).expect("nonempty").clone())
        .collect();
    CoveringGraph::new(base, action, voltage)
}

/// Values in `[-1, 1]`, not all zero.
pub fn function<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let f: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if f.iter().any(|&x| x != 0.0) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn instances_are_valid_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = connected_graph(&mut a, 7, 0.2, true).unwrap();
            assert!(g.is_connected());
            assert_eq!(g, connected_graph(&mut b, 7, 0.2, true).unwrap());
            let c = finite_cover(&mut a, 8, 8).unwrap();
            let t = c.materialize().unwrap();
            assert_eq!(t.total.len(), c.base().len() * t.sheets());
            finite_cover(&mut b, 8, 8).unwrap();
        }
    }
}
