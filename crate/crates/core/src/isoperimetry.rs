//! Cheeger constants, neighborhood growth, and set searches.
//!
//! With a positive weight `φ`, edges carry `c(x,y) φ(x) φ(y)` and vertices
//! carry `m(x) φ(x)²`. Finite graphs use the half-volume convention; lazy
//! graphs use the uncapped ratio over finite sets.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::ConeTypes;
use crate::error::{Error, Result};
use crate::graph::{ball, Graph, LocallyFinite};
use crate::linalg::{bottom_eigenpairs, QuadraticForm};
use crate::spectral::WindowOptions;

/// Largest graph for exact enumeration.
pub const EXACT_LIMIT: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMode {
    Exact,
    Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub subset: Vec<usize>,
    pub boundary: f64,
    pub volume: f64,
    pub ratio: f64,
    pub mode: CutMode,
}

/// Edge weights and volumes of a finite graph under `φ`.
#[derive(Debug, Clone)]
struct CutWeights {
    volume: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

fn check_phi(g: &Graph, phi: Option<&[f64]>) -> Result<Vec<f64>> {
    match phi {
        None => Ok(vec![1.0; g.len()]),
        Some(p) => {
            if p.len() != g.len() {
                return Err(Error::param(format!("φ has {} values for {} vertices", p.len(), g.len())));
            }
            if let Some(x) = p.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::NonPositivePhi(x));
            }
            Ok(p.to_vec())
        }
    }
}

impl CutWeights {
    fn new(g: &Graph, phi: &[f64]) -> Self {
        let volume = g.measure().iter().zip(phi).map(|(m, p)| m * p * p).collect();
        let edges: Vec<(usize, usize, f64)> = g
            .edges()
            .iter()
            .filter(|e| !e.is_loop())
            .map(|e| (e.u, e.v, e.conductance * phi[e.u] * phi[e.v]))
            .collect();
        let mut adjacency = vec![Vec::new(); g.len()];
        for &(u, v, c) in &edges {
            adjacency[u].push((v, c));
            adjacency[v].push((u, c));
        }
        Self {
            volume,
            edges,
            adjacency,
        }
    }

    fn ratio_of(&self, subset: &[usize]) -> (f64, f64) {
        let mut inside = vec![false; self.volume.len()];
        for &x in subset {
            inside[x] = true;
        }
        let boundary = self
            .edges
            .iter()
            .filter(|(u, v, _)| inside[*u] != inside[*v])
            .map(|e| e.2)
            .sum();
        let volume = subset.iter().map(|&x| self.volume[x]).sum();
        (boundary, volume)
    }
}

/// Boundary mass and volume of `subset` (weights modified by `φ` if given).
pub fn cut_of(g: &Graph, phi: Option<&[f64]>, subset: &[usize]) -> Result<(f64, f64)> {
    let phi = check_phi(g, phi)?;
    Ok(CutWeights::new(g, &phi).ratio_of(subset))
}

fn mask_to_subset(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.1 < b.1,
    }
}

fn exact_cut(w: &CutWeights) -> (f64, Vec<usize>) {
    let n = w.volume.len();
    let total: f64 = w.volume.iter().sum();
    let half = total / 2.0 * (1.0 + 1e-12);
    let prefix_bits = n.min(6);
    let low_bits = n - prefix_bits;
    let blocks: Vec<u64> = (0..1u64 << prefix_bits).collect();
    let best = blocks
        .par_iter()
        .map(|&block| {
            let base_mask = block << low_bits;
            let mut inside = vec![false; n];
            for i in 0..prefix_bits {
                inside[low_bits + i] = block >> i & 1 == 1;
            }
            let mut boundary = 0.0;
            for &(u, v, c) in &w.edges {
                if inside[u] != inside[v] {
                    boundary += c;
                }
            }
            let mut volume: f64 = (0..n).filter(|&x| inside[x]).map(|x| w.volume[x]).sum();
            let mut best: Option<(f64, Vec<usize>)> = None;
            let mut gray = 0u64;
            let count = 1u64 << low_bits;
            for step in 0..count {
                if step > 0 {
                    let bit = step.trailing_zeros() as usize;
                    gray ^= 1 << bit;
                    let entering = !inside[bit];
                    inside[bit] = entering;
                    for &(y, c) in &w.adjacency[bit] {
                        if inside[y] == entering {
                            boundary -= c;
                        } else {
                            boundary += c;
                        }
                    }
                    volume += if entering { w.volume[bit] } else { -w.volume[bit] };
                }
                let mask = base_mask | gray;
                if mask == 0 || volume > half {
                    continue;
                }
                let screen = boundary / volume;
                if let Some(b) = &best {
                    if screen > b.0 * (1.0 + 1e-9) + 1e-300 {
                        continue;
                    }
                }
                let subset = mask_to_subset(mask, n);
                let (bd, vol) = w.ratio_of(&subset);
                let cand = (bd / vol, subset);
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            best
        })
        .collect::<Vec<_>>();
    best.into_iter()
        .flatten()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("a nonempty subset within half volume exists")
}

/// Best level-set cut of `order` (vertices sorted by a test vector), each
/// prefix and its complement considered when within half volume.
fn sweep_cut(w: &CutWeights, order: &[usize]) -> (f64, Vec<usize>) {
    let n = order.len();
    let total: f64 = w.volume.iter().sum();
    let half = total / 2.0 * (1.0 + 1e-12);
    let mut inside = vec![false; n];
    let mut boundary = 0.0;
    let mut volume = 0.0;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for j in 0..n.saturating_sub(1) {
        let x = order[j];
        inside[x] = true;
        for &(y, c) in &w.adjacency[x] {
            if inside[y] {
                boundary -= c;
            } else {
                boundary += c;
            }
        }
        volume += w.volume[x];
        for (vol, take_prefix) in [(volume, true), (total - volume, false)] {
            if vol > half || vol <= 0.0 {
                continue;
            }
            if let Some(b) = &best {
                if boundary / vol > b.0 * (1.0 + 1e-9) + 1e-300 {
                    continue;
                }
            }
            let mut subset: Vec<usize> = if take_prefix {
                order[..=j].to_vec()
            } else {
                order[j + 1..].to_vec()
            };
            subset.sort_unstable();
            let (bd, v) = w.ratio_of(&subset);
            let cand = (bd / v, subset);
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
    }
    best.expect("graphs with two or more vertices have a sweep cut")
}

/// Cheeger constant `min |∂S| / |S|` over nonempty `S` with at most half the
/// volume, exactly (by enumeration, `n ≤ 22`) or by a sweep over the level
/// sets of the second eigenvector.
pub fn cheeger_constant(g: &Graph, phi: Option<&[f64]>, mode: CutMode) -> Result<CutReport> {
    let phi = check_phi(g, phi)?;
    if g.len() < 2 {
        return Err(Error::param("Cheeger constant needs at least two vertices"));
    }
    g.require_connected()?;
    let w = CutWeights::new(g, &phi);
    let (ratio, subset) = match mode {
        CutMode::Exact => {
            if g.len() > EXACT_LIMIT {
                return Err(Error::TooLarge(format!(
                    "exact Cheeger enumeration is limited to {EXACT_LIMIT} vertices"
                )));
            }
            exact_cut(&w)
        }
        CutMode::Sweep => {
            let form = QuadraticForm::new(w.volume.clone(), vec![0.0; g.len()], w.edges.clone());
            let e = bottom_eigenpairs(&form, 2)?;
            let v = &e.vectors[1];
            let mut order: Vec<usize> = (0..g.len()).collect();
            order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
            sweep_cut(&w, &order)
        }
    };
    let (boundary, volume) = w.ratio_of(&subset);
    Ok(CutReport {
        subset,
        boundary,
        volume,
        ratio,
        mode,
    })
}

/// Volumes `(|A^r ∖ A|_φ, |A|_φ)` where `A^r` is the `r`-neighborhood.
pub fn neighborhood_growth<G: LocallyFinite>(
    g: &G,
    set: &[G::Vertex],
    r: usize,
    phi: Option<&dyn Fn(&G::Vertex) -> f64>,
) -> Result<(f64, f64)> {
    let weight = |v: &G::Vertex| {
        let p = phi.map_or(1.0, |f| f(v));
        g.measure_at(v) * p * p
    };
    let mut seen: HashSet<G::Vertex> = HashSet::new();
    let mut frontier = Vec::new();
    let mut inner = 0.0;
    for v in set {
        if !g.contains(v) {
            return Err(Error::UnknownVertex(format!("{v:?}")));
        }
        if seen.insert(v.clone()) {
            inner += weight(v);
            frontier.push(v.clone());
        }
    }
    let mut outer = 0.0;
    for _ in 0..r {
        let mut next = Vec::new();
        for x in &frontier {
            for (y, _) in g.neighbors(x)? {
                if seen.insert(y.clone()) {
                    outer += weight(&y);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok((outer, inner))
}

#[derive(Debug, Clone, Serialize)]
pub struct BuserSet<V> {
    pub subset: Vec<V>,
    pub growth: f64,
    pub volume: f64,
    pub ratio: f64,
    pub candidate: String,
}

/// Budget for [`buser_set_search`].
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_radius: usize,
    pub max_vertices: usize,
}

/// Looks for a finite `A` with `|A^r ∖ A| < ε |A|` among balls around `root`
/// and superlevel sets of the Dirichlet ground state of the largest ball.
/// `None` is not a proof that no such set exists.
pub fn buser_set_search<G: LocallyFinite>(
    g: &G,
    root: &G::Vertex,
    eps: f64,
    r: usize,
    budget: SearchBudget,
) -> Result<Option<BuserSet<G::Vertex>>> {
    if !(eps > 0.0) || r == 0 {
        return Err(Error::param("need ε > 0 and r ≥ 1"));
    }
    let mut largest = None;
    for k in 0..=budget.max_radius {
        let b = match ball(g, root, k, budget.max_vertices) {
            Ok(b) => b,
            Err(Error::TooLarge(_)) => break,
            Err(e) => return Err(e),
        };
        let (growth, volume) = neighborhood_growth(g, &b.vertices, r, None)?;
        if growth < eps * volume {
            return Ok(Some(BuserSet {
                subset: b.vertices,
                growth,
                volume,
                ratio: growth / volume,
                candidate: format!("ball of radius {k}"),
            }));
        }
        let closed = b.closed;
        largest = Some(b);
        if closed {
            break;
        }
    }
    let Some(b) = largest else { return Ok(None) };
    let form = crate::graph::region_form(g, &b.vertices)?;
    let e = bottom_eigenpairs(&form, 1)?;
    let v = &e.vectors[0];
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &c| (sign * v[c]).total_cmp(&(sign * v[a])).then(a.cmp(&c)));
    let mut checkpoints: Vec<usize> = (0..12).map(|i| (order.len() * (i + 1)) / 12).collect();
    checkpoints.dedup();
    for &len in &checkpoints {
        if len == 0 {
            continue;
        }
        let subset: Vec<G::Vertex> = order[..len].iter().map(|&i| b.vertices[i].clone()).collect();
        let (growth, volume) = neighborhood_growth(g, &subset, r, None)?;
        if growth < eps * volume {
            return Ok(Some(BuserSet {
                subset,
                growth,
                volume,
                ratio: growth / volume,
                candidate: format!("ground-state superlevel set of size {len}"),
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticCheeger {
    /// Best ratio found outside `B(root, r)`, an upper bound on `h(G ∖ B)`.
    pub history: Vec<(usize, f64)>,
    pub window: usize,
    pub flags: Vec<String>,
}

/// Best cut ratio (uncapped, over finite sets) among level sets of the
/// Dirichlet ground state of `B(root, W) ∖ B(root, r)`; boundaries are taken
/// in the whole graph.
pub fn asymptotic_cheeger<G: LocallyFinite>(
    g: &G,
    root: &G::Vertex,
    schedule: &[usize],
    opts: WindowOptions,
) -> Result<AsymptoticCheeger> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let r_max = *schedule.iter().max().expect("nonempty");
    let window = (opts.factor.max(1) * r_max).max(r_max + 1);
    let best_outside = |w: usize, r: usize| -> Result<f64> {
        let big = ball(g, root, w, opts.max_vertices)?;
        let region = big.outside(r);
        if region.is_empty() {
            return Ok(f64::INFINITY);
        }
        let form = crate::graph::region_form(g, &region)?;
        let e = bottom_eigenpairs(&form, 1)?;
        let v = &e.vectors[0];
        let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let mut order: Vec<usize> = (0..region.len()).collect();
        order.sort_by(|&a, &b| (sign * v[b]).total_cmp(&(sign * v[a])).then(a.cmp(&b)));
        let index: HashMap<&G::Vertex, usize> = region.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut inside = vec![false; region.len()];
        let mut boundary = 0.0;
        let mut volume = 0.0;
        let mut best = f64::INFINITY;
        for &i in &order {
            inside[i] = true;
            volume += g.measure_at(&region[i]);
            for (y, c) in g.neighbors(&region[i])? {
                match index.get(&y) {
                    Some(&j) if inside[j] => boundary -= c,
                    _ => boundary += c,
                }
            }
            best = best.min(boundary / volume);
        }
        Ok(best)
    };
    let values: Vec<Result<f64>> = schedule.par_iter().map(|&r| best_outside(window, r)).collect();
    let mut history = Vec::with_capacity(schedule.len());
    for (&r, v) in schedule.iter().zip(values) {
        history.push((r, v?));
    }
    let mut flags = Vec::new();
    match best_outside(2 * window, r_max) {
        Ok(doubled) => {
            let last = history.last().expect("nonempty").1;
            if (doubled - last).abs() > opts.flag_threshold.max(1e-3 * last.abs()) {
                flags.push(format!("window too small: doubling changes {last:.6e} to {doubled:.6e}"));
            }
        }
        Err(Error::TooLarge(_)) => flags.push("window doubling check skipped: doubled window too large".into()),
        Err(e) => return Err(e),
    }
    Ok(AsymptoticCheeger { history, window, flags })
}

#[derive(Debug, Clone, Serialize)]
pub struct CheegerCheck {
    /// `λ` of the weight `φ` (the bottom eigenvalue).
    pub lambda: f64,
    /// The next eigenvalue.
    pub lambda_next: f64,
    pub h: f64,
    pub h_mode: CutMode,
    pub degree_bound: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

/// `D = max_x Σ_y c(x,y) φ(y) / (m(x) φ(x))`.
pub fn degree_bound(g: &Graph, phi: &[f64]) -> f64 {
    (0..g.len())
        .map(|x| {
            g.incident(x).iter().map(|i| i.conductance * phi[i.neighbor]).sum::<f64>() / (g.measure()[x] * phi[x])
        })
        .fold(0.0, f64::max)
}

/// Checks `λ₁ − λ ≥ h_φ² / (2D)` for a positive `λ`-harmonic `φ` (the ground
/// state; `None` means `φ ≡ 1`, which requires a constant potential).
pub fn cheeger_inequality_check(g: &Graph, phi: Option<&[f64]>, residual_tolerance: f64) -> Result<CheegerCheck> {
    let phi = check_phi(g, phi)?;
    g.require_connected()?;
    let form = g.form();
    let lambda = form.rayleigh(&phi)?;
    let residual = form.residual(&phi, lambda);
    if residual > residual_tolerance {
        return Err(Error::Residual {
            residual,
            tolerance: residual_tolerance,
        });
    }
    let e = bottom_eigenpairs(&form, 2)?;
    let lambda_next = e.values[1];
    let mode = if g.len() <= EXACT_LIMIT { CutMode::Exact } else { CutMode::Sweep };
    let h = cheeger_constant(g, Some(&phi), mode)?.ratio;
    let d = degree_bound(g, &phi);
    let lhs = lambda_next - lambda;
    let rhs = h * h / (2.0 * d);
    Ok(CheegerCheck {
        lambda,
        lambda_next,
        h,
        h_mode: mode,
        degree_bound: d,
        lhs,
        rhs,
        residual,
        pass: lhs >= rhs,
    })
}

/// A flow certificate for the isoperimetric constant of a tree covering:
/// every vertex entered along half-edge `t` sends `flow[t]` to the child it
/// was entered from the parent through, so that
/// `h · |A| ≤ Σ_{x∈A} div θ(x) ≤ |∂A|` for every finite `A`.
#[derive(Debug, Clone, Serialize)]
pub struct FlowCertificate {
    pub h: f64,
    pub flow: Vec<f64>,
    pub degree_bound: f64,
}

impl FlowCertificate {
    /// `h² / (2D)`, a lower bound on the bottom of the spectrum of the
    /// weighted tree with zero potential.
    pub fn spectral_bound(&self) -> f64 {
        self.h * self.h / (2.0 * self.degree_bound)
    }
}

/// Isoperimetric flow certificate on the tree covering described by
/// `cones`, with half-edge conductances `conductance[t]` and vertex weights
/// `measure[x]` on base vertices.
pub fn tree_flow_certificate(cones: &ConeTypes, conductance: &[f64], measure: &[f64]) -> Result<FlowCertificate> {
    let types = cones.half_edges.len();
    if conductance.len() != types || measure.len() != cones.outgoing.len() {
        return Err(Error::param("weights do not match the cone types"));
    }
    let degree_bound = (0..measure.len())
        .map(|x| cones.outgoing[x].iter().map(|&t| conductance[t]).sum::<f64>() / measure[x])
        .fold(0.0, f64::max);
    let certify = |flow: &[f64]| -> f64 {
        if flow.iter().zip(conductance).any(|(g, c)| !(*g >= 0.0 && g <= c)) {
            return 0.0;
        }
        let mut h = f64::INFINITY;
        for t in 0..types {
            let head = cones.half_edges[t].head;
            let out: f64 = cones.children[t].iter().map(|&s| flow[s]).sum();
            h = h.min((out - flow[t]) / measure[head]);
        }
        for x in 0..measure.len() {
            let out: f64 = cones.outgoing[x].iter().map(|&s| flow[s]).sum();
            h = h.min(out / measure[x]);
        }
        h.max(0.0)
    };
    let greatest = |h: f64| -> Option<Vec<f64>> {
        let mut flow = conductance.to_vec();
        for _ in 0..100_000 {
            let mut change: f64 = 0.0;
            let next: Vec<f64> = (0..types)
                .map(|t| {
                    let head = cones.half_edges[t].head;
                    let out: f64 = cones.children[t].iter().map(|&s| flow[s]).sum();
                    conductance[t].min(out - h * measure[head])
                })
                .collect();
            for (a, b) in flow.iter().zip(&next) {
                change = change.max((a - b).abs());
            }
            flow = next;
            if flow.iter().any(|&g| g < 0.0) {
                return None;
            }
            if change <= 1e-15 {
                return Some(flow);
            }
        }
        Some(flow)
    };
    let (mut lo, mut hi) = (0.0, degree_bound);
    let mut best = (0.0, vec![0.0; types]);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match greatest(mid) {
            Some(flow) => {
                let h = certify(&flow);
                if h > best.0 {
                    best = (h, flow);
                }
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Ok(FlowCertificate {
        h: best.0,
        flow: best.1,
        degree_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazy::LazyGraph;

    #[test]
    fn small_cheeger_constants() {
        let c4 = Graph::cycle(4).unwrap();
        let r = cheeger_constant(&c4, None, CutMode::Exact).unwrap();
        assert_eq!((r.boundary, r.volume, r.ratio), (2.0, 2.0, 1.0));
        assert_eq!(r.subset, vec![0, 1]);
        let k2 = Graph::path(2).unwrap();
        let r = cheeger_constant(&k2, None, CutMode::Exact).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert_eq!(r.subset, vec![0]);
        let s = cheeger_constant(&c4, None, CutMode::Sweep).unwrap();
        assert!(s.ratio >= r.ratio);
    }

    #[test]
    fn brute_force_agrees_on_modified_c4() {
        let c4 = Graph::cycle(4).unwrap();
        let phi = [2.0, 1.0, 1.0, 1.0];
        let r = cheeger_constant(&c4, Some(&phi), CutMode::Exact).unwrap();
        let total: f64 = phi.iter().map(|p| p * p).sum();
        let mut best = f64::INFINITY;
        for mask in 1u64..15 {
            let s = mask_to_subset(mask, 4);
            let (b, v) = cut_of(&c4, Some(&phi), &s).unwrap();
            if v <= total / 2.0 {
                best = best.min(b / v);
            }
        }
        assert_eq!(r.ratio, best);
        assert!(matches!(
            cheeger_constant(&c4, Some(&[1.0, 0.0, 1.0, 1.0]), CutMode::Exact),
            Err(Error::NonPositivePhi(1))
        ));
    }

    #[test]
    fn disconnected_graph_names_a_component() {
        let g = Graph::unweighted(4, vec![(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        match cheeger_constant(&g, None, CutMode::Exact) {
            Err(Error::Disconnected { component }) => assert_eq!(component, vec![2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn growth_counts() {
        let line = LazyGraph::line();
        let a: Vec<Vec<i64>> = (0..10).map(|i| vec![i]).collect();
        assert_eq!(neighborhood_growth(&line, &a, 1, None).unwrap(), (2.0, 10.0));
        let tree = LazyGraph::tree(4).unwrap();
        for k in 0..4 {
            let b = ball(&tree, &tree.root(), k, 10_000).unwrap();
            let (out, vol) = neighborhood_growth(&tree, &b.vertices, 1, None).unwrap();
            assert_eq!(out, 4.0 * 3f64.powi(k as i32));
            assert_eq!(vol, 2.0 * 3f64.powi(k as i32) - 1.0);
        }
        let c5 = Graph::cycle(5).unwrap();
        let all: Vec<usize> = (0..5).collect();
        assert_eq!(neighborhood_growth(&c5, &all, 2, None).unwrap(), (0.0, 5.0));
    }

    #[test]
    fn buser_sets() {
        let budget = SearchBudget {
            max_radius: 30,
            max_vertices: 100_000,
        };
        let line = LazyGraph::line();
        let found = buser_set_search(&line, &vec![0], 0.1, 1, budget).unwrap().unwrap();
        assert_eq!(found.subset.len(), 21);
        let tree = LazyGraph::tree(4).unwrap();
        let small = SearchBudget {
            max_radius: 6,
            max_vertices: 100_000,
        };
        assert!(buser_set_search(&tree, &tree.root(), 0.5, 1, small).unwrap().is_none());
        let c5 = Graph::cycle(5).unwrap();
        let all = buser_set_search(&c5, &0, 0.01, 1, budget).unwrap().unwrap();
        assert_eq!(all.subset.len(), 5);
        assert_eq!(all.ratio, 0.0);
    }

    #[test]
    fn cheeger_inequality_small_cases() {
        let c4 = Graph::cycle(4).unwrap();
        let r = cheeger_inequality_check(&c4, None, 1e-8).unwrap();
        assert!((r.lambda_next - 2.0).abs() < 1e-10);
        assert!((r.rhs - 0.25).abs() < 1e-12);
        assert!(r.pass);
        let k2 = Graph::path(2).unwrap();
        let r = cheeger_inequality_check(&k2, None, 1e-8).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12 && (r.rhs - 0.5).abs() < 1e-12 && r.pass);
        let well = k2.with_potential(vec![0.0, 1.0]).unwrap();
        assert!(matches!(cheeger_inequality_check(&well, None, 1e-8), Err(Error::Residual { .. })));
    }

    #[test]
    fn asymptotic_estimates() {
        let opts = WindowOptions::default();
        let line = asymptotic_cheeger(&LazyGraph::line(), &vec![0], &[5, 10, 20], opts).unwrap();
        assert!(line.history.iter().all(|h| h.1 <= 2.0 / 60.0 + 1e-12));
        let tree = LazyGraph::tree(4).unwrap();
        let t = asymptotic_cheeger(&tree, &tree.root(), &[1, 2], opts).unwrap();
        assert!(t.history.iter().all(|h| h.1 >= 1.0));
    }
}
