//! Schreier graphs, Følner sets and return-probability evidence for actions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{ActionKind, FiberPoint, MonodromyAction, Word};
use crate::covering::CoveringGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::report::series;

/// `S ∪ S⁻¹` as reduced, nontrivial, distinct words in canonical order.
pub fn symmetrize(s: &[Word]) -> Vec<Word> {
    let set: BTreeSet<Word> = s
        .iter()
        .flat_map(|w| [w.reduced(), w.inverse().reduced()])
        .filter(|w| !w.is_trivial())
        .collect();
    set.into_iter().collect()
}

fn check_words(action: &MonodromyAction, s: &[Word]) -> Result<()> {
    let n = action.generators().len();
    for w in s {
        if let Some(l) = w.0.iter().find(|l| l.generator >= n) {
            return Err(Error::UnknownGenerator(format!("#{}", l.generator)));
        }
    }
    Ok(())
}

fn check_points(action: &MonodromyAction, e: &[FiberPoint]) -> Result<()> {
    match e.iter().find(|y| !action.contains(y)) {
        Some(y) => Err(Error::InvalidAction(format!("{y} is not in the fiber"))),
        None => Ok(()),
    }
}

/// The action realized on a finite window, one unit edge `{y, y·g}` per
/// word `g` of `s`; moves leaving the window become stubs.
#[derive(Debug, Clone)]
pub struct SchreierGraph {
    pub graph: Graph,
    pub vertices: Vec<FiberPoint>,
    /// `(vertex index, word index, target outside the window)`.
    pub stubs: Vec<(usize, usize, FiberPoint)>,
}

impl SchreierGraph {
    pub fn stub_vertices(&self) -> BTreeSet<usize> {
        self.stubs.iter().map(|s| s.0).collect()
    }
}

pub fn schreier_graph(action: &MonodromyAction, window: &[FiberPoint], s: &[Word]) -> Result<SchreierGraph> {
    if window.is_empty() {
        return Err(Error::EmptyRegion);
    }
    check_words(action, s)?;
    check_points(action, window)?;
    let vertices: Vec<FiberPoint> = window.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let index: HashMap<&FiberPoint, usize> = vertices.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let mut edges = Vec::new();
    let mut stubs = Vec::new();
    let mut inverse_stubs = Vec::new();
    for (i, y) in vertices.iter().enumerate() {
        for (k, w) in s.iter().enumerate() {
            match index.get(&action.act(y, w)?) {
                Some(&j) => edges.push((i, j, 1.0)),
                None => stubs.push((i, k, action.act(y, w)?)),
            }
            let back = action.act_inverse(y, w)?;
            if !index.contains_key(&back) {
                inverse_stubs.push((i, k, back));
            }
        }
    }
    stubs.extend(inverse_stubs);
    stubs.sort();
    let n = vertices.len();
    Ok(SchreierGraph {
        graph: Graph::new(n, edges, vec![1.0; n], vec![0.0; n])?,
        vertices,
        stubs,
    })
}

/// `∂_S E`: the points of `E` moved out of `E` by some word of `S ∪ S⁻¹`.
pub fn folner_boundary(action: &MonodromyAction, e: &[FiberPoint], s: &[Word]) -> Result<Vec<FiberPoint>> {
    check_words(action, s)?;
    check_points(action, e)?;
    let sym = symmetrize(s);
    let set: HashSet<&FiberPoint> = e.iter().collect();
    let mut out = BTreeSet::new();
    for y in &set {
        for w in &sym {
            if !set.contains(&action.act(y, w)?) {
                out.insert((*y).clone());
                break;
            }
        }
    }
    Ok(out.into_iter().collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct FolnerCertificate {
    pub subset: Vec<FiberPoint>,
    pub generating_set: Vec<String>,
    pub boundary: Vec<FiberPoint>,
    pub ratio: f64,
    pub strategy: String,
    #[serde(skip)]
    pub words: Vec<Word>,
}

impl FolnerCertificate {
    fn build(action: &MonodromyAction, subset: Vec<FiberPoint>, s: &[Word], strategy: &str) -> Result<Self> {
        let mut subset = subset;
        subset.sort();
        let boundary = folner_boundary(action, &subset, s)?;
        let words = symmetrize(s);
        Ok(Self {
            ratio: boundary.len() as f64 / subset.len() as f64,
            generating_set: words.iter().map(|w| w.display(action.generators())).collect(),
            boundary,
            subset,
            strategy: strategy.into(),
            words,
        })
    }

    /// Ratio recomputed from scratch in `action`.
    pub fn recheck(&self, action: &MonodromyAction) -> Result<f64> {
        Ok(folner_boundary(action, &self.subset, &self.words)?.len() as f64 / self.subset.len() as f64)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FolnerBudget {
    pub max_radius: usize,
    pub max_vertices: usize,
    pub erosion_steps: usize,
    pub exact_limit: usize,
}

impl Default for FolnerBudget {
    fn default() -> Self {
        Self {
            max_radius: 64,
            max_vertices: 20_000,
            erosion_steps: 100_000,
            exact_limit: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchLogEntry {
    pub strategy: String,
    pub best_ratio: f64,
    pub best_size: usize,
    pub examined: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FolnerSearch {
    pub certificate: Option<FolnerCertificate>,
    pub log: Vec<SearchLogEntry>,
}

/// Balls around the base point, layer by layer, in the Schreier graph of the
/// symmetrized set.
fn schreier_balls(
    action: &MonodromyAction,
    sym: &[Word],
    max_radius: usize,
    max_vertices: usize,
) -> Result<Vec<Vec<FiberPoint>>> {
    let root = action.base_point();
    let mut seen: HashSet<FiberPoint> = HashSet::from([root.clone()]);
    let mut layers = vec![vec![root]];
    for _ in 0..max_radius {
        let mut next = BTreeSet::new();
        for y in layers.last().expect("nonempty") {
            for w in sym {
                let z = action.act(y, w)?;
                if !seen.contains(&z) {
                    next.insert(z);
                }
            }
        }
        if next.is_empty() || seen.len() + next.len() > max_vertices {
            break;
        }
        seen.extend(next.iter().cloned());
        layers.push(next.into_iter().collect());
    }
    let mut balls = Vec::with_capacity(layers.len());
    let mut acc = Vec::new();
    for layer in layers {
        acc.extend(layer);
        balls.push(acc.clone());
    }
    Ok(balls)
}

struct Outcome {
    entry: SearchLogEntry,
    found: Option<Vec<FiberPoint>>,
}

fn ball_strategy(action: &MonodromyAction, sym: &[Word], balls: &[Vec<FiberPoint>], eps: f64) -> Result<Outcome> {
    let mut best = (f64::INFINITY, 0);
    for (examined, b) in balls.iter().enumerate() {
        let ratio = folner_boundary(action, b, sym)?.len() as f64 / b.len() as f64;
        if ratio < best.0 {
            best = (ratio, b.len());
        }
        if ratio < eps {
            return Ok(Outcome {
                entry: SearchLogEntry {
                    strategy: "balls".into(),
                    best_ratio: ratio,
                    best_size: b.len(),
                    examined: examined + 1,
                },
                found: Some(b.clone()),
            });
        }
    }
    Ok(Outcome {
        entry: SearchLogEntry {
            strategy: "balls".into(),
            best_ratio: best.0,
            best_size: best.1,
            examined: balls.len(),
        },
        found: None,
    })
}

/// Repeatedly deletes a point with the most moves leaving the set, the
/// smallest such point on ties.
fn erosion_strategy(
    action: &MonodromyAction,
    sym: &[Word],
    start: &[FiberPoint],
    eps: f64,
    steps: usize,
) -> Result<Outcome> {
    let pts: Vec<FiberPoint> = start.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let n = pts.len();
    let index: HashMap<&FiberPoint, usize> = pts.iter().enumerate().map(|(i, y)| (y, i)).collect();
    let mut moves: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
    for y in &pts {
        let mut row = Vec::with_capacity(sym.len());
        for w in sym {
            row.push(index.get(&action.act(y, w)?).copied());
        }
        moves.push(row);
    }
    let mut alive = vec![true; n];
    let mut out_degree: Vec<usize> = moves.iter().map(|r| r.iter().filter(|t| t.is_none()).count()).collect();
    let mut queue: BTreeSet<(std::cmp::Reverse<usize>, usize)> =
        (0..n).map(|i| (std::cmp::Reverse(out_degree[i]), i)).collect();
    let mut size = n;
    let mut boundary = out_degree.iter().filter(|&&d| d > 0).count();
    let mut best = (boundary as f64 / size as f64, 0usize);
    let mut examined = 0;
    while size > 1 && examined < steps {
        let (_, x) = queue.pop_first().expect("nonempty");
        alive[x] = false;
        size -= 1;
        if out_degree[x] > 0 {
            boundary -= 1;
        }
        examined += 1;
        // Points with a move into x gain a leaving move; the action is a
        // bijection per word, so these are the images of x under S⁻¹ = S.
        for t in moves[x].iter().flatten().copied().collect::<BTreeSet<_>>() {
            if !alive[t] {
                continue;
            }
            let hits = moves[t].iter().filter(|&&m| m == Some(x)).count();
            if hits == 0 {
                continue;
            }
            queue.remove(&(std::cmp::Reverse(out_degree[t]), t));
            if out_degree[t] == 0 {
                boundary += 1;
            }
            out_degree[t] += hits;
            queue.insert((std::cmp::Reverse(out_degree[t]), t));
        }
        let ratio = boundary as f64 / size as f64;
        if ratio < best.0 {
            best = (ratio, examined);
        }
        if ratio < eps {
            break;
        }
    }
    // Replay the deletions to recover the best set.
    let mut alive = vec![true; n];
    let mut out_degree: Vec<usize> = moves.iter().map(|r| r.iter().filter(|t| t.is_none()).count()).collect();
    let mut queue: BTreeSet<(std::cmp::Reverse<usize>, usize)> =
        (0..n).map(|i| (std::cmp::Reverse(out_degree[i]), i)).collect();
    for _ in 0..best.1 {
        let (_, x) = queue.pop_first().expect("nonempty");
        alive[x] = false;
        for t in moves[x].iter().flatten().copied().collect::<BTreeSet<_>>() {
            if !alive[t] {
                continue;
            }
            let hits = moves[t].iter().filter(|&&m| m == Some(x)).count();
            if hits > 0 {
                queue.remove(&(std::cmp::Reverse(out_degree[t]), t));
                out_degree[t] += hits;
                queue.insert((std::cmp::Reverse(out_degree[t]), t));
            }
        }
    }
    let set: Vec<FiberPoint> = pts.iter().zip(&alive).filter(|(_, &a)| a).map(|(y, _)| y.clone()).collect();
    Ok(Outcome {
        entry: SearchLogEntry {
            strategy: "erosion".into(),
            best_ratio: best.0,
            best_size: set.len(),
            examined,
        },
        found: (best.0 < eps).then_some(set),
    })
}

/// All nonempty subsets of a window of at most `limit` points.
fn exact_strategy(action: &MonodromyAction, sym: &[Word], window: &[FiberPoint], eps: f64) -> Result<Outcome> {
    let n = window.len();
    let index: HashMap<&FiberPoint, usize> = window.iter().enumerate().map(|(i, y)| (y, i)).collect();
    // need[i]: the set of points that must be present for i to be interior,
    // or None when some move leaves the window.
    let mut need: Vec<Option<u32>> = Vec::with_capacity(n);
    for y in window {
        let mut mask = 0u32;
        let mut inside = true;
        for w in sym {
            match index.get(&action.act(y, w)?) {
                Some(&j) => mask |= 1 << j,
                None => inside = false,
            }
        }
        need.push(inside.then_some(mask));
    }
    let best = (1u32..(1u32 << n))
        .into_par_iter()
        .map(|s| {
            let mut b = 0u32;
            let mut rest = s;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if need[i].is_none_or(|m| m & s != m) {
                    b += 1;
                }
            }
            (b as f64 / s.count_ones() as f64, s)
        })
        .reduce(|| (f64::INFINITY, 0), |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a });
    let set: Vec<FiberPoint> = (0..n).filter(|i| best.1 >> i & 1 == 1).map(|i| window[i].clone()).collect();
    Ok(Outcome {
        entry: SearchLogEntry {
            strategy: "exact".into(),
            best_ratio: best.0,
            best_size: set.len(),
            examined: (1usize << n) - 1,
        },
        found: (best.0 < eps).then_some(set),
    })
}

/// Looks for `E` with `|∂_S E| / |E| < ε`. Finite fibers are invariant and
/// certify at once; otherwise balls, erosion of the largest ball and exact
/// enumeration of a small ball run in parallel, and the first success in that
/// order wins. Failure is not a disproof.
pub fn folner_search(action: &MonodromyAction, s: &[Word], eps: f64, budget: FolnerBudget) -> Result<FolnerSearch> {
    if !(eps > 0.0) {
        return Err(Error::param("ε must be positive"));
    }
    check_words(action, s)?;
    let sym = symmetrize(s);
    if action.fiber_size().is_some() {
        let cert = FolnerCertificate::build(action, action.fiber()?, &sym, "full_fiber")?;
        return Ok(FolnerSearch {
            log: vec![SearchLogEntry {
                strategy: "full_fiber".into(),
                best_ratio: cert.ratio,
                best_size: cert.subset.len(),
                examined: 1,
            }],
            certificate: Some(cert),
        });
    }
    let balls = schreier_balls(action, &sym, budget.max_radius, budget.max_vertices)?;
    let small = balls
        .iter()
        .rev()
        .find(|b| b.len() <= budget.exact_limit.min(30))
        .cloned()
        .unwrap_or_default();
    let largest = balls.last().cloned().unwrap_or_default();
    let (by_ball, (by_erosion, by_exact)) = rayon::join(
        || ball_strategy(action, &sym, &balls, eps),
        || {
            rayon::join(
                || erosion_strategy(action, &sym, &largest, eps, budget.erosion_steps),
                || exact_strategy(action, &sym, &small, eps),
            )
        },
    );
    let outcomes = [by_ball?, by_erosion?, by_exact?];
    let log: Vec<SearchLogEntry> = outcomes.iter().map(|o| o.entry.clone()).collect();
    let certificate = match outcomes.into_iter().find_map(|o| o.found.map(|f| (f, o.entry.strategy))) {
        Some((set, strategy)) => Some(FolnerCertificate::build(action, set, &sym, &strategy)?),
        None => None,
    };
    Ok(FolnerSearch { certificate, log })
}

/// Return probabilities of the simple random walk driven by `S ∪ S⁻¹`:
/// `(2n, p_{2n}(o, o)^{1/2n})` for `2n ≤ steps`. Free actions generated by
/// a free basis of a subgroup reduce to the walk of the distance to the
/// identity on the regular tree.
pub fn rw_radius_estimate(action: &MonodromyAction, s: &[Word], steps: usize, max_vertices: usize) -> Result<Vec<(usize, f64)>> {
    if !steps.is_multiple_of(2) || steps == 0 {
        return Err(Error::param("step count must be positive and even"));
    }
    check_words(action, s)?;
    let sym = symmetrize(s);
    if sym.is_empty() {
        return Ok((1..=steps / 2).map(|n| (2 * n, 1.0)).collect());
    }
    let free_rank = match action.kind() {
        ActionKind::Free => free_basis_rank(s),
        _ => None,
    };
    let returns = if let Some(k) = free_rank {
        distance_chain_returns(2 * k, steps)
    } else {
        sparse_returns(action, &sym, steps, max_vertices)?
    };
    Ok(returns
        .into_iter()
        .enumerate()
        .filter(|(t, _)| t % 2 == 0 && *t > 0)
        .map(|(t, p)| (t, p.powf(1.0 / t as f64).min(1.0)))
        .collect())
}

/// `Some(k)` when the nontrivial words, taken up to inversion, are a free
/// basis of the subgroup of the free group they generate. Folds the petal
/// graph of the words; the rank of the folded graph equals the number of
/// words exactly when they form a basis.
pub fn free_basis_rank(words: &[Word]) -> Option<usize> {
    let mut basis: BTreeSet<Word> = BTreeSet::new();
    for w in words {
        let r = w.reduced();
        if r.is_empty() {
            continue;
        }
        let inv = r.inverse();
        if !basis.contains(&inv) {
            basis.insert(r);
        }
    }
    if basis.is_empty() {
        return None;
    }
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut vertices = 1;
    for w in &basis {
        let mut at = 0;
        for (i, l) in w.0.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                vertices += 1;
                vertices - 1
            };
            if l.inverse {
                edges.push((next, l.generator, at));
            } else {
                edges.push((at, l.generator, next));
            }
            at = next;
        }
    }
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    loop {
        let mut merged = false;
        let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
        for &(u, g, v) in &edges {
            let (u, v) = (find(&mut parent, u), find(&mut parent, v));
            for (from, to, forward) in [(u, v, true), (v, u, false)] {
                match seen.get(&(from, g, forward)) {
                    Some(&t) if find(&mut parent, t) != to => {
                        let t = find(&mut parent, t);
                        parent[t.max(to)] = t.min(to);
                        merged = true;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert((from, g, forward), to);
                    }
                }
            }
        }
        let mut folded: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        for &(u, g, v) in &edges {
            folded.insert((find(&mut parent, u), g, find(&mut parent, v)));
        }
        edges = folded.into_iter().collect();
        if !merged {
            break;
        }
    }
    let live: BTreeSet<usize> = (0..vertices).map(|x| find(&mut parent, x)).collect();
    let rank = edges.len() + 1 - live.len();
    (rank == basis.len()).then_some(rank)
}

fn distance_chain_returns(degree: usize, steps: usize) -> Vec<f64> {
    let d = degree as f64;
    let mut p = vec![0.0; steps + 2];
    p[0] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..steps {
        let mut q = vec![0.0; steps + 2];
        q[1] += p[0];
        for r in 1..=steps {
            q[r + 1] += p[r] * (d - 1.0) / d;
            q[r - 1] += p[r] / d;
        }
        p = q;
        out.push(p[0]);
    }
    out
}

fn sparse_returns(action: &MonodromyAction, sym: &[Word], steps: usize, max_vertices: usize) -> Result<Vec<f64>> {
    let root = action.base_point();
    let mut p: BTreeMap<FiberPoint, f64> = BTreeMap::from([(root.clone(), 1.0)]);
    let mut cache: HashMap<FiberPoint, Vec<FiberPoint>> = HashMap::new();
    let w = 1.0 / sym.len() as f64;
    let mut out = vec![1.0];
    for _ in 0..steps {
        let mut q: BTreeMap<FiberPoint, f64> = BTreeMap::new();
        for (y, mass) in &p {
            if !cache.contains_key(y) {
                let targets = sym.iter().map(|g| action.act(y, g)).collect::<Result<Vec<_>>>()?;
                cache.insert(y.clone(), targets);
            }
            for z in &cache[y] {
                *q.entry(z.clone()).or_insert(0.0) += mass * w;
            }
        }
        if q.len() > max_vertices {
            return Err(Error::WindowOverflow(format!(
                "walk support {} exceeds {max_vertices} points",
                q.len()
            )));
        }
        out.push(q.get(&root).copied().unwrap_or(0.0));
        p = q;
    }
    Ok(out)
}

/// Fits `ln p_{2n} = c + 2n ln ρ − a ln n` through three even step counts
/// ending at each of the last `count` entries; returns the fitted `ρ`.
pub fn extrapolate_radius(series: &[(usize, f64)], count: usize) -> Vec<f64> {
    let m = series.len();
    let gap = (m / 4).max(1);
    let mut out = Vec::new();
    for end in (0..m).rev().take(count) {
        if end < 2 * gap {
            break;
        }
        let pts = [series[end - 2 * gap], series[end - gap], series[end]];
        if pts.iter().any(|p| p.1 <= 0.0) {
            continue;
        }
        let rows: Vec<[f64; 4]> = pts
            .iter()
            .map(|&(t, est)| {
                let n = t as f64 / 2.0;
                [1.0, 2.0 * n, -n.ln(), t as f64 * est.ln()]
            })
            .collect();
        let a = nalgebra::Matrix3::from_fn(|i, j| rows[i][j]);
        let b = nalgebra::Vector3::from_fn(|i, _| rows[i][3]);
        if let Some(x) = a.lu().solve(&b) {
            out.push(x[1].exp().min(1.0));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmenabilityStatus {
    CertifiedAmenable,
    EvidenceNonamenable,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerdictBudget {
    pub folner: FolnerBudget,
    pub walk_steps: usize,
    pub walk_vertices: usize,
    pub plateau: f64,
}

impl Default for VerdictBudget {
    fn default() -> Self {
        Self {
            folner: FolnerBudget::default(),
            walk_steps: 40,
            walk_vertices: 2_000_000,
            plateau: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AmenabilityVerdict {
    pub status: AmenabilityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FolnerCertificate>,
    pub rho_lower: Option<f64>,
    #[serde(serialize_with = "series::serialize")]
    pub rho_series: Vec<(usize, f64)>,
    pub rho_extrapolated: Vec<f64>,
    pub budgets: VerdictBudget,
    pub search_log: Vec<SearchLogEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Følner search first; without a certificate the verdict is
/// `EvidenceNonamenable` only when the fitted spectral radii agree within
/// `plateau / 5` and stay below `1 − plateau`.
pub fn amenability_verdict(action: &MonodromyAction, s: &[Word], eps: f64, budget: VerdictBudget) -> Result<AmenabilityVerdict> {
    let search = folner_search(action, s, eps, budget.folner)?;
    let mut notes = Vec::new();
    let (rho_series, rho_extrapolated) = match rw_radius_estimate(action, s, budget.walk_steps, budget.walk_vertices) {
        Ok(series) => {
            let fits = extrapolate_radius(&series, 3);
            (series, fits)
        }
        Err(Error::WindowOverflow(msg)) => {
            notes.push(format!("random walk skipped: {msg}"));
            (Vec::new(), Vec::new())
        }
        Err(e) => return Err(e),
    };
    let rho_lower = rho_series.last().map(|p| p.1);
    let status = if search.certificate.is_some() {
        AmenabilityStatus::CertifiedAmenable
    } else {
        let lo = rho_extrapolated.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rho_extrapolated.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if rho_extrapolated.len() >= 2 && hi - lo <= budget.plateau / 5.0 && hi < 1.0 - budget.plateau {
            AmenabilityStatus::EvidenceNonamenable
        } else {
            AmenabilityStatus::Inconclusive
        }
    };
    Ok(AmenabilityVerdict {
        status,
        certificate: search.certificate,
        rho_lower,
        rho_series,
        rho_extrapolated,
        budgets: budget,
        search_log: search.log,
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentVerdict {
    pub vertices: Vec<usize>,
    pub root: usize,
    pub cycle_words: Vec<String>,
    pub verdict: AmenabilityVerdict,
}

/// One verdict per component of the base, for the action of the subgroup
/// generated by the monodromy of its fundamental cycles.
pub fn cover_amenability(cover: &CoveringGraph, eps: f64, budget: VerdictBudget) -> Result<Vec<ComponentVerdict>> {
    let action = cover.action();
    cover
        .fundamental_cycles()
        .into_iter()
        .map(|c| {
            let words: Vec<Word> = c.words.iter().filter(|w| !action.word_is_identity(w)).cloned().collect();
            let verdict = if words.is_empty() {
                invariant_point_verdict(action, budget)?
            } else {
                amenability_verdict(action, &words, eps, budget)?
            };
            Ok(ComponentVerdict {
                cycle_words: c.words.iter().map(|w| w.display(action.generators())).collect(),
                vertices: c.vertices,
                root: c.root,
                verdict,
            })
        })
        .collect()
}

fn invariant_point_verdict(action: &MonodromyAction, budget: VerdictBudget) -> Result<AmenabilityVerdict> {
    let cert = FolnerCertificate::build(action, vec![action.base_point()], &[], "trivial_monodromy")?;
    Ok(AmenabilityVerdict {
        status: AmenabilityStatus::CertifiedAmenable,
        rho_lower: Some(1.0),
        rho_series: (1..=budget.walk_steps / 2).map(|n| (2 * n, 1.0)).collect(),
        rho_extrapolated: Vec::new(),
        budgets: budget,
        search_log: vec![SearchLogEntry {
            strategy: "trivial_monodromy".into(),
            best_ratio: 0.0,
            best_size: 1,
            examined: 1,
        }],
        certificate: Some(cert),
        notes: Vec::new(),
    })
}
