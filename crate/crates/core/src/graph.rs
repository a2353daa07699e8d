//! Weighted graphs carrying a vertex measure and a potential, and the
//! discrete Schrödinger operator
//!
//! ```text
//! (Hf)(x) = m(x)^-1 Σ_y c(x,y) (f(x) - f(y)) + V(x) f(x)
//! ```
//!
//! with quadratic form `Σ_edges c (f(x) - f(y))² + Σ_x m(x) V(x) f(x)²`.
//! Self-loops may be stored (covering bases need them) but never enter
//! the form.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::linalg::QuadraticForm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

/// One non-loop edge seen from one of its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incidence {
    pub neighbor: usize,
    pub conductance: f64,
    pub edge: usize,
}

/// A finite weighted graph `(c, m, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    edges: Vec<Edge>,
    measure: Vec<f64>,
    potential: Vec<f64>,
    adjacency: Vec<Vec<Incidence>>,
}

fn check_positive(what: &'static str, location: impl FnOnce() -> String, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveWeight {
            what,
            location: location(),
            value,
        })
    }
}

impl Graph {
    pub fn new(
        n: usize,
        edges: Vec<(usize, usize, f64)>,
        measure: Vec<f64>,
        potential: Vec<f64>,
    ) -> Result<Self> {
        if measure.len() != n {
            return Err(Error::InvalidGraph(format!(
                "measure has {} entries, expected {n}",
                measure.len()
            )));
        }
        if potential.len() != n {
            return Err(Error::InvalidGraph(format!(
                "potential has {} entries, expected {n}",
                potential.len()
            )));
        }
        for (x, &m) in measure.iter().enumerate() {
            check_positive("measure", || format!("vertex {x}"), m)?;
        }
        if let Some(x) = potential.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGraph(format!("potential at vertex {x} is not finite")));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        for (i, (u, v, c)) in edges.into_iter().enumerate() {
            for index in [u, v] {
                if index >= n {
                    return Err(Error::DanglingVertex { index, n });
                }
            }
            check_positive("conductance", || format!("edge {i} ({u}, {v})"), c)?;
            if u != v {
                adjacency[u].push(Incidence {
                    neighbor: v,
                    conductance: c,
                    edge: i,
                });
                adjacency[v].push(Incidence {
                    neighbor: u,
                    conductance: c,
                    edge: i,
                });
            }
            stored.push(Edge { u, v, conductance: c });
        }
        Ok(Self {
            edges: stored,
            measure,
            potential,
            adjacency,
        })
    }

    /// Unit measure, zero potential.
    pub fn unweighted(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        Self::new(n, edges, vec![1.0; n], vec![0.0; n])
    }

    /// Builds from an edge list where the same undirected edge may be listed
    /// in both orientations. Such listings must agree on the conductance and
    /// are merged; repeated listings in the same orientation are parallel
    /// edges.
    pub fn from_listing(
        n: usize,
        edges: &[(usize, usize, f64)],
        measure: Vec<f64>,
        potential: Vec<f64>,
    ) -> Result<Self> {
        let mut forward: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
        for &(u, v, c) in edges {
            forward.entry((u, v)).or_default().push(c);
        }
        let mut kept = Vec::with_capacity(edges.len());
        for &(u, v, c) in edges {
            if u > v {
                if let Some(rev) = forward.get(&(v, u)) {
                    if rev.iter().any(|&r| r != c) {
                        return Err(Error::AsymmetricConductance(v, u));
                    }
                    continue;
                }
            }
            kept.push((u, v, c));
        }
        Self::new(n, kept, measure, potential)
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn incident(&self, x: usize) -> &[Incidence] {
        &self.adjacency[x]
    }

    /// Total conductance at `x`, loops excluded.
    pub fn weighted_degree(&self, x: usize) -> f64 {
        self.adjacency[x].iter().map(|i| i.conductance).sum()
    }

    pub fn with_potential(&self, potential: Vec<f64>) -> Result<Self> {
        let edges = self.edges.iter().map(|e| (e.u, e.v, e.conductance)).collect();
        Self::new(self.len(), edges, self.measure.clone(), potential)
    }

    pub fn with_measure(&self, measure: Vec<f64>) -> Result<Self> {
        let edges = self.edges.iter().map(|e| (e.u, e.v, e.conductance)).collect();
        Self::new(self.len(), edges, measure, self.potential.clone())
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Self::unweighted(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param(format!("cycle needs at least 3 vertices, got {n}")));
        }
        let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::unweighted(n, edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1.0));
            }
        }
        Self::unweighted(n, edges)
    }

    /// One vertex with `loops` loops.
    pub fn bouquet(loops: usize) -> Result<Self> {
        Self::unweighted(1, vec![(0, 0, 1.0); loops])
    }

    /// `blobs` complete graphs on `blob_size` vertices, consecutive blobs
    /// joined by one neck edge; the neck after blob `k` (1-based) has
    /// conductance `neck(k)`.
    pub fn blob_chain(blobs: usize, blob_size: usize, neck: impl Fn(usize) -> f64) -> Result<Self> {
        if blob_size == 0 {
            return Err(Error::param("blob size must be positive"));
        }
        let mut edges = Vec::new();
        for b in 0..blobs {
            let base = b * blob_size;
            for i in 0..blob_size {
                for j in i + 1..blob_size {
                    edges.push((base + i, base + j, 1.0));
                }
            }
            if b + 1 < blobs {
                edges.push((base + blob_size - 1, base + blob_size, neck(b + 1)));
            }
        }
        Self::unweighted(blobs * blob_size, edges)
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for inc in &self.adjacency[x] {
                    if !seen[inc.neighbor] {
                        seen[inc.neighbor] = true;
                        comp.push(inc.neighbor);
                        queue.push_back(inc.neighbor);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Errors with the component not containing vertex 0 when disconnected.
    pub fn require_connected(&self) -> Result<()> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::Disconnected {
                component: comps[1].clone(),
            });
        }
        Ok(())
    }

    /// Hop distances from a set of sources (`None` when unreachable).
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap_or(0);
            for inc in &self.adjacency[x] {
                if dist[inc.neighbor].is_none() {
                    dist[inc.neighbor] = Some(d + 1);
                    queue.push_back(inc.neighbor);
                }
            }
        }
        dist
    }

    /// Induced subgraph on `vertices` (in the given order). Loops between
    /// kept vertices survive only if `keep_loops`. Returns the subgraph and,
    /// for each kept edge, its index in `self`.
    pub fn induced(&self, vertices: &[usize], keep_loops: bool) -> Result<(Graph, Vec<usize>)> {
        let mut position = HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.len() {
                return Err(Error::DanglingVertex { index: v, n: self.len() });
            }
            if position.insert(v, i).is_some() {
                return Err(Error::param(format!("vertex {v} listed twice")));
            }
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() && !keep_loops {
                continue;
            }
            if let (Some(&a), Some(&b)) = (position.get(&e.u), position.get(&e.v)) {
                edges.push((a, b, e.conductance));
                origin.push(i);
            }
        }
        let measure = vertices.iter().map(|&v| self.measure[v]).collect();
        let potential = vertices.iter().map(|&v| self.potential[v]).collect();
        Ok((Graph::new(vertices.len(), edges, measure, potential)?, origin))
    }

    /// The quadratic form of `H` on all functions on the graph.
    pub fn form(&self) -> QuadraticForm {
        let diagonal = self
            .measure
            .iter()
            .zip(&self.potential)
            .map(|(m, v)| m * v)
            .collect();
        let couplings = self
            .edges
            .iter()
            .filter(|e| !e.is_loop())
            .map(|e| (e.u, e.v, e.conductance))
            .collect();
        QuadraticForm::new(self.measure.clone(), diagonal, couplings)
    }

    /// The form on functions supported in `region` (Dirichlet condition
    /// outside). Row `i` of the result corresponds to `region[i]`.
    pub fn dirichlet_form(&self, region: &[usize]) -> Result<QuadraticForm> {
        if region.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut position = vec![usize::MAX; self.len()];
        for (i, &x) in region.iter().enumerate() {
            if x >= self.len() {
                return Err(Error::DanglingVertex { index: x, n: self.len() });
            }
            position[x] = i;
        }
        let mut measure = Vec::with_capacity(region.len());
        let mut diagonal = Vec::with_capacity(region.len());
        for &x in region {
            measure.push(self.measure[x]);
            let killing: f64 = self.adjacency[x]
                .iter()
                .filter(|inc| position[inc.neighbor] == usize::MAX)
                .map(|inc| inc.conductance)
                .sum();
            diagonal.push(self.measure[x] * self.potential[x] + killing);
        }
        let couplings = self
            .edges
            .iter()
            .filter(|e| !e.is_loop())
            .filter_map(|e| {
                let (a, b) = (position[e.u], position[e.v]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b, e.conductance))
            })
            .collect();
        Ok(QuadraticForm::new(measure, diagonal, couplings))
    }

    /// `(Hf)` for a dense vector.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|x| {
                let lap: f64 = self.adjacency[x]
                    .iter()
                    .map(|inc| inc.conductance * (f[x] - f[inc.neighbor]))
                    .sum();
                lap / self.measure[x] + self.potential[x] * f[x]
            })
            .collect()
    }

    /// `‖f‖²` in `L²(m)`.
    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.measure).map(|(x, m)| m * x * x).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .zip(&self.measure)
            .map(|((a, b), m)| m * a * b)
            .sum()
    }

    /// Rayleigh quotient of a dense vector.
    pub fn rayleigh(&self, f: &[f64]) -> Result<f64> {
        let denom = self.norm_sq(f);
        if denom == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(self.form().value(f) / denom)
    }
}

/// Radially symmetric description of a graph around a root: every vertex on
/// sphere `k` has total conductance `inward` to sphere `k-1`, `outward` to
/// sphere `k+1`, and the same measure and potential. Shells beyond the
/// explicit list repeat `tail`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub shells: Vec<Shell>,
    pub tail: Shell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shell {
    pub inward: f64,
    pub outward: f64,
    pub measure: f64,
    pub potential: f64,
}

impl RadialProfile {
    /// Root of a `degree`-regular tree (or the line for degree 2) with
    /// constant edge conductance.
    pub fn regular_tree(degree: usize, conductance: f64, measure: f64, potential: f64) -> Self {
        let d = degree as f64;
        let root = Shell {
            inward: 0.0,
            outward: d * conductance,
            measure,
            potential,
        };
        let tail = Shell {
            inward: conductance,
            outward: (d - 1.0) * conductance,
            measure,
            potential,
        };
        Self {
            shells: vec![root],
            tail,
        }
    }

    pub fn shell(&self, k: usize) -> &Shell {
        self.shells.get(k).unwrap_or(&self.tail)
    }

    /// Relative sphere sizes `|S_0| = 1, |S_k|` for `k <= radius`.
    pub fn sphere_sizes(&self, radius: usize) -> Result<Vec<f64>> {
        let mut sizes = vec![1.0];
        for k in 0..radius {
            let next = self.shell(k + 1);
            if next.inward <= 0.0 {
                break;
            }
            let s = sizes[k] * self.shell(k).outward / next.inward;
            if !s.is_finite() || s > 1e250 {
                return Err(Error::Overflow(format!("sphere {} size exceeds range", k + 1)));
            }
            sizes.push(s);
        }
        Ok(sizes)
    }

    /// Number of vertices in the ball of the given radius.
    pub fn ball_size(&self, radius: usize) -> Result<f64> {
        Ok(self.sphere_sizes(radius)?.iter().sum())
    }

    /// The form of `H` restricted to radial functions on `B(root, radius)`
    /// with Dirichlet condition outside. Its bottom eigenvalue equals that of
    /// the full ball.
    pub fn ball_form(&self, radius: usize) -> Result<QuadraticForm> {
        self.shell_form(0, radius)
    }

    /// Radial form on the spheres `first..=last` with Dirichlet condition on
    /// both sides. The bottom eigenvalue equals that of the annulus.
    pub fn shell_form(&self, first: usize, last: usize) -> Result<QuadraticForm> {
        if first > last {
            return Err(Error::EmptyRegion);
        }
        let sizes = self.sphere_sizes(last)?;
        if sizes.len() <= first {
            return Err(Error::EmptyRegion);
        }
        let cells = sizes.len() - first;
        let scale = sizes[first];
        let mut measure = Vec::with_capacity(cells);
        let mut diagonal = Vec::with_capacity(cells);
        let mut couplings = Vec::with_capacity(cells);
        for (i, &size) in sizes[first..].iter().enumerate() {
            let k = first + i;
            let n = size / scale;
            let shell = self.shell(k);
            measure.push(n * shell.measure);
            let mut d = n * shell.measure * shell.potential;
            if i == 0 {
                d += n * shell.inward;
            }
            if i + 1 == cells {
                if k == last {
                    d += n * shell.outward;
                }
            } else {
                couplings.push((i, i + 1, n * shell.outward));
            }
            diagonal.push(d);
        }
        Ok(QuadraticForm::new(measure, diagonal, couplings))
    }
}

/// A graph whose vertices can be enumerated neighbor by neighbor; finite
/// graphs and lazily generated infinite ones both qualify.
pub trait LocallyFinite: Sync {
    type Vertex: Clone + Ord + Hash + fmt::Debug + Send + Sync;

    /// Neighbors with conductances, one entry per non-loop edge.
    fn neighbors(&self, v: &Self::Vertex) -> Result<Vec<(Self::Vertex, f64)>>;
    fn measure_at(&self, v: &Self::Vertex) -> f64;
    fn potential_at(&self, v: &Self::Vertex) -> f64;
    fn contains(&self, v: &Self::Vertex) -> bool;

    /// `Some` for finite graphs.
    fn as_finite(&self) -> Option<&Graph> {
        None
    }

    fn radial_profile(&self, _root: &Self::Vertex) -> Option<RadialProfile> {
        None
    }
}

impl LocallyFinite for Graph {
    type Vertex = usize;

    fn neighbors(&self, v: &usize) -> Result<Vec<(usize, f64)>> {
        if *v >= self.len() {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(self.adjacency[*v]
            .iter()
            .map(|inc| (inc.neighbor, inc.conductance))
            .collect())
    }

    fn measure_at(&self, v: &usize) -> f64 {
        self.measure[*v]
    }

    fn potential_at(&self, v: &usize) -> f64 {
        self.potential[*v]
    }

    fn contains(&self, v: &usize) -> bool {
        *v < self.len()
    }

    fn as_finite(&self) -> Option<&Graph> {
        Some(self)
    }
}

impl<G: LocallyFinite + ?Sized> LocallyFinite for &G {
    type Vertex = G::Vertex;

    fn neighbors(&self, v: &Self::Vertex) -> Result<Vec<(Self::Vertex, f64)>> {
        (**self).neighbors(v)
    }
    fn measure_at(&self, v: &Self::Vertex) -> f64 {
        (**self).measure_at(v)
    }
    fn potential_at(&self, v: &Self::Vertex) -> f64 {
        (**self).potential_at(v)
    }
    fn contains(&self, v: &Self::Vertex) -> bool {
        (**self).contains(v)
    }
    fn as_finite(&self) -> Option<&Graph> {
        (**self).as_finite()
    }
    fn radial_profile(&self, root: &Self::Vertex) -> Option<RadialProfile> {
        (**self).radial_profile(root)
    }
}

/// A finitely supported real function; values off the support are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction<V: Ord> {
    values: BTreeMap<V, f64>,
}

impl<V: Ord + Clone> Default for GraphFunction<V> {
    fn default() -> Self {
        Self {
            values: BTreeMap::new(),
        }
    }
}

impl<V: Ord + Clone> GraphFunction<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &V) -> f64 {
        self.values.get(v).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, v: V, value: f64) {
        if value == 0.0 {
            self.values.remove(&v);
        } else {
            self.values.insert(v, value);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &V> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&V, f64)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.values {
            out.set(k.clone(), f(*v));
        }
        out
    }

    pub fn norm_sq<G: LocallyFinite<Vertex = V>>(&self, g: &G) -> f64 {
        self.values.iter().map(|(k, v)| g.measure_at(k) * v * v).sum()
    }
}

impl<V: Ord + Clone> FromIterator<(V, f64)> for GraphFunction<V> {
    fn from_iter<I: IntoIterator<Item = (V, f64)>>(iter: I) -> Self {
        let mut f = Self::new();
        for (k, v) in iter {
            f.set(k, v);
        }
        f
    }
}

impl GraphFunction<usize> {
    pub fn from_dense(values: &[f64]) -> Self {
        values.iter().copied().enumerate().collect()
    }

    pub fn to_dense(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&k, &v) in &self.values {
            out[k] = v;
        }
        out
    }
}

/// `Hf`; supported in the 1-neighborhood of `supp f`.
pub fn apply_operator<G: LocallyFinite>(g: &G, f: &GraphFunction<G::Vertex>) -> Result<GraphFunction<G::Vertex>> {
    let mut touched: BTreeMap<G::Vertex, ()> = BTreeMap::new();
    for x in f.support() {
        touched.insert(x.clone(), ());
        for (y, _) in g.neighbors(x)? {
            touched.insert(y, ());
        }
    }
    let mut out = GraphFunction::new();
    for x in touched.into_keys() {
        let fx = f.get(&x);
        let lap: f64 = g
            .neighbors(&x)?
            .iter()
            .map(|(y, c)| c * (fx - f.get(y)))
            .sum();
        out.set(x.clone(), lap / g.measure_at(&x) + g.potential_at(&x) * fx);
    }
    Ok(out)
}

/// Energy `Σ_edges c (f(x)-f(y))² + Σ m V f²` of a finitely supported function.
pub fn energy<G: LocallyFinite>(g: &G, f: &GraphFunction<G::Vertex>) -> Result<f64> {
    let mut inside = 0.0;
    let mut crossing = 0.0;
    let mut potential = 0.0;
    for (x, fx) in f.iter() {
        potential += g.measure_at(x) * g.potential_at(x) * fx * fx;
        for (y, c) in g.neighbors(x)? {
            match f.values.get(&y) {
                Some(fy) => inside += c * (fx - fy) * (fx - fy),
                None => crossing += c * fx * fx,
            }
        }
    }
    Ok(0.5 * inside + crossing + potential)
}

pub fn rayleigh_quotient<G: LocallyFinite>(g: &G, f: &GraphFunction<G::Vertex>) -> Result<f64> {
    let denom = f.norm_sq(g);
    if denom == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(energy(g, f)? / denom)
}

/// `⟨f, g⟩` in `L²(m)`.
pub fn inner_product<G: LocallyFinite>(
    graph: &G,
    f: &GraphFunction<G::Vertex>,
    g: &GraphFunction<G::Vertex>,
) -> f64 {
    f.iter()
        .map(|(x, fx)| graph.measure_at(x) * fx * g.get(x))
        .sum()
}

/// Breadth-first ball around `root`, vertices sorted by `(distance, vertex)`.
#[derive(Debug, Clone)]
pub struct Ball<V> {
    pub vertices: Vec<V>,
    pub distance: Vec<usize>,
    /// `true` when no vertex outside the ball is adjacent to it.
    pub closed: bool,
}

impl<V: Clone + Ord + Hash> Ball<V> {
    pub fn index(&self) -> HashMap<V, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect()
    }

    /// Vertices at distance greater than `r`.
    pub fn outside(&self, r: usize) -> Vec<V> {
        self.vertices
            .iter()
            .zip(&self.distance)
            .filter(|(_, &d)| d > r)
            .map(|(v, _)| v.clone())
            .collect()
    }
}

pub fn ball<G: LocallyFinite>(g: &G, root: &G::Vertex, radius: usize, max_vertices: usize) -> Result<Ball<G::Vertex>> {
    if !g.contains(root) {
        return Err(Error::UnknownVertex(format!("{root:?}")));
    }
    let mut seen: HashMap<G::Vertex, usize> = HashMap::new();
    seen.insert(root.clone(), 0);
    let mut vertices = vec![root.clone()];
    let mut distance = vec![0];
    let mut frontier = vec![root.clone()];
    let mut closed = true;
    for d in 1..=radius + 1 {
        let mut next = Vec::new();
        for x in &frontier {
            for (y, _) in g.neighbors(x)? {
                if !seen.contains_key(&y) {
                    if d > radius {
                        closed = false;
                        break;
                    }
                    seen.insert(y.clone(), d);
                    next.push(y);
                }
            }
            if !closed {
                break;
            }
        }
        if d > radius || next.is_empty() {
            break;
        }
        next.sort();
        if vertices.len() + next.len() > max_vertices {
            return Err(Error::TooLarge(format!(
                "ball of radius {radius} exceeds {max_vertices} vertices"
            )));
        }
        distance.extend(std::iter::repeat_n(d, next.len()));
        vertices.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(Ball {
        vertices,
        distance,
        closed,
    })
}

/// Form on functions supported in a finite vertex set of any locally finite
/// graph (Dirichlet condition outside). Row `i` corresponds to `region[i]`.
pub fn region_form<G: LocallyFinite>(g: &G, region: &[G::Vertex]) -> Result<QuadraticForm> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let index: HashMap<&G::Vertex, usize> = region.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut measure = Vec::with_capacity(region.len());
    let mut diagonal = Vec::with_capacity(region.len());
    let mut couplings = Vec::new();
    for (i, x) in region.iter().enumerate() {
        let m = g.measure_at(x);
        measure.push(m);
        let mut d = m * g.potential_at(x);
        for (y, c) in g.neighbors(x)? {
            match index.get(&y) {
                Some(&j) if j > i => couplings.push((i, j, c)),
                Some(_) => {}
                None => d += c,
            }
        }
        diagonal.push(d);
    }
    Ok(QuadraticForm::new(measure, diagonal, couplings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::unweighted(2, vec![(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn k2_operator_and_quotients() {
        let g = k2();
        assert_eq!(g.apply(&[1.0, -1.0]), vec![2.0, -2.0]);
        assert_eq!(g.rayleigh(&[1.0, -1.0]).unwrap(), 2.0);
        let shifted = g.with_potential(vec![1.0, 1.0]).unwrap();
        assert_eq!(shifted.apply(&[1.0, 0.0]), vec![2.0, -1.0]);
        assert_eq!(shifted.rayleigh(&[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn constants_are_harmonic_on_connected_graphs() {
        let g = Graph::cycle(7).unwrap();
        assert!(g.apply(&[3.5; 7]).iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn generators() {
        let c4 = Graph::cycle(4).unwrap();
        assert_eq!(c4.edges().len(), 4);
        assert!(c4.edges().iter().all(|e| e.conductance == 1.0));
        let b = Graph::bouquet(2).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.form().value(&[3.0]), 0.0);
        assert!(b.incident(0).is_empty());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            Graph::unweighted(2, vec![(0, 1, 0.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            Graph::unweighted(2, vec![(0, 2, 1.0)]),
            Err(Error::DanglingVertex { index: 2, n: 2 })
        ));
        assert!(matches!(
            Graph::from_listing(2, &[(0, 1, 1.0), (1, 0, 2.0)], vec![1.0; 2], vec![0.0; 2]),
            Err(Error::AsymmetricConductance(0, 1))
        ));
        let merged = Graph::from_listing(2, &[(0, 1, 1.0), (1, 0, 1.0)], vec![1.0; 2], vec![0.0; 2]).unwrap();
        assert_eq!(merged.edges().len(), 1);
        assert!(matches!(
            Graph::new(1, vec![], vec![-1.0], vec![0.0]),
            Err(Error::NonPositiveWeight { .. })
        ));
    }

    #[test]
    fn sparse_operator_matches_dense() {
        let g = Graph::path(5).unwrap().with_potential(vec![0.5, 0.0, -1.0, 0.0, 2.0]).unwrap();
        let dense = [0.0, 1.0, -2.0, 0.0, 0.0];
        let f = GraphFunction::from_dense(&dense);
        let hf = apply_operator(&g, &f).unwrap();
        assert_eq!(hf.to_dense(5), g.apply(&dense));
        assert!(hf.support().all(|&x| x <= 3));
        let r = rayleigh_quotient(&g, &f).unwrap();
        assert!((r - g.rayleigh(&dense).unwrap()).abs() < 1e-14);
        assert!(matches!(rayleigh_quotient(&g, &GraphFunction::new()), Err(Error::ZeroFunction)));
    }

    #[test]
    fn balls_and_regions() {
        let g = Graph::path(6).unwrap();
        let b = ball(&g, &2, 1, 100).unwrap();
        assert_eq!(b.vertices, vec![2, 1, 3]);
        assert!(!b.closed);
        let whole = ball(&g, &0, 10, 100).unwrap();
        assert!(whole.closed);
        assert_eq!(whole.vertices.len(), 6);
        let lazy = region_form(&g, &[1, 2]).unwrap();
        let finite = g.dirichlet_form(&[1, 2]).unwrap();
        assert_eq!(lazy.diagonal(), finite.diagonal());
        assert!(matches!(ball(&g, &0, 10, 3), Err(Error::TooLarge(_))));
    }

    #[test]
    fn radial_tree_sizes() {
        let p = RadialProfile::regular_tree(4, 1.0, 1.0, 0.0);
        assert_eq!(p.sphere_sizes(3).unwrap(), vec![1.0, 4.0, 12.0, 36.0]);
        assert_eq!(p.ball_size(2).unwrap(), 17.0);
    }
}
