//! Coverings of weighted graphs given by voltages on base edges.
//!
//! Edge `e = (u, v)` with voltage `w` lifts to the edges
//! `((u, y), (v, y · w))`, one for each fiber point `y`. Measure, potential
//! and conductances are pulled back from the base.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::action::{ActionKind, FiberPoint, Letter, MonodromyAction, Word};
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphFunction, LocallyFinite, RadialProfile};

/// Vertex of a covering graph: base vertex and fiber point.
pub type CoverVertex = (usize, FiberPoint);

#[derive(Debug, Clone)]
pub struct CoveringGraph {
    base: Graph,
    action: MonodromyAction,
    voltage: Vec<Word>,
}

/// A covering with finite fiber, materialized.
#[derive(Debug, Clone)]
pub struct FiniteCover {
    pub total: Graph,
    /// `vertices[i]` is the covering vertex with index `i`; the index of
    /// `(x, fiber[j])` is `x · k + j`.
    pub vertices: Vec<CoverVertex>,
    pub fiber: Vec<FiberPoint>,
}

impl FiniteCover {
    pub fn sheets(&self) -> usize {
        self.fiber.len()
    }

    pub fn projection(&self, i: usize) -> usize {
        i / self.fiber.len()
    }
}

impl CoveringGraph {
    /// `voltage[e]` is the word on base edge `e`, oriented from `e.u` to
    /// `e.v`.
    pub fn new(base: Graph, action: MonodromyAction, voltage: Vec<Word>) -> Result<Self> {
        if voltage.len() != base.edges().len() {
            return Err(Error::param(format!(
                "{} voltages for {} base edges",
                voltage.len(),
                base.edges().len()
            )));
        }
        let k = action.generators().len();
        for w in &voltage {
            if let Some(l) = w.0.iter().find(|l| l.generator >= k) {
                return Err(Error::UnknownGenerator(format!("#{}", l.generator)));
            }
        }
        Ok(Self { base, action, voltage })
    }

    /// Voltages given sparsely; unlisted edges carry the trivial word.
    pub fn with_voltages(base: Graph, action: MonodromyAction, listed: &[(usize, &str)]) -> Result<Self> {
        let mut voltage = vec![Word::trivial(); base.edges().len()];
        for &(e, text) in listed {
            if e >= voltage.len() {
                return Err(Error::param(format!("voltage on edge {e}, base has {} edges", voltage.len())));
            }
            voltage[e] = action.parse_word(text)?;
        }
        Self::new(base, action, voltage)
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn action(&self) -> &MonodromyAction {
        &self.action
    }

    pub fn voltage(&self) -> &[Word] {
        &self.voltage
    }

    pub fn projection(&self, v: &CoverVertex) -> usize {
        v.0
    }

    pub fn base_point(&self, x: usize) -> CoverVertex {
        (x, self.action.base_point())
    }

    /// Whether base edge `e` lifts to loops only (a loop whose voltage acts
    /// trivially). Such edges are spectrally inert.
    pub fn is_inert(&self, e: usize) -> bool {
        let edge = self.base.edges()[e];
        edge.is_loop() && self.action.word_is_identity(&self.voltage[e])
    }

    pub fn materialize(&self) -> Result<FiniteCover> {
        let fiber = self.action.fiber()?;
        let k = fiber.len();
        let n = self.base.len();
        let index: HashMap<&FiberPoint, usize> = fiber.iter().enumerate().map(|(i, y)| (y, i)).collect();
        let mut edges = Vec::with_capacity(self.base.edges().len() * k);
        for (e, edge) in self.base.edges().iter().enumerate() {
            for (i, y) in fiber.iter().enumerate() {
                let z = self.action.act(y, &self.voltage[e])?;
                let j = index[&z];
                edges.push((edge.u * k + i, edge.v * k + j, edge.conductance));
            }
        }
        let mut measure = Vec::with_capacity(n * k);
        let mut potential = Vec::with_capacity(n * k);
        let mut vertices = Vec::with_capacity(n * k);
        for x in 0..n {
            for y in &fiber {
                measure.push(self.base.measure()[x]);
                potential.push(self.base.potential()[x]);
                vertices.push((x, y.clone()));
            }
        }
        Ok(FiniteCover {
            total: Graph::new(n * k, edges, measure, potential)?,
            vertices,
            fiber,
        })
    }

    /// `f₀ ∘ p` on a finite fiber (dense, indexed as in [`FiniteCover`]).
    pub fn lift_function(&self, f0: &[f64]) -> Result<Vec<f64>> {
        let k = self.action.fiber_size().ok_or(Error::InfiniteFiber)?;
        self.check_base_len(f0)?;
        Ok(f0.iter().flat_map(|&v| std::iter::repeat_n(v, k)).collect())
    }

    /// `f₀ ∘ p` restricted to `p⁻¹(supp f₀) ∩ (base × window)`.
    pub fn lift_on_window(&self, f0: &[f64], window: &[FiberPoint]) -> Result<GraphFunction<CoverVertex>> {
        self.check_base_len(f0)?;
        let mut out = GraphFunction::new();
        for (x, &v) in f0.iter().enumerate() {
            if v != 0.0 {
                for y in window {
                    out.set((x, y.clone()), v);
                }
            }
        }
        Ok(out)
    }

    fn check_base_len(&self, f0: &[f64]) -> Result<()> {
        if f0.len() != self.base.len() {
            return Err(Error::param(format!(
                "function has {} values for {} base vertices",
                f0.len(),
                self.base.len()
            )));
        }
        Ok(())
    }

    /// `f₀(x) = (Σ_{y ∈ p⁻¹(x)} |f(y)|²)^{1/2}`.
    pub fn pushdown(&self, f: &GraphFunction<CoverVertex>) -> Vec<f64> {
        let mut sums = vec![0.0; self.base.len()];
        for ((x, _), v) in f.iter() {
            sums[*x] += v * v;
        }
        sums.into_iter().map(f64::sqrt).collect()
    }

    /// Restriction to the induced base subgraph on `keep`; the new base
    /// vertex `i` is `keep[i]`. Loops are dropped unless `keep_loops`.
    pub fn restrict(&self, keep: &[usize], keep_loops: bool) -> Result<CoveringGraph> {
        if keep.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let (sub, origin) = self.base.induced(keep, keep_loops)?;
        let voltage = origin.iter().map(|&e| self.voltage[e].clone()).collect();
        CoveringGraph::new(sub, self.action.clone(), voltage)
    }

    /// For each base component: its vertices, a spanning-tree root, and the
    /// words of the fundamental cycles read from the root. The monodromy
    /// action of the component is the action of the group these words
    /// generate.
    pub fn fundamental_cycles(&self) -> Vec<ComponentCycles> {
        let g = &self.base;
        let mut out = Vec::new();
        for comp in g.components() {
            let root = comp[0];
            let mut path: BTreeMap<usize, Word> = BTreeMap::new();
            path.insert(root, Word::trivial());
            let mut tree_edges = std::collections::BTreeSet::new();
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for inc in g.incident(x) {
                    if path.contains_key(&inc.neighbor) {
                        continue;
                    }
                    let e = g.edges()[inc.edge];
                    let step = if e.u == x {
                        self.voltage[inc.edge].clone()
                    } else {
                        self.voltage[inc.edge].inverse()
                    };
                    let w = path[&x].concat(&step);
                    path.insert(inc.neighbor, w);
                    tree_edges.insert(inc.edge);
                    queue.push_back(inc.neighbor);
                }
            }
            let mut words = Vec::new();
            for (i, e) in g.edges().iter().enumerate() {
                if tree_edges.contains(&i) || !path.contains_key(&e.u) {
                    continue;
                }
                let w = path[&e.u].concat(&self.voltage[i]).concat(&path[&e.v].inverse()).reduced();
                if !w.is_trivial() {
                    words.push(w);
                }
            }
            out.push(ComponentCycles {
                vertices: comp,
                root,
                words,
            });
        }
        out
    }

    /// Cone-type data when the covering is a forest of copies of the
    /// universal cover: free action, trivial voltages on a spanning tree of
    /// the (connected) base, and distinct single letters on the remaining
    /// edges.
    pub fn cone_types(&self) -> Result<ConeTypes> {
        if !matches!(self.action.kind(), ActionKind::Free) {
            return Err(Error::InvalidAction("cone types need the free action".into()));
        }
        self.base.require_connected()?;
        let n = self.base.len();
        let edges = self.base.edges();
        let mut tree = 0;
        let mut letters = std::collections::BTreeSet::new();
        let mut active = Vec::new();
        for (e, edge) in edges.iter().enumerate() {
            let w = &self.voltage[e];
            if w.is_trivial() {
                if edge.is_loop() {
                    continue;
                }
                tree += 1;
            } else if w.len() != 1 || !letters.insert(w.0[0].generator) {
                return Err(Error::InvalidAction(
                    "cone types need distinct single-letter voltages off a spanning tree".into(),
                ));
            }
            active.push(e);
        }
        if tree + 1 != n {
            return Err(Error::InvalidAction("trivial voltages must form a spanning tree".into()));
        }
        let mut half = Vec::with_capacity(2 * active.len());
        for &e in &active {
            let edge = edges[e];
            half.push(HalfEdge {
                edge: e,
                tail: edge.u,
                head: edge.v,
                conductance: edge.conductance,
            });
            half.push(HalfEdge {
                edge: e,
                tail: edge.v,
                head: edge.u,
                conductance: edge.conductance,
            });
        }
        let mut outgoing = vec![Vec::new(); n];
        for (t, h) in half.iter().enumerate() {
            outgoing[h.tail].push(t);
        }
        let children = (0..half.len())
            .map(|t| outgoing[half[t].head].iter().copied().filter(|&s| s != t ^ 1).collect())
            .collect();
        Ok(ConeTypes {
            half_edges: half,
            children,
            outgoing,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComponentCycles {
    pub vertices: Vec<usize>,
    pub root: usize,
    pub words: Vec<Word>,
}

/// A directed base edge. Its reverse has index `t ^ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfEdge {
    pub edge: usize,
    pub tail: usize,
    pub head: usize,
    pub conductance: f64,
}

/// Cone types of a tree covering: the subtree hanging below a vertex entered
/// along half-edge `t` is determined by `t`; its children are entered along
/// `children[t]`.
#[derive(Debug, Clone)]
pub struct ConeTypes {
    pub half_edges: Vec<HalfEdge>,
    pub children: Vec<Vec<usize>>,
    /// Half-edges leaving each base vertex.
    pub outgoing: Vec<Vec<usize>>,
}

impl LocallyFinite for CoveringGraph {
    type Vertex = CoverVertex;

    fn neighbors(&self, v: &CoverVertex) -> Result<Vec<(CoverVertex, f64)>> {
        let (x, y) = v;
        if *x >= self.base.len() || !self.action.contains(y) {
            return Err(Error::UnknownVertex(format!("({x}, {y})")));
        }
        let mut out = Vec::new();
        for (e, edge) in self.base.edges().iter().enumerate() {
            if edge.u != *x && edge.v != *x {
                continue;
            }
            let w = &self.voltage[e];
            if edge.is_loop() {
                let fwd = self.action.act(y, w)?;
                if fwd != *y {
                    out.push(((*x, fwd), edge.conductance));
                    out.push(((*x, self.action.act_inverse(y, w)?), edge.conductance));
                }
            } else if edge.u == *x {
                out.push(((edge.v, self.action.act(y, w)?), edge.conductance));
            } else {
                out.push(((edge.u, self.action.act_inverse(y, w)?), edge.conductance));
            }
        }
        Ok(out)
    }

    fn measure_at(&self, v: &CoverVertex) -> f64 {
        self.base.measure()[v.0]
    }

    fn potential_at(&self, v: &CoverVertex) -> f64 {
        self.base.potential()[v.0]
    }

    fn contains(&self, v: &CoverVertex) -> bool {
        v.0 < self.base.len() && self.action.contains(&v.1)
    }

    /// Radial description for single-vertex bases whose active loops carry
    /// distinct single letters of the free group (a regular tree), or one
    /// unit step of `ℤ` (the line), all with equal conductance.
    fn radial_profile(&self, root: &CoverVertex) -> Option<RadialProfile> {
        if self.base.len() != 1 || !self.contains(root) {
            return None;
        }
        let active: Vec<usize> = (0..self.base.edges().len()).filter(|&e| !self.is_inert(e)).collect();
        let c = self.base.edges().get(*active.first()?)?.conductance;
        if active.iter().any(|&e| self.base.edges()[e].conductance != c) {
            return None;
        }
        let (m, v) = (self.base.measure()[0], self.base.potential()[0]);
        match self.action.kind() {
            ActionKind::Free => {
                let mut seen = std::collections::BTreeSet::new();
                for &e in &active {
                    let w = &self.voltage[e];
                    if w.len() != 1 || !seen.insert(w.0[0].generator) {
                        return None;
                    }
                }
                Some(RadialProfile::regular_tree(2 * active.len(), c, m, v))
            }
            ActionKind::Integer { steps } => {
                if active.len() != 1 {
                    return None;
                }
                let s: i64 = self.voltage[active[0]]
                    .0
                    .iter()
                    .map(|l: &Letter| if l.inverse { -steps[l.generator] } else { steps[l.generator] })
                    .sum();
                (s.abs() == 1).then(|| RadialProfile::regular_tree(2, c, m, v))
            }
            _ => None,
        }
    }
}

/// `χ(x) = max(0, 1 − d(x, F)/ρ)`, supported within distance `ρ − 1` of `F`.
pub fn brooks_cutoff<G: LocallyFinite>(g: &G, set: &[G::Vertex], rho: usize) -> Result<GraphFunction<G::Vertex>> {
    if rho == 0 {
        return Err(Error::param("cutoff radius must be positive"));
    }
    let mut dist: HashMap<G::Vertex, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for v in set {
        if !g.contains(v) {
            return Err(Error::UnknownVertex(format!("{v:?}")));
        }
        if dist.insert(v.clone(), 0).is_none() {
            queue.push_back(v.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        if d + 1 >= rho {
            continue;
        }
        for (y, _) in g.neighbors(&x)? {
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), d + 1);
                queue.push_back(y);
            }
        }
    }
    Ok(dist
        .into_iter()
        .map(|(v, d)| (v, 1.0 - d as f64 / rho as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, rayleigh_quotient};
    use crate::spectral::lambda0_finite;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn two_copies_of_k2() {
        let cover = CoveringGraph::with_voltages(
            Graph::path(2).unwrap(),
            MonodromyAction::trivial(names(&["a"]), 2).unwrap(),
            &[],
        )
        .unwrap();
        let fc = cover.materialize().unwrap();
        assert_eq!(fc.total.len(), 4);
        assert_eq!(fc.total.components(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(cover.lift_function(&[1.0, 0.0]).unwrap(), vec![1.0, 1.0, 0.0, 0.0]);
        let f: GraphFunction<CoverVertex> = fc
            .vertices
            .iter()
            .cloned()
            .zip(cover.lift_function(&[1.0, 0.0]).unwrap())
            .collect();
        let f0 = cover.pushdown(&f);
        assert!((f0[0] - 2f64.sqrt()).abs() < 1e-15 && f0[1] == 0.0);
    }

    #[test]
    fn loop_with_unit_shift_unfolds_to_the_line() {
        let cover = CoveringGraph::with_voltages(
            Graph::bouquet(1).unwrap(),
            MonodromyAction::integer(names(&["t"]), vec![1]).unwrap(),
            &[(0, "t")],
        )
        .unwrap();
        let n = cover.neighbors(&(0, FiberPoint::Int(5))).unwrap();
        assert_eq!(n, vec![((0, FiberPoint::Int(6)), 1.0), ((0, FiberPoint::Int(4)), 1.0)]);
        assert!(cover.radial_profile(&cover.base_point(0)).is_some());
    }

    #[test]
    fn bouquet_cover_is_the_four_regular_tree() {
        let cover = CoveringGraph::with_voltages(
            Graph::bouquet(2).unwrap(),
            MonodromyAction::free(names(&["a", "b"])).unwrap(),
            &[(0, "a"), (1, "b")],
        )
        .unwrap();
        let b = ball(&cover, &cover.base_point(0), 3, 1000).unwrap();
        assert_eq!(b.vertices.len(), 53);
        let cones = cover.cone_types().unwrap();
        assert_eq!(cones.half_edges.len(), 4);
        assert!(cones.children.iter().all(|c| c.len() == 3));
    }

    #[test]
    fn cyclic_cover_of_triangle() {
        let cover = CoveringGraph::with_voltages(
            Graph::cycle(3).unwrap(),
            MonodromyAction::cyclic(names(&["a"]), 2, vec![1]).unwrap(),
            &[(2, "a")],
        )
        .unwrap();
        let fc = cover.materialize().unwrap();
        assert!(fc.total.is_connected());
        assert!(fc.total.incident(0).len() == 2);
        let base = lambda0_finite(cover.base(), None).unwrap().value;
        let top = lambda0_finite(&fc.total, None).unwrap().value;
        assert!((base - top).abs() < 1e-12);
        let arc = cover.restrict(&[0, 1], false).unwrap().materialize().unwrap();
        assert_eq!(arc.total.components().len(), 2);
    }

    #[test]
    fn restriction_of_bouquet_drops_loops() {
        let cover = CoveringGraph::with_voltages(
            Graph::bouquet(2).unwrap(),
            MonodromyAction::cyclic(names(&["a", "b"]), 3, vec![1, 2]).unwrap(),
            &[(0, "a"), (1, "b")],
        )
        .unwrap();
        let r = cover.restrict(&[0], false).unwrap().materialize().unwrap();
        assert_eq!(r.total.len(), 3);
        assert!(r.total.edges().is_empty());
    }

    #[test]
    fn cutoffs() {
        let line = crate::lazy::LazyGraph::line();
        let chi = brooks_cutoff(&line, &[vec![0]], 2).unwrap();
        assert_eq!(chi.get(&vec![0]), 1.0);
        assert_eq!(chi.get(&vec![1]), 0.5);
        assert_eq!(chi.get(&vec![-1]), 0.5);
        assert_eq!(chi.len(), 3);
        let one = brooks_cutoff(&line, &[vec![0]], 1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(brooks_cutoff(&line, &[vec![0]], 0).is_err());
        assert!(rayleigh_quotient(&line, &chi).unwrap() > 0.0);
    }

    #[test]
    fn fundamental_cycles_of_theta() {
        let base = Graph::unweighted(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 1.0)]).unwrap();
        let cover = CoveringGraph::with_voltages(
            base,
            MonodromyAction::free(names(&["a", "b"])).unwrap(),
            &[(2, "a"), (4, "b")],
        )
        .unwrap();
        let cyc = cover.fundamental_cycles();
        assert_eq!(cyc.len(), 1);
        assert_eq!(cyc[0].words.len(), 2);
        assert!(cover.cone_types().is_ok());
    }
}
