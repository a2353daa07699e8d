//! Lazily enumerated infinite graphs and finite edits of them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Graph, LocallyFinite, RadialProfile};

/// Vertex of a catalog graph: integer coordinates, letters of a tree word,
/// or `[blob, slot]` for blob chains.
pub type Point = Vec<i64>;

#[derive(Debug, Clone, PartialEq)]
pub enum LazyKind {
    /// The integer line.
    Line,
    /// The lattice `ℤ^dim` with nearest-neighbor edges.
    Lattice { dim: usize },
    /// The `degree`-regular tree; vertices are words in `0..degree` without
    /// repeated consecutive letters.
    Tree { degree: usize },
    /// Complete graphs on `blob_size` vertices indexed by `k ≥ 1`, blob `k`
    /// joined to blob `k+1` by one edge of conductance `1/k`.
    BlobChain { blob_size: usize },
}

/// A catalog graph with constant conductance, measure and potential (the
/// blob chain keeps its neck schedule).
#[derive(Debug, Clone, PartialEq)]
pub struct LazyGraph {
    pub kind: LazyKind,
    pub conductance: f64,
    pub measure: f64,
    pub potential: f64,
}

impl LazyGraph {
    pub fn new(kind: LazyKind) -> Result<Self> {
        match kind {
            LazyKind::Lattice { dim: 0 } => return Err(Error::param("lattice dimension must be positive")),
            LazyKind::Tree { degree } if degree < 2 => {
                return Err(Error::param(format!("tree degree must be at least 2, got {degree}")))
            }
            LazyKind::BlobChain { blob_size: 0 } => return Err(Error::param("blob size must be positive")),
            _ => {}
        }
        Ok(Self {
            kind,
            conductance: 1.0,
            measure: 1.0,
            potential: 0.0,
        })
    }

    pub fn line() -> Self {
        Self::new(LazyKind::Line).expect("valid")
    }

    pub fn tree(degree: usize) -> Result<Self> {
        Self::new(LazyKind::Tree { degree })
    }

    pub fn lattice(dim: usize) -> Result<Self> {
        Self::new(LazyKind::Lattice { dim })
    }

    pub fn blob_chain(blob_size: usize) -> Result<Self> {
        Self::new(LazyKind::BlobChain { blob_size })
    }

    pub fn with_weights(mut self, conductance: f64, measure: f64, potential: f64) -> Result<Self> {
        for (what, v) in [("conductance", conductance), ("measure", measure)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveWeight {
                    what,
                    location: "lazy graph".into(),
                    value: v,
                });
            }
        }
        if !potential.is_finite() {
            return Err(Error::param("potential must be finite"));
        }
        self.conductance = conductance;
        self.measure = measure;
        self.potential = potential;
        Ok(self)
    }

    /// Canonical base point.
    pub fn root(&self) -> Point {
        match self.kind {
            LazyKind::Line => vec![0],
            LazyKind::Lattice { dim } => vec![0; dim],
            LazyKind::Tree { .. } => Vec::new(),
            LazyKind::BlobChain { .. } => vec![1, 0],
        }
    }

    /// Conductance of the neck leaving blob `k` towards blob `k+1`.
    pub fn neck(k: i64) -> f64 {
        1.0 / k as f64
    }
}

impl LocallyFinite for LazyGraph {
    type Vertex = Point;

    fn neighbors(&self, v: &Point) -> Result<Vec<(Point, f64)>> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(format!("{v:?}")));
        }
        let c = self.conductance;
        Ok(match self.kind {
            LazyKind::Line => vec![(vec![v[0] - 1], c), (vec![v[0] + 1], c)],
            LazyKind::Lattice { dim } => {
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..dim {
                    for s in [-1, 1] {
                        let mut w = v.clone();
                        w[i] += s;
                        out.push((w, c));
                    }
                }
                out
            }
            LazyKind::Tree { degree } => {
                let mut out = Vec::with_capacity(degree);
                if let Some((_, parent)) = v.split_last() {
                    out.push((parent.to_vec(), c));
                }
                for a in 0..degree as i64 {
                    if v.last() != Some(&a) {
                        let mut w = v.clone();
                        w.push(a);
                        out.push((w, c));
                    }
                }
                out
            }
            LazyKind::BlobChain { blob_size } => {
                let (k, i) = (v[0], v[1]);
                let s = blob_size as i64;
                let mut out: Vec<(Point, f64)> = (0..s).filter(|&j| j != i).map(|j| (vec![k, j], 1.0)).collect();
                if i == s - 1 {
                    out.push((vec![k + 1, 0], Self::neck(k)));
                }
                if i == 0 && k > 1 {
                    out.push((vec![k - 1, s - 1], Self::neck(k - 1)));
                }
                out
            }
        })
    }

    fn measure_at(&self, _v: &Point) -> f64 {
        self.measure
    }

    fn potential_at(&self, _v: &Point) -> f64 {
        self.potential
    }

    fn contains(&self, v: &Point) -> bool {
        match self.kind {
            LazyKind::Line => v.len() == 1,
            LazyKind::Lattice { dim } => v.len() == dim,
            LazyKind::Tree { degree } => {
                v.iter().all(|&a| (0..degree as i64).contains(&a)) && v.windows(2).all(|w| w[0] != w[1])
            }
            LazyKind::BlobChain { blob_size } => {
                v.len() == 2 && v[0] >= 1 && (0..blob_size as i64).contains(&v[1])
            }
        }
    }

    fn radial_profile(&self, root: &Point) -> Option<RadialProfile> {
        if !self.contains(root) {
            return None;
        }
        match self.kind {
            LazyKind::Line => Some(RadialProfile::regular_tree(2, self.conductance, self.measure, self.potential)),
            LazyKind::Tree { degree } => Some(RadialProfile::regular_tree(
                degree,
                self.conductance,
                self.measure,
                self.potential,
            )),
            _ => None,
        }
    }
}

/// A finite edit of a graph: potential overrides, conductance overrides on
/// existing edges, and removed vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation<V: Ord> {
    pub potential: BTreeMap<V, f64>,
    pub conductance: BTreeMap<(V, V), f64>,
    pub removed: BTreeSet<V>,
}

impl<V: Ord> Default for Perturbation<V> {
    fn default() -> Self {
        Self {
            potential: BTreeMap::new(),
            conductance: BTreeMap::new(),
            removed: BTreeSet::new(),
        }
    }
}

impl<V: Ord + Clone + std::fmt::Debug> Perturbation<V> {
    pub fn is_empty(&self) -> bool {
        self.potential.is_empty() && self.conductance.is_empty() && self.removed.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for (v, p) in &self.potential {
            if !p.is_finite() {
                return Err(Error::NonFinitePerturbation(format!("potential {p} at {v:?}")));
            }
        }
        for ((a, b), c) in &self.conductance {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::NonFinitePerturbation(format!("conductance {c} on ({a:?}, {b:?})")));
            }
        }
        Ok(())
    }

    fn conductance_override(&self, a: &V, b: &V) -> Option<f64> {
        self.conductance
            .get(&(a.clone(), b.clone()))
            .or_else(|| self.conductance.get(&(b.clone(), a.clone())))
            .copied()
    }
}

/// `G` with a [`Perturbation`] applied.
#[derive(Debug, Clone)]
pub struct Perturbed<G: LocallyFinite> {
    pub inner: G,
    pub edit: Perturbation<G::Vertex>,
}

impl<G: LocallyFinite> Perturbed<G> {
    pub fn new(inner: G, edit: Perturbation<G::Vertex>) -> Result<Self> {
        edit.validate()?;
        for (a, b) in edit.conductance.keys() {
            if !inner.neighbors(a)?.iter().any(|(y, _)| y == b) {
                return Err(Error::NonFinitePerturbation(format!("({a:?}, {b:?}) is not an edge")));
            }
        }
        Ok(Self { inner, edit })
    }
}

impl<G: LocallyFinite> LocallyFinite for Perturbed<G> {
    type Vertex = G::Vertex;

    fn neighbors(&self, v: &G::Vertex) -> Result<Vec<(G::Vertex, f64)>> {
        if self.edit.removed.contains(v) {
            return Err(Error::UnknownVertex(format!("{v:?}")));
        }
        Ok(self
            .inner
            .neighbors(v)?
            .into_iter()
            .filter(|(y, _)| !self.edit.removed.contains(y))
            .map(|(y, c)| {
                let c = self.edit.conductance_override(v, &y).unwrap_or(c);
                (y, c)
            })
            .collect())
    }

    fn measure_at(&self, v: &G::Vertex) -> f64 {
        self.inner.measure_at(v)
    }

    fn potential_at(&self, v: &G::Vertex) -> f64 {
        self.edit
            .potential
            .get(v)
            .copied()
            .unwrap_or_else(|| self.inner.potential_at(v))
    }

    fn contains(&self, v: &G::Vertex) -> bool {
        self.inner.contains(v) && !self.edit.removed.contains(v)
    }
}

/// Applies a perturbation to a finite graph, returning the edited graph and
/// the surviving original vertex indices.
pub fn perturb_finite(g: &Graph, edit: &Perturbation<usize>) -> Result<(Graph, Vec<usize>)> {
    edit.validate()?;
    let mut potential = g.potential().to_vec();
    for (&v, &p) in &edit.potential {
        if v >= g.len() {
            return Err(Error::DanglingVertex { index: v, n: g.len() });
        }
        potential[v] = p;
    }
    let mut edges: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.conductance)).collect();
    for (&(a, b), &c) in &edit.conductance {
        let mut hit = false;
        for e in edges.iter_mut().filter(|e| (e.0, e.1) == (a, b) || (e.0, e.1) == (b, a)) {
            e.2 = c;
            hit = true;
        }
        if !hit {
            return Err(Error::NonFinitePerturbation(format!("({a}, {b}) is not an edge")));
        }
    }
    let edited = Graph::new(g.len(), edges, g.measure().to_vec(), potential)?;
    let keep: Vec<usize> = (0..g.len()).filter(|v| !edit.removed.contains(v)).collect();
    if keep.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let (sub, _) = edited.induced(&keep, true)?;
    Ok((sub, keep))
}
