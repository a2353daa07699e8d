//! JSON descriptions of graphs, catalog graphs, actions and coverings.
//!
//! A finite graph is either explicit,
//! `{"vertices": 2, "edges": [[0, 1, 1.0]], "measure": [1, 1], "potential": [0, 1]}`,
//! or generated, `{"generator": "cycle", "params": {"n": 4}}`. Measure and
//! potential default to 1 and 0. Unknown fields are rejected everywhere.

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::action::{ActionKind, MonodromyAction, Word};
use crate::covering::CoveringGraph;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lazy::{LazyGraph, LazyKind, Perturbation, Point};

/// Deserializes with the path of the offending field in the error.
pub fn from_value<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        Error::schema(path, e.into_inner().to_string())
    })
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::schema(e.path().to_string(), e.into_inner().to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Path,
    Cycle,
    Complete,
    Bouquet,
    BlobChain,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub n: Option<usize>,
    pub loops: Option<usize>,
    pub blobs: Option<usize>,
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDesc {
    pub vertices: Option<usize>,
    pub edges: Option<Vec<(usize, usize, f64)>>,
    pub generator: Option<Generator>,
    pub params: Option<GeneratorParams>,
    pub measure: Option<Vec<f64>>,
    pub potential: Option<Vec<f64>>,
}

fn need(v: Option<usize>, path: &str, field: &str) -> Result<usize> {
    v.ok_or_else(|| Error::schema(format!("{path}.params.{field}"), "missing field"))
}

impl GraphDesc {
    /// `path` locates the description in its file, for diagnostics.
    pub fn build(&self, path: &str) -> Result<Graph> {
        let g = match (self.generator, &self.edges) {
            (Some(_), Some(_)) => return Err(Error::schema(path, "give either `generator` or `edges`, not both")),
            (None, None) => return Err(Error::schema(path, "missing `generator` or `edges`")),
            (None, Some(edges)) => {
                if self.params.is_some() {
                    return Err(Error::schema(format!("{path}.params"), "only valid with `generator`"));
                }
                let n = self
                    .vertices
                    .ok_or_else(|| Error::schema(format!("{path}.vertices"), "missing field"))?;
                Graph::from_listing(n, edges, vec![1.0; n], vec![0.0; n])?
            }
            (Some(gen), None) => {
                let p = self.params.clone().unwrap_or_default();
                let g = match gen {
                    Generator::Path => Graph::path(need(p.n, path, "n")?)?,
                    Generator::Cycle => Graph::cycle(need(p.n, path, "n")?)?,
                    Generator::Complete => Graph::complete(need(p.n, path, "n")?)?,
                    Generator::Bouquet => Graph::bouquet(need(p.loops, path, "loops")?)?,
                    Generator::BlobChain => Graph::blob_chain(need(p.blobs, path, "blobs")?, need(p.size, path, "size")?, |k| {
                        LazyGraph::neck(k as i64)
                    })?,
                };
                if let Some(n) = self.vertices {
                    if n != g.len() {
                        return Err(Error::schema(
                            format!("{path}.vertices"),
                            format!("generator produces {} vertices", g.len()),
                        ));
                    }
                }
                g
            }
        };
        let mut g = g;
        if let Some(m) = &self.measure {
            g = g.with_measure(m.clone())?;
        }
        if let Some(v) = &self.potential {
            g = g.with_potential(v.clone())?;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LazyName {
    Line,
    Lattice,
    Tree,
    BlobChain,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LazyDesc {
    pub lazy: LazyName,
    pub dim: Option<usize>,
    pub degree: Option<usize>,
    pub blob_size: Option<usize>,
    #[serde(default = "one")]
    pub conductance: f64,
    #[serde(default = "one")]
    pub measure: f64,
    #[serde(default)]
    pub potential: f64,
}

impl LazyDesc {
    pub fn build(&self, path: &str) -> Result<LazyGraph> {
        let field = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::schema(format!("{path}.{name}"), "missing field"));
        let kind = match self.lazy {
            LazyName::Line => LazyKind::Line,
            LazyName::Lattice => LazyKind::Lattice { dim: field(self.dim, "dim")? },
            LazyName::Tree => LazyKind::Tree {
                degree: field(self.degree, "degree")?,
            },
            LazyName::BlobChain => LazyKind::BlobChain {
                blob_size: field(self.blob_size, "blob_size")?,
            },
        };
        LazyGraph::new(kind)?.with_weights(self.conductance, self.measure, self.potential)
    }
}

/// Finite edit of a catalog graph; vertices are coordinate arrays.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EditDesc {
    #[serde(default)]
    pub potential: Vec<(Point, f64)>,
    #[serde(default)]
    pub conductance: Vec<(Point, Point, f64)>,
    #[serde(default)]
    pub removed: Vec<Point>,
}

impl EditDesc {
    pub fn build(&self) -> Result<Perturbation<Point>> {
        let mut p = Perturbation::default();
        for (v, x) in &self.potential {
            p.potential.insert(v.clone(), *x);
        }
        for (u, v, c) in &self.conductance {
            p.conductance.insert((u.clone(), v.clone()), *c);
        }
        p.removed.extend(self.removed.iter().cloned());
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    Trivial,
    Cyclic,
    Integer,
    Lattice,
    Free,
    Permutation,
    Product,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionParams {
    pub size: Option<usize>,
    pub order: Option<usize>,
    pub shifts: Option<Vec<i64>>,
    pub steps: Option<Vec<i64>>,
    pub vectors: Option<Vec<Vec<i64>>>,
    pub perms: Option<Vec<Vec<usize>>>,
    pub left: Option<Box<ActionDesc>>,
    pub right: Option<Box<ActionDesc>>,
}

/// `{"type": "cyclic", "generators": ["a"], "params": {"order": 6, "shifts": [1]}}`.
/// Factors of a product inherit the generator names.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDesc {
    #[serde(rename = "type")]
    pub kind: ActionType,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default)]
    pub params: ActionParams,
}

impl ActionDesc {
    pub fn build(&self, path: &str) -> Result<MonodromyAction> {
        self.build_with(path, &self.generators)
    }

    fn build_with(&self, path: &str, inherited: &[String]) -> Result<MonodromyAction> {
        let names = if self.generators.is_empty() {
            inherited.to_vec()
        } else {
            self.generators.clone()
        };
        if names.is_empty() {
            return Err(Error::schema(format!("{path}.generators"), "at least one generator is required"));
        }
        let p = &self.params;
        let missing = |field: &str| Error::schema(format!("{path}.params.{field}"), "missing field");
        match self.kind {
            ActionType::Trivial => MonodromyAction::trivial(names, p.size.ok_or_else(|| missing("size"))?),
            ActionType::Cyclic => MonodromyAction::cyclic(
                names,
                p.order.ok_or_else(|| missing("order"))?,
                p.shifts.clone().ok_or_else(|| missing("shifts"))?,
            ),
            ActionType::Integer => MonodromyAction::integer(names, p.steps.clone().ok_or_else(|| missing("steps"))?),
            ActionType::Lattice => MonodromyAction::lattice(names, p.vectors.clone().ok_or_else(|| missing("vectors"))?),
            ActionType::Free => MonodromyAction::free(names),
            ActionType::Permutation => MonodromyAction::permutation(names, p.perms.clone().ok_or_else(|| missing("perms"))?),
            ActionType::Product => {
                let left = p.left.as_ref().ok_or_else(|| missing("left"))?;
                let right = p.right.as_ref().ok_or_else(|| missing("right"))?;
                MonodromyAction::product(
                    left.build_with(&format!("{path}.params.left"), &names)?,
                    right.build_with(&format!("{path}.params.right"), &names)?,
                )
            }
        }
    }
}

/// Catalog name of an action kind.
pub fn describe_kind(kind: &ActionKind) -> &'static str {
    match kind {
        ActionKind::Trivial { .. } => "trivial",
        ActionKind::Cyclic { .. } => "cyclic",
        ActionKind::Integer { .. } => "integer",
        ActionKind::Lattice { .. } => "lattice",
        ActionKind::Free => "free",
        ActionKind::Permutation { .. } => "permutation",
        ActionKind::Product(..) => "product",
    }
}

/// `{"base": <graph>, "action": <action>, "voltage": [[edge, "a b^-1"], ...]}`;
/// unlisted edges carry the trivial word.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDesc {
    pub base: GraphDesc,
    pub action: ActionDesc,
    #[serde(default)]
    pub voltage: Vec<(usize, String)>,
}

impl CoverDesc {
    pub fn build(&self, path: &str) -> Result<CoveringGraph> {
        let base = self.base.build(&format!("{path}.base"))?;
        let action = self.action.build(&format!("{path}.action"))?;
        let listed: Vec<(usize, &str)> = self.voltage.iter().map(|(e, w)| (*e, w.as_str())).collect();
        for (i, (e, _)) in self.voltage.iter().enumerate() {
            if *e >= base.edges().len() {
                return Err(Error::schema(
                    format!("{path}.voltage[{i}]"),
                    format!("edge {e} does not exist; base has {} edges", base.edges().len()),
                ));
            }
        }
        CoveringGraph::with_voltages(base, action, &listed)
    }
}

pub fn parse_words(action: &MonodromyAction, words: &[String]) -> Result<Vec<Word>> {
    words.iter().map(|w| action.parse_word(w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn explicit_and_generated_graphs() {
        let d: GraphDesc = from_value(json!({"vertices": 2, "edges": [[0, 1, 1.0]]}), "").unwrap();
        let g = d.build("graph").unwrap();
        assert_eq!((g.len(), g.edges().len()), (2, 1));
        let d: GraphDesc = from_value(json!({"generator": "cycle", "params": {"n": 4}}), "").unwrap();
        assert_eq!(d.build("graph").unwrap().edges().len(), 4);
        let d: GraphDesc = from_value(json!({"generator": "bouquet", "params": {"loops": 2}}), "").unwrap();
        let g = d.build("graph").unwrap();
        assert_eq!(g.form().value(&[3.0]), 0.0);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = from_value::<GraphDesc>(json!({"vertices": 2, "edgez": []}), "inputs.graph").unwrap_err();
        assert!(matches!(&e, Error::Schema { path, .. } if path.starts_with("inputs.graph")), "{e}");
        assert!(e.to_string().contains("edgez"), "{e}");
        let e = from_value::<GraphDesc>(json!({"vertices": 2, "edges": [[0, 1, "x"]]}), "g").unwrap_err();
        assert!(e.to_string().starts_with("g.edges[0]"), "{e}");
        let d: GraphDesc = from_value(json!({"generator": "cycle"}), "").unwrap();
        let e = d.build("graph").unwrap_err();
        assert_eq!(e.to_string(), "graph.params.n: missing field");
        let d: GraphDesc = from_value(json!({"vertices": 2, "edges": [[0, 1, -1.0]]}), "").unwrap();
        assert!(matches!(d.build("g"), Err(Error::NonPositiveWeight { .. })));
    }

    #[test]
    fn actions_and_covers() {
        let c: CoverDesc = from_value(
            json!({
                "base": {"generator": "bouquet", "params": {"loops": 2}},
                "action": {"type": "free", "generators": ["a", "b"]},
                "voltage": [[0, "a"], [1, "b"]]
            }),
            "",
        )
        .unwrap();
        let cover = c.build("cover").unwrap();
        assert_eq!(cover.cone_types().unwrap().half_edges.len(), 4);
        let p: ActionDesc = from_value(
            json!({"type": "product", "generators": ["a"], "params": {
                "left": {"type": "cyclic", "params": {"order": 2, "shifts": [1]}},
                "right": {"type": "integer", "params": {"steps": [1]}}}}),
            "",
        )
        .unwrap();
        assert_eq!(describe_kind(p.build("a").unwrap().kind()), "product");
        let bad: CoverDesc = from_value(
            json!({"base": {"generator": "cycle", "params": {"n": 3}}, "action": {"type": "free", "generators": ["a"]}, "voltage": [[7, "a"]]}),
            "",
        )
        .unwrap();
        assert_eq!(bad.build("c").unwrap_err().to_string(), "c.voltage[0]: edge 7 does not exist; base has 3 edges");
    }
}
