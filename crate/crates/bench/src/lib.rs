//! Fixed inputs for the solver benchmarks.

use lambda0_core::action::MonodromyAction;
use lambda0_core::covering::CoveringGraph;
use lambda0_core::hyperbolic::Moebius;
use lambda0_core::{Graph, Result};

/// Square with one diagonal; the free group on `a, b` acts through the
/// voltages on edges 3 and 4.
pub fn chord_cover() -> Result<CoveringGraph> {
    let base = Graph::unweighted(4, vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0), (0, 2, 1.0)])?;
    let action = MonodromyAction::free(vec!["a".into(), "b".into()])?;
    CoveringGraph::with_voltages(base, action, &[(3, "a"), (4, "b")])
}

/// The parabolic pair `z ↦ z + 4`, `z ↦ z / (4z + 1)`.
pub fn schottky_pair() -> Result<Vec<Moebius>> {
    Ok(vec![Moebius::real([[1.0, 4.0], [0.0, 1.0]])?, Moebius::real([[1.0, 0.0], [4.0, 1.0]])?])
}

/// A weighted blob chain with `blobs` complete blobs of size 4.
pub fn chain(blobs: usize) -> Result<Graph> {
    Graph::blob_chain(blobs, 4, |k| 1.0 / k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(chord_cover().unwrap().base().len(), 4);
        assert_eq!(schottky_pair().unwrap().len(), 2);
        assert_eq!(chain(10).unwrap().len(), 40);
    }
}
