//! Positive ground states and the ground-state transform
//! `c' = c φ(x) φ(y)`, `m' = m φ²`, `V' = 0`, which conjugates `H − λ` by
//! multiplication with `φ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covering::ConeTypes;
use crate::error::{Error, Result};
use crate::graph::{ball, Graph, LocallyFinite};
use crate::isoperimetry::{cheeger_inequality_check, CheegerCheck};
use crate::linalg::dense_eigen;
use crate::spectral::ground_pair;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundState {
    pub phi: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
}

/// Bottom eigenpair of a connected finite graph with `φ > 0` and
/// `‖φ‖ = 1` in `L²(m)`.
pub fn ground_state(g: &Graph, tol: f64) -> Result<GroundState> {
    g.require_connected()?;
    let (est, mut phi) = ground_pair(g, None)?;
    if phi.iter().sum::<f64>() < 0.0 {
        phi.iter_mut().for_each(|x| *x = -*x);
    }
    if let Some(x) = phi.iter().position(|&v| v <= 0.0) {
        return Err(Error::NonPositivePhi(x));
    }
    let form = g.form();
    let norm = form.norm_sq(&phi).sqrt();
    phi.iter_mut().for_each(|x| *x /= norm);
    let lambda = form.rayleigh(&phi)?;
    let residual = form.residual(&phi, lambda);
    debug_assert!((lambda - est.value).abs() < 1e-6);
    if residual > tol {
        return Err(Error::Residual { residual, tolerance: tol });
    }
    Ok(GroundState { phi, lambda, residual })
}

/// Ground states of each component; vertex lists index into `g`.
pub fn ground_states_by_component(g: &Graph, tol: f64) -> Result<Vec<(Vec<usize>, GroundState)>> {
    g.components()
        .into_iter()
        .map(|comp| {
            let (sub, _) = g.induced(&comp, true)?;
            Ok((comp, ground_state(&sub, tol)?))
        })
        .collect()
}

/// The reweighted graph with conductances `c φφ`, measure `m φ²` and zero
/// potential. Its form is `Σ c φ(x)φ(y) (f(x) − f(y))²`.
pub fn doob_transform(g: &Graph, gs: &GroundState, residual_tolerance: f64) -> Result<Graph> {
    if gs.phi.len() != g.len() {
        return Err(Error::param("ground state does not match the graph"));
    }
    if let Some(x) = gs.phi.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::NonPositivePhi(x));
    }
    if gs.residual > residual_tolerance {
        return Err(Error::Residual {
            residual: gs.residual,
            tolerance: residual_tolerance,
        });
    }
    let phi = &gs.phi;
    let edges = g
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.conductance * phi[e.u] * phi[e.v]))
        .collect();
    let measure = g.measure().iter().zip(phi).map(|(m, p)| m * p * p).collect();
    Graph::new(g.len(), edges, measure, vec![0.0; g.len()])
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningReport {
    pub lambda: f64,
    pub spectrum_difference: f64,
    pub rayleigh_difference: f64,
    pub spectrum_tolerance: f64,
    pub rayleigh_tolerance: f64,
    pub trials: usize,
    pub pass: bool,
}

/// Checks `σ(transformed) = σ(G) − λ` and
/// `R_transformed(f) = R_G(φ f) − λ` on random `f`.
pub fn verify_intertwining(g: &Graph, gs: &GroundState, seed: u64, trials: usize) -> Result<IntertwiningReport> {
    let t = doob_transform(g, gs, 1e-8)?;
    let original = dense_eigen(&g.form())?.values;
    let transformed = dense_eigen(&t.form())?.values;
    let spectrum_difference = original
        .iter()
        .zip(&transformed)
        .map(|(a, b)| (a - gs.lambda - b).abs())
        .fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rayleigh_difference: f64 = 0.0;
    for _ in 0..trials {
        let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let pf: Vec<f64> = f.iter().zip(&gs.phi).map(|(a, p)| a * p).collect();
        let lhs = t.rayleigh(&f)?;
        let rhs = g.rayleigh(&pf)? - gs.lambda;
        rayleigh_difference = rayleigh_difference.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    let (spectrum_tolerance, rayleigh_tolerance) = (1e-8, 1e-9);
    Ok(IntertwiningReport {
        lambda: gs.lambda,
        spectrum_difference,
        rayleigh_difference,
        spectrum_tolerance,
        rayleigh_tolerance,
        trials,
        pass: spectrum_difference <= spectrum_tolerance && rayleigh_difference <= rayleigh_tolerance,
    })
}

/// The discrete Cheeger inequality for the transformed graph:
/// `λ₁ − λ₀ ≥ h_φ² / (2D_φ)`.
pub fn modified_cheeger_check(g: &Graph, gs: &GroundState) -> Result<CheegerCheck> {
    let t = doob_transform(g, gs, 1e-8)?;
    cheeger_inequality_check(&t, None, 1e-8)
}

/// `φ`-weighted ratios `|∂B_r|_φ / |B_r|_φ` of balls; on amenable covers with
/// lifted `φ` they decrease towards zero.
pub fn phi_ball_ratios<G: LocallyFinite>(
    g: &G,
    phi: &dyn Fn(&G::Vertex) -> f64,
    root: &G::Vertex,
    schedule: &[usize],
    max_vertices: usize,
) -> Result<Vec<(usize, f64)>> {
    let r_max = *schedule.iter().max().ok_or(Error::EmptySchedule)?;
    let big = ball(g, root, r_max, max_vertices)?;
    let mut out = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let inside: std::collections::HashSet<&G::Vertex> = big
            .vertices
            .iter()
            .zip(&big.distance)
            .filter(|(_, &d)| d <= r)
            .map(|(v, _)| v)
            .collect();
        let mut boundary = 0.0;
        let mut volume = 0.0;
        for x in &inside {
            let px = phi(x);
            volume += g.measure_at(x) * px * px;
            for (y, c) in g.neighbors(x)? {
                if !inside.contains(&y) {
                    boundary += c * px * phi(&y);
                }
            }
        }
        out.push((r, boundary / volume));
    }
    Ok(out)
}

/// Positive supersolution on a tree covering: `u(child) = F[t] u(parent)`
/// for a child entered along half-edge `t`, with `Hu ≥ μ u` everywhere, so
/// that `λ₀ ≥ μ`.
#[derive(Debug, Clone, Serialize)]
pub struct SupersolutionCertificate {
    pub mu: f64,
    pub ratios: Vec<f64>,
    pub root: usize,
}

/// Largest `μ` (up to bisection) for which the cone-type recursion
/// `F[t] = c_t / (c_t + Σ_{s child of t} c_s (1 − F[s]) − (μ − V) m)` has a
/// positive solution; the certified value is recomputed from the solution.
pub fn cone_supersolution_bound(
    cones: &ConeTypes,
    conductance: &[f64],
    measure: &[f64],
    potential: &[f64],
) -> Result<SupersolutionCertificate> {
    let types = cones.half_edges.len();
    let n = cones.outgoing.len();
    if conductance.len() != types || measure.len() != n || potential.len() != n {
        return Err(Error::param("weights do not match the cone types"));
    }
    if types == 0 {
        return Err(Error::param("covering has no active edges"));
    }
    let quotient = |ratios: &[f64]| -> (f64, usize) {
        let mut worst = f64::INFINITY;
        for t in 0..types {
            let h = cones.half_edges[t].head;
            let kids: f64 = cones.children[t].iter().map(|&s| conductance[s] * (1.0 - ratios[s])).sum();
            let q = potential[h] + (conductance[t] * (1.0 - 1.0 / ratios[t]) + kids) / measure[h];
            worst = worst.min(q);
        }
        let mut best_root = (f64::NEG_INFINITY, 0);
        for x in 0..n {
            let q = potential[x]
                + cones.outgoing[x].iter().map(|&s| conductance[s] * (1.0 - ratios[s])).sum::<f64>() / measure[x];
            if q > best_root.0 {
                best_root = (q, x);
            }
        }
        (worst.min(best_root.0), best_root.1)
    };
    let solve = |mu: f64| -> Option<Vec<f64>> {
        let mut f = vec![0.0; types];
        for _ in 0..200_000 {
            let mut change: f64 = 0.0;
            let mut next = vec![0.0; types];
            for t in 0..types {
                let h = cones.half_edges[t].head;
                let kids: f64 = cones.children[t].iter().map(|&s| conductance[s] * (1.0 - f[s])).sum();
                let denom = conductance[t] + kids - (mu - potential[h]) * measure[h];
                if denom <= 0.0 {
                    return None;
                }
                next[t] = conductance[t] / denom;
                change = change.max((next[t] - f[t]).abs());
            }
            f = next;
            if f.iter().any(|&x| !(x.is_finite() && x < 1e12)) {
                return None;
            }
            if change <= 1e-15 {
                return Some(f);
            }
        }
        None
    };
    let mut lo = potential.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = (0..types)
        .map(|t| {
            let h = cones.half_edges[t].head;
            potential[h] + cones.outgoing[h].iter().map(|&s| conductance[s]).sum::<f64>() / measure[h]
        })
        .fold(f64::INFINITY, f64::min);
    let mut best = solve(lo).ok_or_else(|| Error::NotConverged("cone recursion at the potential minimum".into()))?;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match solve(mid) {
            Some(f) => {
                best = f;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    let (mu, root) = quotient(&best);
    Ok(SupersolutionCertificate { mu, ratios: best, root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::MonodromyAction;
    use crate::covering::CoveringGraph;
    use crate::spectral::lambda0_finite;

    #[test]
    fn k2_states() {
        let k2 = Graph::path(2).unwrap();
        let gs = ground_state(&k2, 1e-10).unwrap();
        assert!(gs.lambda.abs() < 1e-14);
        assert!(gs.phi.iter().all(|p| (p - 0.5f64.sqrt()).abs() < 1e-14));
        let well = k2.with_potential(vec![0.0, 1.0]).unwrap();
        let gs = ground_state(&well, 1e-10).unwrap();
        assert!((gs.lambda - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        let t = doob_transform(&well, &gs, 1e-8).unwrap();
        assert!(lambda0_finite(&t, None).unwrap().value.abs() < 1e-12);
        let rep = verify_intertwining(&well, &gs, 1, 100).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(modified_cheeger_check(&well, &gs).unwrap().pass);
    }

    #[test]
    fn p3_well() {
        let g = Graph::path(3).unwrap().with_potential(vec![1.0, 0.0, 1.0]).unwrap();
        let gs = ground_state(&g, 1e-10).unwrap();
        let t = doob_transform(&g, &gs, 1e-8).unwrap();
        assert!(lambda0_finite(&t, None).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn tree_supersolution_is_sharp() {
        let cover = CoveringGraph::with_voltages(
            Graph::bouquet(2).unwrap(),
            MonodromyAction::free(vec!["a".into(), "b".into()]).unwrap(),
            &[(0, "a"), (1, "b")],
        )
        .unwrap();
        let cones = cover.cone_types().unwrap();
        let c: Vec<f64> = cones.half_edges.iter().map(|h| h.conductance).collect();
        let cert = cone_supersolution_bound(&cones, &c, &[1.0], &[0.0]).unwrap();
        let exact = 4.0 - 2.0 * 3f64.sqrt();
        assert!(cert.mu <= exact + 1e-12 && cert.mu > exact - 1e-6, "{}", cert.mu);
    }
}
