//! Bottom of the spectrum and of the essential spectrum.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ball, energy, Graph, GraphFunction, LocallyFinite};
use crate::lazy::{Perturbation, Perturbed};
use crate::linalg::{dense_eigen, lowest_eigenpairs, QuadraticForm, DENSE_LIMIT};
use crate::report::{opt_real, real, series};

/// Default cap on the number of vertices materialized from a lazy graph.
pub const MAX_WINDOW: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Dense,
    Iterative,
    Dirichlet,
    Exhaustion,
    TestFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    #[serde(with = "real")]
    pub value: f64,
    #[serde(with = "opt_real")]
    pub lower_bound: Option<f64>,
    #[serde(with = "opt_real")]
    pub upper_bound: Option<f64>,
    pub method: Method,
    #[serde(serialize_with = "series::serialize")]
    pub history: Vec<(usize, f64)>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl SpectralEstimate {
    fn single(value: f64, method: Method) -> Self {
        Self {
            value,
            lower_bound: None,
            upper_bound: None,
            method,
            history: Vec::new(),
            converged: true,
            flags: Vec::new(),
        }
    }
}

/// Bottom eigenpair of a form. Dense up to [`DENSE_LIMIT`] unknowns,
/// inertia bisection plus inverse iteration above, in which case the
/// estimate carries the bisection bracket as bounds.
pub fn bottom_of_form(form: &QuadraticForm) -> Result<(SpectralEstimate, Vec<f64>)> {
    if form.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if form.len() <= DENSE_LIMIT {
        let mut e = dense_eigen(form)?;
        let vector = e.vectors.swap_remove(0);
        Ok((SpectralEstimate::single(e.values[0], Method::Dense), vector))
    } else {
        let mut e = lowest_eigenpairs(form, 1, 1e-13)?;
        let value = e.values[0];
        let mut est = SpectralEstimate::single(value, Method::Iterative);
        est.lower_bound = Some(e.brackets[0].0.min(value));
        est.upper_bound = Some(value);
        Ok((est, e.vectors.swap_remove(0)))
    }
}

fn bottom_value(form: &QuadraticForm) -> Result<f64> {
    Ok(bottom_of_form(form)?.0.value)
}

/// `λ₀` of a finite graph, or of the Dirichlet problem on `region`.
pub fn lambda0_finite(g: &Graph, region: Option<&[usize]>) -> Result<SpectralEstimate> {
    Ok(ground_pair(g, region)?.0)
}

/// `λ₀` together with an `L²(m)`-normalized eigenvector indexed like
/// `region` (or like the graph).
pub fn ground_pair(g: &Graph, region: Option<&[usize]>) -> Result<(SpectralEstimate, Vec<f64>)> {
    match region {
        None => {
            if g.is_empty() {
                return Err(Error::EmptyRegion);
            }
            bottom_of_form(&g.form())
        }
        Some(r) => {
            let (mut est, v) = bottom_of_form(&g.dirichlet_form(r)?)?;
            if est.method == Method::Iterative {
                est.flags.push("iterative solver".into());
            }
            est.method = Method::Dirichlet;
            Ok((est, v))
        }
    }
}

fn check_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("schedule radii must be strictly increasing"));
    }
    Ok(())
}

/// Dirichlet eigenvalues of the balls `B(root, r)` for `r` in the schedule.
/// Each is an upper bound on `λ₀` of the whole graph; the history is
/// non-increasing. Sphere-regular graphs are reduced to radial functions.
pub fn lambda0_exhaustion<G: LocallyFinite>(
    g: &G,
    root: &G::Vertex,
    schedule: &[usize],
    max_vertices: usize,
) -> Result<SpectralEstimate> {
    check_schedule(schedule)?;
    let profile = g.radial_profile(root);
    let values: Vec<Result<f64>> = schedule
        .par_iter()
        .map(|&r| match &profile {
            Some(p) => bottom_value(&p.ball_form(r)?),
            None => {
                let b = ball(g, root, r, max_vertices)?;
                bottom_value(&crate::graph::region_form(g, &b.vertices)?)
            }
        })
        .collect();
    let mut history = Vec::with_capacity(schedule.len());
    for (&r, v) in schedule.iter().zip(values) {
        history.push((r, v?));
    }
    let value = history.last().map(|h| h.1).unwrap_or(f64::NAN);
    let mut flags = Vec::new();
    if profile.is_some() {
        flags.push("radial reduction".into());
    }
    let monotone = history.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
    if !monotone {
        flags.push("history not monotone".into());
    }
    Ok(SpectralEstimate {
        value,
        lower_bound: None,
        upper_bound: Some(value),
        method: Method::Exhaustion,
        history,
        converged: monotone,
        flags,
    })
}

/// Options for [`lambda_ess_estimate`].
#[derive(Debug, Clone, Copy)]
pub struct WindowOptions {
    /// Window radius as a multiple of the largest removed radius.
    pub factor: usize,
    /// Relative change on doubling the window that raises a flag.
    pub flag_threshold: f64,
    pub max_vertices: usize,
}

impl Default for WindowOptions {
    fn default() -> Self {
        Self {
            factor: 4,
            flag_threshold: 1e-3,
            max_vertices: MAX_WINDOW,
        }
    }
}

/// `λ₀` of `G ∖ B(root, r)` for each radius, Dirichlet on the removed ball.
/// Lazy graphs are truncated to one window `B(root, W)`, `W = factor · r_max`,
/// so the regions are nested and the history is non-decreasing. The value is
/// the supremum over the schedule; finite graphs report `+∞`.
pub fn lambda_ess_estimate<G: LocallyFinite>(
    g: &G,
    root: &G::Vertex,
    schedule: &[usize],
    opts: WindowOptions,
) -> Result<SpectralEstimate> {
    check_schedule(schedule)?;
    let r_max = *schedule.last().expect("nonempty");
    let window = (opts.factor.max(1) * r_max).max(r_max + 1);
    let mut flags = Vec::new();
    let history: Vec<(usize, f64)>;
    let mut converged = true;

    let profile = g.radial_profile(root);
    if let Some(p) = profile.filter(|_| g.as_finite().is_none()) {
        flags.push("radial reduction".into());
        let vals: Vec<Result<f64>> = schedule
            .par_iter()
            .map(|&r| bottom_value(&p.shell_form(r + 1, window)?))
            .collect();
        history = schedule.iter().copied().zip(vals.into_iter().collect::<Result<Vec<_>>>()?).collect();
        let doubled = bottom_value(&p.shell_form(r_max + 1, 2 * window)?)?;
        let last = history.last().expect("nonempty").1;
        if (last - doubled).abs() > opts.flag_threshold {
            flags.push(format!("window too small: doubling changes {last:.6e} to {doubled:.6e}"));
            converged = false;
        }
    } else {
        let big = ball(g, root, window, opts.max_vertices)?;
        let vals: Vec<Result<f64>> = schedule
            .par_iter()
            .map(|&r| {
                let region = big.outside(r);
                if region.is_empty() {
                    Ok(f64::INFINITY)
                } else {
                    bottom_value(&crate::graph::region_form(g, &region)?)
                }
            })
            .collect();
        history = schedule.iter().copied().zip(vals.into_iter().collect::<Result<Vec<_>>>()?).collect();
        if !big.closed {
            let last = history.last().expect("nonempty").1;
            match ball(g, root, 2 * window, opts.max_vertices) {
                Ok(b2) => {
                    let doubled = bottom_value(&crate::graph::region_form(g, &b2.outside(r_max))?)?;
                    if (last - doubled).abs() > opts.flag_threshold {
                        flags.push(format!("window too small: doubling changes {last:.6e} to {doubled:.6e}"));
                        converged = false;
                    }
                }
                Err(Error::TooLarge(_)) => {
                    flags.push("window doubling check skipped: doubled window too large".into());
                    converged = false;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let finite = g.as_finite().is_some();
    if finite {
        flags.push("finite graph: essential spectrum empty".into());
    }
    let value = if finite {
        f64::INFINITY
    } else {
        history.iter().map(|h| h.1).fold(f64::NEG_INFINITY, f64::max)
    };
    if history.windows(2).any(|w| w[1].1 < w[0].1 - 1e-9) {
        flags.push("history not monotone".into());
        converged = false;
    }
    Ok(SpectralEstimate {
        value,
        lower_bound: None,
        upper_bound: None,
        method: Method::Dirichlet,
        history,
        converged,
        flags,
    })
}

/// Rayleigh quotient of an explicit test function, an upper bound on `λ₀`.
pub fn test_function_bound<G: LocallyFinite>(g: &G, f: &GraphFunction<G::Vertex>) -> Result<SpectralEstimate> {
    let value = crate::graph::rayleigh_quotient(g, f)?;
    let mut est = SpectralEstimate::single(value, Method::TestFunction);
    est.upper_bound = Some(value);
    Ok(est)
}

/// Rayleigh quotients of the indicators of `B(root, r)`; the value is the
/// smallest, an upper bound on `λ₀`.
pub fn ball_indicator_bound<G: LocallyFinite>(
    g: &G,
    root: &G::Vertex,
    schedule: &[usize],
    max_vertices: usize,
) -> Result<SpectralEstimate> {
    check_schedule(schedule)?;
    let big = ball(g, root, *schedule.last().expect("nonempty"), max_vertices)?;
    let mut history = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let f: GraphFunction<G::Vertex> = big
            .vertices
            .iter()
            .zip(&big.distance)
            .take_while(|(_, &d)| d <= r)
            .map(|(v, _)| (v.clone(), 1.0))
            .collect();
        let q = energy(g, &f)? / f.norm_sq(g);
        history.push((r, q));
    }
    let value = history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
    let mut est = SpectralEstimate::single(value, Method::TestFunction);
    est.upper_bound = Some(value);
    est.history = history;
    est.flags.push("ball indicator test functions".into());
    Ok(est)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub before: SpectralEstimate,
    pub after: SpectralEstimate,
    #[serde(with = "real")]
    pub difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn difference(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        b - a
    }
}

/// Compares `λ_ess` estimates before and after a finite edit. Passes when
/// they differ by at most twice the estimator tolerance.
pub fn stability_check<G: LocallyFinite>(
    g: &G,
    edit: &Perturbation<G::Vertex>,
    root: &G::Vertex,
    root_after: Option<&G::Vertex>,
    schedule: &[usize],
    estimator_tolerance: f64,
    opts: WindowOptions,
) -> Result<StabilityReport> {
    edit.validate()?;
    let before = lambda_ess_estimate(g, root, schedule, opts)?;
    let after = if g.as_finite().is_some() {
        let mut e = before.clone();
        e.history.clear();
        e
    } else {
        let root_after = root_after.unwrap_or(root);
        if edit.removed.contains(root_after) {
            return Err(Error::param("base point is removed by the edit"));
        }
        let p = Perturbed::new(g, edit.clone())?;
        lambda_ess_estimate(&p, root_after, schedule, opts)?
    };
    let d = difference(before.value, after.value);
    Ok(StabilityReport {
        pass: d.abs() <= 2.0 * estimator_tolerance,
        before,
        after,
        difference: d,
        tolerance: 2.0 * estimator_tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lazy::LazyGraph;

    #[test]
    fn small_examples() {
        let k2 = Graph::path(2).unwrap();
        assert!(lambda0_finite(&k2, None).unwrap().value.abs() < 1e-14);
        let shifted = k2.with_potential(vec![1.0, 1.0]).unwrap();
        assert!((lambda0_finite(&shifted, None).unwrap().value - 1.0).abs() < 1e-14);
        let p3 = Graph::path(3).unwrap();
        let d = lambda0_finite(&p3, Some(&[0])).unwrap();
        assert_eq!(d.method, Method::Dirichlet);
        assert!((d.value - 1.0).abs() < 1e-14);
        assert!(matches!(lambda0_finite(&p3, Some(&[])), Err(Error::EmptyRegion)));
    }

    #[test]
    fn finite_exhaustion_terminates() {
        let g = Graph::cycle(6).unwrap();
        let e = lambda0_exhaustion(&g, &0, &[1, 2, 3, 4], 100).unwrap();
        assert!(e.value.abs() < 1e-12);
        assert!(e.history[0].1 > e.history[1].1);
        let ess = lambda_ess_estimate(&g, &0, &[1, 3], WindowOptions::default()).unwrap();
        assert_eq!(ess.value, f64::INFINITY);
        assert_eq!(ess.history[1].1, f64::INFINITY);
        assert!(matches!(lambda0_exhaustion(&g, &0, &[], 100), Err(Error::EmptySchedule)));
    }

    #[test]
    fn line_exhaustion_matches_sine_values() {
        let line = LazyGraph::line();
        let e = lambda0_exhaustion(&line, &vec![0], &[10, 100, 1000], MAX_WINDOW).unwrap();
        let want = |r: f64| 2.0 - 2.0 * (std::f64::consts::PI / (2.0 * r + 2.0)).cos();
        for &(r, v) in &e.history {
            assert!((v - want(r as f64)).abs() < 1e-10, "r={r}: {v}");
        }
        assert!(e.value <= 0.01);
    }

    #[test]
    fn ess_estimate_serializes_infinity() {
        let est = lambda_ess_estimate(&Graph::path(3).unwrap(), &0, &[5], WindowOptions::default()).unwrap();
        let s = serde_json::to_string(&est).unwrap();
        assert!(s.contains(r#""value":"inf""#), "{s}");
    }
}
