//! Real, complex, quaternionic and octonionic hyperbolic constants, Poincaré
//! series of Möbius groups, and a surface of revolution with a cusp-like end.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amenability::AmenabilityStatus;
use crate::error::{Error, Result};
use crate::linalg::QuadraticForm;
use crate::report::series;
use crate::spectral::bottom_of_form;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    R,
    C,
    H,
    O,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicSpace {
    pub family: Family,
    pub parameter: u32,
    pub dimension: u32,
    pub entropy: u32,
    pub lambda0: f64,
}

/// Real dimension `m` and volume entropy `h` of the hyperbolic space, with
/// `λ₀ = h²/4`. For `R` the parameter is `m`; for `C` and `H` it is the
/// dimension over the division algebra; `O` only exists for parameter 2.
pub fn space_constants(family: Family, n: u32) -> Result<HyperbolicSpace> {
    let (dimension, entropy) = match (family, n) {
        (Family::R, m) if m >= 2 => (m, m - 1),
        (Family::C, n) if n >= 1 => (2 * n, 2 * n),
        (Family::H, n) if n >= 1 => (4 * n, 4 * n + 2),
        (Family::O, 2) => (16, 22),
        _ => return Err(Error::param(format!("no hyperbolic space {family:?} with parameter {n}"))),
    };
    Ok(HyperbolicSpace {
        family,
        parameter: n,
        dimension,
        entropy,
        lambda0: f64::from(entropy * entropy) / 4.0,
    })
}

/// `λ₀` of a real hyperbolic quotient of dimension `m` with critical exponent
/// `δ`.
pub fn sullivan_lambda0(delta: f64, m: u32) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::param(format!("critical exponent {delta} must be non-negative")));
    }
    if m < 2 {
        return Err(Error::param("dimension must be at least 2"));
    }
    let k = f64::from(m - 1);
    Ok(if delta >= k / 2.0 { delta * (k - delta) } else { k * k / 4.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Halfplane,
    Halfspace,
}

/// A point `(z, t)` of the upper half-space, `t > 0`; the upper half-plane is
/// the slice `Im z = 0` with `x + iy ↦ (x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub t: f64,
}

impl Point {
    pub fn halfplane(w: Complex64) -> Result<Self> {
        Self::halfspace(Complex64::new(w.re, 0.0), w.im)
    }

    pub fn halfspace(z: Complex64, t: f64) -> Result<Self> {
        if !(t > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::param(format!("height {t} must be positive")));
        }
        Ok(Self { z, t })
    }
}

pub fn hyperbolic_distance(p: &Point, q: &Point) -> Result<f64> {
    if !(p.t > 0.0 && q.t > 0.0) {
        return Err(Error::param("height must be positive"));
    }
    let chord = ((p.z - q.z).norm_sqr() + (p.t - q.t).powi(2)).sqrt();
    Ok(2.0 * (chord / (2.0 * (p.t * q.t).sqrt())).asinh())
}

/// Distance between points of the upper half-plane.
pub fn halfplane_distance(z: Complex64, w: Complex64) -> Result<f64> {
    hyperbolic_distance(&Point::halfplane(z)?, &Point::halfplane(w)?)
}

/// An element of `SL(2, ℂ)` acting on half-space (real entries preserve the
/// half-plane slice).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moebius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Moebius {
    /// Scales the matrix to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > 1e-300) || !det.is_finite() {
            return Err(Error::param("singular Möbius matrix"));
        }
        let s = det.sqrt();
        let m = Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        };
        if (m.det() - 1.0).norm() > 1e-12 {
            return Err(Error::param("determinant normalization failed"));
        }
        Ok(m)
    }

    pub fn real(rows: [[f64; 2]; 2]) -> Result<Self> {
        let r = |x: f64| Complex64::new(x, 0.0);
        Self::new(r(rows[0][0]), r(rows[0][1]), r(rows[1][0]), r(rows[1][1]))
    }

    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Self) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let one = Complex64::new(1.0, 0.0);
        [1.0, -1.0].iter().any(|&s| {
            (self.a - one * s).norm() <= tol
                && self.b.norm() <= tol
                && self.c.norm() <= tol
                && (self.d - one * s).norm() <= tol
        })
    }

    pub fn apply(&self, p: &Point) -> Point {
        let w = self.c * p.z + self.d;
        let den = w.norm_sqr() + self.c.norm_sqr() * p.t * p.t;
        let z = ((self.a * p.z + self.b) * w.conj() + self.a * self.c.conj() * p.t * p.t) / den;
        Point { z, t: p.t / den }
    }

    /// Center and radius of the isometric sphere `|cz + d| = 1`.
    fn isometric_sphere(&self) -> Option<(Complex64, f64)> {
        (self.c.norm() > 1e-12).then(|| (-self.d / self.c, 1.0 / self.c.norm()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoincareSeries {
    pub s: f64,
    #[serde(serialize_with = "series::serialize")]
    pub layer_sums: Vec<(usize, f64)>,
    #[serde(serialize_with = "series::serialize")]
    pub partial_sums: Vec<(usize, f64)>,
    pub layer_ratios: Vec<f64>,
    pub total: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Distances `d(x, γ y)` for the reduced words `γ` of the generators, grouped
/// by word length. The enumeration assumes the group is free on the
/// generators, which the ping-pong check supports heuristically.
#[derive(Debug, Clone)]
pub struct OrbitLayers {
    pub distances: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl OrbitLayers {
    pub fn new(generators: &[Moebius], x: &Point, y: &Point, max_word_len: usize) -> Result<Self> {
        let mut warnings = Vec::new();
        let gens: Vec<Moebius> = generators.iter().filter(|g| !g.is_identity(1e-12)).copied().collect();
        if gens.len() < generators.len() {
            warnings.push("identity generators ignored".into());
        }
        let mut letters = Vec::with_capacity(2 * gens.len());
        for g in &gens {
            letters.push(*g);
            letters.push(g.inverse());
        }
        if let Some(w) = ping_pong_warning(&letters) {
            warnings.push(w);
        }
        let base = hyperbolic_distance(x, y)?;
        let per_letter: Vec<Vec<Vec<f64>>> = (0..letters.len())
            .into_par_iter()
            .map(|first| {
                let mut layers = vec![Vec::new(); max_word_len];
                let mut stack = vec![(letters[first], first, 1usize)];
                while let Some((m, last, len)) = stack.pop() {
                    let image = m.apply(y);
                    layers[len - 1].push(hyperbolic_distance(x, &image).unwrap_or(f64::INFINITY));
                    if len < max_word_len {
                        for (k, l) in letters.iter().enumerate() {
                            if k != (last ^ 1) {
                                stack.push((m.compose(l), k, len + 1));
                            }
                        }
                    }
                }
                layers
            })
            .collect();
        let mut distances = vec![vec![base]];
        for len in 0..max_word_len {
            distances.push(per_letter.iter().flat_map(|p| p[len].iter().copied()).collect());
        }
        if distances.iter().flatten().any(|d| !d.is_finite()) {
            return Err(Error::Overflow("orbit point left floating-point range".into()));
        }
        Ok(Self { distances, warnings })
    }

    pub fn layer_sum(&self, k: usize, s: f64) -> f64 {
        self.distances[k].iter().map(|d| (-s * d).exp()).sum()
    }

    pub fn series(&self, s: f64) -> Result<PoincareSeries> {
        if !(s > 0.0) {
            return Err(Error::param("exponent must be positive"));
        }
        let layer_sums: Vec<(usize, f64)> = (0..self.distances.len()).map(|k| (k, self.layer_sum(k, s))).collect();
        let mut acc = 0.0;
        let partial_sums: Vec<(usize, f64)> = layer_sums
            .iter()
            .map(|&(k, v)| {
                acc += v;
                (k, acc)
            })
            .collect();
        if !acc.is_finite() {
            return Err(Error::Overflow(format!("partial sum overflows at s = {s}")));
        }
        let layer_ratios = layer_sums.windows(2).skip(1).map(|w| w[1].1 / w[0].1).collect();
        Ok(PoincareSeries {
            s,
            layer_sums,
            partial_sums,
            layer_ratios,
            total: acc,
            warnings: self.warnings.clone(),
        })
    }

    /// Root-test growth of the layer sums over the second half of the word
    /// lengths.
    fn growth(&self, s: f64) -> f64 {
        let top = self.distances.len() - 1;
        let mid = (top / 2).max(1);
        if top <= mid {
            return self.layer_sum(top, s).min(1.0);
        }
        (self.layer_sum(top, s) / self.layer_sum(mid, s)).powf(1.0 / (top - mid) as f64)
    }
}

/// Disjointness of the isometric spheres of the generators and their
/// inverses, after a fixed generic conjugation; a sufficient condition for a
/// Schottky configuration. Cyclic groups are not checked.
fn ping_pong_warning(letters: &[Moebius]) -> Option<String> {
    if letters.len() <= 2 {
        return None;
    }
    let t = Moebius::real([[1.0, 0.5], [-0.3, 0.85]]).expect("invertible");
    let spheres: Option<Vec<(Complex64, f64)>> = letters
        .iter()
        .map(|g| t.compose(g).compose(&t.inverse()).isometric_sphere())
        .collect();
    let Some(spheres) = spheres else {
        return Some("ping-pong check unavailable: a generator fixes the test point at infinity".to_string());
    };
    for i in 0..spheres.len() {
        for j in i + 1..spheres.len() {
            if (spheres[i].0 - spheres[j].0).norm() <= spheres[i].1 + spheres[j].1 {
                return Some(format!("isometric spheres {i} and {j} overlap; group may not be free"));
            }
        }
    }
    None
}

/// `Σ_γ e^{−s d(x, γ y)}` over reduced words of length at most
/// `max_word_len`.
pub fn poincare_series(generators: &[Moebius], s: f64, x: &Point, y: &Point, max_word_len: usize) -> Result<PoincareSeries> {
    OrbitLayers::new(generators, x, y, max_word_len)?.series(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaEstimate {
    pub delta_lo: f64,
    pub delta_hi: f64,
    pub word_len: usize,
    pub heuristic: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Bisection for the exponent at which the layer sums stop growing. A
/// trivial group has exponent zero.
pub fn critical_exponent_estimate(
    generators: &[Moebius],
    x: &Point,
    bracket: (f64, f64),
    width: f64,
    max_word_len: usize,
) -> Result<DeltaEstimate> {
    if generators.iter().all(|g| g.is_identity(1e-12)) {
        return Ok(DeltaEstimate {
            delta_lo: 0.0,
            delta_hi: 0.0,
            word_len: 0,
            heuristic: true,
            warnings: vec!["trivial group".into()],
        });
    }
    if max_word_len < 2 {
        return Err(Error::param("word length must be at least 2"));
    }
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && hi > lo && width > 0.0) {
        return Err(Error::param("bracket must satisfy 0 ≤ lo < hi and width > 0"));
    }
    let layers = OrbitLayers::new(generators, x, x, max_word_len)?;
    let diverges = |s: f64| layers.growth(s) >= 1.0;
    if !diverges(lo) || diverges(hi) {
        return Err(Error::Bracket(format!(
            "layer growth at s = {lo} is {:.4}, at s = {hi} is {:.4}",
            layers.growth(lo),
            layers.growth(hi)
        )));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if diverges(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DeltaEstimate {
        delta_lo: lo,
        delta_hi: hi,
        word_len: max_word_len,
        heuristic: true,
        warnings: layers.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    Strict,
    EqualByCase2,
    NoPrediction,
}

/// Predicted relation between `λ₀` of a quotient `M₀` of `H` and of a cover
/// `M₁ → M₀`, given the amenability verdict of the covering.
pub fn gefin_predict(lambda0_m0: f64, space: &HyperbolicSpace, verdict: AmenabilityStatus) -> Result<Relation> {
    if !(lambda0_m0 >= 0.0) {
        return Err(Error::param("λ₀ must be non-negative"));
    }
    if lambda0_m0 > space.lambda0 + 1e-9 {
        return Err(Error::param(format!(
            "λ₀ = {lambda0_m0} exceeds λ₀ = {} of the universal cover",
            space.lambda0
        )));
    }
    if (lambda0_m0 - space.lambda0).abs() <= 1e-9 {
        return Ok(Relation::EqualByCase2);
    }
    Ok(match verdict {
        AmenabilityStatus::CertifiedAmenable => Relation::Equal,
        AmenabilityStatus::EvidenceNonamenable => Relation::Strict,
        AmenabilityStatus::Inconclusive => Relation::NoPrediction,
    })
}

/// Surface of revolution of the profile `exp(−x^α)` over `[1, L]`,
/// discretized on `N` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevolutionSurface {
    pub alpha: f64,
    pub length: f64,
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub radius: f64,
    pub window_end: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceReport {
    pub surface: RevolutionSurface,
    /// `2π ∫₁^L w`.
    pub volume_truncated: f64,
    /// Upper bound on `2π ∫_L^∞ w`.
    pub volume_tail_bound: f64,
    pub volume: f64,
    pub lambda0: f64,
    pub lambda0_residual: f64,
    pub lambda_tail: Vec<TailEstimate>,
}

impl RevolutionSurface {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param("α must lie in (0, 1)"));
        }
        if !(self.length > 1.0 && self.length.is_finite()) {
            return Err(Error::param("L must exceed 1"));
        }
        if self.grid < 2 {
            return Err(Error::param("grid needs at least 2 intervals"));
        }
        Ok(())
    }

    pub fn profile(&self, x: f64) -> f64 {
        (-x.powf(self.alpha)).exp()
    }

    fn node(&self, i: usize) -> f64 {
        1.0 + (self.length - 1.0) * i as f64 / self.grid as f64
    }

    /// Finite-difference form of `∫ f′² w / ∫ f² w` on nodes `first..=last`,
    /// Neumann at the right end and, if `dirichlet`, Dirichlet just left of
    /// `first`.
    fn form(&self, first: usize, last: usize, dirichlet: bool) -> QuadraticForm {
        let h = (self.length - 1.0) / self.grid as f64;
        let n = last - first + 1;
        let mid = |i: usize| self.profile(self.node(i) + 0.5 * h) / h;
        let mut measure = Vec::with_capacity(n);
        for i in first..=last {
            let half = i == 0 || i == self.grid;
            measure.push(self.profile(self.node(i)) * if half { 0.5 * h } else { h });
        }
        let mut diagonal = vec![0.0; n];
        if dirichlet && first > 0 {
            diagonal[0] = mid(first - 1);
        }
        let couplings = (first..last).map(|i| (i - first, i - first + 1, mid(i))).collect();
        QuadraticForm::new(measure, diagonal, couplings)
    }

    /// `∫_L^∞ e^{−x^α} dx = Γ(1/α, L^α)/α`, bounded by
    /// `X^{a−1} e^{−X} / (α (1 − (a−1)/X))` with `a = 1/α`, `X = L^α`.
    fn tail_bound(&self) -> f64 {
        let a = 1.0 / self.alpha;
        let x = self.length.powf(self.alpha);
        if x > a - 1.0 {
            x.powf(a - 1.0) * (-x).exp() / (self.alpha * (1.0 - (a - 1.0) / x))
        } else {
            f64::INFINITY
        }
    }

    fn integral(&self) -> f64 {
        let n = 2 * self.grid;
        let h = (self.length - 1.0) / n as f64;
        let w = |i: usize| self.profile(1.0 + h * i as f64);
        let inner: f64 = (1..n).map(|i| if i % 2 == 1 { 4.0 * w(i) } else { 2.0 * w(i) }).sum();
        h / 3.0 * (w(0) + inner + w(n))
    }
}

/// Volume, `λ₀` (Neumann at both ends) and, for each `R` of the schedule,
/// the bottom of the form on `[R, R · L / R_max]` with Dirichlet at `R`, so
/// the windows scale with `R` and the last one ends at `L`.
pub fn salpha_solver(surface: &RevolutionSurface, schedule: &[f64]) -> Result<SurfaceReport> {
    surface.validate()?;
    if schedule.is_empty() {
        return Err(Error::EmptySchedule);
    }
    let r_max = schedule.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if schedule.iter().any(|&r| r < 1.0) || r_max >= surface.length {
        return Err(Error::param(format!(
            "L = {} too small for a tail schedule reaching R = {r_max}",
            surface.length
        )));
    }
    let tau = std::f64::consts::TAU;
    let volume_truncated = tau * surface.integral();
    let volume_tail_bound = tau * surface.tail_bound();
    let whole = surface.form(0, surface.grid, false);
    let (est, v) = bottom_of_form(&whole)?;
    let lambda0 = est.value;
    let lambda0_residual = whole.residual(&v, lambda0);
    let index_of = |x: f64| ((x - 1.0) / (surface.length - 1.0) * surface.grid as f64).floor() as usize;
    let lambda_tail = schedule
        .par_iter()
        .map(|&r| {
            let end = r * surface.length / r_max;
            let first = (index_of(r) + 1).min(surface.grid);
            let last = index_of(end).min(surface.grid).max(first);
            if last - first < 2 {
                return Err(Error::param(format!("grid too coarse for the window at R = {r}")));
            }
            let lambda = bottom_of_form(&surface.form(first, last, true))?.0.value;
            Ok(TailEstimate {
                radius: r,
                window_end: end,
                lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceReport {
        surface: *surface,
        volume_truncated,
        volume_tail_bound,
        volume: volume_truncated + volume_tail_bound,
        lambda0,
        lambda0_residual,
        lambda_tail,
    })
}
