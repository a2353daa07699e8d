//! Acceptance suite: every criterion runs against its runtime limit and
//! prints one PASS/FAIL line. Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lambda0_core::action::{MonodromyAction, Word};
use lambda0_core::amenability::{
    amenability_verdict, folner_boundary, folner_search, rw_radius_estimate, AmenabilityStatus, FolnerBudget,
    VerdictBudget,
};
use lambda0_core::covering::{CoverVertex, CoveringGraph};
use lambda0_core::graph::{Graph, GraphFunction};
use lambda0_core::hyperbolic::{
    critical_exponent_estimate, poincare_series, salpha_solver, space_constants, sullivan_lambda0, Family, Moebius,
    Point, RevolutionSurface,
};
use lambda0_core::isoperimetry::cheeger_inequality_check;
use lambda0_core::lazy::{LazyGraph, Perturbation};
use lambda0_core::renormalize::{doob_transform, ground_state};
use lambda0_core::sample;
use lambda0_core::scenario::{load_scenario, run_scenario, GalleryName, Outcome, Scenario};
use lambda0_core::spectral::{lambda0_finite, stability_check, WindowOptions};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> Scenario {
    load_scenario(&scenario_dir().join(name)).expect("scenario file parses")
}

/// Spectrum of `M^{-1/2} H M^{-1/2}` assembled from the edge list.
fn spectrum(g: &Graph) -> Vec<f64> {
    let n = g.len();
    let mut h = DMatrix::<f64>::zeros(n, n);
    for e in g.edges() {
        if e.u != e.v {
            h[(e.u, e.u)] += e.conductance;
            h[(e.v, e.v)] += e.conductance;
            h[(e.u, e.v)] -= e.conductance;
            h[(e.v, e.u)] -= e.conductance;
        }
    }
    for x in 0..n {
        h[(x, x)] += g.potential()[x] * g.measure()[x];
    }
    let s: Vec<f64> = g.measure().iter().map(|m| 1.0 / m.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| h[(i, j)] * s[i] * s[j]);
    let mut v: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn c1_monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let cover = sample::finite_cover(&mut rng, 8, 8).map_err(|e| e.to_string())?;
        let total = cover.materialize().map_err(|e| e.to_string())?.total;
        let l0 = lambda0_finite(cover.base(), None).map_err(|e| e.to_string())?.value;
        let l1 = lambda0_finite(&total, None).map_err(|e| e.to_string())?.value;
        worst = worst.min(l1 - l0);
    }
    ensure(worst >= -1e-9, || format!("λ₀(total) − λ₀(base) = {worst:e}"))?;
    Ok(format!("100 covers, min λ₀(total) − λ₀(base) = {worst:.3e}"))
}

fn c2_pushdown() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut norm_err, mut excess) = (0.0f64, f64::NEG_INFINITY);
    let mut trials = 0;
    for _ in 0..1000 {
        let cover = sample::finite_cover(&mut rng, 8, 8).map_err(|e| e.to_string())?;
        let fc = cover.materialize().map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let f = sample::function(&mut rng, fc.total.len());
            let gf: GraphFunction<CoverVertex> = fc.vertices.iter().cloned().zip(f.iter().copied()).collect();
            let f0 = cover.pushdown(&gf);
            norm_err = norm_err.max((cover.base().norm_sq(&f0).sqrt() - fc.total.norm_sq(&f).sqrt()).abs());
            let r0 = cover.base().rayleigh(&f0).map_err(|e| e.to_string())?;
            let r1 = fc.total.rayleigh(&f).map_err(|e| e.to_string())?;
            excess = excess.max(r0 - r1);
            trials += 1;
        }
    }
    ensure(norm_err <= 1e-12, || format!("norm defect {norm_err:e}"))?;
    ensure(excess <= 1e-9, || format!("R₀(f₀) − R(f) = {excess:e}"))?;
    Ok(format!("{trials} trials, norm defect {norm_err:.1e}, max R₀ − R = {excess:.1e}"))
}

fn c3_tame() -> Check {
    let potential = vec![-1.0, 0.0, 0.5];
    let base = Graph::cycle(3).and_then(|g| g.with_potential(potential.clone())).map_err(|e| e.to_string())?;
    let l0 = lambda0_finite(&base, None).map_err(|e| e.to_string())?.value;
    let mut worst: f64 = 0.0;
    for k in 1..=10usize {
        let action = MonodromyAction::cyclic(vec!["a".into()], k, vec![1]).map_err(|e| e.to_string())?;
        let cover = CoveringGraph::with_voltages(base.clone(), action, &[(0, "a")]).map_err(|e| e.to_string())?;
        let total = cover.materialize().map_err(|e| e.to_string())?.total;
        let lifted = lambda0_finite(&total, None).map_err(|e| e.to_string())?.value;
        // The same cycle built directly.
        let n = 3 * k;
        let edges = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        let direct = Graph::new(n, edges, vec![1.0; n], (0..n).map(|i| potential[i % 3]).collect())
            .map(|g| spectrum(&g)[0])
            .map_err(|e| e.to_string())?;
        worst = worst.max((lifted - l0).abs()).max((direct - l0).abs());
    }
    ensure(worst <= 1e-8, || format!("C_3k vs C_3: {worst:e}"))?;
    let r = run_scenario(&scenario("tame-z-well.json")).map_err(|e| e.to_string())?;
    let gap = r
        .claim("cutoff test functions: min R(χφ) − λ₀(base)")
        .ok_or("missing gap claim")?
        .lhs;
    ensure(r.outcome == Outcome::Pass, || format!("ℤ-cover outcome {:?}", r.outcome))?;
    ensure(gap <= 0.05, || format!("ℤ-cover gap {gap}"))?;
    Ok(format!("max |Δλ₀| over C_3k = {worst:.1e}; ℤ-cover gap {gap:.2e}"))
}

/// Largest eigenvalue of the adjacency operator on radial functions of the
/// `d`-regular tree ball of radius `r`, by power iteration.
fn radial_adjacency_radius(d: usize, r: usize) -> f64 {
    let (a, b) = ((d as f64).sqrt(), ((d - 1) as f64).sqrt());
    let shift = d as f64;
    let mut v = vec![1.0; r + 1];
    let mut rho = 0.0;
    for _ in 0..400_000 {
        let mut w = vec![0.0; r + 1];
        for k in 0..=r {
            w[k] += shift * v[k];
            if k < r {
                let c = if k == 0 { a } else { b };
                w[k] += c * v[k + 1];
                w[k + 1] += c * v[k];
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let next: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>() / v.iter().map(|x| x * x).sum::<f64>();
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        if (next - rho).abs() < 1e-15 {
            rho = next;
            break;
        }
        rho = next;
    }
    rho - shift
}

fn c4_strict_gap() -> Check {
    let r = run_scenario(&scenario("name-tree.json")).map_err(|e| e.to_string())?;
    let get = |k: &str| r.artifacts.get(k).and_then(|v| v.as_f64()).ok_or(format!("missing {k}"));
    let base = get("lambda0_base")?;
    let upper = get("lambda0_cover_upper")?;
    let flow = get("gap_flow_certificate")?;
    let closed = 4.0 - 2.0 * 3f64.sqrt();
    let oracle = 4.0 - radial_adjacency_radius(4, 400);
    ensure(base.abs() <= 1e-12, || format!("λ₀(base) = {base}"))?;
    ensure((oracle - closed).abs() <= 1e-3, || format!("power iteration {oracle} vs {closed}"))?;
    ensure((upper - oracle).abs() <= 0.02, || format!("exhaustion {upper} vs oracle {oracle}"))?;
    ensure(flow >= 0.1, || format!("Cheeger-route bound {flow}"))?;
    ensure(r.outcome == Outcome::Pass, || format!("outcome {:?}", r.outcome))?;
    Ok(format!("exhaustion {upper:.4}, oracle {oracle:.4}, Cheeger-route bound {flow:.3}"))
}

fn c5_renormalization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut spec_err, mut bottom_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let n = rand::Rng::gen_range(&mut rng, 2..=50);
        let g = sample::connected_graph(&mut rng, n, 0.1, true).map_err(|e| e.to_string())?;
        let gs = ground_state(&g, 1e-8).map_err(|e| e.to_string())?;
        let t = doob_transform(&g, &gs, 1e-8).map_err(|e| e.to_string())?;
        let (a, b) = (spectrum(&g), spectrum(&t));
        for (x, y) in a.iter().zip(&b) {
            spec_err = spec_err.max((x - a[0] - y).abs());
        }
        bottom_err = bottom_err.max(b[0].abs());
    }
    ensure(spec_err <= 1e-8, || format!("spectrum defect {spec_err:e}"))?;
    ensure(bottom_err <= 1e-8, || format!("transformed λ₀ {bottom_err:e}"))?;
    Ok(format!("200 graphs, spectrum defect {spec_err:.1e}, |λ₀(transformed)| ≤ {bottom_err:.1e}"))
}

fn c6_cheeger() -> Check {
    let mut graphs = 0;
    for n in 2..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize, f64)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &(u, v))| (u, v, 1.0))
                .collect();
            let g = Graph::unweighted(n, edges.clone()).map_err(|e| e.to_string())?;
            if !g.is_connected() {
                continue;
            }
            graphs += 1;
            let c = cheeger_inequality_check(&g, None, 1e-8).map_err(|e| e.to_string())?;
            // Independent enumeration of h and the spectral gap.
            let mut h = f64::INFINITY;
            for s in 1u32..(1 << n) - 1 {
                let size = s.count_ones() as usize;
                if 2 * size > n {
                    continue;
                }
                let cut = edges.iter().filter(|&&(u, v, _)| (s >> u & 1) != (s >> v & 1)).count();
                h = h.min(cut as f64 / size as f64);
            }
            let degree = (0..n).map(|x| edges.iter().filter(|e| e.0 == x || e.1 == x).count()).max().unwrap_or(0);
            let gap = spectrum(&g)[1];
            let bound = h * h / (2.0 * degree as f64);
            ensure((c.h - h).abs() <= 1e-12, || format!("h mismatch on {edges:?}: {} vs {h}", c.h))?;
            ensure(c.pass && gap + 1e-12 >= bound, || format!("λ₁ = {gap} < {bound} on {edges:?}"))?;
        }
    }
    Ok(format!("{graphs} connected graphs on 2..6 vertices"))
}

fn c7_folner() -> Check {
    let z = MonodromyAction::integer(vec!["a".into()], vec![1]).map_err(|e| e.to_string())?;
    let a = vec![Word::letter(0, false)];
    for n in 2..=60i64 {
        let e: Vec<_> = (0..n).map(lambda0_core::action::FiberPoint::Int).collect();
        let b = folner_boundary(&z, &e, &a).map_err(|e| e.to_string())?;
        let ratio = b.len() as f64 / n as f64;
        ensure(ratio == 2.0 / n as f64, || format!("n = {n}: ratio {ratio}"))?;
    }
    let finite = [
        MonodromyAction::cyclic(vec!["a".into()], 7, vec![3]),
        MonodromyAction::permutation(vec!["a".into(), "b".into()], vec![vec![1, 2, 0, 3], vec![3, 1, 2, 0]]),
        MonodromyAction::trivial(vec!["a".into()], 5),
    ];
    for action in finite {
        let action = action.map_err(|e| e.to_string())?;
        let v = amenability_verdict(&action, &action.symmetric_letters(), 0.01, VerdictBudget::default())
            .map_err(|e| e.to_string())?;
        let ratio = v.certificate.as_ref().map(|c| c.ratio);
        ensure(v.status == AmenabilityStatus::CertifiedAmenable && ratio == Some(0.0), || {
            format!("finite action: {:?} ratio {ratio:?}", v.status)
        })?;
    }
    let f2 = MonodromyAction::free(vec!["a".into(), "b".into()]).map_err(|e| e.to_string())?;
    let letters = f2.symmetric_letters();
    let search = folner_search(&f2, &letters, 0.2, FolnerBudget::default()).map_err(|e| e.to_string())?;
    ensure(search.certificate.is_none(), || "F₂ search found a certificate".into())?;
    let balls = search.log.iter().find(|l| l.strategy == "balls").ok_or("no ball log")?;
    let want = 4.0 * 3f64.powi(7) / (2.0 * 3f64.powi(8) - 1.0);
    ensure((balls.best_ratio - want).abs() <= 0.05, || format!("ball ratio {} vs {want}", balls.best_ratio))?;
    let rho = rw_radius_estimate(&f2, &letters, 40, 2_000_000).map_err(|e| e.to_string())?;
    let last = rho.last().ok_or("empty walk")?;
    let kesten = 3f64.sqrt() / 2.0;
    ensure(last.0 == 40 && (last.1 - kesten).abs() <= 0.1, || format!("ρ at 2n = 40: {}", last.1))?;
    Ok(format!(
        "ℤ ratios 2/n exact; finite actions ratio 0; F₂ ball ratio {:.4} (want {want:.4}), ρ₄₀ = {:.4}",
        balls.best_ratio, last.1
    ))
}

fn c8_constants() -> Check {
    for m in 2..=10 {
        let h = space_constants(Family::R, m).map_err(|e| e.to_string())?;
        ensure(h.entropy == m - 1 && h.dimension == m, || format!("R{m}: {h:?}"))?;
    }
    for n in 2..=6 {
        let c = space_constants(Family::C, n).map_err(|e| e.to_string())?;
        ensure(c.entropy == c.dimension, || format!("C{n}: {c:?}"))?;
        let q = space_constants(Family::H, n).map_err(|e| e.to_string())?;
        ensure(q.entropy == q.dimension + 2, || format!("H{n}: {q:?}"))?;
    }
    let o = space_constants(Family::O, 2).map_err(|e| e.to_string())?;
    ensure(o.entropy == 22 && o.lambda0 == 121.0, || format!("O2: {o:?}"))?;
    let s1 = sullivan_lambda0(1.0, 3).map_err(|e| e.to_string())?;
    let s2 = sullivan_lambda0(0.3, 2).map_err(|e| e.to_string())?;
    ensure(s1 == 1.0 && s2 == 0.25, || format!("Sullivan {s1}, {s2}"))?;
    Ok("table, Sullivan values and λ₀(H_O²) = 121 exact".into())
}

fn c9_poincare() -> Check {
    let g = Moebius::real([[2.0, 0.0], [0.0, 0.5]]).map_err(|e| e.to_string())?;
    let x = Point::halfplane(Complex64::new(0.0, 1.0)).map_err(|e| e.to_string())?;
    let s = poincare_series(&[g], 1.0, &x, &x, 40).map_err(|e| e.to_string())?;
    let at40 = s.partial_sums.iter().find(|p| p.0 == 40).ok_or("no partial sum at 40")?.1;
    ensure((at40 - 5.0 / 3.0).abs() <= 1e-6, || format!("partial sum {at40}"))?;
    let d = critical_exponent_estimate(&[g], &x, (0.0, 1.0), 0.01, 40).map_err(|e| e.to_string())?;
    ensure(d.delta_hi <= 0.05, || format!("δ_hi = {}", d.delta_hi))?;
    Ok(format!("partial sum at 40 = {at40:.9}, δ ∈ [{}, {:.3}]", d.delta_lo, d.delta_hi))
}

/// `∫_1^∞ e^{−√x} dx = ∫_1^∞ 2u e^{−u} du` by composite Gauss–Legendre.
fn salpha_volume_oracle() -> f64 {
    let nodes = [
        (-0.906_179_845_938_664, 0.236_926_885_056_189),
        (-0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.0, 0.568_888_888_888_889),
        (0.538_469_310_105_683, 0.478_628_670_499_366),
        (0.906_179_845_938_664, 0.236_926_885_056_189),
    ];
    let (lo, hi, pieces) = (1.0, 80.0, 4000);
    let w = (hi - lo) / pieces as f64;
    let mut sum = 0.0;
    for k in 0..pieces {
        let mid = lo + (k as f64 + 0.5) * w;
        for (t, c) in nodes {
            let u = mid + 0.5 * w * t;
            sum += 0.5 * w * c * 2.0 * u * (-u).exp();
        }
    }
    std::f64::consts::TAU * sum
}

fn c10_gallery() -> Check {
    let chain = run_scenario(&Scenario::gallery(GalleryName::Exa00Chain, 0)).map_err(|e| e.to_string())?;
    let lam0 = chain.claim("λ₀ ≤ 1e-9").ok_or("no λ₀ claim")?.lhs;
    let ess = chain.claim("λ_ess ≤ 0.01").ok_or("no λ_ess claim")?.lhs;
    ensure(lam0 <= 1e-9 && ess <= 0.01, || format!("chain: λ₀ {lam0:e}, λ_ess {ess:e}"))?;
    let guard = run_scenario(&scenario("name-chain-guard.json")).map_err(|e| e.to_string())?;
    ensure(guard.outcome == Outcome::HypothesisViolated, || format!("guard outcome {:?}", guard.outcome))?;
    let surface = RevolutionSurface {
        alpha: 0.5,
        length: 200.0,
        grid: 20_000,
    };
    let r = salpha_solver(&surface, &[10.0, 25.0, 50.0, 100.0]).map_err(|e| e.to_string())?;
    let oracle = salpha_volume_oracle();
    let closed = std::f64::consts::TAU * 4.0 / std::f64::consts::E;
    ensure((oracle - closed).abs() <= 1e-10 * closed, || format!("quadrature {oracle} vs {closed}"))?;
    let rel = (r.volume - oracle).abs() / oracle;
    ensure(rel <= 1e-6, || format!("volume {} vs {oracle}", r.volume))?;
    let tail = r.lambda_tail.iter().find(|t| t.radius == 100.0).ok_or("no tail at 100")?.lambda;
    ensure(tail <= 0.01, || format!("λ_tail(100) = {tail}"))?;
    Ok(format!(
        "chain λ₀ {lam0:.1e}, λ_ess {ess:.1e}, guard refused; S_α volume rel. error {rel:.1e}, λ_tail(100) {tail:.2e}"
    ))
}

fn c11_stability() -> Check {
    let line = LazyGraph::line();
    let mut edit = Perturbation::default();
    edit.potential.insert(vec![0], -2.0);
    edit.potential.insert(vec![4], 3.0);
    edit.potential.insert(vec![-9], 0.7);
    let r = stability_check(&line, &edit, &vec![0], None, &[10, 20, 40], 0.005, WindowOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(r.difference.abs() <= 0.01, || format!("Δλ_ess = {}", r.difference))?;
    let s = run_scenario(&scenario("stability-line.json")).map_err(|e| e.to_string())?;
    ensure(s.outcome == Outcome::Pass, || format!("stability scenario {:?}", s.outcome))?;
    Ok(format!("λ_ess before {:.3e}, after {:.3e}", r.before.value, r.after.value))
}

fn c12_determinism() -> Check {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for f in &files {
        let s = load_scenario(f).map_err(|e| e.to_string())?;
        let a = run_scenario(&s).map_err(|e| format!("{}: {e}", f.display()))?.to_json();
        let b = run_scenario(&s).map_err(|e| format!("{}: {e}", f.display()))?.to_json();
        ensure(a == b, || format!("{} differs between runs", f.display()))?;
    }
    Ok(format!("{} scenario files byte-identical across two runs", files.len()))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Check); 12] = [
        ("1 monotonicity fuzz", 10, c1_monotonicity),
        ("2 pushdown inequality", 30, c2_pushdown),
        ("3 amenable equality", 60, c3_tame),
        ("4 strict gap on the tree", 60, c4_strict_gap),
        ("5 renormalization", 60, c5_renormalization),
        ("6 discrete Cheeger suite", 120, c6_cheeger),
        ("7 Følner and amenability", 120, c7_folner),
        ("8 model-space constants", 1, c8_constants),
        ("9 Poincaré series", 30, c9_poincare),
        ("10 counterexample gallery", 60, c10_gallery),
        ("11 stability", 30, c11_stability),
        ("12 determinism", 600, c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(limit);
        match (&result, within) {
            (Ok(detail), true) => println!("PASS criterion {name} ({:.2}s / {limit}s): {detail}", elapsed.as_secs_f64()),
            (Ok(detail), false) => {
                failed += 1;
                println!(
                    "FAIL criterion {name} ({:.2}s exceeds {limit}s): {detail}",
                    elapsed.as_secs_f64()
                );
            }
            (Err(why), _) => {
                failed += 1;
                println!("FAIL criterion {name} ({:.2}s / {limit}s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
