//! Scenario files, the harnesses that turn them into claims, and report
//! emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::amenability::{
    amenability_verdict, cover_amenability, symmetrize, AmenabilityStatus, ComponentVerdict, FolnerBudget,
    VerdictBudget,
};
use crate::catalog::{self, parse_words, ActionDesc, CoverDesc, EditDesc, GraphDesc, LazyDesc};
use crate::config::Tolerances;
use crate::covering::{brooks_cutoff, CoverVertex, CoveringGraph};
use crate::error::{Error, Result};
use crate::graph::{ball, rayleigh_quotient, Graph, GraphFunction, LocallyFinite};
use crate::hyperbolic::{
    critical_exponent_estimate, gefin_predict, salpha_solver, space_constants, sullivan_lambda0, Family, Moebius,
    OrbitLayers, Point as HPoint, Relation, RevolutionSurface,
};
use crate::isoperimetry::{cheeger_constant, cheeger_inequality_check, tree_flow_certificate, CutMode, EXACT_LIMIT};
use crate::lazy::{LazyGraph, Point};
use crate::renormalize::{
    cone_supersolution_bound, ground_state, modified_cheeger_check, phi_ball_ratios, verify_intertwining,
};
use crate::report::{real, write_atomic, Real};
use crate::sample;
use crate::spectral::{
    ball_indicator_bound, lambda0_exhaustion, lambda0_finite, lambda_ess_estimate, stability_check, WindowOptions,
    MAX_WINDOW,
};

pub const VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Monotonicity,
    Tame,
    Name,
    Stability,
    Gallery,
    Hyperbolic,
    Probe,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Monotonicity => "monotonicity",
            Kind::Tame => "tame",
            Kind::Name => "name",
            Kind::Stability => "stability",
            Kind::Gallery => "gallery",
            Kind::Hyperbolic => "hyperbolic",
            Kind::Probe => "probe",
        }
    }
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
            Outcome::HypothesisViolated => "hypothesis_violated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: String,
    name: String,
    kind: Kind,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    inputs: Value,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub inputs: Inputs,
}

#[derive(Debug, Clone)]
pub enum Inputs {
    Monotonicity(MonotonicityInputs),
    Tame(TameInputs),
    Name(NameInputs),
    Stability(StabilityInputs),
    Gallery(GalleryInputs),
    Hyperbolic(HyperbolicInputs),
    Probe(ProbeInputs),
}

fn max_window() -> usize {
    MAX_WINDOW
}

/// Overrides of the amenability budgets; missing fields keep the defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetDesc {
    pub max_radius: Option<usize>,
    pub max_vertices: Option<usize>,
    pub erosion_steps: Option<usize>,
    pub exact_limit: Option<usize>,
    pub walk_steps: Option<usize>,
    pub walk_vertices: Option<usize>,
}

impl BudgetDesc {
    fn build(&self, tol: &Tolerances) -> VerdictBudget {
        let d = VerdictBudget::default();
        let f = FolnerBudget::default();
        VerdictBudget {
            folner: FolnerBudget {
                max_radius: self.max_radius.unwrap_or(f.max_radius),
                max_vertices: self.max_vertices.unwrap_or(f.max_vertices),
                erosion_steps: self.erosion_steps.unwrap_or(f.erosion_steps),
                exact_limit: self.exact_limit.unwrap_or(f.exact_limit),
            },
            walk_steps: self.walk_steps.unwrap_or(d.walk_steps),
            walk_vertices: self.walk_vertices.unwrap_or(d.walk_vertices),
            plateau: tol.plateau,
        }
    }
}

fn ten() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCovers {
    pub instances: usize,
    #[serde(default = "eight")]
    pub max_base: usize,
    #[serde(default = "eight")]
    pub max_fiber: usize,
}

fn eight() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfiniteCase {
    pub cover: CoverDesc,
    #[serde(default)]
    pub root: usize,
    pub schedule: Vec<usize>,
    #[serde(default = "max_window")]
    pub max_vertices: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonotonicityInputs {
    #[serde(default)]
    pub covers: Vec<CoverDesc>,
    pub random: Option<RandomCovers>,
    #[serde(default = "ten")]
    pub pushdown_trials: usize,
    #[serde(default)]
    pub infinite: Vec<InfiniteCase>,
}

fn tame_radii() -> Vec<usize> {
    vec![25, 50, 100, 200, 400]
}

fn eps_tame() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TameInputs {
    pub cover: CoverDesc,
    #[serde(default = "eps_tame")]
    pub epsilon: f64,
    #[serde(default)]
    pub budget: BudgetDesc,
    /// Radii of the covering balls fed to the cutoff construction.
    #[serde(default = "tame_radii")]
    pub radii: Vec<usize>,
    /// Cutoff width; defaults to the ball radius.
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub root: usize,
    #[serde(default = "max_window")]
    pub max_vertices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueWithin {
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NameExpect {
    pub certified_gap_at_least: Option<f64>,
    pub lambda0_cover: Option<ValueWithin>,
}

fn eps_name() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NameInputs {
    pub cover: Option<CoverDesc>,
    pub base_lazy: Option<LazyDesc>,
    pub lazy_root: Option<Point>,
    #[serde(default = "eps_name")]
    pub epsilon: f64,
    #[serde(default)]
    pub budget: BudgetDesc,
    #[serde(default)]
    pub schedule: Vec<usize>,
    #[serde(default)]
    pub ess_schedule: Vec<usize>,
    #[serde(default)]
    pub root: usize,
    #[serde(default = "max_window")]
    pub max_vertices: usize,
    #[serde(default)]
    pub expect: NameExpect,
}

fn four() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityInputs {
    pub graph: LazyDesc,
    pub root: Option<Point>,
    pub root_after: Option<Point>,
    #[serde(default)]
    pub edit: EditDesc,
    pub schedule: Vec<usize>,
    #[serde(default = "four")]
    pub window_factor: usize,
    #[serde(default = "max_window")]
    pub max_vertices: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GalleryName {
    #[serde(rename = "exa00-chain")]
    Exa00Chain,
    #[serde(rename = "exabcd-tree")]
    ExabcdTree,
    #[serde(rename = "salpha")]
    Salpha,
}

impl GalleryName {
    pub fn parse(text: &str) -> Result<Self> {
        catalog::from_value(Value::String(text.into()), "name")
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GalleryName::Exa00Chain => "exa00-chain",
            GalleryName::ExabcdTree => "exabcd-tree",
            GalleryName::Salpha => "salpha",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryParams {
    pub blob_size: Option<usize>,
    pub indicator_radii: Option<Vec<usize>>,
    pub ess_schedule: Option<Vec<usize>>,
    pub degree: Option<usize>,
    pub schedule: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub length: Option<f64>,
    pub grid: Option<usize>,
    pub tail_schedule: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryInputs {
    pub example: GalleryName,
    #[serde(default)]
    pub params: GalleryParams,
}

/// A 2×2 matrix with real entries, or complex entries as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MatrixDesc {
    Real([[f64; 2]; 2]),
    Complex([[[f64; 2]; 2]; 2]),
}

impl MatrixDesc {
    fn build(&self) -> Result<Moebius> {
        match self {
            MatrixDesc::Real(rows) => Moebius::real(*rows),
            MatrixDesc::Complex(r) => {
                let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
                Moebius::new(c(r[0][0]), c(r[0][1]), c(r[1][0]), c(r[1][1]))
            }
        }
    }
}

/// `[x, y]` is the half-plane point `x + iy`; `[re, im, t]` a half-space point.
fn build_point(p: &[f64], path: &str) -> Result<HPoint> {
    match p {
        [x, y] => HPoint::halfplane(Complex64::new(*x, *y)),
        [re, im, t] => HPoint::halfspace(Complex64::new(*re, *im), *t),
        _ => Err(Error::schema(path, "a point has two or three coordinates")),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableQuery {
    pub family: Family,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SullivanQuery {
    pub delta: f64,
    pub m: u32,
    pub expect: Option<f64>,
}

fn series_tolerance() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesQuery {
    pub generators: Vec<MatrixDesc>,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub s: Vec<f64>,
    pub max_word_len: usize,
    /// Expected totals, parallel to `s`.
    #[serde(default)]
    pub expect_totals: Vec<f64>,
    #[serde(default = "series_tolerance")]
    pub tolerance: f64,
}

fn delta_width() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentQuery {
    pub generators: Vec<MatrixDesc>,
    pub x: Vec<f64>,
    pub bracket: [f64; 2],
    #[serde(default = "delta_width")]
    pub width: f64,
    pub max_word_len: usize,
    pub delta_at_most: Option<f64>,
    pub delta_at_least: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GefinQuery {
    pub lambda0_m0: f64,
    pub family: Family,
    pub n: u32,
    pub status: AmenabilityStatus,
    pub expect: Option<Relation>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperbolicInputs {
    #[serde(default)]
    pub table: Vec<TableQuery>,
    #[serde(default)]
    pub sullivan: Vec<SullivanQuery>,
    pub series: Option<SeriesQuery>,
    pub exponent: Option<ExponentQuery>,
    #[serde(default)]
    pub gefin: Vec<GefinQuery>,
    pub surface: Option<RevolutionSurface>,
    #[serde(default)]
    pub tail_schedule: Vec<f64>,
}

fn eps_probe() -> f64 {
    0.1
}

fn twenty() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeInputs {
    pub graph: Option<GraphDesc>,
    pub lazy: Option<LazyDesc>,
    pub cover: Option<CoverDesc>,
    pub action: Option<ActionDesc>,
    #[serde(default)]
    pub generating_set: Vec<String>,
    #[serde(default)]
    pub root: usize,
    pub lazy_root: Option<Point>,
    #[serde(default)]
    pub schedule: Vec<usize>,
    #[serde(default)]
    pub ess_schedule: Vec<usize>,
    #[serde(default = "max_window")]
    pub max_vertices: usize,
    #[serde(default = "eps_probe")]
    pub epsilon: f64,
    #[serde(default)]
    pub budget: BudgetDesc,
    pub cut_mode: Option<CutMode>,
    #[serde(default = "twenty")]
    pub pushdown_trials: usize,
}

/// The parts of a probe scenario, one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Spectra,
    Cover,
    Cheeger,
    Folner,
}

impl Section {
    pub fn name(self) -> &'static str {
        match self {
            Section::Spectra => "spectra",
            Section::Cover => "cover",
            Section::Cheeger => "cheeger",
            Section::Folner => "folner",
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = catalog::from_str(text)?;
    if raw.version != VERSION {
        return Err(Error::schema(
            "version",
            format!("unsupported version `{}`, expected `{VERSION}`", raw.version),
        ));
    }
    if raw.name.is_empty() {
        return Err(Error::schema("name", "must not be empty"));
    }
    let v = raw.inputs;
    let p = "inputs";
    let inputs = match raw.kind {
        Kind::Monotonicity => Inputs::Monotonicity(catalog::from_value(v, p)?),
        Kind::Tame => Inputs::Tame(catalog::from_value(v, p)?),
        Kind::Name => Inputs::Name(catalog::from_value(v, p)?),
        Kind::Stability => Inputs::Stability(catalog::from_value(v, p)?),
        Kind::Gallery => Inputs::Gallery(catalog::from_value(v, p)?),
        Kind::Hyperbolic => Inputs::Hyperbolic(catalog::from_value(v, p)?),
        Kind::Probe => Inputs::Probe(catalog::from_value(v, p)?),
    };
    Ok(Scenario {
        name: raw.name,
        kind: raw.kind,
        seed: raw.seed,
        tolerances: raw.tolerances,
        inputs,
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

impl Scenario {
    /// The built-in scenario for a gallery example with default parameters.
    pub fn gallery(example: GalleryName, seed: u64) -> Self {
        Self {
            name: format!("gallery-{}", example.as_str()),
            kind: Kind::Gallery,
            seed,
            tolerances: Tolerances::default(),
            inputs: Inputs::Gallery(GalleryInputs {
                example,
                params: GalleryParams::default(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
    /// The scenario does not satisfy the hypotheses of the statement tested.
    HypothesisViolated,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive | Outcome::HypothesisViolated => 2,
        }
    }

    /// Exit code of a batch: any failure wins over inconclusive results.
    pub fn combined_exit_code(outcomes: &[Outcome]) -> i32 {
        if outcomes.contains(&Outcome::Fail) {
            1
        } else if outcomes.iter().all(|&o| o == Outcome::Pass) {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rel {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
}

impl Rel {
    fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Rel::Le => lhs <= rhs + tol,
            Rel::Ge => lhs + tol >= rhs,
            Rel::Eq => lhs == rhs || (lhs - rhs).abs() <= tol,
            Rel::Lt => lhs < rhs,
            Rel::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub statement: String,
    #[serde(with = "real")]
    pub lhs: f64,
    pub relation: Rel,
    #[serde(with = "real")]
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Pt(f64, f64);
        impl Serialize for Pt {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&Real(self.0))?;
                seq.serialize_element(&Real(self.1))?;
                seq.end()
            }
        }
        struct Points<'a>(&'a [(f64, f64)]);
        impl Serialize for Points<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for &(x, y) in self.0 {
                    seq.serialize_element(&Pt(x, y))?;
                }
                seq.end()
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Series", 2)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("points", &Points(&self.points))?;
        st.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub version: String,
    pub scenario: String,
    pub kind: Kind,
    pub seed: u64,
    pub outcome: Outcome,
    pub claims: Vec<Claim>,
    pub artifacts: BTreeMap<String, Value>,
    pub series: Vec<Series>,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
}

impl TheoremReport {
    pub fn claim(&self, prefix: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.statement.starts_with(prefix))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Series as `name,x,y` rows, then claims as `claim:<statement>,lhs,rhs`.
    pub fn to_csv(&self) -> String {
        let num = |v: f64| {
            if v.is_finite() {
                format!("{v:e}")
            } else if v.is_nan() {
                "nan".into()
            } else if v > 0.0 {
                "inf".into()
            } else {
                "-inf".into()
            }
        };
        let quote = |s: &str| {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let mut out = String::from("name,x,y\n");
        for s in &self.series {
            for &(x, y) in &s.points {
                out.push_str(&format!("{},{},{}\n", quote(&s.name), num(x), num(y)));
            }
        }
        for c in &self.claims {
            out.push_str(&format!("{},{},{}\n", quote(&format!("claim:{}", c.statement)), num(c.lhs), num(c.rhs)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Writes `<dir>/<scenario>.<ext>` atomically and returns the path.
pub fn emit(report: &TheoremReport, dir: &Path, format: Format) -> Result<PathBuf> {
    let stem: String = report
        .scenario
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    let (ext, body) = match format {
        Format::Json => ("json", report.to_json()),
        Format::Csv => ("csv", report.to_csv()),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    write_atomic(&path, body.as_bytes())?;
    Ok(path)
}

struct Builder {
    claims: Vec<Claim>,
    artifacts: BTreeMap<String, Value>,
    series: Vec<Series>,
    notes: Vec<String>,
    inconclusive: bool,
    violated: bool,
}

impl Builder {
    fn new() -> Self {
        Self {
            claims: Vec::new(),
            artifacts: BTreeMap::new(),
            series: Vec::new(),
            notes: Vec::new(),
            inconclusive: false,
            violated: false,
        }
    }

    fn claim(&mut self, statement: impl Into<String>, lhs: f64, relation: Rel, rhs: f64, tolerance: f64) -> bool {
        let pass = relation.holds(lhs, rhs, tolerance);
        self.claims.push(Claim {
            statement: statement.into(),
            lhs,
            relation,
            rhs,
            tolerance,
            pass,
        });
        pass
    }

    fn artifact<T: Serialize>(&mut self, key: impl Into<String>, value: &T) {
        let v = serde_json::to_value(value).expect("artifacts serialize");
        self.artifacts.insert(key.into(), v);
    }

    fn series<X: Into<f64> + Copy>(&mut self, name: impl Into<String>, points: &[(X, f64)]) {
        self.series.push(Series {
            name: name.into(),
            points: points.iter().map(|&(x, y)| (x.into(), y)).collect(),
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    fn finish(self, s: &Scenario) -> TheoremReport {
        let outcome = if self.claims.iter().any(|c| !c.pass) {
            Outcome::Fail
        } else if self.violated {
            Outcome::HypothesisViolated
        } else if self.inconclusive || self.claims.is_empty() {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        };
        TheoremReport {
            version: VERSION.into(),
            scenario: s.name.clone(),
            kind: s.kind,
            seed: s.seed,
            outcome,
            claims: self.claims,
            artifacts: self.artifacts,
            series: self.series,
            notes: self.notes,
            tolerances: s.tolerances.clone(),
        }
    }
}

fn usize_series(points: &[(usize, f64)]) -> Vec<(f64, f64)> {
    points.iter().map(|&(x, y)| (x as f64, y)).collect()
}

fn max_increase(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    v.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

fn max_decrease(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    v.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
}

pub fn run_scenario(s: &Scenario) -> Result<TheoremReport> {
    let mut b = Builder::new();
    match &s.inputs {
        Inputs::Monotonicity(i) => run_monotonicity(s, i, &mut b)?,
        Inputs::Tame(i) => run_tame(s, i, &mut b)?,
        Inputs::Name(i) => run_name(s, i, &mut b)?,
        Inputs::Stability(i) => run_stability(s, i, &mut b)?,
        Inputs::Gallery(i) => run_gallery(s, i, &mut b)?,
        Inputs::Hyperbolic(i) => run_hyperbolic(s, i, &mut b)?,
        Inputs::Probe(i) => {
            let sections: Vec<Section> = [
                (Section::Spectra, i.graph.is_some() || i.lazy.is_some() || i.cover.is_some()),
                (Section::Cover, i.cover.is_some()),
                (Section::Cheeger, i.graph.is_some()),
                (Section::Folner, i.action.is_some()),
            ]
            .into_iter()
            .filter(|p| p.1)
            .map(|p| p.0)
            .collect();
            for sec in sections {
                run_section(s, i, sec, &mut b)?;
            }
        }
    }
    Ok(b.finish(s))
}

/// Runs one section of a probe scenario.
pub fn run_probe(s: &Scenario, section: Section) -> Result<TheoremReport> {
    let Inputs::Probe(i) = &s.inputs else {
        return Err(Error::schema("kind", format!("`{}` needs a probe scenario", section.name())));
    };
    let mut b = Builder::new();
    run_section(s, i, section, &mut b)?;
    Ok(b.finish(s))
}

struct PushdownStats {
    worst_rayleigh: f64,
    worst_norm: f64,
    trials: usize,
}

/// Random functions on a finite covering against their pushdowns:
/// largest `R₀(f₀) − R(f)` (relative) and largest relative norm defect.
fn pushdown_trials(cover: &CoveringGraph, rng: &mut ChaCha8Rng, trials: usize) -> Result<PushdownStats> {
    let fc = cover.materialize()?;
    let base = cover.base();
    let mut stats = PushdownStats {
        worst_rayleigh: f64::NEG_INFINITY,
        worst_norm: 0.0,
        trials,
    };
    for _ in 0..trials {
        let f = sample::function(rng, fc.total.len());
        let gf: GraphFunction<CoverVertex> = fc.vertices.iter().cloned().zip(f.iter().copied()).collect();
        let f0 = cover.pushdown(&gf);
        let (n0, n1) = (base.norm_sq(&f0), fc.total.norm_sq(&f));
        stats.worst_norm = stats.worst_norm.max((n0 - n1).abs() / n1.max(1.0));
        let (r0, r1) = (base.rayleigh(&f0)?, fc.total.rayleigh(&f)?);
        stats.worst_rayleigh = stats.worst_rayleigh.max((r0 - r1) / r1.abs().max(1.0));
    }
    Ok(stats)
}

fn run_monotonicity(s: &Scenario, i: &MonotonicityInputs, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut covers = Vec::new();
    for (k, c) in i.covers.iter().enumerate() {
        let path = format!("inputs.covers[{k}]");
        let cover = c.build(&path)?;
        if cover.action().fiber_size().is_none() {
            return Err(Error::schema(path, "finite fiber required; list infinite covers under `infinite`"));
        }
        covers.push((format!("cover {k}"), cover));
    }
    if let Some(r) = &i.random {
        if r.max_base < 2 || r.max_fiber < 1 {
            return Err(Error::schema("inputs.random", "need max_base ≥ 2 and max_fiber ≥ 1"));
        }
        for k in 0..r.instances {
            covers.push((format!("random {k}"), sample::finite_cover(&mut rng, r.max_base, r.max_fiber)?));
        }
    }
    let mut margins = Vec::with_capacity(covers.len());
    let mut worst_margin = f64::INFINITY;
    let mut worst_rayleigh = f64::NEG_INFINITY;
    let mut worst_norm: f64 = 0.0;
    let mut trials = 0;
    let mut explicit = Vec::new();
    for (k, (label, cover)) in covers.iter().enumerate() {
        let fc = cover.materialize()?;
        let l0 = lambda0_finite(cover.base(), None)?.value;
        let l1 = lambda0_finite(&fc.total, None)?.value;
        margins.push((k as f64, l1 - l0));
        worst_margin = worst_margin.min(l1 - l0);
        if k < i.covers.len() {
            explicit.push(serde_json::json!({"cover": label, "lambda0_base": l0, "lambda0_total": l1, "sheets": fc.sheets()}));
        }
        if i.pushdown_trials > 0 {
            let st = pushdown_trials(cover, &mut rng, i.pushdown_trials)?;
            worst_rayleigh = worst_rayleigh.max(st.worst_rayleigh);
            worst_norm = worst_norm.max(st.worst_norm);
            trials += st.trials;
        }
    }
    if !covers.is_empty() {
        b.claim(
            format!("min over {} finite covers of λ₀(total) − λ₀(base) ≥ 0", covers.len()),
            worst_margin,
            Rel::Ge,
            0.0,
            tol.monotonicity,
        );
        b.series("lambda0_total_minus_base", &margins);
        b.artifact("finite_covers", &explicit);
    }
    if trials > 0 {
        b.claim(
            format!("max over {trials} trials of (R₀(f₀) − R(f)) / max(1, |R(f)|) ≤ 0"),
            worst_rayleigh,
            Rel::Le,
            0.0,
            tol.pushdown,
        );
        b.claim(
            format!("max over {trials} trials of |‖f₀‖² − ‖f‖²| / max(1, ‖f‖²) = 0"),
            worst_norm,
            Rel::Eq,
            0.0,
            tol.norm,
        );
    }
    for (k, case) in i.infinite.iter().enumerate() {
        let cover = case.cover.build(&format!("inputs.infinite[{k}].cover"))?;
        let l0 = lambda0_finite(cover.base(), None)?.value;
        let root = cover.base_point(case.root);
        let est = lambda0_exhaustion(&cover, &root, &case.schedule, case.max_vertices)?;
        let lowest = est.history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        b.claim(
            format!("infinite cover {k}: every Dirichlet value λ₀(B_r) ≥ λ₀(base)"),
            lowest,
            Rel::Ge,
            l0,
            tol.monotonicity,
        );
        b.series(format!("infinite_{k}_exhaustion"), &usize_series(&est.history));
        b.artifact(format!("infinite_{k}_lambda0_base"), &l0);
    }
    if covers.is_empty() && i.infinite.is_empty() {
        return Err(Error::schema("inputs", "no covers given"));
    }
    Ok(())
}

fn verdict_summary(b: &mut Builder, verdicts: &[ComponentVerdict]) -> (bool, bool, bool) {
    b.artifact("amenability", &verdicts);
    let certified = verdicts.iter().any(|v| v.verdict.status == AmenabilityStatus::CertifiedAmenable);
    let all_certified = verdicts.iter().all(|v| v.verdict.status == AmenabilityStatus::CertifiedAmenable);
    let any_open = verdicts.iter().any(|v| v.verdict.status == AmenabilityStatus::Inconclusive);
    (certified, all_certified, any_open)
}

fn run_tame(s: &Scenario, i: &TameInputs, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let cover = i.cover.build("inputs.cover")?;
    let verdicts = cover_amenability(&cover, i.epsilon, i.budget.build(tol))?;
    let (_, all_certified, _) = verdict_summary(b, &verdicts);
    if !all_certified {
        b.violated = true;
        b.note("scenario rejected: amenability of the covering is not certified on every component");
        return Ok(());
    }
    let base = cover.base();
    let l0 = lambda0_finite(base, None)?.value;
    b.artifact("lambda0_base", &l0);
    if cover.action().fiber_size().is_some() {
        let fc = cover.materialize()?;
        let l1 = lambda0_finite(&fc.total, None)?.value;
        b.artifact("lambda0_total", &l1);
        b.claim("finite amenable cover: λ₀(total) = λ₀(base)", l1, Rel::Eq, l0, tol.eigen);
        return Ok(());
    }
    if i.radii.is_empty() {
        return Err(Error::schema("inputs.radii", "at least one radius is required"));
    }
    let gs = ground_state(base, tol.residual)?;
    let root = cover.base_point(i.root);
    let mut quotients = Vec::with_capacity(i.radii.len());
    for &r in &i.radii {
        let set = ball(&cover, &root, r, i.max_vertices)?.vertices;
        let chi = brooks_cutoff(&cover, &set, i.cutoff.unwrap_or(r).max(1))?;
        let f: GraphFunction<CoverVertex> = chi.iter().map(|(v, c)| (v.clone(), c * gs.phi[v.0])).collect();
        quotients.push((r, rayleigh_quotient(&cover, &f)?));
    }
    let best = quotients.iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
    b.series("cutoff_rayleigh", &usize_series(&quotients));
    b.artifact("lambda0_cover_upper", &best);
    b.claim(
        "cutoff test functions: min R(χφ) − λ₀(base) ≤ tame gap",
        best - l0,
        Rel::Le,
        tol.tame_gap,
        0.0,
    );
    b.claim("cutoff test functions: min R(χφ) ≥ λ₀(base)", best, Rel::Ge, l0, tol.monotonicity);
    let phi = |v: &CoverVertex| gs.phi[v.0];
    let ratios = phi_ball_ratios(&cover, &phi, &root, &i.radii, i.max_vertices)?;
    b.series("h_phi_balls", &usize_series(&ratios));
    let (first, last) = (ratios[0].1, ratios[ratios.len() - 1].1);
    b.claim("φ-weighted ball ratio decreases from the first to the last radius", last, Rel::Le, first, 0.0);
    Ok(())
}

fn lazy_root(g: &LazyGraph, given: &Option<Point>, path: &str) -> Result<Point> {
    let root = given.clone().unwrap_or_else(|| g.root());
    if !g.contains(&root) {
        return Err(Error::schema(path, format!("{root:?} is not a vertex")));
    }
    Ok(root)
}

/// Guard for bases given as catalog graphs: a strict-gap verdict needs
/// `λ_ess > λ₀ + margin`, with `λ₀` bounded above by exhaustion.
fn lazy_name_guard(s: &Scenario, i: &NameInputs, desc: &LazyDesc, b: &mut Builder) -> Result<()> {
    let g = desc.build("inputs.base_lazy")?;
    let root = lazy_root(&g, &i.lazy_root, "inputs.lazy_root")?;
    if i.schedule.is_empty() || i.ess_schedule.is_empty() {
        return Err(Error::schema("inputs", "a catalog base needs `schedule` and `ess_schedule`"));
    }
    let l0 = lambda0_exhaustion(&g, &root, &i.schedule, i.max_vertices)?;
    let opts = WindowOptions {
        flag_threshold: s.tolerances.window,
        max_vertices: i.max_vertices,
        ..WindowOptions::default()
    };
    let ess = lambda_ess_estimate(&g, &root, &i.ess_schedule, opts)?;
    b.series("base_exhaustion", &usize_series(&l0.history));
    b.series("base_lambda_ess", &usize_series(&ess.history));
    let gap = ess.value - l0.value;
    b.artifact("lambda0_base_upper", &l0.value);
    b.artifact("lambda_ess_base_estimate", &Real(ess.value));
    b.artifact("hypothesis_gap", &gap);
    if gap <= s.tolerances.hypothesis {
        b.violated = true;
        b.note(format!(
            "hypothesis λ_ess>λ₀ violated: λ_ess estimate {:.3e} does not exceed λ₀ ≤ {:.3e} by {}",
            ess.value, l0.value, s.tolerances.hypothesis
        ));
    } else {
        b.inconclusive = true;
        b.note("coverings of catalog bases are not materialized; no verdict");
    }
    Ok(())
}

/// Lower certificates for `λ₀(cover) − λ₀(base)` on a tree covering: the
/// isoperimetric flow bound of the ground-state transform, and the cone
/// supersolution bound minus `λ₀(base)`.
pub struct GapCertificates {
    pub flow: f64,
    pub supersolution: f64,
}

pub fn tree_gap_certificates(cover: &CoveringGraph, phi: &[f64], lambda0_base: f64) -> Result<GapCertificates> {
    let cones = cover.cone_types()?;
    let base = cover.base();
    let c: Vec<f64> = cones.half_edges.iter().map(|h| h.conductance).collect();
    let ct: Vec<f64> = cones
        .half_edges
        .iter()
        .map(|h| h.conductance * phi[h.tail] * phi[h.head])
        .collect();
    let mt: Vec<f64> = (0..base.len()).map(|x| base.measure()[x] * phi[x] * phi[x]).collect();
    let flow = tree_flow_certificate(&cones, &ct, &mt)?.spectral_bound();
    let sup = cone_supersolution_bound(&cones, &c, base.measure(), base.potential())?;
    Ok(GapCertificates {
        flow,
        supersolution: sup.mu - lambda0_base,
    })
}

fn run_name(s: &Scenario, i: &NameInputs, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let desc = match (&i.cover, &i.base_lazy) {
        (Some(c), None) => c,
        (None, Some(l)) => return lazy_name_guard(s, i, l, b),
        _ => return Err(Error::schema("inputs", "give exactly one of `cover` and `base_lazy`")),
    };
    let cover = desc.build("inputs.cover")?;
    let base = cover.base();
    let gs = ground_state(base, tol.residual)?;
    let l0 = gs.lambda;
    b.artifact("lambda0_base", &l0);
    b.artifact("lambda_ess_base", &Real(f64::INFINITY));
    b.claim(
        "finite base: λ_ess(base) > λ₀(base) + margin",
        f64::INFINITY,
        Rel::Gt,
        l0 + tol.hypothesis,
        0.0,
    );
    let verdicts = cover_amenability(&cover, i.epsilon, i.budget.build(tol))?;
    let (certified, _, open) = verdict_summary(b, &verdicts);
    if certified {
        b.violated = true;
        b.note("scenario rejected: the covering is certified amenable on some component");
        return Ok(());
    }
    if open {
        b.inconclusive = true;
        b.note("amenability verdict inconclusive on some component; no gap claimed");
        return Ok(());
    }
    let upper = if i.schedule.is_empty() {
        None
    } else {
        let est = lambda0_exhaustion(&cover, &cover.base_point(i.root), &i.schedule, i.max_vertices)?;
        b.series("cover_exhaustion", &usize_series(&est.history));
        b.claim("cover exhaustion: λ₀(B_r) ≥ λ₀(base)", est.value, Rel::Ge, l0, tol.monotonicity);
        Some(est.value)
    };
    if let Some(u) = upper {
        b.artifact("lambda0_cover_upper", &u);
    }
    let certs = match tree_gap_certificates(&cover, &gs.phi, l0) {
        Ok(c) => c,
        Err(e) => {
            b.inconclusive = true;
            b.note(format!("no lower certificate for the gap: {e}"));
            return Ok(());
        }
    };
    let gap = certs.flow.max(certs.supersolution);
    b.artifact("gap_flow_certificate", &certs.flow);
    b.artifact("gap_supersolution_certificate", &certs.supersolution);
    b.artifact("lambda0_cover_lower", &(l0 + gap));
    b.claim("certified λ₀(cover) − λ₀(base) > 0", gap, Rel::Gt, 0.0, 0.0);
    if let Some(u) = upper {
        b.claim("certified lower bound ≤ exhaustion upper bound", l0 + gap, Rel::Le, u, tol.eigen);
    }
    if let Some(at_least) = i.expect.certified_gap_at_least {
        b.claim("certified gap ≥ expected", gap, Rel::Ge, at_least, 0.0);
    }
    if let Some(w) = i.expect.lambda0_cover {
        match upper {
            Some(u) => {
                b.claim("λ₀(cover) upper bound matches expected", u, Rel::Eq, w.value, w.tolerance);
                b.claim("λ₀(cover) lower bound matches expected", l0 + gap, Rel::Eq, w.value, w.tolerance);
            }
            None => return Err(Error::schema("inputs.schedule", "needed for `expect.lambda0_cover`")),
        }
    }
    Ok(())
}

fn run_stability(s: &Scenario, i: &StabilityInputs, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let g = i.graph.build("inputs.graph")?;
    let root = lazy_root(&g, &i.root, "inputs.root")?;
    let edit = i.edit.build()?;
    let opts = WindowOptions {
        factor: i.window_factor,
        flag_threshold: tol.window,
        max_vertices: i.max_vertices,
    };
    let r = stability_check(&g, &edit, &root, i.root_after.as_ref(), &i.schedule, tol.estimator, opts)?;
    b.series("lambda_ess_before", &usize_series(&r.before.history));
    b.series("lambda_ess_after", &usize_series(&r.after.history));
    for f in r.before.flags.iter().chain(&r.after.flags) {
        b.note(format!("estimator: {f}"));
    }
    b.claim(
        "finite edit: |λ_ess(after) − λ_ess(before)| ≤ 2 · estimator tolerance",
        r.difference.abs(),
        Rel::Le,
        r.tolerance,
        0.0,
    );
    b.artifact("stability", &r);
    Ok(())
}

fn run_gallery(s: &Scenario, i: &GalleryInputs, b: &mut Builder) -> Result<()> {
    let p = &i.params;
    match i.example {
        GalleryName::Exa00Chain => gallery_chain(s, p, b),
        GalleryName::ExabcdTree => gallery_tree(s, p, b),
        GalleryName::Salpha => {
            let surface = RevolutionSurface {
                alpha: p.alpha.unwrap_or(0.5),
                length: p.length.unwrap_or(200.0),
                grid: p.grid.unwrap_or(20_000),
            };
            let schedule = p.tail_schedule.clone().unwrap_or_else(|| vec![10.0, 25.0, 50.0, 100.0]);
            surface_claims(&surface, &schedule, b)
        }
    }
}

fn gallery_chain(s: &Scenario, p: &GalleryParams, b: &mut Builder) -> Result<()> {
    let size = p.blob_size.unwrap_or(4);
    let g = LazyGraph::blob_chain(size)?;
    let root = g.root();
    // Radius 2K − 1 from the root covers exactly the first K blobs.
    let radii = p.indicator_radii.clone().unwrap_or_else(|| vec![1_999, 15_999, 63_999]);
    let ind = ball_indicator_bound(&g, &root, &radii, MAX_WINDOW)?;
    b.series("ball_indicator_quotients", &usize_series(&ind.history));
    b.claim("λ₀ ≤ 1e-9 (ball indicators)", ind.value, Rel::Le, 1e-9, 0.0);
    let ess_schedule = p.ess_schedule.clone().unwrap_or_else(|| vec![25, 50, 100]);
    let opts = WindowOptions {
        flag_threshold: s.tolerances.window,
        ..WindowOptions::default()
    };
    let ess = lambda_ess_estimate(&g, &root, &ess_schedule, opts)?;
    b.series("lambda_ess_history", &usize_series(&ess.history));
    b.claim("λ_ess ≤ 0.01 (Dirichlet complements)", ess.value, Rel::Le, 0.01, 0.0);
    let guard = Scenario {
        name: format!("{}-guard", s.name),
        kind: Kind::Name,
        seed: s.seed,
        tolerances: s.tolerances.clone(),
        inputs: Inputs::Name(NameInputs {
            cover: None,
            base_lazy: Some(LazyDesc {
                lazy: catalog::LazyName::BlobChain,
                dim: None,
                degree: None,
                blob_size: Some(size),
                conductance: 1.0,
                measure: 1.0,
                potential: 0.0,
            }),
            lazy_root: None,
            epsilon: eps_name(),
            budget: BudgetDesc::default(),
            schedule: ess_schedule.clone(),
            ess_schedule: ess_schedule.clone(),
            root: 0,
            max_vertices: MAX_WINDOW,
            expect: NameExpect::default(),
        }),
    };
    let r = run_scenario(&guard)?;
    let gap = r.artifacts.get("hypothesis_gap").and_then(Value::as_f64).unwrap_or(f64::NAN);
    b.claim(
        "strict-gap harness: λ_ess − λ₀ within the hypothesis margin, verdict refused",
        gap,
        Rel::Le,
        s.tolerances.hypothesis,
        0.0,
    );
    if r.outcome != Outcome::HypothesisViolated {
        b.claim("strict-gap harness outcome is hypothesis_violated", 0.0, Rel::Eq, 1.0, 0.0);
    }
    b.notes.extend(r.notes);
    Ok(())
}

fn gallery_tree(s: &Scenario, p: &GalleryParams, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let degree = p.degree.unwrap_or(4);
    if degree < 4 || !degree.is_multiple_of(2) {
        return Err(Error::schema("inputs.params.degree", "an even degree ≥ 4 is required"));
    }
    let loops = degree / 2;
    let names: Vec<String> = (0..loops).map(|k| format!("g{k}")).collect();
    let action = crate::action::MonodromyAction::free(names)?;
    let voltage = (0..loops).map(|k| crate::action::Word::letter(k, false)).collect();
    let cover = CoveringGraph::new(Graph::bouquet(loops)?, action, voltage)?;
    let l0 = lambda0_finite(cover.base(), None)?.value;
    b.claim("λ₀(base) = 0", l0, Rel::Eq, 0.0, tol.eigen);
    let certs = tree_gap_certificates(&cover, &[1.0], l0)?;
    b.artifact("gap_flow_certificate", &certs.flow);
    b.artifact("gap_supersolution_certificate", &certs.supersolution);
    b.claim("λ₀(tree) ≥ h²/(2D) > 0 (flow certificate)", certs.flow, Rel::Gt, 0.0, 0.0);
    let lower = l0 + certs.flow.max(certs.supersolution);
    let schedule = p.schedule.clone().unwrap_or_else(|| vec![10, 20, 40]);
    let tree = LazyGraph::tree(degree)?;
    let exh = lambda0_exhaustion(&tree, &tree.root(), &schedule, MAX_WINDOW)?;
    b.series("tree_exhaustion", &usize_series(&exh.history));
    b.claim("certified lower bound ≤ exhaustion upper bound", lower, Rel::Le, exh.value, tol.eigen);
    b.claim("λ₀(tree) bracket width ≤ 0.02", exh.value - lower, Rel::Le, 0.02, 0.0);
    let r_max = schedule.last().copied().unwrap_or(40);
    let ess_schedule = vec![(r_max / 8).max(1), (r_max / 4).max(2)];
    let ess = lambda_ess_estimate(&tree, &tree.root(), &ess_schedule, WindowOptions::default())?;
    b.series("tree_lambda_ess", &usize_series(&ess.history));
    b.claim("λ_ess(tree) ≥ certified λ₀ lower bound", ess.value, Rel::Ge, lower, tol.eigen);
    b.claim("λ_ess(tree) − λ₀ lower bound ≤ 0.02", ess.value - lower, Rel::Le, 0.02, 0.0);
    Ok(())
}

fn surface_claims(surface: &RevolutionSurface, schedule: &[f64], b: &mut Builder) -> Result<()> {
    let r = salpha_solver(surface, schedule)?;
    b.claim("volume finite", r.volume, Rel::Lt, f64::INFINITY, 0.0);
    b.claim("λ₀ = 0 (truncated Neumann problem)", r.lambda0, Rel::Le, 1e-9, 0.0);
    let tail: Vec<(f64, f64)> = r.lambda_tail.iter().map(|t| (t.radius, t.lambda)).collect();
    b.series("lambda_tail", &tail);
    b.claim(
        "tail estimates non-increasing in the radius",
        max_increase(tail.iter().map(|t| t.1)),
        Rel::Le,
        0.0,
        0.0,
    );
    let last = tail.last().map(|t| t.1).unwrap_or(f64::NAN);
    b.claim("λ_ess estimate at the largest radius ≤ 0.01", last, Rel::Le, 0.01, 0.0);
    b.artifact("surface", &r);
    Ok(())
}

fn run_hyperbolic(s: &Scenario, i: &HyperbolicInputs, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let mut table = Vec::new();
    for q in &i.table {
        let h = space_constants(q.family, q.n)?;
        let e = f64::from(h.entropy);
        b.claim(
            format!("{:?}H^{}: λ₀ = h²/4", q.family, q.n),
            h.lambda0,
            Rel::Eq,
            e * e / 4.0,
            0.0,
        );
        table.push(h);
    }
    if !table.is_empty() {
        b.artifact("table", &table);
    }
    for q in &i.sullivan {
        let v = sullivan_lambda0(q.delta, q.m)?;
        let k = f64::from(q.m - 1);
        b.claim(
            format!("Sullivan δ={} m={}: λ₀ ≤ (m−1)²/4", q.delta, q.m),
            v,
            Rel::Le,
            k * k / 4.0,
            tol.model_space,
        );
        if let Some(x) = q.expect {
            b.claim(format!("Sullivan δ={} m={}: value", q.delta, q.m), v, Rel::Eq, x, tol.model_space);
        }
    }
    if let Some(q) = &i.series {
        let gens = q.generators.iter().map(MatrixDesc::build).collect::<Result<Vec<_>>>()?;
        let x = build_point(&q.x, "inputs.series.x")?;
        let y = match &q.y {
            Some(y) => build_point(y, "inputs.series.y")?,
            None => x,
        };
        if !q.expect_totals.is_empty() && q.expect_totals.len() != q.s.len() {
            return Err(Error::schema("inputs.series.expect_totals", "must be parallel to `s`"));
        }
        let layers = OrbitLayers::new(&gens, &x, &y, q.max_word_len)?;
        for (k, &sv) in q.s.iter().enumerate() {
            let ps = layers.series(sv)?;
            b.series(format!("poincare_partial_sums_s{sv}"), &usize_series(&ps.partial_sums));
            for w in &ps.warnings {
                b.note(format!("s={sv}: {w}"));
            }
            if let Some(&want) = q.expect_totals.get(k) {
                b.claim(format!("Poincaré series total at s={sv}"), ps.total, Rel::Eq, want, q.tolerance);
            }
        }
    }
    if let Some(q) = &i.exponent {
        let gens = q.generators.iter().map(MatrixDesc::build).collect::<Result<Vec<_>>>()?;
        let x = build_point(&q.x, "inputs.exponent.x")?;
        let d = critical_exponent_estimate(&gens, &x, (q.bracket[0], q.bracket[1]), q.width, q.max_word_len)?;
        if d.heuristic {
            b.note("critical exponent bracket is heuristic");
        }
        for w in &d.warnings {
            b.note(w.clone());
        }
        b.claim("δ bracket ordered", d.delta_lo, Rel::Le, d.delta_hi, 0.0);
        if let Some(m) = q.delta_at_most {
            b.claim("δ upper estimate ≤ expected", d.delta_hi, Rel::Le, m, 0.0);
        }
        if let Some(m) = q.delta_at_least {
            b.claim("δ lower estimate ≥ expected", d.delta_lo, Rel::Ge, m, 0.0);
        }
        b.artifact("delta", &d);
    }
    for (k, q) in i.gefin.iter().enumerate() {
        let space = space_constants(q.family, q.n)?;
        let rel = gefin_predict(q.lambda0_m0, &space, q.status)?;
        b.artifact(format!("gefin_{k}"), &serde_json::json!({"lambda0_m0": q.lambda0_m0, "lambda0_space": space.lambda0, "relation": rel}));
        if let Some(want) = q.expect {
            let agree = if rel == want { 1.0 } else { 0.0 };
            b.claim(
                format!("gefin {k}: predicted {rel:?} for λ₀(M₀)={} against λ₀(H)={}, expected {want:?}", q.lambda0_m0, space.lambda0),
                agree,
                Rel::Eq,
                1.0,
                0.0,
            );
        }
    }
    if let Some(surface) = &i.surface {
        let schedule = if i.tail_schedule.is_empty() {
            vec![10.0, 25.0, 50.0, 100.0]
        } else {
            i.tail_schedule.clone()
        };
        surface_claims(surface, &schedule, b)?;
    }
    Ok(())
}

fn probe_root(i: &ProbeInputs, g: &LazyGraph) -> Result<Point> {
    lazy_root(g, &i.lazy_root, "inputs.lazy_root")
}

fn run_section(s: &Scenario, i: &ProbeInputs, section: Section, b: &mut Builder) -> Result<()> {
    let tol = &s.tolerances;
    let missing = |field: &str| Error::schema(format!("inputs.{field}"), format!("required by `{}`", section.name()));
    match section {
        Section::Spectra => {
            let mut any = false;
            if let Some(d) = &i.graph {
                any = true;
                let g = d.build("inputs.graph")?;
                let est = lambda0_finite(&g, None)?;
                let form = g.form();
                b.claim("graph: λ₀ ≥ min (diagonal / measure)", est.value, Rel::Ge, form.lower_bound(), tol.eigen);
                let ones = vec![1.0; g.len()];
                b.claim("graph: λ₀ ≤ R(1)", est.value, Rel::Le, g.rayleigh(&ones)?, tol.eigen);
                b.artifact("graph_lambda0", &est);
                b.artifact("graph_lambda_ess", &Real(f64::INFINITY));
            }
            if let Some(d) = &i.lazy {
                any = true;
                let g = d.build("inputs.lazy")?;
                let root = probe_root(i, &g)?;
                if !i.schedule.is_empty() {
                    let est = lambda0_exhaustion(&g, &root, &i.schedule, i.max_vertices)?;
                    b.series("lazy_exhaustion", &usize_series(&est.history));
                    b.claim(
                        "lazy: exhaustion history non-increasing",
                        max_increase(est.history.iter().map(|h| h.1)),
                        Rel::Le,
                        0.0,
                        tol.monotonicity,
                    );
                    b.artifact("lazy_lambda0", &est);
                }
                if !i.ess_schedule.is_empty() {
                    let opts = WindowOptions {
                        flag_threshold: tol.window,
                        max_vertices: i.max_vertices,
                        ..WindowOptions::default()
                    };
                    let ess = lambda_ess_estimate(&g, &root, &i.ess_schedule, opts)?;
                    b.series("lazy_lambda_ess", &usize_series(&ess.history));
                    b.claim(
                        "lazy: λ_ess history non-decreasing",
                        max_decrease(ess.history.iter().map(|h| h.1)),
                        Rel::Le,
                        0.0,
                        tol.monotonicity,
                    );
                    for f in &ess.flags {
                        b.note(format!("λ_ess: {f}"));
                    }
                    b.artifact("lazy_lambda_ess", &ess);
                }
                if i.schedule.is_empty() && i.ess_schedule.is_empty() {
                    return Err(missing("schedule"));
                }
            }
            if let Some(d) = &i.cover {
                any = true;
                let cover = d.build("inputs.cover")?;
                let l0 = lambda0_finite(cover.base(), None)?.value;
                b.artifact("cover_lambda0_base", &l0);
                if cover.action().fiber_size().is_some() {
                    let l1 = lambda0_finite(&cover.materialize()?.total, None)?.value;
                    b.artifact("cover_lambda0_total", &l1);
                    b.claim("cover: λ₀(total) ≥ λ₀(base)", l1, Rel::Ge, l0, tol.monotonicity);
                } else if !i.schedule.is_empty() {
                    let est = lambda0_exhaustion(&cover, &cover.base_point(i.root), &i.schedule, i.max_vertices)?;
                    b.series("cover_exhaustion", &usize_series(&est.history));
                    b.claim("cover: λ₀(B_r) ≥ λ₀(base)", est.value, Rel::Ge, l0, tol.monotonicity);
                } else {
                    return Err(missing("schedule"));
                }
            }
            if !any {
                return Err(missing("graph"));
            }
        }
        Section::Cover => {
            let cover = i.cover.as_ref().ok_or_else(|| missing("cover"))?.build("inputs.cover")?;
            let cycles: Vec<Value> = cover
                .fundamental_cycles()
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "vertices": c.vertices,
                        "root": c.root,
                        "words": c.words.iter().map(|w| w.display(cover.action().generators())).collect::<Vec<_>>(),
                    })
                })
                .collect();
            b.artifact("fundamental_cycles", &cycles);
            b.artifact("tree_covering", &cover.cone_types().is_ok());
            if cover.action().fiber_size().is_some() {
                let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
                let st = pushdown_trials(&cover, &mut rng, i.pushdown_trials)?;
                if st.trials > 0 {
                    b.claim("pushdown: (R₀(f₀) − R(f)) / max(1, |R(f)|) ≤ 0", st.worst_rayleigh, Rel::Le, 0.0, tol.pushdown);
                    b.claim("pushdown: relative norm defect = 0", st.worst_norm, Rel::Eq, 0.0, tol.norm);
                }
            } else {
                b.note("infinite fiber: pushdown trials need a finite fiber");
                b.inconclusive = true;
            }
        }
        Section::Cheeger => {
            let g = i.graph.as_ref().ok_or_else(|| missing("graph"))?.build("inputs.graph")?;
            let mode = i
                .cut_mode
                .unwrap_or(if g.len() <= EXACT_LIMIT { CutMode::Exact } else { CutMode::Sweep });
            let cut = cheeger_constant(&g, None, mode)?;
            b.artifact("cheeger_constant", &cut);
            let constant_potential = g.potential().windows(2).all(|w| w[0] == w[1]);
            if constant_potential {
                let c = cheeger_inequality_check(&g, None, tol.residual)?;
                b.claim("λ₁ − λ₀ ≥ h²/(2D)", c.lhs, Rel::Ge, c.rhs, 0.0);
                b.artifact("cheeger_check", &c);
            }
            let gs = ground_state(&g, tol.residual)?;
            let c = modified_cheeger_check(&g, &gs)?;
            b.claim("λ₁ − λ₀ ≥ h_φ²/(2D_φ)", c.lhs, Rel::Ge, c.rhs, 0.0);
            b.artifact("modified_cheeger_check", &c);
            let r = verify_intertwining(&g, &gs, s.seed, 20)?;
            b.claim(
                "ground-state transform preserves the spectrum up to the shift",
                r.spectrum_difference,
                Rel::Le,
                r.spectrum_tolerance,
                0.0,
            );
            b.claim(
                "ground-state transform: Rayleigh quotients shift by λ₀",
                r.rayleigh_difference,
                Rel::Le,
                r.rayleigh_tolerance,
                0.0,
            );
        }
        Section::Folner => {
            let action = i.action.as_ref().ok_or_else(|| missing("action"))?.build("inputs.action")?;
            let words = if i.generating_set.is_empty() {
                action.symmetric_letters()
            } else {
                symmetrize(&parse_words(&action, &i.generating_set)?)
            };
            let v = amenability_verdict(&action, &words, i.epsilon, i.budget.build(tol))?;
            if let Some(c) = &v.certificate {
                b.claim("Følner certificate ratio < ε", c.ratio, Rel::Lt, i.epsilon, 0.0);
                b.claim("Følner certificate rechecks", c.recheck(&action)?, Rel::Eq, c.ratio, tol.identity);
            }
            if !v.rho_series.is_empty() {
                b.series("return_probability_root", &usize_series(&v.rho_series));
                b.claim(
                    "p_{2n}^{1/2n} non-decreasing",
                    max_decrease(v.rho_series.iter().map(|p| p.1)),
                    Rel::Le,
                    0.0,
                    1e-12,
                );
                b.claim(
                    "p_{2n}^{1/2n} ≤ 1",
                    v.rho_series.iter().map(|p| p.1).fold(0.0, f64::max),
                    Rel::Le,
                    1.0,
                    1e-12,
                );
            }
            if v.status == AmenabilityStatus::Inconclusive {
                b.inconclusive = true;
                b.note("amenability verdict inconclusive");
            }
            b.artifact("verdict", &v);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(kind: &str, inputs: &str) -> Scenario {
        parse_scenario(&format!(r#"{{"version":"1","name":"t","kind":"{kind}","inputs":{inputs}}}"#)).unwrap()
    }

    #[test]
    fn schema_errors_carry_paths() {
        let e = parse_scenario(r#"{"version":"1","name":"t","kind":"tame","inputs":{"cover":{"base":{}, "action":{"type":"bogus"}}}}"#)
            .unwrap_err();
        match e {
            Error::Schema { path, .. } => assert!(path.starts_with("inputs.cover"), "{path}"),
            other => panic!("{other}"),
        }
        let e = parse_scenario(r#"{"version":"2","name":"t","kind":"probe","inputs":{}}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "version"));
        let e = parse_scenario(r#"{"version":"1","name":"t","kind":"probe","extra":1}"#).unwrap_err();
        assert!(matches!(e, Error::Schema { .. }));
    }

    #[test]
    fn finite_tame_cover_passes() {
        let s = scenario(
            "tame",
            r#"{"cover":{"base":{"generator":"cycle","params":{"n":3}},"action":{"type":"cyclic","generators":["a"],"params":{"order":4,"shifts":[1]}},"voltage":[[0,"a"]]}}"#,
        );
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{}", r.to_json());
    }

    #[test]
    fn probe_sections_and_csv() {
        let s = scenario(
            "probe",
            r#"{"graph":{"generator":"path","params":{"n":4}},"action":{"type":"integer","generators":["a"],"params":{"steps":[1]}}}"#,
        );
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.outcome, Outcome::Pass, "{}", r.to_json());
        assert!(r.to_csv().starts_with("name,x,y\n"));
        let e = run_probe(&s, Section::Cover).unwrap_err();
        assert!(matches!(e, Error::Schema { ref path, .. } if path == "inputs.cover"));
    }

    #[test]
    fn outcomes_map_to_exit_codes() {
        use Outcome::*;
        assert_eq!(Outcome::combined_exit_code(&[Pass, Pass]), 0);
        assert_eq!(Outcome::combined_exit_code(&[Pass, Inconclusive]), 2);
        assert_eq!(Outcome::combined_exit_code(&[Fail, Inconclusive]), 1);
        assert_eq!(HypothesisViolated.exit_code(), 2);
    }
}
