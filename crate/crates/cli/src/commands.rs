use std::collections::BTreeMap;

use anyhow::{bail, Result};
use pwgraph::partition::{chain_constants, ShellRecord};
use pwgraph::sampling::ExactFrameBounds;
use pwgraph::shannon::{DemoReport, TightnessReport};
use pwgraph::spectral::BernsteinCheck;
use pwgraph::worked::{examples_report, ExamplesReport};
use pwgraph::{
    bernstein_check, exact_frame_bounds, frame_bounds, frame_reconstruct, oversampling_report, partition_constants,
    plancherel_polya_check, poincare_forward_check, poincare_zero_on_s0_check, reverse_check, shannon_demo,
    shell_estimate_check, spectral_geometry_report, supported_on_s0_check, vanishing_signal, Bounds, ChainConstants,
    Constants, Decomposition, Exponent, GeometryReport, Graph, GraphSignal, Partition, PlancherelPolyaReport,
    PwProjector, ReconstructOptions, Record, Signal, SubsetChain, Trace, VertexSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

/// A finished report and whether every inequality it contains held.
pub struct Outcome {
    pub json: Value,
    pub passed: bool,
}

impl Outcome {
    fn new<S: Serialize>(report: &S, passed: bool) -> Result<Self> {
        Ok(Outcome { json: serde_json::to_value(report)?, passed })
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vanishes_on(f: &GraphSignal, set: &VertexSet) -> bool {
    set.iter().all(|v| f.get(v) == 0.0)
}

#[derive(Serialize)]
struct ConstantsOut {
    p: Exponent<f64>,
    partition: Option<Constants>,
    chain: Option<ChainConstants<f64>>,
}

pub fn constants(g: &Graph, part: Option<&Partition>, chain: Option<&SubsetChain>, p: Exponent<f64>) -> Result<Outcome> {
    if part.is_none() && chain.is_none() {
        bail!("constants needs --partition, --chain or both");
    }
    let out = ConstantsOut {
        p,
        partition: part.map(|s| partition_constants(g, s, p)).transpose()?,
        chain: chain.map(|c| chain_constants(g, c, p)).transpose()?,
    };
    Outcome::new(&out, true)
}

#[derive(Serialize)]
struct PoincareOut {
    p: Exponent<f64>,
    records: Vec<Record>,
    skipped: Vec<String>,
    passed: bool,
}

/// Every inequality of the forward and reverse families whose hypotheses the
/// signal meets. Without `--chain` the partition shells are used as the chain.
pub fn poincare(g: &Graph, part: &Partition, chain: Option<&SubsetChain>, f: &GraphSignal, p: Exponent<f64>) -> Result<Outcome> {
    let on_s0 = vanishes_on(f, part.initial());
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let pv = match p {
        Exponent::Infinity => {
            if !on_s0 {
                bail!("for p = inf only the estimate for signals vanishing on the initial shell is available");
            }
            records.push(poincare_zero_on_s0_check(g, part, f, p)?);
            None
        }
        Exponent::Finite(pv) => Some(pv),
    };
    if let Some(pv) = pv {
        records.push(poincare_forward_check(g, part, f, pv)?);
        if on_s0 {
            records.push(poincare_zero_on_s0_check(g, part, f, p)?);
        } else {
            skipped.push("poincare_zero_on_s0: signal does not vanish on S0".to_string());
        }
        let derived = SubsetChain::from_partition(part);
        let chain_ref = chain.unwrap_or(&derived);
        let cc = chain_constants(g, chain_ref, p)?;
        if !cc.well_defined {
            if chain.is_some() {
                cc.delta_hat()?;
            }
            skipped.push("reverse: chain constants of the partition shells are not all positive".to_string());
        } else {
            records.push(reverse_check(g, chain_ref, f, pv)?);
            let a_hat = cc.a_hat()?;
            if !vanishes_on(f, &chain_ref.initial().complement(g.len())) {
                skipped.push("reverse_supported_on_s0: signal does not vanish off S0".to_string());
            } else if a_hat <= 1.0 {
                skipped.push(format!("reverse_supported_on_s0: a_hat = {a_hat} <= 1"));
            } else {
                records.push(supported_on_s0_check(g, chain_ref, f, pv)?);
            }
        }
    }
    let passed = records.iter().all(|r| r.passed);
    Outcome::new(&PoincareOut { p, records, skipped, passed }, passed)
}

#[derive(Serialize)]
struct ShellsOut {
    p: f64,
    shells: Vec<ShellRecord<f64>>,
    passed: bool,
}

pub fn shells(g: &Graph, part: &Partition, f: &GraphSignal, p: Exponent<f64>) -> Result<Outcome> {
    let p = p.value()?;
    let shells = shell_estimate_check(g, part, f, p)?;
    let passed = shells.iter().all(|s| s.passed);
    Outcome::new(&ShellsOut { p, shells, passed }, passed)
}

#[derive(Serialize)]
struct SpectrumOut {
    vertices: usize,
    eigenvalues: Vec<f64>,
}

pub fn spectrum(dec: &Decomposition) -> Result<Outcome> {
    Outcome::new(&SpectrumOut { vertices: dec.len(), eigenvalues: dec.eigenvalues().to_vec() }, true)
}

#[derive(Serialize)]
struct ProjectOut<'a> {
    omega: f64,
    seed: Option<u64>,
    dimension: usize,
    band_eigenvalues: Vec<f64>,
    vertices: &'a [String],
    input: GraphSignal,
    projection: GraphSignal,
    /// `||f - P f||_2`
    residual: f64,
    bernstein: BernsteinCheck<f64>,
    passed: bool,
}

/// Without a signal file the input is uniform on `[-1, 1]` at every vertex.
pub fn pw_project(g: &Graph, dec: &Decomposition, omega: f64, f: Option<GraphSignal>, seed: Option<u64>) -> Result<Outcome> {
    let pw = PwProjector::new(dec, omega)?;
    let input = match (f, seed) {
        (Some(f), _) => f,
        (None, Some(seed)) => {
            let mut r = rng(seed);
            Signal::new((0..g.len()).map(|_| r.gen_range(-1.0..=1.0)).collect())
        }
        (None, None) => bail!("pw-project needs --signal or --seed"),
    };
    let projection = pw.project(&input)?;
    let bernstein = bernstein_check(g, dec, &projection, omega)?;
    let passed = bernstein.passed();
    let out = ProjectOut {
        omega,
        seed,
        dimension: pw.dimension(),
        band_eigenvalues: pw.band().iter().map(|&j| dec.eigenvalue(j)).collect(),
        vertices: g.names(),
        residual: input.sub(&projection).norm2(),
        input,
        projection,
        bernstein,
        passed,
    };
    Outcome::new(&out, passed)
}

/// The zero-set checks use the signal file if given, otherwise a signal in
/// `PW_omega` vanishing on `S0` when `--omega` is given and one exists.
pub fn geometry(g: &Graph, dec: &Decomposition, part: &Partition, f: Option<GraphSignal>, omega: Option<f64>) -> Result<Outcome> {
    let zero = match (f, omega) {
        (Some(f), _) => Some(f),
        (None, Some(omega)) => vanishing_signal(dec, omega, part.initial())?,
        (None, None) => None,
    };
    let report: GeometryReport<f64> = spectral_geometry_report(g, dec, part, zero.as_ref())?;
    let passed = report.passed;
    Outcome::new(&report, passed)
}

#[derive(Serialize)]
struct FrameBoundsOut {
    s0: Vec<String>,
    bounds: Bounds,
    exact: Option<ExactFrameBounds<f64>>,
    exact_eta: Option<f64>,
    passed: bool,
}

/// Exact bounds are computed when the graph has unit vertex weights.
pub fn frame_bounds_cmd(g: &Graph, s0: &VertexSet, omega: f64) -> Result<Outcome> {
    let bounds = frame_bounds(g, s0, omega)?;
    let exact = if g.has_unit_vertex_weights() {
        let dec = Decomposition::decompose(g)?;
        Some(exact_frame_bounds(&dec, omega, s0)?)
    } else {
        None
    };
    let tol = 1e-9;
    let passed = exact.is_none_or(|e| {
        bounds.a <= e.lambda_min + tol * e.lambda_min.max(1.0) && e.lambda_max <= bounds.b + tol * bounds.b.max(1.0)
    });
    let out = FrameBoundsOut { s0: g.set_names(s0), bounds, exact, exact_eta: exact.map(|e| e.eta()), passed };
    Outcome::new(&out, passed)
}

#[derive(Serialize)]
struct PpOut {
    omega: f64,
    seed: Option<u64>,
    #[serde(flatten)]
    report: PlancherelPolyaReport<f64>,
}

/// Without a signal file the signal is a random element of `PW_omega`.
pub fn pp_check(
    g: &Graph,
    dec: &Decomposition,
    omega: f64,
    part: &Partition,
    chain: Option<&SubsetChain>,
    f: Option<GraphSignal>,
    seed: Option<u64>,
) -> Result<Outcome> {
    let f = match (f, seed) {
        (Some(f), _) => f,
        (None, Some(seed)) => PwProjector::new(dec, omega)?.random_signal(&mut rng(seed)),
        (None, None) => bail!("pp-check needs --signal or --seed"),
    };
    let derived = SubsetChain::from_partition(part);
    let report = plancherel_polya_check(g, dec, omega, part, chain.unwrap_or(&derived), &f)?;
    let passed = report.passed;
    Outcome::new(&PpOut { omega, seed, report }, passed)
}

#[derive(Serialize)]
struct ReconstructOut<'a> {
    s0: Vec<String>,
    vertices: &'a [String],
    #[serde(flatten)]
    trace: Trace,
}

/// A trace that stops at `max_iter` without meeting `tol` counts as failed.
pub fn reconstruct(
    g: &Graph,
    dec: &Decomposition,
    omega: f64,
    samples: &BTreeMap<usize, f64>,
    options: &ReconstructOptions<f64>,
    truth: Option<&GraphSignal>,
) -> Result<Outcome> {
    let s0 = VertexSet::new(samples.keys().copied());
    let bounds = frame_bounds(g, &s0, omega)?;
    let trace = frame_reconstruct(dec, &bounds, samples, options, truth)?;
    let passed = trace.converged;
    Outcome::new(&ReconstructOut { s0: g.set_names(&s0), vertices: g.names(), trace }, passed)
}

#[derive(Serialize)]
struct ShannonOut {
    demo: DemoReport<f64>,
    /// `None` when `(k+1) sqrt(2 - 2cos(omega)) >= 1`.
    oversampling: Option<TightnessReport<f64>>,
    passed: bool,
}

pub fn shannon(k: usize, omega: f64, periods: usize, seed: u64) -> Result<Outcome> {
    let demo = shannon_demo::<f64>(k, omega, periods, seed)?;
    let oversampling = match oversampling_report::<f64>(k, omega) {
        Ok(r) => Some(r),
        Err(pwgraph::Error::TightnessNotApplicable(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let passed = demo.passed && oversampling.as_ref().is_none_or(|r| r.tightness.passed != Some(false));
    Outcome::new(&ShannonOut { demo, oversampling, passed }, passed)
}

pub fn examples() -> Result<Outcome> {
    let report: ExamplesReport<f64> = examples_report()?;
    let passed = report.passed;
    Outcome::new(&report, passed)
}
