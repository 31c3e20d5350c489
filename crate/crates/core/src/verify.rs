//! The end-to-end acceptance matrix: nine criteria covering both directions
//! of the classification, the oracle cross-checks and the identity suite.

use crate::bundle::{frames, BundlePoint};
use crate::classify::{
    recognize_chart, sample_and_verify, SampleOptions, Shape, Verdict, DEFAULT_T_SET,
};
use crate::error::Result;
use crate::maslov::{
    ajh_h_residual, hamiltonian_residual, identity_coeffs, jh_inner, jhh_tangent, mean_curvature_closed,
    relative_error, residuals_from_parts, sign_slipped_h, IdentityInputs, ZeroH, DEFAULT_T_SAMPLES,
};
use crate::oracle::{maslov_residual_oracle, mean_curvature_oracle, JetEvaluator};
use crate::par::{self, Execution};
use crate::surface::{
    catalog_surface, codazzi_residual, principal_frame_with, ChartPoint, PrincipalData, SurfaceChart, UmbilicPolicy,
    CATALOG_NAMES,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

pub const FORWARD_TOL: f64 = 1e-8;
pub const ORACLE_H_TOL: f64 = 1e-6;
pub const DUAL_PATH_TOL: f64 = 1e-5;
pub const MINIMAL_H_TOL: f64 = 1e-7;
pub const IDENTITY_TOL: f64 = 1e-7;
pub const FIELD_SMALL: f64 = 1e-5;
pub const AJH_LARGE: f64 = 1e-3;
pub const HS_LARGE: f64 = 1e-2;
pub const CODAZZI_TOL: f64 = 1e-9;
pub const GRAM_TOL: f64 = 1e-12;
pub const SHAPE_TOL: f64 = 1e-6;

/// Criterion names in order; `--only` accepts these or their numbers.
pub const CRITERIA: [&str; 9] = [
    "forward",
    "converse",
    "oracle",
    "minimal",
    "identities",
    "remark",
    "hamiltonian",
    "consistency",
    "shapes",
];

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Grid for the sweep criteria.
    pub grid: (usize, usize),
    /// Coarser grid for the finite-difference field criteria.
    pub field_grid: (usize, usize),
    pub oracle_points: usize,
    pub identity_trials: usize,
    /// Criterion numbers to run; empty means all.
    pub only: Vec<usize>,
    pub inject_sign_error: bool,
    pub execution: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            grid: (32, 32),
            field_grid: (16, 16),
            oracle_points: 200,
            identity_trials: 1000,
            only: Vec::new(),
            inject_sign_error: false,
            execution: Execution::Parallel,
        }
    }
}

/// Parses a criterion selector: a number `1..=9` or a name from [`CRITERIA`].
pub fn parse_criterion(s: &str) -> Option<usize> {
    let s = s.trim();
    if let Ok(n) = s.parse::<usize>() {
        return (1..=CRITERIA.len()).contains(&n).then_some(n);
    }
    CRITERIA.iter().position(|&c| c == s).map(|i| i + 1)
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {}. {:<12} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Outcome table of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionOutcome>,
}

impl VerifySummary {
    pub fn new(seed: u64, criteria: Vec<CriterionOutcome>) -> Self {
        VerifySummary { seed, passed: criteria.iter().all(|c| c.passed), criteria }
    }
}

fn chart(name: &str, params: &[(&str, f64)]) -> Result<SurfaceChart> {
    let p: BTreeMap<String, f64> = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    catalog_surface(name, &p)
}

fn label(c: &SurfaceChart) -> String {
    let ps: Vec<String> = c.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
    if ps.is_empty() {
        c.name().to_string()
    } else {
        format!("{}({})", c.name(), ps.join(","))
    }
}

fn model_surfaces() -> Result<Vec<SurfaceChart>> {
    [
        ("sphere", ("radius", 1.0)),
        ("sphere", ("radius", 2.5)),
        ("cylinder", ("radius", 1.0)),
        ("cylinder", ("radius", 0.7)),
        ("cone", ("r", 0.5)),
        ("cone", ("r", 1.0)),
        ("cone", ("r", 3.0)),
    ]
    .iter()
    .map(|&(n, p)| chart(n, &[p]))
    .collect()
}

fn nonzero_t() -> Vec<f64> {
    DEFAULT_T_SET.iter().copied().filter(|&t| t != 0.0).collect()
}

fn grid_pds(c: &SurfaceChart, grid: (usize, usize), exec: Execution) -> Result<Vec<PrincipalData>> {
    crate::classify::grid_principal_data(c, grid, exec)
}

struct Check {
    passed: bool,
    parts: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { passed: true, parts: Vec::new() }
    }

    fn record(&mut self, ok: bool, text: String) {
        self.passed &= ok;
        self.parts.push(if ok { text } else { format!("{text} <-- FAIL") });
    }
}

fn forward(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let opts = SampleOptions { execution: cfg.execution, fields: false, oracle_stride: 0, inject_sign_error: false };
    let ts = nonzero_t();
    let mut worst: f64 = 0.0;
    for c in model_surfaces()? {
        let r = sample_and_verify(&c, cfg.grid, &ts, FORWARD_TOL, &opts)?;
        worst = worst.max(r.aggregates.fhat.max);
        let ok = r.verdict == Verdict::Maslovian && r.aggregates.fhat.max <= FORWARD_TOL;
        if !ok {
            ck.record(false, format!("{} max F̂={:.3e} verdict {:?}", label(&c), r.aggregates.fhat.max, r.verdict));
        }
    }
    ck.record(ck.passed, format!("7 model surfaces, max F̂ = {worst:.3e} (tol {FORWARD_TOL:e})"));
    Ok(ck)
}

fn converse(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let opts = SampleOptions { execution: cfg.execution, fields: false, oracle_stride: 0, inject_sign_error: false };
    for c in [chart("ellipsoid", &[])?, chart("torus", &[])?] {
        let r = sample_and_verify(&c, cfg.grid, &DEFAULT_T_SET, FORWARD_TOL, &opts)?;
        let frac = r.aggregates.converse_fraction;
        ck.record(
            frac >= 0.95 && r.verdict == Verdict::NotMaslovian,
            format!("{}: {:.2}% above 1e-3, {:?}", label(&c), 100.0 * frac, r.verdict),
        );
    }
    Ok(ck)
}

/// Worst closed-form vs oracle discrepancies on random bundle points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleErrors {
    /// `max |H_closed − H_oracle| / (1 + |H|)`.
    #[serde(serialize_with = "crate::report::num")]
    pub h: f64,
    /// `max |F_closed − F_oracle|` over points with nonvanishing `H`.
    #[serde(serialize_with = "crate::report::num")]
    pub f: f64,
    pub points: usize,
    pub f_points: usize,
}

impl OracleErrors {
    pub fn within_tolerance(&self) -> bool {
        self.h <= ORACLE_H_TOL && self.f <= DUAL_PATH_TOL
    }
}

/// Compares both paths at `n` admissible points drawn uniformly from the
/// chart domain with `t ∈ [−2, 2]`.
pub fn oracle_errors(
    c: &SurfaceChart,
    n: usize,
    rng: &mut ChaCha8Rng,
    exec: Execution,
    inject_sign_error: bool,
) -> Result<OracleErrors> {
    let dom = c.domain();
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = ChartPoint::new(rng.gen_range(dom.u[0]..dom.u[1]), rng.gen_range(dom.v[0]..dom.v[1]));
        let t = rng.gen_range(-2.0..2.0);
        if c.admits(p) {
            pts.push(BundlePoint { p, t });
        }
    }
    let errs = par::map(&pts, exec, |&q| -> Result<(f64, Option<f64>)> {
        let je = JetEvaluator::new(c);
        let pd = principal_frame_with(c, q.p, UmbilicPolicy::Fallback)?;
        let hc = if inject_sign_error { sign_slipped_h(&pd, q.t) } else { mean_curvature_closed(&pd, q.t) };
        let ho = mean_curvature_oracle(&je, q)?;
        let eh = (hc - ho).norm() / (1.0 + hc.norm());
        if hc.norm() < je.vanishing_threshold() {
            return Ok((eh, None));
        }
        let fo = maslov_residual_oracle(&je, q, &frames(&pd, q.t))?.f;
        let fc = residuals_from_parts(&jhh_tangent(&pd, q.t), &jh_inner(&pd, q.t), 1.0, 1.0).f;
        let ef = (0..3).map(|k| (fo[k] - fc[k]).abs()).fold(0.0, f64::max);
        Ok((eh, Some(ef)))
    });
    let mut out = OracleErrors { h: 0.0, f: 0.0, points: n, f_points: 0 };
    for e in errs {
        let (eh, ef) = e?;
        out.h = out.h.max(eh);
        if let Some(ef) = ef {
            out.f = out.f.max(ef);
            out.f_points += 1;
        }
    }
    Ok(out)
}

/// Catalog surfaces with default parameters, plus the cone with `r = 2`.
pub fn oracle_surfaces() -> Result<Vec<SurfaceChart>> {
    let mut charts: Vec<SurfaceChart> = CATALOG_NAMES.iter().map(|n| chart(n, &[])).collect::<Result<_>>()?;
    charts.push(chart("cone", &[("r", 2.0)])?);
    Ok(charts)
}

fn oracle(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let charts = oracle_surfaces()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut worst_h, mut worst_f) = (0.0f64, 0.0f64);
    let mut compared = 0usize;
    for c in &charts {
        let e = oracle_errors(c, cfg.oracle_points, &mut rng, cfg.execution, cfg.inject_sign_error)?;
        if !e.within_tolerance() {
            ck.record(false, format!("{}: H err {:.2e}, F err {:.2e}", label(c), e.h, e.f));
        }
        worst_h = worst_h.max(e.h);
        worst_f = worst_f.max(e.f);
        compared += e.f_points;
    }
    ck.record(
        ck.passed,
        format!(
            "{} surfaces x {} points: max |ΔH|/(1+|H|) = {worst_h:.2e}, max |ΔF| = {worst_f:.2e} over {compared} points",
            charts.len(),
            cfg.oracle_points
        ),
    );
    Ok(ck)
}

fn minimal(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let opts = SampleOptions { execution: cfg.execution, fields: false, oracle_stride: 0, inject_sign_error: false };
    let cat = chart("catenoid", &[])?;
    let r = sample_and_verify(&cat, cfg.grid, &DEFAULT_T_SET, FORWARD_TOL, &opts)?;
    ck.record(
        r.aggregates.h_norm.max <= MINIMAL_H_TOL && r.verdict == Verdict::MinimalBundle,
        format!("catenoid max |H| = {:.2e}, {:?}", r.aggregates.h_norm.max, r.verdict),
    );
    let plane = sample_and_verify(&chart("plane", &[])?, cfg.grid, &DEFAULT_T_SET, FORWARD_TOL, &opts)?;
    ck.record(plane.verdict == Verdict::MinimalBundle, format!("plane {:?}", plane.verdict));
    let mut others = model_surfaces()?;
    others.push(chart("ellipsoid", &[])?);
    let mut worst_ratio = f64::INFINITY;
    for c in &others {
        let pds = grid_pds(c, cfg.grid, cfg.execution)?;
        let kmax = pds.iter().map(|p| p.a.abs().max(p.b.abs())).fold(0.0, f64::max);
        let hmin = pds.iter().map(|p| mean_curvature_closed(p, 0.0).norm()).fold(f64::INFINITY, f64::min);
        let ratio = hmin / kmax;
        worst_ratio = worst_ratio.min(ratio);
        if ratio <= 0.1 {
            ck.record(false, format!("{}: min |H|(t=0) = {hmin:.3e}, κmax = {kmax:.3e}", label(c)));
        }
    }
    ck.record(ck.passed, format!("non-minimal min |H|(t=0)/κmax = {worst_ratio:.3} (> 0.1)"));
    Ok(ck)
}

/// Worst relative errors of the extracted coefficients against the closed
/// forms, over seeded uniform draws from `[−2, 2]⁶`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityErrors {
    pub trials: usize,
    /// `f₁`, `g₁` on unconstrained draws.
    #[serde(serialize_with = "crate::report::num")]
    pub first_order: f64,
    /// `f₃`, `g₃` on draws with `e₁b = −e₁a`, `e₂b = −e₂a`.
    #[serde(serialize_with = "crate::report::num")]
    pub third_order: f64,
    /// Largest extracted coefficient for isoparametric inputs.
    #[serde(serialize_with = "crate::report::num")]
    pub isoparametric: f64,
    #[serde(serialize_with = "crate::report::num")]
    pub max_condition: f64,
}

impl IdentityErrors {
    pub fn within_tolerance(&self) -> bool {
        self.first_order <= IDENTITY_TOL && self.third_order <= IDENTITY_TOL && self.isoparametric == 0.0
    }
}

pub fn identity_errors(trials: usize, seed: u64) -> Result<IdentityErrors> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut x = [0.0; 6];
        for v in x.iter_mut() {
            *v = rng.gen_range(-2.0..=2.0);
        }
        IdentityInputs::from_array(x)
    };
    let mut out = IdentityErrors { trials, first_order: 0.0, third_order: 0.0, isoparametric: 0.0, max_condition: 0.0 };
    for _ in 0..trials {
        let x = draw(&mut rng);
        let c = identity_coeffs(&x, &DEFAULT_T_SAMPLES)?;
        out.max_condition = out.max_condition.max(c.condition);
        out.first_order = out
            .first_order
            .max(relative_error(c.extracted_f[0], c.f1))
            .max(relative_error(c.extracted_g[0], c.g1));
    }
    for _ in 0..trials {
        let x = draw(&mut rng).constrained();
        let c = identity_coeffs(&x, &DEFAULT_T_SAMPLES)?;
        let (f3, g3) = (c.f3.unwrap_or(f64::NAN), c.g3.unwrap_or(f64::NAN));
        out.third_order = out
            .third_order
            .max(relative_error(c.extracted_f[1], f3))
            .max(relative_error(c.extracted_g[1], g3));
    }
    let x = draw(&mut rng);
    let iso = IdentityInputs { a: x.a, b: x.b, ..Default::default() };
    let c = identity_coeffs(&iso, &DEFAULT_T_SAMPLES)?;
    out.isoparametric = c.extracted_f.iter().chain(&c.extracted_g).fold(0.0, |m, v| m.max(v.abs()));
    Ok(out)
}

fn identities(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let e = identity_errors(cfg.identity_trials, cfg.seed)?;
    ck.record(e.first_order <= IDENTITY_TOL, format!("f1/g1 max rel err {:.2e}", e.first_order));
    ck.record(
        e.third_order <= IDENTITY_TOL,
        format!("f3/g3 max rel err {:.2e} ({} trials each)", e.third_order, e.trials),
    );
    ck.record(e.isoparametric == 0.0, format!("isoparametric max {:.1e}", e.isoparametric));
    Ok(ck)
}

fn field_max(
    c: &SurfaceChart,
    cfg: &VerifyConfig,
    ts: &[f64],
    f: impl Fn(&SurfaceChart, &PrincipalData, f64) -> Result<f64> + Sync + Send,
) -> Result<f64> {
    let pds = grid_pds(c, cfg.field_grid, cfg.execution)?;
    let vals = par::map(&pds, cfg.execution, |pd| -> Result<f64> {
        let mut m: f64 = 0.0;
        for &t in ts {
            m = m.max(f(c, pd, t)?);
        }
        Ok(m)
    });
    vals.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn remark(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let ts = nonzero_t();
    let ajh = |c: &SurfaceChart, pd: &PrincipalData, t: f64| ajh_h_residual(c, pd, t, ZeroH::Reject);
    let mut worst: f64 = 0.0;
    for c in model_surfaces()? {
        let m = field_max(&c, cfg, &ts, ajh)?;
        worst = worst.max(m);
        if m > FIELD_SMALL {
            ck.record(false, format!("{}: {m:.2e}", label(&c)));
        }
    }
    ck.record(ck.passed, format!("model surfaces max = {worst:.2e}"));
    let ell = chart("ellipsoid", &[])?;
    let m = field_max(&ell, cfg, &ts, ajh)?;
    ck.record(m > AJH_LARGE, format!("ellipsoid max = {m:.2e}"));
    Ok(ck)
}

fn hamiltonian(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let hs = |c: &SurfaceChart, pd: &PrincipalData, t: f64| hamiltonian_residual(c, pd, t);
    for c in [chart("sphere", &[])?, chart("catenoid", &[])?, chart("cone", &[("r", 1.0)])?] {
        let m = field_max(&c, cfg, &DEFAULT_T_SET, hs)?;
        ck.record(m <= FIELD_SMALL, format!("{} max {m:.2e}", label(&c)));
    }
    for c in [chart("cone", &[("r", 2.0)])?, chart("torus", &[])?] {
        let m = field_max(&c, cfg, &DEFAULT_T_SET, hs)?;
        ck.record(m >= HS_LARGE, format!("{} max {m:.2e}", label(&c)));
    }
    Ok(ck)
}

fn gram_deviation<const N: usize, D: nalgebra::Dim + nalgebra::DimName>(
    vs: &[nalgebra::OVector<f64, D>; N],
) -> f64
where
    nalgebra::DefaultAllocator: nalgebra::allocator::Allocator<D>,
{
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vs[i].dot(&vs[j]) - expect).abs());
        }
    }
    worst
}

fn consistency(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let (mut codazzi, mut gram, mut parity_breaks, mut checked) = (0.0f64, 0.0f64, 0usize, 0usize);
    for name in CATALOG_NAMES {
        let c = chart(name, &[])?;
        for pd in grid_pds(&c, cfg.grid, cfg.execution)? {
            if !pd.umbilic {
                let (r1, r2) = codazzi_residual(&pd);
                let s = pd.a.abs().max(pd.b.abs()).max(1.0);
                codazzi = codazzi.max(r1.abs().max(r2.abs()) / (s * s));
            }
            gram = gram.max(gram_deviation(&[pd.e1, pd.e2, pd.normal]));
            for &t in &DEFAULT_T_SET {
                gram = gram.max(gram_deviation(&frames(&pd, t).all()));
                if t <= 0.0 {
                    continue;
                }
                let fp = residuals_from_parts(&jhh_tangent(&pd, t), &jh_inner(&pd, t), 1.0, 1.0).f;
                let fm = residuals_from_parts(&jhh_tangent(&pd, -t), &jh_inner(&pd, -t), 1.0, 1.0).f;
                checked += 1;
                let even = fm[0] == fp[0];
                let odd = fm[1] == -fp[1] && fm[2] == -fp[2];
                if !(even && odd) {
                    parity_breaks += 1;
                }
            }
        }
    }
    ck.record(codazzi <= CODAZZI_TOL, format!("Codazzi {codazzi:.2e}"));
    ck.record(gram <= GRAM_TOL, format!("Gram {gram:.2e}"));
    ck.record(
        parity_breaks == 0,
        format!("t-parity bit-exact at {}/{checked} pairs (F13, F23 odd; F12 even)", checked - parity_breaks),
    );
    Ok(ck)
}

fn shapes(cfg: &VerifyConfig) -> Result<Check> {
    let mut ck = Check::new();
    let mut worst: f64 = 0.0;
    for c in model_surfaces()? {
        let fit = recognize_chart(&c, cfg.grid, cfg.execution)?;
        let p = |k: &str| c.params()[k];
        let err = match (fit.shape, c.name()) {
            (Shape::Sphere { radius }, "sphere") => (radius - p("radius")).abs() / p("radius"),
            (Shape::Cylinder { radius }, "cylinder") => (radius - p("radius")).abs() / p("radius"),
            (Shape::Cone { r }, "cone") => (r - p("r")).abs() / p("r"),
            _ => f64::INFINITY,
        };
        worst = worst.max(err);
        if err > SHAPE_TOL {
            ck.record(false, format!("{}: {:?}", label(&c), fit.shape));
        }
    }
    ck.record(ck.passed, format!("7 model surfaces, max rel parameter error {worst:.2e}"));
    for (name, expect) in [("plane", Shape::Plane), ("torus", Shape::Other), ("ellipsoid", Shape::Other)] {
        let fit = recognize_chart(&chart(name, &[])?, cfg.grid, cfg.execution)?;
        ck.record(fit.shape == expect, format!("{name} -> {:?}", fit.shape));
    }
    Ok(ck)
}

/// Runs the selected criteria in order. Numerical errors inside a
/// criterion count as its failure.
pub fn run(cfg: &VerifyConfig) -> Vec<CriterionOutcome> {
    type Runner = fn(&VerifyConfig) -> Result<Check>;
    let runners: [Runner; 9] = [
        forward, converse, oracle, minimal, identities, remark, hamiltonian, consistency, shapes,
    ];
    let mut out = Vec::new();
    for (i, run) in runners.iter().enumerate() {
        let id = i + 1;
        if !cfg.only.is_empty() && !cfg.only.contains(&id) {
            continue;
        }
        let (passed, detail) = match run(cfg) {
            Ok(ck) => (ck.passed, ck.parts.join("; ")),
            Err(e) => (false, format!("error: {e}")),
        };
        out.push(CriterionOutcome { id, name: CRITERIA[i], passed, detail });
    }
    out
}
