//! Grid sampling, residual statistics, verdicts and shape recognition.

use crate::error::{Error, Result};
use crate::maslov::{
    ajh_h_residual, hamiltonian_residual, jh_inner, jhh_tangent, mean_curvature_closed, residuals_from_parts, sign_slipped_h, ZeroH,
    VANISHING_H_REL,
};
use crate::oracle::{mean_curvature_oracle, JetEvaluator};
use crate::par::{self, Execution};
use crate::report::{num, nums, opt_num};
use crate::surface::{principal_frame_with, PrincipalData, SurfaceChart, UmbilicPolicy};
use crate::bundle::BundlePoint;
use serde::Serialize;
use std::collections::BTreeMap;

/// Default fibre samples; `t = 0` enters consistency checks only.
pub const DEFAULT_T_SET: [f64; 9] = [-2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0];
pub const DEFAULT_TOL: f64 = 1e-8;
/// `F̂` above which a sample counts against the Maslovian condition.
pub const CONVERSE_THRESHOLD: f64 = 1e-3;
/// Share of counted samples that must exceed [`CONVERSE_THRESHOLD`].
pub const CONVERSE_FRACTION: f64 = 0.95;
/// Relative spread below which a sampled curvature counts as constant.
pub const CONSTANT_SPREAD: f64 = 1e-6;
/// Largest accepted relative deviation of the pointwise cone estimates.
pub const CONE_FIT_TOL: f64 = 1e-6;
pub const MIN_SHAPE_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    pub execution: Execution,
    /// Evaluate the divergence of `JH` and the `A_{JH}H` residual.
    pub fields: bool,
    /// Compare closed-form and oracle `H` on every `n`-th grid point (0: off).
    pub oracle_stride: usize,
    /// Negative control: evaluate `H` with a sign slip on its `R N` term.
    pub inject_sign_error: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        SampleOptions {
            execution: Execution::Parallel,
            fields: true,
            oracle_stride: 0,
            inject_sign_error: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SampleFlags {
    pub umbilic: bool,
    pub zero_t: bool,
    pub vanishing_h: bool,
}

impl SampleFlags {
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.umbilic {
            parts.push("umbilic");
        }
        if self.zero_t {
            parts.push("zero_t");
        }
        if self.vanishing_h {
            parts.push("vanishing_h");
        }
        parts.join("|")
    }

    /// Counted in the Maslovian (forward) statistics.
    pub fn forward(&self) -> bool {
        !self.zero_t && !self.vanishing_h
    }

    /// Counted in the converse statistics.
    pub fn converse(&self) -> bool {
        self.forward() && !self.umbilic
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    #[serde(serialize_with = "num")]
    pub u: f64,
    #[serde(serialize_with = "num")]
    pub v: f64,
    #[serde(serialize_with = "num")]
    pub t: f64,
    /// `(F₁₂, F₁₃, F₂₃)`.
    #[serde(serialize_with = "nums")]
    pub f: [f64; 3],
    #[serde(serialize_with = "nums")]
    pub fhat: [f64; 3],
    #[serde(serialize_with = "num")]
    pub fhat_max: f64,
    #[serde(serialize_with = "num")]
    pub h_norm: f64,
    #[serde(serialize_with = "opt_num")]
    pub hs_res: Option<f64>,
    #[serde(serialize_with = "opt_num")]
    pub ajh_res: Option<f64>,
    /// `|H_closed − H_oracle| / (1 + |H|)`.
    #[serde(serialize_with = "opt_num")]
    pub oracle_h_err: Option<f64>,
    pub flags: SampleFlags,
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Stat {
    pub count: usize,
    #[serde(serialize_with = "num")]
    pub min: f64,
    #[serde(serialize_with = "num")]
    pub max: f64,
    #[serde(serialize_with = "num")]
    pub median: f64,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut xs: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
        if xs.is_empty() {
            return Stat { count: 0, min: f64::NAN, max: f64::NAN, median: f64::NAN };
        }
        xs.sort_by(f64::total_cmp);
        let n = xs.len();
        let median = if n % 2 == 1 { xs[n / 2] } else { 0.5 * (xs[n / 2 - 1] + xs[n / 2]) };
        Stat { count: n, min: xs[0], max: xs[n - 1], median }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Aggregates {
    /// `max F̂` over forward samples.
    pub fhat: Stat,
    /// `max F̂` over converse samples.
    pub fhat_converse: Stat,
    /// Share of converse samples with `F̂ > 1e-3`.
    #[serde(serialize_with = "num")]
    pub converse_fraction: f64,
    pub h_norm: Stat,
    pub hs_res: Stat,
    pub ajh_res: Stat,
    pub oracle_h_err: Stat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Maslovian,
    NotMaslovian,
    MinimalBundle,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Shape {
    Sphere {
        #[serde(serialize_with = "num")]
        radius: f64,
    },
    Cylinder {
        #[serde(serialize_with = "num")]
        radius: f64,
    },
    Cone {
        #[serde(serialize_with = "num")]
        r: f64,
    },
    Plane,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShapeFit {
    pub shape: Shape,
    /// Largest relative deviation of the pointwise estimates from the fit.
    #[serde(serialize_with = "num")]
    pub fit_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub surface: String,
    pub params: BTreeMap<String, f64>,
    pub grid: [usize; 2],
    #[serde(serialize_with = "crate::report::num_vec")]
    pub t_set: Vec<f64>,
    #[serde(serialize_with = "num")]
    pub tol: f64,
    #[serde(serialize_with = "num")]
    pub vanishing_threshold: f64,
    pub excluded_points: usize,
    pub verdict: Verdict,
    pub shape: Option<ShapeFit>,
    pub aggregates: Aggregates,
    pub samples: Vec<Sample>,
}

fn sample_point(
    chart: &SurfaceChart,
    pd: &PrincipalData,
    t_set: &[f64],
    eps_h: f64,
    opts: &SampleOptions,
    with_oracle: bool,
) -> Result<Vec<Sample>> {
    let je = JetEvaluator::new(chart);
    let mut out = Vec::with_capacity(t_set.len());
    for &t in t_set {
        let h = if opts.inject_sign_error { sign_slipped_h(pd, t) } else { mean_curvature_closed(pd, t) };
        let h_norm = h.norm();
        let flags = SampleFlags {
            umbilic: pd.umbilic,
            zero_t: t == 0.0,
            vanishing_h: h_norm < eps_h,
        };
        let res = residuals_from_parts(&jhh_tangent(pd, t), &jh_inner(pd, t), h_norm, pd.curvature_scale());
        let (hs_res, ajh_res) = if opts.fields {
            (
                Some(hamiltonian_residual(chart, pd, t)?),
                Some(ajh_h_residual(chart, pd, t, ZeroH::Allow)?),
            )
        } else {
            (None, None)
        };
        let oracle_h_err = if with_oracle {
            let ho = mean_curvature_oracle(&je, BundlePoint { p: pd.point, t })?;
            Some((ho - h).norm() / (1.0 + h_norm))
        } else {
            None
        };
        out.push(Sample {
            u: pd.point.u,
            v: pd.point.v,
            t,
            f: res.f,
            fhat: res.fhat,
            fhat_max: res.fhat_max(),
            h_norm,
            hs_res,
            ajh_res,
            oracle_h_err,
            flags,
        });
    }
    Ok(out)
}

/// Principal data on the admissible cell-centred grid, umbilics included
/// through the fallback frame.
pub fn grid_principal_data(chart: &SurfaceChart, grid: (usize, usize), exec: Execution) -> Result<Vec<PrincipalData>> {
    let pts = chart.grid(grid.0, grid.1);
    par::map(&pts, exec, |&p| principal_frame_with(chart, p, UmbilicPolicy::Fallback))
        .into_iter()
        .collect()
}

pub fn verdict(samples: &[Sample], tol: f64, eps_h: f64) -> Verdict {
    let max_h = samples.iter().map(|s| s.h_norm).fold(0.0, f64::max);
    if max_h <= 10.0 * eps_h {
        return Verdict::MinimalBundle;
    }
    let min_h = samples.iter().map(|s| s.h_norm).fold(f64::INFINITY, f64::min);
    let fwd_max = samples
        .iter()
        .filter(|s| s.flags.forward())
        .map(|s| s.fhat_max)
        .fold(0.0, f64::max);
    if min_h > eps_h && fwd_max <= tol {
        return Verdict::Maslovian;
    }
    if converse_fraction(samples) >= CONVERSE_FRACTION {
        return Verdict::NotMaslovian;
    }
    Verdict::Mixed
}

fn converse_fraction(samples: &[Sample]) -> f64 {
    let counted: Vec<&Sample> = samples.iter().filter(|s| s.flags.converse()).collect();
    if counted.is_empty() {
        return 0.0;
    }
    let above = counted.iter().filter(|s| s.fhat_max > CONVERSE_THRESHOLD).count();
    above as f64 / counted.len() as f64
}

fn aggregates(samples: &[Sample]) -> Aggregates {
    let fwd = || samples.iter().filter(|s| s.flags.forward());
    Aggregates {
        fhat: Stat::of(fwd().map(|s| s.fhat_max)),
        fhat_converse: Stat::of(samples.iter().filter(|s| s.flags.converse()).map(|s| s.fhat_max)),
        converse_fraction: converse_fraction(samples),
        h_norm: Stat::of(samples.iter().map(|s| s.h_norm)),
        hs_res: Stat::of(samples.iter().filter_map(|s| s.hs_res)),
        ajh_res: Stat::of(samples.iter().filter(|s| !s.flags.vanishing_h).filter_map(|s| s.ajh_res)),
        oracle_h_err: Stat::of(samples.iter().filter_map(|s| s.oracle_h_err)),
    }
}

/// Evaluates every residual on the grid `nu × nv` times `t_set`.
pub fn sample_and_verify(
    chart: &SurfaceChart,
    grid: (usize, usize),
    t_set: &[f64],
    tol: f64,
    opts: &SampleOptions,
) -> Result<ResidualReport> {
    if grid.0 < 2 || grid.1 < 2 {
        return Err(Error::Config(format!("grid must be at least 2x2, got {}x{}", grid.0, grid.1)));
    }
    if t_set.is_empty() || t_set.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("t samples must be a nonempty list of finite numbers".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let pds = grid_principal_data(chart, grid, opts.execution)?;
    if pds.is_empty() {
        return Err(Error::AllSamplesExcluded);
    }
    let eps_h = VANISHING_H_REL / chart.diameter();
    let indexed: Vec<(usize, &PrincipalData)> = pds.iter().enumerate().collect();
    let per_point = par::map(&indexed, opts.execution, |&(i, pd)| {
        let with_oracle = opts.oracle_stride > 0 && i % opts.oracle_stride == 0;
        sample_point(chart, pd, t_set, eps_h, opts, with_oracle)
    });
    let mut samples = Vec::with_capacity(pds.len() * t_set.len());
    for s in per_point {
        samples.extend(s?);
    }
    let shape = match recognize_shape(&pds) {
        Ok(fit) => Some(fit),
        Err(Error::InsufficientSamples { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ResidualReport {
        surface: chart.name().to_string(),
        params: chart.params().clone(),
        grid: [grid.0, grid.1],
        t_set: t_set.to_vec(),
        tol,
        vanishing_threshold: eps_h,
        excluded_points: grid.0 * grid.1 - pds.len(),
        verdict: verdict(&samples, tol, eps_h),
        shape,
        aggregates: aggregates(&samples),
        samples,
    })
}

fn spread(xs: impl Iterator<Item = f64> + Clone, scale: f64) -> (f64, f64) {
    let (lo, hi) = xs.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x), h.max(x)));
    let n = xs.clone().count() as f64;
    let mean = xs.sum::<f64>() / n;
    (mean, (hi - lo) / scale)
}

/// Recognises the model surfaces of the classification from sampled
/// principal data.
///
/// Sphere and cylinder are read off constant curvatures. A cone shows one
/// vanishing curvature `0` and a second one `c` obeying `c = 1/(r s + c₀)`
/// along the ruling arclength `s`; each sample then yields the estimate
/// `r = |∂ₛc| / c²`, and the fit error is the largest relative deviation
/// of these estimates from their mean.
pub fn recognize_shape(samples: &[PrincipalData]) -> Result<ShapeFit> {
    if samples.len() < MIN_SHAPE_SAMPLES {
        return Err(Error::InsufficientSamples { got: samples.len(), need: MIN_SHAPE_SAMPLES });
    }
    let inv_len = 1.0 / samples[0].length_scale;
    let kmax = samples.iter().map(|p| p.a.abs().max(p.b.abs())).fold(0.0, f64::max);
    if kmax <= VANISHING_H_REL * inv_len {
        return Ok(ShapeFit { shape: Shape::Plane, fit_error: kmax / inv_len });
    }
    let zero_tol = CONSTANT_SPREAD * kmax;
    let (ma, sa) = spread(samples.iter().map(|p| p.a), kmax);
    let (mb, sb) = spread(samples.iter().map(|p| p.b), kmax);
    if sa <= CONSTANT_SPREAD && sb <= CONSTANT_SPREAD {
        let fit_error = sa.max(sb);
        if (ma - mb).abs() <= zero_tol {
            let k = 0.5 * (ma + mb).abs();
            return Ok(ShapeFit { shape: Shape::Sphere { radius: 1.0 / k }, fit_error });
        }
        if ma.abs() <= zero_tol || mb.abs() <= zero_tol {
            let k = if ma.abs() > mb.abs() { ma } else { mb };
            return Ok(ShapeFit { shape: Shape::Cylinder { radius: 1.0 / k.abs() }, fit_error });
        }
        return Ok(ShapeFit { shape: Shape::Other, fit_error });
    }
    let a_zero = samples.iter().all(|p| p.a.abs() <= zero_tol);
    let b_zero = samples.iter().all(|p| p.b.abs() <= zero_tol);
    if a_zero || b_zero {
        // (curvature, derivative along the ruling, derivative across it)
        let parts: Vec<(f64, f64, f64)> = samples
            .iter()
            .map(|p| if a_zero { (p.b, p.e1b, p.e2b) } else { (p.a, p.e2a, p.e1a) })
            .collect();
        let ests: Vec<f64> = parts.iter().map(|&(c, along, _)| along.abs() / (c * c)).collect();
        let mean = ests.iter().sum::<f64>() / ests.len() as f64;
        let dev = ests.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max);
        let cross = parts.iter().map(|&(c, _, across)| across.abs() / (c * c)).fold(0.0, f64::max);
        let fit_error = dev.max(cross / mean);
        if mean.is_finite() && mean > 0.0 && fit_error <= CONE_FIT_TOL {
            return Ok(ShapeFit { shape: Shape::Cone { r: mean }, fit_error });
        }
        return Ok(ShapeFit { shape: Shape::Other, fit_error });
    }
    Ok(ShapeFit { shape: Shape::Other, fit_error: sa.max(sb) })
}

/// Shape recognition on a chart's admissible grid.
pub fn recognize_chart(chart: &SurfaceChart, grid: (usize, usize), exec: Execution) -> Result<ShapeFit> {
    recognize_shape(&grid_principal_data(chart, grid, exec)?)
}
