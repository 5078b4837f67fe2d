//! Eigenvalues and total-variation mixing of the simple random walk on the
//! flip graph.

use faer::{Mat, Side as MatSide};
use rayon::prelude::*;
use serde::Serialize;

use crate::flip_graph::{Adjacency, FlipGraph, GraphError};

/// Largest graph handed to the dense symmetric eigensolver.
pub const DENSE_EIGEN_CAP: usize = 8;

/// Largest graph for which walk distributions are propagated.
pub const TV_CAP: usize = 9;

/// Largest graph for which walk counts are tracked in exact integers.
pub const EXACT_TV_CAP: usize = 6;

const POWER_TOLERANCE: f64 = 1e-9;
const POWER_MAX_ITERATIONS: usize = 100_000;
const TV_MAX_STEPS: usize = 100_000;

/// Float distances this close to 1/4 count as ties. Exact ties do occur on
/// the small graphs, and rounding must not push them below the threshold.
const TV_TIE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub n: usize,
    pub vertex_count: usize,
    pub sigma2: f64,
    pub sigma2_abs: f64,
    pub tv_iterations: usize,
    /// The largest eigenvalues in decreasing order, with multiplicity.
    /// Empty when only the iterative solver ran.
    pub leading_eigenvalues: Vec<f64>,
    pub method: EigenMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenMethod {
    Dense,
    Power,
}

/// All eigenvalues of the transition matrix in decreasing order.
pub fn dense_eigenvalues(g: &FlipGraph) -> Result<Vec<f64>, GraphError> {
    if g.n() > DENSE_EIGEN_CAP {
        return Err(GraphError::CapExceeded { n: g.n(), cap: DENSE_EIGEN_CAP });
    }
    let size = g.vertex_count();
    let weight = 1.0 / g.degree() as f64;
    let mut p = Mat::<f64>::zeros(size, size);
    for v in 0..size {
        for &w in g.neighbors(v) {
            p[(v, w as usize)] += weight;
        }
    }
    let mut values = p
        .self_adjoint_eigenvalues(MatSide::Lower)
        .expect("symmetric eigensolve converges");
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

fn multiply(g: &FlipGraph, x: &[f64], out: &mut [f64]) {
    let weight = 1.0 / g.degree() as f64;
    out.par_iter_mut().enumerate().for_each(|(v, o)| {
        *o = g.neighbors(v).iter().map(|&w| x[w as usize]).sum::<f64>() * weight;
    });
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// Dominant eigenvalue of `(I + sign·P)/2` on the complement of the
/// constant vector, by power iteration with Rayleigh quotients.
fn shifted_power(g: &FlipGraph, sign: f64) -> f64 {
    let size = g.vertex_count();
    let mut x: Vec<f64> = (0..size).map(|i| ((i * 7919 + 13) % 1009) as f64 / 1009.0 - 0.5).collect();
    let mut px = vec![0.0; size];
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let mean = x.iter().sum::<f64>() / size as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        normalize(&mut x);
        multiply(g, &x, &mut px);
        for (p, &v) in px.iter_mut().zip(&x) {
            *p = 0.5 * (v + sign * *p);
        }
        let rayleigh: f64 = x.iter().zip(&px).map(|(a, b)| a * b).sum();
        std::mem::swap(&mut x, &mut px);
        if (rayleigh - previous).abs() < POWER_TOLERANCE {
            return rayleigh;
        }
        previous = rayleigh;
    }
    previous
}

/// Second largest and most negative eigenvalue of the transition matrix by
/// power iteration.
pub fn power_extremes(g: &FlipGraph) -> (f64, f64) {
    let top = 2.0 * shifted_power(g, 1.0) - 1.0;
    let bottom = 1.0 - 2.0 * shifted_power(g, -1.0);
    (top, bottom)
}

fn tv_from(dist: &[f64]) -> f64 {
    let u = 1.0 / dist.len() as f64;
    0.5 * dist.iter().map(|p| (p - u).abs()).sum::<f64>()
}

/// Total-variation distance from uniform after `0..=steps` steps, for a
/// walk started at `start`.
pub fn tv_curve(g: &FlipGraph, start: usize, steps: usize) -> Vec<f64> {
    let size = g.vertex_count();
    let mut dist = vec![0.0; size];
    let mut next = vec![0.0; size];
    dist[start] = 1.0;
    let mut out = vec![tv_from(&dist)];
    for _ in 0..steps {
        multiply(g, &dist, &mut next);
        std::mem::swap(&mut dist, &mut next);
        out.push(tv_from(&dist));
    }
    out
}

fn first_below_quarter_float(g: &FlipGraph, start: usize) -> usize {
    let size = g.vertex_count();
    let mut dist = vec![0.0; size];
    let mut next = vec![0.0; size];
    dist[start] = 1.0;
    for t in 0..TV_MAX_STEPS {
        if tv_from(&dist) < 0.25 - TV_TIE_SLACK {
            return t;
        }
        multiply(g, &dist, &mut next);
        std::mem::swap(&mut dist, &mut next);
    }
    panic!("walk failed to approach uniform within {TV_MAX_STEPS} steps")
}

/// Same as the float version, using walk counts: the distance is below 1/4
/// iff `2·Σ|N·W(y) − d^t| < N·d^t`.
fn first_below_quarter_exact(g: &FlipGraph, start: usize) -> usize {
    let size = g.vertex_count();
    let n = size as u128;
    let d = g.degree() as u128;
    let mut walks = vec![0u128; size];
    walks[start] = 1;
    let mut total: u128 = 1;
    for t in 0.. {
        let deviation: u128 = walks.iter().map(|&w| (n * w).abs_diff(total)).sum();
        if 2 * deviation < n * total {
            return t;
        }
        walks = (0..size)
            .map(|v| g.neighbors(v).iter().map(|&w| walks[w as usize]).sum())
            .collect();
        total = total.checked_mul(d).expect("walk counts overflow");
    }
    unreachable!()
}

/// Least `t` at which every start is within 1/4 of uniform in total variation.
///
/// The distance from a fixed start never increases with `t` and is the same
/// for symmetric starts, so one start per orbit suffices.
pub fn tv_iterations(g: &FlipGraph) -> Result<usize, GraphError> {
    if g.n() > TV_CAP {
        return Err(GraphError::CapExceeded { n: g.n(), cap: TV_CAP });
    }
    let reps = g.orbit_representatives();
    let exact = g.n() <= EXACT_TV_CAP;
    Ok(reps
        .par_iter()
        .map(|&s| if exact { first_below_quarter_exact(g, s) } else { first_below_quarter_float(g, s) })
        .max()
        .unwrap_or(0))
}

/// Worst-start total-variation distance after exactly `t` steps.
pub fn worst_tv(g: &FlipGraph, t: usize) -> f64 {
    g.orbit_representatives()
        .par_iter()
        .map(|&s| tv_curve(g, s, t)[t])
        .reduce(|| 0.0, f64::max)
}

pub fn spectral_report(g: &FlipGraph) -> Result<SpectralReport, GraphError> {
    if g.n() < 5 {
        return Err(GraphError::TooSmall { n: g.n(), min: 5 });
    }
    let (sigma2, lowest, leading, method) = if g.n() <= DENSE_EIGEN_CAP {
        let values = dense_eigenvalues(g)?;
        let leading = values.iter().take(8).copied().collect();
        (values[1], *values.last().unwrap(), leading, EigenMethod::Dense)
    } else {
        let (top, bottom) = power_extremes(g);
        (top, bottom, Vec::new(), EigenMethod::Power)
    };
    Ok(SpectralReport {
        n: g.n(),
        vertex_count: g.vertex_count(),
        sigma2,
        sigma2_abs: sigma2.abs().max(lowest.abs()),
        tv_iterations: tv_iterations(g)?,
        leading_eigenvalues: leading,
        method,
    })
}
