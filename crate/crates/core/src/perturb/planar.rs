//! First-order perturbation of plane plasmonic eigenvalues, with a
//! finite-difference check against full re-solves on shifted curves.

use rayon::prelude::*;
use serde::Serialize;

use crate::bem::{build_dtn, DtNPair};
use crate::curve::{perturb_curve, sample_curve, CurveParam, ShapeFn2D};
use crate::error::{Error, Origin, Result};
use crate::linalg;
use crate::spectrum::{solve_plasmonic, PlasmonicSpectrum};

const EPSDOT: Origin = Origin::new("perturb", "epsdot_2d");
const FD: Origin = Origin::new("perturb", "fd_epsdot_2d");

/// Relative gap below which two eigenvalues are treated as one cluster.
pub const CLUSTER_TOLERANCE: f64 = 1e-6;

/// Arclength derivative of node values.
pub fn tangential_derivative(dtn: &DtNPair, g: &[f64]) -> Vec<f64> {
    linalg::periodic_derivative(g)
        .iter()
        .zip(&dtn.sample.speed)
        .map(|(d, s)| d / s)
        .collect()
}

/// `q₁(f, g) = (ε + 1) ∮ a [−∂_s f ∂_s g + ε N₋f N₋g] ds`.
pub fn q1_form_2d(dtn: &DtNPair, eps: f64, f: &[f64], g: &[f64], a: &ShapeFn2D) -> f64 {
    let s = &dtn.sample;
    let av = s.eval(a);
    let (tf, tg) = (tangential_derivative(dtn, f), tangential_derivative(dtn, g));
    let (nf, ng) = (dtn.nminus.apply(f), dtn.nminus.apply(g));
    let integrand: Vec<f64> = (0..s.len())
        .map(|i| av[i] * (-tf[i] * tg[i] + eps * nf[i] * ng[i]))
        .collect();
    (eps + 1.0) * s.integrate(&integrand)
}

/// `ε̇` of eigenpair `index` of `spectrum` under the normal shift `a`.
///
/// The eigenfunction is taken with `⟨g, N₋g⟩ = 1`. If the eigenvalue is
/// part of a cluster, the reported eigenfunction must diagonalise `q₁` on
/// the cluster.
pub fn epsdot_2d(
    dtn: &DtNPair,
    spectrum: &PlasmonicSpectrum,
    index: usize,
    a: &ShapeFn2D,
) -> Result<f64> {
    let eps = *spectrum.eigenvalues.get(index).ok_or_else(|| Error::Input {
        origin: EPSDOT,
        reason: format!("eigenpair {index} not in spectrum of {}", spectrum.len()),
    })?;
    if (eps - 1.0).abs() < 1e-8 {
        return Err(Error::Input {
            origin: EPSDOT,
            reason: "eigenvalue 1 is the accumulation point; no branch to differentiate".into(),
        });
    }
    let g = &spectrum.eigenfunctions[index];
    let norm = dtn.nminus.form(g, g);
    let value = q1_form_2d(dtn, eps, g, g, a) / norm;
    for (j, other) in spectrum.eigenfunctions.iter().enumerate() {
        let ej = spectrum.eigenvalues[j];
        if j == index || (ej - eps).abs() > CLUSTER_TOLERANCE * eps {
            continue;
        }
        let off = q1_form_2d(dtn, eps, g, other, a) / (norm * dtn.nminus.form(other, other)).sqrt();
        if off.abs() > 1e-8 * (1.0 + value.abs()) {
            return Err(Error::Splitting {
                origin: EPSDOT,
                branch: index,
                residual: off.abs(),
            });
        }
    }
    Ok(value)
}

/// Central-difference check of [`epsdot_2d`].
#[derive(Debug, Clone, Serialize)]
pub struct FdReport {
    pub epsilon: f64,
    pub epsdot: f64,
    pub h_list: Vec<f64>,
    /// `(ε(h) − ε(−h))/2h`.
    pub differences: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`.
    pub slope: f64,
    /// `(4D(h/2) − D(h))/3` from the two smallest steps.
    pub richardson: f64,
    pub discrepancy: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Eigenvalue on the shifted curve whose eigenfunction overlaps most with
/// `g0` in `(·,·)₊` of the base curve (nodes correspond one to one).
fn tracked_eigenvalue(
    base: &DtNPair,
    g0: &[f64],
    curve: &CurveParam,
    a: &ShapeFn2D,
    h: f64,
    num: usize,
) -> Result<f64> {
    let shifted = perturb_curve(curve, a, h)?;
    let dtn = build_dtn(&sample_curve(&shifted, base.len())?)?;
    let spec = solve_plasmonic(&dtn, num)?;
    let plus = |f: &[f64], g: &[f64]| -base.nplus.form(f, g);
    let n0 = plus(g0, g0);
    let best = spec
        .eigenfunctions
        .iter()
        .enumerate()
        .map(|(i, g)| (i, plus(g0, g).abs() / (n0 * plus(g, g)).sqrt()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .ok_or_else(|| Error::Assembly {
            origin: FD,
            reason: "empty spectrum on shifted curve".into(),
        })?;
    Ok(spec.eigenvalues[best.0])
}

/// Compare `ε̇` of eigenpair `index` (of the `num` computed) with central
/// differences of eigenvalues tracked on the curves shifted by `±h·a`.
pub fn fd_epsdot_2d(
    curve: &CurveParam,
    n: usize,
    num: usize,
    index: usize,
    a: &ShapeFn2D,
    h_list: &[f64],
) -> Result<FdReport> {
    if h_list.len() < 2 {
        return Err(Error::Input {
            origin: FD,
            reason: "need at least two step sizes".into(),
        });
    }
    let base = build_dtn(&sample_curve(curve, n)?)?;
    let spec = solve_plasmonic(&base, num)?;
    let epsdot = epsdot_2d(&base, &spec, index, a)?;
    let g0 = &spec.eigenfunctions[index];
    let diffs = h_list
        .par_iter()
        .map(|&h| {
            let up = tracked_eigenvalue(&base, g0, curve, a, h, num)?;
            let down = tracked_eigenvalue(&base, g0, curve, a, -h, num)?;
            Ok((up - down) / (2.0 * h))
        })
        .collect::<Result<Vec<f64>>>()?;
    let errors: Vec<f64> = diffs.iter().map(|d| (d - epsdot).abs()).collect();
    let m = diffs.len();
    let richardson = (4.0 * diffs[m - 1] - diffs[m - 2]) / 3.0;
    Ok(FdReport {
        epsilon: spec.eigenvalues[index],
        epsdot,
        h_list: h_list.to_vec(),
        slope: loglog_slope(h_list, &errors),
        differences: diffs,
        errors,
        richardson,
        discrepancy: (richardson - epsdot).abs(),
    })
}
