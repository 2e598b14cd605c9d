//! Derivative of the Dirichlet-to-Neumann operator along a normal shift.
//!
//! Pulling the DtN operator of `Ω(h)` back to `∂Ω` through the node map
//! `x ↦ x + h a(x) n(x)` gives a family `N_h` with
//!
//! ```text
//! Ṅ g = −∂_s(a ∂_s g) + κ a N g − N(a N g)
//! ```
//!
//! for both the interior and the exterior operator, where `κ` is the
//! curvature in the convention `κ = −1` on the unit circle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bem::{build_dtn, DtNPair};
use crate::curve::{perturb_curve, sample_curve, CurveParam, CurveSample, ShapeFn2D};
use crate::error::{Error, Origin, Result};
use crate::linalg;
use crate::perturb::{loglog_slope, tangential_derivative};

const FD: Origin = Origin::new("dtn_shape", "fd_shape_derivative");

/// Which DtN operator of a plane domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

fn operator(dtn: &DtNPair, side: Side) -> &DMatrix<f64> {
    match side {
        Side::Interior => &dtn.nminus.matrix,
        Side::Exterior => &dtn.nplus.matrix,
    }
}

/// `Ṅg` at the nodes.
pub fn shape_derivative_apply(
    g: &[f64],
    a: &ShapeFn2D,
    dtn: &DtNPair,
    side: Side,
) -> Vec<f64> {
    let s = &dtn.sample;
    let av = s.eval(a);
    let n = operator(dtn, side);
    let ng = n * DVector::from_column_slice(g);
    let flux: Vec<f64> = tangential_derivative(dtn, g)
        .iter()
        .zip(&av)
        .map(|(d, a)| a * d)
        .collect();
    let tangential = tangential_derivative(dtn, &flux);
    let a_ng = DVector::from_iterator(g.len(), ng.iter().zip(&av).map(|(v, a)| a * v));
    let n_a_ng = n * a_ng;
    (0..g.len())
        .map(|i| -tangential[i] + s.curvature[i] * av[i] * ng[i] - n_a_ng[i])
        .collect()
}

/// Matrix of `Ṅ` acting on node values.
pub fn shape_derivative_matrix(a: &ShapeFn2D, dtn: &DtNPair, side: Side) -> DMatrix<f64> {
    let n = dtn.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            shape_derivative_apply(&e, a, dtn, side)
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// DtN operator of the shifted curve acting on values at the base nodes.
#[derive(Debug, Clone)]
pub struct TransplantedDtN {
    pub h: f64,
    pub matrix: DMatrix<f64>,
    /// Quadrature weights of the base curve.
    pub weights: Vec<f64>,
}

/// `N_h` for the shift `h·a`; the shifted curve is sampled at the images of
/// the base nodes, so no interpolation is involved.
pub fn transplanted_dtn(
    curve: &CurveParam,
    a: &ShapeFn2D,
    h: f64,
    n: usize,
    side: Side,
) -> Result<TransplantedDtN> {
    let base = sample_curve(curve, n)?;
    let shifted = sample_curve(&perturb_curve(curve, a, h)?, n)?;
    let dtn = build_dtn(&shifted)?;
    Ok(TransplantedDtN {
        h,
        matrix: operator(&dtn, side).clone(),
        weights: base.weights,
    })
}

/// Orthonormal (in the weighted inner product) basis of trigonometric node
/// vectors of degree `≤ degree`, as columns.
pub fn trig_basis(sample: &CurveSample, degree: usize) -> DMatrix<f64> {
    let n = sample.len();
    let mut cols = vec![vec![1.0; n]];
    for k in 1..=degree {
        cols.push(sample.params.iter().map(|t| (k as f64 * t).cos()).collect());
        cols.push(sample.params.iter().map(|t| (k as f64 * t).sin()).collect());
    }
    let sq: Vec<f64> = sample.weights.iter().map(|w| w.sqrt()).collect();
    let m = DMatrix::from_fn(n, cols.len(), |i, j| sq[i] * cols[j][i]);
    let q = m.qr().q();
    DMatrix::from_fn(n, q.ncols(), |i, j| q[(i, j)] / sq[i])
}

/// Norm of `E` restricted to the span of `basis`, from weighted `L²` to itself.
pub fn restricted_norm(e: &DMatrix<f64>, basis: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let sq = DMatrix::from_diagonal(&DVector::from_iterator(
        weights.len(),
        weights.iter().map(|w| w.sqrt()),
    ));
    (sq * e * basis).singular_values().max()
}

/// Report of the finite-difference check of `Ṅ`.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeFdReport {
    pub curve: CurveParam,
    pub a: ShapeFn2D,
    pub side: Side,
    pub h_list: Vec<f64>,
    pub slopes: Slopes,
    /// Per step: `max(one-sided, central)` restricted operator-norm error.
    pub max_errors: Vec<f64>,
    pub one_sided_errors: Vec<f64>,
    pub central_errors: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Slopes {
    pub one_sided: f64,
    pub central: f64,
}

/// Compare `Ṅ` with `(N_h − N_0)/h` and `(N_h − N_{−h})/2h` on the
/// trigonometric subspace of degree `≤ N/8`. Errors that are already at
/// rounding level (the shape is a dilation of a circle, or `a = 0`) give a
/// slope of `+∞`.
pub fn fd_shape_derivative(
    curve: &CurveParam,
    a: &ShapeFn2D,
    n: usize,
    h_list: &[f64],
    side: Side,
) -> Result<ShapeFdReport> {
    if h_list.len() < 2 {
        return Err(Error::Input {
            origin: FD,
            reason: "need at least two step sizes".into(),
        });
    }
    let sample = sample_curve(curve, n)?;
    let dtn = build_dtn(&sample)?;
    let n0 = operator(&dtn, side).clone();
    let deriv = shape_derivative_matrix(a, &dtn, side);
    let basis = trig_basis(&sample, n / 8);
    let w = &sample.weights;
    let floor = 1e-9 * restricted_norm(&n0, &basis, w);
    let errors = h_list
        .par_iter()
        .map(|&h| {
            let up = transplanted_dtn(curve, a, h, n, side)?.matrix;
            let down = transplanted_dtn(curve, a, -h, n, side)?.matrix;
            let e1 = (&up - &n0) / h - &deriv;
            let e2 = (&up - &down) / (2.0 * h) - &deriv;
            Ok((restricted_norm(&e1, &basis, w), restricted_norm(&e2, &basis, w)))
        })
        .collect::<Result<Vec<_>>>()?;
    let (one, central): (Vec<f64>, Vec<f64>) = errors.into_iter().unzip();
    let slope = |e: &[f64]| {
        if e.iter().all(|v| *v <= floor) {
            f64::INFINITY
        } else {
            loglog_slope(h_list, e)
        }
    };
    Ok(ShapeFdReport {
        curve: curve.clone(),
        a: a.clone(),
        side,
        h_list: h_list.to_vec(),
        slopes: Slopes {
            one_sided: slope(&one),
            central: slope(&central),
        },
        max_errors: one.iter().zip(&central).map(|(x, y)| x.max(*y)).collect(),
        one_sided_errors: one,
        central_errors: central,
    })
}

/// `‖Ṅ e_l‖/‖e_l‖` for `e_l = cos(lt)` on the sampled curve.
pub fn mode_response(a: &ShapeFn2D, dtn: &DtNPair, side: Side, l: usize) -> f64 {
    let s = &dtn.sample;
    let e: Vec<f64> = s.params.iter().map(|t| (l as f64 * t).cos()).collect();
    let d = shape_derivative_apply(&e, a, dtn, side);
    (s.inner(&d, &d) / s.inner(&e, &e)).sqrt()
}

/// `‖A − A*‖/‖A‖` of a transplanted operator in the base inner product.
pub fn transplanted_asymmetry(t: &TransplantedDtN) -> f64 {
    linalg::weighted_asymmetry(&t.matrix, &t.weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::TrigPoly;
    use crate::validate::oracles;

    #[test]
    fn unit_circle_uniform_shift() {
        let s = sample_curve(&CurveParam::circle(1.0), 64).unwrap();
        let dtn = build_dtn(&s).unwrap();
        for l in 1..10 {
            let g = s.eval(&TrigPoly::cos_mode(l, 1.0));
            let d = shape_derivative_apply(&g, &TrigPoly::constant(1.0), &dtn, Side::Interior);
            let m = oracles::circle_dtn_radial_derivative(l as i32);
            for (x, y) in d.iter().zip(&g) {
                assert!((x - m * y).abs() < 1e-9);
            }
            let d = shape_derivative_apply(&g, &TrigPoly::constant(1.0), &dtn, Side::Exterior);
            for (x, y) in d.iter().zip(&g) {
                assert!((x + m * y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn zero_shape_gives_zero() {
        let s = sample_curve(&CurveParam::ellipse(2.0, 1.0), 32).unwrap();
        let dtn = build_dtn(&s).unwrap();
        let m = shape_derivative_matrix(&TrigPoly::default(), &dtn, Side::Interior);
        assert_eq!(m.amax(), 0.0);
    }

    #[test]
    fn transplant_identity_and_circle_multipliers() {
        let curve = CurveParam::ellipse(2.0, 1.0);
        let a = TrigPoly::cos_mode(2, 1.0);
        let t0 = transplanted_dtn(&curve, &a, 0.0, 32, Side::Interior).unwrap();
        let base = build_dtn(&sample_curve(&curve, 32).unwrap()).unwrap();
        assert!((&t0.matrix - &base.nminus.matrix).amax() < 1e-10);
        assert!(transplanted_asymmetry(&t0) < 1e-8);
        let th = transplanted_dtn(&curve, &a, 0.05, 32, Side::Interior).unwrap();
        assert!(transplanted_asymmetry(&th) > 1e-4);

        let circle = CurveParam::circle(1.0);
        let h = 0.1;
        let t = transplanted_dtn(&circle, &TrigPoly::constant(1.0), h, 64, Side::Interior).unwrap();
        let s = sample_curve(&circle, 64).unwrap();
        for l in [1usize, 3, 8] {
            let g = s.eval(&TrigPoly::sin_mode(l, 1.0));
            let ng = &t.matrix * DVector::from_column_slice(&g);
            for (x, y) in ng.iter().zip(&g) {
                assert!((x - l as f64 / (1.0 + h) * y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn trig_basis_is_orthonormal() {
        let s = sample_curve(&CurveParam::ellipse(2.0, 1.0), 32).unwrap();
        let q = trig_basis(&s, 4);
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(&s.weights));
        let gram = q.transpose() * w * &q;
        assert!((gram - DMatrix::identity(9, 9)).amax() < 1e-13);
    }
}
