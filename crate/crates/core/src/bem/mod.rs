//! Nyström discretisation of the Laplace layer potentials on a smooth closed
//! curve, and the interior/exterior Dirichlet-to-Neumann operators built from
//! them.
//!
//! With `G(x) = log|x| / 2π` (so `ΔG = δ`) the single layer
//! `Sφ(x) = ∮ G(x − y) φ(y) ds(y)` has the jump relations
//! `∂ₙ(Sφ)∓ = (K* ∓ ½)φ`, where `K*` is the adjoint double layer with
//! `K*1 = ½` on the unit circle. Representing both harmonic extensions of the
//! same boundary data as `g = Sφ + c` with `∮ φ ds = 0` (so the exterior one
//! stays bounded) gives
//!
//! ```text
//! N₋ = (K* − ½) S⁻¹,    N₊ = (K* + ½) S⁻¹    (S⁻¹ taken modulo constants).
//! ```
//!
//! The logarithmic singularity of `S` is integrated with the periodic
//! splitting rule of Kress: `log|x(t) − x(τ)|` is written as
//! `½ log(4 sin²((t−τ)/2))` plus a smooth remainder, and the first part is
//! integrated exactly against trigonometric interpolants.

mod dump;

pub use dump::{read_operator, write_operator, OperatorHeader};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::curve::{sample_curve, CurveSample};
use crate::error::{Error, Origin, Result};
use crate::linalg;

const SINGLE_LAYER: Origin = Origin::new("bem2d", "assemble_single_layer");
const BUILD_DTN: Origin = Origin::new("bem2d", "build_dtn");
const G0: Origin = Origin::new("bem2d", "compute_g0");
const FAR_FIELD: Origin = Origin::new("bem2d", "far_field_log_coefficient");

/// Below this smallest singular value the single layer is treated as singular.
pub const CAPACITY_TOLERANCE: f64 = 1e-6;
/// Scale factor applied to curves whose single layer is singular.
pub const RESCALE_FACTOR: f64 = 2.0;

/// A matrix acting on node values, with the quadrature weights that define
/// the discrete `L²(∂Ω)` inner product it is (anti)symmetric in.
#[derive(Debug, Clone)]
pub struct BoundaryOperator {
    pub name: String,
    pub matrix: DMatrix<f64>,
    pub weights: Vec<f64>,
}

impl BoundaryOperator {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let v = &self.matrix * DVector::from_column_slice(g);
        v.as_slice().to_vec()
    }

    /// `⟨f, A g⟩`.
    pub fn form(&self, f: &[f64], g: &[f64]) -> f64 {
        let ag = self.apply(g);
        f.iter()
            .zip(&ag)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// `‖A − A*‖/‖A‖` in the weighted inner product.
    pub fn asymmetry(&self) -> f64 {
        linalg::weighted_asymmetry(&self.matrix, &self.weights)
    }
}

/// Kress weights `R_d` for `∫₀^{2π} log(4 sin²((t_i − τ)/2)) f(τ) dτ ≈ Σ_j R_{|i−j|} f_j`.
fn kress_weights(n_nodes: usize) -> Vec<f64> {
    let n = n_nodes / 2;
    let nf = n as f64;
    (0..n_nodes)
        .map(|d| {
            let arg = d as f64 * PI / nf;
            let s: f64 = (1..n).map(|m| (m as f64 * arg).cos() / m as f64).sum();
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * sign
        })
        .collect()
}

/// Single-layer matrix without the capacity check.
pub(crate) fn single_layer_matrix(sample: &CurveSample) -> DMatrix<f64> {
    let n = sample.len();
    let r = kress_weights(n);
    let h = 2.0 * PI / n as f64;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = sample.nodes[i];
            (0..n)
                .map(|j| {
                    let smooth = if i == j {
                        sample.speed[i].ln()
                    } else {
                        let xj = sample.nodes[j];
                        let dist = (xi[0] - xj[0]).hypot(xi[1] - xj[1]);
                        let dt = sample.params[i] - sample.params[j];
                        dist.ln() - 0.5 * (4.0 * (0.5 * dt).sin().powi(2)).ln()
                    };
                    let d = i.abs_diff(j);
                    (0.5 * r[d] + h * smooth) * sample.speed[j] / (2.0 * PI)
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Smallest singular value of `S` as an operator on the weighted `L²`.
fn single_layer_sigma_min(s: &DMatrix<f64>, w: &[f64]) -> f64 {
    let n = w.len();
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let whitened = DMatrix::from_fn(n, n, |i, j| sq[i] * s[(i, j)] / sq[j]);
    linalg::symmetric_part(&whitened)
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.abs()))
}

/// Discretised `Sφ(x) = (1/2π) ∮ log|x − y| φ(y) ds(y)`.
pub fn assemble_single_layer(sample: &CurveSample) -> Result<BoundaryOperator> {
    let matrix = single_layer_matrix(sample);
    let sigma_min = single_layer_sigma_min(&matrix, &sample.weights);
    if sigma_min < CAPACITY_TOLERANCE {
        return Err(Error::RescaleRequired {
            origin: SINGLE_LAYER,
            sigma_min,
        });
    }
    Ok(BoundaryOperator {
        name: "single_layer".into(),
        matrix,
        weights: sample.weights.clone(),
    })
}

/// Discretised adjoint double layer
/// `K*φ(x) = (1/2π) ∮ (x − y)·n(x) / |x − y|² φ(y) ds(y)`.
///
/// The kernel is smooth; its diagonal limit is `−κ(x)/2`.
pub fn assemble_np_adjoint(sample: &CurveSample) -> BoundaryOperator {
    let n = sample.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = sample.nodes[i];
            let ni = sample.normals[i];
            (0..n)
                .map(|j| {
                    let k = if i == j {
                        -0.5 * sample.curvature[i]
                    } else {
                        let d = [xi[0] - sample.nodes[j][0], xi[1] - sample.nodes[j][1]];
                        (d[0] * ni[0] + d[1] * ni[1]) / (d[0] * d[0] + d[1] * d[1])
                    };
                    k * sample.weights[j] / (2.0 * PI)
                })
                .collect()
        })
        .collect();
    BoundaryOperator {
        name: "np_adjoint".into(),
        matrix: DMatrix::from_fn(n, n, |i, j| rows[i][j]),
        weights: sample.weights.clone(),
    }
}

/// Interior and exterior Dirichlet-to-Neumann operators of a curve.
#[derive(Debug, Clone)]
pub struct DtNPair {
    pub nminus: BoundaryOperator,
    pub nplus: BoundaryOperator,
    /// Adjoint double layer of the sampled curve (scale invariant).
    pub kstar: BoundaryOperator,
    /// Factor by which the curve was enlarged to make `S` invertible
    /// (1 when no rescaling was needed). `N±` always refer to the original curve.
    pub scale: f64,
    pub sample: CurveSample,
}

impl DtNPair {
    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }
}

/// Density map `g ↦ φ` of the solve `Sφ + c = g`, `∮ φ ds = 0`.
///
/// The representation `Sφ + c` is bounded at infinity, which is what the
/// exterior operator needs: `Sφ` with `∮ φ ds ≠ 0` grows like `log|x|`.
fn mean_free_density_map(s: &DMatrix<f64>, w: &[f64]) -> Result<DMatrix<f64>> {
    let n = s.nrows();
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(s);
    for i in 0..n {
        aug[(i, n)] = 1.0;
        aug[(n, i)] = w[i];
    }
    let mut rhs = DMatrix::zeros(n + 1, n);
    rhs.view_mut((0, 0), (n, n)).fill_with_identity();
    let sol = aug.lu().solve(&rhs).ok_or_else(|| Error::Assembly {
        origin: BUILD_DTN,
        reason: "augmented single-layer system is singular".into(),
    })?;
    Ok(sol.rows(0, n).into_owned())
}

fn dtn_from_operators(
    s: &DMatrix<f64>,
    kstar: &DMatrix<f64>,
    w: &[f64],
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = s.nrows();
    let phi = mean_free_density_map(s, w)?;
    let half = DMatrix::<f64>::identity(n, n) * 0.5;
    Ok(((kstar - &half) * &phi, (kstar + &half) * phi))
}

/// `N₋ = (K* − ½)S⁻¹` and `N₊ = (K* + ½)S⁻¹` on the nodes of `sample`,
/// with `S⁻¹` taken modulo constants so that both extensions stay bounded.
///
/// If `S` is singular the curve is enlarged by [`RESCALE_FACTOR`]; since the
/// DtN operators of `tΩ` are those of `Ω` divided by `t` (on corresponding
/// nodes), the result is mapped back exactly.
pub fn build_dtn(sample: &CurveSample) -> Result<DtNPair> {
    let kstar = assemble_np_adjoint(sample);
    let (s, scale, w) = match assemble_single_layer(sample) {
        Ok(s) => (s.matrix, 1.0, sample.weights.clone()),
        Err(Error::RescaleRequired { .. }) => {
            let scaled = sample_curve(&sample.curve.scaled(RESCALE_FACTOR), sample.len())?;
            let s = assemble_single_layer(&scaled).map_err(|e| match e {
                Error::RescaleRequired { sigma_min, .. } => Error::RescaleRequired {
                    origin: BUILD_DTN,
                    sigma_min,
                },
                other => other,
            })?;
            (s.matrix, RESCALE_FACTOR, scaled.weights)
        }
        Err(e) => return Err(e),
    };
    // K* is scale invariant, so it can be combined with the rescaled S directly
    let (nm, np) = dtn_from_operators(&s, &kstar.matrix, &w)?;
    let w = sample.weights.clone();
    Ok(DtNPair {
        nminus: BoundaryOperator {
            name: "dtn_interior".into(),
            matrix: nm * scale,
            weights: w.clone(),
        },
        nplus: BoundaryOperator {
            name: "dtn_exterior".into(),
            matrix: np * scale,
            weights: w,
        },
        kstar,
        scale,
        sample: sample.clone(),
    })
}

/// Normal derivative on `∂Ω` of the exterior harmonic function `v` that
/// vanishes on `∂Ω` and grows like `log|x| / 2π`, normalised to `∮ g₀ ds = 1`.
///
/// Built as `v = G − G'` with `G` the logarithmic potential centred at the
/// interior point `y0` (the area centroid by default) and `G'` the bounded
/// exterior harmonic function with the boundary values of `G`. A boundary
/// function `g` extends to an exterior harmonic function that is `O(1/|x|)`
/// exactly when `⟨g, g₀⟩ = 0`.
pub fn compute_g0(sample: &CurveSample, y0: Option<[f64; 2]>) -> Result<Vec<f64>> {
    let y0 = y0.unwrap_or_else(|| sample.centroid());
    if sample.winding_number(y0) != 1 {
        return Err(Error::Input {
            origin: G0,
            reason: format!("base point ({}, {}) is not inside the curve", y0[0], y0[1]),
        });
    }
    let n = sample.len();
    let s = single_layer_matrix(sample);
    let kstar = assemble_np_adjoint(sample);
    // bounded exterior extension G' = Sφ + c with ∮φ ds = 0
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&s);
    for i in 0..n {
        aug[(i, n)] = 1.0;
        aug[(n, i)] = sample.weights[i];
    }
    let mut rhs = DVector::zeros(n + 1);
    let mut dn_g = vec![0.0; n];
    for i in 0..n {
        let d = [sample.nodes[i][0] - y0[0], sample.nodes[i][1] - y0[1]];
        let r2 = d[0] * d[0] + d[1] * d[1];
        rhs[i] = 0.5 * r2.ln() / (2.0 * PI);
        dn_g[i] = (d[0] * sample.normals[i][0] + d[1] * sample.normals[i][1]) / (2.0 * PI * r2);
    }
    let sol = aug.lu().solve(&rhs).ok_or_else(|| Error::Assembly {
        origin: G0,
        reason: "augmented single-layer system is singular".into(),
    })?;
    let phi = sol.rows(0, n).into_owned();
    let dn_ext = &kstar.matrix * &phi + &phi * 0.5;
    let mut g0: Vec<f64> = (0..n).map(|i| dn_g[i] - dn_ext[i]).collect();
    let total = sample.integrate(&g0);
    for v in &mut g0 {
        *v /= total;
    }
    Ok(g0)
}

/// Coefficient `c` of `c·log|x|` in the far field of the exterior harmonic
/// function `Sφ` with boundary values `g`.
pub fn far_field_log_coefficient(sample: &CurveSample, g: &[f64]) -> Result<f64> {
    let s = assemble_single_layer(sample).map_err(|e| match e {
        Error::RescaleRequired { sigma_min, .. } => Error::RescaleRequired {
            origin: FAR_FIELD,
            sigma_min,
        },
        other => other,
    })?;
    let phi = s
        .matrix
        .lu()
        .solve(&DVector::from_column_slice(g))
        .ok_or_else(|| Error::Assembly {
            origin: FAR_FIELD,
            reason: "single-layer matrix is singular".into(),
        })?;
    Ok(sample.integrate(phi.as_slice()) / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveParam, TrigPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mode(sample: &CurveSample, l: i32) -> Vec<f64> {
        sample
            .params
            .iter()
            .map(|t| if l >= 0 { (l as f64 * t).cos() } else { (-l as f64 * t).sin() })
            .collect()
    }

    fn assert_eigvec(op: &BoundaryOperator, v: &[f64], lambda: f64, tol: f64) {
        let av = op.apply(v);
        for (a, b) in av.iter().zip(v) {
            assert!((a - lambda * b).abs() < tol, "{a} vs {}", lambda * b);
        }
    }

    #[test]
    fn single_layer_on_circle_of_radius_two() {
        let s = sample_curve(&CurveParam::circle(2.0), 64).unwrap();
        let op = assemble_single_layer(&s).unwrap();
        for l in [1, -1, 3, -5, 12, 31] {
            assert_eigvec(&op, &mode(&s, l), -1.0 / l.abs() as f64, 1e-13);
        }
        assert_eigvec(&op, &mode(&s, 0), 2.0 * 2f64.ln(), 1e-13);
        assert!(op.asymmetry() < 1e-14);
    }

    #[test]
    fn unit_circle_single_layer_needs_rescaling() {
        let s = sample_curve(&CurveParam::circle(1.0), 32).unwrap();
        let m = single_layer_matrix(&s);
        let c = m * DVector::from_element(32, 1.0);
        assert!(c.amax() < 1e-14);
        assert!(matches!(
            assemble_single_layer(&s),
            Err(Error::RescaleRequired { .. })
        ));
    }

    #[test]
    fn np_adjoint_on_unit_circle() {
        let s = sample_curve(&CurveParam::circle(1.0), 32).unwrap();
        let k = assemble_np_adjoint(&s);
        for l in [1, -2, 7, 15] {
            assert_eigvec(&k, &mode(&s, l), 0.0, 1e-14);
        }
        assert_eigvec(&k, &mode(&s, 0), 0.5, 1e-14);
    }

    #[test]
    fn dtn_multipliers_on_circle() {
        for radius in [1.0, 2.0] {
            let s = sample_curve(&CurveParam::circle(radius), 64).unwrap();
            let dtn = build_dtn(&s).unwrap();
            assert_eq!(dtn.scale, if radius == 1.0 { RESCALE_FACTOR } else { 1.0 });
            for l in [1i32, -2, 5, -9, 20] {
                let m = l.abs() as f64 / radius;
                assert_eigvec(&dtn.nminus, &mode(&s, l), m, 1e-11);
                assert_eigvec(&dtn.nplus, &mode(&s, l), -m, 1e-11);
            }
        }
    }

    #[test]
    fn dtn_kernel_sign_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for curve in [
            CurveParam::circle(2.0),
            CurveParam::ellipse(2.0, 1.0),
            CurveParam::fourier(vec![1.5, 0.3, 0.2], vec![0.0, 0.1]),
        ] {
            let s = sample_curve(&curve, 128).unwrap();
            let dtn = build_dtn(&s).unwrap();
            let ones = vec![1.0; s.len()];
            let scale = dtn.nminus.matrix.amax();
            assert!(dtn.nminus.apply(&ones).iter().all(|v| v.abs() < 1e-9 * scale));
            assert!(dtn.nplus.apply(&ones).iter().all(|v| v.abs() < 1e-9 * scale));
            assert!(dtn.nminus.asymmetry() < 1e-8, "{:e}", dtn.nminus.asymmetry());
            assert!(dtn.nplus.asymmetry() < 1e-8, "{:e}", dtn.nplus.asymmetry());
            for _ in 0..100 {
                let g: Vec<f64> = (0..s.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                assert!(dtn.nminus.form(&g, &g) >= 0.0);
                assert!(dtn.nplus.form(&g, &g) <= 0.0);
            }
        }
    }

    #[test]
    fn jump_relation_smoke_test() {
        let s = sample_curve(&CurveParam::ellipse(2.0, 1.0), 32).unwrap();
        let k = assemble_np_adjoint(&s).matrix;
        let id = DMatrix::<f64>::identity(32, 32);
        let diff = (&k + &id * 0.5) - (&k - &id * 0.5);
        assert!((diff - id).amax() < 1e-15);
    }

    #[test]
    fn g0_on_circles_is_constant() {
        for radius in [1.0, 2.5] {
            let s = sample_curve(&CurveParam::circle(radius), 64).unwrap();
            let g0 = compute_g0(&s, None).unwrap();
            for v in &g0 {
                assert!((v - 1.0 / (2.0 * PI * radius)).abs() < 1e-12);
            }
            let off = compute_g0(&s, Some([0.3 * radius, -0.2 * radius])).unwrap();
            for (a, b) in off.iter().zip(&g0) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn g0_rejects_exterior_base_point() {
        let s = sample_curve(&CurveParam::ellipse(2.0, 1.0), 32).unwrap();
        assert!(matches!(
            compute_g0(&s, Some([0.0, 1.5])),
            Err(Error::Input { .. })
        ));
    }

    #[test]
    fn far_field_vanishes_on_g0_orthogonal_data() {
        let s = sample_curve(&CurveParam::ellipse(2.0, 1.0), 128).unwrap();
        let g0 = compute_g0(&s, None).unwrap();
        let g = s.eval(&TrigPoly {
            cos: vec![0.7, 0.2, -0.4],
            sin: vec![0.3, 0.0, 0.1],
        });
        let c = far_field_log_coefficient(&s, &g).unwrap();
        assert!(c.abs() > 1e-3);
        let proj = s.inner(&g, &g0) / s.inner(&g0, &g0);
        let h: Vec<f64> = g.iter().zip(&g0).map(|(a, b)| a - proj * b).collect();
        assert!(far_field_log_coefficient(&s, &h).unwrap().abs() < 1e-10);
    }
}
