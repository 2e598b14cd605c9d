//! Perturbation of the ball plasmons `ε = (k + 1)/k` under the normal shift
//! `x ↦ x + h a(x) x` of the unit sphere.
//!
//! Degree-`k` harmonics are written `u = Y/√k`, so that `∂ₙu₋ = k u`
//! and `‖u‖₋² = ⟨u, ∂ₙu₋⟩ = 1`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Origin, Result};
use crate::linalg;
use crate::sphere::{ball_spectrum, idx, ShField, SphereGeometry, SphereGrid, TangentField};

const Q1: Origin = Origin::new("perturb", "q1_matrix");
const UDOT: Origin = Origin::new("perturb", "solve_udot");

/// Above this the `u̇` system at the resonant degree is declared unsolvable.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-8;
/// Eigenvalues of `q₁` closer than this (relative) are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Quadrature workspace for one shape `a` and one degree `k`.
pub(crate) struct Workspace {
    pub grid: SphereGrid,
    /// Band limit of intermediate fields.
    pub band: usize,
    pub a: Vec<f64>,
}

impl Workspace {
    pub fn new(k: usize, a: &ShField) -> Self {
        let la = a.degree(0.0);
        let band = 2 * la + k + 1;
        let grid = SphereGrid::new(band + 1, 2 * band + 2);
        let a_vals = grid.synthesis(a);
        Workspace {
            grid,
            band,
            a: a_vals,
        }
    }

    pub fn vals(&self, f: &ShField) -> Vec<f64> {
        self.grid.synthesis(f)
    }

    pub fn field(&self, vals: &[f64]) -> ShField {
        self.grid
            .analysis(vals, self.band)
            .expect("workspace grid resolves its band")
    }

    pub fn grad(&self, f: &ShField) -> TangentField {
        self.grid.gradient(f)
    }

    /// `a^p f`.
    pub fn mul_a(&self, f: &ShField, p: i32) -> ShField {
        let v: Vec<f64> = self
            .vals(f)
            .iter()
            .zip(&self.a)
            .map(|(x, a)| x * a.powi(p))
            .collect();
        self.field(&v)
    }

    /// `div(a^p ∇f)`.
    pub fn div_a_grad(&self, f: &ShField, p: i32) -> ShField {
        let w: Vec<f64> = self.a.iter().map(|a| a.powi(p)).collect();
        let v = self.grad(f).scaled_by(&w);
        self.grid
            .divergence(&v, self.band)
            .expect("workspace grid resolves its band")
    }

    /// `∫ w ∇f·∇g`.
    pub fn grad_form(&self, f: &ShField, g: &ShField, w: &[f64]) -> f64 {
        let d = self.grad(f).dot(&self.grad(g));
        let v: Vec<f64> = d.iter().zip(w).map(|(a, b)| a * b).collect();
        self.grid.integrate(&v)
    }

    /// `∫ w f g`.
    pub fn form(&self, f: &ShField, g: &ShField, w: &[f64]) -> f64 {
        let (fv, gv) = (self.vals(f), self.vals(g));
        let v: Vec<f64> = (0..fv.len()).map(|i| fv[i] * gv[i] * w[i]).collect();
        self.grid.integrate(&v)
    }

    /// `a^p` at the nodes.
    pub fn a_pow(&self, p: i32) -> Vec<f64> {
        self.a.iter().map(|a| a.powi(p)).collect()
    }
}

/// The first-order form on the eigenspace of degree `k` and its eigenbasis.
#[derive(Debug, Clone, Serialize)]
pub struct FirstOrderReport {
    pub k: usize,
    pub epsilon: f64,
    pub dimension: usize,
    /// `q₁(u_i, u_j)` in the basis `u_i = Y_{k, i−k}/√k`, row-major.
    pub q1: Vec<Vec<f64>>,
    pub q1_asymmetry: f64,
    /// `ε̇` per branch, ascending.
    pub branch_values: Vec<f64>,
    /// Branch `i` is `Σ_j coefficients[i][j] Y_{k, j−k}/√k`.
    pub coefficients: Vec<Vec<f64>>,
}

impl FirstOrderReport {
    /// Boundary trace of branch `i`.
    pub fn branch(&self, i: usize) -> ShField {
        let k = self.k;
        let mut f = ShField::zeros(k);
        for (j, c) in self.coefficients[i].iter().enumerate() {
            f.coeffs[idx(k, j as i64 - k as i64)] = c / (k as f64).sqrt();
        }
        f
    }

    /// Branch with the largest overlap with `Y_{k,m}`.
    pub fn branch_along(&self, m: i64) -> usize {
        let j = (m + self.k as i64) as usize;
        (0..self.dimension)
            .max_by(|&a, &b| {
                self.coefficients[a][j]
                    .abs()
                    .total_cmp(&self.coefficients[b][j].abs())
            })
            .unwrap_or(0)
    }
}

/// `q₁(u, v) = (ε + 1)[−⟨∇u, a∇v⟩ + ε⟨∂ₙu, a ∂ₙv⟩]`.
pub(crate) fn q1_form(ws: &Workspace, k: usize, eps: f64, u: &ShField, v: &ShField) -> f64 {
    let kf = k as f64;
    (eps + 1.0) * (-ws.grad_form(u, v, &ws.a) + eps * kf * kf * ws.form(u, v, &ws.a))
}

/// Eigen-decomposition of a symmetric matrix with tied eigenvalues resolved
/// canonically: inside a cluster the basis is obtained by projecting the
/// unit vectors `e_1, e_2, …` onto the eigenspace in order and
/// orthonormalising. Each vector's largest entry is made positive.
pub(crate) fn canonical_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = m.nrows();
    let (vals, vecs) = linalg::symmetric_eigen_sorted(m.clone());
    let scale = vals.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let mut out_vals = Vec::with_capacity(d);
    let mut out_vecs: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && vals[end] - vals[end - 1] <= TIE_TOLERANCE * scale {
            end += 1;
        }
        let cluster: Vec<Vec<f64>> = (start..end)
            .map(|c| vecs.column(c).iter().cloned().collect())
            .collect();
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let mut chosen: Vec<Vec<f64>> = Vec::new();
        for e in 0..d {
            if chosen.len() == cluster.len() {
                break;
            }
            // projection of e onto the cluster span
            let mut v = vec![0.0; d];
            for q in &cluster {
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi += q[e] * qi;
                }
            }
            for c in &chosen {
                let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= dot * ci;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                chosen.push(v.iter().map(|x| x / norm).collect());
            }
        }
        for mut v in chosen {
            let big = v
                .iter()
                .cloned()
                .fold(0.0f64, |b, x| if x.abs() > b.abs() + 1e-12 { x } else { b });
            if big < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            out_vals.push(mean);
            out_vecs.push(v);
        }
        start = end;
    }
    (out_vals, out_vecs)
}

/// First-order splitting of the degree-`k` ball eigenvalue under the shape `a`.
pub fn q1_matrix(k: usize, a: &ShField) -> Result<FirstOrderReport> {
    let (eps, dim) = ball_spectrum(k).map_err(|_| Error::Input {
        origin: Q1,
        reason: "degree k must be at least 1".into(),
    })?;
    let ws = Workspace::new(k, a);
    let kf = k as f64;
    let basis: Vec<ShField> = (0..dim)
        .map(|j| ShField::basis(k, k, j as i64 - k as i64, 1.0 / kf.sqrt()))
        .collect();
    let q = DMatrix::from_fn(dim, dim, |i, j| q1_form(&ws, k, eps, &basis[i], &basis[j]));
    let asym = (&q - q.transpose()).amax() / q.amax().max(f64::MIN_POSITIVE);
    let (values, vectors) = canonical_eigen(&linalg::symmetric_part(&q));
    Ok(FirstOrderReport {
        k,
        epsilon: eps,
        dimension: dim,
        q1: (0..dim).map(|i| q.row(i).iter().cloned().collect()).collect(),
        q1_asymmetry: if q.amax() == 0.0 { 0.0 } else { asym },
        branch_values: values,
        coefficients: vectors,
    })
}

/// Boundary traces of `u̇₋` and `u̇₊` for one branch.
#[derive(Debug, Clone, Serialize)]
pub struct UdotSolution {
    pub branch: usize,
    /// Trace of `u̇₋`; its degree-`k` part is zero (gauge).
    pub minus: ShField,
    pub plus: ShField,
    /// Jump data `u̇₋ − u̇₊ = F`.
    pub f: ShField,
    /// Flux data `ε ∂ₙu̇₋ + ∂ₙu̇₊ = G`.
    pub g: ShField,
    /// `max_m |G_{k,m} − (k + 1) F_{k,m}|`.
    pub compatibility_residual: f64,
    /// Residual of both transmission equations after the solve.
    pub equation_residual: f64,
    pub gauge: &'static str,
}

/// Solve the transmission problem for `u̇` mode by mode.
///
/// `F = −(ε + 1) a ∂ₙu` and `G = −ε̇ ∂ₙu + (ε + 1) div(a∇u)`. Off the
/// resonant degree the 2×2 system is invertible; at degree `k` it is solvable
/// only if `⟨G, w⟩ = ε⟨F, ∂ₙw⟩` for all `w` in the eigenspace, which holds
/// exactly when `u` diagonalises `q₁`.
pub fn solve_udot(report: &FirstOrderReport, branch: usize, a: &ShField) -> Result<UdotSolution> {
    let (k, eps) = (report.k, report.epsilon);
    let epsdot = report.branch_values[branch];
    let ws = Workspace::new(k, a);
    let u = report.branch(branch);
    let du = u.scale(k as f64);
    let f = ws.mul_a(&du, 1).scale(-(eps + 1.0));
    let g = du
        .scale(-epsdot)
        .axpy(eps + 1.0, &ws.div_a_grad(&u, 1))
        .with_l_max(ws.band);
    let f = f.with_l_max(ws.band);
    let mut minus = ShField::zeros(ws.band);
    let mut plus = ShField::zeros(ws.band);
    let mut compat = 0.0f64;
    for l in 0..=ws.band {
        let lf = l as f64;
        for m in -(l as i64)..=l as i64 {
            let (fl, gl) = (f.get(l, m), g.get(l, m));
            let i = idx(l, m);
            if l == k {
                compat = compat.max((gl - (lf + 1.0) * fl).abs());
                plus.coeffs[i] = -fl;
            } else {
                let phi = (gl - (lf + 1.0) * fl) / (eps * lf - (lf + 1.0));
                minus.coeffs[i] = phi;
                plus.coeffs[i] = phi - fl;
            }
        }
    }
    if compat > COMPATIBILITY_TOLERANCE {
        return Err(Error::Splitting {
            origin: UDOT,
            branch,
            residual: compat,
        });
    }
    let jump = minus.axpy(-1.0, &plus).axpy(-1.0, &f).norm();
    let flux = minus
        .map_degree(|l| eps * l as f64)
        .axpy(1.0, &plus.map_degree(|l| -(l as f64 + 1.0)))
        .axpy(-1.0, &g)
        .norm();
    Ok(UdotSolution {
        branch,
        minus,
        plus,
        f,
        g,
        compatibility_residual: compat,
        equation_residual: jump.max(flux),
        gauge: "zeroE",
    })
}

/// Second derivative of one branch.
#[derive(Debug, Clone, Serialize)]
pub struct SecondOrderReport {
    pub branch: usize,
    pub epsddot: f64,
    /// Contributions of the six terms; `ε̈ = 2 Σ lines`.
    pub lines: [f64; 6],
    /// `|ε̈(u̇) − ε̈(u̇ + w)|` for a fixed eigenspace element `w`.
    pub gauge_residual: f64,
    /// `ε̈` from the second-order compatibility condition instead.
    pub compatibility_route: f64,
}

fn six_lines(
    ws: &Workspace,
    report: &FirstOrderReport,
    branch: usize,
    udot_minus: &ShField,
    geo: SphereGeometry,
) -> [f64; 6] {
    let (k, eps) = (report.k, report.epsilon);
    let epsdot = report.branch_values[branch];
    let u = report.branch(branch);
    let du = u.scale(k as f64);
    let dudot = udot_minus.map_degree(|l| l as f64);
    let a = &ws.a;
    let a2 = ws.a_pow(2);
    let w1: Vec<f64> = a
        .iter()
        .zip(&a2)
        .map(|(a, a2)| -epsdot * a - (eps + 1.0) * a2 * geo.weingarten_trace_free)
        .collect();
    let w5: Vec<f64> = a
        .iter()
        .map(|a| a * eps * (epsdot + (eps + 1.0) * a * geo.mean_curvature))
        .collect();
    let ones = vec![1.0; a.len()];
    [
        ws.grad_form(&u, &u, &w1),
        (eps * eps - 1.0) * ws.grad_form(&u, &ws.mul_a(&du, 1), a),
        -(eps + 1.0) * ws.grad_form(&u, udot_minus, a),
        -epsdot * ws.form(&u, &dudot, &ones),
        ws.form(&du, &du, &w5),
        eps * (eps + 1.0) * ws.form(&du, &dudot, a),
    ]
}

/// `ε̈` from the solvability of the second-order transmission problem,
/// `ε̈ = ⟨G₂, u⟩ − ε⟨F₂, ∂ₙu⟩` with the ε̈-free parts
///
/// `F₂ = −(ε + 1) a (2P₁u + Q₁∂ₙu + 2∂ₙu̇₋) − 2ε̇ a ∂ₙu`,
/// `G₂ = −2ε̇ (P₁u + ∂ₙu̇₋) − (ε + 1)[(P₂ − 2Q₁P₁)u + 2P₁(a∂ₙu) + 2P₁u̇₋]`,
///
/// where `P₁ = −div(a∇·)`, `Q₁ = 2aH` and, on the unit sphere,
/// `P₂f = 2a²Δf + 2 div(a²∇f)`.
fn compatibility_epsddot(
    ws: &Workspace,
    report: &FirstOrderReport,
    branch: usize,
    udot_minus: &ShField,
    geo: SphereGeometry,
) -> f64 {
    let (k, eps) = (report.k, report.epsilon);
    let epsdot = report.branch_values[branch];
    let u = report.branch(branch);
    let du = u.scale(k as f64);
    let dudot = udot_minus.map_degree(|l| l as f64);
    let h = geo.mean_curvature;
    let p1 = |f: &ShField| ws.div_a_grad(f, 1).scale(-1.0);
    let q1 = |f: &ShField| ws.mul_a(f, 1).scale(2.0 * h);
    let p2 = |f: &ShField| {
        ws.mul_a(&f.laplacian(), 2)
            .scale(2.0)
            .axpy(2.0, &ws.div_a_grad(f, 2))
    };
    let p1u = p1(&u);
    let inner = p1u.scale(2.0).axpy(1.0, &q1(&du)).axpy(2.0, &dudot);
    let f2 = ws
        .mul_a(&inner, 1)
        .scale(-(eps + 1.0))
        .axpy(-2.0 * epsdot, &ws.mul_a(&du, 1));
    let bracket = p2(&u)
        .axpy(-2.0, &q1(&p1u))
        .axpy(2.0, &p1(&ws.mul_a(&du, 1)))
        .axpy(2.0, &p1(udot_minus));
    let g2 = p1u
        .axpy(1.0, &dudot)
        .scale(-2.0 * epsdot)
        .axpy(-(eps + 1.0), &bracket);
    g2.with_l_max(ws.band).dot(&u.with_l_max(ws.band))
        - eps * f2.with_l_max(ws.band).dot(&du.with_l_max(ws.band))
}

/// Second derivative of the branch eigenvalue.
pub fn epsddot(
    report: &FirstOrderReport,
    branch: usize,
    a: &ShField,
    udot: &UdotSolution,
    geo: SphereGeometry,
) -> SecondOrderReport {
    let ws = Workspace::new(report.k, a);
    let lines = six_lines(&ws, report, branch, &udot.minus, geo);
    let value = 2.0 * lines.iter().sum::<f64>();
    // shift u̇₋ by a fixed element of the eigenspace
    let k = report.k;
    let mut w = ShField::zeros(k);
    for (j, m) in (-(k as i64)..=k as i64).enumerate() {
        w.coeffs[idx(k, m)] = 0.3 + 0.7 * j as f64;
    }
    let shifted = udot.minus.axpy(1.0, &w);
    let other = 2.0 * six_lines(&ws, report, branch, &shifted, geo).iter().sum::<f64>();
    SecondOrderReport {
        branch,
        epsddot: value,
        lines,
        gauge_residual: (value - other).abs(),
        compatibility_route: compatibility_epsddot(&ws, report, branch, &udot.minus, geo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracles;
    use std::f64::consts::PI;

    fn y20() -> ShField {
        ShField::basis(2, 2, 0, 1.0)
    }

    #[test]
    fn uniform_shift_gives_zero_form() {
        for k in 1..=3 {
            let r = q1_matrix(k, &ShField::constant(1.0)).unwrap();
            let norm: f64 = r.q1.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm < 1e-12, "k={k} {norm:e}");
        }
    }

    #[test]
    fn axisymmetric_shape_is_diagonal_in_xyz() {
        let r = q1_matrix(1, &y20()).unwrap();
        // basis order m = −1, 0, 1 is y, z, x
        assert!(r.q1[0][1].abs() < 1e-13 && r.q1[0][2].abs() < 1e-13 && r.q1[1][2].abs() < 1e-13);
        assert!((r.q1[0][0] - r.q1[2][2]).abs() < 1e-13);
        let z = r.branch_along(0);
        let exact = 36.0 / 5.0 * (5.0 / (16.0 * PI)).sqrt();
        assert!((r.branch_values[z] - exact).abs() < 1e-12);
        let direct = oracles::ball_z_branch_epsdot(
            |_, _, z| (5.0 / (16.0 * PI)).sqrt() * (3.0 * z * z - 1.0),
            16,
        );
        assert!((r.branch_values[z] - direct).abs() < 1e-12);
    }

    #[test]
    fn canonical_ties_are_deterministic() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let (v, e) = canonical_eigen(&m);
        assert_eq!(v, vec![1.0, 1.0, 2.0]);
        assert_eq!(e[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(e[1], vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn uniform_shift_has_trivial_udot() {
        let a = ShField::constant(1.0);
        let r = q1_matrix(1, &a).unwrap();
        let s = solve_udot(&r, r.branch_along(0), &a).unwrap();
        assert!(s.minus.norm() < 1e-13);
        // F = −3z/… and G = −6z/… in the normalisation u = z·c
        let u = r.branch(r.branch_along(0));
        assert!(s.f.axpy(3.0, &u).norm() < 1e-12);
        assert!(s.g.axpy(6.0, &u).norm() < 1e-12);
        let e = epsddot(&r, 0, &a, &s, SphereGeometry::UNIT);
        assert!(e.epsddot.abs() < 1e-11);
    }

    #[test]
    fn selection_rules_for_y20() {
        let a = y20();
        let r = q1_matrix(1, &a).unwrap();
        let s = solve_udot(&r, r.branch_along(0), &a).unwrap();
        for l in 0..=s.f.l_max {
            for m in -(l as i64)..=l as i64 {
                if !(m == 0 && (l == 1 || l == 3)) {
                    assert!(s.f.get(l, m).abs() < 1e-13 && s.g.get(l, m).abs() < 1e-13);
                }
            }
        }
        assert!(s.f.get(3, 0).abs() > 1e-3 && s.g.get(3, 0).abs() > 1e-3);
        assert!(s.equation_residual < 1e-12);
    }

    #[test]
    fn non_diagonalising_branch_is_refused() {
        let a = ShField::basis(2, 2, 1, 1.0);
        let mut r = q1_matrix(1, &a).unwrap();
        r.coefficients[0] = vec![0.0, 1.0, 0.0];
        assert!(matches!(
            solve_udot(&r, 0, &a),
            Err(Error::Splitting { branch: 0, .. })
        ));
    }

    #[test]
    fn translation_oracle() {
        // a = z moves the ball rigidly up to a second-order shape correction
        let a = ShField::basis(1, 1, 0, (4.0 * PI / 3.0).sqrt());
        let r = q1_matrix(1, &a).unwrap();
        let b = r.branch_along(0);
        assert!(r.branch_values.iter().all(|v| v.abs() < 1e-13));
        let s = solve_udot(&r, b, &a).unwrap();
        let e = epsddot(&r, b, &a, &s, SphereGeometry::UNIT);
        assert!((e.epsddot + 12.0 / 5.0).abs() < 1e-11, "{}", e.epsddot);
        assert!((e.compatibility_route - e.epsddot).abs() < 1e-11);
    }

    #[test]
    fn routes_agree_and_gauge_is_irrelevant() {
        for a in [y20(), ShField::basis(3, 3, -2, 0.7).axpy(0.4, &ShField::basis(1, 1, 1, 1.0))] {
            for k in 1..=2 {
                let r = q1_matrix(k, &a).unwrap();
                for b in 0..r.dimension {
                    let s = solve_udot(&r, b, &a).unwrap();
                    let e = epsddot(&r, b, &a, &s, SphereGeometry::UNIT);
                    assert!(e.gauge_residual < 1e-10, "{:e}", e.gauge_residual);
                    assert!(
                        (e.compatibility_route - e.epsddot).abs() < 1e-10,
                        "k={k} b={b}: {} vs {}",
                        e.compatibility_route,
                        e.epsddot
                    );
                }
            }
        }
    }
}
