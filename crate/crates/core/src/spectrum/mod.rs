//! Plasmonic eigenvalues of a plane domain.
//!
//! A plasmon is a harmonic function, continuous across `∂Ω`, with
//! `∂ₙu₊ = −ε ∂ₙu₋`. With `g = u|∂Ω` this reads `(ε N₋ + N₊) g = 0`. Both
//! DtN operators vanish on constants, so the problem is posed on mean-zero
//! boundary data, where `N₋ > 0` and `−N₊ > 0`.
//!
//! Two routes are provided: [`solve_plasmonic`] works with the DtN pencil,
//! [`np_route`] with the Neumann–Poincaré operator `K*`. With `g = Sφ` the
//! pencil becomes `(ε(K* − ½) + K* + ½)φ = 0`, so an eigenvalue `λ` of `K*` on
//! mean-zero densities gives `ε = (1 + 2λ)/(1 − 2λ)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bem::{single_layer_matrix, DtNPair};
use crate::error::{Error, Origin, Result};
use crate::linalg;

const SOLVE: Origin = Origin::new("spectrum2d", "solve_plasmonic");
const NP: Origin = Origin::new("spectrum2d", "np_route");
const RAYLEIGH: Origin = Origin::new("spectrum2d", "rayleigh");

/// Eigenvalues with `k` beyond this index form the tail in clustering stats.
pub const TAIL_START: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Dtn,
    Np,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::Dtn => "dtn",
            Route::Np => "np",
        })
    }
}

/// `|ε_k − 1|` statistics over `k > TAIL_START` (`None` if there is no tail).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringStats {
    pub tail_mean: Option<f64>,
    pub tail_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PlasmonicSpectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Node vectors normalised by `⟨g, N₋g⟩ = 1`, aligned with `eigenvalues`.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub route: Route,
    /// `‖(ε N₋ + N₊) g‖` in the weighted norm.
    pub residuals: Vec<f64>,
    pub clustering: ClusteringStats,
    /// Whether an `ε = ∞` eigenspace (constant interior plasmon) exists.
    /// Never the case in two dimensions.
    pub e_infinity: bool,
}

impl PlasmonicSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvalues ordered by decreasing `|ε − 1|`: `ε_1, ε_2, …`.
    pub fn by_distance_from_one(&self) -> Vec<f64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| (b - 1.0).abs().total_cmp(&(a - 1.0).abs()));
        v
    }
}

/// Weighted `L²` norm.
fn wnorm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt()
}

pub(crate) fn residual(dtn: &DtNPair, eps: f64, g: &[f64]) -> f64 {
    let a = dtn.nminus.apply(g);
    let b = dtn.nplus.apply(g);
    let r: Vec<f64> = a.iter().zip(&b).map(|(x, y)| eps * x + y).collect();
    wnorm(&r, &dtn.sample.weights)
}

/// Clustering statistics of a list ordered by decreasing `|ε − 1|`.
pub fn clustering_stats(ordered: &[f64]) -> ClusteringStats {
    let tail: Vec<f64> = ordered
        .iter()
        .skip(TAIL_START)
        .map(|e| (e - 1.0).abs())
        .collect();
    if tail.is_empty() {
        return ClusteringStats {
            tail_mean: None,
            tail_max: None,
        };
    }
    ClusteringStats {
        tail_mean: Some(tail.iter().sum::<f64>() / tail.len() as f64),
        tail_max: Some(tail.iter().cloned().fold(0.0, f64::max)),
    }
}

/// Keep the `num` pairs farthest from 1, then sort ascending by ε.
fn select(mut pairs: Vec<(f64, Vec<f64>)>, num: usize) -> Vec<(f64, Vec<f64>)> {
    pairs.sort_by(|a, b| (b.0 - 1.0).abs().total_cmp(&(a.0 - 1.0).abs()));
    pairs.truncate(num);
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

fn assemble(dtn: &DtNPair, pairs: Vec<(f64, Vec<f64>)>, route: Route) -> PlasmonicSpectrum {
    let ordered: Vec<f64> = {
        let mut v: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        v.sort_by(|a, b| (b - 1.0).abs().total_cmp(&(a - 1.0).abs()));
        v
    };
    let residuals = pairs.iter().map(|(e, g)| residual(dtn, *e, g)).collect();
    let (eigenvalues, eigenfunctions) = pairs.into_iter().unzip();
    PlasmonicSpectrum {
        eigenvalues,
        eigenfunctions,
        route,
        residuals,
        clustering: clustering_stats(&ordered),
        e_infinity: false,
    }
}

fn check_num(dtn: &DtNPair, num: usize, origin: Origin) -> Result<()> {
    if num == 0 || num > dtn.len() / 2 {
        return Err(Error::Input {
            origin,
            reason: format!("num = {num} must lie in 1..={}", dtn.len() / 2),
        });
    }
    Ok(())
}

/// The `num` eigenpairs of `(ε N₋ + N₊) g = 0` with `ε` farthest from 1.
///
/// Constants are deflated with a weighted-orthonormal basis `P` of the
/// mean-zero subspace. On it `B = −Pᵀ W N₊ P` is positive definite and
/// `A = −N₊⁻¹N₋` is symmetric in `(·,·)₊`; the pencil is reduced with the
/// Cholesky factor of `B` to a standard symmetric problem for `1/ε`.
pub fn solve_plasmonic(dtn: &DtNPair, num: usize) -> Result<PlasmonicSpectrum> {
    check_num(dtn, num, SOLVE)?;
    let w = &dtn.sample.weights;
    let n = w.len();
    let p = linalg::mean_zero_basis(w);
    let wmat = DMatrix::from_diagonal(&DVector::from_column_slice(w));
    let mminus = linalg::symmetric_part(&(&wmat * &dtn.nminus.matrix));
    let mplus = linalg::symmetric_part(&(&wmat * &dtn.nplus.matrix));
    let c = p.transpose() * mminus * &p;
    let b = -(p.transpose() * mplus * &p);
    let chol = b.cholesky().ok_or_else(|| Error::Assembly {
        origin: SOLVE,
        reason: "exterior DtN is not negative definite on mean-zero data".into(),
    })?;
    let l = chol.l();
    // L⁻¹ C L⁻ᵀ
    let linv_c = l.solve_lower_triangular(&c).ok_or_else(|| Error::Assembly {
        origin: SOLVE,
        reason: "singular Cholesky factor".into(),
    })?;
    let reduced = l
        .solve_lower_triangular(&linv_c.transpose())
        .expect("factor already inverted once");
    let (mu, y) = linalg::symmetric_eigen_sorted(linalg::symmetric_part(&reduced));
    let lt = l.transpose();
    let pairs: Vec<(f64, Vec<f64>)> = mu
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let x = lt
                .solve_upper_triangular(&y.column(i).into_owned())
                .expect("nonsingular factor");
            let g = (&p * x) / m.max(f64::MIN_POSITIVE).sqrt();
            (1.0 / m, g.as_slice().to_vec())
        })
        .collect();
    debug_assert_eq!(pairs.len(), n - 1);
    Ok(assemble(dtn, select(pairs, num), Route::Dtn))
}

/// The same spectrum from the eigenvalues of `K*` on mean-zero densities.
///
/// Eigenvalues come from a general (nonsymmetric) eigen-solve of the
/// restricted `K*`. Eigenfunctions use that `K*` is self-adjoint for the
/// positive form `−⟨φ, Sψ⟩` on mean-zero densities, and are returned as
/// boundary values `g = Sφ`.
pub fn np_route(dtn: &DtNPair, num: usize) -> Result<PlasmonicSpectrum> {
    check_num(dtn, num, NP)?;
    let w = &dtn.sample.weights;
    let p = linalg::mean_zero_basis(w);
    let wmat = DMatrix::from_diagonal(&DVector::from_column_slice(w));
    // mean-zero densities are spanned by the columns of P; PᵀW is a left inverse
    let kr = p.transpose() * &wmat * &dtn.kstar.matrix * &p;
    let mut lambdas: Vec<f64> = kr
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .collect();
    lambdas.sort_by(|a, b| a.total_cmp(b));
    if let Some(l) = lambdas.iter().find(|l| (*l - 0.5).abs() < 1e-8) {
        return Err(Error::Degeneracy {
            origin: NP,
            reason: format!("K* eigenvalue {l} at 1/2 on mean-zero densities"),
        });
    }

    let s = single_layer_matrix(&dtn.sample);
    let gram = -linalg::symmetric_part(&(p.transpose() * &wmat * &s * &p));
    let chol = gram.clone().cholesky().ok_or_else(|| Error::Assembly {
        origin: NP,
        reason: "single layer is not negative definite on mean-zero densities".into(),
    })?;
    let l = chol.l();
    let gk = linalg::symmetric_part(&(&gram * &kr));
    let t = l.solve_lower_triangular(&gk).expect("nonsingular factor");
    let reduced = l
        .solve_lower_triangular(&t.transpose())
        .expect("nonsingular factor");
    let (_, y) = linalg::symmetric_eigen_sorted(linalg::symmetric_part(&reduced));
    let lt = l.transpose();
    let pairs: Vec<(f64, Vec<f64>)> = lambdas
        .iter()
        .enumerate()
        .map(|(i, &lam)| {
            let x = lt
                .solve_upper_triangular(&y.column(i).into_owned())
                .expect("nonsingular factor");
            let phi = &p * x;
            let g = (&s * phi).as_slice().to_vec();
            let norm = dtn.nminus.form(&g, &g).sqrt();
            let g = g.iter().map(|v| v / norm).collect();
            ((1.0 + 2.0 * lam) / (1.0 - 2.0 * lam), g)
        })
        .collect();
    Ok(assemble(dtn, select(pairs, num), Route::Np))
}

/// `−⟨g, N₊g⟩ / ⟨g, N₋g⟩`, the plasmonic eigenvalue as an energy ratio.
///
/// Fails with [`Error::InfiniteEigenvalue`] when `g` is (numerically)
/// constant, so that the interior energy vanishes.
pub fn rayleigh(g: &[f64], dtn: &DtNPair) -> Result<f64> {
    let den = dtn.nminus.form(g, g);
    let w = &dtn.sample.weights;
    let mean = dtn.sample.integrate(g) / dtn.sample.perimeter();
    let centred: Vec<f64> = g.iter().map(|v| v - mean).collect();
    let mass = wnorm(&centred, w).powi(2);
    // lowest nonzero DtN eigenvalue is ~ 2π / perimeter
    let floor = 1e-10 * wnorm(g, w).powi(2) * 2.0 * std::f64::consts::PI / dtn.sample.perimeter();
    if den <= floor || mass <= 1e-20 * wnorm(g, w).powi(2) {
        return Err(Error::InfiniteEigenvalue { origin: RAYLEIGH });
    }
    Ok(-dtn.nplus.form(g, g) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::build_dtn;
    use crate::curve::{sample_curve, CurveParam};

    fn dtn(curve: CurveParam, n: usize) -> DtNPair {
        build_dtn(&sample_curve(&curve, n).unwrap()).unwrap()
    }

    #[test]
    fn disk_has_only_unit_eigenvalues() {
        let d = dtn(CurveParam::circle(1.0), 64);
        let s = solve_plasmonic(&d, 20).unwrap();
        assert_eq!(s.len(), 20);
        assert!(s.eigenvalues.iter().all(|e| (e - 1.0).abs() < 1e-10));
        assert!(!s.e_infinity);
    }

    #[test]
    fn eigenfunctions_are_normalised_and_plus_orthogonal() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 64);
        let s = solve_plasmonic(&d, 12).unwrap();
        for (i, gi) in s.eigenfunctions.iter().enumerate() {
            assert!((d.nminus.form(gi, gi) - 1.0).abs() < 1e-10);
            for (j, gj) in s.eigenfunctions.iter().enumerate().skip(i + 1) {
                if (s.eigenvalues[i] - s.eigenvalues[j]).abs() > 1e-6 {
                    assert!(d.nplus.form(gi, gj).abs() < 1e-8);
                }
            }
        }
        assert!(s.residuals.iter().all(|r| *r < 1e-8));
        assert!(s.eigenvalues.iter().all(|e| *e > 0.0));
    }

    #[test]
    fn selection_keeps_extremes() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 64);
        let s = solve_plasmonic(&d, 2).unwrap();
        // ε = tanh ξ₀ = 1/2 and coth ξ₀ = 2
        assert!((s.eigenvalues[0] - 0.5).abs() < 1e-10);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_counts() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 16);
        assert!(matches!(solve_plasmonic(&d, 0), Err(Error::Input { .. })));
        assert!(matches!(solve_plasmonic(&d, 9), Err(Error::Input { .. })));
    }

    #[test]
    fn rayleigh_on_constants_signals_infinite_branch() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 32);
        assert!(matches!(
            rayleigh(&[3.0; 32], &d),
            Err(Error::InfiniteEigenvalue { .. })
        ));
    }

    #[test]
    fn rayleigh_of_mixture_lies_between() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 64);
        let s = solve_plasmonic(&d, 4).unwrap();
        let g: Vec<f64> = s.eigenfunctions[0]
            .iter()
            .zip(&s.eigenfunctions[3])
            .map(|(a, b)| a + b)
            .collect();
        let r = rayleigh(&g, &d).unwrap();
        assert!(r > s.eigenvalues[0] && r < s.eigenvalues[3]);
    }

    #[test]
    fn np_route_on_ellipse() {
        let d = dtn(CurveParam::ellipse(2.0, 1.0), 64);
        let a = solve_plasmonic(&d, 6).unwrap();
        let b = np_route(&d, 6).unwrap();
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() < 1e-10, "{x} {y}");
        }
        assert!(b.residuals.iter().all(|r| *r < 1e-8), "{:?}", b.residuals);
    }
}
