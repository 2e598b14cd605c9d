//! Real spherical harmonics on the unit sphere.
//!
//! `Y_{l,m}` are orthonormal in `L²(S²)` without the Condon–Shortley phase:
//! `Y_{l,0} = P̄_{l,0}(cos θ)`, `Y_{l,m} = √2 P̄_{l,m} cos(mφ)` and
//! `Y_{l,−m} = √2 P̄_{l,m} sin(mφ)` for `m > 0`, where `P̄` is the associated
//! Legendre function scaled so that `2π ∫ P̄² dx = 1`.
//!
//! Fields live either as coefficients ([`ShField`]) or as values on a
//! Gauss–Legendre(cos θ) × uniform(φ) grid ([`SphereGrid`]). With `n_θ`
//! polar nodes and `n_φ` azimuthal nodes the grid integrates band-limited
//! functions of degree `≤ min(2n_θ − 1, n_φ − 1)` exactly; products are
//! formed pointwise on a grid large enough for the product's degree.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Origin, Result};
use crate::quadrature::gauss_legendre;

const ANALYSIS: Origin = Origin::new("sphere3d", "sh_analysis");
const DIVERGENCE: Origin = Origin::new("sphere3d", "surface_divergence");
const BALL: Origin = Origin::new("sphere3d", "ball_spectrum");

/// Position of `(l, m)` in a coefficient vector.
pub fn idx(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of coefficients up to degree `l_max`.
pub fn n_coeffs(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Coefficients of a real band-limited function on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShFieldJson", into = "ShFieldJson")]
pub struct ShField {
    pub l_max: usize,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShCoeff {
    l: usize,
    m: i64,
    c: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShFieldJson {
    #[serde(rename = "L")]
    l_max: usize,
    coeffs: Vec<ShCoeff>,
}

impl TryFrom<ShFieldJson> for ShField {
    type Error = String;
    fn try_from(j: ShFieldJson) -> std::result::Result<Self, String> {
        let mut f = ShField::zeros(j.l_max);
        for c in j.coeffs {
            if c.l > j.l_max || c.m.unsigned_abs() as usize > c.l {
                return Err(format!("coefficient (l={}, m={}) outside band limit {}", c.l, c.m, j.l_max));
            }
            f.coeffs[idx(c.l, c.m)] += c.c;
        }
        Ok(f)
    }
}

impl From<ShField> for ShFieldJson {
    fn from(f: ShField) -> Self {
        let mut coeffs = Vec::new();
        for l in 0..=f.l_max {
            for m in -(l as i64)..=l as i64 {
                let c = f.get(l, m);
                if c != 0.0 {
                    coeffs.push(ShCoeff { l, m, c });
                }
            }
        }
        ShFieldJson {
            l_max: f.l_max,
            coeffs,
        }
    }
}

impl ShField {
    pub fn zeros(l_max: usize) -> Self {
        ShField {
            l_max,
            coeffs: vec![0.0; n_coeffs(l_max)],
        }
    }

    /// The single harmonic `c·Y_{l,m}`.
    pub fn basis(l_max: usize, l: usize, m: i64, c: f64) -> Self {
        let mut f = Self::zeros(l_max.max(l));
        f.coeffs[idx(l, m)] = c;
        f
    }

    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Self::basis(0, 0, 0, c * (4.0 * PI).sqrt())
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.l_max {
            0.0
        } else {
            self.coeffs[idx(l, m)]
        }
    }

    /// Same function with coefficient storage up to `l_max` (truncating above).
    pub fn with_l_max(&self, l_max: usize) -> Self {
        let mut f = Self::zeros(l_max);
        let n = n_coeffs(l_max.min(self.l_max));
        f.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        f
    }

    /// Highest degree carrying a coefficient above `tol`.
    pub fn degree(&self, tol: f64) -> usize {
        (0..=self.l_max)
            .rev()
            .find(|&l| (-(l as i64)..=l as i64).any(|m| self.get(l, m).abs() > tol))
            .unwrap_or(0)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `L²(S²)` inner product.
    pub fn dot(&self, other: &ShField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        ShField {
            l_max: self.l_max,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `self + s·other`, on the larger band limit.
    pub fn axpy(&self, s: f64, other: &ShField) -> Self {
        let l_max = self.l_max.max(other.l_max);
        let mut out = self.with_l_max(l_max);
        for (o, c) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o += s * c;
        }
        out
    }

    /// Apply a multiplier depending on the degree.
    pub fn map_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for l in 0..=self.l_max {
            let s = f(l);
            for m in -(l as i64)..=l as i64 {
                out.coeffs[idx(l, m)] *= s;
            }
        }
        out
    }

    /// Component in the span of the degree-`l` harmonics.
    pub fn degree_part(&self, l: usize) -> Self {
        self.map_degree(|d| if d == l { 1.0 } else { 0.0 })
    }

    /// Laplace–Beltrami operator.
    pub fn laplacian(&self) -> Self {
        self.map_degree(|l| -((l * (l + 1)) as f64))
    }

    /// Point evaluation at polar angle `theta`, azimuth `phi`.
    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (x, s) = (theta.cos(), theta.sin());
        let p = legendre_table(self.l_max, x, s);
        let mut v = 0.0;
        for l in 0..=self.l_max {
            v += self.get(l, 0) * p[tri(l, 0)];
            for m in 1..=l {
                let (sm, cm) = (m as f64 * phi).sin_cos();
                let pl = std::f64::consts::SQRT_2 * p[tri(l, m)];
                v += pl * (self.get(l, m as i64) * cm + self.get(l, -(m as i64)) * sm);
            }
        }
        v
    }
}

fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `P̄_{l,m}(x)` for `0 ≤ m ≤ l ≤ l_max`, with `s = √(1 − x²)`.
fn legendre_table(l_max: usize, x: f64, s: f64) -> Vec<f64> {
    let mut p = vec![0.0; tri(l_max, l_max) + 1];
    p[0] = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[tri(m - 1, m - 1)];
        }
        if m < l_max {
            p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[tri(m, m)];
        }
        for l in m + 2..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    p
}

/// `dP̄_{l,m}(cos θ)/dθ` from the table of `legendre_table`.
fn legendre_dtheta(l_max: usize, x: f64, s: f64, p: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; p.len()];
    for l in 0..=l_max {
        for m in 0..=l {
            let (lf, mf) = (l as f64, m as f64);
            let mut v = lf * x * p[tri(l, m)];
            if l > m {
                let c = ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf - mf) * (lf + mf)).sqrt();
                v -= c * p[tri(l - 1, m)];
            }
            d[tri(l, m)] = v / s;
        }
    }
    d
}

/// A tangent vector field by its `θ̂` and `φ̂` components at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl TangentField {
    /// Pointwise inner product.
    pub fn dot(&self, other: &TangentField) -> Vec<f64> {
        (0..self.theta.len())
            .map(|i| self.theta[i] * other.theta[i] + self.phi[i] * other.phi[i])
            .collect()
    }

    /// Pointwise multiplication by a scalar field.
    pub fn scaled_by(&self, f: &[f64]) -> TangentField {
        TangentField {
            theta: self.theta.iter().zip(f).map(|(a, b)| a * b).collect(),
            phi: self.phi.iter().zip(f).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn add(&self, other: &TangentField) -> TangentField {
        TangentField {
            theta: self.theta.iter().zip(&other.theta).map(|(a, b)| a + b).collect(),
            phi: self.phi.iter().zip(&other.phi).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Gauss–Legendre(cos θ) × uniform(φ) grid, values stored θ-major.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    /// `cos θ_i`, ascending.
    pub cos_theta: Vec<f64>,
    pub sin_theta: Vec<f64>,
    pub theta_weights: Vec<f64>,
    pub phi: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let (x, w) = gauss_legendre(n_theta);
        SphereGrid {
            n_theta,
            n_phi,
            sin_theta: x.iter().map(|x| (1.0 - x * x).sqrt()).collect(),
            cos_theta: x,
            theta_weights: w,
            phi: (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect(),
        }
    }

    /// Smallest grid integrating band-limited functions of degree `≤ degree` exactly.
    pub fn exact_for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1, degree + 1)
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of node `k = i·n_φ + j`.
    pub fn weight(&self, k: usize) -> f64 {
        self.theta_weights[k / self.n_phi] * 2.0 * PI / self.n_phi as f64
    }

    /// Highest degree whose products of pairs are integrated exactly.
    pub fn analysis_limit(&self) -> usize {
        (self.n_theta - 1).min((self.n_phi - 1) / 2)
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().enumerate().map(|(k, v)| v * self.weight(k)).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter()
            .zip(g)
            .enumerate()
            .map(|(k, (a, b))| a * b * self.weight(k))
            .sum()
    }

    /// Values of `f(x, y, z)` at the nodes.
    pub fn eval_cartesian(&self, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta {
            let (z, s) = (self.cos_theta[i], self.sin_theta[i]);
            for &p in &self.phi {
                out.push(f(s * p.cos(), s * p.sin(), z));
            }
        }
        out
    }

    /// Grid values of a coefficient field.
    pub fn synthesis(&self, f: &ShField) -> Vec<f64> {
        let l_max = f.l_max;
        let mut out = vec![0.0; self.len()];
        for i in 0..self.n_theta {
            let p = legendre_table(l_max, self.cos_theta[i], self.sin_theta[i]);
            // Fourier amplitudes in φ for this ring
            let mut a = vec![0.0; l_max + 1];
            let mut b = vec![0.0; l_max + 1];
            for l in 0..=l_max {
                a[0] += f.get(l, 0) * p[tri(l, 0)];
                for m in 1..=l {
                    let pl = std::f64::consts::SQRT_2 * p[tri(l, m)];
                    a[m] += pl * f.get(l, m as i64);
                    b[m] += pl * f.get(l, -(m as i64));
                }
            }
            for (j, &phi) in self.phi.iter().enumerate() {
                let mut v = a[0];
                for m in 1..=l_max {
                    let (sm, cm) = (m as f64 * phi).sin_cos();
                    v += a[m] * cm + b[m] * sm;
                }
                out[i * self.n_phi + j] = v;
            }
        }
        out
    }

    /// Per-ring trapezoid Fourier sums `(Σ_j f cos(mφ_j), Σ_j f sin(mφ_j))·2π/n_φ`.
    fn ring_fourier(&self, f: &[f64], i: usize, m_max: usize) -> (Vec<f64>, Vec<f64>) {
        let h = 2.0 * PI / self.n_phi as f64;
        let row = &f[i * self.n_phi..(i + 1) * self.n_phi];
        let mut c = vec![0.0; m_max + 1];
        let mut s = vec![0.0; m_max + 1];
        for (j, &phi) in self.phi.iter().enumerate() {
            for m in 0..=m_max {
                let (sm, cm) = (m as f64 * phi).sin_cos();
                c[m] += row[j] * cm * h;
                s[m] += row[j] * sm * h;
            }
        }
        (c, s)
    }

    fn check_band(&self, l_max: usize, origin: Origin) -> Result<()> {
        if self.n_theta < l_max + 1 || self.n_phi < 2 * l_max + 1 {
            return Err(Error::Shape {
                origin,
                reason: format!(
                    "grid {}x{} cannot resolve band limit {l_max} (needs n_theta >= {}, n_phi >= {})",
                    self.n_theta,
                    self.n_phi,
                    l_max + 1,
                    2 * l_max + 1
                ),
            });
        }
        Ok(())
    }

    /// Coefficients up to degree `l_max` by quadrature; exact when the
    /// values come from a field of degree `≤ l_max`.
    pub fn analysis(&self, f: &[f64], l_max: usize) -> Result<ShField> {
        self.check_band(l_max, ANALYSIS)?;
        if f.len() != self.len() {
            return Err(Error::Shape {
                origin: ANALYSIS,
                reason: format!("{} values for a grid of {}", f.len(), self.len()),
            });
        }
        let mut out = ShField::zeros(l_max);
        for i in 0..self.n_theta {
            let p = legendre_table(l_max, self.cos_theta[i], self.sin_theta[i]);
            let (c, s) = self.ring_fourier(f, i, l_max);
            let w = self.theta_weights[i];
            for l in 0..=l_max {
                out.coeffs[idx(l, 0)] += w * p[tri(l, 0)] * c[0];
                for m in 1..=l {
                    let pl = w * std::f64::consts::SQRT_2 * p[tri(l, m)];
                    out.coeffs[idx(l, m as i64)] += pl * c[m];
                    out.coeffs[idx(l, -(m as i64))] += pl * s[m];
                }
            }
        }
        Ok(out)
    }

    /// Surface gradient, evaluated analytically at the nodes.
    pub fn gradient(&self, f: &ShField) -> TangentField {
        let l_max = f.l_max;
        let mut theta = vec![0.0; self.len()];
        let mut phi_c = vec![0.0; self.len()];
        for i in 0..self.n_theta {
            let (x, s) = (self.cos_theta[i], self.sin_theta[i]);
            let p = legendre_table(l_max, x, s);
            let d = legendre_dtheta(l_max, x, s, &p);
            for (j, &phi) in self.phi.iter().enumerate() {
                let (mut gt, mut gp) = (0.0, 0.0);
                for l in 0..=l_max {
                    gt += f.get(l, 0) * d[tri(l, 0)];
                    for m in 1..=l {
                        let (sm, cm) = (m as f64 * phi).sin_cos();
                        let (cp, cn) = (f.get(l, m as i64), f.get(l, -(m as i64)));
                        let r2 = std::f64::consts::SQRT_2;
                        gt += r2 * d[tri(l, m)] * (cp * cm + cn * sm);
                        gp += r2 * m as f64 * p[tri(l, m)] / s * (cn * cm - cp * sm);
                    }
                }
                theta[i * self.n_phi + j] = gt;
                phi_c[i * self.n_phi + j] = gp;
            }
        }
        TangentField { theta, phi: phi_c }
    }

    /// Surface divergence up to degree `l_max` in weak form,
    /// `⟨div V, Y⟩ = −⟨V, ∇Y⟩`; exact when `V·∇Y` is integrated exactly.
    pub fn divergence(&self, v: &TangentField, l_max: usize) -> Result<ShField> {
        self.check_band(l_max, DIVERGENCE)?;
        let mut out = ShField::zeros(l_max);
        for i in 0..self.n_theta {
            let (x, s) = (self.cos_theta[i], self.sin_theta[i]);
            let p = legendre_table(l_max, x, s);
            let d = legendre_dtheta(l_max, x, s, &p);
            let (ct, st) = self.ring_fourier(&v.theta, i, l_max);
            let (cp, sp) = self.ring_fourier(&v.phi, i, l_max);
            let w = self.theta_weights[i];
            let r2 = std::f64::consts::SQRT_2;
            for l in 0..=l_max {
                out.coeffs[idx(l, 0)] -= w * d[tri(l, 0)] * ct[0];
                for m in 1..=l {
                    let mf = m as f64;
                    let q = p[tri(l, m)] / s;
                    out.coeffs[idx(l, m as i64)] -= w * r2 * (d[tri(l, m)] * ct[m] - mf * q * sp[m]);
                    out.coeffs[idx(l, -(m as i64))] -= w * r2 * (d[tri(l, m)] * st[m] + mf * q * cp[m]);
                }
            }
        }
        Ok(out)
    }

    /// Pointwise product of fields, re-analysed up to degree `l_max`.
    pub fn product(&self, fields: &[&ShField], l_max: usize) -> Result<ShField> {
        let mut vals = vec![1.0; self.len()];
        for f in fields {
            for (v, g) in vals.iter_mut().zip(self.synthesis(f)) {
                *v *= g;
            }
        }
        self.analysis(&vals, l_max)
    }
}

/// Which harmonic extension a DtN operator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

/// DtN multiplier on degree `l` for the unit ball: `l` inside (from `rˡY`),
/// `−(l + 1)` outside (from `r^{−l−1}Y`).
pub fn dtn_multiplier(l: usize, side: Side) -> f64 {
    match side {
        Side::Interior => l as f64,
        Side::Exterior => -(l as f64 + 1.0),
    }
}

pub fn dtn_sphere_apply(f: &ShField, side: Side) -> ShField {
    f.map_degree(|l| dtn_multiplier(l, side))
}

/// Plasmonic eigenvalue `(k + 1)/k` of the unit ball and its multiplicity,
/// from the multipliers: `ε·k − (k + 1) = 0`.
pub fn ball_spectrum(k: usize) -> Result<(f64, usize)> {
    if k == 0 {
        return Err(Error::InfiniteEigenvalue { origin: BALL });
    }
    let eps = -dtn_multiplier(k, Side::Exterior) / dtn_multiplier(k, Side::Interior);
    Ok((eps, 2 * k + 1))
}

/// Curvature data of a closed surface, in the convention where the unit
/// sphere with outward normal has `H = −1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    /// Mean curvature (average of the principal curvatures).
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
    /// Trace-free part of the Weingarten map; a multiple of the identity
    /// vanishes, so on the sphere it is the zero map.
    pub weingarten_trace_free: f64,
}

impl SphereGeometry {
    pub const UNIT: SphereGeometry = SphereGeometry {
        mean_curvature: -1.0,
        gauss_curvature: 1.0,
        weingarten_trace_free: 0.0,
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::oracles;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(l_max: usize, seed: u64) -> ShField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ShField {
            l_max,
            coeffs: (0..n_coeffs(l_max)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    #[test]
    fn low_degree_harmonics_match_cartesian_forms() {
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        let (th, ph) = (0.7f64, 1.9f64);
        let (x, y, z) = (th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos());
        let ev = |l, m| ShField::basis(2, l, m, 1.0).eval(th, ph);
        assert!((ev(0, 0) - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        assert!((ev(1, 0) - c1 * z).abs() < 1e-15);
        assert!((ev(1, 1) - c1 * x).abs() < 1e-15);
        assert!((ev(1, -1) - c1 * y).abs() < 1e-15);
        let c20 = (5.0 / (16.0 * PI)).sqrt();
        assert!((ev(2, 0) - c20 * (3.0 * z * z - 1.0)).abs() < 1e-14);
        let c22 = (15.0 / (16.0 * PI)).sqrt();
        assert!((ev(2, 2) - c22 * (x * x - y * y)).abs() < 1e-14);
        assert!((ev(2, -2) - 2.0 * c22 * x * y).abs() < 1e-14);
    }

    #[test]
    fn constant_analyses_to_single_coefficient() {
        let g = SphereGrid::new(4, 7);
        let f = g.analysis(&vec![1.0; g.len()], 3).unwrap();
        assert!((f.get(0, 0) - (4.0 * PI).sqrt()).abs() < 1e-14);
        assert!(f.coeffs[1..].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = SphereGrid::new(9, 17);
        let y53 = ShField::basis(8, 5, 3, 1.0);
        let back = g.analysis(&g.synthesis(&y53), 8).unwrap();
        assert!((back.axpy(-1.0, &y53)).norm() < 1e-12);
        let f = random_field(8, 1);
        let vals = g.synthesis(&f);
        let back = g.analysis(&vals, 8).unwrap();
        assert!(back.axpy(-1.0, &f).norm() < 1e-12);
        assert!((g.inner(&vals, &vals) - f.norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn undersized_grid_is_rejected() {
        let g = SphereGrid::new(4, 9);
        assert!(matches!(g.analysis(&vec![0.0; g.len()], 4), Err(Error::Shape { .. })));
        let g = SphereGrid::new(5, 8);
        assert!(matches!(g.analysis(&vec![0.0; g.len()], 4), Err(Error::Shape { .. })));
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = SphereGrid::new(10, 20);
        let y3 = ShField::basis(6, 3, -2, 1.0);
        let lap = g.divergence(&g.gradient(&y3), 6).unwrap();
        assert!((lap.get(3, -2) + 12.0).abs() < 1e-12);
        assert!(lap.axpy(12.0, &y3).norm() < 1e-12);
        let f = random_field(6, 3);
        let lap = g.divergence(&g.gradient(&f), 6).unwrap();
        assert!(lap.axpy(-1.0, &f.laplacian()).norm() < 1e-11);
        let c = g.gradient(&ShField::constant(2.0).with_l_max(6));
        assert!(c.theta.iter().chain(&c.phi).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn gradient_and_divergence_are_adjoint() {
        let g = SphereGrid::new(12, 24);
        let f = random_field(5, 4);
        let v = TangentField {
            theta: g.synthesis(&random_field(5, 5)),
            phi: g.synthesis(&random_field(5, 6)),
        };
        let lhs = g.integrate(&g.gradient(&f).dot(&v));
        let div = g.divergence(&v, 11).unwrap();
        let rhs = -f.with_l_max(11).dot(&div);
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} {rhs}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = SphereGrid::new(8, 16);
        let f = random_field(6, 9);
        let grad = g.gradient(&f);
        let d = 1e-4;
        for k in [0, 17, 40, 77, 120] {
            let (i, j) = (k / g.n_phi, k % g.n_phi);
            let th = g.cos_theta[i].acos();
            let ph = g.phi[j];
            let ft = (f.eval(th + d, ph) - f.eval(th - d, ph)) / (2.0 * d);
            let fp = (f.eval(th, ph + d) - f.eval(th, ph - d)) / (2.0 * d * th.sin());
            assert!((ft - grad.theta[k]).abs() < 1e-6);
            assert!((fp - grad.phi[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn multiplication_by_z_follows_recurrence() {
        let g = SphereGrid::exact_for_degree(16);
        let z = ShField::basis(1, 1, 0, (4.0 * PI / 3.0).sqrt());
        for (l, m) in [(0usize, 0i64), (3, 2), (5, -4), (6, 0)] {
            let y = ShField::basis(l, l, m, 1.0);
            let prod = g.product(&[&z, &y], 8).unwrap();
            let (alpha, beta) = oracles::z_multiplication(l as i32, m as i32);
            let mut expect = ShField::basis(8, l + 1, m, alpha);
            if l > 0 && (m.unsigned_abs() as usize) < l {
                expect = expect.axpy(1.0, &ShField::basis(8, l - 1, m, beta));
            }
            assert!(prod.axpy(-1.0, &expect).norm() < 1e-13, "l={l} m={m}");
        }
    }

    #[test]
    fn products_with_headroom_are_grid_independent() {
        let f = random_field(5, 11);
        let h = random_field(5, 12);
        let a = SphereGrid::new(11, 21).product(&[&f, &h], 10).unwrap();
        let b = SphereGrid::new(20, 41).product(&[&f, &h], 10).unwrap();
        assert!(a.axpy(-1.0, &b).norm() < 1e-10);
        // z² f from two recurrence steps
        let z = ShField::basis(1, 1, 0, (4.0 * PI / 3.0).sqrt());
        let g = SphereGrid::exact_for_degree(16);
        let zf = g.product(&[&z, &f], 6).unwrap();
        let zzf = g.product(&[&z, &z, &f], 7).unwrap();
        let again = g.product(&[&z, &zf], 7).unwrap();
        assert!(zzf.axpy(-1.0, &again).norm() < 1e-12);
    }

    #[test]
    fn ball_multipliers() {
        for k in 1..=10 {
            let (eps, mult) = ball_spectrum(k).unwrap();
            assert_eq!((eps, mult), oracles::ball_eigenvalue(k as u32));
            let y = ShField::basis(k, k, -(k as i64) / 2, 1.0);
            let r = dtn_sphere_apply(&y, Side::Interior)
                .scale(eps)
                .axpy(1.0, &dtn_sphere_apply(&y, Side::Exterior));
            assert_eq!(r.norm(), 0.0);
        }
        assert!(matches!(ball_spectrum(0), Err(Error::InfiniteEigenvalue { .. })));
        let y1 = ShField::basis(1, 1, 1, 1.0);
        assert_eq!(dtn_sphere_apply(&y1, Side::Exterior).get(1, 1), -2.0);
    }

    #[test]
    fn json_form() {
        let f: ShField = serde_json::from_str(r#"{"L":2,"coeffs":[{"l":2,"m":0,"c":1.5}]}"#).unwrap();
        assert_eq!(f.get(2, 0), 1.5);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"L":2,"coeffs":[{"l":2,"m":0,"c":1.5}]}"#);
        assert!(serde_json::from_str::<ShField>(r#"{"L":1,"coeffs":[{"l":2,"m":0,"c":1}]}"#).is_err());
        assert!(serde_json::from_str::<ShField>(r#"{"L":1,"coeffs":[],"x":1}"#).is_err());
    }
}
