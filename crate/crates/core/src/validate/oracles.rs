//! Closed-form and independently computed reference values.
//!
//! Nothing here calls the boundary-element or spherical-harmonic code paths.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;

/// Plasmonic eigenvalues of the ellipse with semi-axes `a > b`, by
/// separation of variables in elliptic coordinates.
///
/// The boundary is `ξ = ξ₀` with `tanh ξ₀ = b/a`. The plasmons
/// `cosh(kξ)cos(kη)` and `sinh(kξ)sin(kη)` inside, matched to `e^{−kξ}` outside,
/// give `ε = tanh(kξ₀)` and `ε = coth(kξ₀)`, i.e.
/// `(1 ∓ ρᵏ)/(1 ± ρᵏ)` with `ρ = (a − b)/(a + b)`.
///
/// Returned in order of decreasing `|ε − 1|`.
pub fn ellipse_plasmonic_eigenvalues(a: f64, b: f64, count: usize) -> Vec<f64> {
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let xi0 = (b / a).atanh();
    let mut out: Vec<f64> = (1..=count)
        .flat_map(|k| {
            let t = (k as f64 * xi0).tanh();
            [t, 1.0 / t]
        })
        .collect();
    out.sort_by(|x, y| (y - 1.0).abs().total_cmp(&(x - 1.0).abs()));
    out.truncate(count);
    out
}

/// Nonzero eigenvalues `±½ρᵏ` of the Neumann–Poincaré operator of the same
/// ellipse, by decreasing modulus.
pub fn ellipse_np_eigenvalues(a: f64, b: f64, count: usize) -> Vec<f64> {
    let rho = (a - b).abs() / (a + b);
    (0..count)
        .map(|i| {
            let k = (i / 2 + 1) as i32;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * 0.5 * rho.powi(k)
        })
        .collect()
}

/// DtN multipliers on `cos(lθ)`, `sin(lθ)` for the disk of radius `r`:
/// `(interior, exterior) = (|l|/r, −|l|/r)`.
pub fn circle_dtn_multipliers(l: i32, r: f64) -> (f64, f64) {
    let m = l.abs() as f64 / r;
    (m, -m)
}

/// `d/dh` of the interior DtN multiplier on the disk of radius `1 + h`, at `h = 0`.
pub fn circle_dtn_radial_derivative(l: i32) -> f64 {
    -(l.abs() as f64)
}

/// Ball eigenvalues `(k + 1)/k` from the harmonic extensions `rᵏY` and
/// `r^{−k−1}Y`, and the dimension `2k + 1` of degree-`k` harmonics.
pub fn ball_eigenvalue(k: u32) -> (f64, usize) {
    ((k as f64 + 1.0) / k as f64, 2 * k as usize + 1)
}

/// Coefficients `(α, β)` of `z·Y_{l,m} = α Y_{l+1,m} + β Y_{l−1,m}` for
/// orthonormal spherical harmonics (real or complex, any phase convention
/// that is fixed per `m`).
pub fn z_multiplication(l: i32, m: i32) -> (f64, f64) {
    let (lf, mf) = (l as f64, m.abs() as f64);
    let alpha = (((lf + 1.0).powi(2) - mf * mf) / ((2.0 * lf + 1.0) * (2.0 * lf + 3.0))).sqrt();
    let beta = if l == 0 {
        0.0
    } else {
        ((lf * lf - mf * mf) / ((2.0 * lf - 1.0) * (2.0 * lf + 1.0))).sqrt()
    };
    (alpha, beta)
}

/// Literal evaluation of
/// `(9/4π) ∫_{x²+y²<1} A(x,y) (3(x²+y²) − 2) / √(1 − x² − y²) dx dy`
/// with `A(x,y) = a(x,y,√(1−ρ²)) + a(x,y,−√(1−ρ²))`.
///
/// Polar coordinates and the substitution `ρ = sin β` remove the inverse
/// square root: `dx dy/√(1−ρ²) = sin β dβ dψ`. Gauss–Legendre in `β`,
/// trapezoid in `ψ`.
pub fn disk_integral_k1(a: impl Fn(f64, f64, f64) -> f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let n_psi = 2 * n;
    let mut total = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let beta = 0.25 * PI * (x + 1.0);
        let (rho, c) = (beta.sin(), beta.cos());
        let mut ring = 0.0;
        for j in 0..n_psi {
            let psi = 2.0 * PI * j as f64 / n_psi as f64;
            let (px, py) = (rho * psi.cos(), rho * psi.sin());
            ring += a(px, py, c) + a(px, py, -c);
        }
        ring *= 2.0 * PI / n_psi as f64;
        total += w * 0.25 * PI * ring * (3.0 * rho * rho - 2.0) * rho;
    }
    9.0 / (4.0 * PI) * total
}

/// `ε̇` of the plasmon `u = z` of the unit ball under the normal shift `a`,
/// from the energy expression with `∂ₙu = z`, `|∇_∂u|² = 1 − z²`, `ε = 2` and
/// normalisation `‖z‖₋² = ∫ z² = 4π/3`:
/// `ε̇ = (9/4π) ∫_{S²} a (3z² − 1) dS`.
///
/// Integrated in spherical coordinates with Gauss–Legendre in `cos θ`.
pub fn ball_z_branch_epsdot(a: impl Fn(f64, f64, f64) -> f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let n_phi = 2 * n;
    let mut total = 0.0;
    for (z, w) in xs.iter().zip(&ws) {
        let s = (1.0 - z * z).sqrt();
        let mut ring = 0.0;
        for j in 0..n_phi {
            let phi = 2.0 * PI * j as f64 / n_phi as f64;
            ring += a(s * phi.cos(), s * phi.sin(), *z);
        }
        total += w * ring * 2.0 * PI / n_phi as f64 * (3.0 * z * z - 1.0);
    }
    9.0 / (4.0 * PI) * total
}

/// Depolarisation factor along the symmetry axis of a spheroid with axial
/// semi-axis `c` and equatorial semi-axis `e`.
pub fn spheroid_axial_depolarisation(c: f64, e: f64) -> f64 {
    // (atanh q − q)/q³ for prolate (q² = 1 − e²/c²) and (f − atan f)/f³ for
    // oblate (f² = e²/c² − 1) share the series Σ sⁿ/(2n + 3) in s = q² = −f²
    let s = 1.0 - (e / c).powi(2);
    let ratio = if s.abs() < 0.1 {
        (0..40).map(|n| s.powi(n) / (2 * n + 3) as f64).sum::<f64>()
    } else if s > 0.0 {
        let q = s.sqrt();
        (q.atanh() - q) / q.powi(3)
    } else {
        let f = (-s).sqrt();
        (f - f.atan()) / f.powi(3)
    };
    (1.0 - s) * ratio
}

/// Axial dipole plasmon of a spheroid: `ε = 1/L − 1` with `L` the
/// depolarisation factor. `ε = 2` on the ball.
pub fn spheroid_axial_eigenvalue(c: f64, e: f64) -> f64 {
    1.0 / spheroid_axial_depolarisation(c, e) - 1.0
}
