//! The acceptance suite: one check per criterion, each returning a
//! pass/fail outcome with the measured quantity and the tolerance it was
//! held to. Failures inside a check are recorded, never propagated.

pub mod oracles;

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bem::{build_dtn, compute_g0, far_field_log_coefficient, DtNPair};
use crate::curve::{sample_curve, CurveParam, TrigPoly};
use crate::dtn_shape::{self, Side};
use crate::error::Result;
use crate::perturb;
use crate::spectrum::{np_route, rayleigh, solve_plasmonic};
use crate::sphere::{self, ShField, SphereGeometry};

/// Golden `ε̈` for `a = Y_{2,0}`, `k = 1`, branch `z`, frozen after the
/// scale, gauge, compatibility-route and translation checks passed.
pub const GOLDEN_EPSDDOT_Y20_K1_Z: f64 = 3.028491202834;

/// Tolerances of the suite; every field can be overridden from a config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub disk: f64,
    pub ellipse_oracle: f64,
    pub clustering_gap: f64,
    pub routes: f64,
    pub rayleigh: f64,
    pub criticality: f64,
    pub q1_uniform: f64,
    pub disk_integral: f64,
    pub epsddot_uniform: f64,
    pub gauge: f64,
    pub compatibility: f64,
    pub golden: f64,
    pub fd_slope_target: f64,
    pub fd_slope_band: f64,
    pub fd_discrepancy: f64,
    pub circle_shape_derivative: f64,
    pub central_slope_min: f64,
    pub g0: f64,
    /// Wall-clock limits in seconds for criteria 1, 2, 3 and 9.
    pub runtime_disk: f64,
    pub runtime_ellipse: f64,
    pub runtime_clustering: f64,
    pub runtime_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            disk: 1e-8,
            ellipse_oracle: 1e-8,
            clustering_gap: 0.05,
            routes: 1e-8,
            rayleigh: 1e-8,
            criticality: 1e-6,
            q1_uniform: 1e-10,
            disk_integral: 1e-8,
            epsddot_uniform: 1e-8,
            gauge: 1e-10,
            compatibility: 1e-8,
            golden: 1e-10,
            fd_slope_target: 2.0,
            fd_slope_band: 0.2,
            fd_discrepancy: 1e-6,
            circle_shape_derivative: 1e-8,
            central_slope_min: 1.8,
            g0: 1e-8,
            runtime_disk: 1.0,
            runtime_ellipse: 2.0,
            runtime_clustering: 5.0,
            runtime_fd: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Node count for the disk and ellipse checks.
    #[serde(rename = "N")]
    pub n: usize,
    /// Node count for the clustering check.
    pub kite_n: usize,
    /// Seed for random probe vectors and shapes only.
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            n: 128,
            kite_n: 256,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<32} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "disk degeneracy"),
    (2, "ellipse oracle"),
    (3, "clustering at 1"),
    (4, "dtn and np routes agree"),
    (5, "rayleigh identity"),
    (6, "ball spectrum"),
    (7, "first order on the sphere"),
    (8, "second order on the sphere"),
    (9, "2d first order vs fd"),
    (10, "dtn shape derivative"),
    (11, "g0 characterisation"),
];

/// Runs one criterion.
pub fn run_check(id: u32, cfg: &ValidateConfig) -> CheckOutcome {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .unwrap_or("unknown");
    let start = Instant::now();
    let res = match id {
        1 => disk_degeneracy(cfg),
        2 => ellipse_oracle(cfg),
        3 => clustering(cfg),
        4 => two_routes(cfg),
        5 => rayleigh_identity(cfg),
        6 => ball(cfg),
        7 => sphere_first_order(cfg),
        8 => sphere_second_order(cfg),
        9 => planar_first_order(cfg),
        10 => shape_derivative(cfg),
        11 => g0_characterisation(cfg),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match res {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome {
        id,
        name,
        passed,
        detail,
        seconds,
    }
}

/// Runs the whole suite in criterion order.
pub fn run_all(cfg: &ValidateConfig) -> Vec<CheckOutcome> {
    CRITERIA.iter().map(|c| run_check(c.0, cfg)).collect()
}

type Verdict = Result<(bool, String)>;

fn dtn_of(curve: &CurveParam, n: usize) -> Result<DtNPair> {
    build_dtn(&sample_curve(curve, n)?)
}

fn within_time(start: Instant, limit: f64) -> (bool, f64) {
    let t = start.elapsed().as_secs_f64();
    (t < limit, t)
}

/// Kite-like star-shaped curve used for the clustering check.
pub fn kite() -> CurveParam {
    CurveParam::fourier(vec![1.0, 0.25, 0.35, 0.0, 0.08], vec![0.0, 0.12])
}

/// Largest `ε` distance from 1 in consecutive windows of the tail.
pub const TAIL_WINDOW: usize = 20;
/// Windows whose maximum is below this are rounding noise.
pub const TAIL_FLOOR: f64 = 1e-13;

fn disk_degeneracy(cfg: &ValidateConfig) -> Verdict {
    let t = cfg.tolerances.clone();
    let start = Instant::now();
    let spec = solve_plasmonic(&dtn_of(&CurveParam::circle(1.0), cfg.n)?, 20)?;
    let (fast, secs) = within_time(start, t.runtime_disk);
    let worst = spec
        .eigenvalues
        .iter()
        .map(|e| (e - 1.0).abs())
        .fold(0.0, f64::max);
    Ok((
        spec.len() == 20 && worst <= t.disk && fast,
        format!("max|eps-1| = {worst:.2e} (tol {:.0e}), {secs:.2}s (limit {}s)", t.disk, t.runtime_disk),
    ))
}

fn ellipse_oracle(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let start = Instant::now();
    let spec = solve_plasmonic(&dtn_of(&CurveParam::ellipse(2.0, 1.0), cfg.n)?, 10)?;
    let (fast, secs) = within_time(start, t.runtime_ellipse);
    let exact = oracles::ellipse_plasmonic_eigenvalues(2.0, 1.0, 10);
    let err = spec
        .by_distance_from_one()
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        err <= t.ellipse_oracle && fast,
        format!(
            "N = {}, max error {err:.2e} (tol {:.0e}), {secs:.2}s (limit {}s)",
            cfg.n, t.ellipse_oracle, t.runtime_ellipse
        ),
    ))
}

fn clustering(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let start = Instant::now();
    let spec = solve_plasmonic(&dtn_of(&kite(), cfg.kite_n)?, cfg.kite_n / 2)?;
    let (fast, secs) = within_time(start, t.runtime_clustering);
    let ordered = spec.by_distance_from_one();
    let tail: Vec<f64> = ordered
        .iter()
        .skip(crate::spectrum::TAIL_START)
        .map(|e| (e - 1.0).abs())
        .collect();
    let tail_max = tail.iter().cloned().fold(0.0, f64::max);
    // window maxima until they reach the rounding floor
    let maxima: Vec<f64> = tail
        .chunks(TAIL_WINDOW)
        .map(|w| w.iter().cloned().fold(0.0, f64::max))
        .take_while(|m| *m > TAIL_FLOOR)
        .collect();
    let decreasing = maxima.windows(2).all(|p| p[1] < p[0]);
    Ok((
        tail_max < t.clustering_gap && decreasing && maxima.len() >= 2 && fast,
        format!(
            "tail max|eps-1| = {tail_max:.2e} (< {}), window maxima {}, {secs:.2}s (limit {}s)",
            t.clustering_gap,
            maxima
                .iter()
                .map(|m| format!("{m:.1e}"))
                .collect::<Vec<_>>()
                .join(" > "),
            t.runtime_clustering
        ),
    ))
}

fn two_routes(cfg: &ValidateConfig) -> Verdict {
    let dtn = dtn_of(&CurveParam::ellipse(2.0, 1.0), cfg.n)?;
    let a = solve_plasmonic(&dtn, 10)?;
    let b = np_route(&dtn, 10)?;
    let err = a
        .eigenvalues
        .iter()
        .zip(&b.eigenvalues)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok((
        err <= cfg.tolerances.routes,
        format!("max |eps_dtn - eps_np| = {err:.2e} (tol {:.0e})", cfg.tolerances.routes),
    ))
}

fn rayleigh_identity(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let dtn = dtn_of(&CurveParam::ellipse(2.0, 1.0), cfg.n)?;
    let spec = solve_plasmonic(&dtn, 10)?;
    let mut rq = 0.0f64;
    for (e, g) in spec.eigenvalues.iter().zip(&spec.eigenfunctions) {
        rq = rq.max((rayleigh(g, &dtn)? - e).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s = 1e-5;
    let sample = &dtn.sample;
    let mut crit = 0.0f64;
    for g in &spec.eigenfunctions {
        for _ in 0..20 {
            let mut d: Vec<f64> = (0..sample.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = sample.integrate(&d) / sample.perimeter();
            d.iter_mut().for_each(|v| *v -= mean);
            let norm = sample.inner(&d, &d).sqrt();
            d.iter_mut().for_each(|v| *v /= norm);
            let shifted = |sign: f64| -> Vec<f64> {
                g.iter().zip(&d).map(|(a, b)| a + sign * s * b).collect()
            };
            let fd = (rayleigh(&shifted(1.0), &dtn)? - rayleigh(&shifted(-1.0), &dtn)?) / (2.0 * s);
            crit = crit.max(fd.abs());
        }
    }
    Ok((
        rq <= t.rayleigh && crit <= t.criticality,
        format!(
            "max |R(g_k) - eps_k| = {rq:.2e} (tol {:.0e}), max |dR| = {crit:.2e} (tol {:.0e})",
            t.rayleigh, t.criticality
        ),
    ))
}

fn ball(_: &ValidateConfig) -> Verdict {
    let mut ok = true;
    for k in 1..=10usize {
        let (eps, mult) = sphere::ball_spectrum(k)?;
        ok &= (eps, mult) == oracles::ball_eigenvalue(k as u32);
        let mut count = 0;
        for m in -(k as i64)..=k as i64 {
            let y = ShField::basis(k, k, m, 1.0);
            let r = sphere::dtn_sphere_apply(&y, sphere::Side::Interior)
                .scale(eps)
                .axpy(1.0, &sphere::dtn_sphere_apply(&y, sphere::Side::Exterior));
            if r.norm() == 0.0 {
                count += 1;
            }
        }
        ok &= count == mult;
    }
    Ok((ok, "eps_k = (k+1)/k with multiplicity 2k+1, k = 1..10, exact".into()))
}

fn y20() -> ShField {
    ShField::basis(2, 2, 0, 1.0)
}

fn sphere_first_order(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let mut q1_norm = 0.0f64;
    for k in 1..=3 {
        let r = perturb::q1_matrix(k, &ShField::constant(1.0))?;
        let n: f64 = r.q1.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
        q1_norm = q1_norm.max(n);
    }
    let r = perturb::q1_matrix(1, &y20())?;
    let value = r.branch_values[r.branch_along(0)];
    let c20 = (5.0 / (16.0 * PI)).sqrt();
    let disk = oracles::disk_integral_k1(|_, _, z| c20 * (3.0 * z * z - 1.0), 32);
    let diff = (value - disk).abs();
    Ok((
        q1_norm <= t.q1_uniform && diff <= t.disk_integral,
        format!(
            "a=1: max ||q1|| = {q1_norm:.1e} (tol {:.0e}); a=Y20 branch z: epsdot = {value:.12}, \
             disk integral = {disk:.12}, |diff| = {diff:.2e} (tol {:.0e})",
            t.q1_uniform, t.disk_integral
        ),
    ))
}

/// Random shape of degree `≤ 3` with a nonzero mean.
pub fn random_sphere_shape(rng: &mut ChaCha8Rng) -> ShField {
    let mut f = ShField::zeros(3);
    for c in f.coeffs.iter_mut() {
        *c = rng.gen_range(-1.0..1.0);
    }
    f
}

fn sphere_second_order(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let geo = SphereGeometry::UNIT;
    let mut uniform = 0.0f64;
    let one = ShField::constant(1.0);
    for k in 1..=3 {
        let r = perturb::q1_matrix(k, &one)?;
        for b in 0..r.dimension {
            let u = perturb::solve_udot(&r, b, &one)?;
            uniform = uniform.max(perturb::epsddot(&r, b, &one, &u, geo).epsddot.abs());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut gauge, mut compat) = (0.0f64, 0.0f64);
    for _ in 0..5 {
        let a = random_sphere_shape(&mut rng);
        for k in 1..=2 {
            let r = perturb::q1_matrix(k, &a)?;
            for b in 0..r.dimension {
                let u = perturb::solve_udot(&r, b, &a)?;
                compat = compat.max(u.compatibility_residual);
                gauge = gauge.max(perturb::epsddot(&r, b, &a, &u, geo).gauge_residual);
            }
        }
    }
    let r = perturb::q1_matrix(1, &y20())?;
    let b = r.branch_along(0);
    let u = perturb::solve_udot(&r, b, &y20())?;
    let golden = perturb::epsddot(&r, b, &y20(), &u, geo).epsddot;
    let gdiff = (golden - GOLDEN_EPSDDOT_Y20_K1_Z).abs();
    Ok((
        uniform <= t.epsddot_uniform && gauge <= t.gauge && compat <= t.compatibility && gdiff <= t.golden,
        format!(
            "a=1: max|epsddot| = {uniform:.1e}; gauge {gauge:.1e} (tol {:.0e}); compatibility {compat:.1e} \
             (tol {:.0e}); Y20 baseline {golden:.12} (|diff| {gdiff:.1e})",
            t.gauge, t.compatibility
        ),
    ))
}

/// Step sizes of the finite-difference checks.
pub const FD_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn planar_first_order(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let start = Instant::now();
    let curve = CurveParam::ellipse(2.0, 1.0);
    // index 0 is the lowest eigenvalue, tanh ξ₀
    let rep = perturb::fd_epsdot_2d(&curve, cfg.n, 10, 0, &TrigPoly::cos_mode(2, 1.0), &FD_STEPS)?;
    let (fast, secs) = within_time(start, t.runtime_fd);
    let slope_ok = (rep.slope - t.fd_slope_target).abs() <= t.fd_slope_band;
    Ok((
        slope_ok && rep.discrepancy <= t.fd_discrepancy && fast,
        format!(
            "eps = {:.6}, epsdot = {:.10}, slope {:.3}, Richardson discrepancy {:.2e} (tol {:.0e}), {secs:.2}s (limit {}s)",
            rep.epsilon, rep.epsdot, rep.slope, rep.discrepancy, t.fd_discrepancy, t.runtime_fd
        ),
    ))
}

fn shape_derivative(cfg: &ValidateConfig) -> Verdict {
    let t = &cfg.tolerances;
    let dtn = dtn_of(&CurveParam::circle(1.0), cfg.n)?;
    let one = TrigPoly::constant(1.0);
    let mut circle_err = 0.0f64;
    for l in 1..=cfg.n / 4 {
        for g in [
            dtn.sample.eval(&TrigPoly::cos_mode(l, 1.0)),
            dtn.sample.eval(&TrigPoly::sin_mode(l, 1.0)),
        ] {
            let d = dtn_shape::shape_derivative_apply(&g, &one, &dtn, Side::Interior);
            let m = oracles::circle_dtn_radial_derivative(l as i32);
            circle_err = circle_err.max(d.iter().zip(&g).map(|(x, y)| (x - m * y).abs()).fold(0.0, f64::max));
        }
    }
    let curve = CurveParam::ellipse(2.0, 1.0);
    let a = TrigPoly::cos_mode(2, 1.0);
    let inner = dtn_shape::fd_shape_derivative(&curve, &a, cfg.n, &FD_STEPS, Side::Interior)?;
    let outer = dtn_shape::fd_shape_derivative(&curve, &a, cfg.n, &FD_STEPS, Side::Exterior)?;
    Ok((
        circle_err <= t.circle_shape_derivative
            && inner.slopes.central >= t.central_slope_min
            && outer.slopes.central >= t.central_slope_min,
        format!(
            "circle max error {circle_err:.1e} (tol {:.0e}); central slopes interior {:.2}, exterior {:.2} (min {})",
            t.circle_shape_derivative, inner.slopes.central, outer.slopes.central, t.central_slope_min
        ),
    ))
}

fn g0_characterisation(cfg: &ValidateConfig) -> Verdict {
    let tol = cfg.tolerances.g0;
    let circle = sample_curve(&CurveParam::circle(1.0), cfg.n)?;
    let g0c = compute_g0(&circle, None)?;
    let spread_c = g0c.iter().map(|v| (v - 1.0 / (2.0 * PI)).abs()).fold(0.0, f64::max);
    let ellipse = sample_curve(&CurveParam::ellipse(2.0, 1.0), cfg.n)?;
    let g0e = compute_g0(&ellipse, None)?;
    let (lo, hi) = g0e
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    let ratio = hi / lo;
    let other = compute_g0(&ellipse, Some([0.7, -0.3]))?;
    let indep = g0e.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut g: Vec<f64> = (0..ellipse.len())
        .map(|i| {
            let t = ellipse.params[i];
            rng.gen_range(-1.0..1.0) * t.cos() + rng.gen_range(-1.0..1.0) * (2.0 * t).sin() + 0.3
        })
        .collect();
    let proj = ellipse.inner(&g, &g0e) / ellipse.inner(&g0e, &g0e);
    g.iter_mut().zip(&g0e).for_each(|(v, w)| *v -= proj * w);
    let far = far_field_log_coefficient(&ellipse, &g)?.abs();
    Ok((
        spread_c <= tol && ratio > 1.0 + 1e-3 && indep <= tol && far <= tol,
        format!(
            "circle spread {spread_c:.1e}; ellipse max/min {ratio:.4}; base-point change {indep:.1e}; \
             far-field log coefficient {far:.1e} (tol {tol:.0e})"
        ),
    ))
}
