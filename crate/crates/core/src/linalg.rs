//! Dense linear-algebra helpers shared by the boundary solvers.

use nalgebra::{DMatrix, DVector};
use rustfft::{num_complex::Complex64, FftPlanner};

/// `W⁻¹ Aᵀ W` for `W = diag(w)`: the adjoint of `A` in `⟨f, g⟩ = Σ fᵢ gᵢ wᵢ`.
pub fn weighted_adjoint(a: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    DMatrix::from_fn(n, n, |i, j| a[(j, i)] * w[j] / w[i])
}

/// `‖A − A*‖_F / ‖A‖_F` with `A*` the weighted adjoint.
pub fn weighted_asymmetry(a: &DMatrix<f64>, w: &[f64]) -> f64 {
    (a - weighted_adjoint(a, w)).norm() / a.norm()
}

/// Orthonormal basis (in the weighted inner product) of the complement of the
/// constants, as the columns of an `N × (N−1)` matrix.
///
/// Built from a Householder reflection that maps the normalised `√w` to the
/// first unit vector, so the basis is deterministic.
pub fn mean_zero_basis(w: &[f64]) -> DMatrix<f64> {
    let n = w.len();
    let sq: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let norm = sq.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v: DVector<f64> = DVector::from_iterator(n, sq.iter().map(|x| x / norm));
    // v = q0 + e1 (q0[0] > 0, so no cancellation)
    v[0] += 1.0;
    let vv = v.dot(&v);
    let mut basis = DMatrix::zeros(n, n - 1);
    for c in 1..n {
        for r in 0..n {
            let e = if r == c { 1.0 } else { 0.0 };
            basis[(r, c - 1)] = (e - 2.0 * v[r] * v[c] / vv) / sq[r];
        }
    }
    basis
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending.
pub fn symmetric_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

/// `(M + Mᵀ)/2`.
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Derivative with respect to the parameter of a function sampled on the
/// uniform periodic grid `t_i = 2πi/N`, by FFT. The Nyquist mode is dropped.
pub fn periodic_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fwd.process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let freq = if k < n / 2 {
            k as f64
        } else if k == n / 2 && n.is_multiple_of(2) {
            0.0
        } else {
            k as f64 - n as f64
        };
        *c *= Complex64::new(0.0, freq);
    }
    inv.process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}
