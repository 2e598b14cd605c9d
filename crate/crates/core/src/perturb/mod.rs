//! Eigenvalue perturbation under normal shifts `x ↦ x + h a(x) n(x)`.
//!
//! On the ball the eigenvalues are degenerate; the first-order form `q₁`
//! on the eigenspace decides how they split, its eigenvectors are the
//! branches, and each branch has a second derivative computed from the
//! corrector `u̇`. In the plane only the first derivative is provided.

mod planar;
mod sphere;

pub use planar::{
    epsdot_2d, fd_epsdot_2d, loglog_slope, q1_form_2d, tangential_derivative, FdReport,
    CLUSTER_TOLERANCE,
};
pub use sphere::{
    epsddot, q1_matrix, solve_udot, FirstOrderReport, SecondOrderReport, UdotSolution,
    COMPATIBILITY_TOLERANCE, TIE_TOLERANCE,
};
