//! Genus one: anti-invariant functions on `C / (Z + tau Z)` with simple poles
//! at the 2-torsion points, their period map `a -> [f^2 dz]`, and the four
//! residue vectors on which both periods vanish.

mod function;
mod lattice;
mod poly;
mod quadrature;
mod solver;

use alloc::boxed::Box;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

pub use function::{build_f, AntiInvariantFunction, ResidueVector};
pub use lattice::{lattice_init, Lattice};
pub use poly::polynomial_roots;
pub use quadrature::{integrate_path, integrate_segment, Integral};
pub use solver::{
    apply_swap, normalize_projective, period_map, projective_distance, quadratic_forms, solve_theta, verify_solution,
    CertificateClause, EllipticSolution, PeriodForms, RootDiagnostic, SolutionCertificate, K_SWAPS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipticError {
    #[error("degenerate lattice: need Im(tau) > 0 and |q| < 1 - 1e-6")]
    DegenerateLattice,
    #[error("residues must sum to zero (|sum| = {0:e})")]
    ResidueSumNonzero(f64),
    #[error("no integration path keeps clear of the poles")]
    PathTooCloseToPole,
    #[error("adaptive quadrature did not reach tolerance (error estimate {0:e})")]
    QuadratureFailed(f64),
    #[error("conic intersection failed: {} root(s) did not converge", .0.len())]
    SolveFailed(Vec<RootDiagnostic>),
    #[error("certificate failed on clause(s) {:?}", .failed)]
    CertificateFailed { failed: Vec<CertificateClause>, certificate: Box<SolutionCertificate> },
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
