//! Combinatorial and analytic machinery for hyperelliptic odd coverings `C -> P^1`.
//!
//! A hyperelliptic odd covering of degree `4g` is described on the monodromy
//! side by `2g` three-cycles in `S_{4g}` together with the fixed involution
//! `l = (1 2)(3 4)...(4g-1 4g)`; the loop around infinity then maps to
//! `(A l)^2` where `A` is the product of the three-cycles. On the analytic
//! side (genus one) a covering is a solution of `dh = f^2 dz` with `f` an
//! odd elliptic function having simple poles at the 2-torsion points.
//!
//! Modules:
//!
//! - [`perm`]: permutation algebra (left-to-right composition, 1-indexed).
//! - [`monodromy`]: ramification profiles, monodromy tuples, condition checks
//!   and the constructive tuple builder.
//! - [`covering`]: Riemann-Hurwitz genus, oddness and quotient certificates.
//! - [`spin`]: profile enumeration, spin parity and the residue quadric.
//! - [`enumeration`]: exhaustive tuple search and class census.
//! - [`elliptic`]: lattice functions, period map and the genus-one solver.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod covering;
pub mod elliptic;
pub mod enumeration;
pub mod monodromy;
pub mod perm;
pub mod spin;

pub use covering::{verify_cover, CoveringReport};
pub use monodromy::{build_tuple, MonodromyTuple, RamificationProfile};
pub use perm::{CycleType, Parity, PermError, Permutation};
