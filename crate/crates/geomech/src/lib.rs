//! Structure-preserving geometric mechanics for field theories whose
//! configuration space is a Lie group.
//!
//! The crate is organised bottom-up:
//!
//! * [`lie`] — closed-form SO(3)/SE(3) algebra: hat/vee, exp/log, adjoint and
//!   coadjoint actions, duality pairing, Maurer-Cartan evaluation.
//! * [`forms`] — numerical exterior calculus on a chart: k-forms as
//!   coefficient functions, wedge, interior product, finite-difference
//!   exterior derivative, pullback, Lie derivative, volume contractions.
//! * [`group`] — a small trait abstracting the group operations the jet and
//!   variational layers need, with SE(3) and abelian instances.
//! * [`jet`] — first-jet bundles over trivial bundles: contact forms (flat
//!   and reduced), holonomic lifts, one-jet prolongation of vector fields.
//! * [`variational`] — Legendre transforms, Euler-Lagrange / Euler-Poincaré
//!   residuals, Poincaré-Cartan and multisymplectic forms, De Donder-Weyl
//!   residuals and Noether currents.
//! * [`beam`] — a geometrically exact Reissner beam on SE(3), integrated as
//!   a 1+1D method-of-lines system with conservation diagnostics.
//! * [`verify`] — the seeded invariant check suites shared by the CLI and
//!   the acceptance tests.

// Indexed loops mirror the tensor index notation throughout; iterator
// rewrites obscure which slot each index addresses.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::type_complexity)]

pub mod beam;
pub mod forms;
pub mod group;
pub mod jet;
pub mod lie;
pub mod variational;
pub mod verify;
