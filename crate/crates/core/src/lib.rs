//! Degeneration analysis for families of Newton maps over Puiseux series.
//!
//! Given a one-parameter family of polynomials through its moving roots, this
//! crate computes the associated Newton maps' non-archimedean dynamics: the
//! fixed trees in the Berkovich projective line over the completed Puiseux
//! field, rescaling limits with their periods and limit maps, and the limit
//! of the family's measures of maximal entropy, reported as exact atomic
//! masses whenever the arithmetic allows it.
//!
//! Layering, bottom to top:
//!
//! * [`qq`], [`gauss`], [`bigc`], [`coeff`] — exact rational exponents and the
//!   two coefficient backends (ℚ(i) and big complex floats with a logged zero
//!   tolerance).
//! * [`puiseux`] — truncation-aware formal Puiseux series arithmetic.
//! * [`lpoly`] — polynomials over the series field: Newton polygons, root
//!   counts in disks, and Puiseux root expansion.
//! * [`berk`] — points of the Berkovich line, joins, the path metric, finite
//!   trees/hulls, projections, and direction labels.
//! * [`cpoly`] / [`cmap`] — residue-field polynomials and rational maps:
//!   root finding, gcd, reductions with their holes, degenerate Newton maps,
//!   and the atomic measures of degenerate limits.
//! * [`lrat`] — rational maps over the series field: Newton maps from roots,
//!   frame conjugation, reduction at a point, image points (push-forward with
//!   always-on sampling validation), fibers.
//! * [`analysis`] — fixed trees, critical portraits, rescaling limits
//!   (period one and higher), degree bounds and semistability checks.
//! * [`measure`] — Gauss-orbit classification, stable vertex sets, the finite
//!   transition system, its stationary distribution, and the limit measure.
//! * [`verify`] — floating-point cross checks at small complex parameter
//!   values (independent of all of the above machinery).
//! * [`family`], [`report`], [`cli`] — input format, report schema, commands.

pub mod analysis;
pub mod berk;
pub mod bigc;
pub mod cmap;
pub mod coeff;
pub mod cpoly;
pub mod err;
pub mod gauss;
pub mod lpoly;
pub mod lrat;
pub mod puiseux;
pub mod qq;
pub mod sampler;
