//! Moment invariants of n-dimensional weighted point sets.
//!
//! Invariants to anisotropic scaling, rotation and proper affine maps are
//! generated as exact rational combinations of moment monomials: rotation
//! invariance is a kernel condition on integer derivative operators, scale
//! invariance a combinatorial condition on exponents. Generated invariants can
//! be serialized, evaluated on point clouds and checked numerically.

// comparisons are written negated so NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exactla;
pub mod generators;
pub mod harness;
pub mod invariants;
pub mod moments;
pub mod multiindex;
pub mod poly;
pub mod sparse;

pub use error::{Error, Result};
pub use exactla::{rational_kernel, KernelBasis};
pub use generators::{operator_on_basis, PlaneSet, RotationPlane, SparseIntMatrix};
pub use invariants::{
    affine_invariants, expand_product, independent_invariants, rotation_invariants, scale_invariants,
    InvariantClass, InvariantGenerator, InvariantPolynomial,
};
pub use moments::{central_moments, MomentTable, PointCloud};
pub use multiindex::{product_basis, BasisDescriptor, MonomialEntry, MultiIndex, Part};
