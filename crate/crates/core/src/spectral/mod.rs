//! Lattice bookkeeping, transforms, operators, dealiased products, and
//! norms on the periodic box.

mod field;
mod grid;
mod ops;
mod transform;

pub use field::{SpectralField2D, ZonalSpectral1D, ZERO_MEAN_REL_TOL};
pub use grid::GridSpec;
pub use ops::{
    dealias_product, dealias_truncate, dealias_truncate_zonal, derivative, derivative_zonal,
    inner, inverse_laplacian, laplacian, sobolev_norm, sobolev_norm_zonal, Axis2,
};
pub use transform::{Transform, HERMITIAN_REL_TOL};
