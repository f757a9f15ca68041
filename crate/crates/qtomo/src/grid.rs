//! Wigner grids evaluated in parallel, one independent task per grid point.

use qtomo_core::states::{check_axis, wigner_at, WignerGrid};
use qtomo_core::{Complex64, DensityMatrix};
use rayon::prelude::*;

/// Same values as `wigner_from_density`, bit for bit, for any thread count.
pub fn wigner_grid(rho: &DensityMatrix, x_axis: &[f64], y_axis: &[f64]) -> qtomo_core::Result<WignerGrid> {
    check_axis(x_axis)?;
    check_axis(y_axis)?;
    let ny = y_axis.len();
    let values = (0..x_axis.len() * ny)
        .into_par_iter()
        .map(|i| wigner_at(rho, Complex64::new(x_axis[i / ny], y_axis[i % ny])))
        .collect();
    Ok(WignerGrid { x_axis: x_axis.to_vec(), y_axis: y_axis.to_vec(), values })
}
