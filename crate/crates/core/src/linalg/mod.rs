//! Dense complex linear algebra shared by every other module.

mod eigen;
mod matrix;
pub mod qubits;
mod state;

pub use eigen::{hermitian_eigenvalues, is_positive_semidefinite, JACOBI_THRESHOLD};
pub use matrix::{is_unitary, tensor, tensor_all, ComplexMatrix, C64, I, ONE, ZERO};
pub use state::{DensityMatrix, PureState};

use crate::error::{Error, Result};

/// Tolerance used wherever a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists subsystem dimensions with subsystem 0 as the leftmost
/// tensor factor. `keep` is a set; kept subsystems appear in ascending order.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let reduced = partial_trace_operator(rho.matrix(), dims, keep)?;
    Ok(DensityMatrix::from_raw(reduced, rho.is_normalized()))
}

/// [`partial_trace`] on an arbitrary square operator.
pub fn partial_trace_operator(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || dims.is_empty() || dims.contains(&0) || total != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims {dims:?} do not match a {}x{} operator",
            m.rows(),
            m.cols()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            limit: dims.len(),
        });
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    // stride of each subsystem inside the full index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let size: usize = subsystems.iter().map(|&s| dims[s]).product();
        (0..size)
            .map(|mut idx| {
                let mut off = 0;
                for &s in subsystems.iter().rev() {
                    off += (idx % dims[s]) * strides[s];
                    idx /= dims[s];
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off = offsets(&traced);

    let dk = keep_off.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (i, &ri) in keep_off.iter().enumerate() {
        for (j, &cj) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m.get(ri + t, cj + t);
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Trace distance ½‖ρ − σ‖₁ from the eigenvalues of the difference.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    operator_trace_distance(rho.matrix(), sigma.matrix())
}

/// ½ Σ|λᵢ| of `a − b` for Hermitian `a`, `b`; also used on subnormalized operators.
pub fn operator_trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let ev = hermitian_eigenvalues(&a.sub(b))?;
    Ok(0.5 * ev.iter().map(|l| l.abs()).sum::<f64>())
}
