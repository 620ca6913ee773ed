//! Qubit-local operator application on flat amplitude vectors.
//!
//! Qubit 0 is the most significant bit of a basis index, i.e. the leftmost
//! tensor factor and the top wire of a circuit diagram.

use super::matrix::{ComplexMatrix, C64, ZERO};

#[inline]
fn bit_of(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Applies the 2^k × 2^k operator `op` to qubits `targets` (in the operator's
/// own MSB-first order) of an `n`-qubit amplitude vector, in place.
pub fn apply_on_qubits(amps: &mut [C64], n: usize, targets: &[usize], op: &ComplexMatrix) {
    let k = targets.len();
    let sub = 1usize << k;
    assert_eq!(
        amps.len(),
        1 << n,
        "vector length does not match {n} qubits"
    );
    assert_eq!(
        op.shape(),
        (sub, sub),
        "operator does not act on {k} qubits"
    );
    let masks: Vec<usize> = targets.iter().map(|&q| bit_of(q, n)).collect();
    let target_mask: usize = masks.iter().sum();

    let offsets: Vec<usize> = (0..sub)
        .map(|local| {
            masks
                .iter()
                .enumerate()
                .filter(|(j, _)| local & (1 << (k - 1 - j)) != 0)
                .map(|(_, m)| m)
                .sum()
        })
        .collect();

    let mut buf = vec![ZERO; sub];
    for base in 0..amps.len() {
        if base & target_mask != 0 {
            continue;
        }
        for (slot, off) in buf.iter_mut().zip(&offsets) {
            *slot = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, b) in buf.iter().enumerate() {
                acc += op.get(r, c) * b;
            }
            amps[base + off] = acc;
        }
    }
}

/// `K ρ K†` where `K` acts on `targets` of an `n`-qubit density matrix stored
/// row-major in `rho`.
pub fn conjugate_on_qubits(rho: &mut [C64], n: usize, targets: &[usize], op: &ComplexMatrix) {
    // row index bits are qubits 0..n, column index bits are n..2n
    apply_on_qubits(rho, 2 * n, targets, op);
    let col_targets: Vec<usize> = targets.iter().map(|q| q + n).collect();
    apply_on_qubits(rho, 2 * n, &col_targets, &op.conj());
}

/// Lifts a local operator to the full `n`-qubit register.
pub fn embed(op: &ComplexMatrix, targets: &[usize], n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let mut full = ComplexMatrix::zeros(dim, dim);
    let mut col = vec![ZERO; dim];
    for j in 0..dim {
        col.iter_mut().for_each(|z| *z = ZERO);
        col[j] = C64::new(1.0, 0.0);
        apply_on_qubits(&mut col, n, targets, op);
        for (i, z) in col.iter().enumerate() {
            if *z != ZERO {
                full.set(i, j, *z);
            }
        }
    }
    full
}

/// Reorders qubits: output qubit `i` is input qubit `order[i]`.
pub fn permute_qubits(amps: &[C64], n: usize, order: &[usize]) -> Vec<C64> {
    assert_eq!(order.len(), n);
    let mut out = vec![ZERO; amps.len()];
    for (idx, z) in amps.iter().enumerate() {
        let mut target = 0usize;
        for (i, &src) in order.iter().enumerate() {
            if idx & bit_of(src, n) != 0 {
                target |= bit_of(i, n);
            }
        }
        out[target] = *z;
    }
    out
}
