//! Black boxes: unitaries, Kraus channels and bipartite boxes.

pub mod builtin;
mod nonsignaling;

pub use nonsignaling::{is_non_signaling, BipartiteBox, NonSignalingReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, DensityMatrix, DEFAULT_TOL, ZERO};

/// Completeness tolerance for channels flagged deterministic.
pub const CPTP_TOL: f64 = 1e-9;

fn qubit_count(dim: usize, what: &str) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::DimensionMismatch(format!(
            "{what} dimension {dim} is not a power of two"
        )))
    }
}

/// A unitary black box on `qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryBox {
    matrix: ComplexMatrix,
    qubits: usize,
}

impl UnitaryBox {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.unitarity_deviation()?;
        if deviation > DEFAULT_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        let qubits = qubit_count(matrix.rows(), "unitary")?;
        Ok(Self { matrix, qubits })
    }

    pub fn named(name: &str) -> Result<Self> {
        Self::new(builtin::unitary(name)?)
    }

    pub fn identity(qubits: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(1 << qubits),
            qubits,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// "self then next": the matrix `U_next · U_self`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.qubits != next.qubits {
            return Err(Error::DimensionMismatch(format!(
                "composing boxes on {} and {} qubits",
                self.qubits, next.qubits
            )));
        }
        Ok(Self {
            matrix: next.matrix.matmul(&self.matrix),
            qubits: self.qubits,
        })
    }

    pub fn to_channel(&self) -> KrausChannel {
        KrausChannel::from_unitary(self.matrix.clone())
    }
}

/// A quantum operation `ρ ↦ Σ K ρ K†`.
///
/// Deterministic channels satisfy `Σ K†K = I`. Instrument elements (the
/// branch kept by a post-selection) only satisfy `Σ K†K ≤ I`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    input_qubits: usize,
    output_qubits: usize,
    deterministic: bool,
}

impl KrausChannel {
    /// A deterministic (trace-preserving) channel.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::build(ops, true)?;
        let report = verify_cptp(&ch, CPTP_TOL);
        if !report.passed {
            return Err(Error::NotCptp {
                deviation: report.completeness_deviation,
            });
        }
        Ok(ch)
    }

    /// A trace non-increasing instrument element.
    pub fn instrument(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::build(ops, false)?;
        let report = verify_cptp(&ch, CPTP_TOL);
        if !report.passed {
            return Err(Error::InvalidArgument(format!(
                "Kraus family exceeds the identity (deficiency eigenvalue {:.3e})",
                report.deficiency_min_eigenvalue
            )));
        }
        Ok(ch)
    }

    /// Shape checks only; completeness is left to [`verify_cptp`].
    pub fn unchecked(ops: Vec<ComplexMatrix>, deterministic: bool) -> Result<Self> {
        Self::build(ops, deterministic)
    }

    fn build(ops: Vec<ComplexMatrix>, deterministic: bool) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus family".into()))?;
        let shape = first.shape();
        if ops.iter().any(|k| k.shape() != shape) {
            return Err(Error::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        Ok(Self {
            input_qubits: qubit_count(shape.1, "input")?,
            output_qubits: qubit_count(shape.0, "output")?,
            ops,
            deterministic,
        })
    }

    pub fn from_unitary(u: ComplexMatrix) -> Self {
        let q = u.rows().trailing_zeros() as usize;
        Self {
            ops: vec![u],
            input_qubits: q,
            output_qubits: q,
            deterministic: true,
        }
    }

    pub fn identity(qubits: usize) -> Self {
        Self::from_unitary(ComplexMatrix::identity(1 << qubits))
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn input_qubits(&self) -> usize {
        self.input_qubits
    }

    pub fn output_qubits(&self) -> usize {
        self.output_qubits
    }

    pub fn input_dim(&self) -> usize {
        1 << self.input_qubits
    }

    pub fn output_dim(&self) -> usize {
        1 << self.output_qubits
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// The single operator of a one-element family, if it is unitary.
    pub fn as_unitary(&self) -> Option<&ComplexMatrix> {
        match self.ops.as_slice() {
            [u] if u.unitarity_deviation().is_ok_and(|d| d <= DEFAULT_TOL) => Some(u),
            _ => None,
        }
    }

    /// `Σ K†K`
    pub fn completeness(&self) -> ComplexMatrix {
        let d = self.input_dim();
        self.ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
            acc.add(&k.adjoint().matmul(k))
        })
    }

    /// Action on an arbitrary operator of the input dimension.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = self.output_dim();
        self.ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
            acc.add(&k.matmul(x).matmul(&k.adjoint()))
        })
    }

    /// Choi operator `Σ_ij ch(|i⟩⟨j|) ⊗ |i⟩⟨j|` (unnormalized), dim out·in.
    ///
    /// Entry `((a,i),(b,j))` is `Σ_k K_ai conj(K_bj)`, so the Choi operator is
    /// `Σ_k v_k v_k†` with `v_k` the row-major entries of `K_k`.
    pub fn choi(&self) -> ComplexMatrix {
        let n = self.output_dim() * self.input_dim();
        let mut data = vec![ZERO; n * n];
        for k in &self.ops {
            let v = k.data();
            for (r, vr) in v.iter().enumerate() {
                if *vr == ZERO {
                    continue;
                }
                let row = &mut data[r * n..(r + 1) * n];
                for (slot, vc) in row.iter_mut().zip(v) {
                    *slot += vr * vc.conj();
                }
            }
        }
        ComplexMatrix::from_raw(n, n, data)
    }

    /// "self then next": Kraus family `{G_j F_i}`.
    pub fn then(&self, next: &Self) -> Result<Self> {
        if self.output_qubits != next.input_qubits {
            return Err(Error::DimensionMismatch(format!(
                "composing a {}-qubit output into a {}-qubit input",
                self.output_qubits, next.input_qubits
            )));
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|f| next.ops.iter().map(move |g| g.matmul(f)))
            .collect();
        Ok(Self {
            ops,
            input_qubits: self.input_qubits,
            output_qubits: next.output_qubits,
            deterministic: self.deterministic && next.deterministic,
        })
    }

    /// Parallel composition `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| a.kron(b)))
            .collect();
        Self {
            ops,
            input_qubits: self.input_qubits + other.input_qubits,
            output_qubits: self.output_qubits + other.output_qubits,
            deterministic: self.deterministic && other.deterministic,
        }
    }

    /// Convex mixture `λ·a + (1−λ)·b` as the Kraus family `{√λ A_i} ∪ {√(1−λ) B_k}`.
    pub fn mixture(lambda: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {lambda} outside [0, 1]"
            )));
        }
        if (a.input_qubits, a.output_qubits) != (b.input_qubits, b.output_qubits) {
            return Err(Error::DimensionMismatch(
                "mixing channels of different shape".into(),
            ));
        }
        let ops = a
            .ops
            .iter()
            .map(|k| k.scale_real(lambda.sqrt()))
            .chain(b.ops.iter().map(|k| k.scale_real((1.0 - lambda).sqrt())))
            .collect();
        Ok(Self {
            ops,
            input_qubits: a.input_qubits,
            output_qubits: a.output_qubits,
            deterministic: a.deterministic && b.deterministic,
        })
    }
}

/// Result of [`verify_cptp`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CptpReport {
    pub passed: bool,
    pub deterministic: bool,
    /// Max-entry deviation of `Σ K†K` from the identity.
    pub completeness_deviation: f64,
    /// Smallest eigenvalue of `I − Σ K†K`.
    pub deficiency_min_eigenvalue: f64,
    pub choi_min_eigenvalue: f64,
}

/// Checks complete positivity (Choi PSD) and, for deterministic channels,
/// trace preservation; for instrument elements, `Σ K†K ≤ I`.
pub fn verify_cptp(ch: &KrausChannel, tol: f64) -> CptpReport {
    let sum = ch.completeness();
    let identity = ComplexMatrix::identity(ch.input_dim());
    let completeness_deviation = sum.max_abs_diff(&identity);
    let deficiency_min_eigenvalue = hermitian_eigenvalues(&identity.sub(&sum))
        .map(|ev| ev[0])
        .unwrap_or(f64::NEG_INFINITY);
    let choi_min_eigenvalue = hermitian_eigenvalues(&ch.choi())
        .map(|ev| ev[0])
        .unwrap_or(f64::NEG_INFINITY);
    let cp = choi_min_eigenvalue >= -tol;
    let passed = cp
        && if ch.deterministic {
            completeness_deviation <= tol
        } else {
            deficiency_min_eigenvalue >= -tol
        };
    CptpReport {
        passed,
        deterministic: ch.deterministic,
        completeness_deviation,
        deficiency_min_eigenvalue,
        choi_min_eigenvalue,
    }
}

/// `Σ K ρ K†`. The result stays normalized only for deterministic channels.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel on dim {} applied to a state of dim {}",
            ch.input_dim(),
            rho.dim()
        )));
    }
    Ok(DensityMatrix::from_raw(
        ch.apply_operator(rho.matrix()),
        rho.is_normalized() && ch.deterministic,
    ))
}

/// Removes the coherences between `|0⟩` and `|1⟩` of one qubit.
pub fn dephase_qubit(rho: &DensityMatrix, qubit: usize) -> Result<DensityMatrix> {
    let n = rho.qubits().ok_or_else(|| {
        Error::DimensionMismatch(format!("dim {} is not a qubit register", rho.dim()))
    })?;
    if qubit >= n {
        return Err(Error::IndexOutOfRange {
            index: qubit,
            limit: n,
        });
    }
    let mask = 1usize << (n - 1 - qubit);
    let mut m = rho.matrix().clone();
    for r in 0..rho.dim() {
        for c in 0..rho.dim() {
            if (r ^ c) & mask != 0 {
                m.set(r, c, crate::linalg::ZERO);
            }
        }
    }
    Ok(DensityMatrix::from_raw(m, rho.is_normalized()))
}
