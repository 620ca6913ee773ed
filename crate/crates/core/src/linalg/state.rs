use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use super::DEFAULT_TOL;
use crate::error::{Error, Result};

fn qubits_for_dim(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

/// Normalized state vector on `qubits` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct PureState {
    amplitudes: Vec<C64>,
    qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let qubits = qubits_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::InvalidState(format!(
                "{} amplitudes is not a power of two",
                amplitudes.len()
            ))
        })?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sqr} differs from 1"
            )));
        }
        Ok(Self { amplitudes, qubits })
    }

    /// Scales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        let qubits = qubits_for_dim(amplitudes.len()).expect("power-of-two length");
        Self { amplitudes, qubits }
    }

    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, limit: dim });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self::from_raw(amps))
    }

    /// Single-qubit states by name: `0`, `1`, `+`, `-`, `+i`, `-i`;
    /// two-qubit Bell states `PHI+`, `PHI-`, `PSI+`, `PSI-`.
    pub fn named(name: &str) -> Result<Self> {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let hi = C64::new(0.0, FRAC_1_SQRT_2);
        let amps = match name {
            "0" => vec![ONE, ZERO],
            "1" => vec![ZERO, ONE],
            "+" => vec![h, h],
            "-" => vec![h, -h],
            "+i" => vec![h, hi],
            "-i" => vec![h, -hi],
            "PHI+" => vec![h, ZERO, ZERO, h],
            "PHI-" => vec![h, ZERO, ZERO, -h],
            "PSI+" => vec![ZERO, h, h, ZERO],
            "PSI-" => vec![ZERO, h, -h, ZERO],
            other => return Err(Error::UnknownState(other.to_string())),
        };
        Ok(Self::from_raw(amps))
    }

    pub fn phi_plus() -> Self {
        Self::named("PHI+").expect("built-in state")
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self::from_raw(amps)
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.shape() != (self.dim(), self.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a state of dim {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::new(u.matvec(&self.amplitudes))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(
            ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
            true,
        )
    }

    /// Reduced density matrix on the kept qubits (in the given order),
    /// computed directly from the amplitudes.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        reduced_from_amplitudes(&self.amplitudes, self.qubits, keep)
    }
}

pub(crate) fn reduced_from_amplitudes(
    amps: &[C64],
    n: usize,
    keep: &[usize],
) -> Result<DensityMatrix> {
    for (i, &q) in keep.iter().enumerate() {
        if q >= n {
            return Err(Error::IndexOutOfRange { index: q, limit: n });
        }
        if keep[..i].contains(&q) {
            return Err(Error::InvalidArgument(format!("qubit {q} listed twice")));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let mut order = keep.to_vec();
    order.extend(&traced);
    let permuted = super::qubits::permute_qubits(amps, n, &order);
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for t in 0..dt {
                acc += permuted[i * dt + t] * permuted[j * dt + t].conj();
            }
            out.set(i, j, acc);
        }
    }
    let normalized = (out.trace().re - 1.0).abs() <= DEFAULT_TOL;
    Ok(DensityMatrix::from_raw(out, normalized))
}

impl TryFrom<Vec<[f64; 2]>> for PureState {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<PureState> for Vec<[f64; 2]> {
    fn from(s: PureState) -> Self {
        s.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

/// Density operator. Post-selected branches carry `normalized == false`
/// and trace in (0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    normalized: bool,
}

impl DensityMatrix {
    /// Validates a normalized density matrix: Hermitian, PSD, unit trace.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self {
            matrix,
            normalized: true,
        };
        rho.check(DEFAULT_TOL)?;
        Ok(rho)
    }

    /// Validates a subnormalized branch: Hermitian, PSD, 0 < trace ≤ 1.
    pub fn subnormalized(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self {
            matrix,
            normalized: false,
        };
        rho.check(DEFAULT_TOL)?;
        Ok(rho)
    }

    pub(crate) fn from_raw(matrix: ComplexMatrix, normalized: bool) -> Self {
        Self { matrix, normalized }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_raw(
            ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            true,
        )
    }

    /// Checks every invariant at tolerance `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} density matrix",
                m.rows(),
                m.cols()
            )));
        }
        let herm = m.max_abs_diff(&m.adjoint());
        if herm > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let min_eig = hermitian_eigenvalues(m)?[0];
        if min_eig < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        let tr = m.trace().re;
        if self.normalized {
            if (tr - 1.0).abs() > tol {
                return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
            }
        } else if !(tr > 0.0 && tr <= 1.0 + tol) {
            return Err(Error::InvalidState(format!(
                "branch trace {tr} outside (0, 1]"
            )));
        }
        Ok(())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn qubits(&self) -> Option<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self::from_raw(
            self.matrix.kron(&other.matrix),
            self.normalized && other.normalized,
        )
    }

    /// Divides by the trace. Fails on a zero-weight branch.
    pub fn renormalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidState(format!(
                "cannot renormalize trace {tr}"
            )));
        }
        Ok(Self::from_raw(self.matrix.scale_real(1.0 / tr), true))
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn fidelity_with_pure(&self, psi: &PureState) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dim {} against density matrix of dim {}",
                psi.dim(),
                self.dim()
            )));
        }
        let v = self.matrix.matvec(psi.amplitudes());
        Ok(psi
            .amplitudes()
            .iter()
            .zip(&v)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .re)
    }

    /// U ρ U†
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on a density matrix of dim {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Ok(Self::from_raw(
            u.matmul(&self.matrix).matmul(&u.adjoint()),
            self.normalized,
        ))
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.to_density()
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        Self::new(m).map_err(serde::de::Error::custom)
    }
}
