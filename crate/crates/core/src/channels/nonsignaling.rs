use serde::Serialize;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{partial_trace_operator, ComplexMatrix, ONE};

/// A channel on `A ⊗ B` with the same part sizes on input and output.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteBox {
    channel: KrausChannel,
    qubits_a: usize,
    qubits_b: usize,
}

impl BipartiteBox {
    pub fn new(channel: KrausChannel, qubits_a: usize, qubits_b: usize) -> Result<Self> {
        let total = qubits_a + qubits_b;
        if qubits_a == 0 || qubits_b == 0 {
            return Err(Error::InvalidArgument(
                "both parts need at least one qubit".into(),
            ));
        }
        if channel.input_qubits() != total || channel.output_qubits() != total {
            return Err(Error::DimensionMismatch(format!(
                "channel {}→{} qubits does not split as {qubits_a}+{qubits_b}",
                channel.input_qubits(),
                channel.output_qubits()
            )));
        }
        Ok(Self {
            channel,
            qubits_a,
            qubits_b,
        })
    }

    /// `a ⊗ b`
    pub fn product(a: &KrausChannel, b: &KrausChannel) -> Result<Self> {
        if a.input_qubits() != a.output_qubits() || b.input_qubits() != b.output_qubits() {
            return Err(Error::DimensionMismatch(
                "parts must map n qubits to n qubits".into(),
            ));
        }
        Self::new(a.tensor(b), a.input_qubits(), b.input_qubits())
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn qubits_a(&self) -> usize {
        self.qubits_a
    }

    pub fn qubits_b(&self) -> usize {
        self.qubits_b
    }
}

/// Per-direction verdicts of [`is_non_signaling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonSignalingReport {
    pub non_signaling: bool,
    /// How much B's reduced output moves with A's input.
    pub a_to_b_deviation: f64,
    /// How much A's reduced output moves with B's input.
    pub b_to_a_deviation: f64,
}

fn unit(dim: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(dim, dim);
    e.set(i, j, ONE);
    e
}

/// Max-entry deviation of `Tr_src[ch(E_ij ⊗ F_kl)]` from
/// `δ_ij Tr_src[ch(E_00 ⊗ F_kl)]` over matrix units of both inputs, where
/// `src` is the signalling part. Zero exactly when the reduced map on the
/// other part does not depend on the `src` input.
fn directional_deviation(b: &BipartiteBox, src_is_a: bool) -> Result<f64> {
    let da = 1usize << b.qubits_a;
    let db = 1usize << b.qubits_b;
    let dims = [da, db];
    let (d_src, d_dst, keep) = if src_is_a { (da, db, 1) } else { (db, da, 0) };
    let mut worst = 0.0f64;
    for k in 0..d_dst {
        for l in 0..d_dst {
            let f = unit(d_dst, k, l);
            let joint = |e: &ComplexMatrix| {
                if src_is_a {
                    e.kron(&f)
                } else {
                    f.kron(e)
                }
            };
            let reference = partial_trace_operator(
                &b.channel.apply_operator(&joint(&unit(d_src, 0, 0))),
                &dims,
                &[keep],
            )?;
            for i in 0..d_src {
                for j in 0..d_src {
                    let out = partial_trace_operator(
                        &b.channel.apply_operator(&joint(&unit(d_src, i, j))),
                        &dims,
                        &[keep],
                    )?;
                    let dev = if i == j {
                        out.max_abs_diff(&reference)
                    } else {
                        out.max_abs()
                    };
                    worst = worst.max(dev);
                }
            }
        }
    }
    Ok(worst)
}

/// Channel-level non-signaling test in both directions.
pub fn is_non_signaling(b: &BipartiteBox, tol: f64) -> NonSignalingReport {
    let a_to_b = directional_deviation(b, true).expect("box dims checked at construction");
    let b_to_a = directional_deviation(b, false).expect("box dims checked at construction");
    NonSignalingReport {
        non_signaling: a_to_b <= tol && b_to_a <= tol,
        a_to_b_deviation: a_to_b,
        b_to_a_deviation: b_to_a,
    }
}
