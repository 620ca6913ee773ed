//! Named gates and noise channels.

use std::f64::consts::FRAC_1_SQRT_2;

use super::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_raw(
        2,
        2,
        vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
    )
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real(2, 2, &[h, h, h, -h])
}

pub fn phase_s() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, C64::new(0.0, 1.0)])
}

pub fn phase_t() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[ONE, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ U`
pub fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let mut m = ComplexMatrix::identity(2 * d);
    for r in 0..d {
        for c in 0..d {
            m.set(d + r, d + c, u.get(r, c));
        }
    }
    m
}

pub fn cnot() -> ComplexMatrix {
    controlled(&pauli_x())
}

pub fn cz() -> ComplexMatrix {
    controlled(&pauli_z())
}

pub fn swap() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        m.set(r, c, ONE);
    }
    m
}

/// Controlled swap on (control, a, b).
pub fn cswap() -> ComplexMatrix {
    controlled(&swap())
}

/// Every parameter-free gate name accepted by [`unitary`].
pub const GATE_NAMES: &[&str] = &[
    "I", "X", "Y", "Z", "H", "S", "T", "CNOT", "CZ", "SWAP", "CSWAP",
];

/// Parameter-free named unitary.
pub fn unitary(name: &str) -> Result<ComplexMatrix> {
    Ok(match name {
        "I" => ComplexMatrix::identity(2),
        "X" => pauli_x(),
        "Y" => pauli_y(),
        "Z" => pauli_z(),
        "H" => hadamard(),
        "S" => phase_s(),
        "T" => phase_t(),
        "CNOT" => cnot(),
        "CZ" => cz(),
        "SWAP" => swap(),
        "CSWAP" => cswap(),
        other => return Err(Error::UnknownGate(other.to_string())),
    })
}

/// `{√(1−p) I, √p X}`
pub fn bit_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
        pauli_x().scale_real(p.sqrt()),
    ])
}

/// `{√(1−p) I, √p Z}`
pub fn phase_flip(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - p).sqrt()),
        pauli_z().scale_real(p.sqrt()),
    ])
}

/// `ρ ↦ (1−p) ρ + p I/2`; `p = 1` is the completely depolarizing channel.
pub fn depolarizing(p: f64) -> Result<KrausChannel> {
    check_probability(p)?;
    KrausChannel::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
        pauli_x().scale_real((p / 4.0).sqrt()),
        pauli_y().scale_real((p / 4.0).sqrt()),
        pauli_z().scale_real((p / 4.0).sqrt()),
    ])
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

/// Resolves a channel identifier: a gate name from [`GATE_NAMES`] or one of
/// `bitflip(p)`, `phaseflip(p)`, `depolarizing(p)`.
pub fn channel(id: &str) -> Result<KrausChannel> {
    if let Some((head, rest)) = id.split_once('(') {
        let arg = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::UnknownGate(id.to_string()))?;
        let p: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad parameter in `{id}`")))?;
        return match head {
            "bitflip" => bit_flip(p),
            "phaseflip" => phase_flip(p),
            "depolarizing" => depolarizing(p),
            _ => Err(Error::UnknownGate(id.to_string())),
        };
    }
    Ok(KrausChannel::from_unitary(unitary(id)?))
}
