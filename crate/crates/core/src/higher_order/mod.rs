//! Maps that take boxes as input.
//!
//! Every construction follows one control labelling: a control in `|1⟩`
//! puts `f` in the first slot and runs "f then g"; a control in `|0⟩` runs
//! "g then f".

mod admissibility;

pub use admissibility::{admissibility_check, AdmissibilityReport, Construction};

use serde::Serialize;

use crate::channels::{
    apply_channel, dephase_qubit, verify_cptp, KrausChannel, UnitaryBox, CPTP_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::{
    partial_trace, ComplexMatrix, DensityMatrix, PureState, C64, DEFAULT_TOL, ONE, ZERO,
};

/// A classical control bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ControlBit(u8);

impl ControlBit {
    pub const ZERO: Self = ControlBit(0);
    pub const ONE: Self = ControlBit(1);

    pub fn new(value: u8) -> Result<Self> {
        match value {
            0 | 1 => Ok(ControlBit(value)),
            v => Err(Error::InvalidArgument(format!(
                "control bit must be 0 or 1, got {v}"
            ))),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

/// `α|0⟩ + β|1⟩` on the control qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlState {
    pub alpha: C64,
    pub beta: C64,
}

impl ControlState {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "|α|² + |β|² = {norm}, expected 1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn basis(x: ControlBit) -> Self {
        if x.value() == 1 {
            Self {
                alpha: ZERO,
                beta: ONE,
            }
        } else {
            Self {
                alpha: ONE,
                beta: ZERO,
            }
        }
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: h, beta: h }
    }

    /// A single-qubit pure state read as a control.
    pub fn from_state(s: &PureState) -> Result<Self> {
        match s.amplitudes() {
            [a, b] => Self::new(*a, *b),
            _ => Err(Error::DimensionMismatch(format!(
                "control needs 1 qubit, got {}",
                s.qubits()
            ))),
        }
    }

    pub fn to_state(&self) -> PureState {
        PureState::from_raw(vec![self.alpha, self.beta])
    }

    /// `|⟨0|φ⟩|²`
    pub fn p0(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `|⟨1|φ⟩|²`
    pub fn p1(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

pub(crate) fn projector(bit: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(2, 2);
    p.set(bit, bit, ONE);
    p
}

fn bra(bit: usize) -> ComplexMatrix {
    let mut b = ComplexMatrix::zeros(1, 2);
    b.set(0, bit, ONE);
    b
}

fn same_size(f: usize, g: usize) -> Result<()> {
    if f != g {
        return Err(Error::DimensionMismatch(format!(
            "boxes act on {f} and {g} qubits"
        )));
    }
    Ok(())
}

fn endomorphism(ch: &KrausChannel, slot: &str) -> Result<usize> {
    if ch.input_qubits() != ch.output_qubits() {
        return Err(Error::DimensionMismatch(format!(
            "{slot} maps {} qubits to {}",
            ch.input_qubits(),
            ch.output_qubits()
        )));
    }
    Ok(ch.input_qubits())
}

/// `x = 1`: "f then g". `x = 0`: "g then f".
pub fn switch_compose(x: ControlBit, f: &UnitaryBox, g: &UnitaryBox) -> Result<UnitaryBox> {
    same_size(f.qubits(), g.qubits())?;
    if x.value() == 1 {
        f.then(g)
    } else {
        g.then(f)
    }
}

/// [`switch_compose`] for channels.
pub fn switch_compose_channel(
    x: ControlBit,
    f: &KrausChannel,
    g: &KrausChannel,
) -> Result<KrausChannel> {
    same_size(endomorphism(f, "f")?, endomorphism(g, "g")?)?;
    if x.value() == 1 {
        f.then(g)
    } else {
        g.then(f)
    }
}

/// Oracle with classical control: the control is read in the computational
/// basis and consumed. `x = 1` feeds `f` into slot 1 and `g` into slot 2.
pub fn classical_oracle(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<DensityMatrix> {
    same_size(f.qubits(), g.qubits())?;
    for rho in [rho1, rho2] {
        if rho.dim() != f.dim() {
            return Err(Error::DimensionMismatch(format!(
                "slot state of dim {} for boxes of dim {}",
                rho.dim(),
                f.dim()
            )));
        }
    }
    let fg = rho1
        .conjugate(f.matrix())?
        .tensor(&rho2.conjugate(g.matrix())?);
    let gf = rho1
        .conjugate(g.matrix())?
        .tensor(&rho2.conjugate(f.matrix())?);
    let m = fg
        .matrix()
        .scale_real(phi.p1())
        .add(&gf.matrix().scale_real(phi.p0()));
    Ok(DensityMatrix::from_raw(
        m,
        rho1.is_normalized() && rho2.is_normalized(),
    ))
}

/// [`classical_oracle`] as a channel from `control ⊗ slot1 ⊗ slot2` to
/// `slot1 ⊗ slot2`, for arbitrary channels in the slots. Kraus operators are
/// `⟨1| ⊗ F_i ⊗ G_j` and `⟨0| ⊗ G_j ⊗ F_i`.
pub fn classical_oracle_channel(f: &KrausChannel, g: &KrausChannel) -> Result<KrausChannel> {
    same_size(endomorphism(f, "f")?, endomorphism(g, "g")?)?;
    let mut ops = Vec::with_capacity(2 * f.ops().len() * g.ops().len());
    for fi in f.ops() {
        for gj in g.ops() {
            ops.push(bra(1).kron(&fi.kron(gj)));
            ops.push(bra(0).kron(&gj.kron(fi)));
        }
    }
    KrausChannel::unchecked(ops, f.is_deterministic() && g.is_deterministic())
}

/// `W = |1⟩⟨1| ⊗ U_f ⊗ U_g + |0⟩⟨0| ⊗ U_g ⊗ U_f` on `control ⊗ slot1 ⊗ slot2`.
pub fn quantum_control_unitary(f: &UnitaryBox, g: &UnitaryBox) -> Result<UnitaryBox> {
    same_size(f.qubits(), g.qubits())?;
    let (uf, ug) = (f.matrix(), g.matrix());
    let w = projector(1)
        .kron(&uf.kron(ug))
        .add(&projector(0).kron(&ug.kron(uf)));
    UnitaryBox::new(w)
}

/// Kraus extension of [`quantum_control_unitary`]:
/// `|1⟩⟨1| ⊗ F_i ⊗ G_j + |0⟩⟨0| ⊗ G_j ⊗ F_i`.
pub fn quantum_control_channel(f: &KrausChannel, g: &KrausChannel) -> Result<KrausChannel> {
    same_size(endomorphism(f, "f")?, endomorphism(g, "g")?)?;
    let mut ops = Vec::with_capacity(f.ops().len() * g.ops().len());
    for fi in f.ops() {
        for gj in g.ops() {
            ops.push(
                projector(1)
                    .kron(&fi.kron(gj))
                    .add(&projector(0).kron(&gj.kron(fi))),
            );
        }
    }
    KrausChannel::unchecked(ops, f.is_deterministic() && g.is_deterministic())
}

/// `|1⟩⟨1| ⊗ U_g U_f + |0⟩⟨0| ⊗ U_f U_g` on `control ⊗ target`.
pub fn switched_unitary(f: &UnitaryBox, g: &UnitaryBox) -> Result<UnitaryBox> {
    same_size(f.qubits(), g.qubits())?;
    let (uf, ug) = (f.matrix(), g.matrix());
    let s = projector(1)
        .kron(&ug.matmul(uf))
        .add(&projector(0).kron(&uf.matmul(ug)));
    UnitaryBox::new(s)
}

/// Kraus family `S_ij = |1⟩⟨1| ⊗ G_j F_i + |0⟩⟨0| ⊗ F_i G_j` on
/// `control ⊗ target`. Both inputs must be deterministic channels.
pub fn switched_channel(f: &KrausChannel, g: &KrausChannel) -> Result<KrausChannel> {
    same_size(endomorphism(f, "f")?, endomorphism(g, "g")?)?;
    for ch in [f, g] {
        let report = verify_cptp(ch, CPTP_TOL);
        if !ch.is_deterministic() || !report.passed {
            return Err(Error::NotCptp {
                deviation: report.completeness_deviation,
            });
        }
    }
    Ok(switched_channel_unchecked(f, g))
}

pub(crate) fn switched_channel_unchecked(f: &KrausChannel, g: &KrausChannel) -> KrausChannel {
    let mut ops = Vec::with_capacity(f.ops().len() * g.ops().len());
    for fi in f.ops() {
        for gj in g.ops() {
            ops.push(
                projector(1)
                    .kron(&gj.matmul(fi))
                    .add(&projector(0).kron(&fi.matmul(gj))),
            );
        }
    }
    KrausChannel::unchecked(ops, f.is_deterministic() && g.is_deterministic())
        .expect("square Kraus operators of equal shape")
}

/// Runs [`quantum_control_unitary`] on `|φ⟩⟨φ| ⊗ ρ1 ⊗ ρ2` and discards the
/// control.
pub fn reduce_to_classical(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<DensityMatrix> {
    let joint = quantum_control_joint(f, g, phi, rho1, rho2)?;
    partial_trace(&joint, &[2, f.dim(), f.dim()], &[1, 2])
}

/// State of `control ⊗ slot1 ⊗ slot2` after [`quantum_control_unitary`].
pub fn quantum_control_joint(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
) -> Result<DensityMatrix> {
    let w = quantum_control_unitary(f, g)?;
    let input = phi.to_state().to_density().tensor(rho1).tensor(rho2);
    input.conjugate(w.matrix())
}

/// Incoherent mixture of the two orders on one target:
/// `|β|² (g·f) ρ (g·f)† + |α|² (f·g) ρ (f·g)†`.
pub fn classical_switch(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let fg = switch_compose(ControlBit::ONE, f, g)?;
    let gf = switch_compose(ControlBit::ZERO, f, g)?;
    let a = rho.conjugate(fg.matrix())?;
    let b = rho.conjugate(gf.matrix())?;
    let m = a
        .matrix()
        .scale_real(phi.p1())
        .add(&b.matrix().scale_real(phi.p0()));
    Ok(DensityMatrix::from_raw(m, rho.is_normalized()))
}

/// Output of [`switched_unitary`] on `|φ⟩ ⊗ ρ` with the control dephased.
pub fn dephased_switch_output(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let s = switched_unitary(f, g)?;
    let out = apply_channel(&s.to_channel(), &phi.to_state().to_density().tensor(rho))?;
    dephase_qubit(&out, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::builtin;
    use crate::linalg::{is_unitary, trace_distance, PureState};
    use crate::random::{random_density, random_pure_state, random_unitary, rng_for};
    use proptest::prelude::*;

    fn named(name: &str) -> UnitaryBox {
        UnitaryBox::named(name).unwrap()
    }

    fn state(name: &str) -> PureState {
        PureState::named(name).unwrap()
    }

    fn random_box(qubits: usize, seed: u64, stream: u64) -> UnitaryBox {
        UnitaryBox::new(random_unitary(1 << qubits, &mut rng_for(seed, stream))).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn switch_compose_orders() {
        let (x, z) = (named("X"), named("Z"));
        // X·Z = [[0, -1], [1, 0]]
        let xz = ComplexMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let out = switch_compose(ControlBit::ZERO, &x, &z).unwrap();
        assert!(out.matrix().max_abs_diff(&xz) < 1e-15);
        // x = 1: X first, then Z → Z·X
        let zx = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let out = switch_compose(ControlBit::ONE, &x, &z).unwrap();
        assert!(out.matrix().max_abs_diff(&zx) < 1e-15);

        let id = UnitaryBox::identity(1);
        for bit in [ControlBit::ZERO, ControlBit::ONE] {
            let out = switch_compose(bit, &id, &id).unwrap();
            assert!(out.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
        assert!(switch_compose(ControlBit::ONE, &x, &UnitaryBox::identity(2)).is_err());
        assert!(ControlBit::new(2).is_err());
    }

    #[test]
    fn control_state_normalization() {
        assert!(ControlState::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        let plus = ControlState::plus();
        assert!((plus.p0() - 0.5).abs() < 1e-15 && (plus.p1() - 0.5).abs() < 1e-15);
        assert_eq!(ControlState::basis(ControlBit::ONE).p1(), 1.0);
    }

    #[test]
    fn classical_oracle_examples() {
        let (x, z) = (named("X"), named("Z"));
        let zero = state("0").to_density();
        let one = state("1").to_density();

        // φ = |1⟩: X|0⟩ ⊗ Z|0⟩
        let out =
            classical_oracle(&x, &z, &ControlState::basis(ControlBit::ONE), &zero, &zero).unwrap();
        assert!(out.matrix().max_abs_diff(one.tensor(&zero).matrix()) < 1e-15);

        // φ = |+⟩: ½|1⟩⟨1|⊗|0⟩⟨0| + ½|0⟩⟨0|⊗|1⟩⟨1|, diagonal (0, ½, ½, 0)
        let out = classical_oracle(&x, &z, &ControlState::plus(), &zero, &zero).unwrap();
        let expected =
            ComplexMatrix::diagonal(&[c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);

        // f = g: no dependence on φ
        let h = named("H");
        let a = classical_oracle(&h, &h, &ControlState::plus(), &zero, &one).unwrap();
        let b =
            classical_oracle(&h, &h, &ControlState::basis(ControlBit::ZERO), &zero, &one).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn classical_oracle_channel_matches_formula() {
        let (f, g) = (random_box(1, 3, 0), random_box(1, 3, 1));
        let mut rng = rng_for(3, 2);
        let phi = ControlState::from_state(&random_pure_state(1, &mut rng)).unwrap();
        let (r1, r2) = (random_density(1, &mut rng), random_density(1, &mut rng));
        let direct = classical_oracle(&f, &g, &phi, &r1, &r2).unwrap();
        let ch = classical_oracle_channel(&f.to_channel(), &g.to_channel()).unwrap();
        assert!(verify_cptp(&ch, 1e-10).passed);
        let via_channel =
            apply_channel(&ch, &phi.to_state().to_density().tensor(&r1).tensor(&r2)).unwrap();
        assert!(trace_distance(&direct, &via_channel).unwrap() < 1e-12);
    }

    #[test]
    fn quantum_control_block_structure() {
        let (x, z) = (named("X"), named("Z"));
        let w = quantum_control_unitary(&x, &z).unwrap();
        // direct 8×8: control bit is the top index bit; rows/cols 4..8 carry X⊗Z,
        // rows/cols 0..4 carry Z⊗X
        let xz = builtin::pauli_x().kron(&builtin::pauli_z());
        let zx = builtin::pauli_z().kron(&builtin::pauli_x());
        let mut direct = ComplexMatrix::zeros(8, 8);
        for r in 0..4 {
            for col in 0..4 {
                direct.set(r, col, zx.get(r, col));
                direct.set(r + 4, col + 4, xz.get(r, col));
            }
        }
        assert!(w.matrix().max_abs_diff(&direct) < 1e-15);

        let id = UnitaryBox::identity(1);
        let w = quantum_control_unitary(&id, &id).unwrap();
        assert!(w.matrix().max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
    }

    #[test]
    fn switched_unitary_superposes_orders() {
        // control |+⟩, target |0⟩, f = X, g = Z:
        // (|0⟩ ⊗ XZ|0⟩ + |1⟩ ⊗ ZX|0⟩)/√2 = (|0⟩|1⟩ − |1⟩|1⟩)/√2
        let s = switched_unitary(&named("X"), &named("Z")).unwrap();
        let out = state("+").tensor(&state("0")).evolve(s.matrix()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0), c(-h, 0.0)];
        for (a, b) in out.amplitudes().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        // the branches differ only by a sign: product |−⟩ ⊗ |1⟩, control flipped
        let control = out.reduced_density(&[0]).unwrap();
        assert!((control.fidelity_with_pure(&state("-")).unwrap() - 1.0).abs() < 1e-12);
        // X and H neither commute nor anticommute: the control gets entangled
        let s = switched_unitary(&named("X"), &named("H")).unwrap();
        let out = state("+").tensor(&state("0")).evolve(s.matrix()).unwrap();
        assert!(out.reduced_density(&[0]).unwrap().purity() < 1.0 - 1e-3);

        // Z and S commute: control factorizes
        let s = switched_unitary(&named("Z"), &named("S")).unwrap();
        let out = state("+").tensor(&state("+i")).evolve(s.matrix()).unwrap();
        assert!((out.reduced_density(&[0]).unwrap().purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn switched_channel_examples() {
        let f = builtin::bit_flip(0.3).unwrap();
        let g = builtin::phase_flip(0.4).unwrap();
        let s = switched_channel(&f, &g).unwrap();
        let r = verify_cptp(&s, 1e-10);
        assert!(r.passed && r.completeness_deviation < 1e-10, "{r:?}");

        // unitary inputs: the one-element family is switched_unitary
        let (x, h) = (named("X"), named("H"));
        let s = switched_channel(&x.to_channel(), &h.to_channel()).unwrap();
        assert_eq!(s.ops().len(), 1);
        assert!(s.ops()[0].max_abs_diff(switched_unitary(&x, &h).unwrap().matrix()) < 1e-15);

        // completely depolarizing slots: target maximally mixed
        let dep = builtin::depolarizing(1.0).unwrap();
        let s = switched_channel(&dep, &dep).unwrap();
        let input = state("+").tensor(&state("1")).to_density();
        let out = apply_channel(&s, &input).unwrap();
        let target = partial_trace(&out, &[2, 2], &[1]).unwrap();
        assert!(
            target
                .matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                < 1e-12
        );

        let half =
            KrausChannel::instrument(vec![ComplexMatrix::identity(2).scale_real(0.5)]).unwrap();
        assert!(matches!(
            switched_channel(&half, &f),
            Err(Error::NotCptp { .. })
        ));
        assert!(switched_channel(&f, &KrausChannel::identity(2)).is_err());
    }

    #[test]
    fn reduction_with_coherence_present() {
        let (x, z) = (named("X"), named("Z"));
        let zero = state("0").to_density();
        let phi = ControlState::plus();
        let reduced = reduce_to_classical(&x, &z, &phi, &zero, &zero).unwrap();
        let classical = classical_oracle(&x, &z, &phi, &zero, &zero).unwrap();
        assert!(trace_distance(&reduced, &classical).unwrap() < 1e-12);

        // the joint state is not control ⊗ (reduced targets)
        let joint = quantum_control_joint(&x, &z, &phi, &zero, &zero).unwrap();
        let control = partial_trace(&joint, &[2, 2, 2], &[0]).unwrap();
        let product = control.tensor(&reduced);
        assert!(trace_distance(&joint, &product).unwrap() > 0.1);

        for bit in [ControlBit::ZERO, ControlBit::ONE] {
            let phi = ControlState::basis(bit);
            let a = reduce_to_classical(&x, &z, &phi, &zero, &zero).unwrap();
            let b = classical_oracle(&x, &z, &phi, &zero, &zero).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn quantum_control_is_unitary(seed in any::<u64>(), qubits in 1usize..=2) {
            let w = quantum_control_unitary(&random_box(qubits, seed, 0), &random_box(qubits, seed, 1)).unwrap();
            prop_assert_eq!(w.qubits(), 2 * qubits + 1);
            prop_assert!(is_unitary(w.matrix(), 1e-10).unwrap());
        }

        #[test]
        fn basis_control_reproduces_switch(seed in any::<u64>(), bit in 0u8..=1) {
            let (f, g) = (random_box(1, seed, 0), random_box(1, seed, 1));
            let x = ControlBit::new(bit).unwrap();
            let s = switched_unitary(&f, &g).unwrap();
            let sw = switch_compose(x, &f, &g).unwrap();
            let b = bit as usize;
            for r in 0..2 {
                for col in 0..2 {
                    prop_assert!((s.matrix().get(2 * b + r, 2 * b + col) - sw.matrix().get(r, col)).norm() <= 1e-12);
                }
            }
        }

        #[test]
        fn dephased_control_gives_classical_mixture(seed in any::<u64>()) {
            let (f, g) = (random_box(1, seed, 0), random_box(1, seed, 1));
            let mut rng = rng_for(seed, 2);
            let phi = ControlState::from_state(&random_pure_state(1, &mut rng)).unwrap();
            let rho = random_density(1, &mut rng);
            let out = dephased_switch_output(&f, &g, &phi, &rho).unwrap();
            let target = partial_trace(&out, &[2, 2], &[1]).unwrap();
            let mixture = classical_switch(&f, &g, &phi, &rho).unwrap();
            prop_assert!(trace_distance(&target, &mixture).unwrap() < 1e-10);
        }

        #[test]
        fn reduction_matches_classical_oracle(seed in any::<u64>()) {
            let (f, g) = (random_box(1, seed, 0), random_box(1, seed, 1));
            let mut rng = rng_for(seed, 2);
            let phi = ControlState::from_state(&random_pure_state(1, &mut rng)).unwrap();
            let (r1, r2) = (random_density(1, &mut rng), random_density(1, &mut rng));
            let a = reduce_to_classical(&f, &g, &phi, &r1, &r2).unwrap();
            let b = classical_oracle(&f, &g, &phi, &r1, &r2).unwrap();
            prop_assert!(trace_distance(&a, &b).unwrap() < 1e-10);
        }

        #[test]
        fn commuting_boxes_leave_control_pure(seed in any::<u64>(), t in 0.0f64..6.3, u in 0.0f64..6.3) {
            let phase = |a: f64| UnitaryBox::new(ComplexMatrix::diagonal(&[c(1.0, 0.0), C64::from_polar(1.0, a)])).unwrap();
            let s = switched_unitary(&phase(t), &phase(u)).unwrap();
            let mut rng = rng_for(seed, 0);
            let input = random_pure_state(1, &mut rng).tensor(&random_pure_state(1, &mut rng));
            let out = input.evolve(s.matrix()).unwrap();
            prop_assert!((out.reduced_density(&[0]).unwrap().purity() - 1.0).abs() < 1e-9);
        }
    }
}
