//! Circuit realizations of the switch and the witnesses of what circuits
//! cannot do.

mod witness;

pub use witness::{loop_contraction_witness, witness_circuit, WitnessReport, PROBE_STATES};

use serde::Serialize;

use crate::channels::UnitaryBox;
use crate::circuit::{
    sample_outcomes, simulate_pure, simulate_with_postselection, CircuitDescription,
    MeasurementBasis, Node, OracleBindings, OracleBudget, OutcomeCounts, RegisterState,
};
use crate::error::{Error, Result};
use crate::higher_order::{dephased_switch_output, switched_unitary, ControlState};
use crate::linalg::{partial_trace, trace_distance, DensityMatrix, PureState};

/// Label of the successful Bell outcome.
pub const SUCCESS_LABEL: &str = "E";

fn register(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}{k}")).collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn need_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "boxes need at least one qubit".into(),
        ));
    }
    Ok(())
}

/// Controlled-swap sandwich with two calls to each oracle.
///
/// Wires `c, m1..mN, b1..bN`; `b` starts in `|0…0⟩`. The output of the
/// switch is read on the middle register `m`; `b` carries junk.
pub fn two_call_circuit(f_id: &str, g_id: &str, n: usize) -> Result<CircuitDescription> {
    need_qubits(n)?;
    let (m, b) = (register("m", n), register("b", n));
    let mut wires = vec!["c".to_string()];
    wires.extend(m.iter().cloned());
    wires.extend(b.iter().cloned());
    let mut c = CircuitDescription::new(&wires);
    for bk in &b {
        c.push(Node::prep("0", &[bk]));
    }
    let cswaps = |c: &mut CircuitDescription| {
        for (mk, bk) in m.iter().zip(&b) {
            c.push(Node::gate("CSWAP", &["c", mk, bk]));
        }
    };
    cswaps(&mut c);
    c.push(Node::oracle(g_id, &refs(&m)));
    c.push(Node::oracle(f_id, &refs(&b)));
    c.push(Node::oracle(f_id, &refs(&m)));
    c.push(Node::oracle(g_id, &refs(&b)));
    cswaps(&mut c);
    c.budget = OracleBudget::new().with(f_id, 2)?.with(g_id, 2)?;
    Ok(c)
}

/// Runs [`two_call_circuit`] on `|φ⟩ ⊗ |ψ⟩` and returns the state of
/// `control ⊗ middle register`.
pub fn run_two_call(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    psi: &PureState,
) -> Result<DensityMatrix> {
    let n = check_boxes(f, g, psi)?;
    let c = two_call_circuit("f", "g", n)?;
    let bindings = OracleBindings::new()
        .bind_unitary("f", f)
        .bind_unitary("g", g);
    let out = simulate_pure(&c, &bindings, &phi.to_state().tensor(psi))?;
    out.reduced_density(&(0..=n).collect::<Vec<_>>())
}

fn check_boxes(f: &UnitaryBox, g: &UnitaryBox, psi: &PureState) -> Result<usize> {
    let n = f.qubits();
    if g.qubits() != n || psi.qubits() != n {
        return Err(Error::DimensionMismatch(format!(
            "f on {n} qubits, g on {}, ψ on {}",
            g.qubits(),
            psi.qubits()
        )));
    }
    need_qubits(n)?;
    Ok(n)
}

/// One-call-each circuit using a Bell pair per qubit and post-selection.
///
/// Wires `c, m1..mN, a1..aN, b1..bN`. `(a_k, b_k)` start in `Φ⁺`; the
/// controlled swaps route either the input or half of each pair into the
/// `f` and `g` calls, and projecting `(a, b)` onto `Φ⁺` closes the wire from
/// the output of the first call back to the input of the second. The final
/// `X` on the control restores its labelling, so the result on
/// `control ⊗ m` is `|1⟩ ⊗ U_g U_f|ψ⟩` for control `|1⟩` and
/// `|0⟩ ⊗ U_f U_g|ψ⟩` for control `|0⟩`.
pub fn teleport_circuit(f_id: &str, g_id: &str, n: usize) -> Result<CircuitDescription> {
    need_qubits(n)?;
    let (m, a, b) = (register("m", n), register("a", n), register("b", n));
    let mut wires = vec!["c".to_string()];
    wires.extend(m.iter().cloned());
    wires.extend(a.iter().cloned());
    wires.extend(b.iter().cloned());
    let mut c = CircuitDescription::new(&wires);
    for (ak, bk) in a.iter().zip(&b) {
        c.push(Node::prep("PHI+", &[ak, bk]));
    }
    let cswaps = |c: &mut CircuitDescription| {
        for (mk, ak) in m.iter().zip(&a) {
            c.push(Node::gate("CSWAP", &["c", mk, ak]));
        }
    };
    cswaps(&mut c);
    c.push(Node::gate("X", &["c"]));
    c.push(Node::oracle(g_id, &refs(&m)));
    c.push(Node::oracle(f_id, &refs(&a)));
    cswaps(&mut c);
    c.push(Node::gate("X", &["c"]));
    let pairs: Vec<&str> = a
        .iter()
        .zip(&b)
        .flat_map(|(ak, bk)| [ak.as_str(), bk.as_str()])
        .collect();
    c.push(Node::measure(MeasurementBasis::Bell, &pairs));
    c.budget = OracleBudget::new().with(f_id, 1)?.with(g_id, 1)?;
    Ok(c)
}

/// Outcome of a post-selected run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PostselectedResult {
    pub success_probability: f64,
    /// State of `control ⊗ m` given success; `None` when success is impossible.
    pub conditional_state: Option<DensityMatrix>,
    pub shots_record: Option<OutcomeCounts>,
}

/// Analytic run of [`teleport_circuit`] on `|φ⟩ ⊗ |ψ⟩`, keeping outcome `E`.
pub fn teleport_switch(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    psi: &PureState,
) -> Result<PostselectedResult> {
    let n = check_boxes(f, g, psi)?;
    let c = teleport_circuit("f", "g", n)?;
    let bindings = OracleBindings::new()
        .bind_unitary("f", f)
        .bind_unitary("g", g);
    let input = RegisterState::Pure(phi.to_state().tensor(psi));
    let r = simulate_with_postselection(&c, &bindings, &input, SUCCESS_LABEL)?;
    let conditional_state = match r.state {
        Some(s) => Some(s.reduced(&(0..=n).collect::<Vec<_>>())?),
        None => None,
    };
    Ok(PostselectedResult {
        success_probability: r.probability,
        conditional_state,
        shots_record: None,
    })
}

/// [`teleport_switch`] plus a sampled record of the Bell outcomes.
pub fn teleport_switch_sampled(
    f: &UnitaryBox,
    g: &UnitaryBox,
    phi: &ControlState,
    psi: &PureState,
    shots: u64,
    seed: u64,
) -> Result<PostselectedResult> {
    let mut result = teleport_switch(f, g, phi, psi)?;
    let n = f.qubits();
    let c = teleport_circuit("f", "g", n)?;
    let bindings = OracleBindings::new()
        .bind_unitary("f", f)
        .bind_unitary("g", g);
    let input = RegisterState::Pure(phi.to_state().tensor(psi));
    result.shots_record = Some(sample_outcomes(&c, &bindings, &input, shots, seed)?);
    Ok(result)
}

/// `4^-N`, the success probability of [`teleport_switch`] on `N`-qubit boxes.
pub fn success_probability(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    Ok(0.25f64.powi(n as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationReport {
    /// `P(−)` of the control after the quantum-controlled switch.
    pub quantum_p_minus: f64,
    /// `P(−)` of the control record left by the classically controlled oracle.
    pub classical_p_minus: f64,
    /// Trace distance between the quantum-control output and a fresh `|+⟩`
    /// control next to the classical-control target.
    pub distance: f64,
    /// Trace distance between the quantum-control output and the same state
    /// with its control dephased.
    pub dephased_distance: f64,
}

/// Control `|+⟩`, target `|0⟩`: compares quantum control of the order with
/// classical control by measuring the control in the `{|+⟩, |−⟩}` basis.
pub fn separation_experiment(f: &UnitaryBox, g: &UnitaryBox) -> Result<SeparationReport> {
    if f.qubits() != 1 || g.qubits() != 1 {
        return Err(Error::DimensionMismatch(
            "separation experiment takes single-qubit boxes".into(),
        ));
    }
    let plus = PureState::named("+")?;
    let minus = PureState::named("-")?;
    let phi = ControlState::plus();
    let target = PureState::named("0")?;

    let quantum = plus
        .tensor(&target)
        .evolve(switched_unitary(f, g)?.matrix())?
        .to_density();
    let quantum_control = partial_trace(&quantum, &[2, 2], &[0])?;
    let quantum_p_minus = quantum_control.fidelity_with_pure(&minus)?;

    let classical = dephased_switch_output(f, g, &phi, &target.to_density())?;
    let classical_control = partial_trace(&classical, &[2, 2], &[0])?;
    let classical_p_minus = classical_control.fidelity_with_pure(&minus)?;
    let classical_target = partial_trace(&classical, &[2, 2], &[1])?;

    let fresh = plus.to_density().tensor(&classical_target);
    Ok(SeparationReport {
        quantum_p_minus,
        classical_p_minus,
        distance: trace_distance(&quantum, &fresh)?,
        dephased_distance: trace_distance(&quantum, &classical)?,
    })
}
