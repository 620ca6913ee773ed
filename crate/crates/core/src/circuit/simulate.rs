use std::collections::BTreeMap;

use super::measure::{sample_distribution, OutcomeCounts};
use super::validate::validate_structure;
use super::{CircuitDescription, Node};
use crate::channels::{KrausChannel, UnitaryBox};
use crate::error::{Error, Result};
use crate::linalg::qubits::{apply_on_qubits, conjugate_on_qubits, permute_qubits};
use crate::linalg::{partial_trace_operator, ComplexMatrix, DensityMatrix, PureState, C64, ZERO};

/// Branch weights below this are reported as a vanished outcome.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Concrete boxes for the oracle ids of a circuit, resolved at simulation time.
#[derive(Clone, Debug, Default)]
pub struct OracleBindings(BTreeMap<String, KrausChannel>);

impl OracleBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, id: &str, channel: KrausChannel) -> Self {
        self.0.insert(id.to_string(), channel);
        self
    }

    pub fn bind_unitary(self, id: &str, u: &UnitaryBox) -> Self {
        self.bind(id, u.to_channel())
    }

    pub fn get(&self, id: &str) -> Result<&KrausChannel> {
        self.0
            .get(id)
            .ok_or_else(|| Error::UnboundOracle(id.to_string()))
    }
}

/// Input or output of a simulation: a state vector or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum RegisterState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl RegisterState {
    pub fn qubits(&self) -> usize {
        match self {
            RegisterState::Pure(s) => s.qubits(),
            RegisterState::Mixed(rho) => rho.qubits().unwrap_or(0),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            RegisterState::Pure(s) => s.to_density(),
            RegisterState::Mixed(rho) => rho.clone(),
        }
    }

    /// Reduced state on the listed qubits (ascending order).
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        match self {
            RegisterState::Pure(s) => s.reduced_density(&keep),
            RegisterState::Mixed(rho) => {
                let dims = vec![2; self.qubits()];
                let m = partial_trace_operator(rho.matrix(), &dims, &keep)?;
                Ok(DensityMatrix::from_raw(m, rho.is_normalized()))
            }
        }
    }
}

impl From<PureState> for RegisterState {
    fn from(s: PureState) -> Self {
        RegisterState::Pure(s)
    }
}

impl From<DensityMatrix> for RegisterState {
    fn from(rho: DensityMatrix) -> Self {
        RegisterState::Mixed(rho)
    }
}

/// Working register during simulation: amplitudes or a row-major density matrix.
enum Working {
    Pure(Vec<C64>),
    Mixed(Vec<C64>),
}

struct Run<'a> {
    circuit: &'a CircuitDescription,
    bindings: &'a OracleBindings,
    n: usize,
}

impl<'a> Run<'a> {
    fn new(circuit: &'a CircuitDescription, bindings: &'a OracleBindings) -> Result<Self> {
        let report = validate_structure(circuit);
        if !report.passed() {
            let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidCircuit(msgs.join("; ")));
        }
        Ok(Self {
            circuit,
            bindings,
            n: circuit.wires.len(),
        })
    }

    fn targets(&self, node: &Node) -> Vec<usize> {
        node.wires()
            .iter()
            .map(|w| self.circuit.wire_index(w).expect("validated wire"))
            .collect()
    }

    fn node_channel(&self, node: &Node) -> Result<Option<KrausChannel>> {
        let ch = match node {
            Node::Gate { gate, .. } => gate.channel()?,
            Node::Oracle { id, wires } => {
                let ch = self.bindings.get(id)?;
                if ch.input_qubits() != wires.len() || ch.output_qubits() != wires.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "oracle `{id}` bound to a {}→{} qubit box, called on {} wires",
                        ch.input_qubits(),
                        ch.output_qubits(),
                        wires.len()
                    )));
                }
                ch.clone()
            }
            Node::Prep { .. } | Node::Measure { .. } => return Ok(None),
        };
        Ok(Some(ch))
    }

    /// True when every gate and oracle is a single unitary.
    fn all_unitary(&self) -> Result<bool> {
        for node in &self.circuit.nodes {
            if let Some(ch) = self.node_channel(node)? {
                if ch.as_unitary().is_none() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Source order of qubits after tensoring the input with every preparation,
    /// and the prepared amplitudes in that order.
    fn initial_vector(&self, input: &PureState) -> Result<Vec<C64>> {
        let (order, preps) = self.layout(input.qubits())?;
        let mut amps = input.clone();
        for s in &preps {
            amps = amps.tensor(s);
        }
        Ok(permute_qubits(amps.amplitudes(), self.n, &order))
    }

    fn initial_density(&self, input: &DensityMatrix) -> Result<Vec<C64>> {
        let qubits = input.qubits().ok_or_else(|| {
            Error::DimensionMismatch(format!("input dim {} is not a qubit register", input.dim()))
        })?;
        let (order, preps) = self.layout(qubits)?;
        let mut rho = input.clone();
        for s in &preps {
            rho = rho.tensor(&s.to_density());
        }
        let doubled: Vec<usize> = order
            .iter()
            .copied()
            .chain(order.iter().map(|q| q + self.n))
            .collect();
        Ok(permute_qubits(rho.matrix().data(), 2 * self.n, &doubled))
    }

    fn layout(&self, input_qubits: usize) -> Result<(Vec<usize>, Vec<PureState>)> {
        let inputs = self.circuit.input_wires();
        if inputs.len() != input_qubits {
            return Err(Error::DimensionMismatch(format!(
                "circuit takes {} input qubits, given {input_qubits}",
                inputs.len()
            )));
        }
        let mut source = inputs;
        let mut preps = Vec::new();
        for node in &self.circuit.nodes {
            if let Node::Prep { state, .. } = node {
                preps.push(PureState::named(state)?);
                source.extend(self.targets(node));
            }
        }
        // output qubit i comes from source position of wire i
        let mut order = vec![0; self.n];
        for (pos, &wire) in source.iter().enumerate() {
            order[wire] = pos;
        }
        Ok((order, preps))
    }

    /// Runs every node. At `select = (node, projector)` that measurement keeps
    /// only the projected branch; other measurements act non-selectively.
    fn execute(
        &self,
        mut reg: Working,
        select: Option<(usize, &ComplexMatrix)>,
    ) -> Result<Working> {
        for (i, node) in self.circuit.nodes.iter().enumerate() {
            let targets = self.targets(node);
            if let Some(ch) = self.node_channel(node)? {
                reg = match reg {
                    Working::Pure(mut amps) => {
                        let u = ch.as_unitary().ok_or_else(|| {
                            Error::InvalidCircuit(format!("node {i} is not unitary"))
                        })?;
                        apply_on_qubits(&mut amps, self.n, &targets, u);
                        Working::Pure(amps)
                    }
                    Working::Mixed(rho) => Working::Mixed(self.kraus_sum(&rho, &targets, ch.ops())),
                };
                continue;
            }
            if let Node::Measure { basis, .. } = node {
                reg = match (select, reg) {
                    (Some((at, proj)), Working::Pure(mut amps)) if at == i => {
                        apply_on_qubits(&mut amps, self.n, &targets, proj);
                        Working::Pure(amps)
                    }
                    (Some((at, proj)), Working::Mixed(rho)) if at == i => {
                        Working::Mixed(self.kraus_sum(&rho, &targets, std::slice::from_ref(proj)))
                    }
                    (_, Working::Pure(_)) => {
                        return Err(Error::InvalidCircuit(format!(
                            "node {i} is a measurement; use density or post-selected simulation"
                        )))
                    }
                    (_, Working::Mixed(rho)) => {
                        let projectors: Vec<ComplexMatrix> = basis
                            .outcomes(targets.len())?
                            .into_iter()
                            .map(|(_, p)| p)
                            .collect();
                        Working::Mixed(self.kraus_sum(&rho, &targets, &projectors))
                    }
                };
            }
        }
        Ok(reg)
    }

    fn kraus_sum(&self, rho: &[C64], targets: &[usize], ops: &[ComplexMatrix]) -> Vec<C64> {
        if let [k] = ops {
            let mut out = rho.to_vec();
            conjugate_on_qubits(&mut out, self.n, targets, k);
            return out;
        }
        let mut acc = vec![ZERO; rho.len()];
        for k in ops {
            let mut term = rho.to_vec();
            conjugate_on_qubits(&mut term, self.n, targets, k);
            for (a, t) in acc.iter_mut().zip(term) {
                *a += t;
            }
        }
        acc
    }

    fn measurement_node(&self) -> Result<usize> {
        let found: Vec<usize> = self
            .circuit
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Measure { .. }))
            .map(|(i, _)| i)
            .collect();
        match found.as_slice() {
            [i] => Ok(*i),
            _ => Err(Error::InvalidCircuit(format!(
                "expected exactly one measurement node, found {}",
                found.len()
            ))),
        }
    }

    fn outcomes(&self, at: usize) -> Result<Vec<(String, ComplexMatrix)>> {
        match &self.circuit.nodes[at] {
            Node::Measure { basis, wires } => basis.outcomes(wires.len()),
            _ => unreachable!("measurement_node returns a measurement"),
        }
    }

    fn start(&self, input: &RegisterState) -> Result<Working> {
        match input {
            RegisterState::Pure(s) if self.all_unitary()? => {
                Ok(Working::Pure(self.initial_vector(s)?))
            }
            other => Ok(Working::Mixed(self.initial_density(&other.to_density())?)),
        }
    }

    fn branch(
        &self,
        input: &RegisterState,
        at: usize,
        proj: &ComplexMatrix,
    ) -> Result<(f64, Working)> {
        let out = self.execute(self.start(input)?, Some((at, proj)))?;
        let weight = match &out {
            Working::Pure(a) => a.iter().map(|z| z.norm_sqr()).sum(),
            Working::Mixed(m) => {
                let d = 1usize << self.n;
                (0..d).map(|i| m[i * d + i].re).sum()
            }
        };
        Ok((weight, out))
    }
}

/// Runs a unitary-only circuit on a state vector.
pub fn simulate_pure(
    c: &CircuitDescription,
    bindings: &OracleBindings,
    input: &PureState,
) -> Result<PureState> {
    let run = Run::new(c, bindings)?;
    match run.execute(Working::Pure(run.initial_vector(input)?), None)? {
        Working::Pure(amps) => Ok(PureState::from_raw(amps)),
        Working::Mixed(_) => unreachable!("pure runs stay pure"),
    }
}

/// Runs a circuit as a composition of channels. Measurements act
/// non-selectively.
pub fn simulate_density(
    c: &CircuitDescription,
    bindings: &OracleBindings,
    input: &DensityMatrix,
) -> Result<DensityMatrix> {
    let run = Run::new(c, bindings)?;
    let mut deterministic = input.is_normalized();
    for node in &c.nodes {
        if let Some(ch) = run.node_channel(node)? {
            deterministic &= ch.is_deterministic();
        }
    }
    match run.execute(Working::Mixed(run.initial_density(input)?), None)? {
        Working::Mixed(data) => {
            let d = 1usize << run.n;
            Ok(DensityMatrix::from_raw(
                ComplexMatrix::from_raw(d, d, data),
                deterministic,
            ))
        }
        Working::Pure(_) => unreachable!("density runs stay mixed"),
    }
}

/// One post-selected branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Postselected {
    pub label: String,
    pub probability: f64,
    /// Renormalized state of the whole register; `None` when the branch vanished.
    pub state: Option<RegisterState>,
}

impl Postselected {
    pub fn vanished(&self) -> bool {
        self.state.is_none()
    }
}

/// Keeps outcome `label` of the circuit's single measurement node.
pub fn simulate_with_postselection(
    c: &CircuitDescription,
    bindings: &OracleBindings,
    input: &RegisterState,
    label: &str,
) -> Result<Postselected> {
    let run = Run::new(c, bindings)?;
    let at = run.measurement_node()?;
    let outcomes = run.outcomes(at)?;
    let (_, proj) = outcomes
        .iter()
        .find(|(l, _)| l == label)
        .ok_or_else(|| Error::UnknownOutcome(label.to_string()))?;
    let (probability, out) = run.branch(input, at, proj)?;
    let state = if probability < ZERO_PROBABILITY {
        None
    } else {
        Some(match out {
            Working::Pure(amps) => {
                let norm = probability.sqrt();
                RegisterState::Pure(PureState::from_raw(
                    amps.into_iter().map(|z| z / norm).collect(),
                ))
            }
            Working::Mixed(data) => {
                let d = 1usize << run.n;
                let m = ComplexMatrix::from_raw(d, d, data).scale_real(1.0 / probability);
                RegisterState::Mixed(DensityMatrix::from_raw(m, true))
            }
        })
    };
    Ok(Postselected {
        label: label.to_string(),
        probability,
        state,
    })
}

/// Probability of every outcome of the circuit's single measurement node.
pub fn outcome_distribution(
    c: &CircuitDescription,
    bindings: &OracleBindings,
    input: &RegisterState,
) -> Result<Vec<(String, f64)>> {
    let run = Run::new(c, bindings)?;
    let at = run.measurement_node()?;
    run.outcomes(at)?
        .into_iter()
        .map(|(label, proj)| Ok((label, run.branch(input, at, &proj)?.0)))
        .collect()
}

/// Multinomial sample of [`outcome_distribution`].
pub fn sample_outcomes(
    c: &CircuitDescription,
    bindings: &OracleBindings,
    input: &RegisterState,
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    sample_distribution(&outcome_distribution(c, bindings, input)?, shots, seed)
}
