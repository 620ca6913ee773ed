use std::collections::{BTreeMap, HashSet};

use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{CircuitDescription, GateSpec, Node, OracleBudget};
use crate::linalg::PureState;

/// A broken circuit rule.
///
/// 1. qubits are wires
/// 2. a box acts on the wires it names, with matching arity
/// 3. information flows forward with no loops
/// 4. each oracle box is one call, within budget
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule")]
pub enum RuleViolation {
    Rule1 {
        node: Option<usize>,
        message: String,
    },
    Rule2 {
        node: usize,
        message: String,
    },
    Rule3 {
        node: Option<usize>,
        message: String,
    },
    Rule4 {
        oracle: String,
        calls: u32,
        budget: u32,
    },
}

impl RuleViolation {
    pub fn rule(&self) -> u8 {
        match self {
            RuleViolation::Rule1 { .. } => 1,
            RuleViolation::Rule2 { .. } => 2,
            RuleViolation::Rule3 { .. } => 3,
            RuleViolation::Rule4 { .. } => 4,
        }
    }
}

impl std::fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RuleViolation::Rule1 {
                node: Some(n),
                message,
            } => write!(f, "rule 1 (node {n}): {message}"),
            RuleViolation::Rule1 {
                node: None,
                message,
            } => write!(f, "rule 1: {message}"),
            RuleViolation::Rule2 { node, message } => write!(f, "rule 2 (node {node}): {message}"),
            RuleViolation::Rule3 {
                node: Some(n),
                message,
            } => write!(f, "rule 3 (node {n}): {message}"),
            RuleViolation::Rule3 {
                node: None,
                message,
            } => write!(f, "rule 3: {message}"),
            RuleViolation::Rule4 {
                oracle,
                calls,
                budget,
            } => {
                write!(
                    f,
                    "rule 4: oracle `{oracle}` called {calls} times, budget {budget}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<RuleViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, rule: u8) -> bool {
        self.violations.iter().any(|v| v.rule() == rule)
    }
}

/// Rules 1–3: wiring, arity and acyclicity. Oracle budgets are not checked.
pub fn validate_structure(c: &CircuitDescription) -> ValidationReport {
    let mut violations = Vec::new();

    let mut declared = HashSet::new();
    for w in &c.wires {
        if !declared.insert(w.as_str()) {
            violations.push(RuleViolation::Rule1 {
                node: None,
                message: format!("wire `{w}` declared twice"),
            });
        }
    }

    let mut used = vec![false; c.wires.len()];
    let mut oracle_arity: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, node) in c.nodes.iter().enumerate() {
        let wires = node.wires();
        let mut seen = HashSet::new();
        for w in wires {
            match c.wire_index(w) {
                None => violations.push(RuleViolation::Rule1 {
                    node: Some(i),
                    message: format!("undeclared wire `{w}`"),
                }),
                Some(idx) => {
                    if matches!(node, Node::Prep { .. }) && used[idx] {
                        violations.push(RuleViolation::Rule1 {
                            node: Some(i),
                            message: format!("wire `{w}` prepared after it was already in use"),
                        });
                    }
                    used[idx] = true;
                }
            }
            if !seen.insert(w.as_str()) {
                violations.push(RuleViolation::Rule2 {
                    node: i,
                    message: format!("wire `{w}` listed twice"),
                });
            }
        }
        if wires.is_empty() {
            violations.push(RuleViolation::Rule2 {
                node: i,
                message: "node acts on no wires".into(),
            });
        }
        if let Some(message) = arity_problem(node, &mut oracle_arity) {
            violations.push(RuleViolation::Rule2 { node: i, message });
        }
    }

    violations.extend(cycle_violation(c));
    ValidationReport { violations }
}

fn arity_problem<'a>(
    node: &'a Node,
    oracle_arity: &mut BTreeMap<&'a str, usize>,
) -> Option<String> {
    let n = node.wires().len();
    match node {
        Node::Gate { gate, .. } => match gate.channel() {
            Err(e) => Some(e.to_string()),
            Ok(ch) if ch.input_qubits() != ch.output_qubits() => Some(format!(
                "gate maps {} qubits to {}",
                ch.input_qubits(),
                ch.output_qubits()
            )),
            Ok(ch) if ch.input_qubits() != n => {
                let name = match gate {
                    GateSpec::Named(name) => name.as_str(),
                    GateSpec::Inline { label, .. } => label.as_str(),
                };
                Some(format!(
                    "gate `{name}` acts on {} qubits, given {n} wires",
                    ch.input_qubits()
                ))
            }
            Ok(_) => None,
        },
        Node::Oracle { id, .. } => {
            let expected = *oracle_arity.entry(id.as_str()).or_insert(n);
            (expected != n)
                .then(|| format!("oracle `{id}` called on {n} wires, earlier on {expected}"))
        }
        Node::Prep { state, .. } => match PureState::named(state) {
            Err(e) => Some(e.to_string()),
            Ok(s) if s.qubits() != n => Some(format!(
                "state `{state}` has {} qubits, given {n} wires",
                s.qubits()
            )),
            Ok(_) => None,
        },
        Node::Measure { basis, .. } => (!basis.accepts_arity(n))
            .then(|| format!("{} measurement cannot act on {n} wires", basis.name())),
    }
}

fn cycle_violation(c: &CircuitDescription) -> Option<RuleViolation> {
    let mut graph = DiGraph::<usize, ()>::new();
    let ids: Vec<_> = (0..c.nodes.len()).map(|i| graph.add_node(i)).collect();
    let mut last_on_wire: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, node) in c.nodes.iter().enumerate() {
        for w in node.wires() {
            if let Some(prev) = last_on_wire.insert(w.as_str(), i) {
                graph.update_edge(ids[prev], ids[i], ());
            }
        }
    }
    for &(from, to) in &c.links {
        if from >= ids.len() || to >= ids.len() {
            return Some(RuleViolation::Rule3 {
                node: None,
                message: format!("link {from} -> {to} refers to a missing node"),
            });
        }
        if from == to {
            return Some(RuleViolation::Rule3 {
                node: Some(from),
                message: "node feeds itself".into(),
            });
        }
        graph.update_edge(ids[from], ids[to], ());
    }
    toposort(&graph, None)
        .err()
        .map(|cycle| RuleViolation::Rule3 {
            node: Some(graph[cycle.node_id()]),
            message: "wire runs backwards: the dependency graph has a loop".into(),
        })
}

/// Rules 1–4. Every oracle id must appear in `budget` and be called at most
/// its budgeted number of times.
pub fn validate_circuit(c: &CircuitDescription, budget: &OracleBudget) -> ValidationReport {
    let mut report = validate_structure(c);
    for (oracle, calls) in c.oracle_calls() {
        let allowed = budget.get(&oracle).unwrap_or(0);
        if calls > allowed {
            report.violations.push(RuleViolation::Rule4 {
                oracle,
                calls,
                budget: allowed,
            });
        }
    }
    report
}
