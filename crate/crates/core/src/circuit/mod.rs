//! The computational circuit model.
//!
//! A circuit is an ordered list of nodes over named wires. Node order fixes
//! the time order; two consecutive nodes touching the same wire are joined by
//! a dependency edge. Explicit `links` add further edges (output of one node
//! feeding another) and are how a wire running backwards is expressed, which
//! validation then rejects.

mod measure;
mod simulate;
mod text;
mod validate;

pub use measure::{sample_distribution, MeasurementBasis, OutcomeCounts};
pub use simulate::{
    outcome_distribution, sample_outcomes, simulate_density, simulate_pure,
    simulate_with_postselection, OracleBindings, Postselected, RegisterState,
};
pub use text::{parse_circuit, serialize_circuit, ParseError, ParseErrorKind};
pub use validate::{validate_circuit, validate_structure, RuleViolation, ValidationReport};

use std::collections::BTreeMap;

use crate::channels::{builtin, KrausChannel};
use crate::error::{Error, Result};

/// What a gate node applies.
#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec {
    /// A library gate or noise channel, e.g. `CNOT` or `bitflip(0.3)`.
    Named(String),
    /// An opaque fixed sub-circuit given directly as a channel.
    Inline {
        label: String,
        channel: KrausChannel,
    },
}

impl GateSpec {
    pub fn channel(&self) -> Result<KrausChannel> {
        match self {
            GateSpec::Named(name) => builtin::channel(name),
            GateSpec::Inline { channel, .. } => Ok(channel.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Gate {
        gate: GateSpec,
        wires: Vec<String>,
    },
    Oracle {
        id: String,
        wires: Vec<String>,
    },
    Prep {
        state: String,
        wires: Vec<String>,
    },
    Measure {
        basis: MeasurementBasis,
        wires: Vec<String>,
    },
}

impl Node {
    pub fn gate(name: &str, wires: &[&str]) -> Self {
        Node::Gate {
            gate: GateSpec::Named(name.to_string()),
            wires: owned(wires),
        }
    }

    pub fn oracle(id: &str, wires: &[&str]) -> Self {
        Node::Oracle {
            id: id.to_string(),
            wires: owned(wires),
        }
    }

    pub fn prep(state: &str, wires: &[&str]) -> Self {
        Node::Prep {
            state: state.to_string(),
            wires: owned(wires),
        }
    }

    pub fn measure(basis: MeasurementBasis, wires: &[&str]) -> Self {
        Node::Measure {
            basis,
            wires: owned(wires),
        }
    }

    pub fn wires(&self) -> &[String] {
        match self {
            Node::Gate { wires, .. }
            | Node::Oracle { wires, .. }
            | Node::Prep { wires, .. }
            | Node::Measure { wires, .. } => wires,
        }
    }
}

fn owned(wires: &[&str]) -> Vec<String> {
    wires.iter().map(|w| w.to_string()).collect()
}

/// Allowed number of calls per oracle id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleBudget(BTreeMap<String, u32>);

impl OracleBudget {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, oracle: &str, calls: u32) -> Result<Self> {
        self.set(oracle, calls)?;
        Ok(self)
    }

    pub fn set(&mut self, oracle: &str, calls: u32) -> Result<()> {
        if calls == 0 {
            return Err(Error::InvalidArgument(format!(
                "oracle `{oracle}` needs a positive budget"
            )));
        }
        self.0.insert(oracle.to_string(), calls);
        Ok(())
    }

    pub fn get(&self, oracle: &str) -> Option<u32> {
        self.0.get(oracle).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CircuitDescription {
    pub wires: Vec<String>,
    pub nodes: Vec<Node>,
    /// Extra dependency edges `(from, to)` between node indices.
    pub links: Vec<(usize, usize)>,
    /// Budget declared alongside the circuit (may be empty).
    pub budget: OracleBudget,
}

impl CircuitDescription {
    pub fn new<S: AsRef<str>>(wires: &[S]) -> Self {
        Self {
            wires: wires.iter().map(|w| w.as_ref().to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, node: Node) -> &mut Self {
        self.nodes.push(node);
        self
    }

    pub fn with(mut self, node: Node) -> Self {
        self.nodes.push(node);
        self
    }

    pub fn wire_index(&self, wire: &str) -> Option<usize> {
        self.wires.iter().position(|w| w == wire)
    }

    /// Number of calls to each oracle id.
    pub fn oracle_calls(&self) -> BTreeMap<String, u32> {
        let mut calls = BTreeMap::new();
        for node in &self.nodes {
            if let Node::Oracle { id, .. } = node {
                *calls.entry(id.clone()).or_insert(0) += 1;
            }
        }
        calls
    }

    /// Wires whose first node is a preparation.
    pub fn prepared_wires(&self) -> Vec<usize> {
        let mut seen = vec![false; self.wires.len()];
        let mut prepared = Vec::new();
        for node in &self.nodes {
            for w in node.wires() {
                if let Some(i) = self.wire_index(w) {
                    if !seen[i] {
                        seen[i] = true;
                        if matches!(node, Node::Prep { .. }) {
                            prepared.push(i);
                        }
                    }
                }
            }
        }
        prepared.sort_unstable();
        prepared
    }

    /// Wires fed by the caller's input state, in wire order.
    pub fn input_wires(&self) -> Vec<usize> {
        let prepared = self.prepared_wires();
        (0..self.wires.len())
            .filter(|i| !prepared.contains(i))
            .collect()
    }

    /// `self` followed by `next` on the same wires. Links of `next` are shifted.
    pub fn concat(&self, next: &Self) -> Result<Self> {
        if self.wires != next.wires {
            return Err(Error::InvalidCircuit(
                "concatenating circuits over different wires".into(),
            ));
        }
        let shift = self.nodes.len();
        let mut out = self.clone();
        out.nodes.extend(next.nodes.iter().cloned());
        out.links
            .extend(next.links.iter().map(|(a, b)| (a + shift, b + shift)));
        for (id, calls) in next.budget.iter() {
            let total = out.budget.get(id).unwrap_or(0) + calls;
            out.budget.set(id, total)?;
        }
        Ok(out)
    }
}
