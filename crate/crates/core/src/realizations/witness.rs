use serde::Serialize;

use super::SUCCESS_LABEL;
use crate::circuit::{
    outcome_distribution, CircuitDescription, MeasurementBasis, Node, OracleBindings, RegisterState,
};
use crate::error::{Error, Result};
use crate::linalg::PureState;

/// Single-qubit probe states; probes are all their products on the input wires.
pub const PROBE_STATES: [&str; 4] = ["0", "1", "+", "+i"];

const VIOLATED: &str = "normalization violated";
const PRESERVED: &str = "normalization preserved";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub construction: String,
    /// Factor applied to the `E` branch: `4^pairs`, one `d² = 4` per loop.
    pub scale: f64,
    /// `max |Tr(scaled output) − 1|` over the probes.
    pub max_trace_deviation: f64,
    /// Probe reaching the maximum, one state name per input wire.
    pub probe: Vec<String>,
    /// Same quantity for the unscaled sum over every Bell outcome.
    pub complete_outcome_deviation: f64,
    pub verdict: String,
}

/// Circuit whose `E` branch, rescaled, closes a wire into a loop.
///
/// - `identity`: a pass-through wire `d` next to a Bell pair prepared and
///   immediately projected, the loop of a bare identity wire.
/// - `swap_pair`: the one-call switch circuit on wires `c, t, m, a, b` where
///   the first box is a swap of `t` with slot `a` and the second a swap of
///   `t` with slot `m`, so both boxes share the system `t`.
pub fn witness_circuit(box_choice: &str) -> Result<CircuitDescription> {
    match box_choice {
        "identity" => Ok(CircuitDescription::new(&["d", "a", "b"])
            .with(Node::prep("PHI+", &["a", "b"]))
            .with(Node::measure(MeasurementBasis::Bell, &["a", "b"]))),
        "swap_pair" => Ok(CircuitDescription::new(&["c", "t", "m", "a", "b"])
            .with(Node::prep("PHI+", &["a", "b"]))
            .with(Node::gate("CSWAP", &["c", "m", "a"]))
            .with(Node::gate("X", &["c"]))
            .with(Node::gate("SWAP", &["t", "a"]))
            .with(Node::gate("SWAP", &["t", "m"]))
            .with(Node::gate("CSWAP", &["c", "m", "a"]))
            .with(Node::gate("X", &["c"]))
            .with(Node::measure(MeasurementBasis::Bell, &["a", "b"]))),
        other => Err(Error::UnknownConstruction(other.to_string())),
    }
}

fn probes(wires: usize) -> Vec<Vec<&'static str>> {
    let mut out = vec![Vec::new()];
    for _ in 0..wires {
        out = out
            .into_iter()
            .flat_map(|p| {
                PROBE_STATES.iter().map(move |s| {
                    let mut p = p.clone();
                    p.push(*s);
                    p
                })
            })
            .collect();
    }
    out
}

/// Evaluates the rescaled post-selected map of [`witness_circuit`] on every
/// probe and reports how far its output trace strays from 1.
pub fn loop_contraction_witness(box_choice: &str) -> Result<WitnessReport> {
    let c = witness_circuit(box_choice)?;
    let pairs = c
        .nodes
        .iter()
        .filter_map(|n| match n {
            Node::Measure { wires, .. } => Some(wires.len() / 2),
            _ => None,
        })
        .sum::<usize>();
    let scale = 4f64.powi(pairs as i32);
    let bindings = OracleBindings::new();

    let mut worst = (f64::NEG_INFINITY, Vec::new());
    let mut complete = 0.0f64;
    for probe in probes(c.input_wires().len()) {
        let input = probe
            .iter()
            .map(|s| PureState::named(s))
            .reduce(|a, b| Ok(a?.tensor(&b?)))
            .expect("at least one input wire")?;
        let dist = outcome_distribution(&c, &bindings, &RegisterState::Pure(input))?;
        let success = dist
            .iter()
            .find(|(l, _)| l == SUCCESS_LABEL)
            .map(|(_, p)| *p)
            .expect("Bell measurement has an E outcome");
        let deviation = (scale * success - 1.0).abs();
        if deviation > worst.0 {
            worst = (deviation, probe.iter().map(|s| s.to_string()).collect());
        }
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        complete = complete.max((total - 1.0).abs());
    }

    Ok(WitnessReport {
        construction: box_choice.to_string(),
        scale,
        max_trace_deviation: worst.0,
        probe: worst.1,
        complete_outcome_deviation: complete,
        verdict: if worst.0 > 1e-9 { VIOLATED } else { PRESERVED }.to_string(),
    })
}
