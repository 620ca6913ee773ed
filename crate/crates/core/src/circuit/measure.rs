use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState};
use crate::random::{rng_for, uniform, GENERATOR_NAME};

/// Projective measurement attached to a measurement node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementBasis {
    /// Bell basis on consecutive wire pairs. The all-`Φ⁺` outcome is `E`.
    Bell,
    /// Computational basis on every wire.
    Z,
    /// `{|+⟩, |−⟩}` on every wire.
    X,
}

const BELL_LABELS: [&str; 4] = ["PHI+", "PHI-", "PSI+", "PSI-"];

impl MeasurementBasis {
    pub fn name(self) -> &'static str {
        match self {
            MeasurementBasis::Bell => "BELL",
            MeasurementBasis::Z => "Z",
            MeasurementBasis::X => "X",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "BELL" => Some(MeasurementBasis::Bell),
            "Z" => Some(MeasurementBasis::Z),
            "X" => Some(MeasurementBasis::X),
            _ => None,
        }
    }

    pub fn accepts_arity(self, wires: usize) -> bool {
        match self {
            MeasurementBasis::Bell => wires >= 2 && wires.is_multiple_of(2),
            MeasurementBasis::Z | MeasurementBasis::X => wires >= 1,
        }
    }

    /// Complete projector set `(label, projector)` on `wires` wires, in a
    /// fixed order (first wire or pair most significant).
    pub fn outcomes(self, wires: usize) -> Result<Vec<(String, ComplexMatrix)>> {
        if !self.accepts_arity(wires) {
            return Err(Error::InvalidCircuit(format!(
                "{} measurement cannot act on {wires} wires",
                self.name()
            )));
        }
        let (per_site, sites): (Vec<(&str, PureState)>, usize) = match self {
            MeasurementBasis::Bell => (
                BELL_LABELS
                    .iter()
                    .map(|l| (*l, PureState::named(l).expect("Bell state")))
                    .collect(),
                wires / 2,
            ),
            MeasurementBasis::Z => (
                ["0", "1"]
                    .iter()
                    .map(|l| (*l, PureState::named(l).expect("basis state")))
                    .collect(),
                wires,
            ),
            MeasurementBasis::X => (
                ["+", "-"]
                    .iter()
                    .map(|l| (*l, PureState::named(l).expect("basis state")))
                    .collect(),
                wires,
            ),
        };
        let local: Vec<(&str, ComplexMatrix)> = per_site
            .iter()
            .map(|(l, s)| (*l, ComplexMatrix::outer(s.amplitudes(), s.amplitudes())))
            .collect();

        let mut out: Vec<(Vec<&str>, ComplexMatrix)> =
            vec![(Vec::new(), ComplexMatrix::identity(1))];
        for _ in 0..sites {
            out = out
                .into_iter()
                .flat_map(|(labels, proj)| {
                    local.iter().map(move |(l, p)| {
                        let mut labels = labels.clone();
                        labels.push(*l);
                        (labels, proj.kron(p))
                    })
                })
                .collect();
        }
        Ok(out
            .into_iter()
            .map(|(labels, proj)| (self.join_labels(&labels), proj))
            .collect())
    }

    fn join_labels(self, labels: &[&str]) -> String {
        match self {
            MeasurementBasis::Bell if labels.iter().all(|l| *l == "PHI+") => "E".to_string(),
            MeasurementBasis::Bell => labels.join("."),
            MeasurementBasis::Z | MeasurementBasis::X => labels.concat(),
        }
    }
}

/// Sampled outcome counts plus what is needed to reproduce them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeCounts {
    pub counts: Vec<(String, u64)>,
    pub shots: u64,
    pub seed: u64,
    pub generator: String,
}

impl OutcomeCounts {
    pub fn count(&self, label: &str) -> u64 {
        self.counts
            .iter()
            .find(|(l, _)| l == label)
            .map_or(0, |(_, c)| *c)
    }

    pub fn frequency(&self, label: &str) -> f64 {
        self.count(label) as f64 / self.shots as f64
    }
}

/// Multinomial sample of `distribution`. Shot `k` draws one uniform from
/// stream `k` of `seed` and inverts the cumulative distribution.
pub fn sample_distribution(
    distribution: &[(String, f64)],
    shots: u64,
    seed: u64,
) -> Result<OutcomeCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    if distribution.is_empty() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    let total: f64 = distribution.iter().map(|(_, p)| p).sum();
    let mut cumulative = Vec::with_capacity(distribution.len());
    let mut acc = 0.0;
    for (_, p) in distribution {
        acc += p.max(0.0) / total;
        cumulative.push(acc);
    }
    let mut counts = vec![0u64; distribution.len()];
    for shot in 0..shots {
        let u = uniform(&mut rng_for(seed, shot));
        let idx = cumulative
            .iter()
            .position(|&c| u < c)
            // u sits above a cumulative total rounded below 1: take the last nonzero outcome
            .unwrap_or_else(|| {
                distribution
                    .iter()
                    .rposition(|(_, p)| *p > 0.0)
                    .unwrap_or(0)
            });
        counts[idx] += 1;
    }
    Ok(OutcomeCounts {
        counts: distribution
            .iter()
            .map(|(l, _)| l.clone())
            .zip(counts)
            .collect(),
        shots,
        seed,
        generator: GENERATOR_NAME.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_outcomes_are_complete() {
        for wires in [2, 4] {
            let outcomes = MeasurementBasis::Bell.outcomes(wires).unwrap();
            assert_eq!(outcomes.len(), 1 << wires);
            let d = 1 << wires;
            let sum = outcomes
                .iter()
                .fold(ComplexMatrix::zeros(d, d), |acc, (_, p)| acc.add(p));
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-15);
            assert_eq!(outcomes[0].0, "E");
        }
        let labels: Vec<String> = MeasurementBasis::Bell
            .outcomes(4)
            .unwrap()
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(labels[1], "PHI+.PHI-");
        assert!(MeasurementBasis::Bell.outcomes(3).is_err());
    }

    #[test]
    fn computational_labels() {
        let labels: Vec<String> = MeasurementBasis::Z
            .outcomes(2)
            .unwrap()
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(labels, ["00", "01", "10", "11"]);
        let labels: Vec<String> = MeasurementBasis::X
            .outcomes(1)
            .unwrap()
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        assert_eq!(labels, ["+", "-"]);
    }

    #[test]
    fn certain_outcome_takes_every_shot() {
        let dist = vec![("E".to_string(), 1.0), ("PHI-".to_string(), 0.0)];
        let counts = sample_distribution(&dist, 1000, 4).unwrap();
        assert_eq!(counts.count("E"), 1000);
        assert_eq!(counts.count("PHI-"), 0);
    }

    #[test]
    fn sampling_is_deterministic() {
        let dist = vec![("a".to_string(), 0.3), ("b".to_string(), 0.7)];
        let a = sample_distribution(&dist, 500, 99).unwrap();
        let b = sample_distribution(&dist, 500, 99).unwrap();
        assert_eq!(a, b);
        assert!(sample_distribution(&dist, 0, 99).is_err());
    }
}
