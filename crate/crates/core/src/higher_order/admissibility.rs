use serde::Serialize;

use super::{classical_oracle_channel, quantum_control_channel, switched_channel_unchecked};
use crate::channels::{is_non_signaling, verify_cptp, BipartiteBox, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::is_positive_semidefinite;
use crate::random::{random_cptp, rng_for, uniform, GENERATOR_NAME};

/// Tolerance of every admissibility check.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

/// Higher-order maps taking two channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    SwitchedChannel,
    /// The classically controlled oracle as a channel (control consumed).
    ClassicalOracle,
    /// Kraus extension of the quantum-controlled oracle.
    QuantumControl,
}

impl Construction {
    pub const IDS: [&'static str; 3] = ["switched_channel", "classical_oracle", "quantum_control"];

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "switched_channel" => Ok(Construction::SwitchedChannel),
            "classical_oracle" => Ok(Construction::ClassicalOracle),
            "quantum_control" => Ok(Construction::QuantumControl),
            other => Err(Error::UnknownConstruction(other.to_string())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Construction::SwitchedChannel => "switched_channel",
            Construction::ClassicalOracle => "classical_oracle",
            Construction::QuantumControl => "quantum_control",
        }
    }

    /// Applies the construction without re-checking the inputs, so that
    /// mixtures and extended boxes go through the same code path.
    pub fn apply(self, f: &KrausChannel, g: &KrausChannel) -> Result<KrausChannel> {
        match self {
            Construction::SwitchedChannel => {
                let n = f.input_qubits();
                if [f.output_qubits(), g.input_qubits(), g.output_qubits()]
                    .iter()
                    .any(|&q| q != n)
                {
                    return Err(Error::DimensionMismatch(
                        "switched boxes must share one target".into(),
                    ));
                }
                Ok(switched_channel_unchecked(f, g))
            }
            Construction::ClassicalOracle => classical_oracle_channel(f, g),
            Construction::QuantumControl => quantum_control_channel(f, g),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub construction: String,
    pub trials: u64,
    pub seed: u64,
    pub generator: String,
    pub tolerance: f64,
    /// Trials whose output failed the CPTP check.
    pub cptp_failures: u64,
    pub max_completeness_deviation: f64,
    pub min_choi_eigenvalue: f64,
    /// Max-entry Choi distance between the construction of a mixture and the
    /// mixture of constructions, over both slots.
    pub max_linearity_deviation: f64,
    /// Trials where the locally applied construction failed the CPTP check.
    pub local_failures: u64,
    pub max_local_completeness_deviation: f64,
    /// Worst non-signaling deviation of the random bipartite boxes used.
    pub max_box_signaling: f64,
    pub passed: bool,
}

/// Largest entry difference between the Choi operator of
/// `construction(mix(λ, a, b), fixed)` and `λ·choi(a) + (1−λ)·choi(b)`
/// (or the same with the mixture in slot 2).
fn linearity_deviation(
    c: Construction,
    lambda: f64,
    a: &KrausChannel,
    b: &KrausChannel,
    fixed: &KrausChannel,
    mixed_slot_first: bool,
) -> Result<f64> {
    let build = |x: &KrausChannel| {
        if mixed_slot_first {
            c.apply(x, fixed)
        } else {
            c.apply(fixed, x)
        }
    };
    let of_mixture = build(&KrausChannel::mixture(lambda, a, b)?)?.choi();
    let mixture_of = build(a)?
        .choi()
        .scale_real(lambda)
        .add(&build(b)?.choi().scale_real(1.0 - lambda));
    Ok(of_mixture.max_abs_diff(&mixture_of))
}

/// Runs `trials` random single-qubit CPTP pairs through `construction` and
/// checks that the output is CPTP, that the construction is linear in each
/// slot, and that it stays CPTP when applied to one part of a random
/// non-signaling two-qubit box (the other slot extended by the identity on
/// the second part). Trial `t` draws from stream `t` of `seed`.
pub fn admissibility_check(
    construction: &str,
    trials: u64,
    seed: u64,
) -> Result<AdmissibilityReport> {
    admissibility_check_with_lambda(Construction::from_id(construction)?, trials, seed, None)
}

pub(crate) fn admissibility_check_with_lambda(
    c: Construction,
    trials: u64,
    seed: u64,
    fixed_lambda: Option<f64>,
) -> Result<AdmissibilityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let tol = ADMISSIBILITY_TOL;
    let mut report = AdmissibilityReport {
        construction: c.id().to_string(),
        trials,
        seed,
        generator: GENERATOR_NAME.to_string(),
        tolerance: tol,
        cptp_failures: 0,
        max_completeness_deviation: 0.0,
        min_choi_eigenvalue: f64::INFINITY,
        max_linearity_deviation: 0.0,
        local_failures: 0,
        max_local_completeness_deviation: 0.0,
        max_box_signaling: 0.0,
        passed: false,
    };

    for t in 0..trials {
        let mut rng = rng_for(seed, t);
        let f = random_cptp(1, &mut rng);
        let g = random_cptp(1, &mut rng);
        let f2 = random_cptp(1, &mut rng);
        let g2 = random_cptp(1, &mut rng);
        let lambda = fixed_lambda.unwrap_or_else(|| uniform(&mut rng));

        let out = c.apply(&f, &g)?;
        let r = verify_cptp(&out, tol);
        report.cptp_failures += u64::from(!r.passed);
        report.max_completeness_deviation = report
            .max_completeness_deviation
            .max(r.completeness_deviation);
        report.min_choi_eigenvalue = report.min_choi_eigenvalue.min(r.choi_min_eigenvalue);

        let lin = linearity_deviation(c, lambda, &f, &f2, &g, true)?
            .max(linearity_deviation(c, lambda, &g, &g2, &f, false)?);
        report.max_linearity_deviation = report.max_linearity_deviation.max(lin);

        // convex mixture of product boxes on A ⊗ R
        let mu = uniform(&mut rng);
        let p1 = random_cptp(1, &mut rng).tensor(&random_cptp(1, &mut rng));
        let p2 = random_cptp(1, &mut rng).tensor(&random_cptp(1, &mut rng));
        let boxed = BipartiteBox::new(KrausChannel::mixture(mu, &p1, &p2)?, 1, 1)?;
        let ns = is_non_signaling(&boxed, tol);
        report.max_box_signaling = report
            .max_box_signaling
            .max(ns.a_to_b_deviation.max(ns.b_to_a_deviation));
        let local = c.apply(boxed.channel(), &g.tensor(&KrausChannel::identity(1)))?;
        let deviation = local
            .completeness()
            .max_abs_diff(&crate::linalg::ComplexMatrix::identity(local.input_dim()));
        let cp = is_positive_semidefinite(&local.choi(), tol)?;
        report.local_failures += u64::from(!(cp && deviation <= tol));
        report.max_local_completeness_deviation =
            report.max_local_completeness_deviation.max(deviation);
    }

    report.passed = report.cptp_failures == 0
        && report.local_failures == 0
        && report.max_linearity_deviation <= tol
        && report.max_box_signaling <= tol;
    Ok(report)
}
