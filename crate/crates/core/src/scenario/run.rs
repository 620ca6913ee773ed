use serde::Serialize;
use serde_json::{json, Map, Value};

use super::spec::{BoxSpec, ScenarioSpec, StateSpec, DEFAULT_TRIALS};
use super::{Diagnostic, ScenarioResult};
use crate::channels::{builtin, is_non_signaling, BipartiteBox, KrausChannel, UnitaryBox};
use crate::circuit::validate_circuit;
use crate::higher_order::{
    admissibility_check, classical_oracle, quantum_control_joint, reduce_to_classical,
    switch_compose, switched_unitary, ControlBit, ControlState,
};
use crate::linalg::{partial_trace, trace_distance, PureState};
use crate::random::{random_cptp, random_pure_state, random_unitary, rng_for, GENERATOR_NAME};
use crate::realizations::{
    loop_contraction_witness, run_two_call, separation_experiment, success_probability,
    teleport_switch, teleport_switch_sampled, two_call_circuit, SUCCESS_LABEL,
};

// random draws per slot come from their own stream of the seed
const STREAM_F: u64 = 0;
const STREAM_G: u64 = 1;
const STREAM_INPUT: u64 = 2;
const STREAM_CONTROL: u64 = 3;
const STREAM_INPUT2: u64 = 4;

type Fields = Map<String, Value>;

struct Ctx<'a> {
    spec: &'a ScenarioSpec,
    results: Fields,
    verdicts: Fields,
}

impl Ctx<'_> {
    fn put<T: Serialize>(&mut self, key: &str, value: T) -> Result<(), Diagnostic> {
        let v = serde_json::to_value(value)
            .map_err(|e| Diagnostic::new("report", &format!("/results/{key}"), e.to_string()))?;
        check_finite(&v, key)?;
        self.results.insert(key.to_string(), v);
        Ok(())
    }

    fn verdict(&mut self, key: &str, holds: bool) {
        self.verdicts.insert(key.to_string(), Value::Bool(holds));
    }

    fn seed(&self) -> u64 {
        self.spec.seed
    }
}

/// serde_json turns non-finite floats into `null`; a finite float never
/// serializes to `null`, so any `null` here is a NaN or infinity.
fn check_finite(v: &Value, key: &str) -> Result<(), Diagnostic> {
    let ok = match v {
        Value::Null => false,
        Value::Array(items) => return items.iter().try_for_each(|i| check_finite(i, key)),
        Value::Object(m) => return m.values().try_for_each(|i| check_finite(i, key)),
        _ => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Diagnostic::new(
            "runtime",
            &format!("/results/{key}"),
            "non-finite value in results",
        ))
    }
}

fn slot_qubits(spec: &BoxSpec) -> Option<usize> {
    match spec {
        BoxSpec::Named(name) => builtin::channel(name).ok().map(|c| c.input_qubits()),
        BoxSpec::Matrix(m) => Some(m.rows().trailing_zeros() as usize),
        BoxSpec::Random => None,
    }
}

/// Qubits per box: explicit `qubits`, else the first sized slot, else 1.
fn box_qubits(spec: &ScenarioSpec) -> usize {
    spec.qubits
        .or_else(|| spec.f.as_ref().and_then(slot_qubits))
        .or_else(|| spec.g.as_ref().and_then(slot_qubits))
        .unwrap_or(1)
}

fn unitary(
    spec: Option<&BoxSpec>,
    field: &str,
    qubits: usize,
    seed: u64,
    stream: u64,
) -> Result<UnitaryBox, Diagnostic> {
    let location = format!("/{field}");
    let spec = spec.unwrap_or(&BoxSpec::Random);
    let u = match spec {
        BoxSpec::Named(name) => UnitaryBox::named(name),
        BoxSpec::Random => UnitaryBox::new(random_unitary(1 << qubits, &mut rng_for(seed, stream))),
        BoxSpec::Matrix(m) => UnitaryBox::new(m.clone()),
    }
    .map_err(|e| Diagnostic::from(e).at(&location))?;
    if u.qubits() != qubits {
        return Err(Diagnostic::new(
            "dimension",
            &location,
            format!("box acts on {} qubits, scenario uses {qubits}", u.qubits()),
        ));
    }
    Ok(u)
}

fn channel(
    spec: Option<&BoxSpec>,
    field: &str,
    seed: u64,
    stream: u64,
) -> Result<KrausChannel, Diagnostic> {
    let location = format!("/{field}");
    match spec.unwrap_or(&BoxSpec::Random) {
        BoxSpec::Named(name) => builtin::channel(name),
        BoxSpec::Random => Ok(random_cptp(1, &mut rng_for(seed, stream))),
        BoxSpec::Matrix(m) => UnitaryBox::new(m.clone()).map(|u| u.to_channel()),
    }
    .map_err(|e| Diagnostic::from(e).at(&location))
}

fn state(
    spec: Option<&StateSpec>,
    default: &str,
    field: &str,
    qubits: usize,
    seed: u64,
    stream: u64,
) -> Result<PureState, Diagnostic> {
    let location = format!("/{field}");
    let s = match spec {
        None if default == "zeros" => PureState::basis(qubits, 0),
        None => PureState::named(default),
        Some(StateSpec::Named(name)) => PureState::named(name),
        Some(StateSpec::Random) => Ok(random_pure_state(qubits, &mut rng_for(seed, stream))),
        Some(StateSpec::Amplitudes(p)) => Ok(p.clone()),
    }
    .map_err(|e| Diagnostic::from(e).at(&location))?;
    if s.qubits() != qubits {
        return Err(Diagnostic::new(
            "dimension",
            &location,
            format!("state has {} qubits, expected {qubits}", s.qubits()),
        ));
    }
    Ok(s)
}

fn control(spec: &ScenarioSpec) -> Result<ControlState, Diagnostic> {
    if let Some(x) = spec.x {
        return Ok(ControlState::basis(ControlBit::new(x)?));
    }
    let s = state(
        spec.control.as_ref(),
        "+",
        "control",
        1,
        spec.seed,
        STREAM_CONTROL,
    )?;
    Ok(ControlState::from_state(&s)?)
}

fn complex(z: crate::linalg::C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Runs one scenario. Identical specs give identical results.
pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioResult, Diagnostic> {
    spec.validate()?;
    let parameters = serde_json::to_value(spec)
        .map_err(|e| Diagnostic::new("report", "/parameters", e.to_string()))?;
    let mut ctx = Ctx {
        spec,
        results: Map::new(),
        verdicts: Map::new(),
    };
    let context = format!("scenario {}", spec.scenario);
    match spec.scenario.as_str() {
        "switch" => switch(&mut ctx),
        "two_call" => two_call(&mut ctx),
        "teleport" => teleport(&mut ctx),
        "separation" => separation(&mut ctx),
        "noswitch_witness" => witness(&mut ctx),
        "nonsignaling" => nonsignaling(&mut ctx),
        "admissibility" => admissibility(&mut ctx),
        "reduce_check" => reduce_check(&mut ctx),
        _ => unreachable!("validated scenario name"),
    }
    .map_err(|d| d.at(&context))?;

    let mut result = ScenarioResult::new(&spec.scenario, parameters, GENERATOR_NAME, spec.seed);
    let pass = ctx.verdicts.values().all(|v| v == &Value::Bool(true));
    result.results = ctx.results;
    result.verdicts = ctx.verdicts;
    result.verdict = if pass { "pass" } else { "fail" }.to_string();
    Ok(result)
}

fn switch(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let n = box_qubits(spec);
    let f = unitary(spec.f.as_ref(), "f", n, spec.seed, STREAM_F)?;
    let g = unitary(spec.g.as_ref(), "g", n, spec.seed, STREAM_G)?;
    let x = ControlBit::new(spec.x.expect("validated"))?;
    let psi = state(
        spec.input.as_ref(),
        "zeros",
        "input",
        n,
        spec.seed,
        STREAM_INPUT,
    )?;
    let composed = switch_compose(x, &f, &g)?;
    ctx.put(
        "order",
        if x.value() == 1 {
            "f then g"
        } else {
            "g then f"
        },
    )?;
    ctx.put("unitary", composed.matrix())?;
    ctx.put("output_state", psi.evolve(composed.matrix())?)?;
    let via_control = switched_unitary(&f, &g)?;
    let bit = PureState::basis(1, x.value() as usize)?;
    let controlled = bit.tensor(&psi).evolve(via_control.matrix())?.to_density();
    let expected = bit.tensor(&psi.evolve(composed.matrix())?).to_density();
    let d = trace_distance(&controlled, &expected)?;
    ctx.put("switched_unitary_distance", d)?;
    ctx.verdict("switched_unitary_agrees", d <= spec.tolerance);
    Ok(())
}

fn two_call(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let n = box_qubits(spec);
    let f = unitary(spec.f.as_ref(), "f", n, spec.seed, STREAM_F)?;
    let g = unitary(spec.g.as_ref(), "g", n, spec.seed, STREAM_G)?;
    let phi = control(spec)?;
    let psi = state(
        spec.input.as_ref(),
        "zeros",
        "input",
        n,
        spec.seed,
        STREAM_INPUT,
    )?;

    let circuit = two_call_circuit("f", "g", n)?;
    let calls = circuit.oracle_calls();
    let validation = validate_circuit(&circuit, &circuit.budget);
    ctx.put("oracle_calls", &calls)?;
    ctx.put("budget_respected", validation.passed())?;
    ctx.verdict("budget_respected", validation.passed());

    let out = run_two_call(&f, &g, &phi, &psi)?;
    let middle = partial_trace(&out, &[2, 1 << n], &[1])?;
    ctx.put("middle_register_state", &middle)?;
    let ideal = phi
        .to_state()
        .tensor(&psi)
        .evolve(switched_unitary(&f, &g)?.matrix())?
        .to_density();
    let d = trace_distance(&out, &ideal)?;
    ctx.put("switched_unitary_distance", d)?;
    let zero = PureState::basis(n, 0)?;
    let overlap = zero
        .evolve(&f.matrix().matmul(g.matrix()))?
        .inner(&zero.evolve(&g.matrix().matmul(f.matrix()))?)?;
    ctx.put("junk_overlap", complex(overlap))?;
    if let Some(x) = spec.x {
        let expected = psi
            .evolve(switch_compose(ControlBit::new(x)?, &f, &g)?.matrix())?
            .to_density();
        let d = trace_distance(&middle, &expected)?;
        ctx.put("switch_distance", d)?;
        ctx.verdict("matches_switch", d <= spec.tolerance);
    } else {
        ctx.verdict("matches_switch_up_to_junk_overlap", {
            let coherent = phi.p0() * phi.p1() > 0.0;
            !coherent
                || (overlap - crate::linalg::ONE).norm() > spec.tolerance
                || d <= spec.tolerance
        });
    }
    Ok(())
}

fn teleport(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let n = box_qubits(spec);
    let f = unitary(spec.f.as_ref(), "f", n, spec.seed, STREAM_F)?;
    let g = unitary(spec.g.as_ref(), "g", n, spec.seed, STREAM_G)?;
    let phi = control(spec)?;
    let psi = state(
        spec.input.as_ref(),
        "zeros",
        "input",
        n,
        spec.seed,
        STREAM_INPUT,
    )?;
    let expected = success_probability(n as u32)?;
    let r = if spec.shots > 0 {
        teleport_switch_sampled(&f, &g, &phi, &psi, spec.shots, spec.seed)?
    } else {
        teleport_switch(&f, &g, &phi, &psi)?
    };
    ctx.put("qubits", n)?;
    ctx.put("success_probability", r.success_probability)?;
    ctx.put("expected_probability", expected)?;
    let ideal = phi
        .to_state()
        .tensor(&psi)
        .evolve(switched_unitary(&f, &g)?.matrix())?;
    let fidelity = match &r.conditional_state {
        Some(s) => s.fidelity_with_pure(&ideal)?,
        None => 0.0,
    };
    if let Some(s) = &r.conditional_state {
        ctx.put("conditional_state", s)?;
    }
    ctx.put("fidelity_with_switched_unitary", fidelity)?;
    ctx.verdict(
        "probability_matches",
        (r.success_probability - expected).abs() <= spec.tolerance,
    );
    ctx.verdict("superposition_of_orders", fidelity >= 1.0 - spec.tolerance);
    if let Some(counts) = &r.shots_record {
        let freq = counts.frequency(SUCCESS_LABEL);
        let sigma = (expected * (1.0 - expected) / counts.shots as f64).sqrt();
        ctx.put(
            "sampled",
            json!({
                "shots": counts.shots,
                "success_count": counts.count(SUCCESS_LABEL),
                "success_frequency": freq,
                "sigma": sigma,
                "counts": counts.counts.iter().map(|(l, c)| json!([l, c])).collect::<Vec<_>>(),
            }),
        )?;
        ctx.verdict(
            "sampled_within_4_sigma",
            (freq - expected).abs() <= 4.0 * sigma,
        );
    }
    Ok(())
}

fn separation(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let f = unitary(spec.f.as_ref(), "f", 1, spec.seed, STREAM_F)?;
    let g = unitary(spec.g.as_ref(), "g", 1, spec.seed, STREAM_G)?;
    let r = separation_experiment(&f, &g)?;
    ctx.put("quantum_p_minus", r.quantum_p_minus)?;
    ctx.put("quantum_p_plus", 1.0 - r.quantum_p_minus)?;
    ctx.put("classical_p_minus", r.classical_p_minus)?;
    ctx.put("classical_p_plus", 1.0 - r.classical_p_minus)?;
    ctx.put("distance", r.distance)?;
    ctx.put("dephased_distance", r.dephased_distance)?;
    ctx.put("distinguished", r.distance > spec.tolerance)?;
    ctx.verdict(
        "classical_p_minus_is_half",
        (r.classical_p_minus - 0.5).abs() <= spec.tolerance,
    );
    Ok(())
}

fn witness(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let r = loop_contraction_witness(spec.box_id.as_deref().expect("validated"))?;
    ctx.put("scale", r.scale)?;
    ctx.put("max_trace_deviation", r.max_trace_deviation)?;
    ctx.put("probe", &r.probe)?;
    ctx.put("complete_outcome_deviation", r.complete_outcome_deviation)?;
    ctx.put("witness", &r.verdict)?;
    ctx.verdict(
        "normalization_violated",
        r.max_trace_deviation > spec.tolerance,
    );
    ctx.verdict(
        "complete_outcomes_trace_preserving",
        r.complete_outcome_deviation <= spec.tolerance,
    );
    Ok(())
}

fn nonsignaling(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let id = spec.box_id.as_deref().expect("validated");
    let b = if id == "product" {
        let f = channel(spec.f.as_ref(), "f", spec.seed, STREAM_F)?;
        let g = channel(spec.g.as_ref(), "g", spec.seed, STREAM_G)?;
        BipartiteBox::product(&f, &g)?
    } else {
        BipartiteBox::new(builtin::channel(id)?, 1, 1)?
    };
    let r = is_non_signaling(&b, spec.tolerance);
    ctx.put("a_to_b_deviation", r.a_to_b_deviation)?;
    ctx.put("b_to_a_deviation", r.b_to_a_deviation)?;
    ctx.put("non_signaling", r.non_signaling)?;
    ctx.verdict("non_signaling", r.non_signaling);
    Ok(())
}

fn admissibility(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let r = admissibility_check(
        spec.construction.as_deref().expect("validated"),
        spec.trials.unwrap_or(DEFAULT_TRIALS),
        ctx.seed(),
    )?;
    ctx.put("trials", r.trials)?;
    ctx.put("cptp_failures", r.cptp_failures)?;
    ctx.put("max_completeness_deviation", r.max_completeness_deviation)?;
    ctx.put("min_choi_eigenvalue", r.min_choi_eigenvalue)?;
    ctx.put("max_linearity_deviation", r.max_linearity_deviation)?;
    ctx.put("local_failures", r.local_failures)?;
    ctx.put(
        "max_local_completeness_deviation",
        r.max_local_completeness_deviation,
    )?;
    ctx.put("max_box_signaling", r.max_box_signaling)?;
    ctx.put("check_tolerance", r.tolerance)?;
    ctx.verdict("cptp", r.cptp_failures == 0);
    ctx.verdict("linearity", r.max_linearity_deviation <= r.tolerance);
    ctx.verdict(
        "local_application",
        r.local_failures == 0 && r.max_box_signaling <= r.tolerance,
    );
    Ok(())
}

fn reduce_check(ctx: &mut Ctx) -> Result<(), Diagnostic> {
    let spec = ctx.spec;
    let n = box_qubits(spec);
    let f = unitary(spec.f.as_ref(), "f", n, spec.seed, STREAM_F)?;
    let g = unitary(spec.g.as_ref(), "g", n, spec.seed, STREAM_G)?;
    let phi = control(spec)?;
    let rho1 = state(
        spec.input.as_ref(),
        "zeros",
        "input",
        n,
        spec.seed,
        STREAM_INPUT,
    )?
    .to_density();
    let rho2 = state(
        spec.input2.as_ref(),
        "zeros",
        "input2",
        n,
        spec.seed,
        STREAM_INPUT2,
    )?
    .to_density();
    let reduced = reduce_to_classical(&f, &g, &phi, &rho1, &rho2)?;
    let classical = classical_oracle(&f, &g, &phi, &rho1, &rho2)?;
    let d = trace_distance(&reduced, &classical)?;
    let joint = quantum_control_joint(&f, &g, &phi, &rho1, &rho2)?;
    let d_slots = 1usize << n;
    let control_state = partial_trace(&joint, &[2, d_slots, d_slots], &[0])?;
    let coherence = trace_distance(&joint, &control_state.tensor(&reduced))?;
    ctx.put("trace_distance", d)?;
    ctx.put("joint_vs_product_distance", coherence)?;
    ctx.put("classical_output", &classical)?;
    ctx.verdict("reduction_matches", d <= spec.tolerance);
    Ok(())
}
