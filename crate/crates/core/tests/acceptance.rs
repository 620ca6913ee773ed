//! Acceptance suite. Prints one line per criterion and exits non-zero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use boxswitch::channels::{
    builtin, is_non_signaling, verify_cptp, BipartiteBox, KrausChannel, UnitaryBox,
};
use boxswitch::circuit::{
    simulate_pure, validate_circuit, CircuitDescription, Node, OracleBindings, OracleBudget,
};
use boxswitch::higher_order::{
    admissibility_check, classical_oracle, reduce_to_classical, switch_compose, switched_channel,
    ControlBit, ControlState,
};
use boxswitch::linalg::{partial_trace, trace_distance, ComplexMatrix, PureState, C64};
use boxswitch::random::{random_cptp, random_density, random_pure_state, random_unitary, rng_for};
use boxswitch::realizations::{
    loop_contraction_witness, run_two_call, separation_experiment, success_probability,
    teleport_switch, teleport_switch_sampled, two_call_circuit, SUCCESS_LABEL,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_box(seed: u64, stream: u64, qubits: usize) -> UnitaryBox {
    UnitaryBox::new(random_unitary(1 << qubits, &mut rng_for(seed, stream))).unwrap()
}

fn random_control(seed: u64, stream: u64) -> ControlState {
    ControlState::from_state(&random_pure_state(1, &mut rng_for(seed, stream))).unwrap()
}

fn named(name: &str) -> UnitaryBox {
    UnitaryBox::named(name).unwrap()
}

fn teleport_probability() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_freq = 0.0f64;
    for t in 0..20 {
        let seed = 1000 + t;
        let (f, g) = (random_box(seed, 0, 1), random_box(seed, 1, 1));
        let phi = random_control(seed, 2);
        let psi = random_pure_state(1, &mut rng_for(seed, 3));
        let r = teleport_switch_sampled(&f, &g, &phi, &psi, 100_000, seed).map_err(err)?;
        worst = worst.max((r.success_probability - 0.25).abs());
        let freq = r.shots_record.as_ref().unwrap().frequency(SUCCESS_LABEL);
        worst_freq = worst_freq.max((freq - 0.25).abs());
    }
    check(worst <= 1e-12, format!("analytic deviation {worst:e}"))?;
    check(
        worst_freq <= 0.005,
        format!("sampled deviation {worst_freq}"),
    )?;
    Ok(format!(
        "max |p - 1/4| = {worst:.2e}, max |freq - 1/4| = {worst_freq:.4} over 20 pairs x 1e5 shots"
    ))
}

fn exponential_scaling() -> Outcome {
    let mut lines = Vec::new();
    for (n, expected) in [(1usize, 0.25), (2, 0.0625), (3, 0.015625)] {
        let start = Instant::now();
        let seed = 50 + n as u64;
        let (f, g) = (random_box(seed, 0, n), random_box(seed, 1, n));
        let psi = random_pure_state(n, &mut rng_for(seed, 3));
        let r = teleport_switch(&f, &g, &random_control(seed, 2), &psi).map_err(err)?;
        let elapsed = start.elapsed().as_secs_f64();
        check(
            (r.success_probability - expected).abs() <= 1e-12,
            format!("N={n}: p = {} expected {expected}", r.success_probability),
        )?;
        check(
            (success_probability(n as u32).map_err(err)? - expected).abs() == 0.0,
            "closed form",
        )?;
        check(elapsed < 10.0, format!("N={n} took {elapsed:.1} s"))?;
        lines.push(format!(
            "N={n} p={:.6} ({elapsed:.2} s)",
            r.success_probability
        ));
    }
    Ok(lines.join(", "))
}

fn switch_equivalence() -> Outcome {
    let circuit = two_call_circuit("f", "g", 1).map_err(err)?;
    let calls = circuit.oracle_calls();
    check(
        calls.get("f") == Some(&2) && calls.get("g") == Some(&2) && calls.len() == 2,
        format!("calls {calls:?}"),
    )?;
    check(
        circuit.budget.get("f") == Some(2) && circuit.budget.get("g") == Some(2),
        "declared budget",
    )?;
    check(
        validate_circuit(&circuit, &circuit.budget).passed(),
        "budget check",
    )?;

    let mut worst = 0.0f64;
    for t in 0..100 {
        let seed = 2000 + t;
        let (f, g) = (random_box(seed, 0, 1), random_box(seed, 1, 1));
        let x = ControlBit::new((t % 2) as u8).unwrap();
        let psi = random_pure_state(1, &mut rng_for(seed, 3));
        let out = run_two_call(&f, &g, &ControlState::basis(x), &psi).map_err(err)?;
        let middle = partial_trace(&out, &[2, 2], &[1]).map_err(err)?;
        let expected = psi
            .evolve(switch_compose(x, &f, &g).map_err(err)?.matrix())
            .map_err(err)?
            .to_density();
        worst = worst.max(trace_distance(&middle, &expected).map_err(err)?);
    }
    check(worst < 1e-10, format!("trace distance {worst:e}"))?;
    Ok(format!(
        "max trace distance {worst:.2e} over 100 instances, budget f=2 g=2"
    ))
}

fn superposition_of_orders() -> Outcome {
    // (|1⟩⊗ZX|0⟩ + |0⟩⊗XZ|0⟩)/√2 with ZX|0⟩ = −|1⟩ and XZ|0⟩ = |1⟩
    let h = FRAC_1_SQRT_2;
    let expected = PureState::new(vec![
        C64::new(0.0, 0.0),
        C64::new(h, 0.0),
        C64::new(0.0, 0.0),
        C64::new(-h, 0.0),
    ])
    .map_err(err)?;
    let plus = ControlState::from_state(&PureState::named("+").unwrap()).map_err(err)?;
    let r = teleport_switch(
        &named("X"),
        &named("Z"),
        &plus,
        &PureState::named("0").unwrap(),
    )
    .map_err(err)?;
    let state = r.conditional_state.ok_or("success branch vanished")?;
    let fidelity = state.fidelity_with_pure(&expected).map_err(err)?;
    check(fidelity >= 1.0 - 1e-10, format!("fidelity {fidelity}"))?;
    Ok(format!("fidelity {fidelity:.15}"))
}

fn oracle_reduction() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..100 {
        let seed = 3000 + t;
        let (f, g) = (random_box(seed, 0, 1), random_box(seed, 1, 1));
        let phi = random_control(seed, 2);
        let rho1 = random_density(1, &mut rng_for(seed, 3));
        let rho2 = random_density(1, &mut rng_for(seed, 4));
        let a = reduce_to_classical(&f, &g, &phi, &rho1, &rho2).map_err(err)?;
        let b = classical_oracle(&f, &g, &phi, &rho1, &rho2).map_err(err)?;
        worst = worst.max(trace_distance(&a, &b).map_err(err)?);
    }
    check(worst <= 1e-10, format!("trace distance {worst:e}"))?;
    Ok(format!("max trace distance {worst:.2e} over 100 instances"))
}

/// Brute-force contraction of the swap-pair network. Wires `(c, t, m, a, b)`
/// with `c` most significant; the network permutes basis strings, `(a, b)`
/// starts in `Σ_j |jj⟩/√2` and is projected on `Σ_k |kk⟩/√2`, and the branch
/// amplitude is scaled by 2 (probability by 4).
fn swap_pair_oracle() -> f64 {
    let bit = |s: u32, q: u32| (s >> (4 - q)) & 1;
    let swap = |s: u32, p: u32, q: u32| {
        let (bp, bq) = (bit(s, p), bit(s, q));
        let s = (s & !(1 << (4 - p))) | (bq << (4 - p));
        (s & !(1 << (4 - q))) | (bp << (4 - q))
    };
    let step = |s: u32| {
        let mut s = if bit(s, 0) == 1 { swap(s, 2, 3) } else { s };
        s ^= 1 << 4;
        s = swap(swap(s, 1, 3), 1, 2);
        s = if bit(s, 0) == 1 { swap(s, 2, 3) } else { s };
        s ^ (1 << 4)
    };
    let mut map = [[0.0f64; 8]; 8];
    for i in 0..8u32 {
        for j in 0..2u32 {
            let s = step((i << 2) | (j << 1) | j);
            if (s & 3) == 0 || (s & 3) == 3 {
                map[(s >> 2) as usize][i as usize] += 1.0;
            }
        }
    }
    let singles = ["0", "1", "+", "+i"];
    let mut worst = 0.0f64;
    for a in singles {
        for b in singles {
            for c in singles {
                let v = PureState::named(a)
                    .unwrap()
                    .tensor(&PureState::named(b).unwrap())
                    .tensor(&PureState::named(c).unwrap());
                let v = v.amplitudes();
                let norm: f64 = (0..8)
                    .map(|o| (0..8).map(|i| v[i] * map[o][i]).sum::<C64>().norm_sqr())
                    .sum();
                worst = worst.max((norm - 1.0).abs());
            }
        }
    }
    worst
}

fn no_switch_witness() -> Outcome {
    let oracle = swap_pair_oracle();
    let r = loop_contraction_witness("swap_pair").map_err(err)?;
    check(
        r.max_trace_deviation > oracle - 1e-9,
        format!("deviation {} vs oracle {oracle}", r.max_trace_deviation),
    )?;
    check(
        r.complete_outcome_deviation <= 1e-10,
        format!(
            "complete-outcome deviation {:e}",
            r.complete_outcome_deviation
        ),
    )?;
    Ok(format!(
        "deviation {:.12} (oracle {oracle}), complete-outcome deviation {:.1e}, {}",
        r.max_trace_deviation, r.complete_outcome_deviation, r.verdict
    ))
}

fn separation() -> Outcome {
    let r = separation_experiment(&named("X"), &named("Z")).map_err(err)?;
    check(
        (r.quantum_p_minus - 1.0).abs() <= 1e-10,
        format!("quantum P(-) {}", r.quantum_p_minus),
    )?;
    check(
        (r.classical_p_minus - 0.5).abs() <= 1e-10,
        format!("classical P(-) {}", r.classical_p_minus),
    )?;
    let diag = |seed: u64| {
        let mut rng = rng_for(seed, 0);
        let a = boxswitch::random::uniform(&mut rng) * 6.3;
        let b = boxswitch::random::uniform(&mut rng) * 6.3;
        UnitaryBox::new(ComplexMatrix::diagonal(&[
            C64::from_polar(1.0, a),
            C64::from_polar(1.0, b),
        ]))
        .unwrap()
    };
    let r3 = random_box(7, 0, 1);
    let commuting = [
        (named("Z"), named("S")),
        (named("X"), named("X")),
        (named("Z"), named("T")),
        (diag(1), diag(2)),
        (r3.clone(), r3),
    ];
    let mut worst = 0.0f64;
    for (f, g) in &commuting {
        worst = worst.max(separation_experiment(f, g).map_err(err)?.distance);
    }
    check(worst < 1e-10, format!("commuting distance {worst:e}"))?;
    Ok(format!(
        "quantum P(-) = {:.12}, classical P(-) = {:.12}, commuting distance {worst:.1e}",
        r.quantum_p_minus, r.classical_p_minus
    ))
}

fn admissibility() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..100 {
        let seed = 4000 + t;
        let f = random_cptp(1, &mut rng_for(seed, 0));
        let g = random_cptp(1, &mut rng_for(seed, 1));
        let s = switched_channel(&f, &g).map_err(err)?;
        let report = verify_cptp(&s, 1e-9);
        check(
            report.passed && report.deterministic,
            format!("trial {t}: {report:?}"),
        )?;
        worst = worst.max(report.completeness_deviation);
    }
    check(worst < 1e-9, format!("completeness deviation {worst:e}"))?;
    let r = admissibility_check("switched_channel", 100, 4242).map_err(err)?;
    check(
        r.cptp_failures == 0,
        format!("{} CPTP failures", r.cptp_failures),
    )?;
    check(
        r.max_linearity_deviation <= 1e-9,
        format!("linearity {:e}", r.max_linearity_deviation),
    )?;
    check(
        r.local_failures == 0,
        format!("{} local failures", r.local_failures),
    )?;
    check(
        r.max_local_completeness_deviation <= 1e-9,
        "local completeness",
    )?;
    check(r.passed, "report verdict")?;
    Ok(format!(
        "100 pairs CPTP (max deviation {worst:.1e}), linearity {:.1e}, local completeness {:.1e}",
        r.max_linearity_deviation, r.max_local_completeness_deviation
    ))
}

fn nonsignaling() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..50 {
        let seed = 5000 + t;
        let f = random_cptp(1, &mut rng_for(seed, 0));
        let g = random_cptp(1, &mut rng_for(seed, 1));
        let r = is_non_signaling(&BipartiteBox::product(&f, &g).map_err(err)?, 1e-10);
        check(r.non_signaling, format!("product box {t} signals: {r:?}"))?;
        worst = worst.max(r.a_to_b_deviation.max(r.b_to_a_deviation));
    }
    // CNOT, target starting in |0⟩: control |0⟩ leaves |0⟩⟨0|, control |1⟩
    // leaves |1⟩⟨1|, so the largest entry difference on the target is 1
    let oracle = 1.0;
    let cnot = BipartiteBox::new(KrausChannel::from_unitary(builtin::cnot()), 1, 1).map_err(err)?;
    let r = is_non_signaling(&cnot, 1e-10);
    check(
        !r.non_signaling && r.a_to_b_deviation > 0.1,
        format!("CNOT {r:?}"),
    )?;
    check(
        (r.a_to_b_deviation - oracle).abs() <= 1e-12,
        format!("CNOT deviation {} vs {oracle}", r.a_to_b_deviation),
    )?;
    Ok(format!(
        "50 product boxes pass (max {worst:.1e}), CNOT deviation {}",
        r.a_to_b_deviation
    ))
}

fn circuit_fidelity() -> Outcome {
    let c = CircuitDescription::new(&["0", "1"]).with(Node::gate("CNOT", &["0", "1"]));
    let input = PureState::named("+")
        .unwrap()
        .tensor(&PureState::named("0").unwrap());
    let out = simulate_pure(&c, &OracleBindings::new(), &input).map_err(err)?;
    let h = FRAC_1_SQRT_2;
    let expected = [h, 0.0, 0.0, h];
    let worst = out
        .amplitudes()
        .iter()
        .zip(expected)
        .map(|(z, e)| (z - C64::new(e, 0.0)).norm())
        .fold(0.0, f64::max);
    check(worst <= 1e-12, format!("entrywise {worst:e}"))?;

    let mut cyclic = CircuitDescription::new(&["a", "b"])
        .with(Node::gate("H", &["a"]))
        .with(Node::gate("H", &["b"]));
    cyclic.links = vec![(0, 1), (1, 0)];
    let report = validate_circuit(&cyclic, &OracleBudget::new());
    check(
        !report.passed() && report.violates(3),
        format!("cyclic: {report:?}"),
    )?;

    let over = CircuitDescription::new(&["a"])
        .with(Node::oracle("f", &["a"]))
        .with(Node::oracle("f", &["a"]));
    let report = validate_circuit(&over, &OracleBudget::new().with("f", 1).map_err(err)?);
    check(
        !report.passed() && report.violates(4),
        format!("over budget: {report:?}"),
    )?;
    Ok(format!(
        "Bell state entrywise error {worst:.1e}, rule 3 and rule 4 rejected"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("teleport probability", teleport_probability),
        ("exponential scaling", exponential_scaling),
        ("switch equivalence", switch_equivalence),
        ("superposition of orders", superposition_of_orders),
        ("oracle reduction", oracle_reduction),
        ("no-switch witness", no_switch_witness),
        ("classical/quantum separation", separation),
        ("admissibility", admissibility),
        ("non-signaling checker", nonsignaling),
        ("circuit-model fidelity", circuit_fidelity),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of 10 passed in {:.2} s",
        10 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
