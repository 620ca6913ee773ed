use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::{Map, Value};

use super::Diagnostic;
use crate::channels::{builtin, UnitaryBox};
use crate::error::Error;
use crate::higher_order::Construction;
use crate::linalg::{ComplexMatrix, PureState, C64, DEFAULT_TOL};
use crate::realizations::witness_circuit;

pub const FORMAT_VERSION: u64 = 1;

/// Registered scenario names.
pub const SCENARIOS: [&str; 8] = [
    "switch",
    "two_call",
    "teleport",
    "separation",
    "noswitch_witness",
    "nonsignaling",
    "admissibility",
    "reduce_check",
];

const FIELDS: [&str; 16] = [
    "format_version",
    "scenario",
    "f",
    "g",
    "control",
    "input",
    "input2",
    "x",
    "qubits",
    "shots",
    "seed",
    "tolerance",
    "box",
    "construction",
    "trials",
    "description",
];

pub const DEFAULT_TRIALS: u64 = 100;

/// A box slot: a library name, a random unitary drawn from the seed, or an
/// inline matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum BoxSpec {
    Named(String),
    Random,
    Matrix(ComplexMatrix),
}

impl Serialize for BoxSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BoxSpec::Named(name) => s.serialize_str(name),
            BoxSpec::Random => s.serialize_str("random"),
            BoxSpec::Matrix(m) => {
                let mut map = s.serialize_map(Some(1))?;
                map.serialize_entry("matrix", m)?;
                map.end()
            }
        }
    }
}

/// A pure state slot: a named state, a random state, or amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Named(String),
    Random,
    Amplitudes(PureState),
}

impl Serialize for StateSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            StateSpec::Named(name) => s.serialize_str(name),
            StateSpec::Random => s.serialize_str("random"),
            StateSpec::Amplitudes(p) => p.serialize(s),
        }
    }
}

/// Validated scenario file with defaults applied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<BoxSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<BoxSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input2: Option<StateSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    /// 0 means analytic only.
    pub shots: u64,
    pub seed: u64,
    pub tolerance: f64,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl ScenarioSpec {
    /// A spec for `scenario` with every optional field unset.
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            f: None,
            g: None,
            control: None,
            input: None,
            input2: None,
            x: None,
            qubits: None,
            shots: 0,
            seed: 0,
            tolerance: DEFAULT_TOL,
            box_id: None,
            construction: None,
            trials: None,
        }
    }

    /// Command-line overrides take precedence over file values.
    pub fn with_overrides(
        mut self,
        seed: Option<u64>,
        shots: Option<u64>,
        tolerance: Option<f64>,
    ) -> Result<Self, Diagnostic> {
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(shots) = shots {
            self.shots = shots;
        }
        if let Some(tol) = tolerance {
            check_tolerance(tol, "--tol")?;
            self.tolerance = tol;
        }
        Ok(self)
    }

    /// Re-runs the per-scenario checks of [`parse_scenario`].
    pub fn validate(&self) -> Result<(), Diagnostic> {
        if !SCENARIOS.contains(&self.scenario.as_str()) {
            return Err(Diagnostic::new(
                "unknown_scenario",
                "/scenario",
                format!(
                    "unknown scenario `{}`; expected one of {}",
                    self.scenario,
                    SCENARIOS.join(", ")
                ),
            ));
        }
        check_tolerance(self.tolerance, "/tolerance")?;
        let require = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(Diagnostic::new(
                    "missing_parameter",
                    &format!("/{field}"),
                    format!("scenario `{}` needs `{field}`", self.scenario),
                ))
            }
        };
        let unitary_slots = matches!(
            self.scenario.as_str(),
            "switch" | "two_call" | "teleport" | "separation" | "reduce_check"
        );
        match self.scenario.as_str() {
            "switch" => {
                require(self.f.is_some(), "f")?;
                require(self.g.is_some(), "g")?;
                require(self.x.is_some(), "x")?;
            }
            "two_call" => {
                require(self.f.is_some(), "f")?;
                require(self.g.is_some(), "g")?;
                if self.x.is_some() && self.control.is_some() {
                    return Err(Diagnostic::new(
                        "invalid_parameter",
                        "/control",
                        "give either `x` or `control`, not both",
                    ));
                }
                require(self.x.is_some() || self.control.is_some(), "x")?;
            }
            "separation" | "reduce_check" => {
                require(self.f.is_some(), "f")?;
                require(self.g.is_some(), "g")?;
            }
            "teleport" => {}
            "noswitch_witness" => {
                require(self.box_id.is_some(), "box")?;
                let id = self.box_id.as_deref().unwrap_or_default();
                witness_circuit(id).map_err(|_| {
                    Diagnostic::new(
                        "invalid_parameter",
                        "/box",
                        format!("unknown witness box `{id}`; expected identity or swap_pair"),
                    )
                })?;
            }
            "nonsignaling" => {
                require(self.box_id.is_some(), "box")?;
                let id = self.box_id.as_deref().unwrap_or_default();
                if id == "product" {
                    require(self.f.is_some(), "f")?;
                    require(self.g.is_some(), "g")?;
                } else {
                    let ch = builtin::channel(id)
                        .map_err(|e| Diagnostic::new("invalid_parameter", "/box", e.to_string()))?;
                    if ch.input_qubits() != 2 {
                        return Err(Diagnostic::new(
                            "invalid_parameter",
                            "/box",
                            format!(
                                "`{id}` acts on {} qubits; a bipartite box needs 2",
                                ch.input_qubits()
                            ),
                        ));
                    }
                }
            }
            "admissibility" => {
                require(self.construction.is_some(), "construction")?;
                let id = self.construction.as_deref().unwrap_or_default();
                Construction::from_id(id).map_err(|_| {
                    Diagnostic::new(
                        "invalid_parameter",
                        "/construction",
                        format!(
                            "unknown construction `{id}`; expected one of {}",
                            Construction::IDS.join(", ")
                        ),
                    )
                })?;
                if self.trials == Some(0) {
                    return Err(Diagnostic::new(
                        "invalid_parameter",
                        "/trials",
                        "trials must be positive",
                    ));
                }
            }
            _ => unreachable!("registry checked above"),
        }
        for (field, slot) in [("f", &self.f), ("g", &self.g)] {
            if let Some(spec) = slot {
                check_box(spec, field, unitary_slots)?;
            }
        }
        if let Some(q) = self.qubits {
            if q == 0 || q > 3 {
                return Err(Diagnostic::new(
                    "invalid_parameter",
                    "/qubits",
                    format!("qubits must be 1, 2 or 3, got {q}"),
                ));
            }
        }
        Ok(())
    }
}

fn check_tolerance(tol: f64, location: &str) -> Result<(), Diagnostic> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Diagnostic::new(
            "invalid_parameter",
            location,
            format!("tolerance must be positive, got {tol}"),
        ));
    }
    Ok(())
}

fn check_box(spec: &BoxSpec, field: &str, unitary: bool) -> Result<(), Diagnostic> {
    let location = format!("/{field}");
    match spec {
        BoxSpec::Random => Ok(()),
        BoxSpec::Named(name) => {
            let ch = builtin::channel(name)
                .map_err(|e| Diagnostic::new("invalid_parameter", &location, e.to_string()))?;
            if unitary && ch.as_unitary().is_none() {
                return Err(Diagnostic::new(
                    "validation",
                    &location,
                    format!("`{name}` is not unitary; this scenario needs a unitary box"),
                ));
            }
            Ok(())
        }
        BoxSpec::Matrix(m) => {
            if unitary {
                UnitaryBox::new(m.clone())
                    .map_err(|e| Diagnostic::new("validation", &location, e.to_string()))?;
            } else if !m.is_square() || !m.rows().is_power_of_two() || m.rows() < 2 {
                return Err(Diagnostic::new(
                    "validation",
                    &location,
                    "box matrix must be square on whole qubits",
                ));
            }
            Ok(())
        }
    }
}

fn invalid(location: &str, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new("invalid_parameter", location, message)
}

fn parse_complex(v: &Value, location: &str) -> Result<C64, Diagnostic> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) => match pair.as_slice() {
            [Value::Number(re), Value::Number(im)] => Ok(C64::new(
                re.as_f64().unwrap_or(f64::NAN),
                im.as_f64().unwrap_or(f64::NAN),
            )),
            _ => Err(invalid(
                location,
                "complex entry must be a number or [re, im]",
            )),
        },
        _ => Err(invalid(
            location,
            "complex entry must be a number or [re, im]",
        )),
    }
}

fn parse_box(v: &Value, field: &str) -> Result<BoxSpec, Diagnostic> {
    let location = format!("/{field}");
    match v {
        Value::String(s) if s == "random" => Ok(BoxSpec::Random),
        Value::String(s) => Ok(BoxSpec::Named(s.clone())),
        Value::Object(o) => {
            let rows = match (o.len(), o.get("matrix")) {
                (1, Some(Value::Array(rows))) => rows,
                _ => {
                    return Err(invalid(
                        &location,
                        "inline box must be {\"matrix\": [[...], ...]}",
                    ))
                }
            };
            let mut parsed = Vec::with_capacity(rows.len());
            for (r, row) in rows.iter().enumerate() {
                let Value::Array(entries) = row else {
                    return Err(invalid(
                        &format!("{location}/matrix/{r}"),
                        "matrix row must be an array",
                    ));
                };
                let mut out = Vec::with_capacity(entries.len());
                for (c, e) in entries.iter().enumerate() {
                    out.push(parse_complex(e, &format!("{location}/matrix/{r}/{c}"))?);
                }
                parsed.push(out);
            }
            let m = ComplexMatrix::from_rows(parsed)
                .map_err(|e| invalid(&format!("{location}/matrix"), e.to_string()))?;
            Ok(BoxSpec::Matrix(m))
        }
        _ => Err(invalid(
            &location,
            "box must be a gate name, \"random\" or {\"matrix\": ...}",
        )),
    }
}

fn parse_state(v: &Value, field: &str) -> Result<StateSpec, Diagnostic> {
    let location = format!("/{field}");
    match v {
        Value::String(s) if s == "random" => Ok(StateSpec::Random),
        Value::String(s) => {
            PureState::named(s).map_err(|e| invalid(&location, e.to_string()))?;
            Ok(StateSpec::Named(s.clone()))
        }
        Value::Array(entries) => {
            let amps = entries
                .iter()
                .enumerate()
                .map(|(i, e)| parse_complex(e, &format!("{location}/{i}")))
                .collect::<Result<Vec<_>, _>>()?;
            let s = PureState::new(amps)
                .map_err(|e| Diagnostic::new("validation", &location, e.to_string()))?;
            Ok(StateSpec::Amplitudes(s))
        }
        _ => Err(invalid(
            &location,
            "state must be a name, \"random\" or a list of amplitudes",
        )),
    }
}

fn parse_u64(v: &Value, field: &str) -> Result<u64, Diagnostic> {
    v.as_u64().ok_or_else(|| {
        invalid(
            &format!("/{field}"),
            format!("`{field}` must be a non-negative integer"),
        )
    })
}

fn parse_string(v: &Value, field: &str) -> Result<String, Diagnostic> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| invalid(&format!("/{field}"), format!("`{field}` must be a string")))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, Diagnostic> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Diagnostic::new(
            "syntax",
            &format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let Value::Object(obj) = value else {
        return Err(Diagnostic::new(
            "syntax",
            "/",
            "scenario must be a JSON object",
        ));
    };
    parse_object(&obj)
}

fn parse_object(obj: &Map<String, Value>) -> Result<ScenarioSpec, Diagnostic> {
    for key in obj.keys() {
        if !FIELDS.contains(&key.as_str()) {
            return Err(invalid(
                &format!("/{key}"),
                format!("unknown field `{key}`"),
            ));
        }
    }
    if let Some(v) = obj.get("format_version") {
        let version = parse_u64(v, "format_version")?;
        if version != FORMAT_VERSION {
            return Err(invalid(
                "/format_version",
                format!("unsupported format_version {version}; this build reads {FORMAT_VERSION}"),
            ));
        }
    }
    let scenario = match obj.get("scenario") {
        Some(v) => parse_string(v, "scenario")?,
        None => {
            return Err(Diagnostic::new(
                "missing_parameter",
                "/scenario",
                "missing `scenario`",
            ))
        }
    };
    let mut spec = ScenarioSpec::new(&scenario);
    if !SCENARIOS.contains(&scenario.as_str()) {
        spec.validate()?;
    }

    spec.f = obj.get("f").map(|v| parse_box(v, "f")).transpose()?;
    spec.g = obj.get("g").map(|v| parse_box(v, "g")).transpose()?;
    spec.control = obj
        .get("control")
        .map(|v| parse_state(v, "control"))
        .transpose()?;
    spec.input = obj
        .get("input")
        .map(|v| parse_state(v, "input"))
        .transpose()?;
    spec.input2 = obj
        .get("input2")
        .map(|v| parse_state(v, "input2"))
        .transpose()?;
    if let Some(v) = obj.get("x") {
        spec.x = Some(match v.as_u64() {
            Some(b @ (0 | 1)) => b as u8,
            _ => return Err(invalid("/x", "`x` must be 0 or 1")),
        });
    }
    if let Some(v) = obj.get("qubits") {
        spec.qubits = Some(parse_u64(v, "qubits")? as usize);
    }
    if let Some(v) = obj.get("shots") {
        spec.shots = parse_u64(v, "shots")?;
    }
    if let Some(v) = obj.get("seed") {
        spec.seed = parse_u64(v, "seed")?;
    }
    if let Some(v) = obj.get("tolerance") {
        spec.tolerance = v
            .as_f64()
            .ok_or_else(|| invalid("/tolerance", "`tolerance` must be a number"))?;
    }
    spec.box_id = obj.get("box").map(|v| parse_string(v, "box")).transpose()?;
    spec.construction = obj
        .get("construction")
        .map(|v| parse_string(v, "construction"))
        .transpose()?;
    if let Some(v) = obj.get("trials") {
        spec.trials = Some(parse_u64(v, "trials")?);
    }
    if spec.scenario == "admissibility" && spec.trials.is_none() {
        spec.trials = Some(DEFAULT_TRIALS);
    }
    spec.validate()?;
    Ok(spec)
}

impl From<Error> for Diagnostic {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::DimensionMismatch(_) => "dimension",
            Error::NotUnitary { .. }
            | Error::NotCptp { .. }
            | Error::InvalidState(_)
            | Error::InvalidMatrix(_) => "validation",
            Error::Parse(p) => {
                return Diagnostic::new(
                    &format!("circuit_{}", p.kind.name()),
                    &format!("line {}, column {}", p.line, p.column),
                    p.message.clone(),
                )
            }
            _ => "runtime",
        };
        Diagnostic::new(kind, "", e.to_string())
    }
}
