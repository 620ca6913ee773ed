//! Line-oriented circuit format.
//!
//! ```text
//! # comment
//! wires c m a b
//! budget f 1
//! prep PHI+ a b
//! gate CSWAP c m a
//! oracle f a
//! measure BELL a b
//! link 3 0
//! ```
//!
//! `wires` must come before any node. A single number, `wires 3`, declares
//! wires `0 1 2`. `link I J` adds a dependency edge from
//! node `I` to node `J` (zero-based, in file order).

use std::fmt;

use super::{CircuitDescription, GateSpec, MeasurementBasis, Node};
use crate::error::{Error, Result};
use crate::linalg::PureState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    UnknownGate,
    UnknownState,
    UnknownWire,
    Arity,
}

impl ParseErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::UnknownGate => "unknown_gate",
            ParseErrorKind::UnknownState => "unknown_state",
            ParseErrorKind::UnknownWire => "unknown_wire",
            ParseErrorKind::Arity => "arity",
        }
    }
}

/// Parse failure at a 1-based `line` and `column`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code
        .char_indices()
        .chain(std::iter::once((code.len(), ' ')))
    {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn parse_circuit(text: &str) -> std::result::Result<CircuitDescription, ParseError> {
    let mut circuit: Option<CircuitDescription> = None;
    let mut pending_links = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        let err = |kind, tok: &Token, message: String| ParseError {
            kind,
            line,
            column: tok.column,
            message,
        };
        let args = &toks[1..];

        if head.text == "wires" {
            if circuit.is_some() {
                return Err(err(
                    ParseErrorKind::Syntax,
                    head,
                    "duplicate `wires` header".into(),
                ));
            }
            if args.is_empty() {
                return Err(err(
                    ParseErrorKind::Syntax,
                    head,
                    "`wires` needs at least one wire".into(),
                ));
            }
            if let [count] = args {
                if let Ok(n) = count.text.parse::<usize>() {
                    if n == 0 {
                        return Err(err(
                            ParseErrorKind::Syntax,
                            count,
                            "`wires` needs at least one wire".into(),
                        ));
                    }
                    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
                    circuit = Some(CircuitDescription::new(&names));
                    continue;
                }
            }
            let mut names: Vec<&str> = Vec::new();
            for t in args {
                if names.contains(&t.text) {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        t,
                        format!("wire `{}` declared twice", t.text),
                    ));
                }
                names.push(t.text);
            }
            circuit = Some(CircuitDescription::new(&names));
            continue;
        }

        let Some(c) = circuit.as_mut() else {
            return Err(err(
                ParseErrorKind::Syntax,
                head,
                "`wires` header must come first".into(),
            ));
        };

        match head.text {
            "budget" => {
                let [id, n] = args else {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        head,
                        "expected `budget ID CALLS`".into(),
                    ));
                };
                let calls: u32 = n.text.parse().ok().filter(|&k| k > 0).ok_or_else(|| {
                    err(
                        ParseErrorKind::Syntax,
                        n,
                        format!("bad call count `{}`", n.text),
                    )
                })?;
                if c.budget.get(id.text).is_some() {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        id,
                        format!("budget for `{}` given twice", id.text),
                    ));
                }
                c.budget.set(id.text, calls).expect("positive budget");
            }
            "link" => {
                let [a, b] = args else {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        head,
                        "expected `link FROM TO`".into(),
                    ));
                };
                let index = |t: &Token| {
                    t.text.parse::<usize>().map_err(|_| {
                        err(
                            ParseErrorKind::Syntax,
                            t,
                            format!("bad node index `{}`", t.text),
                        )
                    })
                };
                pending_links.push((index(a)?, index(b)?, line, a.column));
            }
            "gate" | "oracle" | "prep" | "measure" => {
                let Some((name, wire_toks)) = args.split_first() else {
                    return Err(err(
                        ParseErrorKind::Syntax,
                        head,
                        format!("`{}` needs a name", head.text),
                    ));
                };
                if wire_toks.is_empty() {
                    return Err(err(
                        ParseErrorKind::Arity,
                        head,
                        format!("`{}` acts on no wires", head.text),
                    ));
                }
                let mut wires = Vec::new();
                for t in wire_toks {
                    if c.wire_index(t.text).is_none() {
                        return Err(err(
                            ParseErrorKind::UnknownWire,
                            t,
                            format!("undeclared wire `{}`", t.text),
                        ));
                    }
                    if wires.iter().any(|w| w == t.text) {
                        return Err(err(
                            ParseErrorKind::Arity,
                            t,
                            format!("wire `{}` listed twice", t.text),
                        ));
                    }
                    wires.push(t.text.to_string());
                }
                let n = wires.len();
                let node = match head.text {
                    "gate" => {
                        let ch =
                            crate::channels::builtin::channel(name.text).map_err(|e| match e {
                                Error::UnknownGate(_) => err(
                                    ParseErrorKind::UnknownGate,
                                    name,
                                    format!("unknown gate `{}`", name.text),
                                ),
                                other => err(ParseErrorKind::Syntax, name, other.to_string()),
                            })?;
                        if ch.input_qubits() != n {
                            return Err(err(
                                ParseErrorKind::Arity,
                                name,
                                format!(
                                    "gate `{}` acts on {} qubits, given {n} wires",
                                    name.text,
                                    ch.input_qubits()
                                ),
                            ));
                        }
                        Node::Gate {
                            gate: GateSpec::Named(name.text.to_string()),
                            wires,
                        }
                    }
                    "oracle" => Node::Oracle {
                        id: name.text.to_string(),
                        wires,
                    },
                    "prep" => {
                        let s = PureState::named(name.text).map_err(|_| {
                            err(
                                ParseErrorKind::UnknownState,
                                name,
                                format!("unknown state `{}`", name.text),
                            )
                        })?;
                        if s.qubits() != n {
                            return Err(err(
                                ParseErrorKind::Arity,
                                name,
                                format!(
                                    "state `{}` has {} qubits, given {n} wires",
                                    name.text,
                                    s.qubits()
                                ),
                            ));
                        }
                        Node::Prep {
                            state: name.text.to_string(),
                            wires,
                        }
                    }
                    _ => {
                        let basis = MeasurementBasis::from_name(name.text).ok_or_else(|| {
                            err(
                                ParseErrorKind::Syntax,
                                name,
                                format!("unknown measurement basis `{}`", name.text),
                            )
                        })?;
                        if !basis.accepts_arity(n) {
                            return Err(err(
                                ParseErrorKind::Arity,
                                name,
                                format!("{} measurement cannot act on {n} wires", basis.name()),
                            ));
                        }
                        Node::Measure { basis, wires }
                    }
                };
                c.nodes.push(node);
            }
            other => {
                return Err(err(
                    ParseErrorKind::Syntax,
                    head,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let mut c = circuit.ok_or(ParseError {
        kind: ParseErrorKind::Syntax,
        line: last_line.max(1),
        column: 1,
        message: "missing `wires` header".into(),
    })?;
    for (a, b, line, column) in pending_links {
        if a >= c.nodes.len() || b >= c.nodes.len() {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                line,
                column,
                message: format!("link {a} -> {b} refers to a missing node"),
            });
        }
        c.links.push((a, b));
    }
    Ok(c)
}

fn check_token(s: &str) -> Result<&str> {
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains('#') {
        Err(Error::InvalidCircuit(format!(
            "`{s}` cannot be written as a token"
        )))
    } else {
        Ok(s)
    }
}

/// Canonical text form. Inline gates have no text form and are an error.
pub fn serialize_circuit(c: &CircuitDescription) -> Result<String> {
    let mut out = String::from("wires");
    if !c.wires.is_empty() && c.wires.iter().enumerate().all(|(i, w)| *w == i.to_string()) {
        out.push_str(&format!(" {}", c.wires.len()));
    } else if let [w] = c.wires.as_slice() {
        if w.parse::<usize>().is_ok() {
            return Err(Error::InvalidCircuit(format!(
                "a lone wire named `{w}` reads back as a wire count"
            )));
        }
        out.push(' ');
        out.push_str(check_token(w)?);
    } else {
        for w in &c.wires {
            out.push(' ');
            out.push_str(check_token(w)?);
        }
    }
    out.push('\n');
    for (id, calls) in c.budget.iter() {
        out.push_str(&format!("budget {} {calls}\n", check_token(id)?));
    }
    for node in &c.nodes {
        let (head, name) = match node {
            Node::Gate {
                gate: GateSpec::Named(name),
                ..
            } => ("gate", name.as_str()),
            Node::Gate {
                gate: GateSpec::Inline { label, .. },
                ..
            } => {
                return Err(Error::InvalidCircuit(format!(
                    "inline gate `{label}` has no text form"
                )))
            }
            Node::Oracle { id, .. } => ("oracle", id.as_str()),
            Node::Prep { state, .. } => ("prep", state.as_str()),
            Node::Measure { basis, .. } => ("measure", basis.name()),
        };
        out.push_str(head);
        out.push(' ');
        out.push_str(check_token(name)?);
        for w in node.wires() {
            out.push(' ');
            out.push_str(check_token(w)?);
        }
        out.push('\n');
    }
    for (a, b) in &c.links {
        out.push_str(&format!("link {a} {b}\n"));
    }
    Ok(out)
}
