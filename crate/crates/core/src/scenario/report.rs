use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use super::{Diagnostic, FORMAT_VERSION};

pub const ARTIFACT: &str = "boxswitch";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Report document. Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub format_version: u64,
    pub artifact: String,
    pub version: String,
    pub scenario: String,
    pub parameters: Value,
    pub generator: String,
    pub seed: u64,
    pub results: Map<String, Value>,
    pub verdicts: Map<String, Value>,
    /// `pass` when every verdict holds.
    pub verdict: String,
}

impl ScenarioResult {
    pub fn new(scenario: &str, parameters: Value, generator: &str, seed: u64) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            artifact: ARTIFACT.to_string(),
            version: ARTIFACT_VERSION.to_string(),
            scenario: scenario.to_string(),
            parameters,
            generator: generator.to_string(),
            seed,
            results: Map::new(),
            verdicts: Map::new(),
            verdict: String::new(),
        }
    }

    pub fn result(&self, key: &str) -> Option<&Value> {
        self.results.get(key)
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }
}

/// Pretty printer that writes every float with 17 significant digits.
///
/// serde_json routes NaN and infinities to `write_null`, so reports carry no
/// nulls at all: absent values are left out instead.
struct ReportFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ReportFormatter<'_> {
    fn write_null<W: ?Sized + io::Write>(&mut self, _: &mut W) -> io::Result<()> {
        Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "null or non-finite number in report",
        ))
    }

    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("non-finite number {value}"),
            ));
        }
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Writes any serializable value in the report format.
pub fn write_report<T: Serialize, W: io::Write>(value: &T, writer: W) -> Result<(), Diagnostic> {
    let mut ser =
        serde_json::Serializer::with_formatter(writer, ReportFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Diagnostic::new("report", "", e.to_string()))
}

/// Report text with a trailing newline.
pub fn to_report_string<T: Serialize>(value: &T) -> Result<String, Diagnostic> {
    let mut buf = Vec::new();
    write_report(value, &mut buf)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}
