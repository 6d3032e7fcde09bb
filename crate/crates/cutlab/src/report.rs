//! Versioned JSON envelope around every command's output.

use std::io;
use std::time::Duration;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub report: Value,
    pub wall_time_seconds: f64,
}

impl ReportEnvelope {
    pub fn new(
        command: &str,
        config: impl Serialize,
        seeds: Vec<u64>,
        report: impl Serialize,
        wall: Duration,
    ) -> serde_json::Result<Self> {
        Ok(ReportEnvelope {
            schema: SCHEMA,
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seeds,
            report: serde_json::to_value(report)?,
            wall_time_seconds: wall.as_secs_f64(),
        })
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// `v` with 17 significant digits in exponent form.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty printer that writes every float with 17 significant digits.
struct SigFigs<'a>(PrettyFormatter<'a>);

impl Formatter for SigFigs<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt17(v).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        w.write_all(fmt17(v as f64).as_bytes())
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
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
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(v: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigs(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
