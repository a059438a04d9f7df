//! Simulation config files (TOML) and line-delimited JSON traces.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::numerics::{Matrix, Mode, Rational, DEFAULT_PRECISION};

use super::events::PerturbationEvent;
use super::network::HysteresisRule;
use super::policy::ConfidencePolicy;
use super::run::{RunOptions, SoundnessViolation, TickRecord, Trace};
use super::state::Configuration;
use super::DynamicsError;

pub const TRACE_FORMAT: &str = "flocksim-trace/1";

#[derive(Deserialize)]
#[serde(untagged)]
enum Literal {
    Text(String),
    Int(i64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    time: u64,
    members: Vec<usize>,
    alpha: Vec<Spanned<Literal>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: usize,
    d: usize,
    #[serde(default)]
    mode: Option<Mode>,
    #[serde(default)]
    precision: Option<usize>,
    x0: Spanned<Vec<Vec<Spanned<Literal>>>>,
    v1: Spanned<Vec<Vec<Spanned<Literal>>>>,
    #[serde(default)]
    policy: Option<Spanned<String>>,
    #[serde(default)]
    weights: BTreeMap<String, Spanned<Literal>>,
    #[serde(default)]
    epsilon_h: Option<Spanned<Literal>>,
    #[serde(default)]
    hysteresis: Option<bool>,
    horizon: u64,
    #[serde(default)]
    events: Vec<Spanned<RawEvent>>,
}

/// Everything needed to start a run.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub mode: Mode,
    /// Mantissa bits in approximate mode.
    pub precision: usize,
    pub initial: Configuration<Rational>,
    pub policy: ConfidencePolicy,
    pub rule: HysteresisRule,
    pub horizon: u64,
    pub events: Vec<PerturbationEvent>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn line(&self, offset: usize) -> usize {
        self.0[..offset.min(self.0.len())].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, DynamicsError> {
        Err(DynamicsError::Config { line: Some(self.line(offset)), message: message.into() })
    }

    fn rational(&self, lit: &Spanned<Literal>) -> Result<Rational, DynamicsError> {
        match lit.get_ref() {
            Literal::Int(k) => Ok(Rational::from_integer(*k)),
            Literal::Text(s) => match s.parse() {
                Ok(r) => Ok(r),
                Err(e) => self.err(lit.span().start, format!("bad rational {s:?}: {e}")),
            },
        }
    }

    fn matrix(&self, rows: &Spanned<Vec<Vec<Spanned<Literal>>>>, n: usize, d: usize, key: &str) -> Result<Matrix<Rational>, DynamicsError> {
        let at = rows.span().start;
        if rows.get_ref().len() != n {
            return self.err(at, format!("{key} has {} rows, expected n = {n}", rows.get_ref().len()));
        }
        let mut m = Matrix::zeros(n, d);
        for (i, row) in rows.get_ref().iter().enumerate() {
            if row.len() != d {
                return self.err(at, format!("{key} row {i} has {} entries, expected d = {d}", row.len()));
            }
            for (k, lit) in row.iter().enumerate() {
                m[(i, k)] = self.rational(lit)?;
            }
        }
        Ok(m)
    }
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self, DynamicsError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| DynamicsError::Config {
            line: e.span().map(|s| Lines(text).line(s.start)),
            message: e.message().to_string(),
        })?;
        let lines = Lines(text);
        if raw.n == 0 || raw.d == 0 {
            return Err(DynamicsError::Config { line: None, message: "n and d must be positive".into() });
        }
        let x = lines.matrix(&raw.x0, raw.n, raw.d, "x0")?;
        let v = lines.matrix(&raw.v1, raw.n, raw.d, "v1")?;
        let policy = match &raw.policy {
            None => ConfidencePolicy::Vicsek,
            Some(p) if p.get_ref() == "custom" => {
                let mut table = BTreeMap::new();
                for (k, c) in &raw.weights {
                    let Ok(deg) = k.parse::<usize>() else {
                        return lines.err(c.span().start, format!("weight key {k:?} is not a degree"));
                    };
                    table.insert(deg, lines.rational(c)?);
                }
                ConfidencePolicy::custom(table).or_else(|e| lines.err(p.span().start, e.to_string()))?
            }
            Some(p) => p.get_ref().parse().or_else(|e: DynamicsError| lines.err(p.span().start, e.to_string()))?,
        };
        let mut rule = HysteresisRule::default();
        if let Some(eps) = &raw.epsilon_h {
            rule = HysteresisRule::new(lines.rational(eps)?).or_else(|e| lines.err(eps.span().start, e.to_string()))?;
        }
        if raw.hysteresis == Some(false) {
            rule.enabled = false;
        }
        let mut events = Vec::with_capacity(raw.events.len());
        for ev in &raw.events {
            let at = ev.span().start;
            let e = ev.get_ref();
            if e.members.is_empty() || e.members.iter().any(|&i| i >= raw.n) {
                return lines.err(at, "event members empty or out of range");
            }
            if e.alpha.len() != raw.d {
                return lines.err(at, format!("event alpha has {} entries, expected d = {}", e.alpha.len(), raw.d));
            }
            let alpha = e.alpha.iter().map(|a| lines.rational(a)).collect::<Result<Vec<_>, _>>()?;
            let pe = PerturbationEvent::new(e.time, e.members.clone(), alpha);
            if !pe.alpha_admissible() {
                return lines.err(at, "event alpha entry outside [-1, 1]");
            }
            events.push(pe);
        }
        events.sort_by_key(|e| e.tick);
        let precision = raw.precision.unwrap_or(DEFAULT_PRECISION);
        if precision < 53 {
            return Err(DynamicsError::Config { line: None, message: format!("precision {precision} below 53 bits") });
        }
        Ok(SimConfig {
            mode: raw.mode.unwrap_or(Mode::Exact),
            precision,
            initial: Configuration::new(x, v)?,
            policy,
            rule,
            horizon: raw.horizon,
            events,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DynamicsError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn run_options(&self) -> RunOptions {
        let mut o = RunOptions::new(self.horizon, self.policy.clone());
        o.rule = self.rule.clone();
        o
    }

    /// Writes the config back in the form [`SimConfig::parse`] reads.
    pub fn to_toml(&self) -> String {
        fn rows(m: &Matrix<Rational>) -> String {
            let body: Vec<String> = (0..m.rows())
                .map(|i| {
                    let r: Vec<String> = m.row(i).iter().map(|v| format!("\"{v}\"")).collect();
                    format!("  [{}],", r.join(", "))
                })
                .collect();
            format!("[\n{}\n]", body.join("\n"))
        }
        let mut s = String::new();
        let mode = match self.mode {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        };
        let _ = writeln!(s, "n = {}\nd = {}\nmode = \"{mode}\"", self.initial.x.rows(), self.initial.x.cols());
        if self.precision != DEFAULT_PRECISION {
            let _ = writeln!(s, "precision = {}", self.precision);
        }
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "policy = \"{}\"", self.policy.name());
        let _ = writeln!(s, "epsilon_h = \"{}\"", self.rule.epsilon);
        if !self.rule.enabled {
            let _ = writeln!(s, "hysteresis = false");
        }
        let _ = writeln!(s, "x0 = {}", rows(&self.initial.x));
        let _ = writeln!(s, "v1 = {}", rows(&self.initial.v));
        if let ConfidencePolicy::Custom(t) = &self.policy {
            let _ = writeln!(s, "\n[weights]");
            for (d, c) in t {
                let _ = writeln!(s, "\"{d}\" = \"{c}\"");
            }
        }
        for e in &self.events {
            let alpha: Vec<String> = e.alpha.iter().map(|a| format!("\"{a}\"")).collect();
            let members: Vec<String> = e.members.iter().map(usize::to_string).collect();
            let _ = writeln!(
                s,
                "\n[[events]]\ntime = {}\nmembers = [{}]\nalpha = [{}]",
                e.tick,
                members.join(", "),
                alpha.join(", ")
            );
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub format: String,
    pub n: usize,
    pub d: usize,
}

#[derive(Serialize, Deserialize)]
struct TraceFooter {
    soundness_violations: Vec<SoundnessViolation>,
}

/// Streams a trace as one JSON object per line: header, records, footer.
pub struct TraceWriter<W: Write> {
    out: W,
}

fn json_line<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), DynamicsError> {
    serde_json::to_writer(&mut *out, value).map_err(|e| DynamicsError::Trace(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, n: usize, d: usize) -> Result<Self, DynamicsError> {
        json_line(&mut out, &TraceHeader { format: TRACE_FORMAT.into(), n, d })?;
        Ok(TraceWriter { out })
    }

    pub fn record(&mut self, r: &TickRecord) -> Result<(), DynamicsError> {
        json_line(&mut self.out, r)
    }

    pub fn finish(mut self, violations: &[SoundnessViolation]) -> Result<W, DynamicsError> {
        json_line(&mut self.out, &TraceFooter { soundness_violations: violations.to_vec() })?;
        self.out.flush()?;
        Ok(self.out)
    }

    /// Flushes what has been written so far without a footer.
    pub fn flush(&mut self) -> Result<(), DynamicsError> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_trace<W: Write>(trace: &Trace, out: W) -> Result<W, DynamicsError> {
    let mut w = TraceWriter::new(out, trace.n, trace.d)?;
    for r in &trace.records {
        w.record(r)?;
    }
    w.finish(&trace.soundness_violations)
}

/// Reads a trace written by [`TraceWriter`]; a missing footer is accepted.
pub fn read_trace<R: BufRead>(input: R) -> Result<Trace, DynamicsError> {
    let mut lines = input.lines();
    let first = lines.next().ok_or_else(|| DynamicsError::Trace("empty trace".into()))??;
    let header: TraceHeader =
        serde_json::from_str(&first).map_err(|e| DynamicsError::Trace(format!("line 1: {e}")))?;
    if header.format != TRACE_FORMAT {
        return Err(DynamicsError::Trace(format!("unknown format {:?}", header.format)));
    }
    let mut trace = Trace { n: header.n, d: header.d, records: Vec::new(), soundness_violations: Vec::new() };
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| DynamicsError::Trace(format!("line {}: {e}", k + 2)))?;
        let parsed = if value.get("tick").is_some() {
            serde_json::from_value(value).map(|r| trace.records.push(r))
        } else {
            serde_json::from_value(value).map(|f: TraceFooter| trace.soundness_violations = f.soundness_violations)
        };
        parsed.map_err(|e| DynamicsError::Trace(format!("line {}: {e}", k + 2)))?;
    }
    Ok(trace)
}
