//! Instance files: TOML with exact numbers.
//!
//! ```toml
//! name = "two streams"
//! dt_min = 10
//!
//! [[stream]]
//! id = "H1"
//! kind = "hot"
//! fcp = 2.5          # also "5/2" or "2.5" as a string
//! t_in = 400
//! t_out = 300
//!
//! [[utility]]
//! id = "CU"
//! kind = "cold"
//! temperature = 280
//! duty = 30          # optional
//! cost = 1           # optional
//!
//! [[interval]]       # optional explicit loads, replaces interval construction
//! name = "sub1"
//! hot = { H1 = 60 }
//! cold = { CU = 60 }
//! entering = { H1 = 2 }
//! ```
//!
//! Numbers may be integers, floats (read through their shortest decimal
//! form) or strings holding a decimal or a fraction.

use std::ops::Range;

use indexmap::IndexMap;
use serde::Deserialize;
use toml::Spanned;

use super::InstanceError;
use crate::model::{ExplicitInterval, HensInstance, Side, Stream, Utility};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Float(f64),
    Text(String),
}

type Num = Spanned<RawNumber>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    name: Option<String>,
    dt_min: Option<Num>,
    #[serde(default)]
    stream: Vec<RawStream>,
    #[serde(default)]
    utility: Vec<RawUtility>,
    #[serde(default)]
    interval: Vec<RawInterval>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStream {
    id: String,
    kind: Spanned<String>,
    fcp: Num,
    t_in: Option<Num>,
    t_out: Option<Num>,
    load: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUtility {
    id: String,
    kind: Spanned<String>,
    temperature: Option<Num>,
    duty: Option<Num>,
    cost: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    name: Option<String>,
    delta_t: Option<Num>,
    #[serde(default)]
    hot: IndexMap<String, Num>,
    #[serde(default)]
    cold: IndexMap<String, Num>,
    #[serde(default)]
    entering: IndexMap<String, Num>,
}

struct Reader<'a> {
    text: &'a str,
}

impl Reader<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.text.len());
        self.text[..end].matches('\n').count() + 1
    }

    fn error(&self, span: Option<Range<usize>>, field: &str, message: impl Into<String>) -> InstanceError {
        InstanceError::Parse {
            line: span.map(|s| self.line(s)),
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn number<S: Scalar>(&self, n: &Num, field: &str) -> Result<S, InstanceError> {
        let text = match n.get_ref() {
            RawNumber::Int(v) => v.to_string(),
            RawNumber::Float(v) if v.is_finite() => v.to_string(),
            RawNumber::Float(_) => return Err(self.error(Some(n.span()), field, "number must be finite")),
            RawNumber::Text(t) => t.trim().to_string(),
        };
        S::parse_decimal(&text).ok_or_else(|| self.error(Some(n.span()), field, format!("`{text}` is not a number")))
    }

    fn optional<S: Scalar>(&self, n: &Option<Num>, field: &str) -> Result<Option<S>, InstanceError> {
        n.as_ref().map(|n| self.number(n, field)).transpose()
    }

    fn side(&self, kind: &Spanned<String>, field: &str) -> Result<Side, InstanceError> {
        match kind.get_ref().as_str() {
            "hot" => Ok(Side::Hot),
            "cold" => Ok(Side::Cold),
            other => Err(self.error(Some(kind.span()), field, format!("expected `hot` or `cold`, got `{other}`"))),
        }
    }

    fn loads<S: Scalar>(&self, map: &IndexMap<String, Num>, field: &str) -> Result<Vec<(String, S)>, InstanceError> {
        map.iter()
            .map(|(id, n)| Ok((id.clone(), self.number(n, &format!("{field}.{id}"))?)))
            .collect()
    }
}

/// Parses and validates an instance.
pub fn parse_instance<S: Scalar>(text: &str) -> Result<HensInstance<S>, InstanceError> {
    let reader = Reader { text };
    let raw: RawInstance = toml::from_str(text).map_err(|e| InstanceError::Parse {
        line: e.span().map(|s| reader.line(s)),
        field: String::new(),
        message: e.message().to_string(),
    })?;
    if raw.stream.is_empty() {
        return Err(reader.error(None, "stream", "instance declares no streams"));
    }

    let mut streams = Vec::with_capacity(raw.stream.len());
    for (k, s) in raw.stream.iter().enumerate() {
        let at = |f: &str| format!("stream[{k}].{f}");
        streams.push(Stream {
            id: s.id.clone(),
            side: reader.side(&s.kind, &at("kind"))?,
            fcp: reader.number(&s.fcp, &at("fcp"))?,
            t_in: reader.optional(&s.t_in, &at("t_in"))?,
            t_out: reader.optional(&s.t_out, &at("t_out"))?,
            load: reader.optional(&s.load, &at("load"))?,
        });
    }
    let mut utilities = Vec::with_capacity(raw.utility.len());
    for (k, u) in raw.utility.iter().enumerate() {
        let at = |f: &str| format!("utility[{k}].{f}");
        utilities.push(Utility {
            id: u.id.clone(),
            side: reader.side(&u.kind, &at("kind"))?,
            temperature: reader.optional(&u.temperature, &at("temperature"))?,
            duty: reader.optional(&u.duty, &at("duty"))?,
            cost: reader.optional(&u.cost, &at("cost"))?,
        });
    }
    let mut intervals = Vec::with_capacity(raw.interval.len());
    for (k, iv) in raw.interval.iter().enumerate() {
        let at = |f: &str| format!("interval[{k}].{f}");
        intervals.push(ExplicitInterval {
            name: iv.name.clone().unwrap_or_else(|| format!("t{}", k + 1)),
            delta_t: reader.optional(&iv.delta_t, &at("delta_t"))?,
            hot: reader.loads(&iv.hot, &at("hot"))?,
            cold: reader.loads(&iv.cold, &at("cold"))?,
            entering: reader.loads(&iv.entering, &at("entering"))?,
        });
    }
    let instance = HensInstance {
        name: raw.name,
        dt_min: reader.optional(&raw.dt_min, "dt_min")?,
        streams,
        utilities,
        intervals,
    };
    instance.validate()?;
    Ok(instance)
}

fn number_text<S: Scalar>(v: &S) -> String {
    let text = v.to_exact_string();
    if text.parse::<i64>().is_ok() {
        text
    } else {
        format!("\"{text}\"")
    }
}

fn quoted(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn key(s: &str) -> String {
    let bare = !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
    if bare {
        s.to_string()
    } else {
        quoted(s)
    }
}

fn side_text(side: Side) -> &'static str {
    match side {
        Side::Hot => "hot",
        Side::Cold => "cold",
    }
}

fn inline_table<S: Scalar>(entries: &[(String, S)]) -> String {
    let body: Vec<String> = entries.iter().map(|(id, v)| format!("{} = {}", key(id), number_text(v))).collect();
    format!("{{ {} }}", body.join(", "))
}

/// Writes an instance in the format [`parse_instance`] reads back exactly.
pub fn emit_instance<S: Scalar>(instance: &HensInstance<S>) -> String {
    let mut out = String::new();
    if let Some(name) = &instance.name {
        out.push_str(&format!("name = {}\n", quoted(name)));
    }
    if let Some(dt) = &instance.dt_min {
        out.push_str(&format!("dt_min = {}\n", number_text(dt)));
    }
    for s in &instance.streams {
        out.push_str("\n[[stream]]\n");
        out.push_str(&format!("id = {}\nkind = \"{}\"\nfcp = {}\n", quoted(&s.id), side_text(s.side), number_text(&s.fcp)));
        for (field, v) in [("t_in", &s.t_in), ("t_out", &s.t_out), ("load", &s.load)] {
            if let Some(v) = v {
                out.push_str(&format!("{field} = {}\n", number_text(v)));
            }
        }
    }
    for u in &instance.utilities {
        out.push_str("\n[[utility]]\n");
        out.push_str(&format!("id = {}\nkind = \"{}\"\n", quoted(&u.id), side_text(u.side)));
        for (field, v) in [("temperature", &u.temperature), ("duty", &u.duty), ("cost", &u.cost)] {
            if let Some(v) = v {
                out.push_str(&format!("{field} = {}\n", number_text(v)));
            }
        }
    }
    for iv in &instance.intervals {
        out.push_str("\n[[interval]]\n");
        out.push_str(&format!("name = {}\n", quoted(&iv.name)));
        if let Some(dt) = &iv.delta_t {
            out.push_str(&format!("delta_t = {}\n", number_text(dt)));
        }
        out.push_str(&format!("hot = {}\n", inline_table(&iv.hot)));
        out.push_str(&format!("cold = {}\n", inline_table(&iv.cold)));
        if !iv.entering.is_empty() {
            out.push_str(&format!("entering = {}\n", inline_table(&iv.entering)));
        }
    }
    out
}
