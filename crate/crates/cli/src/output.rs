use std::io;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Value};

use roytw::greatest_root::{PValue, Probability};
use roytw::GreatestRootParams;

use crate::cli::Format;

/// Version tag carried by every JSON document.
pub const SCHEMA: &str = "roytw/1";

/// One result in all three output formats.
pub struct Report {
    pub json: Value,
    pub text: Vec<String>,
    /// Header first.
    pub csv: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut doc = self.json.clone();
                if let Value::Object(map) = &mut doc {
                    map.insert("schema".into(), SCHEMA.into());
                }
                to_json(&doc)
            }
            Format::Text => self.text.join("\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in &self.csv {
                    w.write_record(row).expect("writing to memory");
                }
                String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 input")
            }
        }
    }
}

/// Pretty JSON with every float in shortest round-trip scientific notation.
struct Scientific<'a>(PrettyFormatter<'a>);

impl Formatter for Scientific<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:e}")
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

pub fn to_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Scientific(PrettyFormatter::new()));
    serde::Serialize::serialize(value, &mut ser).expect("serializing a JSON value");
    String::from_utf8(out).expect("JSON is utf-8")
}

/// Four significant digits.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        format!("{x:.*}", (3 - e).max(0) as usize)
    } else {
        format!("{x:.3e}")
    }
}

/// Full-precision scientific notation for CSV cells.
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

pub fn params_json(g: &GreatestRootParams) -> Value {
    let t = g.to_table();
    let s = g.to_sas();
    json!({
        "mkb": { "p": g.p(), "m": g.m(), "n": g.n() },
        "table": { "s": t.s, "m": t.m, "n": t.n },
        "sas": { "p": s.p, "q": s.q, "v": s.v },
    })
}

pub fn params_text(g: &GreatestRootParams) -> String {
    let t = g.to_table();
    let s = g.to_sas();
    format!(
        "mkb (p, m, n) = ({}, {}, {}); table (s, m, n) = ({}, {}, {}); sas (p, q, v) = ({}, {}, {})",
        g.p(),
        g.m(),
        g.n(),
        t.s,
        t.m,
        t.n,
        s.p,
        s.q,
        s.v
    )
}

pub const PARAM_HEADERS: [&str; 9] = [
    "p", "m", "n", "table_s", "table_m", "table_n", "sas_p", "sas_q", "sas_v",
];

pub fn params_csv(g: &GreatestRootParams) -> Vec<String> {
    let t = g.to_table();
    let s = g.to_sas();
    [g.p(), g.m(), g.n(), t.s, t.m, t.n, s.p, s.q, s.v]
        .iter()
        .map(|&v| sci(v))
        .collect()
}

/// `(json value, json log10, text, csv value, csv log10)` of a TW p-value.
pub fn pvalue_views(p: &PValue) -> (Value, Value, String, String, String) {
    match p {
        PValue::Estimate(p) => probability_views(p),
        PValue::BelowTailLimit { bound } => {
            let text = format!("< {bound:e}");
            let log = format!("< {}", bound.log10());
            (text.clone().into(), log.clone().into(), text.clone(), text, log)
        }
    }
}

pub fn probability_views(p: &Probability) -> (Value, Value, String, String, String) {
    let log = p.log10();
    (finite(p.value), finite(log), sig4(p.value), sci(p.value), sci(log))
}

/// JSON number, or null for a non-finite value (the log of a zero
/// probability).
pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        x.into()
    } else {
        Value::Null
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_significant_digits() {
        assert_eq!(sig4(2.0234), "2.023");
        assert_eq!(sig4(0.38386), "0.3839");
        assert_eq!(sig4(5.5838e-5), "5.584e-5");
        assert_eq!(sig4(1234.4), "1234");
        assert_eq!(sig4(-0.000_123_45), "-0.0001234");
    }

    #[test]
    fn json_floats_are_scientific() {
        let s = to_json(&json!({ "x": 0.384, "y": [1e-14] }));
        assert!(s.contains("3.84e-1"), "{s}");
        assert!(s.contains("1e-14"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.384));
    }
}
