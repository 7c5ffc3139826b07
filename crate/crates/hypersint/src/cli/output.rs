//! Deterministic JSON and CSV documents: fixed field order, floats as %.17g,
//! written to a temporary file and renamed into place.

use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Field>),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Float(x)
    }
}

impl From<usize> for Field {
    fn from(x: usize) -> Self {
        Field::Int(x as i64)
    }
}

impl From<u64> for Field {
    fn from(x: u64) -> Self {
        Field::Int(x as i64)
    }
}

impl From<bool> for Field {
    fn from(x: bool) -> Self {
        Field::Bool(x)
    }
}

impl From<&str> for Field {
    fn from(x: &str) -> Self {
        Field::Str(x.to_string())
    }
}

impl From<String> for Field {
    fn from(x: String) -> Self {
        Field::Str(x)
    }
}

impl<T: Into<Field>> From<Vec<T>> for Field {
    fn from(v: Vec<T>) -> Self {
        Field::List(v.into_iter().map(Into::into).collect())
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(v: Option<T>) -> Self {
        v.map_or(Field::Null, Into::into)
    }
}

/// C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Field {
    fn csv_text(&self) -> String {
        match self {
            Field::Null => String::new(),
            Field::Bool(b) => b.to_string(),
            Field::Int(i) => i.to_string(),
            Field::Float(x) => fmt_g17(*x),
            Field::Str(s) => s.clone(),
            Field::List(v) => v.iter().map(Field::csv_text).collect::<Vec<_>>().join(";"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Field::Null => s.serialize_none(),
            Field::Bool(b) => s.serialize_bool(*b),
            Field::Int(i) => s.serialize_i64(*i),
            Field::Float(x) if !x.is_finite() => s.serialize_none(),
            Field::Float(x) => {
                let raw = RawValue::from_string(fmt_g17(*x)).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Field::Str(v) => s.serialize_str(v),
            Field::List(v) => {
                let mut seq = s.serialize_seq(Some(v.len()))?;
                for x in v {
                    seq.serialize_element(x)?;
                }
                seq.end()
            }
        }
    }
}

/// Ordered key/value record.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Field)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, v: impl Into<Field>) -> Self {
        self.0.push((key.to_string(), v.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Field> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format '{s}' (json or csv)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub meta: Record,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    meta: &'a Record,
    records: &'a [Record],
}

impl Document {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&JsonDoc { meta: &self.meta, records: &self.records })
                    .map_err(|e| Error::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    // meta as leading "# key=value" lines, then one header row
    fn render_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (k, v) in &self.meta.0 {
            out.push_str(&format!("# {k}={}\n", v.csv_text()));
        }
        let mut header: Vec<String> = Vec::new();
        for r in &self.records {
            for (k, _) in &r.0 {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        if !header.is_empty() {
            w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        }
        for r in &self.records {
            let row: Vec<String> = header.iter().map(|k| r.get(k).map(Field::csv_text).unwrap_or_default()).collect();
            w.write_record(&row).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(std::str::from_utf8(&bytes).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }
}

/// Write `text` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(-10.0), "-10");
        assert_eq!(fmt_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(fmt_g17(1.5e20), "1.5e+20");
        assert_eq!(fmt_g17(123456.75), "123456.75");
        assert_eq!(fmt_g17(0.0), "0");
        for x in [std::f64::consts::PI, -1.0 / 3.0, 6.02e23, 1e-300, 4.358114573] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let doc = Document {
            meta: Record::new().with("command", "spectrum"),
            records: vec![Record::new().with("N", 0usize).with("E", -10.0), Record::new().with("N", 1usize).with("x", vec![1.0, 2.5])],
        };
        let s = doc.render(Format::Csv).unwrap();
        assert_eq!(s, "# command=spectrum\nN,E,x\n0,-10,\n1,,1;2.5\n");
    }

    #[test]
    fn json_floats_and_nan() {
        let doc = Document { meta: Record::new(), records: vec![Record::new().with("a", 0.1).with("b", f64::NAN)] };
        let s = doc.render(Format::Json).unwrap();
        assert!(s.contains("\"a\": 0.10000000000000001"));
        assert!(s.contains("\"b\": null"));
        serde_json::from_str::<serde_json::Value>(&s).unwrap();
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
