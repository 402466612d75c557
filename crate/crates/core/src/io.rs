//! Configuration files, artifact serialization and atomic output.
//!
//! Every document carries `"schema_version": 1`. Fields that reference a
//! model, topology or schedule accept either an inline object or a path,
//! resolved relative to the referencing file.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ca::{build_hamiltonian, HamiltonianModel};
use crate::error::{Error, Result};
use crate::gaussian::{gi, GaussianIntVector};
use crate::ising::{GraphTopology, Schedule, ScheduleKind, ScheduledFlip};
use crate::ontology::preset_hamiltonian;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        }
    }
}

/// Where a document came from, for error messages and relative paths.
#[derive(Clone, Debug)]
pub struct Source {
    pub file: String,
    pub dir: PathBuf,
}

impl Source {
    pub fn inline() -> Self {
        Source {
            file: "<inline>".into(),
            dir: PathBuf::from("."),
        }
    }

    pub fn err(&self, field: &str, message: impl Into<String>) -> Error {
        Error::config(format!("{}:{}", self.file, field), message)
    }
}

pub fn read_document(path: &Path) -> Result<(Value, Source)> {
    let source = Source {
        file: path.display().to_string(),
        dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let text = std::fs::read_to_string(path).map_err(|e| source.err("$", format!("cannot read: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| source.err("$", format!("not valid JSON: {e}")))?;
    check_version(&value, &source, "$", true)?;
    Ok((value, source))
}

fn check_version(value: &Value, source: &Source, field: &str, required: bool) -> Result<()> {
    match value.get("schema_version") {
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(source.err(
            &format!("{field}.schema_version"),
            format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
        )),
        None if required => Err(source.err(&format!("{field}.schema_version"), "missing")),
        None => Ok(()),
    }
}

/// Resolves an inline object or a path reference.
pub fn resolve(value: &Value, source: &Source, field: &str) -> Result<(Value, Source)> {
    match value {
        Value::String(p) => {
            let path = source.dir.join(p);
            if !path.is_file() {
                return Err(source.err(field, format!("referenced file {} does not exist", path.display())));
            }
            read_document(&path)
        }
        Value::Object(_) => {
            check_version(value, source, field, false)?;
            Ok((value.clone(), source.clone()))
        }
        _ => Err(source.err(field, "expected an object or a file path")),
    }
}

pub fn parse<T: DeserializeOwned>(value: &Value, source: &Source, field: &str) -> Result<T> {
    serde_json::from_value(value.clone()).map_err(|e| source.err(field, e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    schema_version: Option<u64>,
    preset: Option<String>,
    s: Option<Vec<Vec<i64>>>,
    a: Option<Vec<Vec<i64>>>,
}

/// `{"preset": "H2"}` or `{"s": [[..]], "a": [[..]]}`; a missing `a` is zero.
pub fn load_model(value: &Value, source: &Source, field: &str) -> Result<HamiltonianModel> {
    let (value, source) = resolve(value, source, field)?;
    let doc: ModelDoc = parse(&value, &source, field)?;
    let _ = doc.schema_version;
    match (doc.preset, doc.s, doc.a) {
        (Some(name), None, None) => preset_hamiltonian(&name).map_err(|e| source.err(field, e.to_string())),
        (None, Some(s), a) => {
            let n = s.len();
            let a = a.unwrap_or_else(|| vec![vec![0; n]; n]);
            build_hamiltonian(s, a).map_err(|e| source.err(field, e.to_string()))
        }
        _ => Err(source.err(field, "give either a preset or the matrices s (and a)")),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyDoc {
    schema_version: Option<u64>,
    preset: Option<String>,
    n_vertices: usize,
    edges: Option<Vec<[usize; 2]>>,
}

/// `{"n_vertices": N, "edges": [[i, j], ..]}` or `{"preset": "ring", "n_vertices": N}`.
pub fn load_topology(value: &Value, source: &Source, field: &str) -> Result<GraphTopology> {
    let (value, source) = resolve(value, source, field)?;
    let doc: TopologyDoc = parse(&value, &source, field)?;
    let _ = doc.schema_version;
    let t = match (doc.preset, doc.edges) {
        (Some(p), None) => GraphTopology::preset(&p, doc.n_vertices),
        (None, Some(edges)) => GraphTopology::new(doc.n_vertices, edges.into_iter().map(|[i, j]| (i, j)).collect()),
        _ => return Err(source.err(field, "give either a preset or an edge list")),
    };
    t.map_err(|e| source.err(field, e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleDoc {
    schema_version: Option<u64>,
    kind: String,
    seed: Option<u64>,
    steps: Vec<(usize, usize, i8)>,
}

/// `{"kind": "periodic" | "seeded_random" | "explicit", "seed"?, "steps": [[i, j, sign], ..]}`.
pub fn load_schedule(value: &Value, source: &Source, field: &str) -> Result<Schedule> {
    let (value, source) = resolve(value, source, field)?;
    let doc: ScheduleDoc = parse(&value, &source, field)?;
    let _ = doc.schema_version;
    let kind = match (doc.kind.as_str(), doc.seed) {
        ("periodic", None) => ScheduleKind::Periodic,
        ("explicit", None) => ScheduleKind::Explicit,
        ("seeded_random", Some(seed)) => ScheduleKind::SeededRandom { seed },
        ("seeded_random", None) => return Err(source.err(field, "seeded_random needs a seed")),
        (k, _) => return Err(source.err(field, format!("unsupported schedule kind {k:?}"))),
    };
    let flips = doc
        .steps
        .into_iter()
        .map(|(i, j, sign)| ScheduledFlip {
            edge: (i.min(j), i.max(j)),
            sign,
        })
        .collect();
    Schedule::new(kind, flips).map_err(|e| source.err(field, e.to_string()))
}

/// A component given as an integer or as `[re, im]`.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum Component {
    Int(i64),
    Pair([i64; 2]),
}

pub fn to_vector(components: &[Component]) -> GaussianIntVector {
    GaussianIntVector(
        components
            .iter()
            .map(|c| match *c {
                Component::Int(v) => gi(v, 0),
                Component::Pair([re, im]) => gi(re, im),
            })
            .collect(),
    )
}

/// Parses a bit string where character `k` is spin `k`.
pub fn parse_bits(bits: &str, source: &Source, field: &str) -> Result<Vec<bool>> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(source.err(field, format!("bit strings use 0 and 1, found {other:?}"))),
        })
        .collect()
}

struct FixedFloats<F>(F);

impl<F: serde_json::ser::Formatter> serde_json::ser::Formatter for FixedFloats<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_float(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // JSON has no token for these; callers only reach this through CSV
        format!("{v}")
    }
}

/// Pretty JSON with fixed-precision floats and a trailing newline.
pub fn emit_json(value: &impl Serialize) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        FixedFloats(serde_json::ser::PrettyFormatter::with_indent(b"  ")),
    );
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize report: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

pub fn emit_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::InvalidParameter(format!("cannot write csv: {e}"));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r).map_err(wrap)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidParameter(format!("cannot write csv: {e}")))
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::io(path, std::io::Error::other("output path has no file name")))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        let out = String::from_utf8(emit_json(&json!({"a": 0.5, "b": [1, 2]})).unwrap()).unwrap();
        assert_eq!(out, "{\n  \"a\": 5.0000000000000000e-1,\n  \"b\": [\n    1,\n    2\n  ]\n}\n");
        let back: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(back["a"], json!(0.5));
    }

    #[test]
    fn empty_results_are_an_empty_array() {
        let rows: Vec<Value> = Vec::new();
        assert_eq!(emit_json(&rows).unwrap(), b"[]\n");
    }

    #[test]
    fn inline_model_and_preset() {
        let src = Source::inline();
        let m = load_model(&json!({"s": [[0, 1], [1, 0]]}), &src, "$.model").unwrap();
        assert_eq!(m.dim(), 2);
        let p = load_model(&json!({"preset": "H3"}), &src, "$.model").unwrap();
        assert_eq!(p.dim(), 3);
        let bad = load_model(&json!({"s": [[0, 1], [2, 0]]}), &src, "$.model").unwrap_err();
        assert!(matches!(bad, Error::ConfigInvalid { ref path, .. } if path == "<inline>:$.model"));
        assert!(load_model(&json!({"preset": "H3", "schema_version": 2}), &src, "$.model").is_err());
        assert!(load_model(&json!({"preset": "H3", "extra": 1}), &src, "$.model").is_err());
    }

    #[test]
    fn missing_reference() {
        let err = load_topology(&json!("nowhere.json"), &Source::inline(), "$.topology").unwrap_err();
        assert!(matches!(err, Error::ConfigInvalid { .. }));
    }

    #[test]
    fn topology_and_schedule_documents() {
        let src = Source::inline();
        let t = load_topology(&json!({"n_vertices": 3, "edges": [[0, 1], [1, 2]]}), &src, "$").unwrap();
        assert_eq!(t.n_edges(), 2);
        let r = load_topology(&json!({"preset": "ring", "n_vertices": 5}), &src, "$").unwrap();
        assert_eq!(r.n_edges(), 5);
        let s = load_schedule(&json!({"kind": "seeded_random", "seed": 3, "steps": [[1, 0, -1]]}), &src, "$").unwrap();
        assert_eq!(s.flips[0].edge, (0, 1));
        assert!(load_schedule(&json!({"kind": "periodic", "steps": []}), &src, "$").is_err());
        assert!(load_schedule(&json!({"kind": "seeded_random", "steps": [[0, 1, 1]]}), &src, "$").is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
