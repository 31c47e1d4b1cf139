//! Text formats for behaviors, correlators, vertex lists, inequalities,
//! certificates, quantum setups, family catalogs and checkpoints.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use bellpoly_core::correlators::Pattern;
use bellpoly_core::lp::{MembershipCertificate, VisibilityResult};
use bellpoly_core::polytope::DdState;
use bellpoly_core::quantum::{Observable, QuantumSetup};
use bellpoly_core::scalar::{format_rational, parse_rational};
use bellpoly_core::scenario::{format_inputs, format_outcomes, parse_inputs, parse_outcomes};
use bellpoly_core::{
    Behavior, BellInequality, CorrelatorVector, ExactPoint, ModelSpec, Rational, Scalar, Scenario, Space, VertexSet,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ToolError, ToolResult};
use crate::manifest::RunManifest;

/// Scalars that can be written to and read from text and JSON.
pub trait TextScalar: Scalar {
    const BACKEND: &'static str;
    fn to_text(&self) -> String;
    fn to_json(&self) -> Value;
    fn parse_text(s: &str) -> Option<Self>;
    fn from_json(v: &Value) -> Option<Self>;
}

impl TextScalar for Rational {
    const BACKEND: &'static str = "rational";

    fn to_text(&self) -> String {
        format_rational(self)
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn parse_text(s: &str) -> Option<Self> {
        parse_rational(s)
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(bellpoly_core::scalar::rational_int),
            _ => None,
        }
    }
}

impl TextScalar for f64 {
    const BACKEND: &'static str = "float";

    fn to_text(&self) -> String {
        // shortest representation that round-trips
        format!("{self:?}")
    }

    fn to_json(&self) -> Value {
        json!(self)
    }

    fn parse_text(s: &str) -> Option<Self> {
        match parse_rational(s) {
            Some(r) if s.contains('/') => Some(r.to_f64()),
            _ => s.trim().parse().ok(),
        }
    }

    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => Self::parse_text(s),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// behaviors

/// A behavior read from disk, in whichever backend the file declared.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyBehavior {
    Rational(Behavior<Rational>),
    Float(Behavior<f64>),
}

impl AnyBehavior {
    pub fn scenario(&self) -> Scenario {
        match self {
            Self::Rational(b) => b.scenario(),
            Self::Float(b) => b.scenario(),
        }
    }

    pub fn to_f64(&self) -> Behavior<f64> {
        match self {
            Self::Rational(b) => b.to_f64(),
            Self::Float(b) => b.clone(),
        }
    }
}

pub fn behavior_to_json<T: TextScalar>(b: &Behavior<T>, manifest: Option<&RunManifest>) -> String {
    let s = b.scenario();
    let k = s.n_settings();
    let mut entries = Vec::with_capacity(s.table_len());
    for x in 0..k {
        for a in 0..k {
            entries.push(json!([format_inputs(&s, x), format_outcomes(&s, a), b.prob(x, a).to_json()]));
        }
    }
    let mut doc = json!({ "n": s.n_parties(), "backend": T::BACKEND, "entries": entries });
    if let Some(m) = manifest {
        doc["manifest"] = serde_json::to_value(m).expect("manifest");
    }
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

fn json_field<'a>(doc: &'a Value, key: &str, file: &str) -> ToolResult<&'a Value> {
    doc.get(key).ok_or_else(|| ToolError::format(file, 0, format!("missing field `{key}`")))
}

fn parse_table<T: TextScalar>(s: Scenario, entries: &[Value], file: &str) -> ToolResult<Behavior<T>> {
    let mut table: Vec<Option<T>> = vec![None; s.table_len()];
    for (i, e) in entries.iter().enumerate() {
        let bad = |m: &str| ToolError::format(file, i + 1, m.to_string());
        let e = e.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("entry must be [inputs, outcomes, p]"))?;
        let x = e[0].as_str().and_then(|t| parse_inputs(&s, t)).ok_or_else(|| bad("bad input string"))?;
        let a = e[1].as_str().and_then(|t| parse_outcomes(&s, t)).ok_or_else(|| bad("bad outcome string"))?;
        let p = T::from_json(&e[2]).ok_or_else(|| bad("bad probability"))?;
        let slot = &mut table[s.index(x, a)];
        if slot.is_some() {
            return Err(bad("duplicate entry"));
        }
        *slot = Some(p);
    }
    let table: Option<Vec<T>> = table.into_iter().collect();
    let table = table.ok_or_else(|| ToolError::format(file, 0, "missing table entries"))?;
    Ok(Behavior::new(s, table)?)
}

pub fn behavior_from_json(text: &str, file: &str) -> ToolResult<AnyBehavior> {
    let doc: Value = serde_json::from_str(text)?;
    let n = json_field(&doc, "n", file)?.as_u64().ok_or_else(|| ToolError::format(file, 0, "`n` must be an integer"))?;
    let s = Scenario::new(n as usize)?;
    let entries = json_field(&doc, "entries", file)?
        .as_array()
        .ok_or_else(|| ToolError::format(file, 0, "`entries` must be an array"))?;
    match doc.get("backend").and_then(Value::as_str).unwrap_or("rational") {
        "rational" => Ok(AnyBehavior::Rational(parse_table(s, entries, file)?)),
        "float" => Ok(AnyBehavior::Float(parse_table(s, entries, file)?)),
        other => Err(ToolError::format(file, 0, format!("unknown backend `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// correlators

pub fn correlators_to_csv<T: TextScalar>(c: &CorrelatorVector<T>) -> String {
    let s = c.scenario();
    let mut out = String::new();
    for (p, v) in Pattern::all(&s).zip(c.coords()) {
        out.push_str(&format!("{p},{}\n", v.to_text()));
    }
    out
}

/// Splits `0,1,I,<value>` into the pattern and the value text.
fn split_pattern_line<'a>(line: &'a str, file: &str, lineno: usize) -> ToolResult<(Pattern, &'a str)> {
    let (pat, value) = line
        .rsplit_once(',')
        .ok_or_else(|| ToolError::format(file, lineno, "expected `pattern,value`"))?;
    let pattern = Pattern::parse(pat.trim()).map_err(|e| ToolError::format(file, lineno, e.to_string()))?;
    Ok((pattern, value.trim()))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn correlators_from_csv<T: TextScalar>(text: &str, file: &str) -> ToolResult<CorrelatorVector<T>> {
    let mut entries: Vec<(Pattern, T)> = Vec::new();
    for (lineno, line) in content_lines(text) {
        let (p, v) = split_pattern_line(line, file, lineno)?;
        let v = T::parse_text(v).ok_or_else(|| ToolError::format(file, lineno, "bad value"))?;
        entries.push((p, v));
    }
    let n = entries.first().map(|(p, _)| p.n_parties()).ok_or_else(|| ToolError::format(file, 0, "empty file"))?;
    let s = Scenario::new(n)?;
    let mut coords: Vec<Option<T>> = vec![None; s.correlator_len()];
    for (p, v) in entries {
        if p.n_parties() != n {
            return Err(ToolError::format(file, 0, "patterns of different lengths"));
        }
        coords[p.index()] = Some(v);
    }
    let coords: Option<Vec<T>> = coords.into_iter().collect();
    Ok(CorrelatorVector::new(s, coords.ok_or_else(|| ToolError::format(file, 0, "missing patterns"))?)?)
}

// ---------------------------------------------------------------------------
// vertex lists

pub fn write_vertex_file<W: Write>(
    out: &mut W,
    vertices: &VertexSet,
    space: Space,
    manifest: Option<&RunManifest>,
) -> ToolResult<()> {
    let v = vertices.to_space(space)?;
    let mut header = format!("model={} n={} count={}", v.model(), v.scenario().n_parties(), v.len());
    if space == Space::Correlator {
        header.push_str(" space=correlator");
    }
    writeln!(out, "{header}")?;
    if let Some(m) = manifest {
        writeln!(out, "{}", m.comment_line())?;
    }
    let mut line = String::new();
    for p in v.points() {
        line.clear();
        for (i, &num) in p.nums().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            let r = bellpoly_core::scalar::rational(num as i64, p.den() as i64);
            line.push_str(&format_rational(&r));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn vertex_file_string(vertices: &VertexSet, space: Space, manifest: Option<&RunManifest>) -> ToolResult<String> {
    let mut buf = Vec::new();
    write_vertex_file(&mut buf, vertices, space, manifest)?;
    Ok(String::from_utf8(buf).expect("utf8"))
}

/// Reads a vertex list; non-signaling models are converted to correlator
/// coordinates.
pub fn read_vertex_file<R: BufRead>(reader: R, file: &str) -> ToolResult<VertexSet> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((i, l)) => {
                let l = l?;
                let t = l.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                break (i + 1, t.to_string());
            }
            None => return Err(ToolError::format(file, 0, "missing header")),
        }
    };
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for tok in header.1.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| ToolError::format(file, header.0, "header fields are key=value"))?;
        fields.insert(k, v);
    }
    let field = |k: &str| fields.get(k).copied().ok_or_else(|| ToolError::format(file, header.0, format!("header lacks `{k}`")));
    let model = ModelSpec::parse(field("model")?).map_err(|e| ToolError::format(file, header.0, e.to_string()))?;
    let n: usize = field("n")?.parse().map_err(|_| ToolError::format(file, header.0, "bad `n`"))?;
    let count: usize = field("count")?.parse().map_err(|_| ToolError::format(file, header.0, "bad `count`"))?;
    if n != model.scenario.n_parties() {
        return Err(ToolError::format(file, header.0, "`n` disagrees with the model"));
    }
    let space = match fields.get("space").copied().unwrap_or("probability") {
        "probability" => Space::Probability,
        "correlator" => Space::Correlator,
        other => return Err(ToolError::format(file, header.0, format!("unknown space `{other}`"))),
    };
    let dim = space.dim(&model.scenario);
    let mut points = Vec::with_capacity(count);
    for (i, l) in lines {
        let l = l?;
        let t = l.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let coords: Option<Vec<Rational>> = t.split(',').map(parse_rational).collect();
        let coords = coords.ok_or_else(|| ToolError::format(file, i + 1, "bad rational"))?;
        if coords.len() != dim {
            return Err(ToolError::format(file, i + 1, format!("expected {dim} entries, found {}", coords.len())));
        }
        points.push(ExactPoint::from_rationals(&coords).map_err(|e| ToolError::format(file, i + 1, e.to_string()))?);
    }
    if points.len() != count {
        return Err(ToolError::format(file, 0, format!("header says {count} points, found {}", points.len())));
    }
    let set = VertexSet::new(model.clone(), space, points)?;
    if space == Space::Probability && model.is_non_signaling() {
        Ok(set.to_space(Space::Correlator)?)
    } else {
        Ok(set)
    }
}

// ---------------------------------------------------------------------------
// inequalities

pub fn inequality_to_csv<T: TextScalar>(ineq: &BellInequality<T>) -> String {
    let s = ineq.scenario();
    let space = match ineq.space() {
        Space::Correlator => "correlator",
        Space::Probability => "probability",
    };
    let model = ineq.model().map(|m| m.to_string()).unwrap_or_else(|| "unassigned".into());
    let mut out = format!("# n={} space={space} model={model}\n", s.n_parties());
    for (i, c) in ineq.terms() {
        match ineq.space() {
            Space::Correlator => {
                let p = Pattern::from_index(&s, i);
                out.push_str(&format!("{p},{}\n", c.to_text()));
            }
            Space::Probability => {
                let (x, a) = s.split_index(i);
                out.push_str(&format!("P,{},{},{}\n", format_inputs(&s, x), format_outcomes(&s, a), c.to_text()));
            }
        }
    }
    out.push_str(&format!("BOUND,{}\n", ineq.bound().to_text()));
    out
}

pub fn inequalities_to_csv<T: TextScalar>(ineqs: &[BellInequality<T>], manifest: Option<&RunManifest>) -> String {
    let mut out = String::new();
    if let Some(m) = manifest {
        out.push_str(&m.comment_line());
        out.push('\n');
    }
    for i in ineqs {
        out.push_str(&inequality_to_csv(i));
    }
    out
}

#[derive(Default)]
struct Block<T> {
    n: Option<usize>,
    space: Option<Space>,
    model: Option<ModelSpec>,
    corr: Vec<(Pattern, T)>,
    prob: Vec<(String, String, T)>,
}

pub fn inequalities_from_csv<T: TextScalar>(text: &str, file: &str) -> ToolResult<Vec<BellInequality<T>>> {
    let mut out = Vec::new();
    let mut block: Block<T> = Block { n: None, space: None, model: None, corr: Vec::new(), prob: Vec::new() };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            for tok in meta.split_whitespace() {
                match tok.split_once('=') {
                    Some(("n", v)) => block.n = v.parse().ok(),
                    Some(("space", "correlator")) => block.space = Some(Space::Correlator),
                    Some(("space", "probability")) => block.space = Some(Space::Probability),
                    Some(("model", "unassigned")) => block.model = None,
                    Some(("model", v)) => block.model = ModelSpec::parse(v).ok(),
                    _ => {}
                }
            }
            continue;
        }
        if let Some(b) = line.strip_prefix("BOUND,") {
            let bound = T::parse_text(b).ok_or_else(|| ToolError::format(file, lineno, "bad bound"))?;
            let finished = std::mem::replace(
                &mut block,
                Block { n: None, space: None, model: None, corr: Vec::new(), prob: Vec::new() },
            );
            out.push(finish_block(finished, bound, file, lineno)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("P,") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(ToolError::format(file, lineno, "expected `P,<inputs>,<outcomes>,<coef>`"));
            }
            let c = T::parse_text(parts[2]).ok_or_else(|| ToolError::format(file, lineno, "bad coefficient"))?;
            block.prob.push((parts[0].to_string(), parts[1].to_string(), c));
            continue;
        }
        let (p, v) = split_pattern_line(line, file, lineno)?;
        let c = T::parse_text(v).ok_or_else(|| ToolError::format(file, lineno, "bad coefficient"))?;
        block.corr.push((p, c));
    }
    if !block.corr.is_empty() || !block.prob.is_empty() {
        return Err(ToolError::format(file, 0, "last block lacks a BOUND line"));
    }
    Ok(out)
}

fn finish_block<T: TextScalar>(block: Block<T>, bound: T, file: &str, lineno: usize) -> ToolResult<BellInequality<T>> {
    if !block.corr.is_empty() && !block.prob.is_empty() {
        return Err(ToolError::format(file, lineno, "block mixes correlator and probability terms"));
    }
    let n = block
        .n
        .or_else(|| block.corr.first().map(|(p, _)| p.n_parties()))
        .or_else(|| block.prob.first().map(|(x, _, _)| x.len()))
        .ok_or_else(|| ToolError::format(file, lineno, "cannot infer the number of parties"))?;
    let s = Scenario::new(n)?;
    let space = block.space.unwrap_or(if block.prob.is_empty() { Space::Correlator } else { Space::Probability });
    let mut coeffs = vec![T::zero(); space.dim(&s)];
    match space {
        Space::Correlator => {
            if !block.prob.is_empty() {
                return Err(ToolError::format(file, lineno, "probability terms in a correlator block"));
            }
            for (p, c) in block.corr {
                if p.n_parties() != n {
                    return Err(ToolError::format(file, lineno, "pattern length differs from n"));
                }
                coeffs[p.index()] += c;
            }
        }
        Space::Probability => {
            if !block.corr.is_empty() {
                return Err(ToolError::format(file, lineno, "correlator terms in a probability block"));
            }
            for (x, a, c) in block.prob {
                let xi = parse_inputs(&s, &x).ok_or_else(|| ToolError::format(file, lineno, "bad inputs"))?;
                let ai = parse_outcomes(&s, &a).ok_or_else(|| ToolError::format(file, lineno, "bad outcomes"))?;
                coeffs[s.index(xi, ai)] += c;
            }
        }
    }
    let mut ineq = BellInequality::new(s, space, coeffs, bound)?;
    if let Some(m) = block.model {
        ineq = ineq.with_model(m);
    }
    Ok(ineq)
}

// ---------------------------------------------------------------------------
// certificates

pub fn membership_to_json<T: TextScalar>(cert: &MembershipCertificate<T>, manifest: Option<&RunManifest>) -> String {
    let weights: serde_json::Map<String, Value> =
        cert.weights.iter().map(|(j, w)| (j.to_string(), w.to_json())).collect();
    let mut doc = json!({
        "inside": cert.inside,
        "backend": T::BACKEND,
        "weights": weights,
        "separating": cert.separating.as_ref().map(inequality_to_csv),
    });
    if let Some(m) = manifest {
        doc["manifest"] = serde_json::to_value(m).expect("manifest");
    }
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

pub fn membership_from_json<T: TextScalar>(text: &str, file: &str) -> ToolResult<MembershipCertificate<T>> {
    let doc: Value = serde_json::from_str(text)?;
    let inside = json_field(&doc, "inside", file)?.as_bool().ok_or_else(|| ToolError::format(file, 0, "bad `inside`"))?;
    let mut weights = Vec::new();
    if let Some(obj) = doc.get("weights").and_then(Value::as_object) {
        for (k, v) in obj {
            let j: usize = k.parse().map_err(|_| ToolError::format(file, 0, "bad weight index"))?;
            weights.push((j, T::from_json(v).ok_or_else(|| ToolError::format(file, 0, "bad weight"))?));
        }
    }
    weights.sort_by_key(|(j, _)| *j);
    let separating = match doc.get("separating").and_then(Value::as_str) {
        Some(csv) => inequalities_from_csv::<T>(csv, file)?.into_iter().next(),
        None => None,
    };
    Ok(MembershipCertificate { inside, weights, separating })
}

pub fn visibility_to_json<T: TextScalar>(res: &VisibilityResult<T>, manifest: Option<&RunManifest>) -> String {
    let weights: serde_json::Map<String, Value> =
        res.weights.iter().map(|(j, w)| (j.to_string(), w.to_json())).collect();
    let mut doc = json!({
        "v_max": res.v_max.to_json(),
        "backend": T::BACKEND,
        "weights": weights,
        "boundary": res.boundary.as_ref().map(inequality_to_csv),
    });
    if let Some(m) = manifest {
        doc["manifest"] = serde_json::to_value(m).expect("manifest");
    }
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

// ---------------------------------------------------------------------------
// quantum setups

#[derive(Serialize, Deserialize)]
struct SetupDoc {
    state: Vec<[f64; 2]>,
    observables: Vec<[[f64; 3]; 2]>,
    #[serde(default = "one")]
    visibility: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    manifest: Option<RunManifest>,
}

fn one() -> f64 {
    1.0
}

pub fn setup_to_json(setup: &QuantumSetup, manifest: Option<&RunManifest>) -> String {
    let doc = SetupDoc {
        state: setup.state().iter().map(|z| [z.re, z.im]).collect(),
        observables: setup.observables().iter().map(|[a, b]| [a.bloch(), b.bloch()]).collect(),
        visibility: setup.visibility(),
        manifest: manifest.cloned(),
    };
    serde_json::to_string_pretty(&doc).expect("json") + "\n"
}

/// Reads a setup; the state is renormalized if needed.
pub fn setup_from_json(text: &str) -> ToolResult<QuantumSetup> {
    let doc: SetupDoc = serde_json::from_str(text)?;
    let state: Vec<Complex64> = doc.state.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    let obs = doc
        .observables
        .iter()
        .map(|[a, b]| Ok([Observable::new(*a)?, Observable::new(*b)?]))
        .collect::<bellpoly_core::Result<Vec<_>>>()?;
    Ok(QuantumSetup::normalized(state, obs)?.with_visibility(doc.visibility)?)
}

// ---------------------------------------------------------------------------
// family catalogs

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub hash: String,
    pub orbit_size: usize,
    /// Canonical representative in inequality CSV form.
    pub representative: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub families: Vec<CatalogEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

impl Catalog {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("json") + "\n"
    }

    pub fn from_json(text: &str) -> ToolResult<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

// ---------------------------------------------------------------------------
// double-description checkpoints

#[derive(Serialize, Deserialize)]
struct CheckpointDoc {
    order: Vec<usize>,
    inserted: usize,
    generated: u64,
    rays: Vec<Vec<String>>,
}

pub fn checkpoint_to_json(state: &DdState) -> String {
    let doc = CheckpointDoc {
        order: state.order.clone(),
        inserted: state.inserted,
        generated: state.generated,
        rays: state.rays.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
    };
    serde_json::to_string(&doc).expect("json")
}

pub fn checkpoint_from_json(text: &str, file: &str) -> ToolResult<DdState> {
    let doc: CheckpointDoc = serde_json::from_str(text)?;
    let rays = doc
        .rays
        .iter()
        .map(|r| r.iter().map(|x| x.parse().map_err(|_| ToolError::format(file, 0, "bad ray entry"))).collect())
        .collect::<ToolResult<Vec<_>>>()?;
    Ok(DdState { order: doc.order, inserted: doc.inserted, generated: doc.generated, rays })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bellpoly_core::scalar::rational;
    use bellpoly_core::vertices::build_vertices;

    #[test]
    fn scalar_text_round_trip() {
        for r in [rational(-7, 3), rational(0, 1), rational(5, 1)] {
            assert_eq!(Rational::parse_text(&r.to_text()), Some(r.clone()));
            assert_eq!(Rational::from_json(&r.to_json()), Some(r));
        }
        for x in [0.1, -1.0 / 3.0, 1e-300] {
            assert_eq!(f64::parse_text(&x.to_text()), Some(x));
        }
        assert_eq!(f64::parse_text("1/4"), Some(0.25));
        assert_eq!(Rational::parse_text("1/0"), None);
    }

    #[test]
    fn behavior_json_keeps_backend() {
        let s = Scenario::tripartite();
        let b: Behavior<Rational> = Behavior::deterministic(s, |p, x| (p + x) % 2);
        let text = behavior_to_json(&b, None);
        assert!(text.contains("\"rational\""));
        assert_eq!(behavior_from_json(&text, "b.json").unwrap(), AnyBehavior::Rational(b.clone()));
        let f = b.to_f64();
        assert_eq!(behavior_from_json(&behavior_to_json(&f, None), "b.json").unwrap(), AnyBehavior::Float(f));
    }

    #[test]
    fn behavior_errors_name_the_entry() {
        let s = Scenario::bipartite();
        let b: Behavior<Rational> = Behavior::uniform(s);
        let text = behavior_to_json(&b, None).replacen("\"+-\"", "\"+x\"", 1);
        let err = behavior_from_json(&text, "b.json").unwrap_err().to_string();
        assert!(err.starts_with("b.json:2:"), "{err}");
        let missing = r#"{"n": 2, "entries": []}"#;
        assert!(behavior_from_json(missing, "m.json").unwrap_err().to_string().contains("missing table entries"));
    }

    #[test]
    fn vertex_file_round_trip() {
        for model in ["L[2]", "PTO[A<B]", "NS[AB]"] {
            let v = build_vertices(&ModelSpec::parse(model).unwrap()).unwrap();
            let text = vertex_file_string(&v, v.space(), None).unwrap();
            let back = read_vertex_file(text.as_bytes(), "v.txt").unwrap();
            assert_eq!(back.points(), v.points(), "{model}");
            assert_eq!(back.model(), v.model());
        }
    }

    #[test]
    fn vertex_file_count_is_checked() {
        let text = "model=L[2] n=2 count=2 space=correlator\n1,1,1,1,1,1,1,1\n";
        let err = read_vertex_file(text.as_bytes(), "v.txt").unwrap_err().to_string();
        assert!(err.contains("header says 2 points, found 1"), "{err}");
    }

    #[test]
    fn inequality_csv_round_trip() {
        let chsh = bellpoly_core::catalog::chsh();
        let text = inequality_to_csv(&chsh);
        assert!(text.ends_with("BOUND,2\n"));
        let back = inequalities_from_csv::<Rational>(&text, "i.csv").unwrap();
        assert_eq!(back, vec![chsh.clone()]);
        let prob = chsh.to_probability_form();
        let back = inequalities_from_csv::<Rational>(&inequality_to_csv(&prob), "i.csv").unwrap();
        assert_eq!(back, vec![prob]);
        assert!(inequalities_from_csv::<Rational>("00,1\n", "i.csv").is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let state = DdState {
            order: vec![2, 0, 1],
            inserted: 2,
            generated: 17,
            rays: vec![vec![1.into(), (-3).into()], vec![0.into(), 12345678901234567890u64.into()]],
        };
        let back = checkpoint_from_json(&checkpoint_to_json(&state), "c.json").unwrap();
        assert_eq!(back.rays, state.rays);
        assert_eq!((back.order, back.inserted, back.generated), (state.order, 2, 17));
    }
}
