//! Text formats: tab-separated edge lists, vertex weights, signals and
//! samples, and whitespace-separated partition files.
//!
//! Lines starting with `#` and blank lines are ignored everywhere.

use std::collections::BTreeMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, Signal, VertexSet, WeightedGraph};
use crate::scalar::Real;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Yields `(line_number, trimmed_line)` for every non-comment, non-blank line.
fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(parse_err(i + 1, e.to_string()))),
        Ok(l) => {
            let t = l.trim_end_matches(['\r', '\n']).trim();
            if t.is_empty() || t.starts_with('#') {
                None
            } else {
                Some(Ok((i + 1, t.to_string())))
            }
        }
    })
}

fn parse_number<T: Real>(line: usize, field: &str, what: &str) -> Result<T> {
    let x: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} `{field}`")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("non-finite {what} `{field}`")));
    }
    T::from_f64(x).ok_or_else(|| parse_err(line, format!("{what} `{field}` not representable")))
}

fn two_fields(line: usize, text: &str) -> Result<(String, String)> {
    let fields: Vec<&str> = text.split('\t').collect();
    if fields.len() != 2 {
        return Err(parse_err(line, format!("expected `vertex<TAB>value`, found {} fields", fields.len())));
    }
    Ok((fields[0].trim().to_string(), fields[1].trim().to_string()))
}

/// Reads an edge list (`u<TAB>v<TAB>w`) and an optional vertex weight list
/// (`v<TAB>nu`, unlisted vertices get `nu = 1`).
pub fn load_graph<T: Real, R: BufRead, S: BufRead>(edges: R, vertex_weights: Option<S>) -> Result<WeightedGraph<T>> {
    let mut b = GraphBuilder::<T>::new();
    for item in content_lines(edges) {
        let (line, text) = item?;
        let fields: Vec<&str> = text.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(line, format!("expected `u<TAB>v<TAB>w`, found {} fields", fields.len())));
        }
        let (u, v) = (fields[0].trim(), fields[1].trim());
        if u.is_empty() || v.is_empty() {
            return Err(parse_err(line, "empty vertex name"));
        }
        let w: T = parse_number(line, fields[2], "edge weight")?;
        if w < T::zero() {
            return Err(parse_err(line, format!("negative edge weight {w}")));
        }
        if u == v {
            return Err(parse_err(line, format!("self-loop at `{u}`")));
        }
        b.add_edge(u, v, w).map_err(|e| parse_err(line, e.to_string()))?;
    }
    if let Some(reader) = vertex_weights {
        let mut seen = BTreeMap::new();
        for item in content_lines(reader) {
            let (line, text) = item?;
            let (v, value) = two_fields(line, &text)?;
            let nu: T = parse_number(line, &value, "vertex weight")?;
            if nu <= T::zero() {
                return Err(parse_err(line, format!("non-positive vertex weight {nu} at `{v}`")));
            }
            if seen.insert(v.clone(), line).is_some() {
                return Err(parse_err(line, format!("vertex weight for `{v}` given twice")));
            }
            b.set_vertex_weight(&v, nu).map_err(|e| match e {
                Error::UnknownVertex(name) => parse_err(line, format!("unknown vertex `{name}` in weight file")),
                other => parse_err(line, other.to_string()),
            })?;
        }
    }
    Ok(b.build())
}

/// Reads a signal file (`v<TAB>value`); unlisted vertices default to 0.
pub fn load_signal<T: Real, R: BufRead>(g: &WeightedGraph<T>, reader: R) -> Result<Signal<T>> {
    let mut f = Signal::zeros(g.len());
    let mut seen = vec![false; g.len()];
    for item in content_lines(reader) {
        let (line, text) = item?;
        let (v, value) = two_fields(line, &text)?;
        let i = g
            .vertex_index(&v)
            .map_err(|_| parse_err(line, format!("unknown vertex `{v}` in signal file")))?;
        if seen[i] {
            return Err(parse_err(line, format!("value for `{v}` given twice")));
        }
        seen[i] = true;
        f.values_mut()[i] = parse_number(line, &value, "signal value")?;
    }
    Ok(f)
}

/// Reads a samples file (`v<TAB>value`) into a map from vertex index to value.
pub fn load_samples<T: Real, R: BufRead>(g: &WeightedGraph<T>, reader: R) -> Result<BTreeMap<usize, T>> {
    let mut out = BTreeMap::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let (v, value) = two_fields(line, &text)?;
        let i = g
            .vertex_index(&v)
            .map_err(|_| parse_err(line, format!("unknown vertex `{v}` in samples file")))?;
        let x: T = parse_number(line, &value, "sample value")?;
        if out.insert(i, x).is_some() {
            return Err(parse_err(line, format!("sample for `{v}` given twice")));
        }
    }
    Ok(out)
}

/// Reads shells: one line per shell, vertex names separated by whitespace.
/// Structural validation (disjointness, exhaustiveness) is left to the
/// partition and chain constructors.
pub fn load_shells<T: Real, R: BufRead>(g: &WeightedGraph<T>, reader: R) -> Result<Vec<VertexSet>> {
    let mut shells = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut ids = Vec::new();
        for name in text.split_whitespace() {
            let i = g
                .vertex_index(name)
                .map_err(|_| parse_err(line, format!("unknown vertex `{name}` in shell file")))?;
            ids.push(i);
        }
        let set = VertexSet::new(ids.iter().copied());
        if set.len() != ids.len() {
            return Err(parse_err(line, "vertex repeated within a shell"));
        }
        shells.push(set);
    }
    Ok(shells)
}

/// Writes a signal in the `v<TAB>value` format.
pub fn format_signal<T: Real>(g: &WeightedGraph<T>, f: &Signal<T>) -> String {
    let mut s = String::new();
    for (name, x) in g.names().iter().zip(f.values()) {
        s.push_str(name);
        s.push('\t');
        s.push_str(&format!("{x}"));
        s.push('\n');
    }
    s
}
