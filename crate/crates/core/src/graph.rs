//! Weighted graphs, signals, weighted norms, the weighted gradient and the
//! combinatorial Laplacian.
//!
//! A graph carries a symmetric edge weight `w(u, v) >= 0` with `w(u, u) = 0`
//! and a strictly positive vertex measure `nu(v)`. Vertices are addressed by
//! dense indices in declaration order; names are kept for I/O only.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{root, Real};

/// A sorted set of vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new<I: IntoIterator<Item = usize>>(items: I) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Indicator vector of length `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            if v < n {
                m[v] = true;
            }
        }
        m
    }

    /// `{0..n} \ self`.
    pub fn complement(&self, n: usize) -> Self {
        let m = self.mask(n);
        VertexSet((0..n).filter(|&v| !m[v]).collect())
    }

    pub fn union(&self, other: &VertexSet) -> Self {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// Exponent of a weighted norm: finite `p >= 1` or `p = infinity`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    /// Validated finite exponent.
    pub fn finite(p: T) -> Result<Self> {
        if p.is_finite() && p >= T::one() {
            Ok(Exponent::Finite(p))
        } else if p.is_infinite() && p > T::zero() {
            Ok(Exponent::Infinity)
        } else {
            Err(Error::InvalidExponent(p.as_f64()))
        }
    }

    /// The finite value, or an error for `p = infinity`.
    pub fn value(self) -> Result<T> {
        match self {
            Exponent::Finite(p) => Ok(p),
            Exponent::Infinity => Err(Error::InfiniteExponent),
        }
    }

    fn check(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) => Exponent::finite(p),
            Exponent::Infinity => Ok(self),
        }
    }
}

impl<T: Real> FromStr for Exponent<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinity);
        }
        let p: f64 = s
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse exponent `{s}`")))?;
        Exponent::finite(T::lit(p))
    }
}

impl<T: Real> fmt::Display for Exponent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl<T: Real> Serialize for Exponent<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(p.as_f64()),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

/// A real-valued function on the vertex set, indexed in vertex order.
#[derive(Clone, Debug, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct Signal<T>(Vec<T>);

impl<T: Real> Signal<T> {
    pub fn new(values: Vec<T>) -> Self {
        Signal(values)
    }

    pub fn zeros(n: usize) -> Self {
        Signal(vec![T::zero(); n])
    }

    pub fn constant(n: usize, c: T) -> Self {
        Signal(vec![c; n])
    }

    /// Dirac mass at `v`.
    pub fn dirac(n: usize, v: usize) -> Self {
        let mut s = Self::zeros(n);
        s.0[v] = T::one();
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<T> {
        self.0
    }

    pub fn get(&self, v: usize) -> T {
        self.0[v]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Signal<T>) -> T {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    /// Unweighted Euclidean norm.
    pub fn norm2(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn scaled(&self, c: T) -> Signal<T> {
        Signal(self.0.iter().map(|&x| x * c).collect())
    }

    pub fn sub(&self, other: &Signal<T>) -> Signal<T> {
        Signal(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: T, other: &Signal<T>) {
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }

    /// Copy of the signal with every entry outside `set` set to zero.
    pub fn restricted(&self, set: &VertexSet) -> Signal<T> {
        let mut out = Self::zeros(self.len());
        for v in set.iter() {
            out.0[v] = self.0[v];
        }
        out
    }
}

/// Finite weighted graph with symmetric edge weights and positive vertex weights.
#[derive(Clone, Debug)]
pub struct WeightedGraph<T> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// Canonical `(min, max)` keyed positive weights.
    edges: BTreeMap<(usize, usize), T>,
    /// Neighbour lists derived from `edges`, sorted by neighbour index.
    adjacency: Vec<Vec<(usize, T)>>,
    vertex_weights: Vec<T>,
}

/// Incremental construction of a [`WeightedGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder<T> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), T>,
    vertex_weights: Vec<T>,
}

impl<T: Real> Default for GraphBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> GraphBuilder<T> {
    pub fn new() -> Self {
        GraphBuilder {
            names: Vec::new(),
            index: HashMap::new(),
            edges: BTreeMap::new(),
            vertex_weights: Vec::new(),
        }
    }

    /// Declares a vertex (idempotent) and returns its index.
    pub fn add_vertex(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        self.vertex_weights.push(T::one());
        i
    }

    /// Adds the undirected edge `{u, v}`. Zero weights declare the endpoints
    /// but store no edge.
    pub fn add_edge(&mut self, u: &str, v: &str, w: T) -> Result<()> {
        if u == v {
            return Err(Error::Domain(format!("self-loop at vertex `{u}`")));
        }
        if !w.is_finite() || w < T::zero() {
            return Err(Error::Domain(format!("negative or non-finite weight {w} on edge ({u}, {v})")));
        }
        let a = self.add_vertex(u);
        let b = self.add_vertex(v);
        let key = (a.min(b), a.max(b));
        if self.edges.contains_key(&key) {
            return Err(Error::Domain(format!("duplicate edge ({u}, {v})")));
        }
        self.edges.insert(key, w);
        Ok(())
    }

    pub fn set_vertex_weight(&mut self, v: &str, nu: T) -> Result<()> {
        if !nu.is_finite() || nu <= T::zero() {
            return Err(Error::Domain(format!("non-positive vertex weight {nu} at `{v}`")));
        }
        let i = *self
            .index
            .get(v)
            .ok_or_else(|| Error::UnknownVertex(v.to_string()))?;
        self.vertex_weights[i] = nu;
        Ok(())
    }

    pub fn build(self) -> WeightedGraph<T> {
        let n = self.names.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut edges = BTreeMap::new();
        for (&(a, b), &w) in &self.edges {
            if w > T::zero() {
                adjacency[a].push((b, w));
                adjacency[b].push((a, w));
                edges.insert((a, b), w);
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(u, _)| u);
        }
        WeightedGraph {
            names: self.names,
            index: self.index,
            edges,
            adjacency,
            vertex_weights: self.vertex_weights,
        }
    }
}

impl<T: Real> WeightedGraph<T> {
    /// Unit-weight graph on vertices named `names[i]` with the given index edges.
    pub fn from_index_edges(names: Vec<String>, edges: &[(usize, usize, T)]) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for name in &names {
            b.add_vertex(name);
        }
        if b.names.len() != names.len() {
            return Err(Error::Domain("duplicate vertex names".into()));
        }
        for &(u, v, w) in edges {
            let (nu, nv) = (
                names.get(u).ok_or(Error::VertexOutOfRange { index: u, len: names.len() })?,
                names.get(v).ok_or(Error::VertexOutOfRange { index: v, len: names.len() })?,
            );
            b.add_edge(nu, nv, w)?;
        }
        Ok(b.build())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((0..self.len()).collect())
    }

    /// Vertex set from names.
    pub fn vertex_set<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<VertexSet> {
        names
            .into_iter()
            .map(|n| self.vertex_index(n))
            .collect::<Result<Vec<_>>>()
            .map(VertexSet::new)
    }

    pub fn weight(&self, u: usize, v: usize) -> T {
        self.edges
            .get(&(u.min(v), u.max(v)))
            .copied()
            .unwrap_or_else(T::zero)
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, T)] {
        &self.adjacency[v]
    }

    /// Positive-weight edges `(u, v, w)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_weight(&self, v: usize) -> T {
        self.vertex_weights[v]
    }

    pub fn vertex_weights(&self) -> &[T] {
        &self.vertex_weights
    }

    pub fn has_unit_vertex_weights(&self) -> bool {
        self.vertex_weights.iter().all(|&x| x == T::one())
    }

    /// Same graph with `nu` replaced by `nu * c` and `w` by `w * c`.
    pub fn rescaled(&self, c: T) -> Self {
        let mut g = self.clone();
        for w in g.edges.values_mut() {
            *w *= c;
        }
        for list in &mut g.adjacency {
            for e in list.iter_mut() {
                e.1 *= c;
            }
        }
        for nu in &mut g.vertex_weights {
            *nu *= c;
        }
        g
    }

    /// Same graph with vertex weights `nu`, all of which must be positive.
    pub fn with_vertex_weights(&self, nu: Vec<T>) -> Result<Self> {
        if nu.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: nu.len() });
        }
        if let Some(v) = nu.iter().position(|&x| !(x > T::zero() && x.is_finite())) {
            return Err(Error::Domain(format!("vertex weight {} at `{}` is not positive", nu[v], self.names[v])));
        }
        let mut g = self.clone();
        g.vertex_weights = nu;
        Ok(g)
    }

    /// Degree `d(v) = sum_u w(u, v)`.
    pub fn degree(&self, v: usize) -> T {
        self.adjacency[v].iter().map(|&(_, w)| w).sum()
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: v, len: self.len() })
        }
    }

    pub fn check_set(&self, set: &VertexSet) -> Result<()> {
        set.iter().try_for_each(|v| self.check_vertex(v))
    }

    pub fn check_signal(&self, f: &Signal<T>) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: f.len() });
        }
        if !f.is_finite() {
            return Err(Error::Domain("signal has non-finite entries".into()));
        }
        Ok(())
    }

    /// `w_A(v) = sum_{u in A} w(u, v)`.
    pub fn subset_weight(&self, a: &VertexSet, v: usize) -> Result<T> {
        self.check_vertex(v)?;
        self.check_set(a)?;
        Ok(self.adjacency[v]
            .iter()
            .filter(|(u, _)| a.contains(*u))
            .map(|&(_, w)| w)
            .sum())
    }

    /// Mask-based variant of [`subset_weight`](Self::subset_weight) for inner loops.
    pub(crate) fn subset_weight_masked(&self, mask: &[bool], v: usize) -> T {
        self.adjacency[v]
            .iter()
            .filter(|(u, _)| mask[*u])
            .map(|&(_, w)| w)
            .sum()
    }

    /// Weighted norm `(sum_v |f(v)|^p nu(v))^(1/p)`; `max |f|` for `p = infinity`.
    pub fn lp_norm(&self, f: &Signal<T>, p: Exponent<T>) -> Result<T> {
        self.check_signal(f)?;
        match p.check()? {
            Exponent::Infinity => Ok(f.max_abs()),
            Exponent::Finite(p) => {
                let s: T = f
                    .values()
                    .iter()
                    .zip(&self.vertex_weights)
                    .map(|(&x, &nu)| crate::scalar::pow(x.abs(), p) * nu)
                    .sum();
                Ok(root(s, p))
            }
        }
    }

    /// Weighted norm of the restriction `f|_A`.
    pub fn lp_norm_on(&self, f: &Signal<T>, a: &VertexSet, p: Exponent<T>) -> Result<T> {
        self.check_set(a)?;
        self.lp_norm(&f.restricted(a), p)
    }

    /// Weighted gradient norm `(sum_{u,v} |f(u) - f(v)|^p w(u, v))^(1/p)`.
    ///
    /// The sum runs over ordered pairs, so every edge contributes twice. For
    /// `p = infinity` this is the largest difference across an edge.
    pub fn weighted_gradient_norm(&self, f: &Signal<T>, p: Exponent<T>) -> Result<T> {
        self.check_signal(f)?;
        let x = f.values();
        match p.check()? {
            Exponent::Infinity => Ok(self
                .edges()
                .fold(T::zero(), |m, (u, v, _)| m.max((x[u] - x[v]).abs()))),
            Exponent::Finite(p) => {
                let two = T::lit(2.0);
                let s: T = self
                    .edges()
                    .map(|(u, v, w)| two * crate::scalar::pow((x[u] - x[v]).abs(), p) * w)
                    .sum();
                Ok(root(s, p))
            }
        }
    }

    /// `(L f)(v) = sum_u (f(v) - f(u)) w(v, u)`.
    pub fn apply_laplacian(&self, f: &Signal<T>) -> Result<Signal<T>> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: f.len() });
        }
        let x = f.values();
        Ok(Signal::new(
            (0..self.len())
                .map(|v| {
                    self.adjacency[v]
                        .iter()
                        .map(|&(u, w)| (x[v] - x[u]) * w)
                        .sum()
                })
                .collect(),
        ))
    }

    /// `<f, L f>`, evaluated as half the squared gradient 2-norm.
    pub fn laplacian_quadratic_form(&self, f: &Signal<T>) -> Result<T> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: f.len() });
        }
        let x = f.values();
        Ok(self
            .edges()
            .map(|(u, v, w)| {
                let d = x[u] - x[v];
                d * d * w
            })
            .sum())
    }

    /// Dense row-major Laplacian matrix.
    pub fn laplacian_matrix(&self) -> Vec<T> {
        let n = self.len();
        let mut m = vec![T::zero(); n * n];
        for (u, v, w) in self.edges() {
            m[u * n + v] -= w;
            m[v * n + u] -= w;
            m[u * n + u] += w;
            m[v * n + v] += w;
        }
        m
    }

    /// Vertices reachable from `start` through positive-weight edges.
    pub fn reachable_from(&self, start: &VertexSet) -> VertexSet {
        let mut seen = start.mask(self.len());
        let mut stack: Vec<usize> = start.iter().collect();
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        VertexSet((0..self.len()).filter(|&v| seen[v]).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.reachable_from(&VertexSet::new([0])).len() == self.len()
    }

    /// Names of the vertices in `set`.
    pub fn set_names(&self, set: &VertexSet) -> Vec<String> {
        set.iter().map(|v| self.names[v].clone()).collect()
    }
}
