//! Directed graphs with edge multiplicities, the combinatorial base for the
//! Cuntz-Krieger algebra machinery. Parallel edges are stored as a single
//! class with a multiplicity, which may be infinite.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid vertex name {0:?}: must be nonempty without whitespace")]
    InvalidVertexName(String),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),
    #[error("edge endpoint {0} is not a declared vertex")]
    UnknownVertex(String),
    #[error("edge {src} -> {dst} has zero multiplicity")]
    ZeroMultiplicity { src: String, dst: String },
    #[error("isomorphism search limited to graphs with at most {max} vertices, got {got}")]
    TooManyVertices { max: usize, got: usize },
}

/// Vertex name; ordered by name, unique within a graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn new(name: impl Into<String>) -> Self {
        VertexId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

/// Multiplicity of an edge class: finitely many parallel edges, or infinitely many.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mult {
    Finite(u64),
    Infinite,
}

impl Mult {
    pub fn is_infinite(self) -> bool {
        matches!(self, Mult::Infinite)
    }

    /// Saturating addition; Infinite absorbs.
    pub fn plus(self, other: Mult) -> Mult {
        match (self, other) {
            (Mult::Finite(a), Mult::Finite(b)) => Mult::Finite(a.saturating_add(b)),
            _ => Mult::Infinite,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Finite(m) => write!(f, "{m}"),
            Mult::Infinite => f.write_str("inf"),
        }
    }
}

/// A bundle of parallel edges from `src` to `dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeClass {
    pub src: VertexId,
    pub dst: VertexId,
    pub mult: Mult,
}

impl EdgeClass {
    pub fn new(src: impl Into<VertexId>, dst: impl Into<VertexId>, mult: Mult) -> Self {
        EdgeClass { src: src.into(), dst: dst.into(), mult }
    }
}

/// Directed graph with ordered vertices; the declaration order fixes the basis
/// order used by the K-theory matrices. At most one edge class per (src, dst).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    index: BTreeMap<VertexId, usize>,
    classes: BTreeMap<(usize, usize), Mult>,
}

pub fn build_graph(vertices: Vec<VertexId>, edges: Vec<EdgeClass>) -> Result<Graph, GraphError> {
    let mut index = BTreeMap::new();
    for (i, v) in vertices.iter().enumerate() {
        if v.0.is_empty() || v.0.chars().any(char::is_whitespace) {
            return Err(GraphError::InvalidVertexName(v.0.clone()));
        }
        if index.insert(v.clone(), i).is_some() {
            return Err(GraphError::DuplicateVertex(v.0.clone()));
        }
    }
    let mut classes: BTreeMap<(usize, usize), Mult> = BTreeMap::new();
    for e in edges {
        let si = *index.get(&e.src).ok_or_else(|| GraphError::UnknownVertex(e.src.0.clone()))?;
        let di = *index.get(&e.dst).ok_or_else(|| GraphError::UnknownVertex(e.dst.0.clone()))?;
        if e.mult == Mult::Finite(0) {
            return Err(GraphError::ZeroMultiplicity { src: e.src.0, dst: e.dst.0 });
        }
        classes
            .entry((si, di))
            .and_modify(|m| *m = m.plus(e.mult))
            .or_insert(e.mult);
    }
    Ok(Graph { vertices, index, classes })
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn index_of(&self, v: &VertexId) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains_vertex(&self, v: &VertexId) -> bool {
        self.index.contains_key(v)
    }

    pub fn vertex_at(&self, i: usize) -> &VertexId {
        &self.vertices[i]
    }

    pub fn mult(&self, src: &VertexId, dst: &VertexId) -> Option<Mult> {
        let si = self.index_of(src)?;
        let di = self.index_of(dst)?;
        self.classes.get(&(si, di)).copied()
    }

    /// Edge classes in (src index, dst index) order.
    pub fn classes(&self) -> impl Iterator<Item = EdgeClass> + '_ {
        self.classes.iter().map(move |(&(s, d), &m)| EdgeClass {
            src: self.vertices[s].clone(),
            dst: self.vertices[d].clone(),
            mult: m,
        })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn out_classes<'a>(&'a self, v: &VertexId) -> impl Iterator<Item = EdgeClass> + 'a {
        let vi = self.index_of(v);
        self.classes().filter(move |e| Some(&e.src) == vi.map(|i| &self.vertices[i]))
    }

    pub fn in_classes<'a>(&'a self, v: &VertexId) -> impl Iterator<Item = EdgeClass> + 'a {
        let vi = self.index_of(v);
        self.classes().filter(move |e| Some(&e.dst) == vi.map(|i| &self.vertices[i]))
    }

    /// Total number of edges emitted by `v`.
    pub fn total_out(&self, v: &VertexId) -> Mult {
        let mut total = Mult::Finite(0);
        for e in self.out_classes(v) {
            total = total.plus(e.mult);
        }
        total
    }

    /// Regular: emits at least one and finitely many edges.
    pub fn is_regular(&self, v: &VertexId) -> bool {
        match self.total_out(v) {
            Mult::Finite(0) => false,
            Mult::Finite(_) => true,
            Mult::Infinite => false,
        }
    }

    pub fn regular_vertices(&self) -> Vec<VertexId> {
        self.vertices.iter().filter(|v| self.is_regular(v)).cloned().collect()
    }

    pub fn is_sink(&self, v: &VertexId) -> bool {
        self.total_out(v) == Mult::Finite(0)
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices.iter().filter(|v| self.is_sink(v)).cloned().collect()
    }

    pub fn is_infinite_emitter(&self, v: &VertexId) -> bool {
        self.total_out(v) == Mult::Infinite
    }

    pub fn is_row_finite(&self) -> bool {
        self.vertices.iter().all(|v| !self.is_infinite_emitter(v))
    }
}

const ISO_MAX_VERTICES: usize = 12;

/// Multiplicity fingerprint used to prune the isomorphism search: sorted out-
/// and in-multiplicity lists plus the loop multiplicity.
fn profile(g: &Graph, v: &VertexId) -> (Vec<Mult>, Vec<Mult>, Option<Mult>) {
    let mut outs: Vec<Mult> = g.out_classes(v).map(|e| e.mult).collect();
    let mut ins: Vec<Mult> = g.in_classes(v).map(|e| e.mult).collect();
    outs.sort();
    ins.sort();
    (outs, ins, g.mult(v, v))
}

/// Multiplicity-preserving vertex bijection between `a` and `b`, if one exists.
/// Returns the witness as pairs (vertex of a, vertex of b).
pub fn graph_isomorphic(a: &Graph, b: &Graph) -> Result<Option<Vec<(VertexId, VertexId)>>, GraphError> {
    let n = a.vertex_count();
    let max = n.max(b.vertex_count());
    if max > ISO_MAX_VERTICES {
        return Err(GraphError::TooManyVertices { max: ISO_MAX_VERTICES, got: max });
    }
    if n != b.vertex_count() || a.class_count() != b.class_count() {
        return Ok(None);
    }
    let pa: Vec<_> = a.vertices().iter().map(|v| profile(a, v)).collect();
    let pb: Vec<_> = b.vertices().iter().map(|v| profile(b, v)).collect();
    {
        let mut sa = pa.clone();
        let mut sb = pb.clone();
        sa.sort();
        sb.sort();
        if sa != sb {
            return Ok(None);
        }
    }

    // assignment[i] = image of a.vertices[i] as an index into b.vertices
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn consistent(a: &Graph, b: &Graph, assignment: &[Option<usize>], i: usize, j: usize) -> bool {
        let ai = &a.vertices[i];
        let bj = &b.vertices[j];
        for (k, slot) in assignment.iter().enumerate() {
            let Some(l) = slot else { continue };
            let ak = &a.vertices[k];
            let bl = &b.vertices[*l];
            if a.mult(ai, ak) != b.mult(bj, bl) || a.mult(ak, ai) != b.mult(bl, bj) {
                return false;
            }
        }
        a.mult(ai, ai) == b.mult(bj, bj)
    }
    fn search(
        a: &Graph,
        b: &Graph,
        pa: &[(Vec<Mult>, Vec<Mult>, Option<Mult>)],
        pb: &[(Vec<Mult>, Vec<Mult>, Option<Mult>)],
        assignment: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        i: usize,
    ) -> bool {
        if i == a.vertex_count() {
            return true;
        }
        for j in 0..b.vertex_count() {
            if used[j] || pa[i] != pb[j] || !consistent(a, b, assignment, i, j) {
                continue;
            }
            assignment[i] = Some(j);
            used[j] = true;
            if search(a, b, pa, pb, assignment, used, i + 1) {
                return true;
            }
            assignment[i] = None;
            used[j] = false;
        }
        false
    }
    if search(a, b, &pa, &pb, &mut assignment, &mut used, 0) {
        let witness = assignment
            .into_iter()
            .enumerate()
            .map(|(i, j)| (a.vertices[i].clone(), b.vertices[j.unwrap()].clone()))
            .collect();
        Ok(Some(witness))
    } else {
        Ok(None)
    }
}
