//! Gauge-invariant ideal structure: hereditary and saturated vertex sets,
//! the saturation closure, the full lattice for small graphs, breaking
//! vertices of a set, and the quotient graph with its added sinks.

use crate::graph::{build_graph, EdgeClass, Graph, GraphError, Mult, VertexId};
use std::collections::BTreeSet;
use thiserror::Error;

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdealError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
    #[error("vertex set is not hereditary and saturated")]
    NotHereditarySaturated,
    #[error("lattice enumeration limited to {max} vertices, got {got}")]
    TooManyVertices { max: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_members(g: &Graph, h: &VertexSet) -> Result<(), IdealError> {
    for v in h {
        if !g.contains_vertex(v) {
            return Err(IdealError::UnknownVertex(v.as_str().to_string()));
        }
    }
    Ok(())
}

/// Closed under edges: every edge leaving the set must be a loop back in.
pub fn is_hereditary(g: &Graph, h: &VertexSet) -> Result<bool, IdealError> {
    check_members(g, h)?;
    for v in h {
        for e in g.out_classes(v) {
            if !h.contains(&e.dst) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A regular vertex emitting only into the set already belongs to it.
pub fn is_saturated(g: &Graph, h: &VertexSet) -> Result<bool, IdealError> {
    check_members(g, h)?;
    for v in g.vertices() {
        if h.contains(v) || !g.is_regular(v) {
            continue;
        }
        if g.out_classes(v).all(|e| h.contains(&e.dst)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Least hereditary and saturated superset, by alternating the edge closure
/// and the saturation sweep to a fixed point.
pub fn saturate(g: &Graph, h: &VertexSet) -> Result<VertexSet, IdealError> {
    check_members(g, h)?;
    let mut out = h.clone();
    loop {
        let mut grew = false;
        let members: Vec<VertexId> = out.iter().cloned().collect();
        for v in &members {
            for e in g.out_classes(v) {
                grew |= out.insert(e.dst.clone());
            }
        }
        for v in g.vertices() {
            if out.contains(v) || !g.is_regular(v) {
                continue;
            }
            if g.out_classes(v).all(|e| out.contains(&e.dst)) {
                out.insert(v.clone());
                grew = true;
            }
        }
        if !grew {
            return Ok(out);
        }
    }
}

/// All hereditary saturated subsets, listed by size then lexicographically
/// (a linear extension of inclusion).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    pub subsets: Vec<VertexSet>,
}

impl IdealLattice {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// True when the subsets are totally ordered by inclusion.
    pub fn is_chain(&self) -> bool {
        self.subsets.windows(2).all(|w| w[0].is_subset(&w[1]))
    }

    /// Inclusion pairs (i, j) with subsets[i] strictly inside subsets[j].
    pub fn inclusions(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.subsets.len() {
            for j in 0..self.subsets.len() {
                if i != j
                    && self.subsets[i].is_subset(&self.subsets[j])
                    && self.subsets[i] != self.subsets[j]
                {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

const ENUMERATE_MAX_VERTICES: usize = 20;

pub fn enumerate_hereditary_saturated(g: &Graph) -> Result<IdealLattice, IdealError> {
    let n = g.vertex_count();
    if n > ENUMERATE_MAX_VERTICES {
        return Err(IdealError::TooManyVertices { max: ENUMERATE_MAX_VERTICES, got: n });
    }
    // bitmask scan; out_mask[v] collects edge targets, regular[v] gates saturation
    let mut out_mask = vec![0u32; n];
    let mut regular = vec![false; n];
    for (i, v) in g.vertices().iter().enumerate() {
        for e in g.out_classes(v) {
            out_mask[i] |= 1 << g.index_of(&e.dst).expect("target in graph");
        }
        regular[i] = g.is_regular(v);
    }
    let mut subsets = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let hereditary = (0..n).all(|i| mask & (1 << i) == 0 || out_mask[i] & !mask == 0);
        if !hereditary {
            continue;
        }
        let saturated = (0..n).all(|i| {
            mask & (1 << i) != 0 || !regular[i] || out_mask[i] & !mask != 0
        });
        if !saturated {
            continue;
        }
        let set: VertexSet = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| g.vertex_at(i).clone())
            .collect();
        subsets.push(set);
    }
    subsets.sort_by_key(|s| (s.len(), s.iter().cloned().collect::<Vec<_>>()));
    Ok(IdealLattice { subsets })
}

/// Breaking vertices of H: infinite emitters outside H with finitely many,
/// but at least one, edges into the complement of H.
pub fn h_inf_fin(g: &Graph, h: &VertexSet) -> Result<VertexSet, IdealError> {
    if !(is_hereditary(g, h)? && is_saturated(g, h)?) {
        return Err(IdealError::NotHereditarySaturated);
    }
    let mut out = VertexSet::new();
    for v in g.vertices() {
        if h.contains(v) || !g.is_infinite_emitter(v) {
            continue;
        }
        let mut into_complement = Mult::Finite(0);
        for e in g.out_classes(v) {
            if !h.contains(&e.dst) {
                into_complement = into_complement.plus(e.mult);
            }
        }
        match into_complement {
            Mult::Finite(k) if k > 0 => {
                out.insert(v.clone());
            }
            _ => {}
        }
    }
    Ok(out)
}

pub fn beta_name(v: &VertexId) -> VertexId {
    VertexId::new(format!("beta:{v}"))
}

/// Quotient graph by a hereditary saturated set: the complement keeps its
/// edges; each breaking vertex b gains a sink beta:b, and every edge class
/// into b is copied to end at the sink instead.
pub fn quotient_graph(g: &Graph, h: &VertexSet) -> Result<Graph, IdealError> {
    let breaking = h_inf_fin(g, h)?;
    let mut vertices: Vec<VertexId> =
        g.vertices().iter().filter(|v| !h.contains(v)).cloned().collect();
    for v in g.vertices() {
        if breaking.contains(v) {
            vertices.push(beta_name(v));
        }
    }
    let mut edges = Vec::new();
    for e in g.classes() {
        if h.contains(&e.dst) {
            continue;
        }
        edges.push(e.clone());
        if breaking.contains(&e.dst) {
            edges.push(EdgeClass { src: e.src, dst: beta_name(&e.dst), mult: e.mult });
        }
    }
    Ok(build_graph(vertices, edges)?)
}
