//! The named graph families and maps: odd-sphere graphs, projective-space
//! graphs, the quotient and splitting maps between consecutive levels, the
//! matrix units of the top ideal, and the K0 classes of the canonical
//! projections.

use crate::graph::{build_graph, EdgeClass, Graph, Mult, VertexId};
use crate::ktheory::{class_in_k0, IntegerMatrix, K0Class, KTheoryError};
use crate::star::{
    compose_maps, is_identity, Coeff, EdgeKey, EdgeRule, Element, GeneratorMap, Monomial, Path,
    StarError,
};
use num_traits::One;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("path must end at {expected}, ends at {got}")]
    WrongRange { expected: String, got: String },
    #[error("index {got} out of range, maximum {max}")]
    OutOfRange { got: usize, max: usize },
    #[error(transparent)]
    Star(#[from] StarError),
    #[error(transparent)]
    KTheory(#[from] KTheoryError),
}

fn w(i: usize) -> VertexId {
    VertexId::new(format!("w{i}"))
}

fn v(i: usize) -> VertexId {
    VertexId::new(format!("v{i}"))
}

/// Graph of the odd sphere at level n: vertices v_1..v_{n+1}, one edge
/// v_i -> v_j for every i <= j (loops included).
pub fn sphere_graph(n: usize) -> Arc<Graph> {
    let vertices: Vec<VertexId> = (1..=n + 1).map(v).collect();
    let mut edges = Vec::new();
    for i in 1..=n + 1 {
        for j in i..=n + 1 {
            edges.push(EdgeClass::new(v(i), v(j), Mult::Finite(1)));
        }
    }
    Arc::new(build_graph(vertices, edges).expect("well-formed family"))
}

/// Graph of projective space at level n: vertices w_1..w_{n+1}, infinitely
/// many edges w_i -> w_j for every i < j; w_{n+1} is a sink.
pub fn projective_graph(n: usize) -> Arc<Graph> {
    let vertices: Vec<VertexId> = (1..=n + 1).map(w).collect();
    let mut edges = Vec::new();
    for i in 1..=n + 1 {
        for j in i + 1..=n + 1 {
            edges.push(EdgeClass::new(w(i), w(j), Mult::Infinite));
        }
    }
    Arc::new(build_graph(vertices, edges).expect("well-formed family"))
}

/// Quotient map from level n to level n-1: kills the top vertex and every
/// edge into it, fixes everything else.
pub fn quotient_map(n: usize) -> Result<GeneratorMap, CatalogError> {
    if n < 1 {
        return Err(CatalogError::OutOfRange { got: n, max: usize::MAX });
    }
    let src = projective_graph(n);
    let dst = projective_graph(n - 1);
    let mut map = GeneratorMap::new(src.clone(), dst.clone());
    for i in 1..=n {
        map.set_vertex_image(w(i), Element::vertex_projection(&dst, &w(i))?)?;
    }
    map.set_vertex_image(w(n + 1), Element::zero(dst.clone()))?;
    for i in 1..=n + 1 {
        for j in i + 1..=n + 1 {
            let key = EdgeKey::new(w(i), w(j));
            let rule = if j == n + 1 {
                EdgeRule::uniform(vec![])
            } else {
                EdgeRule::single(key.clone())
            };
            map.set_edge_rule(key, rule)?;
        }
    }
    Ok(map)
}

/// Splitting map from level n-1 to level n: doubles the top vertex into
/// w_n + w_{n+1} and every edge into it into the matching pair.
pub fn splitting_map(n: usize) -> Result<GeneratorMap, CatalogError> {
    if n < 1 {
        return Err(CatalogError::OutOfRange { got: n, max: usize::MAX });
    }
    let src = projective_graph(n - 1);
    let dst = projective_graph(n);
    let mut map = GeneratorMap::new(src.clone(), dst.clone());
    for i in 1..n {
        map.set_vertex_image(w(i), Element::vertex_projection(&dst, &w(i))?)?;
    }
    let top = Element::vertex_projection(&dst, &w(n))?
        .add(&Element::vertex_projection(&dst, &w(n + 1))?)?;
    map.set_vertex_image(w(n), top)?;
    for i in 1..=n {
        for j in i + 1..=n {
            let key = EdgeKey::new(w(i), w(j));
            let rule = if j == n {
                EdgeRule::uniform(vec![
                    (Coeff::one(), EdgeKey::new(w(i), w(n))),
                    (Coeff::one(), EdgeKey::new(w(i), w(n + 1))),
                ])
            } else {
                EdgeRule::single(key.clone())
            };
            map.set_edge_rule(key, rule)?;
        }
    }
    Ok(map)
}

/// Matrix unit S_alpha S_beta^* of the ideal generated by the top vertex of
/// the level-n projective graph; both paths must end at that vertex.
pub fn matrix_unit_image(n: usize, alpha: &Path, beta: &Path) -> Result<Element, CatalogError> {
    let g = projective_graph(n);
    let top = w(n + 1);
    for p in [alpha, beta] {
        let checked = Path::new(&g, p.source().clone(), p.steps().to_vec())?;
        if *checked.range() != top {
            return Err(CatalogError::WrongRange {
                expected: top.to_string(),
                got: checked.range().to_string(),
            });
        }
    }
    let m = Monomial::new(alpha.clone(), beta.clone())?;
    Ok(Element::from_terms(g, vec![(m, Coeff::one())]))
}

/// Image of the minimal projection at the bottom of the tower under the
/// splitting maps up to level n: starts at P_{w_{n-k}} in level n-k-1 and
/// telescopes to the vertex-projection sum P_{w_{n-k}} + ... + P_{w_{n+1}}.
pub fn splitting_chain_image(n: usize, k: usize) -> Result<Element, CatalogError> {
    if n < 1 || k > n - 1 {
        return Err(CatalogError::OutOfRange { got: k, max: n.saturating_sub(1) });
    }
    let start_level = n - k - 1;
    let g = projective_graph(start_level);
    let mut el = Element::vertex_projection(&g, &w(start_level + 1))?;
    for m in (n - k)..=n {
        el = splitting_map(m)?.apply(&el)?;
    }
    Ok(el)
}

/// K0 coordinates of the canonical projection P_l at level n, i.e. the class
/// of the vertex set {w_{l+1}, ..., w_{n+1}} (l = 0 gives the unit).
pub fn projection_class(n: usize, l: usize) -> Result<K0Class, CatalogError> {
    if l > n {
        return Err(CatalogError::OutOfRange { got: l, max: n });
    }
    let g = projective_graph(n);
    let vertices: Vec<VertexId> = (l + 1..=n + 1).map(w).collect();
    Ok(class_in_k0(&g, &vertices)?)
}

/// Rows l = 0..n are the free K0 coordinates of projection_class(n, l);
/// unimodularity says the classes form a basis.
pub fn basis_change_matrix(n: usize) -> Result<IntegerMatrix, CatalogError> {
    let mut m = IntegerMatrix::zeros(n + 1, n + 1);
    for l in 0..=n {
        let class = projection_class(n, l)?;
        assert_eq!(class.free.len(), n + 1, "level-n graph has free K0 of rank n+1");
        for (j, c) in class.free.iter().enumerate() {
            m.set(l, j, c.clone());
        }
    }
    Ok(m)
}

/// The split extension at level n: ideal generated by the top vertex,
/// quotient onto level n-1, and the splitting back.
#[derive(Debug, Clone)]
pub struct ExtensionData {
    pub n: usize,
    pub ideal_generator: VertexId,
    pub quotient: GeneratorMap,
    pub splitting: GeneratorMap,
}

pub fn extension(n: usize) -> Result<ExtensionData, CatalogError> {
    let quotient = quotient_map(n)?;
    let splitting = splitting_map(n)?;
    let round_trip = compose_maps(&quotient, &splitting)?;
    assert!(
        is_identity(&round_trip, 2)?,
        "quotient after splitting must fix level n-1"
    );
    Ok(ExtensionData { n, ideal_generator: w(n + 1), quotient, splitting })
}
