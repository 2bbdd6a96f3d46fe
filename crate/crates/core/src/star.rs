//! Formal *-algebra of a graph: linear combinations of S_alpha S_beta^* over
//! exact rationals, multiplied by the prefix rule, plus generator maps between
//! graph algebras and a relation checker for them.
//!
//! Edge classes with multiplicity carry labelled edge instances; a label is a
//! 0-based index below the class multiplicity (any label for an infinite
//! class).

use crate::graph::{Graph, Mult, VertexId};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type Coeff = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StarError {
    #[error("elements live over different graphs")]
    GraphMismatch,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
    #[error("no edge class {src} -> {dst}")]
    UnknownEdgeClass { src: String, dst: String },
    #[error("label {label} out of range for class {src} -> {dst} of multiplicity {mult}")]
    LabelOutOfRange { src: String, dst: String, label: u32, mult: u64 },
    #[error("path step {step} does not start where the previous one ended ({at})")]
    PathBreak { step: String, at: String },
    #[error("path ranges differ: {left} vs {right}")]
    RangeMismatch { left: String, right: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub src: VertexId,
    pub dst: VertexId,
}

impl EdgeKey {
    pub fn new(src: impl Into<VertexId>, dst: impl Into<VertexId>) -> Self {
        EdgeKey { src: src.into(), dst: dst.into() }
    }
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.dst)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeInstance {
    pub key: EdgeKey,
    pub label: u32,
}

impl EdgeInstance {
    pub fn new(src: impl Into<VertexId>, dst: impl Into<VertexId>, label: u32) -> Self {
        EdgeInstance { key: EdgeKey::new(src, dst), label }
    }
}

impl fmt::Display for EdgeInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.key, self.label)
    }
}

fn check_instance(g: &Graph, e: &EdgeInstance) -> Result<(), StarError> {
    match g.mult(&e.key.src, &e.key.dst) {
        None => Err(StarError::UnknownEdgeClass {
            src: e.key.src.to_string(),
            dst: e.key.dst.to_string(),
        }),
        Some(Mult::Finite(m)) if u64::from(e.label) >= m => Err(StarError::LabelOutOfRange {
            src: e.key.src.to_string(),
            dst: e.key.dst.to_string(),
            label: e.label,
            mult: m,
        }),
        Some(_) => Ok(()),
    }
}

/// Finite edge path; an empty path sits at its anchor vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    anchor: VertexId,
    steps: Vec<EdgeInstance>,
}

impl Path {
    pub fn new(g: &Graph, anchor: VertexId, steps: Vec<EdgeInstance>) -> Result<Self, StarError> {
        if !g.contains_vertex(&anchor) {
            return Err(StarError::UnknownVertex(anchor.to_string()));
        }
        let mut at = anchor.clone();
        for step in &steps {
            check_instance(g, step)?;
            if step.key.src != at {
                return Err(StarError::PathBreak { step: step.to_string(), at: at.to_string() });
            }
            at = step.key.dst.clone();
        }
        Ok(Path { anchor, steps })
    }

    pub fn at(g: &Graph, anchor: VertexId) -> Result<Self, StarError> {
        Path::new(g, anchor, vec![])
    }

    pub fn source(&self) -> &VertexId {
        &self.anchor
    }

    pub fn range(&self) -> &VertexId {
        self.steps.last().map(|e| &e.key.dst).unwrap_or(&self.anchor)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[EdgeInstance] {
        &self.steps
    }

    fn extended(&self, ext: &[EdgeInstance]) -> Path {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(ext);
        Path { anchor: self.anchor.clone(), steps }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return write!(f, "({})", self.anchor);
        }
        let parts: Vec<String> = self.steps.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// S_alpha S_beta^* with r(alpha) = r(beta).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub alpha: Path,
    pub beta: Path,
}

impl Monomial {
    pub fn new(alpha: Path, beta: Path) -> Result<Self, StarError> {
        if alpha.range() != beta.range() {
            return Err(StarError::RangeMismatch {
                left: alpha.range().to_string(),
                right: beta.range().to_string(),
            });
        }
        Ok(Monomial { alpha, beta })
    }

    pub fn projection(g: &Graph, v: &VertexId) -> Result<Self, StarError> {
        let p = Path::at(g, v.clone())?;
        Ok(Monomial { alpha: p.clone(), beta: p })
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial { alpha: self.beta.clone(), beta: self.alpha.clone() }
    }

    /// Degree under the gauge action: |alpha| - |beta|.
    pub fn gauge_degree(&self) -> i64 {
        self.alpha.len() as i64 - self.beta.len() as i64
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.alpha.is_empty(), self.beta.is_empty()) {
            (true, true) => write!(f, "P({})", self.alpha.source()),
            (false, true) => write!(f, "S[{}]", self.alpha),
            (true, false) => write!(f, "S[{}]*", self.beta),
            (false, false) => write!(f, "S[{}]S[{}]*", self.alpha, self.beta),
        }
    }
}

// S_x^* S_y: zero unless one of x, y prefixes the other.
fn mul_monomials(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let x = &a.beta;
    let y = &b.alpha;
    if x.anchor != y.anchor {
        return None;
    }
    let k = x.len().min(y.len());
    if x.steps[..k] != y.steps[..k] {
        return None;
    }
    if y.len() >= x.len() {
        let alpha = a.alpha.extended(&y.steps[k..]);
        Some(Monomial { alpha, beta: b.beta.clone() })
    } else {
        let beta = b.beta.extended(&x.steps[k..]);
        Some(Monomial { alpha: a.alpha.clone(), beta })
    }
}

/// Formal rational combination of monomials over a fixed graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    graph: Arc<Graph>,
    terms: BTreeMap<Monomial, Coeff>,
}

impl Element {
    pub fn zero(graph: Arc<Graph>) -> Self {
        Element { graph, terms: BTreeMap::new() }
    }

    pub fn vertex_projection(graph: &Arc<Graph>, v: &VertexId) -> Result<Self, StarError> {
        let m = Monomial::projection(graph, v)?;
        Ok(Element::from_terms(graph.clone(), vec![(m, Coeff::one())]))
    }

    pub fn partial_isometry(graph: &Arc<Graph>, e: &EdgeInstance) -> Result<Self, StarError> {
        check_instance(graph, e)?;
        let alpha = Path::new(graph, e.key.src.clone(), vec![e.clone()])?;
        let beta = Path::at(graph, e.key.dst.clone())?;
        Ok(Element::from_terms(graph.clone(), vec![(Monomial { alpha, beta }, Coeff::one())]))
    }

    pub fn from_terms(graph: Arc<Graph>, terms: Vec<(Monomial, Coeff)>) -> Self {
        let mut out = Element::zero(graph);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("zero entry present");
            self.terms.remove(&key);
        }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn same_graph(&self, other: &Element) -> Result<(), StarError> {
        if Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph {
            Ok(())
        } else {
            Err(StarError::GraphMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element, StarError> {
        self.same_graph(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element, StarError> {
        self.add(&other.scale(&-Coeff::one()))
    }

    pub fn scale(&self, c: &Coeff) -> Element {
        if c.is_zero() {
            return Element::zero(self.graph.clone());
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Element { graph: self.graph.clone(), terms }
    }

    pub fn adjoint(&self) -> Element {
        let terms = self.terms.iter().map(|(m, c)| (m.adjoint(), c.clone())).collect();
        Element { graph: self.graph.clone(), terms }
    }

    pub fn mul(&self, other: &Element) -> Result<Element, StarError> {
        self.same_graph(other)?;
        let mut out = Element::zero(self.graph.clone());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(m) = mul_monomials(a, b) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Common gauge degree of all terms, if the element is homogeneous.
    pub fn gauge_degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(|m| m.gauge_degree());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| if c.is_one() { m.to_string() } else { format!("{c}*{m}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Linear rule for one edge class: every label maps uniformly to the same
/// combination of target classes (keeping the label), except where an
/// override pins down a specific label.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeRule {
    pub uniform: Vec<(Coeff, EdgeKey)>,
    pub overrides: BTreeMap<u32, Vec<(Coeff, EdgeKey)>>,
}

impl EdgeRule {
    pub fn uniform(targets: Vec<(Coeff, EdgeKey)>) -> Self {
        EdgeRule { uniform: targets, overrides: BTreeMap::new() }
    }

    pub fn single(target: EdgeKey) -> Self {
        EdgeRule::uniform(vec![(Coeff::one(), target)])
    }

    fn at(&self, label: u32) -> &[(Coeff, EdgeKey)] {
        self.overrides.get(&label).map(|v| v.as_slice()).unwrap_or(&self.uniform)
    }
}

/// Map defined on generators: vertex projections to elements, edge classes
/// to label-uniform combinations of edge classes.
#[derive(Debug, Clone)]
pub struct GeneratorMap {
    src: Arc<Graph>,
    dst: Arc<Graph>,
    vertex_images: BTreeMap<VertexId, Element>,
    edge_rules: BTreeMap<EdgeKey, EdgeRule>,
}

impl GeneratorMap {
    pub fn new(src: Arc<Graph>, dst: Arc<Graph>) -> Self {
        GeneratorMap { src, dst, vertex_images: BTreeMap::new(), edge_rules: BTreeMap::new() }
    }

    pub fn identity(g: &Arc<Graph>) -> Self {
        let mut map = GeneratorMap::new(g.clone(), g.clone());
        for v in g.vertices() {
            let el = Element::vertex_projection(g, v).expect("vertex in graph");
            map.vertex_images.insert(v.clone(), el);
        }
        for e in g.classes() {
            let key = EdgeKey { src: e.src, dst: e.dst };
            map.edge_rules.insert(key.clone(), EdgeRule::single(key));
        }
        map
    }

    pub fn src(&self) -> &Arc<Graph> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<Graph> {
        &self.dst
    }

    pub fn set_vertex_image(&mut self, v: VertexId, image: Element) -> Result<(), StarError> {
        if !self.src.contains_vertex(&v) {
            return Err(StarError::UnknownVertex(v.to_string()));
        }
        if *image.graph() != self.dst {
            return Err(StarError::GraphMismatch);
        }
        self.vertex_images.insert(v, image);
        Ok(())
    }

    pub fn set_edge_rule(&mut self, key: EdgeKey, rule: EdgeRule) -> Result<(), StarError> {
        if self.src.mult(&key.src, &key.dst).is_none() {
            return Err(StarError::UnknownEdgeClass {
                src: key.src.to_string(),
                dst: key.dst.to_string(),
            });
        }
        for (_, t) in rule.uniform.iter().chain(rule.overrides.values().flatten()) {
            if self.dst.mult(&t.src, &t.dst).is_none() {
                return Err(StarError::UnknownEdgeClass {
                    src: t.src.to_string(),
                    dst: t.dst.to_string(),
                });
            }
        }
        self.edge_rules.insert(key, rule);
        Ok(())
    }

    pub fn vertex_image(&self, v: &VertexId) -> Element {
        self.vertex_images.get(v).cloned().unwrap_or_else(|| Element::zero(self.dst.clone()))
    }

    pub fn edge_image(&self, e: &EdgeInstance) -> Result<Element, StarError> {
        check_instance(&self.src, e)?;
        let Some(rule) = self.edge_rules.get(&e.key) else {
            return Ok(Element::zero(self.dst.clone()));
        };
        let mut out = Element::zero(self.dst.clone());
        for (c, target) in rule.at(e.label) {
            let inst = EdgeInstance { key: target.clone(), label: e.label };
            out = out.add(&Element::partial_isometry(&self.dst, &inst)?.scale(c))?;
        }
        Ok(out)
    }

    fn path_image(&self, p: &Path) -> Result<Element, StarError> {
        if p.is_empty() {
            return Ok(self.vertex_image(p.source()));
        }
        let mut acc: Option<Element> = None;
        for step in p.steps() {
            let factor = self.edge_image(step)?;
            acc = Some(match acc {
                None => factor,
                Some(a) => a.mul(&factor)?,
            });
        }
        Ok(acc.expect("nonempty path"))
    }

    pub fn apply(&self, el: &Element) -> Result<Element, StarError> {
        if *el.graph() != self.src {
            return Err(StarError::GraphMismatch);
        }
        let mut out = Element::zero(self.dst.clone());
        for (m, c) in el.terms() {
            let left = self.path_image(&m.alpha)?;
            let image = if m.beta.is_empty() && !m.alpha.is_empty() {
                left
            } else {
                left.mul(&self.path_image(&m.beta)?.adjoint())?
            };
            out = out.add(&image.scale(c))?;
        }
        Ok(out)
    }
}

/// Labels used to instantiate one edge class when checking relations.
fn labels_for(mult: Mult, budget: u32) -> u32 {
    match mult {
        Mult::Finite(m) => (m.min(u64::from(budget))) as u32,
        Mult::Infinite => budget,
    }
}

fn instances(g: &Graph, budget: u32, full_at: Option<&VertexId>) -> Vec<EdgeInstance> {
    let mut out = Vec::new();
    for e in g.classes() {
        let count = match full_at {
            Some(v) if e.src == *v => match e.mult {
                Mult::Finite(m) => m as u32,
                Mult::Infinite => unreachable!("full instantiation only at regular vertices"),
            },
            _ => labels_for(e.mult, budget),
        };
        for label in 0..count {
            out.push(EdgeInstance { key: EdgeKey { src: e.src.clone(), dst: e.dst.clone() }, label });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarHomViolation {
    pub relation: &'static str,
    pub detail: String,
}

impl fmt::Display for StarHomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.relation, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarHomReport {
    pub checked: usize,
    pub violations: Vec<StarHomViolation>,
}

impl StarHomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check that the generator images satisfy the defining relations of the
/// source graph algebra, instantiating up to `budget` labels per class.
/// The summation relation at a regular vertex always uses the class's full
/// multiplicity.
pub fn verify_star_hom(map: &GeneratorMap, budget: u32) -> Result<StarHomReport, StarError> {
    let g = map.src();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let mut record = |relation: &'static str, detail: String| {
        violations.push(StarHomViolation { relation, detail });
    };

    let vertices = g.vertices().to_vec();
    for v in &vertices {
        let pv = map.vertex_image(v);
        checked += 1;
        if pv.adjoint() != pv {
            record("projection self-adjoint", format!("P({v})"));
        }
        for w in &vertices {
            let pw = map.vertex_image(w);
            let prod = pv.mul(&pw)?;
            let want = if v == w { pv.clone() } else { Element::zero(map.dst().clone()) };
            checked += 1;
            if prod != want {
                record("orthogonal projections", format!("P({v})P({w})"));
            }
        }
    }

    let insts = instances(g, budget, None);
    for e in &insts {
        let se = map.edge_image(e)?;
        for f in &insts {
            let sf = map.edge_image(f)?;
            let prod = se.adjoint().mul(&sf)?;
            checked += 1;
            if e == f {
                let want = map.vertex_image(&e.key.dst);
                if prod != want {
                    record("isometry onto range projection", format!("S[{e}]*S[{e}]"));
                }
            } else if !prod.is_zero() {
                record("orthogonal partial isometries", format!("S[{e}]*S[{f}]"));
            }
        }
        let range_proj = se.mul(&se.adjoint())?;
        let dominated = map.vertex_image(&e.key.src).mul(&range_proj)?;
        checked += 1;
        if dominated != range_proj {
            record("source projection dominates", format!("P({})S[{e}]S[{e}]*", e.key.src));
        }
    }

    for v in g.regular_vertices() {
        let mut sum = Element::zero(map.dst().clone());
        for e in instances(g, budget, Some(&v)) {
            if e.key.src != v {
                continue;
            }
            let se = map.edge_image(&e)?;
            sum = sum.add(&se.mul(&se.adjoint())?)?;
        }
        checked += 1;
        if sum != map.vertex_image(&v) {
            record("regular vertex sum", format!("sum over s(e) = {v}"));
        }
    }

    Ok(StarHomReport { checked, violations })
}

/// outer after inner, with edge rules composed label by label.
pub fn compose_maps(outer: &GeneratorMap, inner: &GeneratorMap) -> Result<GeneratorMap, StarError> {
    if inner.dst != outer.src {
        return Err(StarError::GraphMismatch);
    }
    let mut out = GeneratorMap::new(inner.src.clone(), outer.dst.clone());
    for v in inner.src.vertices() {
        out.set_vertex_image(v.clone(), outer.apply(&inner.vertex_image(v))?)?;
    }
    for (key, rule) in &inner.edge_rules {
        let compose_at = |targets: &[(Coeff, EdgeKey)], label: Option<u32>| {
            let mut acc: BTreeMap<EdgeKey, Coeff> = BTreeMap::new();
            for (c, t) in targets {
                let Some(outer_rule) = outer.edge_rules.get(t) else { continue };
                let outer_targets = match label {
                    Some(m) => outer_rule.at(m),
                    None => &outer_rule.uniform,
                };
                for (d, u) in outer_targets {
                    let entry = acc.entry(u.clone()).or_insert_with(Coeff::zero);
                    *entry += c * d;
                }
            }
            acc.into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(u, c)| (c, u))
                .collect::<Vec<_>>()
        };
        let uniform = compose_at(&rule.uniform, None);
        // labels where either side deviates from its uniform behaviour
        let mut special: Vec<u32> = rule.overrides.keys().copied().collect();
        for (_, t) in rule.uniform.iter().chain(rule.overrides.values().flatten()) {
            if let Some(outer_rule) = outer.edge_rules.get(t) {
                special.extend(outer_rule.overrides.keys().copied());
            }
        }
        special.sort_unstable();
        special.dedup();
        let mut overrides = BTreeMap::new();
        for m in special {
            let at_m = compose_at(rule.at(m), Some(m));
            if at_m != uniform {
                overrides.insert(m, at_m);
            }
        }
        out.set_edge_rule(key.clone(), EdgeRule { uniform, overrides })?;
    }
    Ok(out)
}

/// True when the map fixes every vertex projection and every edge instance
/// up to `budget` labels per class.
pub fn is_identity(map: &GeneratorMap, budget: u32) -> Result<bool, StarError> {
    if map.src != map.dst {
        return Err(StarError::GraphMismatch);
    }
    for v in map.src.vertices() {
        if map.vertex_image(v) != Element::vertex_projection(&map.dst, v)? {
            return Ok(false);
        }
    }
    for e in instances(&map.src, budget, None) {
        if map.edge_image(&e)? != Element::partial_isometry(&map.dst, &e)? {
            return Ok(false);
        }
    }
    Ok(true)
}
