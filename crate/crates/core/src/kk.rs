//! Formal additive-category rewriting over the KK-class generators of the
//! projective tower: chains of generator arrows between direct sums of
//! CP(n), K, and C, integer combinations of chains, and a terminating rule
//! set that verifies the equivalence CP(n) ~ K^n (+) C and its Morita
//! compression to C^{n+1}.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KkError {
    #[error("arrows do not compose at position {at}: {left} ends at a different object than {right} starts")]
    NonComposable { at: usize, left: String, right: String },
    #[error("object mismatch: {left} vs {right}")]
    ObjectMismatch { left: String, right: String },
    #[error("level must be at least 1")]
    BadLevel,
}

/// CP(0) is identified with C at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    CP(u32),
    K,
    C,
}

impl Atom {
    pub fn cp(n: u32) -> Atom {
        if n == 0 { Atom::C } else { Atom::CP(n) }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::CP(n) => write!(f, "CP({n})"),
            Atom::K => write!(f, "K"),
            Atom::C => write!(f, "C"),
        }
    }
}

/// Generator arrows; levels are always >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArrowGen {
    /// K -> CP(n): inclusion of the level-n ideal.
    J(u32),
    /// CP(n) -> CP(n-1): quotient by that ideal.
    Q(u32),
    /// CP(n-1) -> CP(n): splitting of the quotient.
    S(u32),
    /// CP(n) -> K: left inverse of the inclusion.
    Pi(u32),
    /// C -> K: rank-one corner inclusion.
    Phi,
    /// K -> C: Morita-equivalence class inverse to Phi.
    Mor,
}

impl ArrowGen {
    pub fn domain(&self) -> Atom {
        match *self {
            ArrowGen::J(_) => Atom::K,
            ArrowGen::Q(n) => Atom::cp(n),
            ArrowGen::S(n) => Atom::cp(n - 1),
            ArrowGen::Pi(n) => Atom::cp(n),
            ArrowGen::Phi => Atom::C,
            ArrowGen::Mor => Atom::K,
        }
    }

    pub fn codomain(&self) -> Atom {
        match *self {
            ArrowGen::J(n) => Atom::cp(n),
            ArrowGen::Q(n) => Atom::cp(n - 1),
            ArrowGen::S(n) => Atom::cp(n),
            ArrowGen::Pi(_) => Atom::K,
            ArrowGen::Phi => Atom::K,
            ArrowGen::Mor => Atom::C,
        }
    }

    fn check_level(&self) -> Result<(), KkError> {
        match *self {
            ArrowGen::J(n) | ArrowGen::Q(n) | ArrowGen::S(n) | ArrowGen::Pi(n) if n == 0 => {
                Err(KkError::BadLevel)
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ArrowGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrowGen::J(n) => write!(f, "j({n})"),
            ArrowGen::Q(n) => write!(f, "q({n})"),
            ArrowGen::S(n) => write!(f, "s({n})"),
            ArrowGen::Pi(n) => write!(f, "pi({n})"),
            ArrowGen::Phi => write!(f, "phi"),
            ArrowGen::Mor => write!(f, "mor"),
        }
    }
}

/// Composable arrow word in diagrammatic order (first arrow applied first);
/// the empty chain is the identity of its domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chain {
    domain: Atom,
    arrows: Vec<ArrowGen>,
}

impl Chain {
    pub fn identity(at: Atom) -> Chain {
        Chain { domain: at, arrows: vec![] }
    }

    pub fn new(domain: Atom, arrows: Vec<ArrowGen>) -> Result<Chain, KkError> {
        let mut at = domain;
        for (i, a) in arrows.iter().enumerate() {
            a.check_level()?;
            if a.domain() != at {
                return Err(KkError::NonComposable {
                    at: i,
                    left: at.to_string(),
                    right: a.to_string(),
                });
            }
            at = a.codomain();
        }
        Ok(Chain { domain, arrows })
    }

    pub fn domain(&self) -> Atom {
        self.domain
    }

    pub fn codomain(&self) -> Atom {
        self.arrows.last().map(|a| a.codomain()).unwrap_or(self.domain)
    }

    pub fn arrows(&self) -> &[ArrowGen] {
        &self.arrows
    }

    pub fn is_identity(&self) -> bool {
        self.arrows.is_empty()
    }

    fn then(&self, other: &Chain) -> Result<Chain, KkError> {
        if self.codomain() != other.domain {
            return Err(KkError::NonComposable {
                at: self.arrows.len(),
                left: self.codomain().to_string(),
                right: other.domain.to_string(),
            });
        }
        let mut arrows = self.arrows.clone();
        arrows.extend_from_slice(&other.arrows);
        Ok(Chain { domain: self.domain, arrows })
    }

    fn splice(&self, at: usize, removed: usize) -> Chain {
        let mut arrows = self.arrows[..at].to_vec();
        arrows.extend_from_slice(&self.arrows[at + removed..]);
        Chain { domain: self.domain, arrows }
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arrows.is_empty() {
            return write!(f, "id[{}]", self.domain);
        }
        let parts: Vec<String> = self.arrows.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Integer combination of chains with common endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSum {
    domain: Atom,
    codomain: Atom,
    terms: BTreeMap<Chain, i64>,
}

impl FormalSum {
    pub fn zero(domain: Atom, codomain: Atom) -> FormalSum {
        FormalSum { domain, codomain, terms: BTreeMap::new() }
    }

    pub fn identity(at: Atom) -> FormalSum {
        FormalSum::from_chain(Chain::identity(at))
    }

    pub fn from_chain(c: Chain) -> FormalSum {
        let (domain, codomain) = (c.domain(), c.codomain());
        FormalSum { domain, codomain, terms: BTreeMap::from([(c, 1)]) }
    }

    pub fn domain(&self) -> Atom {
        self.domain
    }

    pub fn codomain(&self) -> Atom {
        self.codomain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Chain, i64)> {
        self.terms.iter().map(|(c, &k)| (c, k))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self.terms.len() == 1
            && matches!(self.terms.iter().next(), Some((c, 1)) if c.is_identity())
    }

    fn add_term(&mut self, c: Chain, k: i64) {
        if k == 0 {
            return;
        }
        let entry = self.terms.entry(c.clone()).or_insert(0);
        *entry += k;
        if *entry == 0 {
            self.terms.remove(&c);
        }
    }

    pub fn add(&self, other: &FormalSum) -> Result<FormalSum, KkError> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(KkError::ObjectMismatch {
                left: format!("{} -> {}", self.domain, self.codomain),
                right: format!("{} -> {}", other.domain, other.codomain),
            });
        }
        let mut out = self.clone();
        for (c, k) in other.terms() {
            out.add_term(c.clone(), k);
        }
        Ok(out)
    }

    /// self followed by other, bilinear in the terms.
    pub fn then(&self, other: &FormalSum) -> Result<FormalSum, KkError> {
        if self.codomain != other.domain {
            return Err(KkError::ObjectMismatch {
                left: self.codomain.to_string(),
                right: other.domain.to_string(),
            });
        }
        let mut out = FormalSum::zero(self.domain, other.codomain);
        for (a, ka) in self.terms() {
            for (b, kb) in other.terms() {
                out.add_term(a.then(b)?, ka * kb);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, k)| if *k == 1 { c.to_string() } else { format!("{k}*{c}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuleKind {
    /// (s(n), q(n)) -> identity: the splitting composed with the quotient.
    R1,
    /// (j(n), pi(n)) -> identity: the inclusion composed with its left inverse.
    R2,
    /// (phi, mor) -> id_C and (mor, phi) -> id_K.
    R3,
    /// X.(pi(n), j(n)).Y + X.(q(n), s(n)).Y -> X.Y.
    R4,
    /// (j(n), q(n)) -> 0: the quotient kills the ideal.
    R5,
    /// (s(n), pi(n)) -> 0: the splitting lands in the complement of the ideal.
    R6,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RuleKind::R1 => "R1",
            RuleKind::R2 => "R2",
            RuleKind::R3 => "R3",
            RuleKind::R4 => "R4",
            RuleKind::R5 => "R5",
            RuleKind::R6 => "R6",
        };
        write!(f, "{s}")
    }
}

/// One rewrite application; level is 0 for R3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub rule: RuleKind,
    pub level: u32,
}

impl Step {
    pub fn new(rule: RuleKind, level: u32) -> Step {
        Step { rule, level }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rule == RuleKind::R3 {
            write!(f, "R3")
        } else {
            write!(f, "{}({})", self.rule, self.level)
        }
    }
}

// First single-term redex in canonical term order, scanning positions left
// to right. Adjacent levels always agree where a rule pattern matches, since
// the chains are composable.
fn find_single_redex(sum: &FormalSum) -> Option<(Chain, usize, Step, bool)> {
    for (chain, _) in sum.terms() {
        for p in 0..chain.arrows().len().saturating_sub(1) {
            let pair = (&chain.arrows()[p], &chain.arrows()[p + 1]);
            let hit = match pair {
                (ArrowGen::S(a), ArrowGen::Q(b)) if a == b => Some((RuleKind::R1, *a, false)),
                (ArrowGen::J(a), ArrowGen::Pi(b)) if a == b => Some((RuleKind::R2, *a, false)),
                (ArrowGen::Phi, ArrowGen::Mor) | (ArrowGen::Mor, ArrowGen::Phi) => {
                    Some((RuleKind::R3, 0, false))
                }
                (ArrowGen::J(a), ArrowGen::Q(b)) if a == b => Some((RuleKind::R5, *a, true)),
                (ArrowGen::S(a), ArrowGen::Pi(b)) if a == b => Some((RuleKind::R6, *a, true)),
                _ => None,
            };
            if let Some((rule, level, kills)) = hit {
                return Some((chain.clone(), p, Step::new(rule, level), kills));
            }
        }
    }
    None
}

// R4: two terms with equal coefficient that differ by (pi(n), j(n)) against
// (q(n), s(n)) at one position collapse to the common outer word.
fn find_pair_redex(sum: &FormalSum) -> Option<(Chain, Chain, Chain, i64, u32)> {
    let terms: Vec<(&Chain, i64)> = sum.terms().collect();
    for (a, ka) in &terms {
        for (b, kb) in &terms {
            if ka != kb || a == b {
                continue;
            }
            for p in 0..a.arrows().len().saturating_sub(1) {
                let (ArrowGen::Pi(n), ArrowGen::J(m)) = (a.arrows()[p], a.arrows()[p + 1])
                else {
                    continue;
                };
                if n != m {
                    continue;
                }
                let mut expect = a.arrows()[..p].to_vec();
                expect.push(ArrowGen::Q(n));
                expect.push(ArrowGen::S(n));
                expect.extend_from_slice(&a.arrows()[p + 2..]);
                if b.arrows() == expect.as_slice() {
                    let collapsed = a.splice(p, 2);
                    return Some(((*a).clone(), (*b).clone(), collapsed, *ka, n));
                }
            }
        }
    }
    None
}

/// Reduce to a fixed point of R1-R6, returning the result and the applied
/// steps in order. Every rule strictly shrinks (total arrows, term count),
/// so the loop terminates; the cap is a tripwire, not a budget.
pub fn normalize(sum: &FormalSum) -> (FormalSum, Vec<Step>) {
    let mut cur = sum.clone();
    let mut steps = Vec::new();
    let size: usize =
        cur.terms().map(|(c, _)| c.arrows().len() + 1).sum::<usize>() + cur.term_count() + 1;
    let cap = 10 * size;
    loop {
        assert!(steps.len() <= cap, "rewrite exceeded the termination bound");
        if let Some((chain, p, step, kills_term)) = find_single_redex(&cur) {
            let coeff = cur.terms().find(|(c, _)| **c == chain).map(|(_, k)| k).unwrap();
            cur.add_term(chain.clone(), -coeff);
            if !kills_term {
                cur.add_term(chain.splice(p, 2), coeff);
            }
            steps.push(step);
            continue;
        }
        if let Some((a, b, collapsed, coeff, level)) = find_pair_redex(&cur) {
            cur.add_term(a, -coeff);
            cur.add_term(b, -coeff);
            cur.add_term(collapsed, coeff);
            steps.push(Step::new(RuleKind::R4, level));
            continue;
        }
        return (cur, steps);
    }
}

/// Ordered direct sum of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KKObject(Vec<Atom>);

impl KKObject {
    pub fn new(atoms: Vec<Atom>) -> KKObject {
        assert!(!atoms.is_empty(), "direct sum needs at least one atom");
        KKObject(atoms)
    }

    pub fn single(a: Atom) -> KKObject {
        KKObject(vec![a])
    }

    /// K^n (+) C, the target of the level-n equivalence.
    pub fn sum_target(n: u32) -> KKObject {
        let mut atoms = vec![Atom::K; n as usize];
        atoms.push(Atom::C);
        KKObject(atoms)
    }

    /// C^{n+1}, the Morita-compressed target.
    pub fn scalar_target(n: u32) -> KKObject {
        KKObject(vec![Atom::C; n as usize + 1])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for KKObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(" (+) "))
    }
}

/// Matrix of sums; entry (i, j) maps source atom j to target atom i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumMatrix {
    source: KKObject,
    target: KKObject,
    entries: Vec<Vec<FormalSum>>,
}

impl SumMatrix {
    pub fn new(
        source: KKObject,
        target: KKObject,
        entries: Vec<Vec<FormalSum>>,
    ) -> Result<SumMatrix, KkError> {
        if entries.len() != target.len() || entries.iter().any(|row| row.len() != source.len()) {
            return Err(KkError::ObjectMismatch {
                left: format!("{} -> {}", source, target),
                right: format!("{}x{} entries", entries.len(), entries.first().map_or(0, |r| r.len())),
            });
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.domain() != source.atoms()[j] || e.codomain() != target.atoms()[i] {
                    return Err(KkError::ObjectMismatch {
                        left: format!("entry ({i},{j}): {} -> {}", e.domain(), e.codomain()),
                        right: format!("{} -> {}", source.atoms()[j], target.atoms()[i]),
                    });
                }
            }
        }
        Ok(SumMatrix { source, target, entries })
    }

    pub fn identity(obj: &KKObject) -> SumMatrix {
        let n = obj.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            FormalSum::identity(obj.atoms()[i])
                        } else {
                            FormalSum::zero(obj.atoms()[j], obj.atoms()[i])
                        }
                    })
                    .collect()
            })
            .collect();
        SumMatrix { source: obj.clone(), target: obj.clone(), entries }
    }

    pub fn source(&self) -> &KKObject {
        &self.source
    }

    pub fn target(&self) -> &KKObject {
        &self.target
    }

    pub fn entry(&self, i: usize, j: usize) -> &FormalSum {
        &self.entries[i][j]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.entries.iter().enumerate().all(|(i, row)| {
                row.iter().enumerate().all(|(j, e)| {
                    if i == j { e.is_identity() } else { e.is_zero() }
                })
            })
    }
}

/// a followed by b (diagrammatic order): requires target(a) = source(b).
pub fn product(a: &SumMatrix, b: &SumMatrix) -> Result<SumMatrix, KkError> {
    if a.target != b.source {
        return Err(KkError::ObjectMismatch {
            left: a.target.to_string(),
            right: b.source.to_string(),
        });
    }
    let mut entries = Vec::with_capacity(b.target.len());
    for i in 0..b.target.len() {
        let mut row = Vec::with_capacity(a.source.len());
        for j in 0..a.source.len() {
            let mut acc = FormalSum::zero(a.source.atoms()[j], b.target.atoms()[i]);
            for l in 0..a.target.len() {
                acc = acc.add(&a.entries[l][j].then(&b.entries[i][l])?)?;
            }
            row.push(acc);
        }
        entries.push(row);
    }
    SumMatrix::new(a.source.clone(), b.target.clone(), entries)
}

/// Column matrix CP(n) -> K^n (+) C; row i (0-based, i < n) is the chain of
/// i quotients followed by pi, row n is the full quotient chain down to C.
pub fn build_pi(n: u32) -> SumMatrix {
    assert!(n >= 1);
    let source = KKObject::single(Atom::cp(n));
    let target = KKObject::sum_target(n);
    let mut entries = Vec::new();
    for i in 0..n {
        let mut arrows: Vec<ArrowGen> = (0..i).map(|t| ArrowGen::Q(n - t)).collect();
        arrows.push(ArrowGen::Pi(n - i));
        let chain = Chain::new(Atom::cp(n), arrows).expect("composable by construction");
        entries.push(vec![FormalSum::from_chain(chain)]);
    }
    let arrows: Vec<ArrowGen> = (0..n).map(|t| ArrowGen::Q(n - t)).collect();
    let chain = Chain::new(Atom::cp(n), arrows).expect("composable by construction");
    entries.push(vec![FormalSum::from_chain(chain)]);
    SumMatrix::new(source, target, entries).expect("shapes match")
}

/// Row matrix K^n (+) C -> CP(n); column k (0-based, k < n) is the inclusion
/// at level n-k followed by the splittings back up, column n the full
/// splitting chain from C.
pub fn build_i(n: u32) -> SumMatrix {
    assert!(n >= 1);
    let source = KKObject::sum_target(n);
    let target = KKObject::single(Atom::cp(n));
    let mut row = Vec::new();
    for k in 0..n {
        let mut arrows = vec![ArrowGen::J(n - k)];
        arrows.extend((n - k + 1..=n).map(ArrowGen::S));
        let chain = Chain::new(Atom::K, arrows).expect("composable by construction");
        row.push(FormalSum::from_chain(chain));
    }
    let arrows: Vec<ArrowGen> = (1..=n).map(ArrowGen::S).collect();
    let chain = Chain::new(Atom::C, arrows).expect("composable by construction");
    row.push(FormalSum::from_chain(chain));
    SumMatrix::new(source, target, vec![row]).expect("shapes match")
}

/// K^n (+) C -> C^{n+1}: mor on each K summand, identity on the C summand.
pub fn diag_mor(n: u32) -> SumMatrix {
    let source = KKObject::sum_target(n);
    let target = KKObject::scalar_target(n);
    let entries = diag_entries(&source, &target, ArrowGen::Mor);
    SumMatrix::new(source, target, entries).expect("shapes match")
}

/// C^{n+1} -> K^n (+) C: phi into each K summand, identity on the C summand.
pub fn diag_phi(n: u32) -> SumMatrix {
    let source = KKObject::scalar_target(n);
    let target = KKObject::sum_target(n);
    let entries = diag_entries(&source, &target, ArrowGen::Phi);
    SumMatrix::new(source, target, entries).expect("shapes match")
}

fn diag_entries(source: &KKObject, target: &KKObject, arrow: ArrowGen) -> Vec<Vec<FormalSum>> {
    (0..target.len())
        .map(|i| {
            (0..source.len())
                .map(|j| {
                    let (d, c) = (source.atoms()[j], target.atoms()[i]);
                    if i != j {
                        FormalSum::zero(d, c)
                    } else if d == c {
                        FormalSum::identity(d)
                    } else {
                        FormalSum::from_chain(
                            Chain::new(d, vec![arrow]).expect("diagonal arrow composable"),
                        )
                    }
                })
                .collect()
        })
        .collect()
}

/// Entrywise normalization with per-entry traces keyed by (row, col).
#[derive(Debug, Clone)]
pub struct MatrixNormalization {
    pub matrix: SumMatrix,
    pub entry_steps: BTreeMap<(usize, usize), Vec<Step>>,
}

pub fn normalize_matrix(m: &SumMatrix) -> MatrixNormalization {
    let mut entry_steps = BTreeMap::new();
    let mut entries = Vec::new();
    for i in 0..m.target.len() {
        let mut row = Vec::new();
        for j in 0..m.source.len() {
            let (reduced, steps) = normalize(&m.entries[i][j]);
            entry_steps.insert((i, j), steps);
            row.push(reduced);
        }
        entries.push(row);
    }
    let matrix = SumMatrix::new(m.source.clone(), m.target.clone(), entries)
        .expect("normalization preserves endpoints");
    MatrixNormalization { matrix, entry_steps }
}

/// Both round trips of the level-n equivalence, normalized with traces.
#[derive(Debug, Clone)]
pub struct KkVerification {
    pub n: u32,
    /// build_i then build_pi, reduced on K^n (+) C.
    pub round_trip_on_sum: MatrixNormalization,
    /// build_pi then build_i, reduced on CP(n).
    pub round_trip_on_cp: MatrixNormalization,
    pub verified: bool,
}

pub fn verify_kk_equivalence(n: u32) -> Result<KkVerification, KkError> {
    let pi = build_pi(n);
    let inc = build_i(n);
    let round_trip_on_sum = normalize_matrix(&product(&inc, &pi)?);
    let round_trip_on_cp = normalize_matrix(&product(&pi, &inc)?);
    let verified =
        round_trip_on_sum.matrix.is_identity() && round_trip_on_cp.matrix.is_identity();
    Ok(KkVerification { n, round_trip_on_sum, round_trip_on_cp, verified })
}

/// The equivalence compressed along the Morita arrows to C^{n+1}.
#[derive(Debug, Clone)]
pub struct MoritaCompression {
    pub n: u32,
    /// CP(n) -> C^{n+1}.
    pub compressed: SumMatrix,
    /// C^{n+1} -> CP(n).
    pub compressed_inverse: SumMatrix,
    pub round_trip_on_scalars: MatrixNormalization,
    pub round_trip_on_cp: MatrixNormalization,
    pub verified: bool,
}

pub fn morita_compress(n: u32) -> Result<MoritaCompression, KkError> {
    let compressed = product(&build_pi(n), &diag_mor(n))?;
    let compressed_inverse = product(&diag_phi(n), &build_i(n))?;
    let round_trip_on_scalars = normalize_matrix(&product(&compressed_inverse, &compressed)?);
    let round_trip_on_cp = normalize_matrix(&product(&compressed, &compressed_inverse)?);
    let verified =
        round_trip_on_scalars.matrix.is_identity() && round_trip_on_cp.matrix.is_identity();
    Ok(MoritaCompression {
        n,
        compressed,
        compressed_inverse,
        round_trip_on_scalars,
        round_trip_on_cp,
        verified,
    })
}
