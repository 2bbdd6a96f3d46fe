//! Floating-point models of the generator relations on truncated sequence
//! spaces, used to cross-check the formal layer: residuals of the sphere and
//! graph relations, the projective-space generators `p_ij = z_i* z_j`, and the
//! diagonal projections both as iterated limits and in closed form.

mod operator;

pub use operator::{NumericsError, Operator, Truncation};

use crate::graph::{Graph, Mult};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn validate_q(q: f64) -> Result<(), NumericsError> {
    if q.is_finite() && 0.0 < q && q < 1.0 {
        Ok(())
    } else {
        Err(NumericsError::QOutOfRange(q))
    }
}

/// Named operators of one representation on a fixed truncation.
#[derive(Debug, Clone)]
pub struct RepresentationTable {
    pub trunc: Truncation,
    pub q: Option<f64>,
    ops: BTreeMap<String, Operator>,
}

impl RepresentationTable {
    pub fn new(trunc: Truncation, q: Option<f64>) -> Self {
        RepresentationTable { trunc, q, ops: BTreeMap::new() }
    }

    pub fn insert(&mut self, name: impl Into<String>, op: Operator) {
        assert_eq!(op.dim(), self.trunc.dim(), "operator dimension mismatch");
        self.ops.insert(name.into(), op);
    }

    pub fn get(&self, name: &str) -> Result<&Operator, NumericsError> {
        self.ops.get(name).ok_or_else(|| NumericsError::UnknownGenerator(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.keys().map(String::as_str)
    }

    pub fn q(&self) -> Result<f64, NumericsError> {
        self.q.ok_or(NumericsError::MissingQ)
    }
}

/// Raising part of generator j < n on mode j: returns the shifted tuple and
/// the coefficient q^(k_1+..+k_j) sqrt(1 - q^(2(k_{j+1}+1))), or None when the
/// shift exits the box.
fn z_shift(q: f64, k: &[usize], j: usize, cutoff: usize) -> Option<(Vec<usize>, f64)> {
    if k[j] + 1 > cutoff {
        return None;
    }
    let s: i32 = k[..j].iter().map(|&x| x as i32).sum();
    let coeff = q.powi(s) * (1.0 - q.powi(2 * (k[j] as i32 + 1))).sqrt();
    let mut t = k.to_vec();
    t[j] += 1;
    Some((t, coeff))
}

fn k_sum(k: &[usize]) -> i32 {
    k.iter().map(|&x| x as i32).sum()
}

fn first_nonzero(k: &[usize]) -> Option<usize> {
    k.iter().position(|&x| x > 0)
}

/// Sphere generators z_0..z_n on the box truncation of zeta(k_1..k_n):
/// z_j raises mode j+1 with a weight depending on k_1..k_j, z_n is diagonal.
pub fn rep_psi(n: usize, q: f64, trunc: Truncation) -> Result<RepresentationTable, NumericsError> {
    validate_q(q)?;
    assert_eq!(trunc.n, n, "truncation mode count must match n");
    if trunc.winding.is_some() {
        return Err(NumericsError::UnexpectedWinding);
    }
    let dim = trunc.dim();
    let mut table = RepresentationTable::new(trunc, Some(q));
    for j in 0..n {
        let op = Operator::build(dim, |idx| {
            let (k, m) = trunc.decode(idx);
            match z_shift(q, &k, j, trunc.cutoff) {
                Some((t, c)) => vec![(trunc.index(&t, m), Complex64::new(c, 0.0))],
                None => Vec::new(),
            }
        });
        table.insert(format!("z{j}"), op);
    }
    let zn = Operator::diag(dim, |idx| {
        let (k, _) = trunc.decode(idx);
        Complex64::new(q.powi(k_sum(&k)), 0.0)
    });
    table.insert(format!("z{n}"), zn);
    Ok(table)
}

/// Defining representation of the graph algebra of the odd-sphere graph on
/// zeta(k_1..k_n, m): P_{v_j} selects the stratum whose first nonzero mode is
/// k_j (P_{v_{n+1}} selects k = 0), S-operators shift one mode or the winding
/// index with coefficient 1.  No deformation parameter enters.
pub fn rep_rho(n: usize, trunc: Truncation) -> Result<RepresentationTable, NumericsError> {
    assert_eq!(trunc.n, n, "truncation mode count must match n");
    let w = trunc.winding.ok_or(NumericsError::MissingWinding)?;
    let dim = trunc.dim();
    let mut table = RepresentationTable::new(trunc, None);
    for j in 1..=n {
        let op = Operator::diag(dim, |idx| {
            let (k, _) = trunc.decode(idx);
            if first_nonzero(&k) == Some(j - 1) { ONE } else { ZERO }
        });
        table.insert(format!("P_v{j}"), op);
    }
    table.insert(
        format!("P_v{}", n + 1),
        Operator::diag(dim, |idx| {
            let (k, _) = trunc.decode(idx);
            if first_nonzero(&k).is_none() { ONE } else { ZERO }
        }),
    );
    for i in 1..=n {
        for j in i..=n {
            // e_ij: defined on the stratum of v_j, raises mode i.
            let op = Operator::build(dim, |idx| {
                let (k, m) = trunc.decode(idx);
                if first_nonzero(&k) != Some(j - 1) || k[i - 1] + 1 > trunc.cutoff {
                    return Vec::new();
                }
                let mut t = k.clone();
                t[i - 1] += 1;
                vec![(trunc.index(&t, m), ONE)]
            });
            table.insert(format!("S_v{i}_v{j}"), op);
        }
        // e_{i,n+1}: defined on k = 0, raises mode i.
        let op = Operator::build(dim, |idx| {
            let (k, m) = trunc.decode(idx);
            if first_nonzero(&k).is_some() {
                return Vec::new();
            }
            let mut t = k.clone();
            t[i - 1] = 1;
            vec![(trunc.index(&t, m), ONE)]
        });
        table.insert(format!("S_v{i}_v{}", n + 1), op);
    }
    // The loop at v_{n+1} raises the winding index on k = 0.
    let op = Operator::build(dim, |idx| {
        let (k, m) = trunc.decode(idx);
        if first_nonzero(&k).is_some() || m + 1 > w {
            return Vec::new();
        }
        vec![(trunc.index(&k, m + 1), ONE)]
    });
    table.insert(format!("S_v{0}_v{0}", n + 1), op);
    Ok(table)
}

/// Sphere generators carried through the graph representation: z_0..z_{n-1}
/// act per winding stratum exactly as in `rep_psi`, while z_n keeps the
/// diagonal weight and raises the winding index.
pub fn rep_pi(n: usize, q: f64, trunc: Truncation) -> Result<RepresentationTable, NumericsError> {
    validate_q(q)?;
    assert_eq!(trunc.n, n, "truncation mode count must match n");
    let w = trunc.winding.ok_or(NumericsError::MissingWinding)?;
    let dim = trunc.dim();
    let mut table = RepresentationTable::new(trunc, Some(q));
    for j in 0..n {
        let op = Operator::build(dim, |idx| {
            let (k, m) = trunc.decode(idx);
            match z_shift(q, &k, j, trunc.cutoff) {
                Some((t, c)) => vec![(trunc.index(&t, m), Complex64::new(c, 0.0))],
                None => Vec::new(),
            }
        });
        table.insert(format!("z{j}"), op);
    }
    let zn = Operator::build(dim, |idx| {
        let (k, m) = trunc.decode(idx);
        if m + 1 > w {
            return Vec::new();
        }
        vec![(trunc.index(&k, m + 1), Complex64::new(q.powi(k_sum(&k)), 0.0))]
    });
    table.insert(format!("z{n}"), zn);
    Ok(table)
}

/// Which family of defining relations to measure.
#[derive(Debug, Clone)]
pub enum RelationSet {
    /// z_i z_j = q^{-1} z_j z_i (i<j), z_i z_j* = q^{-1} z_j* z_i (i != j),
    /// z_i* z_i = z_i z_i* + (1-q^2) sum_{j>i} z_j z_j*, sum_j z_j z_j* = 1.
    Sphere { n: usize },
    /// Projections and partial isometries of a graph with simple edge classes.
    CuntzKrieger { graph: Arc<Graph> },
}

/// Per-relation residuals, each the max 2-norm of (lhs - rhs) applied to the
/// basis columns the entries were measured on.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub margin: usize,
    pub entries: Vec<(String, f64)>,
}

impl ResidualReport {
    pub fn max(&self) -> f64 {
        self.entries.iter().map(|&(_, r)| r).fold(0.0, f64::max)
    }

    pub fn worst(&self) -> Option<(&str, f64)> {
        self.entries
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(name, r)| (name.as_str(), *r))
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

/// Measures every relation of `set` against the operators in `table` on the
/// margin-`margin` interior of the truncation.  The relations are quadratic
/// in the generators, so any margin below 2 would let wall effects masquerade
/// as violations and is rejected.
pub fn relation_residuals(
    table: &RepresentationTable,
    set: &RelationSet,
    margin: usize,
) -> Result<ResidualReport, NumericsError> {
    const NEEDS: usize = 2;
    if margin < NEEDS {
        return Err(NumericsError::MarginTooSmall { margin, needs: NEEDS });
    }
    let interior = table.trunc.interior_indices(margin);
    if interior.is_empty() {
        return Err(NumericsError::EmptyInterior { margin });
    }
    let dim = table.trunc.dim();
    let mut entries = Vec::new();
    match set {
        RelationSet::Sphere { n } => {
            let n = *n;
            let q = table.q()?;
            let mut z = Vec::with_capacity(n + 1);
            for j in 0..=n {
                z.push(table.get(&format!("z{j}"))?.clone());
            }
            let zadj: Vec<Operator> = z.iter().map(Operator::adjoint).collect();
            for i in 0..=n {
                for j in (i + 1)..=n {
                    let r = z[i].mul(&z[j]).sub(&z[j].mul(&z[i]).scale_re(1.0 / q));
                    entries.push((format!("commutation z{i} z{j}"), r.max_column_norm(&interior)));
                }
            }
            for i in 0..=n {
                for j in 0..=n {
                    if i == j {
                        continue;
                    }
                    // same inverse twist as the zz line: the family is closed
                    // under adjoints only with matching exponents
                    let r = z[i].mul(&zadj[j]).sub(&zadj[j].mul(&z[i]).scale_re(1.0 / q));
                    entries.push((format!("mixed commutation z{i} z{j}*"), r.max_column_norm(&interior)));
                }
            }
            for i in 0..=n {
                let mut rhs = z[i].mul(&zadj[i]);
                for j in (i + 1)..=n {
                    rhs = rhs.add(&z[j].mul(&zadj[j]).scale_re(1.0 - q * q));
                }
                let r = zadj[i].mul(&z[i]).sub(&rhs);
                entries.push((format!("ladder relation z{i}"), r.max_column_norm(&interior)));
            }
            let mut unit = Operator::zero(dim);
            for j in 0..=n {
                unit = unit.add(&z[j].mul(&zadj[j]));
            }
            let r = unit.sub(&Operator::identity(dim));
            entries.push(("unit decomposition".to_string(), r.max_column_norm(&interior)));
        }
        RelationSet::CuntzKrieger { graph } => {
            let g = graph.as_ref();
            let mut projections = Vec::new();
            for v in g.vertices() {
                projections.push((v.clone(), table.get(&format!("P_{}", v.0))?.clone()));
            }
            let mut isometries = Vec::new();
            for class in g.classes() {
                match class.mult {
                    Mult::Finite(1) => {}
                    other => {
                        return Err(NumericsError::UnsupportedMultiplicity {
                            src: class.src.0.clone(),
                            dst: class.dst.0.clone(),
                            mult: other.to_string(),
                        })
                    }
                }
                let op = table.get(&format!("S_{}_{}", class.src.0, class.dst.0))?.clone();
                isometries.push((class.src, class.dst, op));
            }
            for (v, p) in &projections {
                let r = p.mul(p).sub(p);
                entries.push((format!("idempotent P_{}", v.0), r.max_column_norm(&interior)));
                let r = p.adjoint().sub(p);
                entries.push((format!("self-adjoint P_{}", v.0), r.max_column_norm(&interior)));
            }
            for (v, p) in &projections {
                for (w, pw) in &projections {
                    if v < w {
                        let r = p.mul(pw);
                        entries.push((
                            format!("orthogonality P_{} P_{}", v.0, w.0),
                            r.max_column_norm(&interior),
                        ));
                    }
                }
            }
            for (a_src, a_dst, s) in &isometries {
                for (b_src, b_dst, t) in &isometries {
                    if (a_src, a_dst) != (b_src, b_dst) {
                        let r = s.adjoint().mul(t);
                        entries.push((
                            format!("orthogonality S[{}->{}]* S[{}->{}]", a_src.0, a_dst.0, b_src.0, b_dst.0),
                            r.max_column_norm(&interior),
                        ));
                    }
                }
            }
            for (src, dst, s) in &isometries {
                let p_range = table.get(&format!("P_{}", dst.0))?;
                let r = s.adjoint().mul(s).sub(p_range);
                entries.push((format!("range projection S[{}->{}]", src.0, dst.0), r.max_column_norm(&interior)));
                let p_src = table.get(&format!("P_{}", src.0))?;
                let ss = s.mul(&s.adjoint());
                let r = p_src.mul(&ss).sub(&ss);
                entries.push((format!("source support S[{}->{}]", src.0, dst.0), r.max_column_norm(&interior)));
            }
            for (v, p) in &projections {
                if !g.is_regular(v) {
                    continue;
                }
                let mut sum = Operator::zero(dim);
                for (src, _, s) in &isometries {
                    if *src == *v {
                        sum = sum.add(&s.mul(&s.adjoint()));
                    }
                }
                let r = sum.sub(p);
                entries.push((format!("vertex decomposition P_{}", v.0), r.max_column_norm(&interior)));
            }
            let mut unit = Operator::zero(dim);
            for (_, p) in &projections {
                unit = unit.add(p);
            }
            let r = unit.sub(&Operator::identity(dim));
            entries.push(("vertex partition".to_string(), r.max_column_norm(&interior)));
        }
    }
    Ok(ResidualReport { margin, entries })
}

fn sign(x: i64) -> i32 {
    x.signum() as i32
}

/// Builds p_ij = z_i* z_j from the sphere generators and measures the induced
/// relations: the product law sum_j p_ij p_jk = p_ik and the adjoint flip
/// p_ij* = p_ji always; with `include_commutation` also the three exchange
/// laws (words of length 4, hence the wider margin).
pub fn cp_generator_check(
    n: usize,
    q: f64,
    trunc: Truncation,
    include_commutation: bool,
) -> Result<ResidualReport, NumericsError> {
    const MARGIN: usize = 4;
    let table = rep_psi(n, q, trunc)?;
    let interior = trunc.interior_indices(MARGIN);
    if interior.is_empty() {
        return Err(NumericsError::EmptyInterior { margin: MARGIN });
    }
    let mut z = Vec::with_capacity(n + 1);
    for j in 0..=n {
        z.push(table.get(&format!("z{j}"))?.clone());
    }
    let p: Vec<Vec<Operator>> = (0..=n)
        .map(|i| (0..=n).map(|j| z[i].adjoint().mul(&z[j])).collect())
        .collect();
    let mut entries = Vec::new();
    for i in 0..=n {
        for k in 0..=n {
            let mut sum = Operator::zero(trunc.dim());
            for j in 0..=n {
                sum = sum.add(&p[i][j].mul(&p[j][k]));
            }
            let r = sum.sub(&p[i][k]);
            entries.push((format!("product sum p[{i},{k}]"), r.max_column_norm(&interior)));
        }
    }
    for i in 0..=n {
        for j in 0..=n {
            let r = p[i][j].adjoint().sub(&p[j][i]);
            entries.push((format!("adjoint flip p[{i},{j}]"), r.max_column_norm(&interior)));
        }
    }
    if include_commutation {
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    for l in 0..=n {
                        if i == l || j == k {
                            continue;
                        }
                        let s = sign(k as i64 - i as i64) + sign(j as i64 - l as i64);
                        let r = p[i][j].mul(&p[k][l]).sub(&p[k][l].mul(&p[i][j]).scale_re(q.powi(s)));
                        entries.push((
                            format!("exchange p[{i},{j}] p[{k},{l}]"),
                            r.max_column_norm(&interior),
                        ));
                    }
                }
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    if i == k {
                        continue;
                    }
                    let s = sign(j as i64 - i as i64) + sign(j as i64 - k as i64) + 1;
                    let mut rhs = p[j][k].mul(&p[i][j]).scale_re(q.powi(s));
                    for l in (j + 1)..=n {
                        rhs = rhs.sub(&p[i][l].mul(&p[l][k]).scale_re(1.0 - q * q));
                    }
                    let r = p[i][j].mul(&p[j][k]).sub(&rhs);
                    entries.push((
                        format!("middle exchange p[{i},{j}] p[{j},{k}]"),
                        r.max_column_norm(&interior),
                    ));
                }
            }
        }
        for i in 0..=n {
            for j in 0..=n {
                if i == j {
                    continue;
                }
                let s2 = 2 * sign(j as i64 - i as i64);
                let mut rhs = p[j][i].mul(&p[i][j]).scale_re(q.powi(s2));
                for l in (i + 1)..=n {
                    rhs = rhs.add(&p[j][l].mul(&p[l][j]).scale_re((1.0 - q * q) * q.powi(s2)));
                }
                for l in (j + 1)..=n {
                    rhs = rhs.sub(&p[i][l].mul(&p[l][i]).scale_re(1.0 - q * q));
                }
                let r = p[i][j].mul(&p[j][i]).sub(&rhs);
                entries.push((format!("conjugate pair p[{i},{j}]"), r.max_column_norm(&interior)));
            }
        }
    }
    Ok(ResidualReport { margin: MARGIN, entries })
}

/// Truncated product formula
///   q^{-2 steps} prod_{r=1}^{steps} (q^2 A_l - q^{2(r+1)}) / (1 - q^{2r}),
/// A_l = z_l z_l* + .. + z_n z_n*, which converges to the diagonal projection
/// onto the kernel of modes 1..l once `steps` dominates the largest mode sum.
pub fn projection_limit(
    n: usize,
    q: f64,
    l: usize,
    steps: usize,
    table: &RepresentationTable,
) -> Result<Operator, NumericsError> {
    validate_q(q)?;
    if l == 0 || l > n {
        return Err(NumericsError::OutOfRange { got: l, max: n });
    }
    let dim = table.trunc.dim();
    let mut a = Operator::zero(dim);
    for t in l..=n {
        let zt = table.get(&format!("z{t}"))?;
        a = a.add(&zt.mul(&zt.adjoint()));
    }
    let mut acc = Operator::identity(dim);
    for r in 1..=steps {
        // Dividing each factor by q^2 folds the overall q^{-2 steps} into the
        // product and keeps intermediates bounded.
        let shift = q.powi(2 * r as i32 + 2);
        let denom = q * q * (1.0 - q.powi(2 * r as i32));
        let factor = a
            .scale_re(q * q)
            .sub(&Operator::diag(dim, |_| Complex64::new(shift, 0.0)))
            .scale_re(1.0 / denom);
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// Diagonal projection onto the basis vectors with k_1 = .. = k_l = 0.
/// l = 0 gives the identity; the trace is (cutoff+1)^(n-l) * (2 winding + 1).
pub fn projection_closed_form(n: usize, l: usize, trunc: Truncation) -> Result<Operator, NumericsError> {
    assert_eq!(trunc.n, n, "truncation mode count must match n");
    if trunc.winding.is_none() {
        return Err(NumericsError::MissingWinding);
    }
    if l > n {
        return Err(NumericsError::OutOfRange { got: l, max: n });
    }
    Ok(Operator::diag(trunc.dim(), |idx| {
        let (k, _) = trunc.decode(idx);
        if k[..l].iter().all(|&x| x == 0) { ONE } else { ZERO }
    }))
}

/// Cross-checks the two descriptions of the diagonal projections: the closed
/// form must equal 1 - (P_{v_1} + .. + P_{v_l}) from the graph representation
/// entry for entry (both sides are exact 0/1 diagonals, so these residuals
/// are 0.0, not merely small), and for l >= 1 the product formula under the
/// winding representation must converge to the same projection; its residual
/// is measured away from the walls, where the truncated winding shift is
/// missing mass.
pub fn check_rel_proj(n: usize, q: f64, trunc: Truncation) -> Result<ResidualReport, NumericsError> {
    validate_q(q)?;
    assert_eq!(trunc.n, n, "truncation mode count must match n");
    if trunc.winding.is_none() {
        return Err(NumericsError::MissingWinding);
    }
    let rho = rep_rho(n, trunc)?;
    let pi = rep_pi(n, q, trunc)?;
    let dim = trunc.dim();
    let inner = trunc.interior_indices(1);
    let mut entries = Vec::new();
    for k in 0..n {
        let l = n - k - 1;
        let closed = projection_closed_form(n, l, trunc)?;
        let mut rhs = Operator::identity(dim);
        for i in 1..=l {
            rhs = rhs.sub(rho.get(&format!("P_v{i}"))?);
        }
        entries.push((format!("vertex complement l={l}"), closed.sub(&rhs).max_abs_entry()));
        if l >= 1 {
            let lim = projection_limit(n, q, l, l * trunc.cutoff, &pi)?;
            entries.push((format!("limit route l={l}"), lim.sub(&closed).max_column_norm(&inner)));
        }
    }
    Ok(ResidualReport { margin: 0, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::sphere_graph;

    #[test]
    fn psi_satisfies_sphere_relations() {
        for &q in &[0.3, 0.5, 0.8] {
            let t = Truncation::new(2, 6);
            let table = rep_psi(2, q, t).unwrap();
            let rep = relation_residuals(&table, &RelationSet::Sphere { n: 2 }, 2).unwrap();
            assert!(rep.max() < 1e-12, "q={q}: worst {:?}", rep.worst());
        }
    }

    #[test]
    fn pi_satisfies_sphere_relations() {
        let t = Truncation::with_winding(2, 5, 3);
        let table = rep_pi(2, 0.6, t).unwrap();
        let rep = relation_residuals(&table, &RelationSet::Sphere { n: 2 }, 2).unwrap();
        assert!(rep.max() < 1e-12, "worst {:?}", rep.worst());
    }

    #[test]
    fn pi_restricts_to_psi_on_each_stratum() {
        let q = 0.45;
        let tw = Truncation::with_winding(2, 4, 2);
        let tk = Truncation::new(2, 4);
        let pi = rep_pi(2, q, tw).unwrap();
        let psi = rep_psi(2, q, tk).unwrap();
        for j in 0..2 {
            let zp = pi.get(&format!("z{j}")).unwrap();
            let zs = psi.get(&format!("z{j}")).unwrap();
            for idx in 0..tw.dim() {
                let (k, m) = tw.decode(idx);
                let col = zp.column(idx);
                let scol = zs.column(tk.index(&k, 0));
                assert_eq!(col.len(), scol.len());
                for (&(r, c), &(rs, cs)) in col.iter().zip(scol) {
                    let (kr, mr) = tw.decode(r);
                    assert_eq!(mr, m, "z{j} must preserve the winding index");
                    assert_eq!(tk.index(&kr, 0), rs);
                    assert_eq!(c, cs, "per-stratum coefficients must agree exactly");
                }
            }
        }
        // z_n raises the winding index with the diagonal weight.
        let zn = pi.get("z2").unwrap();
        for idx in 0..tw.dim() {
            let (k, m) = tw.decode(idx);
            let col = zn.column(idx);
            if m == 2 {
                assert!(col.is_empty());
            } else {
                assert_eq!(col.len(), 1);
                assert_eq!(col[0].0, tw.index(&k, m + 1));
                assert_eq!(col[0].1, Complex64::new(q.powi(k_sum(&k)), 0.0));
            }
        }
    }

    #[test]
    fn rho_is_exactly_cuntz_krieger() {
        let t = Truncation::with_winding(2, 4, 2);
        let table = rep_rho(2, t).unwrap();
        let set = RelationSet::CuntzKrieger { graph: sphere_graph(2) };
        let rep = relation_residuals(&table, &set, 2).unwrap();
        for (name, r) in &rep.entries {
            assert_eq!(*r, 0.0, "{name} must hold exactly, got {r:e}");
        }
    }

    #[test]
    fn rho_vertex_projections_partition_unity() {
        let t = Truncation::with_winding(3, 3, 1);
        let table = rep_rho(3, t).unwrap();
        let mut sum = Operator::zero(t.dim());
        for j in 1..=4 {
            sum = sum.add(table.get(&format!("P_v{j}")).unwrap());
        }
        assert!(sum == Operator::identity(t.dim()));
    }

    #[test]
    fn cp_generators_satisfy_their_relations() {
        let t = Truncation::new(2, 6);
        let rep = cp_generator_check(2, 0.5, t, true).unwrap();
        assert_eq!(rep.margin, 4);
        assert!(rep.max() < 1e-12, "worst {:?}", rep.worst());
        // without the exchange laws only product sums and adjoint flips remain
        let basic = cp_generator_check(2, 0.5, t, false).unwrap();
        assert_eq!(basic.entries.len(), 9 + 9);
        assert!(basic.entries.iter().all(|(name, _)| {
            name.starts_with("product sum") || name.starts_with("adjoint flip")
        }));
    }

    #[test]
    fn closed_form_traces_count_the_kernel_box() {
        let t = Truncation::with_winding(2, 4, 2);
        let mut last = f64::INFINITY;
        for l in 0..=2 {
            let p = projection_closed_form(2, l, t).unwrap();
            let expect = 5f64.powi(2 - l as i32) * 5.0;
            assert_eq!(p.trace(), Complex64::new(expect, 0.0));
            assert!(expect < last, "trace must drop strictly in l");
            last = expect;
        }
        assert!(projection_closed_form(2, 0, t).unwrap() == Operator::identity(t.dim()));
        assert_eq!(
            projection_closed_form(2, 3, t).unwrap_err(),
            NumericsError::OutOfRange { got: 3, max: 2 }
        );
    }

    #[test]
    fn limit_matches_closed_form_once_steps_cover_the_box() {
        let t = Truncation::with_winding(2, 5, 2);
        let q = 0.6;
        let pi = rep_pi(2, q, t).unwrap();
        let inner = t.interior_indices(1);
        for l in 1..=2 {
            let closed = projection_closed_form(2, l, t).unwrap();
            for extra in [0, 3] {
                let lim = projection_limit(2, q, l, l * t.cutoff + extra, &pi).unwrap();
                let r = lim.sub(&closed).max_column_norm(&inner);
                assert!(r < 1e-10, "l={l} extra={extra}: residual {r:e}");
            }
            // converged iterate is a projection
            let lim = projection_limit(2, q, l, l * t.cutoff, &pi).unwrap();
            assert!(lim.mul(&lim).sub(&lim).max_column_norm(&inner) < 1e-10);
            assert!(lim.adjoint().sub(&lim).max_column_norm(&inner) < 1e-10);
        }
        assert!(matches!(
            projection_limit(2, q, 0, 5, &pi),
            Err(NumericsError::OutOfRange { got: 0, max: 2 })
        ));
    }

    #[test]
    fn rel_proj_routes_agree() {
        let t = Truncation::with_winding(2, 5, 2);
        let rep = check_rel_proj(2, 0.5, t).unwrap();
        assert_eq!(rep.entries.len(), 2 + 1);
        for (name, r) in &rep.entries {
            if name.starts_with("vertex complement") {
                assert_eq!(*r, 0.0, "{name} is a 0/1 identity, got {r:e}");
            } else {
                assert!(*r < 1e-10, "{name}: residual {r:e}");
            }
        }
    }

    #[test]
    fn perturbed_generator_is_detected() {
        let t = Truncation::new(2, 6);
        let mut table = rep_psi(2, 0.5, t).unwrap();
        let j0 = t.index(&[1, 1], 0);
        let i0 = t.index(&[2, 1], 0);
        let bump = Operator::build(t.dim(), |j| {
            if j == j0 { vec![(i0, Complex64::new(1e-3, 0.0))] } else { Vec::new() }
        });
        let z0 = table.get("z0").unwrap().add(&bump);
        table.insert("z0", z0);
        let rep = relation_residuals(&table, &RelationSet::Sphere { n: 2 }, 2).unwrap();
        assert!(rep.max() >= 1e-4, "a 1e-3 coefficient fault must surface, got {:e}", rep.max());
    }

    #[test]
    fn input_validation() {
        let t = Truncation::new(2, 6);
        assert_eq!(rep_psi(2, 1.5, t).unwrap_err(), NumericsError::QOutOfRange(1.5));
        assert_eq!(rep_psi(2, 0.0, t).unwrap_err(), NumericsError::QOutOfRange(0.0));
        let tw = Truncation::with_winding(2, 6, 2);
        assert_eq!(rep_psi(2, 0.5, tw).unwrap_err(), NumericsError::UnexpectedWinding);
        assert_eq!(rep_rho(2, t).unwrap_err(), NumericsError::MissingWinding);
        assert_eq!(check_rel_proj(2, 0.5, t).unwrap_err(), NumericsError::MissingWinding);
        let table = rep_psi(2, 0.5, t).unwrap();
        assert_eq!(
            relation_residuals(&table, &RelationSet::Sphere { n: 2 }, 1).unwrap_err(),
            NumericsError::MarginTooSmall { margin: 1, needs: 2 }
        );
        // margin 4 empties a cutoff-3 box
        let small = Truncation::new(2, 3);
        assert_eq!(
            cp_generator_check(2, 0.5, small, false).unwrap_err(),
            NumericsError::EmptyInterior { margin: 4 }
        );
        assert!(matches!(table.get("z9"), Err(NumericsError::UnknownGenerator(_))));
    }
}
