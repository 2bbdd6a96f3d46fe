//! K-theory of a graph algebra from the vertex matrix: the map sends a regular
//! vertex v to (sum of ranges of its edges) - v; K0 is the cokernel and K1 the
//! kernel, both read off a Smith normal form over the integers.

use crate::graph::{Graph, Mult, VertexId};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KTheoryError {
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
}

/// Dense integer matrix, row-major, arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(*x));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    fn add_assign_at(&mut self, i: usize, j: usize, x: &BigInt) {
        let cell = &mut self.data[i * self.cols + j];
        *cell += x;
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = a * other.get(k, j);
                    out.add_assign_at(i, j, &p);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] -= q * row[source]
    fn row_sub(&mut self, target: usize, source: usize, q: &BigInt) {
        for j in 0..self.cols {
            let x = q * self.get(source, j);
            let cell = &mut self.data[target * self.cols + j];
            *cell -= x;
        }
    }

    /// col[target] -= q * col[source]
    fn col_sub(&mut self, target: usize, source: usize, q: &BigInt) {
        for i in 0..self.rows {
            let x = q * self.get(i, source);
            let cell = &mut self.data[i * self.cols + target];
            *cell -= x;
        }
    }

    /// row[target] += row[source]
    fn row_add(&mut self, target: usize, source: usize) {
        for j in 0..self.cols {
            let x = self.get(source, j).clone();
            self.add_assign_at(target, j, &x);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = -self.get(i, j).clone();
            self.set(i, j, x);
        }
    }

    /// Bareiss fraction-free determinant; panics unless square.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }
}

/// u * m * v = d with u, v unimodular and d diagonal, d_1 | d_2 | ... >= 0.
#[derive(Debug, Clone)]
pub struct SmithNormalForm {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithNormalForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let r = self.d.rows().min(self.d.cols());
        (0..r).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Nonzero invariant factors d_1 | d_2 | ... | d_rank.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }
}

/// Elementary row/column reduction with pivots chosen to minimize absolute
/// value; per pivot, a divisibility sweep folds offending entries into the
/// pivot row so the diagonal forms a divisor chain.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithNormalForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    for k in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if a.get(i, j).is_zero() {
                        continue;
                    }
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => a.get(i, j).abs() < a.get(bi, bj).abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(k, pi);
            u.swap_rows(k, pi);
            a.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut dirty = false;
            for i in k + 1..rows {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let q = a.get(i, k) / a.get(k, k);
                if !q.is_zero() {
                    a.row_sub(i, k, &q);
                    u.row_sub(i, k, &q);
                }
                dirty |= !a.get(i, k).is_zero();
            }
            for j in k + 1..cols {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let q = a.get(k, j) / a.get(k, k);
                if !q.is_zero() {
                    a.col_sub(j, k, &q);
                    v.col_sub(j, k, &q);
                }
                dirty |= !a.get(k, j).is_zero();
            }
            if dirty {
                continue;
            }

            let p = a.get(k, k).clone();
            let mut offender = None;
            'scan: for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(a.get(i, j) % &p).is_zero() {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    a.row_add(k, i);
                    u.row_add(k, i);
                }
                None => break,
            }
        }
        if a.get(k, k).is_negative() {
            a.negate_row(k);
            u.negate_row(k);
        }
    }
    SmithNormalForm { u, d: a, v }
}

/// Finitely generated abelian group: free rank plus cyclic torsion factors
/// in a divisor chain (each > 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        f.write_str(&parts.join(" (+) "))
    }
}

/// The K-theory matrix: rows indexed by all vertices in basis order, one
/// column per regular vertex v holding (sum of ranges of v's edges) - v.
/// Returns the matrix together with the column order.
pub fn k_map(g: &Graph) -> (IntegerMatrix, Vec<VertexId>) {
    let regular = g.regular_vertices();
    let mut m = IntegerMatrix::zeros(g.vertex_count(), regular.len());
    for (c, v) in regular.iter().enumerate() {
        let vi = g.index_of(v).expect("regular vertex is in graph");
        for e in g.out_classes(v) {
            let Mult::Finite(mult) = e.mult else {
                unreachable!("regular vertex emits finitely many edges")
            };
            let wi = g.index_of(&e.dst).expect("edge target is in graph");
            m.add_assign_at(wi, c, &BigInt::from(mult));
        }
        let minus_one = -BigInt::one();
        m.add_assign_at(vi, c, &minus_one);
    }
    (m, regular)
}

/// (K0, K1) of the graph algebra: cokernel and kernel of the K-theory matrix.
pub fn k_groups(g: &Graph) -> (AbelianGroup, AbelianGroup) {
    let (m, regular) = k_map(g);
    let snf = smith_normal_form(&m);
    let rank = snf.rank();
    let torsion: Vec<BigInt> =
        snf.invariant_factors().into_iter().filter(|d| d > &BigInt::one()).collect();
    let k0 = AbelianGroup { free_rank: g.vertex_count() - rank, torsion };
    let k1 = AbelianGroup::free(regular.len() - rank);
    (k0, k1)
}

/// K0 class in the cokernel basis fixed by the Smith normal form: free
/// coordinates are the rows past the rank, torsion coordinates the rows with
/// invariant factor > 1, reduced into [0, d).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct K0Class {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
    pub moduli: Vec<BigInt>,
}

impl K0Class {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for K0Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free: Vec<String> = self.free.iter().map(BigInt::to_string).collect();
        write!(f, "({})", free.join(","))?;
        if !self.torsion.is_empty() {
            let tor: Vec<String> = self
                .torsion
                .iter()
                .zip(&self.moduli)
                .map(|(t, d)| format!("{t} mod {d}"))
                .collect();
            write!(f, " + ({})", tor.join(","))?;
        }
        Ok(())
    }
}

/// Class of the sum of vertex projections over `vertices` (repetition adds).
pub fn class_in_k0(g: &Graph, vertices: &[VertexId]) -> Result<K0Class, KTheoryError> {
    let mut x = vec![BigInt::zero(); g.vertex_count()];
    for v in vertices {
        let i = g
            .index_of(v)
            .ok_or_else(|| KTheoryError::UnknownVertex(v.as_str().to_string()))?;
        x[i] += 1;
    }
    let (m, _) = k_map(g);
    let snf = smith_normal_form(&m);
    Ok(cokernel_class(&snf, &x))
}

/// Coordinates of x in the cokernel of the matrix behind `snf`.
pub fn cokernel_class(snf: &SmithNormalForm, x: &[BigInt]) -> K0Class {
    let y = snf.u.mul_vec(x);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let mut free = Vec::new();
    let mut torsion = Vec::new();
    let mut moduli = Vec::new();
    for (i, yi) in y.into_iter().enumerate() {
        if i < rank {
            let d = &diag[i];
            if d > &BigInt::one() {
                torsion.push(yi.mod_floor(d));
                moduli.push(d.clone());
            }
        } else {
            free.push(yi);
        }
    }
    K0Class { free, torsion, moduli }
}
