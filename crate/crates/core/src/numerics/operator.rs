//! Finite-dimensional truncations and sparse operators on them.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("deformation parameter must satisfy 0 < q < 1, got {0}")]
    QOutOfRange(f64),
    #[error("truncation carries no winding direction but the representation needs one")]
    MissingWinding,
    #[error("truncation carries a winding direction but the representation has none")]
    UnexpectedWinding,
    #[error("interior margin {margin} too small, relation set needs at least {needs}")]
    MarginTooSmall { margin: usize, needs: usize },
    #[error("margin {margin} empties the truncation interior")]
    EmptyInterior { margin: usize },
    #[error("index {got} out of range, maximum {max}")]
    OutOfRange { got: usize, max: usize },
    #[error("relation set needs simple edge classes, {src}->{dst} has multiplicity {mult}")]
    UnsupportedMultiplicity { src: String, dst: String, mult: String },
    #[error("table has no operator named {0}")]
    UnknownGenerator(String),
    #[error("table was built without a deformation parameter")]
    MissingQ,
}

/// Box truncation of the basis `zeta(k_1..k_n)` (optionally `zeta(k_1..k_n, m)`):
/// each `k_i` ranges over `0..=cutoff`, `m` over `-winding..=winding`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub n: usize,
    pub cutoff: usize,
    pub winding: Option<i64>,
}

impl Truncation {
    pub fn new(n: usize, cutoff: usize) -> Self {
        assert!(n >= 1, "need at least one mode");
        assert!(cutoff >= 2, "cutoff below 2 leaves no interior");
        Truncation { n, cutoff, winding: None }
    }

    pub fn with_winding(n: usize, cutoff: usize, winding: i64) -> Self {
        assert!(winding >= 1, "winding bound below 1 leaves no interior");
        let mut t = Truncation::new(n, cutoff);
        t.winding = Some(winding);
        t
    }

    fn strata(&self) -> usize {
        match self.winding {
            Some(m) => 2 * m as usize + 1,
            None => 1,
        }
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.n as u32) * self.strata()
    }

    /// Lexicographic: k_1 most significant, then k_2, ..., k_n, then m (shifted by +winding).
    pub fn index(&self, k: &[usize], m: i64) -> usize {
        debug_assert_eq!(k.len(), self.n);
        let mut idx = 0usize;
        for &ki in k {
            debug_assert!(ki <= self.cutoff);
            idx = idx * (self.cutoff + 1) + ki;
        }
        let w = self.winding.unwrap_or(0);
        debug_assert!(m.abs() <= w);
        idx * self.strata() + (m + w) as usize
    }

    pub fn decode(&self, idx: usize) -> (Vec<usize>, i64) {
        debug_assert!(idx < self.dim());
        let w = self.winding.unwrap_or(0);
        let s = self.strata();
        let m = (idx % s) as i64 - w;
        let mut rest = idx / s;
        let mut k = vec![0usize; self.n];
        for i in (0..self.n).rev() {
            k[i] = rest % (self.cutoff + 1);
            rest /= self.cutoff + 1;
        }
        (k, m)
    }

    /// Basis indices whose coordinates sit at least `margin` away from the
    /// upper k-walls and both m-walls.  A word of length d in the generators
    /// acts on these columns exactly as on the untruncated space when
    /// margin >= d (lower k-walls need no margin: annihilation there is real).
    pub fn interior_indices(&self, margin: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for idx in 0..self.dim() {
            let (k, m) = self.decode(idx);
            if k.iter().all(|&ki| ki + margin <= self.cutoff)
                && self.winding.map_or(true, |w| m.abs() + (margin as i64) <= w)
            {
                out.push(idx);
            }
        }
        out
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse operator stored column-wise; each column sorted by row with exact
/// zeros dropped, so `==` is meaningful for operators with exact entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl Operator {
    pub fn zero(dim: usize) -> Self {
        Operator { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::diag(dim, |_| Complex64::new(1.0, 0.0))
    }

    pub fn diag(dim: usize, f: impl Fn(usize) -> Complex64) -> Self {
        Operator::build(dim, |j| {
            let c = f(j);
            if c == ZERO { Vec::new() } else { vec![(j, c)] }
        })
    }

    /// Column builder: `f(j)` lists the nonzero rows of column j.
    pub fn build(dim: usize, f: impl Fn(usize) -> Vec<(usize, Complex64)>) -> Self {
        let mut cols = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut col: Vec<(usize, Complex64)> = f(j)
                .into_iter()
                .filter(|&(i, c)| {
                    assert!(i < dim, "row {i} out of range in column {j}");
                    c != ZERO
                })
                .collect();
            col.sort_unstable_by_key(|&(i, _)| i);
            cols.push(col);
        }
        Operator { dim, cols }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> &[(usize, Complex64)] {
        &self.cols[j]
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        match self.cols[j].binary_search_by_key(&i, |&(r, _)| r) {
            Ok(p) => self.cols[j][p].1,
            Err(_) => ZERO,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|j| self.entry(j, j)).sum()
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        if c == ZERO {
            return Operator::zero(self.dim);
        }
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().map(|&(i, a)| (i, a * c)).filter(|&(_, a)| a != ZERO).collect())
            .collect();
        Operator { dim: self.dim, cols }
    }

    pub fn scale_re(&self, c: f64) -> Operator {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut cols = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let (a, b) = (&self.cols[j], &other.cols[j]);
            let mut col = Vec::with_capacity(a.len() + b.len());
            let (mut p, mut r) = (0, 0);
            while p < a.len() || r < b.len() {
                let next = match (a.get(p), b.get(r)) {
                    (Some(&(i, x)), Some(&(i2, y))) if i == i2 => {
                        p += 1;
                        r += 1;
                        (i, x + y)
                    }
                    (Some(&(i, x)), Some(&(i2, _))) if i < i2 => {
                        p += 1;
                        (i, x)
                    }
                    (Some(_), Some(&(i2, y))) => {
                        r += 1;
                        (i2, y)
                    }
                    (Some(&(i, x)), None) => {
                        p += 1;
                        (i, x)
                    }
                    (None, Some(&(i2, y))) => {
                        r += 1;
                        (i2, y)
                    }
                    (None, None) => unreachable!(),
                };
                if next.1 != ZERO {
                    col.push(next);
                }
            }
            cols.push(col);
        }
        Operator { dim: self.dim, cols }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        self.add(&other.scale_re(-1.0))
    }

    /// self * other (apply `other` first).
    pub fn mul(&self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut acc = vec![ZERO; self.dim];
        let mut seen = vec![false; self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut cols = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            for &(i, c) in &other.cols[j] {
                for &(r, a) in &self.cols[i] {
                    if !seen[r] {
                        seen[r] = true;
                        touched.push(r);
                    }
                    acc[r] += a * c;
                }
            }
            touched.sort_unstable();
            let mut col = Vec::with_capacity(touched.len());
            for &r in &touched {
                if acc[r] != ZERO {
                    col.push((r, acc[r]));
                }
                acc[r] = ZERO;
                seen[r] = false;
            }
            touched.clear();
            cols.push(col);
        }
        Operator { dim: self.dim, cols }
    }

    pub fn adjoint(&self) -> Operator {
        let mut cols: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for j in 0..self.dim {
            for &(i, c) in &self.cols[j] {
                cols[i].push((j, c.conj()));
            }
        }
        for col in &mut cols {
            col.sort_unstable_by_key(|&(i, _)| i);
        }
        Operator { dim: self.dim, cols }
    }

    /// max over the given columns of the 2-norm of that column.
    pub fn max_column_norm(&self, columns: &[usize]) -> f64 {
        columns
            .iter()
            // .abs() canonicalizes the -0.0 that an empty column's sum produces
            .map(|&j| self.cols[j].iter().map(|&(_, c)| c.norm_sqr()).sum::<f64>().sqrt().abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.cols
            .iter()
            .flat_map(|col| col.iter().map(|&(_, c)| c.norm()))
            .fold(0.0, f64::max)
    }
}
