//! Dense matrices and row spaces over one level of a field tower.
//!
//! The central design choice: a subspace of F^n is *always* stored as the
//! reduced row echelon form of any generating matrix.  RREF is unique per
//! row space, so equality is entry comparison, sorting is lexicographic
//! comparison, and no operation ever needs to answer "are these two bases
//! the same space?" the hard way.
//!
//! Distances use the standard subspace metric
//! `d(U, V) = dim U + dim V - 2 dim(U ∩ V)`, computed through row ranks.
//! Grassmannians are enumerated by RREF pivot pattern — never by filtering
//! all matrices — and refuse (rather than truncate) enumerations larger
//! than the caller's cap.

use serde::{Deserialize, Serialize};

use crate::galois::{FieldElement, FieldTower};
use crate::{Error, Result};

/// Dense row-major matrix over tower level `level`.  Entries are canonical
/// integer encodings; all arithmetic needs the tower that produced them.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matrix {
    level: usize,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zero(level: usize, rows: usize, cols: usize) -> Self {
        Matrix { level, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(level: usize, n: usize) -> Self {
        let mut m = Matrix::zero(level, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Build from explicit rows, validating every encoding against the tower.
    pub fn from_rows(tower: &FieldTower, level: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::BadDimension("ragged rows".to_string()));
            }
            for &enc in row {
                tower.element(level, enc)?;
                data.push(enc);
            }
        }
        Ok(Matrix { level, rows: rows.len(), cols, data })
    }

    /// Assemble a 2×2 block matrix; all blocks must agree in level and be
    /// compatibly sized.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert!(
            a.level == b.level && a.level == c.level && a.level == d.level,
            "blocks on different levels"
        );
        assert!(a.rows == b.rows && c.rows == d.rows && a.cols == c.cols && b.cols == d.cols);
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        let mut m = Matrix::zero(a.level, rows, cols);
        for (block, roff, coff) in
            [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)]
        {
            for i in 0..block.rows {
                for j in 0..block.cols {
                    m.data[(roff + i) * cols + coff + j] = block.data[i * block.cols + j];
                }
            }
        }
        m
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        FieldElement { level: self.level, enc: self.data[i * self.cols + j] }
    }

    pub fn get_raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub(crate) fn set_raw(&mut self, i: usize, j: usize, enc: u64) {
        self.data[i * self.cols + j] = enc;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries_raw(&self) -> Vec<u64> {
        self.data.clone()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(self.level, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "stacking with mismatched widths");
        assert_eq!(self.level, other.level);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { level: self.level, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "hstacking with mismatched heights");
        assert_eq!(self.level, other.level);
        let cols = self.cols + other.cols;
        let mut m = Matrix::zero(self.level, self.rows, cols);
        for i in 0..self.rows {
            m.data[i * cols..i * cols + self.cols]
                .copy_from_slice(&self.data[i * self.cols..(i + 1) * self.cols]);
            m.data[i * cols + self.cols..(i + 1) * cols]
                .copy_from_slice(&other.data[i * other.cols..(i + 1) * other.cols]);
        }
        m
    }

    /// The submatrix of columns `lo..hi`.
    pub fn columns(&self, lo: usize, hi: usize) -> Matrix {
        let mut m = Matrix::zero(self.level, self.rows, hi - lo);
        for i in 0..self.rows {
            for (jj, j) in (lo..hi).enumerate() {
                m.data[i * (hi - lo) + jj] = self.data[i * self.cols + j];
            }
        }
        m
    }

    pub fn add(&self, tower: &FieldTower, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        assert_eq!(self.level, other.level);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| tower.add_raw(self.level, a, b))
            .collect();
        Matrix { level: self.level, rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, tower: &FieldTower, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        assert_eq!(self.level, other.level);
        let mut m = Matrix::zero(self.level, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.data[l * other.cols + j];
                    if b == 0 {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    let t = tower.mul_raw(self.level, a, b);
                    m.data[idx] = tower.add_raw(self.level, m.data[idx], t);
                }
            }
        }
        m
    }

    pub fn scale_raw(&self, tower: &FieldTower, c: u64) -> Matrix {
        let data = self.data.iter().map(|&a| tower.mul_raw(self.level, a, c)).collect();
        Matrix { level: self.level, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, tower: &FieldTower) -> Matrix {
        let data = self.data.iter().map(|&a| tower.neg_raw(self.level, a)).collect();
        Matrix { level: self.level, rows: self.rows, cols: self.cols, data }
    }

    /// `self^exp` by repeated squaring; square matrices only.
    pub fn pow(&self, tower: &FieldTower, exp: u64) -> Matrix {
        assert_eq!(self.rows, self.cols, "powers of a non-square matrix");
        let mut acc = Matrix::identity(self.level, self.rows);
        let mut sq = self.clone();
        let mut exp = exp;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(tower, &sq);
            }
            sq = sq.mul(tower, &sq);
            exp >>= 1;
        }
        acc
    }

    /// Reduced row echelon form and rank.
    pub fn rref(&self, tower: &FieldTower) -> (Matrix, usize) {
        let mut m = self.clone();
        let level = self.level;
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(src) = (pivot_row..m.rows).find(|&r| m.data[r * m.cols + col] != 0) else {
                continue;
            };
            m.swap_rows(src, pivot_row);
            let inv = tower.inv_raw(level, m.data[pivot_row * m.cols + col]);
            for j in col..m.cols {
                let idx = pivot_row * m.cols + j;
                m.data[idx] = tower.mul_raw(level, m.data[idx], inv);
            }
            for r in 0..m.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = m.data[r * m.cols + col];
                if factor == 0 {
                    continue;
                }
                for j in col..m.cols {
                    let t = tower.mul_raw(level, factor, m.data[pivot_row * m.cols + j]);
                    let idx = r * m.cols + j;
                    m.data[idx] = tower.sub_raw(level, m.data[idx], t);
                }
            }
            pivot_row += 1;
        }
        (m, pivot_row)
    }

    pub fn rank(&self, tower: &FieldTower) -> usize {
        self.rref(tower).1
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Determinant by Gaussian elimination with swap-sign tracking.
    pub fn det(&self, tower: &FieldTower) -> FieldElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let level = self.level;
        let mut m = self.clone();
        let mut det = 1u64;
        let mut negate = false;
        for col in 0..n {
            let Some(src) = (col..n).find(|&r| m.data[r * n + col] != 0) else {
                return tower.zero(level);
            };
            if src != col {
                m.swap_rows(src, col);
                negate = !negate;
            }
            let pivot = m.data[col * n + col];
            det = tower.mul_raw(level, det, pivot);
            let inv = tower.inv_raw(level, pivot);
            for r in col + 1..n {
                let factor = tower.mul_raw(level, m.data[r * n + col], inv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let t = tower.mul_raw(level, factor, m.data[col * n + j]);
                    m.data[r * n + j] = tower.sub_raw(level, m.data[r * n + j], t);
                }
            }
        }
        if negate {
            det = tower.neg_raw(level, det);
        }
        FieldElement { level, enc: det }
    }

    /// Inverse via elimination on an augmented identity.
    pub fn inverse(&self, tower: &FieldTower) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zero(self.level, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.data[i * n + j];
            }
            aug.data[i * 2 * n + n + i] = 1;
        }
        let (red, _) = aug.rref(tower);
        for i in 0..n {
            for j in 0..n {
                let expected = u64::from(i == j);
                if red.data[i * 2 * n + j] != expected {
                    return Err(Error::Singular);
                }
            }
        }
        Ok(red.columns(n, 2 * n))
    }

    /// Basis of the right kernel `{x : self · xᵀ = 0}`, one row per basis
    /// vector.  The result has `cols - rank` rows.
    pub fn kernel(&self, tower: &FieldTower) -> Matrix {
        let (red, rank) = self.rref(tower);
        let mut pivots = Vec::with_capacity(rank);
        let mut col = 0;
        for r in 0..rank {
            while red.data[r * red.cols + col] == 0 {
                col += 1;
            }
            pivots.push(col);
        }
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut m = Matrix::zero(self.level, free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            m.data[i * self.cols + f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                m.data[i * self.cols + pc] = tower.neg_raw(self.level, red.data[r * red.cols + f]);
            }
        }
        m
    }
}

/// Multiplicative order of an invertible square matrix, found by stepping
/// powers until the identity returns; gives up past `cap` steps.
pub fn matrix_order(tower: &FieldTower, m: &Matrix, cap: u64) -> Result<u64> {
    assert_eq!(m.rows(), m.cols(), "order of a non-square matrix");
    let id = Matrix::identity(m.level(), m.rows());
    let mut acc = m.clone();
    let mut ord = 1u64;
    while acc != id {
        if ord >= cap {
            return Err(Error::CapExceeded { what: "matrix order".to_string(), needed: ord + 1, cap });
        }
        acc = acc.mul(tower, m);
        ord += 1;
    }
    Ok(ord)
}

/// Uniformly random invertible n×n matrix over `level`, by rejection.
pub fn random_invertible(
    tower: &FieldTower,
    level: usize,
    n: usize,
    rng: &mut impl rand::Rng,
) -> Matrix {
    let size = tower.size(level);
    loop {
        let mut m = Matrix::zero(level, n, n);
        for i in 0..n {
            for j in 0..n {
                m.set_raw(i, j, rng.gen_range(0..size));
            }
        }
        if m.rank(tower) == n {
            return m;
        }
    }
}

/// A subspace of F^n over a tower level, stored by its canonical (RREF,
/// zero-rows-trimmed) matrix.  The zero subspace is the 0×n case.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    level: usize,
    n: usize,
    dim: usize,
    mat: Matrix,
}

impl Subspace {
    /// Canonicalize the row space of an arbitrary generating matrix.
    pub fn from_matrix(tower: &FieldTower, m: &Matrix) -> Subspace {
        let (red, rank) = m.rref(tower);
        let mut mat = Matrix::zero(m.level(), rank, m.cols());
        for i in 0..rank {
            for j in 0..m.cols() {
                mat.set_raw(i, j, red.get_raw(i, j));
            }
        }
        Subspace { level: m.level(), n: m.cols(), dim: rank, mat }
    }

    pub fn zero(level: usize, n: usize) -> Subspace {
        Subspace { level, n, dim: 0, mat: Matrix::zero(level, 0, n) }
    }

    pub fn full(level: usize, n: usize) -> Subspace {
        Subspace { level, n, dim: n, mat: Matrix::identity(level, n) }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The canonical matrix, `dim` rows by `n` columns.
    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    /// Right action by an invertible n×n matrix: the row space of
    /// `basis · a`, re-canonicalized.
    pub fn act(&self, tower: &FieldTower, a: &Matrix) -> Subspace {
        assert_eq!(a.rows(), self.n, "acting matrix has wrong size");
        Subspace::from_matrix(tower, &self.mat.mul(tower, a))
    }

    pub fn sum(&self, tower: &FieldTower, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        Ok(Subspace::from_matrix(tower, &self.mat.stack(&other.mat)))
    }

    pub fn intersect(&self, tower: &FieldTower, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        if self.dim == 0 || other.dim == 0 {
            return Ok(Subspace::zero(self.level, self.n));
        }
        // Rows (x | z) of the left kernel of [U; V] satisfy x·U = -z·V,
        // and x ↦ x·U is a bijection from that kernel onto U ∩ V.
        let stacked = self.mat.stack(&other.mat);
        let left_kernel = stacked.transpose().kernel(tower);
        let x_part = left_kernel.columns(0, self.dim);
        let basis = x_part.mul(tower, &self.mat);
        let meet = Subspace::from_matrix(tower, &basis);
        debug_assert_eq!(
            meet.dim,
            self.dim + other.dim - stacked.rank(tower),
            "intersection dimension disagrees with the rank identity"
        );
        Ok(meet)
    }

    /// Subspace metric: `dim U + dim V - 2 dim(U ∩ V)`, computed through the
    /// rank of the stacked bases.
    pub fn distance(&self, tower: &FieldTower, other: &Subspace) -> Result<u64> {
        self.check_compatible(other)?;
        let sum_rank = if self.dim == 0 {
            other.dim
        } else if other.dim == 0 {
            self.dim
        } else {
            self.mat.stack(&other.mat).rank(tower)
        };
        Ok((2 * sum_rank - self.dim - other.dim) as u64)
    }

    pub fn contains(&self, tower: &FieldTower, other: &Subspace) -> bool {
        if other.dim > self.dim || other.n != self.n || other.level != self.level {
            return false;
        }
        if other.dim == 0 {
            return true;
        }
        self.mat.stack(&other.mat).rank(tower) == self.dim
    }

    /// Membership test for a single row vector.
    pub fn contains_row(&self, tower: &FieldTower, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.n);
        if row.iter().all(|&x| x == 0) {
            return true;
        }
        let mut m = Matrix::zero(self.level, 1, self.n);
        for (j, &x) in row.iter().enumerate() {
            m.set_raw(0, j, x);
        }
        self.mat.stack(&m).rank(tower) == self.dim
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(self.n, other.n));
        }
        if self.level != other.level {
            return Err(Error::WrongLevel { expected: self.level, got: other.level });
        }
        Ok(())
    }

    pub fn to_doc(&self) -> SubspaceDoc {
        SubspaceDoc { n: self.n, k: self.dim, rows: self.mat.to_rows() }
    }

    /// Rebuild from a document: rows must be a basis (full rank) and every
    /// entry a valid encoding; the stored form is re-canonicalized.
    pub fn from_doc(tower: &FieldTower, level: usize, doc: &SubspaceDoc) -> Result<Subspace> {
        for row in &doc.rows {
            if row.len() != doc.n {
                return Err(Error::BadDimension(format!(
                    "row of length {} in ambient {}",
                    row.len(),
                    doc.n
                )));
            }
        }
        if doc.rows.len() != doc.k {
            return Err(Error::BadDimension(format!(
                "{} rows for a dimension-{} subspace",
                doc.rows.len(),
                doc.k
            )));
        }
        let m = if doc.k == 0 {
            Matrix::zero(level, 0, doc.n)
        } else {
            Matrix::from_rows(tower, level, &doc.rows)?
        };
        let s = Subspace::from_matrix(tower, &m);
        if s.dim != doc.k {
            return Err(Error::BadInput(format!(
                "rows span dimension {}, header claims {}",
                s.dim, doc.k
            )));
        }
        Ok(s)
    }
}

/// Wire form of a subspace: ambient, dimension, and basis rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceDoc {
    pub n: usize,
    pub k: usize,
    pub rows: Vec<Vec<u64>>,
}

/// A constant-dimension subspace code: a sorted, deduplicated set of
/// same-dimension subspaces of one ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceCode {
    level: usize,
    n: usize,
    dim: usize,
    members: Vec<Subspace>,
}

impl SubspaceCode {
    pub fn from_members(members: Vec<Subspace>) -> Result<SubspaceCode> {
        let Some(first) = members.first() else {
            return Err(Error::BadInput("empty subspace code".to_string()));
        };
        let (level, n, dim) = (first.level, first.n, first.dim);
        for m in &members {
            if m.n != n {
                return Err(Error::AmbientMismatch(n, m.n));
            }
            if m.level != level {
                return Err(Error::WrongLevel { expected: level, got: m.level });
            }
            if m.dim != dim {
                return Err(Error::BadDimension(format!(
                    "mixed dimensions {dim} and {} in a constant-dimension code",
                    m.dim
                )));
            }
        }
        let mut members = members;
        members.sort();
        members.dedup();
        Ok(SubspaceCode { level, n, dim, members })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    pub fn contains(&self, s: &Subspace) -> bool {
        self.members.binary_search(s).is_ok()
    }

    /// Minimum pairwise distance; 0 for a singleton code.
    pub fn min_distance(&self, tower: &FieldTower) -> u64 {
        let mut best = None;
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let d = self.members[i]
                    .distance(tower, &self.members[j])
                    .expect("uniform code members");
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
        best.unwrap_or(0)
    }

    /// Whether the members partition the nonzero vectors: pairwise trivial
    /// intersections and exactly (s^n - 1)/(s^dim - 1) members.
    pub fn is_spread(&self, tower: &FieldTower) -> bool {
        if self.dim == 0 || self.n % self.dim != 0 {
            return false;
        }
        let s = tower.size(self.level) as u128;
        let total = s.pow(self.n as u32) - 1;
        let per = s.pow(self.dim as u32) - 1;
        if total % per != 0 || self.members.len() as u128 != total / per {
            return false;
        }
        for i in 0..self.members.len() {
            for j in i + 1..self.members.len() {
                let d = self.members[i]
                    .distance(tower, &self.members[j])
                    .expect("uniform code members");
                if d != 2 * self.dim as u64 {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_doc(&self, tower: &FieldTower) -> SubspaceCodeDoc {
        SubspaceCodeDoc {
            q: tower.size(self.level),
            n: self.n,
            k: self.dim,
            size: self.members.len(),
            subspaces: self.members.iter().map(Subspace::to_doc).collect(),
        }
    }

    pub fn from_doc(tower: &FieldTower, level: usize, doc: &SubspaceCodeDoc) -> Result<SubspaceCode> {
        if doc.q != tower.size(level) {
            return Err(Error::BadInput(format!(
                "field size {} does not match level {level} (size {})",
                doc.q,
                tower.size(level)
            )));
        }
        let members = doc
            .subspaces
            .iter()
            .map(|d| Subspace::from_doc(tower, level, d))
            .collect::<Result<Vec<_>>>()?;
        let code = SubspaceCode::from_members(members)?;
        if code.size() != doc.size || code.dim != doc.k || code.n != doc.n {
            return Err(Error::BadInput("code header disagrees with members".to_string()));
        }
        Ok(code)
    }
}

/// Wire form of a constant-dimension code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceCodeDoc {
    pub q: u64,
    pub n: usize,
    pub k: usize,
    pub size: usize,
    pub subspaces: Vec<SubspaceDoc>,
}

/// Largest distance any constant-dimension code in G_q(dim, n) can attain.
pub fn max_grassmannian_distance(dim: usize, n: usize) -> u64 {
    2 * dim.min(n - dim) as u64
}

/// The Gaussian binomial coefficient: the number of `k`-dimensional
/// subspaces of an `n`-dimensional space over a field of size `s`.
pub fn gaussian_binomial(s: u64, n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let overflow = || Error::CapExceeded {
        what: format!("Gaussian binomial [{n} choose {k}] over size {s}"),
        needed: u64::MAX,
        cap: u64::MAX,
    };
    // Pascal-style recurrence keeps everything exact in u128.
    let mut prev: Vec<u128> = vec![1];
    for row in 1..=n {
        let mut cur = vec![0u128; row + 1];
        cur[0] = 1;
        cur[row] = 1;
        for j in 1..row {
            let sj = (s as u128).checked_pow(j as u32).ok_or_else(overflow)?;
            cur[j] = prev[j - 1]
                .checked_add(sj.checked_mul(prev[j]).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        prev = cur;
    }
    Ok(prev[k])
}

/// All `dim`-dimensional subspaces of F^n over `level`, canonically sorted.
/// The expected count is computed first; anything above `cap` is refused.
pub fn grassmannian(
    tower: &FieldTower,
    level: usize,
    dim: usize,
    n: usize,
    cap: u64,
) -> Result<Vec<Subspace>> {
    if dim > n {
        return Err(Error::BadDimension(format!("dimension {dim} in ambient {n}")));
    }
    let count = gaussian_binomial(tower.size(level), n, dim)?;
    if count > cap as u128 {
        return Err(Error::CapExceeded {
            what: format!("Grassmannian({dim}, {n}) enumeration"),
            needed: count.min(u64::MAX as u128) as u64,
            cap,
        });
    }
    if dim == 0 {
        return Ok(vec![Subspace::zero(level, n)]);
    }
    let s = tower.size(level);
    let mut out = Vec::with_capacity(count as usize);

    // One RREF pivot-column pattern at a time; the free entries then run
    // through an odometer.  Everything produced is already canonical.
    let mut pivots: Vec<usize> = (0..dim).collect();
    loop {
        let free: Vec<(usize, usize)> = (0..dim)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let mut values = vec![0u64; free.len()];
        loop {
            let mut m = Matrix::zero(level, dim, n);
            for r in 0..dim {
                m.set_raw(r, pivots[r], 1);
            }
            for (&(r, c), &v) in free.iter().zip(&values) {
                m.set_raw(r, c, v);
            }
            out.push(Subspace { level, n, dim, mat: m });

            // Advance the odometer.
            let mut pos = 0;
            loop {
                if pos == values.len() {
                    break;
                }
                values[pos] += 1;
                if values[pos] < s {
                    break;
                }
                values[pos] = 0;
                pos += 1;
            }
            if pos == values.len() {
                break;
            }
        }

        // Next pivot combination in lexicographic order.
        let mut i = dim;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if pivots[i] < n - (dim - i) {
                pivots[i] += 1;
                for j in i + 1..dim {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                pivots.clear();
                break;
            }
        }
        if pivots.is_empty() {
            break;
        }
    }
    debug_assert_eq!(out.len() as u128, count);
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn gf2_tower() -> FieldTower {
        FieldTower::new(2, 1, 2).unwrap()
    }

    fn gf3_tower() -> FieldTower {
        FieldTower::new(3, 1, 2).unwrap()
    }

    const G: usize = FieldTower::GROUND;

    fn sub(tower: &FieldTower, rows: &[Vec<u64>], n: usize) -> Subspace {
        let m = if rows.is_empty() {
            Matrix::zero(G, 0, n)
        } else {
            Matrix::from_rows(tower, G, rows).unwrap()
        };
        Subspace::from_matrix(tower, &m)
    }

    #[test]
    fn rref_canonicalizes_known_examples() {
        let t = gf2_tower();
        let m = Matrix::from_rows(&t, G, &[
            vec![1, 1, 0, 0],
            vec![0, 0, 1, 1],
            vec![1, 1, 1, 1],
        ])
        .unwrap();
        let (red, rank) = m.rref(&t);
        assert_eq!(rank, 2);
        assert_eq!(red.to_rows(), vec![
            vec![1, 1, 0, 0],
            vec![0, 0, 1, 1],
            vec![0, 0, 0, 0],
        ]);

        // Pivot normalization over GF(3): 2·(2,1) = (1,2).
        let t3 = gf3_tower();
        let m = Matrix::from_rows(&t3, G, &[vec![2, 1]]).unwrap();
        let (red, rank) = m.rref(&t3);
        assert_eq!((red.to_rows(), rank), (vec![vec![1, 2]], 1));
    }

    #[test]
    fn subspace_canonical_form_is_basis_independent() {
        let t = gf2_tower();
        let a = sub(&t, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]], 4);
        let b = sub(&t, &[vec![1, 1, 1, 1], vec![0, 1, 0, 1]], 4);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);

        let with_dup = sub(&t, &[vec![1, 0, 1, 0], vec![1, 0, 1, 0]], 4);
        assert_eq!(with_dup.dim(), 1);
    }

    #[test]
    fn matrix_algebra_basics() {
        let t = gf2_tower();
        let id = Matrix::identity(G, 3);
        let m = Matrix::from_rows(&t, G, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(m.mul(&t, &id), m);
        assert_eq!(id.mul(&t, &m), m);
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.add(&t, &m), Matrix::zero(G, 3, 3));

        // det([[1,1,0],[0,1,1],[1,0,1]]) over GF(2): the rows sum to zero.
        assert_eq!(m.det(&t).enc, 0);
        assert_eq!(m.inverse(&t).unwrap_err(), Error::Singular);

        let inv = Matrix::from_rows(&t, G, &[vec![1, 1], vec![0, 1]]).unwrap();
        let found = inv.inverse(&t).unwrap();
        assert_eq!(inv.mul(&t, &found), Matrix::identity(G, 2));
        assert_eq!(found.mul(&t, &inv), Matrix::identity(G, 2));
    }

    #[test]
    fn determinant_is_multiplicative_over_gf3() {
        let t = gf3_tower();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_invertible(&t, G, 3, &mut rng);
            let b = random_invertible(&t, G, 3, &mut rng);
            let lhs = a.mul(&t, &b).det(&t);
            let rhs = t.mul(a.det(&t), b.det(&t));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn companion_cube_is_identity() {
        let t = gf2_tower();
        let p = t.middle_companion();
        assert_eq!(p.pow(&t, 3), Matrix::identity(G, 2));
        assert_eq!(p.pow(&t, 0), Matrix::identity(G, 2));
    }

    #[test]
    fn block_assembly() {
        let t = gf2_tower();
        let i = Matrix::identity(G, 2);
        let z = Matrix::zero(G, 2, 2);
        let p = t.middle_companion();
        let swap = Matrix::from_blocks(&z, &i, &i, &z);
        assert_eq!(swap.to_rows(), vec![
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
            vec![0, 1, 0, 0],
        ]);
        let shear = Matrix::from_blocks(&i, &p, &z, &i);
        assert_eq!(shear.row(0), &[1, 0, 0, 1]);
        assert_eq!(shear.row(1), &[0, 1, 1, 1]);

        let wide = i.hstack(&p);
        assert_eq!(wide.to_rows(), vec![vec![1, 0, 0, 1], vec![0, 1, 1, 1]]);
    }

    #[test]
    fn multiplicative_orders_of_matrices() {
        let t = gf2_tower();
        let p = t.middle_companion();
        assert_eq!(matrix_order(&t, &p, 100).unwrap(), 3);
        assert_eq!(matrix_order(&t, &Matrix::identity(G, 2), 100).unwrap(), 1);
        assert!(matrix_order(&t, &p, 2).unwrap_err().is_cap());
    }

    #[test]
    fn kernel_spans_exactly_the_annihilator()
    {
        let t = gf2_tower();
        let m = Matrix::from_rows(&t, G, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]]).unwrap();
        let k = m.kernel(&t);
        assert_eq!(k.rows(), 2);
        // Every kernel row annihilates m from the right.
        let prod = m.mul(&t, &k.transpose());
        assert_eq!(prod, Matrix::zero(G, 2, 2));

        // Zero-row matrix: kernel is everything.
        let empty = Matrix::zero(G, 0, 3);
        assert_eq!(empty.kernel(&t).rows(), 3);
    }

    #[test]
    fn intersection_and_sum_satisfy_the_dimension_identity() {
        let t = gf2_tower();
        let all = grassmannian(&t, G, 2, 4, 1_000).unwrap();
        assert_eq!(all.len(), 35);
        for u in &all {
            for v in &all {
                let meet = u.intersect(&t, v).unwrap();
                let join = u.sum(&t, v).unwrap();
                assert_eq!(meet.dim() + join.dim(), u.dim() + v.dim());
                assert!(u.contains(&t, &meet) && v.contains(&t, &meet));
                assert!(join.contains(&t, u) && join.contains(&t, v));
                // The metric agrees with its intersection form.
                let d = u.distance(&t, v).unwrap();
                assert_eq!(d as usize, u.dim() + v.dim() - 2 * meet.dim());
            }
        }
    }

    #[test]
    fn subspace_metric_axioms_exhaustive_on_the_middle_grassmannian() {
        let t = gf2_tower();
        let all = grassmannian(&t, G, 2, 4, 1_000).unwrap();
        for u in &all {
            for v in &all {
                let duv = u.distance(&t, v).unwrap();
                assert_eq!(duv, v.distance(&t, u).unwrap());
                assert_eq!(duv == 0, u == v);
                for w in &all {
                    let duw = u.distance(&t, w).unwrap();
                    let dwv = w.distance(&t, v).unwrap();
                    assert!(duv <= duw + dwv, "triangle inequality");
                }
            }
        }
    }

    #[test]
    fn distances_on_known_pairs() {
        let t = gf2_tower();
        let u = sub(&t, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4);
        let v = sub(&t, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]], 4);
        assert_eq!(u.distance(&t, &v).unwrap(), 4);
        assert_eq!(u.distance(&t, &u).unwrap(), 0);

        let w = sub(&t, &[vec![1, 0, 0, 0], vec![0, 0, 1, 0]], 4);
        assert_eq!(u.distance(&t, &w).unwrap(), 2);

        // Zero subspace is at distance dim from anything.
        let z = Subspace::zero(G, 4);
        assert_eq!(z.distance(&t, &u).unwrap(), 2);
        assert_eq!(z.distance(&t, &z).unwrap(), 0);

        // Nested pair of unequal dimensions.
        let line = sub(&t, &[vec![1, 0, 0, 0]], 4);
        assert_eq!(line.distance(&t, &u).unwrap(), 1);

        let bad = Subspace::zero(G, 3);
        assert_eq!(u.distance(&t, &bad).unwrap_err(), Error::AmbientMismatch(4, 3));
    }

    #[test]
    fn grassmannian_counts_match_gaussian_binomials() {
        let t = gf2_tower();
        let sizes: Vec<usize> =
            (0..=4).map(|k| grassmannian(&t, G, k, 4, 10_000).unwrap().len()).collect();
        assert_eq!(sizes, vec![1, 15, 35, 15, 1]);
        assert_eq!(gaussian_binomial(2, 4, 2).unwrap(), 35);
        assert_eq!(gaussian_binomial(4, 2, 1).unwrap(), 5);
        assert_eq!(gaussian_binomial(9, 2, 1).unwrap(), 10);
        assert_eq!(gaussian_binomial(3, 4, 2).unwrap(), 130);
        assert_eq!(gaussian_binomial(2, 6, 3).unwrap(), 1395);

        // Lines of the projective line over GF(4) — the middle level.
        let lines = grassmannian(&t, FieldTower::MIDDLE, 1, 2, 100).unwrap();
        assert_eq!(lines.len(), 5);

        // Sorted and duplicate-free.
        let mut sorted = lines.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, lines);
    }

    #[test]
    fn grassmannian_refuses_to_exceed_the_cap() {
        let t = gf2_tower();
        let err = grassmannian(&t, G, 2, 4, 10).unwrap_err();
        match err {
            Error::CapExceeded { needed, cap, .. } => {
                assert_eq!((needed, cap), (35, 10));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn code_construction_validates_uniformity() {
        let t = gf2_tower();
        let u = sub(&t, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4);
        let v = sub(&t, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]], 4);
        let c = SubspaceCode::from_members(vec![u.clone(), v.clone(), u.clone()]).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.min_distance(&t), 4);
        assert!(c.contains(&u));

        let line = sub(&t, &[vec![1, 0, 0, 0]], 4);
        assert!(SubspaceCode::from_members(vec![u.clone(), line]).is_err());
        assert!(SubspaceCode::from_members(vec![]).is_err());

        let singleton = SubspaceCode::from_members(vec![u]).unwrap();
        assert_eq!(singleton.min_distance(&t), 0);
    }

    #[test]
    fn spread_recognition() {
        let t = gf2_tower();
        // The three obvious 2-spaces of F_2^4 with pairwise zero meets plus
        // wrong count: not a spread.
        let u = sub(&t, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4);
        let v = sub(&t, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]], 4);
        let w = sub(&t, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]], 4);
        let c = SubspaceCode::from_members(vec![u, v, w]).unwrap();
        assert!(!c.is_spread(&t));

        // All 5 lines of F_4^2 form the trivial line spread.
        let lines = grassmannian(&t, FieldTower::MIDDLE, 1, 2, 100).unwrap();
        let c = SubspaceCode::from_members(lines).unwrap();
        assert!(c.is_spread(&t));

        // Dimension not dividing the ambient: never a spread.
        let t3 = gf3_tower();
        let threes = grassmannian(&t3, G, 3, 4, 100).unwrap();
        let c = SubspaceCode::from_members(threes).unwrap();
        assert!(!c.is_spread(&t3));
    }

    #[test]
    fn max_distance_formula() {
        assert_eq!(max_grassmannian_distance(2, 4), 4);
        assert_eq!(max_grassmannian_distance(1, 4), 2);
        assert_eq!(max_grassmannian_distance(3, 4), 2);
        assert_eq!(max_grassmannian_distance(3, 6), 6);
    }

    #[test]
    fn act_by_invertible_matrices_preserves_structure() {
        let t = gf2_tower();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let u = sub(&t, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]], 4);
        let v = sub(&t, &[vec![1, 1, 0, 0], vec![0, 0, 1, 1]], 4);
        for _ in 0..50 {
            let a = random_invertible(&t, G, 4, &mut rng);
            let (ua, va) = (u.act(&t, &a), v.act(&t, &a));
            assert_eq!(ua.dim(), u.dim());
            assert_eq!(
                u.distance(&t, &v).unwrap(),
                ua.distance(&t, &va).unwrap(),
                "isometric action"
            );
        }
        let id = Matrix::identity(G, 4);
        assert_eq!(u.act(&t, &id), u);
    }

    #[test]
    fn subspace_doc_round_trip_and_validation() {
        let t = gf2_tower();
        let u = sub(&t, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]], 4);
        let doc = u.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(json, r#"{"n":4,"k":2,"rows":[[1,0,1,0],[0,1,0,1]]}"#);
        let back = Subspace::from_doc(&t, G, &serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, u);

        // Rank-deficient "basis" is rejected.
        let bad = SubspaceDoc { n: 4, k: 2, rows: vec![vec![1, 0, 1, 0], vec![1, 0, 1, 0]] };
        assert!(Subspace::from_doc(&t, G, &bad).is_err());
        // Out-of-range entries are rejected.
        let bad = SubspaceDoc { n: 4, k: 1, rows: vec![vec![2, 0, 0, 0]] };
        assert!(Subspace::from_doc(&t, G, &bad).is_err());
        // Zero subspace survives the trip.
        let z = Subspace::zero(G, 4);
        let back = Subspace::from_doc(&t, G, &z.to_doc()).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn code_doc_round_trip() {
        let t = gf2_tower();
        let lines = grassmannian(&t, FieldTower::MIDDLE, 1, 2, 100).unwrap();
        let c = SubspaceCode::from_members(lines).unwrap();
        let doc = c.to_doc(&t);
        assert_eq!(doc.q, 4);
        let json = serde_json::to_string(&doc).unwrap();
        let back =
            SubspaceCode::from_doc(&t, FieldTower::MIDDLE, &serde_json::from_str(&json).unwrap())
                .unwrap();
        assert_eq!(back, c);

        // Wrong field size in the header is rejected.
        let mut tampered = c.to_doc(&t);
        tampered.q = 3;
        assert!(SubspaceCode::from_doc(&t, FieldTower::MIDDLE, &tampered).is_err());
    }

    proptest! {
        /// The canonical form does not depend on the generating matrix:
        /// left-multiplying by any invertible matrix fixes the row space.
        #[test]
        fn canonical_form_is_invariant_under_row_operations(
            entries in proptest::collection::vec(0u64..3, 12),
            seed in 0u64..1_000,
        ) {
            let t = gf3_tower();
            let m = Matrix::from_rows(&t, G, &[
                entries[0..4].to_vec(),
                entries[4..8].to_vec(),
                entries[8..12].to_vec(),
            ]).unwrap();
            let s = Subspace::from_matrix(&t, &m);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let tmat = random_invertible(&t, G, 3, &mut rng);
            let s2 = Subspace::from_matrix(&t, &tmat.mul(&t, &m));
            prop_assert_eq!(s, s2);
        }

        /// Distance is symmetric and bounded by the dimension sum.
        #[test]
        fn distance_symmetry_on_random_pairs(
            a in proptest::collection::vec(0u64..2, 8),
            b in proptest::collection::vec(0u64..2, 8),
        ) {
            let t = gf2_tower();
            let u = sub(&t, &[a[0..4].to_vec(), a[4..8].to_vec()], 4);
            let v = sub(&t, &[b[0..4].to_vec(), b[4..8].to_vec()], 4);
            let d = u.distance(&t, &v).unwrap();
            prop_assert_eq!(d, v.distance(&t, &u).unwrap());
            prop_assert!(d <= (u.dim() + v.dim()) as u64);
        }
    }
}
