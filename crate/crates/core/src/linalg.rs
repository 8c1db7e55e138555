//! Exact sparse linear algebra over the rationals: rank, kernel bases and
//! linear-system solving.
//!
//! Elimination works entirely in rational arithmetic with monic pivot rows
//! and Markowitz-style pivoting (sparsest column first, then smallest pivot
//! magnitude, then lowest indices). Keeping pivot rows monic bounds entries
//! by the size of the actual reduced system instead of accumulating pivot
//! products, which on the cocycle systems this crate produces is the
//! difference between megabit integers and a few machine words. No floating
//! point anywhere; every result is exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::Rational;

/// Sparse vector with no stored zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVec {
    len: usize,
    entries: BTreeMap<usize, Rational>,
}

impl SparseVec {
    pub fn new(len: usize) -> Self {
        SparseVec {
            len,
            entries: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, index: usize, value: Rational) {
        assert!(
            index < self.len,
            "index {index} out of bounds (len {})",
            self.len
        );
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_to(&mut self, index: usize, value: &Rational) {
        assert!(
            index < self.len,
            "index {index} out of bounds (len {})",
            self.len
        );
        let current = self.entries.remove(&index).unwrap_or_else(Rational::zero) + value;
        if !current.is_zero() {
            self.entries.insert(index, current);
        }
    }

    pub fn get(&self, index: usize) -> Rational {
        self.entries
            .get(&index)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(&i, v)| (i, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero_vec(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_entries(len: usize, entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut v = SparseVec::new(len);
        for (i, value) in entries {
            v.add_to(i, &value);
        }
        v
    }
}

/// Sparse rational matrix with no stored zero entries.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rational) {
        assert!(
            row < self.rows && col < self.cols,
            "entry ({row},{col}) out of bounds"
        );
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &Rational) {
        assert!(
            row < self.rows && col < self.cols,
            "entry ({row},{col}) out of bounds"
        );
        let current = self
            .entries
            .remove(&(row, col))
            .unwrap_or_else(Rational::zero)
            + value;
        if !current.is_zero() {
            self.entries.insert((row, col), current);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::new(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, value) in row.iter().enumerate() {
                if !value.is_zero() {
                    m.set(i, j, value.clone());
                }
            }
        }
        m
    }

    /// Rows as sparse (col, value) lists, in row order.
    pub fn row_vectors(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut out = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            out[r].push((c, v.clone()));
        }
        out
    }

    /// Matrix-vector product; `v.len()` must equal `cols`.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let mut out = SparseVec::new(self.rows);
        for (&(r, c), a) in &self.entries {
            let x = v.get(c);
            if !x.is_zero() {
                out.add_to(r, &(a * x));
            }
        }
        out
    }
}

/// Sparse rational row: strictly increasing column indices, no zeros.
type RatRow = Vec<(usize, Rational)>;

/// Sort, merge duplicates and drop zeros.
fn normalize_row(entries: &[(usize, Rational)]) -> RatRow {
    let mut sorted: Vec<(usize, Rational)> = entries
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .cloned()
        .collect();
    sorted.sort_by_key(|(c, _)| *c);
    sorted.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += std::mem::replace(&mut a.1, Rational::zero());
            true
        } else {
            false
        }
    });
    sorted.retain(|(_, v)| !v.is_zero());
    sorted
}

fn entry_at(row: &RatRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

/// `x - a * y` for sparse rows sorted by column; `y` is a monic pivot row.
fn eliminate_with(x: &RatRow, a: &Rational, y: &RatRow) -> RatRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => {
                out.push(x[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((y[j].0, -(a * &y[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let v = &x[i].1 - &(a * &y[j].1);
                if !v.is_zero() {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    for (c, v) in &y[j..] {
        out.push((*c, -(a * v)));
    }
    out
}

/// Divide a row by its value at `pivot_col`, making the pivot entry 1.
fn make_monic(row: &mut RatRow, pivot_col: usize) {
    let pv = entry_at(row, pivot_col).expect("pivot entry").clone();
    for (_, v) in row.iter_mut() {
        *v = &*v / &pv;
    }
}

/// Row-echelon accumulator over the rationals.
///
/// Batch construction (`from_rows`) runs a right-looking elimination with
/// the pivot heuristic "sparsest column, then smallest pivot magnitude,
/// then lowest indices"; pivot rows are kept monic, which keeps entries at
/// the size of the actual reduced system instead of accumulating pivot
/// products. Additional rows can then be inserted one at a time; the rank is
/// the number of retained pivot rows. Inserting the rows of `[M; E]` after
/// those of `M` continues the same elimination, which is how projected
/// dimensions are computed without materializing kernel bases.
///
/// Invariant: pivot rows are stored in pivot order and row i contains no
/// pivot column of an earlier row, so one ascending pass reduces any vector
/// against the echelon.
#[derive(Default)]
pub struct Echelon {
    rows: Vec<RatRow>,
    pivot_cols: Vec<usize>,
    pivot_of_col: BTreeMap<usize, usize>,
}

/// Active-column bookkeeping for the batch elimination: which active rows
/// touch each column, ordered so the sparsest column is cheap to find.
#[derive(Default)]
struct ColIndex {
    col_rows: std::collections::HashMap<usize, std::collections::BTreeSet<usize>>,
    by_count: std::collections::BTreeSet<(usize, usize)>,
}

impl ColIndex {
    fn add(&mut self, col: usize, row: usize) {
        let set = self.col_rows.entry(col).or_default();
        if !set.is_empty() {
            self.by_count.remove(&(set.len(), col));
        }
        set.insert(row);
        self.by_count.insert((set.len(), col));
    }

    fn remove(&mut self, col: usize, row: usize) {
        let Some(set) = self.col_rows.get_mut(&col) else {
            return;
        };
        if !set.remove(&row) {
            return;
        }
        self.by_count.remove(&(set.len() + 1, col));
        if set.is_empty() {
            self.col_rows.remove(&col);
        } else {
            self.by_count.insert((set.len(), col));
        }
    }

    fn sparsest_col(&self) -> Option<usize> {
        self.by_count.first().map(|&(_, col)| col)
    }
}

fn magnitude_bits(v: &Rational) -> u64 {
    v.numer().bits() + v.denom().bits()
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Batch elimination with Markowitz-style pivoting over all rows at
    /// once. Equivalent to repeated insertion but with far less fill-in.
    pub fn from_rows(rows: &[Vec<(usize, Rational)>]) -> Self {
        let mut work: Vec<RatRow> = rows.iter().map(|r| normalize_row(r)).collect();
        let mut cols = ColIndex::default();
        for (r, row) in work.iter().enumerate() {
            for (c, _) in row {
                cols.add(*c, r);
            }
        }
        let mut out = Echelon::new();
        while let Some(pivot_col) = cols.sparsest_col() {
            // Within the sparsest column prefer the shortest row, then the
            // smallest pivot magnitude, then the lowest row index.
            let candidates = cols.col_rows[&pivot_col].clone();
            let pr = candidates
                .iter()
                .copied()
                .min_by_key(|&r| {
                    let bits = magnitude_bits(entry_at(&work[r], pivot_col).expect("entry"));
                    (work[r].len(), bits, r)
                })
                .expect("column set is nonempty");
            let mut pivot_row = std::mem::take(&mut work[pr]);
            for (c, _) in &pivot_row {
                cols.remove(*c, pr);
            }
            make_monic(&mut pivot_row, pivot_col);
            let victims: Vec<usize> = cols
                .col_rows
                .get(&pivot_col)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default();
            for r in victims {
                let a = entry_at(&work[r], pivot_col).expect("victim entry").clone();
                let new_row = eliminate_with(&work[r], &a, &pivot_row);
                let old_row = std::mem::replace(&mut work[r], new_row);
                // Update column bookkeeping by diffing sorted column lists.
                let (mut i, mut j) = (0, 0);
                while i < old_row.len() || j < work[r].len() {
                    let oc = old_row.get(i).map(|e| e.0);
                    let nc = work[r].get(j).map(|e| e.0);
                    match (oc, nc) {
                        (Some(o), Some(n)) if o == n => {
                            i += 1;
                            j += 1;
                        }
                        (Some(o), Some(n)) if o < n => {
                            cols.remove(o, r);
                            i += 1;
                        }
                        (Some(_), Some(n)) => {
                            cols.add(n, r);
                            j += 1;
                        }
                        (Some(o), None) => {
                            cols.remove(o, r);
                            i += 1;
                        }
                        (None, Some(n)) => {
                            cols.add(n, r);
                            j += 1;
                        }
                        (None, None) => unreachable!(),
                    }
                }
            }
            out.pivot_of_col.insert(pivot_col, out.rows.len());
            out.pivot_cols.push(pivot_col);
            out.rows.push(pivot_row);
        }
        out
    }

    /// Reduce `row` against the echelon in one ascending pass (eliminations
    /// only introduce columns of later pivots). Returns the reduced row,
    /// empty when the input is in the row span.
    fn reduce(&self, mut row: RatRow) -> RatRow {
        let mut idx = 0;
        while idx < self.rows.len() {
            if row.is_empty() {
                return row;
            }
            let col = self.pivot_cols[idx];
            if let Some(a) = entry_at(&row, col).cloned() {
                row = eliminate_with(&row, &a, &self.rows[idx]);
            }
            idx += 1;
        }
        row
    }

    /// Insert a row given as sparse rational entries. Returns true when the
    /// row was independent (rank increased).
    pub fn insert(&mut self, entries: &[(usize, Rational)]) -> bool {
        let mut row = self.reduce(normalize_row(entries));
        if row.is_empty() {
            return false;
        }
        let lead = row[0].0;
        make_monic(&mut row, lead);
        self.pivot_of_col.insert(lead, self.rows.len());
        self.pivot_cols.push(lead);
        self.rows.push(row);
        true
    }

    /// Membership test: does `entries` lie in the row span? The echelon is
    /// not modified.
    pub fn contains(&self, entries: &[(usize, Rational)]) -> bool {
        self.reduce(normalize_row(entries)).is_empty()
    }

    /// The retained echelon rows, in pivot order; each row is monic at its
    /// pivot column.
    pub fn rows_rational(&self) -> Vec<Vec<(usize, Rational)>> {
        self.rows.clone()
    }

    /// Back-substitute the homogeneous system for one free column: pivots in
    /// reverse pivot order only ever reference later pivots and free
    /// columns.
    fn kernel_vector(&self, free_col: usize, len: usize) -> SparseVec {
        let mut x: BTreeMap<usize, Rational> = BTreeMap::new();
        x.insert(free_col, Rational::from_integer(BigInt::from(1)));
        for idx in (0..self.rows.len()).rev() {
            let p = self.pivot_cols[idx];
            let mut acc = Rational::zero();
            for (c, v) in &self.rows[idx] {
                if *c != p {
                    if let Some(xc) = x.get(c) {
                        acc += v * xc;
                    }
                }
            }
            if !acc.is_zero() {
                // Pivot rows are monic at their pivot column.
                x.insert(p, -acc);
            }
        }
        SparseVec::from_entries(len, x)
    }
}

/// Rank over the rationals. Deterministic; the zero and empty matrices have
/// rank 0.
pub fn rank(m: &SparseMatrix) -> usize {
    Echelon::from_rows(&m.row_vectors()).rank()
}

/// Basis of the right null space; `m * v = 0` exactly for every returned
/// vector, and the basis has size `cols - rank`.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVec> {
    let ech = Echelon::from_rows(&m.row_vectors());
    (0..m.cols())
        .filter(|c| !ech.pivot_of_col.contains_key(c))
        .map(|free| ech.kernel_vector(free, m.cols()))
        .collect()
}

/// Some exact solution of `m * x = b`, or `None` when the system is
/// inconsistent. Free variables are set to zero.
pub fn solve(m: &SparseMatrix, b: &SparseVec) -> Option<SparseVec> {
    assert_eq!(b.len(), m.rows(), "dimension mismatch");
    // Augment with -b and eliminate in the variables (x, 1). The augmented
    // column is excluded from pivoting by inserting rows incrementally, so a
    // pivot landing on it means some combination reads 0 = nonzero.
    let aug_col = m.cols();
    let mut ech = Echelon::new();
    let mut rows = m.row_vectors();
    for (r, row) in rows.iter_mut().enumerate() {
        let rhs = b.get(r);
        if !rhs.is_zero() {
            row.push((aug_col, -rhs));
        }
        ech.insert(row);
    }
    if ech.pivot_of_col.contains_key(&aug_col) {
        return None;
    }
    let mut x: BTreeMap<usize, Rational> = BTreeMap::new();
    x.insert(aug_col, Rational::from_integer(BigInt::from(1)));
    for idx in (0..ech.rows.len()).rev() {
        let p = ech.pivot_cols[idx];
        let mut acc = Rational::zero();
        for (c, v) in &ech.rows[idx] {
            if *c != p {
                if let Some(xc) = x.get(c) {
                    acc += v * xc;
                }
            }
        }
        if !acc.is_zero() {
            // Pivot rows are monic at their pivot column.
            x.insert(p, -acc);
        }
    }
    x.remove(&aug_col);
    Some(SparseVec::from_entries(m.cols(), x))
}
