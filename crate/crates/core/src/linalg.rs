//! Exact linear algebra over [`Q`]: dense matrices, sparse vectors and an
//! incrementally maintained reduced row echelon basis.

use std::fmt;

use crate::rational::Q;

/// Sparse vector as sorted `(index, value)` pairs with no explicit zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    pub fn from_dense(v: &[Q]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    /// Builds from unsorted pairs, summing duplicates.
    pub fn from_pairs(mut pairs: Vec<(usize, Q)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Q)> = Vec::with_capacity(pairs.len());
        for (i, x) in pairs {
            match entries.last_mut() {
                Some((j, y)) if *j == i => *y += &x,
                _ => entries.push((i, x)),
            }
        }
        entries.retain(|(_, x)| !x.is_zero());
        SparseVec { entries }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Q::ONE)],
        }
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Q::ZERO,
        }
    }

    pub fn leading(&self) -> Option<&(usize, Q)> {
        self.entries.first()
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::ZERO; len];
        for (i, x) in &self.entries {
            out[*i] = x.clone();
        }
        out
    }

    pub fn scale(&self, c: &Q) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Q, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let v = x + &(c * y);
                        if !v.is_zero() {
                            out.push((*i, v));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn dot_dense(&self, dense: &[Q]) -> Q {
        let mut acc = Q::ZERO;
        for (i, x) in &self.entries {
            if !dense[*i].is_zero() {
                acc += &(x * &dense[*i]);
            }
        }
        acc
    }
}

/// Accumulates `Σ c_k v_k` densely and sparsifies once.
pub(crate) struct Accumulator {
    buf: Vec<Q>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Accumulator {
    pub(crate) fn new(len: usize) -> Self {
        Accumulator {
            buf: vec![Q::ZERO; len],
            touched: Vec::new(),
            mark: vec![false; len],
        }
    }

    pub(crate) fn add(&mut self, i: usize, x: &Q) {
        if x.is_zero() {
            return;
        }
        if !self.mark[i] {
            self.mark[i] = true;
            self.touched.push(i);
        }
        self.buf[i] += x;
    }

    pub(crate) fn add_scaled(&mut self, c: &Q, v: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (i, x) in v.entries() {
            self.add(*i, &(c * x));
        }
    }

    pub(crate) fn take(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut entries = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.mark[i] = false;
            let x = std::mem::take(&mut self.buf[i]);
            if !x.is_zero() {
                entries.push((i, x));
            }
        }
        self.touched.clear();
        SparseVec { entries }
    }
}

/// Dense row-major matrix over `Q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Q;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Q::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::ONE;
        }
        m
    }

    pub fn scalar(n: usize, c: &Q) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::int(x)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
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

    pub fn data(&self) -> &[Q] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, c: &Q, other: &Matrix) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += &(c * b);
            }
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    if !b.is_zero() {
                        *o += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(
            self.cols,
            v.len(),
            "shape mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|r| {
                let mut acc = Q::ZERO;
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| &self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &Matrix) -> Q {
        assert_eq!((self.rows, self.cols), (other.cols, other.rows));
        let mut acc = Q::ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                let b = &other[(k, i)];
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in 0..self.rows {
            e.insert(SparseVec::from_dense(self.row(r)));
        }
        e.rank()
    }

    /// Basis of the right null space `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let mut e = Echelon::new(self.cols);
        for r in 0..self.rows {
            e.insert(SparseVec::from_dense(self.row(r)));
        }
        e.null_space()
    }

    /// Solves `self * x = b`; returns a particular solution and the kernel
    /// dimension, or `None` if inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<(Vec<Q>, usize)> {
        assert_eq!(b.len(), self.rows);
        let rows: Vec<SparseVec> = (0..self.rows)
            .map(|r| SparseVec::from_dense(self.row(r)))
            .collect();
        let sol = solve_sparse(self.cols, &rows, b)?;
        Some((sol.particular, sol.kernel_dim))
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::ONE;
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    pub fn determinant(&self) -> Q {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::ZERO;
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            let inv = piv.recip();
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] * &inv;
                for j in c..n {
                    if m[(c, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&f * &m[(c, j)]);
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_dense(&self.data)
    }

    pub fn from_sparse(rows: usize, cols: usize, v: &SparseVec) -> Matrix {
        Matrix {
            rows,
            cols,
            data: v.to_dense(rows * cols),
        }
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Matrix { rows, cols, data }
    }
}

/// Result of an affine solve.
#[derive(Clone, Debug)]
pub struct AffineSolution {
    pub particular: Vec<Q>,
    pub kernel_dim: usize,
    pub rank: usize,
}

/// Solves the sparse system `rows · x = rhs` in `unknowns` variables.
pub fn solve_sparse(unknowns: usize, rows: &[SparseVec], rhs: &[Q]) -> Option<AffineSolution> {
    assert_eq!(rows.len(), rhs.len());
    // augmented column at index `unknowns`
    let mut e = Echelon::new(unknowns + 1);
    for (row, b) in rows.iter().zip(rhs) {
        let mut pairs: Vec<(usize, Q)> = row.entries().to_vec();
        if !b.is_zero() {
            pairs.push((unknowns, b.clone()));
        }
        e.insert(SparseVec { entries: pairs });
    }
    if e.pivots().contains(&unknowns) {
        return None;
    }
    let mut particular = vec![Q::ZERO; unknowns];
    for (row, &p) in e.rows().iter().zip(e.pivots()) {
        particular[p] = row.get(unknowns);
    }
    Some(AffineSolution {
        particular,
        kernel_dim: unknowns - e.rank(),
        rank: e.rank(),
    })
}

/// Outcome of inserting into an [`Echelon`].
#[derive(Clone, Debug)]
pub enum Insertion {
    /// The vector was independent and became row `index`.
    New(usize),
    /// The vector lay in the span; `coords` are its coefficients on the
    /// current rows and `payload_residual` is the payload minus the same
    /// combination of row payloads.
    InSpan {
        coords: Vec<(usize, Q)>,
        payload_residual: SparseVec,
    },
}

/// Reduced row echelon basis of a subspace of `Q^dim`, maintained under
/// insertion. Every row has a 1 at its pivot and zeros at all other pivots,
/// so coordinates of a vector in the span are read off its pivot entries.
///
/// Rows may carry a payload vector which undergoes the same row operations;
/// this tracks a linear map defined on the inserted vectors.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SparseVec>,
    payloads: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
            payloads: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![None; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn payloads(&self) -> &[SparseVec] {
        &self.payloads
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Coefficients of `v` on the rows (by row index) from its pivot entries.
    fn pivot_coords(&self, v: &SparseVec) -> Vec<(usize, Q)> {
        v.entries()
            .iter()
            .filter_map(|(i, x)| self.pivot_row[*i].map(|r| (r, x.clone())))
            .collect()
    }

    /// `v` minus its projection onto the span along non-pivot coordinates.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let coords = self.pivot_coords(v);
        if coords.is_empty() {
            return v.clone();
        }
        let mut acc = Accumulator::new(self.dim);
        acc.add_scaled(&Q::ONE, v);
        for (r, c) in &coords {
            acc.add_scaled(&-c, &self.rows[*r]);
        }
        acc.take()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coefficients of `v` on the rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        let mut out = vec![Q::ZERO; self.rows.len()];
        for (r, c) in self.pivot_coords(v) {
            out[r] = c;
        }
        Some(out)
    }

    pub fn insert(&mut self, v: SparseVec) -> bool {
        matches!(
            self.insert_with_payload(v, SparseVec::new()),
            Insertion::New(_)
        )
    }

    pub fn insert_with_payload(&mut self, v: SparseVec, payload: SparseVec) -> Insertion {
        let coords = self.pivot_coords(&v);
        let mut reduced = v;
        let mut pay = payload;
        if !coords.is_empty() {
            let mut acc = Accumulator::new(self.dim);
            acc.add_scaled(&Q::ONE, &reduced);
            for (r, c) in &coords {
                acc.add_scaled(&-c, &self.rows[*r]);
            }
            reduced = acc.take();
            for (r, c) in &coords {
                if !self.payloads[*r].is_zero() {
                    pay = pay.axpy(&-c, &self.payloads[*r]);
                }
            }
        }
        let Some((p, lead)) = reduced.leading().cloned() else {
            return Insertion::InSpan {
                coords,
                payload_residual: pay,
            };
        };
        // pivot at the first non-zero coordinate
        let inv = lead.recip();
        let row = reduced.scale(&inv);
        let pay = pay.scale(&inv);
        for k in 0..self.rows.len() {
            let f = self.rows[k].get(p);
            if !f.is_zero() {
                self.rows[k] = self.rows[k].axpy(&-&f, &row);
                if !pay.is_zero() || !self.payloads[k].is_zero() {
                    self.payloads[k] = self.payloads[k].axpy(&-&f, &pay);
                }
            }
        }
        let idx = self.rows.len();
        self.rows.push(row);
        self.payloads.push(pay);
        self.pivots.push(p);
        self.pivot_row[p] = Some(idx);
        Insertion::New(idx)
    }

    /// Basis of `{x : <row, x> = 0 for every row}`.
    pub fn null_space(&self) -> Vec<Vec<Q>> {
        let mut out = Vec::new();
        for free in 0..self.dim {
            if self.pivot_row[free].is_some() {
                continue;
            }
            let mut x = vec![Q::ZERO; self.dim];
            x[free] = Q::ONE;
            for (row, &p) in self.rows.iter().zip(&self.pivots) {
                let c = row.get(free);
                if !c.is_zero() {
                    x[p] = -c;
                }
            }
            out.push(x);
        }
        out
    }

    /// Dense copies of the rows.
    pub fn basis_dense(&self) -> Vec<Vec<Q>> {
        self.rows.iter().map(|r| r.to_dense(self.dim)).collect()
    }
}

/// Basis of the linear relations among `vectors`: coefficient vectors `c`
/// with `Σ c_i v_i = 0`.
pub fn linear_relations(dim: usize, vectors: &[SparseVec]) -> Vec<Vec<Q>> {
    let mut e = Echelon::new(dim);
    let mut out = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if let Insertion::InSpan {
            payload_residual, ..
        } = e.insert_with_payload(v.clone(), SparseVec::unit(i))
        {
            out.push(payload_residual.to_dense(vectors.len()));
        }
    }
    out
}

pub fn rank_of(dim: usize, vectors: &[Vec<Q>]) -> usize {
    let mut e = Echelon::new(dim);
    for v in vectors {
        e.insert(SparseVec::from_dense(v));
    }
    e.rank()
}

/// Basis of the intersection of the spans of `a` and `b` inside `Q^dim`.
pub fn intersect(dim: usize, a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let vectors: Vec<SparseVec> = a
        .iter()
        .chain(b.iter())
        .map(|v| SparseVec::from_dense(v))
        .collect();
    let rels = linear_relations(dim, &vectors);
    let mut e = Echelon::new(dim);
    for rel in rels {
        let mut acc = vec![Q::ZERO; dim];
        for (c, v) in rel.iter().zip(a) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(v) {
                if !y.is_zero() {
                    *x += &(c * y);
                }
            }
        }
        e.insert(SparseVec::from_dense(&acc));
    }
    e.basis_dense()
}
