//! Graded commutative Frobenius algebras concentrated in even degrees.
//!
//! An algebra with half dimension `n` lives in degrees `0, 2, …, 4n`; degree
//! `0` is spanned by the unit and degree `4n` by the fundamental class. The
//! product is stored as structure constants for every ordered pair of basis
//! vectors, so commutativity is a checked property rather than an assumption.

use rayon::prelude::*;
use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::linalg::{Accumulator, Matrix, SparseVec};
use crate::rational::Q;

/// A homogeneous element: cohomological degree plus coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub degree: usize,
    pub coords: Vec<Q>,
}

impl AlgebraElement {
    pub fn new(degree: usize, coords: Vec<Q>) -> Self {
        AlgebraElement { degree, coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Q::is_zero)
    }

    pub fn level(&self) -> usize {
        self.degree / 2
    }
}

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    half_dim: usize,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    /// `table[ka][kb][ia * dims[kb] + ib]` = product in level `ka + kb`.
    table: Vec<Vec<Vec<SparseVec>>>,
    bb_form: Matrix,
}

impl PartialEq for GradedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.half_dim == other.half_dim
            && self.dims == other.dims
            && self.labels == other.labels
            && self.table == other.table
            && self.bb_form == other.bb_form
    }
}

/// A basis vector addressed by cohomological degree and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BasisRef {
    pub degree: usize,
    pub index: usize,
}

fn bref(level: usize, index: usize) -> BasisRef {
    BasisRef {
        degree: 2 * level,
        index,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationFailure {
    DegreeDimension {
        degree: usize,
        dim: usize,
    },
    BbFormShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    BbFormNotSymmetric {
        row: usize,
        col: usize,
    },
    BbFormDegenerate,
    UnitNotIdentity {
        element: BasisRef,
        side: &'static str,
    },
    NonCommutative {
        a: BasisRef,
        b: BasisRef,
    },
    NonAssociative {
        a: BasisRef,
        b: BasisRef,
        c: BasisRef,
    },
    FrobeniusDegenerate {
        degree: usize,
        rank: usize,
        expected: usize,
    },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
    /// Failures beyond the listing cap that were counted but not stored.
    pub truncated: usize,
}

impl ValidationReport {
    const CAP: usize = 256;

    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, f: ValidationFailure) {
        if self.failures.len() < Self::CAP {
            self.failures.push(f);
        } else {
            self.truncated += 1;
        }
    }

    pub fn summary(&self) -> String {
        let shown: Vec<String> = self
            .failures
            .iter()
            .take(5)
            .map(|f| format!("{f:?}"))
            .collect();
        format!(
            "{} failure(s): {}",
            self.failures.len() + self.truncated,
            shown.join("; ")
        )
    }
}

/// Builder-facing constructor input: structure constants as a sparse map.
pub struct AlgebraParts {
    pub half_dim: usize,
    pub dims: Vec<usize>,
    pub labels: Vec<Vec<String>>,
    /// `((degree_a, index_a, degree_b, index_b), coords in degree_a + degree_b)`
    pub products: Vec<((usize, usize, usize, usize), SparseVec)>,
    pub bb_form: Matrix,
}

impl GradedAlgebra {
    /// Assembles an algebra from raw parts without validating the algebra
    /// identities. Shape errors are reported as malformed input.
    pub fn from_parts(parts: AlgebraParts) -> Result<Self> {
        let AlgebraParts {
            half_dim,
            dims,
            labels,
            products,
            bb_form,
        } = parts;
        if half_dim == 0 {
            return Err(Error::Malformed("half_dim must be positive".into()));
        }
        if dims.len() != 2 * half_dim + 1 {
            return Err(Error::Malformed(format!(
                "expected {} even degrees for half_dim {half_dim}, found {}",
                2 * half_dim + 1,
                dims.len()
            )));
        }
        if labels.len() != dims.len() || labels.iter().zip(&dims).any(|(l, &d)| l.len() != d) {
            return Err(Error::Malformed(
                "label lists do not match degree dimensions".into(),
            ));
        }
        let top = dims.len() - 1;
        let mut table: Vec<Vec<Vec<SparseVec>>> = (0..=top)
            .map(|ka| {
                (0..=top)
                    .map(|kb| {
                        if ka + kb <= top {
                            vec![SparseVec::new(); dims[ka] * dims[kb]]
                        } else {
                            Vec::new()
                        }
                    })
                    .collect()
            })
            .collect();
        for ((da, ia, db, ib), out) in products {
            if da % 2 != 0 || db % 2 != 0 {
                return Err(Error::Malformed(format!(
                    "odd degree in product ({da},{db})"
                )));
            }
            let (ka, kb) = (da / 2, db / 2);
            if ka > top || kb > top || ia >= dims[ka] || ib >= dims[kb] {
                return Err(Error::Malformed(format!(
                    "product index out of range: ({da},{ia})·({db},{ib})"
                )));
            }
            if ka + kb > top {
                if out.is_zero() {
                    continue;
                }
                return Err(Error::Malformed(format!(
                    "product ({da},{ia})·({db},{ib}) exceeds the top degree"
                )));
            }
            if out
                .entries()
                .last()
                .is_some_and(|(i, _)| *i >= dims[ka + kb])
            {
                return Err(Error::Malformed(format!(
                    "product ({da},{ia})·({db},{ib}) has an out-of-range output"
                )));
            }
            table[ka][kb][ia * dims[kb] + ib] = out;
        }
        if bb_form.rows() != dims[1.min(top)] || bb_form.cols() != dims[1.min(top)] {
            return Err(Error::Malformed(format!(
                "bb_form is {}x{} but degree 2 has dimension {}",
                bb_form.rows(),
                bb_form.cols(),
                dims[1.min(top)]
            )));
        }
        Ok(GradedAlgebra {
            half_dim,
            dims,
            labels,
            table,
            bb_form,
        })
    }

    /// Half the complex dimension: the algebra's top degree is `4n`.
    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    /// Complex dimension `2n`.
    pub fn complex_dim(&self) -> usize {
        2 * self.half_dim
    }

    pub fn top_degree(&self) -> usize {
        4 * self.half_dim
    }

    pub fn top_level(&self) -> usize {
        2 * self.half_dim
    }

    /// Dimensions per level (degree `2k` at position `k`).
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_of_degree(&self, degree: usize) -> usize {
        if !degree.is_multiple_of(2) {
            return 0;
        }
        self.dims.get(degree / 2).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn b2(&self) -> usize {
        self.dims[1]
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn bb_form(&self) -> &Matrix {
        &self.bb_form
    }

    /// `q(x, y)` on degree-2 coordinates.
    pub fn q(&self, x: &[Q], y: &[Q]) -> Q {
        let qy = self.bb_form.mul_vec(y);
        x.iter().zip(&qy).map(|(a, b)| a * b).sum()
    }

    pub fn unit(&self) -> AlgebraElement {
        AlgebraElement::new(0, vec![Q::ONE])
    }

    pub fn top_class(&self) -> AlgebraElement {
        AlgebraElement::new(self.top_degree(), vec![Q::ONE])
    }

    pub fn basis_element(&self, degree: usize, index: usize) -> AlgebraElement {
        let mut coords = vec![Q::ZERO; self.dim_of_degree(degree)];
        coords[index] = Q::ONE;
        AlgebraElement::new(degree, coords)
    }

    pub fn zero(&self, degree: usize) -> AlgebraElement {
        AlgebraElement::new(degree, vec![Q::ZERO; self.dim_of_degree(degree)])
    }

    /// Product of two basis vectors given by level and index.
    pub fn basis_product(&self, ka: usize, ia: usize, kb: usize, ib: usize) -> Option<&SparseVec> {
        if ka + kb > self.top_level() {
            return None;
        }
        Some(&self.table[ka][kb][ia * self.dims[kb] + ib])
    }

    /// Iterates over all stored non-zero products as
    /// `((degree_a, index_a, degree_b, index_b), output)` in lexicographic order.
    pub fn products(
        &self,
    ) -> impl Iterator<Item = ((usize, usize, usize, usize), &SparseVec)> + '_ {
        let top = self.top_level();
        (0..=top).flat_map(move |ka| {
            (0..self.dims[ka]).flat_map(move |ia| {
                (0..=top - ka).flat_map(move |kb| {
                    (0..self.dims[kb]).filter_map(move |ib| {
                        let v = &self.table[ka][kb][ia * self.dims[kb] + ib];
                        (!v.is_zero()).then_some(((2 * ka, ia, 2 * kb, ib), v))
                    })
                })
            })
        })
    }

    fn check_element(&self, a: &AlgebraElement) -> Result<()> {
        if !a.degree.is_multiple_of(2) || a.degree > self.top_degree() {
            return Err(Error::Malformed(format!(
                "degree {} is not an even degree of the algebra",
                a.degree
            )));
        }
        if a.coords.len() != self.dim_of_degree(a.degree) {
            return Err(Error::Malformed(format!(
                "element of degree {} has {} coordinates, expected {}",
                a.degree,
                a.coords.len(),
                self.dim_of_degree(a.degree)
            )));
        }
        Ok(())
    }

    /// Cup product. Degrees beyond `4n` give an empty zero element.
    pub fn cup(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        let degree = a.degree + b.degree;
        if degree > self.top_degree() {
            return Ok(AlgebraElement::new(degree, Vec::new()));
        }
        Ok(AlgebraElement::new(
            degree,
            self.mul_coords(a.level(), &a.coords, b.level(), &b.coords),
        ))
    }

    /// Product of coordinate vectors in levels `ka` and `kb`.
    pub fn mul_coords(&self, ka: usize, a: &[Q], kb: usize, b: &[Q]) -> Vec<Q> {
        let kc = ka + kb;
        let mut acc = Accumulator::new(self.dims[kc]);
        for (ia, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (ib, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                acc.add_scaled(&(x * y), &self.table[ka][kb][ia * self.dims[kb] + ib]);
            }
        }
        acc.take().to_dense(self.dims[kc])
    }

    /// Coefficient of the fundamental class (zero outside the top degree).
    pub fn integrate(&self, a: &AlgebraElement) -> Q {
        if a.degree == self.top_degree() && !a.coords.is_empty() {
            a.coords[0].clone()
        } else {
            Q::ZERO
        }
    }

    /// Signed Poincaré pairing `(−1)^q ∫ a·b` with `deg a = 2n + 2q`; zero
    /// unless the degrees are complementary.
    pub fn poincare_phi(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<Q> {
        if a.degree + b.degree != self.top_degree() {
            return Ok(Q::ZERO);
        }
        let v = self.integrate(&self.cup(a, b)?);
        Ok(if phi_sign_negative(a.degree, self.half_dim) {
            -v
        } else {
            v
        })
    }

    /// Matrix of `φ` between levels `k` (rows) and `top − k` (columns).
    pub fn phi_matrix(&self, k: usize) -> Matrix {
        let top = self.top_level();
        let (da, db) = (self.dims[k], self.dims[top - k]);
        let mut m = Matrix::zeros(da, db);
        let negative = phi_sign_negative(2 * k, self.half_dim);
        for i in 0..da {
            for j in 0..db {
                let v = self.table[k][top - k][i * db + j].get(0);
                m[(i, j)] = if negative { -v } else { v };
            }
        }
        m
    }

    /// The grading operator: scalar `deg − 2n` on each degree.
    pub fn theta(&self) -> GradedEndomorphism {
        let n = self.half_dim as i64;
        let scalars: Vec<Q> = (0..self.dims.len())
            .map(|k| Q::int(2 * (k as i64 - n)))
            .collect();
        GradedEndomorphism::diagonal(&self.dims, &scalars)
    }

    /// Multiplication by a homogeneous element.
    pub fn multiplication_operator(&self, a: &AlgebraElement) -> Result<GradedEndomorphism> {
        self.check_element(a)?;
        let ka = a.level();
        let mut op = GradedEndomorphism::zero(&self.dims, a.degree as i32);
        for k in 0..self.dims.len() {
            let Some(t) = op.target_level(k) else {
                continue;
            };
            let mut m = Matrix::zeros(self.dims[t], self.dims[k]);
            for i in 0..self.dims[k] {
                let mut e = vec![Q::ZERO; self.dims[k]];
                e[i] = Q::ONE;
                let col = self.mul_coords(ka, &a.coords, k, &e);
                for (r, x) in col.into_iter().enumerate() {
                    m[(r, i)] = x;
                }
            }
            if !m.is_zero() {
                op.set_block(k, m);
            }
        }
        Ok(op)
    }

    /// `L_x` for a degree-2 class `x`.
    pub fn lefschetz_operator(&self, x: &AlgebraElement) -> Result<GradedEndomorphism> {
        if x.degree != 2 {
            return Err(Error::WrongDegree {
                expected: 2,
                found: x.degree,
            });
        }
        self.multiplication_operator(x)
    }

    /// Whether `op` satisfies the Leibniz rule on every pair of basis vectors.
    /// Returns the first failing pair otherwise.
    pub fn derivation_failure(&self, op: &GradedEndomorphism) -> Option<(BasisRef, BasisRef)> {
        let top = self.top_level();
        for ka in 0..=top {
            for kb in ka..=top {
                if ka + kb > top {
                    continue;
                }
                let kc = ka + kb;
                let Some(tc) = op.target_level(kc) else {
                    continue;
                };
                for ia in 0..self.dims[ka] {
                    for ib in 0..self.dims[kb] {
                        let prod =
                            self.table[ka][kb][ia * self.dims[kb] + ib].to_dense(self.dims[kc]);
                        let lhs = op
                            .apply_level(kc, &prod)
                            .map(|x| x.1)
                            .unwrap_or_else(|| vec![Q::ZERO; self.dims[tc]]);
                        let mut rhs = vec![Q::ZERO; self.dims[tc]];
                        let ea = unit_vec(self.dims[ka], ia);
                        let eb = unit_vec(self.dims[kb], ib);
                        if let Some((t, da)) = op.apply_level(ka, &ea) {
                            if t + kb <= top {
                                add_into(&mut rhs, &self.mul_coords(t, &da, kb, &eb));
                            }
                        }
                        if let Some((t, db)) = op.apply_level(kb, &eb) {
                            if t + ka <= top {
                                add_into(&mut rhs, &self.mul_coords(ka, &ea, t, &db));
                            }
                        }
                        if lhs != rhs {
                            return Some((bref(ka, ia), bref(kb, ib)));
                        }
                    }
                }
            }
        }
        None
    }

    /// Checks every algebra invariant and lists each violation with witnesses.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let top = self.top_level();
        for k in [0, top] {
            if self.dims[k] != 1 {
                report.push(ValidationFailure::DegreeDimension {
                    degree: 2 * k,
                    dim: self.dims[k],
                });
            }
        }
        let b2 = self.dims[1];
        if self.bb_form.rows() != b2 || self.bb_form.cols() != b2 {
            report.push(ValidationFailure::BbFormShape {
                rows: self.bb_form.rows(),
                cols: self.bb_form.cols(),
                expected: b2,
            });
        } else {
            for i in 0..b2 {
                for j in 0..i {
                    if self.bb_form[(i, j)] != self.bb_form[(j, i)] {
                        report.push(ValidationFailure::BbFormNotSymmetric { row: i, col: j });
                    }
                }
            }
            if self.bb_form.rank() < b2 {
                report.push(ValidationFailure::BbFormDegenerate);
            }
        }
        if !report.is_ok() && (self.dims[0] != 1 || self.dims[top] != 1) {
            return report;
        }

        // unit
        for k in 0..=top {
            for i in 0..self.dims[k] {
                let e = SparseVec::unit(i);
                if self.table[0][k][i] != e {
                    report.push(ValidationFailure::UnitNotIdentity {
                        element: bref(k, i),
                        side: "left",
                    });
                }
                if self.table[k][0][i] != e {
                    report.push(ValidationFailure::UnitNotIdentity {
                        element: bref(k, i),
                        side: "right",
                    });
                }
            }
        }

        // commutativity
        for ka in 1..=top {
            for kb in ka..=top {
                if ka + kb > top {
                    continue;
                }
                for ia in 0..self.dims[ka] {
                    for ib in 0..self.dims[kb] {
                        if ka == kb && ib <= ia {
                            continue;
                        }
                        if self.table[ka][kb][ia * self.dims[kb] + ib]
                            != self.table[kb][ka][ib * self.dims[ka] + ia]
                        {
                            report.push(ValidationFailure::NonCommutative {
                                a: bref(ka, ia),
                                b: bref(kb, ib),
                            });
                        }
                    }
                }
            }
        }

        // associativity over all basis triples of positive degree
        let triples: Vec<(usize, usize, usize)> = (1..=top)
            .flat_map(|ka| (1..=top).flat_map(move |kb| (1..=top).map(move |kc| (ka, kb, kc))))
            .filter(|(a, b, c)| a + b + c <= top)
            .collect();
        let assoc: Vec<ValidationFailure> = triples
            .par_iter()
            .flat_map_iter(|&(ka, kb, kc)| {
                let mut out = Vec::new();
                for ia in 0..self.dims[ka] {
                    for ib in 0..self.dims[kb] {
                        let ab = &self.table[ka][kb][ia * self.dims[kb] + ib];
                        for ic in 0..self.dims[kc] {
                            let bc = &self.table[kb][kc][ib * self.dims[kc] + ic];
                            let left = self.mul_sparse_left(ka + kb, ab, kc, ic);
                            let right = self.mul_sparse_right(ka, ia, kb + kc, bc);
                            if left != right {
                                out.push(ValidationFailure::NonAssociative {
                                    a: bref(ka, ia),
                                    b: bref(kb, ib),
                                    c: bref(kc, ic),
                                });
                            }
                        }
                    }
                }
                out
            })
            .collect();
        for f in assoc {
            report.push(f);
        }

        // Frobenius pairing, degree by degree
        for k in 0..=top {
            let m = self.phi_matrix(k);
            let expected = self.dims[k];
            let rank = m.rank();
            if rank != expected || self.dims[top - k] != expected {
                report.push(ValidationFailure::FrobeniusDegenerate {
                    degree: 2 * k,
                    rank,
                    expected,
                });
            }
        }
        report
    }

    fn mul_sparse_left(&self, ka: usize, a: &SparseVec, kc: usize, ic: usize) -> SparseVec {
        let mut acc = Accumulator::new(self.dims[ka + kc]);
        for (i, x) in a.entries() {
            acc.add_scaled(x, &self.table[ka][kc][i * self.dims[kc] + ic]);
        }
        acc.take()
    }

    fn mul_sparse_right(&self, ka: usize, ia: usize, kb: usize, b: &SparseVec) -> SparseVec {
        let mut acc = Accumulator::new(self.dims[ka + kb]);
        for (i, x) in b.entries() {
            acc.add_scaled(x, &self.table[ka][kb][ia * self.dims[kb] + i]);
        }
        acc.take()
    }

    /// Overwrites one structure constant (used to inject faults in tests).
    pub fn set_product(
        &mut self,
        degree_a: usize,
        ia: usize,
        degree_b: usize,
        ib: usize,
        out: SparseVec,
    ) {
        let (ka, kb) = (degree_a / 2, degree_b / 2);
        let d = self.dims[kb];
        self.table[ka][kb][ia * d + ib] = out;
    }
}

fn phi_sign_negative(degree: usize, half_dim: usize) -> bool {
    // sign exponent q = (deg − 2n)/2
    let q = degree as i64 / 2 - half_dim as i64;
    q.rem_euclid(2) == 1
}

pub(crate) fn unit_vec(len: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::ZERO; len];
    v[i] = Q::ONE;
    v
}

fn add_into(acc: &mut [Q], v: &[Q]) {
    for (a, b) in acc.iter_mut().zip(v) {
        if !b.is_zero() {
            *a += b;
        }
    }
}
