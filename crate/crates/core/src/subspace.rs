//! Subspaces of a graded space, stored level by level in reduced echelon form.

use std::collections::VecDeque;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::linalg::{intersect, Echelon, Matrix, SparseVec};
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct GradedSubspace {
    dims: Vec<usize>,
    parts: Vec<Echelon>,
}

impl PartialEq for GradedSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
            && self
                .parts
                .iter()
                .zip(&other.parts)
                .all(|(a, b)| a.rows() == b.rows())
    }
}

impl Eq for GradedSubspace {}

impl GradedSubspace {
    pub fn zero(dims: &[usize]) -> Self {
        GradedSubspace {
            dims: dims.to_vec(),
            parts: dims.iter().map(|&d| Echelon::new(d)).collect(),
        }
    }

    pub fn full(dims: &[usize]) -> Self {
        let mut s = GradedSubspace::zero(dims);
        for (k, &d) in dims.iter().enumerate() {
            for i in 0..d {
                s.parts[k].insert(SparseVec::unit(i));
            }
        }
        s
    }

    /// The whole of level `k` and nothing else.
    pub fn level(dims: &[usize], k: usize) -> Self {
        let mut s = GradedSubspace::zero(dims);
        for i in 0..dims[k] {
            s.parts[k].insert(SparseVec::unit(i));
        }
        s
    }

    pub fn from_vectors(dims: &[usize], vectors: &[(usize, Vec<Q>)]) -> Self {
        let mut s = GradedSubspace::zero(dims);
        for (k, v) in vectors {
            s.insert(*k, v);
        }
        s
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Adds a vector to level `k`; returns whether the space grew.
    pub fn insert(&mut self, k: usize, v: &[Q]) -> bool {
        self.parts[k].insert(SparseVec::from_dense(v))
    }

    pub fn contains(&self, k: usize, v: &[Q]) -> bool {
        self.parts[k].contains(&SparseVec::from_dense(v))
    }

    pub fn dim_at(&self, k: usize) -> usize {
        self.parts.get(k).map_or(0, Echelon::rank)
    }

    pub fn level_dims(&self) -> Vec<usize> {
        self.parts.iter().map(Echelon::rank).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(Echelon::rank).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Basis of level `k`.
    pub fn basis(&self, k: usize) -> Vec<Vec<Q>> {
        self.parts[k].basis_dense()
    }

    /// All basis vectors, ordered by level.
    pub fn all_basis(&self) -> Vec<(usize, Vec<Q>)> {
        (0..self.dims.len())
            .flat_map(|k| self.basis(k).into_iter().map(move |v| (k, v)))
            .collect()
    }

    pub fn echelon(&self, k: usize) -> &Echelon {
        &self.parts[k]
    }

    /// Coordinates of `v` on the basis of level `k`.
    pub fn coordinates(&self, k: usize, v: &[Q]) -> Option<Vec<Q>> {
        self.parts[k].coordinates(&SparseVec::from_dense(v))
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut s = self.clone();
        for k in 0..self.dims.len() {
            for r in other.parts[k].rows() {
                s.parts[k].insert(r.clone());
            }
        }
        s
    }

    pub fn intersection(&self, other: &GradedSubspace) -> GradedSubspace {
        let mut s = GradedSubspace::zero(&self.dims);
        for k in 0..self.dims.len() {
            for v in intersect(self.dims[k], &self.basis(k), &other.basis(k)) {
                s.insert(k, &v);
            }
        }
        s
    }

    pub fn contains_space(&self, other: &GradedSubspace) -> bool {
        (0..self.dims.len()).all(|k| {
            other.parts[k]
                .rows()
                .iter()
                .all(|r| self.parts[k].contains(r))
        })
    }

    /// Restriction to a single level.
    pub fn at_level(&self, k: usize) -> GradedSubspace {
        let mut s = GradedSubspace::zero(&self.dims);
        s.parts[k] = self.parts[k].clone();
        s
    }

    /// First operator (by index) and basis vector whose image leaves the space.
    pub fn stability_failure(&self, ops: &[&GradedEndomorphism]) -> Option<(usize, usize, usize)> {
        for (o, op) in ops.iter().enumerate() {
            for k in 0..self.dims.len() {
                for (i, v) in self.basis(k).iter().enumerate() {
                    if let Some((t, img)) = op.apply_level(k, v) {
                        if !self.contains(t, &img) {
                            return Some((o, k, i));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_stable(&self, ops: &[&GradedEndomorphism]) -> bool {
        self.stability_failure(ops).is_none()
    }

    /// Smallest subspace containing `self` and stable under all `ops`.
    pub fn saturate(&self, ops: &[&GradedEndomorphism]) -> GradedSubspace {
        let mut s = self.clone();
        let mut queue: VecDeque<(usize, Vec<Q>)> = self.all_basis().into();
        while let Some((k, v)) = queue.pop_front() {
            for op in ops {
                if let Some((t, img)) = op.apply_level(k, &v) {
                    if img.iter().any(|x| !x.is_zero()) && s.insert(t, &img) {
                        queue.push_back((t, img));
                    }
                }
            }
        }
        s
    }

    /// Matrices of `ops` restricted to the space, in the basis `all_basis()`.
    pub fn restrict(&self, ops: &[&GradedEndomorphism]) -> Result<Vec<Matrix>> {
        let basis = self.all_basis();
        let mut offsets = vec![0usize; self.dims.len() + 1];
        for k in 0..self.dims.len() {
            offsets[k + 1] = offsets[k] + self.dim_at(k);
        }
        let d = basis.len();
        ops.iter()
            .enumerate()
            .map(|(o, op)| {
                let mut m = Matrix::zeros(d, d);
                for (j, (k, v)) in basis.iter().enumerate() {
                    let Some((t, img)) = op.apply_level(*k, v) else {
                        continue;
                    };
                    let c = self.coordinates(t, &img).ok_or_else(|| Error::NotStable {
                        operator: o,
                        detail: format!(
                            "image of basis vector {j} (degree {}) leaves the subspace",
                            2 * k
                        ),
                    })?;
                    for (r, x) in c.into_iter().enumerate() {
                        m[(offsets[t] + r, j)] = x;
                    }
                }
                Ok(m)
            })
            .collect()
    }
}
