//! Degree-homogeneous linear operators on an evenly graded space.
//!
//! Degrees are cohomological (`0, 2, …, 4n`); internally a degree `2k` is
//! addressed by its level `k`. An operator of shift `s` maps level `k` to
//! level `k + s/2` and is stored as one dense block per source level.

use crate::linalg::{Matrix, SparseVec};
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct GradedEndomorphism {
    dims: Vec<usize>,
    shift: i32,
    blocks: Vec<Option<Matrix>>,
}

impl PartialEq for GradedEndomorphism {
    fn eq(&self, other: &Self) -> bool {
        if self.dims != other.dims {
            return false;
        }
        if self.is_zero() && other.is_zero() {
            return true;
        }
        self.shift == other.shift && self.to_sparse() == other.to_sparse()
    }
}

impl Eq for GradedEndomorphism {}

fn target_level(dims: &[usize], k: usize, shift: i32) -> Option<usize> {
    let t = k as i64 + (shift / 2) as i64;
    (t >= 0 && (t as usize) < dims.len()).then_some(t as usize)
}

impl GradedEndomorphism {
    /// The zero operator of the given (even) shift.
    pub fn zero(dims: &[usize], shift: i32) -> Self {
        assert!(shift % 2 == 0, "shift must be even");
        GradedEndomorphism {
            dims: dims.to_vec(),
            shift,
            blocks: vec![None; dims.len()],
        }
    }

    /// Builds from blocks indexed by source level; a missing block is zero.
    pub fn from_blocks(dims: &[usize], shift: i32, blocks: Vec<Option<Matrix>>) -> Self {
        assert_eq!(blocks.len(), dims.len());
        let mut e = GradedEndomorphism::zero(dims, shift);
        for (k, b) in blocks.into_iter().enumerate() {
            if let Some(b) = b {
                let t = target_level(dims, k, shift).expect("block leaves the graded range");
                assert_eq!(
                    (b.rows(), b.cols()),
                    (dims[t], dims[k]),
                    "block shape mismatch at level {k}"
                );
                e.blocks[k] = Some(b);
            }
        }
        e
    }

    /// Scalar `c_k` on level `k`.
    pub fn diagonal(dims: &[usize], scalars: &[Q]) -> Self {
        let blocks = dims
            .iter()
            .zip(scalars)
            .map(|(&d, c)| Some(Matrix::scalar(d, c)))
            .collect();
        GradedEndomorphism::from_blocks(dims, 0, blocks)
    }

    pub fn identity(dims: &[usize]) -> Self {
        GradedEndomorphism::diagonal(dims, &vec![Q::ONE; dims.len()])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Cohomological shift.
    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn target_level(&self, k: usize) -> Option<usize> {
        target_level(&self.dims, k, self.shift)
    }

    /// Block from level `k`, or `None` when it is zero or out of range.
    pub fn block(&self, k: usize) -> Option<&Matrix> {
        self.blocks.get(k).and_then(|b| b.as_ref())
    }

    /// Block from level `k`, materializing zeros.
    pub fn block_or_zero(&self, k: usize) -> Option<Matrix> {
        let t = self.target_level(k)?;
        Some(
            self.block(k)
                .cloned()
                .unwrap_or_else(|| Matrix::zeros(self.dims[t], self.dims[k])),
        )
    }

    pub fn set_block(&mut self, k: usize, m: Matrix) {
        let t = self.target_level(k).expect("block leaves the graded range");
        assert_eq!((m.rows(), m.cols()), (self.dims[t], self.dims[k]));
        self.blocks[k] = Some(m);
    }

    pub fn is_zero(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.as_ref().is_none_or(Matrix::is_zero))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedEndomorphism) -> GradedEndomorphism {
        assert_eq!(self.dims, other.dims, "degree profiles differ");
        let mut out = GradedEndomorphism::zero(&self.dims, self.shift + other.shift);
        for k in 0..self.dims.len() {
            let (Some(b), Some(mid)) = (other.block(k), other.target_level(k)) else {
                continue;
            };
            let Some(a) = self.block(mid) else { continue };
            if out.target_level(k).is_none() {
                continue;
            }
            let p = a.mul(b);
            if !p.is_zero() {
                out.blocks[k] = Some(p);
            }
        }
        out
    }

    pub fn add(&self, other: &GradedEndomorphism) -> GradedEndomorphism {
        self.add_scaled(&Q::ONE, other)
    }

    pub fn sub(&self, other: &GradedEndomorphism) -> GradedEndomorphism {
        self.add_scaled(&-Q::ONE, other)
    }

    /// `self + c * other`. Shifts must agree unless one side is zero.
    pub fn add_scaled(&self, c: &Q, other: &GradedEndomorphism) -> GradedEndomorphism {
        assert_eq!(self.dims, other.dims, "degree profiles differ");
        if other.is_zero() || c.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.scale(c);
        }
        assert_eq!(
            self.shift, other.shift,
            "cannot add operators of different shift"
        );
        let mut out = self.clone();
        for k in 0..self.dims.len() {
            let Some(b) = other.block(k) else { continue };
            match &mut out.blocks[k] {
                Some(a) => a.add_scaled_assign(c, b),
                slot @ None => *slot = Some(b.scale(c)),
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> GradedEndomorphism {
        let mut out = GradedEndomorphism::zero(&self.dims, self.shift);
        if c.is_zero() {
            return out;
        }
        for (k, b) in self.blocks.iter().enumerate() {
            out.blocks[k] = b.as_ref().map(|m| m.scale(c));
        }
        out
    }

    /// Lie bracket `[self, other] = self∘other − other∘self`.
    pub fn bracket(&self, other: &GradedEndomorphism) -> GradedEndomorphism {
        self.compose(other).sub(&other.compose(self))
    }

    /// Applies the operator to a vector living in level `k`.
    pub fn apply_level(&self, k: usize, v: &[Q]) -> Option<(usize, Vec<Q>)> {
        let t = self.target_level(k)?;
        Some(match self.block(k) {
            Some(b) => (t, b.mul_vec(v)),
            None => (t, vec![Q::ZERO; self.dims[t]]),
        })
    }

    /// Number of coordinates of an operator with this shift.
    pub fn flat_len(dims: &[usize], shift: i32) -> usize {
        (0..dims.len())
            .filter_map(|k| target_level(dims, k, shift).map(|t| dims[t] * dims[k]))
            .sum()
    }

    /// Row-major flattening of all blocks in level order.
    pub fn to_sparse(&self) -> SparseVec {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for k in 0..self.dims.len() {
            let Some(t) = self.target_level(k) else {
                continue;
            };
            let size = self.dims[t] * self.dims[k];
            if let Some(b) = self.block(k) {
                for (i, x) in b.data().iter().enumerate() {
                    if !x.is_zero() {
                        pairs.push((offset + i, x.clone()));
                    }
                }
            }
            offset += size;
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn from_sparse(dims: &[usize], shift: i32, v: &SparseVec) -> GradedEndomorphism {
        let mut out = GradedEndomorphism::zero(dims, shift);
        let mut offset = 0;
        let entries = v.entries();
        let mut pos = 0;
        for k in 0..dims.len() {
            let Some(t) = target_level(dims, k, shift) else {
                continue;
            };
            let size = dims[t] * dims[k];
            let start = pos;
            while pos < entries.len() && entries[pos].0 < offset + size {
                pos += 1;
            }
            if pos > start {
                let mut m = Matrix::zeros(dims[t], dims[k]);
                for (i, x) in &entries[start..pos] {
                    let local = i - offset;
                    m[(local / dims[k], local % dims[k])] = x.clone();
                }
                out.blocks[k] = Some(m);
            }
            offset += size;
        }
        out
    }
}
