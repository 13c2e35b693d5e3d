//! Lie subalgebras of graded endomorphisms: bracket closure, membership and
//! the decomposition by `ad(θ)`-eigenvalue.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::linalg::{Accumulator, Echelon, Insertion, SparseVec};
use crate::rational::Q;

/// How a basis element entered the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Generator(usize),
    /// `[generators[generator], basis[element]]`
    Bracket {
        generator: usize,
        element: usize,
    },
}

/// Indices of basis elements by `ad(θ)`-eigenvalue.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedParts {
    pub minus: Vec<usize>,
    pub zero: Vec<usize>,
    pub plus: Vec<usize>,
}

impl GradedParts {
    pub fn dims(&self) -> [usize; 3] {
        [self.minus.len(), self.zero.len(), self.plus.len()]
    }
}

#[derive(Clone, Debug)]
pub struct LieSubalgebra {
    dims: Vec<usize>,
    generators: Vec<GradedEndomorphism>,
    basis: Vec<GradedEndomorphism>,
    origins: Vec<Origin>,
    // per shift; payloads express echelon rows in basis coordinates
    spans: BTreeMap<i32, Echelon>,
    grading: Option<GradedParts>,
}

impl LieSubalgebra {
    fn empty(dims: &[usize], generators: Vec<GradedEndomorphism>) -> Self {
        LieSubalgebra {
            dims: dims.to_vec(),
            generators,
            basis: Vec::new(),
            origins: Vec::new(),
            spans: BTreeMap::new(),
            grading: None,
        }
    }

    /// Span of homogeneous elements, keeping the independent ones in order.
    /// Closure under the bracket is not checked; see [`LieSubalgebra::closure_failure`].
    pub fn span_of(dims: &[usize], elements: &[GradedEndomorphism]) -> Self {
        let mut s = LieSubalgebra::empty(dims, elements.to_vec());
        for (i, e) in elements.iter().enumerate() {
            s.try_insert(e.clone(), Origin::Generator(i));
        }
        s
    }

    fn try_insert(&mut self, op: GradedEndomorphism, origin: Origin) -> bool {
        if op.is_zero() {
            return false;
        }
        let shift = op.shift();
        let len = GradedEndomorphism::flat_len(&self.dims, shift);
        let idx = self.basis.len();
        let e = self.spans.entry(shift).or_insert_with(|| Echelon::new(len));
        match e.insert_with_payload(op.to_sparse(), SparseVec::unit(idx)) {
            Insertion::New(_) => {
                self.basis.push(op);
                self.origins.push(origin);
                true
            }
            Insertion::InSpan { .. } => false,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[GradedEndomorphism] {
        &self.basis
    }

    pub fn generators(&self) -> &[GradedEndomorphism] {
        &self.generators
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn grading(&self) -> Option<&GradedParts> {
        self.grading.as_ref()
    }

    /// Basis elements of one graded part (`−2`, `0` or `2`).
    pub fn part(&self, eigenvalue: i32) -> Vec<&GradedEndomorphism> {
        let Some(g) = &self.grading else {
            return Vec::new();
        };
        let idx = match eigenvalue {
            -2 => &g.minus,
            0 => &g.zero,
            2 => &g.plus,
            _ => return Vec::new(),
        };
        idx.iter().map(|&i| &self.basis[i]).collect()
    }

    /// Sparse coordinates on the basis, or `None` when `op` is not in the span.
    pub fn coordinates(&self, op: &GradedEndomorphism) -> Option<Vec<(usize, Q)>> {
        if op.is_zero() {
            return Some(Vec::new());
        }
        let e = self.spans.get(&op.shift())?;
        let coords = e.coordinates(&op.to_sparse())?;
        let mut acc = Accumulator::new(self.basis.len());
        for (r, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                acc.add_scaled(c, &e.payloads()[r]);
            }
        }
        Some(acc.take().entries().to_vec())
    }

    pub fn contains(&self, op: &GradedEndomorphism) -> bool {
        self.coordinates(op).is_some()
    }

    /// First basis pair whose bracket leaves the span.
    pub fn closure_failure(&self) -> Option<(usize, usize)> {
        let pairs: Vec<(usize, usize)> = (0..self.dim())
            .flat_map(|i| (i + 1..self.dim()).map(move |j| (i, j)))
            .collect();
        pairs
            .par_iter()
            .find_first(|&&(i, j)| !self.contains(&self.basis[i].bracket(&self.basis[j])))
            .copied()
    }

    /// Whether `other` spans the same subspace.
    pub fn same_span(&self, other: &LieSubalgebra) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|b| self.contains(b))
    }
}

/// Default cap on processed worklist entries: ten times the dimension of
/// the ambient endomorphism space.
pub fn default_iteration_cap(dims: &[usize]) -> usize {
    let n: usize = dims.iter().sum();
    10 * n * n
}

/// The Lie subalgebra generated by homogeneous operators.
///
/// Every new basis element is bracketed with each generator; the span of
/// these left-normed brackets is the generated subalgebra.
pub fn lie_closure(generators: &[GradedEndomorphism]) -> Result<LieSubalgebra> {
    let dims = generators
        .first()
        .map(|g| g.dims().to_vec())
        .unwrap_or_default();
    lie_closure_capped(generators, default_iteration_cap(&dims))
}

pub fn lie_closure_capped(generators: &[GradedEndomorphism], cap: usize) -> Result<LieSubalgebra> {
    let Some(first) = generators.first() else {
        return Ok(LieSubalgebra::empty(&[], Vec::new()));
    };
    let dims = first.dims().to_vec();
    if generators.iter().any(|g| g.dims() != dims.as_slice()) {
        return Err(Error::Malformed(
            "generators act on different degree profiles".into(),
        ));
    }
    let mut g = LieSubalgebra::empty(&dims, generators.to_vec());
    let mut queue = VecDeque::new();
    for (i, x) in generators.iter().enumerate() {
        if g.try_insert(x.clone(), Origin::Generator(i)) {
            queue.push_back(g.dim() - 1);
        }
    }
    let mut steps = 0;
    while let Some(z) = queue.pop_front() {
        steps += 1;
        if steps > cap {
            return Err(Error::Inconsistent(format!(
                "bracket closure exceeded {cap} iterations"
            )));
        }
        let elem = g.basis[z].clone();
        let brackets: Vec<GradedEndomorphism> =
            generators.par_iter().map(|x| x.bracket(&elem)).collect();
        for (i, b) in brackets.into_iter().enumerate() {
            if g.try_insert(
                b,
                Origin::Bracket {
                    generator: i,
                    element: z,
                },
            ) {
                queue.push_back(g.dim() - 1);
            }
        }
    }
    Ok(g)
}

/// Splits `g` by `ad(θ)`-eigenvalue. Any eigenvalue outside `{−2, 0, 2}`
/// or a basis element that is not an eigenvector is a structure violation.
pub fn grade_decompose(g: &mut LieSubalgebra, theta: &GradedEndomorphism) -> Result<GradedParts> {
    if !g.contains(theta) {
        return Err(Error::Structure("θ does not lie in the algebra".into()));
    }
    let mut parts = GradedParts::default();
    for (i, b) in g.basis.iter().enumerate() {
        let s = b.shift();
        if theta.bracket(b) != b.scale(&Q::int(s as i64)) {
            return Err(Error::Structure(format!(
                "basis element {i} is not an ad(θ)-eigenvector"
            )));
        }
        match s {
            -2 => parts.minus.push(i),
            0 => parts.zero.push(i),
            2 => parts.plus.push(i),
            other => {
                return Err(Error::Structure(format!(
                    "basis element {i} has ad(θ)-eigenvalue {other}"
                )));
            }
        }
    }
    g.grading = Some(parts.clone());
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn sl2() -> (GradedEndomorphism, GradedEndomorphism, GradedEndomorphism) {
        // standard representation on levels 0, 1
        let dims = [1, 1];
        let e =
            GradedEndomorphism::from_blocks(&dims, 2, vec![Some(Matrix::from_i64(&[&[1]])), None]);
        let f =
            GradedEndomorphism::from_blocks(&dims, -2, vec![None, Some(Matrix::from_i64(&[&[1]]))]);
        let h = GradedEndomorphism::diagonal(&dims, &[Q::int(-1), Q::int(1)]);
        (e, h, f)
    }

    #[test]
    fn closure_of_an_sl2_pair() {
        let (e, h, f) = sl2();
        let mut g = lie_closure(&[e.clone(), f.clone()]).unwrap();
        assert_eq!(g.dim(), 3);
        assert!(g.contains(&h));
        assert!(g.closure_failure().is_none());
        let parts = grade_decompose(&mut g, &h).unwrap();
        assert_eq!(parts.dims(), [1, 1, 1]);
        let again = lie_closure(g.basis()).unwrap();
        assert!(again.same_span(&g));
    }

    #[test]
    fn coordinates_reconstruct_elements() {
        let (e, _, f) = sl2();
        let g = lie_closure(&[e.clone(), f.clone()]).unwrap();
        let x = e.bracket(&f).scale(&Q::new(3, 2));
        let c = g.coordinates(&x).unwrap();
        let mut sum = GradedEndomorphism::zero(g.dims(), 0);
        for (i, q) in c {
            sum = sum.add_scaled(&q, &g.basis()[i]);
        }
        assert_eq!(sum, x);
    }

    #[test]
    fn iteration_cap_is_enforced() {
        let (e, _, f) = sl2();
        assert!(lie_closure_capped(&[e, f], 1).is_err());
    }
}
