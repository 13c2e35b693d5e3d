//! Hard Lefschetz checks and the unique `sl2`-partner `Λ_x` of `L_x`.

use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::linalg::{solve_sparse, Matrix, SparseVec};
use crate::rational::Q;
use crate::ring::{AlgebraElement, GradedAlgebra};

/// `(e, h, f) = (L_x, θ, Λ_x)`.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    pub e: GradedEndomorphism,
    pub h: GradedEndomorphism,
    pub f: GradedEndomorphism,
}

/// Which of the three defining identities hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Sl2Check {
    pub he: bool,
    pub hf: bool,
    pub ef: bool,
}

impl Sl2Check {
    pub fn all(&self) -> bool {
        self.he && self.hf && self.ef
    }
}

impl Sl2Triple {
    /// Exact check of `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
    pub fn check(&self) -> Sl2Check {
        Sl2Check {
            he: self.h.bracket(&self.e) == self.e.scale(&Q::int(2)),
            hf: self.h.bracket(&self.f) == self.f.scale(&Q::int(-2)),
            ef: self.e.bracket(&self.f) == self.h,
        }
    }
}

/// Whether `L_x^{2j}: H^{2n−2j} → H^{2n+2j}` is bijective for `j = 1..=n`.
pub fn has_lefschetz_property(algebra: &GradedAlgebra, x: &AlgebraElement) -> Result<bool> {
    let l = algebra.lefschetz_operator(x)?;
    Ok(lefschetz_with(algebra, &l))
}

fn lefschetz_with(algebra: &GradedAlgebra, l: &GradedEndomorphism) -> bool {
    let n = algebra.half_dim();
    let dims = algebra.dims();
    for j in 1..=n {
        let from = n - j;
        if dims[from] != dims[n + j] {
            return false;
        }
        let mut m = Matrix::identity(dims[from]);
        for k in from..n + j {
            match l.block(k) {
                Some(b) => m = b.mul(&m),
                None => return dims[from] == 0,
            }
        }
        if m.rank() != dims[from] {
            return false;
        }
    }
    true
}

/// Solves `[L_x, Λ] = θ` for a shift `−2` operator `Λ`; the solution is
/// required to be unique. `[θ, Λ] = −2Λ` holds for any operator of shift `−2`.
pub fn solve_lambda(algebra: &GradedAlgebra, x: &AlgebraElement) -> Result<Sl2Triple> {
    let l = algebra.lefschetz_operator(x)?;
    if !lefschetz_with(algebra, &l) {
        return Err(Error::NoSl2(format!(
            "class {:?} does not have the Lefschetz property",
            x.coords
        )));
    }
    let theta = algebra.theta();
    let dims = algebra.dims();
    let top = dims.len() - 1;
    // unknown Λ_k: level k → k−1, k = 1..=top, row-major, at offset[k]
    let mut offset = vec![0usize; top + 2];
    for k in 1..=top {
        offset[k + 1] = offset[k] + dims[k - 1] * dims[k];
    }
    let unknowns = offset[top + 1];
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for k in 0..=top {
        // (L_{k−1} Λ_k − Λ_{k+1} L_k)[i, j] = θ_k[i, j]
        for i in 0..dims[k] {
            for j in 0..dims[k] {
                let mut pairs = Vec::new();
                if k >= 1 {
                    if let Some(lb) = l.block(k - 1) {
                        for r in 0..dims[k - 1] {
                            let c = &lb[(i, r)];
                            if !c.is_zero() {
                                pairs.push((offset[k] + r * dims[k] + j, c.clone()));
                            }
                        }
                    }
                }
                if k < top {
                    if let Some(lb) = l.block(k) {
                        for c in 0..dims[k + 1] {
                            let v = &lb[(c, j)];
                            if !v.is_zero() {
                                pairs.push((offset[k + 1] + i * dims[k + 1] + c, -v));
                            }
                        }
                    }
                }
                rows.push(SparseVec::from_pairs(pairs));
                rhs.push(if i == j {
                    theta.block(k).map(|b| b[(i, i)].clone()).unwrap_or(Q::ZERO)
                } else {
                    Q::ZERO
                });
            }
        }
    }
    let sol = solve_sparse(unknowns, &rows, &rhs).ok_or_else(|| {
        Error::Inconsistent("the sl2 equations for a Lefschetz class have no solution".into())
    })?;
    if sol.kernel_dim != 0 {
        return Err(Error::Inconsistent(format!(
            "the sl2 partner is not unique: solution space has dimension {}",
            sol.kernel_dim
        )));
    }
    let mut blocks = vec![None; dims.len()];
    for k in 1..=top {
        if dims[k] == 0 || dims[k - 1] == 0 {
            continue;
        }
        let data = &sol.particular[offset[k]..offset[k + 1]];
        let m = Matrix::from_rows(data.chunks(dims[k]).map(<[Q]>::to_vec).collect());
        if !m.is_zero() {
            blocks[k] = Some(m);
        }
    }
    let f = GradedEndomorphism::from_blocks(dims, -2, blocks);
    let triple = Sl2Triple { e: l, h: theta, f };
    if !triple.check().all() {
        return Err(Error::Inconsistent(
            "solved sl2 partner violates a bracket identity".into(),
        ));
    }
    Ok(triple)
}
