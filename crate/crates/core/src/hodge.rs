//! Rational period points, Weil operators and induced Hodge numbers.
//!
//! A period `σ = e1 + i·e2` with `q(e1) = q(e2) > 0`, `q(e1, e2) = 0` spans
//! `H^{2,0}`. The Weil operator acts by `i(p − q)` on `H^{p,q}`; on `H²` this
//! is twice the rotation of the plane `⟨e1, e2⟩`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::forms::{bilinear, HyperbolicFrame};
use crate::lie::lie_closure;
use crate::linalg::{rank_of, Echelon, Matrix};
use crate::llv::{is_q_skew, Llv};
use crate::rational::Q;
use crate::ring::{unit_vec, GradedAlgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodPoint {
    pub e1: Vec<Q>,
    pub e2: Vec<Q>,
}

impl PeriodPoint {
    pub fn new(algebra: &GradedAlgebra, e1: Vec<Q>, e2: Vec<Q>) -> Result<Self> {
        let b2 = algebra.b2();
        if e1.len() != b2 || e2.len() != b2 {
            return Err(Error::Period(format!(
                "period vectors must have {b2} coordinates"
            )));
        }
        let (a, b, c) = (
            algebra.q(&e1, &e1),
            algebra.q(&e2, &e2),
            algebra.q(&e1, &e2),
        );
        if !a.is_positive() {
            return Err(Error::Period(format!("q(e1, e1) = {a} is not positive")));
        }
        if a != b {
            return Err(Error::Period(format!(
                "q(e1, e1) = {a} differs from q(e2, e2) = {b}"
            )));
        }
        if !c.is_zero() {
            return Err(Error::Period(format!("q(e1, e2) = {c} is not zero")));
        }
        Ok(PeriodPoint { e1, e2 })
    }
}

/// `W(y) = (2/q(e1,e1))·(q(e2,y)·e1 − q(e1,y)·e2)`.
pub fn weil_on_h2(algebra: &GradedAlgebra, p: &PeriodPoint) -> Result<Matrix> {
    let p = PeriodPoint::new(algebra, p.e1.clone(), p.e2.clone())?;
    let q = algebra.bb_form();
    let b2 = algebra.b2();
    let scale = &Q::int(2) / &algebra.q(&p.e1, &p.e1);
    let (q1, q2) = (q.mul_vec(&p.e1), q.mul_vec(&p.e2));
    let mut w = Matrix::zeros(b2, b2);
    for r in 0..b2 {
        for c in 0..b2 {
            let v = &(&p.e1[r] * &q2[c]) - &(&p.e2[r] * &q1[c]);
            w[(r, c)] = &scale * &v;
        }
    }
    Ok(w)
}

/// Eigenvalues `±i·e` of a real operator on one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSpectrum {
    pub degree: usize,
    pub dim: usize,
    pub zero: usize,
    /// `(e, multiplicity of i·e)`; `−i·e` has the same multiplicity.
    pub pairs: Vec<(usize, usize)>,
    /// `M · Π_{e even, 0 < e ≤ d} (M² + e²) = 0`.
    pub annihilated: bool,
    /// Eigenvalues with odd `e` or non-integral multiplicities were found.
    pub inconsistent: bool,
}

impl DegreeSpectrum {
    pub fn complete(&self) -> bool {
        self.zero + 2 * self.pairs.iter().map(|p| p.1).sum::<usize>() == self.dim
    }
}

#[derive(Clone, Debug)]
pub struct WeilData {
    pub period: PeriodPoint,
    pub xi: Matrix,
    /// Coordinates of `ξ` on the `so(H)` basis.
    pub coords: Vec<Q>,
    pub extended: GradedEndomorphism,
    pub eigen_table: Vec<DegreeSpectrum>,
    pub derivation: bool,
    pub restriction_matches: bool,
}

impl WeilData {
    pub fn consistent(&self) -> bool {
        self.derivation
            && self.restriction_matches
            && self
                .eigen_table
                .iter()
                .all(|s| s.annihilated && !s.inconsistent && s.complete())
    }
}

fn spectrum(m: &Matrix, degree: usize) -> DegreeSpectrum {
    let dim = m.rows();
    let zero = if dim == 0 { 0 } else { dim - m.rank() };
    let sq = m.mul(m);
    let mut pairs = Vec::new();
    let mut inconsistent = false;
    let mut product = m.clone();
    for e in 1..=degree {
        let shifted = sq.add(&Matrix::scalar(dim, &Q::int((e * e) as i64)));
        let k = dim - shifted.rank();
        if e % 2 == 0 {
            product = product.mul(&shifted);
        }
        if k == 0 {
            continue;
        }
        if e % 2 == 1 || k % 2 == 1 {
            inconsistent = true;
        } else {
            pairs.push((e, k / 2));
        }
    }
    DegreeSpectrum {
        degree,
        dim,
        zero,
        pairs,
        annihilated: product.is_zero(),
        inconsistent,
    }
}

/// Finds `ξ ∈ so(H)` acting on `H²` as the Weil operator and extends it to
/// every degree.
pub fn verify_weil_membership(
    algebra: &GradedAlgebra,
    llv: &Llv,
    p: &PeriodPoint,
) -> Result<WeilData> {
    let xi = weil_on_h2(algebra, p)?;
    let b2 = algebra.b2();
    let so = &llv.so_h.algebra;
    let blocks: Vec<Matrix> = so
        .basis()
        .iter()
        .map(|d| d.block(1).cloned().unwrap_or_else(|| Matrix::zeros(b2, b2)))
        .collect();
    // columns: flattened blocks
    let n = blocks.len();
    let mut system = Matrix::zeros(b2 * b2, n);
    for (a, blk) in blocks.iter().enumerate() {
        for (i, x) in blk.data().iter().enumerate() {
            system[(i, a)] = x.clone();
        }
    }
    let (coords, kernel) = system.solve(xi.data()).ok_or_else(|| {
        Error::Structure("the Weil operator on H² is not in the image of so(H)".into())
    })?;
    if kernel != 0 {
        return Err(Error::Structure(
            "so(H) does not act faithfully on H²".into(),
        ));
    }
    let extended = coords.iter().zip(so.basis()).fold(
        GradedEndomorphism::zero(algebra.dims(), 0),
        |acc, (c, d)| acc.add_scaled(c, d),
    );
    let restriction_matches = extended.block_or_zero(1).is_some_and(|b| b == xi);
    let derivation = algebra.derivation_failure(&extended).is_none();
    let eigen_table = (0..algebra.dims().len())
        .map(|k| spectrum(&extended.block_or_zero(k).expect("shift 0 block"), 2 * k))
        .collect();
    Ok(WeilData {
        period: p.clone(),
        xi,
        coords,
        extended,
        eigen_table,
        derivation,
        restriction_matches,
    })
}

/// `(p, q, h^{p,q})` in one degree, from `p − q = e` and `p + q = degree`.
pub fn hodge_numbers(data: &WeilData, degree: usize) -> Result<Vec<(usize, usize, usize)>> {
    let s = data
        .eigen_table
        .iter()
        .find(|s| s.degree == degree)
        .ok_or_else(|| {
            Error::Malformed(format!(
                "degree {degree} is not an even degree of the algebra"
            ))
        })?;
    if s.inconsistent {
        return Err(Error::Inconsistent(format!(
            "Weil operator has an odd or unpaired eigenvalue in degree {degree}"
        )));
    }
    let mut out = Vec::new();
    for &(e, m) in s.pairs.iter().rev() {
        out.push(((degree + e) / 2, (degree - e) / 2, m));
    }
    if s.zero > 0 {
        out.push((degree / 2, degree / 2, s.zero));
    }
    for &(e, m) in &s.pairs {
        out.push(((degree - e) / 2, (degree + e) / 2, m));
    }
    Ok(out)
}

fn orthogonal_complement_basis(q: &Matrix, x: &[Q]) -> Vec<Vec<Q>> {
    Matrix::from_rows(vec![q.mul_vec(x)]).kernel()
}

/// A period with `e1 = x`, if `x^⊥` contains a rational hyperbolic pair.
fn period_through(q: &Matrix, x: &[Q]) -> Option<(Vec<Q>, Vec<Q>)> {
    let c = bilinear(q, x, x);
    if !c.is_positive() {
        return None;
    }
    let basis = orthogonal_complement_basis(q, x);
    let m = basis.len();
    let mut gram = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = bilinear(q, &basis[i], &basis[j]);
        }
    }
    let lift = |v: &[Q]| -> Vec<Q> {
        let mut out = vec![Q::ZERO; x.len()];
        for (c, b) in v.iter().zip(&basis) {
            if c.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(b) {
                *o += &(c * y);
            }
        }
        out
    };
    // a vector of the same length directly among the complement basis
    for b in &basis {
        if bilinear(q, b, b) == c {
            return Some((x.to_vec(), b.clone()));
        }
    }
    let frame = HyperbolicFrame::find(&gram)?;
    let half = &c / &Q::int(2);
    let v: Vec<Q> = frame
        .u
        .iter()
        .zip(&frame.u_dual)
        .map(|(a, b)| a + &(&half * b))
        .collect();
    Some((x.to_vec(), lift(&v)))
}

fn reflect(q: &Matrix, v: &[Q], y: &[Q]) -> Vec<Q> {
    let c = &(&Q::int(2) * &bilinear(q, v, y)) / &bilinear(q, v, v);
    y.iter().zip(v).map(|(a, b)| a - &(&c * b)).collect()
}

/// `count` rational periods: one found by a small-vector search, the rest
/// obtained from it by seeded random products of reflections.
pub fn sample_periods(
    algebra: &GradedAlgebra,
    count: usize,
    seed: u64,
) -> Result<Vec<PeriodPoint>> {
    let q = algebra.bb_form();
    let b2 = algebra.b2();
    let candidates = (0..b2).map(|i| unit_vec(b2, i)).chain(
        (0..b2)
            .flat_map(|i| (i + 1..b2).map(move |j| (i, j)))
            .flat_map(|(i, j)| {
                [Q::ONE, -Q::ONE].into_iter().map(move |s| {
                    let mut v = unit_vec(b2, i);
                    v[j] = s;
                    v
                })
            }),
    );
    let (e1, e2) = candidates
        .into_iter()
        .find_map(|x| period_through(q, &x))
        .ok_or_else(|| {
            Error::Period("no rational period point found by the small-vector search".into())
        })?;
    let base = PeriodPoint::new(algebra, e1, e2)?;
    let mut out = vec![base.clone()];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count {
            return Err(Error::Period(
                "could not generate distinct period points".into(),
            ));
        }
        let mut p = base.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let v: Vec<Q> = (0..b2).map(|_| Q::int(rng.gen_range(-2..=2))).collect();
            if bilinear(q, &v, &v).is_zero() {
                continue;
            }
            p = PeriodPoint {
                e1: reflect(q, &v, &p.e1),
                e2: reflect(q, &v, &p.e2),
            };
        }
        if !out.contains(&p) {
            out.push(PeriodPoint::new(algebra, p.e1, p.e2)?);
        }
    }
    Ok(out)
}

/// Lie-level checks that `so(H)` acts faithfully with standard degree-2 part,
/// and that Weil operators generate a Lie algebra detected on `H²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi2Report {
    pub skew_dim: usize,
    pub so_h_dim: usize,
    /// Dimension of the kernel of `ρ⁺: skew(q) → End(H*)`.
    pub kernel_dim: usize,
    pub degree2_standard: bool,
    pub weil_operators: usize,
    pub weil_algebra_dim: usize,
    pub weil_restriction_injective: bool,
    pub passed: bool,
}

/// Basis of `skew(q) = {D : Dᵀq + qD = 0}`.
pub fn skew_basis(q: &Matrix) -> Vec<Matrix> {
    let b2 = q.rows();
    let mut system = Matrix::zeros(b2 * b2, b2 * b2);
    // (Dᵀq + qD)[i][j] = Σ_k D[k][i] q[k][j] + q[i][k] D[k][j]
    for i in 0..b2 {
        for j in 0..b2 {
            let row = i * b2 + j;
            for k in 0..b2 {
                let a = system[(row, k * b2 + i)].clone();
                system[(row, k * b2 + i)] = &a + &q[(k, j)];
                let b = system[(row, k * b2 + j)].clone();
                system[(row, k * b2 + j)] = &b + &q[(i, k)];
            }
        }
    }
    system
        .kernel()
        .into_iter()
        .map(|v| Matrix::from_rows(v.chunks(b2).map(<[Q]>::to_vec).collect()))
        .collect()
}

/// `ρ⁺` inverts the restriction `so(H) → End(H²)`. It is defined on all of
/// `skew(q)` with zero kernel exactly when the restriction is a bijection
/// onto `skew(q)` and the `so(H)` basis is independent on `H*`.
pub fn check_pi2_faithful(
    algebra: &GradedAlgebra,
    llv: &Llv,
    weil: &[WeilData],
) -> Result<Pi2Report> {
    let b2 = algebra.b2();
    let q = algebra.bb_form();
    let so = &llv.so_h.algebra;
    let skew_dim = skew_basis(q).len();
    let n = so.dim();
    let blocks: Vec<Matrix> = so
        .basis()
        .iter()
        .map(|d| d.block_or_zero(1).expect("shift 0"))
        .collect();
    let restricted: Vec<Vec<Q>> = blocks.iter().map(|b| b.data().to_vec()).collect();
    let restriction_rank = rank_of(b2 * b2, &restricted);
    let degree2_standard = blocks.iter().all(|b| is_q_skew(q, b)) && restriction_rank == skew_dim;
    let mut e = Echelon::new(GradedEndomorphism::flat_len(algebra.dims(), 0));
    for op in so.basis() {
        e.insert(op.to_sparse());
    }
    let kernel_dim = skew_dim.saturating_sub(e.rank().min(restriction_rank));
    let ops: Vec<GradedEndomorphism> = weil.iter().map(|w| w.extended.clone()).collect();
    let (weil_algebra_dim, weil_restriction_injective) = if ops.is_empty() {
        (0, true)
    } else {
        let l = lie_closure(&ops)?;
        let restricted: Vec<Vec<Q>> = l
            .basis()
            .iter()
            .map(|d| d.block_or_zero(1).expect("shift 0").data().to_vec())
            .collect();
        (l.dim(), rank_of(b2 * b2, &restricted) == l.dim())
    };
    let passed = kernel_dim == 0 && degree2_standard && n == skew_dim && weil_restriction_injective;
    Ok(Pi2Report {
        skew_dim,
        so_h_dim: n,
        kernel_dim,
        degree2_standard,
        weil_operators: ops.len(),
        weil_algebra_dim,
        weil_restriction_injective,
        passed,
    })
}
