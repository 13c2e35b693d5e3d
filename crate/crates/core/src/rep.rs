//! Rational representation analysis: commutants, the Casimir operator of
//! `so(H)` and isotypic splitting into trivial, standard and other parts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::lie::LieSubalgebra;
use crate::linalg::{Echelon, Insertion, Matrix, SparseVec};
use crate::rational::Q;
use crate::subspace::GradedSubspace;

/// Basis of `{X : XM = MX for every M in ops}` on `Q^d`.
pub fn commutant_of_matrices(ops: &[Matrix], d: usize) -> Vec<Matrix> {
    let mut e = Echelon::new(d * d);
    for m in ops {
        if e.is_full() {
            break;
        }
        // (XM − MX)[i][j] = Σ_k X[i][k] M[k][j] − Σ_k M[i][k] X[k][j]
        let rows: Vec<SparseVec> = (0..d * d)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / d, ij % d);
                let mut pairs = Vec::new();
                for k in 0..d {
                    let a = &m[(k, j)];
                    if !a.is_zero() {
                        pairs.push((i * d + k, a.clone()));
                    }
                    let b = &m[(i, k)];
                    if !b.is_zero() {
                        pairs.push((k * d + j, -b));
                    }
                }
                SparseVec::from_pairs(pairs)
            })
            .collect();
        for r in rows {
            if !r.is_zero() {
                e.insert(r);
            }
        }
    }
    e.null_space()
        .into_iter()
        .map(|v| Matrix::from_rows(v.chunks(d.max(1)).map(<[Q]>::to_vec).collect()))
        .collect()
}

/// Endomorphisms of `S` commuting with every operator; `S` must be stable.
pub fn commutant(ops: &[&GradedEndomorphism], s: &GradedSubspace) -> Result<Vec<Matrix>> {
    let restricted = s.restrict(ops)?;
    Ok(commutant_of_matrices(&restricted, s.total_dim()))
}

/// Matrices of `ops` on the span of `basis` (vectors in `Q^d`), if stable.
pub fn restrict_to_span(ops: &[Matrix], basis: &[Vec<Q>]) -> Option<Vec<Matrix>> {
    let d = basis.first().map_or(0, Vec::len);
    let mut e = Echelon::new(d);
    for (i, v) in basis.iter().enumerate() {
        e.insert_with_payload(SparseVec::from_dense(v), SparseVec::unit(i));
    }
    let n = basis.len();
    ops.iter()
        .map(|m| {
            let mut r = Matrix::zeros(n, n);
            for (j, v) in basis.iter().enumerate() {
                let img = SparseVec::from_dense(&m.mul_vec(v));
                let coords = e.coordinates(&img)?;
                let mut col = vec![Q::ZERO; n];
                for (row, c) in coords.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for (i, x) in e.payloads()[row].entries() {
                        col[*i] += &(c * x);
                    }
                }
                for (i, x) in col.into_iter().enumerate() {
                    r[(i, j)] = x;
                }
            }
            Some(r)
        })
        .collect()
}

/// Dual-basis data for the Casimir of `so(H)` with respect to the trace form
/// of its action on `H²`.
#[derive(Clone, Debug)]
pub struct CasimirData {
    ops: Vec<GradedEndomorphism>,
    gram_inverse: Matrix,
}

impl CasimirData {
    pub fn new(so_h: &LieSubalgebra) -> Result<Self> {
        let ops = so_h.basis().to_vec();
        let blocks: Vec<Matrix> = ops
            .iter()
            .map(|d| {
                d.block(1)
                    .cloned()
                    .unwrap_or_else(|| Matrix::zeros(so_h.dims()[1], so_h.dims()[1]))
            })
            .collect();
        let n = ops.len();
        let entries: Vec<Vec<Q>> = (0..n)
            .into_par_iter()
            .map(|a| {
                (0..n)
                    .map(|b| blocks[a].trace_of_product(&blocks[b]))
                    .collect()
            })
            .collect();
        let gram = Matrix::from_rows(entries);
        let gram_inverse = if n == 0 {
            Matrix::zeros(0, 0)
        } else {
            gram.inverse().ok_or_else(|| {
                Error::Structure("the trace form of so(H) on H² is degenerate".into())
            })?
        };
        Ok(CasimirData { ops, gram_inverse })
    }

    pub fn ops(&self) -> Vec<&GradedEndomorphism> {
        self.ops.iter().collect()
    }

    /// `Σ_{a,b} G^{ab} M_a M_b` from restricted matrices `M_a`.
    pub fn combine(&self, restricted: &[Matrix]) -> Matrix {
        let d = restricted.first().map_or(0, Matrix::rows);
        let n = restricted.len();
        let terms: Vec<Matrix> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut dual = Matrix::zeros(d, d);
                for (b, m) in restricted.iter().enumerate() {
                    let g = &self.gram_inverse[(a, b)];
                    if !g.is_zero() {
                        dual.add_scaled_assign(g, m);
                    }
                }
                restricted[a].mul(&dual)
            })
            .collect();
        let mut c = Matrix::zeros(d, d);
        for t in &terms {
            c.add_scaled_assign(&Q::ONE, t);
        }
        c
    }

    /// The Casimir operator on a stable subspace, in the basis `s.all_basis()`.
    pub fn on(&self, s: &GradedSubspace) -> Result<Matrix> {
        Ok(self.combine(&s.restrict(&self.ops())?))
    }
}

/// `casimir(so_h, S)`.
pub fn casimir(so_h: &LieSubalgebra, s: &GradedSubspace) -> Result<Matrix> {
    CasimirData::new(so_h)?.on(s)
}

/// Monic minimal polynomial, coefficients from the constant term up.
pub fn minimal_polynomial(m: &Matrix) -> Vec<Q> {
    let d = m.rows();
    let mut e = Echelon::new(d * d);
    let mut power = Matrix::identity(d);
    for k in 0..=d {
        match e.insert_with_payload(power.to_sparse(), SparseVec::unit(k)) {
            Insertion::New(_) => power = power.mul(m),
            Insertion::InSpan {
                payload_residual, ..
            } => return payload_residual.to_dense(k + 1),
        }
    }
    unreachable!("Cayley–Hamilton bounds the degree by the dimension")
}

const DIVISOR_LIMIT: u64 = 1_000_000_000_000;

fn divisors(n: &BigInt) -> Option<Vec<u64>> {
    let n = n.abs().to_u64().filter(|&n| n <= DIVISOR_LIMIT)?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1u64;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::ZERO, |acc, c| &(&acc * x) + c)
}

fn deflate(p: &[Q], r: &Q) -> Vec<Q> {
    // synthetic division by (x − r)
    let n = p.len() - 1;
    let mut q = vec![Q::ZERO; n];
    let mut carry = Q::ZERO;
    for i in (1..=n).rev() {
        carry = &p[i] + &(&carry * r);
        q[i - 1] = carry.clone();
    }
    q
}

/// Rational roots with multiplicity, and the degree of the part left unresolved
/// (irrational roots, or coefficients too large to enumerate divisors).
pub fn rational_roots(p: &[Q]) -> (Vec<(Q, usize)>, usize) {
    let mut p: Vec<Q> = p.to_vec();
    while p.len() > 1 && p.last().is_some_and(Q::is_zero) {
        p.pop();
    }
    let mut roots: Vec<(Q, usize)> = Vec::new();
    let push = |r: Q, roots: &mut Vec<(Q, usize)>| match roots.iter_mut().find(|(x, _)| *x == r) {
        Some((_, m)) => *m += 1,
        None => roots.push((r, 1)),
    };
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        push(Q::ZERO, &mut roots);
    }
    loop {
        if p.len() <= 1 {
            return (roots, 0);
        }
        let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
        let (Some(num_divs), Some(den_divs)) = (divisors(&ints[0]), divisors(ints.last().unwrap()))
        else {
            return (roots, p.len() - 1);
        };
        let mut found = None;
        'search: for &a in &num_divs {
            for &b in &den_divs {
                if a.gcd(&b) != 1 {
                    continue;
                }
                for sign in [1i64, -1] {
                    let r = Q::from_bigints(BigInt::from(a) * sign, BigInt::from(b));
                    if eval(&p, &r).is_zero() {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(r) => {
                p = deflate(&p, &r);
                push(r, &mut roots);
            }
            None => return (roots, p.len() - 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstituentKind {
    Trivial,
    Standard,
    Other,
}

/// One Casimir eigenspace and its identification.
#[derive(Clone, Debug, Serialize)]
pub struct Constituent {
    pub kind: ConstituentKind,
    pub casimir: Q,
    pub eigenspace_dim: usize,
    /// Dimension of one irreducible copy, when determined.
    pub irreducible_dim: Option<usize>,
    pub multiplicity: Option<usize>,
    /// `dim End_{so(H)}` of one irreducible copy, when determined.
    pub endomorphism_dim: Option<usize>,
    pub commutant_dim: usize,
    #[serde(skip)]
    pub basis: Vec<Vec<Q>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotypicReport {
    pub label: String,
    pub dim: usize,
    pub trivial_dim: usize,
    pub complement_dim: usize,
    pub standard_casimir: Q,
    pub constituents: Vec<Constituent>,
    /// Dimension of the part whose Casimir eigenvalues are not rational or
    /// could not be resolved.
    pub unresolved_dim: usize,
    pub commutant_dim: usize,
    pub casimir_central: bool,
    /// Commutant dimension equals `Σ m² · dim End(V)` over constituents.
    pub schur_consistent: bool,
}

impl IsotypicReport {
    pub fn multiplicity(&self, kind: ConstituentKind) -> usize {
        self.constituents
            .iter()
            .filter(|c| c.kind == kind)
            .filter_map(|c| c.multiplicity)
            .sum()
    }
}

/// Casimir data plus the values it takes on the standard representation `H²`.
#[derive(Clone, Debug)]
pub struct RepContext {
    pub casimir: CasimirData,
    pub b2: usize,
    pub standard_casimir: Q,
    pub standard_endomorphism_dim: usize,
}

impl RepContext {
    pub fn new(so_h: &LieSubalgebra) -> Result<Self> {
        let casimir = CasimirData::new(so_h)?;
        let dims = so_h.dims();
        let h2 = GradedSubspace::level(dims, 1);
        let c = casimir.on(&h2)?;
        let b2 = dims[1];
        let value = if b2 == 0 { Q::ZERO } else { c[(0, 0)].clone() };
        if c != Matrix::scalar(b2, &value) {
            return Err(Error::Structure(
                "the Casimir operator is not scalar on H²".into(),
            ));
        }
        let standard_endomorphism_dim = commutant(&casimir.ops(), &h2)?.len();
        Ok(RepContext {
            casimir,
            b2,
            standard_casimir: value,
            standard_endomorphism_dim,
        })
    }
}

/// Splits a stable subspace into its trivial part and Casimir eigenspaces,
/// identifying standard constituents by eigenvalue and dimension.
pub fn isotypic_decompose(
    ctx: &RepContext,
    s: &GradedSubspace,
    label: &str,
) -> Result<IsotypicReport> {
    let ops = ctx.casimir.ops();
    let restricted = s.restrict(&ops)?;
    let d = s.total_dim();
    let c = ctx.casimir.combine(&restricted);
    let casimir_central = restricted.iter().all(|m| c.mul(m) == m.mul(&c));

    let trivial_basis: Vec<Vec<Q>> = if d == 0 {
        Vec::new()
    } else if restricted.is_empty() {
        (0..d).map(|i| crate::ring::unit_vec(d, i)).collect()
    } else {
        Matrix::stack(&restricted.iter().collect::<Vec<_>>()).kernel()
    };
    let trivial_dim = trivial_basis.len();
    let commutant_dim = commutant_of_matrices(&restricted, d).len();

    let (roots, unresolved_degree) = if d == 0 {
        (Vec::new(), 0)
    } else {
        rational_roots(&minimal_polynomial(&c))
    };
    let mut constituents = Vec::new();
    let mut resolved = 0;
    for (lambda, _) in roots {
        let basis = c.sub(&Matrix::scalar(d, &lambda)).kernel();
        resolved += basis.len();
        let on_eigenspace = restrict_to_span(&restricted, &basis)
            .ok_or_else(|| Error::Inconsistent("a Casimir eigenspace is not stable".into()))?;
        let e = basis.len();
        let cdim = commutant_of_matrices(&on_eigenspace, e).len();
        let is_trivial = lambda.is_zero() && e == trivial_dim;
        let is_standard =
            !is_trivial && lambda == ctx.standard_casimir && ctx.b2 > 0 && e.is_multiple_of(ctx.b2);
        let constituent = if is_trivial {
            Constituent {
                kind: ConstituentKind::Trivial,
                casimir: lambda,
                eigenspace_dim: e,
                irreducible_dim: Some(1),
                multiplicity: Some(e),
                endomorphism_dim: Some(1),
                commutant_dim: cdim,
                basis,
            }
        } else if is_standard {
            Constituent {
                kind: ConstituentKind::Standard,
                casimir: lambda,
                eigenspace_dim: e,
                irreducible_dim: Some(ctx.b2),
                multiplicity: Some(e / ctx.b2),
                endomorphism_dim: Some(ctx.standard_endomorphism_dim),
                commutant_dim: cdim,
                basis,
            }
        } else {
            // commutant Q means a single absolutely irreducible copy
            let single = cdim == 1;
            Constituent {
                kind: ConstituentKind::Other,
                casimir: lambda,
                eigenspace_dim: e,
                irreducible_dim: single.then_some(e),
                multiplicity: single.then_some(1),
                endomorphism_dim: single.then_some(1),
                commutant_dim: cdim,
                basis,
            }
        };
        constituents.push(constituent);
    }
    let unresolved_dim = d - resolved;
    debug_assert!(unresolved_degree > 0 || unresolved_dim == 0);
    let schur_consistent = unresolved_dim == 0
        && constituents.iter().map(|c| c.commutant_dim).sum::<usize>() == commutant_dim
        && constituents
            .iter()
            .all(|c| match (c.multiplicity, c.endomorphism_dim) {
                (Some(m), Some(e)) => m * m * e == c.commutant_dim,
                _ => true,
            });
    Ok(IsotypicReport {
        label: label.to_string(),
        dim: d,
        trivial_dim,
        complement_dim: d - trivial_dim,
        standard_casimir: ctx.standard_casimir.clone(),
        constituents,
        unresolved_dim,
        commutant_dim,
        casimir_central,
        schur_consistent,
    })
}

/// At most one trivial and one standard constituent, nothing else.
pub fn check_markman_c(report: &IsotypicReport) -> bool {
    report.unresolved_dim == 0
        && report
            .constituents
            .iter()
            .all(|c| c.kind != ConstituentKind::Other && c.multiplicity.is_some())
        && report.multiplicity(ConstituentKind::Trivial) <= 1
        && report.multiplicity(ConstituentKind::Standard) <= 1
}
