//! Rational quadratic forms assembled from standard lattice blocks.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::Q;

/// Orthogonal summand of a form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormBlock {
    /// The hyperbolic plane `[[0,1],[1,0]]`.
    Hyperbolic,
    /// The negative definite `E8(−1)` lattice.
    E8Negative,
    /// The positive definite `E8` lattice.
    E8,
    /// Diagonal entries.
    Diagonal(Vec<Q>),
    /// An explicit symmetric matrix.
    Explicit(Matrix),
}

/// A symmetric bilinear form given as an orthogonal direct sum of blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFormSpec {
    blocks: Vec<FormBlock>,
}

// Bourbaki labelling of the E8 Dynkin diagram
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];

fn e8(sign: i64) -> Matrix {
    let mut m = Matrix::zeros(8, 8);
    for i in 0..8 {
        m[(i, i)] = Q::int(2 * sign);
    }
    for (a, b) in E8_EDGES {
        m[(a, b)] = Q::int(-sign);
        m[(b, a)] = Q::int(-sign);
    }
    m
}

impl FormBlock {
    pub fn matrix(&self) -> Matrix {
        match self {
            FormBlock::Hyperbolic => Matrix::from_i64(&[&[0, 1], &[1, 0]]),
            FormBlock::E8Negative => e8(-1),
            FormBlock::E8 => e8(1),
            FormBlock::Diagonal(d) => {
                let mut m = Matrix::zeros(d.len(), d.len());
                for (i, x) in d.iter().enumerate() {
                    m[(i, i)] = x.clone();
                }
                m
            }
            FormBlock::Explicit(m) => m.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            FormBlock::Hyperbolic => 2,
            FormBlock::E8Negative | FormBlock::E8 => 8,
            FormBlock::Diagonal(d) => d.len(),
            FormBlock::Explicit(m) => m.rows(),
        }
    }
}

impl fmt::Display for FormBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormBlock::Hyperbolic => write!(f, "U"),
            FormBlock::E8Negative => write!(f, "E8(-1)"),
            FormBlock::E8 => write!(f, "E8"),
            FormBlock::Diagonal(d) => {
                let s: Vec<String> = d.iter().map(Q::to_string).collect();
                write!(f, "<{}>", s.join(","))
            }
            FormBlock::Explicit(m) => write!(f, "matrix({}x{})", m.rows(), m.cols()),
        }
    }
}

impl fmt::Display for QuadraticFormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.blocks.iter().map(FormBlock::to_string).collect();
        write!(f, "{}", s.join("+"))
    }
}

impl QuadraticFormSpec {
    pub fn from_blocks(blocks: Vec<FormBlock>) -> Self {
        QuadraticFormSpec { blocks }
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        QuadraticFormSpec {
            blocks: vec![FormBlock::Diagonal(
                entries.iter().map(|&x| Q::int(x)).collect(),
            )],
        }
    }

    pub fn from_matrix(m: Matrix) -> Self {
        QuadraticFormSpec {
            blocks: vec![FormBlock::Explicit(m)],
        }
    }

    /// `U^3 ⊕ E8(−1)^2`, the K3 lattice (rank 22).
    pub fn k3_lattice() -> Self {
        QuadraticFormSpec {
            blocks: vec![
                FormBlock::Hyperbolic,
                FormBlock::Hyperbolic,
                FormBlock::Hyperbolic,
                FormBlock::E8Negative,
                FormBlock::E8Negative,
            ],
        }
    }

    /// `U ⊕ <1,…,1>` of the given rank (rank ≥ 2).
    pub fn hyperbolic_plus_ones(rank: usize) -> Self {
        assert!(rank >= 2);
        let mut blocks = vec![FormBlock::Hyperbolic];
        if rank > 2 {
            blocks.push(FormBlock::Diagonal(vec![Q::ONE; rank - 2]));
        }
        QuadraticFormSpec { blocks }
    }

    /// Default form of the given rank: the K3 lattice for 22, otherwise
    /// `U ⊕ <1,…,1>` (or `<1>` in rank one).
    pub fn default_for_rank(rank: usize) -> Self {
        match rank {
            22 => Self::k3_lattice(),
            1 => Self::diagonal(&[1]),
            r => Self::hyperbolic_plus_ones(r),
        }
    }

    /// Parses `k3`, or blocks joined by `+`: `U`, `U^3`, `E8(-1)`, `E8(-1)^2`,
    /// `E8`, `<a,b,…>` with rational entries.
    pub fn parse(expr: &str) -> Result<Self> {
        let expr = expr.trim();
        if expr.eq_ignore_ascii_case("k3") {
            return Ok(Self::k3_lattice());
        }
        let mut blocks = Vec::new();
        for term in split_terms(expr) {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::Malformed(format!("empty block in form {expr:?}")));
            }
            let (base, power) = match term.rsplit_once('^') {
                Some((b, p)) => {
                    let p: usize = p
                        .trim()
                        .parse()
                        .map_err(|_| Error::Malformed(format!("bad exponent in {term:?}")))?;
                    (b.trim(), p)
                }
                None => (term, 1),
            };
            let block = if base.eq_ignore_ascii_case("u") {
                FormBlock::Hyperbolic
            } else if base.eq_ignore_ascii_case("e8(-1)") {
                FormBlock::E8Negative
            } else if base.eq_ignore_ascii_case("e8") {
                FormBlock::E8
            } else if let Some(inner) = base.strip_prefix('<').and_then(|s| s.strip_suffix('>')) {
                let entries = inner
                    .split(',')
                    .map(|s| s.trim().parse::<Q>().map_err(Error::Malformed))
                    .collect::<Result<Vec<_>>>()?;
                FormBlock::Diagonal(entries)
            } else {
                return Err(Error::Malformed(format!("unknown form block {base:?}")));
            };
            for _ in 0..power {
                blocks.push(block.clone());
            }
        }
        Ok(QuadraticFormSpec { blocks })
    }

    pub fn blocks(&self) -> &[FormBlock] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(FormBlock::rank).sum()
    }

    pub fn matrix(&self) -> Matrix {
        self.blocks
            .iter()
            .fold(Matrix::zeros(0, 0), |acc, b| acc.direct_sum(&b.matrix()))
    }

    /// The Gram matrix, after checking symmetry and non-degeneracy.
    pub fn validated_matrix(&self) -> Result<Matrix> {
        let m = self.matrix();
        if m.rows() == 0 {
            return Err(Error::DegenerateForm("form has rank zero".into()));
        }
        if !m.is_symmetric() {
            return Err(Error::DegenerateForm("form matrix is not symmetric".into()));
        }
        if m.determinant().is_zero() {
            return Err(Error::DegenerateForm(format!("form {self} is degenerate")));
        }
        Ok(m)
    }
}

/// `x^T m y`.
pub fn bilinear(m: &Matrix, x: &[Q], y: &[Q]) -> Q {
    let my = m.mul_vec(y);
    x.iter()
        .zip(&my)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, b)| a * b)
        .sum()
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    let r = Q::from_bigints(n, d);
    (&r * &r == *x).then_some(r)
}

/// Searches small rational vectors for a non-zero isotropic vector of `m`.
pub fn find_isotropic(m: &Matrix) -> Option<Vec<Q>> {
    let n = m.rows();
    let e = |i: usize| {
        let mut v = vec![Q::ZERO; n];
        v[i] = Q::ONE;
        v
    };
    for i in 0..n {
        if m[(i, i)].is_zero() {
            return Some(e(i));
        }
    }
    // q(e_i + t e_j) = q_ii + 2t q_ij + t² q_jj
    for i in 0..n {
        for j in i + 1..n {
            let (a, b, c) = (&m[(j, j)], &m[(i, j)], &m[(i, i)]);
            let disc = &(b * b) - &(a * c);
            if let Some(r) = rational_sqrt(&disc) {
                let t = &(&-b + &r) / a;
                let mut v = e(i);
                v[j] = t;
                return Some(v);
            }
        }
    }
    let k = n.min(5);
    let total = 5usize.pow(k as u32);
    for code in 1..total {
        let mut v = vec![Q::ZERO; n];
        let mut c = code;
        for x in v.iter_mut().take(k) {
            *x = Q::int((c % 5) as i64 - 2);
            c /= 5;
        }
        if v.iter().any(|x| !x.is_zero()) && bilinear(m, &v, &v).is_zero() {
            return Some(v);
        }
    }
    None
}

/// A hyperbolic pair `(u, u')` with `q(u) = q(u') = 0`, `q(u, u') = 1`.
#[derive(Clone, Debug)]
pub struct HyperbolicFrame {
    pub u: Vec<Q>,
    pub u_dual: Vec<Q>,
}

impl HyperbolicFrame {
    pub fn find(m: &Matrix) -> Option<Self> {
        let u = find_isotropic(m)?;
        let n = m.rows();
        let mu = m.mul_vec(&u);
        let j = (0..n).find(|&j| !mu[j].is_zero())?;
        let mut v = vec![Q::ZERO; n];
        v[j] = Q::ONE;
        let quv = mu[j].clone();
        let qvv = m[(j, j)].clone();
        let shift = &qvv / &(&Q::int(2) * &quv);
        let inv = quv.recip();
        let u_dual: Vec<Q> = v
            .iter()
            .zip(&u)
            .map(|(a, b)| &(a - &(&shift * b)) * &inv)
            .collect();
        Some(HyperbolicFrame { u, u_dual })
    }

    /// Projection of `z` onto the orthogonal complement of the frame.
    pub fn project(&self, m: &Matrix, z: &[Q]) -> Vec<Q> {
        let a = bilinear(m, z, &self.u_dual);
        let b = bilinear(m, z, &self.u);
        z.iter()
            .zip(&self.u)
            .zip(&self.u_dual)
            .map(|((z, u), ud)| &(z - &(&a * u)) - &(&b * ud))
            .collect()
    }

    /// The isotropic vector `s·u − q(w)/(2s)·u' + w` for `w` orthogonal to the frame.
    pub fn isotropic(&self, m: &Matrix, s: &Q, w: &[Q]) -> Vec<Q> {
        let t = -(&bilinear(m, w, w) / &(&Q::int(2) * s));
        w.iter()
            .zip(&self.u)
            .zip(&self.u_dual)
            .map(|((w, u), ud)| &(w + &(s * u)) + &(&t * ud))
            .collect()
    }
}

fn split_terms(expr: &str) -> Vec<&str> {
    // split on '+' outside angle brackets
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in expr.char_indices() {
        match c {
            '<' => depth += 1,
            '>' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&expr[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&expr[start..]);
    out
}
