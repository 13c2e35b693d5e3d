//! Fixture algebras: K3-type rings, Verbitsky components `Sym(H²)/(x^{n+1} : q(x) = 0)`
//! and Verbitsky components augmented by extra middle-degree classes.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forms::{bilinear, HyperbolicFrame, QuadraticFormSpec};
use crate::linalg::{Echelon, Matrix, SparseVec};
use crate::rational::Q;
use crate::ring::{AlgebraParts, GradedAlgebra};

const BATCH: usize = 8;
const MAX_BATCHES: usize = 4096;

fn degree_two_labels(b2: usize) -> Vec<String> {
    (1..=b2).map(|i| format!("e{i}")).collect()
}

fn finish(parts: AlgebraParts) -> Result<GradedAlgebra> {
    let algebra = GradedAlgebra::from_parts(parts)?;
    let report = algebra.validate();
    if !report.is_ok() {
        return Err(Error::Validation(report.summary()));
    }
    Ok(algebra)
}

/// The ring `Q ⊕ H ⊕ Q·vol` with `x·y = q(x, y)·vol`.
pub fn build_k3(form: &QuadraticFormSpec) -> Result<GradedAlgebra> {
    let q = form.validated_matrix()?;
    let b2 = q.rows();
    let mut products = vec![
        ((0, 0, 0, 0), SparseVec::unit(0)),
        ((0, 0, 4, 0), SparseVec::unit(0)),
    ];
    products.push(((4, 0, 0, 0), SparseVec::unit(0)));
    for i in 0..b2 {
        products.push(((0, 0, 2, i), SparseVec::unit(i)));
        products.push(((2, i, 0, 0), SparseVec::unit(i)));
        for j in 0..b2 {
            products.push((
                (2, i, 2, j),
                SparseVec::from_pairs(vec![(0, q[(i, j)].clone())]),
            ));
        }
    }
    finish(AlgebraParts {
        half_dim: 1,
        dims: vec![1, b2, 1],
        labels: vec![vec!["1".into()], degree_two_labels(b2), vec!["vol".into()]],
        products,
        bb_form: q,
    })
}

/// Monomials of `Sym^k(Q^vars)` as exponent vectors, `e1^k` first.
struct Monomials {
    list: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl Monomials {
    fn new(vars: usize, k: usize) -> Self {
        let mut list = Vec::new();
        let mut cur = vec![0u8; vars];
        fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if pos + 1 == cur.len() {
                cur[pos] = left as u8;
                out.push(cur.clone());
                return;
            }
            for e in (0..=left).rev() {
                cur[pos] = e as u8;
                rec(pos + 1, left - e, cur, out);
            }
            cur[pos] = 0;
        }
        rec(0, k, &mut cur, &mut list);
        let index = list
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Monomials { list, index }
    }

    fn len(&self) -> usize {
        self.list.len()
    }
}

fn monomial_label(m: &[u8]) -> String {
    let parts: Vec<String> = m
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                format!("e{}", i + 1)
            } else {
                format!("e{}^{}", i + 1, e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn sym_dim(vars: usize, k: usize) -> usize {
    binomial(vars + k - 1, k)
}

/// Multiplies a polynomial in `Sym^k` by the linear form `x`.
fn times_linear(from: &Monomials, to: &Monomials, p: &SparseVec, x: &[Q]) -> SparseVec {
    let mut pairs = Vec::new();
    for (m, c) in p.entries() {
        let mut mono = from.list[*m].clone();
        for (v, xv) in x.iter().enumerate() {
            if xv.is_zero() {
                continue;
            }
            mono[v] += 1;
            pairs.push((to.index[&mono], c * xv));
            mono[v] -= 1;
        }
    }
    SparseVec::from_pairs(pairs)
}

fn power(monos: &[Monomials], x: &[Q], e: usize) -> SparseVec {
    let mut p = SparseVec::unit(0);
    for k in 0..e {
        p = times_linear(&monos[k], &monos[k + 1], &p, x);
    }
    p
}

struct Component {
    half_dim: usize,
    dims: Vec<usize>,
    labels: Vec<Vec<String>>,
    products: Vec<((usize, usize, usize, usize), SparseVec)>,
    bb_form: Matrix,
}

fn random_isotropic(rng: &mut ChaCha8Rng, q: &Matrix, frame: &HyperbolicFrame) -> Vec<Q> {
    let z: Vec<Q> = (0..q.rows())
        .map(|_| Q::int(rng.gen_range(-3..=3)))
        .collect();
    let w = frame.project(q, &z);
    let s = loop {
        let s = rng.gen_range(-3i64..=3);
        if s != 0 {
            break s;
        }
    };
    frame.isotropic(q, &Q::int(s), &w)
}

fn verbitsky_component(form: &QuadraticFormSpec, n: usize, seed: u64) -> Result<Component> {
    let q = form.validated_matrix()?;
    let b2 = q.rows();
    if b2 < 3 {
        return Err(Error::Malformed(format!(
            "the Verbitsky component needs b2 >= 3, got {b2}"
        )));
    }
    if n == 0 {
        return Err(Error::Malformed("half dimension must be at least 1".into()));
    }
    let frame = HyperbolicFrame::find(&q).ok_or_else(|| {
        Error::Saturation(format!(
            "no rational isotropic vector found for {form}; supply a form with rational isotropic vectors, \
             for example one containing a U block"
        ))
    })?;
    let top = 2 * n;
    let monos: Vec<Monomials> = (0..=top).map(|k| Monomials::new(b2, k)).collect();

    // ideals I_k ⊂ Sym^k for k = n+1 ..= 2n
    let mut ideals: Vec<Echelon> = monos.iter().map(|m| Echelon::new(m.len())).collect();
    let target = |k: usize| sym_dim(b2, k) - sym_dim(b2, top - k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idle = 0;
    for _ in 0..MAX_BATCHES {
        let before = ideals[n + 1].rank();
        for _ in 0..BATCH {
            let x = random_isotropic(&mut rng, &q, &frame);
            ideals[n + 1].insert(power(&monos, &x, n + 1));
        }
        if ideals[n + 1].rank() == before {
            idle += 1;
            if idle == 2 {
                break;
            }
        } else {
            idle = 0;
        }
    }
    for k in n + 1..=top {
        if k > n + 1 {
            let prev: Vec<SparseVec> = ideals[k - 1].rows().to_vec();
            for p in &prev {
                for v in 0..b2 {
                    let mut x = vec![Q::ZERO; b2];
                    x[v] = Q::ONE;
                    ideals[k].insert(times_linear(&monos[k - 1], &monos[k], p, &x));
                }
            }
        }
        if ideals[k].rank() != target(k) {
            return Err(Error::Saturation(format!(
                "ideal in degree {} has rank {} but {} is required; supply a form with enough rational \
                 isotropic vectors, for example one containing a U block",
                2 * k,
                ideals[k].rank(),
                target(k)
            )));
        }
    }

    // quotient basis: non-pivot monomials
    let mut basis: Vec<Vec<usize>> = Vec::with_capacity(top + 1);
    let mut position: Vec<Vec<Option<usize>>> = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut is_pivot = vec![false; monos[k].len()];
        for &p in ideals[k].pivots() {
            is_pivot[p] = true;
        }
        let b: Vec<usize> = (0..monos[k].len()).filter(|&m| !is_pivot[m]).collect();
        let mut pos = vec![None; monos[k].len()];
        for (i, &m) in b.iter().enumerate() {
            pos[m] = Some(i);
        }
        basis.push(b);
        position.push(pos);
    }
    let normal_form = |k: usize, p: &SparseVec| -> SparseVec {
        let r = ideals[k].reduce(p);
        SparseVec::from_pairs(
            r.entries()
                .iter()
                .map(|(m, c)| (position[k][*m].expect("reduced off pivots"), c.clone()))
                .collect(),
        )
    };

    // ∫ x^{2n} = q(x)^n for any x
    let probe = (0..b2)
        .map(|i| crate::ring::unit_vec(b2, i))
        .chain(
            (0..b2)
                .flat_map(|i| (i + 1..b2).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let mut v = vec![Q::ZERO; b2];
                    v[i] = Q::ONE;
                    v[j] = Q::ONE;
                    v
                }),
        )
        .find(|v| !bilinear(&q, v, v).is_zero())
        .expect("a non-degenerate form has an anisotropic basis vector or sum");
    let t = normal_form(top, &power(&monos, &probe, top)).get(0);
    if t.is_zero() {
        return Err(Error::Inconsistent(
            "top power of an anisotropic class vanishes in the quotient".into(),
        ));
    }
    let lambda = &t / &bilinear(&q, &probe, &probe).pow(n as u32);
    let top_scale = lambda.recip();

    let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
    let mut labels: Vec<Vec<String>> = basis
        .iter()
        .enumerate()
        .map(|(k, b)| {
            b.iter()
                .map(|&m| monomial_label(&monos[k].list[m]))
                .collect()
        })
        .collect();
    labels[top] = vec!["vol".into()];

    let mut products = Vec::new();
    for ka in 0..=top {
        for kb in 0..=top - ka {
            let kc = ka + kb;
            for (ia, &ma) in basis[ka].iter().enumerate() {
                for (ib, &mb) in basis[kb].iter().enumerate() {
                    let mono: Vec<u8> = monos[ka].list[ma]
                        .iter()
                        .zip(&monos[kb].list[mb])
                        .map(|(a, b)| a + b)
                        .collect();
                    let mut out = normal_form(kc, &SparseVec::unit(monos[kc].index[&mono]));
                    // the fundamental class is rescaled; products landing in it follow,
                    // products with it as a factor are unit products and stay fixed
                    if kc == top && ka != top && kb != top {
                        out = out.scale(&top_scale);
                    }
                    if !out.is_zero() {
                        products.push(((2 * ka, ia, 2 * kb, ib), out));
                    }
                }
            }
        }
    }
    Ok(Component {
        half_dim: n,
        dims,
        labels,
        products,
        bb_form: q,
    })
}

/// `Sym(H²)` modulo the ideal generated by `x^{n+1}` for isotropic `x`,
/// normalized so that `∫ x^{2n} = q(x)^n`. The ideal is found by rank
/// saturation over seeded random rational isotropic vectors.
pub fn build_verbitsky_component(
    form: &QuadraticFormSpec,
    n: usize,
    seed: u64,
) -> Result<GradedAlgebra> {
    let c = verbitsky_component(form, n, seed)?;
    finish(AlgebraParts {
        half_dim: c.half_dim,
        dims: c.dims,
        labels: c.labels,
        products: c.products,
        bb_form: c.bb_form,
    })
}

/// The Verbitsky component with `t` extra middle-degree classes `c_j`,
/// `c_j·c_k = δ_jk·vol` and `c_j` annihilated by all other positive-degree
/// classes.
pub fn build_augmented_model(
    form: &QuadraticFormSpec,
    n: usize,
    t: usize,
    seed: u64,
) -> Result<GradedAlgebra> {
    if n < 2 {
        return Err(Error::Malformed(
            "augmented models need half dimension at least 2".into(),
        ));
    }
    let mut c = verbitsky_component(form, n, seed)?;
    let base = c.dims[n];
    for j in 0..t {
        let idx = base + j;
        c.labels[n].push(format!("c{}", j + 1));
        c.products.push(((0, 0, 2 * n, idx), SparseVec::unit(idx)));
        c.products.push(((2 * n, idx, 0, 0), SparseVec::unit(idx)));
        c.products
            .push(((2 * n, idx, 2 * n, idx), SparseVec::unit(0)));
    }
    c.dims[n] += t;
    // products were keyed by index into the old middle block; they stay valid
    finish(AlgebraParts {
        half_dim: c.half_dim,
        dims: c.dims,
        labels: c.labels,
        products: c.products,
        bb_form: c.bb_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::AlgebraElement;

    #[test]
    fn monomial_enumeration() {
        let m = Monomials::new(3, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m.list[0], vec![2, 0, 0]);
        assert_eq!(monomial_label(&m.list[1]), "e1*e2");
        assert_eq!(sym_dim(5, 2), 15);
        assert_eq!(sym_dim(5, 0), 1);
    }

    #[test]
    fn k3_products_follow_the_form() {
        let a = build_k3(&QuadraticFormSpec::diagonal(&[1, 1])).unwrap();
        assert_eq!(a.dims(), &[1, 2, 1]);
        let e1 = a.basis_element(2, 0);
        assert_eq!(a.integrate(&a.cup(&e1, &e1).unwrap()), Q::ONE);
        assert!(build_k3(&QuadraticFormSpec::diagonal(&[1, 0])).is_err());
    }

    #[test]
    fn small_verbitsky_component() {
        let form = QuadraticFormSpec::hyperbolic_plus_ones(5);
        let a = build_verbitsky_component(&form, 2, 7).unwrap();
        assert_eq!(a.dims(), &[1, 5, 15, 5, 1]);
        // x^3 = 0 for isotropic x = e1
        let x = a.basis_element(2, 0);
        let x2 = a.cup(&x, &x).unwrap();
        assert!(a.cup(&x2, &x).unwrap().is_zero());
        let y = AlgebraElement::new(2, vec![Q::ONE, Q::ONE, Q::ZERO, Q::ONE, Q::ZERO]);
        let y2 = a.cup(&y, &y).unwrap();
        let y4 = a.cup(&y2, &y2).unwrap();
        let qy = a.q(&y.coords, &y.coords);
        assert_eq!(a.integrate(&y4), qy.pow(2));
    }

    #[test]
    fn first_component_is_the_k3_ring() {
        let form = QuadraticFormSpec::hyperbolic_plus_ones(4);
        assert_eq!(
            build_verbitsky_component(&form, 1, 3).unwrap(),
            build_k3(&form).unwrap()
        );
    }

    #[test]
    fn augmented_model_extends_the_middle() {
        let form = QuadraticFormSpec::hyperbolic_plus_ones(5);
        let a = build_augmented_model(&form, 2, 1, 1).unwrap();
        assert_eq!(a.dims(), &[1, 5, 16, 5, 1]);
        let c = a.basis_element(4, 15);
        assert_eq!(a.integrate(&a.cup(&c, &c).unwrap()), Q::ONE);
        assert!(a.cup(&c, &a.basis_element(2, 0)).unwrap().is_zero());
        assert_eq!(
            build_augmented_model(&form, 2, 0, 1).unwrap(),
            build_verbitsky_component(&form, 2, 1).unwrap()
        );
        assert!(build_augmented_model(&form, 1, 1, 1).is_err());
    }

    #[test]
    fn anisotropic_forms_are_rejected() {
        let err =
            build_verbitsky_component(&QuadraticFormSpec::diagonal(&[1, 1, 1]), 2, 0).unwrap_err();
        assert!(matches!(err, Error::Saturation(_)));
    }
}
