//! Fixtures and closed-form oracles shared by the integration tests.
#![allow(dead_code)]

use llv_core::builders::{build_augmented_model, build_k3, build_verbitsky_component};
use llv_core::forms::QuadraticFormSpec;
use llv_core::{GradedAlgebra, Q};

pub fn k3_lattice() -> GradedAlgebra {
    build_k3(&QuadraticFormSpec::k3_lattice()).unwrap()
}

pub fn k3_small() -> GradedAlgebra {
    build_k3(&QuadraticFormSpec::parse("U+<1,-1>").unwrap()).unwrap()
}

pub fn sh5() -> GradedAlgebra {
    build_verbitsky_component(&QuadraticFormSpec::parse("U+<1,1,1>").unwrap(), 2, 0).unwrap()
}

/// `sh5()` built once per test binary.
pub fn sh5_shared() -> &'static GradedAlgebra {
    static CELL: std::sync::OnceLock<GradedAlgebra> = std::sync::OnceLock::new();
    CELL.get_or_init(sh5)
}

pub fn augmented(t: usize) -> GradedAlgebra {
    build_augmented_model(&QuadraticFormSpec::parse("U+<1,1,1>").unwrap(), 2, t, 0).unwrap()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim Sym^k(Q^b)`.
pub fn sym_dim(b: usize, k: usize) -> usize {
    if k == 0 {
        return 1;
    }
    if b == 0 {
        return 0;
    }
    binomial(b + k - 1, k)
}

/// `dim so(m)`.
pub fn so_dim(m: usize) -> usize {
    m * (m - 1) / 2
}

/// Betti profile of the subalgebra generated by degree 2 in a hyperkähler
/// of dimension `2n`, plus `t` extra middle classes.
pub fn verbitsky_dims(b2: usize, n: usize, t: usize) -> Vec<usize> {
    (0..=2 * n)
        .map(|k| sym_dim(b2, k.min(2 * n - k)) + if k == n { t } else { 0 })
        .collect()
}

/// Hodge numbers `(p, q, h)` of `Sym^k` of a weight-2 structure with numbers
/// `(1, b2 − 2, 1)`, Tate-shifted to degree `2·level`, plus `extra` classes of
/// type `(n, n)` in the middle. Sorted by decreasing `p`.
pub fn verbitsky_hodge(
    b2: usize,
    n: usize,
    level: usize,
    extra: usize,
) -> Vec<(usize, usize, usize)> {
    let k = level.min(2 * n - level);
    let shift = level - k;
    // choose a copies of (2,0), c copies of (0,2), the rest (1,1)
    let mut counts = std::collections::BTreeMap::new();
    for a in 0..=k {
        for c in 0..=k - a {
            let m = k - a - c;
            let p = 2 * a + m + shift;
            let q = 2 * c + m + shift;
            *counts.entry((p, q)).or_insert(0) += sym_dim(b2 - 2, m);
        }
    }
    if level == n {
        *counts.entry((n, n)).or_insert(0) += extra;
    }
    let mut out: Vec<(usize, usize, usize)> =
        counts.into_iter().map(|((p, q), h)| (p, q, h)).collect();
    out.sort_by_key(|x| std::cmp::Reverse(x.0));
    out
}

pub fn q(v: i64) -> Q {
    Q::int(v)
}
