//! Primitive classes, the subalgebras `A_{2l}`, the `g_tot`-modules `B_{2l}`
//! and the decomposition `H^{2i} = (A_{2i−2} ∩ H^{2i}) ⊕ C^{2i}`.

use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::linalg::Matrix;
use crate::llv::Llv;
use crate::rational::Q;
use crate::ring::GradedAlgebra;
use crate::subspace::GradedSubspace;

/// `ker(g_{−2})` in every degree.
pub fn compute_prim(algebra: &GradedAlgebra, llv: &Llv) -> GradedSubspace {
    let dims = algebra.dims();
    let minus = llv.g.part(-2);
    let mut prim = GradedSubspace::zero(dims);
    for (k, &d) in dims.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let rows: Vec<Vec<Q>> = minus
            .iter()
            .filter_map(|op| op.block(k))
            .flat_map(|b| (0..b.rows()).map(move |r| b.row(r).to_vec()))
            .collect();
        let kernel = if rows.is_empty() {
            (0..d).map(|i| crate::ring::unit_vec(d, i)).collect()
        } else {
            Matrix::from_rows(rows).kernel()
        };
        for v in kernel {
            prim.insert(k, &v);
        }
    }
    prim
}

/// Span of all products `a·b` with `a ∈ S_ka`, `b ∈ T_kb`.
fn product_span(
    algebra: &GradedAlgebra,
    s: &GradedSubspace,
    ka: usize,
    t: &GradedSubspace,
    kb: usize,
    out: &mut GradedSubspace,
) {
    if ka + kb > algebra.top_level() {
        return;
    }
    for a in s.basis(ka) {
        for b in t.basis(kb) {
            let p = algebra.mul_coords(ka, &a, kb, &b);
            out.insert(ka + kb, &p);
        }
    }
}

/// Multiplicative closure of `gens` together with the unit.
pub fn generated_subalgebra(algebra: &GradedAlgebra, gens: &GradedSubspace) -> GradedSubspace {
    let dims = algebra.dims();
    let mut s = gens.clone();
    s.insert(0, &[Q::ONE]);
    for k in 2..dims.len() {
        for a in 1..=k / 2 {
            let snapshot = s.clone();
            product_span(algebra, &snapshot, a, &snapshot, k - a, &mut s);
        }
    }
    s
}

/// `A_{2l}`: the subalgebra generated by all classes of degree `≤ 2l`.
pub fn subalgebra_a(algebra: &GradedAlgebra, l: usize) -> GradedSubspace {
    let dims = algebra.dims();
    let mut gens = GradedSubspace::zero(dims);
    for k in 0..=l.min(dims.len() - 1) {
        gens = gens.sum(&GradedSubspace::level(dims, k));
    }
    generated_subalgebra(algebra, &gens)
}

/// The `g_tot`-module generated by a subspace.
pub fn module_generated(llv: &Llv, seeds: &GradedSubspace) -> GradedSubspace {
    let ops: Vec<&GradedEndomorphism> = llv.g.generators().iter().collect();
    seeds.saturate(&ops)
}

/// `B_{2l}`: the `g_tot`-module generated by `Prim ∩ A_{2l}`.
pub fn module_b(
    algebra: &GradedAlgebra,
    llv: &Llv,
    prim: &GradedSubspace,
    l: usize,
) -> GradedSubspace {
    module_generated(llv, &prim.intersection(&subalgebra_a(algebra, l)))
}

#[derive(Clone, Debug)]
pub struct OrthComplement {
    pub space: GradedSubspace,
    /// `S ∩ S^⊥ = 0` and `dim S + dim S^⊥ = dim H`.
    pub complementary: bool,
}

/// `{y : φ(s, y) = 0 for all s ∈ S}`.
pub fn orth_complement(algebra: &GradedAlgebra, s: &GradedSubspace) -> OrthComplement {
    let dims = algebra.dims();
    let top = algebra.top_level();
    let mut out = GradedSubspace::zero(dims);
    for k in 0..=top {
        let partner = top - k;
        let phi = algebra.phi_matrix(partner);
        let rows: Vec<Vec<Q>> = s
            .basis(partner)
            .iter()
            .map(|v| {
                (0..dims[k])
                    .map(|j| (0..dims[partner]).map(|i| &v[i] * &phi[(i, j)]).sum())
                    .collect()
            })
            .collect();
        let kernel = if rows.is_empty() {
            (0..dims[k])
                .map(|i| crate::ring::unit_vec(dims[k], i))
                .collect()
        } else {
            Matrix::from_rows(rows).kernel()
        };
        for v in kernel {
            out.insert(k, &v);
        }
    }
    let complementary =
        s.intersection(&out).is_zero() && s.total_dim() + out.total_dim() == algebra.total_dim();
    OrthComplement {
        space: out,
        complementary,
    }
}

/// One even degree `2i ≥ 2` of the decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct MarkmanDegree {
    pub degree: usize,
    pub dim: usize,
    /// `dim A_{2i−2} ∩ H^{2i}`.
    pub a_dim: usize,
    pub c_dim: usize,
    pub direct_sum: bool,
    /// `B_{2i−2} ∩ H^{2i} = A_{2i−2} ∩ H^{2i}`.
    pub step_v: bool,
    pub g0_stable: bool,
    /// `B_{2i−2} ⊕ B_{2i−2}^⊥ = H*` (vacuous for `C² = H²`).
    pub b_nondegenerate: bool,
    #[serde(skip)]
    pub a_part: GradedSubspace,
    #[serde(skip)]
    pub c_part: GradedSubspace,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkmanDecomposition {
    pub degrees: Vec<MarkmanDegree>,
    /// `⊕ C^{2i}` multiplicatively generates the algebra.
    pub generates: bool,
    pub verified: bool,
}

impl MarkmanDecomposition {
    pub fn c_part(&self, degree: usize) -> Option<&GradedSubspace> {
        self.degrees
            .iter()
            .find(|d| d.degree == degree)
            .map(|d| &d.c_part)
    }

    pub fn c_dims(&self) -> Vec<(usize, usize)> {
        self.degrees.iter().map(|d| (d.degree, d.c_dim)).collect()
    }
}

/// Computes `C² = H²` and `C^{2i} = B_{2i−2}^⊥ ∩ H^{2i}` for `i ≥ 2`, and
/// checks the direct sum, the identity `B ∩ H^{2i} = A ∩ H^{2i}`, `g_0`-stability
/// and generation.
pub fn markman_decompose(algebra: &GradedAlgebra, llv: &Llv) -> MarkmanDecomposition {
    let dims = algebra.dims();
    let top = algebra.top_level();
    let prim = compute_prim(algebra, llv);
    let g0 = llv.g.part(0);
    let mut degrees = Vec::new();
    let mut all_c = GradedSubspace::zero(dims);
    for i in 1..=top {
        let a = subalgebra_a(algebra, i - 1).at_level(i);
        let (c, step_v, b_nondegenerate) = if i == 1 {
            (GradedSubspace::level(dims, 1), true, true)
        } else {
            let b = module_b(algebra, llv, &prim, i - 1);
            let perp = orth_complement(algebra, &b);
            (
                perp.space.at_level(i),
                b.at_level(i) == a,
                perp.complementary,
            )
        };
        let direct_sum = a.intersection(&c).is_zero() && a.dim_at(i) + c.dim_at(i) == dims[i];
        let g0_stable = c.is_stable(&g0);
        all_c = all_c.sum(&c);
        degrees.push(MarkmanDegree {
            degree: 2 * i,
            dim: dims[i],
            a_dim: a.dim_at(i),
            c_dim: c.dim_at(i),
            direct_sum,
            step_v,
            g0_stable,
            b_nondegenerate,
            a_part: a,
            c_part: c,
        });
    }
    let generates = generated_subalgebra(algebra, &all_c).total_dim() == algebra.total_dim();
    let verified = generates
        && degrees
            .iter()
            .all(|d| d.direct_sum && d.step_v && d.g0_stable && d.b_nondegenerate);
    MarkmanDecomposition {
        degrees,
        generates,
        verified,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LlSpanningDegree {
    pub degree: usize,
    pub prim_dim: usize,
    /// Dimensions of `A_2·Prim^{2i}` per degree.
    pub span_dims: Vec<usize>,
    pub equals_module: bool,
    pub g0_stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LlSpanningReport {
    pub degrees: Vec<LlSpanningDegree>,
    /// `⊕_i A_2·Prim^{2i} = H*`.
    pub spans_all: bool,
    pub direct: bool,
    pub passed: bool,
}

/// Checks that the `g_tot`-module generated by `Prim^{2i}` is `A_2·Prim^{2i}`,
/// that these sum directly to the whole algebra, and that `Prim` is
/// `g_0`-stable.
pub fn verify_ll_spanning(algebra: &GradedAlgebra, llv: &Llv) -> LlSpanningReport {
    let dims = algebra.dims();
    let prim = compute_prim(algebra, llv);
    let a2 = subalgebra_a(algebra, 1);
    let g0 = llv.g.part(0);
    let mut degrees = Vec::new();
    let mut total = GradedSubspace::zero(dims);
    let mut dim_sum = 0;
    for i in 0..dims.len() {
        let p = prim.at_level(i);
        if p.is_zero() {
            continue;
        }
        let mut span = GradedSubspace::zero(dims);
        for ka in 0..dims.len() {
            product_span(algebra, &a2, ka, &p, i, &mut span);
        }
        let module = module_generated(llv, &p);
        dim_sum += span.total_dim();
        total = total.sum(&span);
        degrees.push(LlSpanningDegree {
            degree: 2 * i,
            prim_dim: p.dim_at(i),
            span_dims: span.level_dims(),
            equals_module: module == span,
            g0_stable: p.is_stable(&g0),
        });
    }
    let spans_all = total.total_dim() == algebra.total_dim();
    let direct = dim_sum == total.total_dim();
    let passed = spans_all && direct && degrees.iter().all(|d| d.equals_module && d.g0_stable);
    LlSpanningReport {
        degrees,
        spans_all,
        direct,
        passed,
    }
}
