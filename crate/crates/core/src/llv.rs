//! The total Lie algebra `g_tot` generated by all `L_x` and `Λ_x`, its
//! `so(H)` part, and the verification of `g_tot ≅ so(H ⊕ U)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::endomorphism::GradedEndomorphism;
use crate::error::{Error, Result};
use crate::lie::{grade_decompose, lie_closure, GradedParts, LieSubalgebra, Origin};
use crate::linalg::{Echelon, Matrix};
use crate::rational::Q;
use crate::ring::{unit_vec, AlgebraElement, GradedAlgebra};
use crate::sl2::{has_lefschetz_property, solve_lambda};

/// Human-readable statement of the model map used by [`verify_so_tilde`].
pub const MODEL_CONVENTION: &str = "H~ = H + <v,w> with q~(v,w) = 1, q~(v,v) = q~(w,w) = 0; \
theta -> (v -> -2v, w -> 2w, H -> 0); L_x -> E_x (v -> x, y -> -q(x,y) w, w -> 0); \
Lambda_x -> F_b with b = -2x/q(x,x) (w -> b, y -> -q(b,y) v, v -> 0)";

/// `g_tot` together with the data it was generated from.
#[derive(Clone, Debug)]
pub struct Llv {
    pub g: LieSubalgebra,
    pub parts: GradedParts,
    pub theta: GradedEndomorphism,
    /// Degree-2 classes whose `Λ_x` were used as generators.
    pub lefschetz_classes: Vec<Vec<Q>>,
    /// `L_{e_i}` for the basis of `H²`, in order.
    pub lefschetz_ops: Vec<GradedEndomorphism>,
    pub lambdas: Vec<GradedEndomorphism>,
    pub so_h: SoH,
}

/// `so(H) ⊂ g_0` and its degree-2 checks.
#[derive(Clone, Debug)]
pub struct SoH {
    pub algebra: LieSubalgebra,
    /// `false` when `[g_0, g_0]` was too small (abelian case) and the
    /// unit annihilator in `g_0` was used instead.
    pub from_derived: bool,
    pub restriction_injective: bool,
    pub image_is_skew: bool,
    pub derivations: bool,
}

impl SoH {
    pub fn is_standard(&self) -> bool {
        self.restriction_injective && self.image_is_skew && self.derivations
    }
}

fn candidate_classes(b2: usize) -> impl Iterator<Item = Vec<Q>> {
    let basis = (0..b2).map(move |i| unit_vec(b2, i));
    let sums = (0..b2)
        .flat_map(move |i| (i + 1..b2).map(move |j| (i, j)))
        .flat_map(move |(i, j)| {
            [Q::ONE, -Q::ONE].into_iter().map(move |s| {
                let mut v = unit_vec(b2, i);
                v[j] = s;
                v
            })
        });
    basis.chain(sums)
}

/// Generators `L_{e_i}` (all `i`) and `Λ_x` for Lefschetz classes `x`
/// drawn from basis vectors and then sums and differences of pairs, until
/// the solved `Λ_x` span a space of dimension `b2`.
/// `(L_{e_i}, Lefschetz classes used, their Λ)`.
pub type Generators = (
    Vec<GradedEndomorphism>,
    Vec<Vec<Q>>,
    Vec<GradedEndomorphism>,
);

pub fn llv_generators(algebra: &GradedAlgebra) -> Result<Generators> {
    let b2 = algebra.b2();
    let lefschetz_ops = (0..b2)
        .map(|i| algebra.lefschetz_operator(&algebra.basis_element(2, i)))
        .collect::<Result<Vec<_>>>()?;
    let mut classes = Vec::new();
    let mut lambdas = Vec::new();
    let mut span = Echelon::new(GradedEndomorphism::flat_len(algebra.dims(), -2));
    for x in candidate_classes(b2) {
        if span.rank() == b2 {
            break;
        }
        let elem = AlgebraElement::new(2, x.clone());
        if !has_lefschetz_property(algebra, &elem)? {
            continue;
        }
        let t = solve_lambda(algebra, &elem)?;
        if span.insert(t.f.to_sparse()) {
            classes.push(x);
            lambdas.push(t.f);
        }
    }
    if lambdas.is_empty() {
        return Err(Error::NoSl2(
            "no degree-2 class with the Lefschetz property was found".into(),
        ));
    }
    Ok((lefschetz_ops, classes, lambdas))
}

/// Builds `g_tot`, grades it by `ad(θ)` and extracts `so(H)`.
pub fn compute_llv(algebra: &GradedAlgebra) -> Result<Llv> {
    let (lefschetz_ops, lefschetz_classes, lambdas) = llv_generators(algebra)?;
    let generators: Vec<GradedEndomorphism> =
        lefschetz_ops.iter().chain(&lambdas).cloned().collect();
    let mut g = lie_closure(&generators)?;
    let theta = algebra.theta();
    let parts = grade_decompose(&mut g, &theta)?;
    let so_h = extract_so_h(algebra, &g, &parts)?;
    Ok(Llv {
        g,
        parts,
        theta,
        lefschetz_classes,
        lefschetz_ops,
        lambdas,
        so_h,
    })
}

fn degree_two_block(op: &GradedEndomorphism, b2: usize) -> Matrix {
    op.block(1)
        .cloned()
        .unwrap_or_else(|| Matrix::zeros(b2, b2))
}

/// `D^T q + q D = 0`.
pub fn is_q_skew(q: &Matrix, d: &Matrix) -> bool {
    d.transpose().mul(q).add(&q.mul(d)).is_zero()
}

/// `[g_0, g_0]`, checked to act faithfully on `H²` with image `skew(q)`.
pub fn extract_so_h(
    algebra: &GradedAlgebra,
    g: &LieSubalgebra,
    parts: &GradedParts,
) -> Result<SoH> {
    let dims = algebra.dims();
    let b2 = algebra.b2();
    let g0: Vec<&GradedEndomorphism> = parts.zero.iter().map(|&i| &g.basis()[i]).collect();

    // elements of g_0 killing the unit: an upper bound for [g_0, g_0]
    let unit_action: Vec<Q> = g0
        .iter()
        .map(|d| d.block(0).map(|b| b[(0, 0)].clone()).unwrap_or(Q::ZERO))
        .collect();
    let annihilator: Vec<GradedEndomorphism> = Matrix::from_rows(vec![unit_action])
        .kernel()
        .into_iter()
        .map(|c| {
            c.iter()
                .zip(&g0)
                .fold(GradedEndomorphism::zero(dims, 0), |acc, (x, d)| {
                    acc.add_scaled(x, d)
                })
        })
        .collect();
    let bound = annihilator.len();

    let pairs: Vec<(usize, usize)> = (0..g0.len())
        .flat_map(|i| (i + 1..g0.len()).map(move |j| (i, j)))
        .collect();
    let mut span = Echelon::new(GradedEndomorphism::flat_len(dims, 0));
    let mut derived = Vec::new();
    for chunk in pairs.chunks(256) {
        if span.rank() == bound {
            break;
        }
        let brackets: Vec<GradedEndomorphism> = chunk
            .par_iter()
            .map(|&(i, j)| g0[i].bracket(g0[j]))
            .collect();
        for b in brackets {
            if span.rank() == bound {
                break;
            }
            if !b.is_zero() && span.insert(b.to_sparse()) {
                derived.push(b);
            }
        }
    }
    let from_derived = !(derived.len() < bound && b2 <= 2);
    let elements = if from_derived { derived } else { annihilator };
    let so = LieSubalgebra::span_of(dims, &elements);

    let q = algebra.bb_form();
    let restricted: Vec<Matrix> = so.basis().iter().map(|d| degree_two_block(d, b2)).collect();
    let mut r = Echelon::new(b2 * b2);
    for m in &restricted {
        r.insert(m.to_sparse());
    }
    let restriction_injective = r.rank() == so.dim();
    let image_is_skew =
        restricted.iter().all(|m| is_q_skew(q, m)) && r.rank() == b2 * b2.saturating_sub(1) / 2;
    let derivations = so
        .basis()
        .par_iter()
        .all(|d| algebra.derivation_failure(d).is_none());
    Ok(SoH {
        algebra: so,
        from_derived,
        restriction_injective,
        image_is_skew,
        derivations,
    })
}

/// Outcome of comparing `g_tot` with the model `so(H ⊕ U)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SoTildeReport {
    pub dim_found: usize,
    pub dim_expected: usize,
    /// Dimensions of `g_{−2}, g_0, g_2`.
    pub grading_dims: [usize; 3],
    pub theta_central: bool,
    pub so_h_dim: usize,
    pub so_h_from_derived: bool,
    pub so_h_standard: bool,
    pub g2_is_lefschetz_span: bool,
    pub g_minus2_is_lambda_span: bool,
    pub lambda_span_dim: usize,
    pub theta_image_matches: bool,
    pub brackets_preserved: bool,
    pub bijective: bool,
    pub iso_verified: bool,
    pub convention: String,
    pub first_failure: Option<String>,
}

/// Model images of the generators: `E_{e_i}` then `F_b` for each Lefschetz class.
fn model_generators(algebra: &GradedAlgebra, llv: &Llv) -> Result<Vec<Matrix>> {
    let q = algebra.bb_form();
    let b2 = algebra.b2();
    let m = b2 + 2;
    let (v, w) = (b2, b2 + 1);
    let mut out = Vec::new();
    for i in 0..b2 {
        let x = unit_vec(b2, i);
        let qx = q.mul_vec(&x);
        let mut e = Matrix::zeros(m, m);
        for r in 0..b2 {
            e[(r, v)] = x[r].clone();
        }
        for j in 0..b2 {
            e[(w, j)] = -&qx[j];
        }
        out.push(e);
    }
    for x in &llv.lefschetz_classes {
        let qxx = algebra.q(x, x);
        if qxx.is_zero() {
            return Err(Error::Structure(format!(
                "Lefschetz class {x:?} is q-isotropic; the model map is undefined"
            )));
        }
        let c = -&(&Q::int(2) / &qxx);
        let b: Vec<Q> = x.iter().map(|a| a * &c).collect();
        let qb = q.mul_vec(&b);
        let mut f = Matrix::zeros(m, m);
        for r in 0..b2 {
            f[(r, w)] = b[r].clone();
        }
        for j in 0..b2 {
            f[(v, j)] = -&qb[j];
        }
        out.push(f);
    }
    Ok(out)
}

fn combine(images: &[Matrix], coords: &[(usize, Q)], size: usize) -> Matrix {
    let mut acc = Matrix::zeros(size, size);
    for (i, c) in coords {
        acc.add_scaled_assign(c, &images[*i]);
    }
    acc
}

/// Verifies that the map fixed by `θ ↦ h_0`, `L_x ↦ E_x`, `Λ_x ↦ F_{−2x/q(x)}`
/// extends to a Lie algebra isomorphism `g_tot → so(H ⊕ U)`.
///
/// The map is defined on the basis through the bracket history of the closure.
/// A linear map that intertwines `ad` of every generator with `ad` of its image
/// is a homomorphism, so only generator-by-basis brackets are compared.
pub fn verify_so_tilde(algebra: &GradedAlgebra, llv: &Llv) -> Result<SoTildeReport> {
    let b2 = algebra.b2();
    let size = b2 + 2;
    let g = &llv.g;
    let dim_expected = (b2 + 2) * (b2 + 1) / 2;
    let mut first_failure: Option<String> = None;
    let mut fail = |msg: String| {
        if first_failure.is_none() {
            first_failure = Some(msg);
        }
    };

    let theta_central = llv
        .parts
        .zero
        .iter()
        .all(|&i| llv.theta.bracket(&g.basis()[i]).is_zero());
    if !theta_central {
        fail("θ is not central in g_0".into());
    }
    let plus = LieSubalgebra::span_of(
        g.dims(),
        &g.part(2).into_iter().cloned().collect::<Vec<_>>(),
    );
    let g2_is_lefschetz_span =
        plus.same_span(&LieSubalgebra::span_of(g.dims(), &llv.lefschetz_ops));
    if !g2_is_lefschetz_span {
        fail("g_2 differs from the span of the L_x".into());
    }
    let minus = LieSubalgebra::span_of(
        g.dims(),
        &g.part(-2).into_iter().cloned().collect::<Vec<_>>(),
    );
    let lambda_span = LieSubalgebra::span_of(g.dims(), &llv.lambdas);
    let g_minus2_is_lambda_span = lambda_span.dim() == b2 && minus.same_span(&lambda_span);
    if !g_minus2_is_lambda_span {
        fail(format!(
            "g_-2 (dim {}) differs from the span of the Λ_x (dim {})",
            minus.dim(),
            lambda_span.dim()
        ));
    }
    let so_h_standard =
        llv.so_h.is_standard() && llv.so_h.algebra.dim() == b2 * b2.saturating_sub(1) / 2;
    if !so_h_standard {
        fail("so(H) does not restrict to skew(q) on degree 2".into());
    }
    if g.dim() != dim_expected {
        fail(format!(
            "dim g_tot = {} but dim so(H~) = {dim_expected}",
            g.dim()
        ));
    }

    let gen_images = model_generators(algebra, llv)?;
    let mut images: Vec<Matrix> = Vec::with_capacity(g.dim());
    for origin in g.origins() {
        let img = match *origin {
            Origin::Generator(i) => gen_images[i].clone(),
            Origin::Bracket { generator, element } => {
                gen_images[generator].commutator(&images[element])
            }
        };
        images.push(img);
    }

    let mut h0 = Matrix::zeros(size, size);
    h0[(b2, b2)] = Q::int(-2);
    h0[(b2 + 1, b2 + 1)] = Q::int(2);
    let theta_image_matches = match g.coordinates(&llv.theta) {
        Some(c) => combine(&images, &c, size) == h0,
        None => false,
    };
    if !theta_image_matches {
        fail("θ does not map to h_0".into());
    }

    // generators that were not inserted must map consistently
    let mut brackets_preserved = true;
    for (i, gen) in g.generators().iter().enumerate() {
        let consistent = g
            .coordinates(gen)
            .is_some_and(|c| combine(&images, &c, size) == gen_images[i]);
        if !consistent {
            brackets_preserved = false;
            fail(format!("generator {i} is inconsistent with the model map"));
            break;
        }
    }
    if brackets_preserved {
        let pairs: Vec<(usize, usize)> = (0..g.generators().len())
            .flat_map(|a| (0..g.dim()).map(move |z| (a, z)))
            .collect();
        let bad = pairs.par_iter().find_first(|&&(a, z)| {
            let br = g.generators()[a].bracket(&g.basis()[z]);
            match g.coordinates(&br) {
                Some(c) => combine(&images, &c, size) != gen_images[a].commutator(&images[z]),
                None => true,
            }
        });
        if let Some(&(a, z)) = bad {
            brackets_preserved = false;
            fail(format!(
                "bracket of generator {a} with basis element {z} is not preserved"
            ));
        }
    }

    let q_tilde = algebra
        .bb_form()
        .direct_sum(&Matrix::from_i64(&[&[0, 1], &[1, 0]]));
    let all_skew = images.iter().all(|m| is_q_skew(&q_tilde, m));
    let mut rank = Echelon::new(size * size);
    for m in &images {
        rank.insert(m.to_sparse());
    }
    let bijective = all_skew && rank.rank() == g.dim() && g.dim() == dim_expected;
    if !bijective {
        fail(format!(
            "model images: skew = {all_skew}, rank {} for dim g_tot {} and dim so(H~) {dim_expected}",
            rank.rank(),
            g.dim()
        ));
    }

    let iso_verified = theta_central
        && g2_is_lefschetz_span
        && g_minus2_is_lambda_span
        && so_h_standard
        && theta_image_matches
        && brackets_preserved
        && bijective;
    Ok(SoTildeReport {
        dim_found: g.dim(),
        dim_expected,
        grading_dims: llv.parts.dims(),
        theta_central,
        so_h_dim: llv.so_h.algebra.dim(),
        so_h_from_derived: llv.so_h.from_derived,
        so_h_standard,
        g2_is_lefschetz_span,
        g_minus2_is_lambda_span,
        lambda_span_dim: lambda_span.dim(),
        theta_image_matches,
        brackets_preserved,
        bijective,
        iso_verified,
        convention: MODEL_CONVENTION.into(),
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_k3;
    use crate::forms::QuadraticFormSpec;

    #[test]
    fn small_k3_matches_the_model() {
        let a = build_k3(&QuadraticFormSpec::parse("U+<1,-1>").unwrap()).unwrap();
        let llv = compute_llv(&a).unwrap();
        assert_eq!(llv.g.dim(), 15);
        assert_eq!(llv.parts.dims(), [4, 7, 4]);
        assert_eq!(llv.so_h.algebra.dim(), 6);
        let r = verify_so_tilde(&a, &llv).unwrap();
        assert!(r.iso_verified, "{r:?}");
    }

    #[test]
    fn rank_two_uses_the_unit_annihilator() {
        let a = build_k3(&QuadraticFormSpec::diagonal(&[1, 1])).unwrap();
        let llv = compute_llv(&a).unwrap();
        assert_eq!(llv.g.dim(), 6);
        assert!(!llv.so_h.from_derived);
        let r = verify_so_tilde(&a, &llv).unwrap();
        assert!(r.iso_verified, "{r:?}");
    }
}
