//! Finiteness certificates: every grading-preserving algebra automorphism
//! that is trivial on `H²` and commutes with `g_tot` acts by `±1` on each
//! constituent of the `C^{2i}`, `i ≥ 2`, so the group embeds in `(Z/2)^N`.

use serde::Serialize;

use crate::decomposition::MarkmanDecomposition;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::llv::Llv;
use crate::rational::Q;
use crate::rep::{check_markman_c, commutant, isotypic_decompose, ConstituentKind, RepContext};
use crate::ring::{AlgebraElement, GradedAlgebra};
use crate::sl2::has_lefschetz_property;
use crate::subspace::GradedSubspace;

pub const EXPONENT_RULE: &str = "phi_omega(a, b) = phi(L_omega^(2(n - i)) a, b) on H^(2i); \
the exponent n - i would pair degrees 2n + 2i and 4n, which is only degree-correct at i = n";

pub const CONSTRAINTS: [&str; 4] = [
    "algebra automorphism of H^even",
    "preserves the grading",
    "restricts to the identity on H^2",
    "commutes with every element of g_tot",
];

/// `φ_ω` on the span of `basis` (vectors in degree `2i`).
pub fn phi_omega(
    algebra: &GradedAlgebra,
    omega: &[Q],
    i: usize,
    basis: &[Vec<Q>],
) -> Result<Matrix> {
    if !has_lefschetz_property(algebra, &AlgebraElement::new(2, omega.to_vec()))? {
        return Err(Error::NoSl2(
            "ω does not have the Lefschetz property".into(),
        ));
    }
    let n = algebra.half_dim();
    if i > 2 * n {
        return Err(Error::WrongDegree {
            expected: 4 * n,
            found: 2 * i,
        });
    }
    if basis.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    if i > n {
        return Err(Error::Malformed(format!(
            "φ_ω needs 2i ≤ 2n, got degree {} above the middle",
            2 * i
        )));
    }
    let l = algebra.lefschetz_operator(&AlgebraElement::new(2, omega.to_vec()))?;
    let pairing = algebra.phi_matrix(2 * n - i);
    let raised: Vec<Vec<Q>> = basis
        .iter()
        .map(|v| {
            let mut w = v.clone();
            for k in i..2 * n - i {
                w = l.apply_level(k, &w).expect("raising stays below the top").1;
            }
            pairing.transpose().mul_vec(&w)
        })
        .collect();
    let m = basis.len();
    let mut out = Matrix::zeros(m, m);
    for (r, lw) in raised.iter().enumerate() {
        for (c, v) in basis.iter().enumerate() {
            out[(r, c)] = lw.iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }
    Ok(out)
}

/// The affine space of `T` commuting with `g_tot` and equal to the identity on `H²`.
#[derive(Clone, Debug)]
pub struct ConstraintSpace {
    /// Basis of the commutant on `H*`, in the standard basis ordered by degree.
    pub commutant: Vec<Matrix>,
    pub particular: Option<Matrix>,
    /// Directions of the affine space.
    pub directions: Vec<Matrix>,
    pub grading_preserving: bool,
}

impl ConstraintSpace {
    pub fn affine_dim(&self) -> Option<usize> {
        self.particular.as_ref().map(|_| self.directions.len())
    }
}

fn level_offsets(dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    for d in dims {
        out.push(out.last().unwrap() + d);
    }
    out
}

pub fn commutant_constraint_space(algebra: &GradedAlgebra, llv: &Llv) -> Result<ConstraintSpace> {
    let dims = algebra.dims();
    let full = GradedSubspace::full(dims);
    let ops: Vec<_> = llv.g.generators().iter().collect();
    let basis = commutant(&ops, &full)?;
    let off = level_offsets(dims);
    let b2 = algebra.b2();
    let theta = full.restrict(&[&llv.theta])?.remove(0);
    let grading_preserving = basis.iter().all(|t| t.mul(&theta) == theta.mul(t));
    // Σ c_j T_j restricted to H² equals the identity
    let mut system = Matrix::zeros(b2 * b2, basis.len());
    for (j, t) in basis.iter().enumerate() {
        for r in 0..b2 {
            for c in 0..b2 {
                system[(r * b2 + c, j)] = t[(off[1] + r, off[1] + c)].clone();
            }
        }
    }
    let identity = Matrix::identity(b2);
    let combine = |coef: &[Q]| {
        let d = full.total_dim();
        let mut m = Matrix::zeros(d, d);
        for (c, t) in coef.iter().zip(&basis) {
            m.add_scaled_assign(c, t);
        }
        m
    };
    let particular = system.solve(identity.data()).map(|(c, _)| combine(&c));
    let directions = if particular.is_some() {
        system.kernel().iter().map(|c| combine(c)).collect()
    } else {
        Vec::new()
    };
    Ok(ConstraintSpace {
        commutant: basis,
        particular,
        directions,
        grading_preserving,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiOmegaCase {
    Nondegenerate,
    IdenticallyZero,
    /// Neither zero nor non-degenerate: the constituent is not irreducible.
    Partial,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentRecord {
    pub degree: usize,
    pub constituent_id: usize,
    pub kind: ConstituentKind,
    pub casimir: Q,
    pub dimension: usize,
    pub multiplicity: Option<usize>,
    pub phi_omega_rank: usize,
    pub phi_omega_case: PhiOmegaCase,
    pub phi_omega_nondegenerate: bool,
    /// `φ_ω` on the constituent when it is one-dimensional.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_omega_value: Option<Q>,
    /// Every element of the constraint space acts by 1 on this constituent.
    pub scalar_pinned: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    Failed {
        reason: String,
        degree: usize,
        constituent: Option<usize>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct FinitenessCertificate {
    pub constraints_used: Vec<String>,
    pub exponent_rule: String,
    pub omega: Vec<Q>,
    pub constraint_commutant_dim: usize,
    pub constraint_affine_dim: Option<usize>,
    pub markman_c: Vec<(usize, bool)>,
    pub components: Vec<ComponentRecord>,
    pub n: usize,
    pub bound: String,
    pub status: CertificateStatus,
}

impl FinitenessCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertificateStatus::Certified
    }

    pub fn failure(&self) -> Option<String> {
        match &self.status {
            CertificateStatus::Certified => None,
            CertificateStatus::Failed { reason, degree, .. } => {
                Some(format!("degree {degree}: {reason}"))
            }
        }
    }
}

fn bound_label(n: usize) -> String {
    match n {
        0 => "trivial group".into(),
        1 => "Z/2".into(),
        n => format!("(Z/2)^{n}"),
    }
}

/// Whether every `T` in the constraint space restricts to the identity on
/// the given degree-`2i` vectors.
fn pinned(space: &ConstraintSpace, offset: usize, vectors: &[Vec<Q>]) -> bool {
    let Some(p) = &space.particular else {
        return true;
    };
    let d = p.rows();
    vectors.iter().all(|v| {
        let mut full = vec![Q::ZERO; d];
        full[offset..offset + v.len()].clone_from_slice(v);
        p.mul_vec(&full) == full
            && space
                .directions
                .iter()
                .all(|t| t.mul_vec(&full).iter().all(Q::is_zero))
    })
}

pub fn certify(
    algebra: &GradedAlgebra,
    llv: &Llv,
    markman: &MarkmanDecomposition,
    omega: &[Q],
) -> Result<FinitenessCertificate> {
    if !has_lefschetz_property(algebra, &AlgebraElement::new(2, omega.to_vec()))? {
        return Err(Error::NoSl2(
            "ω does not have the Lefschetz property".into(),
        ));
    }
    let ctx = RepContext::new(&llv.so_h.algebra)?;
    let space = commutant_constraint_space(algebra, llv)?;
    let off = level_offsets(algebra.dims());
    let mut components = Vec::new();
    let mut markman_c = Vec::new();
    let mut failure = None;
    for md in markman.degrees.iter().filter(|d| d.degree >= 4) {
        let i = md.degree / 2;
        let c = &md.c_part;
        if c.is_zero() {
            continue;
        }
        let report = isotypic_decompose(&ctx, c, &format!("C^{}", md.degree))?;
        let ok = check_markman_c(&report);
        markman_c.push((md.degree, ok));
        let span = c.basis(i);
        for (id, con) in report.constituents.iter().enumerate() {
            // constituent basis is in coordinates of `c.all_basis()`, all at level i
            let vectors: Vec<Vec<Q>> = con
                .basis
                .iter()
                .map(|coef| {
                    let mut v = vec![Q::ZERO; algebra.dims()[i]];
                    for (a, b) in coef.iter().zip(&span) {
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += &(a * y);
                        }
                    }
                    v
                })
                .collect();
            let (rank, value) = if i > algebra.half_dim() {
                (0, None)
            } else {
                let f = phi_omega(algebra, omega, i, &vectors)?;
                let value = (f.rows() == 1).then(|| f[(0, 0)].clone());
                (f.rank(), value)
            };
            let case = if rank == vectors.len() && rank > 0 {
                PhiOmegaCase::Nondegenerate
            } else if rank == 0 {
                PhiOmegaCase::IdenticallyZero
            } else {
                PhiOmegaCase::Partial
            };
            if failure.is_none() {
                if con.multiplicity != Some(1) {
                    let m = con
                        .multiplicity
                        .map_or("undetermined".to_string(), |m| m.to_string());
                    failure = Some(CertificateStatus::Failed {
                        reason: format!(
                            "multiplicity {m} for a {:?} constituent (Casimir {}, commutant dimension {})",
                            con.kind, con.casimir, con.commutant_dim
                        ),
                        degree: md.degree,
                        constituent: Some(id),
                    });
                } else if case != PhiOmegaCase::Nondegenerate {
                    failure = Some(CertificateStatus::Failed {
                        reason: format!(
                            "φ_ω has rank {rank} on a constituent of dimension {}",
                            vectors.len()
                        ),
                        degree: md.degree,
                        constituent: Some(id),
                    });
                }
            }
            components.push(ComponentRecord {
                degree: md.degree,
                constituent_id: id,
                kind: con.kind,
                casimir: con.casimir.clone(),
                dimension: con.eigenspace_dim,
                multiplicity: con.multiplicity,
                phi_omega_rank: rank,
                phi_omega_nondegenerate: case == PhiOmegaCase::Nondegenerate,
                phi_omega_case: case,
                phi_omega_value: value,
                scalar_pinned: pinned(&space, off[i], &vectors),
            });
        }
        if failure.is_none() && (!ok || report.unresolved_dim > 0) {
            failure = Some(CertificateStatus::Failed {
                reason: format!(
                    "C^{} is not a sum of multiplicity-free trivial and standard parts",
                    md.degree
                ),
                degree: md.degree,
                constituent: None,
            });
        }
    }
    let n = components.len();
    Ok(FinitenessCertificate {
        constraints_used: CONSTRAINTS.iter().map(|s| s.to_string()).collect(),
        exponent_rule: EXPONENT_RULE.to_string(),
        omega: omega.to_vec(),
        constraint_commutant_dim: space.commutant.len(),
        constraint_affine_dim: space.affine_dim(),
        markman_c,
        components,
        n,
        bound: bound_label(n),
        status: failure.unwrap_or(CertificateStatus::Certified),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_augmented_model, build_k3, build_verbitsky_component};
    use crate::decomposition::markman_decompose;
    use crate::forms::QuadraticFormSpec;
    use crate::llv::compute_llv;
    use crate::ring::unit_vec;

    fn form() -> QuadraticFormSpec {
        QuadraticFormSpec::parse("U+<1,1,1>").unwrap()
    }

    fn omega(b2: usize) -> Vec<Q> {
        let mut w = unit_vec(b2, 2);
        w[0] = Q::ONE;
        w[1] = Q::ONE;
        w
    }

    #[test]
    fn k3_constraint_space_is_a_point() {
        let a = build_k3(&QuadraticFormSpec::parse("U+<1,-1>").unwrap()).unwrap();
        let llv = compute_llv(&a).unwrap();
        let s = commutant_constraint_space(&a, &llv).unwrap();
        assert_eq!(s.commutant.len(), 1);
        assert_eq!(s.affine_dim(), Some(0));
        assert!(s.grading_preserving);
        let f = phi_omega(
            &a,
            &unit_vec(4, 2),
            1,
            &(0..4).map(|i| unit_vec(4, i)).collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(f.rank(), 4);
    }

    #[test]
    fn augmented_certificates() {
        let a = build_augmented_model(&form(), 2, 1, 7).unwrap();
        let llv = compute_llv(&a).unwrap();
        let space = commutant_constraint_space(&a, &llv).unwrap();
        assert_eq!(space.affine_dim(), Some(1));
        let m = markman_decompose(&a, &llv);
        let cert = certify(&a, &llv, &m, &omega(5)).unwrap();
        assert!(cert.is_certified(), "{:?}", cert.status);
        assert_eq!(cert.n, 1);
        assert_eq!(cert.bound, "Z/2");
        assert!(!cert.components[0].scalar_pinned);

        let a2 = build_augmented_model(&form(), 2, 2, 7).unwrap();
        let llv2 = compute_llv(&a2).unwrap();
        let m2 = markman_decompose(&a2, &llv2);
        let cert2 = certify(&a2, &llv2, &m2, &omega(5)).unwrap();
        match &cert2.status {
            CertificateStatus::Failed { reason, degree, .. } => {
                assert_eq!(*degree, 4);
                assert!(reason.contains("multiplicity 2"), "{reason}");
            }
            s => panic!("expected failure, got {s:?}"),
        }
    }

    #[test]
    fn verbitsky_component_certifies_vacuously() {
        let a = build_verbitsky_component(&form(), 2, 3).unwrap();
        let llv = compute_llv(&a).unwrap();
        let m = markman_decompose(&a, &llv);
        let cert = certify(&a, &llv, &m, &omega(5)).unwrap();
        assert!(cert.is_certified());
        assert_eq!(cert.n, 0);
        assert_eq!(cert.bound, "trivial group");
        assert!(phi_omega(&a, &unit_vec(5, 0), 1, &[]).is_err());
    }
}
