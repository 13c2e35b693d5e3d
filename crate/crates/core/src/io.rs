//! Canonical JSON persistence of structure constants.
//!
//! Keys are emitted in sorted order, rationals as reduced `"p/q"` strings and
//! products in lexicographic `(da, ia, db, ib)` order, so saving is a
//! function of the algebra alone.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::forms::QuadraticFormSpec;
use crate::linalg::{Matrix, SparseVec};
use crate::rational::Q;
use crate::ring::{AlgebraParts, GradedAlgebra};

// Field declaration order is alphabetical so serialization sorts keys.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    bb_form: Vec<Vec<String>>,
    degrees: Vec<DegreeEntry>,
    half_dim: usize,
    products: Vec<ProductEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeEntry {
    deg: usize,
    dim: usize,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProductEntry {
    da: usize,
    db: usize,
    ia: usize,
    ib: usize,
    out: Vec<OutEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutEntry {
    coef: String,
    ic: usize,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        message: message.into(),
    }
}

fn rational(location: String, s: &str) -> Result<Q> {
    Q::parse_canonical(s).map_err(|m| schema(location, m))
}

/// Canonical JSON text of an algebra, terminated by a newline.
pub fn to_canonical_json(algebra: &GradedAlgebra) -> String {
    let b2 = algebra.bb_form().rows();
    let file = AlgebraFile {
        bb_form: (0..b2)
            .map(|i| {
                (0..b2)
                    .map(|j| algebra.bb_form()[(i, j)].to_canonical())
                    .collect()
            })
            .collect(),
        degrees: algebra
            .dims()
            .iter()
            .zip(algebra.labels())
            .enumerate()
            .map(|(k, (&dim, labels))| DegreeEntry {
                deg: 2 * k,
                dim,
                labels: labels.clone(),
            })
            .collect(),
        half_dim: algebra.half_dim(),
        products: algebra
            .products()
            .map(|((da, ia, db, ib), out)| ProductEntry {
                da,
                db,
                ia,
                ib,
                out: out
                    .entries()
                    .iter()
                    .map(|(ic, c)| OutEntry {
                        coef: c.to_canonical(),
                        ic: *ic,
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("algebra files always serialize");
    s.push('\n');
    s
}

/// Parses and validates an algebra file.
pub fn from_json_str(text: &str) -> Result<GradedAlgebra> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(|e| {
        schema(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let mut dims = Vec::with_capacity(file.degrees.len());
    let mut labels = Vec::with_capacity(file.degrees.len());
    for (k, d) in file.degrees.into_iter().enumerate() {
        if d.deg != 2 * k {
            return Err(schema(
                format!("degrees[{k}].deg"),
                format!("expected {}, found {}", 2 * k, d.deg),
            ));
        }
        if d.labels.len() != d.dim {
            return Err(schema(
                format!("degrees[{k}].labels"),
                format!("{} labels for dimension {}", d.labels.len(), d.dim),
            ));
        }
        dims.push(d.dim);
        labels.push(d.labels);
    }
    let mut bb_rows = Vec::with_capacity(file.bb_form.len());
    for (i, row) in file.bb_form.iter().enumerate() {
        if row.len() != file.bb_form.len() {
            return Err(schema(format!("bb_form[{i}]"), "bb_form must be square"));
        }
        bb_rows.push(
            row.iter()
                .enumerate()
                .map(|(j, s)| rational(format!("bb_form[{i}][{j}]"), s))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let bb_form = if bb_rows.is_empty() {
        Matrix::zeros(0, 0)
    } else {
        Matrix::from_rows(bb_rows)
    };
    let mut products = Vec::with_capacity(file.products.len());
    let mut seen = std::collections::HashSet::new();
    for (p, e) in file.products.iter().enumerate() {
        let key = (e.da, e.ia, e.db, e.ib);
        if !seen.insert(key) {
            return Err(schema(format!("products[{p}]"), "duplicate product entry"));
        }
        let mut pairs = Vec::with_capacity(e.out.len());
        for (o, x) in e.out.iter().enumerate() {
            pairs.push((
                x.ic,
                rational(format!("products[{p}].out[{o}].coef"), &x.coef)?,
            ));
        }
        if let Some(w) = pairs.windows(2).position(|w| w[0].0 >= w[1].0) {
            return Err(schema(
                format!("products[{p}].out[{}]", w + 1),
                "output indices must be strictly increasing",
            ));
        }
        products.push((key, SparseVec::from_pairs(pairs)));
    }
    let algebra = GradedAlgebra::from_parts(AlgebraParts {
        half_dim: file.half_dim,
        dims,
        labels,
        products,
        bb_form,
    })
    .map_err(|e| match e {
        Error::Malformed(m) => schema("structure", m),
        other => other,
    })?;
    let report = algebra.validate();
    if !report.is_ok() {
        return Err(Error::Validation(report.summary()));
    }
    Ok(algebra)
}

pub fn load_algebra(path: impl AsRef<Path>) -> Result<GradedAlgebra> {
    from_json_str(&fs::read_to_string(path)?)
}

pub fn save_algebra(algebra: &GradedAlgebra, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_canonical_json(algebra))?;
    Ok(())
}

/// A Gram matrix given as a JSON array of rows, entries either integers or
/// rational strings.
pub fn form_from_json_str(text: &str) -> Result<QuadraticFormSpec> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Int(i64),
        Text(String),
    }
    let rows: Vec<Vec<Entry>> =
        serde_json::from_str(text).map_err(|e| schema("form", e.to_string()))?;
    let n = rows.len();
    if n == 0 {
        return Err(schema("form", "empty matrix"));
    }
    let mut data = Vec::with_capacity(n);
    for (r, row) in rows.into_iter().enumerate() {
        if row.len() != n {
            return Err(schema(
                format!("form[{r}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        let parsed = row
            .into_iter()
            .enumerate()
            .map(|(c, e)| match e {
                Entry::Int(v) => Ok(Q::int(v)),
                Entry::Text(t) => t
                    .parse::<Q>()
                    .map_err(|m| schema(format!("form[{r}][{c}]"), m.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        data.push(parsed);
    }
    let spec = QuadraticFormSpec::from_matrix(Matrix::from_rows(data));
    spec.validated_matrix()?;
    Ok(spec)
}

pub fn load_form(path: impl AsRef<Path>) -> Result<QuadraticFormSpec> {
    form_from_json_str(&fs::read_to_string(path)?)
}

/// SHA-256 of the canonical serialization, hex encoded.
pub fn canonical_hash(algebra: &GradedAlgebra) -> String {
    hex::encode(Sha256::digest(to_canonical_json(algebra).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_k3;
    use crate::forms::QuadraticFormSpec;

    fn fixture() -> GradedAlgebra {
        build_k3(&QuadraticFormSpec::parse("U+<2,-1/3>").unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let a = fixture();
        let text = to_canonical_json(&a);
        let b = from_json_str(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_canonical_json(&b), text);
        assert!(text.contains("\"-1/3\""));
    }

    #[test]
    fn non_reduced_rationals_are_rejected() {
        let text = to_canonical_json(&fixture()).replace("\"2/1\"", "\"4/2\"");
        match from_json_str(&text) {
            Err(Error::Schema { location, .. }) => assert!(location.starts_with("bb_form")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = to_canonical_json(&fixture()).replacen(
            "\"half_dim\"",
            "\"extra\": 1,\n  \"half_dim\"",
            1,
        );
        assert!(matches!(from_json_str(&text), Err(Error::Schema { .. })));
    }

    #[test]
    fn truncated_products_fail_validation() {
        let mut v: serde_json::Value =
            serde_json::from_str(&to_canonical_json(&fixture())).unwrap();
        let products = v["products"].as_array_mut().unwrap();
        products.retain(|p| !(p["da"] == 2 && p["db"] == 2));
        match from_json_str(&v.to_string()) {
            Err(Error::Validation(m)) => assert!(m.contains("FrobeniusDegenerate"), "{m}"),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }
}
