//! JSON file format for matrices and vectors.
//!
//! ```text
//! {"n": 2, "scalar": "real",    "entries": [1.0, 0.5, 0.5, 2.0]}
//! {"n": 2, "scalar": "complex", "entries": [[1,0],[0,1],[0,-1],[2,0]]}
//! {"len": 3, "scalar": "real",  "entries": [1.0, 2.0, 3.0]}
//! ```
//!
//! Entries are row-major; complex values are `[re, im]` pairs.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::{HermitianMatrix, Matrix};
use super::scalar::{Scalar, ScalarKind};
use crate::error::{PerturbError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct MatrixDoc<T> {
    n: usize,
    scalar: ScalarKind,
    entries: Vec<T>,
}

#[derive(Debug, Serialize, Deserialize)]
struct VectorDoc<T> {
    len: usize,
    scalar: ScalarKind,
    entries: Vec<T>,
}

#[derive(Debug, Deserialize)]
struct Header {
    scalar: ScalarKind,
}

/// A Hermitian matrix of either scalar kind, as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyHermitian {
    Real(HermitianMatrix<f64>),
    Complex(HermitianMatrix<Complex64>),
}

impl AnyHermitian {
    pub fn n(&self) -> usize {
        match self {
            AnyHermitian::Real(m) => m.n(),
            AnyHermitian::Complex(m) => m.n(),
        }
    }

    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyHermitian::Real(_) => ScalarKind::Real,
            AnyHermitian::Complex(_) => ScalarKind::Complex,
        }
    }

    /// Promotes to complex entries.
    pub fn to_complex(&self) -> HermitianMatrix<Complex64> {
        match self {
            AnyHermitian::Complex(m) => m.clone(),
            AnyHermitian::Real(m) => {
                HermitianMatrix::from_upper_fn(m.n(), |j, k| Complex64::new(m[(j, k)], 0.0))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            AnyHermitian::Real(m) => matrix_to_json(m),
            AnyHermitian::Complex(m) => matrix_to_json(m),
        }
    }
}

pub fn matrix_to_json<T: Scalar>(m: &HermitianMatrix<T>) -> Result<String> {
    let doc = MatrixDoc {
        n: m.n(),
        scalar: T::KIND,
        entries: m.matrix().as_slice().to_vec(),
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn vector_to_json<T: Scalar>(v: &[T]) -> Result<String> {
    let doc = VectorDoc {
        len: v.len(),
        scalar: T::KIND,
        entries: v.to_vec(),
    };
    Ok(serde_json::to_string(&doc)?)
}

fn build<T: Scalar>(doc: MatrixDoc<T>) -> Result<HermitianMatrix<T>> {
    if doc.scalar != T::KIND {
        return Err(PerturbError::InvalidMatrix("scalar tag mismatch".into()));
    }
    let m = Matrix::from_row_major(doc.n, doc.n, doc.entries)?;
    HermitianMatrix::new(m)
}

pub fn matrix_from_json(text: &str) -> Result<AnyHermitian> {
    let value: Value = serde_json::from_str(text)?;
    let header: Header = serde_json::from_value(value.clone())?;
    match header.scalar {
        ScalarKind::Real => Ok(AnyHermitian::Real(build(serde_json::from_value(value)?)?)),
        ScalarKind::Complex => Ok(AnyHermitian::Complex(build(serde_json::from_value(
            value,
        )?)?)),
    }
}

pub fn read_matrix(path: &Path) -> Result<AnyHermitian> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}

/// Reads a real vector document.
pub fn real_vector_from_json(text: &str) -> Result<Vec<f64>> {
    let doc: VectorDoc<f64> = serde_json::from_str(text)?;
    if doc.scalar != ScalarKind::Real {
        return Err(PerturbError::InvalidMatrix("expected a real vector".into()));
    }
    if doc.entries.len() != doc.len {
        return Err(PerturbError::DimensionMismatch {
            expected: doc.len,
            found: doc.entries.len(),
        });
    }
    Ok(doc.entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_round_trip() {
        let m = HermitianMatrix::from_upper_fn(3, |j, k| (j * 3 + k) as f64 * 0.1);
        let text = matrix_to_json(&m).unwrap();
        assert!(text.contains("\"scalar\":\"real\""));
        assert_eq!(matrix_from_json(&text).unwrap(), AnyHermitian::Real(m));
    }

    #[test]
    fn complex_pairs() {
        let text = r#"{"n":2,"scalar":"complex","entries":[[1,0],[0,1],[0,-1],[2,0]]}"#;
        let m = matrix_from_json(text).unwrap();
        match m {
            AnyHermitian::Complex(h) => assert_eq!(h[(0, 1)], Complex64::new(0.0, 1.0)),
            _ => panic!("expected complex"),
        }
    }

    #[test]
    fn rejects_asymmetric_and_short() {
        assert!(matrix_from_json(r#"{"n":2,"scalar":"real","entries":[1,2,3,4]}"#).is_err());
        assert!(matrix_from_json(r#"{"n":2,"scalar":"real","entries":[1,2,2]}"#).is_err());
    }

    #[test]
    fn vector_doc() {
        let text = vector_to_json(&[1.0, 2.5]).unwrap();
        assert_eq!(real_vector_from_json(&text).unwrap(), vec![1.0, 2.5]);
    }
}
