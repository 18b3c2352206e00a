//! JSON payloads: fields, elements, forms and job specs.
//!
//! Elements are little-endian coefficient arrays over the prime field; a bare
//! integer is accepted as shorthand for a prime-field element.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{FormError, QuadraticForm, SesquilinearForm};
use crate::gf::{FieldElement, FieldError, GaloisField, Subfield};
use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("malformed JSON")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub poly: Vec<u32>,
}

impl FieldSpec {
    pub fn of(field: &GaloisField) -> Self {
        FieldSpec {
            p: field.p(),
            n: field.degree(),
            poly: field.poly().to_vec(),
        }
    }

    pub fn build(&self) -> Result<GaloisField, FieldError> {
        GaloisField::new(self.p, self.n, Some(&self.poly))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementRepr {
    Int(i64),
    Coeffs(Vec<i64>),
}

impl ElementRepr {
    pub fn of(field: &GaloisField, x: &FieldElement) -> Self {
        ElementRepr::Coeffs(field.coeffs(x).into_iter().map(i64::from).collect())
    }

    pub fn to_element(&self, field: &GaloisField) -> Result<FieldElement, FieldError> {
        match self {
            ElementRepr::Int(n) => Ok(field.from_int(*n)),
            ElementRepr::Coeffs(c) => field.element(c),
        }
    }
}

pub fn matrix_to_repr(field: &GaloisField, m: &Matrix) -> Vec<Vec<ElementRepr>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| ElementRepr::of(field, x)).collect())
        .collect()
}

pub fn matrix_from_repr(field: &GaloisField, rows: &[Vec<ElementRepr>]) -> Result<Matrix, SpecError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| x.to_element(field)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Quadratic,
    Sesquilinear,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSpec {
    pub kind: SpecKind,
    pub matrix: Vec<Vec<ElementRepr>>,
    #[serde(default)]
    pub sigma_power: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyForm {
    Quadratic(QuadraticForm),
    Sesquilinear(SesquilinearForm),
}

impl AnyForm {
    pub fn dim(&self) -> usize {
        match self {
            AnyForm::Quadratic(q) => q.dim(),
            AnyForm::Sesquilinear(b) => b.dim(),
        }
    }
}

impl FormSpec {
    pub fn build(&self, field: &Arc<GaloisField>, scalars: Subfield) -> Result<AnyForm, SpecError> {
        let m = matrix_from_repr(field, &self.matrix)?;
        Ok(match self.kind {
            SpecKind::Quadratic => AnyForm::Quadratic(QuadraticForm::new(field.clone(), scalars, m)?),
            SpecKind::Sesquilinear => AnyForm::Sesquilinear(SesquilinearForm::new(
                field.clone(),
                scalars,
                m,
                self.sigma_power,
            )?),
        })
    }

    pub fn of(form: &AnyForm) -> Self {
        match form {
            AnyForm::Quadratic(q) => FormSpec {
                kind: SpecKind::Quadratic,
                matrix: matrix_to_repr(q.field(), q.upper()),
                sigma_power: 0,
            },
            AnyForm::Sesquilinear(b) => FormSpec {
                kind: SpecKind::Sesquilinear,
                matrix: matrix_to_repr(b.field(), b.gram()),
                sigma_power: b.sigma_power(),
            },
        }
    }
}

/// `K = GF(p^{m·w}) ⊇ F = GF(p^m)`; `poly` defines K.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub p: u32,
    pub m: usize,
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<u32>>,
}

impl TowerSpec {
    pub fn build(&self) -> Result<(Arc<GaloisField>, Subfield), FieldError> {
        let field = GaloisField::new(self.p, self.m * self.w, self.poly.as_deref())?;
        let sub = field.subfield(self.m)?;
        Ok((Arc::new(field), sub))
    }
}

/// Input to `classify` and `embed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub tower: TowerSpec,
    pub form: FormSpec,
    pub alpha: ElementRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<ElementRepr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

/// A parsed [`JobSpec`].
#[derive(Clone, Debug)]
pub struct Job {
    pub field: Arc<GaloisField>,
    pub sub: Subfield,
    pub form: AnyForm,
    pub alpha: FieldElement,
    pub matrix: Option<Matrix>,
    pub budget: Option<u64>,
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<Job, SpecError> {
        let (field, sub) = self.tower.build()?;
        let form = self.form.build(&field, field.full())?;
        let alpha = self.alpha.to_element(&field)?;
        let matrix = self
            .matrix
            .as_ref()
            .map(|m| matrix_from_repr(&field, m))
            .transpose()?;
        Ok(Job {
            field,
            sub,
            form,
            alpha,
            matrix,
            budget: self.budget,
        })
    }
}
