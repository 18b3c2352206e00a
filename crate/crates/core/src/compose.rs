//! Restriction of scalars along `K ⊇ F`: a form over K composed with an
//! F-linear functional `L(x) = Tr_{K/F}(αx)` becomes a form over F on the
//! same underlying set, now of dimension `A·w`.
//!
//! Coordinates: with power basis `b₀, …, b_{w−1}` of K over F, the vector
//! `Σ x_{is} bₛ eᵢ` has F-coordinate `x_{is}` at position `i·w + s`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{FormError, QuadraticForm, SesquilinearForm};
use crate::gf::{FieldElement, GaloisField, Subfield};
use crate::linalg::{self, LinalgError, Matrix, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComposeError {
    #[error("forms to be composed must be defined over the whole field")]
    NotOverTopField,
    #[error("functional values do not determine a unique alpha")]
    Underdetermined,
    #[error("functional values are not of the form x -> Tr(alpha x)")]
    Inconsistent,
    #[error("value {0:?} does not lie in the target subfield")]
    NotInTarget(FieldElement),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// `L(x) = Tr_{K/F}(αx)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearFunctional {
    pub alpha: FieldElement,
    pub sub: Subfield,
}

impl LinearFunctional {
    pub fn new(alpha: FieldElement, sub: Subfield) -> Self {
        LinearFunctional { alpha, sub }
    }

    /// The trace itself (`α = 1`).
    pub fn trace(field: &GaloisField, sub: Subfield) -> Self {
        Self::new(field.one(), sub)
    }

    pub fn apply(&self, field: &GaloisField, x: &FieldElement) -> FieldElement {
        field.relative_trace(&field.mul(&self.alpha, x), self.sub)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero()
    }
}

/// Values of `L` on the power basis of K over F.
pub fn alpha_to_functional(field: &GaloisField, l: &LinearFunctional) -> Vec<(FieldElement, FieldElement)> {
    field
        .subfield_power_basis(l.sub)
        .into_iter()
        .map(|b| (b, l.apply(field, &b)))
        .collect()
}

/// The unique `α` with `Tr(α xₖ) = vₖ` for the given pairs `(xₖ, vₖ)`.
pub fn functional_to_alpha(
    field: &GaloisField,
    sub: Subfield,
    values: &[(FieldElement, FieldElement)],
) -> Result<FieldElement, ComposeError> {
    if let Some((_, v)) = values.iter().find(|(_, v)| !field.is_in_subfield(v, sub)) {
        return Err(ComposeError::NotInTarget(*v));
    }
    let basis = field.subfield_power_basis(sub);
    let w = basis.len();
    let rows = values
        .iter()
        .map(|(x, _)| {
            basis
                .iter()
                .map(|b| field.relative_trace(&field.mul(b, x), sub))
                .collect()
        })
        .collect::<Vec<Vector>>();
    if rows.is_empty() {
        return Err(ComposeError::Underdetermined);
    }
    let system = Matrix::from_rows(rows)?;
    if linalg::rank(field, &system) < w {
        return Err(ComposeError::Underdetermined);
    }
    let rhs: Vector = values.iter().map(|(_, v)| *v).collect();
    let a = linalg::solve(field, &system, &rhs)?.ok_or(ComposeError::Inconsistent)?;
    Ok(a.iter().zip(&basis).fold(field.zero(), |acc, (c, b)| {
        field.add(&acc, &field.mul(c, b))
    }))
}

/// Reproducibility record attached to composed forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub alpha: Vec<u32>,
    pub basis: Vec<Vec<u32>>,
    pub tower: Tower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub p: u32,
    pub m: usize,
    pub w: usize,
    pub poly: Vec<u32>,
}

/// The tower `K ⊇ F`, the power basis of K over F and its trace dual, for a
/// K-space of dimension `dim`.
#[derive(Clone, Debug)]
pub struct RestrictionContext {
    field: Arc<GaloisField>,
    sub: Subfield,
    dim: usize,
    basis: Vec<FieldElement>,
    dual: Vec<FieldElement>,
}

impl RestrictionContext {
    pub fn new(field: Arc<GaloisField>, sub: Subfield, dim: usize) -> Self {
        let basis = field.subfield_power_basis(sub);
        let w = basis.len();
        let f = &*field;
        let mut pairing = Matrix::zeros(w, w);
        for s in 0..w {
            for t in 0..w {
                pairing.set(s, t, f.relative_trace(&f.mul(&basis[s], &basis[t]), sub));
            }
        }
        let inv = linalg::inverse(f, &pairing).expect("trace form of a separable extension is non-degenerate");
        let dual = (0..w)
            .map(|t| {
                (0..w).fold(f.zero(), |acc, u| {
                    f.add(&acc, &f.mul(&inv.get(t, u), &basis[u]))
                })
            })
            .collect();
        RestrictionContext {
            field,
            sub,
            dim,
            basis,
            dual,
        }
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn sub(&self) -> Subfield {
        self.sub
    }

    pub fn w(&self) -> usize {
        self.basis.len()
    }

    /// K-dimension `A`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// F-dimension `A·w`.
    pub fn restricted_dim(&self) -> usize {
        self.dim * self.w()
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }

    /// `b*ₜ` with `Tr(bₛ b*ₜ) = δₛₜ`.
    pub fn dual_basis(&self) -> &[FieldElement] {
        &self.dual
    }

    /// F-coordinates of `x` in the power basis.
    pub fn coordinates(&self, x: &FieldElement) -> Vec<FieldElement> {
        let f = &*self.field;
        self.dual
            .iter()
            .map(|d| f.relative_trace(&f.mul(x, d), self.sub))
            .collect()
    }

    pub fn element(&self, coords: &[FieldElement]) -> FieldElement {
        let f = &*self.field;
        coords
            .iter()
            .zip(&self.basis)
            .fold(f.zero(), |acc, (c, b)| f.add(&acc, &f.mul(c, b)))
    }

    pub fn restrict_vector(&self, v: &[FieldElement]) -> Result<Vector, ComposeError> {
        if v.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            }
            .into());
        }
        Ok(v.iter().flat_map(|x| self.coordinates(x)).collect())
    }

    pub fn lift_vector(&self, u: &[FieldElement]) -> Result<Vector, ComposeError> {
        let n = self.restricted_dim();
        if u.len() != n {
            return Err(LinalgError::DimensionMismatch {
                expected: n,
                got: u.len(),
            }
            .into());
        }
        Ok(u.chunks(self.w()).map(|c| self.element(c)).collect())
    }

    /// Matrix over F of the K-linear map `T`.
    pub fn embed_isometry(&self, t: &Matrix) -> Result<Matrix, ComposeError> {
        if t.rows() != self.dim || t.cols() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: if t.rows() != self.dim { t.rows() } else { t.cols() },
            }
            .into());
        }
        let f = &*self.field;
        let w = self.w();
        let n = self.restricted_dim();
        let mut out = Matrix::zeros(n, n);
        for j in 0..self.dim {
            for (s, b) in self.basis.iter().enumerate() {
                for i in 0..self.dim {
                    let image = f.mul(&t.get(i, j), b);
                    for (r, c) in self.coordinates(&image).into_iter().enumerate() {
                        out.set(i * w + r, j * w + s, c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn provenance(&self, l: &LinearFunctional) -> Provenance {
        let f = &*self.field;
        Provenance {
            alpha: f.coeffs(&l.alpha),
            basis: self.basis.iter().map(|b| f.coeffs(b)).collect(),
            tower: Tower {
                p: f.p(),
                m: self.sub.degree(),
                w: self.w(),
                poly: f.poly().to_vec(),
            },
        }
    }
}

fn check_top(field: &GaloisField, scalars: Subfield) -> Result<(), ComposeError> {
    if scalars != field.full() {
        return Err(ComposeError::NotOverTopField);
    }
    Ok(())
}

/// `Lβ` with Gram entries `L(bₛ Mᵢⱼ σ(bₜ))`.
pub fn compose_sesquilinear(
    beta: &SesquilinearForm,
    l: &LinearFunctional,
) -> Result<SesquilinearForm, ComposeError> {
    let field = beta.field();
    check_top(field, beta.scalars())?;
    let f = &**field;
    let ctx = RestrictionContext::new(field.clone(), l.sub, beta.dim());
    let w = ctx.w();
    let k = beta.sigma_power();
    let twisted: Vec<FieldElement> = ctx.basis.iter().map(|b| f.frobenius_power(b, k)).collect();
    let n = ctx.restricted_dim();
    let mut gram = Matrix::zeros(n, n);
    for i in 0..beta.dim() {
        for j in 0..beta.dim() {
            let mij = beta.gram().get(i, j);
            for s in 0..w {
                let left = f.mul(&ctx.basis[s], &mij);
                for t in 0..w {
                    gram.set(i * w + s, j * w + t, l.apply(f, &f.mul(&left, &twisted[t])));
                }
            }
        }
    }
    Ok(SesquilinearForm::new(
        field.clone(),
        l.sub,
        gram,
        k % l.sub.degree(),
    )?)
}

/// `LQ = L ∘ Q` as an upper-triangular form over F.
pub fn compose_quadratic(q: &QuadraticForm, l: &LinearFunctional) -> Result<QuadraticForm, ComposeError> {
    let field = q.field();
    check_top(field, q.scalars())?;
    let f = &**field;
    let ctx = RestrictionContext::new(field.clone(), l.sub, q.dim());
    let w = ctx.w();
    let b = &ctx.basis;
    let two = f.from_int(2);
    let n = ctx.restricted_dim();
    let mut upper = Matrix::zeros(n, n);
    for i in 0..q.dim() {
        let uii = q.upper().get(i, i);
        for s in 0..w {
            upper.set(i * w + s, i * w + s, l.apply(f, &f.mul(&uii, &f.mul(&b[s], &b[s]))));
            for t in s + 1..w {
                let c = f.mul(&f.mul(&two, &uii), &f.mul(&b[s], &b[t]));
                upper.set(i * w + s, i * w + t, l.apply(f, &c));
            }
        }
        for j in i + 1..q.dim() {
            let uij = q.upper().get(i, j);
            for s in 0..w {
                for t in 0..w {
                    let c = f.mul(&uij, &f.mul(&b[s], &b[t]));
                    upper.set(i * w + s, j * w + t, l.apply(f, &c));
                }
            }
        }
    }
    Ok(QuadraticForm::new(field.clone(), l.sub, upper)?)
}
