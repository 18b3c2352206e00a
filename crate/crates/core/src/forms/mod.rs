//! Quadratic and σ-sesquilinear forms over a subfield of a [`GaloisField`],
//! with the brute-force invariants used as ground truth: radicals, reflexive
//! type, Witt index, singular counts, discriminants and hyperbolic
//! decompositions.
//!
//! Conventions:
//! - `β(u,v) = uᵀ M σ(v)` with `σ(x) = x^{p^k}`: linear in the first slot,
//!   σ-semilinear in the second.
//! - `Q(v) = vᵀ U v` with `U` upper triangular; the polar form has Gram
//!   `U + Uᵀ`.
//! - A form lives on `F^n` where `F` is its scalar subfield; all Gram entries
//!   lie in `F`.

mod search;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, FieldError, GaloisField, SquareClass, Subfield};
use crate::linalg::{self, LinalgError, Matrix, Vector};

use search::{max_totally_null, QuadraticDigits, SesquilinearDigits, Space};

/// Cap on the number of vectors an exhaustive enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Self {
        Budget(1_000_000)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("enumeration needs {needed} vectors, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("form is degenerate")]
    Degenerate,
    #[error("operation requires odd characteristic")]
    EvenCharacteristic,
    #[error("operation requires even dimension")]
    OddDimension,
    #[error("matrix entries must lie in the scalar subfield")]
    NotInScalars,
    #[error("quadratic form matrix must be upper triangular")]
    NotUpperTriangular,
    #[error("form must be bilinear")]
    NotBilinear,
    #[error("witt index {witt} and singular count {count} disagree for dimension {dim}")]
    Inconsistent { dim: usize, witt: usize, count: u64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Reflexive type of a sesquilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormType {
    Alternating,
    Symmetric,
    SymmetricNotAlternating,
    Hermitian,
    Atypical,
}

impl FormType {
    pub fn label(self) -> &'static str {
        match self {
            FormType::Alternating => "alternating",
            FormType::Symmetric => "symmetric",
            FormType::SymmetricNotAlternating => "symmetric-not-alternating",
            FormType::Hermitian => "hermitian",
            FormType::Atypical => "atypical",
        }
    }
}

impl fmt::Display for FormType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Isometry class of an orthogonal space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrthogonalClass {
    #[serde(rename = "O+")]
    Plus,
    #[serde(rename = "O-")]
    Minus,
    /// Odd dimension, non-degenerate.
    #[serde(rename = "O")]
    Odd,
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl OrthogonalClass {
    pub fn label(self) -> &'static str {
        match self {
            OrthogonalClass::Plus => "O+",
            OrthogonalClass::Minus => "O-",
            OrthogonalClass::Odd => "O",
            OrthogonalClass::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for OrthogonalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OrthogonalClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O+" | "O⁺" | "plus" => Ok(OrthogonalClass::Plus),
            "O-" | "O⁻" | "minus" => Ok(OrthogonalClass::Minus),
            "O" | "odd" => Ok(OrthogonalClass::Odd),
            "degenerate" => Ok(OrthogonalClass::Degenerate),
            other => Err(format!("unknown orthogonal class {other:?}")),
        }
    }
}

/// Number of nonzero singular vectors of a non-degenerate quadratic space of
/// the given class over GF(q).
pub fn expected_singular_count(class: OrthogonalClass, dim: usize, q: u64) -> Option<u64> {
    let m = (dim / 2) as u32;
    match class {
        OrthogonalClass::Plus if dim.is_multiple_of(2) && m >= 1 => {
            Some((q.pow(m) - 1) * (q.pow(m - 1) + 1))
        }
        OrthogonalClass::Minus if dim.is_multiple_of(2) && m >= 1 => {
            Some((q.pow(m) + 1) * (q.pow(m - 1) - 1))
        }
        OrthogonalClass::Odd if dim % 2 == 1 => Some(q.pow(2 * m) - 1),
        _ => None,
    }
}

fn check_square(m: &Matrix) -> Result<(), FormError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    Ok(())
}

fn check_entries(field: &GaloisField, scalars: Subfield, m: &Matrix) -> Result<(), FormError> {
    if m.entries().all(|x| field.is_in_subfield(x, scalars)) {
        Ok(())
    } else {
        Err(FormError::NotInScalars)
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), FormError> {
    if expected != got {
        return Err(LinalgError::DimensionMismatch { expected, got }.into());
    }
    Ok(())
}

/// Every F-combination of `basis`, including zero.
fn span_vectors(
    field: &GaloisField,
    scalars: &[FieldElement],
    basis: &[Vector],
    dim: usize,
) -> Vec<Vector> {
    let mut out = vec![vec![FieldElement::ZERO; dim]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * scalars.len());
        for v in &out {
            for c in scalars {
                next.push(
                    v.iter()
                        .zip(b)
                        .map(|(x, y)| field.add(x, &field.mul(c, y)))
                        .collect(),
                );
            }
        }
        out = next;
    }
    out
}

/// A σ-sesquilinear form `β(u,v) = uᵀMσ(v)` on `F^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SesquilinearForm {
    field: Arc<GaloisField>,
    scalars: Subfield,
    gram: Matrix,
    sigma_power: usize,
}

impl SesquilinearForm {
    pub fn new(
        field: Arc<GaloisField>,
        scalars: Subfield,
        gram: Matrix,
        sigma_power: usize,
    ) -> Result<Self, FormError> {
        check_square(&gram)?;
        check_entries(&field, scalars, &gram)?;
        let sigma_power = sigma_power % field.degree();
        Ok(SesquilinearForm {
            field,
            scalars,
            gram,
            sigma_power,
        })
    }

    /// A bilinear form (`σ = id`) over the whole field.
    pub fn bilinear(field: Arc<GaloisField>, gram: Matrix) -> Result<Self, FormError> {
        let full = field.full();
        Self::new(field, full, gram, 0)
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn scalars(&self) -> Subfield {
        self.scalars
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn sigma_power(&self) -> usize {
        self.sigma_power
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    /// Order of σ restricted to the scalar field.
    pub fn sigma_order(&self) -> usize {
        let m = self.scalars.degree();
        let k = self.sigma_power % m;
        m / gcd(k, m)
    }

    pub fn is_bilinear(&self) -> bool {
        self.sigma_order() == 1
    }

    pub fn eval(&self, u: &[FieldElement], v: &[FieldElement]) -> Result<FieldElement, FormError> {
        let n = self.dim();
        check_dim(n, u.len())?;
        check_dim(n, v.len())?;
        let f = &*self.field;
        let sv: Vector = v
            .iter()
            .map(|x| f.frobenius_power(x, self.sigma_power))
            .collect();
        Ok(linalg::dot(f, u, &self.gram.mul_vec(f, &sv)?))
    }

    /// Basis of `{u : β(u,v) = 0 ∀v}`, i.e. the kernel of `Mᵀ`.
    pub fn radical(&self) -> Vec<Vector> {
        linalg::kernel(&self.field, &self.gram.transpose())
    }

    pub fn is_degenerate(&self) -> bool {
        linalg::rank(&self.field, &self.gram) < self.dim()
    }

    pub fn classify_reflexive(&self) -> FormType {
        let f = &*self.field;
        let m = &self.gram;
        let t = m.transpose();
        if self.is_bilinear() {
            let n = self.dim();
            let diag_zero = (0..n).all(|i| m.get(i, i).is_zero());
            if diag_zero && t == m.map(|x| f.neg(x)) {
                FormType::Alternating
            } else if t == *m {
                if f.is_char_two() {
                    FormType::SymmetricNotAlternating
                } else {
                    FormType::Symmetric
                }
            } else {
                FormType::Atypical
            }
        } else if self.sigma_order() == 2
            && linalg::apply_automorphism(f, m, self.sigma_power).transpose() == *m
        {
            FormType::Hermitian
        } else {
            FormType::Atypical
        }
    }

    /// Dimension of a maximal totally isotropic subspace (`β(W, W) = 0`).
    pub fn witt_index(&self, budget: Budget) -> Result<usize, FormError> {
        let space = Space::new(&self.field, self.scalars, self.dim(), budget)?;
        let digits = SesquilinearDigits::new(&space, &self.field, &self.gram, self.sigma_power)?;
        let points = digits.isotropic_points();
        let duals: Vec<_> = points.iter().map(|p| digits.duals(p)).collect();
        let twisted: Vec<_> = points.iter().map(|p| digits.twist(p)).collect();
        let orth = |a: usize, b: usize| {
            space.dot(&points[b], &duals[a].0) == 0 && space.dot(&duals[a].1, &twisted[b]) == 0
        };
        let r = self.radical().len();
        let bound = (self.dim() + r) / 2;
        Ok(max_totally_null(&space, &points, orth, bound).dim)
    }

    /// `β(Tu, Tv) = β(u, v)` for all u, v, via `Tᵀ M σ(T) = M`.
    pub fn is_isometry(&self, t: &Matrix) -> Result<bool, FormError> {
        check_square(t)?;
        check_dim(self.dim(), t.rows())?;
        let f = &*self.field;
        let st = linalg::apply_automorphism(f, t, self.sigma_power);
        let lhs = t.transpose().mul(f, &self.gram)?.mul(f, &st)?;
        Ok(lhs == self.gram)
    }

    /// `Q(v) = ½β(v, v)`; requires odd characteristic and a bilinear form.
    pub fn half_diagonal_quadratic(&self) -> Result<QuadraticForm, FormError> {
        if self.field.is_char_two() {
            return Err(FormError::EvenCharacteristic);
        }
        if !self.is_bilinear() {
            return Err(FormError::NotBilinear);
        }
        let f = &*self.field;
        let half = f.inv(&f.from_int(2)).expect("2 is invertible");
        let n = self.dim();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            u.set(i, i, f.mul(&half, &self.gram.get(i, i)));
            for j in i + 1..n {
                let s = f.add(&self.gram.get(i, j), &self.gram.get(j, i));
                u.set(i, j, f.mul(&half, &s));
            }
        }
        QuadraticForm::new(self.field.clone(), self.scalars, u)
    }

    /// Form `(u, v) ↦ β(Pu, Pv)`, Gram `Pᵀ M σ(P)`.
    pub fn pullback(&self, p: &Matrix) -> Result<SesquilinearForm, FormError> {
        check_dim(self.dim(), p.rows())?;
        let f = &*self.field;
        let sp = linalg::apply_automorphism(f, p, self.sigma_power);
        let gram = p.transpose().mul(f, &self.gram)?.mul(f, &sp)?;
        Self::new(self.field.clone(), self.scalars, gram, self.sigma_power)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Q(v) = vᵀUv` with `U` upper triangular, on `F^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    field: Arc<GaloisField>,
    scalars: Subfield,
    upper: Matrix,
}

impl QuadraticForm {
    pub fn new(field: Arc<GaloisField>, scalars: Subfield, upper: Matrix) -> Result<Self, FormError> {
        check_square(&upper)?;
        check_entries(&field, scalars, &upper)?;
        let n = upper.rows();
        for i in 0..n {
            for j in 0..i {
                if !upper.get(i, j).is_zero() {
                    return Err(FormError::NotUpperTriangular);
                }
            }
        }
        Ok(QuadraticForm {
            field,
            scalars,
            upper,
        })
    }

    /// The quadratic form `vᵀAv` of an arbitrary square matrix.
    pub fn from_matrix(field: Arc<GaloisField>, scalars: Subfield, a: &Matrix) -> Result<Self, FormError> {
        check_square(a)?;
        let n = a.rows();
        let mut u = Matrix::zeros(n, n);
        for i in 0..n {
            u.set(i, i, a.get(i, i));
            for j in i + 1..n {
                u.set(i, j, field.add(&a.get(i, j), &a.get(j, i)));
            }
        }
        Self::new(field, scalars, u)
    }

    pub fn field(&self) -> &Arc<GaloisField> {
        &self.field
    }

    pub fn scalars(&self) -> Subfield {
        self.scalars
    }

    pub fn upper(&self) -> &Matrix {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.upper.rows()
    }

    pub fn eval(&self, v: &[FieldElement]) -> Result<FieldElement, FormError> {
        check_dim(self.dim(), v.len())?;
        let f = &*self.field;
        Ok(linalg::dot(f, v, &self.upper.mul_vec(f, v)?))
    }

    pub fn polar_form(&self) -> SesquilinearForm {
        let f = &*self.field;
        let gram = self
            .upper
            .add(f, &self.upper.transpose())
            .expect("square matrix");
        SesquilinearForm {
            field: self.field.clone(),
            scalars: self.scalars,
            gram,
            sigma_power: 0,
        }
    }

    /// Some nonzero `u` in the radical of the polar form has `Q(u) = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.singular_radical_vector().is_some()
    }

    fn singular_radical_vector(&self) -> Option<Vector> {
        let rad = self.polar_form().radical();
        if rad.is_empty() {
            return None;
        }
        let f = &*self.field;
        let scalars = f.subfield_elements(self.scalars);
        span_vectors(f, &scalars, &rad, self.dim())
            .into_iter()
            .find(|u| u.iter().any(|x| !x.is_zero()) && self.eval(u).expect("dims match").is_zero())
    }

    /// `|{v ≠ 0 : Q(v) = 0}|` by enumeration.
    pub fn count_singular(&self, budget: Budget) -> Result<u64, FormError> {
        let space = Space::new(&self.field, self.scalars, self.dim(), budget)?;
        let digits = QuadraticDigits::new(&space, &self.upper)?;
        Ok(digits.singular_points().len() as u64 * (space.q as u64 - 1))
    }

    /// Dimension of a maximal totally singular subspace, by exhaustive search.
    pub fn witt_index(&self, budget: Budget) -> Result<usize, FormError> {
        Ok(self.totally_singular_subspace(budget)?.len())
    }

    /// A basis of a totally singular subspace of maximal dimension.
    pub fn totally_singular_subspace(&self, budget: Budget) -> Result<Vec<Vector>, FormError> {
        let space = Space::new(&self.field, self.scalars, self.dim(), budget)?;
        let digits = QuadraticDigits::new(&space, &self.upper)?;
        let points = digits.singular_points();
        let duals: Vec<_> = points.iter().map(|p| digits.polar_dual(p)).collect();
        let orth = |a: usize, b: usize| space.dot(&points[b], &duals[a]) == 0;
        let r = self.polar_form().radical().len();
        let bound = (self.dim() + r) / 2;
        let found = max_totally_null(&space, &points, orth, bound);
        Ok(found.basis.iter().map(|b| space.to_vector(b)).collect())
    }

    /// Orthogonal class from the Witt index, cross-checked against the
    /// closed-form singular count of that class.
    pub fn orthogonal_class(&self, budget: Budget) -> Result<OrthogonalClass, FormError> {
        Ok(self.orthogonal_report(budget)?.class)
    }

    pub fn orthogonal_report(&self, budget: Budget) -> Result<OrthogonalReport, FormError> {
        let n = self.dim();
        let radical_dim = self.polar_form().radical().len();
        if self.is_degenerate() {
            return Ok(OrthogonalReport {
                class: OrthogonalClass::Degenerate,
                witt_index: None,
                singular_count: None,
                radical_dim,
            });
        }
        let witt = self.witt_index(budget)?;
        let count = self.count_singular(budget)?;
        let m = n / 2;
        let class = if n % 2 == 1 {
            if witt != m {
                return Err(FormError::Inconsistent { dim: n, witt, count });
            }
            OrthogonalClass::Odd
        } else if witt == m {
            OrthogonalClass::Plus
        } else if witt + 1 == m {
            OrthogonalClass::Minus
        } else {
            return Err(FormError::Inconsistent { dim: n, witt, count });
        };
        let q = self.field.subfield_order(self.scalars);
        if let Some(expected) = expected_singular_count(class, n, q) {
            if expected != count {
                return Err(FormError::Inconsistent { dim: n, witt, count });
            }
        }
        Ok(OrthogonalReport {
            class,
            witt_index: Some(witt),
            singular_count: Some(count),
            radical_dim,
        })
    }

    /// Square class of `det((U + Uᵀ)/2)` in the scalar field.
    pub fn discriminant_class(&self) -> Result<SquareClass, FormError> {
        let f = &*self.field;
        if f.is_char_two() {
            return Err(FormError::EvenCharacteristic);
        }
        if self.dim() % 2 == 1 {
            return Err(FormError::OddDimension);
        }
        let half = f.inv(&f.from_int(2)).expect("2 is invertible");
        let b = self.polar_form().gram.map(|x| f.mul(x, &half));
        let det = linalg::determinant(f, &b)?;
        if det.is_zero() {
            return Err(FormError::Degenerate);
        }
        Ok(f.square_class(&det, self.scalars)?)
    }

    /// `disc(Q) ≡ (−1)^n` modulo squares, for dimension `2n`.
    pub fn discriminant_says_plus(&self) -> Result<bool, FormError> {
        let class = self.discriminant_class()?;
        let f = &*self.field;
        let sign = f.from_int(if (self.dim() / 2).is_multiple_of(2) { 1 } else { -1 });
        Ok(class == f.square_class(&sign, self.scalars)?)
    }

    /// Splits off hyperbolic pairs one at a time until the complement is
    /// anisotropic.
    pub fn decompose_hyperbolic_germ(&self, budget: Budget) -> Result<HyperbolicDecomposition, FormError> {
        if self.is_degenerate() {
            return Err(FormError::Degenerate);
        }
        let f = &*self.field;
        let n = self.dim();
        let polar = self.polar_form();
        let scalars = f.subfield_elements(self.scalars);
        let q = scalars.len() as u128;
        let mut basis: Vec<Vector> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { f.one() } else { f.zero() }).collect())
            .collect();
        let mut pairs = Vec::new();
        loop {
            let needed = q.pow(basis.len() as u32);
            if needed > budget.0 as u128 {
                return Err(FormError::BudgetExceeded {
                    needed: u64::try_from(needed).unwrap_or(u64::MAX),
                    budget: budget.0,
                });
            }
            let singular = span_vectors(f, &scalars, &basis, n).into_iter().find(|x| {
                x.iter().any(|c| !c.is_zero()) && self.eval(x).expect("dims match").is_zero()
            });
            let Some(u) = singular else { break };
            let (partner, fu) = basis
                .iter()
                .find_map(|b| {
                    let val = polar.eval(&u, b).expect("dims match");
                    (!val.is_zero()).then(|| (b.clone(), val))
                })
                .ok_or(FormError::Degenerate)?;
            let scale = f.inv(&fu).expect("nonzero");
            let v: Vector = partner.iter().map(|x| f.mul(x, &scale)).collect();
            let qv = self.eval(&v)?;
            let v: Vector = v
                .iter()
                .zip(&u)
                .map(|(a, b)| f.sub(a, &f.mul(&qv, b)))
                .collect();
            let mut conditions = Matrix::zeros(2, basis.len());
            for (k, b) in basis.iter().enumerate() {
                conditions.set(0, k, polar.eval(&u, b)?);
                conditions.set(1, k, polar.eval(&v, b)?);
            }
            basis = linalg::kernel(f, &conditions)
                .into_iter()
                .map(|c| {
                    (0..n)
                        .map(|i| {
                            c.iter().zip(&basis).fold(f.zero(), |acc, (ck, b)| {
                                f.add(&acc, &f.mul(ck, &b[i]))
                            })
                        })
                        .collect()
                })
                .collect();
            pairs.push((u, v));
        }
        let d = basis.len();
        let mut gu = Matrix::zeros(d, d);
        for a in 0..d {
            gu.set(a, a, self.eval(&basis[a])?);
            for b in a + 1..d {
                gu.set(a, b, polar.eval(&basis[a], &basis[b])?);
            }
        }
        let germ = QuadraticForm::new(self.field.clone(), self.scalars, gu)?;
        let gamma = (d == 1).then(|| germ.upper.get(0, 0));
        Ok(HyperbolicDecomposition {
            pairs,
            germ_basis: basis,
            germ,
            gamma,
        })
    }

    /// `v ↦ Q(Pv)`.
    pub fn pullback(&self, p: &Matrix) -> Result<QuadraticForm, FormError> {
        check_dim(self.dim(), p.rows())?;
        let f = &*self.field;
        let a = p.transpose().mul(f, &self.upper)?.mul(f, p)?;
        Self::from_matrix(self.field.clone(), self.scalars, &a)
    }

    /// `Q(Tv) = Q(v)` for every `v`, checked exhaustively.
    pub fn is_isometry(&self, t: &Matrix, budget: Budget) -> Result<bool, FormError> {
        self.maps_onto(t, self, budget)
    }

    /// Every isometry of the form, by enumerating all `n×n` matrices over F.
    pub fn enumerate_isometries(&self, budget: Budget) -> Result<Vec<Matrix>, FormError> {
        let n = self.dim();
        let space = Space::new(&self.field, self.scalars, n * n, budget)?;
        let vspace = Space::new(&self.field, self.scalars, n, budget)?;
        let digits = QuadraticDigits::new(&vspace, &self.upper)?;
        let vectors: Vec<Vec<u16>> = {
            let mut all = Vec::new();
            digits.space.for_each(|v| all.push(v.to_vec()));
            all
        };
        let values: Vec<u16> = vectors.iter().map(|v| digits.value(v)).collect();
        let mut out = Vec::new();
        space.for_each(|m| {
            let preserves = vectors.iter().zip(&values).all(|(v, &qv)| {
                digits.value(&digits.space.mat_vec(m, v)) == qv
            });
            if preserves {
                let entries: Vec<_> = m.iter().map(|&d| space.table.element(d)).collect();
                let rows = entries.chunks(n).map(|r| r.to_vec()).collect();
                let t = Matrix::from_rows(rows).expect("square");
                if linalg::rank(&self.field, &t) == n {
                    out.push(t);
                }
            }
        });
        Ok(out)
    }

    /// `target(Tv) = self(v)` for every `v`, checked exhaustively.
    pub fn maps_onto(&self, t: &Matrix, target: &QuadraticForm, budget: Budget) -> Result<bool, FormError> {
        check_square(t)?;
        check_dim(self.dim(), t.cols())?;
        check_dim(target.dim(), t.rows())?;
        let space = Space::new(&self.field, self.scalars, self.dim(), budget)?;
        let f = &*self.field;
        let mut ok = true;
        space.for_each(|d| {
            if !ok {
                return;
            }
            let v = space.to_vector(d);
            let tv = t.mul_vec(f, &v).expect("dims match");
            ok = target.eval(&tv).expect("dims match") == self.eval(&v).expect("dims match");
        });
        Ok(ok)
    }
}

/// Oracle verdict on one quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalReport {
    pub class: OrthogonalClass,
    pub witt_index: Option<usize>,
    pub singular_count: Option<u64>,
    pub radical_dim: usize,
}

/// `V = ⟨u₁,v₁⟩ ⊥ … ⊥ ⟨u_m,v_m⟩ ⊥ germ` with `Q(uᵢ) = Q(vᵢ) = 0`,
/// `f(uᵢ,vᵢ) = 1`, and the germ anisotropic.
#[derive(Clone, Debug)]
pub struct HyperbolicDecomposition {
    pub pairs: Vec<(Vector, Vector)>,
    pub germ_basis: Vec<Vector>,
    pub germ: QuadraticForm,
    /// `Q|germ(s) = γs²` when the germ is one-dimensional.
    pub gamma: Option<FieldElement>,
}

impl HyperbolicDecomposition {
    pub fn hyperbolic_rank(&self) -> usize {
        self.pairs.len()
    }

    /// Columns `u₁, v₁, …, u_m, v_m, germ basis`.
    pub fn change_of_basis(&self) -> Matrix {
        let cols: Vec<Vector> = self
            .pairs
            .iter()
            .flat_map(|(u, v)| [u.clone(), v.clone()])
            .chain(self.germ_basis.iter().cloned())
            .collect();
        Matrix::from_columns(&cols).expect("equal lengths")
    }

    /// `x₀x₁ + … + x_{2m−2}x_{2m−1} ⊥ germ` in the new coordinates.
    pub fn split_form(&self) -> QuadraticForm {
        let g = &self.germ;
        let f = &g.field;
        let h = 2 * self.pairs.len();
        let n = h + g.dim();
        let mut u = Matrix::zeros(n, n);
        for i in 0..self.pairs.len() {
            u.set(2 * i, 2 * i + 1, f.one());
        }
        for a in 0..g.dim() {
            for b in a..g.dim() {
                u.set(h + a, h + b, g.upper.get(a, b));
            }
        }
        QuadraticForm::new(g.field.clone(), g.scalars, u).expect("entries from the germ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, n: usize) -> Arc<GaloisField> {
        Arc::new(GaloisField::new(p, n, None).unwrap())
    }

    fn quad(k: &Arc<GaloisField>, rows: &[&[i64]]) -> QuadraticForm {
        let m = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&c| k.from_int(c)).collect())
                .collect(),
        )
        .unwrap();
        QuadraticForm::new(k.clone(), k.full(), m).unwrap()
    }

    fn bil(k: &Arc<GaloisField>, rows: &[&[i64]]) -> SesquilinearForm {
        let m = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&c| k.from_int(c)).collect())
                .collect(),
        )
        .unwrap();
        SesquilinearForm::bilinear(k.clone(), m).unwrap()
    }

    fn ints(k: &GaloisField, v: &[i64]) -> Vector {
        v.iter().map(|&c| k.from_int(c)).collect()
    }

    const B: Budget = Budget(1_000_000);

    #[test]
    fn eval_quadratic_examples() {
        let k3 = gf(3, 1);
        assert_eq!(quad(&k3, &[&[1]]).eval(&ints(&k3, &[0])).unwrap(), k3.zero());
        let xy = quad(&k3, &[&[0, 1], &[0, 0]]);
        assert_eq!(xy.eval(&ints(&k3, &[1, 1])).unwrap(), k3.one());
        let sum = quad(&k3, &[&[1, 0], &[0, 1]]);
        assert_eq!(sum.eval(&ints(&k3, &[1, 1])).unwrap(), k3.from_int(2));
        assert!(matches!(
            sum.eval(&ints(&k3, &[1])),
            Err(FormError::Linalg(LinalgError::DimensionMismatch { .. }))
        ));
    }

    #[test]
    fn rejects_lower_entries() {
        let k3 = gf(3, 1);
        let m = Matrix::from_rows(vec![
            vec![k3.zero(), k3.zero()],
            vec![k3.one(), k3.zero()],
        ])
        .unwrap();
        assert_eq!(
            QuadraticForm::new(k3.clone(), k3.full(), m),
            Err(FormError::NotUpperTriangular)
        );
    }

    #[test]
    fn polar_form_examples() {
        let k3 = gf(3, 1);
        let xy = quad(&k3, &[&[0, 1], &[0, 0]]);
        assert_eq!(xy.polar_form().gram(), bil(&k3, &[&[0, 1], &[1, 0]]).gram());
        let k2 = gf(2, 1);
        assert!(quad(&k2, &[&[1]]).polar_form().gram().is_zero());
        let sum = quad(&k3, &[&[1, 0], &[0, 1]]);
        assert_eq!(sum.polar_form().gram(), bil(&k3, &[&[2, 0], &[0, 2]]).gram());
    }

    #[test]
    fn radical_examples() {
        let k3 = gf(3, 1);
        assert!(bil(&k3, &[&[0, 1], &[1, 0]]).radical().is_empty());
        assert_eq!(bil(&k3, &[&[0, 0], &[0, 0]]).radical().len(), 2);
        let k2 = gf(2, 1);
        assert_eq!(
            bil(&k2, &[&[1, 1], &[1, 1]]).radical(),
            vec![ints(&k2, &[1, 1])]
        );
    }

    #[test]
    fn quadratic_degeneracy_examples() {
        let k3 = gf(3, 1);
        assert!(!quad(&k3, &[&[0, 1], &[0, 0]]).is_degenerate());
        let k2 = gf(2, 1);
        assert!(!quad(&k2, &[&[1]]).is_degenerate());
        assert!(quad(&k3, &[&[0, 0], &[0, 0]]).is_degenerate());
        // x² + xy + y² ⊥ z² over GF(2) has a one-dimensional anisotropic radical
        assert!(!quad(&k2, &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]).is_degenerate());
    }

    #[test]
    fn classify_examples() {
        let k3 = gf(3, 1);
        assert_eq!(
            bil(&k3, &[&[0, 1], &[-1, 0]]).classify_reflexive(),
            FormType::Alternating
        );
        assert_eq!(bil(&k3, &[&[1, 0], &[0, 1]]).classify_reflexive(), FormType::Symmetric);
        let k9 = gf(3, 2);
        let herm = SesquilinearForm::new(k9.clone(), k9.full(), Matrix::identity(&k9, 2), 1).unwrap();
        assert_eq!(herm.classify_reflexive(), FormType::Hermitian);
        let k4 = gf(2, 2);
        let w = k4.root();
        let m = Matrix::from_rows(vec![vec![w, k4.zero()], vec![k4.zero(), w]]).unwrap();
        let f = SesquilinearForm::new(k4.clone(), k4.full(), m, 1).unwrap();
        assert_eq!(f.classify_reflexive(), FormType::Atypical);
        let k2 = gf(2, 1);
        assert_eq!(
            bil(&k2, &[&[1, 0], &[0, 1]]).classify_reflexive(),
            FormType::SymmetricNotAlternating
        );
        assert_eq!(bil(&k2, &[&[0, 1], &[1, 0]]).classify_reflexive(), FormType::Alternating);
        assert_eq!(bil(&k3, &[&[1, 1], &[0, 1]]).classify_reflexive(), FormType::Atypical);
    }

    #[test]
    fn witt_index_examples() {
        let k3 = gf(3, 1);
        assert_eq!(quad(&k3, &[&[0, 1], &[0, 0]]).witt_index(B).unwrap(), 1);
        assert_eq!(quad(&k3, &[&[1, 0], &[0, 1]]).witt_index(B).unwrap(), 0);
        let hh = quad(
            &k3,
            &[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]],
        );
        assert_eq!(hh.witt_index(B).unwrap(), 2);
        assert!(matches!(
            hh.witt_index(Budget(10)),
            Err(FormError::BudgetExceeded { needed: 81, budget: 10 })
        ));
    }

    #[test]
    fn sesquilinear_witt_index() {
        let k3 = gf(3, 1);
        assert_eq!(bil(&k3, &[&[0, 1], &[-1, 0]]).witt_index(B).unwrap(), 1);
        let k9 = gf(3, 2);
        // unitary plane: isotropic vectors exist since the norm is onto GF(3)
        let herm = SesquilinearForm::new(k9.clone(), k9.full(), Matrix::identity(&k9, 2), 1).unwrap();
        assert_eq!(herm.witt_index(B).unwrap(), 1);
        let line = SesquilinearForm::new(k9.clone(), k9.full(), Matrix::identity(&k9, 1), 1).unwrap();
        assert_eq!(line.witt_index(B).unwrap(), 0);
    }

    #[test]
    fn count_singular_examples() {
        let k3 = gf(3, 1);
        assert_eq!(quad(&k3, &[&[0, 1], &[0, 0]]).count_singular(B).unwrap(), 4);
        assert_eq!(quad(&k3, &[&[1, 0], &[0, 1]]).count_singular(B).unwrap(), 0);
        assert_eq!(quad(&k3, &[&[1]]).count_singular(B).unwrap(), 0);
    }

    #[test]
    fn orthogonal_class_examples() {
        let k3 = gf(3, 1);
        assert_eq!(
            quad(&k3, &[&[0, 1], &[0, 0]]).orthogonal_class(B).unwrap(),
            OrthogonalClass::Plus
        );
        assert_eq!(
            quad(&k3, &[&[1, 0], &[0, 1]]).orthogonal_class(B).unwrap(),
            OrthogonalClass::Minus
        );
        assert_eq!(quad(&k3, &[&[1]]).orthogonal_class(B).unwrap(), OrthogonalClass::Odd);
        assert_eq!(
            quad(&k3, &[&[1, 0], &[0, 0]]).orthogonal_class(B).unwrap(),
            OrthogonalClass::Degenerate
        );
    }

    #[test]
    fn discriminant_examples() {
        let k3 = gf(3, 1);
        let xy = quad(&k3, &[&[0, 1], &[0, 0]]);
        assert_eq!(xy.discriminant_class().unwrap(), SquareClass::Nonsquare);
        assert!(xy.discriminant_says_plus().unwrap());
        assert!(!quad(&k3, &[&[1, 0], &[0, 1]]).discriminant_says_plus().unwrap());
        assert!(quad(&k3, &[&[1, 0], &[0, -1]]).discriminant_says_plus().unwrap());
        assert_eq!(
            quad(&k3, &[&[1]]).discriminant_class(),
            Err(FormError::OddDimension)
        );
        let k2 = gf(2, 1);
        assert_eq!(
            quad(&k2, &[&[0, 1], &[0, 0]]).discriminant_class(),
            Err(FormError::EvenCharacteristic)
        );
    }

    #[test]
    fn decomposition_examples() {
        let k3 = gf(3, 1);
        let q = quad(&k3, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 1]]);
        let d = q.decompose_hyperbolic_germ(B).unwrap();
        assert_eq!(d.hyperbolic_rank(), 1);
        assert_eq!(d.gamma, Some(k3.one()));
        let aniso = quad(&k3, &[&[1, 0], &[0, 1]]);
        let d = aniso.decompose_hyperbolic_germ(B).unwrap();
        assert_eq!(d.hyperbolic_rank(), 0);
        assert_eq!(d.germ, aniso);
        let k9 = gf(3, 2);
        let line = QuadraticForm::new(k9.clone(), k9.full(), Matrix::identity(&k9, 1)).unwrap();
        let d = line.decompose_hyperbolic_germ(B).unwrap();
        assert_eq!((d.hyperbolic_rank(), d.gamma), (0, Some(k9.one())));
        assert_eq!(
            quad(&k3, &[&[0, 0], &[0, 0]]).decompose_hyperbolic_germ(B).unwrap_err(),
            FormError::Degenerate
        );
    }

    #[test]
    fn decomposition_reassembles() {
        let k5 = gf(5, 1);
        let q = quad(
            &k5,
            &[&[1, 2, 0, 3], &[0, 3, 1, 0], &[0, 0, 2, 4], &[0, 0, 0, 1]],
        );
        let d = q.decompose_hyperbolic_germ(B).unwrap();
        assert_eq!(d.hyperbolic_rank(), q.witt_index(B).unwrap());
        let p = d.change_of_basis();
        assert_eq!(q.pullback(&p).unwrap(), d.split_form());
        assert!(d.split_form().maps_onto(&p, &q, B).unwrap());
    }

    #[test]
    fn enumerated_isometries() {
        let k3 = gf(3, 1);
        let xy = quad(&k3, &[&[0, 1], &[0, 0]]);
        let all = xy.enumerate_isometries(B).unwrap();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|t| xy.is_isometry(t, B).unwrap()));
        let k9 = gf(3, 2);
        let line = QuadraticForm::new(k9.clone(), k9.full(), Matrix::identity(&k9, 1)).unwrap();
        assert_eq!(line.enumerate_isometries(B).unwrap().len(), 2);
    }

    #[test]
    fn isometry_examples() {
        let k3 = gf(3, 1);
        let xy = quad(&k3, &[&[0, 1], &[0, 0]]);
        let id = Matrix::identity(&k3, 2);
        assert!(xy.is_isometry(&id, B).unwrap());
        let flip = Matrix::from_rows(vec![ints(&k3, &[1, 0]), ints(&k3, &[0, -1])]).unwrap();
        assert!(!xy.is_isometry(&flip, B).unwrap());
        let swap = Matrix::from_rows(vec![ints(&k3, &[0, 1]), ints(&k3, &[1, 0])]).unwrap();
        assert!(xy.is_isometry(&swap, B).unwrap());
        let polar = xy.polar_form();
        assert!(polar.is_isometry(&swap).unwrap());
        assert!(!polar.is_isometry(&flip).unwrap());
    }

    #[test]
    fn polar_of_quadratic_is_alternating_in_char_two() {
        let k4 = gf(2, 2);
        let w = k4.root();
        let m = Matrix::from_rows(vec![vec![w, k4.one()], vec![k4.zero(), w]]).unwrap();
        let q = QuadraticForm::new(k4.clone(), k4.full(), m).unwrap();
        assert_eq!(q.polar_form().classify_reflexive(), FormType::Alternating);
        let k5 = gf(5, 1);
        assert_eq!(
            quad(&k5, &[&[1, 2], &[0, 3]]).polar_form().classify_reflexive(),
            FormType::Symmetric
        );
    }

    #[test]
    fn half_diagonal_quadratic_recovers_polar() {
        let k5 = gf(5, 1);
        let b = bil(&k5, &[&[2, 1], &[1, 4]]);
        let q = b.half_diagonal_quadratic().unwrap();
        assert_eq!(q.polar_form().gram(), b.gram());
    }

    #[test]
    fn closed_form_counts() {
        assert_eq!(expected_singular_count(OrthogonalClass::Plus, 2, 3), Some(4));
        assert_eq!(expected_singular_count(OrthogonalClass::Minus, 2, 3), Some(0));
        assert_eq!(expected_singular_count(OrthogonalClass::Odd, 1, 3), Some(0));
        assert_eq!(expected_singular_count(OrthogonalClass::Odd, 3, 3), Some(8));
        assert_eq!(expected_singular_count(OrthogonalClass::Minus, 3, 3), None);
    }
}
