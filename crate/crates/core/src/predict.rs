//! Decision tables for the type of a composed form, computed from the
//! declared base class and the field data alone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{FormType, OrthogonalClass};
use crate::gf::{FieldElement, FieldError, GaloisField, SquareClass, Subfield};

/// Declared class of the base form over K.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseKind {
    #[serde(rename = "O+")]
    Plus,
    #[serde(rename = "O-")]
    Minus,
    #[serde(rename = "O")]
    Odd,
    #[serde(rename = "hermitian")]
    Hermitian,
    #[serde(rename = "alternating")]
    Alternating,
    #[serde(rename = "pseudo-symplectic")]
    PseudoSymplectic,
}

impl BaseKind {
    pub const ALL: [BaseKind; 6] = [
        BaseKind::Plus,
        BaseKind::Minus,
        BaseKind::Odd,
        BaseKind::Hermitian,
        BaseKind::Alternating,
        BaseKind::PseudoSymplectic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BaseKind::Plus => "O+",
            BaseKind::Minus => "O-",
            BaseKind::Odd => "O",
            BaseKind::Hermitian => "hermitian",
            BaseKind::Alternating => "alternating",
            BaseKind::PseudoSymplectic => "pseudo-symplectic",
        }
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, BaseKind::Plus | BaseKind::Minus | BaseKind::Odd)
    }

    pub fn orthogonal_class(self) -> Option<OrthogonalClass> {
        match self {
            BaseKind::Plus => Some(OrthogonalClass::Plus),
            BaseKind::Minus => Some(OrthogonalClass::Minus),
            BaseKind::Odd => Some(OrthogonalClass::Odd),
            _ => None,
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BaseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "O+" | "O⁺" | "plus" => Ok(BaseKind::Plus),
            "O-" | "O⁻" | "minus" => Ok(BaseKind::Minus),
            "O" | "odd" => Ok(BaseKind::Odd),
            "hermitian" | "U" => Ok(BaseKind::Hermitian),
            "alternating" | "Sp" => Ok(BaseKind::Alternating),
            "pseudo-symplectic" | "symmetric-not-alternating" => Ok(BaseKind::PseudoSymplectic),
            other => Err(format!("unknown base kind {other:?}")),
        }
    }
}

/// Whether the orthogonal base is composed as a quadratic form or as its
/// symmetric bilinear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Quadratic,
    Sesquilinear,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredictError {
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("gamma is required for an odd-dimensional orthogonal base")]
    MissingGamma,
    #[error("gamma must be nonzero")]
    ZeroGamma,
    #[error("sigma must have order 2 on the field")]
    SigmaNotOrderTwo,
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Everything the tables look at. `field` is the top field K, `sub` is F.
#[derive(Clone, Debug)]
pub struct CompositionDescriptor {
    pub field: Arc<GaloisField>,
    pub sub: Subfield,
    pub base: BaseKind,
    pub kind: FormKind,
    pub dim: usize,
    pub alpha: FieldElement,
    pub gamma: Option<FieldElement>,
    pub sigma_power: Option<usize>,
}

impl CompositionDescriptor {
    pub fn q(&self) -> u64 {
        self.field.subfield_order(self.sub)
    }

    pub fn w(&self) -> usize {
        self.field.relative_degree(self.sub)
    }

    /// σ for a hermitian base; the involution of K unless overridden.
    pub fn sigma(&self) -> usize {
        self.sigma_power.unwrap_or(self.field.degree() / 2)
    }

    /// Structural checks the tables rely on.
    pub fn validate(&self) -> Result<(), PredictError> {
        let even_q = self.field.is_char_two();
        let invalid = |s: &str| Err(PredictError::Invalid(s.to_string()));
        if self.dim == 0 {
            return invalid("dimension must be positive");
        }
        if !self.base.is_orthogonal() && self.kind == FormKind::Quadratic {
            return invalid("only orthogonal bases compose as quadratic forms");
        }
        match self.base {
            BaseKind::Plus | BaseKind::Minus | BaseKind::Alternating if self.dim % 2 == 1 => {
                invalid("this base kind needs even dimension")
            }
            BaseKind::Odd if self.dim.is_multiple_of(2) => invalid("base O needs odd dimension"),
            BaseKind::PseudoSymplectic if !even_q => invalid("pseudo-symplectic needs q even"),
            BaseKind::Hermitian => {
                let n = self.field.degree();
                if n % 2 == 1 || self.sigma() % n != n / 2 {
                    Err(PredictError::SigmaNotOrderTwo)
                } else {
                    Ok(())
                }
            }
            b if b.is_orthogonal() && self.kind == FormKind::Sesquilinear && even_q => {
                invalid("the bilinear form of an orthogonal base in even characteristic is alternating or degenerate")
            }
            _ => Ok(()),
        }?;
        if self.gamma.is_some_and(|g| g.is_zero()) {
            return Err(PredictError::ZeroGamma);
        }
        Ok(())
    }
}

/// Predicted type of the composed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ComposedType {
    Reflexive(FormType),
    Orthogonal(OrthogonalClass),
}

impl ComposedType {
    pub const DEGENERATE: ComposedType = ComposedType::Orthogonal(OrthogonalClass::Degenerate);

    pub fn label(self) -> &'static str {
        match self {
            ComposedType::Reflexive(t) => t.label(),
            ComposedType::Orthogonal(c) => c.label(),
        }
    }
}

impl fmt::Display for ComposedType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for ComposedType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for ComposedType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if let Ok(c) = s.parse::<OrthogonalClass>() {
            return Ok(ComposedType::Orthogonal(c));
        }
        let t = match s.as_str() {
            "alternating" => FormType::Alternating,
            "symmetric" => FormType::Symmetric,
            "symmetric-not-alternating" => FormType::SymmetricNotAlternating,
            "hermitian" => FormType::Hermitian,
            "atypical" => FormType::Atypical,
            other => return Err(serde::de::Error::custom(format!("unknown type {other:?}"))),
        };
        Ok(ComposedType::Reflexive(t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub degenerate: bool,
    #[serde(rename = "type")]
    pub kind: ComposedType,
    pub embedding: String,
    pub conditions_fired: Vec<String>,
}

impl Prediction {
    fn new(kind: ComposedType, embedding: String, row: &str) -> Self {
        Prediction {
            degenerate: kind == ComposedType::DEGENERATE,
            kind,
            embedding,
            conditions_fired: vec![row.to_string()],
        }
    }

    fn unlabelled(kind: ComposedType, row: &str) -> Self {
        Self::new(kind, NO_EMBEDDING.to_string(), row)
    }
}

pub const NO_EMBEDDING: &str = "—";

/// Rows of the two decision tables; a sweep should fire each at least once.
pub const TABLE_ROWS: [&str; 15] = [
    "orth.plus",
    "orth.minus",
    "orth.odd-q-even-degenerate",
    "orth.odd-w-odd",
    "orth.odd-w-even-plus",
    "orth.odd-w-even-minus",
    "herm.w-odd-hermitian",
    "herm.w-odd-atypical",
    "herm.w-even-q-even-alternating",
    "herm.w-even-q-odd-alternating",
    "herm.w-even-atypical",
    "herm.w-even-O+",
    "herm.w-even-O-",
    "alt.alternating",
    "pseudo.pseudo-symplectic",
];

/// How the germ condition measures `αγ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GermExponent {
    /// `N_{GF(q^w)/GF(q^{w/2})}(αγ) = (αγ)^{q^{w/2}+1}`.
    #[default]
    RelativeNorm,
    /// `(αγ)^{q+1}`; a value outside `GF(q^{w/2})` counts as `≢ −1`.
    Literal,
}

fn group(name: &str, dim: usize, q: u64) -> String {
    format!("{name}({dim},{q})")
}

fn embedding(from: &str, to: &str, d: &CompositionDescriptor) -> String {
    let q = d.q();
    let big = q.pow(d.w() as u32);
    format!(
        "{} ≤ {}",
        group(from, d.dim, big),
        group(to, d.dim * d.w(), q)
    )
}

fn orthogonal_symbol(c: OrthogonalClass) -> &'static str {
    match c {
        OrthogonalClass::Plus => "O⁺",
        OrthogonalClass::Minus => "O⁻",
        _ => "O",
    }
}

/// Degeneracy of the composed form, assuming a non-degenerate base.
pub fn predict_degeneracy(d: &CompositionDescriptor) -> bool {
    if d.alpha.is_zero() {
        return true;
    }
    d.kind == FormKind::Quadratic && d.field.is_char_two() && d.dim % 2 == 1 && d.w() >= 2
}

/// How `L` interacts with `σ`: `L∘σ` against `σ∘L` for odd `w`, and
/// against `±L` for even `w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LSigma {
    Commutes,
    Equal,
    Negated,
    Neither,
}

pub fn lsigma_relation(
    field: &GaloisField,
    sub: Subfield,
    alpha: &FieldElement,
    sigma_power: usize,
) -> Result<LSigma, PredictError> {
    let n = field.degree();
    if n % 2 == 1 || sigma_power % n != n / 2 {
        return Err(PredictError::SigmaNotOrderTwo);
    }
    let s = field.frobenius_power(alpha, sigma_power);
    let w = field.relative_degree(sub);
    Ok(if w % 2 == 1 {
        if s == *alpha {
            LSigma::Commutes
        } else {
            LSigma::Neither
        }
    } else if s == *alpha {
        LSigma::Equal
    } else if s == field.neg(alpha) {
        LSigma::Negated
    } else {
        LSigma::Neither
    })
}

/// Reflexive type of the composed (bilinear or sesquilinear) form.
pub fn predict_type(d: &CompositionDescriptor) -> Result<FormType, PredictError> {
    if d.alpha.is_zero() {
        return Err(PredictError::ZeroAlpha);
    }
    d.validate()?;
    let even_q = d.field.is_char_two();
    Ok(match d.base {
        BaseKind::Alternating => FormType::Alternating,
        BaseKind::PseudoSymplectic => FormType::SymmetricNotAlternating,
        BaseKind::Plus | BaseKind::Minus | BaseKind::Odd => {
            if even_q {
                FormType::Alternating
            } else {
                FormType::Symmetric
            }
        }
        BaseKind::Hermitian => match lsigma_relation(&d.field, d.sub, &d.alpha, d.sigma())? {
            LSigma::Commutes => FormType::Hermitian,
            LSigma::Equal if even_q => FormType::Alternating,
            LSigma::Equal => FormType::Symmetric,
            LSigma::Negated => FormType::Alternating,
            LSigma::Neither => FormType::Atypical,
        },
    })
}

/// Orthogonal table, with the default germ exponent.
pub fn predict_orthogonal_class(d: &CompositionDescriptor) -> Result<Prediction, PredictError> {
    predict_orthogonal_class_with(d, GermExponent::RelativeNorm)
}

pub fn predict_orthogonal_class_with(
    d: &CompositionDescriptor,
    exponent: GermExponent,
) -> Result<Prediction, PredictError> {
    if d.alpha.is_zero() {
        return Err(PredictError::ZeroAlpha);
    }
    d.validate()?;
    let w = d.w();
    let even_q = d.field.is_char_two();
    let class = d
        .base
        .orthogonal_class()
        .ok_or_else(|| PredictError::Invalid(format!("{} is not an orthogonal base", d.base)))?;
    let classical = |to: OrthogonalClass, row: &str| {
        Prediction::new(
            ComposedType::Orthogonal(to),
            embedding(orthogonal_symbol(class), orthogonal_symbol(to), d),
            row,
        )
    };
    Ok(match class {
        OrthogonalClass::Plus => classical(OrthogonalClass::Plus, "orth.plus"),
        OrthogonalClass::Minus => classical(OrthogonalClass::Minus, "orth.minus"),
        _ if w == 1 && even_q => classical(OrthogonalClass::Odd, "orth.scalar-w1"),
        _ if even_q => Prediction::unlabelled(ComposedType::DEGENERATE, "orth.odd-q-even-degenerate"),
        _ if w % 2 == 1 => classical(OrthogonalClass::Odd, "orth.odd-w-odd"),
        _ => {
            let gamma = d.gamma.ok_or(PredictError::MissingGamma)?;
            if germ_is_plus(&d.field, d.sub, &d.alpha, &gamma, exponent)? {
                classical(OrthogonalClass::Plus, "orth.odd-w-even-plus")
            } else {
                classical(OrthogonalClass::Minus, "orth.odd-w-even-minus")
            }
        }
    })
}

/// Germ condition for `Tr(αγ x²)`, `w` even, `q` odd: plus iff `(αγ)^{−2}`
/// is a nonsquare of `H = GF(q^{w/2})` or the measure of `αγ` is not `−1`
/// modulo `H*²`.
pub fn germ_is_plus(
    field: &GaloisField,
    sub: Subfield,
    alpha: &FieldElement,
    gamma: &FieldElement,
    exponent: GermExponent,
) -> Result<bool, PredictError> {
    let w = field.relative_degree(sub);
    if w % 2 == 1 || field.is_char_two() {
        return Err(PredictError::Invalid(
            "germ condition needs w even and q odd".to_string(),
        ));
    }
    let h = field.subfield(sub.degree() * w / 2)?;
    let ag = field.mul(alpha, gamma);
    let inv = field.inv(&ag).ok_or(PredictError::ZeroAlpha)?;
    let x = field.mul(&inv, &inv);
    let first = field.is_in_subfield(&x, h) && field.square_class(&x, h)? == SquareClass::Nonsquare;
    let q = field.subfield_order(sub);
    let e = match exponent {
        GermExponent::RelativeNorm => field.subfield_order(h) + 1,
        GermExponent::Literal => q + 1,
    };
    let measure = field.pow(&ag, e);
    let minus_one = field.neg(&field.one());
    let second = !field.is_in_subfield(&measure, h)
        || field.square_class(&measure, h)? != field.square_class(&minus_one, h)?;
    Ok(first || second)
}

/// Sesquilinear table; symmetric bilinear bases (q odd) go through the
/// orthogonal table via `Q(v) = ½β(v,v)`.
pub fn predict_sesquilinear(d: &CompositionDescriptor) -> Result<Prediction, PredictError> {
    if d.alpha.is_zero() {
        return Err(PredictError::ZeroAlpha);
    }
    d.validate()?;
    let w = d.w();
    let even_q = d.field.is_char_two();
    if d.base.is_orthogonal() {
        let mut p = predict_orthogonal_class(d)?;
        p.conditions_fired.push("sym.via-quadratic".to_string());
        return Ok(p);
    }
    Ok(match d.base {
        BaseKind::Alternating => Prediction::new(
            ComposedType::Reflexive(FormType::Alternating),
            embedding("Sp", "Sp", d),
            "alt.alternating",
        ),
        BaseKind::PseudoSymplectic => Prediction::unlabelled(
            ComposedType::Reflexive(FormType::SymmetricNotAlternating),
            "pseudo.pseudo-symplectic",
        ),
        _ => {
            let rel = lsigma_relation(&d.field, d.sub, &d.alpha, d.sigma())?;
            match rel {
                LSigma::Commutes => Prediction::new(
                    ComposedType::Reflexive(FormType::Hermitian),
                    embedding("U", "U", d),
                    "herm.w-odd-hermitian",
                ),
                LSigma::Neither if w % 2 == 1 => Prediction::unlabelled(
                    ComposedType::Reflexive(FormType::Atypical),
                    "herm.w-odd-atypical",
                ),
                LSigma::Neither => Prediction::unlabelled(
                    ComposedType::Reflexive(FormType::Atypical),
                    "herm.w-even-atypical",
                ),
                LSigma::Equal if even_q => Prediction::new(
                    ComposedType::Reflexive(FormType::Alternating),
                    embedding("U", "Sp", d),
                    "herm.w-even-q-even-alternating",
                ),
                LSigma::Negated => Prediction::new(
                    ComposedType::Reflexive(FormType::Alternating),
                    embedding("U", "Sp", d),
                    "herm.w-even-q-odd-alternating",
                ),
                LSigma::Equal if d.dim.is_multiple_of(2) => Prediction::new(
                    ComposedType::Orthogonal(OrthogonalClass::Plus),
                    embedding("U", "O⁺", d),
                    "herm.w-even-O+",
                ),
                LSigma::Equal => Prediction::new(
                    ComposedType::Orthogonal(OrthogonalClass::Minus),
                    embedding("U", "O⁻", d),
                    "herm.w-even-O-",
                ),
            }
        }
    })
}

/// Full prediction: degeneracy first, then the applicable table.
pub fn predict(d: &CompositionDescriptor) -> Result<Prediction, PredictError> {
    d.validate()?;
    if d.alpha.is_zero() {
        return Ok(Prediction::unlabelled(
            ComposedType::DEGENERATE,
            "degeneracy.zero-functional",
        ));
    }
    match d.kind {
        FormKind::Quadratic => predict_orthogonal_class(d),
        FormKind::Sesquilinear => predict_sesquilinear(d),
    }
}
