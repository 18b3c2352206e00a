//! Predictor-versus-oracle sweeps: for each cell build a representative base
//! form of the declared class, compose it, classify the result by brute
//! force and compare with the tables.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compose::{compose_quadratic, compose_sesquilinear, ComposeError, LinearFunctional};
use crate::forms::{Budget, FormError, FormType, OrthogonalClass, QuadraticForm, SesquilinearForm};
use crate::gf::{prime_power, FieldElement, GaloisField, SquareClass, Subfield};
use crate::linalg::{self, Matrix};
use crate::predict::{predict, BaseKind, ComposedType, CompositionDescriptor, FormKind, Prediction, TABLE_ROWS};
use crate::serial::{AnyForm, ElementRepr, SpecError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
}

/// Brute-force verdict on a composed form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub degenerate: bool,
    #[serde(rename = "type")]
    pub kind: ComposedType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflexive: Option<FormType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonal_class: Option<OrthogonalClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witt_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_count: Option<u64>,
    pub radical_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant_class: Option<SquareClass>,
}

pub fn observe_quadratic(q: &QuadraticForm, budget: Budget) -> Result<Observation, FormError> {
    let report = q.orthogonal_report(budget)?;
    let degenerate = report.class == OrthogonalClass::Degenerate;
    let discriminant_class = if !degenerate && !q.field().is_char_two() && q.dim().is_multiple_of(2) {
        Some(q.discriminant_class()?)
    } else {
        None
    };
    Ok(Observation {
        degenerate,
        kind: ComposedType::Orthogonal(report.class),
        reflexive: Some(q.polar_form().classify_reflexive()),
        orthogonal_class: Some(report.class),
        witt_index: report.witt_index,
        singular_count: report.singular_count,
        radical_dim: report.radical_dim,
        discriminant_class,
    })
}

/// Symmetric forms in odd characteristic are classified through
/// `Q(v) = ½β(v,v)`; with `witt` set, other non-degenerate forms also get a
/// Witt index.
pub fn observe_sesquilinear(b: &SesquilinearForm, budget: Budget, witt: bool) -> Result<Observation, FormError> {
    let reflexive = b.classify_reflexive();
    let radical_dim = b.radical().len();
    let empty = Observation {
        degenerate: true,
        kind: ComposedType::DEGENERATE,
        reflexive: Some(reflexive),
        orthogonal_class: None,
        witt_index: None,
        singular_count: None,
        radical_dim,
        discriminant_class: None,
    };
    if radical_dim > 0 {
        return Ok(empty);
    }
    if reflexive == FormType::Symmetric {
        let mut o = observe_quadratic(&b.half_diagonal_quadratic()?, budget)?;
        o.reflexive = Some(reflexive);
        return Ok(o);
    }
    Ok(Observation {
        degenerate: false,
        kind: ComposedType::Reflexive(reflexive),
        witt_index: if witt { Some(b.witt_index(budget)?) } else { None },
        ..empty
    })
}

pub fn observe(form: &AnyForm, budget: Budget, witt: bool) -> Result<Observation, FormError> {
    match form {
        AnyForm::Quadratic(q) => observe_quadratic(q, budget),
        AnyForm::Sesquilinear(b) => observe_sesquilinear(b, budget, witt),
    }
}

pub fn compose(form: &AnyForm, l: &LinearFunctional) -> Result<AnyForm, ComposeError> {
    Ok(match form {
        AnyForm::Quadratic(q) => AnyForm::Quadratic(compose_quadratic(q, l)?),
        AnyForm::Sesquilinear(b) => AnyForm::Sesquilinear(compose_sesquilinear(b, l)?),
    })
}

/// First `(b, c)` in element order with `x² + bxy + cy²` anisotropic over K.
pub fn anisotropic_binary(field: &GaloisField) -> (FieldElement, FieldElement) {
    for b in field.elements() {
        for c in field.elements() {
            let has_root = field.elements().any(|t| {
                field.add(&field.mul(&t, &field.add(&t, &b)), &c).is_zero()
            });
            if !has_root {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// Fixed representative of an orthogonal class over the whole field, scaled
/// by `γ` (for `O`, `γ` is the germ coefficient).
pub fn orthogonal_representative(
    field: &Arc<GaloisField>,
    class: OrthogonalClass,
    dim: usize,
    gamma: FieldElement,
) -> Result<QuadraticForm, FormError> {
    let f = &**field;
    let mut u = Matrix::zeros(dim, dim);
    let pairs = match class {
        OrthogonalClass::Plus => dim / 2,
        OrthogonalClass::Minus => dim / 2 - 1,
        _ => dim / 2,
    };
    for i in 0..pairs {
        u.set(2 * i, 2 * i + 1, gamma);
    }
    match class {
        OrthogonalClass::Minus => {
            let (b, c) = anisotropic_binary(f);
            let k = dim - 2;
            u.set(k, k, gamma);
            u.set(k, k + 1, f.mul(&gamma, &b));
            u.set(k + 1, k + 1, f.mul(&gamma, &c));
        }
        OrthogonalClass::Odd => u.set(dim - 1, dim - 1, gamma),
        _ => {}
    }
    QuadraticForm::new(field.clone(), field.full(), u)
}

/// Fixed representative of a base kind over the whole field.
pub fn representative(
    field: &Arc<GaloisField>,
    base: BaseKind,
    kind: FormKind,
    dim: usize,
    gamma: FieldElement,
) -> Result<AnyForm, FormError> {
    let f = &**field;
    if let Some(class) = base.orthogonal_class() {
        let q = orthogonal_representative(field, class, dim, gamma)?;
        return Ok(match kind {
            FormKind::Quadratic => AnyForm::Quadratic(q),
            FormKind::Sesquilinear => AnyForm::Sesquilinear(q.polar_form()),
        });
    }
    let (gram, sigma) = match base {
        BaseKind::Hermitian => (Matrix::identity(f, dim), f.degree() / 2),
        BaseKind::PseudoSymplectic => (Matrix::identity(f, dim), 0),
        _ => {
            let mut m = Matrix::zeros(dim, dim);
            for i in 0..dim / 2 {
                m.set(2 * i, 2 * i + 1, f.one());
                m.set(2 * i + 1, 2 * i, f.neg(&f.one()));
            }
            (m, 0)
        }
    };
    Ok(AnyForm::Sesquilinear(SesquilinearForm::new(
        field.clone(),
        field.full(),
        gram,
        sigma,
    )?))
}

/// Checks a representative really has the declared class.
pub fn validate_base(form: &AnyForm, base: BaseKind, budget: Budget) -> Result<bool, FormError> {
    Ok(match (form, base.orthogonal_class()) {
        (AnyForm::Quadratic(q), Some(c)) => q.orthogonal_class(budget)? == c,
        (AnyForm::Sesquilinear(b), Some(c)) => {
            if b.field().is_char_two() {
                !b.is_degenerate() && b.classify_reflexive() == FormType::Alternating
            } else {
                b.half_diagonal_quadratic()?.orthogonal_class(budget)? == c
            }
        }
        (AnyForm::Sesquilinear(b), None) => {
            let want = match base {
                BaseKind::Hermitian => FormType::Hermitian,
                BaseKind::Alternating => FormType::Alternating,
                _ => FormType::SymmetricNotAlternating,
            };
            !b.is_degenerate() && b.classify_reflexive() == want
        }
        (AnyForm::Quadratic(_), None) => false,
    })
}

pub fn random_invertible(field: &GaloisField, scalars: Subfield, n: usize, rng: &mut impl Rng) -> Matrix {
    let elements = field.subfield_elements(scalars);
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| elements[rng.gen_range(0..elements.len())]).collect())
            .collect();
        let m = Matrix::from_rows(rows).expect("square");
        if linalg::rank(field, &m) == n {
            return m;
        }
    }
}

/// The form in the basis given by the columns of `p`.
pub fn pullback(form: &AnyForm, p: &Matrix) -> Result<AnyForm, FormError> {
    Ok(match form {
        AnyForm::Quadratic(q) => AnyForm::Quadratic(q.pullback(p)?),
        AnyForm::Sesquilinear(b) => AnyForm::Sesquilinear(b.pullback(p)?),
    })
}

/// Which elements a grid block sweeps over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSet {
    Named(NamedSet),
    List(Vec<ElementRepr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedSet {
    All,
    Nonzero,
    /// `{1, g}` with `g` the first primitive element.
    Representatives,
}

impl ElementSet {
    pub fn resolve(&self, field: &GaloisField) -> Result<Vec<FieldElement>, SpecError> {
        Ok(match self {
            ElementSet::Named(NamedSet::All) => field.elements().collect(),
            ElementSet::Named(NamedSet::Nonzero) => field.elements().skip(1).collect(),
            ElementSet::Named(NamedSet::Representatives) => {
                let g = field.primitive_element();
                if g == field.one() {
                    vec![g]
                } else {
                    vec![field.one(), g]
                }
            }
            ElementSet::List(xs) => xs
                .iter()
                .map(|x| x.to_element(field))
                .collect::<Result<_, _>>()?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindSelector {
    Quadratic,
    Sesquilinear,
    Both,
}

fn default_nonzero() -> ElementSet {
    ElementSet::Named(NamedSet::Nonzero)
}

fn default_gamma() -> ElementSet {
    ElementSet::List(vec![ElementRepr::Int(1)])
}

fn default_kind() -> KindSelector {
    KindSelector::Both
}

fn all_bases() -> Vec<BaseKind> {
    BaseKind::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridBlock {
    pub q: Vec<u64>,
    pub w: Vec<usize>,
    #[serde(rename = "A")]
    pub dims: Vec<usize>,
    #[serde(default = "all_bases")]
    pub bases: Vec<BaseKind>,
    #[serde(default = "default_kind")]
    pub kind: KindSelector,
    #[serde(default = "default_nonzero")]
    pub alpha: ElementSet,
    /// Germ or scaling coefficient; used for orthogonal bases only.
    #[serde(default = "default_gamma")]
    pub gamma: ElementSet,
    /// Extra randomly re-based copies of each representative.
    #[serde(default)]
    pub samples: usize,
    /// Skip cells whose composed space has more than this many vectors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_space: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub blocks: Vec<GridBlock>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Small grid that fires every table row.
    pub fn default_grid() -> Self {
        let nonzero = default_nonzero();
        let block = |q: Vec<u64>, w: Vec<usize>, dims: Vec<usize>, bases: Vec<BaseKind>, gamma: ElementSet| GridBlock {
            q,
            w,
            dims,
            bases,
            kind: KindSelector::Both,
            alpha: nonzero.clone(),
            gamma,
            samples: 0,
            max_space: None,
        };
        let reps = ElementSet::Named(NamedSet::Representatives);
        use BaseKind::*;
        Grid {
            blocks: vec![
                block(vec![2, 3], vec![1, 2, 3], vec![1, 2], vec![Plus, Minus, Odd], reps.clone()),
                block(vec![3], vec![2], vec![3], vec![Odd], reps),
                block(vec![2, 3], vec![2], vec![1, 2, 3], vec![Hermitian], default_gamma()),
                block(vec![4], vec![3], vec![1], vec![Hermitian], default_gamma()),
                block(vec![2, 3], vec![1, 2], vec![2], vec![Alternating, PseudoSymplectic], default_gamma()),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub q: u64,
    pub w: usize,
    #[serde(rename = "A")]
    pub dim: usize,
    pub base: BaseKind,
    pub kind: FormKind,
    pub alpha: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<u32>>,
    pub sample: usize,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<Prediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<Observation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub matched: usize,
    pub mismatched: usize,
    pub skipped: usize,
    /// Parameter combinations with no valid base form (e.g. O⁺ in odd dimension).
    pub excluded: usize,
    pub rows_covered: BTreeMap<String, usize>,
    pub rows_uncovered: Vec<String>,
    /// Indices into the cell list.
    pub mismatches: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub budget: u64,
    pub cells: Vec<CellRecord>,
    pub summary: Summary,
}

impl VerifyReport {
    /// One JSON object per cell, then a `{"summary": …}` line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&serde_json::to_string(c).expect("serializable"));
            out.push('\n');
        }
        let tail = serde_json::json!({ "seed": self.seed, "budget": self.budget, "summary": self.summary });
        out.push_str(&tail.to_string());
        out.push('\n');
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[derive(Default)]
pub struct VerifyOptions {
    pub seed: u64,
    pub budget: Budget,
}


fn applicable(field: &GaloisField, base: BaseKind, kind: FormKind, dim: usize) -> bool {
    let even_q = field.is_char_two();
    let parity_ok = match base {
        BaseKind::Plus | BaseKind::Minus | BaseKind::Alternating => dim.is_multiple_of(2),
        BaseKind::Odd => dim % 2 == 1,
        _ => true,
    };
    let kind_ok = match (base.is_orthogonal(), kind) {
        (true, FormKind::Quadratic) => true,
        (true, FormKind::Sesquilinear) => !even_q,
        (false, FormKind::Quadratic) => false,
        (false, FormKind::Sesquilinear) => true,
    };
    let field_ok = match base {
        BaseKind::Hermitian => field.degree().is_multiple_of(2),
        BaseKind::PseudoSymplectic => even_q,
        _ => true,
    };
    parity_ok && kind_ok && field_ok
}

fn kinds(sel: KindSelector) -> &'static [FormKind] {
    match sel {
        KindSelector::Quadratic => &[FormKind::Quadratic],
        KindSelector::Sesquilinear => &[FormKind::Sesquilinear],
        KindSelector::Both => &[FormKind::Quadratic, FormKind::Sesquilinear],
    }
}

fn field_for(q: u64, w: usize) -> Result<(Arc<GaloisField>, Subfield), VerifyError> {
    let (p, m) = prime_power(q).ok_or(VerifyError::NotPrimePower(q))?;
    let field = GaloisField::new(p, m * w, None).map_err(SpecError::from)?;
    let sub = field.subfield(m).map_err(SpecError::from)?;
    Ok((Arc::new(field), sub))
}

/// Runs every cell of the grid.
pub fn run_grid(grid: &Grid, opts: VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cells = Vec::new();
    let mut excluded = 0usize;
    for block in &grid.blocks {
        for &q in &block.q {
            for &w in &block.w {
                let (field, sub) = field_for(q, w)?;
                let alphas = block.alpha.resolve(&field)?;
                let gammas = block.gamma.resolve(&field)?;
                for &dim in &block.dims {
                    for &base in &block.bases {
                        for &kind in kinds(block.kind) {
                            if !applicable(&field, base, kind, dim) {
                                excluded += alphas.len();
                                continue;
                            }
                            let gs: Vec<Option<FieldElement>> = if base.is_orthogonal() {
                                gammas.iter().map(|g| Some(*g)).collect()
                            } else {
                                vec![None]
                            };
                            for gamma in gs {
                                if gamma.is_some_and(|g| g.is_zero()) {
                                    excluded += alphas.len();
                                    continue;
                                }
                                let cell = CellBase {
                                    field: &field,
                                    sub,
                                    q,
                                    w,
                                    dim,
                                    base,
                                    kind,
                                    gamma,
                                    max_space: block.max_space,
                                };
                                for sample in 0..=block.samples {
                                    cell.run(&alphas, sample, &mut rng, opts.budget, &mut cells)?;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let summary = summarize(&cells, excluded);
    Ok(VerifyReport {
        seed: opts.seed,
        budget: opts.budget.0,
        cells,
        summary,
    })
}

struct CellBase<'a> {
    field: &'a Arc<GaloisField>,
    sub: Subfield,
    q: u64,
    w: usize,
    dim: usize,
    base: BaseKind,
    kind: FormKind,
    gamma: Option<FieldElement>,
    max_space: Option<u64>,
}

impl CellBase<'_> {
    fn record(&self, alpha: &FieldElement, sample: usize, status: CellStatus) -> CellRecord {
        let f = &**self.field;
        CellRecord {
            q: self.q,
            w: self.w,
            dim: self.dim,
            base: self.base,
            kind: self.kind,
            alpha: f.coeffs(alpha),
            gamma: self.gamma.map(|g| f.coeffs(&g)),
            sample,
            status,
            predicted: None,
            observed: None,
            reason: None,
        }
    }

    fn run(
        &self,
        alphas: &[FieldElement],
        sample: usize,
        rng: &mut ChaCha8Rng,
        budget: Budget,
        out: &mut Vec<CellRecord>,
    ) -> Result<(), VerifyError> {
        let f = &**self.field;
        let space = (self.q as u128).pow((self.dim * self.w) as u32);
        let limit = self.max_space.unwrap_or(u64::MAX).min(budget.0) as u128;
        let skip_all = |reason: String, out: &mut Vec<CellRecord>| {
            for a in alphas {
                let mut r = self.record(a, sample, CellStatus::Skipped);
                r.reason = Some(reason.clone());
                out.push(r);
            }
        };
        if space > limit {
            skip_all(format!("space of {space} vectors exceeds limit {limit}"), out);
            return Ok(());
        }
        let gamma = self.gamma.unwrap_or_else(|| f.one());
        let mut base = representative(self.field, self.base, self.kind, self.dim, gamma)?;
        if sample > 0 {
            let p = random_invertible(f, f.full(), self.dim, rng);
            base = pullback(&base, &p)?;
        }
        match validate_base(&base, self.base, budget) {
            Ok(true) => {}
            Ok(false) => {
                for a in alphas {
                    let mut r = self.record(a, sample, CellStatus::Mismatch);
                    r.reason = Some("representative does not have the declared class".to_string());
                    out.push(r);
                }
                return Ok(());
            }
            Err(FormError::BudgetExceeded { needed, budget }) => {
                skip_all(format!("base validation needs {needed} vectors, budget {budget}"), out);
                return Ok(());
            }
            Err(e) => return Err(e.into()),
        }
        for alpha in alphas {
            let d = CompositionDescriptor {
                field: self.field.clone(),
                sub: self.sub,
                base: self.base,
                kind: self.kind,
                dim: self.dim,
                alpha: *alpha,
                gamma: self.gamma,
                sigma_power: None,
            };
            let mut r = self.record(alpha, sample, CellStatus::Match);
            let predicted = match predict(&d) {
                Ok(p) => p,
                Err(e) => {
                    r.status = CellStatus::Mismatch;
                    r.reason = Some(format!("predictor rejected the descriptor: {e}"));
                    out.push(r);
                    continue;
                }
            };
            let composed = compose(&base, &LinearFunctional::new(*alpha, self.sub))?;
            match observe(&composed, budget, false) {
                Ok(o) => {
                    if o.degenerate != predicted.degenerate || o.kind != predicted.kind {
                        r.status = CellStatus::Mismatch;
                    }
                    r.observed = Some(o);
                }
                Err(FormError::BudgetExceeded { needed, budget }) => {
                    r.status = CellStatus::Skipped;
                    r.reason = Some(format!("oracle needs {needed} vectors, budget {budget}"));
                }
                Err(e) => {
                    r.status = CellStatus::Mismatch;
                    r.reason = Some(format!("oracle error: {e}"));
                }
            }
            r.predicted = Some(predicted);
            out.push(r);
        }
        Ok(())
    }
}

fn summarize(cells: &[CellRecord], excluded: usize) -> Summary {
    let mut s = Summary {
        cells: cells.len(),
        excluded,
        ..Summary::default()
    };
    for (i, c) in cells.iter().enumerate() {
        match c.status {
            CellStatus::Match => s.matched += 1,
            CellStatus::Mismatch => {
                s.mismatched += 1;
                s.mismatches.push(i);
            }
            CellStatus::Skipped => s.skipped += 1,
        }
        if c.status != CellStatus::Skipped {
            if let Some(p) = &c.predicted {
                for row in &p.conditions_fired {
                    *s.rows_covered.entry(row.clone()).or_default() += 1;
                }
            }
        }
    }
    s.rows_uncovered = TABLE_ROWS
        .iter()
        .filter(|r| !s.rows_covered.contains_key(**r))
        .map(|r| r.to_string())
        .collect();
    s
}
