use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use polar_core::compose::{LinearFunctional, RestrictionContext};
use polar_core::forms::{Budget, FormError};
use polar_core::gf::{prime_power, FieldElement, GaloisField};
use polar_core::linalg::Matrix;
use polar_core::predict::{predict, BaseKind, CompositionDescriptor, FormKind};
use polar_core::serial::{matrix_from_repr, matrix_to_repr, AnyForm, ElementRepr, FormSpec, JobSpec};
use polar_core::verify::{self, Grid, VerifyOptions};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// Composed polar spaces over finite field towers.
#[derive(Parser)]
#[command(name = "polar", version)]
struct Cli {
    /// Cap on vectors enumerated by the brute-force oracle.
    #[arg(long, global = true, env = "POLAR_BUDGET", default_value_t = 1_000_000)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose the form in a job spec and classify the result by enumeration.
    Classify {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Table prediction for a composition descriptor.
    Predict {
        #[arg(long)]
        base: BaseKind,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        w: usize,
        #[arg(long = "A")]
        dim: usize,
        /// Element as a coefficient array such as `[1,1]`, an integer, or `all`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// Compose the bilinear form of an orthogonal base instead of the quadratic form.
        #[arg(long)]
        bilinear: bool,
        /// Defining polynomial of GF(q^w), little-endian, comma separated.
        #[arg(long, value_delimiter = ',')]
        poly: Option<Vec<u32>>,
    },
    /// Run a predictor-versus-oracle sweep.
    Verify {
        /// Grid file; the built-in grid covering every table row by default.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the line-delimited report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed an isometry of the base form and check it preserves the composed form.
    Embed {
        #[arg(long)]
        spec: PathBuf,
        /// Matrix file `[[element…]…]`; sampled from the isometry group if absent.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Invalid(anyhow::Error),
    Mismatch(String),
    Budget(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invalid(e)
    }
}

fn form_failure(e: FormError) -> Failure {
    match e {
        FormError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
        FormError::Inconsistent { .. } => Failure::Mismatch(e.to_string()),
        other => Failure::Invalid(other.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = Budget(cli.budget);
    let result = match cli.command {
        Command::Classify { spec } => classify(&spec, budget),
        Command::Predict {
            base,
            q,
            w,
            dim,
            alpha,
            gamma,
            bilinear,
            poly,
        } => predict_cmd(base, q, w, dim, &alpha, gamma.as_deref(), bilinear, poly),
        Command::Verify { grid, seed, out } => verify_cmd(grid.as_deref(), seed, out.as_deref(), budget),
        Command::Embed { spec, matrix, seed } => embed(&spec, matrix.as_deref(), seed, budget),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("invalid input: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_job(path: &Path, budget: Budget) -> Result<(polar_core::serial::Job, Budget), Failure> {
    let job = JobSpec::parse(&read(path)?).map_err(anyhow::Error::from)?;
    let job = job.build().map_err(anyhow::Error::from)?;
    let budget = job.budget.map(Budget).unwrap_or(budget);
    Ok((job, budget))
}

fn composed_of(job: &polar_core::serial::Job) -> Result<(AnyForm, LinearFunctional), Failure> {
    let l = LinearFunctional::new(job.alpha, job.sub);
    let composed = verify::compose(&job.form, &l).map_err(anyhow::Error::from)?;
    Ok((composed, l))
}

fn classify(spec: &Path, budget: Budget) -> Result<(), Failure> {
    let (job, budget) = load_job(spec, budget)?;
    let (composed, l) = composed_of(&job)?;
    let obs = verify::observe(&composed, budget, true).map_err(form_failure)?;
    let ctx = RestrictionContext::new(job.field.clone(), job.sub, job.form.dim());
    let mut record = serde_json::to_value(&obs).expect("serializable");
    record["composed"] = serde_json::to_value(FormSpec::of(&composed)).expect("serializable");
    record["provenance"] = serde_json::to_value(ctx.provenance(&l)).expect("serializable");
    println!("{record}");
    Ok(())
}

fn parse_element(field: &GaloisField, text: &str) -> anyhow::Result<FieldElement> {
    let repr: ElementRepr =
        serde_json::from_str(text).with_context(|| format!("cannot parse element {text:?}"))?;
    Ok(repr.to_element(field)?)
}

#[allow(clippy::too_many_arguments)]
fn predict_cmd(
    base: BaseKind,
    q: u64,
    w: usize,
    dim: usize,
    alpha: &str,
    gamma: Option<&str>,
    bilinear: bool,
    poly: Option<Vec<u32>>,
) -> Result<(), Failure> {
    let (p, m) = prime_power(q).ok_or_else(|| anyhow!("{q} is not a prime power"))?;
    let field = Arc::new(GaloisField::new(p, m * w, poly.as_deref()).map_err(anyhow::Error::from)?);
    let sub = field.subfield(m).map_err(anyhow::Error::from)?;
    let gamma = gamma.map(|g| parse_element(&field, g)).transpose()?;
    let kind = if base.is_orthogonal() && !bilinear {
        FormKind::Quadratic
    } else {
        FormKind::Sesquilinear
    };
    let alphas: Vec<FieldElement> = if alpha == "all" {
        field.elements().collect()
    } else {
        vec![parse_element(&field, alpha)?]
    };
    let mut stdout = io::stdout().lock();
    for a in &alphas {
        let d = CompositionDescriptor {
            field: field.clone(),
            sub,
            base,
            kind,
            dim,
            alpha: *a,
            gamma,
            sigma_power: None,
        };
        let prediction = predict(&d).map_err(anyhow::Error::from)?;
        let mut record = serde_json::to_value(&prediction).expect("serializable");
        if alphas.len() > 1 {
            record["alpha"] = json!(field.coeffs(a));
        }
        if writeln!(stdout, "{record}").is_err() {
            break;
        }
    }
    Ok(())
}

fn verify_cmd(grid: Option<&Path>, seed: u64, out: Option<&Path>, budget: Budget) -> Result<(), Failure> {
    let grid = match grid {
        Some(path) => Grid::parse(&read(path)?).map_err(anyhow::Error::from)?,
        None => Grid::default_grid(),
    };
    let report = verify::run_grid(&grid, VerifyOptions { seed, budget }).map_err(anyhow::Error::from)?;
    let lines = report.to_json_lines();
    match out {
        Some(path) => fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{lines}"),
    }
    let s = &report.summary;
    eprintln!(
        "cells {} matched {} mismatched {} skipped {} excluded {}",
        s.cells, s.matched, s.mismatched, s.skipped, s.excluded
    );
    if !s.rows_uncovered.is_empty() {
        eprintln!("rows not exercised: {}", s.rows_uncovered.join(", "));
    }
    if s.mismatched > 0 {
        return Err(Failure::Mismatch(format!("{} cells disagree", s.mismatched)));
    }
    if s.skipped > 0 {
        return Err(Failure::Budget(format!("{} cells skipped", s.skipped)));
    }
    Ok(())
}

fn sample_isometry(form: &AnyForm, seed: u64, budget: Budget) -> Result<Matrix, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let AnyForm::Quadratic(q) = form {
        if let Ok(all) = q.enumerate_isometries(budget) {
            return Ok(all.choose(&mut rng).expect("identity is an isometry").clone());
        }
    }
    let field = match form {
        AnyForm::Quadratic(q) => q.field().clone(),
        AnyForm::Sesquilinear(b) => b.field().clone(),
    };
    for _ in 0..10_000 {
        let t = verify::random_invertible(&field, field.full(), form.dim(), &mut rng);
        if base_isometry(form, &t, budget)? {
            return Ok(t);
        }
    }
    Ok(Matrix::identity(&field, form.dim()))
}

fn base_isometry(form: &AnyForm, t: &Matrix, budget: Budget) -> Result<bool, Failure> {
    match form {
        AnyForm::Quadratic(q) => q.is_isometry(t, budget).map_err(form_failure),
        AnyForm::Sesquilinear(b) => b.is_isometry(t).map_err(form_failure),
    }
}

fn embed(spec: &Path, matrix: Option<&Path>, seed: u64, budget: Budget) -> Result<(), Failure> {
    let (job, budget) = load_job(spec, budget)?;
    let t = match matrix {
        Some(path) => {
            let rows: Vec<Vec<ElementRepr>> =
                serde_json::from_str(&read(path)?).context("matrix file must be [[element…]…]")?;
            Some(matrix_from_repr(&job.field, &rows).map_err(anyhow::Error::from)?)
        }
        None => job.matrix.clone(),
    };
    let t = match t {
        Some(t) => t,
        None => sample_isometry(&job.form, seed, budget)?,
    };
    if !base_isometry(&job.form, &t, budget)? {
        return Err(Failure::Mismatch("matrix is not an isometry of the base form".to_string()));
    }
    let (composed, l) = composed_of(&job)?;
    let ctx = RestrictionContext::new(job.field.clone(), job.sub, job.form.dim());
    let e = ctx.embed_isometry(&t).map_err(anyhow::Error::from)?;
    let ok = base_isometry(&composed, &e, budget)?;
    let record = json!({
        "matrix": matrix_to_repr(&job.field, &t),
        "embedded": matrix_to_repr(&job.field, &e),
        "is_isometry": ok,
        "composed": FormSpec::of(&composed),
        "provenance": ctx.provenance(&l),
    });
    println!("{record}");
    if !ok {
        return Err(Failure::Mismatch("embedded matrix does not preserve the composed form".to_string()));
    }
    Ok(())
}
