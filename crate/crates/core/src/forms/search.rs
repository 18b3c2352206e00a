//! Exhaustive enumeration over F^n with vectors stored as digit arrays of
//! F-indices (see [`SubfieldTable`]).
//!
//! The maximal totally null subspace search is a clique search in the
//! orthogonality graph of normalized null points. A branch only extends by
//! points of larger index that lie outside the current span, which reaches
//! every subspace (through its lexicographically greedy basis) without
//! needing a visited set.

use std::sync::Arc;

use crate::gf::{GaloisField, Subfield, SubfieldTable};
use crate::linalg::{Matrix, Vector};

use super::{Budget, FormError};

pub(crate) struct Space {
    pub table: Arc<SubfieldTable>,
    pub n: usize,
    pub q: usize,
    pub size: usize,
}

impl Space {
    pub fn new(
        field: &GaloisField,
        scalars: Subfield,
        n: usize,
        budget: Budget,
    ) -> Result<Self, FormError> {
        let q = field.subfield_order(scalars);
        let needed = (q as u128).pow(n as u32);
        if needed > budget.0 as u128 {
            return Err(FormError::BudgetExceeded {
                needed: u64::try_from(needed).unwrap_or(u64::MAX),
                budget: budget.0,
            });
        }
        let table = field
            .subfield_table(scalars)
            .map_err(|_| FormError::BudgetExceeded {
                needed: u64::try_from(needed).unwrap_or(u64::MAX),
                budget: budget.0,
            })?;
        Ok(Space {
            table,
            n,
            q: q as usize,
            size: needed as usize,
        })
    }

    pub fn index(&self, digits: &[u16]) -> usize {
        digits
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * self.q + d as usize)
    }

    /// Calls `f` on every vector in index order (coordinate 0 fastest).
    pub fn for_each(&self, mut f: impl FnMut(&[u16])) {
        let mut v = vec![0u16; self.n];
        loop {
            f(&v);
            let mut i = 0;
            loop {
                if i == self.n {
                    return;
                }
                v[i] += 1;
                if (v[i] as usize) < self.q {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    pub fn is_normalized(&self, v: &[u16]) -> bool {
        v.iter().find(|&&d| d != 0) == Some(&1)
    }

    pub fn to_vector(&self, v: &[u16]) -> Vector {
        v.iter().map(|&d| self.table.element(d)).collect()
    }

    pub fn matrix_digits(&self, m: &Matrix) -> Result<Vec<u16>, FormError> {
        m.entries()
            .map(|x| self.table.index(x).ok_or(FormError::NotInScalars))
            .collect()
    }

    #[inline]
    pub fn dot(&self, a: &[u16], b: &[u16]) -> u16 {
        let t = &self.table;
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| t.add(acc, t.mul(x, y)))
    }

    /// `M v` for a row-major digit matrix.
    pub fn mat_vec(&self, m: &[u16], v: &[u16]) -> Vec<u16> {
        (0..self.n)
            .map(|i| self.dot(&m[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    /// `vᵀ M`.
    pub fn vec_mat(&self, v: &[u16], m: &[u16]) -> Vec<u16> {
        let t = &self.table;
        (0..self.n)
            .map(|j| {
                (0..self.n).fold(0, |acc, i| t.add(acc, t.mul(v[i], m[i * self.n + j])))
            })
            .collect()
    }
}

/// Quadratic form `Σ_{i≤j} U_ij v_i v_j` in digit form.
pub(crate) struct QuadraticDigits<'a> {
    pub space: &'a Space,
    upper: Vec<u16>,
    gram: Vec<u16>,
}

impl<'a> QuadraticDigits<'a> {
    pub fn new(space: &'a Space, upper: &Matrix) -> Result<Self, FormError> {
        let n = space.n;
        let upper = space.matrix_digits(upper)?;
        let t = &space.table;
        let mut gram = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] = t.add(upper[i * n + j], upper[j * n + i]);
            }
        }
        Ok(QuadraticDigits { space, upper, gram })
    }

    pub fn value(&self, v: &[u16]) -> u16 {
        let t = &self.space.table;
        let n = self.space.n;
        let mut acc = 0u16;
        for i in 0..n {
            if v[i] == 0 {
                continue;
            }
            let mut row = 0u16;
            for j in i..n {
                row = t.add(row, t.mul(self.upper[i * n + j], v[j]));
            }
            acc = t.add(acc, t.mul(v[i], row));
        }
        acc
    }

    pub fn polar_dual(&self, v: &[u16]) -> Vec<u16> {
        self.space.mat_vec(&self.gram, v)
    }

    /// Normalized singular points, in index order.
    pub fn singular_points(&self) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        self.space.for_each(|v| {
            if self.space.is_normalized(v) && self.value(v) == 0 {
                out.push(v.to_vec());
            }
        });
        out
    }
}

/// `β(u,v) = Σ u_i M_ij σ(v_j)` in digit form.
pub(crate) struct SesquilinearDigits<'a> {
    pub space: &'a Space,
    gram: Vec<u16>,
    sigma: Vec<u16>,
}

impl<'a> SesquilinearDigits<'a> {
    pub fn new(
        space: &'a Space,
        field: &GaloisField,
        gram: &Matrix,
        sigma_power: usize,
    ) -> Result<Self, FormError> {
        let t = &space.table;
        let sigma = t
            .elements
            .iter()
            .map(|x| t.index(&field.frobenius_power(x, sigma_power)).expect("σ preserves subfields"))
            .collect();
        Ok(SesquilinearDigits {
            space,
            gram: space.matrix_digits(gram)?,
            sigma,
        })
    }

    pub fn twist(&self, v: &[u16]) -> Vec<u16> {
        v.iter().map(|&d| self.sigma[d as usize]).collect()
    }

    pub fn eval(&self, u: &[u16], v: &[u16]) -> u16 {
        let sv = self.twist(v);
        self.space.dot(u, &self.space.mat_vec(&self.gram, &sv))
    }

    /// `(Mσ(v), vᵀM)` so that `β(u,v) = u·right` and `β(v,u) = left·σ(u)`.
    pub fn duals(&self, v: &[u16]) -> (Vec<u16>, Vec<u16>) {
        let right = self.space.mat_vec(&self.gram, &self.twist(v));
        let left = self.space.vec_mat(v, &self.gram);
        (right, left)
    }

    pub fn isotropic_points(&self) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        self.space.for_each(|v| {
            if self.space.is_normalized(v) && self.eval(v, v) == 0 {
                out.push(v.to_vec());
            }
        });
        out
    }
}

/// Result of the maximal totally null subspace search.
pub(crate) struct NullSearchResult {
    pub dim: usize,
    pub basis: Vec<Vec<u16>>,
}

struct NullSearch<'a, F: Fn(usize, usize) -> bool> {
    space: &'a Space,
    points: &'a [Vec<u16>],
    point_index: Vec<usize>,
    orth: F,
    bound: usize,
    in_span: Vec<bool>,
    span: Vec<Vec<u16>>,
    basis: Vec<usize>,
    best: Vec<usize>,
}

impl<F: Fn(usize, usize) -> bool> NullSearch<'_, F> {
    fn push(&mut self, c: usize) -> usize {
        let t = &self.space.table;
        let before = self.span.len();
        let dir = &self.points[c];
        for s in 0..before {
            for lambda in 1..self.space.q as u16 {
                let v: Vec<u16> = self.span[s]
                    .iter()
                    .zip(dir)
                    .map(|(&a, &b)| t.add(a, t.mul(lambda, b)))
                    .collect();
                let idx = self.space.index(&v);
                self.in_span[idx] = true;
                self.span.push(v);
            }
        }
        self.basis.push(c);
        before
    }

    fn pop(&mut self, before: usize) {
        for v in self.span.drain(before..) {
            let idx = self.space.index(&v);
            self.in_span[idx] = false;
        }
        self.basis.pop();
    }

    fn run(&mut self, cands: &[usize]) -> bool {
        if self.basis.len() > self.best.len() {
            self.best = self.basis.clone();
        }
        if self.basis.len() == self.bound {
            return true;
        }
        for (pos, &c) in cands.iter().enumerate() {
            if self.in_span[self.point_index[c]] {
                continue;
            }
            let before = self.push(c);
            let next: Vec<usize> = cands[pos + 1..]
                .iter()
                .copied()
                .filter(|&d| !self.in_span[self.point_index[d]] && (self.orth)(c, d))
                .collect();
            let done = self.run(&next);
            self.pop(before);
            if done {
                return true;
            }
        }
        false
    }
}

/// Largest subspace spanned by mutually orthogonal null points. `orth` must
/// be the full (two-sided) orthogonality test on point indices; the search
/// stops as soon as `bound` is reached.
pub(crate) fn max_totally_null(
    space: &Space,
    points: &[Vec<u16>],
    orth: impl Fn(usize, usize) -> bool,
    bound: usize,
) -> NullSearchResult {
    let mut in_span = vec![false; space.size];
    in_span[0] = true;
    let mut search = NullSearch {
        space,
        points,
        point_index: points.iter().map(|p| space.index(p)).collect(),
        orth,
        bound,
        in_span,
        span: vec![vec![0u16; space.n]],
        basis: Vec::new(),
        best: Vec::new(),
    };
    let all: Vec<usize> = (0..points.len()).collect();
    search.run(&all);
    NullSearchResult {
        dim: search.best.len(),
        basis: search.best.iter().map(|&i| points[i].clone()).collect(),
    }
}
