//! Dense matrices over a [`GaloisField`]: Gaussian elimination, kernels,
//! solves and entrywise Frobenius.
//!
//! Matrices are plain data; every operation takes the field explicitly.
//! Elimination always pivots on the first nonzero entry of a column, so
//! kernels come out in reduced-echelon convention and are reproducible.

use thiserror::Error;

use crate::gf::{FieldElement, GaloisField};

pub type Vector = Vec<FieldElement>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged rows")]
    Ragged,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &GaloisField, n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(n: usize, c: FieldElement) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Ragged);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Result<Self, LinalgError> {
        let rows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::Ragged);
        }
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.entries[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &FieldElement> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, field: &GaloisField, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, field.add(&cur, &field.mul(&a, &other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, field: &GaloisField, v: &[FieldElement]) -> Result<Vector, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| dot(field, self.row(i), v))
            .collect())
    }

    pub fn add(&self, field: &GaloisField, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| field.add(a, b))
                .collect(),
        })
    }
}

pub fn dot(field: &GaloisField, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    a.iter()
        .zip(b)
        .fold(FieldElement::ZERO, |acc, (x, y)| field.add(&acc, &field.mul(x, y)))
}

/// Reduced row echelon form and its pivot columns.
pub fn rref(field: &GaloisField, m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(pr) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if pr != r {
            for j in 0..a.cols {
                let t = a.get(r, j);
                a.set(r, j, a.get(pr, j));
                a.set(pr, j, t);
            }
        }
        let inv = field.inv(&a.get(r, c)).expect("pivot is nonzero");
        for j in 0..a.cols {
            a.set(r, j, field.mul(&a.get(r, j), &inv));
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c);
            if f.is_zero() {
                continue;
            }
            for j in 0..a.cols {
                let v = field.sub(&a.get(i, j), &field.mul(&f, &a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(field: &GaloisField, m: &Matrix) -> usize {
    rref(field, m).1.len()
}

/// Basis of `{v : Mv = 0}`, one vector per free column of the reduced
/// echelon form, with a 1 in that free column.
pub fn kernel(field: &GaloisField, m: &Matrix) -> Vec<Vector> {
    let (a, pivots) = rref(field, m);
    let mut basis = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![FieldElement::ZERO; m.cols];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = field.neg(&a.get(r, free));
        }
        basis.push(v);
    }
    basis
}

/// Some `x` with `Mx = b`, or `None` when the system is inconsistent.
pub fn solve(
    field: &GaloisField,
    m: &Matrix,
    b: &[FieldElement],
) -> Result<Option<Vector>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows,
            got: b.len(),
        });
    }
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, m.cols, b[i]);
    }
    let (a, pivots) = rref(field, &aug);
    if pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = vec![FieldElement::ZERO; m.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = a.get(r, m.cols);
    }
    Ok(Some(x))
}

pub fn determinant(field: &GaloisField, m: &Matrix) -> Result<FieldElement, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = field.one();
    for c in 0..n {
        let Some(pr) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
            return Ok(FieldElement::ZERO);
        };
        if pr != c {
            for j in 0..n {
                let t = a.get(c, j);
                a.set(c, j, a.get(pr, j));
                a.set(pr, j, t);
            }
            det = field.neg(&det);
        }
        let pivot = a.get(c, c);
        det = field.mul(&det, &pivot);
        let inv = field.inv(&pivot).expect("pivot is nonzero");
        for i in c + 1..n {
            let f = field.mul(&a.get(i, c), &inv);
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = field.sub(&a.get(i, j), &field.mul(&f, &a.get(c, j)));
                a.set(i, j, v);
            }
        }
    }
    Ok(det)
}

pub fn inverse(field: &GaloisField, m: &Matrix) -> Option<Matrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    let mut aug = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j));
        }
        aug.set(i, n + i, field.one());
    }
    let (a, pivots) = rref(field, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, a.get(i, n + j));
        }
    }
    Some(inv)
}

/// Entrywise `x ↦ x^{p^k}`.
pub fn apply_automorphism(field: &GaloisField, m: &Matrix, k: usize) -> Matrix {
    m.map(|x| field.frobenius_power(x, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32, n: usize) -> GaloisField {
        GaloisField::new(p, n, None).unwrap()
    }

    fn mat(k: &GaloisField, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&c| k.from_int(c)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_examples() {
        let k = gf(5, 1);
        assert_eq!(rank(&k, &Matrix::zeros(3, 2)), 0);
        assert_eq!(rank(&k, &Matrix::identity(&k, 4)), 4);
        assert_eq!(rank(&k, &mat(&k, &[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        let k = gf(2, 1);
        assert!(kernel(&k, &Matrix::identity(&k, 3)).is_empty());
        assert_eq!(kernel(&k, &Matrix::zeros(2, 2)).len(), 2);
        let ker = kernel(&k, &mat(&k, &[&[1, 1], &[1, 1]]));
        assert_eq!(ker, vec![vec![k.one(), k.one()]]);
    }

    #[test]
    fn solve_examples() {
        let k = gf(3, 1);
        let b = vec![k.from_int(2), k.from_int(1)];
        assert_eq!(
            solve(&k, &Matrix::identity(&k, 2), &b).unwrap(),
            Some(b.clone())
        );
        assert_eq!(solve(&k, &Matrix::zeros(2, 2), &b).unwrap(), None);
        let x = solve(&k, &mat(&k, &[&[1, 1], &[0, 1]]), &[k.zero(), k.one()])
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![k.from_int(2), k.from_int(1)]);
        assert!(matches!(
            solve(&k, &Matrix::identity(&k, 2), &[k.one()]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn automorphism_examples() {
        let k = gf(3, 2);
        let i = k.root();
        let m = Matrix::from_rows(vec![vec![i]]).unwrap();
        assert_eq!(apply_automorphism(&k, &m, 0), m);
        assert_eq!(apply_automorphism(&k, &m, 2), m);
        assert_eq!(
            apply_automorphism(&k, &m, 1),
            Matrix::from_rows(vec![vec![k.neg(&i)]]).unwrap()
        );
    }

    #[test]
    fn determinant_and_inverse() {
        let k = gf(5, 1);
        let m = mat(&k, &[&[2, 1], &[1, 3]]);
        assert_eq!(determinant(&k, &m).unwrap(), k.from_int(5));
        let m = mat(&k, &[&[2, 1], &[1, 4]]);
        assert_eq!(determinant(&k, &m).unwrap(), k.from_int(7));
        let inv = inverse(&k, &m).unwrap();
        assert_eq!(m.mul(&k, &inv).unwrap(), Matrix::identity(&k, 2));
        assert!(inverse(&k, &mat(&k, &[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn rank_nullity_exhaustive_2x3_over_gf2() {
        let k = gf(2, 1);
        for bits in 0..64u32 {
            let m = Matrix::from_rows(
                (0..2)
                    .map(|i| (0..3).map(|j| k.from_int(((bits >> (3 * i + j)) & 1) as i64)).collect())
                    .collect(),
            )
            .unwrap();
            let ker = kernel(&k, &m);
            assert_eq!(rank(&k, &m) + ker.len(), 3);
            for v in &ker {
                assert!(m.mul_vec(&k, v).unwrap().iter().all(FieldElement::is_zero));
            }
        }
    }
}
