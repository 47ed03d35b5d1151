//! Exact vectors and square matrices over rational scalars.
//!
//! These are deliberately small: dense storage, exact arithmetic, and the
//! handful of order/norm operations the growth machinery needs (entrywise
//! domination for Pareto fronts, max-norm and diagonal extraction for
//! spectral enclosures).

use std::fmt;
use std::ops::Index;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, Scalar};

/// Dense column of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    entries: Vec<Scalar>,
}

impl Vector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        Vector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector {
            entries: vec![Scalar::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn set(&mut self, i: usize, value: Scalar) {
        self.entries[i] = value;
    }

    pub fn add_assign_at(&mut self, i: usize, value: Scalar) {
        self.entries[i] += value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// First index holding a negative entry, if any.
    pub fn first_negative(&self) -> Option<usize> {
        self.entries.iter().position(|e| e.is_negative())
    }

    /// Entrywise `self ≤ other`. Both orders of equal vectors are true.
    pub fn le(&self, other: &Vector) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries.iter().zip(other.iter()).all(|(a, b)| a <= b)
    }

    /// Strict domination: `≤` everywhere and `≠` somewhere.
    pub fn dominated_by(&self, other: &Vector) -> bool {
        self.le(other) && self != other
    }

    pub fn max_entry(&self) -> &Scalar {
        self.entries
            .iter()
            .max()
            .expect("max_entry on empty vector")
    }

    /// Sum of all entries.
    pub fn sum(&self) -> Scalar {
        self.entries.iter().sum()
    }
}

impl Index<usize> for Vector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.entries[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, e) in self.entries.iter().enumerate() {
            if idx > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_scalar(e))?;
        }
        write!(f, ")")
    }
}

/// Dense square matrix over exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    dim: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![Scalar::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Scalar::one());
        }
        m
    }

    /// Builds a matrix from rows, checking squareness.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "matrix row",
                    expected: dim,
                    found: row.len(),
                });
            }
        }
        for row in rows {
            entries.extend(row);
        }
        Ok(Matrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn add_assign_at(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i * self.dim + j] += value;
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| !e.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Entrywise `≤`.
    pub fn le(&self, other: &Matrix) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        self.entries.iter().zip(other.entries.iter()).all(|(a, b)| a <= b)
    }

    pub fn dominated_by(&self, other: &Matrix) -> bool {
        self.le(other) && self != other
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.add_assign_at(i, j, a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.dim, v.dim(), "matrix-vector dimension mismatch");
        let d = self.dim;
        let mut out = Vector::zeros(d);
        for i in 0..d {
            let mut acc = Scalar::zero();
            for j in 0..d {
                let a = self.get(i, j);
                if !a.is_zero() {
                    acc += a * &v[j];
                }
            }
            out.set(i, acc);
        }
        out
    }

    /// `self^n` by repeated squaring; `n = 0` gives the identity.
    pub fn pow(&self, n: u32) -> Matrix {
        let mut acc = Matrix::identity(self.dim);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> Scalar {
        self.entries
            .iter()
            .map(|e| e.abs())
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    /// Largest diagonal entry together with its index.
    pub fn max_diagonal(&self) -> (usize, &Scalar) {
        let mut best = 0;
        for i in 1..self.dim {
            if self.get(i, i) > self.get(best, best) {
                best = i;
            }
        }
        (best, self.get(best, best))
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", format_scalar(self.get(i, j)))?;
            }
        }
        write!(f, "]")
    }
}

/// Convenience for tests and fixtures: matrix from integer rows.
pub fn matrix_from_i64(rows: &[&[i64]]) -> Matrix {
    let d = rows.len();
    let mut m = Matrix::zeros(d);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), d, "square matrix expected");
        for (j, &v) in row.iter().enumerate() {
            m.set(i, j, crate::scalar::int(v));
        }
    }
    m
}

/// Convenience for tests and fixtures: vector from integers.
pub fn vector_from_i64(entries: &[i64]) -> Vector {
    Vector::new(entries.iter().map(|&v| crate::scalar::int(v)).collect())
}

/// Solves `a · z = b` exactly by Gaussian elimination with partial pivoting.
/// Returns [`Error::SingularSystem`] when no unique solution exists.
pub fn solve_linear(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "right-hand side of linear solve",
            expected: n,
            found: b.dim(),
        });
    }
    // Augmented rows [a | b], mutated in place.
    let mut rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> = (0..n).map(|j| a.get(i, j).clone()).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        // Largest-magnitude pivot keeps intermediate rationals smaller.
        let pivot = (col..n)
            .filter(|&r| !rows[r][col].is_zero())
            .max_by(|&r1, &r2| rows[r1][col].abs().cmp(&rows[r2][col].abs()));
        let Some(pivot) = pivot else {
            return Err(Error::SingularSystem(format!(
                "no pivot in column {col} during elimination"
            )));
        };
        rows.swap(col, pivot);
        let (upper, lower) = rows.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let factor = &row[col] / &pivot_row[col];
            for (c, p) in pivot_row.iter().enumerate().skip(col) {
                let delta = &factor * p;
                row[c] -= delta;
            }
        }
    }
    // Back substitution.
    let mut solution = vec![Scalar::zero(); n];
    for col in (0..n).rev() {
        let mut acc = rows[col][n].clone();
        for c in col + 1..n {
            acc -= &rows[col][c] * &solution[c];
        }
        solution[col] = acc / &rows[col][col];
    }
    Ok(Vector::new(solution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn matrix_power_and_norms() {
        let l = matrix_from_i64(&[&[1, 1], &[1, 0]]);
        let l3 = l.pow(3);
        assert_eq!(l3, matrix_from_i64(&[&[3, 2], &[2, 1]]));
        assert_eq!(l.pow(0), Matrix::identity(2));
        assert_eq!(l3.max_norm(), int(3));
        let (i, v) = l3.max_diagonal();
        assert_eq!((i, v.clone()), (0, int(3)));
    }

    #[test]
    fn domination_is_strict() {
        let a = vector_from_i64(&[4, 2]);
        let b = vector_from_i64(&[5, 3]);
        assert!(a.dominated_by(&b));
        assert!(!b.dominated_by(&a));
        assert!(!a.dominated_by(&a));
        assert!(a.le(&a));
        let c = vector_from_i64(&[5, 2]);
        assert!(c.dominated_by(&b));
        assert!(a.dominated_by(&c));
        let d = vector_from_i64(&[3, 9]);
        assert!(!d.dominated_by(&c) && !c.dominated_by(&d));
    }

    #[test]
    fn linear_solve_is_exact() {
        use crate::scalar::rat;
        // 2x + y = 5, x + 3y = 5  →  x = 2, y = 1
        let a = matrix_from_i64(&[&[2, 1], &[1, 3]]);
        let b = vector_from_i64(&[5, 5]);
        assert_eq!(solve_linear(&a, &b).unwrap(), vector_from_i64(&[2, 1]));
        // Rational solution stays exact.
        let b2 = vector_from_i64(&[1, 1]);
        let z = solve_linear(&a, &b2).unwrap();
        assert_eq!(z, Vector::new(vec![rat(2, 5), rat(1, 5)]));
        // Singular matrix is refused.
        let s = matrix_from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            solve_linear(&s, &b),
            Err(Error::SingularSystem(_))
        ));
        // A zero pivot that needs row swapping still solves.
        let p = matrix_from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(
            solve_linear(&p, &vector_from_i64(&[3, 4])).unwrap(),
            vector_from_i64(&[4, 3])
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(vector_from_i64(&[3, 2]).to_string(), "(3, 2)");
        assert_eq!(
            matrix_from_i64(&[&[1, 1], &[0, 1]]).to_string(),
            "[1 1; 0 1]"
        );
    }
}
