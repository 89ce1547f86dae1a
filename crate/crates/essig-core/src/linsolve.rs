//! Exact dense linear solving over rationals by Gaussian elimination.
//!
//! The systems here are small (the `M_n` systems are at most 13x13 at the
//! target truncations; lattice Dirichlet systems are desk-scale), so cubic
//! cost with exact arithmetic is fine. Pivots are chosen among the nonzero
//! candidates by smallest numerator/denominator bit size to limit
//! intermediate coefficient growth.

use thiserror::Error;

use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("matrix is singular")]
pub struct SingularMatrix;

fn pivot_weight(x: &Rational) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Solves `A x = b` exactly. `a` is row-major and consumed as workspace.
pub fn solve_exact(
    mut a: Vec<Vec<Rational>>,
    mut b: Vec<Rational>,
) -> Result<Vec<Rational>, SingularMatrix> {
    let n = a.len();
    assert!(a.iter().all(|row| row.len() == n), "matrix must be square");
    assert_eq!(b.len(), n, "rhs length mismatch");

    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !Scalar::is_zero(&a[r][col]))
            .min_by_key(|&r| pivot_weight(&a[r][col]))
            .ok_or(SingularMatrix)?;
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (a_pivot, a_rest) = a.split_at_mut(col + 1);
        let (b_pivot, b_rest) = b.split_at_mut(col + 1);
        let pivot_row = &a_pivot[col];
        let pivot = &pivot_row[col];
        for (row, b_row) in a_rest.iter_mut().zip(b_rest.iter_mut()) {
            if Scalar::is_zero(&row[col]) {
                continue;
            }
            let factor = &row[col] / pivot;
            for (dst, src) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= &factor * src;
            }
            *b_row -= &factor * &b_pivot[col];
        }
    }

    let mut x = vec![<Rational as Scalar>::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn solves_small_system() {
        // [2 1; 1 3] x = [5; 10] -> x = (1, 3)
        let a = vec![
            vec![ratio(2, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(3, 1)],
        ];
        let b = vec![ratio(5, 1), ratio(10, 1)];
        assert_eq!(solve_exact(a, b).unwrap(), vec![ratio(1, 1), ratio(3, 1)]);
    }

    #[test]
    fn needs_pivoting() {
        let a = vec![
            vec![ratio(0, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(0, 1)],
        ];
        let b = vec![ratio(7, 1), ratio(-2, 1)];
        assert_eq!(solve_exact(a, b).unwrap(), vec![ratio(-2, 1), ratio(7, 1)]);
    }

    #[test]
    fn rejects_singular() {
        let a = vec![
            vec![ratio(1, 1), ratio(2, 1)],
            vec![ratio(2, 1), ratio(4, 1)],
        ];
        let b = vec![ratio(1, 1), ratio(2, 1)];
        assert_eq!(solve_exact(a, b), Err(SingularMatrix));
    }

    #[test]
    fn residual_is_zero_exactly() {
        let n = 6;
        let a: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| ratio((i * j + 1) as i64, (i + j + 1) as i64))
                    .collect()
            })
            .collect();
        let b: Vec<Rational> = (0..n).map(|i| ratio(i as i64 - 3, 5)).collect();
        let x = solve_exact(a.clone(), b.clone()).unwrap();
        for i in 0..n {
            let mut acc = <Rational as Scalar>::zero();
            for j in 0..n {
                acc += &a[i][j] * &x[j];
            }
            assert_eq!(acc, b[i]);
        }
    }
}
