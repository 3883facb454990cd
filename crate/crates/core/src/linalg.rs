//! Small dense linear algebra over a [`Scalar`] field.
//!
//! Elimination is fraction-free (Bareiss): every intermediate entry is a
//! minor of the input, so exact rationals never grow beyond the size of a
//! determinant. Matrices here are at most a few rows, so no blocking or
//! sparse structure is attempted.

use crate::scalar::Scalar;

/// Index of the pivot row for column `col` among `rows[start..]`.
///
/// Exact types take the first nonzero entry; floats take the largest.
fn pick_pivot<T: Scalar>(m: &[Vec<T>], start: usize, col: usize) -> Option<usize> {
    if T::EXACT {
        (start..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        (start..m.len())
            .filter(|&r| !m[r][col].is_zero_tol())
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
    }
}

/// Bareiss forward elimination on `m`, pivoting only in the first
/// `pivot_limit` columns. Returns the rank, whether the row swaps flipped
/// the sign, and the pivot columns.
fn bareiss<T: Scalar>(m: &mut [Vec<T>], pivot_limit: usize) -> (usize, bool, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut prev = T::one();
    let mut r = 0;
    let mut negated = false;
    let mut pivot_cols = Vec::new();
    for c in 0..pivot_limit {
        if r == rows {
            break;
        }
        let Some(p) = pick_pivot(m, r, c) else { continue };
        if p != r {
            m.swap(p, r);
            negated = !negated;
        }
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let v = (m[r][c].clone() * &m[i][j] - m[i][c].clone() * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = T::zero();
        }
        prev = m[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }
    (r, negated, pivot_cols)
}

/// Determinant of a square matrix.
pub fn det<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut work = m.to_vec();
    let (rank, negated, _) = bareiss(&mut work, n);
    if rank < n {
        return T::zero();
    }
    let d = work[n - 1][n - 1].clone();
    if negated {
        -d
    } else {
        d
    }
}

/// Rank of a (possibly rectangular) matrix.
pub fn rank<T: Scalar>(m: &[Vec<T>]) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let mut work = m.to_vec();
    bareiss(&mut work, cols).0
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (rank, _, pivots) = bareiss(&mut aug, n);
    if rank < n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return None;
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = aug[i][n].clone();
        for j in (i + 1)..n {
            acc -= aug[i][j].clone() * &x[j];
        }
        x[i] = acc / &aug[i][i];
    }
    Some(x)
}

/// A vector spanning the kernel of an `(n-1) × n` matrix, built from signed
/// maximal minors. Zero when the rows are dependent.
pub fn kernel_vector<T: Scalar>(rows: &[Vec<T>], n: usize) -> Vec<T> {
    debug_assert!(rows.len() + 1 == n);
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<T>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let d = det(&minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Exact integer determinant (Bareiss over `i128`).
pub fn integer_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    let mut prev: i128 = 1;
    let mut sign = 1;
    for k in 0..n {
        if a[k][k] == 0 {
            match ((k + 1)..n).find(|&r| a[r][k] != 0) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Affine dimension of a point set (-1 for the empty set).
pub fn affine_dim<T: Scalar>(points: &[&[T]]) -> isize {
    match points.split_first() {
        None => -1,
        Some((p0, rest)) => {
            let diffs: Vec<Vec<T>> =
                rest.iter().map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a.clone() - b).collect()).collect();
            rank(&diffs) as isize
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()
    }

    #[test]
    fn determinant_with_row_swap() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(det(&a), q(-1, 1));
        let b = m(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 1]]);
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(det(&b), q(0, 1));
        let c = m(&[&[0, 2, 1], &[1, 3, 2], &[4, 1, 1]]);
        assert_eq!(det(&c), q(3, 1));
    }

    #[test]
    fn solve_small_systems() {
        let a = vec![vec![q(71, 36), q(-49, 36)], vec![q(-49, 36), q(71, 36)]];
        let x = solve(&a, &[q(1, 3), q(1, 3)]).unwrap();
        assert_eq!(x, vec![q(6, 11), q(6, 11)]);
        let sing = m(&[&[1, 2], &[2, 4]]);
        assert!(solve(&sing, &[q(1, 1), q(2, 1)]).is_none());
    }

    #[test]
    fn solve_needs_pivoting() {
        let a = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let x = solve(&a, &[q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        assert_eq!(x, vec![q(3, 1), q(1, 1), q(2, 1)]);
    }

    #[test]
    fn float_solve_matches_exact() {
        let a = vec![vec![265.0 / 252.0, -121.0 / 504.0], vec![-121.0 / 504.0, 265.0 / 252.0]];
        let x = solve(&a, &[-1.0 / 3.0, -1.0 / 3.0]).unwrap();
        assert!((x[0] + 168.0 / 409.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_of_a_line() {
        let rows = m(&[&[1, 2]]);
        let k = kernel_vector(&rows, 2);
        assert_eq!(k, vec![q(2, 1), q(-1, 1)]);
        let rows3 = m(&[&[1, 0, 0], &[0, 1, 0]]);
        assert_eq!(kernel_vector(&rows3, 3), vec![q(0, 1), q(0, 1), q(1, 1)]);
    }

    #[test]
    fn integer_determinants() {
        assert_eq!(integer_det(&[vec![-1, 0], vec![1, 2]]), -2);
        assert_eq!(integer_det(&[vec![0, 1], vec![1, 0]]), -1);
        assert_eq!(integer_det(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 2);
    }

    #[test]
    fn ranks_and_affine_dims() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
        let pts = m(&[&[0, 0], &[1, 1], &[2, 2]]);
        let refs: Vec<&[Rational]> = pts.iter().map(|p| p.as_slice()).collect();
        assert_eq!(affine_dim(&refs), 1);
        assert_eq!(affine_dim::<Rational>(&[]), -1);
    }
}
