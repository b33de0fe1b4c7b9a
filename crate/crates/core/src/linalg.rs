//! Exact Gaussian elimination over a [`Field`](crate::ff::Field).

use crate::ff::FieldElement;

/// Determinant of a square matrix given by rows. The matrix must be nonempty.
pub fn determinant(mut rows: Vec<Vec<FieldElement>>) -> FieldElement {
    let n = rows.len();
    assert!(n > 0 && rows.iter().all(|r| r.len() == n), "determinant needs a nonempty square matrix");
    let field = rows[0][0].field().clone();
    let mut det = field.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !rows[r][col].is_zero()) else {
            return field.zero();
        };
        if pivot != col {
            rows.swap(pivot, col);
            det = -det;
        }
        let inv = rows[col][col].inverse().expect("pivot is nonzero");
        det = &det * &rows[col][col];
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] * &inv;
            for c in col..n {
                let sub = &factor * &rows[col][c];
                rows[r][c] = &rows[r][c] - &sub;
            }
        }
    }
    det
}

/// Solves `A x = b` for square nonsingular `A`. Returns `None` when `A` is singular.
pub fn solve(mut a: Vec<Vec<FieldElement>>, mut b: Vec<FieldElement>) -> Option<Vec<FieldElement>> {
    let n = a.len();
    assert!(b.len() == n && a.iter().all(|r| r.len() == n), "solve needs a square system");
    if n == 0 {
        return Some(Vec::new());
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot, col);
        b.swap(pivot, col);
        let inv = a[col][col].inverse().expect("pivot is nonzero");
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &sub;
            }
            let sub = &factor * &b[col];
            b[r] = &b[r] - &sub;
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{Field, Modulus};

    #[test]
    fn solve_and_determinant_agree() {
        let k = Field::new(3, 2, Modulus::Default).unwrap();
        let g = |e: i64| k.gen_pow(e);
        let a = vec![vec![g(1), g(2), k.one()], vec![k.zero(), g(5), g(3)], vec![g(7), k.one(), k.zero()]];
        let det = determinant(a.clone());
        let x = vec![g(2), k.zero(), g(6)];
        let b: Vec<_> = a
            .iter()
            .map(|row| row.iter().zip(&x).fold(k.zero(), |acc, (r, xi)| &acc + &(r * xi)))
            .collect();
        if det.is_zero() {
            assert!(solve(a, b).is_none());
        } else {
            assert_eq!(solve(a, b).unwrap(), x);
        }
    }

    #[test]
    fn singular_matrix() {
        let k = Field::new(2, 2, Modulus::Default).unwrap();
        let w = k.indeterminate();
        let a = vec![vec![w.clone(), k.one()], vec![&w * &w, w.clone()]];
        assert!(determinant(a.clone()).is_zero());
        assert!(solve(a, vec![k.one(), k.zero()]).is_none());
    }

    #[test]
    fn permutation_sign() {
        let k = Field::new(5, 1, Modulus::Default).unwrap();
        let a = vec![vec![k.zero(), k.one()], vec![k.one(), k.zero()]];
        assert_eq!(determinant(a), k.from_int(-1));
    }
}
