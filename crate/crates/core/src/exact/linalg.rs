use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense square system `A x = b`.
///
/// Solved by Gaussian elimination with partial pivoting; the solution is
/// accepted only if its max-norm residual is within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<S> {
    pub matrix: Vec<Vec<S>>,
    pub rhs: Vec<S>,
    pub tolerance: S,
}

impl<S: Scalar> LinearSystem<S> {
    pub fn new(matrix: Vec<Vec<S>>, rhs: Vec<S>) -> Result<Self> {
        let n = rhs.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Numerical(format!("system is not {n}x{n}")));
        }
        Ok(LinearSystem {
            matrix,
            rhs,
            tolerance: S::solve_tolerance(),
        })
    }

    pub fn size(&self) -> usize {
        self.rhs.len()
    }

    /// `max_i |(A x - b)_i|`.
    pub fn residual(&self, x: &[S]) -> S {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let ax = row
                    .iter()
                    .zip(x)
                    .fold(S::zero(), |acc, (a, xi)| acc + a.clone() * xi.clone());
                (ax - b.clone()).abs()
            })
            .fold(S::zero(), |m, r| if r > m { r } else { m })
    }

    pub fn solve(&self) -> Result<Vec<S>> {
        let n = self.size();
        let mut a = self.matrix.clone();
        let mut b = self.rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r][col]
                        .abs()
                        .partial_cmp(&a[s][col].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[pivot][col].is_zero() {
                return Err(Error::Numerical(format!("singular matrix at column {col}")));
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            let (upper, lower) = a.split_at_mut(col + 1);
            let prow = &upper[col];
            for (off, row) in lower.iter_mut().enumerate() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone() / prow[col].clone();
                for k in col..n {
                    let delta = factor.clone() * prow[k].clone();
                    row[k] = row[k].clone() - delta;
                }
                let r = col + 1 + off;
                b[r] = b[r].clone() - factor * b[col].clone();
            }
        }
        let mut x = vec![S::zero(); n];
        for row in (0..n).rev() {
            let tail =
                (row + 1..n).fold(S::zero(), |acc, k| acc + a[row][k].clone() * x[k].clone());
            x[row] = (b[row].clone() - tail) / a[row][row].clone();
        }
        let res = self.residual(&x);
        if res > self.tolerance {
            return Err(Error::Numerical(format!(
                "residual {res:?} exceeds tolerance {:?}",
                self.tolerance
            )));
        }
        Ok(x)
    }
}
