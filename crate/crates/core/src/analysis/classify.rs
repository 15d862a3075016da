//! Pre-log classification of a K-receiver broadcast channel from its noise
//! correlation matrix.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::sqrt;

/// Eigenvalue floor for the positive semi-definiteness check.
pub const PSD_TOL: f64 = -1e-9;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prelog {
    One,
    Two,
    /// Some pair of receivers sees perfectly positively correlated noise;
    /// the classification rules do not cover this case.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrelogClass {
    pub value: Prelog,
    pub reason: String,
}

/// Eigenvalues of a symmetric `n x n` matrix (row-major) by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    let mut a = matrix.to_vec();
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= 1e-30 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Classify the pre-log from a `K x K` matrix of pairwise noise correlations.
pub fn prelog_classify(corr: &[Vec<f64>]) -> Result<PrelogClass> {
    let k = corr.len();
    if k < 2 {
        return Err(Error::param("corr", "need at least two receivers"));
    }
    if corr.iter().any(|row| row.len() != k) {
        return Err(Error::param("corr", "matrix must be square"));
    }
    let mut flat = Vec::with_capacity(k * k);
    for (i, row) in corr.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() || !(-1.0..=1.0).contains(&x) {
                return Err(Error::param("corr", "entries must lie in [-1, 1]"));
            }
            if i == j && (x - 1.0).abs() > SYMMETRY_TOL {
                return Err(Error::param("corr", "diagonal entries must equal 1"));
            }
            if (x - corr[j][i]).abs() > SYMMETRY_TOL {
                return Err(Error::param("corr", "matrix must be symmetric"));
            }
            flat.push(x);
        }
    }
    let min_eig = symmetric_eigenvalues(&flat, k).into_iter().fold(f64::INFINITY, f64::min);
    if min_eig < PSD_TOL {
        return Err(Error::param("corr", "matrix is not positive semi-definite"));
    }

    let pairs = || (0..k).flat_map(move |i| (i + 1..k).map(move |j| (i, j)));
    if let Some((i, j)) = pairs().find(|&(i, j)| corr[i][j] == 1.0) {
        return Ok(PrelogClass {
            value: Prelog::Undefined,
            reason: format!(
                "receivers {} and {} have perfectly positively correlated noise; not covered by the classification rules",
                i + 1,
                j + 1
            ),
        });
    }
    if let Some((i, j)) = pairs().find(|&(i, j)| corr[i][j] == -1.0) {
        return Ok(PrelogClass {
            value: Prelog::Two,
            reason: format!("receivers {} and {} have perfectly anti-correlated noise", i + 1, j + 1),
        });
    }
    Ok(PrelogClass { value: Prelog::One, reason: String::from("no pair of receivers has perfectly correlated noise") })
}
