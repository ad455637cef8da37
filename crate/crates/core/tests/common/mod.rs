//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

/// Solves `(X'X) b = X'y` by Gaussian elimination with partial pivoting.
/// `columns` holds the regressors column by column.
pub fn normal_equations(columns: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = columns[i].iter().zip(&columns[j]).map(|(p, q)| p * q).sum();
        }
        a[i][k] = columns[i].iter().zip(y).map(|(p, q)| p * q).sum();
    }
    for c in 0..k {
        let pivot = (c..k).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs()))?;
        if a[pivot][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, pivot);
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for j in c..=k {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    let mut b = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|j| a[r][j] * b[j]).sum();
        b[r] = (a[r][k] - s) / a[r][r];
    }
    Some(b)
}

pub fn ssr(columns: &[Vec<f64>], y: &[f64], b: &[f64]) -> f64 {
    (0..y.len())
        .map(|i| {
            let f: f64 = columns.iter().zip(b).map(|(c, bj)| c[i] * bj).sum();
            (y[i] - f).powi(2)
        })
        .sum()
}

/// Regime design rebuilt from scratch: const, [shift], S_low, S_high, trend, residual.
pub fn regime_columns(share: &[f64], trend: &[f64], resid: &[f64], tau: f64, shift: bool) -> Vec<Vec<f64>> {
    let n = share.len();
    let mut cols = vec![vec![1.0; n]];
    if shift {
        cols.push(share.iter().map(|&s| if s > tau { 1.0 } else { 0.0 }).collect());
    }
    cols.push(share.iter().map(|&s| if s <= tau { s } else { 0.0 }).collect());
    cols.push(share.iter().map(|&s| if s > tau { s } else { 0.0 }).collect());
    cols.push(trend.to_vec());
    cols.push(resid.to_vec());
    cols
}

/// Brute-force threshold SSR at `tau` via the normal equations.
pub fn threshold_ssr(share: &[f64], trend: &[f64], resid: &[f64], y: &[f64], tau: f64, shift: bool) -> Option<f64> {
    let cols = regime_columns(share, trend, resid, tau, shift);
    normal_equations(&cols, y).map(|b| ssr(&cols, y, &b))
}

/// Relative error `|a - b| / max(|b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / b.abs().max(floor)
}
