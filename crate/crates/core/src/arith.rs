//! Small exact-integer helpers shared by the geometric modules.

use crate::error::{Error, Result};
use num_integer::Integer;

pub fn gcd_slice(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Divide by the gcd of the coordinates. The zero vector is returned as is.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_slice(v);
    if g <= 1 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn is_zero(v: &[i64]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(k: i64, a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| k * x).collect()
}

pub fn neg(a: &[i64]) -> Vec<i64> {
    a.iter().map(|x| -x).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

pub fn to_i64(x: i128, ctx: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(ctx))
}

pub fn narrow(v: &[i128], ctx: &'static str) -> Result<Vec<i64>> {
    v.iter().map(|&x| to_i64(x, ctx)).collect()
}

/// Fraction-free (Bareiss) elimination on a copy of `rows`; returns the rank.
pub fn rank(rows: &[Vec<i64>]) -> Result<usize> {
    if rows.is_empty() {
        return Ok(0);
    }
    let n = rows[0].len();
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut r = 0;
    let mut prev: i128 = 1;
    for c in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..n {
                let v = m[r][c]
                    .checked_mul(m[i][j])
                    .and_then(|a| m[i][c].checked_mul(m[r][j]).and_then(|b| a.checked_sub(b)))
                    .ok_or(Error::Overflow("rank"))?;
                m[i][j] = v / prev;
            }
            m[i][c] = 0;
        }
        prev = m[r][c];
        r += 1;
        if r == m.len() {
            break;
        }
    }
    Ok(r)
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn det(a: &[Vec<i64>]) -> Result<i128> {
    let n = a.len();
    if n == 0 {
        return Ok(1);
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return Ok(0) };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[k][k]
                    .checked_mul(m[i][j])
                    .and_then(|x| m[i][k].checked_mul(m[k][j]).and_then(|y| x.checked_sub(y)))
                    .ok_or(Error::Overflow("det"))?;
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Adjugate and determinant: `adj * a = det * I`.
pub fn adjugate(a: &[Vec<i64>]) -> Result<(Vec<Vec<i128>>, i128)> {
    let n = a.len();
    let d = det(a)?;
    let mut adj = vec![vec![0i128; n]; n];
    if n == 1 {
        adj[0][0] = 1;
        return Ok((adj, d));
    }
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| a[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            // adj[j][i] = cofactor(i, j)
            adj[j][i] = s * det(&minor)?;
        }
    }
    Ok((adj, d))
}

/// Integer basis of `{x : a·x = 0}` for a nonzero integer functional `a`.
///
/// Built by repeatedly applying extended-gcd column operations, so the
/// returned vectors together with one preimage of `gcd(a)` form a basis of ℤⁿ.
pub fn kernel_basis(a: &[i64]) -> (Vec<Vec<i64>>, Vec<i64>, i64) {
    let n = a.len();
    // columns of a unimodular matrix U with a·U = (0,…,0,g)
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut row: Vec<i64> = a.to_vec();
    for i in 0..n.saturating_sub(1) {
        // fold column i into column n-1
        let (x, y) = (row[i], row[n - 1]);
        if x == 0 {
            continue;
        }
        let eg = x.extended_gcd(&y);
        let (g, s, t) = (eg.gcd, eg.x, eg.y);
        // new last = s*col_i + t*col_last ; new col_i = (y/g)*col_i - (x/g)*col_last
        let (ci, cl) = (u[i].clone(), u[n - 1].clone());
        u[n - 1] = ci.iter().zip(&cl).map(|(p, q)| s * p + t * q).collect();
        u[i] = ci.iter().zip(&cl).map(|(p, q)| (y / g) * p - (x / g) * q).collect();
        row[i] = 0;
        row[n - 1] = g;
    }
    let mut g = row[n - 1];
    let mut pre = u[n - 1].clone();
    if g < 0 {
        g = -g;
        pre = neg(&pre);
    }
    (u[..n - 1].to_vec(), pre, g)
}
