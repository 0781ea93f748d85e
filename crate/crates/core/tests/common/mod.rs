//! Brute-force oracles shared by the integration tests. None of them reuse
//! the library's enumeration strategies.
#![allow(dead_code)]

use k3cone::lattice::{LatticeClass, NSLattice};
use k3cone::rrk3::K3Context;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::HashSet;

pub fn plain(n: usize) -> NSLattice {
    NSLattice { name: None, gram: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| *x).collect()).collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                s * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn prim(v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 { v } else { v.into_iter().map(|x| x / g).collect() }
}

/// Facet normals of the cone over `rays` (standard dot product): normals of
/// all hyperplanes through n−1 independent rays that leave every ray on one
/// side. `None` if the cone is not full-dimensional and pointed.
pub fn oracle_facets(rays: &[Vec<i64>], n: usize) -> Option<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    let k = rays.len();
    let mut idx: Vec<usize> = (0..n - 1).collect();
    loop {
        let sub: Vec<&Vec<i64>> = idx.iter().map(|&i| &rays[i]).collect();
        let normal: Vec<i64> = (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = sub.iter().map(|v| (0..n).filter(|&j| j != c).map(|j| v[j]).collect()).collect();
                if c % 2 == 0 { det(&minor) } else { -det(&minor) }
            })
            .collect();
        if normal.iter().any(|&x| x != 0) {
            let vals: Vec<i64> = rays.iter().map(|r| dot(&normal, r)).collect();
            let f = if vals.iter().all(|&v| v >= 0) {
                Some(normal)
            } else if vals.iter().all(|&v| v <= 0) {
                Some(normal.iter().map(|x| -x).collect())
            } else {
                None
            };
            if let Some(f) = f {
                let f = prim(f);
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        // next (n−1)-subset
        let mut i = n - 1;
        loop {
            if i == 0 {
                return full_rank(&out, n).then_some(out);
            }
            i -= 1;
            if idx[i] < k - (n - 1 - i) {
                idx[i] += 1;
                for j in i + 1..n - 1 {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        if n == 1 {
            return None;
        }
    }
}

fn full_rank(vs: &[Vec<i64>], n: usize) -> bool {
    // some n×n minor is nonzero
    if vs.len() < n {
        return false;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let m: Vec<Vec<i64>> = idx.iter().map(|&i| vs[i].clone()).collect();
        if det(&m) != 0 {
            return true;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if idx[i] < vs.len() - (n - i) {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Hilbert basis by exhaustion: every basis element lies in the zonotope
/// `Σ [0,1]·rᵢ`, hence in the box of radius `Σ|rᵢⱼ|`; a box point is
/// reducible iff some other nonzero box point of the cone lies below it.
pub fn oracle_hilbert_basis(rays: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let facets = oracle_facets(rays, n).expect("pointed full-dimensional");
    let radius: Vec<i64> = (0..n).map(|j| rays.iter().map(|r| r[j].abs()).sum()).collect();
    let inside = |x: &[i64]| facets.iter().all(|f| dot(f, x) >= 0);
    let witness: Vec<i64> = (0..n).map(|j| facets.iter().map(|f| f[j]).sum()).collect();
    let mut pts: Vec<(i64, Vec<i64>)> = Vec::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        if x.iter().any(|&v| v != 0) && inside(&x) {
            pts.push((dot(&witness, &x), x.clone()));
        }
        let mut k = 0;
        while k < n && x[k] == radius[k] {
            x[k] = -radius[k];
            k += 1;
        }
        if k == n {
            break;
        }
        x[k] += 1;
    }
    pts.sort();
    let mut irreducible: Vec<Vec<i64>> = Vec::new();
    for (_, p) in pts {
        let reducible = irreducible.iter().any(|h| {
            let d: Vec<i64> = p.iter().zip(h).map(|(a, b)| a - b).collect();
            inside(&d)
        });
        if !reducible {
            irreducible.push(p);
        }
    }
    irreducible.sort();
    irreducible
}

/// All `w` with `w·α = level`, `w² = target` in the coordinate box given by
/// the positive definite majorant `Q(x) = 2(x·α)²/α² − x²`: for such `w`,
/// `Q(w) = 2·level²/α² − target` and `wⱼ² ≤ Q(w)·(Q⁻¹)ⱼⱼ`.
pub fn oracle_slice(lat: &NSLattice, alpha: &[i64], level: i64, target: i64) -> Vec<LatticeClass> {
    let n = lat.rank();
    let r = |x: i64| BigRational::from_integer(BigInt::from(x));
    let a2 = lat.square(alpha);
    let ga = lat.functional(alpha);
    let q: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| r(2 * ga[i] * ga[j]) / r(a2) - r(lat.gram[i][j])).collect()).collect();
    let qval = r(2 * level * level) / r(a2) - r(target);
    // inverse by Gauss–Jordan
    let mut m: Vec<Vec<BigRational>> = q
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.extend((0..n).map(|j| r((i == j) as i64)));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero()).unwrap();
        m.swap(c, p);
        let piv = m[c][c].clone();
        for j in 0..2 * n {
            m[c][j] = &m[c][j] / &piv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let v = &f * &m[c][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    let bound: Vec<i64> = (0..n)
        .map(|j| {
            let b = &qval * &m[j][n + j];
            assert!(!b.is_negative());
            let ceil = b.ceil().to_integer();
            let s: BigInt = ceil.sqrt() + 1;
            i64::try_from(s).unwrap()
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = bound.iter().map(|b| -b).collect();
    loop {
        if lat.pair(&x, alpha) == level && lat.square(&x) == target {
            out.push(x.clone());
        }
        let mut k = 0;
        while k < n && x[k] == bound[k] {
            x[k] = -bound[k];
            k += 1;
        }
        if k == n {
            break;
        }
        x[k] += 1;
    }
    out.sort();
    out
}

/// Effective iff `D − Σ aᵢCᵢ` is nef for some nonnegative integers `aᵢ`
/// (nef classes are effective on a K3), with `aᵢ` bounded by ample degree.
pub fn oracle_effective(ctx: &K3Context, d: &[i64]) -> bool {
    fn rec(ctx: &K3Context, rem: Vec<i64>, i: usize, failed: &mut HashSet<(Vec<i64>, usize)>) -> bool {
        let a = &ctx.ample_witness;
        let deg = ctx.pair(&rem, a);
        if deg < 0 || failed.contains(&(rem.clone(), i)) {
            return false;
        }
        if ctx.is_nef(&rem) {
            return true;
        }
        let curves = ctx.curve_list();
        if i < curves.len() {
            let cd = ctx.pair(&curves[i], a);
            for k in 0..=deg / cd {
                let next: Vec<i64> = rem.iter().zip(&curves[i]).map(|(x, c)| x - k * c).collect();
                if rec(ctx, next, i + 1, failed) {
                    return true;
                }
            }
        }
        failed.insert((rem, i));
        false
    }
    rec(ctx, d.to_vec(), 0, &mut HashSet::new())
}
