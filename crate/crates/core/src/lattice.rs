//! Integral symmetric bilinear forms of hyperbolic signature, the catalog of
//! rank-four Néron–Severi lattices, and exact enumeration of the classes of
//! fixed square on an affine slice `w·α = level`.

use crate::arith;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// A divisor class: integer coordinates in the lattice's fixed basis.
pub type LatticeClass = Vec<i64>;

/// Gram entries are capped so that pairings of classes with coordinates
/// up to [`MAX_COORD`] always fit in an `i64`.
pub const MAX_GRAM_ENTRY: i64 = 10_000;
pub const MAX_COORD: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NSLattice {
    #[serde(default)]
    pub name: Option<String>,
    pub gram: Vec<Vec<i64>>,
}

impl NSLattice {
    /// Validates symmetry, nondegeneracy and signature `(1, rank-1)`.
    pub fn new(name: Option<String>, gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(Error::Input("Gram matrix must be square and nonempty".into()));
        }
        if gram.iter().flatten().any(|x| x.abs() > MAX_GRAM_ENTRY) {
            return Err(Error::Input(format!("Gram entries must be bounded by {MAX_GRAM_ENTRY} in absolute value")));
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Input(format!("Gram matrix is not symmetric at ({i},{j})")));
                }
            }
        }
        let (pos, neg, zero) = signature(&gram);
        if zero > 0 {
            return Err(Error::Input("Gram matrix is degenerate".into()));
        }
        if pos != 1 {
            return Err(Error::Input(format!("signature is ({pos},{neg}), expected (1,{})", n - 1)));
        }
        Ok(NSLattice { name, gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or("lattice")
    }

    /// `vᵀ·G·w` without dimension checks; callers inside the crate guarantee
    /// matching lengths and coordinates bounded by [`MAX_COORD`].
    #[inline]
    pub fn pair(&self, v: &[i64], w: &[i64]) -> i64 {
        let mut s: i128 = 0;
        for (i, row) in self.gram.iter().enumerate() {
            if v[i] == 0 {
                continue;
            }
            let mut t: i128 = 0;
            for (j, g) in row.iter().enumerate() {
                t += *g as i128 * w[j] as i128;
            }
            s += v[i] as i128 * t;
        }
        i64::try_from(s).expect("pairing exceeds the supported coordinate range")
    }

    pub fn square(&self, v: &[i64]) -> i64 {
        self.pair(v, v)
    }

    /// `G·v`, the linear functional `x ↦ x·v`.
    pub fn functional(&self, v: &[i64]) -> Vec<i64> {
        self.gram.iter().map(|row| row.iter().zip(v).map(|(g, x)| g * x).sum()).collect()
    }

    pub fn check_class(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::Input(format!("class has length {}, lattice rank is {}", v.len(), self.rank())));
        }
        if v.iter().any(|x| x.abs() > MAX_COORD) {
            return Err(Error::Input(format!("class coordinates must be bounded by {MAX_COORD}")));
        }
        Ok(())
    }

    pub fn det(&self) -> i128 {
        arith::det(&self.gram).expect("bounded Gram determinant")
    }
}

/// Checked intersection pairing.
pub fn pairing(lat: &NSLattice, v: &[i64], w: &[i64]) -> Result<i64> {
    lat.check_class(v)?;
    lat.check_class(w)?;
    Ok(lat.pair(v, w))
}

/// Counts of positive, negative and zero entries of an exact rational
/// diagonalisation of the form (congruence transformations only).
pub fn signature(gram: &[Vec<i64>]) -> (usize, usize, usize) {
    let n = gram.len();
    let mut m: Vec<Vec<BigRational>> =
        gram.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(p) = (k + 1..n).find(|&i| !m[i][i].is_zero()) {
                m.swap(k, p);
                for row in m.iter_mut() {
                    row.swap(k, p);
                }
            } else if let Some(p) = (k + 1..n).find(|&i| !m[k][i].is_zero()) {
                // replace e_k by e_k + e_p: new diagonal 2·m[k][p] ≠ 0
                for j in 0..n {
                    let v = m[p][j].clone();
                    m[k][j] += v;
                }
                for i in 0..n {
                    let v = m[i][p].clone();
                    m[i][k] += v;
                }
            } else {
                zero += 1;
                continue;
            }
        }
        let piv = m[k][k].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = &f * &m[k][j];
                m[i][j] -= v;
            }
        }
        for i in k + 1..n {
            m[k][i] = BigRational::zero();
            m[i][k] = BigRational::zero();
        }
    }
    (pos, neg, zero)
}

fn block_u(k: i64) -> Vec<Vec<i64>> {
    vec![vec![0, k], vec![k, 0]]
}

fn block_a(m: usize) -> Vec<Vec<i64>> {
    let mut b = vec![vec![0; m]; m];
    for i in 0..m {
        b[i][i] = -2;
        if i + 1 < m {
            b[i][i + 1] = 1;
            b[i + 1][i] = 1;
        }
    }
    b
}

fn direct_sum(blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<i64>> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut g = vec![vec![0; n]; n];
    let mut o = 0;
    for b in blocks {
        for i in 0..b.len() {
            for j in 0..b.len() {
                g[o + i][o + j] = b[i][j];
            }
        }
        o += b.len();
    }
    g
}

/// Parses `U(k)`, `A_m`/`Am` with optional multiplicity (`3A1`), and `(n)`
/// terms joined by `+` or `⊕`.
fn parse_blocks(expr: &str) -> Result<Vec<Vec<i64>>> {
    let bad = || Error::Lookup(expr.to_string());
    let mut blocks = Vec::new();
    for term in expr.split(['+', '⊕']) {
        let t: String = term.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(bad());
        }
        let digits: String = t.chars().take_while(|c| c.is_ascii_digit()).collect();
        let mult: usize = if digits.is_empty() { 1 } else { digits.parse().map_err(|_| bad())? };
        let rest = &t[digits.len()..];
        let block = if let Some(inner) = rest.strip_prefix("U(").and_then(|s| s.strip_suffix(')')) {
            block_u(inner.parse().map_err(|_| bad())?)
        } else if rest == "U" {
            block_u(1)
        } else if let Some(m) = rest.strip_prefix('A') {
            let m: usize = m.trim_start_matches('_').parse().map_err(|_| bad())?;
            if m == 0 {
                return Err(bad());
            }
            block_a(m)
        } else if let Some(inner) = rest.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            vec![vec![inner.parse().map_err(|_| bad())?]]
        } else {
            return Err(bad());
        };
        for _ in 0..mult {
            blocks.push(block.clone());
        }
    }
    Ok(direct_sum(&blocks))
}

pub const CATALOG_NAMES: [&str; 14] =
    ["V1", "V2", "V3", "V4", "V5", "V6", "V7", "V8", "V9", "V10", "V11", "V12", "V13", "V14"];

fn catalog_gram(name: &str) -> Option<Vec<Vec<i64>>> {
    let blocks = |s: &str| parse_blocks(s).ok();
    match name {
        "V1" => blocks("(8)+3A1"),
        "V2" => blocks("(-4)+(4)+A2"),
        "V3" => blocks("(4)+A3"),
        "V4" => blocks("U(1)+2A1"),
        "V5" => blocks("U(2)+2A1"),
        "V6" => blocks("U(3)+2A1"),
        "V7" => blocks("U(4)+2A1"),
        "V8" => blocks("U(1)+A2"),
        "V9" => blocks("U(2)+A2"),
        "V10" => blocks("U(3)+A2"),
        "V11" => blocks("U(6)+A2"),
        // The hyperbolic block is [[0,3],[3,-2]]; with the opposite sign
        // convention the published curve classes would not have square -2.
        "V12" => Some(direct_sum(&[vec![vec![0, 3], vec![3, -2]], block_a(2)])),
        "V13" => Some(vec![vec![2, -1, -1, -1], vec![-1, -2, 0, 0], vec![-1, 0, -2, 0], vec![-1, 0, 0, -2]]),
        "V14" => Some(vec![vec![12, -2, 0, 0], vec![-2, -2, -1, 0], vec![0, -1, -2, -1], vec![0, 0, -1, -2]]),
        _ => None,
    }
}

/// A catalog lattice `V1`…`V14`, or a block expression such as `U(2)+2A1`.
pub fn catalog(name: &str) -> Result<NSLattice> {
    let key = name.trim();
    let upper = key.to_ascii_uppercase();
    if let Some(g) = catalog_gram(&upper) {
        return NSLattice::new(Some(upper), g);
    }
    let g = parse_blocks(key)?;
    NSLattice::new(Some(key.to_string()), g)
}

/// Query for [`solve_slice`]: all `w` with `w·direction = level`, `w² = target_norm`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSliceQuery {
    pub direction: LatticeClass,
    pub level: i64,
    pub target_norm: i64,
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Smallest-magnitude interval of integers `t` with `d·(t−c)² ≤ r`
/// (exact; walks outward from ⌊c⌋, the interval is short).
fn integer_window(d: &BigRational, c: &BigRational, r: &BigRational) -> Vec<i64> {
    let ok = |t: i64| {
        let x = rat(t) - c;
        &(d * &x * &x) <= r
    };
    let f = c.floor().to_integer();
    let f: i64 = i64::try_from(f).unwrap_or(0);
    let start = if ok(f) {
        f
    } else if ok(f + 1) {
        f + 1
    } else {
        return Vec::new();
    };
    let mut lo = start;
    while ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = start;
    while ok(hi + 1) {
        hi += 1;
    }
    (lo..=hi).collect()
}

/// Greedy pairwise (Lagrange) size reduction of a basis w.r.t. the positive
/// definite form `q(x, y) = -x·y` on the orthogonal complement.
fn size_reduce(lat: &NSLattice, basis: &mut [Vec<i64>]) {
    let q = |a: &[i64], b: &[i64]| -(lat.pair(a, b) as i128);
    loop {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let qij = q(&basis[i], &basis[j]);
                let qjj = q(&basis[j], &basis[j]);
                if 2 * qij.abs() > qjj {
                    let r = Integer::div_floor(&(2 * qij + qjj), &(2 * qjj)) as i64;
                    let bj = basis[j].clone();
                    for (x, y) in basis[i].iter_mut().zip(&bj) {
                        *x -= r * y;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// All classes `w` with `w·α = level` and `w² = target_norm`, sorted.
///
/// Writes `w = w₀ + Σ tⱼkⱼ` with `kⱼ` a basis of `α^⊥ ∩ ℤⁿ` and `w₀` an
/// integral point of the slice, then enumerates the integer `t` in the
/// ellipsoid obtained by completing the square for the positive definite
/// form `-x·y` on `α^⊥` (Fincke–Pohst with exact rationals).
pub fn solve_slice(lat: &NSLattice, q: &QuadraticSliceQuery) -> Result<Vec<LatticeClass>> {
    lat.check_class(&q.direction)?;
    if lat.square(&q.direction) <= 0 {
        return Err(Error::Precondition("slice direction must have positive square".into()));
    }
    let n = lat.rank();
    let a = lat.functional(&q.direction);
    let (mut ker, pre, content) = arith::kernel_basis(&a);
    if q.level % content != 0 {
        return Ok(Vec::new());
    }
    let w0 = arith::scale(q.level / content, &pre);
    let m = n - 1;
    if m == 0 {
        return Ok(if lat.square(&w0) == q.target_norm { vec![w0] } else { Vec::new() });
    }
    size_reduce(lat, &mut ker);
    // Q[i][j] = -(kᵢ·kⱼ) > 0 definite, b[j] = w₀·kⱼ
    let qm: Vec<Vec<BigRational>> = (0..m).map(|i| (0..m).map(|j| rat(-lat.pair(&ker[i], &ker[j]))).collect()).collect();
    let b: Vec<BigRational> = (0..m).map(|j| rat(lat.pair(&w0, &ker[j]))).collect();
    // center c = Q⁻¹ b by Gaussian elimination
    let center = solve_rational(&qm, &b);
    let btqb: BigRational = b.iter().zip(&center).map(|(x, y)| x * y).sum();
    let radius = rat(lat.square(&w0)) - rat(q.target_norm) + btqb;
    if radius.is_negative() {
        return Ok(Vec::new());
    }
    // Q(x) = Σ d_i (x_i + Σ_{j>i} u_ij x_j)²
    let mut u = qm.clone();
    for i in 0..m {
        for j in i + 1..m {
            let v = &u[i][j] / &u[i][i];
            u[j][i] = u[i][j].clone();
            u[i][j] = v;
        }
        for k in i + 1..m {
            for l in k..m {
                let v = &u[k][i] * &u[i][l];
                u[k][l] -= v;
            }
        }
    }
    let mut out = Vec::new();
    let mut t = vec![0i64; m];
    enumerate_level(m - 1, &u, &center, radius, &mut t, &mut |t: &[i64]| {
        let mut w = w0.clone();
        for (tj, kj) in t.iter().zip(&ker) {
            for (x, y) in w.iter_mut().zip(kj) {
                *x += tj * y;
            }
        }
        if lat.square(&w) == q.target_norm {
            out.push(w);
        }
    });
    out.sort();
    Ok(out)
}

fn enumerate_level(
    i: usize,
    u: &[Vec<BigRational>],
    center: &[BigRational],
    remaining: BigRational,
    t: &mut Vec<i64>,
    emit: &mut dyn FnMut(&[i64]),
) {
    let m = u.len();
    let mut c = center[i].clone();
    for j in i + 1..m {
        c -= &u[i][j] * (rat(t[j]) - &center[j]);
    }
    for ti in integer_window(&u[i][i], &c, &remaining) {
        let x = rat(ti) - &c;
        let rest = &remaining - &u[i][i] * &x * &x;
        t[i] = ti;
        if i == 0 {
            emit(t);
        } else {
            enumerate_level(i - 1, u, center, rest, t, emit);
        }
    }
    t[i] = 0;
}

fn solve_rational(a: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].is_zero()).expect("definite form is invertible");
        m.swap(k, p);
        let piv = m[k][k].clone();
        for j in k..=n {
            m[k][j] = &m[k][j] / &piv;
        }
        for i in 0..n {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].clone();
                for j in k..=n {
                    let v = &f * &m[k][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n].clone()).collect()
}
