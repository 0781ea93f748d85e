//! Vinberg's algorithm for the (−2)-roots of a hyperbolic lattice: the
//! accepted roots are the classes of the (−2)-curves bounding the chamber
//! that contains the base class.

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{solve_slice, LatticeClass, NSLattice, QuadraticSliceQuery};
use crate::polyhedra::{extreme_rays, ConeData};
use serde::Serialize;

pub const DEFAULT_MAX_LEVEL: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveConfiguration {
    pub lattice: NSLattice,
    pub curves: Vec<LatticeClass>,
    pub intersections: Vec<Vec<i64>>,
}

impl CurveConfiguration {
    pub fn new(lat: &NSLattice, curves: Vec<LatticeClass>) -> Self {
        let intersections = curves.iter().map(|a| curves.iter().map(|b| lat.pair(a, b)).collect()).collect();
        CurveConfiguration { lattice: lat.clone(), curves, intersections }
    }
}

/// Trace of a run: the base, the level-0 separator, and the roots accepted
/// at each level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VinbergState {
    pub base: LatticeClass,
    pub separator: LatticeClass,
    pub accepted: Vec<Vec<LatticeClass>>,
}

/// Picks `H = Σ kʲ rⱼ` (one root per ± pair, in sorted order, smallest
/// `k ≥ 1` that works) pairing nonzero with every root; returns `H` and
/// the roots with `v·H > 0`.
pub fn choose_separator(lat: &NSLattice, roots: &[LatticeClass]) -> Result<(LatticeClass, Vec<LatticeClass>)> {
    let n = lat.rank();
    if roots.is_empty() {
        return Ok((vec![0; n], Vec::new()));
    }
    let mut reps: Vec<LatticeClass> = roots.iter().map(|r| r.clone().max(arith::neg(r))).collect();
    reps.sort();
    reps.dedup();
    for k in 1i64..=64 {
        let mut h = vec![0i128; n];
        let mut pow: i128 = 1;
        let mut overflow = false;
        for r in &reps {
            pow = match pow.checked_mul(k as i128) {
                Some(p) => p,
                None => {
                    overflow = true;
                    break;
                }
            };
            for (x, y) in h.iter_mut().zip(r) {
                *x += pow * *y as i128;
            }
        }
        if overflow {
            break;
        }
        let Ok(h) = arith::narrow(&h, "separator") else { break };
        if h.iter().any(|x| x.abs() > crate::lattice::MAX_COORD) {
            break;
        }
        if roots.iter().all(|r| lat.pair(r, &h) != 0) {
            let mut pos: Vec<LatticeClass> = roots.iter().filter(|r| lat.pair(r, &h) > 0).cloned().collect();
            pos.sort();
            return Ok((h, pos));
        }
    }
    Err(Error::Internal("no separator found for the level-0 roots".into()))
}

/// Simple roots of a positive system: sweep by increasing `v·H`, keeping a
/// root when it pairs nonnegatively with every root kept so far.
pub fn simple_roots(lat: &NSLattice, positive: &[LatticeClass], separator: &[i64]) -> Vec<LatticeClass> {
    let mut order: Vec<(i64, LatticeClass)> = positive.iter().map(|v| (lat.pair(v, separator), v.clone())).collect();
    order.sort();
    let mut kept: Vec<LatticeClass> = Vec::new();
    for (_, v) in order {
        if kept.iter().all(|k| lat.pair(k, &v) >= 0) {
            kept.push(v);
        }
    }
    kept.sort();
    kept
}

/// First standard basis vector of positive square, else the smallest
/// positive-square vector (then lexicographically least) in growing boxes.
pub fn default_base(lat: &NSLattice) -> LatticeClass {
    let n = lat.rank();
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        if lat.square(&e) > 0 {
            return e;
        }
    }
    let mut radius = 1i64;
    loop {
        let mut best: Option<(i64, LatticeClass)> = None;
        let mut x = vec![-radius; n];
        loop {
            let q = lat.square(&x);
            if q > 0 && best.as_ref().is_none_or(|(b, v)| (q, &x) < (*b, v)) {
                best = Some((q, x.clone()));
            }
            let mut k = 0;
            while k < n && x[k] == radius {
                x[k] = -radius;
                k += 1;
            }
            if k == n {
                break;
            }
            x[k] += 1;
        }
        if let Some((_, v)) = best {
            return v;
        }
        radius += 1;
    }
}

pub fn run_vinberg(lat: &NSLattice, base: &[i64], max_level: u32) -> Result<CurveConfiguration> {
    run_vinberg_traced(lat, base, max_level).map(|(c, _)| c)
}

pub fn run_vinberg_traced(lat: &NSLattice, base: &[i64], max_level: u32) -> Result<(CurveConfiguration, VinbergState)> {
    lat.check_class(base)?;
    if lat.square(base) <= 0 {
        return Err(Error::Precondition("base class must have positive square".into()));
    }
    let slice = |level: i64| solve_slice(lat, &QuadraticSliceQuery { direction: base.to_vec(), level, target_norm: -2 });
    let roots0 = slice(0)?;
    let (separator, positive) = choose_separator(lat, &roots0)?;
    let level0 = simple_roots(lat, &positive, &separator);
    let mut accepted: Vec<LatticeClass> = level0.clone();
    let mut state = VinbergState { base: base.to_vec(), separator, accepted: vec![level0] };
    let mut level = 0u32;
    loop {
        let mut curves = accepted.clone();
        curves.sort();
        let cfg = CurveConfiguration::new(lat, curves);
        if validate_domain(&cfg) {
            return Ok((cfg, state));
        }
        level += 1;
        if level > max_level {
            return Err(Error::NonTermination { max_level });
        }
        let mut now = Vec::new();
        for w in slice(level as i64)? {
            if accepted.iter().all(|r| lat.pair(r, &w) >= 0) {
                accepted.push(w.clone());
                now.push(w);
            }
        }
        state.accepted.push(now);
    }
}

/// All principal minors of `-m` are nonnegative.
fn negative_semidefinite(m: &[Vec<i64>]) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<i64>> = idx.iter().map(|&i| idx.iter().map(|&j| -m[i][j]).collect()).collect();
        arith::det(&sub).map(|d| d >= 0).unwrap_or(false)
    })
}

fn is_square(x: i128) -> bool {
    if x < 0 {
        return false;
    }
    let r = num_integer::Roots::sqrt(&x);
    r * r == x
}

/// Whether the chamber cut out by the roots has finite volume, i.e. the
/// roots are all of the (−2)-curves.
///
/// Rank ≥ 3: the cone over the roots must be full-dimensional and pointed,
/// and each of its facets must carry a negative semidefinite Gram matrix.
/// Rank 2: every end of the chamber must be a wall or a rational isotropic
/// direction.
pub fn validate_domain(cfg: &CurveConfiguration) -> bool {
    let lat = &cfg.lattice;
    let n = lat.rank();
    if n == 1 {
        return true;
    }
    let funcs: Vec<Vec<i64>> = cfg.curves.iter().map(|r| lat.functional(r)).collect();
    if n == 2 {
        let rational_cusps = is_square(-lat.det());
        if arith::rank(&funcs).unwrap_or(0) < 2 {
            return rational_cusps;
        }
        return match extreme_rays(&funcs, 2) {
            Ok(ends) => ends.iter().all(|e| lat.square(e) >= 0 || rational_cusps),
            Err(_) => false,
        };
    }
    let Ok(dual) = extreme_rays(&funcs, n) else { return false };
    if arith::rank(&dual).unwrap_or(0) < n {
        return false;
    }
    dual.iter().all(|f| {
        let on: Vec<usize> = (0..cfg.curves.len()).filter(|&i| lat.pair(f, &cfg.curves[i]) == 0).collect();
        let g: Vec<Vec<i64>> = on.iter().map(|&i| on.iter().map(|&j| cfg.intersections[i][j]).collect()).collect();
        negative_semidefinite(&g)
    })
}

/// A permutation `p` with `a[i][j] = b[p[i]][p[j]]`, if one exists.
pub fn config_isomorphic(a: &CurveConfiguration, b: &CurveConfiguration) -> Option<Vec<usize>> {
    let (ma, mb) = (&a.intersections, &b.intersections);
    let n = ma.len();
    if mb.len() != n || a.lattice.rank() != b.lattice.rank() {
        return None;
    }
    let profile = |m: &Vec<Vec<i64>>, i: usize| {
        let mut r = m[i].clone();
        r.sort();
        r
    };
    let pa: Vec<Vec<i64>> = (0..n).map(|i| profile(ma, i)).collect();
    let pb: Vec<Vec<i64>> = (0..n).map(|i| profile(mb, i)).collect();
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    fn go(i: usize, p: &mut Vec<usize>, used: &mut [bool], ma: &[Vec<i64>], mb: &[Vec<i64>], pa: &[Vec<i64>], pb: &[Vec<i64>]) -> bool {
        if i == ma.len() {
            return true;
        }
        for c in 0..mb.len() {
            if used[c] || pa[i] != pb[c] || ma[i][i] != mb[c][c] {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[c][p[k]]) {
                continue;
            }
            used[c] = true;
            p.push(c);
            if go(i + 1, p, used, ma, mb, pa, pb) {
                return true;
            }
            p.pop();
            used[c] = false;
        }
        false
    }
    let mut p = Vec::with_capacity(n);
    let mut used = vec![false; n];
    go(0, &mut p, &mut used, ma, mb, &pa, &pb).then_some(p)
}

/// The effective cone spanned by a configuration's curves.
pub fn effective_cone(cfg: &CurveConfiguration) -> Result<ConeData> {
    ConeData::from_generators(&cfg.lattice, &cfg.curves)
}
