//! Pointed rational cones in a lattice, with duality taken through the
//! intersection form: double description, Hilbert bases, membership and
//! decomposition of classes over a finite set of parts.

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{LatticeClass, NSLattice};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

/// A cone carried both as extremal rays and as supporting functionals:
/// `x ∈ cone ⇔ x·f ≥ 0` for every facet class `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    pub ambient: NSLattice,
    pub rays: Vec<LatticeClass>,
    pub facets: Vec<LatticeClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertBasis {
    pub elements: Vec<LatticeClass>,
}

/// Extreme rays of `{x : aᵢ·x ≥ 0}` (standard dot product), primitive and
/// sorted. The constraint matrix must have full column rank.
pub fn extreme_rays(constraints: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    let mut cons: Vec<Vec<i64>> = constraints.iter().filter(|a| !arith::is_zero(a)).map(|a| arith::primitive(a)).collect();
    cons.sort();
    cons.dedup();
    if arith::rank(&cons)? < dim {
        return Err(Error::Unsupported("cone is not full-dimensional".into()));
    }
    // initial simplicial cone from the first independent constraints in order
    let mut basis: Vec<Vec<i64>> = Vec::new();
    let mut rest = Vec::new();
    for a in cons {
        if basis.len() < dim {
            basis.push(a.clone());
            if arith::rank(&basis)? == basis.len() {
                continue;
            }
            basis.pop();
        }
        rest.push(a);
    }
    let (adj, det) = arith::adjugate(&basis)?;
    let sign = det.signum();
    let mut rays: Vec<Vec<i64>> = (0..dim)
        .map(|j| {
            let col: Vec<i128> = (0..dim).map(|i| sign * adj[i][j]).collect();
            arith::narrow(&col, "initial ray").map(|v| arith::primitive(&v))
        })
        .collect::<Result<_>>()?;
    let mut seen: Vec<Vec<i64>> = basis;
    for a in rest {
        let vals: Vec<i128> = rays.iter().map(|r| arith::dot(&a, r)).collect();
        let mut next: Vec<Vec<i64>> = rays.iter().zip(&vals).filter(|(_, v)| **v >= 0).map(|(r, _)| r.clone()).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] > 0).collect();
        let negs: Vec<usize> = (0..rays.len()).filter(|&i| vals[i] < 0).collect();
        let tight: Vec<Vec<bool>> = rays.iter().map(|r| seen.iter().map(|s| arith::dot(s, r) == 0).collect()).collect();
        for &p in &pos {
            for &q in &negs {
                let common: Vec<Vec<i64>> =
                    seen.iter().enumerate().filter(|(k, _)| tight[p][*k] && tight[q][*k]).map(|(_, s)| s.clone()).collect();
                if common.len() + 2 < dim || arith::rank(&common)? != dim - 2 {
                    continue;
                }
                let (ap, aq) = (vals[p], -vals[q]);
                let combo: Vec<i128> = rays[p].iter().zip(&rays[q]).map(|(&x, &y)| ap * y as i128 + aq * x as i128).collect();
                let g = combo.iter().fold(0i128, |g, &x| num_integer::Integer::gcd(&g, &x));
                let combo: Vec<i128> = combo.iter().map(|x| x / g.max(1)).collect();
                next.push(arith::narrow(&combo, "double description")?);
            }
        }
        seen.push(a);
        rays = next;
    }
    rays.sort();
    rays.dedup();
    Ok(rays)
}

impl ConeData {
    /// The cone spanned by `gens`; redundant generators are dropped.
    pub fn from_generators(lat: &NSLattice, gens: &[LatticeClass]) -> Result<Self> {
        let n = lat.rank();
        let funcs: Vec<Vec<i64>> = gens.iter().map(|g| lat.functional(g)).collect();
        let facets = extreme_rays(&funcs, n)?;
        let ffun: Vec<Vec<i64>> = facets.iter().map(|f| lat.functional(f)).collect();
        let mut rays: Vec<LatticeClass> = Vec::new();
        for g in gens {
            if arith::is_zero(g) {
                continue;
            }
            let tight: Vec<Vec<i64>> = ffun.iter().filter(|f| arith::dot(f, g) == 0).cloned().collect();
            if arith::rank(&tight)? == n - 1 {
                rays.push(arith::primitive(g));
            }
        }
        rays.sort();
        rays.dedup();
        Ok(ConeData { ambient: lat.clone(), rays, facets })
    }

    pub fn dim(&self) -> usize {
        self.ambient.rank()
    }

    /// Sum of the facet classes: strictly positive on every nonzero point.
    pub fn interior_witness(&self) -> LatticeClass {
        let mut w = vec![0; self.dim()];
        for f in &self.facets {
            w = arith::add(&w, f);
        }
        w
    }
}

/// `{x : x·r ≥ 0 for every ray r}`.
pub fn dual_cone(c: &ConeData) -> Result<ConeData> {
    let funcs: Vec<Vec<i64>> = c.rays.iter().map(|r| c.ambient.functional(r)).collect();
    let rays = extreme_rays(&funcs, c.dim())?;
    Ok(ConeData { ambient: c.ambient.clone(), rays, facets: c.rays.clone() })
}

pub fn contains(c: &ConeData, x: &[i64]) -> bool {
    c.facets.iter().all(|f| c.ambient.pair(x, f) >= 0)
}

/// Standard-dot membership against precomputed facet functionals.
fn in_cone(ffun: &[Vec<i64>], x: &[i64]) -> bool {
    ffun.iter().all(|f| arith::dot(f, x) >= 0)
}

/// Outward-agnostic normal of the hyperplane spanned by `n-1` vectors
/// (generalised cross product).
fn hyperplane_normal(vs: &[&Vec<i64>], n: usize) -> Result<Vec<i64>> {
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let minor: Vec<Vec<i64>> = vs.iter().map(|v| (0..n).filter(|&j| j != c).map(|j| v[j]).collect()).collect();
        let d = if minor.is_empty() { 1 } else { arith::det(&minor)? };
        out.push(if c % 2 == 0 { d } else { -d });
    }
    Ok(arith::primitive(&arith::narrow(&out, "facet normal")?))
}

/// Placing triangulation: simplices as index sets into `rays`.
fn triangulate(rays: &[Vec<i64>], n: usize) -> Result<Vec<Vec<usize>>> {
    let mut start: Vec<usize> = Vec::new();
    for i in 0..rays.len() {
        start.push(i);
        let rows: Vec<Vec<i64>> = start.iter().map(|&k| rays[k].clone()).collect();
        if arith::rank(&rows)? < start.len() {
            start.pop();
        }
        if start.len() == n {
            break;
        }
    }
    if start.len() < n {
        return Err(Error::Unsupported("cone is not full-dimensional".into()));
    }
    let mut simplices = vec![start.clone()];
    for v in 0..rays.len() {
        if start.contains(&v) {
            continue;
        }
        // boundary facets of the current triangulation, with inward normals
        let mut count: HashMap<Vec<usize>, (usize, Vec<i64>)> = HashMap::new();
        for s in &simplices {
            for drop in 0..n {
                let face: Vec<usize> = s.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, &x)| x).collect();
                let e = count.entry(face.clone()).or_insert((0, Vec::new()));
                e.0 += 1;
                if e.0 == 1 {
                    let vs: Vec<&Vec<i64>> = face.iter().map(|&k| &rays[k]).collect();
                    let mut nrm = hyperplane_normal(&vs, n)?;
                    if arith::dot(&nrm, &rays[s[drop]]) < 0 {
                        nrm = arith::neg(&nrm);
                    }
                    e.1 = nrm;
                }
            }
        }
        let mut faces: Vec<(Vec<usize>, Vec<i64>)> =
            count.into_iter().filter(|(_, (c, _))| *c == 1).map(|(f, (_, nrm))| (f, nrm)).collect();
        faces.sort();
        for (face, nrm) in faces {
            if arith::dot(&nrm, &rays[v]) < 0 {
                let mut s = face;
                s.push(v);
                s.sort();
                simplices.push(s);
            }
        }
    }
    Ok(simplices)
}

/// Lower-triangular Hermite form of the lattice spanned by the columns
/// `cols`; only the diagonal is returned.
fn hnf_diagonal(cols: &[Vec<i64>], n: usize) -> Result<Vec<i128>> {
    let mut m: Vec<Vec<i128>> = cols.iter().map(|c| c.iter().map(|&x| x as i128).collect()).collect();
    let mut diag = Vec::with_capacity(n);
    for row in 0..n {
        // gcd-combine columns row..n on coordinate `row` into column `row`
        for c in row + 1..n {
            while m[c][row] != 0 {
                let q = m[row][row].checked_div(m[c][row]).unwrap_or(0);
                let (a, b) = (m[row].clone(), m[c].clone());
                let r: Vec<i128> = a.iter().zip(&b).map(|(x, y)| x - q * y).collect();
                m[row] = b;
                m[c] = r;
                if m[row].iter().any(|x| x.abs() > i64::MAX as i128) {
                    return Err(Error::Overflow("hermite form"));
                }
            }
        }
        diag.push(m[row][row].abs());
    }
    Ok(diag)
}

/// Lattice points `Σ λᵢ rᵢ` with `0 ≤ λᵢ < 1` of the simplicial cone with
/// columns `rs`: one point per coset of `ℤⁿ / Mℤⁿ`.
fn parallelepiped_points(rs: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let diag = hnf_diagonal(rs, n)?;
    // adj·M = det·I with M having the rays as columns
    let mt: Vec<Vec<i64>> = (0..n).map(|i| rs.iter().map(|r| r[i]).collect()).collect();
    let (adj, det) = arith::adjugate(&mt)?;
    let total: i128 = diag.iter().product();
    debug_assert_eq!(total, det.abs());
    let mut out = Vec::with_capacity(total as usize);
    let mut x = vec![0i128; n];
    loop {
        // p = x − M·⌊adj·x / det⌋
        let mut p = x.clone();
        for (i, arow) in adj.iter().enumerate() {
            let num: i128 = arow.iter().zip(&x).map(|(a, b)| a * b).sum();
            let fl = num_integer::Integer::div_floor(&num, &det);
            if fl != 0 {
                for k in 0..n {
                    p[k] -= fl * rs[i][k] as i128;
                }
            }
        }
        out.push(arith::narrow(&p, "parallelepiped point")?);
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            x[k] += 1;
            if x[k] < diag[k] {
                break;
            }
            x[k] = 0;
            k += 1;
        }
    }
}

/// Hilbert basis of the lattice points of a pointed full-dimensional cone.
pub fn hilbert_basis(c: &ConeData) -> Result<HilbertBasis> {
    let n = c.dim();
    let ffun: Vec<Vec<i64>> = c.facets.iter().map(|f| c.ambient.functional(f)).collect();
    let witness: Vec<i64> = ffun.iter().fold(vec![0; n], |acc, f| arith::add(&acc, f));
    let simplices = triangulate(&c.rays, n)?;
    let chunks: Vec<Vec<Vec<i64>>> = simplices
        .par_iter()
        .map(|s| {
            let rs: Vec<Vec<i64>> = s.iter().map(|&k| c.rays[k].clone()).collect();
            parallelepiped_points(&rs, n)
        })
        .collect::<Result<_>>()?;
    let mut cand: HashSet<Vec<i64>> = chunks.into_iter().flatten().filter(|p| !arith::is_zero(p)).collect();
    cand.extend(c.rays.iter().cloned());
    let mut cand: Vec<(i128, Vec<i64>)> = cand.into_iter().map(|x| (arith::dot(&witness, &x), x)).collect();
    cand.sort();
    let mut kept: Vec<Vec<i64>> = Vec::new();
    for (_, x) in cand {
        if !kept.iter().any(|g| in_cone(&ffun, &arith::sub(&x, g))) {
            kept.push(x);
        }
    }
    kept.sort();
    Ok(HilbertBasis { elements: kept })
}

/// Searches multisets over `parts` summing to a target, with coefficients
/// bounded by witness degrees; optional cone pruning of partial remainders.
pub struct Decomposer<'a> {
    lat: &'a NSLattice,
    parts: Vec<LatticeClass>,
    order: Vec<usize>,
    degrees: Vec<i64>,
    witness: LatticeClass,
    prune: Option<Vec<Vec<i64>>>,
}

impl<'a> Decomposer<'a> {
    pub fn new(lat: &'a NSLattice, parts: &[LatticeClass], witness: &[i64], prune: Option<&ConeData>) -> Result<Self> {
        let degrees: Vec<i64> = parts.iter().map(|p| lat.pair(p, witness)).collect();
        if let Some(i) = degrees.iter().position(|&d| d <= 0) {
            return Err(Error::Precondition(format!("part {:?} has nonpositive witness degree", parts[i])));
        }
        let mut order: Vec<usize> = (0..parts.len()).collect();
        order.sort_by_key(|&i| (-degrees[i], parts[i].clone()));
        let prune = prune.map(|c| c.facets.iter().map(|f| lat.functional(f)).collect());
        Ok(Decomposer { lat, parts: parts.to_vec(), order, degrees, witness: witness.to_vec(), prune })
    }

    /// Calls `f` with the coefficient vector (indexed like `parts`) of each
    /// decomposition, in a deterministic order; `f` may stop the search.
    pub fn visit(&self, target: &[i64], f: &mut dyn FnMut(&[u32]) -> ControlFlow<()>) {
        let mut coeffs = vec![0u32; self.parts.len()];
        let _ = self.rec(target.to_vec(), 0, &mut coeffs, f);
    }

    fn rec(&self, rem: Vec<i64>, i: usize, coeffs: &mut Vec<u32>, f: &mut dyn FnMut(&[u32]) -> ControlFlow<()>) -> ControlFlow<()> {
        if arith::is_zero(&rem) {
            return f(coeffs);
        }
        if i == self.order.len() {
            return ControlFlow::Continue(());
        }
        if let Some(p) = &self.prune {
            if !in_cone(p, &rem) {
                return ControlFlow::Continue(());
            }
        }
        let deg = self.lat.pair(&rem, &self.witness);
        if deg <= 0 {
            return ControlFlow::Continue(());
        }
        let k = self.order[i];
        let part = &self.parts[k];
        let max = deg / self.degrees[k];
        for a in (0..=max).rev() {
            coeffs[k] = a as u32;
            let next: Vec<i64> = rem.iter().zip(part).map(|(r, p)| r - a * p).collect();
            self.rec(next, i + 1, coeffs, f)?;
        }
        coeffs[k] = 0;
        ControlFlow::Continue(())
    }

    /// Existence of a decomposition avoiding the parts flagged in `skip`,
    /// with a failure memo keyed by (remainder, position).
    pub fn exists(&self, target: &[i64], skip: &[bool]) -> bool {
        let mut fail: HashSet<(Vec<i64>, usize)> = HashSet::new();
        self.exists_rec(target.to_vec(), 0, skip, &mut fail)
    }

    fn exists_rec(&self, rem: Vec<i64>, i: usize, skip: &[bool], fail: &mut HashSet<(Vec<i64>, usize)>) -> bool {
        if arith::is_zero(&rem) {
            return true;
        }
        if i == self.order.len() {
            return false;
        }
        let key = (rem, i);
        if fail.contains(&key) {
            return false;
        }
        let (rem, _) = &key;
        let pruned = self.prune.as_ref().is_some_and(|p| !in_cone(p, rem));
        let deg = self.lat.pair(rem, &self.witness);
        if !pruned && deg > 0 {
            let k = self.order[i];
            let max = if skip[k] { 0 } else { deg / self.degrees[k] };
            for a in (0..=max).rev() {
                let next: Vec<i64> = rem.iter().zip(&self.parts[k]).map(|(r, p)| r - a * p).collect();
                if self.exists_rec(next, i + 1, skip, fail) {
                    return true;
                }
            }
        }
        fail.insert(key);
        false
    }
}

/// All multisets over `parts` (as coefficient vectors) summing to `target`.
pub fn enumerate_decompositions(
    lat: &NSLattice,
    target: &[i64],
    parts: &[LatticeClass],
    witness: &[i64],
) -> Result<Vec<Vec<u32>>> {
    if lat.pair(target, witness) <= 0 && !arith::is_zero(target) {
        return Ok(Vec::new());
    }
    let dec = Decomposer::new(lat, parts, witness, None)?;
    let mut out = Vec::new();
    dec.visit(target, &mut |c| {
        out.push(c.to_vec());
        ControlFlow::Continue(())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::catalog;

    fn euclid(n: usize) -> NSLattice {
        // the identity form is not hyperbolic; cones only need a pairing, so
        // tests on plain ℤⁿ go through this unchecked constructor
        NSLattice { name: None, gram: (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect() }
    }

    #[test]
    fn two_dimensional_basis() {
        let lat = euclid(2);
        let c = ConeData::from_generators(&lat, &[vec![1, 0], vec![1, 2]]).unwrap();
        assert_eq!(hilbert_basis(&c).unwrap().elements, vec![vec![1, 0], vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn simplicial_dual_is_dual_basis() {
        let lat = euclid(3);
        let c = ConeData::from_generators(&lat, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(dual_cone(&c).unwrap().rays, c.rays);
    }

    #[test]
    fn v10_nef_cone() {
        let lat = catalog("V10").unwrap();
        let curves = vec![vec![-1, 0, 1, 1], vec![0, -1, 1, 1], vec![0, 0, -1, 0], vec![0, 0, 0, -1]];
        let eff = ConeData::from_generators(&lat, &curves).unwrap();
        assert_eq!(eff.rays.len(), 4);
        let nef = dual_cone(&eff).unwrap();
        assert_eq!(nef.rays.len(), 4);
        assert!(contains(&nef, &[0, 0, 0, 0]));
        assert!(!contains(&eff, &arith::neg(&curves[0])));
        assert_eq!(dual_cone(&nef).unwrap().rays, eff.rays);
    }

    #[test]
    fn decompositions() {
        let lat = euclid(2);
        let parts = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(enumerate_decompositions(&lat, &[1, 1], &parts, &[1, 1]).unwrap(), vec![vec![1, 1]]);
        assert!(enumerate_decompositions(&lat, &[-1, 2], &parts, &[1, 1]).unwrap().is_empty());
        assert!(enumerate_decompositions(&lat, &[1, 1], &[vec![1, -1]], &[1, 1]).is_err());
    }
}
