//! Linear systems on a K3 surface read off from lattice data: effectivity
//! and Zariski reduction, cohomology dimensions via Riemann–Roch,
//! positivity, elliptic fibrations, base points, hyperelliptic cases and
//! projective models.

use crate::arith;
use crate::error::{Error, Result};
use crate::lattice::{LatticeClass, NSLattice};
use crate::polyhedra::{contains, dual_cone, hilbert_basis, ConeData, HilbertBasis};
use crate::vinberg::{run_vinberg, CurveConfiguration};
use serde::Serialize;
use std::fmt;

/// The combinatorial data of a K3 surface with finitely many (−2)-curves.
#[derive(Clone, Debug)]
pub struct K3Context {
    pub lattice: NSLattice,
    pub curves: CurveConfiguration,
    pub eff: ConeData,
    pub nef: ConeData,
    pub bnef: HilbertBasis,
    pub beff: HilbertBasis,
    pub ample_witness: LatticeClass,
    fibrations: Vec<LatticeClass>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZariskiSplit {
    pub nef_part: LatticeClass,
    pub base_part: Vec<LatticeClass>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FiberType {
    A(usize),
    D(usize),
    E(usize),
}

impl fmt::Display for FiberType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberType::A(n) => write!(f, "Ã{n}"),
            FiberType::D(n) => write!(f, "D̃{n}"),
            FiberType::E(n) => write!(f, "Ẽ{n}"),
        }
    }
}

impl Serialize for FiberType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationInfo {
    pub fiber_class: LatticeClass,
    pub has_section: bool,
    pub reducible_fibers: Vec<FiberType>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperellipticCase {
    None,
    A,
    B,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    DoublePlane,
    QuarticP3,
    SexticP4,
    CI3QuadricsP5,
    ConeOverTwistedCubic,
    DoubleQuadricCone,
    Other,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ModelLabel {
    pub kind: ModelKind,
    pub contracted: usize,
    pub hyperelliptic_case: HyperellipticCase,
}

impl K3Context {
    /// Builds the cones and Hilbert bases from a complete list of curves.
    pub fn from_curves(lat: &NSLattice, curves: &[LatticeClass]) -> Result<Self> {
        if lat.rank() < 3 {
            return Err(Error::Unsupported("the cone machinery needs rank at least 3".into()));
        }
        if lat.gram.iter().enumerate().any(|(i, r)| r[i] % 2 != 0) {
            return Err(Error::Input("the lattice must be even".into()));
        }
        for c in curves {
            lat.check_class(c)?;
            if lat.square(c) != -2 {
                return Err(Error::Input(format!("curve {c:?} does not have square -2")));
            }
        }
        let mut sorted = curves.to_vec();
        sorted.sort();
        sorted.dedup();
        let eff = ConeData::from_generators(lat, &sorted)?;
        let nef = dual_cone(&eff)?;
        let bnef = hilbert_basis(&nef)?;
        let beff = hilbert_basis(&eff)?;
        let ample_witness = bnef.elements.iter().fold(vec![0; lat.rank()], |a, b| arith::add(&a, b));
        if sorted.iter().any(|c| lat.pair(c, &ample_witness) <= 0) {
            return Err(Error::Internal("sum of the nef Hilbert basis is not ample".into()));
        }
        let mut fibrations = Vec::new();
        for b in &bnef.elements {
            if lat.square(b) == 0 {
                let f = arith::primitive(b);
                debug_assert!(contains(&nef, &f));
                fibrations.push(f);
            }
        }
        fibrations.sort();
        fibrations.dedup();
        Ok(K3Context {
            lattice: lat.clone(),
            curves: CurveConfiguration::new(lat, sorted),
            eff,
            nef,
            bnef,
            beff,
            ample_witness,
            fibrations,
        })
    }

    /// Runs Vinberg's algorithm from `base`, then builds the context.
    pub fn from_lattice(lat: &NSLattice, base: &[i64], max_level: u32) -> Result<Self> {
        let cfg = run_vinberg(lat, base, max_level)?;
        Self::from_curves(lat, &cfg.curves)
    }

    pub fn curve_list(&self) -> &[LatticeClass] {
        &self.curves.curves
    }

    pub fn is_curve(&self, d: &[i64]) -> bool {
        self.curves.curves.binary_search_by(|c| c.as_slice().cmp(d)).is_ok()
    }

    /// Primitive isotropic nef classes of the Hilbert basis, sorted.
    pub fn fibration_list(&self) -> &[LatticeClass] {
        &self.fibrations
    }

    pub fn pair(&self, a: &[i64], b: &[i64]) -> i64 {
        self.lattice.pair(a, b)
    }

    pub fn in_eff_cone(&self, d: &[i64]) -> bool {
        contains(&self.eff, d)
    }

    /// Iterated removal of curves on which the class is negative.
    pub fn zariski_reduce(&self, d: &[i64]) -> Option<ZariskiSplit> {
        let mut x = d.to_vec();
        let mut base = Vec::new();
        loop {
            if arith::is_zero(&x) {
                return Some(ZariskiSplit { nef_part: x, base_part: base });
            }
            if !self.in_eff_cone(&x) {
                return None;
            }
            match self.curves.curves.iter().find(|c| self.pair(&x, c) < 0) {
                None => return Some(ZariskiSplit { nef_part: x, base_part: base }),
                Some(c) => {
                    x = arith::sub(&x, c);
                    base.push(c.clone());
                }
            }
        }
    }

    pub fn is_effective(&self, d: &[i64]) -> bool {
        self.zariski_reduce(d).is_some()
    }

    pub fn h0(&self, d: &[i64]) -> i64 {
        let Some(z) = self.zariski_reduce(d) else { return 0 };
        let p = &z.nef_part;
        if arith::is_zero(p) {
            return 1;
        }
        let q = self.lattice.square(p);
        if q == 0 {
            arith::gcd_slice(p) + 1
        } else {
            2 + q / 2
        }
    }

    pub fn h2(&self, d: &[i64]) -> i64 {
        self.h0(&arith::neg(d))
    }

    pub fn h1(&self, d: &[i64]) -> i64 {
        self.h0(d) + self.h2(d) - 2 - self.lattice.square(d) / 2
    }

    pub fn is_nef(&self, d: &[i64]) -> bool {
        self.curves.curves.iter().all(|c| self.pair(d, c) >= 0)
    }

    pub fn is_ample(&self, d: &[i64]) -> bool {
        self.curves.curves.iter().all(|c| self.pair(d, c) > 0) && self.lattice.square(d) > 0
    }

    pub fn fibration_classes(&self) -> Result<Vec<FibrationInfo>> {
        self.fibrations
            .iter()
            .map(|f| {
                let has_section = self.curves.curves.iter().any(|e| self.pair(e, f) == 1);
                let mut reducible_fibers = fiber_components(self, f)?;
                reducible_fibers.sort();
                Ok(FibrationInfo { fiber_class: f.clone(), has_section, reducible_fibers })
            })
            .collect()
    }

    fn check_nef_effective(&self, d: &[i64]) -> Result<()> {
        self.lattice.check_class(d)?;
        if arith::is_zero(d) || !self.is_nef(d) {
            return Err(Error::Input(format!("{d:?} is not a nonzero nef class")));
        }
        Ok(())
    }

    /// False exactly for `D = aF + E` with `a ≥ 2`, `F` a fibration and
    /// `E` a curve with `E·F = 1`.
    pub fn is_bpf(&self, d: &[i64]) -> Result<bool> {
        self.check_nef_effective(d)?;
        Ok(self.fixed_curve(d).is_none())
    }

    /// The `(a, F, E)` of a non-free system `D = aF + E`, if any.
    pub fn fixed_curve(&self, d: &[i64]) -> Option<(i64, LatticeClass, LatticeClass)> {
        for f in &self.fibrations {
            for e in &self.curves.curves {
                if self.pair(e, f) != 1 {
                    continue;
                }
                let r = arith::sub(d, e);
                let k = f.iter().position(|&x| x != 0).expect("nonzero fibration");
                if r[k] % f[k] != 0 {
                    continue;
                }
                let a = r[k] / f[k];
                if a >= 2 && arith::scale(a, f) == r {
                    return Some((a, f.clone(), e.clone()));
                }
            }
        }
        None
    }

    pub fn hyperelliptic_case(&self, d: &[i64]) -> HyperellipticCase {
        let q = self.lattice.square(d);
        if q == 2 {
            return HyperellipticCase::C;
        }
        if q >= 4 && self.fibrations.iter().any(|f| self.pair(f, d) == 2) {
            return HyperellipticCase::A;
        }
        if q == 8 && d.iter().all(|x| x % 2 == 0) {
            let half: Vec<i64> = d.iter().map(|x| x / 2).collect();
            if self.lattice.square(&half) == 2 {
                return HyperellipticCase::B;
            }
        }
        HyperellipticCase::None
    }

    pub fn is_very_ample(&self, d: &[i64]) -> bool {
        self.is_ample(d)
            && self.fixed_curve(d).is_none()
            && self.hyperelliptic_case(d) == HyperellipticCase::None
            && self.lattice.square(d) >= 4
    }

    /// `D = 3F + 2E₁ + E₂` with `E₁·F = 1`, `E₂·F = 0`, `E₁·E₂ = 1`.
    fn twisted_cubic_pattern(&self, d: &[i64]) -> bool {
        let cs = &self.curves.curves;
        self.fibrations.iter().any(|f| {
            let rest = arith::sub(d, &arith::scale(3, f));
            cs.iter().filter(|e1| self.pair(e1, f) == 1).any(|e1| {
                let e2 = arith::sub(&rest, &arith::scale(2, e1));
                self.is_curve(&e2) && self.pair(&e2, f) == 0 && self.pair(e1, &e2) == 1
            })
        })
    }

    pub fn classify_model(&self, d: &[i64]) -> Result<ModelLabel> {
        self.check_nef_effective(d)?;
        let q = self.lattice.square(d);
        if q <= 0 {
            return Err(Error::Input(format!("{d:?} is not big")));
        }
        let contracted = self.curves.curves.iter().filter(|c| self.pair(d, c) == 0).count();
        if self.fixed_curve(d).is_some() {
            return Ok(ModelLabel { kind: ModelKind::Other, contracted, hyperelliptic_case: HyperellipticCase::None });
        }
        let case = self.hyperelliptic_case(d);
        use HyperellipticCase as H;
        let kind = match (q, case) {
            (2, _) => ModelKind::DoublePlane,
            (_, H::A) if self.twisted_cubic_pattern(d) => ModelKind::ConeOverTwistedCubic,
            (_, H::B) => ModelKind::DoubleQuadricCone,
            (4, H::None) => ModelKind::QuarticP3,
            (6, H::None) => ModelKind::SexticP4,
            (8, H::None) if self.fibrations.iter().all(|f| self.pair(f, d) > 3) => ModelKind::CI3QuadricsP5,
            _ => ModelKind::Other,
        };
        Ok(ModelLabel { kind, contracted, hyperelliptic_case: case })
    }
}

/// Extended Dynkin type of each connected component of the curves
/// orthogonal to `f`.
fn fiber_components(ctx: &K3Context, f: &[i64]) -> Result<Vec<FiberType>> {
    let cs: Vec<&LatticeClass> = ctx.curves.curves.iter().filter(|c| ctx.pair(c, f) == 0).collect();
    let n = cs.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut members = vec![s];
        comp[s] = s;
        let mut k = 0;
        while k < members.len() {
            let i = members[k];
            for j in 0..n {
                if comp[j] == usize::MAX && ctx.pair(cs[i], cs[j]) > 0 {
                    comp[j] = s;
                    members.push(j);
                }
            }
            k += 1;
        }
        let g: Vec<Vec<i64>> = members.iter().map(|&i| members.iter().map(|&j| ctx.pair(cs[i], cs[j])).collect()).collect();
        out.push(classify_affine(&g).ok_or_else(|| {
            Error::Classification(format!("fiber of {f:?} has unrecognised component graph {g:?}"))
        })?);
    }
    Ok(out)
}

/// Matches a connected Gram matrix of (−2)-curves against the extended
/// Dynkin diagrams.
pub fn classify_affine(g: &[Vec<i64>]) -> Option<FiberType> {
    let n = g.len();
    if n < 2 || (0..n).any(|i| g[i][i] != -2) {
        return None;
    }
    if n == 2 {
        return (g[0][1] == 2).then_some(FiberType::A(1));
    }
    if g.iter().flatten().any(|&x| x > 1) {
        return None;
    }
    let deg: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| j != i && g[i][j] == 1).count()).collect();
    let edges: usize = deg.iter().sum::<usize>() / 2;
    if edges == n {
        return deg.iter().all(|&d| d == 2).then_some(FiberType::A(n - 1));
    }
    if edges != n - 1 {
        return None;
    }
    // trees: arm lengths from branch nodes
    let branches: Vec<usize> = (0..n).filter(|&i| deg[i] >= 3).collect();
    let arm = |from: usize, first: usize| {
        let (mut prev, mut cur, mut len) = (from, first, 1);
        while deg[cur] == 2 {
            let next = (0..n).find(|&j| j != cur && j != prev && g[cur][j] == 1).unwrap();
            prev = cur;
            cur = next;
            len += 1;
        }
        (len, deg[cur] == 1)
    };
    let nbrs = |i: usize| (0..n).filter(move |&j| j != i && g[i][j] == 1);
    match branches.as_slice() {
        [b] if deg[*b] == 4 => {
            let ok = nbrs(*b).all(|j| arm(*b, j) == (1, true));
            (ok && n == 5).then_some(FiberType::D(4))
        }
        [b] if deg[*b] == 3 => {
            let mut arms: Vec<usize> = nbrs(*b).map(|j| arm(*b, j).0).collect();
            arms.sort();
            match arms.as_slice() {
                [2, 2, 2] => Some(FiberType::E(6)),
                [1, 3, 3] => Some(FiberType::E(7)),
                [1, 2, 5] => Some(FiberType::E(8)),
                _ => None,
            }
        }
        [a, b] if deg[*a] == 3 && deg[*b] == 3 => {
            let leaves = |x: usize| nbrs(x).filter(|&j| arm(x, j) == (1, true)).count();
            (leaves(*a) == 2 && leaves(*b) == 2).then_some(FiberType::D(n - 1))
        }
        _ => None,
    }
}
