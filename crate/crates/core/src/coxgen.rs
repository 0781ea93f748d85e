//! Degrees of a generating set of the Cox ring: candidate degrees from nef
//! Hilbert-basis sums, elimination by surjectivity criteria for
//! multiplication maps, and minimality criteria for the survivors.

use crate::arith;
use crate::error::Result;
use crate::lattice::LatticeClass;
use crate::polyhedra::Decomposer;
use crate::rrk3::K3Context;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::ops::ControlFlow;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CandidateSource {
    MinusTwoCurve,
    NefSum1,
    NefSum2,
    NefSum3,
    TwoFplusFprime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoxStatus {
    Eliminated,
    Necessary,
    Starred,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TestRecord {
    pub test: String,
    pub witnesses: Vec<LatticeClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TestRecord {
    fn new(test: &str, witnesses: Vec<LatticeClass>) -> Self {
        TestRecord { test: test.to_string(), witnesses, note: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoxCandidate {
    pub degree: LatticeClass,
    pub source: CandidateSource,
    pub status: CoxStatus,
    pub trail: Vec<TestRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoxDegreeReport {
    pub lattice: String,
    pub candidates: Vec<CoxCandidate>,
    pub necessary_degrees: Vec<LatticeClass>,
    pub starred_degrees: Vec<LatticeClass>,
}

/// Which elimination tests run. The reduced battery keeps only the pair
/// test and the minimality criteria, for very large nef Hilbert bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Battery {
    Full,
    PairsAndMinimal,
}

impl Battery {
    /// The reduced battery for the 111-element nef Hilbert basis of V14.
    pub fn for_lattice(name: &str) -> Battery {
        if name.eq_ignore_ascii_case("V14") {
            Battery::PairsAndMinimal
        } else {
            Battery::Full
        }
    }
}

/// Sources: curves; sums of one to three nef Hilbert-basis elements;
/// `2(F+F′)` for fibrations with `F·F′ = 2`. Sorted by degree; a degree
/// reached by several sources keeps the first in that list.
pub fn candidate_degrees(ctx: &K3Context) -> Vec<(LatticeClass, CandidateSource)> {
    let mut seen: HashMap<LatticeClass, CandidateSource> = HashMap::new();
    for c in ctx.curve_list() {
        seen.entry(c.clone()).or_insert(CandidateSource::MinusTwoCurve);
    }
    let b = &ctx.bnef.elements;
    let m = b.len();
    for i in 0..m {
        seen.entry(b[i].clone()).or_insert(CandidateSource::NefSum1);
    }
    for i in 0..m {
        for j in i..m {
            seen.entry(arith::add(&b[i], &b[j])).or_insert(CandidateSource::NefSum2);
        }
    }
    for i in 0..m {
        for j in i..m {
            let s = arith::add(&b[i], &b[j]);
            for k in j..m {
                seen.entry(arith::add(&s, &b[k])).or_insert(CandidateSource::NefSum3);
            }
        }
    }
    let fib = ctx.fibration_list();
    for i in 0..fib.len() {
        for j in i + 1..fib.len() {
            if ctx.pair(&fib[i], &fib[j]) == 2 {
                seen.entry(arith::scale(2, &arith::add(&fib[i], &fib[j]))).or_insert(CandidateSource::TwoFplusFprime);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

/// How a divisor enters a disjointness certificate: a fixed (−2)-curve, or
/// a general member of a base-point-free system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Curve,
    Moving,
}

fn kind_of(ctx: &K3Context, e: &[i64]) -> Option<Kind> {
    if ctx.is_curve(e) {
        Some(Kind::Curve)
    } else if !arith::is_zero(e) && ctx.is_nef(e) && ctx.fixed_curve(e).is_none() {
        Some(Kind::Moving)
    } else {
        None
    }
}

/// Two distinct curves with pairing 0 are disjoint; a general member of a
/// free system misses every effective divisor it pairs to zero with.
fn disjoint(ctx: &K3Context, a: (&[i64], Kind), b: (&[i64], Kind)) -> bool {
    match (a.1, b.1) {
        (Kind::Curve, Kind::Curve) => a.0 != b.0 && ctx.pair(a.0, b.0) == 0,
        _ => ctx.pair(a.0, b.0) == 0,
    }
}

/// Three divisors without a common point: some pair is disjoint, or at least
/// two are general members of free systems (a general member avoids any
/// finite set), or one is and the other two are distinct curves.
fn no_common_point(ctx: &K3Context, e: [(&[i64], Kind); 3]) -> bool {
    if disjoint(ctx, e[0], e[1]) || disjoint(ctx, e[0], e[2]) || disjoint(ctx, e[1], e[2]) {
        return true;
    }
    let moving = e.iter().filter(|x| x.1 == Kind::Moving).count();
    match moving {
        0 => false,
        1 => {
            let cs: Vec<&[i64]> = e.iter().filter(|x| x.1 == Kind::Curve).map(|x| x.0).collect();
            cs[0] != cs[1]
        }
        _ => true,
    }
}

fn usable_section(ctx: &K3Context, d: &[i64], e: &[i64]) -> bool {
    !arith::is_zero(e) && e != d && ctx.is_effective(&arith::sub(d, e))
}

/// Koszul surjectivity for two sections with disjoint divisors:
/// `Some(h¹(D−E₁−E₂) = 0)`, or `None` when no disjointness certificate
/// applies.
pub fn test_koszul_pair(ctx: &K3Context, d: &[i64], e1: &[i64], e2: &[i64]) -> Option<bool> {
    let (k1, k2) = (kind_of(ctx, e1)?, kind_of(ctx, e2)?);
    if !usable_section(ctx, d, e1) || !usable_section(ctx, d, e2) || !disjoint(ctx, (e1, k1), (e2, k2)) {
        return None;
    }
    Some(ctx.h1(&arith::sub(&arith::sub(d, e1), e2)) == 0)
}

/// Koszul surjectivity for three sections without a common zero.
pub fn test_koszul_triple(ctx: &K3Context, d: &[i64], e1: &[i64], e2: &[i64], e3: &[i64]) -> Option<bool> {
    let ks = [kind_of(ctx, e1)?, kind_of(ctx, e2)?, kind_of(ctx, e3)?];
    let es = [e1, e2, e3];
    if es.iter().any(|e| !usable_section(ctx, d, e)) || !no_common_point(ctx, [(e1, ks[0]), (e2, ks[1]), (e3, ks[2])]) {
        return None;
    }
    Some(triple_vanishing(ctx, d, e1, e2, e3))
}

fn triple_vanishing(ctx: &K3Context, d: &[i64], e1: &[i64], e2: &[i64], e3: &[i64]) -> bool {
    let h1 = |a: &[i64], b: &[i64]| ctx.h1(&arith::sub(&arith::sub(d, a), b)) == 0;
    h1(e1, e2) && h1(e1, e3) && h1(e2, e3) && ctx.h2(&arith::sub(&arith::sub(&arith::sub(d, e1), e2), e3)) == 0
}

/// Multiplication `H⁰(A) ⊗ H⁰(B) → H⁰(A+B)` is onto when `B` is free and
/// `h¹(A−B) = h¹(A) = h²(A−2B) = 0`.
pub fn test_ottem(ctx: &K3Context, d: &[i64], a: &[i64], b: &[i64]) -> bool {
    arith::add(a, b) == d
        && ctx.is_nef(a)
        && ctx.is_nef(b)
        && kind_of(ctx, b) == Some(Kind::Moving)
        && ctx.h1(&arith::sub(a, b)) == 0
        && ctx.h1(a) == 0
        && ctx.h2(&arith::sub(a, &arith::scale(2, b))) == 0
}

/// Fibration `F = E₁ + E₂` with `D − F` very ample: `Some(codim = 2)`,
/// or `None` without such a decomposition.
pub fn test_va(ctx: &K3Context, d: &[i64]) -> Option<(bool, [LatticeClass; 3])> {
    let cs = ctx.curve_list();
    if !ctx.is_nef(d) {
        return None;
    }
    let mut applicable = None;
    for f in ctx.fibration_list() {
        if !ctx.is_very_ample(&arith::sub(d, f)) {
            continue;
        }
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                if arith::add(&cs[i], &cs[j]) != *f {
                    continue;
                }
                let codim = ctx.h0(d)
                    - (ctx.h0(&arith::sub(d, &cs[i])) + ctx.h0(&arith::sub(d, &cs[j]))
                        - ctx.h0(&arith::sub(&arith::sub(d, &cs[i]), &cs[j])));
                let w = [f.clone(), cs[i].clone(), cs[j].clone()];
                if codim == 2 {
                    return Some((true, w));
                }
                applicable = Some((false, w));
            }
        }
    }
    applicable
}

/// `D = 2B` with `B` free, `B² = 2`: `Sym² H⁰(B) → H⁰(2B)` is an
/// isomorphism (both sides have dimension 6 and the image of `B`'s map is
/// the whole plane).
pub fn test_double_plane(ctx: &K3Context, d: &[i64]) -> Option<LatticeClass> {
    if d.iter().any(|x| x % 2 != 0) {
        return None;
    }
    let b: Vec<i64> = d.iter().map(|x| x / 2).collect();
    (ctx.lattice.square(&b) == 2 && kind_of(ctx, &b) == Some(Kind::Moving)).then_some(b)
}

/// The divisors entering the Koszul tests: curves and free nef
/// Hilbert-basis elements, restricted to those with `D − E` effective.
fn section_pool(ctx: &K3Context, d: &[i64]) -> Vec<(LatticeClass, Kind)> {
    let mut pool: Vec<(LatticeClass, Kind)> = ctx.curve_list().iter().map(|c| (c.clone(), Kind::Curve)).collect();
    for b in &ctx.bnef.elements {
        if ctx.fixed_curve(b).is_none() {
            pool.push((b.clone(), Kind::Moving));
        }
    }
    pool.retain(|(e, _)| usable_section(ctx, d, e));
    pool
}

/// First successful elimination test for a nef free degree, in the order
/// pairs, triples, Ottem, very ample, double plane.
pub fn elimination_witness(ctx: &K3Context, d: &[i64], battery: Battery) -> Option<TestRecord> {
    let pool = section_pool(ctx, d);
    let n = pool.len();
    for i in 0..n {
        for j in i..n {
            let (a, b) = (&pool[i], &pool[j]);
            if disjoint(ctx, (&a.0, a.1), (&b.0, b.1)) && ctx.h1(&arith::sub(&arith::sub(d, &a.0), &b.0)) == 0 {
                return Some(TestRecord::new("koszul_pair", vec![a.0.clone(), b.0.clone()]));
            }
        }
    }
    if battery == Battery::PairsAndMinimal {
        return None;
    }
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let (a, b, c) = (&pool[i], &pool[j], &pool[k]);
                if no_common_point(ctx, [(&a.0, a.1), (&b.0, b.1), (&c.0, c.1)]) && triple_vanishing(ctx, d, &a.0, &b.0, &c.0) {
                    return Some(TestRecord::new("koszul_triple", vec![a.0.clone(), b.0.clone(), c.0.clone()]));
                }
            }
        }
    }
    for b in &ctx.bnef.elements {
        let a = arith::sub(d, b);
        if !arith::is_zero(&a) && test_ottem(ctx, d, &a, b) {
            return Some(TestRecord::new("ottem", vec![a, b.clone()]));
        }
    }
    if let Some((true, w)) = test_va(ctx, d) {
        return Some(TestRecord::new("very_ample", w.to_vec()));
    }
    if let Some(b) = test_double_plane(ctx, d) {
        return Some(TestRecord::new("double_plane", vec![b]));
    }
    None
}

/// Proof that a generator is needed in degree `D`, given the surviving
/// degrees; `None` when no criterion applies.
pub fn test_minimal(ctx: &K3Context, d: &[i64], surviving: &[LatticeClass]) -> Result<Option<TestRecord>> {
    let parts: Vec<LatticeClass> = surviving.iter().filter(|x| x.as_slice() != d).cloned().collect();
    let dec = Decomposer::new(&ctx.lattice, &parts, &ctx.ample_witness, Some(&ctx.eff))?;
    let idx = |c: &[i64]| parts.iter().position(|p| p.as_slice() == c);
    let avoiding = |avoid: &[&LatticeClass]| {
        let mut skip = vec![false; parts.len()];
        for a in avoid {
            if let Some(i) = idx(a) {
                skip[i] = true;
            }
        }
        dec.exists(d, &skip)
    };
    let curves = ctx.curve_list();
    let curve_parts: Vec<&LatticeClass> = parts.iter().filter(|p| ctx.is_curve(p)).collect();
    if !avoiding(&curve_parts) {
        // every decomposition uses some curve; look for a fixed one
        for e in curves {
            if idx(e).is_some() && !avoiding(&[e]) {
                return Ok(Some(TestRecord::new("minimal_fixed_curve", vec![e.clone()])));
            }
        }
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                let (e1, e2) = (&curves[i], &curves[j]);
                if ctx.pair(e1, e2) > 0 && !avoiding(&[e1, e2]) {
                    return Ok(Some(TestRecord::new("minimal_meeting_pair", vec![e1.clone(), e2.clone()])));
                }
            }
        }
        for i in 0..curves.len() {
            for j in i..curves.len() {
                for k in j..curves.len() {
                    let t = [&curves[i], &curves[j], &curves[k]];
                    if arith::add(&arith::add(t[0], t[1]), t[2]) != d {
                        continue;
                    }
                    let h1s = ctx.h1(&arith::add(t[0], t[1])) == 0
                        && ctx.h1(&arith::add(t[0], t[2])) == 0
                        && ctx.h1(&arith::add(t[1], t[2])) == 0;
                    if h1s && !avoiding(&t) {
                        return Ok(Some(TestRecord::new("minimal_three_curves", t.iter().map(|c| (*c).clone()).collect())));
                    }
                }
            }
        }
        // dimension count: the products from lower degrees span at most
        // Σ_decompositions Π C(h⁰(wᵢ)+aᵢ−1, aᵢ) dimensions
        let h = ctx.h0(d) as u128;
        let h0s: Vec<u128> = parts.iter().map(|p| ctx.h0(p) as u128).collect();
        let mut total: u128 = 0;
        dec.visit(d, &mut |coeffs| {
            let mut prod: u128 = 1;
            for (k, &a) in coeffs.iter().enumerate() {
                if a > 0 {
                    prod = prod.saturating_mul(multichoose(h0s[k], a as u128));
                }
            }
            total = total.saturating_add(prod);
            if total >= h {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        if total < h {
            let mut r = TestRecord::new("minimal_dimension_count", vec![]);
            r.note = Some(format!("products span at most {total} of h0 = {h}"));
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// `C(n+a−1, a)`, the dimension of `Symᵃ` of an `n`-dimensional space.
fn multichoose(n: u128, a: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..a {
        r = r.saturating_mul(n + i) / (i + 1);
    }
    r
}

pub fn run_pipeline(ctx: &K3Context, name: &str, battery: Battery) -> Result<CoxDegreeReport> {
    let cands = candidate_degrees(ctx);
    let beff = &ctx.beff.elements;
    let first: Vec<(CoxStatus, Vec<TestRecord>)> = cands
        .par_iter()
        .map(|(d, _)| {
            if beff.binary_search(d).is_ok() {
                return (CoxStatus::Necessary, vec![TestRecord::new("effective_hilbert_basis", vec![])]);
            }
            if let Some(c) = ctx.curve_list().iter().find(|c| ctx.pair(d, c) < 0) {
                return (CoxStatus::Eliminated, vec![TestRecord::new("base_component", vec![c.clone()])]);
            }
            if let Some((_, f, e)) = ctx.fixed_curve(d) {
                return (CoxStatus::Eliminated, vec![TestRecord::new("fixed_component", vec![f, e])]);
            }
            match elimination_witness(ctx, d, battery) {
                Some(r) => (CoxStatus::Eliminated, vec![r]),
                None => (CoxStatus::Starred, Vec::new()),
            }
        })
        .collect();
    for b in beff {
        if cands.binary_search_by(|(d, _)| d.cmp(b)).is_err() {
            return Err(crate::Error::Internal(format!("effective Hilbert basis element {b:?} is not a candidate")));
        }
    }
    let surviving: Vec<LatticeClass> =
        cands.iter().zip(&first).filter(|(_, (s, _))| *s != CoxStatus::Eliminated).map(|((d, _), _)| d.clone()).collect();
    let second: Vec<Result<(CoxStatus, Vec<TestRecord>)>> = cands
        .par_iter()
        .zip(first.into_par_iter())
        .map(|((d, _), (status, mut trail))| {
            if status != CoxStatus::Starred {
                return Ok((status, trail));
            }
            match test_minimal(ctx, d, &surviving)? {
                Some(r) => {
                    trail.push(r);
                    Ok((CoxStatus::Necessary, trail))
                }
                None => {
                    let mut r = TestRecord::new("minimal", vec![]);
                    r.note = Some("no minimality criterion applies".into());
                    trail.push(r);
                    Ok((CoxStatus::Starred, trail))
                }
            }
        })
        .collect();
    let mut candidates = Vec::with_capacity(cands.len());
    for ((degree, source), res) in cands.into_iter().zip(second) {
        let (status, trail) = res?;
        candidates.push(CoxCandidate { degree, source, status, trail });
    }
    let pick = |s: CoxStatus| candidates.iter().filter(|c| c.status == s).map(|c| c.degree.clone()).collect::<Vec<_>>();
    let necessary_degrees = pick(CoxStatus::Necessary);
    let starred_degrees = pick(CoxStatus::Starred);
    Ok(CoxDegreeReport { lattice: name.to_string(), candidates, necessary_degrees, starred_degrees })
}
