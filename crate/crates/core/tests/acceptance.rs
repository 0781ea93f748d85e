//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the summary; the test fails if any line is FAIL.

mod common;

use common::*;
use k3cone::coxgen::{run_pipeline, Battery, CoxStatus};
use k3cone::lattice::{LatticeClass, CATALOG_NAMES};
use k3cone::polyhedra::{contains, dual_cone, hilbert_basis, ConeData};
use k3cone::rrk3::{FiberType, HyperellipticCase, K3Context, ModelKind};
use k3cone::tables::{reference_tables, FamilyRecord};
use k3cone::vinberg::{config_isomorphic, default_base, run_vinberg, validate_domain, CurveConfiguration, DEFAULT_MAX_LEVEL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn families() -> &'static [FamilyRecord] {
    &reference_tables().families
}

fn ctx(f: &FamilyRecord) -> K3Context {
    K3Context::from_curves(&f.lattice(), &f.curves).expect("context")
}

fn sorted(mut v: Vec<LatticeClass>) -> Vec<LatticeClass> {
    v.sort();
    v
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut diffs = Vec::new();
    for f in families() {
        diffs.extend(f.self_check());
    }
    ensure!(diffs.is_empty(), "{diffs:?}");
    let v10 = reference_tables().family("V10").unwrap();
    let lat = v10.lattice();
    let h = &v10.polarization.class;
    ensure!(lat.square(h) == 4 && v10.curves.iter().all(|c| lat.pair(h, c) == 1), "V10 polarization");
    let el = t.elapsed();
    ensure!(el.as_secs_f64() < 1.0, "took {el:?}");
    Ok(format!("14 families consistent in {el:?}"))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let want = [12, 6, 5, 5, 6, 8, 8, 4, 4, 4, 6, 6, 6, 8];
    for (k, name) in CATALOG_NAMES.iter().enumerate() {
        let f = reference_tables().family(name).unwrap();
        let lat = f.lattice();
        let cfg = run_vinberg(&lat, &default_base(&lat), DEFAULT_MAX_LEVEL).map_err(|e| format!("{name}: {e}"))?;
        ensure!(validate_domain(&cfg), "{name}: domain not validated");
        ensure!(cfg.curves.len() == want[k], "{name}: {} curves", cfg.curves.len());
        let reference = CurveConfiguration::new(&lat, f.curves.clone());
        ensure!(config_isomorphic(&cfg, &reference).is_some(), "{name}: not isomorphic");
    }
    let el = t.elapsed();
    ensure!(el.as_secs() < 60, "took {el:?}");
    Ok(format!("curve counts {want:?}, all isomorphic, {el:?}"))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let want = [51, 35, 10, 5, 5, 19, 15, 5, 7, 5, 27, 33, 39, 111];
    for (k, f) in families().iter().enumerate() {
        let lat = f.lattice();
        let eff = ConeData::from_generators(&lat, &f.curves).map_err(|e| e.to_string())?;
        let nef = dual_cone(&eff).map_err(|e| e.to_string())?;
        let bnef = hilbert_basis(&nef).map_err(|e| e.to_string())?.elements;
        let beff = hilbert_basis(&eff).map_err(|e| e.to_string())?.elements;
        ensure!(sorted(bnef.clone()) == sorted(f.bnef.clone()), "{}: BNef differs", f.name);
        ensure!(sorted(beff) == f.beff(), "{}: BEff differs", f.name);
        ensure!(sorted(nef.rays.clone()) == sorted(f.nef_rays.clone()), "{}: nef rays differ", f.name);
        ensure!(bnef.len() == want[k], "{}: |BNef| = {}", f.name, bnef.len());
    }
    let el = t.elapsed();
    ensure!(el.as_secs() < 600, "took {el:?}");
    Ok(format!("|BNef| = {want:?}, BEff equal, {el:?}"))
}

fn criterion_4() -> Outcome {
    let want = [6, 4, 1, 1, 3, 4, 6, 1, 2, 4, 8, 2, 0, 0];
    let mut with_section = Vec::new();
    for (k, f) in families().iter().enumerate() {
        let fibs = ctx(f).fibration_classes().map_err(|e| e.to_string())?;
        ensure!(fibs.len() == want[k], "{}: {} fibrations", f.name, fibs.len());
        let expected: Vec<LatticeClass> = f.fibrations.bnef_indices.iter().map(|&i| f.bnef[i - 1].clone()).collect();
        let got: Vec<LatticeClass> = fibs.iter().map(|x| x.fiber_class.clone()).collect();
        ensure!(sorted(got) == sorted(expected), "{}: fibration classes differ", f.name);
        for x in &fibs {
            let types: Vec<String> = x.reducible_fibers.iter().map(|t| t.to_string()).collect();
            ensure!(types == f.fibrations.reducible_fibers, "{}: fibers {types:?}", f.name);
        }
        if fibs.iter().any(|x| x.has_section) {
            ensure!(fibs.iter().all(|x| x.has_section), "{}: mixed sections", f.name);
            with_section.push(f.name.clone());
        }
    }
    ensure!(with_section == ["V4", "V8"], "sections on {with_section:?}");
    let v1 = ctx(reference_tables().family("V1").unwrap()).fibration_classes().unwrap();
    ensure!(v1.iter().all(|x| x.reducible_fibers == [FiberType::A(1), FiberType::A(1)]), "V1 fibers");
    let v8 = ctx(reference_tables().family("V8").unwrap()).fibration_classes().unwrap();
    ensure!(v8[0].reducible_fibers == [FiberType::A(2)], "V8 fibers");
    Ok(format!("counts {want:?}, sections on V4 and V8, fiber types match"))
}

fn criterion_5() -> Outcome {
    // Non-bpf big elements of the nef Hilbert bases. Besides V8 BNef[4] the
    // lattice data force V4 BNef[4] = 2·BNef[5] + E (a section) to be non-bpf
    // too; the literal "unique" claim is stated for V8's basis only.
    let mut non_bpf = Vec::new();
    let mut double_planes = 0;
    for f in families() {
        let c = ctx(f);
        let mut classes: Vec<LatticeClass> = f.bnef.clone();
        for i in 0..f.bnef.len() {
            for j in i..f.bnef.len() {
                classes.push(k3cone::arith::add(&f.bnef[i], &f.bnef[j]));
            }
        }
        for (k, b) in f.bnef.iter().enumerate() {
            if c.lattice.square(b) > 0 && !c.is_bpf(b).unwrap() {
                non_bpf.push((f.name.clone(), k + 1));
            }
        }
        // a D²=2 class of the form 2F+E maps onto a conic, not a plane
        for d in classes.iter().filter(|d| c.lattice.square(d) == 2) {
            let m = c.classify_model(d).unwrap();
            if c.is_bpf(d).unwrap() {
                ensure!(m.kind == ModelKind::DoublePlane, "{} {d:?}: D²=2 gives {:?}", f.name, m.kind);
                double_planes += 1;
            } else {
                ensure!(m.kind == ModelKind::Other && c.fixed_curve(d).is_some(), "{} {d:?}: non-bpf D²=2 gives {:?}", f.name, m.kind);
            }
        }
    }
    let expected = vec![("V4".to_string(), 4), ("V8".to_string(), 4)];
    ensure!(non_bpf == expected, "non-bpf big BNef elements {non_bpf:?}");
    let v8 = ctx(reference_tables().family("V8").unwrap());
    let b3 = &reference_tables().family("V8").unwrap().bnef[2];
    ensure!(v8.hyperelliptic_case(b3) == HyperellipticCase::A, "V8 BNef[3] case {:?}", v8.hyperelliptic_case(b3));
    let m = v8.classify_model(b3).unwrap();
    ensure!(m.kind == ModelKind::ConeOverTwistedCubic, "V8 BNef[3] model {:?}", m.kind);
    let v1f = reference_tables().family("V1").unwrap();
    let m = ctx(v1f).classify_model(&v1f.bnef[7]).unwrap();
    ensure!(m.kind == ModelKind::CI3QuadricsP5 && m.contracted == 3, "V1 BNef[8] {m:?}");
    Ok(format!(
        "V8 BNef[3] cone over twisted cubic, V1 BNef[8] (2,2,2) with 3 contracted, {double_planes} D²=2 classes double planes; \
         non-bpf big set is {{V4 BNef[4], V8 BNef[4]}} (documented deviation: V4 BNef[4], D²=2, is also non-bpf and excluded from the double-plane check)"
    ))
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut extras = Vec::new();
    for f in families() {
        let c = ctx(f);
        let r = run_pipeline(&c, &f.name, Battery::for_lattice(&f.name)).map_err(|e| e.to_string())?;
        let status = |x: &LatticeClass| r.candidates.iter().find(|y| &y.degree == x).map(|y| y.status);
        // every curve is a generator, so the output spans the effective cone
        for e in &f.curves {
            ensure!(status(e) == Some(CoxStatus::Necessary), "{}: curve {e:?} not necessary", f.name);
        }
        if f.name == "V14" {
            for x in &reference_tables().v14_cox_degrees {
                ensure!(matches!(status(x), Some(CoxStatus::Necessary | CoxStatus::Starred)), "V14: {x:?} is {:?}", status(x));
            }
            for x in r.candidates.iter().filter(|x| x.status != CoxStatus::Eliminated) {
                if !reference_tables().v14_cox_degrees.contains(&x.degree) && !c.beff.elements.contains(&x.degree) {
                    extras.push(format!("V14 {:?} {:?}", x.degree, x.status));
                }
            }
            continue;
        }
        let table = f.cox_degrees();
        for (x, starred) in &table {
            match (status(x), starred) {
                (Some(CoxStatus::Necessary), _) | (Some(CoxStatus::Starred), true) => {}
                (s, _) => return Err(format!("{}: table degree {x:?} (starred {starred}) is {s:?}", f.name)),
            }
        }
        for x in r.candidates.iter().filter(|x| x.status != CoxStatus::Eliminated) {
            if table.iter().any(|(y, _)| *y == x.degree) || f.beff().contains(&x.degree) {
                continue;
            }
            let residual = f.genericity_removed.iter().any(|g| g.class == x.degree);
            ensure!(residual && x.status == CoxStatus::Starred, "{}: unexpected {:?} {:?}", f.name, x.degree, x.status);
            extras.push(format!("{} {:?} starred", f.name, x.degree));
        }
        if f.name == "V7" {
            ensure!(r.necessary_degrees == sorted(f.curves.clone()), "V7 necessary != E(X)");
        }
        if f.name == "V1" {
            ensure!(r.necessary_degrees == f.beff(), "V1 necessary != BEff");
        }
    }
    let pinned = [
        "V7 [-1, -1, -1, 1] starred",
        "V10 [-1, -1, 1, 1] starred",
        "V12 [-1, -2, 1, 1] starred",
        "V14 [2, 2, -2, -2] Starred",
        "V14 [3, 3, -3, -3] Starred",
        "V14 [4, 4, -4, -4] Starred",
    ];
    ensure!(extras == pinned, "extra degrees {extras:?}");
    let el = t.elapsed();
    ensure!(el.as_secs() < 1800, "took {el:?}");
    Ok(format!("reference containments hold on V1–V13, the 71 V14 degrees are all generated; residual starred: {extras:?}; {el:?}"))
}

fn random_class(rng: &mut ChaCha8Rng, n: usize, r: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

fn random_cone(rng: &mut ChaCha8Rng) -> (usize, Vec<Vec<i64>>) {
    loop {
        let n = rng.gen_range(2..=3);
        let k = rng.gen_range(n..=5.min(n + 2));
        let rays: Vec<Vec<i64>> = (0..k).map(|_| random_class(rng, n, 5)).collect();
        if rays.iter().any(|r| r.iter().all(|&x| x == 0)) {
            continue;
        }
        if oracle_facets(&rays, n).is_some() {
            return (n, rays);
        }
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b33);
    let mut rr = 0;
    let mut eff_checked = 0;
    for f in families() {
        let c = ctx(f);
        let n = c.lattice.rank();
        for _ in 0..10_000 {
            let d = random_class(&mut rng, n, 6);
            let (h0, h1, h2) = (c.h0(&d), c.h1(&d), c.h2(&d));
            ensure!(h0 - h1 + h2 == 2 + c.lattice.square(&d) / 2, "{}: RR fails at {d:?}", f.name);
            ensure!(h1 >= 0 && h0 >= 0 && h2 >= 0, "{}: negative h at {d:?}", f.name);
            ensure!(h0 * h2 == 0 || d.iter().all(|&x| x == 0), "{}: D and −D effective at {d:?}", f.name);
            rr += 1;
        }
        let radius = if n == 4 { 3 } else { 2 };
        for _ in 0..200 {
            let d = random_class(&mut rng, n, radius);
            let lib = c.is_effective(&d);
            ensure!(lib == oracle_effective(&c, &d), "{}: effectivity of {d:?}", f.name);
            ensure!(lib == (c.h0(&d) > 0), "{}: h0 vs effectivity at {d:?}", f.name);
            ensure!(!lib || c.in_eff_cone(&d), "{}: effective outside Eff at {d:?}", f.name);
            eff_checked += 1;
        }
        let dd = dual_cone(&dual_cone(&c.eff).unwrap()).unwrap();
        ensure!(sorted(dd.rays) == sorted(c.eff.rays.clone()), "{}: dual of dual", f.name);
    }
    for i in 0..100 {
        let (n, rays) = random_cone(&mut rng);
        let lat = plain(n);
        let cone = ConeData::from_generators(&lat, &rays).map_err(|e| format!("cone {i}: {e}"))?;
        ensure!(sorted(cone.facets.clone()) == sorted(oracle_facets(&rays, n).unwrap()), "cone {i} {rays:?}: facets");
        let hb = sorted(hilbert_basis(&cone).map_err(|e| e.to_string())?.elements);
        ensure!(hb == oracle_hilbert_basis(&rays, n), "cone {i} {rays:?}: Hilbert basis");
        for h in &hb {
            for g in hb.iter().filter(|g| *g != h) {
                let diff: Vec<i64> = h.iter().zip(g).map(|(a, b)| a - b).collect();
                ensure!(!contains(&cone, &diff), "cone {i}: {h:?} reducible by {g:?}");
            }
        }
        let dd = dual_cone(&dual_cone(&cone).unwrap()).unwrap();
        ensure!(sorted(dd.rays) == sorted(cone.rays.clone()), "cone {i}: dual of dual");
    }
    Ok(format!("{rr} RR identities, {eff_checked} effectivity checks, 100 random cones (HB, facets, dual-of-dual)"))
}

#[test]
fn acceptance() {
    let criteria: [(u8, fn() -> Outcome); 7] =
        [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4), (5, criterion_5), (6, criterion_6), (7, criterion_7)];
    let mut failed = Vec::new();
    for (k, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {k}: PASS — {detail}"),
            Err(detail) => {
                println!("criterion {k}: FAIL — {detail}");
                failed.push(k);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

