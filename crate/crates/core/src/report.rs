//! End-to-end analysis reports, the regression harness against the
//! embedded tables, and the catalog listing used by the command line.

use crate::coxgen::{run_pipeline, Battery, CoxDegreeReport, CoxStatus};
use crate::error::{Error, Result};
use crate::lattice::{catalog, LatticeClass, NSLattice, CATALOG_NAMES};
use crate::polyhedra::{dual_cone, hilbert_basis, ConeData};
use crate::rrk3::{FibrationInfo, K3Context, ModelLabel};
use crate::tables::{reference_tables, FamilyRecord};
use crate::vinberg::{config_isomorphic, default_base, run_vinberg, CurveConfiguration, DEFAULT_MAX_LEVEL};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ConeSummary {
    pub rays: Vec<LatticeClass>,
    pub facets: Vec<LatticeClass>,
}

impl From<&ConeData> for ConeSummary {
    fn from(c: &ConeData) -> Self {
        ConeSummary { rays: c.rays.clone(), facets: c.facets.clone() }
    }
}

/// One nef Hilbert-basis element with its linear-system data.
#[derive(Clone, Debug, Serialize)]
pub struct LinearSystemRow {
    pub index: usize,
    pub class: LatticeClass,
    pub square: i64,
    pub h0: i64,
    pub bpf: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelLabel>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub lattice: NSLattice,
    pub base: LatticeClass,
    pub configuration: CurveConfiguration,
    pub eff: ConeSummary,
    pub nef: ConeSummary,
    pub beff: Vec<LatticeClass>,
    pub bnef: Vec<LatticeClass>,
    pub fibrations: Vec<FibrationInfo>,
    pub linear_systems: Vec<LinearSystemRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cox: Option<CoxDegreeReport>,
}

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub base: Option<LatticeClass>,
    pub max_level: u32,
    pub cox: bool,
    pub battery: Option<Battery>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { base: None, max_level: DEFAULT_MAX_LEVEL, cox: true, battery: None }
    }
}

/// Vinberg → cones → Hilbert bases → fibrations → models → Cox degrees.
pub fn analyze(lat: &NSLattice, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let base = match &opts.base {
        Some(b) => b.clone(),
        None => default_base(lat),
    };
    let cfg = run_vinberg(lat, &base, opts.max_level)?;
    let ctx = K3Context::from_curves(lat, &cfg.curves)?;
    let linear_systems = ctx
        .bnef
        .elements
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let square = lat.square(b);
            let model = if square > 0 { Some(ctx.classify_model(b)?) } else { None };
            Ok(LinearSystemRow { index: i + 1, class: b.clone(), square, h0: ctx.h0(b), bpf: ctx.is_bpf(b)?, model })
        })
        .collect::<Result<_>>()?;
    let name = lat.label().to_string();
    let cox = if opts.cox {
        Some(run_pipeline(&ctx, &name, opts.battery.unwrap_or_else(|| Battery::for_lattice(&name)))?)
    } else {
        None
    };
    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        lattice: lat.clone(),
        base,
        configuration: ctx.curves.clone(),
        eff: (&ctx.eff).into(),
        nef: (&ctx.nef).into(),
        beff: ctx.beff.elements.clone(),
        bnef: ctx.bnef.elements.clone(),
        fibrations: ctx.fibration_classes()?,
        linear_systems,
        cox,
    })
}

fn fmt_class(c: &[i64]) -> String {
    format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_matrix(out: &mut String, m: &[Vec<i64>]) {
    let w = m.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>w$}")).collect();
        let _ = writeln!(out, "    [{}]", cells.join(" "));
    }
}

pub fn render_text(r: &AnalysisReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lattice {}  rank {}  base {}", r.lattice.label(), r.lattice.rank(), fmt_class(&r.base));
    fmt_matrix(&mut s, &r.lattice.gram);
    let _ = writeln!(s, "\n(-2)-curves: {}", r.configuration.curves.len());
    for (i, c) in r.configuration.curves.iter().enumerate() {
        let _ = writeln!(s, "  E{:<3} {}", i + 1, fmt_class(c));
    }
    let _ = writeln!(s, "  intersection matrix:");
    fmt_matrix(&mut s, &r.configuration.intersections);
    let _ = writeln!(s, "\nnef cone rays: {}", r.nef.rays.len());
    for c in &r.nef.rays {
        let _ = writeln!(s, "  {}", fmt_class(c));
    }
    let _ = writeln!(s, "\nBEff: {}", r.beff.len());
    for c in &r.beff {
        let _ = writeln!(s, "  {}", fmt_class(c));
    }
    let _ = writeln!(s, "\nBNef: {}", r.bnef.len());
    let _ = writeln!(s, "  {:>4}  {:<20} {:>4} {:>4} {:>4}  model", "i", "class", "D²", "h0", "bpf");
    for row in &r.linear_systems {
        let model = row
            .model
            .map(|m| format!("{:?} (contracts {}, case {:?})", m.kind, m.contracted, m.hyperelliptic_case))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "  {:>4}  {:<20} {:>4} {:>4} {:>4}  {}",
            row.index,
            fmt_class(&row.class),
            row.square,
            row.h0,
            if row.bpf { "yes" } else { "no" },
            model
        );
    }
    let _ = writeln!(s, "\nelliptic fibrations: {}", r.fibrations.len());
    for f in &r.fibrations {
        let fibers: Vec<String> = f.reducible_fibers.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(
            s,
            "  {:<20} section: {:<3}  reducible fibers: {}",
            fmt_class(&f.fiber_class),
            if f.has_section { "yes" } else { "no" },
            if fibers.is_empty() { "none".into() } else { fibers.join(", ") }
        );
    }
    if let Some(cox) = &r.cox {
        let _ = writeln!(
            s,
            "\nCox ring generator degrees: {} necessary, {} starred (of {} candidates)",
            cox.necessary_degrees.len(),
            cox.starred_degrees.len(),
            cox.candidates.len()
        );
        for c in cox.candidates.iter().filter(|c| c.status != CoxStatus::Eliminated) {
            let mark = if c.status == CoxStatus::Starred { "*" } else { " " };
            let bnef = r.bnef.iter().position(|b| *b == c.degree).map(|i| format!("BNef[{}]", i + 1)).unwrap_or_default();
            let why = c.trail.last().map(|t| t.test.as_str()).unwrap_or("");
            let _ = writeln!(s, "  {mark} {:<20} {:<10} {}", fmt_class(&c.degree), bnef, why);
        }
    }
    s
}

/// Result of one regression check on one family.
#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub family: String,
    pub check: u8,
    pub name: &'static str,
    pub passed: bool,
    pub diffs: Vec<String>,
}

pub const CHECK_NAMES: [&str; 5] = ["tables", "vinberg", "cones", "fibrations", "cox"];

fn sorted(mut v: Vec<LatticeClass>) -> Vec<LatticeClass> {
    v.sort();
    v
}

fn set_diff(label: &str, got: &[LatticeClass], want: &[LatticeClass]) -> Vec<String> {
    let mut d = Vec::new();
    for x in want.iter().filter(|x| !got.contains(x)) {
        d.push(format!("{label}: missing {}", fmt_class(x)));
    }
    for x in got.iter().filter(|x| !want.contains(x)) {
        d.push(format!("{label}: unexpected {}", fmt_class(x)));
    }
    d
}

fn check_vinberg(f: &FamilyRecord) -> Result<Vec<String>> {
    let lat = f.lattice();
    let cfg = run_vinberg(&lat, &default_base(&lat), DEFAULT_MAX_LEVEL)?;
    let reference = CurveConfiguration::new(&lat, f.curves.clone());
    Ok(match config_isomorphic(&cfg, &reference) {
        Some(_) => vec![],
        None => vec![format!(
            "{}: computed configuration ({} curves) is not isomorphic to the reference curves ({} curves)",
            f.name,
            cfg.curves.len(),
            f.curves.len()
        )],
    })
}

fn check_cones(f: &FamilyRecord) -> Result<Vec<String>> {
    let lat = f.lattice();
    let eff = ConeData::from_generators(&lat, &f.curves)?;
    let nef = dual_cone(&eff)?;
    let mut d = set_diff(&format!("{} nef rays", f.name), &nef.rays, &sorted(f.nef_rays.clone()));
    d.extend(set_diff(&format!("{} BEff", f.name), &hilbert_basis(&eff)?.elements, &f.beff()));
    d.extend(set_diff(&format!("{} BNef ({})", f.name, f.bnef_origin), &hilbert_basis(&nef)?.elements, &f.bnef));
    Ok(d)
}

fn check_fibrations(f: &FamilyRecord, ctx: &K3Context) -> Result<Vec<String>> {
    let fibs = ctx.fibration_classes()?;
    let want: Vec<LatticeClass> = f.fibrations.bnef_indices.iter().map(|&i| f.bnef[i - 1].clone()).collect();
    let got: Vec<LatticeClass> = fibs.iter().map(|x| x.fiber_class.clone()).collect();
    let mut d = set_diff(&format!("{} fibrations", f.name), &got, &sorted(want));
    for x in &fibs {
        if x.has_section != f.fibrations.has_section {
            d.push(format!("{} fibration {}: section {}, reference says {}", f.name, fmt_class(&x.fiber_class), x.has_section, f.fibrations.has_section));
        }
        let types: Vec<String> = x.reducible_fibers.iter().map(|t| t.to_string()).collect();
        if types != f.fibrations.reducible_fibers {
            d.push(format!("{} fibration {}: fibers {:?}, reference says {:?}", f.name, fmt_class(&x.fiber_class), types, f.fibrations.reducible_fibers));
        }
    }
    Ok(d)
}

/// Containment of the computed generator degrees in the published row.
pub fn cox_diffs(f: &FamilyRecord, ctx: &K3Context, r: &CoxDegreeReport) -> Vec<String> {
    let status = |c: &LatticeClass| r.candidates.iter().find(|x| &x.degree == c).map(|x| x.status);
    let mut d = Vec::new();
    if f.name == "V14" {
        for c in &reference_tables().v14_cox_degrees {
            match status(c) {
                Some(CoxStatus::Necessary) | Some(CoxStatus::Starred) => {}
                s => d.push(format!("V14 reference degree {} has status {:?}", fmt_class(c), s)),
            }
        }
        return d;
    }
    let table = f.cox_degrees();
    for (c, starred) in &table {
        match (status(c), starred) {
            (None, _) => d.push(format!("{} reference degree {} is not a candidate", f.name, fmt_class(c))),
            (Some(CoxStatus::Eliminated), _) => d.push(format!("{} reference degree {} was eliminated", f.name, fmt_class(c))),
            (Some(CoxStatus::Starred), false) => d.push(format!("{} reference degree {} is unstarred but came out starred", f.name, fmt_class(c))),
            _ => {}
        }
    }
    let beff = &ctx.beff.elements;
    for x in r.candidates.iter().filter(|x| x.status != CoxStatus::Eliminated) {
        if table.iter().any(|(c, _)| *c == x.degree) || beff.contains(&x.degree) {
            continue;
        }
        let residual = f.genericity_removed.iter().any(|g| g.class == x.degree);
        if !(residual && x.status == CoxStatus::Starred) {
            d.push(format!("{} degree {} is {:?} but not in the reference list", f.name, fmt_class(&x.degree), x.status));
        }
    }
    for g in &f.genericity_removed {
        if status(&g.class) != Some(CoxStatus::Starred) {
            d.push(format!("{} residual degree {} has status {:?}, expected starred", f.name, fmt_class(&g.class), status(&g.class)));
        }
    }
    d
}

fn check_cox(f: &FamilyRecord, ctx: &K3Context) -> Result<Vec<String>> {
    let r = run_pipeline(ctx, &f.name, Battery::for_lattice(&f.name))?;
    Ok(cox_diffs(f, ctx, &r))
}

/// Runs the selected checks (1–5) on the selected families.
pub fn verify(families: &[&FamilyRecord], checks: &[u8]) -> Vec<CheckOutcome> {
    let per_family: Vec<Vec<CheckOutcome>> = families
        .par_iter()
        .map(|f| {
            let ctx = K3Context::from_curves(&f.lattice(), &f.curves);
            checks
                .iter()
                .map(|&k| {
                    let res: Result<Vec<String>> = match (k, &ctx) {
                        (1, _) => Ok(f.self_check()),
                        (2, _) => check_vinberg(f),
                        (3, _) => check_cones(f),
                        (4, Ok(c)) => check_fibrations(f, c),
                        (5, Ok(c)) => check_cox(f, c),
                        (4 | 5, Err(e)) => Err(e.clone()),
                        _ => Err(Error::Input(format!("unknown check {k}"))),
                    };
                    let diffs = res.unwrap_or_else(|e| vec![format!("{}: {e}", f.name)]);
                    CheckOutcome {
                        family: f.name.clone(),
                        check: k,
                        name: CHECK_NAMES.get((k as usize).wrapping_sub(1)).copied().unwrap_or("unknown"),
                        passed: diffs.is_empty(),
                        diffs,
                    }
                })
                .collect()
        })
        .collect();
    per_family.into_iter().flatten().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogRow {
    pub name: String,
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub det: i128,
    pub curves: usize,
    pub bnef: usize,
    pub fibrations: usize,
}

pub fn catalog_rows() -> Result<Vec<CatalogRow>> {
    CATALOG_NAMES
        .par_iter()
        .map(|name| {
            let lat = catalog(name)?;
            let cfg = run_vinberg(&lat, &default_base(&lat), DEFAULT_MAX_LEVEL)?;
            let ctx = K3Context::from_curves(&lat, &cfg.curves)?;
            Ok(CatalogRow {
                name: name.to_string(),
                rank: lat.rank(),
                det: lat.det(),
                gram: lat.gram,
                curves: cfg.curves.len(),
                bnef: ctx.bnef.elements.len(),
                fibrations: ctx.fibration_list().len(),
            })
        })
        .collect()
}

pub fn render_catalog(rows: &[CatalogRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<5} {:>4} {:>6} {:>7} {:>5} {:>11}  gram", "name", "rank", "det", "curves", "BNef", "fibrations");
    for r in rows {
        let g: Vec<String> = r.gram.iter().map(|row| fmt_class(row).replace('(', "[").replace(')', "]")).collect();
        let _ = writeln!(s, "{:<5} {:>4} {:>6} {:>7} {:>5} {:>11}  [{}]", r.name, r.rank, r.det, r.curves, r.bnef, r.fibrations, g.join(","));
    }
    s
}

/// Process exit code for an error: 2 bad input, 3 non-termination, 1 other.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonTermination { .. } => 3,
        Error::Input(_) | Error::Lookup(_) | Error::Precondition(_) | Error::Unsupported(_) | Error::Overflow(_) => 2,
        Error::Classification(_) | Error::Internal(_) => 1,
    }
}

/// Parses `1,0,-2,3` into a class.
pub fn parse_class(s: &str) -> Result<LatticeClass> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Input(format!("bad class coordinate {t:?}"))))
        .collect()
}

/// Reads a Gram file `{"name": str, "gram": [[int]]}`.
pub fn parse_gram_json(text: &str) -> Result<NSLattice> {
    let raw: NSLattice = serde_json::from_str(text).map_err(|e| Error::Input(format!("gram file: {e}")))?;
    NSLattice::new(raw.name, raw.gram)
}
