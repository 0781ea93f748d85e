//! Published tables for the fourteen families, embedded as data, and a
//! purely data-level self-consistency check.

use crate::lattice::{catalog, LatticeClass, NSLattice};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

const RAW: &str = include_str!("../data/reference_tables.json");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ReferenceTables {
    pub schema: u32,
    pub families: Vec<FamilyRecord>,
    pub v14_cox_degrees: Vec<LatticeClass>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FamilyRecord {
    pub name: String,
    pub curves: Vec<LatticeClass>,
    pub beff_extra: Vec<LatticeClass>,
    pub nef_rays: Vec<LatticeClass>,
    pub bnef: Vec<LatticeClass>,
    pub bnef_origin: String,
    pub intmat: Vec<Vec<i64>>,
    pub polarization: Polarization,
    #[serde(default)]
    pub errata: Vec<Erratum>,
    #[serde(default)]
    pub cox: Vec<CoxEntry>,
    pub fibrations: FibrationFacts,
    #[serde(default)]
    pub genericity_removed: Vec<ResidualDegree>,
}

/// Elliptic fibrations as stated in the family descriptions.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FibrationFacts {
    pub bnef_indices: Vec<usize>,
    pub has_section: bool,
    /// reducible fibers of each fibration (the same for all of them)
    pub reducible_fibers: Vec<String>,
    pub source: String,
}

/// A degree that the lattice-level battery cannot remove but the published
/// generator list omits because of a geometric genericity argument.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ResidualDegree {
    pub bnef_index: usize,
    pub class: LatticeClass,
    pub reason: String,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Polarization {
    pub class: LatticeClass,
    pub square: i64,
    pub degrees: Vec<DegreeGroup>,
}

/// Curves (1-based indices into the family's curve list) of equal `H`-degree.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct DegreeGroup {
    pub curves: Vec<usize>,
    pub value: i64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Erratum {
    pub table: String,
    pub entry: String,
    pub printed: String,
    pub used: String,
    pub reason: String,
}

/// One entry of a row of the generator-degree table.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoxEntry {
    /// every (−2)-curve class
    Curves,
    /// every element of the Hilbert basis of the effective cone
    Beff,
    /// `BNef[index]`, 1-based
    Bnef { index: usize, starred: bool },
    /// `BNef[i] + BNef[j]`
    BnefSum { indices: Vec<usize> },
}

pub fn reference_tables() -> &'static ReferenceTables {
    static CELL: OnceLock<ReferenceTables> = OnceLock::new();
    CELL.get_or_init(|| serde_json::from_str(RAW).expect("embedded tables parse"))
}

impl ReferenceTables {
    pub fn family(&self, name: &str) -> Option<&FamilyRecord> {
        self.families.iter().find(|f| f.name.eq_ignore_ascii_case(name))
    }
}

impl FamilyRecord {
    pub fn lattice(&self) -> NSLattice {
        catalog(&self.name).expect("catalog family")
    }

    pub fn beff(&self) -> Vec<LatticeClass> {
        let mut v: Vec<LatticeClass> = self.curves.iter().chain(&self.beff_extra).cloned().collect();
        v.sort();
        v
    }

    /// The table's generator degrees with their star flags, deduplicated
    /// and sorted. Unstarred wins if a class is listed twice.
    pub fn cox_degrees(&self) -> Vec<(LatticeClass, bool)> {
        let mut out: Vec<(LatticeClass, bool)> = Vec::new();
        let mut push = |c: LatticeClass, s: bool| {
            if let Some(e) = out.iter_mut().find(|(x, _)| *x == c) {
                e.1 &= s;
            } else {
                out.push((c, s));
            }
        };
        for e in &self.cox {
            match e {
                CoxEntry::Curves => self.curves.iter().for_each(|c| push(c.clone(), false)),
                CoxEntry::Beff => self.beff().into_iter().for_each(|c| push(c, false)),
                CoxEntry::Bnef { index, starred } => push(self.bnef[index - 1].clone(), *starred),
                CoxEntry::BnefSum { indices } => {
                    let mut s = vec![0; self.bnef[0].len()];
                    for i in indices {
                        s = crate::arith::add(&s, &self.bnef[i - 1]);
                    }
                    push(s, false)
                }
            }
        }
        out.sort();
        out
    }

    /// Localised descriptions of every inconsistency in this record.
    pub fn self_check(&self) -> Vec<String> {
        let lat = self.lattice();
        let mut diffs = Vec::new();
        let n = self.curves.len();
        for (i, c) in self.curves.iter().enumerate() {
            if lat.square(c) != -2 {
                diffs.push(format!("{} curve E[{}] = {:?} has square {}", self.name, i + 1, c, lat.square(c)));
            }
        }
        if self.intmat.len() != n {
            diffs.push(format!("{} intersection matrix has {} rows, expected {}", self.name, self.intmat.len(), n));
        } else {
            for i in 0..n {
                for j in 0..n {
                    let p = lat.pair(&self.curves[i], &self.curves[j]);
                    if self.intmat[i].get(j) != Some(&p) {
                        diffs.push(format!(
                            "{} intersection matrix[{}][{}] = {:?}, recomputed {}",
                            self.name,
                            i + 1,
                            j + 1,
                            self.intmat[i].get(j),
                            p
                        ));
                    }
                }
            }
        }
        for (k, b) in self.bnef.iter().enumerate() {
            for (i, c) in self.curves.iter().enumerate() {
                if lat.pair(b, c) < 0 {
                    diffs.push(format!("{} {} BNef[{}]·E[{}] = {} < 0", self.name, self.bnef_origin, k + 1, i + 1, lat.pair(b, c)));
                }
            }
        }
        let h = &self.polarization;
        if lat.square(&h.class) != h.square {
            diffs.push(format!("{} polarization H² = {}, stated {}", self.name, lat.square(&h.class), h.square));
        }
        for g in &h.degrees {
            for &i in &g.curves {
                match self.curves.get(i.wrapping_sub(1)) {
                    Some(c) if lat.pair(&h.class, c) == g.value => {}
                    Some(c) => diffs.push(format!(
                        "{} polarization H·E[{}] = {}, stated {}",
                        self.name,
                        i,
                        lat.pair(&h.class, c),
                        g.value
                    )),
                    None => diffs.push(format!("{} polarization refers to missing curve {}", self.name, i)),
                }
            }
        }
        diffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_consistent() {
        let t = reference_tables();
        assert_eq!(t.families.len(), 14);
        for f in &t.families {
            assert!(f.self_check().is_empty(), "{:?}", f.self_check());
        }
        assert_eq!(t.v14_cox_degrees.len(), 71);
    }

    #[test]
    fn corrupted_entry_is_localised() {
        let mut f = reference_tables().family("V10").unwrap().clone();
        f.intmat[0][1] = 7;
        let d = f.self_check();
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("intersection matrix[1][2]"), "{d:?}");
    }
}
