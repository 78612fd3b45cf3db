//! Todd–Coxeter coset enumeration, HLT strategy: cosets are defined while
//! scanning relators from each live coset in turn, and coincidences are
//! merged immediately through a union-find forest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::presentation::{Presentation, Word};

pub const DEFAULT_MAX_COSETS: usize = 1_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Closed {
        index: usize,
    },
    /// More than `max_cosets` cosets would have been live at once.
    OverLimit {
        max_cosets: usize,
        live_at_stop: usize,
    },
}

/// A completed coset table, compacted so that cosets are `0..index` with
/// coset 0 the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    index: usize,
    ngens: usize,
    /// `action[g][c]` is the coset `c·rg`.
    action: Vec<Vec<u32>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.index
    }

    /// The image of coset `c` under generator `g`.
    pub fn act(&self, c: usize, g: usize) -> usize {
        self.action[g][c] as usize
    }

    pub fn apply_word(&self, c: usize, w: &Word) -> usize {
        w.letters().iter().fold(c, |c, &g| self.act(c, g))
    }

    /// Each generator's action on the cosets.
    pub fn permutation_image(&self) -> Vec<Perm> {
        self.action.iter().map(|col| Perm(col.clone())).collect()
    }

    /// Whether every relator fixes every coset.
    pub fn relators_hold(&self, pres: &Presentation) -> bool {
        pres.ngens == self.ngens
            && pres
                .relators
                .iter()
                .all(|w| (0..self.index).all(|c| self.apply_word(c, w) == c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub outcome: Outcome,
    pub definitions_made: u64,
    pub table: Option<CosetTable>,
}

#[derive(Serialize)]
struct EnumerationJson<'a> {
    #[serde(flatten)]
    outcome: &'a Outcome,
    definitions_made: u64,
}

impl Enumeration {
    pub fn index(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Closed { index } => Some(index),
            Outcome::OverLimit { .. } => None,
        }
    }

    pub fn permutation_image(&self) -> Result<Vec<Perm>> {
        self.table
            .as_ref()
            .map(CosetTable::permutation_image)
            .ok_or(Error::NotClosed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(EnumerationJson {
            outcome: &self.outcome,
            definitions_made: self.definitions_made,
        })
        .expect("plain data serializes")
    }
}

struct OverLimit;

struct Enumerator {
    ncols: usize,
    /// Column of each generator.
    col: Vec<usize>,
    /// Inverse of each column.
    col_inverse: Vec<usize>,
    table: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    max_live: usize,
    definitions: u64,
    queue: Vec<u32>,
}

impl Enumerator {
    fn new(pres: &Presentation, max_live: usize) -> Self {
        let involutory = pres.involutory();
        let mut col = Vec::with_capacity(pres.ngens);
        let mut col_inverse = Vec::new();
        for &inv in &involutory {
            let c = col_inverse.len();
            col.push(c);
            if inv {
                col_inverse.push(c);
            } else {
                col_inverse.push(c + 1);
                col_inverse.push(c);
            }
        }
        let ncols = col_inverse.len();
        Enumerator {
            ncols,
            col,
            col_inverse,
            table: vec![NONE; ncols],
            parent: vec![0],
            live: 1,
            max_live,
            definitions: 0,
            queue: Vec::new(),
        }
    }

    fn cols_of(&self, w: &Word) -> Vec<usize> {
        w.letters().iter().map(|&g| self.col[g]).collect()
    }

    #[inline]
    fn get(&self, c: u32, x: usize) -> u32 {
        self.table[c as usize * self.ncols + x]
    }

    #[inline]
    fn set(&mut self, c: u32, x: usize, v: u32) {
        self.table[c as usize * self.ncols + x] = v;
    }

    fn rows(&self) -> usize {
        self.parent.len()
    }

    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> std::result::Result<u32, OverLimit> {
        if self.live >= self.max_live {
            return Err(OverLimit);
        }
        let d = self.rows() as u32;
        self.parent.push(d);
        self.table.extend(std::iter::repeat_n(NONE, self.ncols));
        self.live += 1;
        self.definitions += 1;
        self.set(c, x, d);
        self.set(d, self.col_inverse[x], c);
        Ok(d)
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (keep, kill) = (a.min(b), a.max(b));
        self.parent[kill as usize] = keep;
        self.live -= 1;
        self.queue.push(kill);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let dead = self.queue[i];
            i += 1;
            for x in 0..self.ncols {
                let d = self.get(dead, x);
                if d == NONE {
                    continue;
                }
                let xi = self.col_inverse[x];
                // The back edge d·x⁻¹ = dead is dropped and re-created
                // between representatives below.
                if self.get(d, xi) == dead {
                    self.set(d, xi, NONE);
                }
                let mu = self.rep(dead);
                let nu = self.rep(d);
                let mu_x = self.get(mu, x);
                if mu_x != NONE {
                    self.merge(nu, mu_x);
                } else {
                    let nu_xi = self.get(nu, xi);
                    if nu_xi != NONE {
                        self.merge(mu, nu_xi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, xi, mu);
                    }
                }
            }
        }
        self.queue.clear();
    }

    /// Scans `w` from coset `c`, defining new cosets to complete the scan.
    fn scan_and_fill(&mut self, c: u32, w: &[usize]) -> std::result::Result<(), OverLimit> {
        let n = w.len();
        let (mut f, mut b) = (c, c);
        let (mut i, mut j) = (0usize, n);
        loop {
            while i < j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j > i && self.get(b, self.col_inverse[w[j - 1]]) != NONE {
                b = self.get(b, self.col_inverse[w[j - 1]]);
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i + 1 {
                // Deduction: f·w[i] = b.
                self.set(f, w[i], b);
                self.set(b, self.col_inverse[w[i]], f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Drops dead rows, renumbering live cosets in order. Returns the new
    /// number of the first live coset at or after `from`.
    fn compact(&mut self, from: u32) -> u32 {
        let rows = self.rows();
        let mut renum = vec![NONE; rows];
        let mut next = 0u32;
        for c in 0..rows as u32 {
            if self.is_live(c) {
                renum[c as usize] = next;
                next += 1;
            }
        }
        let mut table = Vec::with_capacity(next as usize * self.ncols);
        for c in 0..rows as u32 {
            if !self.is_live(c) {
                continue;
            }
            for x in 0..self.ncols {
                let v = self.get(c, x);
                table.push(if v == NONE { NONE } else { renum[self.rep(v) as usize] });
            }
        }
        let new_from = (from as usize..rows)
            .find(|&c| renum[c] != NONE)
            .map_or(next, |c| renum[c]);
        self.table = table;
        self.parent = (0..next).collect();
        new_from
    }

    fn run(&mut self, relators: &[Vec<usize>], subgroup: &[Vec<usize>]) -> std::result::Result<(), OverLimit> {
        for w in subgroup {
            if self.is_live(0) {
                self.scan_and_fill(0, w)?;
            }
        }
        let mut c = 0u32;
        while (c as usize) < self.rows() {
            if self.is_live(c) {
                for w in relators {
                    if !self.is_live(c) {
                        break;
                    }
                    self.scan_and_fill(c, w)?;
                }
                for x in 0..self.ncols {
                    if !self.is_live(c) {
                        break;
                    }
                    if self.get(c, x) == NONE {
                        self.define(c, x)?;
                    }
                }
            }
            c += 1;
            if self.rows() > 1024 && self.rows() > 2 * self.live {
                c = self.compact(c);
            }
        }
        Ok(())
    }

    fn finish(mut self, ngens: usize) -> CosetTable {
        self.compact(0);
        let index = self.rows();
        let action = (0..ngens)
            .map(|g| (0..index as u32).map(|c| self.get(c, self.col[g])).collect())
            .collect();
        CosetTable { index, ngens, action }
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup_gens`. With
/// no subgroup generators the index is the group order.
pub fn enumerate(pres: &Presentation, subgroup_gens: &[Word], max_cosets: usize) -> Result<Enumeration> {
    if max_cosets == 0 {
        return Err(Error::InvalidParameter("max_cosets must be at least 1".into()));
    }
    for w in pres.relators.iter().chain(subgroup_gens) {
        if let Some(&i) = w.letters().iter().find(|&&i| i >= pres.ngens) {
            return Err(Error::GeneratorOutOfRange {
                index: i,
                ngens: pres.ngens,
            });
        }
    }
    let mut e = Enumerator::new(pres, max_cosets);
    let relators: Vec<Vec<usize>> = pres.relators.iter().map(|w| e.cols_of(w)).collect();
    let subgroup: Vec<Vec<usize>> = subgroup_gens.iter().map(|w| e.cols_of(w)).collect();
    match e.run(&relators, &subgroup) {
        Ok(()) => {
            let definitions_made = e.definitions;
            let table = e.finish(pres.ngens);
            Ok(Enumeration {
                outcome: Outcome::Closed { index: table.index },
                definitions_made,
                table: Some(table),
            })
        }
        Err(OverLimit) => Ok(Enumeration {
            outcome: Outcome::OverLimit {
                max_cosets,
                live_at_stop: e.live,
            },
            definitions_made: e.definitions,
            table: None,
        }),
    }
}

/// Group order of a presentation (trivial subgroup).
pub fn group_order(pres: &Presentation, max_cosets: usize) -> Result<Enumeration> {
    enumerate(pres, &[], max_cosets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::group_order as perm_order;
    use crate::presentation::{amalgam, parse, string_coxeter, with_petrie, MapSymbol};

    #[test]
    fn symmetric_group_s3() {
        let p = parse("gens 2; r0^2, r1^2, (r0 r1)^3").unwrap();
        let e = group_order(&p, 100).unwrap();
        assert_eq!(e.index(), Some(6));
        let img = e.permutation_image().unwrap();
        assert!(img.iter().all(|g| g.order() == 2));
        assert_eq!(perm_order(&img), 6);
        assert!(e.table.as_ref().unwrap().relators_hold(&p));
    }

    #[test]
    fn non_involutory_generators() {
        // Z5 and the dihedral group of order 10 given with a rotation.
        let z5 = parse("gens 1; r0^5").unwrap();
        assert_eq!(group_order(&z5, 100).unwrap().index(), Some(5));
        let d5 = parse("gens 2; r0^5, r1^2, r1 r0 r1 r0").unwrap();
        assert_eq!(group_order(&d5, 100).unwrap().index(), Some(10));
        // Quaternion group.
        let q8 = parse("gens 2; r0^4, r0^2 r1^2, r1 r0 r1 r1 r1 r0").unwrap();
        assert_eq!(group_order(&q8, 100).unwrap().index(), Some(8));
    }

    #[test]
    fn coxeter_groups() {
        assert_eq!(
            group_order(&string_coxeter(&[3, 3]).unwrap(), 1000).unwrap().index(),
            Some(24)
        );
        assert_eq!(
            group_order(&string_coxeter(&[3, 5]).unwrap(), 1000).unwrap().index(),
            Some(120)
        );
        assert_eq!(
            group_order(&string_coxeter(&[3, 3, 3]).unwrap(), 1000).unwrap().index(),
            Some(120)
        );
        assert_eq!(
            group_order(&string_coxeter(&[4, 3, 3]).unwrap(), 1000).unwrap().index(),
            Some(384)
        );
    }

    #[test]
    fn hemi_icosahedron() {
        let p = with_petrie(string_coxeter(&[3, 5]).unwrap(), Some(5), None).unwrap();
        assert_eq!(group_order(&p, 1000).unwrap().index(), Some(60));
    }

    #[test]
    fn subgroup_index() {
        let p = amalgam(MapSymbol::new(3, 5, 5), MapSymbol::new(5, 3, 5)).unwrap();
        let facet = [Word(vec![0]), Word(vec![1]), Word(vec![2])];
        assert_eq!(enumerate(&p, &facet, 10_000).unwrap().index(), Some(11));
    }

    #[test]
    fn over_limit_is_reported() {
        let p = string_coxeter(&[3, 6]).unwrap();
        let e = group_order(&p, 500).unwrap();
        assert!(matches!(e.outcome, Outcome::OverLimit { max_cosets: 500, .. }));
        assert!(e.permutation_image().is_err());
        assert_eq!(e.to_json()["outcome"], "over_limit");
    }

    #[test]
    fn deterministic() {
        let p = amalgam(MapSymbol::new(4, 3, 3), MapSymbol::new(3, 4, 3)).unwrap();
        let a = group_order(&p, 10_000).unwrap();
        let b = group_order(&p, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.index(), Some(96));
        let json = a.to_json();
        assert_eq!(json["outcome"], "closed");
        assert_eq!(json["index"], 96);
    }

    #[test]
    fn rejects_bad_input() {
        let p = string_coxeter(&[3]).unwrap();
        assert!(enumerate(&p, &[Word(vec![5])], 10).is_err());
        assert!(enumerate(&p, &[], 0).is_err());
    }
}
