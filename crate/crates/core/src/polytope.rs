//! The abstract regular polytope of a string C-group: faces are right cosets
//! of the maximal parabolic subgroups, incident when they intersect.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::equivalence;
use crate::error::{Error, Result};
use crate::group::{ElemId, GroupCtx, SubgroupSet};
use crate::perm::recognize_by_profile;
use crate::search::{is_string_cgroup, schlafli_type, GenTuple};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FVector(pub Vec<usize>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub index: usize,
    /// Some element of the coset.
    pub representative: ElemId,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    rank: usize,
    group_order: usize,
    faces: Vec<Vec<Face>>,
    /// `coset[i][k]` is the index of the `i`-face containing the k-th group
    /// element (in sorted id order).
    coset: Vec<Vec<u32>>,
    /// `incident[i][j][a]` lists the `j`-faces incident to `i`-face `a`, for
    /// every ordered pair of distinct ranks.
    incident: Vec<Vec<Vec<BTreeSet<u32>>>>,
}

/// Builds the face lattice. The tuple must be a string C-group; it need
/// only generate a subgroup of `ctx`, and cosets are taken inside that
/// subgroup.
pub fn build_lattice(ctx: &GroupCtx, tuple: &GenTuple) -> Result<FaceLattice> {
    let gens = tuple.gens();
    let rank = gens.len();
    if rank < 2 {
        return Err(Error::InvalidTuple("a polytope needs rank at least 2".into()));
    }
    if !is_string_cgroup(ctx, gens) {
        return Err(Error::InvalidTuple(format!("{gens:?} is not a string C-group")));
    }
    let group = ctx.closure(gens, None).subgroup().expect("uncapped closure");
    let position: HashMap<ElemId, usize> = group.ids().iter().enumerate().map(|(k, &g)| (g, k)).collect();

    let mut faces = Vec::with_capacity(rank);
    let mut coset = Vec::with_capacity(rank);
    for i in 0..rank {
        let others: Vec<ElemId> = (0..rank).filter(|&j| j != i).map(|j| gens[j]).collect();
        let parabolic: SubgroupSet = ctx.closure(&others, None).subgroup().expect("uncapped closure");
        let mut of = vec![u32::MAX; group.len()];
        let mut list = Vec::new();
        for (k, &g) in group.ids().iter().enumerate() {
            if of[k] != u32::MAX {
                continue;
            }
            let index = list.len();
            for &h in parabolic.ids() {
                of[position[&ctx.mul(h, g)]] = index as u32;
            }
            list.push(Face {
                index,
                representative: g,
            });
        }
        if list.len() * parabolic.len() != group.len() {
            return Err(Error::Structure(format!("rank-{i} cosets do not partition the group")));
        }
        faces.push(list);
        coset.push(of);
    }

    // Two cosets meet exactly when some element lies in both.
    let mut incident = vec![Vec::new(); rank];
    for i in 0..rank {
        for j in 0..rank {
            let mut adj = vec![BTreeSet::new(); if i == j { 0 } else { faces[i].len() }];
            if i != j {
                for k in 0..group.len() {
                    adj[coset[i][k] as usize].insert(coset[j][k]);
                }
            }
            incident[i].push(adj);
        }
    }

    Ok(FaceLattice {
        rank,
        group_order: group.len(),
        faces,
        coset,
        incident,
    })
}

impl FaceLattice {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn faces(&self, i: usize) -> &[Face] {
        &self.faces[i]
    }

    pub fn f_vector(&self) -> FVector {
        FVector(self.faces.iter().map(|f| f.len()).collect())
    }

    /// The `j`-faces incident to `i`-face `a`.
    pub fn incident(&self, i: usize, a: usize, j: usize) -> &BTreeSet<u32> {
        &self.incident[i][j][a]
    }

    pub fn is_incident(&self, i: usize, a: usize, j: usize, b: usize) -> bool {
        i == j && a == b || i != j && self.incident[i][j][a].contains(&(b as u32))
    }

    /// Incidence pairs between ranks `i` and `i+1`.
    pub fn incidence_pairs(&self, i: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, adj) in self.incident[i][i + 1].iter().enumerate() {
            out.extend(adj.iter().map(|&b| (a, b as usize)));
        }
        out
    }

    /// The flag through the base flag's image under the k-th group element.
    fn flag_of(&self, k: usize) -> Vec<u32> {
        (0..self.rank).map(|i| self.coset[i][k]).collect()
    }

    /// Extensions of a partial flag at rank `i`: the `i`-faces incident to
    /// every other entry.
    fn completions(&self, flag: &[u32], i: usize) -> Vec<u32> {
        let j0 = if i == 0 { 1 } else { 0 };
        self.incident[j0][i][flag[j0] as usize]
            .iter()
            .copied()
            .filter(|&c| {
                (0..self.rank)
                    .filter(|&j| j != i && j != j0)
                    .all(|j| self.incident[i][j][c as usize].contains(&flag[j]))
            })
            .collect()
    }

    /// Number of maximal chains, by depth-first enumeration.
    pub fn flag_count(&self) -> usize {
        fn go(l: &FaceLattice, chain: &mut Vec<u32>) -> usize {
            let i = chain.len();
            if i == l.rank {
                return 1;
            }
            let candidates: Vec<u32> = if i == 0 {
                (0..l.faces[0].len() as u32).collect()
            } else {
                l.incident[i - 1][i][chain[i - 1] as usize]
                    .iter()
                    .copied()
                    .filter(|&c| (0..i - 1).all(|j| l.incident[i][j][c as usize].contains(&chain[j])))
                    .collect()
            };
            let mut n = 0;
            for c in candidates {
                chain.push(c);
                n += go(l, chain);
                chain.pop();
            }
            n
        }
        go(self, &mut Vec::with_capacity(self.rank))
    }

    fn diamond_at(&self, flag: &[u32]) -> bool {
        (0..self.rank).all(|i| self.completions(flag, i).len() == 2)
    }

    /// Diamond condition on every flag.
    pub fn diamond_exhaustive(&self) -> bool {
        (0..self.group_order).all(|k| self.diamond_at(&self.flag_of(k)))
    }

    /// Diamond condition on `samples` random flags.
    pub fn diamond_sampled(&self, samples: usize, seed: u64) -> bool {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..samples).all(|_| self.diamond_at(&self.flag_of(rng.random_range(0..self.group_order))))
    }

    pub fn edge_graph(&self) -> Result<EdgeGraph> {
        if self.rank < 2 {
            return Err(Error::Structure("edge graph needs rank at least 2".into()));
        }
        let mut edges = Vec::with_capacity(self.faces[1].len());
        for (e, ends) in self.incident[1][0].iter().enumerate() {
            let ends: Vec<u32> = ends.iter().copied().collect();
            match ends[..] {
                [a, b] => edges.push((a as usize, b as usize)),
                _ => {
                    return Err(Error::Structure(format!(
                        "edge {e} has {} incident vertices",
                        ends.len()
                    )))
                }
            }
        }
        Ok(EdgeGraph {
            vertices: self.faces[0].len(),
            edges,
        })
    }

    pub fn export(&self) -> LatticeExport {
        LatticeExport {
            rank: self.rank,
            group_order: self.group_order,
            f_vector: self.f_vector().0,
            incidences: (0..self.rank - 1)
                .map(|i| RankIncidence {
                    ranks: [i, i + 1],
                    pairs: self.incidence_pairs(i),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankIncidence {
    pub ranks: [usize; 2],
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeExport {
    pub rank: usize,
    pub group_order: usize,
    pub f_vector: Vec<usize>,
    pub incidences: Vec<RankIncidence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl EdgeGraph {
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn is_complete(&self) -> bool {
        let pairs: BTreeSet<(usize, usize)> = self
            .edges
            .iter()
            .filter(|(a, b)| a != b)
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.len() == self.vertices * (self.vertices - 1) / 2
    }
}

/// Face counts `|⟨tuple⟩| / |G_i|` without building the lattice.
pub fn f_vector_of(ctx: &GroupCtx, tuple: &GenTuple) -> FVector {
    let g = tuple.gens();
    let whole = ctx.subgroup_order(g);
    FVector(
        (0..g.len())
            .map(|i| {
                let parabolic: Vec<ElemId> = g.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
                whole / ctx.subgroup_order(&parabolic)
            })
            .collect(),
    )
}

/// A regular map `{m,n}_k` with the order of its group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapLabel {
    pub m: u32,
    pub n: u32,
    pub k: u32,
    pub group_order: usize,
    /// "A5" or "S4" when the group is recognized as one of these.
    pub group_name: Option<String>,
}

impl fmt::Display for MapLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}_{}", self.m, self.n, self.k)
    }
}

fn map_label(ctx: &GroupCtx, gens: &[ElemId]) -> MapLabel {
    let ty = schlafli_type(ctx, gens);
    let sub = ctx.closure(gens, None).subgroup().expect("uncapped closure");
    MapLabel {
        m: ty.0[0],
        n: ty.0[1],
        k: ctx.elem_order(ctx.mul_all(gens)),
        group_order: sub.len(),
        group_name: recognize_by_profile(&ctx.order_profile(&sub)).map(str::to_string),
    }
}

/// Labels of the facet `⟨ρ0,ρ1,ρ2⟩` and vertex-figure `⟨ρ1,ρ2,ρ3⟩`.
pub fn identify_facet_and_vertex_figure(ctx: &GroupCtx, tuple: &GenTuple) -> Result<(MapLabel, MapLabel)> {
    let g = tuple.gens();
    if g.len() != 4 {
        return Err(Error::InvalidTuple(format!("expected rank 4, got {}", g.len())));
    }
    Ok((map_label(ctx, &g[0..3]), map_label(ctx, &g[1..4])))
}

/// Orders of `ρ0ρ1ρ2` and `ρ1ρ2ρ3`.
pub fn petrie_orders(ctx: &GroupCtx, tuple: &GenTuple) -> Result<(u32, u32)> {
    match crate::search::petrie_orders(ctx, tuple.gens())[..] {
        [a, b] => Ok((a, b)),
        _ => Err(Error::InvalidTuple(format!("expected rank 4, got {}", tuple.rank()))),
    }
}

pub fn is_self_dual(ctx: &GroupCtx, tuple: &GenTuple) -> Result<bool> {
    equivalence::is_self_dual(ctx, tuple)
}
