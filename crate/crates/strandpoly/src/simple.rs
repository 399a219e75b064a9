//! Abstract graphs with flags (half-edges) and their Tutte polynomials.
//!
//! A flag is a dangling half-edge attached to a vertex. Cutting an edge
//! replaces it by two flags at its former ends; the flag-extended Tutte
//! polynomial 𝒯(x,y,t) tracks those flags through a `t` exponent and
//! reduces to the classic Tutte polynomial at `t = 1`.

use crate::poly::{Polynomial, Var};
use crate::util::{subsets, UnionFind};
use crate::{Error, Result};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

/// Classification of an edge for deletion/contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    /// Deleting it increases the component count.
    Bridge,
    /// Both ends at the same vertex.
    SelfLoop,
    /// Neither a bridge nor a self-loop.
    Regular,
}

/// An abstract graph with flags: vertices, edges (self-loops allowed) and
/// flags, all carrying stable integer ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimpleFlagGraph {
    vertices: BTreeSet<u32>,
    /// Edge id → end vertices, normalized so `.0 <= .1`; equal ends mean a
    /// self-loop.
    edges: BTreeMap<u32, (u32, u32)>,
    /// Flag id → attachment vertex.
    flags: BTreeMap<u32, u32>,
}

impl SimpleFlagGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: u32) {
        self.vertices.insert(v);
    }

    /// Insert an edge; both ends must already exist. Equal ends (or the
    /// one-ended form in input files) make a self-loop.
    pub fn add_edge(&mut self, e: u32, u: u32, v: u32) -> Result<()> {
        if !self.vertices.contains(&u) || !self.vertices.contains(&v) {
            return Err(Error::Invalid(format!(
                "edge {e} references missing vertex ({u} or {v})"
            )));
        }
        if self.edges.contains_key(&e) {
            return Err(Error::Invalid(format!("duplicate edge id {e}")));
        }
        self.edges.insert(e, (u.min(v), u.max(v)));
        Ok(())
    }

    pub fn add_flag(&mut self, f: u32, v: u32) -> Result<()> {
        if !self.vertices.contains(&v) {
            return Err(Error::Invalid(format!("flag {f} references missing vertex {v}")));
        }
        if self.flags.contains_key(&f) {
            return Err(Error::Invalid(format!("duplicate flag id {f}")));
        }
        self.flags.insert(f, v);
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn flag_count(&self) -> usize {
        self.flags.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edge_ids(&self) -> Vec<u32> {
        self.edges.keys().copied().collect()
    }

    pub fn edge_ends(&self, e: u32) -> Result<(u32, u32)> {
        self.edges
            .get(&e)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("unknown edge id {e}")))
    }

    pub fn flags(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.flags.iter().map(|(f, v)| (*f, *v))
    }

    fn fresh_flag_id(&self) -> u32 {
        self.flags.keys().next_back().map_or(0, |m| m + 1)
    }

    /// Component count of the spanning subgraph using only `subset` edges
    /// (all vertices kept). `None` means all edges.
    fn components_with(&self, subset: Option<&[u32]>) -> usize {
        let vs: Vec<u32> = self.vertices.iter().copied().collect();
        let index: BTreeMap<u32, usize> = vs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut uf = UnionFind::new(vs.len());
        let join = |uf: &mut UnionFind, e: &u32| {
            let (u, v) = self.edges[e];
            uf.union(index[&u], index[&v]);
        };
        match subset {
            Some(es) => es.iter().for_each(|e| join(&mut uf, e)),
            None => self.edges.keys().for_each(|e| join(&mut uf, e)),
        }
        uf.count()
    }

    /// Number of connected components (isolated vertices count).
    pub fn components(&self) -> usize {
        self.components_with(None)
    }

    /// `(rank, nullity, components)`: `r = |V|−k`, `n = |E|+k−|V|`. Flags
    /// affect none of the three.
    pub fn rank_nullity_components(&self) -> (usize, usize, usize) {
        let k = self.components();
        let r = self.vertices.len() - k;
        let n = self.edges.len() + k - self.vertices.len();
        (r, n, k)
    }

    /// Remove an edge, leaving everything else in place.
    pub fn delete_edge(&self, e: u32) -> Result<SimpleFlagGraph> {
        let mut g = self.clone();
        g.edges
            .remove(&e)
            .ok_or_else(|| Error::Invalid(format!("unknown edge id {e}")))?;
        Ok(g)
    }

    /// Cut an edge: remove it and attach one fresh flag at each former end
    /// (two at the same vertex for a self-loop).
    pub fn cut_edge(&self, e: u32) -> Result<SimpleFlagGraph> {
        let (u, v) = self.edge_ends(e)?;
        let mut g = self.delete_edge(e)?;
        let f = g.fresh_flag_id();
        g.flags.insert(f, u);
        g.flags.insert(f + 1, v);
        Ok(g)
    }

    /// Contract an edge: identify its two ends into one vertex carrying all
    /// their edges and flags (the smaller vertex id survives). Contracting a
    /// self-loop is by definition the same as deleting it.
    pub fn contract_edge(&self, e: u32) -> Result<SimpleFlagGraph> {
        let (u, v) = self.edge_ends(e)?;
        let mut g = self.delete_edge(e)?;
        if u == v {
            return Ok(g);
        }
        let (keep, gone) = (u.min(v), u.max(v));
        g.vertices.remove(&gone);
        for ends in g.edges.values_mut() {
            let (mut a, mut b) = *ends;
            if a == gone {
                a = keep;
            }
            if b == gone {
                b = keep;
            }
            *ends = (a.min(b), a.max(b));
        }
        for fv in g.flags.values_mut() {
            if *fv == gone {
                *fv = keep;
            }
        }
        Ok(g)
    }

    /// Bridge / self-loop / regular.
    pub fn classify_edge(&self, e: u32) -> Result<EdgeClass> {
        let (u, v) = self.edge_ends(e)?;
        if u == v {
            return Ok(EdgeClass::SelfLoop);
        }
        let k_before = self.components();
        let k_after = self.delete_edge(e)?.components();
        Ok(if k_after > k_before {
            EdgeClass::Bridge
        } else {
            EdgeClass::Regular
        })
    }

    /// Componentwise juxtaposition. Id spaces must be disjoint.
    pub fn disjoint_union(&self, other: &SimpleFlagGraph) -> Result<SimpleFlagGraph> {
        let mut g = self.clone();
        for v in &other.vertices {
            if !g.vertices.insert(*v) {
                return Err(Error::Invalid(format!("vertex id {v} present in both graphs")));
            }
        }
        for (e, ends) in &other.edges {
            if g.edges.insert(*e, *ends).is_some() {
                return Err(Error::Invalid(format!("edge id {e} present in both graphs")));
            }
        }
        for (f, v) in &other.flags {
            if g.flags.insert(*f, *v).is_some() {
                return Err(Error::Invalid(format!("flag id {f} present in both graphs")));
            }
        }
        Ok(g)
    }

    /// Dot product: disjoint union with `v1` and `v2` identified into one
    /// vertex carrying all their edges and flags.
    pub fn dot_product(&self, v1: u32, other: &SimpleFlagGraph, v2: u32) -> Result<SimpleFlagGraph> {
        if !self.vertices.contains(&v1) {
            return Err(Error::Invalid(format!("unknown vertex id {v1}")));
        }
        if !other.vertices.contains(&v2) {
            return Err(Error::Invalid(format!("unknown vertex id {v2}")));
        }
        let mut g = self.disjoint_union(other)?;
        g.vertices.remove(&v2);
        for ends in g.edges.values_mut() {
            let (mut a, mut b) = *ends;
            if a == v2 {
                a = v1;
            }
            if b == v2 {
                b = v1;
            }
            *ends = (a.min(b), a.max(b));
        }
        for fv in g.flags.values_mut() {
            if *fv == v2 {
                *fv = v1;
            }
        }
        Ok(g)
    }

    /// Shift every id by the given offsets (used to make id spaces disjoint
    /// before a union).
    pub fn shift_ids(&self, dv: u32, de: u32, df: u32) -> SimpleFlagGraph {
        SimpleFlagGraph {
            vertices: self.vertices.iter().map(|v| v + dv).collect(),
            edges: self
                .edges
                .iter()
                .map(|(e, (u, v))| (e + de, (u + dv, v + dv)))
                .collect(),
            flags: self.flags.iter().map(|(f, v)| (f + df, v + dv)).collect(),
        }
    }

    pub fn max_ids(&self) -> (u32, u32, u32) {
        (
            self.vertices.iter().next_back().map_or(0, |m| m + 1),
            self.edges.keys().next_back().map_or(0, |m| m + 1),
            self.flags.keys().next_back().map_or(0, |m| m + 1),
        )
    }

    /// Deterministic structural key under vertex relabeling, for memoization.
    ///
    /// Vertex classes from iterated neighborhood refinement, ties broken by
    /// original id; the relabeled edge/flag lists are then serialized. Equal
    /// keys always denote isomorphic graphs (the converse can fail across
    /// different labelings, which only costs cache hits, never correctness).
    pub fn canonical_key(&self) -> String {
        let vs: Vec<u32> = self.vertices.iter().copied().collect();
        let index: BTreeMap<u32, usize> = vs.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut color: Vec<u64> = vs
            .iter()
            .map(|v| {
                let deg = self.edges.values().filter(|(a, b)| a == v || b == v).count();
                let loops = self.edges.values().filter(|(a, b)| a == v && b == v).count();
                let nflags = self.flags.values().filter(|fv| *fv == v).count();
                let mut h = DefaultHasher::new();
                (deg, loops, nflags).hash(&mut h);
                h.finish()
            })
            .collect();
        for _ in 0..vs.len() {
            let mut next = Vec::with_capacity(vs.len());
            for (i, v) in vs.iter().enumerate() {
                let mut nbr: Vec<u64> = self
                    .edges
                    .values()
                    .filter_map(|(a, b)| {
                        if a == v && b == v {
                            None // loops already in the initial color
                        } else if a == v {
                            Some(color[index[b]])
                        } else if b == v {
                            Some(color[index[a]])
                        } else {
                            None
                        }
                    })
                    .collect();
                nbr.sort_unstable();
                let mut h = DefaultHasher::new();
                (color[i], nbr).hash(&mut h);
                next.push(h.finish());
            }
            if next == color {
                break;
            }
            color = next;
        }
        let mut order: Vec<usize> = (0..vs.len()).collect();
        order.sort_by_key(|&i| (color[i], vs[i]));
        let pos: BTreeMap<u32, usize> = order.iter().enumerate().map(|(p, &i)| (vs[i], p)).collect();
        let mut edge_list: Vec<(usize, usize)> = self
            .edges
            .values()
            .map(|(a, b)| {
                let (pa, pb) = (pos[a], pos[b]);
                (pa.min(pb), pa.max(pb))
            })
            .collect();
        edge_list.sort_unstable();
        let mut flag_counts: Vec<usize> = vec![0; vs.len()];
        for fv in self.flags.values() {
            flag_counts[pos[fv]] += 1;
        }
        format!("{}|{:?}|{:?}", vs.len(), edge_list, flag_counts)
    }
}

/// Flag-extended Tutte polynomial 𝒯 by its spanning-subgraph state sum, in
/// the shifted basis: Σ over edge subsets A of X^{r(G)−r(A)} Y^{n(A)} t^{f(A)}
/// with f(A) = |f⁰| + 2(|E|−|A|) counting the flags created by cutting the
/// absent edges.
pub fn tutte_flags_statesum(g: &SimpleFlagGraph) -> Polynomial {
    let ids = g.edge_ids();
    let nv = g.vertex_count();
    let r_g = nv - g.components();
    let f0 = g.flag_count();
    let mut acc = Polynomial::zero();
    for a in subsets(&ids) {
        let k_a = g.components_with(Some(&a));
        let r_a = nv - k_a;
        let n_a = a.len() + k_a - nv;
        let f_a = f0 + 2 * (ids.len() - a.len());
        acc = acc.add(&Polynomial::monomial(
            1,
            &[
                (Var::X, (r_g - r_a) as i32),
                (Var::Y, n_a as i32),
                (Var::T, f_a as i32),
            ],
        ));
    }
    acc
}

/// Flag-extended Tutte polynomial by deletion/contraction, shifted basis.
///
/// Regular edge: 𝒯 = t²·𝒯(G−e) + 𝒯(G/e) (the cut graph contributes t² per
/// the cut identity); bridge: (1 + X t²)·𝒯(G/e); self-loop: (Y + t²)·𝒯(G−e);
/// edgeless terminal with q flags: t^q. Agrees exactly with the state sum.
pub fn tutte_flags_recursive(g: &SimpleFlagGraph) -> Polynomial {
    let mut memo = HashMap::new();
    tutte_flags_rec(g, &mut memo)
}

fn tutte_flags_rec(g: &SimpleFlagGraph, memo: &mut HashMap<String, Polynomial>) -> Polynomial {
    let ids = g.edge_ids();
    if ids.is_empty() {
        return Polynomial::var_pow(Var::T, g.flag_count() as i32);
    }
    let key = g.canonical_key();
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let e = ids[0];
    let class = g.classify_edge(e).expect("edge id from our own list");
    let del = || g.delete_edge(e).expect("edge id from our own list");
    let con = || g.contract_edge(e).expect("edge id from our own list");
    let result = match class {
        EdgeClass::Bridge => {
            let factor = Polynomial::one().add(&Polynomial::monomial(1, &[(Var::X, 1), (Var::T, 2)]));
            factor.mul(&tutte_flags_rec(&con(), memo))
        }
        EdgeClass::SelfLoop => {
            let factor = Polynomial::var(Var::Y).add(&Polynomial::var_pow(Var::T, 2));
            factor.mul(&tutte_flags_rec(&del(), memo))
        }
        EdgeClass::Regular => Polynomial::var_pow(Var::T, 2)
            .mul(&tutte_flags_rec(&del(), memo))
            .add(&tutte_flags_rec(&con(), memo)),
    };
    memo.insert(key, result.clone());
    result
}

/// Classic Tutte polynomial T(x,y) in the standard basis, by memoized
/// deletion/contraction: edgeless → 1, bridge → x·T(G/e), self-loop →
/// y·T(G−e), regular → T(G−e) + T(G/e). Flags are ignored.
pub fn tutte_classic(g: &SimpleFlagGraph) -> Polynomial {
    let mut flagless = g.clone();
    flagless.flags.clear();
    let mut memo = HashMap::new();
    tutte_classic_rec(&flagless, &mut memo)
}

fn tutte_classic_rec(g: &SimpleFlagGraph, memo: &mut HashMap<String, Polynomial>) -> Polynomial {
    let ids = g.edge_ids();
    if ids.is_empty() {
        return Polynomial::one();
    }
    let key = g.canonical_key();
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let e = ids[0];
    let class = g.classify_edge(e).expect("edge id from our own list");
    let del = || g.delete_edge(e).expect("edge id from our own list");
    let con = || g.contract_edge(e).expect("edge id from our own list");
    let result = match class {
        EdgeClass::Bridge => Polynomial::var(Var::X).mul(&tutte_classic_rec(&con(), memo)),
        EdgeClass::SelfLoop => Polynomial::var(Var::Y).mul(&tutte_classic_rec(&del(), memo)),
        EdgeClass::Regular => tutte_classic_rec(&del(), memo).add(&tutte_classic_rec(&con(), memo)),
    };
    memo.insert(key, result.clone());
    result
}
