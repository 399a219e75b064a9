//! Ribbon graphs with flags: rotation systems, face traversal, boundary
//! graphs, and the Bollobás–Riordan polynomial with its flag extension.
//!
//! A vertex is a disc with a cyclic sequence of incidence slots; each slot
//! hosts one ribbon-edge end or one flag. Edges carry a twist bit. Faces are
//! walked along strand boundaries: each slot contributes two boundary points,
//! consecutive slots are joined by vertex arcs, edge strands join the points
//! across an edge (swapping sides when twisted), and a pinched flag joins its
//! own two points. Unpinched flag points terminate open faces.

use crate::poly::{Polynomial, Var};
use crate::simple::SimpleFlagGraph;
use crate::util::subsets;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A ribbon edge: its two end slots and whether the ribbon is twisted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RibbonEdge {
    pub ends: (u32, u32),
    pub twist: bool,
}

/// A flag occupying one slot. Pinching identifies its two external points,
/// turning it into a face pass-through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RibbonFlag {
    pub slot: u32,
    pub pinched: bool,
}

/// Classification of a ribbon edge for deletion/contraction. A self-loop is
/// trivial iff its two end slots are cyclically adjacent at the vertex, i.e.
/// one of the two arcs between them carries no other slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RibbonEdgeClass {
    Bridge,
    Regular,
    Loop { twisted: bool, trivial: bool },
}

/// One boundary point: `(slot, side)`. Side 0 precedes the slot in the
/// vertex cyclic order, side 1 follows it.
pub type FacePoint = (u32, u8);

/// The faces of a ribbon graph, split into closed walks and open walks.
/// Bare disc vertices contribute one closed face each with an empty walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceSet {
    pub closed: Vec<Vec<FacePoint>>,
    pub open: Vec<Vec<FacePoint>>,
}

impl FaceSet {
    pub fn closed_count(&self) -> usize {
        self.closed.len()
    }

    pub fn open_count(&self) -> usize {
        self.open.len()
    }
}

/// A ribbon graph with flags, encoded as a rotation system with twist bits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RibbonFlagGraph {
    /// Vertex id → cyclic slot sequence (may be empty: a bare disc).
    vertices: BTreeMap<u32, Vec<u32>>,
    edges: BTreeMap<u32, RibbonEdge>,
    flags: BTreeMap<u32, RibbonFlag>,
}

impl RibbonFlagGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a vertex with its cyclic slot order. Slot ids are global.
    pub fn add_vertex(&mut self, v: u32, slots: Vec<u32>) -> Result<()> {
        if self.vertices.contains_key(&v) {
            return Err(Error::Invalid(format!("duplicate vertex id {v}")));
        }
        self.vertices.insert(v, slots);
        Ok(())
    }

    pub fn add_edge(&mut self, e: u32, slot_a: u32, slot_b: u32, twist: bool) -> Result<()> {
        if self.edges.contains_key(&e) {
            return Err(Error::Invalid(format!("duplicate edge id {e}")));
        }
        if slot_a == slot_b {
            return Err(Error::Invalid(format!("edge {e} must join two distinct slots")));
        }
        self.edges.insert(e, RibbonEdge { ends: (slot_a, slot_b), twist });
        Ok(())
    }

    pub fn add_flag(&mut self, f: u32, slot: u32) -> Result<()> {
        if self.flags.contains_key(&f) {
            return Err(Error::Invalid(format!("duplicate flag id {f}")));
        }
        self.flags.insert(f, RibbonFlag { slot, pinched: false });
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

    pub fn edge_ids(&self) -> Vec<u32> {
        self.edges.keys().copied().collect()
    }

    pub fn edge(&self, e: u32) -> Result<RibbonEdge> {
        self.edges
            .get(&e)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("unknown edge id {e}")))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (u32, &[u32])> {
        self.vertices.iter().map(|(v, s)| (*v, s.as_slice()))
    }

    pub fn flags(&self) -> impl Iterator<Item = (u32, RibbonFlag)> + '_ {
        self.flags.iter().map(|(f, rf)| (*f, *rf))
    }

    /// True iff the graph is closed in the face sense: no unpinched flags.
    pub fn is_closed(&self) -> bool {
        self.flags.values().all(|f| f.pinched)
    }

    /// Slot → vertex id map; rejects slots claimed by two vertices.
    fn slot_owner(&self) -> Result<BTreeMap<u32, u32>> {
        let mut owner = BTreeMap::new();
        for (v, slots) in &self.vertices {
            for s in slots {
                if owner.insert(*s, *v).is_some() {
                    return Err(Error::Invalid(format!("slot {s} listed on two vertices")));
                }
            }
        }
        Ok(owner)
    }

    /// Full structural validation: every slot hosts exactly one edge end or
    /// flag, every occupant references an existing slot.
    pub fn validate(&self) -> Result<()> {
        let owner = self.slot_owner()?;
        let mut occupied: BTreeMap<u32, String> = BTreeMap::new();
        let mut occupy = |slot: u32, what: String| -> Result<()> {
            if !owner.contains_key(&slot) {
                return Err(Error::Invalid(format!("{what} references unknown slot {slot}")));
            }
            if let Some(prev) = occupied.insert(slot, what.clone()) {
                return Err(Error::Invalid(format!("slot {slot} hosts both {prev} and {what}")));
            }
            Ok(())
        };
        for (e, re) in &self.edges {
            occupy(re.ends.0, format!("edge {e}"))?;
            occupy(re.ends.1, format!("edge {e}"))?;
        }
        for (f, rf) in &self.flags {
            occupy(rf.slot, format!("flag {f}"))?;
        }
        for (v, slots) in &self.vertices {
            for s in slots {
                if !occupied.contains_key(s) {
                    return Err(Error::Invalid(format!("slot {s} of vertex {v} hosts nothing")));
                }
            }
        }
        Ok(())
    }

    /// Forget the ribbon structure: same vertices, edges, flags as an
    /// abstract graph (used for rank/nullity/components and classification).
    pub fn underlying_simple(&self) -> SimpleFlagGraph {
        let owner = self.slot_owner().expect("validated graph");
        let mut g = SimpleFlagGraph::new();
        for v in self.vertices.keys() {
            g.add_vertex(*v);
        }
        for (e, re) in &self.edges {
            g.add_edge(*e, owner[&re.ends.0], owner[&re.ends.1])
                .expect("slots already validated");
        }
        for (f, rf) in &self.flags {
            g.add_flag(*f, owner[&rf.slot]).expect("slots already validated");
        }
        g
    }

    pub fn rank_nullity_components(&self) -> (usize, usize, usize) {
        self.underlying_simple().rank_nullity_components()
    }

    /// Face traversal. Each slot yields points `(s,0)` and `(s,1)`; links:
    /// vertex arcs `(order[i],1)–(order[i+1],0)` (cyclically), edge strands
    /// `(a,0)–(b,1)`/`(a,1)–(b,0)` or side-preserving when twisted, pinched
    /// flags `(s,0)–(s,1)`. Components with endpoints (unpinched flag
    /// points) are open faces; cycles and bare vertices are closed faces.
    pub fn faces(&self) -> FaceSet {
        let mut link: BTreeMap<FacePoint, Vec<FacePoint>> = BTreeMap::new();
        let mut connect = |a: FacePoint, b: FacePoint| {
            link.entry(a).or_default().push(b);
            link.entry(b).or_default().push(a);
        };
        let mut closed = Vec::new();
        for slots in self.vertices.values() {
            if slots.is_empty() {
                closed.push(Vec::new()); // bare disc: one boundary circle
                continue;
            }
            for i in 0..slots.len() {
                let next = slots[(i + 1) % slots.len()];
                connect((slots[i], 1), (next, 0));
            }
        }
        for re in self.edges.values() {
            let (a, b) = re.ends;
            if re.twist {
                connect((a, 0), (b, 0));
                connect((a, 1), (b, 1));
            } else {
                connect((a, 0), (b, 1));
                connect((a, 1), (b, 0));
            }
        }
        for rf in self.flags.values() {
            if rf.pinched {
                connect((rf.slot, 0), (rf.slot, 1));
            }
        }

        let mut visited: BTreeMap<FacePoint, bool> =
            link.keys().map(|p| (*p, false)).collect();
        let walk = |start: FacePoint,
                    prev_hint: Option<FacePoint>,
                    link: &BTreeMap<FacePoint, Vec<FacePoint>>,
                    visited: &mut BTreeMap<FacePoint, bool>| {
            let mut path = vec![start];
            visited.insert(start, true);
            let mut prev = prev_hint;
            let mut here = start;
            loop {
                let next = link[&here]
                    .iter()
                    .copied()
                    .find(|n| Some(*n) != prev && !visited[n]);
                match next {
                    Some(n) => {
                        visited.insert(n, true);
                        path.push(n);
                        prev = Some(here);
                        here = n;
                    }
                    None => break,
                }
            }
            path
        };

        // Open faces first: start from endpoints (single-link points), in
        // ascending order for determinism.
        let endpoints: Vec<FacePoint> = link
            .iter()
            .filter(|(_, ns)| ns.len() == 1)
            .map(|(p, _)| *p)
            .collect();
        let mut open = Vec::new();
        for p in endpoints {
            if !visited[&p] {
                open.push(walk(p, None, &link, &mut visited));
            }
        }
        // Remaining components are cycles; start at the least point and step
        // toward its smaller neighbor for a canonical orientation.
        let points: Vec<FacePoint> = link.keys().copied().collect();
        for p in points {
            if !visited[&p] {
                let first = *link[&p].iter().min().unwrap();
                let other = *link[&p].iter().max().unwrap();
                // Mark the start, then walk from its chosen neighbor with the
                // start as the excluded predecessor, yielding the full cycle.
                visited.insert(p, true);
                let mut cycle = vec![p];
                cycle.extend(walk(first, Some(p), &link, &mut visited));
                let _ = other;
                closed.push(cycle);
            }
        }
        FaceSet { closed, open }
    }

    /// Closed face count (bare discs included).
    pub fn closed_face_count(&self) -> usize {
        self.faces().closed_count()
    }

    /// Pinch every flag, producing a closed graph on the same vertices,
    /// edges and flag count.
    pub fn pinch(&self) -> RibbonFlagGraph {
        let mut g = self.clone();
        for rf in g.flags.values_mut() {
            rf.pinched = true;
        }
        g
    }

    /// The boundary graph: one vertex per unpinched flag, one edge per open
    /// face joining the flags at its two endpoints. Empty for closed graphs.
    pub fn boundary_graph(&self) -> SimpleFlagGraph {
        let slot_flag: BTreeMap<u32, u32> = self
            .flags
            .iter()
            .filter(|(_, rf)| !rf.pinched)
            .map(|(f, rf)| (rf.slot, *f))
            .collect();
        let mut g = SimpleFlagGraph::new();
        for f in slot_flag.values() {
            g.add_vertex(*f);
        }
        for (i, w) in self.faces().open.iter().enumerate() {
            let (first, last) = (w.first().unwrap(), w.last().unwrap());
            g.add_edge(i as u32, slot_flag[&first.0], slot_flag[&last.0])
                .expect("open faces end at flag slots");
        }
        g
    }

    /// Number of boundary components C_∂.
    pub fn boundary_components(&self) -> usize {
        self.boundary_graph().components()
    }

    /// Remove an edge together with its two slots.
    pub fn delete_ribbon(&self, e: u32) -> Result<RibbonFlagGraph> {
        let re = self.edge(e)?;
        let mut g = self.clone();
        g.edges.remove(&e);
        for slots in g.vertices.values_mut() {
            slots.retain(|s| *s != re.ends.0 && *s != re.ends.1);
        }
        Ok(g)
    }

    /// Cut an edge: its slots stay, each now hosting a fresh unpinched flag.
    pub fn cut_ribbon(&self, e: u32) -> Result<RibbonFlagGraph> {
        let re = self.edge(e)?;
        let mut g = self.clone();
        g.edges.remove(&e);
        let f = g.flags.keys().next_back().map_or(0, |m| m + 1);
        g.flags.insert(f, RibbonFlag { slot: re.ends.0, pinched: false });
        g.flags.insert(f + 1, RibbonFlag { slot: re.ends.1, pinched: false });
        Ok(g)
    }

    /// Positions of the two end slots of a self-loop in its vertex order.
    fn loop_positions(&self, order: &[u32], ends: (u32, u32)) -> (usize, usize) {
        let pa = order.iter().position(|s| *s == ends.0).expect("end slot on vertex");
        let pb = order.iter().position(|s| *s == ends.1).expect("end slot on vertex");
        (pa, pb)
    }

    /// Bridge / regular / self-loop with twist and triviality. A self-loop
    /// is trivial iff its end slots are cyclically adjacent.
    pub fn classify_ribbon_edge(&self, e: u32) -> Result<RibbonEdgeClass> {
        let re = self.edge(e)?;
        let owner = self.slot_owner()?;
        let (va, vb) = (owner[&re.ends.0], owner[&re.ends.1]);
        if va != vb {
            let simple = self.underlying_simple();
            return Ok(match simple.classify_edge(e)? {
                crate::simple::EdgeClass::Bridge => RibbonEdgeClass::Bridge,
                _ => RibbonEdgeClass::Regular,
            });
        }
        // Self-loop (which is never a bridge in the underlying graph — but a
        // loop may still coexist with bridges elsewhere; classification here
        // only concerns this edge).
        let order = &self.vertices[&va];
        let (pa, pb) = self.loop_positions(order, re.ends);
        let n = order.len();
        let trivial = (pa + 1) % n == pb || (pb + 1) % n == pa;
        Ok(RibbonEdgeClass::Loop { twisted: re.twist, trivial })
    }

    /// Contract an edge.
    ///
    /// Non-loop: the two end vertices merge into one disc whose cyclic order
    /// concatenates the two orders as split at the edge (the twisted case
    /// first flips the second disc). Trivial twisted loop: same graph as
    /// deletion. Trivial untwisted loop: deletion plus a fresh bare vertex.
    /// Non-trivial loops are rejected.
    pub fn contract_ribbon(&self, e: u32) -> Result<RibbonFlagGraph> {
        let re = self.edge(e)?;
        let owner = self.slot_owner()?;
        let (a, b) = re.ends;
        let (va, vb) = (owner[&a], owner[&b]);
        if va == vb {
            let order = &self.vertices[&va];
            let (pa, pb) = self.loop_positions(order, re.ends);
            let n = order.len();
            let trivial = (pa + 1) % n == pb || (pb + 1) % n == pa;
            if !trivial {
                return Err(Error::Invalid(format!(
                    "edge {e} is a non-trivial self-loop; its contraction is not defined"
                )));
            }
            let mut g = self.delete_ribbon(e)?;
            if !re.twist {
                let v0 = g.vertices.keys().next_back().map_or(0, |m| m + 1);
                g.vertices.insert(v0, Vec::new());
            }
            return Ok(g);
        }

        let mut g = self.clone();
        if re.twist {
            // Flip the disc of end b: reverse its order and toggle the twist
            // of every edge with exactly one end on it (e itself becomes
            // untwisted; both-end edges toggle twice, i.e. stay put).
            let vb_slots: Vec<u32> = g.vertices[&vb].clone();
            g.vertices.get_mut(&vb).unwrap().reverse();
            let on_vb = |s: u32| vb_slots.contains(&s);
            for redge in g.edges.values_mut() {
                if on_vb(redge.ends.0) != on_vb(redge.ends.1) {
                    redge.twist = !redge.twist;
                }
            }
            g.edges.get_mut(&e).unwrap().twist = false;
        }
        let order_a = g.vertices.remove(&va).unwrap();
        let order_b = g.vertices.remove(&vb).unwrap();
        let rot = |order: &[u32], end: u32| -> Vec<u32> {
            let p = order.iter().position(|s| *s == end).expect("end slot on vertex");
            let mut out: Vec<u32> = Vec::with_capacity(order.len() - 1);
            for i in 1..order.len() {
                out.push(order[(p + i) % order.len()]);
            }
            out
        };
        let mut merged = rot(&order_a, a);
        merged.extend(rot(&order_b, b));
        g.vertices.insert(va.min(vb), merged);
        g.edges.remove(&e);
        Ok(g)
    }

    /// Componentwise juxtaposition; all id spaces (including slots) must be
    /// disjoint.
    pub fn disjoint_union(&self, other: &RibbonFlagGraph) -> Result<RibbonFlagGraph> {
        let mut g = self.clone();
        let own = self.slot_owner()?;
        for (v, slots) in &other.vertices {
            if g.vertices.contains_key(v) {
                return Err(Error::Invalid(format!("vertex id {v} present in both graphs")));
            }
            if slots.iter().any(|s| own.contains_key(s)) {
                return Err(Error::Invalid("slot ids present in both graphs".into()));
            }
            g.vertices.insert(*v, slots.clone());
        }
        for (e, re) in &other.edges {
            if g.edges.insert(*e, *re).is_some() {
                return Err(Error::Invalid(format!("edge id {e} present in both graphs")));
            }
        }
        for (f, rf) in &other.flags {
            if g.flags.insert(*f, *rf).is_some() {
                return Err(Error::Invalid(format!("flag id {f} present in both graphs")));
            }
        }
        Ok(g)
    }

    /// Dot product: disjoint union with vertices `v1`, `v2` merged into one
    /// disc. The cyclic orders are concatenated after rotating each to start
    /// at the caller-chosen positions — the polynomial identities hold for
    /// every splice choice.
    pub fn dot_product(
        &self,
        v1: u32,
        pos1: usize,
        other: &RibbonFlagGraph,
        v2: u32,
        pos2: usize,
    ) -> Result<RibbonFlagGraph> {
        if !self.vertices.contains_key(&v1) {
            return Err(Error::Invalid(format!("unknown vertex id {v1}")));
        }
        if !other.vertices.contains_key(&v2) {
            return Err(Error::Invalid(format!("unknown vertex id {v2}")));
        }
        let mut g = self.disjoint_union(other)?;
        let o1 = g.vertices.remove(&v1).unwrap();
        let o2 = g.vertices.remove(&v2).unwrap();
        let rotate = |o: &[u32], p: usize| -> Vec<u32> {
            (0..o.len()).map(|i| o[(p + i) % o.len().max(1)]).collect()
        };
        let mut merged = rotate(&o1, pos1 % o1.len().max(1));
        merged.extend(rotate(&o2, pos2 % o2.len().max(1)));
        g.vertices.insert(v1, merged);
        Ok(g)
    }

    /// Shift every id (vertices, edges, flags, slots) by the given offsets.
    pub fn shift_ids(&self, dv: u32, de: u32, df: u32, ds: u32) -> RibbonFlagGraph {
        RibbonFlagGraph {
            vertices: self
                .vertices
                .iter()
                .map(|(v, slots)| (v + dv, slots.iter().map(|s| s + ds).collect()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(e, re)| {
                    (
                        e + de,
                        RibbonEdge { ends: (re.ends.0 + ds, re.ends.1 + ds), twist: re.twist },
                    )
                })
                .collect(),
            flags: self
                .flags
                .iter()
                .map(|(f, rf)| (f + df, RibbonFlag { slot: rf.slot + ds, pinched: rf.pinched }))
                .collect(),
        }
    }

    pub fn max_ids(&self) -> (u32, u32, u32, u32) {
        let max_slot = self
            .vertices
            .values()
            .flat_map(|s| s.iter())
            .max()
            .map_or(0, |m| m + 1);
        (
            self.vertices.keys().next_back().map_or(0, |m| m + 1),
            self.edges.keys().next_back().map_or(0, |m| m + 1),
            self.flags.keys().next_back().map_or(0, |m| m + 1),
            max_slot,
        )
    }
}

/// Classic Bollobás–Riordan polynomial of a closed ribbon graph, shifted
/// basis: Σ over spanning subgraphs A of X^{r−r(A)} Y^{n(A)} z^{k(A)−F(A)+n(A)}
/// with F(A) the face count of the sub-ribbon-graph. Pinched flags are
/// allowed (a pinched graph is closed); unpinched flags are rejected.
pub fn br_classic(g: &RibbonFlagGraph) -> Result<Polynomial> {
    if !g.is_closed() {
        return Err(Error::FamilyMismatch(
            "the classic polynomial is defined for closed ribbon graphs; pinch first".into(),
        ));
    }
    g.validate()?;
    let ids = g.edge_ids();
    let simple = g.underlying_simple();
    let nv = simple.vertex_count();
    let r_g = nv - simple.components();
    let mut acc = Polynomial::zero();
    for a in subsets(&ids) {
        let mut sub = g.clone();
        for e in &ids {
            if !a.contains(e) {
                sub = sub.delete_ribbon(*e)?;
            }
        }
        let k_a = sub.underlying_simple().components();
        let r_a = nv - k_a;
        let n_a = a.len() + k_a - nv;
        let f_a = sub.closed_face_count();
        let z_exp = k_a + n_a - f_a;
        acc = acc.add(&Polynomial::monomial(
            1,
            &[
                (Var::X, (r_g - r_a) as i32),
                (Var::Y, n_a as i32),
                (Var::Z, z_exp as i32),
            ],
        ));
    }
    Ok(acc)
}

/// Per-subgraph data shared by the extended state sums.
fn cut_subgraph_counts(g: &RibbonFlagGraph, a: &[u32]) -> (usize, usize, usize, usize, usize) {
    let mut sub = g.clone();
    for e in g.edge_ids() {
        if !a.contains(&e) {
            sub = sub.cut_ribbon(e).expect("edge id from our own list");
        }
    }
    let k_a = sub.underlying_simple().components();
    let faces = sub.faces();
    let f_int = faces.closed_count();
    let c_bnd = sub.boundary_components();
    let f_a = sub.flag_count();
    (k_a, f_int, c_bnd, f_a, a.len())
}

/// Extended Bollobás–Riordan polynomial ℛ(x,y,z,s,t) of a ribbon graph with
/// flags, shifted basis: subgraphs are cut-subgraphs (absent edges become
/// flag pairs), z-exponent k−F_int+n, s-exponent C_∂, t-exponent the flag
/// count of the cut graph.
pub fn br_flags(g: &RibbonFlagGraph) -> Result<Polynomial> {
    g.validate()?;
    let ids = g.edge_ids();
    let nv = g.vertex_count();
    let r_g = nv - g.underlying_simple().components();
    let mut acc = Polynomial::zero();
    for a in subsets(&ids) {
        let (k_a, f_int, c_bnd, f_a, na) = cut_subgraph_counts(g, &a);
        let r_a = nv - k_a;
        let n_a = na + k_a - nv;
        let z_exp = k_a + n_a - f_int;
        acc = acc.add(&Polynomial::monomial(
            1,
            &[
                (Var::X, (r_g - r_a) as i32),
                (Var::Y, n_a as i32),
                (Var::Z, z_exp as i32),
                (Var::S, c_bnd as i32),
                (Var::T, f_a as i32),
            ],
        ));
    }
    Ok(acc)
}

/// ℛ′ = ℛ with s → z⁻¹. The substitution provably cancels: the result is
/// again a genuine polynomial, which is checked here.
pub fn br_flags_prime(g: &RibbonFlagGraph) -> Result<Polynomial> {
    let r = br_flags(g)?;
    let mut bind = BTreeMap::new();
    bind.insert(Var::S, Polynomial::var_pow(Var::Z, -1));
    let prime = r.substitute(&bind);
    if !prime.is_genuine_polynomial() {
        return Err(Error::Internal(
            "the s→1/z reduction left negative exponents".into(),
        ));
    }
    Ok(prime)
}
