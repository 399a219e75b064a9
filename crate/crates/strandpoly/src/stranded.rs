//! Rank-3 stranded graphs: colored tensor graphs and their contractions
//! (w-colored graphs), with faces, bubbles, boundary data and the cell
//! counts feeding the seven-variable invariant.
//!
//! A stranded vertex is a collection of pre-flags — ordered families of
//! points, each point annotated with a color pair — joined internally by
//! bows (chords pairing points of equal color pair). A stranded edge joins
//! two pre-flags by parallel strands; a flag leaves a pre-flag's points as
//! face terminals. Faces are maximal strand walks; bubbles are the rank-3
//! cells spanned by three colors; the boundary graph collects flags and
//! open faces.
//!
//! Colored tensor graphs are built from a compact bipartite description
//! (vertex signs, colored edges/flags) by expanding every vertex to the
//! complete `K_{D+1}` bow pattern. Contraction splices outer strands
//! through the disappearing pre-flags, turning closed inner faces into
//! trivial discs; membership in the w-colored family is tracked by
//! provenance (built colored, then cut/contracted), never guessed.

use crate::util::UnionFind;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

pub type PointId = u32;
pub type PreFlagId = u32;

/// Unordered color pair, stored sorted.
pub type ColorPair = (u8, u8);

/// The canonical form of an unordered color pair.
pub fn color_pair(a: u8, b: u8) -> ColorPair {
    (a.min(b), a.max(b))
}

/// An ordered family of points belonging to one vertex, all attachable to a
/// single edge or flag of matching color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreFlag {
    pub color: u8,
    /// Point ids with their color-pair annotations; pairs are pairwise
    /// distinct within a pre-flag.
    pub points: Vec<(PointId, ColorPair)>,
}

/// A chord inside a vertex pairing two points of equal color pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bow {
    pub a: PointId,
    pub b: PointId,
    pub pair: ColorPair,
}

/// A stranded vertex: its pre-flags in cyclic order plus its bows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandedVertex {
    pub preflags: Vec<PreFlagId>,
    pub bows: Vec<Bow>,
}

/// A stranded edge: two end pre-flags joined by parallel strands (one per
/// point, matched by color pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandedEdge {
    pub ends: (PreFlagId, PreFlagId),
    pub strands: Vec<(PointId, PointId, ColorPair)>,
    pub color: u8,
}

/// A flag occupying one pre-flag; its points become face terminals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrandedFlag {
    pub preflag: PreFlagId,
    pub color: u8,
}

/// How the graph was built, which decides which theory applies to it.
/// `WColored` is assigned only by the operations in this module (cut,
/// contraction, disc manipulation of colored graphs) — provenance, not a
/// decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Stranded,
    ColoredTensor,
    WColored,
}

/// One face: a maximal strand walk with a single color pair. Closed faces
/// are cycles (trivial discs contribute one with no points); open faces are
/// walks between two flag points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandedFace {
    pub pair: ColorPair,
    pub points: Vec<PointId>,
    /// Flag ids at the two endpoints, for open faces.
    pub endpoints: Option<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandedFaces {
    pub closed: Vec<StrandedFace>,
    pub open: Vec<StrandedFace>,
}

/// One 3-bubble: the pre-flags spanned by segments whose color pair lies in
/// a fixed color triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bubble {
    pub colors: [u8; 3],
    pub preflags: Vec<PreFlagId>,
    pub open: bool,
}

/// Edge classification for deletion/contraction. `p` counts the inner faces
/// of a self-loop; `sectors` are the bow-connected pre-flag families of the
/// loop vertex once the loop's own pre-flags are removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrandedEdgeClass {
    Bridge,
    Regular,
    SelfLoop {
        p: u8,
        trivial: bool,
        sectors: Vec<Vec<PreFlagId>>,
    },
}

/// The boundary graph: one degree-D vertex per flag, one edge per open face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryGraph {
    /// Flag id → flag color.
    pub vertices: BTreeMap<u32, u8>,
    /// One entry per open face: its color pair and endpoint flag ids
    /// (sorted). Sorted overall for stable comparison.
    pub edges: Vec<(ColorPair, u32, u32)>,
}

impl BoundaryGraph {
    pub fn component_count(&self) -> usize {
        let ids: Vec<u32> = self.vertices.keys().copied().collect();
        let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        for (_, a, b) in &self.edges {
            uf.union(index[a], index[b]);
        }
        uf.count()
    }
}

/// The full cell-count bundle of a stranded graph. Trivial discs are
/// included in `k`, `v` and `f_int` and excluded from bubbles and all
/// boundary quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCounts {
    pub k: usize,
    pub v: usize,
    pub e: usize,
    pub f_int: usize,
    pub f_ext: usize,
    pub b_int: usize,
    pub b_ext: usize,
    pub c_bnd: usize,
    pub e_bnd: usize,
    pub f_bnd: usize,
    /// |f⁰|, the number of flags.
    pub flags: usize,
}

/// A rank-D stranded graph. Rank-3 is the fully supported theory; the data
/// model itself is rank-agnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrandedGraph {
    rank: u8,
    mode: Mode,
    vertices: BTreeMap<u32, StrandedVertex>,
    preflags: BTreeMap<PreFlagId, PreFlag>,
    edges: BTreeMap<u32, StrandedEdge>,
    flags: BTreeMap<u32, StrandedFlag>,
    /// Trivial discs: one closed strand each, annotated by its color pair.
    discs: BTreeMap<u32, ColorPair>,
}

/// Compact description of a colored tensor graph: bipartite signed vertices
/// with at most one edge or flag per color, every color used.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompactColored {
    /// Vertex id → sign (true = positive).
    pub vertices: BTreeMap<u32, bool>,
    /// Edge id → (color, positive end vertex, negative end vertex) — ends
    /// may be listed in either order, bipartiteness is checked.
    pub edges: BTreeMap<u32, (u8, u32, u32)>,
    /// Flag id → (color, vertex).
    pub flags: BTreeMap<u32, (u8, u32)>,
}

impl StrandedGraph {
    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len() + self.discs.len()
    }

    /// Vertices that are not trivial discs.
    pub fn proper_vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn flag_count(&self) -> usize {
        self.flags.len()
    }

    pub fn disc_count(&self) -> usize {
        self.discs.len()
    }

    pub fn edge_ids(&self) -> Vec<u32> {
        self.edges.keys().copied().collect()
    }

    pub fn edge(&self, e: u32) -> Result<&StrandedEdge> {
        self.edges
            .get(&e)
            .ok_or_else(|| Error::Invalid(format!("unknown edge id {e}")))
    }

    pub fn preflag(&self, pf: PreFlagId) -> Result<&PreFlag> {
        self.preflags
            .get(&pf)
            .ok_or_else(|| Error::Invalid(format!("unknown pre-flag id {pf}")))
    }

    pub fn vertices(&self) -> impl Iterator<Item = (u32, &StrandedVertex)> {
        self.vertices.iter().map(|(v, sv)| (*v, sv))
    }

    pub fn flags(&self) -> impl Iterator<Item = (u32, StrandedFlag)> + '_ {
        self.flags.iter().map(|(f, sf)| (*f, *sf))
    }

    pub fn discs(&self) -> impl Iterator<Item = (u32, ColorPair)> + '_ {
        self.discs.iter().map(|(d, p)| (*d, *p))
    }

    /// Pre-flag id → owning vertex id.
    fn preflag_owner(&self) -> BTreeMap<PreFlagId, u32> {
        let mut owner = BTreeMap::new();
        for (v, sv) in &self.vertices {
            for pf in &sv.preflags {
                owner.insert(*pf, *v);
            }
        }
        owner
    }

    /// Point id → owning pre-flag id.
    fn point_owner(&self) -> BTreeMap<PointId, PreFlagId> {
        let mut owner = BTreeMap::new();
        for (pf, p) in &self.preflags {
            for (pt, _) in &p.points {
                owner.insert(*pt, *pf);
            }
        }
        owner
    }

    /// Pre-flag id → attached flag id, for flagged pre-flags.
    fn flag_of_preflag(&self) -> BTreeMap<PreFlagId, u32> {
        self.flags.iter().map(|(f, sf)| (sf.preflag, *f)).collect()
    }

    /// Structural validation of the stranded axioms (not of coloredness):
    /// ownership is a partition, pairs are distinct within a pre-flag, bows
    /// pair equal color pairs disjointly and cover every point, strands form
    /// a pair-respecting bijection, every pre-flag hosts exactly one edge
    /// end or flag.
    pub fn validate(&self) -> Result<()> {
        let pf_owner = self.preflag_owner();
        for pf in self.preflags.keys() {
            if !pf_owner.contains_key(pf) {
                return Err(Error::Invalid(format!("pre-flag {pf} belongs to no vertex")));
            }
        }
        for (v, sv) in &self.vertices {
            for pf in &sv.preflags {
                if !self.preflags.contains_key(pf) {
                    return Err(Error::Invalid(format!(
                        "vertex {v} lists unknown pre-flag {pf}"
                    )));
                }
            }
        }
        let pt_owner = self.point_owner();
        for (pf, p) in &self.preflags {
            let mut pairs: Vec<ColorPair> = p.points.iter().map(|(_, cp)| *cp).collect();
            pairs.sort_unstable();
            let len = pairs.len();
            pairs.dedup();
            if pairs.len() != len {
                return Err(Error::Invalid(format!(
                    "pre-flag {pf} repeats a color pair"
                )));
            }
        }
        // Bows: within the owning vertex, pair-matching, covering each point
        // exactly once.
        let mut bowed: BTreeSet<PointId> = BTreeSet::new();
        for (v, sv) in &self.vertices {
            let local: BTreeSet<PointId> = sv
                .preflags
                .iter()
                .flat_map(|pf| self.preflags[pf].points.iter().map(|(pt, _)| *pt))
                .collect();
            for bow in &sv.bows {
                for pt in [bow.a, bow.b] {
                    if !local.contains(&pt) {
                        return Err(Error::Invalid(format!(
                            "bow of vertex {v} uses foreign point {pt}"
                        )));
                    }
                    if !bowed.insert(pt) {
                        return Err(Error::Invalid(format!(
                            "point {pt} lies on two bows"
                        )));
                    }
                }
                let pair_of = |pt: PointId| {
                    let pf = pt_owner[&pt];
                    self.preflags[&pf]
                        .points
                        .iter()
                        .find(|(q, _)| *q == pt)
                        .unwrap()
                        .1
                };
                if pair_of(bow.a) != bow.pair || pair_of(bow.b) != bow.pair {
                    return Err(Error::Invalid(format!(
                        "bow of vertex {v} mismatches its endpoints' color pairs"
                    )));
                }
            }
        }
        for pt in pt_owner.keys() {
            if !bowed.contains(pt) {
                return Err(Error::Invalid(format!("point {pt} lies on no bow")));
            }
        }
        // Attachments: each pre-flag hosts exactly one edge end or flag.
        let mut used: BTreeMap<PreFlagId, String> = BTreeMap::new();
        let mut attach = |pf: PreFlagId, what: String| -> Result<()> {
            if !self.preflags.contains_key(&pf) {
                return Err(Error::Invalid(format!("{what} references unknown pre-flag {pf}")));
            }
            if let Some(prev) = used.insert(pf, what.clone()) {
                return Err(Error::Invalid(format!(
                    "pre-flag {pf} hosts both {prev} and {what}"
                )));
            }
            Ok(())
        };
        for (e, se) in &self.edges {
            attach(se.ends.0, format!("edge {e}"))?;
            attach(se.ends.1, format!("edge {e}"))?;
            if se.ends.0 == se.ends.1 {
                return Err(Error::Invalid(format!("edge {e} joins a pre-flag to itself")));
            }
            let (p0, p1) = (&self.preflags[&se.ends.0], &self.preflags[&se.ends.1]);
            if se.strands.len() != p0.points.len() || p0.points.len() != p1.points.len() {
                return Err(Error::Invalid(format!(
                    "edge {e} strand count differs from its end cardinalities"
                )));
            }
            let (mut seen0, mut seen1) = (BTreeSet::new(), BTreeSet::new());
            for (a, b, pair) in &se.strands {
                fn find(p: &PreFlag, pt: PointId) -> Option<&(PointId, ColorPair)> {
                    p.points.iter().find(|(q, _)| *q == pt)
                }
                match (find(p0, *a), find(p1, *b)) {
                    (Some((_, pa)), Some((_, pb))) if pa == pair && pb == pair => {}
                    _ => {
                        return Err(Error::Invalid(format!(
                            "edge {e} strand does not join matching points of its two ends"
                        )))
                    }
                }
                if !seen0.insert(*a) || !seen1.insert(*b) {
                    return Err(Error::Invalid(format!("edge {e} strands reuse a point")));
                }
            }
        }
        for (f, sf) in &self.flags {
            attach(sf.preflag, format!("flag {f}"))?;
        }
        for pf in self.preflags.keys() {
            if !used.contains_key(pf) {
                return Err(Error::Invalid(format!(
                    "pre-flag {pf} hosts neither an edge nor a flag"
                )));
            }
        }
        Ok(())
    }

    /// Collapse to an abstract graph on the proper vertices (discs excluded):
    /// one abstract edge per stranded edge, one abstract flag per flag.
    pub fn collapsed_simple(&self) -> crate::simple::SimpleFlagGraph {
        let owner = self.preflag_owner();
        let mut g = crate::simple::SimpleFlagGraph::new();
        for v in self.vertices.keys() {
            g.add_vertex(*v);
        }
        for (e, se) in &self.edges {
            g.add_edge(*e, owner[&se.ends.0], owner[&se.ends.1])
                .expect("validated preflag ownership");
        }
        for (f, sf) in &self.flags {
            g.add_flag(*f, owner[&sf.preflag]).expect("validated preflag ownership");
        }
        g
    }

    /// Connected components, counting each trivial disc as one.
    pub fn component_count(&self) -> usize {
        self.collapsed_simple().components() + self.discs.len()
    }

    /// `(rank r, nullity n, components k)` of the underlying abstract graph,
    /// discs included as isolated components.
    pub fn rank_nullity_components(&self) -> (usize, usize, usize) {
        let k = self.component_count();
        let v = self.vertex_count();
        let r = v - k;
        let n = self.edges.len() + k - v;
        (r, n, k)
    }

    /// All faces: maximal strand walks. Bows and edge strands link points;
    /// points of flagged pre-flags terminate open faces; every trivial disc
    /// is one closed face with no points.
    pub fn faces(&self) -> StrandedFaces {
        let pt_owner = self.point_owner();
        let flag_of = self.flag_of_preflag();
        // Each point touches exactly one bow and at most one edge strand.
        let mut bow_link: BTreeMap<PointId, (PointId, ColorPair)> = BTreeMap::new();
        for sv in self.vertices.values() {
            for bow in &sv.bows {
                bow_link.insert(bow.a, (bow.b, bow.pair));
                bow_link.insert(bow.b, (bow.a, bow.pair));
            }
        }
        let mut strand_link: BTreeMap<PointId, (PointId, ColorPair)> = BTreeMap::new();
        for se in self.edges.values() {
            for (a, b, pair) in &se.strands {
                strand_link.insert(*a, (*b, *pair));
                strand_link.insert(*b, (*a, *pair));
            }
        }
        let pair_of = |pt: PointId| -> ColorPair {
            let pf = pt_owner[&pt];
            self.preflags[&pf].points.iter().find(|(q, _)| *q == pt).unwrap().1
        };

        let mut visited: BTreeSet<PointId> = BTreeSet::new();
        let mut closed = Vec::new();
        let mut open = Vec::new();

        // Open faces start at flag points (terminal: no strand link). Walk
        // alternating strand/bow segments; the entry segment at a terminal
        // point is its bow.
        let terminals: Vec<PointId> = pt_owner
            .keys()
            .filter(|pt| flag_of.contains_key(&pt_owner[pt]) && !strand_link.contains_key(pt))
            .copied()
            .collect();
        for start in &terminals {
            if visited.contains(start) {
                continue;
            }
            let mut walk = vec![*start];
            visited.insert(*start);
            let mut here = *start;
            let mut via_bow = true;
            loop {
                let next = if via_bow {
                    bow_link.get(&here).copied()
                } else {
                    strand_link.get(&here).copied()
                };
                match next {
                    Some((n, _)) => {
                        visited.insert(n);
                        walk.push(n);
                        here = n;
                        via_bow = !via_bow;
                    }
                    None => break,
                }
            }
            let f_a = flag_of[&pt_owner[start]];
            let f_b = flag_of[&pt_owner[&here]];
            open.push(StrandedFace {
                pair: pair_of(*start),
                points: walk,
                endpoints: Some((f_a.min(f_b), f_a.max(f_b))),
            });
        }
        // Remaining points lie on cycles.
        let all_points: Vec<PointId> = pt_owner.keys().copied().collect();
        for start in all_points {
            if visited.contains(&start) {
                continue;
            }
            let mut walk = vec![start];
            visited.insert(start);
            // Leave via the bow first for determinism.
            let mut here = start;
            let mut via_bow = true;
            loop {
                let (n, _) = if via_bow {
                    bow_link[&here]
                } else {
                    strand_link[&here]
                };
                if n == start && !via_bow {
                    break; // strand closes the cycle back to the start's bow entry
                }
                if visited.contains(&n) && n == start {
                    break;
                }
                visited.insert(n);
                walk.push(n);
                here = n;
                via_bow = !via_bow;
            }
            closed.push(StrandedFace {
                pair: pair_of(start),
                points: walk,
                endpoints: None,
            });
        }
        for pair in self.discs.values() {
            closed.push(StrandedFace { pair: *pair, points: Vec::new(), endpoints: None });
        }
        StrandedFaces { closed, open }
    }

    /// 3-bubbles for one color triple: connected components of pre-flags
    /// under segments (bows and edge strands) whose color pair lies inside
    /// the triple. Trivial discs never participate.
    pub fn bubbles(&self, colors: [u8; 3]) -> Result<Vec<Bubble>> {
        if self.rank != 3 {
            return Err(Error::FamilyMismatch("bubbles are defined for rank 3".into()));
        }
        let t: BTreeSet<u8> = colors.iter().copied().collect();
        if t.len() != 3 || t.iter().any(|c| *c > self.rank) {
            return Err(Error::Invalid(format!("{colors:?} is not a triple of colors")));
        }
        let inside = |pair: ColorPair| t.contains(&pair.0) && t.contains(&pair.1);
        let pt_owner = self.point_owner();
        let ids: Vec<PreFlagId> = self.preflags.keys().copied().collect();
        let index: BTreeMap<PreFlagId, usize> =
            ids.iter().enumerate().map(|(i, pf)| (*pf, i)).collect();
        let mut uf = UnionFind::new(ids.len());
        let mut touched: BTreeSet<PreFlagId> = BTreeSet::new();
        let join = |uf: &mut UnionFind,
                    touched: &mut BTreeSet<PreFlagId>,
                    a: PointId,
                    b: PointId,
                    pair: ColorPair| {
            if inside(pair) {
                let (fa, fb) = (pt_owner[&a], pt_owner[&b]);
                uf.union(index[&fa], index[&fb]);
                touched.insert(fa);
                touched.insert(fb);
            }
        };
        for sv in self.vertices.values() {
            for bow in &sv.bows {
                join(&mut uf, &mut touched, bow.a, bow.b, bow.pair);
            }
        }
        for se in self.edges.values() {
            for (a, b, pair) in &se.strands {
                join(&mut uf, &mut touched, *a, *b, *pair);
            }
        }
        let flag_of = self.flag_of_preflag();
        let mut groups: BTreeMap<usize, Vec<PreFlagId>> = BTreeMap::new();
        for pf in &touched {
            groups.entry(uf.find(index[pf])).or_default().push(*pf);
        }
        let mut sorted: [u8; 3] = colors;
        sorted.sort_unstable();
        Ok(groups
            .into_values()
            .map(|preflags| {
                let open = preflags.iter().any(|pf| flag_of.contains_key(pf));
                Bubble { colors: sorted, preflags, open }
            })
            .collect())
    }

    /// All color triples of the rank-3 color set {0,1,2,3}.
    pub fn color_triples(&self) -> Vec<[u8; 3]> {
        let d = self.rank;
        let mut out = Vec::new();
        for a in 0..=d {
            for b in (a + 1)..=d {
                for c in (b + 1)..=d {
                    out.push([a, b, c]);
                }
            }
        }
        out
    }

    /// `(B_int, B_ext)`: closed and open bubble counts over all triples.
    pub fn all_bubbles(&self) -> Result<(usize, usize)> {
        let (mut b_int, mut b_ext) = (0, 0);
        for t in self.color_triples() {
            for b in self.bubbles(t)? {
                if b.open {
                    b_ext += 1;
                } else {
                    b_int += 1;
                }
            }
        }
        Ok((b_int, b_ext))
    }

    /// The boundary graph: flags as vertices, open faces as edges.
    pub fn boundary(&self) -> BoundaryGraph {
        let vertices: BTreeMap<u32, u8> =
            self.flags.iter().map(|(f, sf)| (*f, sf.color)).collect();
        let mut edges: Vec<(ColorPair, u32, u32)> = self
            .faces()
            .open
            .iter()
            .map(|face| {
                let (a, b) = face.endpoints.expect("open faces carry endpoints");
                (face.pair, a, b)
            })
            .collect();
        edges.sort_unstable();
        BoundaryGraph { vertices, edges }
    }

    /// Boundary counts `(C_∂, E_∂, F_∂, f)`.
    ///
    /// `F_∂` sums, per color triple, the cycles of the boundary graph
    /// restricted to edges with pairs inside the triple; by the bubble
    /// decomposition this equals the total boundary-component count of the
    /// pinched open bubbles, which is recomputed that way and cross-checked.
    pub fn boundary_counts(&self) -> Result<(usize, usize, usize, usize)> {
        let bnd = self.boundary();
        let c_bnd = bnd.component_count();
        let e_bnd = bnd.edges.len();
        let f = bnd.vertices.len();
        if self.rank != 3 {
            // F_∂ needs the rank-3 bubble structure; report it as 0 there.
            return Ok((c_bnd, e_bnd, 0, f));
        }
        let mut f_bnd = 0usize;
        for t in self.color_triples() {
            let tset: BTreeSet<u8> = t.iter().copied().collect();
            let ids: Vec<u32> = bnd.vertices.keys().copied().collect();
            let index: BTreeMap<u32, usize> =
                ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
            let mut uf = UnionFind::new(ids.len());
            let mut touched: BTreeSet<u32> = BTreeSet::new();
            for (pair, a, b) in &bnd.edges {
                if tset.contains(&pair.0) && tset.contains(&pair.1) {
                    uf.union(index[a], index[b]);
                    touched.insert(*a);
                    touched.insert(*b);
                }
            }
            let mut roots: BTreeSet<usize> = BTreeSet::new();
            for v in &touched {
                roots.insert(uf.find(index[v]));
            }
            f_bnd += roots.len();
        }
        // Cross-check against the per-bubble boundary components.
        let mut per_bubble = 0usize;
        for t in self.color_triples() {
            let tset: BTreeSet<u8> = t.iter().copied().collect();
            for b in self.bubbles(t)? {
                if !b.open {
                    continue;
                }
                let members: BTreeSet<PreFlagId> = b.preflags.iter().copied().collect();
                let flag_of = self.flag_of_preflag();
                let flags: Vec<u32> = members
                    .iter()
                    .filter_map(|pf| flag_of.get(pf).copied())
                    .collect();
                let index: BTreeMap<u32, usize> =
                    flags.iter().enumerate().map(|(i, f)| (*f, i)).collect();
                let mut uf = UnionFind::new(flags.len());
                let mut touched: BTreeSet<u32> = BTreeSet::new();
                for (pair, x, y) in &bnd.edges {
                    if tset.contains(&pair.0)
                        && tset.contains(&pair.1)
                        && index.contains_key(x)
                        && index.contains_key(y)
                    {
                        uf.union(index[x], index[y]);
                        touched.insert(*x);
                        touched.insert(*y);
                    }
                }
                let mut roots: BTreeSet<usize> = BTreeSet::new();
                for v in &touched {
                    roots.insert(uf.find(index[v]));
                }
                per_bubble += roots.len();
            }
        }
        if per_bubble != f_bnd {
            return Err(Error::Internal(format!(
                "boundary face count disagreement: per-triple {f_bnd} vs per-bubble {per_bubble}"
            )));
        }
        Ok((c_bnd, e_bnd, f_bnd, f))
    }

    /// The complete cell-count bundle.
    pub fn cell_counts(&self) -> Result<CellCounts> {
        let faces = self.faces();
        let (b_int, b_ext) = self.all_bubbles()?;
        let (c_bnd, e_bnd, f_bnd, f) = self.boundary_counts()?;
        Ok(CellCounts {
            k: self.component_count(),
            v: self.vertex_count(),
            e: self.edges.len(),
            f_int: faces.closed.len(),
            f_ext: faces.open.len(),
            b_int,
            b_ext,
            c_bnd,
            e_bnd,
            f_bnd,
            flags: f,
        })
    }

    /// ζ = 3(E−V) + 2(B_int+B_ext−F_int) of the disc-stripped representative
    /// (each trivial disc would shift it by −5 while leaving the invariant's
    /// z-exponent 5k+ζ unchanged). Non-negativity is guaranteed for rank-3
    /// w-colored graphs and checked here.
    pub fn zeta(&self) -> Result<i64> {
        let stripped = self.remove_discs();
        let c = stripped.cell_counts()?;
        let zeta = 3 * (c.e as i64 - c.v as i64) + 2 * (c.b_int as i64 + c.b_ext as i64 - c.f_int as i64);
        if self.rank == 3 && matches!(self.mode, Mode::ColoredTensor | Mode::WColored) && zeta < 0 {
            return Err(Error::Internal(format!("negative zeta {zeta}: {c:?}")));
        }
        Ok(zeta)
    }

    /// ζ′ = ζ − 2C_∂ ≥ 0.
    pub fn zeta_prime(&self) -> Result<i64> {
        let z = self.zeta()?;
        let (c_bnd, _, _, _) = self.boundary_counts()?;
        let zp = z - 2 * c_bnd as i64;
        if self.rank == 3 && matches!(self.mode, Mode::ColoredTensor | Mode::WColored) && zp < 0 {
            return Err(Error::Internal(format!("negative zeta' {zp}")));
        }
        Ok(zp)
    }

    /// ζ″ = ζ − 3C_∂ ≥ 0.
    pub fn zeta_second(&self) -> Result<i64> {
        let z = self.zeta()?;
        let (c_bnd, _, _, _) = self.boundary_counts()?;
        let zs = z - 3 * c_bnd as i64;
        if self.rank == 3 && matches!(self.mode, Mode::ColoredTensor | Mode::WColored) && zs < 0 {
            return Err(Error::Internal(format!("negative zeta'' {zs}")));
        }
        Ok(zs)
    }

    /// Replace an edge by two flags of its color, one per end pre-flag.
    /// Cutting preserves coloredness, so the mode is unchanged.
    pub fn cut(&self, e: u32) -> Result<StrandedGraph> {
        let se = self.edge(e)?.clone();
        let mut g = self.clone();
        g.edges.remove(&e);
        let f = g.flags.keys().next_back().map_or(0, |m| m + 1);
        g.flags.insert(f, StrandedFlag { preflag: se.ends.0, color: se.color });
        g.flags.insert(f + 1, StrandedFlag { preflag: se.ends.1, color: se.color });
        Ok(g)
    }

    /// The spanning c-subgraph keeping exactly the edges in `keep`: every
    /// other edge is cut, leaving a flag at each of its former ends.
    pub fn spanning_c_subgraph(&self, keep: &BTreeSet<u32>) -> StrandedGraph {
        let mut g = self.clone();
        let mut next_flag = g.flags.keys().next_back().map_or(0, |m| m + 1);
        let doomed: Vec<u32> = g.edges.keys().filter(|e| !keep.contains(e)).copied().collect();
        for e in doomed {
            let se = g.edges.remove(&e).unwrap();
            g.flags.insert(next_flag, StrandedFlag { preflag: se.ends.0, color: se.color });
            g.flags.insert(next_flag + 1, StrandedFlag { preflag: se.ends.1, color: se.color });
            next_flag += 2;
        }
        g
    }

    fn contracted_mode(&self) -> Mode {
        match self.mode {
            Mode::ColoredTensor | Mode::WColored => Mode::WColored,
            Mode::Stranded => Mode::Stranded,
        }
    }

    /// Classify an edge: bridge / regular via the collapsed graph; for
    /// self-loops, `p` counts the direct bows between the two end pre-flags
    /// (each closes a two-segment inner face with one of the parallel
    /// strands), `sectors` are the bow-components of the remaining
    /// pre-flags, and triviality is decided by the contraction criterion:
    /// the loop is trivial iff soft contraction raises the component count
    /// by exactly 2 (full separation; p ≥ 2 always qualifies).
    pub fn classify_edge(&self, e: u32) -> Result<StrandedEdgeClass> {
        let se = self.edge(e)?;
        let owner = self.preflag_owner();
        let (va, vb) = (owner[&se.ends.0], owner[&se.ends.1]);
        if va != vb {
            let simple = self.collapsed_simple();
            return Ok(match simple.classify_edge(e)? {
                crate::simple::EdgeClass::Bridge => StrandedEdgeClass::Bridge,
                _ => StrandedEdgeClass::Regular,
            });
        }
        let (fa, fb) = se.ends;
        let sv = &self.vertices[&va];
        let pt_owner = self.point_owner();
        let p = sv
            .bows
            .iter()
            .filter(|bow| {
                let (oa, ob) = (pt_owner[&bow.a], pt_owner[&bow.b]);
                (oa == fa && ob == fb) || (oa == fb && ob == fa)
            })
            .count() as u8;
        // Sectors: bow-components of the vertex's other pre-flags.
        let rest: Vec<PreFlagId> = sv
            .preflags
            .iter()
            .filter(|pf| **pf != fa && **pf != fb)
            .copied()
            .collect();
        let index: BTreeMap<PreFlagId, usize> =
            rest.iter().enumerate().map(|(i, pf)| (*pf, i)).collect();
        let mut uf = UnionFind::new(rest.len());
        for bow in &sv.bows {
            let (oa, ob) = (pt_owner[&bow.a], pt_owner[&bow.b]);
            if let (Some(ia), Some(ib)) = (index.get(&oa), index.get(&ob)) {
                uf.union(*ia, *ib);
            }
        }
        let mut groups: BTreeMap<usize, Vec<PreFlagId>> = BTreeMap::new();
        for pf in &rest {
            groups.entry(uf.find(index[pf])).or_default().push(*pf);
        }
        let sectors: Vec<Vec<PreFlagId>> = groups.into_values().collect();
        let trivial =
            self.contract_soft(e)?.component_count() == self.component_count() + 2;
        Ok(StrandedEdgeClass::SelfLoop { p, trivial, sectors })
    }

    /// Soft contraction: remove the edge and its two end pre-flags, splice
    /// every outer strand chain through the disappearing points into a new
    /// bow, and turn each fully inner chain (a cycle) into a trivial disc.
    /// A non-loop contraction merges the two end vertices into one (the
    /// result is checked to be bow-connected); a self-loop contraction
    /// splits the vertex into one new vertex per bow-connected family.
    pub fn contract_soft(&self, e: u32) -> Result<StrandedGraph> {
        let se = self.edge(e)?.clone();
        let owner = self.preflag_owner();
        let (fa, fb) = se.ends;
        let (va, vb) = (owner[&fa], owner[&fb]);
        let is_loop = va == vb;
        let pt_owner = self.point_owner();

        let dying: BTreeSet<PointId> = [fa, fb]
            .iter()
            .flat_map(|pf| self.preflags[pf].points.iter().map(|(pt, _)| *pt))
            .collect();
        let mut strand_link: BTreeMap<PointId, (PointId, ColorPair)> = BTreeMap::new();
        for (a, b, pair) in &se.strands {
            strand_link.insert(*a, (*b, *pair));
            strand_link.insert(*b, (*a, *pair));
        }
        // Bows of the affected vertex/vertices.
        let affected: Vec<u32> = if is_loop { vec![va] } else { vec![va, vb] };
        let mut bow_link: BTreeMap<PointId, (PointId, ColorPair)> = BTreeMap::new();
        let mut kept_bows: Vec<Bow> = Vec::new();
        for v in &affected {
            for bow in &self.vertices[v].bows {
                if dying.contains(&bow.a) || dying.contains(&bow.b) {
                    bow_link.insert(bow.a, (bow.b, bow.pair));
                    bow_link.insert(bow.b, (bow.a, bow.pair));
                } else {
                    kept_bows.push(*bow);
                }
            }
        }

        // Walk chains from surviving bow-ends: bow into the dying zone, then
        // alternate strand/bow until surfacing at a surviving point.
        let mut new_bows: Vec<Bow> = Vec::new();
        let mut consumed: BTreeSet<PointId> = BTreeSet::new();
        for (start, (first, pair)) in &bow_link {
            if dying.contains(start) || consumed.contains(first) {
                continue;
            }
            let mut here = *first;
            consumed.insert(here);
            loop {
                let (next, _) = strand_link[&here];
                consumed.insert(next);
                match bow_link.get(&next) {
                    Some((out, _)) if !dying.contains(out) => {
                        new_bows.push(Bow { a: *start, b: *out, pair: *pair });
                        break;
                    }
                    Some((further, _)) => {
                        consumed.insert(*further);
                        here = *further;
                    }
                    None => {
                        return Err(Error::Internal(format!(
                            "dangling strand chain while contracting edge {e}"
                        )))
                    }
                }
            }
        }
        // Unconsumed dying points form inner cycles: one trivial disc each.
        let mut inner_pairs: Vec<ColorPair> = Vec::new();
        for pt in &dying {
            if consumed.contains(pt) {
                continue;
            }
            let mut here = *pt;
            loop {
                consumed.insert(here);
                let (across, pair) = strand_link[&here];
                consumed.insert(across);
                let (back, _) = bow_link[&across];
                if back == *pt {
                    inner_pairs.push(pair);
                    break;
                }
                here = back;
            }
        }

        let mut g = self.clone();
        g.edges.remove(&e);
        g.preflags.remove(&fa);
        g.preflags.remove(&fb);
        let mut next_disc = g.discs.keys().next_back().map_or(0, |m| m + 1);
        for pair in inner_pairs {
            g.discs.insert(next_disc, pair);
            next_disc += 1;
        }

        // Assemble the merged pre-flag sequence: first vertex split at fa,
        // then (for non-loops) the second split at fb.
        let split_after = |order: &[PreFlagId], at: PreFlagId| -> Vec<PreFlagId> {
            let p = order.iter().position(|pf| *pf == at).expect("end pre-flag on vertex");
            (1..order.len()).map(|i| order[(p + i) % order.len()]).collect()
        };
        let merged: Vec<PreFlagId> = if is_loop {
            let seq = split_after(&self.vertices[&va].preflags, fa);
            seq.into_iter().filter(|pf| *pf != fb).collect()
        } else {
            let mut seq = split_after(&self.vertices[&va].preflags, fa);
            seq.extend(split_after(&self.vertices[&vb].preflags, fb));
            seq
        };
        for v in &affected {
            g.vertices.remove(v);
        }

        if merged.is_empty() {
            g.mode = self.contracted_mode();
            return Ok(g);
        }

        let mut all_bows = kept_bows;
        all_bows.extend(new_bows);

        // Group the surviving pre-flags into bow-connected families.
        let index: BTreeMap<PreFlagId, usize> =
            merged.iter().enumerate().map(|(i, pf)| (*pf, i)).collect();
        let mut uf = UnionFind::new(merged.len());
        for bow in &all_bows {
            uf.union(index[&pt_owner[&bow.a]], index[&pt_owner[&bow.b]]);
        }
        let mut groups: BTreeMap<usize, Vec<PreFlagId>> = BTreeMap::new();
        for pf in &merged {
            groups.entry(uf.find(index[pf])).or_default().push(*pf);
        }
        let mut families: Vec<Vec<PreFlagId>> = groups.into_values().collect();
        families.sort_by_key(|fam| fam.iter().min().copied());

        if !is_loop && families.len() != 1 {
            return Err(Error::Internal(format!(
                "contracting non-loop edge {e} split the merged vertex into {} parts",
                families.len()
            )));
        }

        let mut ids = vec![va.min(vb)];
        let mut fresh = self.vertices.keys().next_back().map_or(0, |m| m + 1);
        while ids.len() < families.len() {
            ids.push(fresh);
            fresh += 1;
        }
        for (id, family) in ids.into_iter().zip(families) {
            let members: BTreeSet<PreFlagId> = family.iter().copied().collect();
            let order: Vec<PreFlagId> =
                merged.iter().filter(|pf| members.contains(pf)).copied().collect();
            let bows: Vec<Bow> = all_bows
                .iter()
                .filter(|bow| members.contains(&pt_owner[&bow.a]))
                .copied()
                .collect();
            g.vertices.insert(id, StrandedVertex { preflags: order, bows });
        }
        g.mode = self.contracted_mode();
        Ok(g)
    }

    /// Hard contraction: soft contraction without the new trivial discs.
    pub fn contract_hard(&self, e: u32) -> Result<StrandedGraph> {
        let before: BTreeSet<u32> = self.discs.keys().copied().collect();
        let mut g = self.contract_soft(e)?;
        g.discs.retain(|d, _| before.contains(d));
        Ok(g)
    }

    /// Contract every edge (always the lowest id first), yielding a
    /// vertex-only graph.
    pub fn full_contract(&self) -> Result<StrandedGraph> {
        let mut g = self.clone();
        while let Some(e) = g.edges.keys().next().copied() {
            g = g.contract_soft(e)?;
        }
        Ok(g)
    }

    /// Drop all trivial discs (the class representative with none).
    pub fn remove_discs(&self) -> StrandedGraph {
        let mut g = self.clone();
        g.discs.clear();
        g
    }

    /// Add trivial discs with the given color pairs.
    pub fn add_discs(&self, pairs: &[ColorPair]) -> StrandedGraph {
        let mut g = self.clone();
        let mut next = g.discs.keys().next_back().map_or(0, |m| m + 1);
        for pair in pairs {
            g.discs.insert(next, *pair);
            next += 1;
        }
        g.mode = self.contracted_mode();
        g
    }

    /// Next free id in each space: (vertex, pre-flag, point, edge, flag, disc).
    pub fn next_ids(&self) -> (u32, u32, u32, u32, u32, u32) {
        let next = |m: Option<&u32>| m.map_or(0, |x| x + 1);
        let pt = self
            .preflags
            .values()
            .flat_map(|p| p.points.iter().map(|(pt, _)| *pt))
            .max()
            .map_or(0, |m| m + 1);
        (
            next(self.vertices.keys().next_back()),
            next(self.preflags.keys().next_back()),
            pt,
            next(self.edges.keys().next_back()),
            next(self.flags.keys().next_back()),
            next(self.discs.keys().next_back()),
        )
    }

    /// Uniform shift of all six id spaces.
    pub fn shift_ids(&self, dv: u32, dpf: u32, dpt: u32, de: u32, df: u32, dd: u32) -> StrandedGraph {
        let mut g = StrandedGraph {
            rank: self.rank,
            mode: self.mode,
            vertices: BTreeMap::new(),
            preflags: BTreeMap::new(),
            edges: BTreeMap::new(),
            flags: BTreeMap::new(),
            discs: BTreeMap::new(),
        };
        for (v, sv) in &self.vertices {
            g.vertices.insert(
                v + dv,
                StrandedVertex {
                    preflags: sv.preflags.iter().map(|pf| pf + dpf).collect(),
                    bows: sv
                        .bows
                        .iter()
                        .map(|b| Bow { a: b.a + dpt, b: b.b + dpt, pair: b.pair })
                        .collect(),
                },
            );
        }
        for (pf, p) in &self.preflags {
            g.preflags.insert(
                pf + dpf,
                PreFlag {
                    color: p.color,
                    points: p.points.iter().map(|(pt, pair)| (pt + dpt, *pair)).collect(),
                },
            );
        }
        for (e, se) in &self.edges {
            g.edges.insert(
                e + de,
                StrandedEdge {
                    ends: (se.ends.0 + dpf, se.ends.1 + dpf),
                    strands: se
                        .strands
                        .iter()
                        .map(|(a, b, pair)| (a + dpt, b + dpt, *pair))
                        .collect(),
                    color: se.color,
                },
            );
        }
        for (f, sf) in &self.flags {
            g.flags.insert(f + df, StrandedFlag { preflag: sf.preflag + dpf, color: sf.color });
        }
        for (d, pair) in &self.discs {
            g.discs.insert(d + dd, *pair);
        }
        g
    }

    /// Disjoint union: `other`'s ids are shifted past this graph's maxima.
    pub fn disjoint_union(&self, other: &StrandedGraph) -> Result<StrandedGraph> {
        if self.rank != other.rank {
            return Err(Error::FamilyMismatch(format!(
                "cannot union rank {} with rank {}",
                self.rank, other.rank
            )));
        }
        let (dv, dpf, dpt, de, df, dd) = self.next_ids();
        let shifted = other.shift_ids(dv, dpf, dpt, de, df, dd);
        let mut g = self.clone();
        g.vertices.extend(shifted.vertices);
        g.preflags.extend(shifted.preflags);
        g.edges.extend(shifted.edges);
        g.flags.extend(shifted.flags);
        g.discs.extend(shifted.discs);
        g.mode = match (self.mode, other.mode) {
            (Mode::Stranded, _) | (_, Mode::Stranded) => Mode::Stranded,
            (Mode::WColored, _) | (_, Mode::WColored) => Mode::WColored,
            _ => Mode::ColoredTensor,
        };
        Ok(g)
    }

    /// Stable encoding of the disc-stripped representative, rotation- and
    /// bow-order-normalized: two graphs reached along different cut/contract
    /// orders of the same parent key identically. Used for memoization.
    pub fn canonical_key(&self) -> String {
        use std::fmt::Write;
        let g = self.remove_discs();
        let mut s = format!("r{}", g.rank);
        for (v, sv) in &g.vertices {
            let order = &sv.preflags;
            let rotated: Vec<PreFlagId> = if order.is_empty() {
                Vec::new()
            } else {
                let start = order
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, pf)| **pf)
                    .map(|(i, _)| i)
                    .unwrap();
                (0..order.len()).map(|i| order[(start + i) % order.len()]).collect()
            };
            let mut bows: Vec<(PointId, PointId, ColorPair)> = sv
                .bows
                .iter()
                .map(|b| (b.a.min(b.b), b.a.max(b.b), b.pair))
                .collect();
            bows.sort_unstable();
            write!(s, ";v{v}={rotated:?}|{bows:?}").unwrap();
        }
        for (pf, p) in &g.preflags {
            write!(s, ";p{pf}={}|{:?}", p.color, p.points).unwrap();
        }
        for (e, se) in &g.edges {
            write!(s, ";e{e}={}|{:?}|{:?}", se.color, se.ends, se.strands).unwrap();
        }
        for (f, sf) in &g.flags {
            write!(s, ";f{f}={}|{}", sf.color, sf.preflag).unwrap();
        }
        s
    }

    /// Class comparison per the disc equivalence: identical structure after
    /// stripping discs, ignoring vertex ids and pre-flag cyclic layout
    /// (which contraction order shuffles), comparing the partition of
    /// pre-flags into vertices, the bow set, edges and flags.
    pub fn equivalent_up_to_discs(&self, other: &StrandedGraph) -> bool {
        fn shape(
            g: &StrandedGraph,
        ) -> (
            u8,
            Vec<Vec<PreFlagId>>,
            Vec<(PointId, PointId, ColorPair)>,
            BTreeMap<PreFlagId, PreFlag>,
            BTreeMap<u32, StrandedEdge>,
            BTreeMap<u32, StrandedFlag>,
        ) {
            let mut parts: Vec<Vec<PreFlagId>> = g
                .vertices
                .values()
                .map(|sv| {
                    let mut pfs = sv.preflags.clone();
                    pfs.sort_unstable();
                    pfs
                })
                .collect();
            parts.sort();
            let mut bows: Vec<(PointId, PointId, ColorPair)> = g
                .vertices
                .values()
                .flat_map(|sv| sv.bows.iter())
                .map(|b| (b.a.min(b.b), b.a.max(b.b), b.pair))
                .collect();
            bows.sort_unstable();
            (g.rank, parts, bows, g.preflags.clone(), g.edges.clone(), g.flags.clone())
        }
        shape(self) == shape(other)
    }
}

/// Expand a compact bipartite colored description into a full stranded
/// graph: each vertex becomes D+1 pre-flags (one per color, D points each,
/// pairs `{c,x}`) bowed in the complete-graph pattern; each edge joins the
/// color-c pre-flags of a positive and a negative vertex by parallel
/// strands; flags occupy the remaining colors, which must all be used.
pub fn build_colored_tensor(compact: &CompactColored, rank: u8) -> Result<StrandedGraph> {
    if !(2..=6).contains(&rank) {
        return Err(Error::Invalid(format!("unsupported rank {rank}")));
    }
    let d = rank;
    let mut g = StrandedGraph {
        rank,
        mode: Mode::ColoredTensor,
        vertices: BTreeMap::new(),
        preflags: BTreeMap::new(),
        edges: BTreeMap::new(),
        flags: BTreeMap::new(),
        discs: BTreeMap::new(),
    };
    // Pre-flag and point ids are assigned deterministically per vertex/color.
    let mut pf_id: BTreeMap<(u32, u8), PreFlagId> = BTreeMap::new();
    let mut pt_id: BTreeMap<(u32, u8, u8), PointId> = BTreeMap::new();
    let mut next_pf = 0u32;
    let mut next_pt = 0u32;
    for (v, _) in &compact.vertices {
        let mut preflags = Vec::new();
        for c in 0..=d {
            let id = next_pf;
            next_pf += 1;
            pf_id.insert((*v, c), id);
            let mut points = Vec::new();
            for x in 0..=d {
                if x == c {
                    continue;
                }
                let pt = next_pt;
                next_pt += 1;
                pt_id.insert((*v, c, x), pt);
                points.push((pt, color_pair(c, x)));
            }
            g.preflags.insert(id, PreFlag { color: c, points });
            preflags.push(id);
        }
        let mut bows = Vec::new();
        for a in 0..=d {
            for b in (a + 1)..=d {
                bows.push(Bow {
                    a: pt_id[&(*v, a, b)],
                    b: pt_id[&(*v, b, a)],
                    pair: color_pair(a, b),
                });
            }
        }
        g.vertices.insert(*v, StrandedVertex { preflags, bows });
    }

    let mut used: BTreeMap<(u32, u8), String> = BTreeMap::new();
    let mut claim = |v: u32, c: u8, what: String| -> Result<()> {
        if c > d {
            return Err(Error::Invalid(format!("{what} uses color {c} beyond rank {d}")));
        }
        if !compact.vertices.contains_key(&v) {
            return Err(Error::Invalid(format!("{what} references unknown vertex {v}")));
        }
        if let Some(prev) = used.insert((v, c), what.clone()) {
            return Err(Error::Invalid(format!(
                "color clash at vertex {v}: {prev} and {what} both use color {c}"
            )));
        }
        Ok(())
    };
    for (e, (c, u, v)) in &compact.edges {
        claim(*u, *c, format!("edge {e}"))?;
        claim(*v, *c, format!("edge {e}"))?;
        if compact.vertices[u] == compact.vertices[v] {
            return Err(Error::Invalid(format!(
                "edge {e} joins two vertices of the same sign"
            )));
        }
        let (fa, fb) = (pf_id[&(*u, *c)], pf_id[&(*v, *c)]);
        let mut strands = Vec::new();
        for x in 0..=d {
            if x == *c {
                continue;
            }
            strands.push((pt_id[&(*u, *c, x)], pt_id[&(*v, *c, x)], color_pair(*c, x)));
        }
        g.edges.insert(*e, StrandedEdge { ends: (fa, fb), strands, color: *c });
    }
    for (f, (c, v)) in &compact.flags {
        claim(*v, *c, format!("flag {f}"))?;
        g.flags.insert(*f, StrandedFlag { preflag: pf_id[&(*v, *c)], color: *c });
    }
    for (v, _) in &compact.vertices {
        for c in 0..=d {
            if !used.contains_key(&(*v, c)) {
                return Err(Error::Invalid(format!(
                    "vertex {v} leaves color {c} unused (attach an edge or flag)"
                )));
            }
        }
    }
    g.validate()?;
    Ok(g)
}

/// Assemble a stranded graph from explicit parts (mode `Stranded`: the
/// generic family, on which only the structural operations apply).
#[allow(clippy::too_many_arguments)]
pub fn assemble_stranded(
    rank: u8,
    vertices: BTreeMap<u32, StrandedVertex>,
    preflags: BTreeMap<PreFlagId, PreFlag>,
    edges: BTreeMap<u32, StrandedEdge>,
    flags: BTreeMap<u32, StrandedFlag>,
    discs: BTreeMap<u32, ColorPair>,
) -> Result<StrandedGraph> {
    let g = StrandedGraph { rank, mode: Mode::Stranded, vertices, preflags, edges, flags, discs };
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The closed melon: two vertices of opposite sign joined by four edges
    /// colored 0..3.
    pub(crate) fn melon() -> StrandedGraph {
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, false);
        for color in 0..4u8 {
            c.edges.insert(color as u32, (color, 0, 1));
        }
        build_colored_tensor(&c, 3).unwrap()
    }

    /// Two vertices, a single color-0 edge, six flags for the rest.
    fn melon_single_edge() -> StrandedGraph {
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, false);
        c.edges.insert(0, (0, 0, 1));
        let mut fid = 0;
        for v in 0..2u32 {
            for color in 1..4u8 {
                c.flags.insert(fid, (color, v));
                fid += 1;
            }
        }
        build_colored_tensor(&c, 3).unwrap()
    }

    /// Two bare vertices, all eight pre-flags flagged.
    fn vertex_pair() -> StrandedGraph {
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, false);
        let mut fid = 0;
        for v in 0..2u32 {
            for color in 0..4u8 {
                c.flags.insert(fid, (color, v));
                fid += 1;
            }
        }
        build_colored_tensor(&c, 3).unwrap()
    }

    #[test]
    fn build_validates_shape() {
        let g = melon();
        assert_eq!(g.proper_vertex_count(), 2);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.preflags.len(), 8);
        g.validate().unwrap();

        // Color clash.
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, false);
        c.edges.insert(0, (0, 0, 1));
        c.edges.insert(1, (0, 0, 1));
        assert!(build_colored_tensor(&c, 3).is_err());

        // Same-sign edge.
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, true);
        for color in 0..4u8 {
            c.edges.insert(color as u32, (color, 0, 1));
        }
        assert!(build_colored_tensor(&c, 3).is_err());

        // Missing color.
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        c.vertices.insert(1, false);
        c.edges.insert(0, (0, 0, 1));
        assert!(build_colored_tensor(&c, 3).is_err());
    }

    #[test]
    fn melon_cells_frozen() {
        // Full melon: F_int = 6 (one face per color pair), B_int = 4 (one
        // closed bubble per triple), nothing open.
        let g = melon();
        let c = g.cell_counts().unwrap();
        assert_eq!((c.k, c.v, c.e), (1, 2, 4));
        assert_eq!((c.f_int, c.f_ext), (6, 0));
        assert_eq!((c.b_int, c.b_ext), (4, 0));
        assert_eq!((c.c_bnd, c.e_bnd, c.f_bnd, c.flags), (0, 0, 0, 0));
        assert_eq!(g.zeta().unwrap(), 2);
        assert_eq!(g.zeta_prime().unwrap(), 2);
    }

    #[test]
    fn melon_single_edge_cells_frozen() {
        // One edge, six flags: B_ext = 5, C_∂ = 1, F_∂ = 5, E_∂ = 9, f = 6.
        let g = melon_single_edge();
        let c = g.cell_counts().unwrap();
        assert_eq!((c.k, c.v, c.e), (1, 2, 1));
        assert_eq!((c.f_int, c.f_ext), (0, 9));
        assert_eq!((c.b_int, c.b_ext), (0, 5));
        assert_eq!((c.c_bnd, c.e_bnd, c.f_bnd, c.flags), (1, 9, 5, 6));
    }

    #[test]
    fn vertex_pair_cells_frozen() {
        // Vertex-only pair: B_ext = 8, C_∂ = 2, F_∂ = 8, E_∂ = 12, f = 8.
        let g = vertex_pair();
        let c = g.cell_counts().unwrap();
        assert_eq!((c.k, c.v, c.e), (2, 2, 0));
        assert_eq!((c.f_int, c.f_ext), (0, 12));
        assert_eq!((c.b_int, c.b_ext), (0, 8));
        assert_eq!((c.c_bnd, c.e_bnd, c.f_bnd, c.flags), (2, 12, 8, 8));
    }

    #[test]
    fn single_vertex_four_flags_cells() {
        // Half the pair: 6 open faces, C_∂ = 1, E_∂ = 6, F_∂ = 4.
        let mut c = CompactColored::default();
        c.vertices.insert(0, true);
        for color in 0..4u8 {
            c.flags.insert(color as u32, (color, 0));
        }
        let g = build_colored_tensor(&c, 3).unwrap();
        let cc = g.cell_counts().unwrap();
        assert_eq!((cc.f_int, cc.f_ext), (0, 6));
        assert_eq!((cc.c_bnd, cc.e_bnd, cc.f_bnd, cc.flags), (1, 6, 4, 4));
        assert_eq!((cc.b_int, cc.b_ext), (0, 4));
    }

    #[test]
    fn faces_carry_uniform_pairs_and_cover_points() {
        let g = melon();
        let faces = g.faces();
        let mut pairs: Vec<ColorPair> = faces.closed.iter().map(|f| f.pair).collect();
        pairs.sort_unstable();
        let expect: Vec<ColorPair> = (0..4u8)
            .flat_map(|a| ((a + 1)..4).map(move |b| (a, b)))
            .collect();
        assert_eq!(pairs, expect, "one closed face per color pair");
        let total_points: usize = faces.closed.iter().map(|f| f.points.len()).sum();
        assert_eq!(total_points, 24, "each of 8 preflags x 3 points appears once");
    }

    #[test]
    fn bubble_edge_and_face_sums() {
        // Σ_b E_b = 3E and Σ_b F_int;b = 2F_int over all bubbles (colored
        // identities used by the zeta bound).
        let g = melon();
        let mut edge_sum = 0usize;
        for t in g.color_triples() {
            let tset: BTreeSet<u8> = t.iter().copied().collect();
            for se in g.edges.values() {
                // A stranded edge contributes one ribbon edge to the bubble
                // of each triple containing its color: count strands with
                // pair inside the triple, halved... each edge has exactly 2
                // strands inside a triple containing its color.
                let inside = se
                    .strands
                    .iter()
                    .filter(|(_, _, p)| tset.contains(&p.0) && tset.contains(&p.1))
                    .count();
                assert!(inside == 0 || inside == 2);
                edge_sum += inside / 2;
            }
        }
        assert_eq!(edge_sum, 3 * g.edge_count());

        let faces = g.faces();
        let mut face_sum = 0usize;
        for t in g.color_triples() {
            let tset: BTreeSet<u8> = t.iter().copied().collect();
            face_sum += faces
                .closed
                .iter()
                .filter(|f| !f.points.is_empty() && tset.contains(&f.pair.0) && tset.contains(&f.pair.1))
                .count();
        }
        assert_eq!(face_sum, 2 * faces.closed.len());
    }

    #[test]
    fn cut_creates_two_flags() {
        let g = melon();
        let cut = g.cut(0).unwrap();
        assert_eq!(cut.flag_count(), 2);
        assert_eq!(cut.edge_count(), 3);
        assert_eq!(cut.mode(), Mode::ColoredTensor, "cutting preserves coloredness");
        cut.validate().unwrap();
        assert!(cut.cut(0).is_err(), "second cut of the same edge");
        let sub = g.spanning_c_subgraph(&BTreeSet::from([1, 2]));
        assert_eq!((sub.edge_count(), sub.flag_count()), (2, 4));
        sub.validate().unwrap();
    }

    #[test]
    fn disjoint_union_shifts_everything() {
        let g = melon();
        let u = g.disjoint_union(&g).unwrap();
        u.validate().unwrap();
        assert_eq!(u.proper_vertex_count(), 4);
        assert_eq!(u.edge_count(), 8);
        assert_eq!(u.component_count(), 2);
        let (c, cu) = (g.cell_counts().unwrap(), u.cell_counts().unwrap());
        assert_eq!(cu.f_int, 2 * c.f_int);
        assert_eq!(cu.b_int, 2 * c.b_int);
        assert_eq!(u.zeta().unwrap(), 2 * g.zeta().unwrap());
    }

    #[test]
    fn canonical_key_ignores_discs_and_rotation() {
        let g = melon().contract_soft(0).unwrap();
        assert_eq!(g.canonical_key(), g.add_discs(&[(1, 2)]).canonical_key());
        assert_ne!(g.canonical_key(), melon().canonical_key());
        // Cut-then-contract and contract-then-cut reach the same graph.
        let a = g.cut(1).unwrap().contract_soft(2).unwrap();
        let b = g.contract_soft(2).unwrap().cut(1).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn classify_melon_edges_regular() {
        let g = melon();
        for e in g.edge_ids() {
            assert_eq!(g.classify_edge(e).unwrap(), StrandedEdgeClass::Regular);
        }
        let three = g.cut(3).unwrap();
        let two = three.cut(2).unwrap();
        let one = two.cut(1).unwrap();
        assert_eq!(one.classify_edge(0).unwrap(), StrandedEdgeClass::Bridge);
    }

    #[test]
    fn contract_melon_edge() {
        // Contraction of a regular melon edge merges the two vertices and
        // creates no discs; faces and boundary are preserved.
        let g = melon();
        let c = g.contract_soft(0).unwrap();
        c.validate().unwrap();
        assert_eq!(c.proper_vertex_count(), 1);
        assert_eq!(c.disc_count(), 0);
        assert_eq!(c.edge_count(), 3);
        assert_eq!(c.faces().closed.len(), g.faces().closed.len());
        assert_eq!(c.boundary(), g.boundary());
        assert_eq!(c.mode(), Mode::WColored);
    }

    #[test]
    fn three_inner_loop_contracts_to_discs() {
        // Contract melon edges 0,1,2; the last edge is a 3-inner self-loop
        // whose contraction destroys the vertex, leaving 3 more discs.
        let g = melon();
        let c = g
            .contract_soft(0)
            .and_then(|g| g.contract_soft(1))
            .and_then(|g| g.contract_soft(2))
            .unwrap();
        assert_eq!(c.proper_vertex_count(), 1);
        match c.classify_edge(3).unwrap() {
            StrandedEdgeClass::SelfLoop { p, trivial, sectors } => {
                assert_eq!(p, 3);
                assert!(trivial);
                assert!(sectors.is_empty());
            }
            other => panic!("expected a 3-inner self-loop, got {other:?}"),
        }
        let dk = c.contract_soft(3).unwrap();
        assert_eq!(dk.proper_vertex_count(), 0);
        assert_eq!(dk.disc_count() - c.disc_count(), 3);
        assert_eq!(dk.component_count(), c.component_count() + 2);
    }

    #[test]
    fn full_contract_boundary_preserved() {
        let g = melon_single_edge();
        let g0 = g.full_contract().unwrap();
        assert_eq!(g0.edge_count(), 0);
        assert_eq!(g0.boundary(), g.boundary());
        // Lemma on full contraction: the vertex graph is the boundary graph
        // up to discs — here it must still carry all six flags.
        assert_eq!(g0.flag_count(), 6);
    }

    #[test]
    fn disc_equivalence() {
        let g = melon().contract_soft(0).unwrap();
        let with = g.add_discs(&[(0, 1), (2, 3)]);
        assert!(g.equivalent_up_to_discs(&with));
        assert!(with.remove_discs().equivalent_up_to_discs(&g));
        assert_ne!(with, g, "strict equality still sees the discs");
        // Counts shift exactly by the disc rules.
        let (c0, c1) = (g.cell_counts().unwrap(), with.cell_counts().unwrap());
        assert_eq!(c1.k, c0.k + 2);
        assert_eq!(c1.v, c0.v + 2);
        assert_eq!(c1.f_int, c0.f_int + 2);
        assert_eq!((c1.b_int, c1.b_ext), (c0.b_int, c0.b_ext));
    }

    #[test]
    fn zeta_values() {
        assert_eq!(melon().zeta().unwrap(), 2);
        // Discs do not change the reported zeta (stripped representative).
        assert_eq!(melon().add_discs(&[(0, 1)]).zeta().unwrap(), 2);
        let g = melon_single_edge();
        let z = g.zeta().unwrap();
        let zp = g.zeta_prime().unwrap();
        let zs = g.zeta_second().unwrap();
        assert!(z >= 0 && zp >= 0 && zs >= 0);
        assert_eq!(zp, z - 2);
        assert_eq!(zs, z - 3);
    }
}
