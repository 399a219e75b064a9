//! On-disk graph interchange format.
//!
//! A graph file is a single JSON object with a format `version`, a `family`
//! tag, a `payload` in the family's schema, and — for w-colored graphs — a
//! `provenance` script recording how the graph was produced from a colored
//! tensor seed. W-colored-ness is provenance, not a property a file may
//! simply claim: loading a `w_colored` file replays its script through the
//! real cut/contract operations and rejects the file unless the replayed
//! graph coincides with the stored payload.
//!
//! All maps are keyed by numeric ids and serialize with stable ordering, so
//! rendering is byte-identical across runs. The schemas are documented under
//! `schemas/` in the repository root.

use crate::ribbon::RibbonFlagGraph;
use crate::simple::SimpleFlagGraph;
use crate::stranded::{
    assemble_stranded, build_colored_tensor, Bow, ColorPair, CompactColored, PreFlag,
    StrandedEdge, StrandedFlag, StrandedGraph, StrandedVertex,
};
use crate::{Error, Result};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Current (and only) graph file format version.
pub const FORMAT_VERSION: u32 = 1;

/// The family tag of a graph file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Simple,
    Ribbon,
    ColoredTensor,
    Stranded,
    WColored,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Simple => "simple",
            Family::Ribbon => "ribbon",
            Family::ColoredTensor => "colored_tensor",
            Family::Stranded => "stranded",
            Family::WColored => "w_colored",
        };
        f.write_str(name)
    }
}

/// Payload schema for abstract graphs with flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SimplePayload {
    #[serde(default)]
    pub vertices: Vec<u32>,
    #[serde(default)]
    pub edges: BTreeMap<u32, (u32, u32)>,
    #[serde(default)]
    pub flags: BTreeMap<u32, u32>,
}

impl SimplePayload {
    pub fn from_graph(g: &SimpleFlagGraph) -> SimplePayload {
        SimplePayload {
            vertices: g.vertices().collect(),
            edges: g
                .edge_ids()
                .into_iter()
                .map(|e| (e, g.edge_ends(e).expect("listed edge")))
                .collect(),
            flags: g.flags().collect(),
        }
    }

    pub fn to_graph(&self) -> Result<SimpleFlagGraph> {
        let mut g = SimpleFlagGraph::new();
        for &v in &self.vertices {
            g.add_vertex(v);
        }
        for (&e, &(u, v)) in &self.edges {
            g.add_edge(e, u, v)?;
        }
        for (&f, &v) in &self.flags {
            g.add_flag(f, v)?;
        }
        Ok(g)
    }
}

/// One ribbon edge in a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RibbonEdgePayload {
    pub ends: (u32, u32),
    #[serde(default)]
    pub twist: bool,
}

/// Payload schema for ribbon graphs: slot lists in vertex cyclic order,
/// edges between slots, flags occupying slots. `pinched` applies to every
/// flag at once, which is the only pinched state the operations produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RibbonPayload {
    #[serde(default)]
    pub vertices: BTreeMap<u32, Vec<u32>>,
    #[serde(default)]
    pub edges: BTreeMap<u32, RibbonEdgePayload>,
    #[serde(default)]
    pub flags: BTreeMap<u32, u32>,
    #[serde(default)]
    pub pinched: bool,
}

impl RibbonPayload {
    pub fn from_graph(g: &RibbonFlagGraph) -> RibbonPayload {
        let mut pinched = false;
        let mut flags = BTreeMap::new();
        for (f, flag) in g.flags() {
            pinched |= flag.pinched;
            flags.insert(f, flag.slot);
        }
        RibbonPayload {
            vertices: g.vertices().map(|(v, slots)| (v, slots.to_vec())).collect(),
            edges: g
                .edge_ids()
                .into_iter()
                .map(|e| {
                    let edge = g.edge(e).expect("listed edge");
                    (e, RibbonEdgePayload { ends: edge.ends, twist: edge.twist })
                })
                .collect(),
            flags,
            pinched,
        }
    }

    pub fn to_graph(&self) -> Result<RibbonFlagGraph> {
        let mut g = RibbonFlagGraph::new();
        for (&v, slots) in &self.vertices {
            g.add_vertex(v, slots.clone())?;
        }
        for (&e, edge) in &self.edges {
            g.add_edge(e, edge.ends.0, edge.ends.1, edge.twist)?;
        }
        for (&f, &slot) in &self.flags {
            g.add_flag(f, slot)?;
        }
        g.validate()?;
        Ok(if self.pinched { g.pinch() } else { g })
    }
}

/// Payload schema for compact colored tensor descriptions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredPayload {
    pub rank: u8,
    #[serde(default)]
    pub vertices: BTreeMap<u32, bool>,
    #[serde(default)]
    pub edges: BTreeMap<u32, (u8, u32, u32)>,
    #[serde(default)]
    pub flags: BTreeMap<u32, (u8, u32)>,
}

impl ColoredPayload {
    pub fn from_compact(rank: u8, c: &CompactColored) -> ColoredPayload {
        ColoredPayload {
            rank,
            vertices: c.vertices.clone(),
            edges: c.edges.clone(),
            flags: c.flags.clone(),
        }
    }

    pub fn to_compact(&self) -> CompactColored {
        CompactColored {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            flags: self.flags.clone(),
        }
    }

    pub fn build(&self) -> Result<StrandedGraph> {
        build_colored_tensor(&self.to_compact(), self.rank)
    }
}

/// One stranded vertex in a payload: pre-flag ids in cyclic order and bows
/// as `(point, point, pair)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StrandedVertexPayload {
    #[serde(default)]
    pub preflags: Vec<u32>,
    #[serde(default)]
    pub bows: Vec<(u32, u32, ColorPair)>,
}

/// One pre-flag in a payload: its color and its points with pair labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreFlagPayload {
    pub color: u8,
    pub points: Vec<(u32, ColorPair)>,
}

/// One stranded edge in a payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrandedEdgePayload {
    pub ends: (u32, u32),
    pub color: u8,
    pub strands: Vec<(u32, u32, ColorPair)>,
}

/// One flag in a payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrandedFlagPayload {
    pub preflag: u32,
    pub color: u8,
}

/// Full stranded graph schema, used both for raw stranded graphs and as the
/// stored form of w-colored graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrandedPayload {
    pub rank: u8,
    #[serde(default)]
    pub vertices: BTreeMap<u32, StrandedVertexPayload>,
    #[serde(default)]
    pub preflags: BTreeMap<u32, PreFlagPayload>,
    #[serde(default)]
    pub edges: BTreeMap<u32, StrandedEdgePayload>,
    #[serde(default)]
    pub flags: BTreeMap<u32, StrandedFlagPayload>,
    #[serde(default)]
    pub discs: BTreeMap<u32, ColorPair>,
}

impl StrandedPayload {
    /// Snapshot of a graph's structure; the mode is deliberately not stored
    /// (it is re-derived from provenance or defaults to raw stranded).
    pub fn from_graph(g: &StrandedGraph) -> StrandedPayload {
        StrandedPayload {
            rank: g.rank(),
            vertices: g
                .vertices()
                .map(|(v, vert)| {
                    (
                        v,
                        StrandedVertexPayload {
                            preflags: vert.preflags.clone(),
                            bows: vert.bows.iter().map(|b| (b.a, b.b, b.pair)).collect(),
                        },
                    )
                })
                .collect(),
            preflags: g
                .vertices()
                .flat_map(|(_, vert)| vert.preflags.iter().copied())
                .map(|pf| {
                    let p = g.preflag(pf).expect("listed pre-flag");
                    (pf, PreFlagPayload { color: p.color, points: p.points.clone() })
                })
                .collect(),
            edges: g
                .edge_ids()
                .into_iter()
                .map(|e| {
                    let edge = g.edge(e).expect("listed edge");
                    (
                        e,
                        StrandedEdgePayload {
                            ends: edge.ends,
                            color: edge.color,
                            strands: edge.strands.clone(),
                        },
                    )
                })
                .collect(),
            flags: g
                .flags()
                .map(|(f, flag)| {
                    (f, StrandedFlagPayload { preflag: flag.preflag, color: flag.color })
                })
                .collect(),
            discs: g.discs().collect(),
        }
    }

    /// Assemble and validate as a raw stranded graph.
    pub fn to_assembled(&self) -> Result<StrandedGraph> {
        let vertices = self
            .vertices
            .iter()
            .map(|(&v, vp)| {
                (
                    v,
                    StrandedVertex {
                        preflags: vp.preflags.clone(),
                        bows: vp.bows.iter().map(|&(a, b, pair)| Bow { a, b, pair }).collect(),
                    },
                )
            })
            .collect();
        let preflags = self
            .preflags
            .iter()
            .map(|(&pf, pp)| (pf, PreFlag { color: pp.color, points: pp.points.clone() }))
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|(&e, ep)| {
                (
                    e,
                    StrandedEdge {
                        ends: ep.ends,
                        strands: ep.strands.clone(),
                        color: ep.color,
                    },
                )
            })
            .collect();
        let flags = self
            .flags
            .iter()
            .map(|(&f, fp)| (f, StrandedFlag { preflag: fp.preflag, color: fp.color }))
            .collect();
        assemble_stranded(self.rank, vertices, preflags, edges, flags, self.discs.clone())
    }
}

/// One provenance step applied to the colored seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProvenanceStep {
    Contract { edge: u32 },
    Cut { edge: u32 },
    StripDiscs,
}

/// How a w-colored graph was produced: a colored tensor seed and the
/// cut/contract/disc-removal steps applied to it, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: ColoredPayload,
    #[serde(default)]
    pub steps: Vec<ProvenanceStep>,
}

impl Provenance {
    /// Re-run the script through the real operations.
    pub fn replay(&self) -> Result<StrandedGraph> {
        let mut g = self.seed.build()?;
        for step in &self.steps {
            g = match *step {
                ProvenanceStep::Contract { edge } => g.contract_soft(edge)?,
                ProvenanceStep::Cut { edge } => g.cut(edge)?,
                ProvenanceStep::StripDiscs => g.remove_discs(),
            };
        }
        Ok(g)
    }
}

/// A parsed, schema-valid graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphFile {
    pub version: u32,
    pub payload: Payload,
    pub provenance: Option<Provenance>,
}

/// The family-tagged payload of a graph file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Simple(SimplePayload),
    Ribbon(RibbonPayload),
    ColoredTensor(ColoredPayload),
    Stranded(StrandedPayload),
    WColored(StrandedPayload),
}

impl Payload {
    pub fn family(&self) -> Family {
        match self {
            Payload::Simple(_) => Family::Simple,
            Payload::Ribbon(_) => Family::Ribbon,
            Payload::ColoredTensor(_) => Family::ColoredTensor,
            Payload::Stranded(_) => Family::Stranded,
            Payload::WColored(_) => Family::WColored,
        }
    }
}

/// A graph loaded from a file, in its native in-memory form. Compact
/// colored descriptions load as their full stranded expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyGraph {
    Simple(SimpleFlagGraph),
    Ribbon(RibbonFlagGraph),
    Stranded(StrandedGraph),
}

impl AnyGraph {
    /// Short family label for diagnostics.
    pub fn family_name(&self) -> &'static str {
        match self {
            AnyGraph::Simple(_) => "simple",
            AnyGraph::Ribbon(_) => "ribbon",
            AnyGraph::Stranded(_) => "stranded",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    version: u32,
    family: Family,
    payload: serde_json::Value,
    #[serde(default)]
    provenance: Option<serde_json::Value>,
}

fn bad_json(err: &serde_json::Error) -> Error {
    if err.line() > 0 {
        Error::Parse(format!("line {}, column {}: {err}", err.line(), err.column()))
    } else {
        Error::Parse(err.to_string())
    }
}

fn from_value<T: serde::de::DeserializeOwned>(section: &str, v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{section}: {e}")))
}

/// Parse a graph file from JSON text, schema-validating it. The graph
/// itself is not built; call [`GraphFile::to_graph`] for that.
pub fn parse_graph_file(text: &str) -> Result<GraphFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| bad_json(&e))?;
    if raw.version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported format version {} (expected {FORMAT_VERSION})",
            raw.version
        )));
    }
    let payload = match raw.family {
        Family::Simple => Payload::Simple(from_value("payload", raw.payload)?),
        Family::Ribbon => Payload::Ribbon(from_value("payload", raw.payload)?),
        Family::ColoredTensor => Payload::ColoredTensor(from_value("payload", raw.payload)?),
        Family::Stranded => Payload::Stranded(from_value("payload", raw.payload)?),
        Family::WColored => Payload::WColored(from_value("payload", raw.payload)?),
    };
    let provenance: Option<Provenance> = match raw.provenance {
        Some(v) => Some(from_value("provenance", v)?),
        None => None,
    };
    match payload.family() {
        Family::WColored if provenance.is_none() => {
            return Err(Error::Parse(
                "w_colored files require a provenance script".into(),
            ))
        }
        Family::WColored => {}
        family if provenance.is_some() => {
            return Err(Error::Parse(format!(
                "provenance is only meaningful for w_colored files, not {family}"
            )))
        }
        _ => {}
    }
    Ok(GraphFile { version: raw.version, payload, provenance })
}

/// Read and parse a graph file from disk.
pub fn load_graph_file(path: &Path) -> Result<GraphFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_graph_file(&text)
}

impl Serialize for GraphFile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let fields = 3 + usize::from(self.provenance.is_some());
        let mut s = serializer.serialize_struct("GraphFile", fields)?;
        s.serialize_field("version", &self.version)?;
        s.serialize_field("family", &self.payload.family())?;
        match &self.payload {
            Payload::Simple(p) => s.serialize_field("payload", p)?,
            Payload::Ribbon(p) => s.serialize_field("payload", p)?,
            Payload::ColoredTensor(p) => s.serialize_field("payload", p)?,
            Payload::Stranded(p) | Payload::WColored(p) => s.serialize_field("payload", p)?,
        }
        if let Some(prov) = &self.provenance {
            s.serialize_field("provenance", prov)?;
        }
        s.end()
    }
}

impl GraphFile {
    pub fn from_simple(g: &SimpleFlagGraph) -> GraphFile {
        GraphFile {
            version: FORMAT_VERSION,
            payload: Payload::Simple(SimplePayload::from_graph(g)),
            provenance: None,
        }
    }

    pub fn from_ribbon(g: &RibbonFlagGraph) -> GraphFile {
        GraphFile {
            version: FORMAT_VERSION,
            payload: Payload::Ribbon(RibbonPayload::from_graph(g)),
            provenance: None,
        }
    }

    pub fn from_colored_compact(rank: u8, c: &CompactColored) -> GraphFile {
        GraphFile {
            version: FORMAT_VERSION,
            payload: Payload::ColoredTensor(ColoredPayload::from_compact(rank, c)),
            provenance: None,
        }
    }

    /// Store a raw stranded graph. Any colored/w-colored provenance the
    /// in-memory graph carried is dropped; use [`GraphFile::from_provenance`]
    /// to keep it.
    pub fn from_stranded_raw(g: &StrandedGraph) -> GraphFile {
        GraphFile {
            version: FORMAT_VERSION,
            payload: Payload::Stranded(StrandedPayload::from_graph(g)),
            provenance: None,
        }
    }

    /// Build a w-colored file from a provenance script: the script is
    /// replayed and the resulting graph stored as the payload, so the file
    /// invariant holds by construction.
    pub fn from_provenance(provenance: Provenance) -> Result<GraphFile> {
        let g = provenance.replay()?;
        Ok(GraphFile {
            version: FORMAT_VERSION,
            payload: Payload::WColored(StrandedPayload::from_graph(&g)),
            provenance: Some(provenance),
        })
    }

    /// Build the stored graph, enforcing the file invariants (including
    /// provenance replay for w-colored files).
    pub fn to_graph(&self) -> Result<AnyGraph> {
        match &self.payload {
            Payload::Simple(p) => Ok(AnyGraph::Simple(p.to_graph()?)),
            Payload::Ribbon(p) => Ok(AnyGraph::Ribbon(p.to_graph()?)),
            Payload::ColoredTensor(p) => Ok(AnyGraph::Stranded(p.build()?)),
            Payload::Stranded(p) => Ok(AnyGraph::Stranded(p.to_assembled()?)),
            Payload::WColored(p) => {
                let prov = self
                    .provenance
                    .as_ref()
                    .ok_or_else(|| Error::Parse("w_colored file without provenance".into()))?;
                let replayed = prov.replay()?;
                if StrandedPayload::from_graph(&replayed) != *p {
                    return Err(Error::Parse(
                        "provenance script does not replay to the stored payload".into(),
                    ));
                }
                Ok(AnyGraph::Stranded(replayed))
            }
        }
    }

    /// Expand a compact colored description into the full stranded schema
    /// (as a w-colored file with an empty script, so invariants still
    /// compute on it). Files of other families are returned unchanged.
    pub fn expand(&self) -> Result<GraphFile> {
        match &self.payload {
            Payload::ColoredTensor(p) => GraphFile::from_provenance(Provenance {
                seed: p.clone(),
                steps: Vec::new(),
            }),
            _ => Ok(self.clone()),
        }
    }

    /// The canonical disc-stripped representative of the stored graph's
    /// equivalence class. Families without trivial discs pass through
    /// unchanged; already disc-free files are returned byte-identical, so
    /// reduction is idempotent.
    pub fn reduce(&self) -> Result<GraphFile> {
        match &self.payload {
            Payload::Stranded(p) => {
                let g = p.to_assembled()?;
                if g.disc_count() == 0 {
                    return Ok(self.clone());
                }
                Ok(GraphFile::from_stranded_raw(&g.remove_discs()))
            }
            Payload::WColored(p) => {
                if p.discs.is_empty() {
                    return Ok(self.clone());
                }
                let mut provenance = self
                    .provenance
                    .clone()
                    .ok_or_else(|| Error::Parse("w_colored file without provenance".into()))?;
                provenance.steps.push(ProvenanceStep::StripDiscs);
                GraphFile::from_provenance(provenance)
            }
            _ => Ok(self.clone()),
        }
    }

    /// Deterministic pretty-printed JSON, with a trailing newline.
    pub fn render(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("serializable file");
        text.push('\n');
        text
    }
}
