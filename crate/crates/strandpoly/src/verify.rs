//! Randomized verification: seeded generators for every graph family, a
//! registry of property suites that operationalize the counting lemmas and
//! recursion theorems, and greedy minimization of failing witnesses.
//!
//! Everything is deterministic given the top-level seed: case seeds are
//! derived by a fixed mix function, cases may run concurrently but reports
//! are merged in case order, and witnesses serialize through the stable
//! graph-file renderer.

use crate::invariant::{
    disjoint_union_invariant, full_contraction_trace, t_frak_recursive, t_frak_statesum,
    worker_count,
};
use crate::json::{GraphFile, Payload, Provenance, ProvenanceStep};
use crate::poly::{Basis, Polynomial, Var};
use crate::ribbon::{br_classic, br_flags, br_flags_prime, RibbonEdgeClass, RibbonFlagGraph};
use crate::simple::{
    tutte_classic, tutte_flags_recursive, tutte_flags_statesum, EdgeClass, SimpleFlagGraph,
};
use crate::stranded::{
    build_colored_tensor, BoundaryGraph, CompactColored, StrandedEdgeClass, StrandedGraph,
};
use crate::util::UnionFind;
use crate::{json, Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// Which family of graphs to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorFamily {
    Simple,
    Ribbon,
    ColoredTensor,
    WColoredByContraction,
}

impl GeneratorFamily {
    pub fn parse(s: &str) -> Result<GeneratorFamily> {
        Ok(match s {
            "simple" => GeneratorFamily::Simple,
            "ribbon" => GeneratorFamily::Ribbon,
            "colored_tensor" => GeneratorFamily::ColoredTensor,
            "w_colored_by_contraction" | "w_colored" => GeneratorFamily::WColoredByContraction,
            other => {
                return Err(Error::Invalid(format!(
                    "unknown generator family {other:?} (expected simple, ribbon, \
                     colored_tensor or w_colored_by_contraction)"
                )))
            }
        })
    }
}

/// Parameters of one random graph: family, inclusive size bounds, seed.
/// Identical specs generate identical graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub family: GeneratorFamily,
    pub vertices: (u32, u32),
    pub edges: (u32, u32),
    pub flags: (u32, u32),
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn with_seed(mut self, seed: u64) -> GeneratorSpec {
        self.seed = seed;
        self
    }

    fn check_ranges(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("vertices", self.vertices),
            ("edges", self.edges),
            ("flags", self.flags),
        ] {
            if lo > hi {
                return Err(Error::Invalid(format!(
                    "empty {name} range {lo}..={hi} in generator spec"
                )));
            }
        }
        Ok(())
    }
}

/// splitmix64; used to derive per-case seeds from the suite seed.
fn mix(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pick(rng: &mut ChaCha8Rng, (lo, hi): (u32, u32)) -> u32 {
    rng.gen_range(lo..=hi)
}

/// Generate a random graph per the spec, serialized as a graph file
/// (w-colored graphs carry their provenance script).
pub fn generate(spec: &GeneratorSpec) -> Result<GraphFile> {
    spec.check_ranges()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.family {
        GeneratorFamily::Simple => gen_simple(spec, &mut rng),
        GeneratorFamily::Ribbon => gen_ribbon(spec, &mut rng),
        GeneratorFamily::ColoredTensor => {
            let compact = gen_colored(spec, &mut rng)?;
            let file = GraphFile::from_colored_compact(3, &compact);
            file.to_graph()?; // generator validity: must build cleanly
            Ok(file)
        }
        GeneratorFamily::WColoredByContraction => {
            let compact = gen_colored(spec, &mut rng)?;
            let mut g = build_colored_tensor(&compact, 3)?;
            let mut steps = Vec::new();
            let rounds = rng.gen_range(0..=g.edge_count() as u32);
            for _ in 0..rounds {
                let ids = g.edge_ids();
                if ids.is_empty() {
                    break;
                }
                let e = *ids.choose(&mut rng).expect("non-empty id list");
                g = g.contract_soft(e)?;
                steps.push(ProvenanceStep::Contract { edge: e });
            }
            GraphFile::from_provenance(Provenance {
                seed: json::ColoredPayload::from_compact(3, &compact),
                steps,
            })
        }
    }
}

fn gen_simple(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<GraphFile> {
    let nv = pick(rng, spec.vertices);
    let ne = pick(rng, spec.edges);
    let nf = pick(rng, spec.flags);
    if nv == 0 && (ne > 0 || nf > 0) {
        return Err(Error::Invalid(
            "cannot place edges or flags on zero vertices".into(),
        ));
    }
    let mut g = SimpleFlagGraph::new();
    for v in 0..nv {
        g.add_vertex(v);
    }
    for e in 0..ne {
        let u = rng.gen_range(0..nv);
        let v = rng.gen_range(0..nv);
        g.add_edge(e, u, v)?;
    }
    for f in 0..nf {
        g.add_flag(f, rng.gen_range(0..nv))?;
    }
    Ok(GraphFile::from_simple(&g))
}

fn gen_ribbon(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<GraphFile> {
    let nv = pick(rng, spec.vertices);
    let ne = pick(rng, spec.edges);
    let nf = pick(rng, spec.flags);
    if nv == 0 && (ne > 0 || nf > 0) {
        return Err(Error::Invalid(
            "cannot place edges or flags on zero vertices".into(),
        ));
    }
    // Slot ids: 2e, 2e+1 for edge e; 2·ne+f for flag f. Each slot lands on a
    // random vertex; each vertex's slots are then shuffled into cyclic order.
    let mut slots_of: BTreeMap<u32, Vec<u32>> = (0..nv).map(|v| (v, Vec::new())).collect();
    let total = 2 * ne + nf;
    for s in 0..total {
        let v = rng.gen_range(0..nv);
        slots_of.get_mut(&v).unwrap().push(s);
    }
    let mut g = RibbonFlagGraph::new();
    for (v, mut slots) in slots_of {
        slots.shuffle(rng);
        g.add_vertex(v, slots)?;
    }
    for e in 0..ne {
        g.add_edge(e, 2 * e, 2 * e + 1, rng.gen_bool(0.5))?;
    }
    for f in 0..nf {
        g.add_flag(f, 2 * ne + f)?;
    }
    g.validate()?;
    Ok(GraphFile::from_ribbon(&g))
}

/// Random rank-3 colored tensor graph: a balanced bipartite signed vertex
/// set, per-color partial matchings between the sides, flags on the
/// remaining color slots. The flag count is determined as 4·V − 2·E, so the
/// solver picks (V, E) jointly inside the requested bounds.
fn gen_colored(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<CompactColored> {
    let mut feasible = Vec::new();
    for nv in spec.vertices.0..=spec.vertices.1 {
        if nv % 2 != 0 {
            continue;
        }
        if nv == 0 {
            if spec.edges.0 == 0 && spec.flags.0 == 0 {
                feasible.push((0u32, 0u32, 0u32));
            }
            continue;
        }
        // 0 ≤ f = 4nv − 2ne within flag bounds; per-color matchings cap ne
        // at 4·(nv/2).
        let lo = spec.edges.0.max((4 * nv).saturating_sub(spec.flags.1).div_ceil(2));
        let hi = spec.edges.1.min(2 * nv).min((4 * nv).saturating_sub(spec.flags.0) / 2);
        if lo <= hi {
            feasible.push((nv, lo, hi));
        }
    }
    let Some(&(nv, lo, hi)) = feasible.choose(rng) else {
        return Err(Error::Invalid(format!(
            "unsatisfiable colored tensor spec: bipartite graphs need an even vertex \
             count and flag count 4·V − 2·E; no (V, E) fits vertices {:?}, edges {:?}, \
             flags {:?}",
            spec.vertices, spec.edges, spec.flags
        )));
    };
    let mut c = CompactColored::default();
    if nv == 0 {
        return Ok(c);
    }
    let half = nv / 2;
    for v in 0..nv {
        c.vertices.insert(v, v < half);
    }
    let ne = rng.gen_range(lo..=hi);
    // Distribute the edge budget over the four colors, capped per color.
    let mut per_color = [0u32; 4];
    for _ in 0..ne {
        let open: Vec<usize> = (0..4).filter(|&i| per_color[i] < half).collect();
        let i = *open.choose(rng).expect("edge budget within capacity");
        per_color[i] += 1;
    }
    let mut edge_id = 0u32;
    let mut flag_id = 0u32;
    let mut covered: BTreeSet<(u32, u8)> = BTreeSet::new();
    for (color, &m) in per_color.iter().enumerate() {
        let color = color as u8;
        let mut pos: Vec<u32> = (0..half).collect();
        let mut neg: Vec<u32> = (half..nv).collect();
        pos.shuffle(rng);
        neg.shuffle(rng);
        for i in 0..m as usize {
            c.edges.insert(edge_id, (color, pos[i], neg[i]));
            covered.insert((pos[i], color));
            covered.insert((neg[i], color));
            edge_id += 1;
        }
    }
    for v in 0..nv {
        for color in 0..4u8 {
            if !covered.contains(&(v, color)) {
                c.flags.insert(flag_id, (color, v));
                flag_id += 1;
            }
        }
    }
    Ok(c)
}

/// Per-case statistics a suite may report (summed over cases).
pub type Stats = BTreeMap<String, u64>;
type CaseResult = std::result::Result<Stats, String>;

/// One generated case handed to a suite's check function.
pub struct CaseCtx {
    pub file: GraphFile,
    /// The case seed; checks needing auxiliary randomness (e.g. a partner
    /// graph) derive it from here so shrinking stays deterministic.
    pub seed: u64,
    spec: GeneratorSpec,
}

/// A registered property suite.
pub struct Suite {
    pub name: &'static str,
    pub families: &'static [GeneratorFamily],
    pub default_family: GeneratorFamily,
    check: fn(&CaseCtx) -> CaseResult,
}

/// One minimized failure.
#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub case: u32,
    pub case_seed: u64,
    pub message: String,
    pub witness: GraphFile,
}

/// Outcome of a suite run. `millis` is wall-clock diagnostics and is
/// excluded from serialization so reports are byte-identical across runs.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: u32,
    pub failures: Vec<FailureReport>,
    pub stats: Stats,
    #[serde(skip)]
    pub millis: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Human-readable summary (deterministic; timing is reported separately
    /// by callers that want it).
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "suite {}: {} cases, {} failures\n",
            self.suite,
            self.cases,
            self.failures.len()
        );
        for (key, value) in &self.stats {
            out.push_str(&format!("  {key}: {value}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!(
                "  FAIL case {} (seed {}): {}\n    witness: {}\n",
                f.case,
                f.case_seed,
                f.message,
                serde_json::to_string(&f.witness).expect("serializable witness")
            ));
        }
        out
    }
}

const STRANDED_FAMILIES: &[GeneratorFamily] =
    &[GeneratorFamily::ColoredTensor, GeneratorFamily::WColoredByContraction];

static SUITES: &[Suite] = &[
    Suite {
        name: "t_frak_recurrence",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_t_frak_recurrence,
    },
    Suite {
        name: "statesum_vs_recursive",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_statesum_vs_recursive,
    },
    Suite {
        name: "disjoint_union",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_disjoint_union,
    },
    Suite {
        name: "zeta_bounds",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_zeta_bounds,
    },
    Suite {
        name: "terminal_bound",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_terminal_bound,
    },
    Suite {
        name: "boundary_preservation",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_boundary_preservation,
    },
    Suite {
        name: "bridge_faces",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_bridge_faces,
    },
    Suite {
        name: "cutbri_relations",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_cutbri_relations,
    },
    Suite {
        name: "tris_counts",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_tris_counts,
    },
    Suite {
        name: "reduction_tower",
        families: STRANDED_FAMILIES,
        default_family: GeneratorFamily::WColoredByContraction,
        check: check_reduction_tower,
    },
    Suite {
        name: "tutte_recurrence",
        families: &[GeneratorFamily::Simple],
        default_family: GeneratorFamily::Simple,
        check: check_tutte_recurrence,
    },
    Suite {
        name: "br_recurrence",
        families: &[GeneratorFamily::Ribbon],
        default_family: GeneratorFamily::Ribbon,
        check: check_br_recurrence,
    },
    Suite {
        name: "ribbon_soft_contraction",
        families: &[GeneratorFamily::Ribbon],
        default_family: GeneratorFamily::Ribbon,
        check: check_ribbon_soft_contraction,
    },
];

/// Names of all registered suites, in run order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

fn lookup(name: &str) -> Result<&'static Suite> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Invalid(format!("unknown suite {name:?}; known: {:?}", suite_names())))
}

/// The spec a suite runs under when the caller picks only a family (or
/// nothing at all).
pub fn default_spec(suite_name: &str, family: Option<GeneratorFamily>, seed: u64) -> Result<GeneratorSpec> {
    let suite = lookup(suite_name)?;
    let family = family.unwrap_or(suite.default_family);
    if !suite.families.contains(&family) {
        return Err(Error::Invalid(format!(
            "suite {} does not apply to family {family:?}",
            suite.name
        )));
    }
    Ok(match family {
        GeneratorFamily::Simple => GeneratorSpec {
            family,
            vertices: (1, 6),
            edges: (0, 7),
            flags: (0, 5),
            seed,
        },
        GeneratorFamily::Ribbon => GeneratorSpec {
            family,
            vertices: (1, 4),
            edges: (0, 7),
            flags: (0, 4),
            seed,
        },
        GeneratorFamily::ColoredTensor | GeneratorFamily::WColoredByContraction => GeneratorSpec {
            family,
            vertices: (2, 4),
            edges: (2, 8),
            flags: (0, 16),
            seed,
        },
    })
}

/// Run a registered suite over `cases` generated graphs. Failures are
/// minimized before reporting; cases run concurrently but the report is
/// merged in case order.
pub fn run_suite(name: &str, spec: &GeneratorSpec, cases: u32) -> Result<SuiteReport> {
    let suite = lookup(name)?;
    if !suite.families.contains(&spec.family) {
        return Err(Error::Invalid(format!(
            "suite {} does not apply to family {:?}",
            suite.name, spec.family
        )));
    }
    let start = Instant::now();
    let run_case = |i: u32| -> Result<(u32, u64, CaseResult, Option<GraphFile>)> {
        let case_seed = mix(spec.seed, i as u64);
        let file = generate(&spec.with_seed(case_seed))?;
        let ctx = CaseCtx { file, seed: case_seed, spec: *spec };
        let outcome = (suite.check)(&ctx);
        let witness = match &outcome {
            Err(_) => Some(shrink(suite, &ctx)),
            Ok(_) => None,
        };
        Ok((i, case_seed, outcome, witness))
    };
    let workers = worker_count();
    let results: Vec<(u32, u64, CaseResult, Option<GraphFile>)> = if workers <= 1 || cases < 2 {
        (0..cases).map(run_case).collect::<Result<_>>()?
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Internal(format!("worker pool: {e}")))?;
        let mut rs =
            pool.install(|| (0..cases).into_par_iter().map(run_case).collect::<Result<Vec<_>>>())?;
        rs.sort_by_key(|r| r.0);
        rs
    };
    let mut failures = Vec::new();
    let mut stats = Stats::new();
    for (case, case_seed, outcome, witness) in results {
        match outcome {
            Ok(case_stats) => {
                for (k, v) in case_stats {
                    *stats.entry(k).or_insert(0) += v;
                }
            }
            Err(message) => failures.push(FailureReport {
                case,
                case_seed,
                message,
                witness: witness.expect("witness recorded for failure"),
            }),
        }
    }
    Ok(SuiteReport {
        suite: suite.name.to_string(),
        cases,
        failures,
        stats,
        millis: start.elapsed().as_millis(),
    })
}

/// Run every registered suite under its default spec with the given seed.
pub fn run_all(seed: u64, cases: u32) -> Result<Vec<SuiteReport>> {
    SUITES
        .iter()
        .map(|s| {
            let spec = default_spec(s.name, None, seed)?;
            run_suite(s.name, &spec, cases)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Witness minimization.

/// Greedy shrink: repeatedly apply the first structure-reducing move that
/// keeps the property failing. Moves: cut an edge away, strip discs, drop a
/// flag (where the family allows it). Every accepted candidate fails the
/// property, so minimized witnesses are sound by construction.
fn shrink(suite: &Suite, ctx: &CaseCtx) -> GraphFile {
    let mut current = ctx.file.clone();
    loop {
        let mut improved = false;
        for candidate in shrink_candidates(&current) {
            let cctx = CaseCtx { file: candidate, seed: ctx.seed, spec: ctx.spec };
            if (suite.check)(&cctx).is_err() {
                current = cctx.file;
                improved = true;
                break;
            }
        }
        if !improved {
            return current;
        }
    }
}

fn shrink_candidates(file: &GraphFile) -> Vec<GraphFile> {
    let mut out = Vec::new();
    match &file.payload {
        Payload::Simple(p) => {
            for &e in p.edges.keys() {
                let mut q = p.clone();
                let (u, v) = q.edges.remove(&e).expect("listed edge");
                let base = q.flags.keys().next_back().map_or(0, |m| m + 1);
                q.flags.insert(base, u);
                q.flags.insert(base + 1, v);
                out.push(GraphFile { payload: Payload::Simple(q), ..file.clone() });
            }
            for &f in p.flags.keys() {
                let mut q = p.clone();
                q.flags.remove(&f);
                out.push(GraphFile { payload: Payload::Simple(q), ..file.clone() });
            }
        }
        Payload::Ribbon(p) => {
            for (&e, edge) in &p.edges {
                let mut q = p.clone();
                q.edges.remove(&e);
                let base = q.flags.keys().next_back().map_or(0, |m| m + 1);
                q.flags.insert(base, edge.ends.0);
                q.flags.insert(base + 1, edge.ends.1);
                out.push(GraphFile { payload: Payload::Ribbon(q), ..file.clone() });
            }
            for (&f, &slot) in &p.flags {
                let mut q = p.clone();
                q.flags.remove(&f);
                for slots in q.vertices.values_mut() {
                    slots.retain(|&s| s != slot);
                }
                out.push(GraphFile { payload: Payload::Ribbon(q), ..file.clone() });
            }
        }
        Payload::ColoredTensor(p) => {
            // Cutting keeps every color present at both former ends, so the
            // compact family is closed under this move; flags cannot be
            // dropped without orphaning a color slot.
            for &e in p.edges.keys() {
                let mut q = p.clone();
                let (color, u, v) = q.edges.remove(&e).expect("listed edge");
                let base = q.flags.keys().next_back().map_or(0, |m| m + 1);
                q.flags.insert(base, (color, u));
                q.flags.insert(base + 1, (color, v));
                out.push(GraphFile { payload: Payload::ColoredTensor(q), ..file.clone() });
            }
        }
        Payload::WColored(p) => {
            // Shrink by extending the provenance script: cut a surviving
            // edge, or strip discs. Both stay within the w-colored class.
            let Some(prov) = &file.provenance else { return out };
            for &e in p.edges.keys() {
                let mut np = prov.clone();
                np.steps.push(ProvenanceStep::Cut { edge: e });
                if let Ok(f) = GraphFile::from_provenance(np) {
                    out.push(f);
                }
            }
            if !p.discs.is_empty() {
                let mut np = prov.clone();
                np.steps.push(ProvenanceStep::StripDiscs);
                if let Ok(f) = GraphFile::from_provenance(np) {
                    out.push(f);
                }
            }
        }
        Payload::Stranded(_) => {}
    }
    out
}

// ---------------------------------------------------------------------------
// Check functions. Each receives a generated case and returns per-case
// stats, or a message describing the first violated identity.

fn stranded_of(file: &GraphFile) -> std::result::Result<StrandedGraph, String> {
    match file.to_graph().map_err(|e| e.to_string())? {
        json::AnyGraph::Stranded(g) => Ok(g),
        _ => Err("expected a stranded graph".into()),
    }
}

fn simple_of(file: &GraphFile) -> std::result::Result<SimpleFlagGraph, String> {
    match file.to_graph().map_err(|e| e.to_string())? {
        json::AnyGraph::Simple(g) => Ok(g),
        _ => Err("expected a simple graph".into()),
    }
}

fn ribbon_of(file: &GraphFile) -> std::result::Result<RibbonFlagGraph, String> {
    match file.to_graph().map_err(|e| e.to_string())? {
        json::AnyGraph::Ribbon(g) => Ok(g),
        _ => Err("expected a ribbon graph".into()),
    }
}

fn tf(g: &StrandedGraph, what: &str) -> std::result::Result<Polynomial, String> {
    t_frak_statesum(g).map_err(|e| format!("{what}: {e}"))
}

fn bridge_cut_factor() -> Polynomial {
    Polynomial::monomial(1, &[(Var::Z, 8), (Var::S, 1), (Var::W, 3), (Var::Q, 3), (Var::T, 2)])
}

fn check_t_frak_recurrence(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let whole = tf(&g, "graph")?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let class = g.classify_edge(e).map_err(|err| err.to_string())?;
        let vee = g.cut(e).map_err(|err| err.to_string())?;
        let con = g.contract_soft(e).map_err(|err| err.to_string())?;
        let t_vee = tf(&vee, "cut graph")?;
        let t_con = tf(&con, "contracted graph")?;
        match class {
            StrandedEdgeClass::Regular => {
                if whole != t_vee.add(&t_con) {
                    return Err(format!("regular split fails at edge {e}"));
                }
                *stats.entry("regular".into()).or_insert(0) += 1;
            }
            StrandedEdgeClass::Bridge => {
                if t_vee != bridge_cut_factor().mul(&t_con) {
                    return Err(format!("bridge cut factor fails at edge {e}"));
                }
                let factor = Polynomial::var(Var::X).mul(&bridge_cut_factor()).add(&Polynomial::one());
                if whole != factor.mul(&t_con) {
                    return Err(format!("bridge relation fails at edge {e}"));
                }
                *stats.entry("bridge".into()).or_insert(0) += 1;
            }
            StrandedEdgeClass::SelfLoop { p, trivial: true, .. } => {
                let shift = Polynomial::monomial(1, &[(Var::Y, 1), (Var::Z, 4 * p as i32 - 7)]);
                if whole != t_vee.add(&shift.mul(&t_con)) {
                    return Err(format!("trivial {p}-inner loop split fails at edge {e}"));
                }
                if p == 3 {
                    // Fully inner loops close up: the cut branch collapses
                    // into a factor of the contraction.
                    let factor = bridge_cut_factor()
                        .add(&Polynomial::monomial(1, &[(Var::Y, 1), (Var::Z, 5)]));
                    if whole != factor.mul(&t_con) {
                        return Err(format!("3-inner loop factor fails at edge {e}"));
                    }
                }
                *stats.entry(format!("trivial_loop_p{p}")).or_insert(0) += 1;
            }
            StrandedEdgeClass::SelfLoop { trivial: false, .. } => {
                *stats.entry("nontrivial_loop".into()).or_insert(0) += 1;
            }
        }
    }
    Ok(stats)
}

fn check_statesum_vs_recursive(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let direct = tf(&g, "state sum")?;
    let recursive = t_frak_recursive(&g).map_err(|e| format!("recursive: {e}"))?;
    if direct != recursive {
        return Err("state sum and recursive evaluator disagree".into());
    }
    Ok(Stats::new())
}

fn check_disjoint_union(ctx: &CaseCtx) -> CaseResult {
    let g1 = stranded_of(&ctx.file)?;
    let partner_spec = ctx.spec.with_seed(mix(ctx.seed, 0xD15));
    let partner = generate(&partner_spec).map_err(|e| format!("partner generation: {e}"))?;
    let g2 = stranded_of(&partner)?;
    let product = disjoint_union_invariant(&g1, &g2).map_err(|e| e.to_string())?;
    let separate = tf(&g1, "left factor")?.mul(&tf(&g2, "right factor")?);
    if product != separate {
        return Err("disjoint union is not multiplicative".into());
    }
    Ok(Stats::new())
}

fn check_zeta_bounds(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let ids = g.edge_ids();
    if ids.len() > 16 {
        return Err("zeta sweep capped at 16 edges".into());
    }
    for mask in 0u32..1 << ids.len() {
        let keep: BTreeSet<u32> =
            ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let sub = g.spanning_c_subgraph(&keep);
        for (name, value) in [
            ("zeta", sub.zeta()),
            ("zeta_prime", sub.zeta_prime()),
            ("zeta_second", sub.zeta_second()),
        ] {
            let value = value.map_err(|e| format!("{name} on subset {mask:#b}: {e}"))?;
            if value < 0 {
                return Err(format!("{name} = {value} < 0 on edge subset {mask:#b}"));
            }
        }
    }
    Ok(Stats::new())
}

fn check_terminal_bound(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let edges = g.edge_count();
    let trace = full_contraction_trace(&g).map_err(|e| e.to_string())?;
    let bound = trace.terminal_bound();
    if bound < 0 {
        return Err(format!(
            "terminal exponent bound violated: 5n3+n2-3n1-7n0+2B_ext = {bound} < 0"
        ));
    }
    if trace.terminal.edge_count() != 0 {
        return Err("full contraction left edges behind".into());
    }
    let pure = trace.bridges + trace.inner.iter().sum::<usize>() == edges;
    let mut stats = Stats::new();
    let key = if pure { "pure_contractions" } else { "mixed_contractions" };
    stats.insert(key.into(), 1);
    Ok(stats)
}

fn check_boundary_preservation(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let boundary = g.boundary();
    for e in g.edge_ids() {
        let contracted = g.contract_soft(e).map_err(|err| err.to_string())?;
        if contracted.boundary() != boundary {
            return Err(format!("contracting edge {e} changed the boundary graph"));
        }
    }
    let full = g.full_contract().map_err(|err| err.to_string())?;
    if full.boundary() != boundary {
        return Err("full contraction changed the boundary graph".into());
    }
    if full.edge_count() != 0 {
        return Err("full contraction left edges behind".into());
    }
    Ok(Stats::new())
}

/// Map each boundary vertex (flag) to a boundary-component representative.
fn boundary_component_ids(b: &BoundaryGraph) -> BTreeMap<u32, usize> {
    let ids: Vec<u32> = b.vertices.keys().copied().collect();
    let index: BTreeMap<u32, usize> = ids.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let mut uf = UnionFind::new(ids.len());
    for (_, a, b) in &b.edges {
        uf.union(index[a], index[b]);
    }
    ids.iter().map(|f| (*f, uf.find(index[f]))).collect()
}

fn check_bridge_faces(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        if g.classify_edge(e).map_err(|err| err.to_string())? != StrandedEdgeClass::Bridge {
            continue;
        }
        let strand_points: BTreeSet<u32> = g
            .edge(e)
            .map_err(|err| err.to_string())?
            .strands
            .iter()
            .flat_map(|&(a, b, _)| [a, b])
            .collect();
        let faces = g.faces();
        for face in &faces.closed {
            if face.points.iter().any(|p| strand_points.contains(p)) {
                return Err(format!("a closed face passes through bridge {e}"));
            }
        }
        let through: Vec<_> = faces
            .open
            .iter()
            .filter(|f| f.points.iter().any(|p| strand_points.contains(p)))
            .collect();
        if through.len() != 3 {
            return Err(format!(
                "expected 3 open faces through bridge {e}, found {}",
                through.len()
            ));
        }
        let comp = boundary_component_ids(&g.boundary());
        let mut reps = BTreeSet::new();
        for face in &through {
            let (fa, fb) = face.endpoints.ok_or("open face without endpoints")?;
            reps.insert(comp[&fa]);
            reps.insert(comp[&fb]);
        }
        if reps.len() != 1 {
            return Err(format!(
                "faces through bridge {e} touch {} boundary components",
                reps.len()
            ));
        }
        *stats.entry("bridges".into()).or_insert(0) += 1;
    }
    Ok(stats)
}

/// 2·C_∂ − χ(∂G), with χ = vertices − edges + faces of the boundary graph.
fn boundary_characteristic_defect(g: &StrandedGraph) -> std::result::Result<i64, String> {
    let cc = g.cell_counts().map_err(|e| e.to_string())?;
    Ok(2 * cc.c_bnd as i64 - (cc.flags as i64 - cc.e_bnd as i64 + cc.f_bnd as i64))
}

fn check_cutbri_relations(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let class = g.classify_edge(e).map_err(|err| err.to_string())?;
        let special = match class {
            StrandedEdgeClass::Bridge => Some(None),
            StrandedEdgeClass::SelfLoop { p, trivial: true, .. } => Some(Some(p)),
            _ => None,
        };
        let Some(loop_p) = special else { continue };
        let vee = g.cut(e).map_err(|err| err.to_string())?;
        let con = g.contract_soft(e).map_err(|err| err.to_string())?;
        let cv = vee.cell_counts().map_err(|err| err.to_string())?;
        let cc = con.cell_counts().map_err(|err| err.to_string())?;
        let ok = |name: &str, got: i64, want: i64| -> std::result::Result<(), String> {
            if got != want {
                Err(format!("{name} mismatch at edge {e}: cut side {got}, want {want}"))
            } else {
                Ok(())
            }
        };
        match loop_p {
            None => {
                ok("k", cv.k as i64, cc.k as i64 + 1)?;
                ok("V", cv.v as i64, cc.v as i64 + 1)?;
                ok("E", cv.e as i64, cc.e as i64)?;
                ok("f", cv.flags as i64, cc.flags as i64 + 2)?;
                ok("F_int", cv.f_int as i64, cc.f_int as i64)?;
                ok("B_int", cv.b_int as i64, cc.b_int as i64)?;
                ok("C_bnd", cv.c_bnd as i64, cc.c_bnd as i64 + 1)?;
                ok("E_bnd", cv.e_bnd as i64, cc.e_bnd as i64 + 3)?;
                ok("F_bnd", cv.f_bnd as i64, cc.f_bnd as i64 + 3)?;
                ok("B_ext", cv.b_ext as i64, cc.b_ext as i64 + 3)?;
                *stats.entry("bridges".into()).or_insert(0) += 1;
            }
            Some(p) if p <= 2 => {
                ok("k", cv.k as i64, cc.k as i64 - 2)?;
                ok("V", cv.v as i64, cc.v as i64 - 2)?;
                ok("E", cv.e as i64, cc.e as i64)?;
                ok("f", cv.flags as i64, cc.flags as i64 + 2)?;
                ok(
                    "F_int+C_bnd",
                    (cv.f_int + cv.c_bnd) as i64,
                    (cc.f_int + cc.c_bnd) as i64 - 2,
                )?;
                ok("E_bnd", cv.e_bnd as i64, cc.e_bnd as i64 + 3)?;
                ok(
                    "B_int+B_ext",
                    (cv.b_int + cv.b_ext) as i64,
                    (cc.b_int + cc.b_ext) as i64 - (3 - 2 * p as i64),
                )?;
                *stats.entry(format!("trivial_loop_p{p}")).or_insert(0) += 1;
            }
            Some(p) => {
                *stats.entry(format!("trivial_loop_p{p}")).or_insert(0) += 1;
            }
        }
        // The boundary characteristic defect is blind to cut and contraction
        // of bridges and trivial loops of every p.
        let base = boundary_characteristic_defect(&g)?;
        if boundary_characteristic_defect(&vee)? != base
            || boundary_characteristic_defect(&con)? != base
        {
            return Err(format!("boundary characteristic defect not preserved at edge {e}"));
        }
    }
    Ok(stats)
}

fn check_tris_counts(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let base = g.cell_counts().map_err(|err| err.to_string())?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let StrandedEdgeClass::SelfLoop { p, trivial: true, .. } =
            g.classify_edge(e).map_err(|err| err.to_string())?
        else {
            continue;
        };
        let con = g.contract_soft(e).map_err(|err| err.to_string())?;
        let cc = con.cell_counts().map_err(|err| err.to_string())?;
        let ok = |name: &str, got: i64, want: i64| -> std::result::Result<(), String> {
            if got != want {
                Err(format!("{name} mismatch contracting loop {e}: {got}, want {want}"))
            } else {
                Ok(())
            }
        };
        ok("k", cc.k as i64, base.k as i64 + 2)?;
        ok("V", cc.v as i64, base.v as i64 + 2)?;
        ok("E", cc.e as i64, base.e as i64 - 1)?;
        ok("F_int", cc.f_int as i64, base.f_int as i64)?;
        ok("C_bnd", cc.c_bnd as i64, base.c_bnd as i64)?;
        ok("f", cc.flags as i64, base.flags as i64)?;
        ok("E_bnd", cc.e_bnd as i64, base.e_bnd as i64)?;
        ok("F_bnd", cc.f_bnd as i64, base.f_bnd as i64)?;
        match p {
            3 => {
                ok("B_int", cc.b_int as i64, base.b_int as i64 - 3)?;
                ok("B_ext", cc.b_ext as i64, base.b_ext as i64)?;
            }
            2 => {
                ok("B_int", cc.b_int as i64, base.b_int as i64 - 1)?;
                ok("B_ext", cc.b_ext as i64, base.b_ext as i64)?;
            }
            _ => {
                ok(
                    "B_int+B_ext",
                    (cc.b_int + cc.b_ext) as i64,
                    (base.b_int + base.b_ext) as i64 + (3 - 2 * p as i64),
                )?;
            }
        }
        *stats.entry(format!("p{p}")).or_insert(0) += 1;
    }
    Ok(stats)
}

fn check_reduction_tower(ctx: &CaseCtx) -> CaseResult {
    let g = stranded_of(&ctx.file)?;
    let full = tf(&g, "seven-variable invariant")?;
    let collapsed = g.collapsed_simple();
    let at_ones =
        full.eval_vars(&[(Var::Z, 1), (Var::S, 1), (Var::W, 1), (Var::Q, 1)]);
    let flag_tutte = tutte_flags_statesum(&collapsed);
    if at_ones != flag_tutte {
        return Err("z=s=w=q=1 reduction disagrees with the collapsed flag polynomial".into());
    }
    let classic = tutte_classic(&collapsed).to_basis(Basis::Standard, Basis::Shifted);
    if flag_tutte.eval_vars(&[(Var::T, 1)]) != classic {
        return Err("t=1 reduction disagrees with the classic polynomial".into());
    }
    for kind in [
        crate::invariant::InvariantKind::TPrime,
        crate::invariant::InvariantKind::TSecond,
        crate::invariant::InvariantKind::TTriple,
    ] {
        crate::invariant::reduce_t_frak(&full, kind)
            .map_err(|e| format!("{kind:?} reduction: {e}"))?;
    }
    Ok(Stats::new())
}

fn check_tutte_recurrence(ctx: &CaseCtx) -> CaseResult {
    let g = simple_of(&ctx.file)?;
    let whole = tutte_flags_statesum(&g);
    if whole != tutte_flags_recursive(&g) {
        return Err("flag polynomial state sum and recursion disagree".into());
    }
    let classic = tutte_classic(&g).to_basis(Basis::Standard, Basis::Shifted);
    if whole.eval_vars(&[(Var::T, 1)]) != classic {
        return Err("t=1 does not recover the classic polynomial".into());
    }
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let vee = tutte_flags_statesum(&g.cut_edge(e).map_err(|err| err.to_string())?);
        let con = tutte_flags_statesum(&g.contract_edge(e).map_err(|err| err.to_string())?);
        let rebuilt = match g.classify_edge(e).map_err(|err| err.to_string())? {
            EdgeClass::Bridge => Polynomial::var(Var::X).mul(&vee).add(&con),
            EdgeClass::SelfLoop => vee.add(&Polynomial::var(Var::Y).mul(&con)),
            EdgeClass::Regular => vee.add(&con),
        };
        if whole != rebuilt {
            return Err(format!("cut/contract relation fails at edge {e}"));
        }
        *stats.entry("edges".into()).or_insert(0) += 1;
    }
    Ok(stats)
}

fn check_br_recurrence(ctx: &CaseCtx) -> CaseResult {
    let g = ribbon_of(&ctx.file)?;
    let whole = br_flags(&g).map_err(|e| e.to_string())?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let vee = br_flags(&g.cut_ribbon(e).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        let rebuilt = match g.classify_ribbon_edge(e).map_err(|err| err.to_string())? {
            RibbonEdgeClass::Bridge => {
                let con = br_flags(&g.contract_ribbon(e).map_err(|err| err.to_string())?)
                    .map_err(|err| err.to_string())?;
                *stats.entry("bridge".into()).or_insert(0) += 1;
                Polynomial::var(Var::X).mul(&vee).add(&con)
            }
            RibbonEdgeClass::Regular => {
                let con = br_flags(&g.contract_ribbon(e).map_err(|err| err.to_string())?)
                    .map_err(|err| err.to_string())?;
                *stats.entry("regular".into()).or_insert(0) += 1;
                vee.add(&con)
            }
            RibbonEdgeClass::Loop { twisted, trivial: true } => {
                let con = br_flags(&g.contract_ribbon(e).map_err(|err| err.to_string())?)
                    .map_err(|err| err.to_string())?;
                let factor = if twisted {
                    Polynomial::monomial(1, &[(Var::Y, 1), (Var::Z, 1)])
                } else {
                    Polynomial::var(Var::Y)
                };
                *stats.entry("trivial_loop".into()).or_insert(0) += 1;
                vee.add(&factor.mul(&con))
            }
            RibbonEdgeClass::Loop { trivial: false, .. } => {
                *stats.entry("nontrivial_loop".into()).or_insert(0) += 1;
                continue;
            }
        };
        if whole != rebuilt {
            return Err(format!("ribbon cut/contract relation fails at edge {e}"));
        }
        // ℛ′ of the cut graph equals t²·ℛ′ of the deletion, for every edge.
        let prime_cut = br_flags_prime(&g.cut_ribbon(e).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        let prime_del = br_flags_prime(&g.delete_ribbon(e).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        if prime_cut != prime_del.mul_monomial(1, &[(Var::T, 2)]) {
            return Err(format!("cut/delete identity for the pinched form fails at edge {e}"));
        }
    }
    // Reductions: z=s=1 forgets the ribbon structure; t=1 equals the classic
    // polynomial of the pinched graph.
    if whole.eval_vars(&[(Var::Z, 1), (Var::S, 1)])
        != tutte_flags_statesum(&g.underlying_simple())
    {
        return Err("z=s=1 reduction disagrees with the flag polynomial".into());
    }
    let prime = br_flags_prime(&g).map_err(|e| e.to_string())?;
    let classic = br_classic(&g.pinch()).map_err(|e| e.to_string())?;
    if prime.eval_vars(&[(Var::T, 1)]) != classic {
        return Err("t=1 reduction disagrees with the pinched classic polynomial".into());
    }
    Ok(stats)
}

fn check_ribbon_soft_contraction(ctx: &CaseCtx) -> CaseResult {
    let g = ribbon_of(&ctx.file)?;
    let mut stats = Stats::new();
    for e in g.edge_ids() {
        let RibbonEdgeClass::Loop { twisted, trivial } =
            g.classify_ribbon_edge(e).map_err(|err| err.to_string())?
        else {
            continue;
        };
        if !trivial {
            *stats.entry("nontrivial_loops_skipped".into()).or_insert(0) += 1;
            continue;
        }
        let del = g.delete_ribbon(e).map_err(|err| err.to_string())?;
        let con = g.contract_ribbon(e).map_err(|err| err.to_string())?;
        if twisted {
            // Twisted trivial loops contract as pure deletion.
            if con != del {
                return Err(format!("twisted trivial loop {e} does not contract as deletion"));
            }
        } else {
            // Untwisted trivial loops contract as deletion plus one disc.
            let (df, cf) = (del.faces(), con.faces());
            if cf.closed_count() != df.closed_count() + 1
                || cf.open_count() != df.open_count()
                || con.vertex_count() != del.vertex_count() + 1
            {
                return Err(format!(
                    "untwisted trivial loop {e} does not contract as deletion plus a disc"
                ));
            }
        }
        *stats.entry("trivial_loops".into()).or_insert(0) += 1;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::t_multivariate;

    fn spec(family: GeneratorFamily, seed: u64) -> GeneratorSpec {
        match family {
            GeneratorFamily::Simple => GeneratorSpec {
                family,
                vertices: (1, 5),
                edges: (0, 6),
                flags: (0, 4),
                seed,
            },
            GeneratorFamily::Ribbon => GeneratorSpec {
                family,
                vertices: (1, 3),
                edges: (0, 5),
                flags: (0, 3),
                seed,
            },
            _ => GeneratorSpec { family, vertices: (2, 4), edges: (2, 6), flags: (0, 16), seed },
        }
    }

    #[test]
    fn two_vertices_four_edges_is_the_melon() {
        let file = generate(&GeneratorSpec {
            family: GeneratorFamily::ColoredTensor,
            vertices: (2, 2),
            edges: (4, 4),
            flags: (0, 0),
            seed: 7,
        })
        .unwrap();
        let json::AnyGraph::Stranded(g) = file.to_graph().unwrap() else { panic!() };
        let mut melon = CompactColored::default();
        melon.vertices.insert(0, true);
        melon.vertices.insert(1, false);
        for e in 0..4u32 {
            melon.edges.insert(e, (e as u8, 0, 1));
        }
        let reference = build_colored_tensor(&melon, 3).unwrap();
        assert_eq!(
            t_multivariate(&g).unwrap(),
            t_multivariate(&reference).unwrap(),
            "unique graph at this size, up to labeling"
        );
        assert_eq!(g.cell_counts().unwrap(), reference.cell_counts().unwrap());
    }

    #[test]
    fn odd_vertex_bounds_are_unsatisfiable() {
        let err = generate(&GeneratorSpec {
            family: GeneratorFamily::ColoredTensor,
            vertices: (3, 3),
            edges: (0, 8),
            flags: (0, 16),
            seed: 1,
        })
        .unwrap_err();
        assert!(err.to_string().contains("even vertex count"), "{err}");
    }

    #[test]
    fn same_seed_same_serialized_graph() {
        for family in [
            GeneratorFamily::Simple,
            GeneratorFamily::Ribbon,
            GeneratorFamily::ColoredTensor,
            GeneratorFamily::WColoredByContraction,
        ] {
            let a = generate(&spec(family, 99)).unwrap();
            let b = generate(&spec(family, 99)).unwrap();
            assert_eq!(a.render(), b.render(), "{family:?}");
            let c = generate(&spec(family, 100)).unwrap();
            // Different seeds usually differ; at minimum they stay valid.
            c.to_graph().unwrap();
        }
    }

    #[test]
    fn generated_graphs_pass_family_validators() {
        for family in [
            GeneratorFamily::Simple,
            GeneratorFamily::Ribbon,
            GeneratorFamily::ColoredTensor,
            GeneratorFamily::WColoredByContraction,
        ] {
            for seed in 0..25 {
                let file = generate(&spec(family, seed)).unwrap();
                file.to_graph().unwrap_or_else(|e| panic!("{family:?} seed {seed}: {e}"));
            }
        }
    }

    #[test]
    fn suites_pass_on_small_runs() {
        for suite in SUITES {
            let spec = default_spec(suite.name, None, 4242).unwrap();
            let report = run_suite(suite.name, &spec, 6).unwrap();
            assert!(
                report.passed(),
                "suite {} failed:\n{}",
                suite.name,
                report.render_text()
            );
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let spec = default_spec("t_frak_recurrence", None, 11).unwrap();
        let a = run_suite("t_frak_recurrence", &spec, 5).unwrap();
        let b = run_suite("t_frak_recurrence", &spec, 5).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.render_text(), b.render_text());
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let spec = default_spec("zeta_bounds", None, 0).unwrap();
        assert!(run_suite("no_such_suite", &spec, 1).is_err());
    }

    #[test]
    fn shrinking_finds_minimal_witness() {
        // A deliberately false property — "graphs have no edges" — must
        // minimize to a single-edge, flagless witness.
        let bogus = Suite {
            name: "bogus_edgeless",
            families: &[GeneratorFamily::Simple],
            default_family: GeneratorFamily::Simple,
            check: |ctx| {
                let g = simple_of(&ctx.file)?;
                if g.edge_count() > 0 {
                    return Err(format!("graph has {} edges", g.edge_count()));
                }
                Ok(Stats::new())
            },
        };
        let mut found = None;
        for seed in 0..20 {
            let file = generate(&spec(GeneratorFamily::Simple, seed)).unwrap();
            let ctx = CaseCtx { file, seed, spec: spec(GeneratorFamily::Simple, seed) };
            if (bogus.check)(&ctx).is_err() {
                found = Some(shrink(&bogus, &ctx));
                break;
            }
        }
        let witness = found.expect("some generated graph has an edge");
        let json::AnyGraph::Simple(g) = witness.to_graph().unwrap() else { panic!() };
        assert_eq!(g.edge_count(), 1, "witness keeps exactly one edge");
        assert_eq!(g.flag_count(), 0, "witness drops all flags");
        // Soundness: the minimized witness still fails.
        let ctx = CaseCtx { file: witness, seed: 0, spec: spec(GeneratorFamily::Simple, 0) };
        assert!((bogus.check)(&ctx).is_err());
    }

    #[test]
    fn w_colored_witnesses_shrink_through_provenance() {
        // A false property on stranded graphs: "no self-loops anywhere".
        let bogus = Suite {
            name: "bogus_loopless",
            families: STRANDED_FAMILIES,
            default_family: GeneratorFamily::WColoredByContraction,
            check: |ctx| {
                let g = stranded_of(&ctx.file)?;
                for e in g.edge_ids() {
                    if matches!(
                        g.classify_edge(e).map_err(|err| err.to_string())?,
                        StrandedEdgeClass::SelfLoop { .. }
                    ) {
                        return Err(format!("edge {e} is a self-loop"));
                    }
                }
                Ok(Stats::new())
            },
        };
        let mut checked = false;
        for seed in 0..60 {
            let sp = spec(GeneratorFamily::WColoredByContraction, seed);
            let file = generate(&sp).unwrap();
            let ctx = CaseCtx { file, seed, spec: sp };
            if (bogus.check)(&ctx).is_err() {
                let witness = shrink(&bogus, &ctx);
                let wctx = CaseCtx { file: witness.clone(), seed, spec: sp };
                assert!((bogus.check)(&wctx).is_err(), "shrunk witness still fails");
                let json::AnyGraph::Stranded(g) = witness.to_graph().unwrap() else { panic!() };
                assert_eq!(g.edge_count(), 1, "a single offending loop remains");
                checked = true;
                break;
            }
        }
        assert!(checked, "some seed produces a self-loop");
    }
}
