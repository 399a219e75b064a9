//! Worked-example goldens for the seven-variable invariant: the full
//! multivariate expansion of the rank-3 melon with a cut/contract pass, and
//! the three-edge two-vertex graph whose recursion chain (regular split,
//! bridge factor, self-loop split) is replayed step by step against frozen
//! values.

use std::collections::BTreeSet;

use strandpoly::invariant::{t_frak_recursive, t_frak_statesum, t_multivariate};
use strandpoly::poly::{Polynomial, Var};
use strandpoly::stranded::{
    build_colored_tensor, CompactColored, StrandedEdgeClass, StrandedGraph,
};
use Var::{Q, S, T, W, X, Y, Z, Z1, Z2, Z3};

/// The rank-3 melon: two opposite-sign vertices joined by one edge of each
/// color 0..=3, no flags.
fn melon() -> StrandedGraph {
    let mut c = CompactColored::default();
    c.vertices.insert(0, true);
    c.vertices.insert(1, false);
    for e in 0..4u32 {
        c.edges.insert(e, (e as u8, 0, 1));
    }
    build_colored_tensor(&c, 3).unwrap()
}

/// The two-vertex, three-edge, six-flag graph of the second worked example,
/// produced from a four-vertex colored seed by contracting the two chain
/// edges (ids 2 then 3). Edge ids in the result: 0 (color 0), 1 (color 1),
/// 4 (color 3, a self-loop).
fn chain_example() -> StrandedGraph {
    let mut c = CompactColored::default();
    c.vertices.insert(0, true);
    c.vertices.insert(1, false);
    c.vertices.insert(2, true);
    c.vertices.insert(3, false);
    c.edges.insert(0, (0, 0, 1));
    c.edges.insert(1, (1, 0, 3));
    c.edges.insert(2, (1, 1, 2));
    c.edges.insert(3, (2, 2, 3));
    c.edges.insert(4, (3, 1, 2));
    c.flags.insert(0, (2, 0));
    c.flags.insert(1, (3, 0));
    c.flags.insert(2, (2, 1));
    c.flags.insert(3, (0, 2));
    c.flags.insert(4, (0, 3));
    c.flags.insert(5, (3, 3));
    let seed = build_colored_tensor(&c, 3).unwrap();
    seed.contract_soft(2).unwrap().contract_soft(3).unwrap()
}

fn mono(c: i64, exps: &[(Var, i32)]) -> Polynomial {
    Polynomial::monomial(c, exps)
}

/// Sum of `x^1 · (∏ β_e) · tail` over the given edge subsets.
fn beta_terms(subsets: &[&[u32]], x_pow: i32, tail: &[(Var, i32)]) -> Polynomial {
    let mut acc = Polynomial::zero();
    for sub in subsets {
        let mut exps: Vec<(Var, i32)> = vec![(X, x_pow)];
        exps.extend(sub.iter().map(|&e| (Var::Beta(e), 1)));
        exps.extend_from_slice(tail);
        acc = acc.add(&mono(1, &exps));
    }
    acc
}

/// Frozen multivariate expansion of the melon, term by term over the five
/// subset sizes.
fn melon_multivariate_golden() -> Polynomial {
    let full = beta_terms(&[&[0, 1, 2, 3]], 1, &[(Z1, 6), (Z2, 4)]);
    let triples = beta_terms(
        &[&[0, 1, 2], &[0, 2, 3], &[1, 2, 3], &[0, 1, 3]],
        1,
        &[(Z1, 3), (Z2, 1), (Z3, 3), (S, 1), (W, 3), (Q, 3), (T, 2)],
    );
    let pairs = beta_terms(
        &[&[0, 1], &[0, 2], &[0, 3], &[1, 2], &[1, 3], &[2, 3]],
        1,
        &[(Z1, 1), (Z3, 4), (S, 1), (W, 4), (Q, 6), (T, 4)],
    );
    let singles = beta_terms(
        &[&[0], &[1], &[2], &[3]],
        1,
        &[(Z3, 5), (S, 1), (W, 5), (Q, 9), (T, 6)],
    );
    let empty = mono(1, &[(Z3, 8), (S, 2), (W, 8), (Q, 12), (T, 8)]);
    full.add(&triples).add(&pairs).add(&singles).add(&empty)
}

#[test]
fn melon_multivariate_with_cut_and_contraction() {
    let g = melon();
    let t_g = t_multivariate(&g).unwrap();
    assert_eq!(t_g, melon_multivariate_golden(), "multivariate melon");

    // Cutting edge 0 drops every subset containing it except through the
    // flagged remnants; the frozen expansion keeps only β-products over
    // {1,2,3}, with the cell exponents of the cut graph.
    let cut0 = g.cut(0).unwrap();
    let t_cut = t_multivariate(&cut0).unwrap();
    let cut_golden = beta_terms(
        &[&[1, 2, 3]],
        1,
        &[(Z1, 3), (Z2, 1), (Z3, 3), (S, 1), (W, 3), (Q, 3), (T, 2)],
    )
    .add(&beta_terms(
        &[&[1, 2], &[1, 3], &[2, 3]],
        1,
        &[(Z1, 1), (Z3, 4), (S, 1), (W, 4), (Q, 6), (T, 4)],
    ))
    .add(&beta_terms(
        &[&[1], &[2], &[3]],
        1,
        &[(Z3, 5), (S, 1), (W, 5), (Q, 9), (T, 6)],
    ))
    .add(&mono(1, &[(Z3, 8), (S, 2), (W, 8), (Q, 12), (T, 8)]));
    assert_eq!(t_cut, cut_golden, "multivariate melon with edge 0 cut");

    // Contracting edge 0 merges the two vertices; every subset rank drops
    // to zero, and the cell exponents are those of the one-vertex graph.
    let con0 = g.contract_soft(0).unwrap();
    let t_con = t_multivariate(&con0).unwrap();
    let con_golden = beta_terms(&[&[1, 2, 3]], 0, &[(Z1, 6), (Z2, 4)])
        .add(&beta_terms(
            &[&[1, 2], &[2, 3], &[1, 3]],
            0,
            &[(Z1, 3), (Z2, 1), (Z3, 3), (S, 1), (W, 3), (Q, 3), (T, 2)],
        ))
        .add(&beta_terms(
            &[&[1], &[2], &[3]],
            0,
            &[(Z1, 1), (Z3, 4), (S, 1), (W, 4), (Q, 6), (T, 4)],
        ))
        .add(&mono(1, &[(Z3, 5), (S, 1), (W, 5), (Q, 9), (T, 6)]));
    assert_eq!(t_con, con_golden, "multivariate melon with edge 0 contracted");

    // The regular-edge recurrence in multivariate form.
    let rebuilt = t_cut.add(&t_con.mul_monomial(1, &[(X, 1), (Var::Beta(0), 1)]));
    assert_eq!(t_g, rebuilt, "multivariate split along edge 0");
}

#[test]
fn melon_multivariate_collapses_to_statesum() {
    // Substituting β_e → y-1 (shifted: Y), z1 → z^2, z2 → z^3·s·(z^-2)^?…
    // is not a clean specialisation in general; instead freeze the direct
    // seven-variable melon value and check it independently.
    let g = melon();
    let t = t_frak_statesum(&g).unwrap();
    let golden = mono(1, &[(Y, 3), (Z, 7)])
        .add(&mono(4, &[(Y, 2), (Z, 10), (S, 1), (W, 3), (Q, 3), (T, 2)]))
        .add(&mono(6, &[(Y, 1), (Z, 11), (S, 1), (W, 4), (Q, 6), (T, 4)]))
        .add(&mono(4, &[(Z, 12), (S, 1), (W, 5), (Q, 9), (T, 6)]))
        .add(&mono(1, &[(X, 1), (Z, 20), (S, 2), (W, 8), (Q, 12), (T, 8)]));
    assert_eq!(t, golden);
}

/// Frozen seven-variable value of the chain example.
fn chain_golden() -> Polynomial {
    mono(1, &[(X, 1), (Z, 24), (S, 2), (W, 10), (Q, 18), (T, 12)])
        .add(&mono(1, &[(X, 1), (Y, 1), (Z, 23), (S, 2), (W, 9), (Q, 15), (T, 10)]))
        .add(&mono(2, &[(Z, 16), (S, 1), (W, 7), (Q, 15), (T, 10)]))
        .add(&mono(3, &[(Y, 1), (Z, 15), (S, 1), (W, 6), (Q, 12), (T, 8)]))
        .add(&mono(1, &[(Y, 2), (Z, 14), (S, 1), (W, 5), (Q, 9), (T, 6)]))
}

#[test]
fn chain_example_value_and_factored_form() {
    let g = chain_example();
    let t = t_frak_statesum(&g).unwrap();
    assert_eq!(t, chain_golden(), "seven-variable value");
    assert_eq!(t, t_frak_recursive(&g).unwrap(), "recursive evaluator");

    // The same value in its factored presentation:
    // [X z^10 s w^5 q^9 t^6 + XY z^9 s w^4 q^6 t^4 + 2 z^2 w^2 q^6 t^4
    //  + 3Y z w q^3 t^2 + Y^2] · z^14 s w^5 q^9 t^6.
    let bracket = mono(1, &[(X, 1), (Z, 10), (S, 1), (W, 5), (Q, 9), (T, 6)])
        .add(&mono(1, &[(X, 1), (Y, 1), (Z, 9), (S, 1), (W, 4), (Q, 6), (T, 4)]))
        .add(&mono(2, &[(Z, 2), (W, 2), (Q, 6), (T, 4)]))
        .add(&mono(3, &[(Y, 1), (Z, 1), (W, 1), (Q, 3), (T, 2)]))
        .add(&mono(1, &[(Y, 2)]));
    let factored = bracket.mul_monomial(1, &[(Z, 14), (S, 1), (W, 5), (Q, 9), (T, 6)]);
    assert_eq!(t, factored, "factored presentation");
}

#[test]
fn chain_example_recursion_chain() {
    let g = chain_example();
    let t_g = t_frak_statesum(&g).unwrap();

    // Step 1: split along the regular edge 1.
    let g_cut = g.cut(1).unwrap();
    let g_con = g.contract_soft(1).unwrap();
    let t_cut = t_frak_statesum(&g_cut).unwrap();
    let t_con = t_frak_statesum(&g_con).unwrap();
    assert!(
        matches!(g.classify_edge(1).unwrap(), StrandedEdgeClass::Regular),
        "edge 1 is regular in the full graph"
    );
    assert_eq!(t_g, t_cut.add(&t_con), "regular split along edge 1");

    // Step 2: in the cut graph, edge 0 is a bridge; the bridge factor is
    // X z^8 s w^3 q^3 t^2 + 1.
    assert!(
        matches!(g_cut.classify_edge(0).unwrap(), StrandedEdgeClass::Bridge),
        "edge 0 is a bridge once edge 1 is cut"
    );
    let a = g_cut.contract_soft(0).unwrap();
    let t_a = t_frak_statesum(&a).unwrap();
    let bridge_factor = mono(1, &[(X, 1), (Z, 8), (S, 1), (W, 3), (Q, 3), (T, 2)])
        .add(&Polynomial::one());
    assert_eq!(t_cut, bridge_factor.mul(&t_a), "bridge factor along edge 0");

    // Step 3: edge 4 is a self-loop in both remaining graphs, and both
    // split with the factor Y z.
    let yz = mono(1, &[(Y, 1), (Z, 1)]);
    for (name, h) in [("after bridge", &a), ("after contraction", &g_con)] {
        assert!(
            matches!(
                h.classify_edge(4).unwrap(),
                StrandedEdgeClass::SelfLoop { .. }
            ),
            "edge 4 is a self-loop {name}"
        );
        let t_h = t_frak_statesum(h).unwrap();
        let t_h_cut = t_frak_statesum(&h.cut(4).unwrap()).unwrap();
        let t_h_con = t_frak_statesum(&h.contract_soft(4).unwrap()).unwrap();
        assert_eq!(
            t_h,
            t_h_cut.add(&yz.mul(&t_h_con)),
            "self-loop split with factor Yz {name}"
        );
    }

    // The four innermost values, frozen.
    let i1 = t_frak_statesum(&a.cut(4).unwrap()).unwrap();
    let i2 = t_frak_statesum(&a.contract_soft(4).unwrap()).unwrap();
    let i3 = t_frak_statesum(&g_con.cut(4).unwrap()).unwrap();
    let i4 = t_frak_statesum(&g_con.contract_soft(4).unwrap()).unwrap();
    assert_eq!(i1, mono(1, &[(Z, 16), (S, 1), (W, 7), (Q, 15), (T, 10)]));
    assert_eq!(i2, mono(1, &[(Z, 14), (S, 1), (W, 6), (Q, 12), (T, 8)]));
    assert_eq!(
        i3,
        mono(1, &[(Z, 16), (S, 1), (W, 7), (Q, 15), (T, 10)])
            .add(&mono(1, &[(Y, 1), (Z, 15), (S, 1), (W, 6), (Q, 12), (T, 8)]))
    );
    assert_eq!(
        i4,
        mono(1, &[(Z, 14), (S, 1), (W, 6), (Q, 12), (T, 8)])
            .add(&mono(1, &[(Y, 1), (Z, 13), (S, 1), (W, 5), (Q, 9), (T, 6)]))
    );

    // Full reassembly from the leaves.
    let rebuilt = bridge_factor
        .mul(&i1.add(&yz.mul(&i2)))
        .add(&i3.add(&yz.mul(&i4)));
    assert_eq!(t_g, rebuilt, "reassembled from the four leaves");
}

#[test]
fn chain_example_cell_counts() {
    let g = chain_example();
    let cc = g.cell_counts().unwrap();
    assert_eq!(
        (cc.k, cc.v, cc.e, cc.flags),
        (1, 2, 3, 6),
        "components, vertices, edges, flags"
    );
    assert_eq!((cc.f_int, cc.b_int, cc.b_ext), (1, 0, 4), "internal cells");
    assert_eq!(
        (cc.c_bnd, cc.e_bnd, cc.f_bnd, cc.f_ext),
        (1, 9, 5, 9),
        "boundary cells"
    );
    assert_eq!(g.zeta().unwrap(), 9);

    // Every spanning c-subgraph keeps a non-negative z-exponent; spot-check
    // by evaluating the state sum (it errors internally otherwise).
    for keep in 0u32..8 {
        let mut set = BTreeSet::new();
        for (bit, id) in [(0, 0u32), (1, 1), (2, 4)] {
            if keep >> bit & 1 == 1 {
                set.insert(id);
            }
        }
        let sub = g.spanning_c_subgraph(&set);
        sub.cell_counts().unwrap();
    }
}
