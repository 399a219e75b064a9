#!/usr/bin/env python3
"""Smoke test for the strandpoly_py extension module.

Builds nothing itself: run `cargo build -p strandpoly-py` first, then
`python3 python/smoke_test.py`. Finds the compiled cdylib under target/,
stages it under an importable name, and exercises the bound API.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent

MELON = json.dumps(
    {
        "version": 1,
        "family": "colored_tensor",
        "payload": {
            "rank": 3,
            "vertices": {"0": True, "1": False},
            "edges": {str(e): [e, 0, 1] for e in range(4)},
        },
    }
)

MELON_T_FRAK = (
    "X z^20 s^2 w^8 q^12 t^8 + 4 z^12 s w^5 q^9 t^6 "
    "+ 6 Y z^11 s w^4 q^6 t^4 + 4 Y^2 z^10 s w^3 q^3 t^2 + Y^3 z^7"
)


def stage_module() -> Path:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libstrandpoly_py.so", "strandpoly_py.so", "libstrandpoly_py.dylib")
    ]
    built = next((c for c in candidates if c.exists()), None)
    if built is None:
        sys.exit("no compiled module found; run `cargo build -p strandpoly-py` first")
    stage = Path(tempfile.mkdtemp(prefix="strandpoly-py-"))
    shutil.copy2(built, stage / "strandpoly_py.so")
    return stage


def run() -> None:
    sys.path.insert(0, str(stage_module()))
    import strandpoly_py as sp

    assert sp.format_version() == 1

    # Golden value: the one-edge-color-at-a-time melon polynomial.
    melon = sp.Graph.parse(MELON)
    assert melon.family == "colored_tensor"
    assert melon.invariant("t-frak") == MELON_T_FRAK

    # Terms round-trip: leading term of the same polynomial.
    terms = melon.invariant_terms("t-frak")
    assert {"coeff": "1", "exponents": {"X": 1, "z": 20, "s": 2, "w": 8, "q": 12, "t": 8}} in terms

    # Structure queries.
    assert melon.edge_ids() == [0, 1, 2, 3]
    assert melon.classify_edge(0) == "regular"
    counts = melon.cell_counts()
    assert (counts["v"], counts["e"], counts["f_int"]) == (2, 4, 6)

    # Cut/contract stay inside the colored class via provenance.
    contracted = melon.contract(0)
    assert contracted.family == "w_colored"
    assert contracted.edge_ids() == [1, 2, 3]
    cut = melon.cut(1)
    assert cut.family == "w_colored"

    # Edge 0 is regular, so the polynomial splits as cut-branch + contract-branch.
    def poly(graph):
        return {
            tuple(sorted(t["exponents"].items())): int(t["coeff"])
            for t in graph.invariant_terms("t-frak")
        }

    total = poly(melon.cut(0))
    for monomial, coeff in poly(contracted).items():
        total[monomial] = total.get(monomial, 0) + coeff
    assert poly(melon) == {m: c for m, c in total.items() if c}

    # Expansion and reduction round-trips.
    expanded = melon.expand()
    assert expanded.family == "w_colored"
    assert expanded.invariant("t-frak") == MELON_T_FRAK
    reduced = contracted.reduce()
    assert reduced.invariant("t-frak") == contracted.invariant("t-frak")

    # Basis conversion against the classic Tutte polynomial of the collapsed
    # graph: four parallel edges between two vertices.
    assert melon.invariant("tutte", basis="standard") == "y^3 + y^2 + x + y"

    # Generation is deterministic and family-faithful.
    g1 = sp.generate("ribbon", seed=11)
    g2 = sp.generate("ribbon", seed=11)
    assert g1.render() == g2.render()
    assert g1.family == "ribbon"

    # A short verification run comes back clean and structured.
    report = sp.verify_suite("t_frak_recurrence", seed=5, cases=10)
    assert report["suite"] == "t_frak_recurrence"
    assert report["cases"] == 10
    assert report["failures"] == []
    assert "t_frak_recurrence" in sp.suites()

    # Errors map to Python exception types.
    try:
        sp.Graph.parse("{")
    except ValueError:
        pass
    else:
        sys.exit("malformed JSON should raise ValueError")
    try:
        melon.invariant("br")
    except TypeError:
        pass
    else:
        sys.exit("family mismatch should raise TypeError")

    print("smoke test: OK")


if __name__ == "__main__":
    run()
