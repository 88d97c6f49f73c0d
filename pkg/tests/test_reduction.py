import random

import pytest
from hypothesis import given, strategies as st

from cyclecut import Multigraph, brute_force_c, parse_graph, subdivide
from cyclecut.reduction import (
    CYCLES_PER_STEP,
    Concat,
    DoubleEdgePath,
    FinalLoop,
    LoopRemoved,
    NotDecomposable,
    QuadrupleEdge,
    ReductionStuck,
    Resolved,
    TripleEdge,
    audit,
    cycle_number,
    expand,
    init_state,
    run,
    step_double,
    step_loop,
    step_quadruple,
    step_resolve,
    step_triple,
    via_nodes,
)

from conftest import (
    BOWTIE,
    DOUBLED_TRIANGLE,
    HOUSE,
    K4,
    QUADRUPLE,
    SINGLE_LOOP,
    cycle,
    decomposable_graphs,
)

STEPS = (step_loop, step_resolve, step_quadruple, step_triple, step_double)

# Decomposable (c = 5) but the first doubled path tried is a lone double
# edge, so giving up on the first blocked seed rejects it.
BLOCKED_SEED = parse_graph(
    """10 19
0 1
1 2
3 4
4 2
2 6
6 5
3 7
7 2
5 8
8 3
3 9
9 0
8 6
8 5
5 6
1 9
1 0
0 9
4 4
"""
)

# K4 with two opposite edges doubled: degrees all 4 but treewidth 3.
# Its minimum is 2 cycles; removing the doubled pairs as 2-cycles would
# wrongly report 3.
K4_TWO_DOUBLED = Multigraph(4, K4.endpoints + [(0, 3), (1, 2)])


def one_step(s):
    for step in STEPS:
        if step(s):
            return step
    return None


def weights(s):
    seen = {}
    for v in s.graph.nodes:
        for b in s.adj[v].values():
            seen[id(b)] = b
    return sorted(len(b.copies) for b in seen.values())


# -- records ---------------------------------------------------------------------


def test_expand_and_via_nodes():
    rec = Concat(Concat(3, 4, 7), Concat(5, 6, 9), 8)
    assert expand(rec) == [3, 4, 5, 6]
    assert via_nodes(rec) == [7, 8, 9]
    assert expand(11) == [11]


# -- init_state ------------------------------------------------------------------


def test_init_quadruple():
    s = init_state(QUADRUPLE)
    assert weights(s) == [4]
    assert len(s.E4) == 1 and s.E4.items[0].copies == [0, 1, 2, 3]
    assert s.V4 == [0, 1] and s.V2 == []


def test_init_cycle():
    s = init_state(cycle(3))
    assert weights(s) == [1, 1, 1]
    assert sorted(s.V2) == [0, 1, 2]
    assert not (s.E2 or s.E3 or s.E4 or s.L)
    assert s.c == 0 and not any(s.visited)


def test_init_doubled_triangle():
    s = init_state(DOUBLED_TRIANGLE)
    assert weights(s) == [2, 2, 2] and len(s.E2) == 3
    assert s.V4 == [0, 1, 2]
    assert audit(s) == []


def test_init_rejects_bad_degree():
    with pytest.raises(ReductionStuck, match="degree 6 at node 0"):
        init_state(Multigraph(2, [(0, 1)] * 6))


# -- step_loop -------------------------------------------------------------------


def test_single_loop_is_final():
    s = init_state(SINGLE_LOOP)
    assert step_loop(s)
    assert s.finished and s.c == 1
    assert s.trace == [FinalLoop(0, 0)]


def test_two_loops_at_one_node():
    s = init_state(Multigraph(1, [(0, 0), (0, 0)]))
    assert step_loop(s) and not s.finished
    assert isinstance(s.trace[0], LoopRemoved)
    assert step_loop(s) and s.finished and s.c == 2


def test_loop_step_not_applicable():
    assert not step_loop(init_state(DOUBLED_TRIANGLE))


# -- step_resolve ----------------------------------------------------------------


def test_resolve_shrinks_cycle():
    s = init_state(cycle(4))
    assert step_resolve(s)
    assert s.alive == 3 and s.c == 0
    assert weights(s) == [1, 1, 1]
    step = s.trace[0]
    assert isinstance(step, Resolved) and via_nodes(step.merged) == [step.node]


def test_resolve_two_cycle_makes_loop():
    s = init_state(Multigraph(2, [(0, 1), (0, 1)]))
    assert step_resolve(s)
    assert len(s.L) == 1
    assert step_loop(s) and s.finished and s.c == 1


def test_resolve_into_triple_bundle():
    s = init_state(Multigraph(3, [(0, 1)] * 3 + [(0, 2), (2, 1)]))
    assert len(s.E3) == 1
    assert step_resolve(s)
    assert not s.E3 and len(s.E4) == 1
    assert expand(s.E4.items[0].copies[-1]) == [3, 4]


def test_resolve_needs_two_nodes():
    s = init_state(SINGLE_LOOP)
    assert not step_resolve(s)


# -- step_quadruple --------------------------------------------------------------


def test_quadruple_edge():
    s = init_state(QUADRUPLE)
    assert step_quadruple(s)
    assert s.finished and s.c == 2
    assert s.trace == [QuadrupleEdge((0, 1), ((0, 1), (2, 3)))]


def test_quadruple_must_be_whole_graph():
    s = init_state(Multigraph(5, [(0, 1)] * 4 + [(2, 3), (3, 4), (4, 2)]))
    with pytest.raises(ReductionStuck, match="not the whole graph"):
        step_quadruple(s)
    assert not run(Multigraph(5, [(0, 1)] * 4 + [(1, 2), (2, 3), (3, 1)]))


def test_quadruple_not_applicable():
    assert not step_quadruple(init_state(DOUBLED_TRIANGLE))


# -- step_triple -----------------------------------------------------------------


def test_triple_edge_with_path():
    g = Multigraph(3, [(0, 1)] * 3 + [(0, 2), (2, 1)])
    s = init_state(g)
    assert step_triple(s)
    assert s.c == 1 and s.deg[0] == s.deg[1] == 2
    assert weights(s) == [1, 1, 1]
    assert run(g).c == brute_force_c(g).c_min == 2


def test_triple_endpoints_drop_to_two():
    # three parallel edges between degree-4 nodes, closed by a path through 2
    s = init_state(Multigraph(3, [(0, 1)] * 3 + [(0, 2), (1, 2)]))
    assert step_triple(s)
    assert isinstance(s.trace[-1], TripleEdge)
    assert sorted(s.V2) == [0, 1, 2]


def test_triple_not_applicable():
    assert not step_triple(init_state(DOUBLED_TRIANGLE))


# -- step_double -----------------------------------------------------------------


def test_doubled_triangle_path():
    s = init_state(DOUBLED_TRIANGLE)
    assert step_double(s)
    step = s.trace[0]
    assert isinstance(step, DoubleEdgePath)
    assert len(step.nodes) == 3 and len(step.path_records) == 2
    assert weights(s) == [1, 1, 1] and s.c == 1
    assert audit(s) == []


def test_doubled_c4_path_covers_three_pairs():
    g = Multigraph(4, [p for p in cycle(4).endpoints for _ in (0, 1)])
    s = init_state(g)
    assert step_double(s)
    assert len(s.trace[0].nodes) == 4
    assert run(g).c == 2


def test_lone_double_edge_is_blocked():
    r = run(K4_TWO_DOUBLED)
    assert not r
    assert brute_force_c(K4_TWO_DOUBLED).c_min == 2


def test_no_retry_rejects_blocked_seed():
    r = run(BLOCKED_SEED, retry=False)
    assert not r and "not part of a longer doubled path" in r.witness


def test_retry_accepts_blocked_seed():
    assert run(BLOCKED_SEED).c == 5 == brute_force_c(BLOCKED_SEED, max_edges=19).c_min


# -- run / cycle_number ----------------------------------------------------------


@pytest.mark.parametrize(
    "g, c",
    [(QUADRUPLE, 2), (SINGLE_LOOP, 1), (DOUBLED_TRIANGLE, 2), (BOWTIE, 2)]
    + [(cycle(n), 1) for n in (1, 2, 3, 7)],
)
def test_run_values(g, c):
    r = run(g)
    assert r and r.c == c
    assert sum(CYCLES_PER_STEP[type(t)] for t in r.trace) == c


@pytest.mark.parametrize(
    "g, witness",
    [
        (HOUSE, "degree 3 at node 0"),
        (Multigraph(0), "empty graph"),
        (Multigraph(2, [(0, 0), (1, 1)]), "graph is disconnected"),
        (Multigraph(6, [p for p in K4.endpoints for _ in (0, 1)] + [(4, 5), (5, 4)]), "degree 6 at node 0"),
    ],
)
def test_run_failures(g, witness):
    r = run(g)
    assert not r and r.witness == witness and r.c is None


def test_k4_family_rejected():
    assert not run(K4_TWO_DOUBLED)
    assert not run(Multigraph(4, K4.endpoints + [(0, 1), (2, 3)]))


def test_cycle_number_components():
    assert cycle_number(Multigraph(2, [(0, 0), (1, 1)])) == 2
    triangle_plus_c5 = Multigraph(
        8, DOUBLED_TRIANGLE.endpoints + [(3 + i, 3 + (i + 1) % 5) for i in range(5)]
    )
    assert cycle_number(triangle_plus_c5) == 3
    with pytest.raises(NotDecomposable, match="degree 0 at node 3"):
        cycle_number(Multigraph(4, DOUBLED_TRIANGLE.endpoints))


def test_cycle_number_witness_uses_global_ids():
    g = Multigraph(4, [(0, 0), (1, 2), (2, 3), (3, 1), (1, 2)])
    with pytest.raises(NotDecomposable) as info:
        cycle_number(g)
    assert info.value.witness == "degree 3 at node 1"


# -- properties ------------------------------------------------------------------


@given(decomposable_graphs())
def test_generated_graphs_reduce(gc_pair):
    g, c = gc_pair
    r = run(g)
    assert r and r.c == c
    assert len(r.trace) <= g.node_count + g.edge_count


@given(decomposable_graphs(max_ears=6, max_subdivisions=8))
def test_audit_clean_and_parity_between_steps(gc_pair):
    g, _ = gc_pair
    s = init_state(g)
    removed_per_step = {
        LoopRemoved: lambda t: 1,
        FinalLoop: lambda t: 1,
        TripleEdge: lambda t: 2,
        QuadrupleEdge: lambda t: 4,
        Resolved: lambda t: 1,  # two copies become one
        DoubleEdgePath: lambda t: len(t.nodes),
    }
    copies = g.edge_count
    while not s.finished:
        assert one_step(s) is not None
        assert audit(s) == []
        assert all(s.deg[v] in (0, 2, 4) for v in g.nodes)
        now = sum(weights(s))
        assert copies - now == removed_per_step[type(s.trace[-1])](s.trace[-1])
        copies = now
    assert copies == 0


@given(decomposable_graphs(), st.integers(0, 2**32 - 1))
def test_choice_within_a_step_does_not_change_c(gc_pair, seed):
    g, c = gc_pair
    assert run(g, rng=random.Random(seed)).c == c


@given(decomposable_graphs(), st.data())
def test_subdivision_invariance(gc_pair, data):
    g, c = gc_pair
    e = data.draw(st.sampled_from(list(g.edge_ids)))
    assert run(subdivide(g, e)).c == c


@given(decomposable_graphs(max_ears=5), st.lists(st.integers(0, 40), max_size=4))
def test_loop_additivity(gc_pair, where):
    g, c = gc_pair
    # add loops only at degree-2 nodes so the result stays decomposable
    deg2 = [v for v in g.nodes if g.degree(v) == 2]
    chosen = sorted({deg2[i % len(deg2)] for i in where}) if deg2 else []
    h = Multigraph(g.node_count, g.endpoints + [(v, v) for v in chosen])
    assert cycle_number(h) == len(chosen) + c


@given(decomposable_graphs(max_ears=5), decomposable_graphs(max_ears=5))
def test_component_additivity(a, b):
    (g, c1), (h, c2) = a, b
    n = g.node_count
    union = Multigraph(n + h.node_count, g.endpoints + [(u + n, v + n) for u, v in h.endpoints])
    assert cycle_number(union) == c1 + c2
    assert not run(union)
