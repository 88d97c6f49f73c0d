"""Exhaustive minimum cycle decomposition for small even multigraphs.

This is deliberately naive: it shares no code with the reduction engine and
serves as ground truth in tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .construction import CycleDecomposition
from .multigraph import Multigraph

__all__ = ["OracleResult", "brute_force_c", "enumerate_even_multigraphs"]

DEFAULT_MAX_EDGES = 16


@dataclass
class OracleResult:
    c_min: int
    witness: CycleDecomposition


def brute_force_c(g: Multigraph, max_edges: int = DEFAULT_MAX_EDGES) -> OracleResult:
    """Minimum number of simple cycles partitioning the edges of ``g``.

    Search: take the uncovered edge with the lowest index, try every simple
    cycle through it among the uncovered edges, recurse, and memoize on the
    bitmask of uncovered edges.
    """
    m = g.edge_count
    if m > max_edges:
        raise ValueError(f"graph has {m} edges, exceeds max-edges {max_edges}")
    for v, d in g.degrees().items():
        if d % 2:
            raise ValueError(f"odd degree {d} at node {v}")

    ends = list(g.endpoints)
    ids = list(g.edge_ids)
    incident: dict[int, list[int]] = {v: [] for v in g.nodes}
    for i, (u, v) in enumerate(ends):
        incident[u].append(i)
        if v != u:
            incident[v].append(i)

    def cycles_through(i: int, mask: int) -> Iterator[tuple[int, list]]:
        a, b = ends[i]
        if a == b:
            yield 1 << i, [(i, a, a)]
            return
        # simple paths from b back to a avoiding edge i
        path = [(i, a, b)]
        on_path = {a, b}

        def dfs(x: int, used: int):
            for j in incident[x]:
                if not (mask >> j) & 1 or (used >> j) & 1:
                    continue
                p, q = ends[j]
                if p == q:
                    continue
                y = q if p == x else p
                if y == a:
                    path.append((j, x, y))
                    yield used | (1 << j), list(path)
                    path.pop()
                elif y not in on_path:
                    on_path.add(y)
                    path.append((j, x, y))
                    yield from dfs(y, used | (1 << j))
                    path.pop()
                    on_path.discard(y)

        yield from dfs(b, 1 << i)

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[int, tuple]:
        if mask == 0:
            return 0, ()
        i = (mask & -mask).bit_length() - 1
        top = None
        for cyc_mask, walk in cycles_through(i, mask):
            count, rest = best(mask & ~cyc_mask)
            if top is None or count + 1 < top[0]:
                top = (count + 1, (tuple(walk),) + rest)
        if top is None:
            # cannot happen for even graphs: every edge lies on a cycle
            raise ValueError("no cycle through an uncovered edge; graph is not even")
        return top

    count, walks = best((1 << m) - 1)
    best.cache_clear()
    cycles = [[(ids[j], x, y) for j, x, y in walk] for walk in walks]
    return OracleResult(count, CycleDecomposition(cycles))


def enumerate_even_multigraphs(max_nodes: int, max_edges: int) -> Iterator[Multigraph]:
    """All labeled multigraphs on 1..max_nodes nodes with degrees in {2, 4}.

    Loops and parallel edges are included; isolated nodes are not (degree 0
    is excluded). Edges are listed loops first, then pairs in lexicographic
    order, each repeated by its multiplicity.
    """
    if max_nodes > 5 or max_edges > 12 or max_nodes < 0 or max_edges < 0:
        raise ValueError("bounds exceeded: need max_nodes <= 5 and max_edges <= 12")
    for n in range(1, max_nodes + 1):
        slots = [(v, v) for v in range(n)] + list(itertools.combinations(range(n), 2))
        yield from _fill(n, slots, max_edges)


def _fill(n: int, slots, max_edges: int) -> Iterator[Multigraph]:
    deg = [0] * n
    mult = [0] * len(slots)
    # last slot index touching each node; degrees are final after it
    last_touch = [0] * n
    for k, (u, v) in enumerate(slots):
        last_touch[u] = max(last_touch[u], k)
        last_touch[v] = max(last_touch[v], k)

    def rec(k: int, edges: int):
        if k == len(slots):
            pairs = [slots[i] for i in range(len(slots)) for _ in range(mult[i])]
            yield Multigraph(n, pairs)
            return
        u, v = slots[k]
        step = 2 if u == v else 1
        count = 0
        while True:
            if deg[u] > 4 or deg[v] > 4 or edges + count > max_edges:
                break
            if all(deg[x] in (2, 4) for x in (u, v) if last_touch[x] == k):
                mult[k] = count
                yield from rec(k + 1, edges + count)
            deg[u] += step
            if u != v:
                deg[v] += step
            count += 1
        # undo
        deg[u] -= step * count
        if u != v:
            deg[v] -= step * count
        mult[k] = 0

    yield from rec(0, 0)
