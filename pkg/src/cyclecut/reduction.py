"""Linear-time minimum cycle decomposition for double ear decomposable graphs.

The engine reduces a connected multigraph whose degrees are all 2 or 4 with
five rules, applied in the fixed priority

    loop removal, resolving, quadruple edge, triple edge, double-edge path.

Parallel edges are kept as weighted bundles. Nodes of degree 2, bundles of
weight 2, 3 and 4, and loop bundles live in worklists with O(1) insertion
and removal, so each step costs time proportional to the edges
it removes. Every removed or merged edge copy carries a provenance record,
which lets the caller expand the recorded steps back into cycles of the
input graph.
"""
from __future__ import annotations

import gc
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Optional, Union

from .multigraph import Multigraph, connected_components

__all__ = [
    "Bundle",
    "Concat",
    "DecompositionResult",
    "DoubleEdgePath",
    "FinalLoop",
    "LoopRemoved",
    "NotDecomposable",
    "QuadrupleEdge",
    "ReductionStuck",
    "Resolved",
    "TripleEdge",
    "WorkState",
    "audit",
    "cycle_number",
    "expand",
    "init_state",
    "run",
    "step_double",
    "step_loop",
    "step_quadruple",
    "step_resolve",
    "step_triple",
]


class Concat:
    """Two copies joined at a resolved node ``via``."""

    __slots__ = ("left", "right", "via")

    def __init__(self, left: CopyRecord, right: CopyRecord, via: int):
        self.left = left
        self.right = right
        self.via = via

    def __repr__(self):
        return f"Concat({self.left!r}, {self.right!r}, via={self.via})"


# a copy record is either an input edge id or a Concat of two records
CopyRecord = Union[int, Concat]


def expand(record: CopyRecord) -> list[int]:
    """Input edge ids covered by ``record``, left to right."""
    out = []
    stack = [record]
    while stack:
        r = stack.pop()
        if type(r) is int:
            out.append(r)
        else:
            stack.append(r.right)
            stack.append(r.left)
    return out


def via_nodes(record: CopyRecord) -> list[int]:
    """Interior nodes of the walk ``expand(record)``, in walk order."""
    out = []
    stack = []
    r = record
    while True:
        while type(r) is Concat:
            stack.append(r)
            r = r.left
        if not stack:
            return out
        top = stack.pop()
        out.append(top.via)
        r = top.right


# -- trace steps ------------------------------------------------------------

@dataclass(slots=True)
class LoopRemoved:
    node: int
    record: CopyRecord


@dataclass(slots=True)
class FinalLoop:
    node: int
    record: CopyRecord


@dataclass(slots=True)
class DoubleEdgePath:
    nodes: tuple
    path_records: tuple
    closing: CopyRecord


@dataclass(slots=True)
class TripleEdge:
    ends: tuple
    records: tuple


@dataclass(slots=True)
class QuadrupleEdge:
    ends: tuple
    pairs: tuple


@dataclass(slots=True)
class Resolved:
    """``merged`` joins the copies ``ends[0]``-``node`` and ``node``-``ends[1]``."""

    node: int
    u: int
    w: int
    merged: Concat

    @property
    def ends(self) -> tuple:
        return (self.u, self.w)

    @property
    def left(self) -> CopyRecord:
        return self.merged.left

    @property
    def right(self) -> CopyRecord:
        return self.merged.right


ReductionStep = Union[LoopRemoved, FinalLoop, DoubleEdgePath, TripleEdge, QuadrupleEdge, Resolved]

CYCLES_PER_STEP = {
    LoopRemoved: 1,
    FinalLoop: 1,
    DoubleEdgePath: 1,
    TripleEdge: 1,
    QuadrupleEdge: 2,
    Resolved: 0,
}


class ReductionStuck(Exception):
    """Raised inside a step when the graph is shown not to be decomposable."""


class NotDecomposable(ValueError):
    """The graph (or one of its components) is not double ear decomposable."""

    def __init__(self, witness: str):
        self.witness = witness
        super().__init__(witness)


@dataclass
class DecompositionResult:
    decomposable: bool
    c: Optional[int] = None
    trace: list = field(default_factory=list)
    witness: Optional[str] = None

    def __bool__(self):
        return self.decomposable


# -- work state ---------------------------------------------------------------

class Bundle:
    """All remaining parallel copies between ``u`` and ``v`` (``u == v`` for loops)."""

    __slots__ = ("u", "v", "copies", "slot", "parked")

    def __init__(self, u: int, v: int, copies: Optional[list] = None):
        self.u = u
        self.v = v
        self.copies: list = [] if copies is None else copies
        self.slot = -1
        self.parked = False

    @property
    def weight(self) -> int:
        return len(self.copies)

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u

    def __repr__(self):
        return f"Bundle({self.u}, {self.v}, weight={len(self.copies)})"


class _BundleList:
    """Unordered bundle list; each bundle stores its own slot for O(1) removal."""

    __slots__ = ("items",)

    def __init__(self):
        self.items: list[Bundle] = []

    def add(self, b: Bundle) -> None:
        b.slot = len(self.items)
        self.items.append(b)

    def remove(self, b: Bundle) -> None:
        items = self.items
        last = items.pop()
        if last is not b:
            items[b.slot] = last
            last.slot = b.slot
        b.slot = -1

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)


def _table(g: Multigraph, value):
    if isinstance(g.nodes, range):
        return [value] * len(g.nodes)
    return dict.fromkeys(g.nodes, value)


class WorkState:
    """Mutable reduction state for one connected graph.

    ``adj[v]`` maps each neighbor of ``v`` (``v`` itself for a loop) to the
    shared :class:`Bundle`. ``rng`` only matters for tests that want to
    vary choices within a step; by default the first list entry is used.

    Degrees never increase during a reduction, so a node joins ``V2`` at
    most once; ``V2`` is a plain stack that only drops nodes by being
    popped (a node whose degree falls to 0 ends the run and is left in).

    Weight-2 bundles whose doubled path was found blocked sit in ``E2p``
    instead of ``E2`` until a bundle at one of the path's ends changes
    (``parked_at`` holds the groups per end node). With ``retry=False`` a
    blocked path fails the run immediately.
    """

    def __init__(self, g: Multigraph, rng: Optional[random.Random] = None, retry: bool = True):
        self.graph = g
        self.rng = rng
        self.retry = retry
        self.adj = _table(g, None)
        for v in g.nodes:
            self.adj[v] = {}
        self.deg = _table(g, 0)
        self.visited = _table(g, False)
        self.V2: list = []
        self.E2 = _BundleList()
        self.E3 = _BundleList()
        self.E4 = _BundleList()
        self.E2p = _BundleList()
        self.L = _BundleList()
        self.parked_at = _table(g, None)
        self.alive = g.node_count
        self.c = 0
        self.trace: list = []
        self.finished = False

    @property
    def V4(self) -> list:
        # no rule consumes degree-4 nodes, so this is derived on demand
        return [v for v in self.graph.nodes if self.deg[v] == 4]

    # list bookkeeping

    def _bundle_list(self, b: Bundle):
        if b.u == b.v:
            return self.L
        w = len(b.copies)
        if w == 2:
            return self.E2p if b.parked else self.E2
        if w == 3:
            return self.E3
        if w == 4:
            return self.E4
        return None

    def _unlist(self, b: Bundle) -> None:
        if b.slot >= 0:
            self._bundle_list(b).remove(b)
        b.parked = False

    def _park(self, bundles: list, ends: tuple) -> None:
        for b in bundles:
            if not b.parked:
                self.E2.remove(b)
                b.parked = True
                self.E2p.add(b)
        for x in ends:
            if self.parked_at[x] is None:
                self.parked_at[x] = [bundles]
            else:
                self.parked_at[x].append(bundles)

    def _touch(self, x: int) -> None:
        """Bundles at ``x`` changed: give paths blocked at ``x`` another try."""
        if not self.E2p.items:
            # nothing is parked; stale groups are harmless
            return
        groups = self.parked_at[x]
        if groups is None:
            return
        self.parked_at[x] = None
        for group in groups:
            for b in group:
                if b.parked:
                    self.E2p.remove(b)
                    b.parked = False
                    self.E2.add(b)

    def _relist(self, b: Bundle) -> None:
        lst = self._bundle_list(b)
        if lst is not None:
            lst.add(b)

    def _set_degree(self, v: int, d: int) -> None:
        old = self.deg[v]
        if old == d:
            return
        self.deg[v] = d
        if d == 2:
            self.V2.append(v)

    def _drop_bundle(self, b: Bundle) -> None:
        del self.adj[b.u][b.v]
        if b.u != b.v:
            del self.adj[b.v][b.u]

    def _pick(self, items: list):
        if self.rng is None:
            return items[-1]
        return items[self.rng.randrange(len(items))]


def init_state(
    g: Multigraph, rng: Optional[random.Random] = None, retry: bool = True
) -> WorkState:
    """Build bundles, degree lists and weight lists for ``g``.

    Raises :class:`ReductionStuck` naming the first node whose degree is not
    2 or 4; connectivity is the caller's concern.
    """
    s = WorkState(g, rng, retry)
    adj = s.adj
    deg = s.deg
    lists = []
    for eid, (u, v) in zip(g.edge_ids, g.endpoints):
        au = adj[u]
        b = au.get(v)
        if b is None:
            b = au[v] = adj[v][u] = Bundle(u, v, [eid])
            if u == v:
                lists.append(b)
        else:
            b.copies.append(eid)
            if len(b.copies) == 2 and u != v:
                lists.append(b)
        deg[u] += 1
        deg[v] += 1
    v2 = s.V2
    for v in g.nodes:
        d = deg[v]
        if d == 2:
            v2.append(v)
        elif d != 4:
            raise ReductionStuck(f"degree {d} at node {v}")
    # degrees are at most 4, so every bundle fits one of the lists
    for b in lists:
        s._bundle_list(b).add(b)
    return s


# -- reduction steps -----------------------------------------------------------

def step_loop(s: WorkState) -> bool:
    """Remove one loop copy; the last remaining loop ends the run."""
    if not s.L.items:
        return False
    b = s.L.items[-1] if s.rng is None else s._pick(s.L.items)
    u = b.u
    s._touch(u)
    rec = b.copies.pop()
    if s.deg[u] == 2:
        if s.alive != 1:
            raise ReductionStuck(f"node {u} is cut off from the rest of the graph")
        s.L.remove(b)
        s._drop_bundle(b)
        s._set_degree(u, 0)
        s.c += 1
        s.trace.append(FinalLoop(u, rec))
        s.finished = True
        return True
    if not b.copies:
        s.L.remove(b)
        s._drop_bundle(b)
    s._set_degree(u, s.deg[u] - 2)
    s.c += 1
    s.trace.append(LoopRemoved(u, rec))
    return True


def step_resolve(s: WorkState) -> bool:
    """Suppress one degree-2 node, merging its two copies into one."""
    return _resolve(s, False)


def _resolve(s: WorkState, batch: bool) -> bool:
    # With ``batch`` keep going until no degree-2 node is left, one node
    # remains, or a loop appears. Loops are the only higher-priority rule,
    # so this is the same sequence as one-at-a-time application.
    items = s.V2
    if not items or s.alive <= 1:
        return False
    adj = s.adj
    deg = s.deg
    parked = s.E2p.items
    L = s.L
    append = s.trace.append
    rng = s.rng
    alive = s.alive
    while items and alive > 1 and not L.items:
        if rng is None:
            v = items.pop()
        else:
            i = rng.randrange(len(items))
            v = items[i]
            items[i] = items[-1]
            items.pop()
        incident = adj[v]
        if len(incident) == 1:
            ((u, b),) = incident.items()
            s._unlist(b)
            left, right = b.copies
            w = u
            del adj[u][v]
        else:
            (u, bu), (w, bw) = incident.items()
            left = bu.copies[0]
            right = bw.copies[0]
            del adj[u][v]
            del adj[w][v]
        incident.clear()
        if parked:
            s._touch(u)
            s._touch(w)
        deg[v] = 0
        alive -= 1

        merged = Concat(left, right, v)
        au = adj[u]
        target = au.get(w)
        if target is None:
            if w == u:
                target = Bundle(u, u, [merged])
                L.add(target)
            else:
                # reuse the u-v bundle, which is weight 1 and on no list
                target = bu
                target.u = u
                target.v = w
                target.copies[0] = merged
            au[w] = adj[w][u] = target
        else:
            s._unlist(target)
            target.copies.append(merged)
            s._relist(target)
        append(Resolved(v, u, w, merged))
        if not batch:
            break
    s.alive = alive
    return True


def step_quadruple(s: WorkState) -> bool:
    """A weight-4 bundle must be the whole remaining graph: two 2-cycles."""
    if not s.E4:
        return False
    b = s.E4.items[-1]
    if s.alive != 2:
        raise ReductionStuck(f"quadruple edge {b.u}-{b.v} is not the whole graph")
    c0, c1, c2, c3 = b.copies
    s.E4.remove(b)
    s._drop_bundle(b)
    b.copies = []
    s._set_degree(b.u, 0)
    s._set_degree(b.v, 0)
    s.c += 2
    s.trace.append(QuadrupleEdge((b.u, b.v), ((c0, c1), (c2, c3))))
    s.finished = True
    return True


def step_triple(s: WorkState) -> bool:
    """Peel a 2-cycle off a weight-3 bundle."""
    if not s.E3:
        return False
    b = s._pick(s.E3.items)
    s.E3.remove(b)
    s._touch(b.u)
    s._touch(b.v)
    second = b.copies.pop()
    first = b.copies.pop()
    s._set_degree(b.u, s.deg[b.u] - 2)
    s._set_degree(b.v, s.deg[b.v] - 2)
    s.c += 1
    s.trace.append(TripleEdge((b.u, b.v), (first, second)))
    return True


def step_double(s: WorkState) -> bool:
    """Remove the cycle formed by a maximal doubled path and its closing edge.

    A path is blocked when it has a single edge or its ends are not
    adjacent; it is parked and the next weight-2 bundle is tried.
    """
    while s.E2:
        nodes, bundles, closing, reason = _doubled_path(s, s._pick(s.E2.items))
        if reason is None:
            break
        if not s.retry:
            raise ReductionStuck(reason)
        s._park(bundles, (nodes[0], nodes[-1]))
    else:
        if s.E2p:
            raise ReductionStuck(f"every doubled path is blocked ({reason})")
        return False

    path_records = []
    for b in bundles:
        s._unlist(b)
        path_records.append(b.copies.pop())
    s._unlist(closing)
    closing_record = closing.copies.pop()
    if closing.copies:
        s._relist(closing)
    else:
        s._drop_bundle(closing)
    for x in nodes:
        s._set_degree(x, 2)
    s._touch(nodes[0])
    s._touch(nodes[-1])
    s.c += 1
    s.trace.append(DoubleEdgePath(tuple(nodes), tuple(path_records), closing_record))
    return True


def _doubled_path(s: WorkState, seed: Bundle):
    """Grow ``seed`` through nodes with exactly two distinct neighbors.

    Returns ``(nodes, path bundles, closing bundle, reason)`` where
    ``reason`` is None for a usable path.
    """
    adj = s.adj
    visited = s.visited
    u, v = seed.u, seed.v
    visited[u] = visited[v] = True
    front = _extend(adj, visited, u)
    back = _extend(adj, visited, v)
    front.reverse()
    nodes = front + [u, v] + back
    for x in nodes:
        visited[x] = False
    bundles = [adj[x][y] for x, y in zip(nodes, nodes[1:])]
    v0, vl = nodes[0], nodes[-1]
    if len(nodes) == 2:
        # the only v0-vl copies are the path's own; removing both would not
        # undo a double ear
        return nodes, bundles, None, f"double edge {v0}-{vl} is not part of a longer doubled path"
    closing = adj[v0].get(vl)
    if closing is None:
        return nodes, bundles, None, f"doubled path from {v0} to {vl} has no closing edge"
    return nodes, bundles, closing, None


def _extend(adj, visited, start) -> list:
    out = []
    x = start
    while True:
        nbrs = adj[x]
        if len(nbrs) != 2:
            return out
        a, b = nbrs
        if not visited[a]:
            y = a
        elif not visited[b]:
            y = b
        else:
            return out
        visited[y] = True
        out.append(y)
        x = y


# -- driver -------------------------------------------------------------------

def _connected(g: Multigraph) -> bool:
    adj = g._adjacency_table()
    root = g.nodes[0]
    seen = {root}
    stack = [root]
    while stack:
        for y, _ in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == g.node_count


@contextmanager
def _gc_paused():
    # the engine allocates millions of acyclic objects; generational
    # collection passes over them would dominate the running time
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def run(
    g: Multigraph, rng: Optional[random.Random] = None, retry: bool = True
) -> DecompositionResult:
    """Compute the cycle number of a connected graph by exhaustive reduction.

    Returns a failed result with a witness string when ``g`` is not double
    ear decomposable. ``retry=False`` gives up on the first blocked doubled
    path instead of trying the others.

    Connectivity is not checked up front: no reduction joins components
    and both terminal steps need the whole graph, so a disconnected graph
    always gets stuck and is reported as such.
    """
    if g.node_count == 0:
        return DecompositionResult(False, witness="empty graph")
    with _gc_paused():
        try:
            s = init_state(g, rng, retry)
            L, V2, E4, E3 = s.L.items, s.V2, s.E4.items, s.E3.items
            while not s.finished:
                if L:
                    step_loop(s)
                elif V2 and s.alive > 1:
                    _resolve(s, True)
                elif E4:
                    step_quadruple(s)
                elif E3:
                    step_triple(s)
                elif not step_double(s):
                    raise ReductionStuck("no reduction applies")
        except ReductionStuck as exc:
            if str(exc).startswith("degree ") or _connected(g):
                return DecompositionResult(False, witness=str(exc))
            return DecompositionResult(False, witness="graph is disconnected")
    return DecompositionResult(True, c=s.c, trace=s.trace)


def cycle_number(g: Multigraph) -> int:
    """Sum of the cycle numbers of the connected components of ``g``.

    Raises :class:`NotDecomposable` if any component (an isolated node
    included) fails.
    """
    if g.node_count == 0:
        return 0
    total = 0
    for piece, nodes, _ in connected_components(g):
        result = run(piece)
        if not result:
            raise NotDecomposable(_globalize(result.witness, nodes))
        total += result.c
    return total


def _globalize(witness: str, nodes: list[int]) -> str:
    # witnesses of the "degree d at node v" form name a local id
    prefix, sep, tail = witness.rpartition(" at node ")
    if sep and tail.isdigit():
        return f"{prefix}{sep}{nodes[int(tail)]}"
    return witness


def audit(s: WorkState) -> list[str]:
    """Consistency problems in ``s``; empty when all bookkeeping agrees."""
    problems = []
    g = s.graph
    seen = set()
    in_v2 = set(s.V2)
    if len(in_v2) != len(s.V2):
        problems.append("V2 lists a node twice")
    if s.finished:
        # the terminal step leaves its node behind with degree 0
        in_v2 = {v for v in in_v2 if s.deg[v]}
    for v in g.nodes:
        d = 0
        for w, b in s.adj[v].items():
            if s.adj[w].get(v) is not b:
                problems.append(f"adjacency of {v}-{w} is not symmetric")
            if not b.copies:
                problems.append(f"empty bundle {v}-{w}")
            d += 2 * len(b.copies) if w == v else len(b.copies)
            if id(b) not in seen:
                seen.add(id(b))
                lst = s._bundle_list(b)
                if lst is None:
                    if b.slot != -1:
                        problems.append(f"bundle {b} listed but weight {len(b.copies)}")
                elif b.slot < 0 or b.slot >= len(lst) or lst.items[b.slot] is not b:
                    problems.append(f"bundle {b} missing from its list")
        if d != s.deg[v]:
            problems.append(f"degree of {v} is {s.deg[v]}, bundles give {d}")
        if (s.deg[v] == 2) != (v in in_v2):
            problems.append(f"V2 membership wrong for {v}")
        if s.visited[v]:
            problems.append(f"node {v} left visited")
    for name, lst in (("E2", s.E2), ("E2p", s.E2p), ("E3", s.E3), ("E4", s.E4), ("L", s.L)):
        for i, b in enumerate(lst.items):
            if b.slot != i or s._bundle_list(b) is not lst:
                problems.append(f"{name} slot {i} holds stale {b}")
    return problems
