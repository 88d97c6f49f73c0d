"""Building double ear decomposable graphs and certifying decompositions.

An :class:`EarScript` starts from a cycle and applies subdivisions and
double ears. Adding a double ear to a path ``p0 .. pl`` of degree-2 nodes
joins ``p0`` and ``pl`` by a new edge and duplicates every path edge; on a
single node it adds a loop. Each double ear raises the cycle number by
exactly one, so a script with ``k`` ears yields a graph with cycle number
``k + 1``.

Replay assigns edge ids deterministically: the initial cycle gets ids
``0 .. len-1`` in order, a subdivision retires the subdivided id and appends
two fresh ids (the half at the edge's first endpoint first), and a double
ear appends the closing edge followed by one duplicate per path edge.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional, Union

from .multigraph import Multigraph
from .reduction import (
    DoubleEdgePath,
    FinalLoop,
    LoopRemoved,
    QuadrupleEdge,
    Resolved,
    TripleEdge,
    expand,
)

__all__ = [
    "CycleDecomposition",
    "EarScript",
    "EarStep",
    "ScriptError",
    "SubdivideStep",
    "apply_script",
    "ear_script_from_trace",
    "instance_for_size",
    "lift_cycles",
    "random_script",
    "validate_decomposition",
]


class ScriptError(ValueError):
    """An ear script that cannot be replayed."""


@dataclass(frozen=True)
class SubdivideStep:
    edge: int


@dataclass(frozen=True)
class EarStep:
    path: tuple


Step = Union[SubdivideStep, EarStep]


def cycle_pairs(length: int) -> list[tuple[int, int]]:
    """Edges of the cycle ``0, 1, .., length-1``; length 1 is a loop."""
    if length < 1:
        raise ValueError("a cycle needs at least one node")
    return [(i, (i + 1) % length) for i in range(length)]


@dataclass
class EarScript:
    """Replayable double ear decomposition."""

    nodes: int
    cycle: list
    steps: list = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def ears(self) -> int:
        return sum(1 for st in self.steps if isinstance(st, EarStep))

    @property
    def expected_c(self) -> int:
        return self.ears + 1

    def to_dict(self) -> dict:
        steps = [
            {"subdivide": st.edge} if isinstance(st, SubdivideStep) else {"ear": list(st.path)}
            for st in self.steps
        ]
        return {
            "initial": {"nodes": self.nodes, "cycle": [list(p) for p in self.cycle]},
            "steps": steps,
            "seed": self.seed,
            "expected_c": self.expected_c,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> EarScript:
        try:
            initial = doc["initial"]
            steps = []
            for st in doc["steps"]:
                if "subdivide" in st:
                    steps.append(SubdivideStep(int(st["subdivide"])))
                elif "ear" in st:
                    steps.append(EarStep(tuple(int(x) for x in st["ear"])))
                else:
                    raise ScriptError(f"unknown step {st!r}")
            script = cls(
                int(initial["nodes"]),
                [tuple(p) for p in initial["cycle"]],
                steps,
                doc.get("seed"),
            )
        except (KeyError, TypeError) as exc:
            raise ScriptError(f"malformed ear script: {exc}") from None
        expected = doc.get("expected_c")
        if expected is not None and expected != script.expected_c:
            raise ScriptError(
                f"expected_c is {expected} but the script has {script.ears} ears"
            )
        return script

    @classmethod
    def from_json(cls, text: str) -> EarScript:
        return cls.from_dict(json.loads(text))


class _Replay:
    """Evolving graph with the bookkeeping random generation needs."""

    def __init__(self, nodes: int, cycle):
        _check_cycle(nodes, cycle)
        self.n = nodes
        self.ends: dict[int, tuple[int, int]] = {}
        self.inc: list[dict] = [{} for _ in range(nodes)]
        self.deg = [0] * nodes
        self.next_edge = 0
        # degree-2 nodes and live edges, swap-remove lists for uniform picks
        self.deg2: list[int] = []
        self.deg2_pos: dict[int, int] = {}
        self.live: list[int] = []
        self.live_pos: dict[int, int] = {}
        for a, b in cycle:
            self._add_edge(a, b)

    def _set_deg(self, x: int, d: int) -> None:
        old = self.deg[x]
        self.deg[x] = d
        if old == 2 and d != 2:
            _swap_remove(self.deg2, self.deg2_pos, x)
        elif d == 2 and old != 2:
            self.deg2_pos[x] = len(self.deg2)
            self.deg2.append(x)

    def _add_node(self) -> int:
        x = self.n
        self.n += 1
        self.inc.append({})
        self.deg.append(0)
        return x

    def _add_edge(self, a: int, b: int) -> int:
        eid = self.next_edge
        self.next_edge += 1
        self.ends[eid] = (a, b)
        self.inc[a][eid] = None
        self.inc[b][eid] = None
        if a == b:
            self._set_deg(a, self.deg[a] + 2)
        else:
            self._set_deg(a, self.deg[a] + 1)
            self._set_deg(b, self.deg[b] + 1)
        self.live_pos[eid] = len(self.live)
        self.live.append(eid)
        return eid

    def subdivide(self, eid: int) -> tuple[int, int, int]:
        if eid not in self.ends:
            raise ScriptError(f"edge {eid} does not exist at this step")
        a, b = self.ends.pop(eid)
        del self.inc[a][eid]
        if a != b:
            del self.inc[b][eid]
        _swap_remove(self.live, self.live_pos, eid)
        # endpoint degrees are unchanged, so update inc directly
        x = self._add_node()
        first = self.next_edge
        second = first + 1
        self.next_edge += 2
        for e, (p, q) in ((first, (a, x)), (second, (x, b))):
            self.ends[e] = (p, q)
            self.inc[p][e] = None
            self.inc[q][e] = None
            self.live_pos[e] = len(self.live)
            self.live.append(e)
        self._set_deg(x, 2)
        return x, first, second

    def ear(self, path) -> tuple[int, list[int]]:
        path = tuple(path)
        if not path:
            raise ScriptError("empty ear path")
        if len(set(path)) != len(path):
            raise ScriptError(f"ear path {list(path)} repeats a node")
        for x in path:
            if not 0 <= x < self.n:
                raise ScriptError(f"node {x} does not exist at this step")
            if self.deg[x] != 2:
                raise ScriptError(f"ear path node {x} has degree {self.deg[x]}, expected 2")
        links = []
        for x, y in zip(path, path[1:]):
            if not any(self.ends[e] in ((x, y), (y, x)) for e in self.inc[x]):
                raise ScriptError(f"ear path nodes {x} and {y} are not adjacent")
            links.append((x, y))
        closing = self._add_edge(path[0], path[-1])
        dups = [self._add_edge(x, y) for x, y in links]
        return closing, dups

    def other_edge(self, x: int, via: int) -> Optional[int]:
        for e in self.inc[x]:
            if e != via:
                return e
        return None

    def graph(self) -> Multigraph:
        eids = sorted(self.ends)
        return Multigraph(self.n, [self.ends[e] for e in eids])

    def apply(self, step: Step) -> None:
        if isinstance(step, SubdivideStep):
            self.subdivide(step.edge)
        elif isinstance(step, EarStep):
            self.ear(step.path)
        else:
            raise ScriptError(f"unknown step {step!r}")


def _swap_remove(items: list, pos: dict, x) -> None:
    i = pos.pop(x)
    last = items.pop()
    if last != x:
        items[i] = last
        pos[last] = i


def _check_cycle(nodes: int, cycle) -> None:
    if nodes < 1 or len(cycle) != nodes:
        raise ScriptError("initial cycle must use every one of its nodes exactly once")
    starts = [a for a, _ in cycle]
    if sorted(starts) != list(range(nodes)):
        raise ScriptError("initial cycle must visit nodes 0..n-1 exactly once")
    for (a, b), (c, _) in zip(cycle, cycle[1:] + cycle[:1]):
        if b != c:
            raise ScriptError("initial cycle is not a closed walk")


def apply_script(script: EarScript) -> tuple[Multigraph, int]:
    """Replay ``script``; returns the dense graph and its cycle number."""
    rep = _Replay(script.nodes, [tuple(p) for p in script.cycle])
    for step in script.steps:
        rep.apply(step)
    return rep.graph(), script.expected_c


def random_script(
    seed: int,
    ears: int,
    subdivisions: int,
    *,
    cycle_length: Optional[int] = None,
    max_extend: int = 3,
) -> EarScript:
    """Random ear script with exactly ``ears`` double ears.

    Steps are shuffled uniformly. An ear picks a uniformly random degree-2
    node and grows a path from it by up to ``max_extend`` nodes (uniform
    count) in each direction. When no degree-2 node exists a subdivision is
    done first, taken from the subdivision budget while any is left.
    """
    if ears < 0 or subdivisions < 0:
        raise ValueError("ears and subdivisions must be non-negative")
    rng = random.Random(seed)
    length = cycle_length if cycle_length is not None else rng.randint(1, 6)
    cycle = cycle_pairs(length)
    rep = _Replay(length, cycle)
    kinds = [True] * ears + [False] * subdivisions
    rng.shuffle(kinds)
    steps: list[Step] = []
    subs_left = subdivisions
    owed = 0

    def random_subdivide():
        eid = rep.live[rng.randrange(len(rep.live))]
        rep.subdivide(eid)
        steps.append(SubdivideStep(eid))

    for is_ear in kinds:
        if not is_ear:
            subs_left -= 1
            if owed:
                owed -= 1
            else:
                random_subdivide()
            continue
        if not rep.deg2:
            if subs_left > owed:
                owed += 1
            random_subdivide()
        path = _random_path(rep, rng, max_extend)
        rep.ear(path)
        steps.append(EarStep(path))
    return EarScript(length, cycle, steps, seed)


def _random_path(rep: _Replay, rng: random.Random, max_extend: int) -> tuple:
    x = rep.deg2[rng.randrange(len(rep.deg2))]
    incident = list(rep.inc[x])
    if len(incident) == 1:
        return (x,)
    forward = _walk(rep, x, incident[0], rng.randint(0, max_extend), {x})
    backward = _walk(rep, x, incident[1], rng.randint(0, max_extend), {x, *forward})
    backward.reverse()
    return tuple(backward + [x] + forward)


def _walk(rep: _Replay, start: int, via: int, steps: int, taken: set) -> list:
    out = []
    cur = start
    for _ in range(steps):
        a, b = rep.ends[via]
        y = b if a == cur else a
        if y in taken or rep.deg[y] != 2:
            break
        out.append(y)
        taken.add(y)
        nxt = rep.other_edge(y, via)
        if nxt is None:
            break
        cur, via = y, nxt
    return out


def instance_for_size(seed: int, edges: int) -> tuple[Multigraph, EarScript]:
    """A random decomposable graph with ``edges`` edges (more only if ``edges`` is tiny).

    A third of the budget goes to ears. The ear contribution is
    overestimated on purpose and the shortfall is made up with extra
    subdivisions of random edges, each adding exactly one edge.
    """
    ears = max(edges // 3, 0)
    subdivisions = max(edges - (3 * ears) // 2, 0)
    script = random_script(seed, ears, subdivisions)
    rep = _Replay(script.nodes, [tuple(p) for p in script.cycle])
    for step in script.steps:
        rep.apply(step)
    rng = random.Random(seed ^ 0x5EED)
    steps = list(script.steps)
    while len(rep.ends) < edges:
        eid = rep.live[rng.randrange(len(rep.live))]
        rep.subdivide(eid)
        steps.append(SubdivideStep(eid))
    script = EarScript(script.nodes, script.cycle, steps, seed)
    return rep.graph(), script


# -- decompositions ----------------------------------------------------------

@dataclass
class CycleDecomposition:
    """Closed walks given as ``(edge_id, from_node, to_node)`` triples."""

    cycles: list

    def __len__(self):
        return len(self.cycles)

    def edge_lists(self) -> list[list[int]]:
        return [[e for e, _, _ in cyc] for cyc in self.cycles]


def orient_cycle(g: Multigraph, eids: list[int]) -> list[tuple[int, int, int]]:
    """Order the edges ``eids`` of a cycle of ``g`` into a closed walk."""
    if not eids:
        raise ValueError("empty cycle")
    incidence: dict[int, list[int]] = {}
    for e in eids:
        a, b = g.endpoints_of(e)
        incidence.setdefault(a, []).append(e)
        if b != a:
            incidence.setdefault(b, []).append(e)
    e0 = eids[0]
    a, b = g.endpoints_of(e0)
    walk = [(e0, a, b)]
    used = {e0}
    cur = b
    while len(walk) < len(eids):
        nxt = next((e for e in incidence.get(cur, ()) if e not in used), None)
        if nxt is None:
            raise ValueError(f"edges {eids} do not form a closed walk")
        p, q = g.endpoints_of(nxt)
        other = q if p == cur else p
        walk.append((nxt, cur, other))
        used.add(nxt)
        cur = other
    return walk


def _cycle_records(step) -> list[list]:
    if isinstance(step, (LoopRemoved, FinalLoop)):
        return [[step.record]]
    if isinstance(step, TripleEdge):
        return [list(step.records)]
    if isinstance(step, DoubleEdgePath):
        return [[*step.path_records, step.closing]]
    if isinstance(step, QuadrupleEdge):
        return [list(pair) for pair in step.pairs]
    return []


def lift_cycles(g: Multigraph, trace: list) -> CycleDecomposition:
    """Expand the cycle-producing steps of ``trace`` into cycles of ``g``."""
    cycles = []
    for step in trace:
        for records in _cycle_records(step):
            eids = [e for r in records for e in expand(r)]
            for e in eids:
                if not g.has_edge(e):
                    raise ValueError(f"trace mentions edge {e} which is not in the graph")
            cycles.append(orient_cycle(g, eids))
    return CycleDecomposition(cycles)


def validate_decomposition(g: Multigraph, d: CycleDecomposition) -> Optional[str]:
    """First violation of ``d`` being a cycle decomposition of ``g``, or None."""
    used: dict[int, int] = {}
    for i, cyc in enumerate(d.cycles):
        if not cyc:
            return f"cycle {i} is empty"
        for e, _, _ in cyc:
            if not g.has_edge(e):
                return f"edge {e} is not in the graph"
            if e in used:
                return f"edge {e} used twice"
            used[e] = i
    for e in g.edge_ids:
        if e not in used:
            return f"edge {e} uncovered"
    for i, cyc in enumerate(d.cycles):
        seen = set()
        for j, (e, a, b) in enumerate(cyc):
            p, q = g.endpoints_of(e)
            if (a, b) != (p, q) and (a, b) != (q, p):
                return f"cycle {i}: edge {e} does not join {a} and {b}"
            nxt = cyc[(j + 1) % len(cyc)]
            if nxt[1] != b:
                if j + 1 == len(cyc):
                    return f"cycle {i} does not close"
                return f"cycle {i}: edges {e} and {nxt[0]} do not meet"
            if a in seen:
                return f"cycle {i} repeats node {a}"
            seen.add(a)
    return None


# -- trace to ear script -------------------------------------------------------

def ear_script_from_trace(g: Multigraph, trace: list) -> EarScript:
    """Read the trace of a successful run backwards as a construction."""
    script, _, _ = reconstruct(g, trace)
    return script


def reconstruct(g: Multigraph, trace: list) -> tuple[EarScript, dict, dict]:
    """Like :func:`ear_script_from_trace`, also returning the label maps.

    The maps send nodes of ``g`` and edge ids of ``g`` to the node and edge
    ids that replaying the script produces before compaction.
    """
    if not trace:
        raise ValueError("empty trace")
    last = trace[-1]
    node_map: dict[int, int] = {}
    rec_map: dict = {}
    steps: list[Step] = []
    if isinstance(last, FinalLoop):
        script = EarScript(1, cycle_pairs(1))
        rep = _Replay(1, script.cycle)
        node_map[last.node] = 0
        rec_map[last.record] = 0
    elif isinstance(last, QuadrupleEdge):
        script = EarScript(2, cycle_pairs(2))
        rep = _Replay(2, script.cycle)
        a, b = last.ends
        node_map[a], node_map[b] = 0, 1
        (c0, c1), (c2, c3) = last.pairs
        rec_map[c0], rec_map[c1] = 0, 1
        closing, dups = rep.ear((0, 1))
        steps.append(EarStep((0, 1)))
        rec_map[c2], rec_map[c3] = closing, dups[0]
    else:
        raise ValueError("trace does not end with a terminal step")

    for step in reversed(trace[:-1]):
        if isinstance(step, Resolved):
            eid = rec_map.pop(step.merged, None)
            if eid is None:
                raise ValueError(f"resolved copy at node {step.node} never reappears")
            first_end = rep.ends[eid][0]
            x, first, second = rep.subdivide(eid)
            steps.append(SubdivideStep(eid))
            node_map[step.node] = x
            if first_end == node_map[step.ends[0]]:
                rec_map[step.left], rec_map[step.right] = first, second
            else:
                rec_map[step.left], rec_map[step.right] = second, first
            continue
        if isinstance(step, LoopRemoved):
            path, cycle_recs = (node_map[step.node],), [step.record]
        elif isinstance(step, TripleEdge):
            path = (node_map[step.ends[0]], node_map[step.ends[1]])
            cycle_recs = list(step.records)
        elif isinstance(step, DoubleEdgePath):
            path = tuple(node_map[x] for x in step.nodes)
            cycle_recs = [step.closing, *step.path_records]
        else:
            raise ValueError(f"unexpected step {type(step).__name__} inside the trace")
        closing, dups = rep.ear(path)
        steps.append(EarStep(path))
        for rec, eid in zip(cycle_recs, [closing, *dups]):
            rec_map[rec] = eid

    script.steps = steps
    script, relabel = _fold_leading_subdivisions(script)
    edge_map = {}
    for rec, eid in rec_map.items():
        leaves = expand(rec)
        if len(leaves) != 1:
            raise ValueError("a merged copy was never split back")
        edge_map[leaves[0]] = relabel.get(eid, eid)
    if len(edge_map) != g.edge_count or len(node_map) != g.node_count:
        raise ValueError("trace does not cover the graph")
    return script, node_map, edge_map


def _fold_leading_subdivisions(script: EarScript) -> tuple[EarScript, dict]:
    """Merge subdivisions of the bare initial cycle into a longer cycle.

    Node ids are unchanged; the returned dict maps edge ids of the old
    replay to edge ids of the new one.
    """
    lead = 0
    while lead < len(script.steps) and isinstance(script.steps[lead], SubdivideStep):
        lead += 1
    if lead == 0:
        return script, {}
    old = _Replay(script.nodes, script.cycle)
    for step in script.steps[:lead]:
        old.apply(step)

    order, walk = [0], []
    prev = None
    cur = 0
    while True:
        e = next(e for e in old.inc[cur] if e != prev)
        a, b = old.ends[e]
        nxt = b if a == cur else a
        walk.append(e)
        if nxt == 0:
            break
        order.append(nxt)
        prev, cur = e, nxt
    cycle = [(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]
    new = _Replay(len(order), cycle)
    emap = {e: i for i, e in enumerate(walk)}
    steps: list[Step] = []
    for step in script.steps[lead:]:
        if isinstance(step, SubdivideStep):
            ne = emap[step.edge]
            first_end = old.ends[step.edge][0]
            _, f, s = old.subdivide(step.edge)
            _, f2, s2 = new.subdivide(ne)
            if new.ends[f2][0] == first_end:
                emap[f], emap[s] = f2, s2
            else:
                emap[f], emap[s] = s2, f2
            steps.append(SubdivideStep(ne))
        else:
            c, dups = old.ear(step.path)
            c2, dups2 = new.ear(step.path)
            emap[c] = c2
            emap.update(zip(dups, dups2))
            steps.append(step)
    return EarScript(len(order), cycle, steps, script.seed), emap
