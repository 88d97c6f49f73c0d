"""Undirected multigraphs with loops, parallel edges and stable edge ids.

The text format is a plain edge list::

    # optional comments
    n m
    u v
    ...

with exactly ``m`` edge lines. ``u u`` is a loop, repeated lines are parallel
edges, and the zero-based index of an edge line is its edge id.
"""
from __future__ import annotations

import os
from collections.abc import Iterable, Iterator
from typing import Union

__all__ = [
    "GraphFormatError",
    "Multigraph",
    "connected_components",
    "degree",
    "is_connected",
    "parse_graph",
    "read_graph",
    "resolve",
    "serialize",
    "subdivide",
    "write_graph",
]


class GraphFormatError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class Multigraph:
    """Immutable multigraph.

    ``nodes`` is a sorted sequence of node ids (a ``range`` when the ids are
    dense). Edges are stored in id order: ``edge_ids[i]`` has endpoints
    ``endpoints[i]``; a loop has equal endpoints. Parsed graphs have dense
    ids; graphs derived by :func:`subdivide` / :func:`resolve` may not, since
    removed ids are never handed out again.
    """

    __slots__ = (
        "nodes",
        "edge_ids",
        "endpoints",
        "next_node",
        "next_edge",
        "_adjacency",
        "_edge_pos",
    )

    def __init__(
        self,
        nodes: int | Iterable[int],
        edges: Iterable[tuple[int, int]] = (),
        edge_ids: Iterable[int] | None = None,
        *,
        next_node: int | None = None,
        next_edge: int | None = None,
    ):
        if isinstance(nodes, int):
            if nodes < 0:
                raise ValueError("node count must be non-negative")
            nodes = range(nodes)
        elif not isinstance(nodes, range):
            nodes = tuple(sorted(set(nodes)))
            if nodes == tuple(range(len(nodes))):
                nodes = range(len(nodes))
        endpoints = [(u, v) for u, v in edges]
        if edge_ids is None:
            edge_ids = range(len(endpoints))
        elif not isinstance(edge_ids, range):
            edge_ids = tuple(edge_ids)
            if any(a >= b for a, b in zip(edge_ids, edge_ids[1:])):
                raise ValueError("edge ids must be strictly increasing")
            if edge_ids == tuple(range(len(edge_ids))):
                edge_ids = range(len(edge_ids))
        if len(edge_ids) != len(endpoints):
            raise ValueError("edge_ids and edges differ in length")

        if isinstance(nodes, range):
            n = len(nodes)
            for u, v in endpoints:
                if not (0 <= u < n and 0 <= v < n):
                    raise ValueError(f"edge ({u}, {v}) has an endpoint outside the node set")
        else:
            node_set = frozenset(nodes)
            for u, v in endpoints:
                if u not in node_set or v not in node_set:
                    raise ValueError(f"edge ({u}, {v}) has an endpoint outside the node set")

        self.nodes = nodes
        self.edge_ids = edge_ids
        self.endpoints = endpoints
        top_node = nodes[-1] + 1 if len(nodes) else 0
        top_edge = edge_ids[-1] + 1 if len(edge_ids) else 0
        self.next_node = top_node if next_node is None else max(next_node, top_node)
        self.next_edge = top_edge if next_edge is None else max(next_edge, top_edge)
        self._adjacency = None
        self._edge_pos = None

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.endpoints)

    @property
    def is_dense(self) -> bool:
        return isinstance(self.nodes, range) and isinstance(self.edge_ids, range)

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(edge_id, u, v)`` in id order."""
        for eid, (u, v) in zip(self.edge_ids, self.endpoints):
            yield eid, u, v

    def has_node(self, v: int) -> bool:
        if isinstance(self.nodes, range):
            return v in self.nodes
        return self._adjacency_table().get(v) is not None

    def has_edge(self, eid: int) -> bool:
        return self._position(eid) is not None

    def endpoints_of(self, eid: int) -> tuple[int, int]:
        pos = self._position(eid)
        if pos is None:
            raise KeyError(f"unknown edge id {eid}")
        return self.endpoints[pos]

    def _position(self, eid: int) -> int | None:
        if isinstance(self.edge_ids, range):
            return eid if 0 <= eid < len(self.edge_ids) else None
        if self._edge_pos is None:
            self._edge_pos = {e: i for i, e in enumerate(self.edge_ids)}
        return self._edge_pos.get(eid)

    def _adjacency_table(self):
        if self._adjacency is None:
            if isinstance(self.nodes, range):
                adj = [[] for _ in self.nodes]
            else:
                adj = {v: [] for v in self.nodes}
            for eid, (u, v) in zip(self.edge_ids, self.endpoints):
                adj[u].append((v, eid))
                adj[v].append((u, eid))
            self._adjacency = adj
        return self._adjacency

    def neighbors(self, v: int) -> list[tuple[int, int]]:
        """Incidences ``(neighbor, edge_id)`` at ``v``; a loop is listed twice."""
        if not self.has_node(v):
            raise KeyError(f"unknown node {v}")
        return self._adjacency_table()[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def degrees(self) -> dict[int, int]:
        adj = self._adjacency_table()
        return {v: len(adj[v]) for v in self.nodes}

    def loops(self) -> list[int]:
        return [eid for eid, (u, v) in zip(self.edge_ids, self.endpoints) if u == v]

    def compact(self) -> tuple[Multigraph, list[int], list[int]]:
        """Relabel to dense ids.

        Returns the relabeled graph together with ``node_map`` and
        ``edge_map`` sending new ids back to ids of ``self``.
        """
        node_map = list(self.nodes)
        edge_map = list(self.edge_ids)
        if self.is_dense:
            return self, node_map, edge_map
        index = {v: i for i, v in enumerate(node_map)}
        pairs = [(index[u], index[v]) for u, v in self.endpoints]
        return Multigraph(len(node_map), pairs), node_map, edge_map

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (
            tuple(self.nodes) == tuple(other.nodes)
            and tuple(self.edge_ids) == tuple(other.edge_ids)
            and self.endpoints == other.endpoints
        )

    __hash__ = None

    def __repr__(self):
        return f"Multigraph(nodes={self.node_count}, edges={self.edge_count})"


def degree(g: Multigraph, v: int) -> int:
    """Number of edge endpoints at ``v``; a loop counts twice."""
    return g.degree(v)


def parse_graph(text: Union[str, bytes, Iterable[str]]) -> Multigraph:
    """Parse the edge-list format into a dense :class:`Multigraph`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.splitlines() if isinstance(text, str) else text

    header = None
    pairs: list[tuple[int, int]] = []
    n = m = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_int(t))
            raise GraphFormatError(f"non-integer token {bad!r}", lineno) from None
        if header is None:
            if len(values) != 2 or values[0] < 0 or values[1] < 0:
                raise GraphFormatError("header must be two non-negative integers 'n m'", lineno)
            header = lineno
            n, m = values
            continue
        if len(values) != 2:
            raise GraphFormatError("edge line must contain exactly two node indices", lineno)
        u, v = values
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"node index out of range [0, {n})", lineno)
        if len(pairs) == m:
            raise GraphFormatError(f"more than the declared {m} edges", lineno)
        pairs.append((u, v))
    if header is None:
        raise GraphFormatError("missing header line 'n m'")
    if len(pairs) != m:
        raise GraphFormatError(f"expected {m} edges, found {len(pairs)}")
    return Multigraph(n, pairs)


def _is_int(token: str) -> bool:
    try:
        int(token)
    except ValueError:
        return False
    return True


def read_graph(path: Union[str, os.PathLike]) -> Multigraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def serialize(g: Multigraph) -> str:
    """Edge-list text for ``g``; sparse ids are compacted in sorted order."""
    dense, _, _ = g.compact()
    out = [f"{dense.node_count} {dense.edge_count}"]
    out.extend(f"{u} {v}" for u, v in dense.endpoints)
    return "\n".join(out) + "\n"


def write_graph(g: Multigraph, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(g))


def connected_components(g: Multigraph) -> list[tuple[Multigraph, list[int], list[int]]]:
    """Split ``g`` into connected pieces.

    Each piece is a dense graph paired with ``node_map`` and ``edge_map``
    lists that send its local ids back to ids of ``g``. Pieces are ordered
    by their smallest node id; isolated nodes form edgeless pieces.
    """
    adj = g._adjacency_table()
    seen = set()
    pieces = []
    for root in g.nodes:
        if root in seen:
            continue
        seen.add(root)
        stack = [root]
        members = []
        while stack:
            x = stack.pop()
            members.append(x)
            for y, _ in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        members.sort()
        index = {v: i for i, v in enumerate(members)}
        edge_map = sorted({eid for x in members for _, eid in adj[x]})
        pairs = [g.endpoints_of(eid) for eid in edge_map]
        local = Multigraph(len(members), [(index[u], index[v]) for u, v in pairs])
        pieces.append((local, members, edge_map))
    return pieces


def is_connected(g: Multigraph) -> bool:
    if g.node_count == 0:
        return False
    adj = g._adjacency_table()
    root = g.nodes[0]
    seen = {root}
    stack = [root]
    while stack:
        x = stack.pop()
        for y, _ in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == g.node_count


def subdivide(g: Multigraph, e: int) -> Multigraph:
    """Replace edge ``e`` = uw by a path u-x-w through a fresh node x.

    The two new edges get fresh ids, the u-side half first. A loop at u
    becomes two parallel u-x edges.
    """
    pos = g._position(e)
    if pos is None:
        raise KeyError(f"unknown edge id {e}")
    u, w = g.endpoints[pos]
    x = g.next_node
    first, second = g.next_edge, g.next_edge + 1
    edge_ids = list(g.edge_ids)
    endpoints = list(g.endpoints)
    del edge_ids[pos], endpoints[pos]
    edge_ids += [first, second]
    endpoints += [(u, x), (x, w)]
    return Multigraph(
        list(g.nodes) + [x],
        endpoints,
        edge_ids,
        next_node=x + 1,
        next_edge=second + 1,
    )


def resolve(g: Multigraph, v: int) -> Multigraph:
    """Suppress the degree-2 node ``v``, joining its neighbors by a fresh edge.

    Equal neighbors yield a loop. ``v`` must not carry a loop and must not
    be the last node.
    """
    incident = g.neighbors(v)
    if len(incident) != 2:
        raise ValueError(f"node {v} has degree {len(incident)}, expected 2")
    (a, ea), (b, eb) = incident
    if ea == eb:
        raise ValueError(f"node {v} carries a loop")
    if g.node_count < 2:
        raise ValueError("cannot resolve the last remaining node")
    fresh = g.next_edge
    keep = [i for i, eid in enumerate(g.edge_ids) if eid != ea and eid != eb]
    edge_ids = [g.edge_ids[i] for i in keep] + [fresh]
    endpoints = [g.endpoints[i] for i in keep] + [(a, b)]
    nodes = [x for x in g.nodes if x != v]
    return Multigraph(nodes, endpoints, edge_ids, next_node=g.next_node, next_edge=fresh + 1)
