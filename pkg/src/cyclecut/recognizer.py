"""Independent membership test: degrees in {2, 4}, treewidth at most 2, connected.

Treewidth is tested with the classical series-parallel rules (drop loops,
merge parallel edges, delete nodes of degree at most one, suppress nodes of
degree two). The rules are confluent and empty the graph exactly when it
has no K4 minor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .multigraph import Multigraph, is_connected

__all__ = [
    "RecognitionReport",
    "degrees_in_2_4",
    "is_double_ear_decomposable",
    "treewidth_at_most_2",
]


@dataclass(frozen=True)
class RecognitionReport:
    degrees_ok: bool
    bad_node: Optional[int]
    bad_degree: Optional[int]
    treewidth_le2: bool
    connected: bool

    @property
    def verdict(self) -> bool:
        return self.degrees_ok and self.treewidth_le2 and self.connected

    def reason(self) -> Optional[str]:
        """First failed condition, treewidth before connectivity before degrees."""
        if not self.treewidth_le2:
            return "treewidth > 2"
        if not self.connected:
            return "disconnected"
        if not self.degrees_ok:
            return f"degree {self.bad_degree} at node {self.bad_node}"
        return None

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "degrees_ok": self.degrees_ok,
            "bad_node": self.bad_node,
            "treewidth_le2": self.treewidth_le2,
            "connected": self.connected,
            "reason": self.reason(),
        }


def degrees_in_2_4(g: Multigraph) -> tuple[bool, Optional[int]]:
    """``(True, None)`` if every degree is 2 or 4, else ``(False, node)``."""
    for v, d in g.degrees().items():
        if d != 2 and d != 4:
            return False, v
    return True, None


def treewidth_at_most_2(g: Multigraph) -> bool:
    adj: dict[int, set] = {v: set() for v in g.nodes}
    for u, v in g.endpoints:
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    work = [v for v in g.nodes if len(adj[v]) <= 2]
    remaining = len(adj)
    removed = set()
    while work:
        v = work.pop()
        if v in removed or len(adj[v]) > 2:
            continue
        nbrs = adj.pop(v)
        removed.add(v)
        remaining -= 1
        for x in nbrs:
            adj[x].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            if b not in adj[a]:
                adj[a].add(b)
                adj[b].add(a)
        for x in nbrs:
            if len(adj[x]) <= 2:
                work.append(x)
    return remaining == 0


def is_double_ear_decomposable(g: Multigraph) -> RecognitionReport:
    ok, bad = degrees_in_2_4(g)
    return RecognitionReport(
        degrees_ok=ok,
        bad_node=bad,
        bad_degree=None if bad is None else g.degree(bad),
        treewidth_le2=treewidth_at_most_2(g),
        connected=is_connected(g),
    )
