"""Digraphs: construction, validation and BFS metrics."""
from __future__ import annotations

import json
import random
from importlib import resources
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Digraph:
    nodes: tuple[int, ...]
    arcs: tuple[tuple[int, int], ...]
    general: int

    def __post_init__(self):
        if self.general not in self.nodes:
            raise TopologyError(f"general {self.general} is not a node")
        if len(set(self.nodes)) != len(self.nodes):
            raise TopologyError("duplicate nodes")
        nodes = set(self.nodes)
        for p, c in self.arcs:
            if p not in nodes or c not in nodes:
                raise TopologyError(f"arc ({p}, {c}) leaves the node set")
        kids: dict[int, list[int]] = {v: [] for v in self.nodes}
        for p, c in self.arcs:
            kids[p].append(c)
        object.__setattr__(self, "_children", {v: tuple(sorted(set(k))) for v, k in kids.items()})

    @classmethod
    def build(cls, arcs: Iterable[tuple[int, int]], general: int = 1,
              nodes: Iterable[int] | None = None) -> "Digraph":
        """Normalising constructor: sorts, drops repeated arcs, refuses loops."""
        arcs = sorted(set((int(p), int(c)) for p, c in arcs))
        for p, c in arcs:
            if p == c:
                raise TopologyError(f"self-loop on {p}")
        node_set = set(nodes) if nodes is not None else {v for a in arcs for v in a} | {general}
        return cls(tuple(sorted(node_set)), tuple(arcs), general)

    def children(self, node: int) -> tuple[int, ...]:
        return self._children[node]

    def parents(self, node: int) -> tuple[int, ...]:
        return tuple(sorted(p for p, c in self.arcs if c == node))

    def outdegree(self, node: int) -> int:
        return len(self._children[node])

    def __len__(self) -> int:
        return len(self.nodes)

    def distances_from(self, source: int) -> dict[int, int]:
        """BFS distances along arcs; unreachable nodes are absent."""
        dist = {source: 0}
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for w in self._children[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    def with_general(self, general: int) -> "Digraph":
        return Digraph(self.nodes, self.arcs, general)

    def to_json(self) -> dict:
        return {"nodes": list(self.nodes), "arcs": [list(a) for a in self.arcs], "general": self.general}

    @classmethod
    def from_json(cls, data: dict) -> "Digraph":
        try:
            nodes = [int(v) for v in data["nodes"]]
            arcs = [(int(p), int(c)) for p, c in data["arcs"]]
            general = int(data["general"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"malformed digraph: {exc}") from exc
        return cls(tuple(nodes), tuple(arcs), general)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Digraph":
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ValidationReport:
    irreflexive: bool
    simple: bool
    strongly_connected: bool

    @property
    def ok(self) -> bool:
        return self.irreflexive and self.simple and self.strongly_connected


def validate(d: Digraph) -> ValidationReport:
    irreflexive = all(p != c for p, c in d.arcs)
    simple = len(set(d.arcs)) == len(d.arcs)
    return ValidationReport(irreflexive, simple, is_strongly_connected(d))


def is_strongly_connected(d: Digraph) -> bool:
    """Forward and backward reachability from one node cover everything."""
    if not d.nodes:
        return True
    root = d.nodes[0]
    if len(d.distances_from(root)) != len(d.nodes):
        return False
    reverse = Digraph(d.nodes, tuple((c, p) for p, c in d.arcs), d.general)
    return len(reverse.distances_from(root)) == len(d.nodes)


@dataclass(frozen=True)
class TopologyMetrics:
    size: int
    eccentricity: int
    diameter: int
    strongly_connected: bool


def metrics(d: Digraph) -> TopologyMetrics:
    """Size, the general's eccentricity and the diameter, by BFS."""
    ecc = {}
    for v in d.nodes:
        dist = d.distances_from(v)
        if len(dist) != len(d.nodes):
            raise TopologyError(f"node {v} does not reach every node; digraph is not strongly connected")
        ecc[v] = max(dist.values())
    return TopologyMetrics(len(d.nodes), ecc[d.general], max(ecc.values()), True)


def depths(d: Digraph) -> dict[int, int]:
    """Distance of every node from the general."""
    return d.distances_from(d.general)


# -- generators -------------------------------------------------------------

def ring(n: int) -> Digraph:
    """Directed cycle 1 -> 2 -> ... -> n -> 1 with the general at 1."""
    if n < 2:
        raise TopologyError("a ring needs at least two nodes")
    return Digraph.build([(i, i % n + 1) for i in range(1, n + 1)], general=1)


def _hang_rings(arcs: list, anchor: int, next_id: int, sizes) -> int:
    """Attach directed rings ``anchor -> new... -> anchor``; ``sizes`` counts
    the new nodes of each ring.  Returns the next free node id."""
    for s in sizes:
        path = [anchor] + list(range(next_id, next_id + s))
        next_id += s
        arcs.extend(zip(path, path[1:] + path[:1]))
    return next_id


def ring_of_rings(main_len: int, sub_size: int) -> Digraph:
    """The two main-ring-of-small-rings families, indexed by ``main_len``.

    ``sub_size == 2`` (N = 2*main_len): a directed cycle through all nodes
    in which every consecutive pair (2m-1, 2m) is closed into a 2-ring by
    the arc 2m -> 2m-1.

    ``sub_size == 3`` (N = 5*main_len): a directed main cycle 1..main_len+2
    whose last node anchors 2*main_len - 1 directed 3-rings.

    The general is node 1 in both cases.
    """
    if main_len < 1:
        raise TopologyError("main_len must be at least 1")
    if sub_size == 2:
        n = 2 * main_len
        arcs = [(i, i % n + 1) for i in range(1, n + 1)]
        arcs += [(2 * m, 2 * m - 1) for m in range(1, main_len + 1)]
        return Digraph.build(arcs, general=1)
    if sub_size == 3:
        length = main_len + 2
        arcs = [(i, i % length + 1) for i in range(1, length + 1)]
        _hang_rings(arcs, length, length + 1, [2] * (2 * main_len - 1))
        return Digraph.build(arcs, general=1)
    raise TopologyError("sub_size must be 2 or 3")


def increasing_rings(k: int) -> Digraph:
    """Main cycle 1..k whose last node anchors k rings adding 1, 2, ..., k
    new nodes, so N = k(k+3)/2 and e_g = D = 2k-1.  General at node 1."""
    if k < 1:
        raise TopologyError("k must be at least 1")
    arcs = [(i, i % k + 1) for i in range(1, k + 1)] if k > 1 else []
    _hang_rings(arcs, k, k + 1, range(1, k + 1))
    return Digraph.build(arcs, general=1)


FAMILIES = ("ring", "rings2", "rings3", "increasing")


def family(name: str, n: int) -> Digraph:
    """Experiment-family member with ``n`` nodes."""
    if name == "ring":
        return ring(n)
    if name == "rings2":
        if n < 2 or n % 2:
            raise TopologyError("rings2 needs an even N >= 2")
        return ring_of_rings(n // 2, 2)
    if name == "rings3":
        if n < 5 or n % 5:
            raise TopologyError("rings3 needs N a positive multiple of 5")
        return ring_of_rings(n // 5, 3)
    if name == "increasing":
        k = 1
        while k * (k + 3) // 2 < n:
            k += 1
        if k * (k + 3) // 2 != n:
            raise TopologyError("increasing needs N = k(k+3)/2 for some k >= 1")
        return increasing_rings(k)
    raise TopologyError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")


def random_strongly_connected(n: int, extra_arc_fraction: float = 0.05, seed: int | None = None) -> Digraph:
    """Random Hamiltonian cycle over a shuffled node order plus extra arcs.

    ``extra_arc_fraction`` is the share of the remaining non-loop arcs that
    are added on top of the cycle.  The general is node 1.
    """
    if n < 1:
        raise TopologyError("need at least one node")
    if not 0.0 <= extra_arc_fraction <= 1.0:
        raise TopologyError("extra_arc_fraction must lie in [0, 1]")
    rnd = random.Random(seed)
    if n == 1:
        return Digraph((1,), (), 1)
    order = list(range(1, n + 1))
    rnd.shuffle(order)
    cycle = {(order[i], order[(i + 1) % n]) for i in range(n)}
    others = [(p, c) for p in range(1, n + 1) for c in range(1, n + 1) if p != c and (p, c) not in cycle]
    extra = rnd.sample(others, round(extra_arc_fraction * len(others)))
    return Digraph.build(cycle | set(extra), general=1, nodes=range(1, n + 1))


GOLDEN_VERSION = "v1"


def golden_names() -> list[str]:
    root = resources.files("simplex_fssp") / "data" / "topologies" / GOLDEN_VERSION
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def golden(name: str) -> Digraph:
    """Frozen digraph shipped with the package, e.g. ``golden("rings2-10")``
    or ``golden("example-10")``."""
    path = resources.files("simplex_fssp") / "data" / "topologies" / GOLDEN_VERSION / f"{name}.json"
    if not path.is_file():
        raise TopologyError(f"no golden topology {name!r}")
    return Digraph.from_json(json.loads(path.read_text()))
