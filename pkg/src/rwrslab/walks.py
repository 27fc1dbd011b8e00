"""Simple-random-walk engines on Z^d (d >= 3) and the rooted d-ary tree.

Vertices are exact identities: lattice vertices are coordinate tuples, tree
vertices are persistent path nodes (parent pointer + child index), so equality
means equality of the child-index path and memory stays linear in the number
of distinct vertices rather than in path length times trace length.

Neighbor enumeration on the lattice is fixed as (+e1, -e1, ..., +ed, -ed);
every step consumes exactly one uniform from the walk's stream, which keeps
the pure-Python walk and the compiled fast paths bit-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .rng import fold, replica_stream, zigzag

LATTICE = "lattice"
TREE = "tree"

_LATTICE_TAG = 0x1A77
_TREE_TAG = 0x7E3


@dataclass(frozen=True)
class GraphSpec:
    """Which graph the walk lives on: Z^d or the d-ary tree."""

    kind: str
    d: int

    def __post_init__(self) -> None:
        if self.kind not in (LATTICE, TREE):
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.kind == LATTICE and self.d < 3:
            raise ValueError("lattice walks require d >= 3")
        if self.kind == TREE and self.d < 2:
            raise ValueError("tree walks require branching d >= 2")

    def to_json(self) -> dict:
        return {"graph": self.kind, "d": self.d}

    @classmethod
    def from_json(cls, obj: Union[dict, str]) -> "GraphSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(kind=obj["graph"], d=int(obj["d"]))

    @property
    def origin(self) -> "VertexId":
        return TreeVertex.root() if self.kind == TREE else (0,) * self.d


class TreeVertex:
    """A tree vertex identified by its child-index path from the root.

    Stored as a linked node (parent, child_index) with a cached structural
    key so that equal paths hash equally and comparisons are cheap.
    """

    __slots__ = ("parent", "child_index", "level", "key")

    _root: Optional["TreeVertex"] = None

    def __init__(self, parent: Optional["TreeVertex"], child_index: int):
        if parent is None:
            self.parent = None
            self.child_index = -1
            self.level = 0
            self.key = fold(_TREE_TAG)
        else:
            if child_index < 0:
                raise ValueError("child index must be non-negative")
            self.parent = parent
            self.child_index = child_index
            self.level = parent.level + 1
            self.key = fold(parent.key, child_index)

    @classmethod
    def root(cls) -> "TreeVertex":
        if cls._root is None:
            cls._root = cls(None, -1)
        return cls._root

    @classmethod
    def from_path(cls, path: Sequence[int], d: Optional[int] = None) -> "TreeVertex":
        v = cls.root()
        for c in path:
            v = v.child(c, d)
        return v

    def child(self, index: int, d: Optional[int] = None) -> "TreeVertex":
        if d is not None and not 0 <= index < d:
            raise ValueError(f"child index {index} out of range for branching {d}")
        return TreeVertex(self, index)

    def path(self) -> tuple:
        out = []
        v = self
        while v.parent is not None:
            out.append(v.child_index)
            v = v.parent
        return tuple(reversed(out))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, TreeVertex):
            return NotImplemented
        if self.level != other.level or self.key != other.key:
            return False
        a, b = self, other
        while a is not b:
            if a.child_index != b.child_index:
                return False
            a, b = a.parent, b.parent
            if a is None or b is None:
                return a is b
        return True

    def __hash__(self) -> int:
        return self.key

    def __repr__(self) -> str:
        return f"TreeVertex{self.path()!r}"


VertexId = Union[tuple, TreeVertex]


def vertex_key(v: VertexId) -> int:
    """Canonical 64-bit key of a vertex, used for keyed scenery draws."""
    if isinstance(v, TreeVertex):
        return v.key
    return fold(_LATTICE_TAG, len(v), *(zigzag(c) for c in v))


def step_lattice(current: tuple, rng: np.random.Generator) -> tuple:
    """One SRW step on Z^d; each of the 2d L1-neighbors has probability 1/(2d)."""
    d = len(current)
    m = int(rng.random() * (2 * d))
    axis, sign = m >> 1, 1 - 2 * (m & 1)
    return current[:axis] + (current[axis] + sign,) + current[axis + 1 :]


def step_tree(current: TreeVertex, d: int, rng: np.random.Generator) -> TreeVertex:
    """One SRW step on the d-ary tree.

    At the root all d moves are forward (each child with probability 1/d);
    elsewhere the parent and each of the d children have probability 1/(d+1).
    """
    if d < 2:
        raise ValueError("tree walks require branching d >= 2")
    u = rng.random()
    if current.parent is None:
        return current.child(int(u * d), d)
    m = int(u * (d + 1))
    if m == 0:
        return current.parent
    return current.child(m - 1, d)


@dataclass
class WalkTrace:
    """A walk of n steps: n+1 vertices starting at the origin/root.

    ``levels`` is the level sequence |S_k| (tree walks only).
    """

    graph: GraphSpec
    n: int
    vertices: list
    levels: Optional[np.ndarray]

    def __post_init__(self) -> None:
        if len(self.vertices) != self.n + 1:
            raise ValueError("trace must contain n+1 vertices")


def run_walk(graph: GraphSpec, n: int, seed: int, replica: int = 0) -> WalkTrace:
    """Simulate a seeded walk; identical (graph, n, seed, replica) gives an
    identical trace.

    Raises ValueError for n = 0 (degenerate run).
    """
    if n < 1:
        raise ValueError("walk length n must be >= 1")
    rng = replica_stream(seed, replica)
    if graph.kind == TREE:
        v = TreeVertex.root()
        vertices = [v]
        levels = np.empty(n + 1, dtype=np.int64)
        levels[0] = 0
        for k in range(n):
            v = step_tree(v, graph.d, rng)
            vertices.append(v)
            levels[k + 1] = v.level
        return WalkTrace(graph=graph, n=n, vertices=vertices, levels=levels)
    v = graph.origin
    vertices = [v]
    for _ in range(n):
        v = step_lattice(v, rng)
        vertices.append(v)
    return WalkTrace(graph=graph, n=n, vertices=vertices, levels=None)
