"""Graph ground truth: skeletons, CPDAGs, Meek rules, d-separation, SHD, random trees."""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .model import Dag, Edge


def _pair(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Skeleton:
    """Undirected simple graph on ``0..d-1``; edges stored as ``(small, large)``."""

    d: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.d and 0 <= b < self.d):
                raise ValueError(f"edge {(a, b)} out of range for d={self.d}")
            norm.add(_pair(a, b))
        object.__setattr__(self, "edges", frozenset(norm))

    @cached_property
    def _adj(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.d)]
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return tuple(frozenset(s) for s in adj)

    def neighbors(self, k: int) -> frozenset[int]:
        return self._adj[k]

    def adjacent(self, a: int, b: int) -> bool:
        return _pair(a, b) in self.edges

    def is_forest(self) -> bool:
        seen = set()
        for start in range(self.d):
            if start in seen:
                continue
            n_nodes, n_edges = 0, 0
            queue = deque([start])
            seen.add(start)
            while queue:
                u = queue.popleft()
                n_nodes += 1
                n_edges += len(self._adj[u])
                for v in self._adj[u]:
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
            if n_edges // 2 != n_nodes - 1:
                return False
        return True

    def is_tree(self) -> bool:
        return len(self.edges) == self.d - 1 and self.is_forest()

    def to_dict(self) -> dict:
        return {"d": self.d, "edges": [list(e) for e in sorted(self.edges)]}


@dataclass(frozen=True)
class DirectedTree:
    """A tree oriented away from ``root``: every other node has exactly one parent."""

    root: int
    dag: Dag

    def __post_init__(self):
        if not Skeleton(self.dag.d, self.dag.skeleton_edges()).is_tree():
            raise ValueError("skeleton is not a spanning tree")
        if self.dag.roots != (self.root,):
            raise ValueError(f"expected node {self.root} to be the only root, got {self.dag.roots}")

    @property
    def d(self) -> int:
        return self.dag.d

    def parent(self, k: int) -> int | None:
        pa = self.dag.parents(k)
        return pa[0] if pa else None

    def skeleton(self) -> Skeleton:
        return Skeleton(self.d, self.dag.skeleton_edges())

    def to_dict(self) -> dict:
        return {"d": self.d, "root": self.root, "edges": [list(e) for e in sorted(self.dag.edges)]}

    @classmethod
    def from_dict(cls, obj) -> "DirectedTree":
        return cls(int(obj["root"]), Dag(int(obj["d"]), frozenset(tuple(e) for e in obj["edges"])))


@dataclass(frozen=True)
class Cpdag:
    """Partially directed graph: a Markov equivalence class representative."""

    d: int
    directed: frozenset[Edge] = field(default_factory=frozenset)
    undirected: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        directed = frozenset((int(a), int(b)) for a, b in self.directed)
        undirected = frozenset(_pair(int(a), int(b)) for a, b in self.undirected)
        if {_pair(a, b) for a, b in directed} & undirected:
            raise ValueError("a pair is both directed and undirected")
        if len({_pair(a, b) for a, b in directed}) != len(directed):
            raise ValueError("a pair is directed both ways")
        Dag(self.d, directed)  # range, self-loop and acyclicity checks
        Skeleton(self.d, undirected)
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "undirected", undirected)

    def skeleton(self) -> Skeleton:
        return Skeleton(self.d, {_pair(a, b) for a, b in self.directed} | self.undirected)

    def status(self, a: int, b: int):
        """``None`` if absent, ``"-"`` if undirected, else the directed pair."""
        if (a, b) in self.directed:
            return (a, b)
        if (b, a) in self.directed:
            return (b, a)
        if _pair(a, b) in self.undirected:
            return "-"
        return None

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "directed": [list(e) for e in sorted(self.directed)],
            "undirected": [list(e) for e in sorted(self.undirected)],
        }

    @classmethod
    def from_dict(cls, obj) -> "Cpdag":
        return cls(int(obj["d"]), frozenset(tuple(e) for e in obj.get("directed", [])),
                   frozenset(tuple(e) for e in obj.get("undirected", [])))


# --- Meek rules -------------------------------------------------------------

class _Pdag:
    def __init__(self, d, directed, undirected):
        self.d = d
        self.directed = set(directed)
        self.undirected = {_pair(a, b) for a, b in undirected}
        self.adj = [set() for _ in range(d)]
        for a, b in list(self.directed) + list(self.undirected):
            self.adj[a].add(b)
            self.adj[b].add(a)

    def is_undirected(self, a, b):
        return _pair(a, b) in self.undirected

    def is_directed(self, a, b):
        return (a, b) in self.directed

    def orient(self, a, b):
        self.undirected.discard(_pair(a, b))
        self.directed.add((a, b))

    # Each rule answers: may the undirected edge x - y be oriented x -> y?
    def r1(self, x, y):
        return any(self.is_directed(w, x) and w != y and w not in self.adj[y] for w in self.adj[x])

    def r2(self, x, y):
        return any(self.is_directed(x, w) and self.is_directed(w, y) for w in self.adj[x])

    def r3(self, x, y):
        cands = [w for w in self.adj[x] if w != y and self.is_undirected(x, w) and self.is_directed(w, y)]
        return any(b not in self.adj[a] for a, b in itertools.combinations(cands, 2))

    def r4(self, x, y):
        for w in self.adj[x]:
            if w == y or not self.is_undirected(x, w) or w in self.adj[y]:
                continue
            for v in self.adj[w]:
                if v != x and v in self.adj[x] and self.is_directed(w, v) and self.is_directed(v, y):
                    return True
        return False


def apply_meek_rules(d: int, directed: Iterable[Edge], undirected: Iterable[Edge]) -> Cpdag:
    """Close a PDAG under R1-R4.

    Rules are tried in the order R1, R2, R3, R4; each sweep visits the
    undirected edges in lexicographic order, and sweeps repeat until nothing
    changes.
    """
    g = _Pdag(d, directed, undirected)
    rules = (g.r1, g.r2, g.r3, g.r4)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for a, b in sorted(g.undirected):
                if not g.is_undirected(a, b):
                    continue
                if rule(a, b):
                    g.orient(a, b)
                    changed = True
                elif rule(b, a):
                    g.orient(b, a)
                    changed = True
    return Cpdag(d, frozenset(g.directed), frozenset(g.undirected))


def v_structures(dag: Dag) -> set[tuple[int, int, int]]:
    """Triples ``(j, l, k)`` with ``j < k``, ``j -> l <- k`` and ``j, k`` non-adjacent."""
    skel = dag.skeleton_edges()
    out = set()
    for l in range(dag.d):
        for j, k in itertools.combinations(dag.parents(l), 2):
            if _pair(j, k) not in skel:
                out.add((j, l, k))
    return out


def cpdag_of(dag: Dag) -> Cpdag:
    """CPDAG of the Markov equivalence class of ``dag``."""
    vs = v_structures(dag)
    compelled = {(j, l) for j, l, _ in vs} | {(k, l) for _, l, k in vs}
    rest = dag.skeleton_edges() - {_pair(a, b) for a, b in compelled}
    return apply_meek_rules(dag.d, compelled, rest)


# --- d-separation -----------------------------------------------------------

def d_separated(g: Dag, j: int, k: int, S: Iterable[int] = ()) -> bool:
    """Decide ``j _||_ k | S`` by reachability in the moralized ancestral graph."""
    S = set(S)
    if j == k or j in S or k in S:
        raise ValueError("need j != k and j, k not in S")
    anc = set()
    stack = [j, k, *S]
    while stack:
        u = stack.pop()
        if u in anc:
            continue
        anc.add(u)
        stack.extend(g.parents(u))
    adj = {u: set() for u in anc}
    for u in anc:
        pa = g.parents(u)
        for p in pa:
            adj[u].add(p)
            adj[p].add(u)
        for p, q in itertools.combinations(pa, 2):
            adj[p].add(q)
            adj[q].add(p)
    seen = {j}
    queue = deque([j])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v == k:
                return False
            if v not in seen and v not in S:
                seen.add(v)
                queue.append(v)
    return True


# --- metrics ----------------------------------------------------------------

def shd(a, b) -> int:
    """Structural Hamming distance between two skeletons or two CPDAGs.

    For CPDAGs each node pair whose status (absent, undirected, or directed
    one way) differs counts once.
    """
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    if isinstance(a, Skeleton) and isinstance(b, Skeleton):
        return len(a.edges ^ b.edges)
    if isinstance(a, Cpdag) and isinstance(b, Cpdag):
        pairs = a.skeleton().edges | b.skeleton().edges
        return sum(a.status(x, y) != b.status(x, y) for x, y in pairs)
    raise TypeError(f"cannot compare {type(a).__name__} with {type(b).__name__}")


def exact_recovery(a, b) -> bool:
    return shd(a, b) == 0


# --- random trees -----------------------------------------------------------

def prufer_decode(seq, d: int) -> Skeleton:
    """Labeled tree on ``0..d-1`` encoded by a Prüfer sequence of length ``d - 2``."""
    seq = [int(s) for s in seq]
    if d < 2 or len(seq) != d - 2:
        raise ValueError(f"a tree on {d} nodes needs a sequence of length {d - 2}")
    degree = [1] * d
    for s in seq:
        degree[s] += 1
    leaves = [v for v in range(d) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for s in seq:
        leaf = heapq.heappop(leaves)
        edges.append(_pair(leaf, s))
        degree[s] -= 1
        if degree[s] == 1:
            heapq.heappush(leaves, s)
    edges.append(_pair(heapq.heappop(leaves), heapq.heappop(leaves)))
    return Skeleton(d, frozenset(edges))


def enumerate_labeled_trees(d: int) -> Iterator[Skeleton]:
    """All ``d**(d-2)`` labeled trees on ``d`` nodes."""
    for seq in itertools.product(range(d), repeat=d - 2):
        yield prufer_decode(seq, d)


def orient_from_root(t: Skeleton, root: int) -> DirectedTree:
    """Orient every edge of the tree ``t`` away from ``root`` (BFS)."""
    if not 0 <= root < t.d:
        raise ValueError(f"root {root} out of range")
    edges = []
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(t.neighbors(u)):
            if v not in seen:
                seen.add(v)
                edges.append((u, v))
                queue.append(v)
    return DirectedTree(root, Dag(t.d, frozenset(edges)))


def random_labeled_tree(d: int, seed=None) -> Skeleton:
    """Uniform random labeled tree via a uniform Prüfer sequence."""
    if d < 2:
        raise ValueError("d must be at least 2")
    rng = np.random.default_rng(seed)
    return prufer_decode(rng.integers(0, d, size=d - 2), d)


def random_directed_tree(d: int, seed=None) -> DirectedTree:
    rng = np.random.default_rng(seed)
    t = random_labeled_tree(d, rng)
    return orient_from_root(t, int(rng.integers(d)))


def random_polytree(d: int, seed=None) -> Dag:
    """Uniform labeled tree with each edge oriented by an independent fair coin."""
    rng = np.random.default_rng(seed)
    t = random_labeled_tree(d, rng)
    flips = rng.random(len(t.edges)) < 0.5
    edges = [(b, a) if f else (a, b) for (a, b), f in zip(sorted(t.edges), flips)]
    return Dag(d, frozenset(edges))


def is_polytree(dag: Dag) -> bool:
    return Skeleton(dag.d, dag.skeleton_edges()).is_tree()
