"""Decomposable (chordal) conditional-independence graphs.

A graph is stored as an ordered clique sequence satisfying the running
intersection property, together with the derived separators and edge set.
That ordering is what makes the closed-form estimators possible, so it is
computed eagerly and validated at construction time.  All node indices are
1-based at the API surface.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadIndex, DuplicateOrNestedClique, NotChordal, NotDecomposable

__all__ = [
    "DecomposableGraph",
    "build_graph",
    "from_pattern",
    "zero_fill",
    "read_graph_json",
    "write_graph_json",
]


@dataclass(frozen=True)
class DecomposableGraph:
    """Chordal graph with cliques in a perfect elimination order.

    ``separators[k-1]`` is the intersection of clique ``k`` (0-based, k >= 1)
    with the union of all earlier cliques.  Empty separators are legal and
    mark block-diagonal decoupling.  ``edge_set`` contains unordered 1-based
    pairs ``(i, j)`` with ``i <= j``, self-loops included by convention.
    """

    p: int
    cliques: tuple[tuple[int, ...], ...]
    separators: tuple[tuple[int, ...], ...]
    edge_set: frozenset[tuple[int, int]]

    @property
    def n_cliques(self) -> int:
        return len(self.cliques)

    def clique_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cliques)

    def separator_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.separators)

    def max_clique_size(self) -> int:
        return max(self.clique_sizes())

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_set

    def pattern_mask(self) -> np.ndarray:
        """Boolean p-by-p adjacency with True diagonal."""
        mask = np.zeros((self.p, self.p), dtype=bool)
        for i, j in self.edge_set:
            mask[i - 1, j - 1] = True
            mask[j - 1, i - 1] = True
        return mask

    def off_pattern_values(self, matrix: np.ndarray) -> np.ndarray:
        """Entries of ``matrix`` outside the edge set (flattened)."""
        return np.asarray(matrix)[~self.pattern_mask()]


def _indices(nodes: Iterable[int]) -> np.ndarray:
    """Sorted 0-based index array for a 1-based node collection."""
    return np.asarray(sorted(nodes), dtype=int) - 1


def _normalize_cliques(cliques, p: int) -> list[tuple[int, ...]]:
    if p < 1:
        raise BadIndex(f"node count must be positive, got p = {p}")
    if not cliques:
        raise BadIndex("clique list is empty")
    normed: list[tuple[int, ...]] = []
    for raw in cliques:
        members = sorted(set(int(v) for v in raw))
        if not members:
            raise BadIndex("empty clique supplied")
        if members[0] < 1 or members[-1] > p:
            raise BadIndex(f"clique {members} has nodes outside 1..{p}")
        normed.append(tuple(members))
    covered = set().union(*(set(c) for c in normed))
    missing = sorted(set(range(1, p + 1)) - covered)
    if missing:
        raise BadIndex(f"nodes {missing} are not covered by any clique")
    sets = [frozenset(c) for c in normed]
    for a in range(len(sets)):
        for b in range(len(sets)):
            if a != b and sets[a] <= sets[b]:
                raise DuplicateOrNestedClique(
                    f"clique {normed[a]} is contained in clique {normed[b]}"
                )
    return normed


def _perfect_order(cliques: Sequence[tuple[int, ...]]) -> list[int]:
    """Greedy maximum-cardinality ordering over the clique hypergraph.

    Repeatedly picks the clique sharing the most nodes with those already
    placed; ties broken by smallest member, then lexicographically, for
    determinism.
    """
    sets = [frozenset(c) for c in cliques]
    remaining = set(range(len(sets)))
    visited: set[int] = set()
    order: list[int] = []
    while remaining:
        best = min(
            remaining,
            key=lambda k: (-len(sets[k] & visited), cliques[k][0], cliques[k]),
        )
        order.append(best)
        visited |= sets[best]
        remaining.discard(best)
    return order


def build_graph(cliques, p: int) -> DecomposableGraph:
    """Assemble a decomposable graph from its (unordered) maximal cliques.

    The input order is irrelevant: cliques are reordered into a perfect
    elimination order, and the running intersection property is verified.
    Separators are computed as the intersection of each clique with the
    union of its predecessors.
    """
    normed = _normalize_cliques(cliques, p)
    order = _perfect_order(normed)
    ordered = [normed[k] for k in order]
    sets = [frozenset(c) for c in ordered]

    separators: list[tuple[int, ...]] = []
    history: set[int] = set(sets[0])
    for k in range(1, len(ordered)):
        sep = sets[k] & history
        if sep and not any(sep <= sets[j] for j in range(k)):
            raise NotDecomposable(
                "running intersection property fails: separator "
                f"{tuple(sorted(sep))} of clique {ordered[k]} is not contained "
                "in any single earlier clique"
            )
        separators.append(tuple(sorted(sep)))
        history |= sets[k]

    edges: set[tuple[int, int]] = set()
    for c in ordered:
        for a in c:
            for b in c:
                if a <= b:
                    edges.add((a, b))
    return DecomposableGraph(
        p=p,
        cliques=tuple(ordered),
        separators=tuple(separators),
        edge_set=frozenset(edges),
    )


def _mcs_order(adj: list[set[int]], p: int) -> list[int]:
    """Maximum cardinality search over nodes (0-based), deterministic ties."""
    weight = [0] * p
    numbered: list[int] = []
    unnumbered = set(range(p))
    while unnumbered:
        v = min(unnumbered, key=lambda u: (-weight[u], u))
        numbered.append(v)
        unnumbered.discard(v)
        for u in adj[v]:
            if u in unnumbered:
                weight[u] += 1
    return numbered


def _chordless_cycle_witness(adj, v, x, y):
    """Best-effort chordless cycle through v given non-adjacent x, y in N(v)."""
    banned = (adj[v] | {v}) - {x, y}
    queue = deque([x])
    parent = {x: None}
    while queue:
        u = queue.popleft()
        if u == y:
            path = []
            while u is not None:
                path.append(u)
                u = parent[u]
            return [v] + path[::-1]
        for w in adj[u]:
            if w not in parent and w not in banned:
                parent[w] = u
                queue.append(w)
    return None


def from_pattern(pattern) -> DecomposableGraph:
    """Build the graph whose edge set equals a boolean adjacency pattern.

    The pattern must be square, symmetric, with a True diagonal.  Chordality
    is tested with maximum cardinality search; on failure a chordless cycle
    is reported when one can be recovered.  Maximal cliques are extracted in
    MCS order and handed to :func:`build_graph` for the perfect ordering.
    """
    mask = np.asarray(pattern)
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        raise ValueError(f"pattern must be square, got shape {mask.shape}")
    mask = mask.astype(bool)
    if not np.array_equal(mask, mask.T):
        raise ValueError("pattern is not symmetric")
    if not np.all(np.diagonal(mask)):
        raise ValueError("pattern diagonal must be all True")
    p = mask.shape[0]
    adj = [set(np.nonzero(mask[i])[0]) - {i} for i in range(p)]

    order = _mcs_order(adj, p)
    placed: set[int] = set()
    candidates: list[frozenset[int]] = []
    for v in order:
        earlier = adj[v] & placed
        members = sorted(earlier)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                if members[b] not in adj[members[a]]:
                    cycle = _chordless_cycle_witness(adj, v, members[a], members[b])
                    if cycle:
                        cycle = [int(u) + 1 for u in cycle]
                    witness = (
                        " (chordless cycle: " + "-".join(map(str, cycle)) + ")"
                        if cycle
                        else ""
                    )
                    raise NotChordal(
                        f"pattern is not chordal: nodes {members[a] + 1} and "
                        f"{members[b] + 1} are non-adjacent neighbours of "
                        f"{v + 1}{witness}",
                        cycle=cycle,
                    )
        candidates.append(frozenset(earlier | {v}))
        placed.add(v)

    # Candidates are pairwise distinct (each contains its own MCS vertex),
    # so maximality reduces to dropping strict subsets.
    maximal = [c for c in candidates if not any(c < other for other in candidates)]
    cliques = [tuple(sorted(v + 1 for v in c)) for c in maximal]
    return build_graph(cliques, p)


def zero_fill(block, nodes, p: int) -> np.ndarray:
    """Embed ``block`` at rows/columns ``nodes`` of a p-by-p zero matrix.

    ``nodes`` is a 1-based collection; its sorted order defines the block's
    row/column order.
    """
    block = np.asarray(block, dtype=float)
    idx = _indices(nodes)
    if block.shape != (idx.size, idx.size):
        raise ValueError(
            f"block shape {block.shape} does not match {idx.size} node(s)"
        )
    if idx.size and (idx[0] < 0 or idx[-1] >= p):
        raise BadIndex(f"nodes {sorted(nodes)} outside 1..{p}")
    out = np.zeros((p, p))
    out[np.ix_(idx, idx)] = block
    return out


def read_graph_json(path) -> DecomposableGraph:
    """Load ``{"p": int, "cliques": [[1-based ints], ...]}`` and build."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        p = int(payload["p"])
        cliques = payload["cliques"]
    except (KeyError, TypeError) as err:
        raise ValueError(f"malformed graph file {path}: {err}") from None
    return build_graph(cliques, p)


def write_graph_json(graph: DecomposableGraph, path) -> None:
    """Write the graph with cliques in its perfect elimination order."""
    payload = {"p": graph.p, "cliques": [list(c) for c in graph.cliques]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
