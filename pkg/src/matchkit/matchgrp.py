"""Matchings between subsets of a finite abelian group.

A matching from A to B is a bijection f with a + f(a) not in A.  These are
exactly the perfect matchings of the bipartite graph joining a to b when
a + b is not in A, so deficiency and maximum matchings reduce to graph
matching on that graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .abelian import Element, GroupSubset, subgroup_generated, sumset, translate
from .errors import InternalTheoremViolation, PreconditionError, StructuralError

BRUTE_FORCE_CAP = 20


@dataclass(frozen=True)
class MatchGraph:
    left: GroupSubset
    right: GroupSubset
    adjacency: dict = field(hash=False)  # a -> tuple of b with a + b not in A

    def neighbours(self, a: Element) -> tuple:
        return self.adjacency[a]

    def neighbourhood(self, s) -> set:
        out = set()
        for a in s:
            out.update(self.adjacency[a])
        return out

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values())


def build_match_graph(a: GroupSubset, b: GroupSubset) -> MatchGraph:
    if a.group != b.group:
        raise StructuralError("subsets belong to different groups")
    if len(a) != len(b):
        raise StructuralError("matching needs #A = #B", size_a=len(a), size_b=len(b))
    if not len(a):
        raise StructuralError("matching needs nonempty sets")
    g = a.group
    adj = {x: tuple(y for y in b if g.add(x, y) not in a) for x in a}
    return MatchGraph(a, b, adj)


def _augment(adj: dict, left: list, match_r: dict, blocked: frozenset = frozenset()) -> int:
    """Kuhn's augmenting-path matching; fills match_r (right -> left) in place."""
    size = sum(1 for _ in match_r)

    def try_vertex(u, seen):
        for v in adj[u]:
            if v in blocked or v in seen:
                continue
            seen.add(v)
            if v not in match_r or try_vertex(match_r[v], seen):
                match_r[v] = u
                return True
        return False

    for u in left:
        if try_vertex(u, set()):
            size += 1
    return size


def _max_size(adj: dict, left: list, blocked: frozenset = frozenset()) -> int:
    return _augment(adj, left, {}, blocked)


def max_matching(graph: MatchGraph) -> list[tuple[Element, Element]]:
    """A maximum matching; the lexicographically least one among all maxima."""
    adj = graph.adjacency
    left = list(graph.left)
    target = _max_size(adj, left)
    pairs: list = []
    used: set = set()
    for i, a in enumerate(left):
        need = target - len(pairs)
        if need == 0:
            break
        rest = left[i + 1 :]
        for b in adj[a]:
            if b in used:
                continue
            if _max_size(adj, rest, frozenset(used | {b})) >= need - 1:
                pairs.append((a, b))
                used.add(b)
                break
    if len(pairs) != target:
        raise AssertionError("lexicographic refinement lost matching size")
    verify_matching(graph, pairs)
    return pairs


def verify_matching(graph: MatchGraph, pairs) -> None:
    g = graph.left.group
    lefts = [a for a, _ in pairs]
    rights = [b for _, b in pairs]
    if len(set(lefts)) != len(lefts) or len(set(rights)) != len(rights):
        raise InternalTheoremViolation("matching is not injective")
    for a, b in pairs:
        if a not in graph.left or b not in graph.right or g.add(a, b) in graph.left:
            raise InternalTheoremViolation(f"pair {a}, {b} is not an edge")


def hall_violator(graph: MatchGraph, pairs) -> list[Element]:
    """Koenig-style witness: A-vertices reachable by alternating paths from unmatched ones.

    For a maximum matching the returned S has #S - #N(S) = #A - #pairs.
    """
    adj = graph.adjacency
    matched_l = {a: b for a, b in pairs}
    matched_r = {b: a for a, b in pairs}
    frontier = deque(a for a in graph.left if a not in matched_l)
    seen = set(frontier)
    while frontier:
        a = frontier.popleft()
        for b in adj[a]:
            nxt = matched_r.get(b)
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return sorted(seen)


def brute_force_deficiency(graph: MatchGraph) -> tuple[int, list[Element]]:
    """max over S subset of A of #S - #N(S), by enumerating all 2^#A subsets."""
    left = list(graph.left)
    if len(left) > BRUTE_FORCE_CAP:
        raise PreconditionError(f"brute force limited to {BRUTE_FORCE_CAP} elements")
    index = {b: i for i, b in enumerate(graph.right)}
    masks = np.array([sum(1 << index[b] for b in graph.adjacency[a]) for a in left], dtype=np.int64)
    nbhd = np.zeros(1, dtype=np.int64)
    for m in masks:
        nbhd = np.concatenate([nbhd, nbhd | m])
    sizes = np.bitwise_count(np.arange(nbhd.size, dtype=np.int64))
    excess = sizes.astype(np.int64) - np.bitwise_count(nbhd).astype(np.int64)
    best = int(np.argmax(excess))
    return int(excess[best]), [left[i] for i in range(len(left)) if best >> i & 1]


@dataclass(frozen=True)
class DeficiencyReportG:
    M: int
    D: int
    violator: tuple
    method: str  # "brute_force" (both routes agreed) or "hall_duality"
    matching: tuple
    sumset_equals_a: bool
    zero_in_b: bool

    @property
    def warnings(self) -> list[str]:
        return ["0 in B: matchings are only meaningful for 0 not in B"] if self.zero_in_b else []


def deficiency(a: GroupSubset, b: GroupSubset, brute_force_cap: int = BRUTE_FORCE_CAP) -> DeficiencyReportG:
    graph = build_match_graph(a, b)
    pairs = max_matching(graph)
    m = len(pairs)
    d = len(a) - m
    violator = hall_violator(graph, pairs)
    if len(violator) - len(graph.neighbourhood(violator)) != d:
        raise InternalTheoremViolation("Koenig witness does not attain the deficiency")
    method = "hall_duality"
    if len(a) <= min(brute_force_cap, BRUTE_FORCE_CAP):
        d_brute, _ = brute_force_deficiency(graph)
        if d_brute != d:
            raise InternalTheoremViolation(f"duality {d} != brute force {d_brute}")
        method = "brute_force"
    closed = sumset(a, b) == a
    if (m == 0) != closed:
        raise InternalTheoremViolation("M = 0 must coincide with A + B = A")
    return DeficiencyReportG(
        M=m,
        D=d,
        violator=tuple(violator),
        method=method,
        matching=tuple(pairs),
        sumset_equals_a=closed,
        zero_in_b=a.group.zero() in b,
    )


def coset_free_sufficiency(a: GroupSubset, b: GroupSubset) -> list[tuple[Element, GroupSubset]]:
    """Pairs (b, coset of <b> contained in A).  Empty means a matching exists."""
    if a.group != b.group:
        raise StructuralError("subsets belong to different groups")
    if len(a) != len(b):
        raise StructuralError("needs #A = #B")
    out = []
    for y in b:
        h = subgroup_generated(a.group, y)
        seen = set()
        for x in a:
            coset = translate(h, x)
            if coset.elements in seen:
                continue
            seen.add(coset.elements)
            if all(z in a for z in coset):
                out.append((y, coset))
    return out


def is_matched(a: GroupSubset, b: GroupSubset) -> Optional[list]:
    """The lexicographically least matching, or None if there is none."""
    graph = build_match_graph(a, b)
    pairs = max_matching(graph)
    return pairs if len(pairs) == len(a) else None
