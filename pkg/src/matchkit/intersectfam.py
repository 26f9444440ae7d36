"""m-intersection properties, family extension, free transversals and dual bases.

Index sets J are reported 1-based, matching the usual {1, ..., t} labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from . import linalg
from .errors import (
    CapExceededError,
    InternalTheoremViolation,
    PreconditionError,
    StructuralError,
)
from .subspace import Subspace, enumerate_subspaces, intersect, span, sum_all

MAX_FAMILY_SIZE = 20
MAX_SEARCH_NODES = 200_000


@dataclass(frozen=True)
class SetFamily:
    universe_size: int
    members: tuple  # sorted tuples of 1-based elements
    m: int

    @classmethod
    def of(cls, n: int, members, m: int) -> "SetFamily":
        out = []
        for s in members:
            s = tuple(sorted(set(int(x) for x in s)))
            if any(not 1 <= x <= n for x in s):
                raise StructuralError(f"member {s} is not a subset of {{1..{n}}}")
            out.append(s)
        return cls(n, tuple(out), m)

    @property
    def t(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class PropertyResult:
    holds: bool
    violator: Optional[tuple] = None  # 1-based J
    checked: int = 0


def _lex_subsets(t: int) -> Iterator[tuple]:
    """Nonempty subsets of range(t) in lexicographic order of sorted tuples."""

    def rec(prefix, start):
        for i in range(start, t):
            cur = prefix + (i,)
            yield cur
            yield from rec(cur, i + 1)

    return rec((), 0)


def _check_cap(t: int) -> None:
    if t > MAX_FAMILY_SIZE:
        raise CapExceededError(f"exhaustive J-sweep limited to t <= {MAX_FAMILY_SIZE}", t=t)


def _first_violator(t: int, meet, size, bound) -> PropertyResult:
    """DFS in lex order carrying running intersections; meet/size are callbacks."""
    _check_cap(t)
    checked = 0

    def rec(prefix, acc, start):
        nonlocal checked
        for i in range(start, t):
            cur = prefix + (i,)
            inter = meet(acc, i)
            checked += 1
            if size(inter) > bound(len(cur)):
                return cur
            hit = rec(cur, inter, i + 1)
            if hit is not None:
                return hit
        return None

    hit = rec((), None, 0)
    if hit is None:
        return PropertyResult(True, None, checked)
    return PropertyResult(False, tuple(i + 1 for i in hit), checked)


def check_set_intersection_property(fam: SetFamily, variant: str = "strict") -> PropertyResult:
    m = fam.m
    for s in fam.members:
        if variant == "strict" and len(s) != m - 1:
            raise PreconditionError(f"strict property needs members of size m-1={m - 1}", member=s)
        if variant == "weak" and len(s) > m - 1:
            raise PreconditionError(f"weak property needs members of size <= m-1={m - 1}", member=s)
    if variant not in ("strict", "weak"):
        raise PreconditionError(f"unknown variant {variant!r}")
    sets = [frozenset(s) for s in fam.members]
    return _first_violator(
        fam.t,
        lambda acc, i: sets[i] if acc is None else acc & sets[i],
        len,
        lambda k: m - k,
    )


def extend_set_family(fam: SetFamily, max_nodes: int = MAX_SEARCH_NODES) -> SetFamily:
    """Complete a strict family of t < m sets to m sets keeping the property."""
    n, m, t = fam.universe_size, fam.m, fam.t
    if t >= m:
        raise PreconditionError("extension needs t < m", t=t, m=m)
    if m > n:
        raise PreconditionError("extension needs m <= n", m=m, n=n)
    res = check_set_intersection_property(fam, "strict")
    if not res.holds:
        raise PreconditionError("family violates the m-intersection property", violator=res.violator)
    candidates = [frozenset(c) for c in itertools.combinations(range(1, n + 1), m - 1)]
    universe = frozenset(range(1, n + 1))
    # intersections of all index subsets, as (set, #indices)
    meets = [(universe, 0)]
    for s in fam.members:
        s = frozenset(s)
        meets += [(acc & s, k + 1) for acc, k in meets]
    nodes = 0

    def rec(meets, chosen):
        nonlocal nodes
        if len(chosen) == m - t:
            return chosen
        for c in candidates:
            nodes += 1
            if nodes > max_nodes:
                raise CapExceededError("extension search exceeded node budget")
            if all(len(acc & c) <= m - k - 1 for acc, k in meets):
                out = rec(meets + [(acc & c, k + 1) for acc, k in meets], chosen + [c])
                if out is not None:
                    return out
        return None

    found = rec(meets, [])
    if found is None:
        raise InternalTheoremViolation("no extension found although one must exist")
    out = SetFamily.of(n, list(fam.members) + [sorted(c) for c in found], m)
    if not check_set_intersection_property(out, "strict").holds:
        raise InternalTheoremViolation("extended family fails re-verification")
    return out


# -- subspace families ------------------------------------------------------


def _common_space(fam: Sequence[Subspace]):
    if not fam:
        raise PreconditionError("family must be nonempty")
    space = fam[0].space
    if any(u.space != space for u in fam):
        raise StructuralError("family members live in different spaces")
    return space


def check_dimension_intersection_property(fam: Sequence[Subspace], m: int) -> PropertyResult:
    _common_space(fam)
    for u in fam:
        if u.dim != m - 1:
            raise PreconditionError(f"members must have dimension m-1={m - 1}", dim=u.dim)
    return _first_violator(
        len(fam),
        lambda acc, i: fam[i] if acc is None else intersect(acc, fam[i]),
        lambda s: s.dim,
        lambda k: m - k,
    )


def _hyperplanes(space) -> Iterator[Subspace]:
    """Hyperplanes in canonical order of their normalized defining covector."""
    for c in range(1, space.q**space.n):
        v = space.from_code(c)
        if next(x for x in v if x) != 1:
            continue
        yield span(space, [v]).perp()


def extend_dimension_family(fam: Sequence[Subspace], m: int, max_nodes: int = MAX_SEARCH_NODES) -> list[Subspace]:
    space = _common_space(fam)
    t = len(fam)
    if t >= m:
        res = check_dimension_intersection_property(fam, m)
        if t == m and res.holds:
            return list(fam)
        raise PreconditionError("extension needs t < m", t=t, m=m)
    if m > space.n:
        raise PreconditionError("extension needs m <= dim W", m=m, n=space.n)
    res = check_dimension_intersection_property(fam, m)
    if not res.holds:
        raise PreconditionError("family violates the dimension m-intersection property", violator=res.violator)
    if m == space.n:
        candidates = list(_hyperplanes(space))
    else:
        candidates = list(enumerate_subspaces(space, m - 1))
    full = Subspace.full(space)
    meets = [(full, 0)]
    for u in fam:
        meets += [(intersect(acc, u), k + 1) for acc, k in meets]
    nodes = 0

    def rec(meets, chosen):
        nonlocal nodes
        if len(chosen) == m - t:
            return chosen
        for c in candidates:
            nodes += 1
            if nodes > max_nodes:
                raise CapExceededError("extension search exceeded node budget")
            new = [(intersect(acc, c), k + 1) for acc, k in meets]
            if all(s.dim <= m - k for s, k in new):
                out = rec(meets + new, chosen + [c])
                if out is not None:
                    return out
        return None

    found = rec(meets, [])
    if found is None:
        raise InternalTheoremViolation("no extension found although one must exist")
    out = list(fam) + found
    if not check_dimension_intersection_property(out, m).holds:
        raise InternalTheoremViolation("extended family fails re-verification")
    return out


# -- free transversals ------------------------------------------------------


def _express(gf, rows: list, v) -> Optional[np.ndarray]:
    """Coefficients c with sum c_i rows[i] = v, or None if v is not in their span."""
    k = len(rows)
    n = len(v)
    if k == 0:
        return None if any(v) else np.zeros(0, dtype=np.int64)
    aug = np.concatenate(
        [np.array(rows, dtype=np.int64).T.reshape(n, k), np.array(v, dtype=np.int64).reshape(n, 1)], axis=1
    )
    r, pivots = linalg.rref(gf, aug)
    if k in pivots:
        return None
    coeffs = np.zeros(k, dtype=np.int64)
    for i, pc in enumerate(pivots):
        coeffs[pc] = r[i, k]
    return coeffs


@dataclass(frozen=True)
class TransversalResult:
    vectors: Optional[tuple] = None  # x_i in U_i, linearly independent
    violator: Optional[tuple] = None  # 1-based J with dim sum_J U_i < #J

    @property
    def exists(self) -> bool:
        return self.vectors is not None


def free_transversal(fam: Sequence[Subspace]) -> TransversalResult:
    """Rado: an independent system of representatives, or a deficient index set.

    Indices are added one at a time; each addition searches the exchange
    graph (shortest augmenting path, as in matroid intersection between the
    linear matroid and the partition matroid of the members' bases).
    """
    space = _common_space(fam)
    gf = space.gf
    cands = [list(u.basis) for u in fam]
    chosen: dict[int, tuple] = {}  # index -> vector currently assigned

    for i0 in range(len(fam)):
        order = sorted(chosen)
        rows = [chosen[j] for j in order]
        parent: dict = {}
        visited_idx = {i0}
        queue = [(i0, tuple(u)) for u in cands[i0]]
        for node in queue:
            parent[node] = None
        sink = None
        head = 0
        while head < len(queue):
            node = queue[head]
            head += 1
            coeffs = _express(gf, rows, node[1])
            if coeffs is None:
                sink = node
                break
            for pos, c in enumerate(coeffs):
                j = order[pos]
                if c == 0 or j in visited_idx:
                    continue
                visited_idx.add(j)
                for u in cands[j]:
                    nxt = (j, tuple(u))
                    if nxt not in parent and tuple(u) != chosen[j]:
                        parent[nxt] = node
                        queue.append(nxt)
        if sink is None:
            violator = tuple(sorted(j + 1 for j in visited_idx))
            idx = [j - 1 for j in violator]
            if sum_all(space, [fam[j] for j in idx]).dim >= len(idx):
                raise InternalTheoremViolation("Rado violator fails re-verification")
            return TransversalResult(None, violator)
        node = sink
        while node is not None:
            chosen[node[0]] = node[1]
            node = parent[node]

    vecs = tuple(chosen[i] for i in range(len(fam)))
    if linalg.rank(gf, np.array(vecs, dtype=np.int64).reshape(len(vecs), space.n)) != len(vecs):
        raise InternalTheoremViolation("transversal is not independent")
    if any(v not in u for v, u in zip(vecs, fam)):
        raise InternalTheoremViolation("transversal vector outside its member")
    return TransversalResult(vecs, None)


def rado_condition(fam: Sequence[Subspace]) -> PropertyResult:
    """Direct check of dim sum_J U_i >= #J over all nonempty J."""
    space = _common_space(fam)
    return _first_violator(
        len(fam),
        lambda acc, i: fam[i] if acc is None else acc + fam[i],
        lambda s: -s.dim,
        lambda k: -k,
    )


# -- dual bases -----------------------------------------------------------


@dataclass(frozen=True)
class DualBasisCert:
    family: tuple  # U_1..U_n after extension
    basis: tuple  # x_1..x_n of W
    functionals: tuple  # psi_i = x_i^* as covectors
    kernels: tuple  # ker x_i^*

    def pairing(self, gf) -> np.ndarray:
        psi = np.array(self.functionals, dtype=np.int64)
        x = np.array(self.basis, dtype=np.int64)
        return linalg.matmul(gf, psi, x.T)


def dual_basis_pipeline(fam: Sequence[Subspace]) -> DualBasisCert:
    """Hyperplane family with the n-intersection property -> basis with ker x_i^* + ker x_j^* = W."""
    space = _common_space(fam)
    n, gf = space.n, space.gf
    if len(fam) >= n:
        raise PreconditionError("pipeline needs t < n", t=len(fam), n=n)
    res = check_dimension_intersection_property(fam, n)
    if not res.holds:
        raise PreconditionError("family violates the dimension n-intersection property", violator=res.violator)
    full_fam = extend_dimension_family(fam, n)
    perps = [u.perp() for u in full_fam]
    tr = free_transversal(perps)
    if not tr.exists:
        raise InternalTheoremViolation("orthogonal family has no free transversal", violator=tr.violator)
    psi = np.array(tr.vectors, dtype=np.int64)
    x = linalg.inverse(gf, psi).T  # rows x_j with psi_i . x_j = delta_ij
    basis = tuple(tuple(int(c) for c in row) for row in x)
    kernels = tuple(span(space, [f]).perp() for f in tr.vectors)
    cert = DualBasisCert(tuple(full_fam), basis, tuple(tr.vectors), kernels)
    verify_dual_basis(cert, space)
    return cert


def verify_dual_basis(cert: DualBasisCert, space) -> None:
    n = space.n
    if not np.array_equal(cert.pairing(space.gf), np.eye(n, dtype=np.int64)):
        raise InternalTheoremViolation("x_i^*(x_j) != delta_ij")
    full = Subspace.full(space)
    for u, k in zip(cert.family, cert.kernels):
        if k.dim != n - 1 or not u <= k:
            raise InternalTheoremViolation("U_i not contained in ker x_i^*")
    for i, j in itertools.combinations(range(n), 2):
        if cert.family[i] != cert.family[j] and cert.kernels[i] + cert.kernels[j] != full:
            raise InternalTheoremViolation(f"ker x_{i + 1}^* + ker x_{j + 1}^* != W")
