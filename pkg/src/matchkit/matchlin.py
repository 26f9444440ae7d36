"""Matched bases and subspaces of F_{q^n} over F_q, primitive subspaces, partitions.

For an ordered basis (a_1..a_n) of A write U_i = a_i^{-1} A n B.  The basis
is matched to a basis (b_1..b_n) of B when U_i lies in the span of the b_j
with j != i.  Dually, the b_i^* must form a free transversal of the
orthogonals U_i^perp inside B^*, which is how partner bases are built.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import (
    CapExceededError,
    InternalTheoremViolation,
    PreconditionError,
    StructuralError,
    Theorem2BoundError,
)
from .gfq import MAX_SWEEP_ORDER, FieldTower, divisors, prime_factors, subfield, subfield_lattice
from .intersectfam import MAX_FAMILY_SIZE, free_transversal
from .subspace import (
    Subspace,
    VectorSpace,
    enumerate_subspaces,
    find_uncovered_vector,
    intersect,
    inverse_translate,
    multiplier_space,
    product_span,
    scale,
    span,
    vectors,
)

DEFAULT_BASIS_BUDGET = 10**6
DEFAULT_SEED = 20240229
DEFAULT_SAMPLES = 256


def _tower_pair(a: Subspace, b: Subspace) -> FieldTower:
    if a.space != b.space:
        raise StructuralError("subspaces live in different towers")
    if not isinstance(a.space, FieldTower):
        raise StructuralError("linear matchings need subspaces of a field extension")
    return a.space


def check_basis(basis: Sequence, parent: Subspace) -> tuple:
    basis = tuple(tuple(int(c) for c in v) for v in basis)
    if len(basis) != parent.dim:
        raise StructuralError(f"basis has {len(basis)} vectors, subspace has dim {parent.dim}")
    if any(v not in parent for v in basis) or span(parent.space, basis) != parent:
        raise StructuralError("vectors do not form a basis of the subspace")
    return basis


def criterion_spaces(basis: Sequence, a: Subspace, b: Subspace) -> list[Subspace]:
    """U_i = a_i^{-1} A n B for each basis vector."""
    return [intersect(inverse_translate(x, a), b) for x in basis]


def _coords_family(us: Sequence[Subspace], b: Subspace) -> list[Subspace]:
    """U_i written in the coordinates of B's RREF basis."""
    cs = VectorSpace(b.space.q, b.dim)
    return [Subspace.from_rows(cs, [[row[p] for p in b.pivots] for row in u.basis]) for u in us]


def partner_from_transversal(us: Sequence[Subspace], b: Subspace):
    """A basis (b_1..b_n) of B with U_i in span(b_j : j != i), or the Rado violator J."""
    gf = b.gf
    local = _coords_family(us, b)
    perps = [u.perp() for u in local]
    tr = free_transversal(perps)
    if not tr.exists:
        return None, tr.violator
    psi = np.array(tr.vectors, dtype=np.int64)
    coords = linalg.inverse(gf, psi)  # column j: coordinates of b_j
    partner = tuple(b.combine(coords[:, j]) for j in range(b.dim))
    return partner, None


def verify_partner(basis, a: Subspace, b: Subspace, partner) -> bool:
    """Direct check of the containment definition of a matched pair of bases."""
    n = b.dim
    if len(partner) != n or span(b.space, partner) != b:
        return False
    for i, u in enumerate(criterion_spaces(basis, a, b)):
        others = span(b.space, [partner[j] for j in range(n) if j != i])
        if not u <= others:
            return False
    return True


@dataclass(frozen=True)
class BasisMatchReport:
    matched: bool
    violating_J: Optional[tuple]  # 1-based positions in the basis
    criterion_dims: dict = field(hash=False)  # J -> dim of the intersection over J
    partner_basis: Optional[tuple] = None
    mode: str = "exhaustive_J"
    n: int = 0

    @property
    def deficiency(self) -> int:
        """Largest violating #J among the inspected J (0 if none)."""
        return max((len(j) for j, d in self.criterion_dims.items() if d > self.n - len(j)), default=0)


def _all_J_dims(us: Sequence[Subspace]) -> dict:
    n = len(us)
    if n > MAX_FAMILY_SIZE:
        raise CapExceededError(f"exhaustive J-sweep limited to n <= {MAX_FAMILY_SIZE}")
    out = {}

    def rec(prefix, acc, start):
        for i in range(start, n):
            cur = prefix + (i + 1,)
            inter = us[i] if acc is None else intersect(acc, us[i])
            out[cur] = inter.dim
            rec(cur, inter, i + 1)

    rec((), None, 0)
    return out


def check_basis_matched(basis: Sequence, a: Subspace, b: Subspace, mode: str = "exhaustive_J") -> BasisMatchReport:
    _tower_pair(a, b)
    if a.dim != b.dim:
        raise StructuralError("A and B must have equal dimension", dim_a=a.dim, dim_b=b.dim)
    if a.dim == 0:
        raise PreconditionError("matched bases need n >= 1")
    basis = check_basis(basis, a)
    n = a.dim
    us = criterion_spaces(basis, a, b)
    if mode == "exhaustive_J":
        dims = _all_J_dims(us)
        violator = next((j for j, d in dims.items() if d > n - len(j)), None)
        partner = None
        if violator is None:
            partner, rado_j = partner_from_transversal(us, b)
            if partner is None:
                raise InternalTheoremViolation("dimension criterion holds but no partner basis", violator=rado_j)
        report = BasisMatchReport(violator is None, violator, dims, partner, mode, n)
    elif mode == "rado":
        partner, violator = partner_from_transversal(us, b)
        dims = {}
        if violator is not None:
            inter = us[violator[0] - 1]
            for j in violator[1:]:
                inter = intersect(inter, us[j - 1])
            dims[violator] = inter.dim
            if inter.dim <= n - len(violator):
                raise InternalTheoremViolation("Rado violator does not violate the dimension criterion")
        report = BasisMatchReport(partner is not None, violator, dims, partner, mode, n)
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    if report.matched and not verify_partner(basis, a, b, report.partner_basis):
        raise InternalTheoremViolation("partner basis fails the containment definition")
    return report


def linear_deficiency_of_basis(basis: Sequence, a: Subspace, b: Subspace) -> int:
    """D_A(B) = max #J with dim of the J-intersection > n - #J (0 if none)."""
    us = criterion_spaces(check_basis(basis, a), a, b)
    n = a.dim
    return max((len(j) for j, d in _all_J_dims(us).items() if d > n - len(j)), default=0)


# -- whole-subspace matching -----------------------------------------------


def ordered_basis_count(q: int, k: int) -> int:
    return math.prod(q**k - q**i for i in range(k))


def projective_points(a: Subspace) -> list[tuple]:
    """Nonzero vectors of A whose first nonzero coordinate is 1, canonical order."""
    return [v for v in a.nonzero_elements() if next(x for x in v if x) == 1]


def independent_sets(a: Subspace):
    """Every basis of A up to order and scalars, as sorted tuples of projective points.

    Whether a basis is matched depends only on the lines it spans, so this
    covers all ordered bases.
    """
    pts = projective_points(a)
    k = a.dim
    gf = a.gf

    def rec(chosen, rows, rr, piv, start):
        if len(chosen) == k:
            yield tuple(chosen)
            return
        for i in range(start, len(pts)):
            v = pts[i]
            if rows and linalg.in_rowspace(gf, rr, piv, v):
                continue
            new_rows = rows + [v]
            nr, npiv = linalg.rref(gf, np.array(new_rows, dtype=np.int64))
            yield from rec(chosen + [v], new_rows, nr, npiv, i + 1)

    yield from rec([], [], None, [], 0)


def linear_map(a: Subspace, images: Sequence):
    """The K-linear map A -> F sending the RREF basis of A to ``images``."""
    t = a.space
    if len(images) != a.dim:
        raise StructuralError("need one image per basis vector of A")
    imgs = np.array(images, dtype=np.int64).reshape(a.dim, a.n)

    def apply(v):
        c = np.array(a.coords(v), dtype=np.int64)[None, :]
        return tuple(int(x) for x in linalg.matmul(t.base, c, imgs)[0])

    return apply


def strong_matching_failure(a: Subspace, b: Subspace, images: Sequence) -> Optional[tuple]:
    """First basis of A not matched to its image, or None if the map is a strong matching.

    Scaling or permuting a basis and its image together does not change
    matchedness, so bases are taken up to order and scalars.
    """
    _tower_pair(a, b)
    f = linear_map(a, images)
    if span(b.space, [f(v) for v in a.basis]) != b:
        raise StructuralError("images do not form a basis of B")
    for basis in independent_sets(a):
        if not verify_partner(basis, a, b, tuple(f(v) for v in basis)):
            return basis
    return None


@dataclass(frozen=True)
class SubspaceMatchResult:
    verdict: str  # "matched" | "unmatched" | "unknown"
    witness: Optional[tuple] = None  # an ordered basis of A that is not matched
    exact: bool = False
    bases_checked: int = 0  # ordered bases covered
    reason: str = ""


def _fails(us_by_point: dict, basis: tuple, n: int) -> bool:
    us = [us_by_point[v] for v in basis]

    def rec(acc, start, size):
        for i in range(start, n):
            inter = us[i] if acc is None else intersect(acc, us[i])
            if inter.dim > n - size - 1:
                return True
            if rec(inter, i + 1, size + 1):
                return True
        return False

    return rec(None, 0, 0)


def subspace_matched(
    a: Subspace,
    b: Subspace,
    budget: int = DEFAULT_BASIS_BUDGET,
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_SAMPLES,
) -> SubspaceMatchResult:
    t = _tower_pair(a, b)
    if a.dim != b.dim:
        raise StructuralError("A and B must have equal dimension")
    k = a.dim
    if k == 0:
        return SubspaceMatchResult("matched", None, True, 1, "zero subspaces are trivially matched")
    count = ordered_basis_count(t.q, k)
    if count <= budget:
        us_by_point = {}
        for v in projective_points(a):
            us_by_point[v] = intersect(inverse_translate(v, a), b)
        for basis in independent_sets(a):
            if _fails(us_by_point, basis, k):
                if check_basis_matched(basis, a, b).matched:
                    raise InternalTheoremViolation("witness basis re-verified as matched")
                return SubspaceMatchResult("unmatched", basis, True, count, "exhaustive basis enumeration")
        return SubspaceMatchResult("matched", None, True, count, "exhaustive basis enumeration")

    rng = np.random.default_rng(seed)
    mat = a.matrix
    tried = 0
    while tried < samples:
        c = rng.integers(0, t.q, size=(k, k))
        if linalg.rank(t.base, c) < k:
            continue
        tried += 1
        basis = tuple(tuple(int(x) for x in row) for row in linalg.matmul(t.base, c, mat))
        if not check_basis_matched(basis, a, b).matched:
            return SubspaceMatchResult("unmatched", basis, True, tried, f"sampled basis (seed {seed})")
    if not translate_obstructions(a, b):
        return SubspaceMatchResult("matched", None, True, tried, "no linear translate obstruction")
    if k > 1 and is_primitive(b):
        return SubspaceMatchResult("matched", None, True, tried, "B is primitive")
    if intersect(a, product_span(a, b)).dim == 0:
        return SubspaceMatchResult("matched", None, True, tried, "A meets <AB> trivially")
    if product_span(a, b) == a:
        basis = a.basis
        if not check_basis_matched(basis, a, b).matched:
            return SubspaceMatchResult("unmatched", basis, True, tried, "<AB> = A")
    return SubspaceMatchResult("unknown", None, False, tried, "budget exceeded; no criterion applies")


# -- sufficient and necessary conditions ---------------------------------------


def _mobius(n: int) -> int:
    ps = prime_factors(n)
    m = n
    for p in ps:
        m //= p
        if m % p == 0:
            return 0
    return (-1) ** len(ps)


def degree_counts(b: Subspace) -> dict:
    """#elements of B (zero included at d=1) generating exactly F_{q^d}, per divisor d."""
    t = b.space
    inter = {d: intersect(b, subfield(t, d)).dim for d in divisors(t.n)}
    return {
        d: sum(_mobius(d // e) * t.q ** inter[e] for e in divisors(d)) for d in divisors(t.n)
    }


@dataclass(frozen=True)
class TranslateObstruction:
    degree: int  # [K(b):K]
    b: tuple  # an element of B generating that subfield
    multipliers: Subspace  # {x : x K(b) subset of A}
    x: tuple  # first nonzero multiplier


def translate_obstructions(a: Subspace, b: Subspace) -> list[TranslateObstruction]:
    """Nontrivial linear translates x K(b) inside A, one record per subfield K(b)."""
    t = _tower_pair(a, b)
    if a.dim != b.dim:
        raise StructuralError("A and B must have equal dimension")
    out = []
    counts = degree_counts(b)
    for d in divisors(t.n):
        present = counts[d] - (1 if d == 1 else 0)
        if present <= 0:
            continue
        sub = subfield(t, d)
        xs = multiplier_space(a, sub)
        if xs.dim == 0:
            continue
        rep = next(v for v in intersect(b, sub).nonzero_elements() if t.degree_over_base(v) == d)
        out.append(TranslateObstruction(d, rep, xs, xs.nonzero_elements()[0]))
    return out


@dataclass(frozen=True)
class ProductSpanReport:
    product_span: Subspace
    equals_a: bool
    subfield: Optional[Subspace] = None
    rep: Optional[tuple] = None


def product_span_neq_check(a: Subspace, b: Subspace) -> ProductSpanReport:
    """<AB> != A, or else B is a subfield and A = aB for the returned a."""
    _tower_pair(a, b)
    if not 0 < a.dim <= b.dim:
        raise PreconditionError("needs 0 < dim A <= dim B")
    prod = product_span(a, b)
    if prod != a:
        return ProductSpanReport(prod, False)
    from .subspace import is_subfield

    rep = a.basis[0]
    if not is_subfield(b) or scale(rep, b) != a:
        raise InternalTheoremViolation("<AB> = A but A is not a translate of the subfield B")
    return ProductSpanReport(prod, True, b, rep)


# -- primitive subspaces ----------------------------------------------------


def is_primitive(b: Subspace) -> bool:
    """Every nonzero element generates F_{q^n}: B meets each maximal subfield trivially."""
    t = b.space
    return all(intersect(b, subfield(t, t.n // l)).dim == 0 for l in prime_factors(t.n))


def is_primitive_sweep(b: Subspace) -> bool:
    t = b.space
    return all(t.degree_over_base(v) == t.n for v in b.nonzero_elements())


def max_trivial_intersector(space, family: Sequence[Subspace], check_maximal: bool = True) -> Subspace:
    """Grow T one uncovered vector at a time until dim T = n - s."""
    if not family:
        raise PreconditionError("family must be nonempty")
    for s in family:
        if s.space != space:
            raise StructuralError("family member in a different ambient space")
        if s.dim >= space.n:
            raise PreconditionError("family members must be proper subspaces")
    if len(family) > space.q:
        raise Theorem2BoundError(
            f"{len(family)} subspaces exceed #K = {space.q}", m=len(family), q=space.q
        )
    s_max = max(s.dim for s in family)
    t = Subspace.zero(space)
    while t.dim < space.n - s_max:
        v = find_uncovered_vector(space, [s + t for s in family])
        t = t + span(space, [v])
    if any(intersect(t, s).dim for s in family) or t.dim != space.n - s_max:
        raise InternalTheoremViolation("greedy T fails T n S = 0 or dim T = n - s")
    if check_maximal and space.q**space.n <= MAX_SWEEP_ORDER and extension_vector(space, family, t) is not None:
        raise InternalTheoremViolation("greedy T is not maximal")
    return t


def extension_vector(space, family: Sequence[Subspace], t: Subspace) -> Optional[tuple]:
    """A vector v not in T with (T + Kv) n S = 0 for all S, if any exists."""
    for v in vectors(space, 1):
        if v in t:
            continue
        bigger = t + span(space, [v])
        if all(intersect(bigger, s).dim == 0 for s in family):
            return v
    return None


@dataclass(frozen=True)
class PsiPhiReport:
    psi: int
    phi: int
    witness: Subspace
    exhaustive: bool
    method: str


def proper_subfields(t: FieldTower) -> list[Subspace]:
    return [d.subspace for d in subfield_lattice(t) if d.d < t.n]


def psi_phi(t: FieldTower, mode: str = "greedy") -> PsiPhiReport:
    if mode not in ("greedy", "exhaustive"):
        raise PreconditionError(f"unknown mode {mode!r}")
    if t.n == 1:
        return PsiPhiReport(0, 1, Subspace.full(t), True, "n=1 convention")
    psi = max(d for d in divisors(t.n) if d < t.n)
    family = proper_subfields(t)
    if len(family) <= t.q:
        witness = max_trivial_intersector(t, family, check_maximal=t.order <= MAX_SWEEP_ORDER)
        method = "greedy"
    elif mode == "greedy":
        raise Theorem2BoundError(
            f"{len(family)} proper subfields exceed #K = {t.q}; use exhaustive mode",
            subfields=len(family),
            q=t.q,
        )
    else:
        witness = None
        for k in range(t.n - 1, 0, -1):
            witness = next((s for s in enumerate_subspaces(t, k) if is_primitive(s)), None)
            if witness is not None:
                break
        method = "enumeration"
        if witness is None:
            witness = Subspace.zero(t)
    phi = witness.dim
    if not is_primitive(witness):
        raise InternalTheoremViolation("witness is not primitive")
    if t.q**phi <= MAX_SWEEP_ORDER and not is_primitive_sweep(witness):
        raise InternalTheoremViolation("witness fails the element sweep")
    if intersect(witness, subfield(t, 1)).dim:
        raise InternalTheoremViolation("primitive subspace meets the base field")
    exhaustive = False
    if mode == "exhaustive":
        if phi + 1 < t.n and any(is_primitive(s) for s in enumerate_subspaces(t, phi + 1)):
            raise InternalTheoremViolation(f"a primitive subspace of dim {phi + 1} exists")
        exhaustive = True
        if psi + phi != t.n:
            raise InternalTheoremViolation("psi + phi != n")
    return PsiPhiReport(psi, phi, witness, exhaustive, method)


# -- partitions of F_{q^n} -------------------------------------------------


@dataclass(frozen=True)
class PartitionPlan:
    subfield_part: Subspace
    primitive_part: Subspace
    primitive_partition: tuple
    translated_parts: dict = field(hash=False)  # (i, code of alpha) -> W_{i,alpha}
    maps: tuple = ()  # per i: tuple of (w, T_i(w)) on the RREF basis of W_i

    def parts(self) -> list[Subspace]:
        return [self.subfield_part, self.primitive_part] + list(self.translated_parts.values())


def _spread(t: FieldTower, w: Subspace, dim_: int) -> list[Subspace]:
    """Desarguesian spread of W into dim_-subspaces (needs dim_ | dim W)."""
    aux = FieldTower(t.p, t.r, w.dim)
    piece = subfield(aux, dim_)
    seen = {}
    for c in range(1, aux.order):
        s = scale(aux.from_code(c), piece)
        seen.setdefault(s.basis, s)
    return [span(t, [w.combine(row) for row in s.basis]) for s in seen.values()]


def _search_partition(t: FieldTower, w: Subspace, dims: list[int], max_nodes: int = 200_000) -> list[Subspace]:
    local = VectorSpace(t.q, w.dim)
    order = sorted(range(len(dims)), key=lambda i: -dims[i])
    cands = {d: list(enumerate_subspaces(local, d)) for d in set(dims)}
    nodes = 0

    def rec(k, chosen):
        nonlocal nodes
        if k == len(order):
            return chosen
        for s in cands[dims[order[k]]]:
            nodes += 1
            if nodes > max_nodes:
                raise CapExceededError("partition search exceeded node budget")
            if all(intersect(s, c).dim == 0 for c in chosen):
                out = rec(k + 1, chosen + [s])
                if out is not None:
                    return out
        return None

    found = rec(0, [])
    if found is None:
        raise PreconditionError(f"no subspace partition of W with dims {dims}")
    parts = [None] * len(dims)
    for k, i in enumerate(order):
        parts[i] = span(t, [w.combine(row) for row in found[k].basis])
    return parts


def build_partition(t: FieldTower, dims: Optional[Sequence[int]] = None) -> PartitionPlan:
    if t.n < 2:
        raise PreconditionError("partition needs n >= 2")
    rep = psi_phi(t, "greedy" if len(proper_subfields(t)) <= t.q else "exhaustive")
    w, psi = rep.witness, rep.psi
    m = subfield(t, psi)
    dims = list(dims) if dims else [w.dim]
    if any(d < 1 or d > psi for d in dims):
        raise PreconditionError(f"partition dims must lie in [1, psi={psi}]", dims=dims)
    if sum(t.q**d - 1 for d in dims) != t.q**w.dim - 1:
        raise PreconditionError("dims cannot partition W: point counts disagree", dims=dims)
    if len(set(dims)) == 1 and w.dim % dims[0] == 0:
        pieces = _spread(t, w, dims[0])
    else:
        pieces = _search_partition(t, w, dims)
    m_basis = m.basis
    translated = {}
    maps = []
    for i, wi in enumerate(pieces):
        images = m_basis[: wi.dim]
        maps.append(tuple(zip(wi.basis, images)))
        for alpha in m.nonzero_elements():
            rows = [t.add(x, t.mul(alpha, y)) for x, y in zip(wi.basis, images)]
            part = span(t, rows)
            if part.dim != wi.dim:
                raise InternalTheoremViolation("W_{i,alpha} lost dimension")
            translated[(i, t.code(alpha))] = part
    plan = PartitionPlan(m, w, tuple(pieces), translated, tuple(maps))
    verify_partition(t, plan)
    return plan


def verify_partition(t: FieldTower, plan: PartitionPlan) -> None:
    parts = plan.parts()
    if sum(t.q**p.dim - 1 for p in parts) != t.order - 1:
        raise InternalTheoremViolation("point count of the partition is wrong")
    pieces = list(plan.primitive_partition)
    if sum(t.q**p.dim - 1 for p in pieces) != t.q**plan.primitive_part.dim - 1 or any(
        not p <= plan.primitive_part for p in pieces
    ):
        raise InternalTheoremViolation("primitive partition does not partition W")
    if t.order <= MAX_SWEEP_ORDER:
        hits = np.zeros(t.order, dtype=np.int64)
        for p in parts:
            for v in p.nonzero_elements():
                hits[t.code(v)] += 1
        if hits[0] != 0 or np.any(hits[1:] != 1):
            raise InternalTheoremViolation("some nonzero element is not covered exactly once")
    else:
        for p1, p2 in itertools.combinations(parts, 2):
            if intersect(p1, p2).dim:
                raise InternalTheoremViolation("two parts share a nonzero element")
