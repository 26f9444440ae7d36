"""F_q-subspaces of F_q^n and of F_{q^n}, kept in canonical RREF.

A ``Subspace`` lives in an ambient *space*: either a plain ``VectorSpace``
(F_q^n with the standard dot product used for orthogonals) or a
``FieldTower``, which additionally supports the multiplicative operations
(product spans, scaling, stabilizers).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import linalg
from .errors import (
    CapExceededError,
    CoveringBoundError,
    InternalTheoremViolation,
    PreconditionError,
    StructuralError,
)
from .gfq import MAX_SWEEP_ORDER, BaseField, FieldTower, prime_power

MAX_SUBSPACE_ENUMERATION = 1_000_000


@dataclass(frozen=True)
class VectorSpace:
    """F_q^n without multiplicative structure."""

    q: int
    n: int
    gf: BaseField = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("vector space dimension must be >= 1")
        object.__setattr__(self, "gf", BaseField(*prime_power(self.q)))

    @property
    def order(self) -> int:
        return self.q**self.n

    def code(self, v) -> int:
        return sum(int(c) * self.q**i for i, c in enumerate(v))

    def from_code(self, c: int) -> tuple:
        out = []
        for _ in range(self.n):
            out.append(c % self.q)
            c //= self.q
        return tuple(out)


def space_code(space, v) -> int:
    return sum(int(c) * space.q**i for i, c in enumerate(v))


def vectors(space, start: int = 0) -> Iterator[tuple]:
    """All vectors in canonical order (little-endian F_q digit value)."""
    if space.q**space.n > MAX_SWEEP_ORDER:
        raise CapExceededError(f"vector sweep of {space.q**space.n} exceeds {MAX_SWEEP_ORDER}")
    for c in range(start, space.q**space.n):
        yield space.from_code(c)


def _code_block(space, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((codes.size, space.n), dtype=np.int64)
    for i in range(space.n):
        out[:, i] = codes % space.q
        codes = codes // space.q
    return out


@dataclass(frozen=True)
class Subspace:
    space: object
    basis: tuple  # RREF rows as tuples

    # -- construction

    @classmethod
    def from_rows(cls, space, rows) -> "Subspace":
        mat = linalg.as_matrix(rows, space.n)
        if mat.shape[1] != space.n:
            raise StructuralError(f"vectors must have length {space.n}")
        if np.any((mat < 0) | (mat >= space.q)):
            raise StructuralError("vector entries out of range for F_q")
        r, _ = linalg.rref(space.gf, mat) if len(mat) else (mat, [])
        return cls(space, tuple(tuple(int(x) for x in row) for row in r))

    @classmethod
    def zero(cls, space) -> "Subspace":
        return cls(space, ())

    @classmethod
    def full(cls, space) -> "Subspace":
        return cls.from_rows(space, np.eye(space.n, dtype=np.int64))

    # -- basic properties

    @property
    def gf(self) -> BaseField:
        return self.space.gf

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def matrix(self) -> np.ndarray:
        return linalg.as_matrix(self.basis, self.n)

    @cached_property
    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(row) if x) for row in self.basis]

    @cached_property
    def perp_matrix(self) -> np.ndarray:
        return linalg.nullspace(self.gf, self.matrix) if self.dim else np.eye(self.n, dtype=np.int64)

    def is_rref(self, rows) -> bool:
        return tuple(tuple(int(x) for x in r) for r in rows) == self.basis

    def __contains__(self, v) -> bool:
        return linalg.in_rowspace(self.gf, self.matrix, self.pivots, v)

    def member(self, v) -> bool:
        return v in self

    def __le__(self, other: "Subspace") -> bool:
        _check_same(self, other)
        return all(row in other for row in self.basis)

    def __len__(self) -> int:
        return self.space.q**self.dim

    def coords(self, v) -> tuple:
        if v not in self:
            raise StructuralError("vector is not in the subspace")
        return tuple(int(c) for c in linalg.coords_in_rref(self.matrix, self.pivots, v))

    def combine(self, coeffs) -> tuple:
        """The vector sum_i coeffs[i] * basis[i]."""
        if self.dim == 0:
            return (0,) * self.n
        v = linalg.matmul(self.gf, np.asarray(coeffs, dtype=np.int64)[None, :], self.matrix)[0]
        return tuple(int(x) for x in v)

    def elements(self) -> list[tuple]:
        """All elements in canonical vector order."""
        if len(self) > MAX_SWEEP_ORDER:
            raise CapExceededError(f"subspace of size {len(self)} too large to enumerate")
        if self.dim == 0:
            return [(0,) * self.n]
        coeffs = _code_block(VectorSpace(self.space.q, self.dim), 0, len(self))
        vecs = linalg.matmul(self.gf, coeffs, self.matrix)
        out = [tuple(int(x) for x in v) for v in vecs]
        out.sort(key=lambda v: space_code(self.space, v))
        return out

    def nonzero_elements(self) -> list[tuple]:
        return [v for v in self.elements() if any(v)]

    # -- lattice operations

    def __add__(self, other: "Subspace") -> "Subspace":
        return sum_(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def perp(self) -> "Subspace":
        """Orthogonal complement for the standard dot product."""
        return Subspace.from_rows(self.space, self.perp_matrix)

    def to_dict(self) -> dict:
        space = self.space
        if isinstance(space, FieldTower):
            rows = [space.element_to_json(r) for r in self.basis]
        else:
            rows = [list(r) for r in self.basis]
        return {"basis": rows}

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, basis={list(self.basis)})"


def _check_same(a: Subspace, b: Subspace) -> None:
    if a.space != b.space:
        raise StructuralError("subspaces live in different ambient spaces")


def span(space, vecs: Iterable[Sequence[int]]) -> Subspace:
    return Subspace.from_rows(space, [list(v) for v in vecs])


def dim(s: Subspace) -> int:
    return s.dim


def member(v, s: Subspace) -> bool:
    return v in s


def sum_(a: Subspace, b: Subspace) -> Subspace:
    _check_same(a, b)
    return Subspace.from_rows(a.space, list(a.basis) + list(b.basis))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """A n B as the orthogonal of A^perp + B^perp."""
    _check_same(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.space)
    stacked = np.concatenate([a.perp_matrix, b.perp_matrix], axis=0)
    if stacked.shape[0] == 0:
        return Subspace.full(a.space)
    out = Subspace.from_rows(a.space, linalg.nullspace(a.gf, stacked))
    s = sum_(a, b)
    if a.dim + b.dim != s.dim + out.dim:
        raise AssertionError("dimension formula violated")
    return out


def intersect_all(spaces: Sequence[Subspace]) -> Subspace:
    out = spaces[0]
    for s in spaces[1:]:
        out = intersect(out, s)
    return out


def sum_all(space, spaces: Sequence[Subspace]) -> Subspace:
    rows = [r for s in spaces for r in s.basis]
    return Subspace.from_rows(space, rows)


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def enumerate_subspaces(space, k: int, cap: int = MAX_SUBSPACE_ENUMERATION) -> Iterator[Subspace]:
    """Every k-dim subspace exactly once, by RREF shape (pivot sets in lex order)."""
    total = gaussian_binomial(space.n, k, space.q)
    if total > cap:
        raise CapExceededError(f"{total} subspaces of dim {k} exceed cap {cap}", count=total)
    n, q = space.n, space.q
    for pivots in itertools.combinations(range(n), k):
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, n) if j not in pivots]
        for values in itertools.product(range(q), repeat=len(free)):
            m = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                m[i][pc] = 1
            for (i, j), v in zip(free, values):
                m[i][j] = v
            yield Subspace(space, tuple(tuple(row) for row in m))


# -- multiplicative structure (FieldTower ambients only) -----------------


def _tower(s: Subspace) -> FieldTower:
    if not isinstance(s.space, FieldTower):
        raise StructuralError("operation needs a subspace of a field extension")
    return s.space


def product_span(a: Subspace, b: Subspace) -> Subspace:
    """<AB>: span of all products of basis elements."""
    _check_same(a, b)
    t = _tower(a)
    prods = [t.mul(x, y) for x in a.basis for y in b.basis]
    return Subspace.from_rows(t, prods)


def scale(c, a: Subspace) -> Subspace:
    t = _tower(a)
    if not any(c):
        raise PreconditionError("cannot scale a subspace by zero")
    return Subspace.from_rows(t, [t.mul(c, x) for x in a.basis])


def inverse_translate(c, a: Subspace) -> Subspace:
    """c^{-1} A."""
    return scale(_tower(a).inv(c), a)


def multiplier_space(target: Subspace, source: Subspace) -> Subspace:
    """{x in F : x * source subset of target}, solved as a linear system."""
    _check_same(target, source)
    t = _tower(target)
    blocks = [linalg.matmul(t.base, target.perp_matrix, t.mul_matrix(w)) for w in source.basis]
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return Subspace.full(t)
    return Subspace.from_rows(t, linalg.nullspace(t.base, np.concatenate(blocks, axis=0)))


def stabilizer(w: Subspace) -> Subspace:
    """{x : xW subset of W}; always a subfield for nonzero W."""
    t = _tower(w)
    if w.dim == 0:
        raise PreconditionError("stabilizer of the zero subspace is degenerate")
    m = multiplier_space(w, w)
    if not is_subfield(m):
        raise InternalTheoremViolation("stabilizer is not a subfield")
    return m


def is_subfield(s: Subspace) -> bool:
    t = _tower(s)
    return s.dim > 0 and t.one() in s and product_span(s, s) == s


@dataclass(frozen=True)
class KneserReport:
    dim_a: int
    dim_b: int
    dim_product: int
    dim_stabilizer: int

    @property
    def bound(self) -> int:
        return self.dim_a + self.dim_b - self.dim_stabilizer

    @property
    def holds(self) -> bool:
        return self.dim_product >= self.bound


def kneser_bound_check(a: Subspace, b: Subspace) -> KneserReport:
    if a.dim == 0 or b.dim == 0:
        raise PreconditionError("Kneser bound needs nonzero subspaces")
    prod = product_span(a, b)
    report = KneserReport(a.dim, b.dim, prod.dim, stabilizer(prod).dim)
    if not report.holds:
        raise InternalTheoremViolation("dim <AB> below dim A + dim B - dim stab", **report.__dict__)
    return report


# -- coverings ------------------------------------------------------------


def find_uncovered_vector(space, family: Sequence[Subspace]) -> tuple:
    """First vector (canonical order) outside every member of ``family``.

    Needs #family <= q; with more members a union of proper subspaces can
    exhaust the space (three lines in F_2^2).
    """
    for s in family:
        if s.space != space:
            raise StructuralError("family member in a different ambient space")
        if s.dim >= space.n:
            raise PreconditionError("family members must be proper subspaces")
    if len(family) > space.q:
        raise CoveringBoundError(
            f"{len(family)} subspaces exceed #K = {space.q}", m=len(family), q=space.q
        )
    if not family:
        return (0,) * space.n
    perps = [s.perp_matrix for s in family]
    total = space.q**space.n
    chunk = 4096
    for start in range(1, total, chunk):
        block = _code_block(space, start, min(start + chunk, total))
        covered = np.zeros(block.shape[0], dtype=bool)
        for p in perps:
            covered |= ~np.any(linalg.matmul(space.gf, block, p.T), axis=1)
        free = np.nonzero(~covered)[0]
        if free.size:
            return tuple(int(x) for x in block[free[0]])
    raise InternalTheoremViolation("family of <= q proper subspaces covers the space")


@dataclass(frozen=True)
class CoveringReport:
    family: tuple
    common: Subspace
    covers: bool
    minimal: bool


def linear_covering(q: int, dim_: int) -> CoveringReport:
    """q + 1 hyperplanes through a common codimension-2 subspace covering F_q^dim."""
    if dim_ < 2:
        raise PreconditionError("a linear covering needs dimension >= 2", dim=dim_)
    space = VectorSpace(q, dim_)
    gf = space.gf
    normals = []
    for c in range(q):
        v = [0] * dim_
        v[0], v[1] = c, int(gf.neg(1))
        normals.append(v)
    normals.append([1] + [0] * (dim_ - 1))
    family = tuple(span(space, [nv]).perp() for nv in normals)
    common = intersect_all(list(family))
    if common.dim != dim_ - 2:
        raise AssertionError("hyperplanes do not share a codimension-2 subspace")
    covers = all(any(v in h for h in family) for v in vectors(space))
    minimal = True
    for drop in range(len(family)):
        rest = [h for i, h in enumerate(family) if i != drop]
        v = find_uncovered_vector(space, rest)
        minimal &= not any(v in h for h in rest)
    return CoveringReport(family, common, covers, minimal)
