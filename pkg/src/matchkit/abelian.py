"""Finite abelian groups Z/d_1 x ... x Z/d_k, their subsets, sumsets and cosets."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import CapExceededError, PreconditionError, StructuralError
from .gfq import is_prime

MAX_GROUP_ORDER = 1 << 20

Element = tuple  # residues, one per invariant factor


@dataclass(frozen=True)
class GroupSpec:
    invariant_factors: tuple

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        if not factors or any(d < 1 for d in factors):
            raise StructuralError("invariant factors must be a nonempty list of integers >= 1")
        object.__setattr__(self, "invariant_factors", factors)

    @classmethod
    def cyclic(cls, d: int) -> "GroupSpec":
        return cls((d,))

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    def element(self, coords) -> Element:
        if isinstance(coords, int):
            coords = (coords,)
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise StructuralError(f"element {coords} has wrong length for {self}")
        if any(not 0 <= c < d for c, d in zip(coords, self.invariant_factors)):
            raise StructuralError(f"element {coords} is not reduced in {self}")
        return coords

    def reduce(self, coords) -> Element:
        return tuple(int(c) % d for c, d in zip(coords, self.invariant_factors))

    def zero(self) -> Element:
        return (0,) * self.rank

    def add(self, g: Element, h: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(g, h, self.invariant_factors))

    def neg(self, g: Element) -> Element:
        return tuple((-a) % d for a, d in zip(g, self.invariant_factors))

    def elements(self) -> Iterator[Element]:
        self.check_exhaustive()
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def check_exhaustive(self) -> None:
        if self.order > MAX_GROUP_ORDER:
            raise CapExceededError(f"group order {self.order} exceeds {MAX_GROUP_ORDER}")

    def to_dict(self) -> dict:
        return {"factors": list(self.invariant_factors)}


@dataclass(frozen=True)
class GroupSubset:
    group: GroupSpec
    elements: tuple  # sorted, distinct

    @classmethod
    def of(cls, group: GroupSpec, elems: Iterable) -> "GroupSubset":
        items = []
        seen = set()
        for e in elems:
            e = group.element(e)
            if e in seen:
                raise StructuralError(f"duplicate element {e}")
            seen.add(e)
            items.append(e)
        return cls(group, tuple(sorted(items)))

    @classmethod
    def _trusted(cls, group: GroupSpec, elems: Iterable) -> "GroupSubset":
        return cls(group, tuple(sorted(set(elems))))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g) -> bool:
        return tuple(g) in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_cached_set")
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_cached_set", s)
        return s

    def to_json(self) -> list:
        return [list(e) for e in self.elements]


def _same(a: GroupSubset, b: GroupSubset) -> None:
    if a.group != b.group:
        raise StructuralError("subsets belong to different groups")


def add(group: GroupSpec, g: Element, h: Element) -> Element:
    return group.add(group.element(g), group.element(h))


def subgroup_generated(group: GroupSpec, b: Element) -> GroupSubset:
    b = group.element(b)
    out, x = [group.zero()], b
    while x != group.zero():
        out.append(x)
        x = group.add(x, b)
    return GroupSubset._trusted(group, out)


def sumset(a: GroupSubset, b: GroupSubset) -> GroupSubset:
    _same(a, b)
    g = a.group
    return GroupSubset._trusted(g, (g.add(x, y) for x in a for y in b))


def translate(a: GroupSubset, g: Element) -> GroupSubset:
    return GroupSubset._trusted(a.group, (a.group.add(x, g) for x in a))


def is_subgroup(s: GroupSubset) -> bool:
    g = s.group
    if g.zero() not in s:
        return False
    return all(g.add(x, g.neg(y)) in s for x in s for y in s)


def coset_structure(a: GroupSubset, b: GroupSubset) -> Optional[tuple[GroupSubset, Element]]:
    """If A + B = A (with #A <= #B), return (B as a subgroup, a with A = a + B).

    Returns None when A + B != A.  The subgroup property and 0 in B are
    re-verified before returning.
    """
    _same(a, b)
    if not len(a) or not len(b):
        raise PreconditionError("A and B must be nonempty")
    if len(a) > len(b):
        raise PreconditionError("coset structure needs #A <= #B", size_a=len(a), size_b=len(b))
    if sumset(a, b) != a:
        return None
    rep = a.elements[0]
    if not is_subgroup(b) or translate(b, rep) != a or a.group.zero() not in b:
        raise AssertionError("A + B = A but B is not a subgroup with A a coset")
    return b, rep


@dataclass(frozen=True)
class CyclicReport:
    p: int
    r: int
    psi: int
    phi: int

    @property
    def order(self) -> int:
        return self.p**self.r


def cyclic_phi_psi(p: int, r: int) -> CyclicReport:
    """Largest proper subgroup order and generator count of Z/p^r."""
    if not is_prime(p):
        raise PreconditionError(f"p={p} is not prime")
    if r < 1:
        raise PreconditionError("r must be >= 1")
    if p**r > MAX_GROUP_ORDER:
        raise CapExceededError(f"p^r = {p**r} exceeds {MAX_GROUP_ORDER}")
    psi = p ** (r - 1)
    phi = p**r - p ** (r - 1)
    if psi + phi != p**r:
        raise AssertionError("psi + phi != p^r")
    return CyclicReport(p, r, psi, phi)
