"""Finite fields F_q (q = p^r) and towers F_q < F_{q^n}.

Elements of F_q are integer codes in [0, q): the base-p digits of the
code, little-endian, are the F_p coefficients of the element in the power
basis of a root of ``BaseField.modulus``.  Elements of F_{q^n} are tuples
of n such codes (power basis of a root of ``FieldTower.top_modulus``).

Moduli are chosen deterministically: the monic irreducible polynomial
whose coefficient tuple (c_0, c_1, ..., c_{d-1}) is lexicographically least.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError, StructuralError

MAX_BASE_ORDER = 1024
MAX_TOWER_ORDER = 1 << 24
MAX_SWEEP_ORDER = 1 << 12
_LOG_TABLE_ORDER = 1 << 16

Poly = list  # coefficient codes, lowest degree first


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def prime_power(q: int) -> tuple[int, int]:
    """Split q = p^r, raising if q is not a prime power."""
    ps = prime_factors(q) if q > 1 else []
    if len(ps) != 1:
        raise PreconditionError(f"{q} is not a prime power", q=q)
    p, r, m = ps[0], 0, q
    while m > 1:
        m //= p
        r += 1
    return p, r


class BaseField:
    """The field F_q with q = p^r, elements coded as ints."""

    def __init__(self, p: int, r: int = 1):
        if not is_prime(p):
            raise PreconditionError(f"p={p} is not prime", p=p)
        if r < 1:
            raise PreconditionError("r must be >= 1", r=r)
        q = p**r
        if q > MAX_BASE_ORDER:
            raise CapExceededError(f"base field order {q} exceeds {MAX_BASE_ORDER}", q=q)
        self.p, self.r, self.q = p, r, q
        if r == 1:
            self.modulus = [0, 1]
            self._mul = None
        else:
            prime = BaseField(p, 1)
            self.modulus = least_irreducible(prime, r)
            self._mul = _prime_ext_mul_table(prime, self.modulus)
        digits = np.array([self.digits(c) for c in range(q)], dtype=np.int64).reshape(q, r)
        if r == 1:
            self._add = None
        else:
            s = (digits[:, None, :] + digits[None, :, :]) % p
            self._add = (s * (p ** np.arange(r))).sum(axis=2)
            self._neg = (((-digits) % p) * (p ** np.arange(r))).sum(axis=1)
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            for b in range(1, q):
                if self.mul(a, b) == 1:
                    inv[a] = b
                    break
        self._inv = inv

    def __repr__(self) -> str:
        return f"BaseField(p={self.p}, r={self.r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, BaseField) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self) -> int:
        return hash((self.p, self.r))

    def digits(self, c: int) -> list[int]:
        out = []
        for _ in range(self.r):
            out.append(c % self.p)
            c //= self.p
        return out

    def from_digits(self, ds: Sequence[int]) -> int:
        if len(ds) != self.r or any(not 0 <= d < self.p for d in ds):
            raise StructuralError(f"bad F_p digit vector {list(ds)} for q={self.q}")
        return sum(int(d) * self.p**i for i, d in enumerate(ds))

    # scalar / array arithmetic; arguments may be ints or int arrays

    def add(self, a, b):
        if self._add is None:
            return (a + b) % self.p
        return self._add[a, b]

    def neg(self, a):
        if self._add is None:
            return (-a) % self.p
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self._mul is None:
            return (a * b) % self.p
        return self._mul[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)


def _prime_ext_mul_table(prime: BaseField, modulus: Poly) -> np.ndarray:
    r = len(modulus) - 1
    q = prime.p**r
    table = np.zeros((q, q), dtype=np.int64)
    polys = [[(c // prime.p**i) % prime.p for i in range(r)] for c in range(q)]
    for a in range(q):
        for b in range(a, q):
            prod = poly_mod(prime, poly_mul(prime, polys[a], polys[b]), modulus)
            prod = prod + [0] * (r - len(prod))
            code = sum(d * prime.p**i for i, d in enumerate(prod))
            table[a, b] = table[b, a] = code
    return table


# -- polynomials over a BaseField ------------------------------------------


def poly_trim(f: Poly) -> Poly:
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f


def poly_add(gf: BaseField, f: Poly, g: Poly) -> Poly:
    n = max(len(f), len(g))
    f = list(f) + [0] * (n - len(f))
    g = list(g) + [0] * (n - len(g))
    return poly_trim([int(gf.add(a, b)) for a, b in zip(f, g)])


def poly_sub(gf: BaseField, f: Poly, g: Poly) -> Poly:
    return poly_add(gf, f, [int(gf.neg(c)) for c in g])


def poly_mul(gf: BaseField, f: Poly, g: Poly) -> Poly:
    f, g = poly_trim(f), poly_trim(g)
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            if b:
                out[i + j] = int(gf.add(out[i + j], gf.mul(a, b)))
    return poly_trim(out)


def poly_divmod(gf: BaseField, f: Poly, g: Poly) -> tuple[Poly, Poly]:
    f, g = poly_trim(f), poly_trim(g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = int(gf.inv(g[-1]))
    rem = list(f)
    quo = [0] * max(len(f) - len(g) + 1, 0)
    while len(rem) >= len(g):
        c = int(gf.mul(rem[-1], lead_inv))
        shift = len(rem) - len(g)
        quo[shift] = c
        for i, b in enumerate(g):
            rem[shift + i] = int(gf.sub(rem[shift + i], gf.mul(c, b)))
        rem = poly_trim(rem)
    return poly_trim(quo), rem


def poly_mod(gf: BaseField, f: Poly, g: Poly) -> Poly:
    return poly_divmod(gf, f, g)[1]


def poly_gcd(gf: BaseField, f: Poly, g: Poly) -> Poly:
    f, g = poly_trim(f), poly_trim(g)
    while g:
        f, g = g, poly_mod(gf, f, g)
    if not f:
        return f
    c = int(gf.inv(f[-1]))
    return [int(gf.mul(c, a)) for a in f]


def poly_powmod(gf: BaseField, f: Poly, e: int, m: Poly) -> Poly:
    result: Poly = [1]
    base = poly_mod(gf, f, m)
    while e:
        if e & 1:
            result = poly_mod(gf, poly_mul(gf, result, base), m)
        base = poly_mod(gf, poly_mul(gf, base, base), m)
        e >>= 1
    return result


def is_irreducible(gf: BaseField, f: Poly) -> bool:
    """Ben-Or test: f has no factor of degree <= deg(f)/2."""
    f = poly_trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    h = x
    for _ in range(d // 2):
        h = poly_powmod(gf, h, gf.q, f)
        if len(poly_gcd(gf, f, poly_sub(gf, h, x))) > 1:
            return False
    return True


def least_irreducible(gf: BaseField, d: int) -> Poly:
    """Lexicographically least monic irreducible of degree d over gf."""
    if d == 1:
        return [0, 1]
    for coeffs in itertools.product(range(gf.q), repeat=d):
        if coeffs[0] == 0:
            continue
        f = list(coeffs) + [1]
        if is_irreducible(gf, f):
            return f
    raise AssertionError("no irreducible polynomial found")  # unreachable


# -- the tower F_q < F_{q^n} --------------------------------------------


FieldElement = tuple


@dataclass(frozen=True, eq=False)
class FieldTower:
    """F_{q^n} as an n-dimensional vector space over F_q = ``base``."""

    p: int
    r: int
    n: int
    base: BaseField = field(init=False, repr=False)
    top_modulus: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("extension degree must be >= 1", n=self.n)
        base = BaseField(self.p, self.r)
        if base.q**self.n > MAX_TOWER_ORDER:
            raise CapExceededError(
                f"q^n = {base.q}^{self.n} exceeds {MAX_TOWER_ORDER}", q=base.q, n=self.n
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "top_modulus", tuple(least_irreducible(base, self.n)))

    @classmethod
    def from_q(cls, q: int, n: int) -> "FieldTower":
        p, r = prime_power(q)
        return cls(p, r, n)

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldTower) and (self.p, self.r, self.n) == (other.p, other.r, other.n)

    def __hash__(self) -> int:
        return hash(("tower", self.p, self.r, self.n))

    @property
    def q(self) -> int:
        return self.base.q

    @property
    def gf(self) -> BaseField:
        return self.base

    @property
    def order(self) -> int:
        return self.q**self.n

    @property
    def base_modulus(self) -> tuple:
        return tuple(self.base.modulus)

    # -- encoding

    def zero(self) -> FieldElement:
        return (0,) * self.n

    def one(self) -> FieldElement:
        return (1,) + (0,) * (self.n - 1)

    def element(self, coeffs: Sequence[int]) -> FieldElement:
        if len(coeffs) != self.n or any(not 0 <= int(c) < self.q for c in coeffs):
            raise StructuralError(f"{list(coeffs)} is not an element of F_{self.q}^{self.n}")
        return tuple(int(c) for c in coeffs)

    def code(self, x: Sequence[int]) -> int:
        return sum(int(c) * self.q**i for i, c in enumerate(x))

    def from_code(self, c: int) -> FieldElement:
        out = []
        for _ in range(self.n):
            out.append(c % self.q)
            c //= self.q
        return tuple(out)

    def elements(self) -> Iterator[FieldElement]:
        """All elements in canonical (code) order."""
        if self.order > MAX_SWEEP_ORDER:
            raise CapExceededError(f"element sweep of {self.order} exceeds {MAX_SWEEP_ORDER}")
        return (self.from_code(c) for c in range(self.order))

    # -- arithmetic

    def add(self, x, y) -> FieldElement:
        return tuple(int(v) for v in self.base.add(np.asarray(x), np.asarray(y)))

    def sub(self, x, y) -> FieldElement:
        return tuple(int(v) for v in self.base.sub(np.asarray(x), np.asarray(y)))

    def scalar(self, c: int, x) -> FieldElement:
        return tuple(int(v) for v in self.base.mul(c, np.asarray(x)))

    def mul_poly(self, x, y) -> FieldElement:
        """Schoolbook product modulo the top modulus (reference path)."""
        prod = poly_mod(self.base, poly_mul(self.base, list(x), list(y)), list(self.top_modulus))
        return tuple(prod + [0] * (self.n - len(prod)))

    @cached_property
    def _log_tables(self):
        if self.order > _LOG_TABLE_ORDER:
            return None
        N = self.order - 1
        if N == 0:
            return None
        factors = prime_factors(N)
        for c in range(1, self.order):
            g = self.from_code(c)
            if all(self._pow_poly(g, N // l) != self.one() for l in factors):
                break
        exp = np.zeros(N, dtype=np.int64)
        log = np.full(self.order, -1, dtype=np.int64)
        x = self.one()
        for i in range(N):
            code = self.code(x)
            exp[i] = code
            log[code] = i
            x = self.mul_poly(x, g)
        return exp, log

    def _pow_poly(self, x, e: int) -> FieldElement:
        result, base = self.one(), x
        while e:
            if e & 1:
                result = self.mul_poly(result, base)
            base = self.mul_poly(base, base)
            e >>= 1
        return result

    def mul(self, x, y) -> FieldElement:
        tables = self._log_tables
        if tables is None:
            return self.mul_poly(x, y)
        exp, log = tables
        a, b = self.code(x), self.code(y)
        if a == 0 or b == 0:
            return self.zero()
        return self.from_code(int(exp[(log[a] + log[b]) % (self.order - 1)]))

    def pow(self, x, e: int) -> FieldElement:
        if e < 0:
            return self.pow(self.inv(x), -e)
        tables = self._log_tables
        if tables is None:
            return self._pow_poly(x, e)
        exp, log = tables
        a = self.code(x)
        if a == 0:
            return self.one() if e == 0 else self.zero()
        return self.from_code(int(exp[(log[a] * e) % (self.order - 1)]))

    def inv(self, x) -> FieldElement:
        if not any(x):
            raise ZeroDivisionError("inverse of zero in F_{q^n}")
        return self.pow(x, self.order - 2)

    def frobenius(self, x, k: int = 1) -> FieldElement:
        """x -> x^(q^k)."""
        return self.pow(x, self.q**k)

    def mul_matrix(self, w) -> np.ndarray:
        """Matrix (over F_q) of x -> x*w in the power basis; column k = theta^k * w."""
        cols = []
        for k in range(self.n):
            e = [0] * self.n
            e[k] = 1
            cols.append(self.mul(tuple(e), w))
        return np.array(cols, dtype=np.int64).T.reshape(self.n, self.n)

    def degree_over_base(self, x) -> int:
        """Degree of the minimal polynomial of x over F_q."""
        for d in divisors(self.n):
            if self.frobenius(x, d) == tuple(x):
                return d
        raise AssertionError("x^(q^n) != x")  # unreachable in a field

    def minimal_polynomial(self, x) -> Poly:
        """Monic minimal polynomial of x over F_q, via the Frobenius orbit."""
        orbit = [tuple(x)]
        while True:
            nxt = self.frobenius(orbit[-1])
            if nxt == orbit[0]:
                break
            orbit.append(nxt)
        poly = [self.one()]  # coefficients in F_{q^n}
        for root in orbit:
            shifted = [self.zero()] + poly
            scaled = [self.mul(c, root) for c in poly] + [self.zero()]
            poly = [self.sub(a, b) for a, b in zip(shifted, scaled)]
        out = []
        for c in poly:
            if any(c[1:]):
                raise AssertionError("minimal polynomial not over the base field")
            out.append(c[0])
        return out

    # -- serialization

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "n": self.n,
            "base_modulus": list(self.base.modulus),
            "top_modulus": list(self.top_modulus),
        }

    def element_to_json(self, x) -> list[int]:
        """Flattened F_p digits: digits of c_0, then of c_1, ..."""
        if self.r == 1:
            return [int(c) for c in x]
        return [d for c in x for d in self.base.digits(int(c))]

    def element_from_json(self, data) -> FieldElement:
        if isinstance(data, int):
            if not 0 <= data < self.order:
                raise StructuralError(f"element code {data} out of range")
            return self.from_code(data)
        data = list(data)
        if data and isinstance(data[0], (list, tuple)):
            return self.element([self.base.from_digits(c) for c in data])
        if self.r == 1:
            return self.element(data)
        if len(data) != self.n * self.r:
            raise StructuralError(f"flattened element must have n*r={self.n * self.r} digits")
        return self.element(
            [self.base.from_digits(data[i * self.r : (i + 1) * self.r]) for i in range(self.n)]
        )


@dataclass(frozen=True)
class SubfieldDescriptor:
    d: int
    subspace: "object"  # matchkit.subspace.Subspace

    @property
    def dim(self) -> int:
        return self.subspace.dim


@lru_cache(maxsize=64)
def subfield_lattice(tower: FieldTower) -> tuple[SubfieldDescriptor, ...]:
    """One subfield F_{q^d} per divisor d of n, as fixed spaces of Frobenius^d."""
    from .linalg import nullspace
    from .subspace import Subspace

    gf = tower.base
    out = []
    for d in divisors(tower.n):
        cols = []
        for k in range(tower.n):
            e = [0] * tower.n
            e[k] = 1
            img = tower.frobenius(tuple(e), d)
            cols.append(tower.sub(img, tuple(e)))
        mat = np.array(cols, dtype=np.int64).T.reshape(tower.n, tower.n)
        fixed = Subspace.from_rows(tower, nullspace(gf, mat))
        if fixed.dim != d:
            raise AssertionError(f"fixed space of Frobenius^{d} has dim {fixed.dim}")
        out.append(SubfieldDescriptor(d, fixed))
    return tuple(out)


def subfield(tower: FieldTower, d: int):
    """The unique subfield F_{q^d} as a Subspace."""
    if tower.n % d:
        raise PreconditionError(f"{d} does not divide n={tower.n}")
    for desc in subfield_lattice(tower):
        if desc.d == d:
            return desc.subspace
    raise AssertionError("unreachable")
