"""Exhaustive exploration of the linear deficiency conjecture and the divisor-family question.

Both sweeps emit evidence, never verdicts on the open problems: each case
carries completeness flags, and :func:`verify_linear_case` recomputes every
linear-deficiency case from raw definitions on element sets.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapExceededError, PreconditionError
from .gfq import FieldTower, divisors, subfield
from .matchlin import (
    DEFAULT_BASIS_BUDGET,
    check_basis_matched,
    independent_sets,
    max_trivial_intersector,
    ordered_basis_count,
    subspace_matched,
)
from .serial import SCHEMA_VERSION, dumps, span_from_json, subspace_to_json, tower_from_json
from .subspace import (
    MAX_SUBSPACE_ENUMERATION,
    Subspace,
    VectorSpace,
    enumerate_subspaces,
    gaussian_binomial,
    intersect,
    product_span,
    span,
)

READINGS = {
    "condition_ii": "V_i n V_j = V_gcd(i,j)",
    "largest_divisor": "largest proper divisor of n",
    "sub_pair": "A_0 <= A and B_0 <= B of equal dimension, matched as a pair",
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    basis_budget: int = DEFAULT_BASIS_BUDGET
    subset_cap: int = MAX_SUBSPACE_ENUMERATION
    element_sweep_cap: int = 1 << 12
    output_format: str = "json"
    max_pairs: Optional[int] = None  # per dimension; larger sweeps are sampled
    workers: int = 1

    def __post_init__(self):
        for name in ("basis_budget", "subset_cap", "element_sweep_cap", "workers"):
            if getattr(self, name) < 1:
                raise PreconditionError(f"{name} must be positive")
        if self.max_pairs is not None and self.max_pairs < 1:
            raise PreconditionError("max_pairs must be positive")
        if self.output_format not in ("json", "csv", "text"):
            raise PreconditionError(f"unknown format {self.output_format!r}")

    def caps(self) -> dict:
        return {
            "basis_budget": self.basis_budget,
            "subset_cap": self.subset_cap,
            "element_sweep_cap": self.element_sweep_cap,
            "max_pairs": self.max_pairs,
        }


def _basis_id(t: FieldTower, basis) -> str:
    return ",".join(str(t.code(v)) for v in basis)


# -- linear deficiency sweep ---------------------------------------------------


@dataclass
class LinearDeficiencyReport:
    index: int
    field: FieldTower
    A: Subspace
    B: Subspace
    status: str  # "evaluated" | "matched" | "product_span_equals_A"
    reason: str = ""
    D_per_basis: dict = field(default_factory=dict)
    D: Optional[int] = None
    D_excess: Optional[int] = None  # max over J of dim(meet) - (n - #J)
    M: Optional[int] = None
    M_subpair: Optional[int] = None
    note_consistent: Optional[bool] = None
    conjecture_holds: Optional[bool] = None
    conjecture_holds_excess: Optional[bool] = None
    enumeration_complete: bool = True
    ordered_bases: int = 0
    one_in_B: bool = False
    config: RunConfig = field(default_factory=RunConfig)

    @property
    def dim(self) -> int:
        return self.A.dim

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "linear_deficiency",
            "seed": self.config.seed,
            "caps": self.config.caps(),
            "field": self.field.to_dict(),
            "index": self.index,
            "dimA": self.A.dim,
            "dimB": self.B.dim,
            "A": subspace_to_json(self.A),
            "B": subspace_to_json(self.B),
            "status": self.status,
            "reason": self.reason,
            "ordered_bases": self.ordered_bases,
            "one_in_B": self.one_in_B,
            "D_per_basis": dict(self.D_per_basis),
            "D": self.D,
            "D_excess": self.D_excess,
            "M": self.M,
            "M_subpair": self.M_subpair,
            "note_consistent": self.note_consistent,
            "conjecture_holds": self.conjecture_holds,
            "conjecture_holds_excess": self.conjecture_holds_excess,
            "enumeration_complete": self.enumeration_complete,
            "readings": READINGS,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LinearDeficiencyReport":
        t = tower_from_json(d["field"])
        caps = d["caps"]
        cfg = RunConfig(
            seed=d["seed"],
            basis_budget=caps["basis_budget"],
            subset_cap=caps["subset_cap"],
            element_sweep_cap=caps["element_sweep_cap"],
            max_pairs=caps["max_pairs"],
        )
        return cls(
            index=d["index"],
            field=t,
            A=span_from_json(t, d["A"]),
            B=span_from_json(t, d["B"]),
            status=d["status"],
            reason=d["reason"],
            D_per_basis=dict(d["D_per_basis"]),
            D=d["D"],
            D_excess=d["D_excess"],
            M=d["M"],
            M_subpair=d["M_subpair"],
            note_consistent=d["note_consistent"],
            conjecture_holds=d["conjecture_holds"],
            conjecture_holds_excess=d["conjecture_holds_excess"],
            enumeration_complete=d["enumeration_complete"],
            ordered_bases=d["ordered_bases"],
            one_in_B=d["one_in_B"],
            config=cfg,
        )


def _embed(parent: Subspace, coords_space: VectorSpace, k: int, cap: int) -> Iterator[Subspace]:
    """k-dim subspaces of parent, via subspaces of its coordinate space."""
    for c in enumerate_subspaces(coords_space, k, cap):
        yield Subspace.from_rows(parent.space, [parent.combine(row) for row in c.basis])


def max_matched_subpair(a: Subspace, b: Subspace, top: int, cfg: RunConfig) -> tuple[int, bool]:
    """Largest k <= top with some k-dim A_0 <= A matched to some k-dim B_0 <= B."""
    t = a.space
    ca, cb = VectorSpace(t.q, a.dim), VectorSpace(t.q, b.dim)
    complete = True
    for k in range(top, 0, -1):
        subs_b = list(_embed(b, cb, k, cfg.subset_cap))
        for a0 in _embed(a, ca, k, cfg.subset_cap):
            for b0 in subs_b:
                res = subspace_matched(a0, b0, budget=cfg.basis_budget, seed=cfg.seed)
                if res.verdict == "matched":
                    return k, complete
                if not res.exact:
                    complete = False
    return 0, complete


def evaluate_pair(index: int, a: Subspace, b: Subspace, cfg: RunConfig) -> LinearDeficiencyReport:
    t = a.space
    k = a.dim
    rep = LinearDeficiencyReport(index, t, a, b, "evaluated", config=cfg)
    rep.ordered_bases = ordered_basis_count(t.q, k)
    rep.one_in_B = t.one() in b
    if product_span(a, b) == a:
        rep.status = "product_span_equals_A"
        rep.reason = "<AB> = A: outside the hypothesis; M recorded as 0"
        rep.M = 0
        rep.M_subpair, complete = max_matched_subpair(a, b, k, cfg)
        rep.note_consistent = rep.M_subpair == 0
        rep.enumeration_complete = complete
        _fill_deficiency(rep, cfg)
        return rep
    res = subspace_matched(a, b, budget=cfg.basis_budget, seed=cfg.seed)
    if res.verdict == "matched":
        rep.status = "matched"
        rep.reason = "A is matched to B: outside the hypothesis"
        rep.enumeration_complete = res.exact
        return rep
    _fill_deficiency(rep, cfg)
    m, complete = max_matched_subpair(a, b, k - 1, cfg)
    rep.M = m
    rep.enumeration_complete = rep.enumeration_complete and complete and res.exact
    if rep.D is not None:
        rep.conjecture_holds = rep.M == k - rep.D
        rep.conjecture_holds_excess = rep.M == k - rep.D_excess
    return rep


def _fill_deficiency(rep: LinearDeficiencyReport, cfg: RunConfig) -> None:
    a, b = rep.A, rep.B
    if rep.ordered_bases > cfg.basis_budget:
        rep.enumeration_complete = False
        return
    per = {}
    excess = 0
    for basis in independent_sets(a):
        r = check_basis_matched(basis, a, b)
        per[_basis_id(a.space, basis)] = r.deficiency
        excess = max(excess, max(d - (a.dim - len(j)) for j, d in r.criterion_dims.items()))
    rep.D_per_basis = per
    rep.D = max(per.values())
    rep.D_excess = excess


def _pairs(t: FieldTower, k: int, cfg: RunConfig) -> tuple[list, bool]:
    total = gaussian_binomial(t.n, k, t.q)
    if total > cfg.subset_cap:
        raise CapExceededError(f"{total} subspaces of dim {k} exceed cap {cfg.subset_cap}")
    subs = list(enumerate_subspaces(t, k, cfg.subset_cap))
    n_pairs = total * total
    if cfg.max_pairs is None or n_pairs <= cfg.max_pairs:
        return [(x, y) for x in subs for y in subs], False
    rng = np.random.default_rng([cfg.seed, t.q, t.n, k])
    picks = np.sort(rng.choice(n_pairs, size=cfg.max_pairs, replace=False))
    return [(subs[int(i) // total], subs[int(i) % total]) for i in picks], True


def _evaluate_star(args):
    return evaluate_pair(*args)


def conjecture_linear_deficiency(
    t: FieldTower, dims: Optional[Sequence[int]] = None, cfg: Optional[RunConfig] = None
) -> Iterator[LinearDeficiencyReport]:
    """Stream one report per equal-dimension pair (A, B), in enumeration order."""
    cfg = cfg or RunConfig()
    dims = list(dims) if dims is not None else list(range(1, t.n + 1))
    if any(not 1 <= k <= t.n for k in dims):
        raise PreconditionError(f"dimensions must lie in 1..{t.n}")
    jobs = []
    for k in dims:
        pairs, _ = _pairs(t, k, cfg)
        jobs.extend((a, b) for a, b in pairs)
    args = [(i, a, b, cfg) for i, (a, b) in enumerate(jobs)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            yield from ex.map(_evaluate_star, args, chunksize=8)
    else:
        for job in args:
            yield _evaluate_star(job)


def sweep_is_sampled(t: FieldTower, dims: Sequence[int], cfg: RunConfig) -> bool:
    if cfg.max_pairs is None:
        return False
    return any(gaussian_binomial(t.n, k, t.q) ** 2 > cfg.max_pairs for k in dims)


# -- independent verifier ------------------------------------------------------


class _SetModel:
    """Subspaces as frozensets of element codes; only field add/mul is trusted."""

    def __init__(self, t: FieldTower):
        self.t = t
        self.q = t.q
        self._mul = {}

    def span(self, gens) -> frozenset:
        t = self.t
        out = {t.code(t.zero())}
        for g in gens:
            gv = t.from_code(g)
            out |= {
                t.code(t.add(t.from_code(s), t.scalar(c, gv))) for s in out for c in range(1, self.q)
            }
        return frozenset(out)

    def mul(self, x: int, y: int) -> int:
        key = (x, y) if x <= y else (y, x)
        v = self._mul.get(key)
        if v is None:
            t = self.t
            v = self._mul[key] = t.code(t.mul(t.from_code(x), t.from_code(y)))
        return v

    def dim(self, s: frozenset) -> int:
        return round(math.log(len(s), self.q))

    def ordered_bases(self, s: frozenset) -> list[tuple]:
        k = self.dim(s)
        out = []

        def rec(chosen, cur):
            if len(chosen) == k:
                out.append(tuple(chosen))
                return
            for v in sorted(s - cur):
                rec(chosen + [v], self.span(chosen + [v]))

        rec([], frozenset({0}))
        return out

    def subspaces(self, s: frozenset, k: int) -> list[frozenset]:
        seen = set()
        for basis in itertools.combinations(sorted(s - {0}), k):
            sp = self.span(basis)
            if self.dim(sp) == k:
                seen.add(sp)
        return sorted(seen, key=sorted)

    def criterion(self, a_i: int, a: frozenset, b: frozenset) -> frozenset:
        return frozenset(y for y in b if self.mul(a_i, y) in a)

    def basis_deficiency(self, basis, a, b) -> tuple[int, int]:
        """(largest violating #J, largest excess dim - (n - #J))."""
        n = len(basis)
        us = [self.criterion(x, a, b) for x in basis]
        best = excess = 0
        for r in range(1, n + 1):
            for j in itertools.combinations(range(n), r):
                d = self.dim(frozenset.intersection(*(us[i] for i in j)))
                if d > n - r:
                    best = max(best, r)
                excess = max(excess, d - (n - r))
        return best, excess

    def pair_matched(self, a: frozenset, b: frozenset) -> bool:
        """Every ordered basis of A has a partner basis of B (containment definition)."""
        hyper = []
        for bb in self.ordered_bases(b):
            hyper.append([self.span(bb[:i] + bb[i + 1 :]) for i in range(len(bb))])
        for basis in self.ordered_bases(a):
            us = [self.criterion(x, a, b) for x in basis]
            if not any(all(u <= h for u, h in zip(us, hs)) for hs in hyper):
                return False
        return True

    def max_subpair(self, a: frozenset, b: frozenset, top: int) -> int:
        for k in range(top, 0, -1):
            subs_b = self.subspaces(b, k)
            for a0 in self.subspaces(a, k):
                if any(self.pair_matched(a0, b0) for b0 in subs_b):
                    return k
        return 0


def _normalise_basis_id(model: _SetModel, basis) -> str:
    t = model.t
    pts = []
    for c in basis:
        v = t.from_code(c)
        lead = next(x for x in v if x)
        inv = t.gf.inv(lead)
        pts.append(t.code(t.scalar(inv, v)))
    return ",".join(str(c) for c in sorted(pts))


def verify_linear_case(case: dict) -> list[str]:
    """Recompute one emitted case from raw definitions; return the mismatches."""
    t = tower_from_json(case["field"])
    model = _SetModel(t)
    a = model.span(t.code(t.element_from_json(v)) for v in case["A"]["basis"])
    b = model.span(t.code(t.element_from_json(v)) for v in case["B"]["basis"])
    k = model.dim(a)
    problems = []
    if (t.code(t.one()) in b) != case["one_in_B"]:
        problems.append("one_in_B flag is wrong")
    if k != case["dimA"] or model.dim(b) != case["dimB"]:
        problems.append("dimension mismatch")
        return problems
    prod = model.span(sorted({model.mul(x, y) for x in a for y in b}))
    closed = prod == a
    if closed != (case["status"] == "product_span_equals_A"):
        problems.append(f"<AB> = A is {closed}, status {case['status']}")
        return problems
    matched = not closed and model.pair_matched(a, b)
    if matched != (case["status"] == "matched"):
        problems.append(f"A matched to B is {matched}, status {case['status']}")
    if case["status"] == "matched":
        return problems
    if case["D"] is not None:
        per: dict = {}
        excess = 0
        for basis in model.ordered_bases(a):
            key = _normalise_basis_id(model, basis)
            val, ex = model.basis_deficiency(basis, a, b)
            excess = max(excess, ex)
            if per.setdefault(key, val) != val:
                problems.append(f"D varies within the class of basis {key}")
        if per != case["D_per_basis"]:
            problems.append("per-basis deficiencies differ")
        d = max(per.values())
        if d != case["D"]:
            problems.append(f"D recomputed {d}, reported {case['D']}")
        if excess != case["D_excess"]:
            problems.append(f"excess D recomputed {excess}, reported {case['D_excess']}")
    if case["status"] == "product_span_equals_A":
        m_sub = model.max_subpair(a, b, k)
        if case["M"] != 0 or m_sub != case["M_subpair"]:
            problems.append(f"sub-pair M recomputed {m_sub}, reported {case['M_subpair']}")
        if case["note_consistent"] != (m_sub == 0):
            problems.append("note_consistent flag is wrong")
        return problems
    m = model.max_subpair(a, b, k - 1)
    if m != case["M"]:
        problems.append(f"M recomputed {m}, reported {case['M']}")
    if case["D"] is not None and case["conjecture_holds"] != (m == k - case["D"]):
        problems.append("conjecture_holds flag is wrong")
    if case["D"] is not None and case["conjecture_holds_excess"] != (m == k - case["D_excess"]):
        problems.append("conjecture_holds_excess flag is wrong")
    return problems


# -- divisor-indexed families ----------------------------------------------------


@dataclass
class DivisorFamilyReport:
    q: int
    n: int
    trial: int  # 0 is the subfield family
    family: Optional[dict]  # divisor -> Subspace
    max_trivial_dim: Optional[int] = None
    predicted: Optional[int] = None
    matches: Optional[bool] = None
    witness: Optional[Subspace] = None
    method: str = ""
    complete: bool = True
    status: str = "evaluated"  # or "skipped"
    config: RunConfig = field(default_factory=RunConfig)

    def to_dict(self) -> dict:
        fam = None
        if self.family is not None:
            fam = {str(i): subspace_to_json(v) for i, v in sorted(self.family.items())}
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "divisor_family",
            "seed": self.config.seed,
            "caps": self.config.caps(),
            "q": self.q,
            "n": self.n,
            "trial": self.trial,
            "status": self.status,
            "family": fam,
            "max_trivial_dim": self.max_trivial_dim,
            "predicted": self.predicted,
            "matches": self.matches,
            "witness": subspace_to_json(self.witness) if self.witness is not None else None,
            "method": self.method,
            "complete": self.complete,
            "readings": READINGS,
        }


def check_divisor_family(t: FieldTower, family: dict) -> None:
    """Raise unless dim V_i = i and V_i n V_j = V_gcd(i,j) for all proper divisors."""
    for i, v in family.items():
        if v.dim != i:
            raise PreconditionError(f"V_{i} has dim {v.dim}")
    for i, j in itertools.combinations(sorted(family), 2):
        if intersect(family[i], family[j]) != family[math.gcd(i, j)]:
            raise PreconditionError(f"V_{i} n V_{j} != V_{math.gcd(i, j)}")


def _random_family(t: FieldTower, rng: np.random.Generator, attempts: int = 64) -> Optional[dict]:
    props = [d for d in divisors(t.n) if d < t.n]
    for _ in range(attempts):
        fam: dict = {}
        ok = True
        for d in props:
            base = Subspace.zero(t)
            for e in props:
                if e < d and d % e == 0:
                    base = base + fam[e]
            if base.dim > d:
                ok = False
                break
            cur = base
            while cur.dim < d:
                v = tuple(int(x) for x in rng.integers(0, t.q, size=t.n))
                cur = cur + span(t, [v])
            fam[d] = cur
        if not ok:
            continue
        try:
            check_divisor_family(t, fam)
        except PreconditionError:
            continue
        return fam
    return None


def max_trivial_dimension(t: FieldTower, members: Sequence[Subspace], cfg: RunConfig):
    """(dimension, witness, method, complete) for the largest T meeting every member in 0."""
    s = max(m.dim for m in members)
    greedy = None
    if len(members) <= t.q:
        greedy = max_trivial_intersector(t, members, check_maximal=t.order <= cfg.element_sweep_cap)
    for k in range(t.n - 1, 0, -1):
        if gaussian_binomial(t.n, k, t.q) > cfg.subset_cap:
            if greedy is not None and k <= t.n - s:
                # dim T + dim V_s <= n bounds every larger candidate
                return greedy.dim, greedy, "greedy_with_dimension_bound", True
            return None, greedy, "enumeration_capped", False
        for w in enumerate_subspaces(t, k, cfg.subset_cap):
            if all(intersect(w, m).dim == 0 for m in members):
                if greedy is not None and greedy.dim != k:
                    raise AssertionError("greedy and exhaustive dimensions disagree")
                return k, w, "exhaustive", True
    return 0, Subspace.zero(t), "exhaustive", True


def question_divisor_family(
    q: int, n: int, trials: int = 0, cfg: Optional[RunConfig] = None
) -> Iterator[DivisorFamilyReport]:
    """Trial 0 uses the subfield family; trials 1..trials draw random valid families."""
    cfg = cfg or RunConfig()
    props = [d for d in divisors(n) if d < n]
    if n < 2 or props == [1]:
        raise PreconditionError(
            f"n={n} has no proper divisor beyond 1: outside the interesting range", n=n
        )
    t = FieldTower.from_q(q, n)
    if t.order > cfg.element_sweep_cap * 1024:
        raise CapExceededError(f"q^n = {t.order} too large for exhaustive checks")
    predicted = n - max(props)
    rng = np.random.default_rng([cfg.seed, q, n])
    for trial in range(trials + 1):
        fam = {d: subfield(t, d) for d in props} if trial == 0 else _random_family(t, rng)
        if fam is None:
            yield DivisorFamilyReport(q, n, trial, None, predicted=predicted, status="skipped",
                                      method="no valid family found", complete=False, config=cfg)
            continue
        check_divisor_family(t, fam)
        dim_, witness, method, complete = max_trivial_dimension(t, list(fam.values()), cfg)
        yield DivisorFamilyReport(
            q, n, trial, fam,
            max_trivial_dim=dim_,
            predicted=predicted,
            matches=None if dim_ is None else dim_ == predicted,
            witness=witness,
            method=method,
            complete=complete,
            config=cfg,
        )


# -- emission --------------------------------------------------------------------

LINEAR_CSV = ("q", "n", "dimA", "dimB", "D", "M", "holds", "complete")
DIVISOR_CSV = ("q", "n", "trial", "max_trivial_dim", "predicted", "matches", "complete")


def _csv_row(d: dict) -> tuple:
    if d["kind"] == "linear_deficiency":
        f = d["field"]
        return (f["p"] ** f["r"], f["n"], d["dimA"], d["dimB"], d["D"], d["M"], d["conjecture_holds"],
                d["enumeration_complete"])
    return (d["q"], d["n"], d["trial"], d["max_trivial_dim"], d["predicted"], d["matches"], d["complete"])


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def report_emit(reports: Iterable, fmt: str = "json") -> str:
    dicts = [r if isinstance(r, dict) else r.to_dict() for r in reports]
    if fmt == "json":
        return dumps(dicts)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        kind = dicts[0]["kind"] if dicts else "linear_deficiency"
        w.writerow(LINEAR_CSV if kind == "linear_deficiency" else DIVISOR_CSV)
        for d in dicts:
            w.writerow([_cell(x) for x in _csv_row(d)])
        return buf.getvalue()
    if fmt == "text":
        lines = []
        for d in dicts:
            if d["kind"] == "linear_deficiency":
                lines.append(
                    f"#{d['index']} dim={d['dimA']} status={d['status']} D={d['D']} M={d['M']} "
                    f"holds={d['conjecture_holds']} complete={d['enumeration_complete']}"
                )
            else:
                lines.append(
                    f"trial {d['trial']} q={d['q']} n={d['n']} status={d['status']} "
                    f"max_trivial_dim={d['max_trivial_dim']} predicted={d['predicted']} "
                    f"matches={d['matches']}"
                )
        return "\n".join(lines) + ("\n" if lines else "")
    raise PreconditionError(f"unknown format {fmt!r}")


def parse_reports(text: str) -> list[dict]:
    import json

    data = json.loads(text)
    if not isinstance(data, list):
        raise PreconditionError("report stream must be a JSON array")
    return data
