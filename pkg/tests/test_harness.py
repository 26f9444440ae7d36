import copy
import json

import pytest

from matchkit.errors import PreconditionError
from matchkit.gfq import FieldTower
from matchkit.harness import (
    LINEAR_CSV,
    LinearDeficiencyReport,
    RunConfig,
    conjecture_linear_deficiency,
    evaluate_pair,
    parse_reports,
    question_divisor_family,
    report_emit,
    verify_linear_case,
)
from matchkit.subspace import Subspace, span

F4 = FieldTower.from_q(2, 2)


@pytest.fixture(scope="module")
def n2_stream():
    return list(conjecture_linear_deficiency(F4, cfg=RunConfig(seed=3)))


def test_n2_stream_is_verified(n2_stream):
    assert [r.index for r in n2_stream] == list(range(10))
    for r in n2_stream:
        assert verify_linear_case(r.to_dict()) == []
        assert r.enumeration_complete


def test_matched_pairs_are_skipped_with_reason(n2_stream):
    matched = [r for r in n2_stream if r.status == "matched"]
    assert matched
    for r in matched:
        assert "outside the hypothesis" in r.reason
        assert r.conjecture_holds is None and r.D is None


def test_closed_product_records_zero(n2_stream):
    closed = [r for r in n2_stream if r.status == "product_span_equals_A"]
    assert closed
    for r in closed:
        assert r.M == 0 and r.conjecture_holds is None
    full = next(r for r in closed if r.dim == 2)
    # span{1} is matched to span{w} for w outside F_2, so the plain sub-pair value is 1
    assert full.M_subpair == 1 and full.note_consistent is False


def test_one_in_b_forces_full_deficiency():
    t = FieldTower.from_q(2, 3)
    for r in conjecture_linear_deficiency(t, dims=[2]):
        if r.status == "evaluated" and r.one_in_B:
            assert r.D == r.dim


def test_verifier_catches_tampering(n2_stream):
    case = next(r for r in n2_stream if r.status == "product_span_equals_A").to_dict()
    bad = copy.deepcopy(case)
    bad["D"] += 1
    assert verify_linear_case(bad)
    bad = copy.deepcopy(case)
    bad["status"] = "matched"
    assert verify_linear_case(bad)
    bad = copy.deepcopy(case)
    bad["one_in_B"] = not bad["one_in_B"]
    assert verify_linear_case(bad)


def test_evaluated_case_verifier_n3():
    t = FieldTower.from_q(2, 3)
    a = span(t, [(1, 0, 0), (0, 1, 0)])
    rep = evaluate_pair(0, a, a, RunConfig())
    assert rep.status == "evaluated"
    d = rep.to_dict()
    assert verify_linear_case(d) == []
    d["M"] += 1
    assert any("M recomputed" in p for p in verify_linear_case(d))


def test_empty_stream_is_empty_array():
    assert json.loads(report_emit([], "json")) == []
    assert report_emit([], "csv").splitlines() == [",".join(LINEAR_CSV)]
    assert report_emit([], "text") == ""


def test_csv_columns(n2_stream):
    lines = report_emit(n2_stream, "csv").splitlines()
    assert lines[0] == "q,n,dimA,dimB,D,M,holds,complete"
    assert len(lines) == 11
    assert lines[1].split(",")[:4] == ["2", "2", "1", "1"]


def test_json_round_trip(n2_stream):
    one = n2_stream[-1]
    text = report_emit([one], "json")
    parsed = parse_reports(text)
    again = LinearDeficiencyReport.from_dict(parsed[0])
    assert report_emit([again], "json") == text
    assert parsed[0]["seed"] == 3 and parsed[0]["caps"]["basis_budget"] == RunConfig().basis_budget
    assert parsed[0]["schema_version"]


def test_determinism():
    t = FieldTower.from_q(2, 3)
    runs = [report_emit(conjecture_linear_deficiency(t, cfg=RunConfig(seed=9)), "json") for _ in range(2)]
    assert runs[0] == runs[1]


def test_parallel_matches_serial():
    t = FieldTower.from_q(2, 3)
    serial = report_emit(conjecture_linear_deficiency(t, [2], RunConfig()), "json")
    parallel = report_emit(conjecture_linear_deficiency(t, [2], RunConfig(workers=2)), "json")
    assert serial == parallel


def test_sampling_beyond_pair_budget():
    t = FieldTower.from_q(2, 4)
    cfg = RunConfig(max_pairs=20)
    reps = list(conjecture_linear_deficiency(t, [2], cfg))
    assert len(reps) == 20
    again = list(conjecture_linear_deficiency(t, [2], cfg))
    assert [r.to_dict() for r in reps] == [r.to_dict() for r in again]


def test_budget_exhaustion_flags_incomplete():
    t = FieldTower.from_q(2, 3)
    reps = list(conjecture_linear_deficiency(t, [3], RunConfig(basis_budget=10)))
    assert not reps[0].enumeration_complete


def test_run_config_validation():
    with pytest.raises(PreconditionError):
        RunConfig(basis_budget=0)
    with pytest.raises(PreconditionError):
        RunConfig(output_format="xml")


@pytest.mark.parametrize("q", [2, 3])
def test_divisor_family_n4(q):
    reports = list(question_divisor_family(q, 4, trials=3, cfg=RunConfig(seed=5)))
    canon = reports[0]
    assert canon.trial == 0
    assert sorted(canon.family) == [1, 2]
    assert (canon.max_trivial_dim, canon.predicted, canon.matches) == (2, 2, True)
    assert canon.complete and canon.method == "exhaustive"
    for r in reports:
        if r.status == "evaluated":
            assert all(intersect_trivial(r.witness, v) for v in r.family.values())
    d = canon.to_dict()
    assert d["readings"]["condition_ii"] == "V_i n V_j = V_gcd(i,j)"


def intersect_trivial(w, v):
    from matchkit.subspace import intersect

    return intersect(w, v).dim == 0


def test_divisor_family_n6():
    canon = next(question_divisor_family(2, 6, trials=0))
    assert sorted(canon.family) == [1, 2, 3]
    assert canon.predicted == 3 and canon.max_trivial_dim == 3


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_divisor_family_rejects_prime(n):
    with pytest.raises(PreconditionError):
        list(question_divisor_family(2, n))
