"""Compare the largest subspace meeting a divisor-indexed family trivially with n minus the largest proper divisor."""

from __future__ import annotations

import argparse
import sys

from matchkit.harness import RunConfig, question_divisor_family, report_emit

DEFAULT_CASES = ["2,4", "3,4", "2,6"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("cases", nargs="*", default=DEFAULT_CASES, help="q,n pairs")
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--format", choices=["text", "json", "csv"], default="text")
    args = ap.parse_args(argv)

    cfg = RunConfig(seed=args.seed)
    reports = []
    for case in args.cases:
        q, n = (int(x) for x in case.split(","))
        reports.extend(question_divisor_family(q, n, args.trials, cfg))
    sys.stdout.write(report_emit(reports, args.format))
    return 0 if all(r.matches is not False for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
