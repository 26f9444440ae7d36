"""Sweep the linear deficiency comparison over equal-dimension pairs and summarise.

    python scripts/run_conjecture_sweep.py --q 2 --n 3
    python scripts/run_conjecture_sweep.py --q 2 --n 4 --max-pairs 2000 --out n4.json
"""

from __future__ import annotations

import argparse
import collections
import sys
import time
from pathlib import Path

from matchkit.gfq import FieldTower
from matchkit.harness import RunConfig, conjecture_linear_deficiency, report_emit, verify_linear_case


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--dims", type=int, nargs="*")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--max-pairs", type=int)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, help="write the JSON reports here")
    ap.add_argument("--verify", action="store_true", help="re-check every case independently")
    args = ap.parse_args(argv)

    cfg = RunConfig(seed=args.seed, max_pairs=args.max_pairs, workers=args.workers)
    t = FieldTower.from_q(args.q, args.n)
    start = time.perf_counter()
    reports = list(conjecture_linear_deficiency(t, args.dims, cfg))
    elapsed = time.perf_counter() - start

    tally = collections.Counter()
    for r in reports:
        tally[r.status] += 1
        if r.status == "evaluated":
            tally["literal holds" if r.conjecture_holds else "literal fails"] += 1
            tally["excess holds" if r.conjecture_holds_excess else "excess fails"] += 1
            if not r.conjecture_holds:
                tally["literal fails, 1 in B" if r.one_in_B else "literal fails, 1 not in B"] += 1
        if not r.enumeration_complete:
            tally["incomplete"] += 1
    print(f"q={args.q} n={args.n}: {len(reports)} pairs in {elapsed:.1f}s")
    for key in sorted(tally):
        print(f"  {key:28s} {tally[key]}")

    if args.verify:
        bad = [r.index for r in reports if verify_linear_case(r.to_dict())]
        print(f"  verifier failures            {len(bad)}")
    if args.out:
        args.out.write_text(report_emit(reports, "json"))
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
