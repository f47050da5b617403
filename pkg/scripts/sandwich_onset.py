"""Smallest radius r* from which each comparison function stays strictly on its side of v.

The comparison argument needs ordering at the left end of the interval, so the
certificates only constrain v from r* on. Writes sandwich_onset.csv.
"""

import argparse
import os

import numpy as np

from translators import artifacts
from translators.asymptotics import Verdict, comparison_candidates
from translators.bowl import integrate_bowl
from translators.speeds import make_speed, normalize

CASES = [("mean", 2, None), ("mean", 3, None), ("mean", 4, None), ("sk_root", 3, 2), ("sk_root", 4, 2),
         ("sk_root", 4, 3), ("sk_root", 5, 2), ("quotient", 3, 1), ("quotient", 4, 1), ("quotient", 4, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    r = np.geomspace(0.1, 100.0, 4000)
    rows = []
    for case in CASES:
        f = normalize(make_speed(*case))
        sol = integrate_bowl(f)
        v = sol(r)
        for cand in comparison_candidates(f):
            gap = cand.w(r) - v
            if cand.expected is Verdict.SUB:
                gap = -gap
            bad = np.flatnonzero(gap <= 0)
            onset = r[0] if bad.size == 0 else (r[bad[-1] + 1] if bad[-1] + 1 < r.size else np.nan)
            rows.append((f.label, cand.name, cand.expected.value, onset))
            print(f"{f.label:22s} {cand.name:16s} r* = {onset:.4g}")
    print("largest r*:", max(row[3] for row in rows))
    print(artifacts.write_csv(os.path.join(args.out, "sandwich_onset.csv"),
                              ["speed", "candidate", "side", "r_star"], rows))


if __name__ == "__main__":
    main()
