"""Wings for several speeds and neck radii: classification, boundary radius, handoff gap.

Writes wing_gallery.csv and, with --plot, one SVG profile per wing.
"""

import argparse
import os

from translators import artifacts
from translators.errors import NumericalError
from translators.speeds import make_speed, normalize
from translators.wing import construct_wing, expected_classification, handoff_gap

CASES = [("quotient", 3, 1), ("quotient", 4, 1), ("quotient", 4, 2), ("sk_root", 3, 2), ("sk_root", 4, 2),
         ("sk_root", 4, 3), ("sk_root", 5, 3), ("sk_root", 6, 4), ("mean", 3, None),
         ("inverse_harmonic", 3, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--R", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    ap.add_argument("--out", default="out")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    rows = []
    for case in CASES:
        f = normalize(make_speed(*case))
        for R in args.R:
            try:
                w = construct_wing(f, R=R)
            except NumericalError as exc:
                print(f"{f.label} R={R:g}: {exc}")
                continue
            rows.append((f.label, R, w.classification.value, expected_classification(f).value,
                         w.r_boundary, w.small_piece.epsilon, handoff_gap(w), w.lower.v_values[-1]))
            print(f"{f.label:28s} R={R:<4g} {w.classification.value:15s} r_boundary={w.r_boundary}")
            if args.plot:
                up, lo = w.upper_height(), w.lower_height()
                p = w.small_piece
                artifacts.write_svg(
                    os.path.join(args.out, f"gallery_{f.label}_R{R:g}.svg"),
                    [(p.r_values, p.h_grid, "neck", "-"), (w.upper.r_grid, up.u_values, "upper", "-"),
                     (w.lower.r_grid, lo.u_values, "lower", "-")],
                    "r", "height", f"{f.label}, R={R:g}")
    header = ["speed", "R", "classification", "expected", "r_boundary", "epsilon", "handoff_gap", "lower_v_end"]
    print(artifacts.write_csv(os.path.join(args.out, "wing_gallery.csv"), header, rows))


if __name__ == "__main__":
    main()
