"""r^-3 coefficient of the bowl slope for S_{k+1}/S_k: fit, series prediction, closed form.

Prints one row per (n, k) and tolerance and writes next_coefficient.csv.
"""

import argparse
import os

from translators import artifacts
from translators.asymptotics import (
    fit_next_coeff,
    predicted_next_coeff,
    quotient_next_coeff_formula,
    to_raw_next_coeff,
)
from translators.bowl import integrate_bowl
from translators.speeds import make_speed, normalize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--rtol", type=float, nargs="+", default=[1e-11, 1e-12, 5e-13])
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    rows = []
    for n in args.n:
        for k in range(1, n - 1):
            f = normalize(make_speed("quotient", n, k))
            pred = to_raw_next_coeff(f, predicted_next_coeff(f))
            closed = quotient_next_coeff_formula(n, k)
            for rtol in args.rtol:
                fit = fit_next_coeff(integrate_bowl(f, 100.0, rtol=rtol, atol=1e-14))
                raw = to_raw_next_coeff(f, fit.d)
                rows.append((n, k, rtol, fit.d, raw, pred, closed, fit.residual))
                print(f"n={n} k={k} rtol={rtol:.0e}  fit {raw:+.6f}  series {pred:+.6f}  closed {closed:+.6f}")
    header = ["n", "k", "rtol", "fit_normalized", "fit_unnormalized", "series_prediction",
              "closed_form", "fit_residual"]
    print(artifacts.write_csv(os.path.join(args.out, "next_coefficient.csv"), header, rows))


if __name__ == "__main__":
    main()
