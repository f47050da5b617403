"""Command-line entry point: bowl, wing, degenerate, verify, sweep.

Exit codes: 0 success, 1 numerical failure, 2 degenerate speed where a
nondegenerate one is required, 3 invalid input or configuration, 4 I/O.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import artifacts
from .asymptotics import (
    check_sub_super,
    comparison_candidates,
    fit_c,
    fit_next_coeff,
    growth_exponent,
    predicted_next_coeff,
    quotient_next_coeff_formula,
    sandwich_check,
    to_raw_next_coeff,
)
from .bowl import (
    degenerate_s2_exact,
    degenerate_s2_solution,
    degenerate_s3_invert,
    degenerate_sn_implicit_residual,
    degenerate_sn_leading,
    integrate_bowl,
    integrate_degenerate,
    recover_height,
)
from .config import COMMANDS, RunConfig, merge
from .errors import (
    ConfigError,
    DegenerateSpeed,
    InsufficientRange,
    NumericalError,
    ValidationError,
)
from .speeds import Family, make_speed, normalize
from .wing import (
    construct_wing,
    expected_classification,
    handoff_gap,
    lower_slope_ratio_raw,
)

log = logging.getLogger("translators")

EXIT_NUMERIC, EXIT_DEGENERATE, EXIT_VALIDATION, EXIT_IO = 1, 2, 3, 4
BOWL_HEADER = ["r", "v", "v_prime", "u", "lambda1", "lambda_t"]
WING_HEADER = ["section", "h", "r", "r_prime", "v", "u"]


def build_speed(cfg: RunConfig):
    """Normalized speed from the config; DegenerateSpeed for f(0,1) <= 0."""
    raw = make_speed(cfg.family, cfg.n, cfg.k, cfg.expr)
    return normalize(raw)


def _path(cfg, name):
    return os.path.join(cfg.output_dir, name)


def bowl_rows(sol, height):
    v, vp, r = sol.v_values, sol.v_prime_values, sol.r_grid
    w = np.sqrt(1.0 + v * v)
    return zip(r, v, vp, height.u_values, vp / w**3, v / (r * w))


def fit_summary(f, sol):
    summary = {"speed": f.label, "r_max": float(sol.r_max), "c_predicted": f.asymptotic_c()}
    try:
        fit = fit_c(sol)
    except InsufficientRange as exc:
        summary["c_fit_skipped"] = str(exc)
        return summary
    summary.update(c_est_at_rmax=fit.c_at_rmax, relative_error=fit.relative_error,
                   convergence_rate=fit.convergence_rate)
    if sol.r_max >= 40:
        nxt = fit_next_coeff(sol)
        block = {"fit": nxt.d, "fit_unnormalized": to_raw_next_coeff(f, nxt.d),
                 "series_prediction": predicted_next_coeff(f), "fit_window": list(nxt.r_range)}
        if f.family is Family.QUOTIENT:
            block["closed_form_unnormalized"] = quotient_next_coeff_formula(f.n, f.k)
        summary["next_coeff"] = block
    return summary


def run_bowl(cfg: RunConfig):
    f = build_speed(cfg)
    sol = integrate_bowl(f, cfg.radius(), cfg.rtol, cfg.atol)
    height = recover_height(sol)
    files = [artifacts.write_csv(_path(cfg, f"{f.label}_bowl.csv"), BOWL_HEADER, bowl_rows(sol, height))]
    summary = fit_summary(f, sol)
    summary["growth_exponent"] = growth_exponent(height)
    summary["quadrature_error_estimate"] = height.quadrature_error_estimate
    files.append(artifacts.write_json(_path(cfg, f"{f.label}_fit.json"), summary))
    if cfg.plot:
        c = f.asymptotic_c()
        r = sol.r_grid
        ref_r = r[r >= 1.0]
        files.append(artifacts.write_svg(
            _path(cfg, f"{f.label}_profile.svg"),
            [(r, height.u_values, "computed u(r)", "-"),
             (ref_r, ref_r**2 / 2 - c * np.log(ref_r), "r^2/2 - c ln r", "--")],
            "r", "u", f"bowl profile, {f.label}"))
    log.info("bowl %s: c_est=%s", f.label, summary.get("c_est_at_rmax"))
    return files


def run_wing(cfg: RunConfig):
    f = build_speed(cfg)
    wing = construct_wing(f, cfg.R, cfg.radius(), rtol=cfg.rtol, atol=cfg.atol)
    piece = wing.small_piece
    up_h, lo_h = wing.upper_height(), wing.lower_height()
    rows = [("small_piece", h, r, p, None, None)
            for h, r, p in zip(piece.h_grid, piece.r_values, piece.rprime_values)]
    rows += [("upper", None, r, None, v, u) for r, v, u in zip(wing.upper.r_grid, wing.upper.v_values, up_h.u_values)]
    rows += [("lower", None, r, None, v, u) for r, v, u in zip(wing.lower.r_grid, wing.lower.v_values, lo_h.u_values)]
    stem = f"{f.label}_R{cfg.R:g}_wing"
    files = [artifacts.write_csv(_path(cfg, stem + ".csv"), WING_HEADER, rows)]
    meta = {
        "speed": f.label,
        "R": cfg.R,
        "classification": wing.classification.value,
        "expected_classification": expected_classification(f).value,
        "r_boundary": wing.r_boundary,
        "epsilon": piece.epsilon,
        "handoff_gap": handoff_gap(wing),
        "evidence": wing.evidence,
    }
    if wing.upper.r_max >= 50:
        meta["upper_c_relative_error"] = fit_c(wing.upper).relative_error
    if wing.lower.r_max >= 50 / f.normalization_scale:
        meta["lower_slope_ratio_unnormalized_at_50"] = lower_slope_ratio_raw(wing, 50.0)
    files.append(artifacts.write_json(_path(cfg, stem + ".json"), meta))
    if cfg.plot:
        files.append(artifacts.write_svg(
            _path(cfg, stem + ".svg"),
            [(piece.r_values, piece.h_grid + wing.h0, "neck piece", "-"),
             (wing.upper.r_grid, up_h.u_values, "upper branch", "-"),
             (wing.lower.r_grid, lo_h.u_values, "lower branch", "-")],
            "r", "height", f"wing profile, {f.label}, R={cfg.R:g}"))
    log.info("wing %s: %s", f.label, wing.classification.value)
    return files


def degenerate_table(n: int, r_max: float, rtol: float = 1e-12, atol: float = 1e-14):
    sol = integrate_degenerate(n, r_max, rtol, atol)
    if n == 2:
        r = np.linspace(min(0.5, r_max), r_max, 26)
        v = sol(r)
        printed, exact = degenerate_s2_exact(r), degenerate_s2_solution(r)
        header = ["r", "v_ode", "v_printed", "v_exact", "rel_err_printed", "rel_err_exact"]
        rows = zip(r, v, printed, exact, np.abs(v / printed - 1), np.abs(v / exact - 1))
    elif n == 3:
        r = np.geomspace(min(1.0, r_max), r_max, 46)
        v = sol(r)
        inv = np.array([degenerate_s3_invert(x) for x in r])
        header = ["r", "v_ode", "v_implicit", "abs_err", "tail_gap"]
        rows = zip(r, v, inv, np.abs(v - inv), np.abs(inv - r**3 / 3 - math.pi / 2))
    else:
        r = np.geomspace(min(1.0, r_max), r_max, 40)
        v = sol(r)
        lead = degenerate_sn_leading(n, r)
        resid = [degenerate_sn_implicit_residual(n, vi, ri) for vi, ri in zip(v, r)]
        header = ["r", "v_ode", "v_leading", "scaled_correction", "implicit_residual"]
        rows = zip(r, v, lead, np.abs(v - lead) * r ** (n / (n - 2)), resid)
    return sol, header, list(rows)


def run_degenerate(cfg: RunConfig):
    sol, header, rows = degenerate_table(cfg.n, cfg.radius())
    files = [artifacts.write_csv(_path(cfg, f"degenerate_n{cfg.n}.csv"), header, rows)]
    summary = {"n": cfg.n, "r_max": cfg.radius(), "columns": header,
               "max": {h: float(np.nanmax([row[i] for row in rows])) for i, h in enumerate(header)}}
    if sol.r_max >= 10 and cfg.n >= 3:
        summary["growth_exponent"] = growth_exponent(recover_height(sol))
        summary["predicted_growth_exponent"] = 2 * (cfg.n - 1) / (cfg.n - 2)
    files.append(artifacts.write_json(_path(cfg, f"degenerate_n{cfg.n}.json"), summary))
    if cfg.plot:
        r = np.array([row[0] for row in rows])
        files.append(artifacts.write_svg(
            _path(cfg, f"degenerate_n{cfg.n}.svg"),
            [(r, [row[1] for row in rows], "ODE", "-"), (r, [row[2] for row in rows], header[2], "--")],
            "r", "v", f"degenerate slope, n={cfg.n}"))
    return files


def verify_report(f, sol):
    fit = fit_c(sol)
    verdicts = []
    for cand in comparison_candidates(f):
        rep = check_sub_super(f, cand, (sol.r_max / 10.0, sol.r_max))
        sw = sandwich_check(sol, cand, rep)
        entry = rep.as_dict()
        entry.update(expected=cand.expected.value, matches=rep.verdict is cand.expected,
                     sandwich_holds=sw.holds, sandwich_min_gap=sw.min_gap)
        verdicts.append(entry)
    return {
        "speed": f.label,
        "c_predicted": fit.c_predicted,
        "c_est_at_rmax": fit.c_at_rmax,
        "next_coeff_est": fit_next_coeff(sol).d if sol.r_max >= 40 else None,
        "defect_verdicts": verdicts,
    }


def run_verify(cfg: RunConfig):
    f = build_speed(cfg)
    sol = integrate_bowl(f, cfg.radius(), cfg.rtol, cfg.atol)
    report = verify_report(f, sol)
    return [artifacts.write_json(_path(cfg, f"{f.label}_verify.json"), report)]


def sweep_cases(ns):
    cases = []
    for n in ns:
        cases += [("sk_root", n, k) for k in range(1, n)]
        cases += [("quotient", n, k) for k in range(1, n - 1)]
    return cases


def _sweep_one(case, r_max, rtol, atol):
    fam, n, k = case
    f = normalize(make_speed(fam, n, k))
    fit = fit_c(integrate_bowl(f, r_max, rtol, atol))
    return (fam, n, k, fit.c_predicted, fit.c_at_rmax, fit.relative_error)


def run_sweep(cfg: RunConfig):
    cases = sweep_cases(cfg.sweep_n)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(lambda c: _sweep_one(c, cfg.radius(), cfg.rtol, cfg.atol), cases))
    header = ["family", "n", "k", "c_predicted", "c_est", "rel_error"]
    return [artifacts.write_csv(_path(cfg, "sweep.csv"), header, rows)]


RUNNERS = {"bowl": run_bowl, "wing": run_wing, "degenerate": run_degenerate,
           "verify": run_verify, "sweep": run_sweep}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="translators", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON config file; flags override its values")
        s.add_argument("--family", choices=[fm.value for fm in Family])
        s.add_argument("--n", type=int)
        s.add_argument("--k", type=int)
        s.add_argument("--expr", help="custom speed f(x, y), e.g. \"(x + 2*y)/2\"")
        s.add_argument("--rmax", dest="r_max", type=float)
        s.add_argument("--rtol", type=float)
        s.add_argument("--atol", type=float)
        s.add_argument("--R", type=float, help="neck radius (wing)")
        s.add_argument("--out", dest="output_dir")
        s.add_argument("--plot", action="store_true", default=None)
        s.add_argument("--sweep-n", dest="sweep_n", type=int, nargs="+")
        s.add_argument("--workers", type=int)
    return p


def config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = RunConfig.from_json(fh.read()).to_dict()
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    return RunConfig.from_dict(merge(base, flags))


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        cfg = config_from_args(args)
        files = RUNNERS[cfg.command](cfg)
    except DegenerateSpeed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
