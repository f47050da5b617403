import itertools
import math

import pytest

from translators.bowl import integrate_bowl
from translators.speeds import make_speed, normalize

BOWL_CASES = [
    ("mean", 2, None), ("mean", 3, None), ("mean", 4, None),
    ("sk_root", 3, 2), ("sk_root", 4, 2), ("sk_root", 4, 3), ("sk_root", 5, 2),
    ("quotient", 3, 1), ("quotient", 4, 1), ("quotient", 4, 2),
]

BUILTIN_CASES = BOWL_CASES + [
    ("sk_root", 3, 1), ("sk_root", 6, 4), ("quotient", 5, 3), ("quotient", 3, 0),
    ("inverse_harmonic", 3, 2), ("inverse_harmonic", 4, 3), ("inverse_harmonic", 5, 2),
]


def case_id(case):
    fam, n, k = case
    return f"{fam}-n{n}" + ("" if k is None else f"-k{k}")


def elementary(lams, l):
    """S_l of the full curvature vector, by brute-force enumeration."""
    if l == 0:
        return 1.0
    return sum(math.prod(c) for c in itertools.combinations(lams, l))


def full_speed(fam, n, k, x, y):
    """Unreduced speed evaluated on (x, y, ..., y); independent of the reduced formulas."""
    lams = [x] + [y] * (n - 1)
    if fam == "mean":
        return sum(lams)
    if fam == "sk_root":
        return elementary(lams, k) ** (1.0 / k)
    if fam == "quotient":
        return elementary(lams, k + 1) / elementary(lams, k)
    if fam == "inverse_harmonic":
        return 1.0 / sum(1.0 / sum(c) for c in itertools.combinations(lams, k))
    raise ValueError(fam)


@pytest.fixture(scope="session")
def bowl_solutions():
    cache = {}

    def get(case, r_max=100.0):
        key = (case, r_max)
        if key not in cache:
            f = normalize(make_speed(*case))
            cache[key] = integrate_bowl(f, r_max)
        return cache[key]

    return get
