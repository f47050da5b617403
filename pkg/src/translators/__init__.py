"""Rotationally symmetric translating solitons for fully nonlinear curvature flows."""

from .asymptotics import (
    AsymptoticFit,
    Candidate,
    DefectReport,
    Verdict,
    check_sub_super,
    comparison_candidates,
    fit_c,
    fit_next_coeff,
    growth_exponent,
    predicted_next_coeff,
)
from .bowl import (
    HeightFunction,
    SlopeSolution,
    initial_series,
    integrate_bowl,
    integrate_degenerate,
    principal_curvatures,
    recover_height,
)
from .errors import TranslatorError
from .implicit_g import GSolver, g_partial_y, solve_g
from .speeds import (
    CurvaturePair,
    Family,
    SpeedFunction,
    cone_membership,
    make_speed,
    normalize,
)
from .wing import Classification, WingSolution, construct_wing

__all__ = [
    "AsymptoticFit", "Candidate", "Classification", "CurvaturePair", "DefectReport", "Family",
    "GSolver", "HeightFunction", "SlopeSolution", "SpeedFunction", "TranslatorError", "Verdict",
    "WingSolution", "check_sub_super", "cone_membership", "construct_wing", "fit_c", "fit_next_coeff",
    "g_partial_y", "growth_exponent", "initial_series", "integrate_bowl", "integrate_degenerate",
    "make_speed", "normalize", "comparison_candidates", "predicted_next_coeff", "principal_curvatures",
    "recover_height", "solve_g",
]
