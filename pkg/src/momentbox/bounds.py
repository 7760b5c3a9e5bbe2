"""Explicit endpoint bounds from the first four moments.

For a measure supported in ``[a, b]`` the level-one localizing matrices must
be PSD. Their diagonals give the ratio bounds on ``a`` (from above) and ``b``
(from below); their determinant is a quadratic in the endpoint whose roots
give the sharp level-one values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InsufficientMomentsError, MomentError
from .ingest import as_moments


@dataclass(frozen=True)
class ClosedFormBounds:
    a_upper: float  # the left endpoint a satisfies a <= a_upper
    b_lower: float  # the right endpoint b satisfies b >= b_lower
    b3_b4_applicable: bool
    ratio_a_upper: float
    ratio_b_lower: float


def closed_form_bounds(y) -> ClosedFormBounds:
    y = as_moments(y)
    if y.degree < 3:
        raise InsufficientMomentsError(3, y.degree)
    y0, y1, y2, y3 = (float(v) for v in y.values[:4])
    if not y0 > 0:
        raise MomentError("y_0 must be positive")
    if not y0 + y2 > 0:
        raise MomentError("y_0 + y_2 must be positive")

    candidates = [y1 / y0, (y1 + y3) / (y0 + y2)]
    scale = max(1.0, abs(y1) / y0)
    if abs(y2) > 1e-12 * y0 * scale**2:
        candidates.append(y3 / y2)
    a_upper = min(candidates)
    b_lower = max(candidates)
    ratio_a, ratio_b = a_upper, b_lower

    applicable = False
    gram = y0 * y2 - y1 * y1
    if gram > 1e-12 * y0 * abs(y2):
        lin = y0 * y3 - y1 * y2
        disc = lin * lin - 4.0 * gram * (y1 * y3 - y2 * y2)
        if disc >= 0:
            root = math.sqrt(disc)
            a_upper = min(a_upper, (lin - root) / (2.0 * gram))
            b_lower = max(b_lower, (lin + root) / (2.0 * gram))
            applicable = True
    return ClosedFormBounds(a_upper, b_lower, applicable, ratio_a, ratio_b)
