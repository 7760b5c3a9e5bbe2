"""Hankel moment and localizing matrices and positive semidefiniteness tests."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InsufficientMomentsError, MomentError
from .ingest import MomentSequence

EPS = np.finfo(float).eps
MAX_CHARPOLY_ORDER = 16


@dataclass(frozen=True)
class PsdVerdict:
    feasible: bool
    margin: float
    method: str  # "cholesky" | "eigen" | "descartes"


def _values(y):
    if isinstance(y, MomentSequence):
        return y.values
    return np.asarray(y, dtype=float)


def _hankel_index(d):
    return np.add.outer(np.arange(d + 1), np.arange(d + 1))


def moment_matrix(y, d: int) -> np.ndarray:
    """``H_d(y)[i, j] = y[i + j]`` (0-based), order ``d + 1``."""
    vals = _values(y)
    if d < 0:
        raise MomentError("level must be non-negative")
    if 2 * d > vals.size - 1:
        raise InsufficientMomentsError(2 * d, vals.size - 1)
    return vals[_hankel_index(d)]


def localizing_matrix(y, theta, d: int) -> np.ndarray:
    """``H_d(theta y)[i, j] = sum_k theta[k] * y[i + j + k]``.

    ``theta`` holds polynomial coefficients in increasing degree, so
    ``(-a, 1)`` is ``x - a`` and ``(1,)`` gives back the moment matrix.
    """
    vals = _values(y)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    s = theta.size - 1
    if d < 0:
        raise MomentError("level must be non-negative")
    if 2 * d + s > vals.size - 1:
        raise InsufficientMomentsError(2 * d + s, vals.size - 1)
    idx = _hankel_index(d)
    out = theta[0] * vals[idx]
    for k in range(1, s + 1):
        out = out + theta[k] * vals[idx + k]
    return out


def exact_form(y, v, theta=(1,)) -> Fraction:
    """``<v, H_d(theta y) v>`` in exact rational arithmetic.

    ``v`` (floats, taken at face value) has ``d + 1`` entries. The form only
    depends on the self-convolution of ``v``.
    """
    ys = y.rational() if isinstance(y, MomentSequence) else [Fraction(float(t)) for t in y]
    v = [Fraction(float(c)) for c in v]
    theta = [Fraction(float(t)) for t in theta]
    n = len(v)
    if 2 * (n - 1) + len(theta) - 1 > len(ys) - 1:
        raise InsufficientMomentsError(2 * (n - 1) + len(theta) - 1, len(ys) - 1)
    conv = [Fraction(0)] * (2 * n - 1)
    for i, vi in enumerate(v):
        for j, vj in enumerate(v):
            conv[i + j] += vi * vj
    return sum(
        (t * sum(c * ys[i + k] for i, c in enumerate(conv)) for k, t in enumerate(theta) if t),
        Fraction(0),
    )


def exactly_positive_definite(y, d: int) -> bool:
    """Whether ``H_d(y)`` is positive definite for the exact rational moments."""
    ys = y.rational() if isinstance(y, MomentSequence) else [Fraction(float(t)) for t in y]
    if 2 * d > len(ys) - 1:
        raise InsufficientMomentsError(2 * d, len(ys) - 1)
    M = [[ys[i + j] for j in range(d + 1)] for i in range(d + 1)]
    # Gaussian elimination without pivoting: all pivots positive iff PD
    for k in range(d + 1):
        piv = M[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, d + 1):
            f = M[i][k] / piv
            if f:
                for j in range(k + 1, d + 1):
                    M[i][j] -= f * M[k][j]
    return True


def absolute_tol(M, tol):
    n = M.shape[0]
    return tol * max(1.0, float(np.trace(M)) / n)


def psd_check(M, tol: float = 0.0) -> PsdVerdict:
    """Decide ``M >= 0`` up to a trace-relative tolerance.

    Feasible when ``M + tol_abs * I`` has a Cholesky factor, with
    ``tol_abs = tol * max(1, trace(M) / order)``. If the factorization fails
    the smallest eigenvalue decides, allowing for rounding in the eigensolve;
    this is what accepts exactly singular PSD matrices at ``tol = 0``.
    The margin is the smallest eigenvalue.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    tol_abs = absolute_tol(M, tol)
    lam_min = float(np.linalg.eigvalsh(M)[0])
    try:
        np.linalg.cholesky(M + tol_abs * np.eye(n))
        return PsdVerdict(True, lam_min, "cholesky")
    except np.linalg.LinAlgError:
        pass
    floor = 4 * n * EPS * float(np.max(np.abs(M), initial=0.0)) * n
    return PsdVerdict(lam_min >= -(tol_abs + floor), lam_min, "eigen")


def _faddeev_leverrier(M, n, zero, one):
    # c[j] is the coefficient of t^j in det(tI - M); generic over the scalar type
    c = [zero] * (n + 1)
    c[n] = one
    N = [[zero] * n for _ in range(n)]
    for k in range(1, n + 1):
        N = [
            [sum((M[i][l] * N[l][j] for l in range(n)), zero) + (c[n - k + 1] if i == j else zero) for j in range(n)]
            for i in range(n)
        ]
        tr = sum((M[i][l] * N[l][i] for i in range(n) for l in range(n)), zero)
        c[n - k] = -tr / k
    return [c[k] if (n - k) % 2 == 0 else -c[k] for k in range(n)]


def charpoly_coefficients(M) -> np.ndarray:
    """Coefficients ``p`` with ``det(tI - M) = t^n + sum_k (-1)^(n-k) p[k] t^k``.

    Faddeev-LeVerrier recurrence. ``p[0] = det(M)``, ``p[n-1] = trace(M)``,
    and in general ``p[k]`` is the sum of the principal minors of order
    ``n - k``, so ``M`` is PSD exactly when every ``p[k] >= 0``.
    """
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n > MAX_CHARPOLY_ORDER:
        raise MomentError(f"characteristic polynomial limited to order {MAX_CHARPOLY_ORDER}")
    c = np.zeros(n + 1)
    c[n] = 1.0
    N = np.zeros_like(M)
    I = np.eye(n)
    for k in range(1, n + 1):
        N = M @ N + c[n - k + 1] * I
        c[n - k] = -np.trace(M @ N) / k
    signs = np.array([(-1.0) ** (n - k) for k in range(n)])
    return signs * c[:n]


def exact_charpoly_coefficients(M) -> list:
    """``charpoly_coefficients`` in rational arithmetic on the exact entries of ``M``."""
    rows = [[Fraction(v) for v in row] for row in M]
    n = len(rows)
    if n > MAX_CHARPOLY_ORDER:
        raise MomentError(f"characteristic polynomial limited to order {MAX_CHARPOLY_ORDER}")
    return _faddeev_leverrier(rows, n, Fraction(0), Fraction(1))


def _exact_localizing(y, theta, d):
    ys = y.rational() if isinstance(y, MomentSequence) else [Fraction(float(t)) for t in y]
    theta = [Fraction(float(t)) for t in theta]
    s = len(theta) - 1
    if 2 * d + s > len(ys) - 1:
        raise InsufficientMomentsError(2 * d + s, len(ys) - 1)
    return [
        [sum(t * ys[i + j + k] for k, t in enumerate(theta)) for j in range(d + 1)]
        for i in range(d + 1)
    ]


def descartes_feasible(y, a: float, sense: str, d: int, tol: float = 0.0) -> PsdVerdict:
    """PSD test of the endpoint localizing matrix through its characteristic polynomial.

    ``sense="lower"`` tests ``H_d((x - a) y)``: feasible iff every ``p_k >= 0``.
    ``sense="upper"`` works with the coefficients of ``H_d((x - b) y)`` and
    requires the sign-alternated ``(-1)^(n-k) p_k >= 0``, which is the same as
    testing ``H_d((b - x) y)``. The matrix is shifted by the same trace-relative
    tolerance ``psd_check`` uses. Coefficients are computed exactly from the
    rational moments: in floating point the recurrence's error can exceed the
    determinant by many orders of magnitude. The margin is the most negative
    coefficient, normalized by the matching power of the largest entry.
    """
    if sense not in ("lower", "upper"):
        raise MomentError(f"sense must be 'lower' or 'upper', got {sense!r}")
    n = d + 1
    K = _exact_localizing(y, (-a, 1.0), d)
    tested = [[-v for v in row] for row in K] if sense == "upper" else K
    rho = float(max((abs(v) for row in tested for v in row), default=0))
    trace = float(sum(tested[i][i] for i in range(n)))
    shift = Fraction(tol * max(1.0, trace / n))
    if sense == "lower":
        p = exact_charpoly_coefficients([[v + (shift if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(K)])
    else:
        raw = exact_charpoly_coefficients([[v - (shift if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(K)])
        p = [c if (n - k) % 2 == 0 else -c for k, c in enumerate(raw)]
    feasible = all(c >= 0 for c in p)
    if rho == 0.0:
        return PsdVerdict(feasible, 0.0, "descartes")
    margin = min(float(c / Fraction(rho) ** (n - k)) for k, c in enumerate(p))
    return PsdVerdict(feasible, margin, "descartes")
