"""Level-by-level endpoint hierarchy for the support of a measure on the line.

At level ``d`` the left endpoint estimate is the largest ``a`` with
``H_d(x y) - a H_d(y) >= 0`` and the right one the smallest ``b`` with
``b H_d(y) - H_d(x y) >= 0``. Both are one-variable semidefinite programs.
When ``H_d(y)`` is positive definite they are the extreme generalized
eigenvalues of the pencil ``(H_d(x y), H_d(y))``; otherwise they are found by
bisection on the PSD boundary.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import InsufficientMomentsError, MomentError
from .hankel import exact_form, localizing_matrix, moment_matrix, psd_check
from .ingest import MarginalSet, as_moments

log = logging.getLogger(__name__)

COND_LIMIT = 1e14
BISECTION_PSD_TOL = 1e-10
MAX_DOUBLINGS = 60
UNBOUNDED_LIMIT = 1e6
EPS = np.finfo(float).eps

EIGEN = "eigen-solved"
BISECTION = "bisection-solved"
UNBOUNDED = "unbounded-trend"
INSUFFICIENT = "insufficient-moments"
FAILED = "failed"

METHODS = ("auto", "pencil", "bisection")


@dataclass
class EndpointSolution:
    value: float
    status: str
    frame: str = "raw"  # "raw" or "centered"
    conditioning: float = math.inf  # of H_d(y) in the frame that was solved
    last_finite: float | None = None  # set for unbounded trends
    message: str = ""


@dataclass
class IntervalEstimate:
    level: int
    a: float
    b: float
    a_status: str
    b_status: str
    conditioning: float  # condition number of H_d(y) in the input frame
    a_frame: str = "raw"
    b_frame: str = "raw"
    a_last_finite: float | None = None
    b_last_finite: float | None = None
    a_clamp: float = 0.0
    b_clamp: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass
class BoxEstimate:
    levels: list  # per coordinate: list of IntervalEstimate, or None on failure
    errors: list  # per coordinate: None or an error message
    level: int  # deepest level shared by all coordinates (0 if none)
    box: list  # [(a, b)] per coordinate at ``level``


def _condition(B):
    try:
        c = float(np.linalg.cond(B))
    except np.linalg.LinAlgError:
        return math.inf
    return c if math.isfinite(c) else math.inf


def _is_pd(B):
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        return False
    return True


def _check_level(y, d):
    if d < 1:
        raise MomentError("hierarchy levels start at d = 1")
    if 2 * d + 1 > y.degree:
        raise InsufficientMomentsError(2 * d + 1, y.degree)


def rayleigh_quotient(z, v) -> float:
    """``<v, H(x z) v> / <v, H(z) v>`` evaluated exactly, then rounded."""
    den = exact_form(z, v)
    if den <= 0:
        return math.nan
    return float(exact_form(z, v, (0, 1)) / den)


def _pencil_extreme(z, d, sense):
    """Extreme generalized eigenvalue of ``(H_d(x z), H_d(z))``.

    The LAPACK eigenvalue loses accuracy like ``cond(H_d(z))``. Exact
    Rayleigh quotients of eigenvectors are accurate to second order and never
    overshoot the optimum, so the better of two candidates is kept: the
    direct pencil's and the one from the exactly whitened pencil.
    """
    A = localizing_matrix(z, (0.0, 1.0), d)
    B = moment_matrix(z, d)
    i = 0 if sense == "lower" else d
    _, vec = scipy.linalg.eigh(A, B, subset_by_index=[i, i])
    Aw, Bw, W = whitened_pencil(z, d)
    _, wvec = scipy.linalg.eigh(Aw, Bw, subset_by_index=[i, i])
    cands = [rayleigh_quotient(z, vec[:, 0]), rayleigh_quotient(z, W.T @ wvec[:, 0])]
    cands = [c for c in cands if not math.isnan(c)]
    if not cands:
        raise np.linalg.LinAlgError(f"degenerate eigenvectors for the level-{d} pencil")
    return min(cands) if sense == "lower" else max(cands)


def _exact_congruence(W, z, d, k):
    """``W @ H_d(x^k z) @ W.T`` evaluated exactly and rounded once."""
    n = d + 1
    zr = z.rational()[k : k + 2 * d + 1]
    den = math.lcm(*(v.denominator for v in zr))
    h = [int(v * den) for v in zr]
    wf = [[Fraction(float(x)) for x in row] for row in W]
    wden = max(v.denominator for row in wf for v in row)
    wi = [[int(v * wden) for v in row] for row in wf]
    P = [[sum(wi[r][i] * h[i + j] for i in range(n)) for j in range(n)] for r in range(n)]
    Q = [[sum(P[r][j] * wi[c][j] for j in range(n)) for c in range(n)] for r in range(n)]
    scale = den * wden * wden
    return np.array([[float(Fraction(q, scale)) for q in row] for row in Q])


def whitened_pencil(z, d):
    """``(W A W^T, W B W^T, W)`` with ``W B W^T`` close to the identity.

    ``W`` is any nonsingular float matrix; the congruence itself is exact, so
    ``A - t B >= 0`` iff ``W (A - t B) W^T >= 0`` and the trace-relative PSD
    tolerance acts on a pencil whose ``B`` is near ``I``. For a singular or
    badly conditioned ``H_d(z)`` the tiny eigenvalues are floored before
    inversion, which keeps ``W`` nonsingular.
    """
    B = moment_matrix(z, d)
    diag = np.diag(B).copy()
    diag[diag <= 0] = 1.0
    D = 1.0 / np.sqrt(diag)
    lam, Q = np.linalg.eigh(B * np.outer(D, D))
    floor = (d + 1) * EPS * max(float(lam[-1]), 1.0)
    W = (Q / np.sqrt(np.maximum(lam, floor))).T * D
    return _exact_congruence(W, z, d, 1), _exact_congruence(W, z, d, 0), W


def _bisect(z, d, sense, tol_x, scale, start, unbounded_limit):
    """Bisection in the frame of ``z``; widths are compared in input units via ``scale``.

    ``start`` is the first candidate (the mean, or a lower level's optimum,
    both known upper bounds for ``a_d``). Returns ``(value, status)`` with
    ``value`` on the feasible side.
    """
    A, B, W = whitened_pencil(z, d)
    sign = 1.0 if sense == "lower" else -1.0

    def feasible(t):
        return psd_check(sign * (A - t * B), BISECTION_PSD_TOL).feasible

    if feasible(start):
        return start, BISECTION
    step = 1.0
    inner, outer = start, start - sign * step
    doublings = 0
    while not feasible(outer):
        inner = outer
        step *= 2.0
        doublings += 1
        outer = start - sign * step
        if doublings >= MAX_DOUBLINGS or step > unbounded_limit:
            return outer, UNBOUNDED
    # inner infeasible, outer feasible
    while scale * abs(inner - outer) > tol_x(outer):
        mid = 0.5 * (inner + outer)
        if mid == inner or mid == outer:
            break
        if feasible(mid):
            outer = mid
        else:
            inner = mid
    # Polish: the near-kernel vector at the bracket has an exact Rayleigh
    # quotient that cannot overshoot the optimum and is off only to second
    # order. Keep it when it is no worse than the infeasible bound.
    _, vecs = np.linalg.eigh(sign * (A - outer * B))
    rq = rayleigh_quotient(z, W.T @ vecs[:, 0])
    if sign * (inner - rq) >= 0:
        return rq, BISECTION
    return outer, BISECTION


def _well_posed(z, d):
    B = moment_matrix(z, d)
    cond = _condition(B)
    return cond <= COND_LIMIT and _is_pd(B), cond


def _solve_endpoint(y, d, tol, sense, unbounded_limit=UNBOUNDED_LIMIT, method="auto") -> EndpointSolution:
    y = as_moments(y)
    _check_level(y, d)
    if method not in METHODS:
        raise MomentError(f"method must be one of {METHODS}, got {method!r}")
    # the pencil is always solved in the centered frame
    shift, scale, z = y.centered
    ok, cond_z = _well_posed(z, d)

    def finish(t, status):
        value = shift + scale * t
        if status == UNBOUNDED:
            inf = -math.inf if sense == "lower" else math.inf
            return EndpointSolution(inf, UNBOUNDED, "centered", cond_z, last_finite=value)
        if (sense == "lower" and t < -unbounded_limit) or (sense == "upper" and t > unbounded_limit):
            inf = -math.inf if sense == "lower" else math.inf
            return EndpointSolution(inf, UNBOUNDED, "centered", cond_z, last_finite=value)
        return EndpointSolution(value, status, "centered", cond_z)

    if method == "pencil" or (method == "auto" and ok):
        if not _is_pd(moment_matrix(z, d)):
            raise np.linalg.LinAlgError(f"H_{d}(y) is not positive definite")
        return finish(_pencil_extreme(z, d, sense), EIGEN)

    start = float(z.values[1] / z.values[0])
    if method == "auto":
        # Singular or hopelessly conditioned H_d: warm-start the bisection
        # from the deepest level whose pencil is reliable. For a measure with
        # r atoms that level is r - 1 and its optimum is already exact.
        for k in range(d - 1, 0, -1):
            if _well_posed(z, k)[0]:
                start = _pencil_extreme(z, k, sense)
                break

    def tol_x(t):
        return tol * max(1.0, abs(shift + scale * t))

    t, status = _bisect(z, d, sense, tol_x, scale, start, unbounded_limit)
    return finish(t, status)


def solve_lower(y, d: int, tol: float = 1e-9, method: str = "auto"):
    """Level-``d`` estimate of the left endpoint: ``(a_d, status)``.

    ``method="auto"`` uses the pencil when ``H_d(y)`` is well conditioned in
    the centered frame and a warm-started bisection otherwise; ``"pencil"``
    and ``"bisection"`` force one path (bisection then starts at the mean).
    """
    sol = _solve_endpoint(y, d, tol, "lower", method=method)
    return sol.value, sol.status


def solve_upper(y, d: int, tol: float = 1e-9, method: str = "auto"):
    """Level-``d`` estimate of the right endpoint: ``(b_d, status)``."""
    sol = _solve_endpoint(y, d, tol, "upper", method=method)
    return sol.value, sol.status


def joint_interval(y, d: int, tol: float = 1e-9):
    """Minimizer of ``b - a`` over both endpoint constraints.

    The two constraints share no variable, so the joint problem is solved by
    the two one-sided ones; ``b - a`` is the optimal width.
    """
    a, _ = solve_lower(y, d, tol)
    b, _ = solve_upper(y, d, tol)
    return a, b


def _safe_solve(y, d, tol, sense, unbounded_limit):
    try:
        return _solve_endpoint(y, d, tol, sense, unbounded_limit)
    except InsufficientMomentsError as exc:
        return EndpointSolution(math.nan, INSUFFICIENT, message=str(exc))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        return EndpointSolution(math.nan, FAILED, message=str(exc))


def run_hierarchy(y, d_max: int, tol: float = 1e-9, unbounded_limit: float = UNBOUNDED_LIMIT):
    """Estimates for levels ``1..d_max`` with monotonicity enforced.

    A level that comes out looser than the previous one is clamped to the
    previous value (the feasible sets are nested, so only rounding can cause
    this); clamps larger than ``10 * tol`` are logged and kept in
    ``warnings``.
    """
    y = as_moments(y)
    if d_max < 1:
        raise MomentError("d_max must be at least 1")
    if 2 * d_max + 1 > y.degree:
        raise InsufficientMomentsError(2 * d_max + 1, y.degree)
    out = []
    prev_a, prev_b = math.inf, -math.inf
    for d in range(1, d_max + 1):
        lo = _safe_solve(y, d, tol, "lower", unbounded_limit)
        hi = _safe_solve(y, d, tol, "upper", unbounded_limit)
        est = IntervalEstimate(
            level=d,
            a=lo.value,
            b=hi.value,
            a_status=lo.status,
            b_status=hi.status,
            conditioning=_condition(moment_matrix(y, d)),
            a_frame=lo.frame,
            b_frame=hi.frame,
            a_last_finite=lo.last_finite,
            b_last_finite=hi.last_finite,
        )
        for msg in (lo.message, hi.message):
            if msg:
                est.warnings.append(f"level {d}: {msg}")
        if math.isfinite(est.a) and math.isfinite(prev_a) and est.a > prev_a:
            est.a_clamp = est.a - prev_a
            est.a = prev_a
            if est.a_clamp > 10 * tol:
                msg = f"level {d}: a_d clamped by {est.a_clamp:.3e} to keep the sequence monotone"
                log.warning(msg)
                est.warnings.append(msg)
        if math.isfinite(est.b) and math.isfinite(prev_b) and est.b < prev_b:
            est.b_clamp = prev_b - est.b
            est.b = prev_b
            if est.b_clamp > 10 * tol:
                msg = f"level {d}: b_d clamped by {est.b_clamp:.3e} to keep the sequence monotone"
                log.warning(msg)
                est.warnings.append(msg)
        if not math.isnan(est.a):
            prev_a = est.a
        if not math.isnan(est.b):
            prev_b = est.b
        out.append(est)
    return out


def default_threads():
    env = os.environ.get("MOMENTBOX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer MOMENTBOX_THREADS=%r", env)
    return os.cpu_count() or 1


def bound_box(ms: MarginalSet, d_max: int, tol: float = 1e-9, threads: int | None = None) -> BoxEstimate:
    """Per-coordinate hierarchies and the product box at the deepest common level."""
    if not isinstance(ms, MarginalSet):
        ms = MarginalSet(tuple(as_moments(y) for y in ms))
    threads = threads or default_threads()

    def work(y):
        try:
            return run_hierarchy(y, d_max, tol), None
        except (MomentError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return None, str(exc)

    if threads > 1 and ms.dims > 1:
        with ThreadPoolExecutor(max_workers=min(threads, ms.dims)) as pool:
            results = list(pool.map(work, ms.marginals))
    else:
        results = [work(y) for y in ms.marginals]
    levels = [r[0] for r in results]
    errors = [r[1] for r in results]
    if any(lv is None for lv in levels):
        return BoxEstimate(levels, errors, 0, [])
    depth = min(len(lv) for lv in levels)
    box = [(lv[depth - 1].a, lv[depth - 1].b) for lv in levels]
    return BoxEstimate(levels, errors, depth, box)
