"""Moment sequences: construction from samples, closed-form families and files.

Moments are kept unnormalized, ``y[0]`` is the total mass. Alongside the
float64 vector a sequence may carry its exact rational values; closed-form
families and sample power sums always do. Affine re-centering is evaluated in
rational arithmetic, which is what makes high-degree work in the centered
frame possible at all: the binomial expansion cancels catastrophically in
floating point.
"""
from __future__ import annotations

import ast
import csv
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import MomentError

DEFAULT_MAX_DEGREE = 31

FAMILIES = ("uniform", "beta", "exponential", "gaussian", "dirac", "finite_discrete")


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Truncated moment vector ``(y_0, ..., y_m)`` of a measure on the line."""

    values: np.ndarray
    source: str = "explicit"
    exact: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise MomentError("a moment sequence needs at least y_0 and y_1")
        if not np.all(np.isfinite(vals)):
            raise MomentError("moments must be finite")
        if not vals[0] > 0:
            raise MomentError(f"y_0 must be positive, got {vals[0]!r}")
        if self.exact is not None:
            exact = tuple(Fraction(v) for v in self.exact)
            if len(exact) != vals.size:
                raise MomentError("exact and float moments differ in length")
            object.__setattr__(self, "exact", exact)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_exact(cls, exact, source="explicit"):
        exact = tuple(Fraction(v) for v in exact)
        return cls(np.array([float(v) for v in exact]), source=source, exact=exact)

    @property
    def mass(self) -> float:
        return float(self.values[0])

    @property
    def degree(self) -> int:
        """Highest available moment index ``m``."""
        return self.values.size - 1

    def rational(self):
        """Exact rational moments (the float values themselves if none were recorded)."""
        if self.exact is not None:
            return self.exact
        return tuple(Fraction(float(v)) for v in self.values)

    def truncate(self, degree):
        if degree > self.degree:
            raise MomentError(f"cannot extend a degree-{self.degree} sequence to {degree}")
        exact = None if self.exact is None else self.exact[: degree + 1]
        return MomentSequence(self.values[: degree + 1], self.source, exact)

    @cached_property
    def centered(self):
        """``(shift, scale, z)``: the natural frame and the moments of ``(x - shift) / scale``."""
        shift, scale = natural_frame(self)
        return shift, scale, affine_transform(self, shift, scale)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class MarginalSet:
    """Per-axis moment sequences of a measure on R^n, all of the same degree."""

    marginals: tuple

    def __post_init__(self):
        margs = tuple(self.marginals)
        if not margs:
            raise MomentError("a marginal set needs at least one coordinate")
        degrees = {y.degree for y in margs}
        if len(degrees) != 1:
            raise MomentError(f"marginals have different degrees: {sorted(degrees)}")
        object.__setattr__(self, "marginals", margs)

    @property
    def dims(self) -> int:
        return len(self.marginals)

    @property
    def degree(self) -> int:
        return self.marginals[0].degree

    def __getitem__(self, i):
        return self.marginals[i]

    def __iter__(self):
        return iter(self.marginals)

    def __len__(self):
        return len(self.marginals)


def as_moments(y) -> MomentSequence:
    if isinstance(y, MomentSequence):
        return y
    return MomentSequence(np.asarray(y, dtype=float))


def _power_sums(xs, weights, max_degree):
    # Exact sum_j w_j x_j^k over a common power-of-two denominator for the
    # float atoms; weights are Fractions.
    xs = [Fraction(float(x)) for x in xs]
    if weights is None and all(x.denominator & (x.denominator - 1) == 0 for x in xs):
        scale = max((x.denominator for x in xs), default=1)
        nums = [x.numerator * (scale // x.denominator) for x in xs]
        sums = [0] * (max_degree + 1)
        for n in nums:
            p = 1
            for k in range(max_degree + 1):
                sums[k] += p
                p *= n
        return [Fraction(s, scale**k) for k, s in enumerate(sums)]
    if weights is None:
        weights = [Fraction(1)] * len(xs)
    sums = [Fraction(0)] * (max_degree + 1)
    for x, w in zip(xs, weights):
        p = w
        for k in range(max_degree + 1):
            sums[k] += p
            p *= x
    return sums


def moments_from_samples(points, max_degree: int) -> MarginalSet:
    """Power moments of the counting measure on ``points``.

    ``points`` is an (N, n) array (or a flat array for n = 1). Marginal ``i``
    gets ``y_k = sum_j points[j, i] ** k`` so ``y_0 = N``. Sums are exact and
    rounded once.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
        raise MomentError("need at least one sample point")
    if max_degree < 1:
        raise MomentError("max_degree must be at least 1")
    if not np.all(np.isfinite(pts)):
        raise MomentError("sample coordinates must be finite")
    margs = [
        MomentSequence.from_exact(_power_sums(pts[:, i], None, max_degree), source="samples")
        for i in range(pts.shape[1])
    ]
    return MarginalSet(tuple(margs))


def _double_factorial(n):
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def moments_closed_form(family: str, *params, max_degree: int = DEFAULT_MAX_DEGREE) -> MomentSequence:
    """Exact moments of a named distribution.

    Families and parameters::

        uniform(lo, hi)          beta(p, q)             exponential(rate)
        gaussian(mean, sd)       dirac(c)               finite_discrete(points, weights)

    All but ``finite_discrete`` are probability measures; the discrete family
    has mass ``sum(weights)``.
    """
    if max_degree < 1:
        raise MomentError("max_degree must be at least 1")
    ks = range(max_degree + 1)
    try:
        if family == "uniform":
            lo, hi = (Fraction(float(v)) for v in params)
            if not hi > lo:
                raise MomentError("uniform needs lo < hi")
            ys = [(hi ** (k + 1) - lo ** (k + 1)) / ((k + 1) * (hi - lo)) for k in ks]
        elif family == "beta":
            p, q = (Fraction(float(v)) for v in params)
            if not (p > 0 and q > 0):
                raise MomentError("beta needs p, q > 0")
            ys = [math.prod((p + j) / (p + q + j) for j in range(k)) for k in ks]
            ys = [Fraction(v) for v in ys]
        elif family == "exponential":
            (rate,) = (Fraction(float(v)) for v in params)
            if not rate > 0:
                raise MomentError("exponential needs rate > 0")
            ys = [Fraction(math.factorial(k)) / rate**k for k in ks]
        elif family == "gaussian":
            mean, sd = (Fraction(float(v)) for v in params)
            if sd < 0:
                raise MomentError("gaussian needs sd >= 0")
            ys = [
                sum(
                    math.comb(k, j) * mean ** (k - j) * sd**j * _double_factorial(j - 1)
                    for j in range(0, k + 1, 2)
                )
                for k in ks
            ]
            ys = [Fraction(v) for v in ys]
        elif family == "dirac":
            (c,) = (Fraction(float(v)) for v in params)
            ys = [c**k for k in ks]
        elif family == "finite_discrete":
            points, weights = params
            points = [float(x) for x in points]
            weights = [Fraction(float(w)) for w in weights]
            if not points or len(points) != len(weights):
                raise MomentError("finite_discrete needs matching non-empty points and weights")
            if any(w <= 0 for w in weights) or not all(math.isfinite(x) for x in points):
                raise MomentError("finite_discrete needs positive weights and finite points")
            unit = all(w == 1 for w in weights)
            ys = _power_sums(points, None if unit else weights, max_degree)
        else:
            raise MomentError(f"unknown family {family!r}; expected one of {FAMILIES}")
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MomentError):
            raise
        raise MomentError(f"bad parameters for {family}: {params!r}") from exc
    return MomentSequence.from_exact(ys, source=family)


def parse_family(text: str):
    """Split ``"beta(2,5)"`` into ``("beta", (2, 5))``."""
    m = re.fullmatch(r"\s*([A-Za-z_]+)\s*(?:\((.*)\))?\s*", text)
    if not m:
        raise MomentError(f"cannot parse family {text!r}")
    name, args = m.group(1), m.group(2)
    if not args or not args.strip():
        return name, ()
    try:
        params = ast.literal_eval(f"({args},)")
    except (ValueError, SyntaxError) as exc:
        raise MomentError(f"cannot parse parameters of {text!r}") from exc
    return name, tuple(params)


def affine_transform(y, shift: float, scale: float) -> MomentSequence:
    """Moments of ``z = (x - shift) / scale``.

    Computed exactly in rationals; support endpoints map as ``(a - shift) / scale``.
    """
    y = as_moments(y)
    if not scale > 0:
        raise MomentError(f"scale must be positive, got {scale!r}")
    c = Fraction(float(shift))
    s = Fraction(float(scale))
    ys = y.rational()
    out = []
    for k in range(len(ys)):
        acc = sum(math.comb(k, j) * (-c) ** (k - j) * ys[j] for j in range(k + 1))
        out.append(Fraction(acc) / s**k)
    return MomentSequence.from_exact(out, source=y.source)


def natural_frame(y, floor=None):
    """Centering shift and spread scale used to precondition Hankel matrices.

    ``scale = sqrt(max(var, floor))`` where ``var`` is the normalized second
    central moment, computed exactly.
    """
    y = as_moments(y)
    ys = y.rational()
    mean = ys[1] / ys[0]
    shift = float(mean)
    if len(ys) < 3:
        return shift, 1.0
    var = float(ys[2] / ys[0] - mean * mean)
    if floor is None:
        floor = (1e-8 * max(1.0, abs(shift))) ** 2
    return shift, math.sqrt(max(var, floor))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    max_valid_level: int  # -1 when even y_0 fails
    max_level: int
    min_eigenvalues: tuple
    violation_level: int | None
    tol: float

    def summary(self) -> str:
        if self.valid:
            return f"valid through d={self.max_valid_level}"
        return (
            f"violation at d={self.violation_level} "
            f"(min eigenvalue {self.min_eigenvalues[self.violation_level]:.3e} < -{self.tol:.3e}); "
            f"valid through d={self.max_valid_level}"
        )


def default_validation_tol(y) -> float:
    y = as_moments(y)
    return 1e-10 * float(np.max(np.abs(y.values)))


def validate(y, tol: float | None = None) -> ValidationReport:
    """Check ``H_d(y) >= -tol * I`` for every level the sequence supports."""
    vals = np.asarray(y.values if isinstance(y, MomentSequence) else y, dtype=float)
    if tol is None:
        tol = 1e-10 * float(np.max(np.abs(vals)))
    max_level = (vals.size - 1) // 2
    idx = np.add.outer(np.arange(max_level + 1), np.arange(max_level + 1))
    mins = []
    violation = None
    for d in range(max_level + 1):
        lam = float(np.linalg.eigvalsh(vals[idx[: d + 1, : d + 1]])[0])
        mins.append(lam)
        if violation is None and lam < -tol:
            violation = d
    best = max_level if violation is None else violation - 1
    return ValidationReport(violation is None, best, max_level, tuple(mins), violation, tol)


def load_moments_json(path) -> MarginalSet:
    """Read ``{"dims": n, "marginals": [[y_0, ..., y_m], ...]}``."""
    text = Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise MomentError(f"{path}: empty file")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MomentError(f"{path}: invalid JSON ({exc})") from exc
    return moments_from_dict(doc)


def moments_from_dict(doc) -> MarginalSet:
    if not isinstance(doc, dict) or "marginals" not in doc:
        raise MomentError('moment JSON needs a "marginals" list')
    margs = doc["marginals"]
    if not isinstance(margs, list) or not margs:
        raise MomentError('"marginals" must be a non-empty list')
    dims = doc.get("dims", len(margs))
    if dims != len(margs):
        raise MomentError(f'"dims" is {dims} but {len(margs)} marginals were given')
    try:
        seqs = [MomentSequence(np.asarray(m, dtype=float)) for m in margs]
    except (TypeError, ValueError) as exc:
        if isinstance(exc, MomentError):
            raise
        raise MomentError(f"non-numeric moments: {exc}") from exc
    return MarginalSet(tuple(seqs))


def read_samples_csv(path) -> np.ndarray:
    """Numeric CSV, one point per row; a non-numeric first row is a header."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise MomentError(f"{path}: no sample rows")

    def _floats(row):
        return [float(c) for c in row]

    try:
        _floats(rows[0])
    except ValueError:
        rows = rows[1:]
    if not rows:
        raise MomentError(f"{path}: header but no sample rows")
    try:
        data = [_floats(r) for r in rows]
    except ValueError as exc:
        raise MomentError(f"{path}: non-numeric sample value ({exc})") from exc
    if len({len(r) for r in data}) != 1:
        raise MomentError(f"{path}: rows have different column counts")
    return np.array(data, dtype=float)
