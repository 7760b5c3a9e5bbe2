"""Orthogonal-polynomial oracle: recurrence coefficients and Gauss nodes from moments.

The monic orthogonal polynomials satisfy
``p_{k+1}(x) = (x - alpha_k) p_k(x) - beta_k p_{k-1}(x)`` with
``beta_0 = y_0``. The coefficients come from Chebyshev's algorithm run on the
centered and scaled moments; the zeros of ``p_d`` are the eigenvalues of
the symmetric tridiagonal Jacobi matrix. The extreme zeros of ``p_{d+1}``
coincide with the level-``d`` endpoint estimates of the hierarchy, reached
here without any semidefinite test.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from .errors import BreakdownError, InsufficientMomentsError, MomentError
from .ingest import as_moments

BREAKDOWN_TOL = Fraction(1, 10**13)


@dataclass(frozen=True)
class Recurrence:
    alphas: np.ndarray
    betas: np.ndarray  # betas[0] is the mass y_0
    breakdown: int | None = None  # number of atoms when the recurrence stopped early

    @property
    def order(self) -> int:
        """How many (alpha, beta) pairs are available."""
        return len(self.alphas)


def _chebyshev(mom, n):
    """Chebyshev's algorithm: first ``n`` recurrence pairs from ``mom[0:2n]``.

    Runs in exact rational arithmetic on whatever rationals it is given and
    stops early, returning the breakdown index, once ``beta_k`` falls below
    ``BREAKDOWN_TOL * beta_0``.
    """
    mom = [Fraction(v) for v in mom[: 2 * n]]
    alpha = [mom[1] / mom[0]]
    beta = [mom[0]]
    width = 2 * n
    sig_prev = [Fraction(0)] * width
    sig = list(mom)
    for k in range(1, n):
        nxt = [Fraction(0)] * width
        for l in range(k, width - k):
            nxt[l] = sig[l + 1] - alpha[k - 1] * sig[l] - beta[k - 1] * sig_prev[l]
        beta_k = nxt[k] / sig[k - 1]
        if not beta_k > BREAKDOWN_TOL * beta[0]:
            return _floats(alpha), _floats(beta), k
        beta.append(beta_k)
        alpha.append(nxt[k + 1] / nxt[k] - sig[k] / sig[k - 1])
        sig_prev, sig = sig, nxt
    return _floats(alpha), _floats(beta), None


def _floats(xs):
    return np.array([float(x) for x in xs])


def moments_to_recurrence(y, d: int) -> Recurrence:
    """First ``d`` recurrence pairs ``(alpha_k, beta_k)``, ``k < d``.

    Needs moments through degree ``2d - 1``. Computed in the centered, scaled
    frame and mapped back (``alpha -> shift + scale * alpha``,
    ``beta_k -> scale**2 * beta_k`` for ``k >= 1``). If the sequence has
    fewer than ``d`` atoms the result is shorter and ``breakdown`` says how
    many atoms were found.
    """
    y = as_moments(y)
    if d < 1:
        raise MomentError("recurrence order must be at least 1")
    if 2 * d - 1 > y.degree:
        raise InsufficientMomentsError(2 * d - 1, y.degree)
    shift, scale, z = y.centered
    alpha, beta, brk = _chebyshev(z.rational(), d)
    alpha = shift + scale * alpha
    beta = beta.copy()
    beta[1:] *= scale * scale
    return Recurrence(alpha, beta, brk)


def gauss_nodes(rec: Recurrence, d: int) -> np.ndarray:
    """Zeros of the degree-``d`` orthogonal polynomial, ascending."""
    if d < 1:
        raise MomentError("node count must be at least 1")
    if rec.breakdown is not None and d > rec.breakdown:
        raise BreakdownError(rec.breakdown, d)
    if d > rec.order:
        raise MomentError(f"recurrence has only {rec.order} coefficients, {d} needed")
    diag = np.asarray(rec.alphas[:d], dtype=float)
    off = np.sqrt(np.asarray(rec.betas[1:d], dtype=float))
    if d == 1:
        return diag.copy()
    nodes = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    return np.sort(nodes)


def extreme_nodes(y, d: int):
    """``(min, max)`` of the ``d + 1`` Gauss nodes: the oracle for level ``d``."""
    rec = moments_to_recurrence(y, d + 1)
    nodes = gauss_nodes(rec, d + 1)
    return float(nodes[0]), float(nodes[-1])


def orthogonality_residual(y, rec: Recurrence) -> float:
    """Largest normalized inner product between distinct recurrence polynomials.

    Inner products are moment quadratic forms ``<p_j, H p_k>`` in the monomial
    basis of the centered frame, so only degrees with enough moments are used.
    """
    shift, scale, z = as_moments(y).centered
    alpha = (np.asarray(rec.alphas) - shift) / scale
    beta = np.asarray(rec.betas, dtype=float).copy()
    beta[1:] /= scale * scale
    n = len(alpha)
    top = min(n, z.degree // 2)
    # coefficient vectors of p_0..p_top in increasing-degree monomial basis
    polys = [np.zeros(top + 1) for _ in range(top + 1)]
    polys[0][0] = 1.0
    for k in range(top):
        nxt = np.zeros(top + 1)
        nxt[1:] += polys[k][:-1]
        nxt -= alpha[k] * polys[k]
        if k > 0:
            nxt -= beta[k] * polys[k - 1]
        polys[k + 1] = nxt
    idx = np.add.outer(np.arange(top + 1), np.arange(top + 1))
    H = z.values[idx]
    P = np.array(polys)
    G = P @ H @ P.T
    norms = np.sqrt(np.abs(np.diag(G)))
    G = G / np.outer(norms, norms)
    np.fill_diagonal(G, 0.0)
    return float(np.max(np.abs(G)))
