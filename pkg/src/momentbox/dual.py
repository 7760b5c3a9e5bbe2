"""Sum-of-squares certificates for the endpoint estimates.

The dual of the left-endpoint program looks for a sum of squares ``sigma`` of
degree ``2d`` with ``int sigma dmu = 1`` minimizing ``int x sigma dmu``. At the
optimum every square root factor of ``sigma`` lies in the kernel of the
optimal localizing matrix, so the certificate is read off that kernel. All
integrals are quadratic forms in moment matrices.

The kernel is computed in the centered frame ``z = (x - shift) / scale`` the
hierarchy also uses. ``kernel_basis`` holds coefficient vectors in powers of
``z``; ``basis_in_x`` and ``sigma`` give the same polynomials in powers of
``x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import CertificateUnavailable, MomentError
from .hankel import (
    exact_form,
    exactly_positive_definite,
    localizing_matrix,
    moment_matrix,
)
from .hierarchy import whitened_pencil
from .ingest import affine_transform, as_moments


@dataclass
class SosCertificate:
    level: int
    endpoint: str  # "lower" | "upper"
    kernel_basis: list  # coefficient vectors in powers of z = (x - shift) / scale
    shift: float
    scale: float
    normalization: float  # sum_l <p_l, H_d(y) p_l>
    objective: float  # int x sigma dmu
    slack_residual: float

    def basis_in_x(self):
        """Kernel polynomials as coefficient vectors in powers of ``x``."""
        to_z = Polynomial([-self.shift / self.scale, 1.0 / self.scale])
        out = []
        for q in self.kernel_basis:
            p = Polynomial(q)(to_z).coef
            out.append(np.pad(p, (0, self.level + 1 - p.size)))
        return out

    @property
    def sigma(self) -> np.ndarray:
        """Coefficients of ``sigma(x) = sum_l p_l(x)^2`` (degree <= 2d, increasing)."""
        total = Polynomial([0.0])
        for p in self.basis_in_x():
            total = total + Polynomial(p) ** 2
        coef = total.coef
        return np.pad(coef, (0, 2 * self.level + 1 - coef.size))

    def to_dict(self):
        return {
            "level": self.level,
            "endpoint": self.endpoint,
            "sos_basis": [p.tolist() for p in self.basis_in_x()],
            "centered_sos_basis": [np.asarray(q).tolist() for q in self.kernel_basis],
            "frame": {"shift": self.shift, "scale": self.scale},
            "sigma": self.sigma.tolist(),
            "normalization": self.normalization,
            "objective": self.objective,
            "residual": self.slack_residual,
        }


def _frame(y):
    return as_moments(y).centered


def _endpoint_theta(endpoint, t):
    if endpoint == "lower":
        return (-t, 1.0)
    if endpoint == "upper":
        return (t, -1.0)
    raise MomentError(f"endpoint must be 'lower' or 'upper', got {endpoint!r}")


def extract_certificate(y, d: int, endpoint: str, solved_value: float) -> SosCertificate:
    """Dual certificate attaining ``solved_value`` at level ``d``.

    Raises ``CertificateUnavailable`` if ``H_d(y)`` is not positive definite
    or if ``solved_value`` is not on the PSD boundary (empty numeric kernel).
    """
    y = as_moments(y)
    _endpoint_theta(endpoint, 0.0)  # rejects unknown endpoints early
    shift, scale, z = _frame(y)
    if not exactly_positive_definite(z, d):
        raise CertificateUnavailable(
            f"H_{d}(y) is not positive definite; no certificate at level {d}"
        )
    t = (solved_value - shift) / scale
    # Exact congruence to a pencil with H_d(z) close to I; the kernel of the
    # transformed matrix maps back through W^T.
    A, B, W = whitened_pencil(z, d)
    M = A - t * B if endpoint == "lower" else t * B - A
    lam, vecs = np.linalg.eigh(0.5 * (M + M.T))
    cutoff = max(1e-10, 1e-12 * float(np.max(np.abs(lam))))
    kernel = W.T @ vecs[:, lam <= cutoff]
    if kernel.shape[1] == 0:
        raise CertificateUnavailable(
            f"no kernel at {solved_value!r} (smallest eigenvalue {lam[0]:.3e}); "
            "the value is not on the PSD boundary"
        )
    total = sum(exact_form(z, u) for u in kernel.T)
    basis = [u / math.sqrt(total) for u in kernel.T]
    norm = float(sum(exact_form(z, q) for q in basis))
    first = sum(exact_form(z, q, (0, 1)) for q in basis)
    obj = shift * norm + scale * float(first)
    cert = SosCertificate(d, endpoint, basis, shift, scale, norm, obj, math.nan)
    verify_slackness(cert, y, solved_value)
    return cert


def verify_slackness(cert: SosCertificate, y, solved_value: float) -> float:
    """``|int (x - a_d) sigma dmu|`` (or ``|int (b_d - x) sigma dmu|``), from moments only.

    Evaluated exactly in the certificate's frame. Stores the residual on
    ``cert`` and returns it.
    """
    y = as_moments(y)
    shift, scale, z = y.centered
    if (shift, scale) != (cert.shift, cert.scale):
        z = affine_transform(y, cert.shift, cert.scale)
    t = (solved_value - cert.shift) / cert.scale
    theta = _endpoint_theta(cert.endpoint, t)
    form = sum(exact_form(z, q, theta) for q in cert.kernel_basis)
    residual = abs(cert.scale * float(form))
    cert.slack_residual = residual
    return residual


def dual_value(y, Z, d: int) -> float:
    """``int x sigma dmu / int sigma dmu`` for the SOS density encoded by ``Z >= 0``.

    ``Z`` is a Gram matrix in powers of the centered variable. Any such value
    bounds the left endpoint estimate from above and the right one from
    below (weak duality).
    """
    Z = np.asarray(Z, dtype=float)
    shift, scale, z = _frame(y)
    B = moment_matrix(z, d)
    A = localizing_matrix(z, (0.0, 1.0), d)
    return shift + scale * float(np.sum(A * Z) / np.sum(B * Z))
