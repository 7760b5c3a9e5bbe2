"""Reference values computed without the package's own solvers."""
import numpy as np
from numpy.polynomial import hermite_e, legendre
from scipy import special

from momentbox.ingest import moments_closed_form


def legendre_nodes_01(n):
    """n-point Gauss-Legendre nodes mapped to [0, 1]."""
    t, _ = legendre.leggauss(n)
    return np.sort((t + 1.0) / 2.0)


def hermite_nodes(n):
    """Gauss nodes of the standard normal weight."""
    t, _ = hermite_e.hermegauss(n)
    return np.sort(t)


def beta_nodes(n, p, q):
    """Gauss nodes of the Beta(p, q) density on [0, 1] via Gauss-Jacobi."""
    t, _ = special.roots_jacobi(n, q - 1.0, p - 1.0)
    return np.sort((t + 1.0) / 2.0)


def laguerre_nodes(n):
    """Gauss nodes of exp(-x) on [0, inf)."""
    t, _ = special.roots_laguerre(n)
    return np.sort(t)


def random_atoms(rng, k, lo=-5.0, hi=5.0, min_gap=0.0):
    """k distinct atoms in [lo, hi] at least ``min_gap`` apart, positive weights."""
    while True:
        x = np.sort(rng.uniform(lo, hi, size=k))
        if k == 1 or np.min(np.diff(x)) > min_gap:
            break
    w = rng.uniform(0.05, 1.0, size=k)
    return x, w


def discrete(x, w, max_degree):
    return moments_closed_form(
        "finite_discrete", [float(v) for v in x], [float(v) for v in w], max_degree=max_degree
    )
