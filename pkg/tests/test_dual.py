import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import Polynomial
from oracles import discrete, random_atoms

from momentbox.dual import dual_value, extract_certificate, verify_slackness
from momentbox.errors import CertificateUnavailable, MomentError
from momentbox.hierarchy import solve_lower, solve_upper
from momentbox.ingest import moments_closed_form

B1 = (1 + 1 / math.sqrt(3)) / 2


def _integrate(poly_coef, y):
    """int p dmu from moments (p in increasing powers of x)."""
    return float(sum(c * y.values[k] for k, c in enumerate(poly_coef)))


def test_uniform_level_one_certificate(uniform01):
    a1, _ = solve_lower(uniform01, 1)
    cert = extract_certificate(uniform01, 1, "lower", a1)
    assert len(cert.kernel_basis) == 1
    assert cert.normalization == pytest.approx(1.0, abs=1e-12)
    assert cert.objective == pytest.approx(a1, abs=1e-12)
    assert cert.slack_residual <= 1e-10
    # sigma is proportional to (x - b_1)^2: its only root is the other Gauss node
    (p,) = cert.basis_in_x()
    assert -p[0] / p[1] == pytest.approx(B1, abs=1e-10)
    # int sigma = 1 and int x sigma = a_1, evaluated from the expanded density
    sigma = cert.sigma
    assert sigma.size == 3
    assert _integrate(sigma, uniform01) == pytest.approx(1.0, abs=1e-12)
    assert _integrate(np.r_[0.0, sigma], uniform01) == pytest.approx(a1, abs=1e-12)


def test_uniform_level_two_objective(uniform01):
    a2, _ = solve_lower(uniform01, 2)
    cert = extract_certificate(uniform01, 2, "lower", a2)
    assert cert.objective == pytest.approx(a2, abs=1e-9)


@pytest.mark.parametrize("family,params", [("uniform", (0, 1)), ("beta", (2, 5)), ("gaussian", (0, 1))])
@pytest.mark.parametrize("d", [1, 3, 6])
def test_zero_gap_both_endpoints(family, params, d):
    y = moments_closed_form(family, *params, max_degree=2 * d + 1)
    for endpoint, solve in (("lower", solve_lower), ("upper", solve_upper)):
        v, _ = solve(y, d)
        cert = extract_certificate(y, d, endpoint, v)
        assert abs(cert.objective - v) <= 1e-8
        assert cert.slack_residual <= 1e-9
        assert cert.normalization == pytest.approx(1.0, abs=1e-10)


def test_kernel_polynomials_vanish_at_other_nodes(uniform01):
    # at level d the kernel polynomial of the lower endpoint has the other
    # d nodes of the (d+1)-point Gauss rule as roots
    d = 3
    a, _ = solve_lower(uniform01, d)
    (p,) = extract_certificate(uniform01, d, "lower", a).basis_in_x()
    roots = np.sort(Polynomial(p).roots().real)
    t, _ = np.polynomial.legendre.leggauss(d + 1)
    nodes = np.sort((t + 1) / 2)
    assert roots == pytest.approx(nodes[1:], abs=1e-8)


def test_perturbed_value_shows_in_residual(uniform01):
    a1, _ = solve_lower(uniform01, 1)
    cert = extract_certificate(uniform01, 1, "lower", a1)
    r = verify_slackness(cert, uniform01, a1 + 0.01)
    assert r == pytest.approx(0.01 * cert.normalization, rel=1e-9)
    assert cert.slack_residual == r


def test_dirac_has_no_certificate():
    y = moments_closed_form("dirac", 2.0, max_degree=5)
    with pytest.raises(CertificateUnavailable):
        extract_certificate(y, 1, "lower", 2.0)


def test_too_few_atoms_has_no_certificate():
    y = moments_closed_form("finite_discrete", [0.0, 1.0], [1.0, 1.0], max_degree=5)
    with pytest.raises(CertificateUnavailable):
        extract_certificate(y, 2, "lower", 0.0)


def test_off_boundary_value_is_rejected(uniform01):
    with pytest.raises(CertificateUnavailable):
        extract_certificate(uniform01, 2, "lower", -0.5)


def test_unknown_endpoint(uniform01):
    with pytest.raises(MomentError):
        extract_certificate(uniform01, 1, "middle", 0.2)


def test_serialization_fields(beta25):
    a, _ = solve_lower(beta25, 2)
    doc = extract_certificate(beta25, 2, "lower", a).to_dict()
    for key in ("level", "endpoint", "sos_basis", "objective", "residual"):
        assert key in doc
    assert len(doc["sos_basis"][0]) == 3
    assert len(doc["sigma"]) == 5


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), d=st.integers(1, 4))
def test_weak_duality(seed, d):
    rng = np.random.default_rng(seed)
    y = moments_closed_form("beta", 2, 5, max_degree=2 * d + 1)
    a, _ = solve_lower(y, d)
    b, _ = solve_upper(y, d)
    G = rng.normal(size=(d + 1, d + 1))
    Z = G @ G.T
    v = dual_value(y, Z, d)
    assert v >= a - 1e-9
    assert v <= b + 1e-9


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(3, 7))
def test_certificates_on_random_atoms(seed, k):
    rng = np.random.default_rng(seed)
    x, w = random_atoms(rng, k, min_gap=0.05)
    d = k - 1
    y = discrete(x, w, 2 * d + 1)
    for endpoint, solve in (("lower", solve_lower), ("upper", solve_upper)):
        v, _ = solve(y, d)
        cert = extract_certificate(y, d, endpoint, v)
        assert abs(cert.objective - v) <= 1e-8
        assert cert.slack_residual <= 1e-9
