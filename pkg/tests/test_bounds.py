import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentbox.bounds import closed_form_bounds
from momentbox.errors import InsufficientMomentsError, MomentError
from momentbox.hierarchy import solve_lower, solve_upper
from momentbox.ingest import MomentSequence, moments_closed_form

A1 = (1 - 1 / math.sqrt(3)) / 2
B1 = (1 + 1 / math.sqrt(3)) / 2

# (family, params, support)
FIXTURES = [
    ("uniform", (0, 1), (0.0, 1.0)),
    ("uniform", (-2, 5), (-2.0, 5.0)),
    ("beta", (2, 5), (0.0, 1.0)),
    ("beta", (0.5, 0.5), (0.0, 1.0)),
    ("exponential", (1,), (0.0, math.inf)),
    ("gaussian", (0, 1), (-math.inf, math.inf)),
    ("dirac", (2,), (2.0, 2.0)),
    ("finite_discrete", ([-1, 0.5, 3], [1, 2, 1]), (-1.0, 3.0)),
]


def test_uniform_closed_forms(uniform01):
    cf = closed_form_bounds(uniform01)
    assert cf.ratio_a_upper == 0.5
    assert cf.ratio_b_lower == 0.75
    assert cf.b3_b4_applicable
    assert cf.a_upper == pytest.approx(A1, abs=1e-15)
    assert cf.b_lower == pytest.approx(B1, abs=1e-15)


def test_dirac_closed_forms():
    c = 2.0
    cf = closed_form_bounds(moments_closed_form("dirac", c, max_degree=3))
    assert not cf.b3_b4_applicable
    assert cf.a_upper == c and cf.b_lower == c


@pytest.mark.parametrize("family,params,support", FIXTURES)
def test_bounds_are_valid(family, params, support):
    cf = closed_form_bounds(moments_closed_form(family, *params, max_degree=3))
    lo, hi = support
    assert lo <= cf.a_upper + 1e-12
    assert hi >= cf.b_lower - 1e-12


@pytest.mark.parametrize("family,params,support", FIXTURES[:6])
def test_quadratic_tightening_matches_level_one(family, params, support):
    y = moments_closed_form(family, *params, max_degree=3)
    cf = closed_form_bounds(y)
    assert cf.b3_b4_applicable
    a1, _ = solve_lower(y, 1)
    b1, _ = solve_upper(y, 1)
    assert cf.a_upper == pytest.approx(a1, rel=1e-10, abs=1e-12)
    assert cf.b_lower == pytest.approx(b1, rel=1e-10, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    atoms=st.lists(st.floats(-10, 10), min_size=1, max_size=8),
    weights=st.lists(st.floats(0.01, 5), min_size=8, max_size=8),
)
def test_bounds_valid_on_random_atoms(atoms, weights):
    y = moments_closed_form("finite_discrete", atoms, weights[: len(atoms)], max_degree=3)
    cf = closed_form_bounds(y)
    span = max(1.0, max(abs(a) for a in atoms))
    assert min(atoms) <= cf.a_upper + 1e-9 * span
    assert max(atoms) >= cf.b_lower - 1e-9 * span


@settings(max_examples=60, deadline=None)
@given(atoms=st.lists(st.floats(0.01, 10), min_size=1, max_size=5))
def test_symmetric_measure_gives_symmetric_bounds(atoms):
    pts = [-a for a in atoms] + list(atoms)
    y = moments_closed_form("finite_discrete", pts, [1.0] * len(pts), max_degree=3)
    assert y.values[1] == 0.0 and y.values[3] == 0.0
    cf = closed_form_bounds(y)
    assert cf.a_upper == -cf.b_lower


def test_gaussian_symmetry(std_normal):
    cf = closed_form_bounds(std_normal)
    assert cf.a_upper == -cf.b_lower == -1.0


def test_closed_form_preconditions():
    with pytest.raises(InsufficientMomentsError):
        closed_form_bounds(MomentSequence([1.0, 0.0, 1.0]))
    with pytest.raises(MomentError):
        closed_form_bounds(MomentSequence([1.0, 0.0, -1.0, 0.0]))
