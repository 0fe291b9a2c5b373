import csv
import io
import json
import math
import random
from math import comb

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import jn_zeros

from specbuckle import ball
from specbuckle.errors import DomainError, RangeError, ResourceError
from specbuckle.spectrum import Kind


def _harmonic_dim(l, d):
    # coefficient of t^l in (1 + t) / (1 - t)^(d - 1), expanded term by term
    if d == 1:
        return 1 if l in (0, 1) else 0
    return sum(comb(k + d - 2, d - 2) for k in (l, l - 1) if k >= 0)


@pytest.mark.parametrize("d", [1, 2, 3, 4, 5, 7, 12])
def test_multiplicity_generating_function(d):
    for l in range(0, 40):
        assert ball.multiplicity(l, d) == _harmonic_dim(l, d)


def test_multiplicity_small_cases():
    assert [ball.multiplicity(l, 2) for l in range(5)] == [1, 2, 2, 2, 2]
    assert [ball.multiplicity(l, 3) for l in range(5)] == [1, 3, 5, 7, 9]
    assert ball.multiplicity(2, 4) == 9


def test_multiplicity_errors():
    with pytest.raises(DomainError):
        ball.multiplicity(-1, 3)
    with pytest.raises(RangeError):
        ball.multiplicity(10**6, 40)


def test_first_eigenvalues_disc():
    # buckling uses J_1 zeros, Dirichlet J_0 zeros
    assert ball.buckling_eigenvalue(2, 0, 1) == pytest.approx(jn_zeros(1, 1)[0] ** 2, rel=1e-15)
    assert ball.dirichlet_eigenvalue(2, 0, 1) == pytest.approx(jn_zeros(0, 1)[0] ** 2, rel=1e-15)
    assert ball.buckling_eigenvalue(2, 0, 1) == pytest.approx(14.681970642123892, rel=1e-15)


def test_first_buckling_eigenvalue_3ball_mpmath():
    ref = float(mpmath.besseljzero(mpmath.mpf(3) / 2, 1)) ** 2
    assert ball.buckling_eigenvalue(3, 0, 1) == pytest.approx(ref, rel=1e-15)


@given(st.integers(2, 6), st.integers(0, 30), st.integers(1, 10))
def test_sigma_equals_shifted_lambda(d, l, n):
    assert ball.buckling_eigenvalue(d, l, n) == ball.dirichlet_eigenvalue(d, l + 1, n)


def _brute_count(d, kind, z):
    # every (l, n) from mpmath zeros, weighted by the generating-function multiplicity
    total = 0
    shift = 0 if kind is Kind.BUCKLING else -1
    for l in range(0, int(math.sqrt(z)) + 2):
        nu = mpmath.mpf(2 * l + 2 * shift + d) / 2
        n = 1
        while True:
            x = mpmath.besseljzero(nu, n)
            if x * x >= z:
                break
            total += _harmonic_dim(l, d)
            n += 1
        if n == 1:
            break
    return total


@pytest.mark.parametrize("d,kind,z", [(2, Kind.BUCKLING, 300.0), (2, Kind.LAPLACIAN, 300.0),
                                      (3, Kind.BUCKLING, 250.0), (3, Kind.LAPLACIAN, 250.0),
                                      (4, Kind.BUCKLING, 150.0)])
def test_counting_against_brute_force(d, kind, z):
    assert ball.counting(d, kind, z) == _brute_count(d, kind, z)


def test_counting_is_strict():
    s1 = ball.buckling_eigenvalue(2, 0, 1)
    assert ball.counting(2, Kind.BUCKLING, s1) == 0
    assert ball.counting(2, Kind.BUCKLING, math.nextafter(s1, math.inf)) == 1


def test_enumerate_sorted_and_consistent():
    bs = ball.enumerate_modes(3, Kind.BUCKLING, 2000.0)
    assert np.all(np.diff(bs.values) >= 0)
    assert bs.count == ball.counting(3, Kind.BUCKLING, 2000.0)
    assert np.all(bs.values < 2000.0)
    m = bs.modes[0]
    assert (m.l, m.n, m.multiplicity) == (0, 1, 1)
    spec = bs.to_spectrum()
    assert spec.total == bs.count


def test_enumerate_resource_cap():
    with pytest.raises(ResourceError):
        ball.enumerate_modes(2, Kind.BUCKLING, 1e6, max_modes=1000)


def test_enumerate_bad_args():
    with pytest.raises(DomainError):
        ball.enumerate_modes(1, Kind.BUCKLING, 10.0)
    with pytest.raises(DomainError):
        ball.enumerate_modes(2, Kind.BUCKLING, -1.0)


def test_write_csv_and_summary():
    bs = ball.enumerate_modes(2, Kind.BUCKLING, 60.0)
    buf = io.StringIO()
    bs.write_csv(buf)
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
    assert list(rows[0]) == ["d", "kind", "l", "n", "value", "multiplicity"]
    assert float(rows[0]["value"]) == bs.values[0]
    assert sum(int(r["multiplicity"]) for r in rows) == bs.count
    summ = json.loads(bs.summary_json())
    assert summ["count"] == bs.count and len(summ["first_10_values"]) == min(10, len(bs))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 5), st.floats(1.0, 1e4))
def test_counting_identity_property(d, z):
    assert ball.counting_identity_gap(d, z) == 0


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 1e4))
def test_disc_identity_property(z):
    assert ball.disc_identity_gap(z) == 0
    assert ball.counting_identity_gap(2, z) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 5), st.floats(10.0, 1e4))
def test_cross_dimension_defect_signs(d, z):
    rep = ball.cross_dimension_defect(d, z)
    assert rep.within_one
    assert rep.signs <= {-1, 0}
    # N^B_d - N^D_d + N^D_{d-1} = -defect
    nb = ball.counting(d, Kind.BUCKLING, z)
    nd = ball.counting(d, Kind.LAPLACIAN, z)
    nd1 = ball.counting(d - 1, Kind.LAPLACIAN, z)
    assert nb - nd + nd1 == -rep.total


def test_dirichlet_two_term_disc():
    # two-term Weyl for the disc: z/4 - sqrt(z)/2
    z = np.array([1e2, 1e4])
    assert np.allclose(ball.dirichlet_two_term(2, z), z / 4 - np.sqrt(z) / 2, rtol=1e-14)
    n = ball.counting(2, Kind.LAPLACIAN, 1e5)
    assert abs(n - ball.dirichlet_two_term(2, 1e5)) < 3 * (1e5) ** 0.25 * 10


@pytest.mark.parametrize("d,l,n", [(2, 0, 1), (2, 3, 4), (3, 0, 2), (3, 5, 3), (5, 2, 6)])
def test_radial_residual(d, l, n):
    res = ball.radial_residual(d, l, n)
    assert abs(res.value_at_1) <= 1e-12 * res.scale
    k = math.sqrt(ball.buckling_eigenvalue(d, l, n))
    assert abs(res.slope_at_1) <= 1e-12 * k * res.scale
    assert res.sign_changes == n - 1


def test_unit_ball_geometry():
    vol, surf = ball.unit_ball_geometry(3)
    assert vol == pytest.approx(4 * math.pi / 3) and surf == pytest.approx(4 * math.pi)


def test_random_grid_reproducible():
    rng = random.Random(7)
    zs = [rng.uniform(1, 1e4) for _ in range(5)]
    assert [ball.counting(3, Kind.BUCKLING, z) for z in zs] == [ball.counting(3, "buckling", z) for z in zs]
