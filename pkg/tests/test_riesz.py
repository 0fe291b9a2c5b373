import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specbuckle import interval, riesz
from specbuckle.errors import DomainError, EnumerationRangeError, InsufficientSpectrumError
from specbuckle.spectrum import Kind, Spectrum

R = riesz.Relation


# --- model constants --------------------------------------------------------

def test_disc_constants():
    m = riesz.WeylModel.unit_ball(2)
    assert m.c0 == pytest.approx(0.25, rel=1e-15)
    assert m.c1 == pytest.approx(0.5 + 2 / math.pi, rel=1e-15)
    assert m.sum_constant == pytest.approx(4 * math.pi, rel=1e-15)


def test_interval_constants():
    m = riesz.WeylModel.interval()
    assert m.c0 == pytest.approx(1 / math.pi, rel=1e-15)
    assert m.c1 == pytest.approx(1.5, rel=1e-15)
    assert m.sum_constant == pytest.approx(math.pi**2, rel=1e-15)
    # R_1 ~ (2 / (3 pi)) z^{3/2}
    assert m.riesz_leading(1.0) == pytest.approx(2 / (3 * math.pi), rel=1e-14)


@given(st.integers(1, 8), st.floats(0.5, 4.0))
def test_riesz_leading_matches_two_over_d_plus_two(d, p):
    m = riesz.WeylModel.unit_ball(d)
    assert m.riesz_leading(1.0) == pytest.approx(2 / (d + 2) * m.c0, rel=1e-13)
    # Gamma recursion: R_{p+1} coefficient = R_p coefficient (p+1) / (p + 1 + d/2)
    assert m.riesz_leading(p + 1) == pytest.approx(m.riesz_leading(p) * (p + 1) / (p + 1 + d / 2), rel=1e-12)


def test_model_errors():
    with pytest.raises(DomainError):
        riesz.WeylModel(0, 1.0)
    with pytest.raises(DomainError):
        riesz.WeylModel(2, -1.0)


# --- Riesz means on synthetic spectra -----------------------------------------

def _exact_riesz(vals, mults, p, z):
    return sum(m * (Fraction(z) - Fraction(v)) ** p for v, m in zip(vals, mults) if v < z)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 500), min_size=1, max_size=40, unique=True),
       st.integers(1, 3), st.integers(1, 600), st.integers(1, 3))
def test_riesz_mean_exact(vals, mult, z, p):
    vals = sorted(vals)
    mults = [mult] * len(vals)
    spec = Spectrum(np.array(vals, float), np.array(mults), 1000.0)
    ref = float(_exact_riesz(vals, mults, p, z))
    assert riesz.riesz_mean(spec, p, z) == pytest.approx(ref, rel=1e-14, abs=1e-9)
    if p in (1, 2):
        assert riesz.riesz_mean_fast(spec, p, z) == pytest.approx(ref, rel=1e-12, abs=1e-6)


def test_riesz_mean_array_and_errors():
    spec = Spectrum(np.array([1.0, 2.0]), np.array([1, 2]), 10.0)
    assert np.allclose(riesz.riesz_mean(spec, 1, [0.5, 3.0]), [0.0, 2.0 + 2.0])
    with pytest.raises(DomainError):
        riesz.riesz_mean(spec, 0, 1.0)
    with pytest.raises(EnumerationRangeError):
        riesz.riesz_mean(spec, 1, 11.0)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_quadrature_route_matches_direct_sum(p):
    spec = interval.interval_spectrum(Kind.BUCKLING, 2e4)
    for z in (50.0, 777.7, 1.9e4):
        assert riesz.riesz_by_quadrature(spec, p, z) == pytest.approx(riesz.riesz_mean(spec, p, z), rel=1e-9)


def test_r2_quadrature_matches_direct_sum():
    spec = interval.interval_spectrum(Kind.BUCKLING, 2e4)
    for z in (100.0, 1.5e4):
        assert riesz.r2_by_quadrature(spec, z) == pytest.approx(riesz.riesz_mean(spec, 2, z), rel=1e-9)


def test_legendre_transform_closed_form_vs_numeric(disc_buckling_small):
    spec = disc_buckling_small
    grid = np.concatenate([spec.values, spec.values + 1e-9])
    grid = grid[grid < spec.z_max]
    for w in (0.0, 0.5, 1.0, 2.7, 10.0, 123.4):
        assert riesz.legendre_transform_R1(spec, w) == pytest.approx(
            riesz.legendre_numeric(spec, w, grid), rel=1e-12, abs=1e-9)


def test_legendre_dual_disc(disc_buckling_small):
    spec = disc_buckling_small
    m = riesz.WeylModel.unit_ball(2)
    for w in np.linspace(0.25, spec.total - 1, 60):
        assert riesz.legendre_dual_check(spec, m, w).passed


# --- inequality checks ------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 1e4))
def test_bly_disc_property(disc_buckling_small, z):
    m = riesz.WeylModel.unit_ball(2)
    assert riesz.bly_upper_check(disc_buckling_small, m, z).passed


@settings(max_examples=100, deadline=None)
@given(st.floats(1.0, 1e6))
def test_bly_interval_property(z):
    spec = interval.interval_spectrum(Kind.BUCKLING, 1e6 + 1)
    assert riesz.bly_upper_check(spec, riesz.WeylModel.interval(), z).passed


def test_sum_lower_interval_all_k():
    spec = interval.interval_spectrum(Kind.BUCKLING, 1e7)
    m = riesz.WeylModel.interval()
    assert all(riesz.sum_lower_check(spec, m, k).passed for k in range(1, spec.total + 1))
    with pytest.raises(InsufficientSpectrumError):
        riesz.sum_lower_check(spec, m, spec.total + 1)


def test_dyadic_grid():
    g = riesz.dyadic_grid(1.0, 1e3)
    assert g.size == 10 and g[0] == pytest.approx(1 + riesz.GRID_OFFSET)
    assert np.all(g <= 1e3)


@pytest.fixture(scope="module")
def spectra_1d():
    n = 520
    ones = lambda k: np.ones(k, dtype=np.int64)  # noqa: E731
    sig = Spectrum(interval.first_n(Kind.BUCKLING, n), ones(n), math.inf)
    lam = Spectrum(interval.first_n(Kind.LAPLACIAN, n + 1), ones(n + 1), math.inf)
    big = Spectrum(interval.first_n(Kind.BILAPLACIAN, n), ones(n), math.inf)
    return sig, lam, big


def test_payne_family_1d(spectra_1d):
    sig, lam, big = spectra_1d
    assert riesz.chain_and_payne_checks(sig, lam, big, R.PAYNE).passed
    assert riesz.chain_and_payne_checks(sig, lam, big, R.PAYNE2).passed
    for j in range(1, 501):
        assert riesz.chain_and_payne_checks(sig, lam, big, R.CHAIN, j, strict=True).passed
        assert riesz.chain_and_payne_checks(sig, lam, big, R.STRICT_PRODUCT, j).passed
        assert riesz.chain_and_payne_checks(sig, lam, big, R.GENERALIZED_PAYNE, j).passed
        assert riesz.chain_and_payne_checks(sig, lam, big, R.SHIFTED_DIRICHLET, j).passed
        assert riesz.chain_and_payne_checks(sig, lam, big, R.DIRICHLET_BELOW_BUCKLING, j).passed


def test_partial_sums_equal_at_one_strict_after(spectra_1d):
    sig, lam, big = spectra_1d
    first = riesz.chain_and_payne_checks(sig, lam, big, R.PARTIAL_SUMS, 1, strict=True)
    # sigma_1 = 4 pi^2 = lambda_2 exactly
    assert first.margin == 0.0 and not first.passed
    assert riesz.chain_and_payne_checks(sig, lam, big, R.PARTIAL_SUMS, 1).passed
    for k in range(2, 501):
        assert riesz.chain_and_payne_checks(sig, lam, big, R.PARTIAL_SUMS, k, strict=True).passed


def test_relation_needs_lambda(spectra_1d):
    sig, lam, _ = spectra_1d
    with pytest.raises(InsufficientSpectrumError):
        riesz.chain_and_payne_checks(sig, lam, None, R.CHAIN, 1)
    with pytest.raises(DomainError):
        riesz.chain_and_payne_checks(sig, lam, None, "nonsense")


def test_corollaries_1d():
    sig = interval.interval_spectrum(Kind.BUCKLING, 1e6)
    lam = interval.interval_spectrum(Kind.LAPLACIAN, 1e6)
    big = interval.interval_spectrum(Kind.BILAPLACIAN, 1e11)
    for z in (1e2, 1e3, 1e4):
        for k in (1, 5, 25, 100):
            rep = riesz.corollary_checks(sig, lam, big, z, k)
            assert rep.passed, rep.as_dict()
    with pytest.raises(InsufficientSpectrumError):
        riesz.corollary_checks(sig, lam, interval.interval_spectrum(Kind.BILAPLACIAN, 1e6), 1e4, 1)


@pytest.mark.parametrize("lap", [1.0, 2 * math.pi**4])
def test_phi_bound_interval(lap):
    # phi = sin^2(pi x): sup 1, ||phi||^2 = 3/8, ||phi'||^2 = pi^2/2, ||phi''||^2 = 2 pi^4
    spec = interval.interval_spectrum(Kind.BUCKLING, 1e6)
    m = riesz.WeylModel.interval()
    for z in np.geomspace(1.0, 9e5, 40):
        assert riesz.phi_bound_check(spec, m, z, 1.0, 3 / 8, math.pi**2 / 2, lap).passed


def test_tauberian_rows_tend_to_one():
    spec = interval.interval_spectrum(Kind.BUCKLING, 1e6 + 1)
    m = riesz.WeylModel.interval()
    for order in (0, 1):
        rows = riesz.tauberian_diagnostic(spec, m, [1e4, 1e6], order)
        errs = [abs(r.integral_ratio - 1) for r in rows] + [abs(r.derivative_ratio - 1) for r in rows]
        assert max(errs[1], errs[3]) < min(errs[0], errs[2]) and max(errs) < 0.1
    with pytest.raises(DomainError):
        riesz.tauberian_diagnostic(spec, m, [10.0], 2)


def test_bilaplacian_law_improves_with_z():
    big = interval.interval_spectrum(Kind.BILAPLACIAN, 1e12 + 1)
    errs = [riesz.bilaplacian_riesz_1d_check(big, z).params["rel_err"] for z in (1e2, 1e4, 1e6)]
    assert errs[0] > errs[1] > errs[2] and errs[2] < 0.01


def test_asymptotic_fit_interval_r1():
    spec = interval.interval_spectrum(Kind.BUCKLING, 1e6 + 1)
    fit = riesz.asymptotic_fit(spec, riesz.WeylModel.interval(), 1e4, 1e6, target="R1")
    # R_1 second term is -(2/(d+1)) c1 z = -(3/2) z
    assert fit.c1_hat == pytest.approx(-1.5, rel=1e-3)
    with pytest.raises(InsufficientSpectrumError):
        riesz.asymptotic_fit(spec, riesz.WeylModel.interval(), 1e4, 1e7)
