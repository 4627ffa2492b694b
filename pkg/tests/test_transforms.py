import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from stieltjes_lab import catalog, transforms
from stieltjes_lab.errors import InvalidInput, RouteUnavailable
from stieltjes_lab.mellin import SampledFunction, geometric_grid, mellin_forward, tau_grid
from stieltjes_lab.transforms import OperatorKind, OperatorTag, Route

X = np.array([0.15, 0.8, 1.0, 2.0, 9.0])


def _close(a, b, tol):
    a, b = np.asarray(a), np.asarray(b)
    return np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(b)))


@pytest.mark.parametrize("name", ["cauchy", "exp", "gauss_log"])
def test_laplace_matches_mpmath(name):
    got = transforms.laplace(catalog.get(name), X)
    want = [oracles.laplace(oracles.MP_FUNCTIONS[name], x) for x in X]
    assert _close(got, want, 1e-9)


@pytest.mark.parametrize("name", ["cauchy", "exp", "gauss_log"])
def test_stieltjes_matches_mpmath(name):
    got = transforms.stieltjes(catalog.get(name), X)
    want = [oracles.stieltjes(oracles.MP_FUNCTIONS[name], x) for x in X]
    assert _close(got, want, 1e-9)


@pytest.mark.parametrize("name", ["cauchy", "exp", "cauchy2", "gauss_log"])
def test_stieltjes2_matches_mpmath(name):
    got = transforms.stieltjes2(catalog.get(name), X)
    want = [oracles.stieltjes2(oracles.MP_FUNCTIONS[name], x) for x in X]
    assert _close(got, want, 1e-9)


def test_stieltjes2_cauchy_anchor():
    # oracle: mpmath quadrature of the iterated kernel at x = 1
    assert abs(transforms.stieltjes2(catalog.get("cauchy"), 1.0)
               - oracles.stieltjes2(oracles.CAUCHY, 1.0)) < 1e-10
    assert abs(transforms.stieltjes2(catalog.get("cauchy"), 1.0) - math.pi ** 2 / 4) < 1e-10


@pytest.mark.parametrize("name", ["exp", "gauss_log"])
def test_hilbert_matches_mpmath(name):
    got = transforms.hilbert(catalog.get(name), X)
    want = [oracles.hilbert(oracles.MP_FUNCTIONS[name], x) for x in X]
    assert _close(got, want, 1e-9)


def test_stieltjes_is_iterated_laplace():
    f = catalog.get("exp")
    x = np.array([0.3, 1.0, 4.0])
    assert _close(transforms.stieltjes_as_iterated_laplace(f, x), transforms.stieltjes(f, x), 1e-8)


def test_s2_is_s_applied_twice():
    f = catalog.get("exp")
    x = np.array([0.5, 2.0])
    # closed-form S(exp) as the inner function
    inner = lambda t: np.real(f.stieltjes(t))
    assert _close(transforms.stieltjes(inner, x), transforms.stieltjes2(f, x), 1e-8)


@pytest.mark.parametrize("kind", ["stieltjes", "stieltjes2", "hilbert", "hilbert2"])
@pytest.mark.parametrize("name", ["exp", "cauchy2"])
def test_direct_and_mellin_routes_agree(kind, name):
    f = catalog.get(name)
    x = geometric_grid(0.3, 3.0, 5)
    direct = transforms.apply_operator(OperatorTag(kind, "direct_quadrature"), f, x)
    mellin = transforms.apply_operator(OperatorTag(kind, "mellin_multiplier"), f, x,
                                       spectrum=f.spectrum(tau_grid(40.0, 0.02)))
    assert _close(direct, mellin, 1e-5)


def test_mellin_route_from_numeric_spectrum():
    f = catalog.get("exp")
    F = mellin_forward(f, tau_grid(30.0, 0.05))
    got = transforms.stieltjes2(F, [1.0])
    assert abs(got[0] - oracles.stieltjes2(oracles.EXP, 1.0)) < 1e-6


def test_laplace_has_no_mellin_route():
    with pytest.raises(InvalidInput):
        OperatorTag("laplace", "mellin_multiplier")
    with pytest.raises(RouteUnavailable):
        transforms.symbol(OperatorKind.LAPLACE, [0.0])


def test_mellin_route_needs_spectrum():
    with pytest.raises(RouteUnavailable):
        transforms.hilbert(lambda t: np.exp(-t), [1.0], route="mellin")


@given(tau=st.floats(-30, 30))
def test_symbol_identities(tau):
    s = transforms.symbol
    assert np.isclose(s("stieltjes2", tau), s("stieltjes", tau) ** 2, rtol=1e-14, atol=0)
    assert np.isclose(s("hilbert2", tau), s("hilbert", tau) ** 2, rtol=1e-12, atol=1e-300)
    # H^2 = S2 - pi^2
    assert abs(s("hilbert2", tau) - (s("stieltjes2", tau) - math.pi ** 2)) < 1e-12


@given(tau=st.floats(-5, 5))
def test_symbols_match_trig_forms(tau):
    z = 0.5 + 1j * tau
    assert np.isclose(transforms.symbol("stieltjes", tau), np.pi / np.sin(np.pi * z), rtol=1e-12)
    assert np.isclose(transforms.symbol("hilbert", tau), np.pi / np.tan(np.pi * z),
                      rtol=1e-10, atol=1e-12)


def test_reality_for_real_input():
    f = catalog.get("gauss_log")
    for op in (transforms.stieltjes, transforms.stieltjes2, transforms.hilbert):
        assert np.max(np.abs(np.imag(op(f, X)))) == 0.0


def test_linearity():
    f, g = catalog.get("exp"), catalog.get("cauchy2")
    combo = lambda t: 0.5 * f(t) + 2j * g(t)
    for op in (transforms.stieltjes2, transforms.hilbert):
        assert _close(op(combo, X), 0.5 * op(f, X) + 2j * op(g, X), 1e-8)


@settings(max_examples=8, deadline=None)
@given(lam=st.floats(0.05, 20.0))
def test_dilation_covariance(lam):
    # T[f(lam .)](x) = (Tf)(lam x) for the scale-invariant kernels
    f = catalog.get("exp")
    scaled = lambda t: f(lam * t)
    x = np.array([0.5, 3.0])
    for op in (transforms.stieltjes, transforms.stieltjes2, transforms.hilbert):
        assert _close(op(scaled, x), op(f, lam * x), 1e-8)


def test_iterated_hilbert_anchor():
    e = catalog.get("cauchy")
    h2 = transforms.hilbert2(e, [1.0])[0]
    want = oracles.stieltjes2(oracles.CAUCHY, 1.0) - math.pi ** 2 * 0.5
    assert abs(h2 - want) < 1e-4 * abs(want)


@pytest.mark.parametrize("name", ["cauchy", "exp"])
def test_iterated_hilbert_identity_residual(name):
    report = transforms.corollary1_residual(catalog.get(name))
    assert report.passed, report.to_dict()


def test_iterated_hilbert_identity_needs_flag():
    with pytest.raises(InvalidInput):
        transforms.corollary1_residual(lambda t: t)


def test_hilbert_multiplier_check_routes():
    e = catalog.get("exp")
    x = geometric_grid(0.5, 2.0, 4)
    F = e.spectrum(tau_grid(30.0, 0.02))
    assert transforms.hilbert_multiplier_check(F, x, e).passed
    assert transforms.hilbert_multiplier_check(F, x, e.as_integrand()).passed
    assert not transforms.hilbert_multiplier_check(F, x, np.zeros(4)).passed


def test_hilbert_on_sampled_data():
    x = geometric_grid(1e-8, 1e8, 1281)
    f = SampledFunction(x, np.exp(-x))
    got = transforms.hilbert(f, [0.5, 2.0])
    want = [oracles.hilbert(oracles.EXP, 0.5), oracles.hilbert(oracles.EXP, 2.0)]
    assert _close(got, want, 1e-5)


def test_bad_points():
    with pytest.raises(InvalidInput):
        transforms.hilbert(catalog.get("exp"), [-1.0])
