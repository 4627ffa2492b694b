import numpy as np
import pytest

import oracles
from stieltjes_lab import catalog
from stieltjes_lab.errors import UnknownEntry

X = [0.1, 0.7, 1.0, 3.0, 10.0]


def test_ids_and_lookup():
    assert set(catalog.ids()) >= {"cauchy", "exp", "cauchy2", "gauss_log", "zero"}
    with pytest.raises(UnknownEntry):
        catalog.get("nope")


def test_flags_justified():
    for e in catalog.entries():
        for flag, why in e.conditions.items():
            assert flag in catalog.FLAGS and why.strip()


@pytest.mark.parametrize("name", ["cauchy", "exp", "cauchy2"])
def test_closed_hilbert(name):
    e = catalog.get(name)
    got = e.hilbert(np.array(X))
    for g, x in zip(got, X):
        assert abs(g - oracles.hilbert(oracles.MP_FUNCTIONS[name], x)) < 1e-11


@pytest.mark.parametrize("name", ["cauchy", "exp", "cauchy2"])
def test_closed_stieltjes(name):
    e = catalog.get(name)
    got = e.stieltjes(np.array(X))
    for g, x in zip(got, X):
        want = oracles.stieltjes(oracles.MP_FUNCTIONS[name], x)
        assert abs(g - want) < 1e-11 * abs(want)


def test_closed_stieltjes2_cauchy():
    e = catalog.get("cauchy")
    got = e.stieltjes2(np.array(X))
    for g, x in zip(got, X):
        want = oracles.stieltjes2(oracles.CAUCHY, x)
        assert abs(g - want) < 1e-11 * abs(want)


def test_zero_entry():
    z = catalog.get("zero")
    assert np.all(z(np.array(X)) == 0) and z.is_zero


def test_listing_serializable():
    import json
    json.dumps(catalog.listing())


@pytest.mark.parametrize("name", ["cauchy", "exp", "cauchy2"])
def test_verify_entry(name):
    report = catalog.verify_entry(name)
    assert report.passed, report.to_dict()
