import json

import pytest

from stieltjes_lab import verification
from stieltjes_lab.errors import InvalidInput
from stieltjes_lab.report import VerificationReport


def test_report_schema():
    r = VerificationReport("demo")
    r.add("a", 1e-3, 1e-2)
    r.add("b", 0.5, 1.0, strict=True)
    d = json.loads(json.dumps(r.to_dict()))
    assert d["pass"] is True and d["max_error"] == 0.5
    assert {"id", "value", "tolerance", "pass"} <= set(d["cases"][0])


def test_strict_case_fails_at_equality():
    r = VerificationReport("demo")
    r.add("edge", 1.0, 1.0, strict=True)
    assert not r.passed


@pytest.mark.parametrize("name", ["kernel", "bounds", "titchmarsh", "parseval"])
def test_fast_suites_pass(name):
    report = verification.run_suite(name)
    assert report.passed, report.to_dict()
    assert report.cases


def test_kernel_suite_seeded():
    a = verification.kernel_suite().max_error
    b = verification.kernel_suite().max_error
    assert a == b


def test_unknown_suite():
    with pytest.raises(InvalidInput):
        verification.run_suite("nonsense")


def test_roundtrip_single_pair():
    report = verification.run_suite("roundtrip", pair="hilbert", alpha=0.25, fn="exp")
    assert report.passed and len(report.cases) == 2
    with pytest.raises(InvalidInput):
        verification.run_suite("roundtrip", pair="hilbert")
