"""End-to-end acceptance checks, each at its stated tolerance and runtime limit.

Every test runs the corresponding verification suite (the same code path as
``stieltjes-lab verify``) and records one PASS/FAIL line, shown in the
"acceptance criteria" section of the pytest summary.
"""

import math
import time

import pytest

from stieltjes_lab import catalog, transforms, verification
from stieltjes_lab.mellin import geometric_grid


def _run(name, **options):
    start = time.perf_counter()
    report = verification.run_suite(name, **options)
    return report, time.perf_counter() - start


def _cases(report, prefix=""):
    return [c for c in report.cases if c.id.startswith(prefix)]


def _worst(cases):
    return max(c.value for c in cases)


def test_kernel_identity(acceptance_line):
    report, dt = _run("kernel")
    case = report.case("random_pairs")
    ok = case.value <= 1e-11 and case.inputs["n"] == 100 and dt < 1.0
    acceptance_line("kernel identity, 100 random line pairs", ok,
                    f"max abs deviation {case.value:.2e} (<= 1e-11), {dt:.2f}s (< 1s)")
    assert ok


def test_s2_multiplier(acceptance_line):
    report, dt = _run("multiplier")
    cases = [report.case("s2_symbol:cauchy"), report.case("s2_symbol:exp")]
    worst = _worst(cases)
    ok = worst <= 1e-5 and all(c.passed for c in cases) and dt < 30
    acceptance_line("S2 multiplier on |tau| <= 5 (cauchy, exp)", ok,
                    f"max rel error {worst:.2e} (<= 1e-5), {dt:.1f}s (< 30s)")
    assert ok


def test_iterated_hilbert_identity(acceptance_line):
    report, dt = _run("cor1")
    worst = _worst([report.case("cauchy"), report.case("exp")])
    s2_at_1 = transforms.stieltjes2(catalog.get("cauchy"), 1.0).real
    h2_at_1 = transforms.hilbert2(catalog.get("cauchy"), [1.0])[0].real
    anchors = (abs(s2_at_1 - math.pi ** 2 / 4) <= 1e-6 * math.pi ** 2 / 4
               and abs(h2_at_1 + math.pi ** 2 / 4) <= 1e-6 * math.pi ** 2 / 4)
    ok = worst <= 1e-4 and anchors and dt < 120
    acceptance_line("H^2 f = S2 f - pi^2 f on 64 points of [0.1, 10]", ok,
                    f"max normalized residual {worst:.2e} (<= 1e-4), S2f(1)={s2_at_1:.7f}, "
                    f"H^2f(1)={h2_at_1:.7f}, {dt:.1f}s (< 120s)")
    assert ok


def test_factorization(acceptance_line):
    report, dt = _run("factorization")
    rhs = report.case("anchor:rhs_cauchy(1)")
    main = report.case("cauchy*cauchy")
    ok = rhs.value <= 1e-6 and main.value <= 1e-3 and dt < 300
    acceptance_line("S2(f*g) = sqrt(x) S2f S2g for cauchy on [0.5, 2]", ok,
                    f"rel error {main.value:.2e} (<= 1e-3), rhs(1) vs pi^4/16 {rhs.value:.1e}, "
                    f"{dt:.1f}s (< 300s)")
    assert ok


def test_convolution_methods_agree(acceptance_line):
    report, dt = _run("methods")
    main = report.case("mb_vs_pointwise:cauchy*cauchy")
    anchors = [report.case("anchor:mb_cauchy(1)"), report.case("anchor:pointwise_cauchy(1)")]
    ok = main.value <= 1e-3 and all(c.passed for c in anchors) and dt < 300
    acceptance_line("double integral vs pointwise formula, cauchy on [0.5, 2]", ok,
                    f"rel error {main.value:.2e} (<= 1e-3), anchor (f*g)(1) vs 5pi^2/16 "
                    f"{_worst(anchors):.1e}, {dt:.1f}s (< 300s)")
    assert ok


def test_norm_bounds(acceptance_line):
    report, dt = _run("bounds")
    nonzero = [c for c in report.cases if "zero" not in c.id]
    worst = _worst(nonzero)
    ok = report.passed and worst < 1.0 and dt < 60
    acceptance_line("pointwise and L2 bounds for flagged pairs", ok,
                    f"largest lhs/rhs ratio {worst:.3f} (< 1), {dt:.1f}s (< 60s)")
    assert ok


@pytest.mark.xfail(strict=True, reason=(
    "a hard cut at |tau| = 3 discards the part of the exp spectrum beyond the cut, which "
    "alone leaves a relative L2 error near 8e-3 on [0.1, 10]; the measured value is reported"))
def test_inversion_exp(acceptance_line):
    report, dt = _run("inversion", tau_cap=3.0, n_max=60, tolerance=1e-4)
    spectral = report.case("spectral:exp")
    monotone = report.case("profile_monotone:exp")
    plateau = report.case("profile_plateau:exp")
    ok = (spectral.value <= 1e-4 and monotone.passed and plateau.value <= 1e-4 and dt < 60)
    acceptance_line("spectral inversion of S2 exp at tau_cap=3, series profile", ok,
                    f"rel L2 error {spectral.value:.2e} (<= 1e-4), profile monotone="
                    f"{monotone.passed}, plateau {plateau.value:.2e} (<= 1e-4), {dt:.2f}s (< 60s)")
    assert ok


def test_equation_pairs_roundtrip(acceptance_line):
    report, dt = _run("roundtrip")
    s2 = _cases(report, "s2_pair:alpha=0.25:cauchy")
    identity = _cases(report, "s2_pair:alpha=0.5:cauchy")
    hilbert = _cases(report, "hilbert_pair:alpha=0.25:cauchy")
    anchor = report.case("anchor:hilbert_pair_h(1)")
    ok = (len(s2) == len(identity) == len(hilbert) == 2 and _worst(s2) <= 5e-3
          and _worst(identity) <= 1e-10 and _worst(hilbert) <= 1e-3 and anchor.passed
          and dt < 180)
    acceptance_line("singular equation pairs round trip", ok,
                    f"s2 a=1/4 {_worst(s2):.1e} (<= 5e-3), a=1/2 {_worst(identity):.1e} "
                    f"(<= 1e-10), hilbert a=1/4 {_worst(hilbert):.1e} (<= 1e-3), "
                    f"h(1) vs sqrt(2)/4 {anchor.value:.1e}, {dt:.1f}s (< 180s)")
    assert ok


def test_parseval(acceptance_line):
    report, dt = _run("parseval")
    norms, pairings = _cases(report, "norm:"), _cases(report, "pairing:")
    worst = _worst(report.cases)
    ok = norms and pairings and worst <= 1e-6 and dt < 10
    acceptance_line("Parseval norm and pairing on catalog entries", bool(ok),
                    f"max rel error {worst:.2e} (<= 1e-6), {dt:.2f}s (< 10s)")
    assert ok


def test_titchmarsh_smoke(acceptance_line):
    report, dt = _run("titchmarsh")
    norms = [c.inputs["norm"] for c in report.cases]
    expected = len(catalog.nonzero_pairs())
    ok = report.passed and len(norms) == expected and min(norms) > 1e-6 and dt < 60
    acceptance_line("||f*g|| > 1e-6 for nonzero flagged pairs", ok,
                    f"smallest norm {min(norms):.3e} over {len(norms)} pairs, {dt:.1f}s (< 60s)")
    assert ok
