"""Verification suites: each checks one family of identities on the catalog."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import catalog, convolution, inversion, sie, transforms
from .errors import InvalidInput
from .mellin import (CriticalLineSpectrum, geometric_grid, mellin_forward, parseval_pairing,
                     sampled_l2_squared, spectrum_l2_squared)
from .numerics import DEFAULT_CONFIG, Integrand, QuadratureConfig, integrate_halfaxis
from .report import VerificationReport
from .special import complex_gamma

KERNEL_SEED = 20240607

# the S2 spectrum check needs G* to ~1e-13 absolute near |G*| = 1e-8
SPECTRUM_CONFIG = DEFAULT_CONFIG.replace(abs_tol=1e-300, rel_tol=1e-13)


def _config_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)


def _rel(a, b) -> float:
    a, b = complex(a), complex(b)
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def _pairs(flag_set=("sf*_in_L2", "sf*_in_L1")):
    pool = [e for e in catalog.entries() if not e.is_zero and set(flag_set) <= e.flags]
    return [(a, b) for i, a in enumerate(pool) for b in pool[i:]]


# individual suites -----------------------------------------------------------------

def parseval_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, tolerance: float = 1e-6) -> VerificationReport:
    """Norm equality and the generalized pairing identity against direct quadrature."""
    report = VerificationReport("parseval", config=_config_dict(cfg))
    for e in catalog.entries():
        F = e.spectrum()
        lhs = integrate_halfaxis(Integrand(lambda t, e=e: np.abs(e(t)) ** 2), cfg)
        rhs = spectrum_l2_squared(F)
        value = _rel(rhs, lhs) if lhs != 0 else abs(rhs)
        report.add(f"norm:{e.id}", value, tolerance, inputs={"f": e.id, "lhs": lhs.real, "rhs": rhs})
    nonzero = [e for e in catalog.entries() if not e.is_zero]
    for i, a in enumerate(nonzero):
        for b in nonzero[i:]:
            worst = 0.0
            for x in (0.5, 1.0, 2.0):
                lhs = integrate_halfaxis(Integrand(lambda t, a=a, b=b, x=x: a(x * t) * b(t)), cfg)
                rhs = parseval_pairing(a.spectrum(), b.spectrum(), x)
                worst = max(worst, _rel(rhs, lhs))
            report.add(f"pairing:{a.id},{b.id}", worst, tolerance,
                       inputs={"f1": a.id, "f2": b.id, "x": [0.5, 1.0, 2.0]})
    return report


def kernel_suite(n: int = 100, seed: int = KERNEL_SEED, tolerance: float = 1e-11) -> VerificationReport:
    """Gamma-ratio kernel against its trigonometric form at random critical-line pairs."""
    rng = np.random.default_rng(seed)
    tau = rng.uniform(-5, 5, n)
    theta = rng.uniform(-5, 5, n)
    report = VerificationReport("kernel", config={"seed": seed, "n": n})
    value = convolution.kernel_identity_check(0.5 + 1j * tau, 0.5 + 1j * theta)
    report.add("random_pairs", value, tolerance, metric="max_abs_error",
               inputs={"n": n, "seed": seed, "tau_range": [-5, 5]})
    for label, s, w, tol in (("s=w=1/2", 0.5, 0.5, 1e-12), ("s=1/2+i,w=1/2", 0.5 + 1j, 0.5, 1e-12),
                             ("s=w=1/2+0.3i", 0.5 + 0.3j, 0.5 + 0.3j, 1e-11)):
        report.add(label, convolution.kernel_identity_check(s, w), tol, metric="max_abs_error",
                   inputs={"s": str(s), "w": str(w)})
    return report


def multiplier_suite(cfg: QuadratureConfig = SPECTRUM_CONFIG, tolerance: float = 1e-5) -> VerificationReport:
    """Spectrum of S2 f against pi^2/cosh^2 times f*, plus the Hilbert multiplier."""
    tau = np.linspace(-5, 5, 201)
    report = VerificationReport("multiplier", config=_config_dict(cfg),
                                grid={"tau": [-5.0, 5.0, tau.size]})
    for id in ("cauchy", "exp"):
        e = catalog.get(id)
        G = mellin_forward(lambda t, e=e: transforms.stieltjes2(e, t, cfg=cfg), tau, cfg)
        predicted = transforms.symbol(transforms.OperatorKind.STIELTJES2, tau) * e.mellin(0.5 + 1j * tau)
        mask = np.abs(G.values) > 1e-8
        value = float(np.max(np.abs(G.values - predicted)[mask] / np.abs(predicted[mask])))
        report.add(f"s2_symbol:{id}", value, tolerance,
                   inputs={"f": id, "points": int(mask.sum()), "threshold": 1e-8})
    x = geometric_grid(0.1, 10.0, 64)
    cauchy = catalog.get("cauchy")
    sub = transforms.hilbert_multiplier_check(cauchy.spectrum(), x, cauchy, tolerance=1e-5)
    sub.cases[0].id = "cot_symbol:cauchy"
    report.extend(sub)
    cauchy2 = catalog.get("cauchy2")
    sub = transforms.hilbert_multiplier_check(cauchy2.spectrum(), x,
                                              cauchy2.as_integrand(), tolerance=1e-4)
    sub.cases[0].id = "cot_symbol:cauchy2"
    report.extend(sub)
    return report


def cor1_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, tolerance: float = 1e-4) -> VerificationReport:
    """H^2 f = S2 f - pi^2 f on the default grid, plus the values at x = 1."""
    report = VerificationReport("cor1", config=_config_dict(cfg))
    for id in ("cauchy", "exp", "zero"):
        report.extend(transforms.corollary1_residual(catalog.get(id), cfg=cfg, tolerance=tolerance))
    c = catalog.get("cauchy")
    report.add("anchor:s2_cauchy(1)", _rel(transforms.stieltjes2(c, 1.0, cfg=cfg), np.pi ** 2 / 4), 1e-6,
               metric="rel_error", inputs={"x": 1.0, "expected": np.pi ** 2 / 4})
    report.add("anchor:h2_cauchy(1)", _rel(transforms.hilbert2(c, 1.0, cfg=cfg), -np.pi ** 2 / 4), 1e-6,
               metric="rel_error", inputs={"x": 1.0, "expected": -np.pi ** 2 / 4})
    return report


def factorization_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, tolerance: float = 1e-3) -> VerificationReport:
    """S2(f*g) = sqrt(x) S2f S2g on [0.5, 2] for every flagged pair."""
    x = geometric_grid(0.5, 2.0, 16)
    report = VerificationReport("factorization", config=_config_dict(cfg),
                                grid={"x": [0.5, 2.0, x.size]})
    c = catalog.get("cauchy")
    rhs = transforms.stieltjes2(c, 1.0, cfg=cfg) ** 2
    report.add("anchor:rhs_cauchy(1)", _rel(rhs, np.pi ** 4 / 16), 1e-6, metric="rel_error",
               inputs={"x": 1.0, "expected": np.pi ** 4 / 16})
    for f, g in _pairs():
        report.extend(convolution.factorization_check(f, g, x, cfg, tolerance=tolerance))
    report.extend(convolution.factorization_check(c, catalog.get("zero"), x, cfg, tolerance=tolerance))
    return report


def bounds_suite() -> VerificationReport:
    """Pointwise and L2 norm bounds for every flagged pair (strict ratios below 1)."""
    report = VerificationReport("bounds")
    for f, g in _pairs():
        report.extend(convolution.bounds_check(f, g))
    report.extend(convolution.bounds_check(catalog.get("cauchy"), catalog.get("zero")))
    return report


def corollary2_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, tolerance: float = 5e-3) -> VerificationReport:
    """H^2(f*g) + pi^2 (f*g) = sqrt(x) S2f S2g for every flagged pair."""
    x = geometric_grid(0.5, 2.0, 16)
    report = VerificationReport("corollary2", config=_config_dict(cfg), grid={"x": [0.5, 2.0, x.size]})
    for f, g in _pairs():
        report.extend(convolution.corollary2_check(f, g, x, cfg, tolerance=tolerance))
    report.extend(convolution.corollary2_check(catalog.get("cauchy"), catalog.get("zero"), x, cfg))
    return report


def methods_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, tolerance: float = 1e-3) -> VerificationReport:
    """Double-integral vs three-product convolution, and the spectrum normalisation."""
    x = geometric_grid(0.5, 2.0, 16)
    c = catalog.get("cauchy")
    report = VerificationReport("methods", config=_config_dict(cfg), grid={"x": [0.5, 2.0, x.size]})
    for f, g in _pairs():
        mb = convolution.convolve_mb(f, g, x).values.values
        pw = convolution.convolve_pointwise(f, g, x, cfg).values.values
        report.add(f"mb_vs_pointwise:{f.id}*{g.id}", convolution._max_rel(mb, pw), tolerance,
                   metric="max_normalized_error", inputs={"f": f.id, "g": g.id})
    anchor = 5 * np.pi ** 2 / 16
    report.add("anchor:mb_cauchy(1)", _rel(convolution.convolve_mb(c, c, [1.0]).values.values[0], anchor),
               tolerance, metric="rel_error", inputs={"x": 1.0, "expected": anchor})
    report.add("anchor:pointwise_cauchy(1)",
               _rel(convolution.convolve_pointwise(c, c, [1.0], cfg).values.values[0], anchor),
               tolerance, metric="rel_error", inputs={"x": 1.0, "expected": anchor})
    report.extend(convolution.spectrum_normalization_check(c, c, cfg=cfg, tolerance=tolerance))
    report.extend(convolution.spectrum_normalization_check(c, catalog.get("exp"), cfg=cfg,
                                                           tolerance=tolerance))
    return report


def roundtrip_suite(cfg: QuadratureConfig = DEFAULT_CONFIG, pair=None, alpha=None,
                    fn: str | None = None) -> VerificationReport:
    """Forward/inverse round trips of the singular-equation pairs.

    With ``pair`` and ``alpha`` only that pair is checked (on ``fn``,
    default "cauchy"); otherwise the standard set is run.
    """
    report = VerificationReport("roundtrip", config=_config_dict(cfg))
    if pair is not None or alpha is not None:
        if pair is None or alpha is None:
            raise InvalidInput("roundtrip needs both pair and alpha")
        p = sie.SiePair(pair, alpha)
        f = catalog.get(fn or "cauchy")
        sub = sie.roundtrip_check(p, f, cfg=cfg)
        for case in sub.cases:
            case.id = f"{p.kind.value}:alpha={p.alpha:g}:{f.id}:{case.id}"
        return report.extend(sub)
    runs = ((sie.SiePair("s2", 0.25), "cauchy"), (sie.SiePair("s2", 0.5), "cauchy"),
            (sie.SiePair("hilbert", 0.25), "cauchy"), (sie.SiePair("hilbert", 0.2), "exp"))
    for p, fid in runs:
        sub = sie.roundtrip_check(p, catalog.get(fid), cfg=cfg)
        for case in sub.cases:
            case.id = f"{p.kind.value}:alpha={p.alpha:g}:{fid}:{case.id}"
        report.extend(sub)
    h1 = sie.apply_forward(sie.SiePair("hilbert", 0.25), catalog.get("cauchy"), [1.0], cfg).values[0]
    report.add("anchor:hilbert_pair_h(1)", _rel(h1, math.sqrt(2) / 4), 1e-6, metric="rel_error",
               inputs={"alpha": 0.25, "f": "cauchy", "expected": math.sqrt(2) / 4})
    return report


def inversion_suite(tau_cap: float = 3.0, n_max: int = 60, tolerance: float = 1e-4) -> VerificationReport:
    """Recover f from the closed-form spectrum of S2 f."""
    x = geometric_grid(0.1, 10.0, 64)
    cfg = inversion.InversionConfig(n_terms=n_max, tau_cap=tau_cap, tolerance=tolerance)
    report = VerificationReport("inversion", config=dataclasses.asdict(cfg),
                                grid={"x": [0.1, 10.0, x.size]})
    tau = catalog.get("exp").spectrum().tau
    s2 = transforms.symbol(transforms.OperatorKind.STIELTJES2, tau)
    spectra = {
        "exp": (s2 * complex_gamma(0.5 + 1j * tau), catalog.get("exp")),
        "cauchy": (np.pi ** 3 / np.cosh(np.pi * tau) ** 3, catalog.get("cauchy")),
    }
    G = {k: CriticalLineSpectrum(tau, v) for k, (v, _) in spectra.items()}
    for k, (_, entry) in spectra.items():
        f = inversion.invert_spectral(G[k], cfg, x)
        report.add(f"spectral:{k}", inversion.relative_l2_error(f, entry), tolerance,
                   metric="rel_l2_error", inputs={"f": k, "tau_cap": tau_cap})
    Gexp, exp = G["exp"], catalog.get("exp")
    series = inversion.invert_series(Gexp, n_max, x, cfg)
    spectral = inversion.invert_spectral(Gexp, cfg, x)
    report.add("series_vs_spectral:exp", convolution._max_rel(series.values, spectral.values), 1e-6,
               metric="max_normalized_error", inputs={"n": n_max})
    profile = inversion.convergence_profile(Gexp, exp, x, n_max, cfg)
    report.add("profile_monotone:exp", 0.0 if profile.monotone else 1.0, 0.0, metric="violations",
               inputs={"n_max": n_max})
    report.add("profile_plateau:exp", profile.plateau, tolerance, metric="rel_l2_error",
               inputs={"n_max": n_max, "tau_cap": tau_cap})
    lower = inversion.convergence_profile(Gexp, exp, x, n_max, cfg.replace(tau_cap=2.0))
    report.add("plateau_orders_with_cap:exp", profile.plateau / lower.plateau, 1.0, strict=True,
               metric="plateau_ratio", inputs={"tau_cap": [tau_cap, 2.0],
                                               "plateaus": [profile.plateau, lower.plateau]})
    back = inversion.recovered_spectrum(Gexp, cfg)
    band = np.abs(tau) <= tau_cap
    report.add("converse_multiplier:exp",
               float(np.max(np.abs(s2[band] * back.values[band] - Gexp.values[band])
                            / np.max(np.abs(Gexp.values[band])))), 1e-8,
               metric="max_normalized_error", inputs={"tau_cap": tau_cap})
    return report


def titchmarsh_suite() -> VerificationReport:
    """Nonzero flagged pairs give a convolution with grid L2 norm above 1e-6."""
    report = VerificationReport("titchmarsh")
    x = geometric_grid(1e-6, 1e6, 481)
    for f, g in _pairs():
        h = convolution.convolve_mb(f, g, x).values
        norm = math.sqrt(sampled_l2_squared(h))
        report.add(f"{f.id}*{g.id}", 1e-6 / norm if norm > 0 else math.inf, 1.0, strict=True,
                   metric="threshold_over_norm", inputs={"f": f.id, "g": g.id, "norm": norm})
    return report


SUITES = {
    "parseval": parseval_suite,
    "kernel": kernel_suite,
    "multiplier": multiplier_suite,
    "cor1": cor1_suite,
    "factorization": factorization_suite,
    "bounds": bounds_suite,
    "corollary2": corollary2_suite,
    "methods": methods_suite,
    "roundtrip": roundtrip_suite,
    "inversion": inversion_suite,
    "titchmarsh": titchmarsh_suite,
}


def run_suite(name: str, **options) -> VerificationReport:
    """Run one suite by name, or every suite for ``'all'``."""
    if name == "all":
        report = VerificationReport("all")
        for key, fn in SUITES.items():
            sub = fn(**{k: v for k, v in options.items() if k in fn.__code__.co_varnames})
            for case in sub.cases:
                case.id = f"{key}/{case.id}"
            report.extend(sub)
        return report
    try:
        fn = SUITES[name]
    except KeyError:
        raise InvalidInput(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all") from None
    return fn(**options)
