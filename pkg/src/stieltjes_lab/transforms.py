"""Laplace, Stieltjes, iterated Stieltjes and half-axis Hilbert operators.

Every operator has a direct quadrature route.  The Stieltjes-type and
Hilbert-type operators also have a spectral route: multiply the critical-line
spectrum by the operator's Mellin symbol and invert.  On s = 1/2 + i tau the
symbols are

    S   : pi / cosh(pi tau)
    S2  : pi^2 / cosh^2(pi tau)
    H   : pi cot(pi s)   = -i pi tanh(pi tau)
    H^2 : pi^2 cot^2(pi s) = -pi^2 tanh^2(pi tau)

The Hilbert transform is always the principal value of
``int_0^inf f(t) / (t - x) dt`` with no 1/pi prefactor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import InvalidInput, RouteUnavailable
from .mellin import (CriticalLineSpectrum, SampledFunction, geometric_grid, inverse_values)
from .numerics import (DEFAULT_CONFIG, QuadratureConfig, as_integrand, integrate_logspace,
                       anchored_breakpoints, integrate_pv, pole_anchors)
from .report import VerificationReport

_ALL = (-math.inf, 0.0, math.inf)

# hilbert2 tabulates the inner transform on this geometric grid around the x range
TABLE_PAD_DECADES = 10.0
TABLE_PER_DECADE = 48


class OperatorKind(enum.Enum):
    LAPLACE = "laplace"
    STIELTJES = "stieltjes"
    STIELTJES2 = "stieltjes2"
    HILBERT = "hilbert"
    HILBERT2 = "hilbert2"


class Route(enum.Enum):
    DIRECT = "direct_quadrature"
    MELLIN = "mellin_multiplier"


@dataclass(frozen=True)
class OperatorTag:
    kind: OperatorKind
    route: Route = Route.DIRECT

    def __post_init__(self):
        object.__setattr__(self, "kind", OperatorKind(self.kind))
        object.__setattr__(self, "route", Route(self.route))
        if self.route is Route.MELLIN and self.kind is OperatorKind.LAPLACE:
            raise InvalidInput("the Laplace transform has no critical-line multiplier route")


def symbol(kind: OperatorKind, tau) -> np.ndarray:
    """Mellin symbol of ``kind`` at s = 1/2 + i tau."""
    tau = np.asarray(tau, dtype=float)
    kind = OperatorKind(kind)
    if kind is OperatorKind.STIELTJES:
        return np.pi / np.cosh(np.pi * tau)
    if kind is OperatorKind.STIELTJES2:
        return (np.pi / np.cosh(np.pi * tau)) ** 2
    if kind is OperatorKind.HILBERT:
        return -1j * np.pi * np.tanh(np.pi * tau)
    if kind is OperatorKind.HILBERT2:
        return -(np.pi * np.tanh(np.pi * tau)) ** 2
    raise RouteUnavailable(f"{kind.value} has no critical-line multiplier")


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim > 1:
        raise InvalidInput("x must be a scalar or a 1-D array")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise InvalidInput("x must be positive")
    return x, np.atleast_1d(x)


def _finish(x, values):
    values = np.asarray(values, dtype=complex)
    return complex(values[0]) if x.ndim == 0 else values


def _resolve_spectrum(f, spectrum):
    if isinstance(f, CriticalLineSpectrum):
        return f
    if spectrum is not None:
        return spectrum
    make = getattr(f, "spectrum", None)
    if callable(make):
        return make()
    raise RouteUnavailable("the Mellin route needs a critical-line spectrum")


def apply_symbol(kind: OperatorKind, F: CriticalLineSpectrum, x):
    x, xs = _points(x)
    G = F.with_values(symbol(kind, F.tau) * F.values)
    return _finish(x, inverse_values(G, xs))


def _route(route) -> Route:
    if isinstance(route, Route):
        return route
    return {"direct": Route.DIRECT, "mellin": Route.MELLIN}.get(route) or Route(route)


def laplace(f, x, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """``int_0^inf exp(-x t) f(t) dt``; x may be any array shape."""
    f = as_integrand(f)
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise InvalidInput("x must be positive")
    xs = x.ravel()

    def g(v):
        # t = e^v / x
        ev = np.exp(v)
        t = ev[None, :] / xs[:, None]
        return np.exp(-ev)[None, :] * f(t) * t

    value, _ = integrate_logspace(g, anchored_breakpoints(_ALL, -pole_anchors(xs)), cfg)
    value = np.asarray(value, dtype=complex).reshape(x.shape)
    return complex(value) if x.ndim == 0 else value


def stieltjes(f, x, route="direct", cfg: QuadratureConfig = DEFAULT_CONFIG, spectrum=None):
    """``int_0^inf f(t) / (x + t) dt``."""
    if isinstance(f, CriticalLineSpectrum) or _route(route) is Route.MELLIN:
        return apply_symbol(OperatorKind.STIELTJES, _resolve_spectrum(f, spectrum), x)
    f = as_integrand(f)
    x, xs = _points(x)

    def g(v):
        # t = x e^v, dt/(x + t) = e^v/(1 + e^v) dv
        return f(xs[:, None] * np.exp(v)[None, :]) * expit(v)[None, :]

    value, _ = integrate_logspace(g, anchored_breakpoints(_ALL, pole_anchors(xs)), cfg)
    return _finish(x, value)


def _log_ratio_kernel(v):
    """v / (1 - e^-v), the log kernel times dt in the coordinate t = x e^v."""
    small = np.abs(v) < 1e-6
    safe = np.where(small, 1.0, v)
    return np.where(small, 1.0 + v / 2, safe / -np.expm1(-safe))


def weighted_stieltjes2(f, x, weight_exponent: float = 0.0,
                        cfg: QuadratureConfig = DEFAULT_CONFIG):
    """``int_0^inf (log x - log t)/(x - t) (x/t)^beta f(t) dt`` with beta = weight_exponent."""
    f = as_integrand(f)
    x, xs = _points(x)
    beta = float(weight_exponent)

    def g(v):
        # (log x - log t) dt / (x - t) = v / (1 - e^-v) dv
        weight = _log_ratio_kernel(v) * np.exp(-beta * v)
        return f(xs[:, None] * np.exp(v)[None, :]) * weight[None, :]

    value, _ = integrate_logspace(g, anchored_breakpoints(_ALL, pole_anchors(xs)), cfg)
    return _finish(x, value)


def stieltjes2(f, x, route="direct", cfg: QuadratureConfig = DEFAULT_CONFIG, spectrum=None):
    """Iterated Stieltjes transform ``int_0^inf (log x - log t)/(x - t) f(t) dt``."""
    if isinstance(f, CriticalLineSpectrum) or _route(route) is Route.MELLIN:
        return apply_symbol(OperatorKind.STIELTJES2, _resolve_spectrum(f, spectrum), x)
    return weighted_stieltjes2(f, x, 0.0, cfg)


def stieltjes_as_iterated_laplace(f, x, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """The Stieltjes transform computed as L(L f) by nested quadrature."""
    f = as_integrand(f)
    x, xs = _points(x)

    def g(v):
        # outer variable s = e^v / x
        ev = np.exp(v)
        s = ev[None, :] / xs[:, None]
        return np.exp(-ev)[None, :] * laplace(f, s, cfg) * s

    value, _ = integrate_logspace(g, anchored_breakpoints(_ALL, -pole_anchors(xs)), cfg)
    return _finish(x, value)


def hilbert(f, x, route="direct", cfg: QuadratureConfig = DEFAULT_CONFIG, spectrum=None):
    """Half-axis Hilbert transform ``PV int_0^inf f(t) / (t - x) dt``."""
    if isinstance(f, CriticalLineSpectrum) or _route(route) is Route.MELLIN:
        return apply_symbol(OperatorKind.HILBERT, _resolve_spectrum(f, spectrum), x)
    return integrate_pv(f, x, cfg)


def weighted_hilbert_pv(f, x, weight_exponent: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """``PV int_0^inf (x/t)^beta f(t) / (t - x) dt`` with beta = weight_exponent."""
    x, xs = _points(x)
    return _finish(x, integrate_pv(f, xs, cfg, weight_exponent=weight_exponent))


def hilbert_table(f, x, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                  pad_decades: float = TABLE_PAD_DECADES,
                  per_decade: int = TABLE_PER_DECADE) -> SampledFunction:
    """Tabulate Hf on a geometric grid reaching ``pad_decades`` beyond the x range."""
    _, xs = _points(x)
    lo = math.log10(xs.min()) - pad_decades
    hi = math.log10(xs.max()) + pad_decades
    spec = as_integrand(f)
    if spec.support_min is not None and spec.support_max is not None:
        # stay half a table step inside sampled support, where Hf has log spikes
        half = 0.5 / per_decade
        lo = max(lo, math.log10(spec.support_min) + half)
        hi = min(hi, math.log10(spec.support_max) - half)
        if not hi > lo:
            raise InvalidInput("sampled support is too narrow to tabulate Hf")
    n = int(math.ceil((hi - lo) * per_decade)) + 1
    grid = np.logspace(lo, hi, n)
    return SampledFunction(grid, integrate_pv(spec, grid, cfg))


def hilbert2(f, x, route="direct", cfg: QuadratureConfig = DEFAULT_CONFIG, spectrum=None,
             table: SampledFunction | None = None):
    """Iterated Hilbert transform H(Hf).

    The direct route tabulates the inner transform once on a wide geometric
    grid, interpolates it in log x, and runs the outer principal value on
    the interpolant.
    """
    if isinstance(f, CriticalLineSpectrum) or _route(route) is Route.MELLIN:
        return apply_symbol(OperatorKind.HILBERT2, _resolve_spectrum(f, spectrum), x)
    x, xs = _points(x)
    inner = hilbert_table(f, xs, cfg) if table is None else table
    return _finish(x, integrate_pv(inner, xs, cfg))


_OPERATORS = {
    OperatorKind.LAPLACE: lambda f, x, cfg, spec: laplace(f, x, cfg),
    OperatorKind.STIELTJES: lambda f, x, cfg, spec: stieltjes(f, x, "direct", cfg),
    OperatorKind.STIELTJES2: lambda f, x, cfg, spec: stieltjes2(f, x, "direct", cfg),
    OperatorKind.HILBERT: lambda f, x, cfg, spec: hilbert(f, x, "direct", cfg),
    OperatorKind.HILBERT2: lambda f, x, cfg, spec: hilbert2(f, x, "direct", cfg),
}


def apply_operator(tag: OperatorTag, f, x, cfg: QuadratureConfig = DEFAULT_CONFIG,
                   spectrum: CriticalLineSpectrum | None = None):
    if tag.route is Route.MELLIN:
        return apply_symbol(tag.kind, _resolve_spectrum(f, spectrum), x)
    return _OPERATORS[tag.kind](f, x, cfg, spectrum)


def _normalized_error(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    scale = float(np.max(np.abs(b), initial=0.0))
    diff = float(np.max(np.abs(a - b), initial=0.0))
    if scale == 0:
        return diff
    return diff / scale


def hilbert_multiplier_check(F: CriticalLineSpectrum, x_grid, reference=None,
                             cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                             tolerance: float = 1e-5) -> VerificationReport:
    """Compare ``(1/2 pi i) int cot(pi s) F(s) x^-s ds`` with ``(1/pi) Hf(x)``.

    ``reference`` supplies Hf: an array of values on ``x_grid``, a catalog
    entry (closed form if it has one, PV quadrature otherwise) or any
    integrand (PV quadrature).  The error is normalised by max |Hf| / pi.
    """
    x = np.asarray(x_grid, dtype=float)
    if reference is None:
        hf = np.zeros(x.shape)
        source = "zero"
    elif isinstance(reference, np.ndarray) or isinstance(reference, (list, tuple)):
        hf = np.asarray(reference)
        if hf.shape != x.shape:
            from .errors import GridMismatch
            raise GridMismatch("reference values do not match x_grid")
        source = "values"
    elif getattr(reference, "hilbert", None) is not None:
        hf = reference.hilbert(x)
        source = f"closed form ({reference.id})"
    else:
        hf = integrate_pv(reference, x, cfg)
        source = "PV quadrature"
    spectral = apply_symbol(OperatorKind.HILBERT, F, x) / np.pi
    report = VerificationReport("hilbert_multiplier",
                                grid={"x": [float(x.min()), float(x.max()), x.size],
                                      "tau_max": F.tau_max, "tau_step": F.step})
    report.add("cot_multiplier", _normalized_error(spectral, np.asarray(hf) / np.pi), tolerance,
               metric="max_normalized_error", inputs={"reference": source})
    return report


def corollary1_residual(entry, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                        tolerance: float = 1e-4) -> VerificationReport:
    """max |H^2 f - S2 f + pi^2 f| / (1 + |S2 f|) over the grid."""
    if "sf*_in_L2" not in getattr(entry, "flags", ()):
        raise InvalidInput("corollary1_residual needs an entry flagged sf*_in_L2")
    x = geometric_grid(0.1, 10.0, 64) if x_grid is None else np.asarray(x_grid, dtype=float)
    h2 = hilbert2(entry, x, cfg=cfg)
    s2 = stieltjes2(entry, x, cfg=cfg)
    fx = entry(x)
    residual = np.abs(h2 - s2 + np.pi ** 2 * fx) / (1.0 + np.abs(s2))
    report = VerificationReport("cor1", grid={"x": [float(x.min()), float(x.max()), x.size]})
    report.add(entry.id, float(residual.max()), tolerance, metric="max_normalized_residual",
               inputs={"f": entry.id})
    return report
