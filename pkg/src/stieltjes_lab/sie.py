"""Reciprocal pairs of singular integral equations on the half-axis.

Hilbert pair (0 < alpha < 1/2):

    h = cos(pi a) f + (sin(pi a)/pi) Hf
    f = cos(pi a) h - (sin(pi a)/pi) PV int (x/t)^a h(t)/(t - x) dt

Iterated Stieltjes pair (0 < alpha < 1):

    h = (cos^2(pi a)/pi^2) S2 f - (sin(2 pi a)/pi) Hf - cos(2 pi a) f
    f = (cos^2(pi a)/pi^2) S2_b h + (sin(2 pi a)/pi) H_b h - cos(2 pi a) h

where b = a - 1/2 and the subscript marks the weight (x/t)^b inside the
kernel.  At a = 1/2 both directions collapse to h = f.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .mellin import SampledFunction, geometric_grid
from .numerics import DEFAULT_CONFIG, QuadratureConfig, as_integrand
from .report import VerificationReport
from . import transforms

# grid used to sample an intermediate function before applying the second map
WIDE_PER_DECADE = 40
WIDE_PAD_DECADES = 10.0


class PairKind(enum.Enum):
    HILBERT = "hilbert_pair"
    S2 = "s2_pair"


class Direction(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


def _kind(kind) -> PairKind:
    aliases = {"hilbert": PairKind.HILBERT, "s2": PairKind.S2}
    return aliases.get(kind) or PairKind(kind)


@dataclass(frozen=True)
class SiePair:
    kind: PairKind
    alpha: float
    direction: Direction = Direction.FORWARD

    def __post_init__(self):
        object.__setattr__(self, "kind", _kind(self.kind))
        object.__setattr__(self, "direction", Direction(self.direction))
        a = float(self.alpha)
        upper = 0.5 if self.kind is PairKind.HILBERT else 1.0
        if not 0.0 < a < upper:
            raise InvalidInput(f"{self.kind.value} needs 0 < alpha < {upper:g}, got {a:g}")
        object.__setattr__(self, "alpha", a)

    @property
    def degenerate(self) -> bool:
        """True when the s2 pair reduces to the identity (alpha = 1/2)."""
        return self.kind is PairKind.S2 and self.alpha == 0.5

    def reversed(self) -> "SiePair":
        other = Direction.INVERSE if self.direction is Direction.FORWARD else Direction.FORWARD
        return SiePair(self.kind, self.alpha, other)

    def coefficients(self) -> dict:
        """Coefficients of the identity, weighted-Hilbert and weighted-S2 terms."""
        a = self.alpha
        sign = 1.0 if self.direction is Direction.FORWARD else -1.0
        if self.kind is PairKind.HILBERT:
            return {"identity": math.cos(math.pi * a), "hilbert": sign * math.sin(math.pi * a) / math.pi,
                    "s2": 0.0}
        if self.degenerate:
            return {"identity": 1.0, "hilbert": 0.0, "s2": 0.0}
        return {"identity": -math.cos(2 * math.pi * a),
                "hilbert": -sign * math.sin(2 * math.pi * a) / math.pi,
                "s2": math.cos(math.pi * a) ** 2 / math.pi ** 2}

    def weight_exponent(self) -> float:
        """beta in (x/t)^beta for the kernels of this direction."""
        if self.direction is Direction.FORWARD:
            return 0.0
        return self.alpha if self.kind is PairKind.HILBERT else self.alpha - 0.5

    def symbol(self, s):
        """Mellin symbol of this map at s."""
        s = np.asarray(s, dtype=complex)
        a = self.alpha
        if self.kind is PairKind.HILBERT:
            ratio = np.sin(np.pi * (s + a)) / np.sin(np.pi * s)
        else:
            ratio = (np.sin(np.pi * a) - np.cos(np.pi * a) / np.tan(np.pi * s)) ** 2
        return ratio if self.direction is Direction.FORWARD else 1.0 / ratio


def inverse_symbol_closed(pair: SiePair, s):
    """Closed form of the inverse symbol, independent of SiePair.symbol's reciprocal."""
    s = np.asarray(s, dtype=complex)
    a = pair.alpha
    if pair.kind is PairKind.HILBERT:
        return np.sin(np.pi * s) / np.sin(np.pi * (s + a))
    return (np.sin(np.pi * s) / np.sin(np.pi * (s + a - 0.5))) ** 2


def weighted_hilbert(h, alpha: float, x, variant: str = "hilbert",
                     cfg: QuadratureConfig = DEFAULT_CONFIG):
    """``PV int_0^inf (x/t)^beta h(t)/(t - x) dt`` with beta = alpha, or alpha - 1/2 for ``variant='s2'``."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("alpha must lie in (0, 1)")
    beta = alpha if variant == "hilbert" else alpha - 0.5
    if variant not in ("hilbert", "s2"):
        raise InvalidInput(f"unknown variant {variant!r}")
    return transforms.weighted_hilbert_pv(h, x, beta, cfg)


def _grid(x_grid):
    x = geometric_grid(0.1, 10.0, 64) if x_grid is None else np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0 or np.any(~(x > 0)):
        raise InvalidInput("x grid must be non-empty and positive")
    return x


def _is_zero(f) -> bool:
    return bool(getattr(f, "is_zero", False))


def _apply(pair: SiePair, f, x, cfg, method: str = "s2") -> SampledFunction:
    if method not in ("s2", "nested"):
        raise InvalidInput(f"unknown method {method!r}")
    x = _grid(x)
    fx = np.asarray(as_integrand(f)(x), dtype=complex)
    coef = pair.coefficients()
    if _is_zero(f) or (coef["hilbert"] == 0.0 and coef["s2"] == 0.0):
        return SampledFunction(x, coef["identity"] * fx)
    beta = pair.weight_exponent()
    if pair.kind is PairKind.S2 and method == "nested":
        return SampledFunction(x, _nested_s2(pair, f, x, cfg))
    out = coef["identity"] * fx
    if coef["hilbert"]:
        out = out + coef["hilbert"] * transforms.weighted_hilbert_pv(f, x, beta, cfg)
    if coef["s2"]:
        out = out + coef["s2"] * transforms.weighted_stieltjes2(f, x, beta, cfg)
    return SampledFunction(x, out)


def _nested_s2(pair: SiePair, f, x, cfg) -> np.ndarray:
    """s2 pair through the weighted Hilbert operator applied twice.

    With b the weight exponent, the symbol factors as
    (c - d cot(pi(s + b)))^2 with (c, d) = (cos(pi b), sin(pi b)) for the
    inverse and (sin(pi a), cos(pi a)) with b = 0 for the forward map, so
    the map is c^2 I - (2 c d/pi) H_b + (d^2/pi^2) H_b H_b.
    """
    a, beta = pair.alpha, pair.weight_exponent()
    if pair.direction is Direction.FORWARD:
        c, d = math.sin(math.pi * a), math.cos(math.pi * a)
    else:
        c, d = math.cos(math.pi * beta), math.sin(math.pi * beta)
    # (c - d cot)^2 = c^2 - 2 c d cot + d^2 cot^2, and cot(pi(s + b)) acts as H_b / pi
    lin = -2 * c * d / math.pi
    fx = np.asarray(as_integrand(f)(x), dtype=complex)
    table = _weighted_table(f, x, beta, cfg)
    first = transforms.weighted_hilbert_pv(f, x, beta, cfg)
    second = transforms.weighted_hilbert_pv(table, x, beta, cfg)
    return c * c * fx + lin * first + (d * d / math.pi ** 2) * second


def _weighted_table(f, x, beta, cfg) -> SampledFunction:
    lo = math.log10(x.min()) - transforms.TABLE_PAD_DECADES
    hi = math.log10(x.max()) + transforms.TABLE_PAD_DECADES
    spec = as_integrand(f)
    per = transforms.TABLE_PER_DECADE
    if spec.support_min is not None and spec.support_max is not None:
        lo = max(lo, math.log10(spec.support_min) + 0.5 / per)
        hi = min(hi, math.log10(spec.support_max) - 0.5 / per)
    grid = np.logspace(lo, hi, int(math.ceil((hi - lo) * per)) + 1)
    return SampledFunction(grid, transforms.weighted_hilbert_pv(spec, grid, beta, cfg))


def apply_forward(pair: SiePair, f, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  method: str = "s2") -> SampledFunction:
    """h from f; ``method='nested'`` replaces the S2 term by two Hilbert passes."""
    return _apply(SiePair(pair.kind, pair.alpha, Direction.FORWARD), f, x_grid, cfg, method)


def apply_inverse(pair: SiePair, h, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG,
                  method: str = "s2") -> SampledFunction:
    """f from h.  The default keeps the log-kernel term; ``'nested'`` applies
    the weighted Hilbert operator twice instead."""
    return _apply(SiePair(pair.kind, pair.alpha, Direction.INVERSE), h, x_grid, cfg, method)


def apply(pair: SiePair, f, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG,
          method: str = "s2") -> SampledFunction:
    """Apply ``pair`` in its own direction."""
    return _apply(pair, f, x_grid, cfg, method)


def _wide(x):
    lo = math.log10(x.min()) - WIDE_PAD_DECADES
    hi = math.log10(x.max()) + WIDE_PAD_DECADES
    return np.logspace(lo, hi, int(math.ceil((hi - lo) * WIDE_PER_DECADE)) + 1)


def _rel_l2(approx, exact, x) -> float:
    diff = np.abs(approx - exact) ** 2 * x
    ref = np.abs(exact) ** 2 * x
    u = np.log(x)
    num = np.trapezoid(diff, u)
    den = np.trapezoid(ref, u)
    return float(math.sqrt(num / den)) if den > 0 else float(math.sqrt(num))


def roundtrip_check(pair: SiePair, f, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                    tolerance: float | None = None, method: str = "s2") -> VerificationReport:
    """Relative L2 error of inverse(forward f) and forward(inverse f) against f.

    The intermediate function is sampled on a grid reaching ten decades
    beyond ``x_grid`` and zero-extended past it.
    """
    pair = SiePair(pair.kind, pair.alpha)
    x = _grid(x_grid)
    if tolerance is None:
        if pair.degenerate:
            tolerance = 1e-10
        else:
            tolerance = 1e-3 if pair.kind is PairKind.HILBERT else 5e-3
    fx = np.asarray(as_integrand(f)(x), dtype=complex)
    # the identity needs no values off the grid, so skip the interpolation step
    wide = x if pair.degenerate else _wide(x)
    report = VerificationReport("roundtrip", grid={"x": [float(x.min()), float(x.max()), x.size]})
    label = getattr(f, "id", type(f).__name__)
    for name, first, second in (("inverse_after_forward", apply_forward, apply_inverse),
                                ("forward_after_inverse", apply_inverse, apply_forward)):
        middle = first(pair, f, wide, cfg, method)
        back = second(pair, middle, x, cfg, method)
        report.add(name, _rel_l2(back.values, fx, x), tolerance, metric="rel_l2_error",
                   inputs={"pair": pair.kind.value, "alpha": pair.alpha, "f": label,
                           "method": method})
    return report
