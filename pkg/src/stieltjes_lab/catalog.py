"""Closed-form test functions with exact Mellin transforms.

Each entry carries its exact spectrum and, where one is known, exact values
of the Hilbert, Stieltjes and iterated Stieltjes transforms.  Condition
flags record which square-integrability hypotheses hold, each with the
reason it holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Optional

import numpy as np
from scipy.special import exp1, expi

from .errors import UnknownEntry
from .mellin import CriticalLineSpectrum, geometric_grid, tau_grid
from .numerics import DEFAULT_CONFIG, DecayHint, Integrand, QuadratureConfig
from .report import VerificationReport
from .special import complex_gamma

FLAGS = ("sf*_in_L2", "sf*_in_L1", "f_in_L2")


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    description: str
    f: Callable[[np.ndarray], np.ndarray]
    mellin: Callable[[np.ndarray], np.ndarray]
    conditions: Mapping[str, str]
    decay_hint: DecayHint = DecayHint.UNKNOWN
    power: Optional[float] = None
    hilbert: Optional[Callable] = None
    stieltjes: Optional[Callable] = None
    stieltjes2: Optional[Callable] = None
    known_transforms: tuple = field(init=False)

    def __post_init__(self):
        for flag, why in self.conditions.items():
            if flag not in FLAGS:
                raise ValueError(f"unknown condition flag {flag!r}")
            if not why or not why.strip():
                raise ValueError(f"flag {flag!r} on {self.id!r} lacks a justification")
        object.__setattr__(self, "conditions", MappingProxyType(dict(self.conditions)))
        known = tuple(k for k in ("hilbert", "stieltjes", "stieltjes2")
                      if getattr(self, k) is not None)
        object.__setattr__(self, "known_transforms", known)

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))

    @property
    def flags(self) -> frozenset:
        return frozenset(self.conditions)

    @property
    def is_zero(self) -> bool:
        return self.id == "zero"

    def as_integrand(self) -> Integrand:
        return Integrand(self.__call__, self.decay_hint, self.power)

    def spectrum(self, tau=None) -> CriticalLineSpectrum:
        tau = tau_grid() if tau is None else np.asarray(tau, dtype=float)
        return CriticalLineSpectrum(tau, self.mellin(0.5 + 1j * tau))


# helpers ---------------------------------------------------------------------

def _log_ratio(x):
    """log(x) / (x - 1) with its removable point at x = 1."""
    u = np.asarray(x, dtype=float) - 1.0
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 - u / 2 + u * u / 3 - u ** 3 / 4, np.log1p(safe) / safe)


def _cauchy2_stieltjes(x):
    # ((x - 1) - log x) / (x - 1)^2
    u = np.asarray(x, dtype=float) - 1.0
    small = np.abs(u) < 0.05
    safe = np.where(small, 1.0, u)
    direct = (safe - np.log1p(safe)) / safe ** 2
    series = np.zeros_like(u)
    for k in range(14):
        series = series + (-u) ** k / (k + 2)
    return np.where(small, series, direct)


def _scaled_asymptotic(x, sign):
    # sum_k k! (sign/x)^k / x, the large-x form of e^x E1(x) (sign -1)
    # and e^-x Ei(x) (sign +1)
    total = np.zeros_like(x)
    term = 1.0 / x
    for k in range(12):
        total = total + term
        term = term * (k + 1) * sign / x
    return total


def _exp_stieltjes(x):
    x = np.asarray(x, dtype=float)
    big = x > 400
    safe = np.where(big, 1.0, x)
    return np.where(big, _scaled_asymptotic(np.where(big, x, 1.0), -1.0), np.exp(safe) * exp1(safe))


def _exp_hilbert(x):
    x = np.asarray(x, dtype=float)
    big = x > 400
    safe = np.where(big, 1.0, x)
    return -np.where(big, _scaled_asymptotic(np.where(big, x, 1.0), 1.0), np.exp(-safe) * expi(safe))


def _zeros(t):
    return np.zeros(np.shape(t))


_GAUSS_LOG_DECAY = "f*(1/2+i tau) = sqrt(pi) exp((1/4 - tau^2 + i tau)/4) decays like a Gaussian"

_REGISTRY = {
    "cauchy": CatalogEntry(
        id="cauchy",
        description="f(t) = 1/(1+t)",
        f=lambda t: 1.0 / (1.0 + t),
        mellin=lambda s: np.pi / np.sin(np.pi * s),
        conditions={
            "sf*_in_L2": "|s f*(s)| = |s| pi / cosh(pi tau) decays exponentially on the line",
            "sf*_in_L1": "same exponential decay of pi |s| / cosh(pi tau)",
            "f_in_L2": "int_0^inf dt/(1+t)^2 = 1",
        },
        decay_hint=DecayHint.ALGEBRAIC, power=1.0,
        hilbert=lambda x: -np.log(x) / (1.0 + x),
        stieltjes=_log_ratio,
        stieltjes2=lambda x: (np.pi ** 2 + np.log(x) ** 2) / (2.0 * (1.0 + x)),
    ),
    "exp": CatalogEntry(
        id="exp",
        description="f(t) = exp(-t)",
        f=lambda t: np.exp(-t),
        mellin=lambda s: complex_gamma(s),
        conditions={
            "sf*_in_L2": "|Gamma(1/2 + i tau)| = sqrt(pi / cosh(pi tau)), so s Gamma(s) decays exponentially",
            "sf*_in_L1": "same exponential decay of |s Gamma(s)|",
            "f_in_L2": "int_0^inf exp(-2t) dt = 1/2",
        },
        decay_hint=DecayHint.EXPONENTIAL,
        hilbert=_exp_hilbert,
        stieltjes=_exp_stieltjes,
    ),
    "cauchy2": CatalogEntry(
        id="cauchy2",
        description="f(t) = 1/(1+t)^2",
        f=lambda t: 1.0 / (1.0 + t) ** 2,
        mellin=lambda s: (1.0 - s) * np.pi / np.sin(np.pi * s),
        conditions={
            "sf*_in_L2": "|s (1-s) pi / sin(pi s)| grows only polynomially against exp(-pi |tau|)",
            "sf*_in_L1": "same exponential decay",
            "f_in_L2": "int_0^inf dt/(1+t)^4 = 1/3",
        },
        decay_hint=DecayHint.ALGEBRAIC, power=2.0,
        hilbert=lambda x: -np.log(x) / (1.0 + x) ** 2 - 1.0 / (1.0 + x),
        stieltjes=_cauchy2_stieltjes,
    ),
    "gauss_log": CatalogEntry(
        id="gauss_log",
        description="f(t) = exp(-(log t)^2)",
        f=lambda t: np.exp(-np.log(t) ** 2),
        mellin=lambda s: math.sqrt(math.pi) * np.exp(s * s / 4.0),
        conditions={
            "sf*_in_L2": _GAUSS_LOG_DECAY,
            "sf*_in_L1": _GAUSS_LOG_DECAY,
            "f_in_L2": "int exp(-2 u^2 + u) du is finite (u = log t)",
        },
        decay_hint=DecayHint.EXPONENTIAL,
    ),
    "zero": CatalogEntry(
        id="zero",
        description="f(t) = 0",
        f=_zeros,
        mellin=lambda s: np.zeros(np.shape(s), dtype=complex),
        conditions={
            "sf*_in_L2": "the zero spectrum",
            "sf*_in_L1": "the zero spectrum",
            "f_in_L2": "the zero function",
        },
        decay_hint=DecayHint.EXPONENTIAL,
        hilbert=_zeros, stieltjes=_zeros, stieltjes2=_zeros,
    ),
}


def get(id: str) -> CatalogEntry:
    try:
        return _REGISTRY[id]
    except KeyError:
        raise UnknownEntry(f"no catalog entry {id!r}; known: {', '.join(_REGISTRY)}") from None


def ids() -> list:
    return list(_REGISTRY)


def entries() -> list:
    return list(_REGISTRY.values())


def nonzero_pairs(flag: str = "sf*_in_L2") -> list:
    """Unordered pairs (with repeats) of nonzero entries carrying ``flag``."""
    pool = [e for e in entries() if not e.is_zero and flag in e.flags]
    return [(a, b) for i, a in enumerate(pool) for b in pool[i:]]


def listing() -> list:
    return [{"id": e.id, "description": e.description,
             "known_transforms": list(e.known_transforms),
             "conditions": dict(e.conditions)} for e in entries()]


def _rel_error(num, exact) -> float:
    num = np.asarray(num)
    exact = np.asarray(exact)
    scale = np.max(np.abs(exact)) if exact.size else 0.0
    if scale == 0:
        return float(np.max(np.abs(num), initial=0.0))
    denom = np.maximum(np.abs(exact), 1e-6 * scale)
    return float(np.max(np.abs(num - exact) / denom))


def verify_entry(id: str, cfg: QuadratureConfig = DEFAULT_CONFIG, *, tolerance: float = 1e-6,
                 x_grid=None, tau=None) -> VerificationReport:
    """Check an entry's closed forms against the numerical operators."""
    from . import transforms
    from .mellin import mellin_forward

    entry = get(id)
    x = geometric_grid(0.1, 10.0, 64) if x_grid is None else np.asarray(x_grid, dtype=float)
    tau = np.arange(-5, 6, dtype=float) if tau is None else np.asarray(tau, dtype=float)
    report = VerificationReport(f"catalog:{id}", grid={"x": [float(x[0]), float(x[-1]), x.size],
                                                        "tau": [float(tau[0]), float(tau[-1]), tau.size]})
    numeric = mellin_forward(entry, tau, cfg)
    report.add("mellin", _rel_error(numeric.values, entry.mellin(0.5 + 1j * tau)), tolerance,
               inputs={"entry": id})
    operators = {"hilbert": transforms.hilbert, "stieltjes": transforms.stieltjes,
                 "stieltjes2": transforms.stieltjes2}
    for name in entry.known_transforms:
        exact = getattr(entry, name)(x)
        num = operators[name](entry, x, cfg=cfg)
        report.add(name, _rel_error(num, exact), tolerance, inputs={"entry": id})
    return report
