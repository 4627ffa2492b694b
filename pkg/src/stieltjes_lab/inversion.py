"""Recovering f from G = S2 f.

On the critical line S2 multiplies spectra by pi^2/cosh^2(pi tau), so the
exact inverse multiplier is

    Phi(tau) = cosh^2(pi tau)/pi^2 = (1 + cosh(2 pi tau)) / (2 pi^2).

Phi is entire in s and its Taylor partial sums P_n realise the inversion as
a series of even-order differential operators in x d/dx.  Both are applied
here on the spectrum side with a hard cut at |tau| > tau_cap, since Phi
amplifies noise like exp(2 pi |tau|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, InvalidInput
from .mellin import CriticalLineSpectrum, SampledFunction, mellin_inverse, sampled_l2_squared

PHI_TAU_LIMIT = 100.0


def phi_multiplier(tau):
    """Phi on the line, (1 + cosh(2 pi tau)) / (2 pi^2)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau) > PHI_TAU_LIMIT):
        raise OverflowError(f"Phi overflows the useful range beyond |tau| = {PHI_TAU_LIMIT:g}")
    out = (1.0 + np.cosh(2 * np.pi * tau)) / (2 * np.pi ** 2)
    return float(out) if out.ndim == 0 else out


def pn_multiplier(tau, n: int):
    """(1/pi^2)(1 + (1/2) sum_{k=1..n} (2 pi tau)^(2k) / (2k)!), the partial sums of Phi."""
    if int(n) != n or n < 0:
        raise InvalidInput("n must be a nonnegative integer")
    tau = np.asarray(tau, dtype=float)
    z2 = (2 * np.pi * tau) ** 2
    term = np.ones_like(z2)
    total = np.zeros_like(z2)
    for k in range(int(n)):
        term = term * z2 / ((2 * k + 1) * (2 * k + 2))
        total = total + term
    out = (1.0 + 0.5 * total) / np.pi ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class InversionConfig:
    """Series length, spectral cut and the noise model behind the cut.

    ``tolerance`` is the accuracy requested of the reconstruction; the cut
    must keep the amplified noise Phi(tau_cap) * noise_floor below it.
    """

    n_terms: int = 60
    tau_cap: float = 3.0
    noise_floor: float = 1e-12
    tolerance: float = 1e-4

    def __post_init__(self):
        if int(self.n_terms) != self.n_terms or self.n_terms < 0:
            raise InvalidInput("n_terms must be a nonnegative integer")
        if not self.tau_cap > 0:
            raise InvalidInput("tau_cap must be positive")
        if not self.noise_floor >= 0 or not self.tolerance > 0:
            raise InvalidInput("noise_floor must be >= 0 and tolerance > 0")
        amplified = phi_multiplier(min(self.tau_cap, PHI_TAU_LIMIT)) * self.noise_floor
        if self.tau_cap > PHI_TAU_LIMIT or amplified > self.tolerance:
            raise IllConditioned(
                f"Phi(tau_cap={self.tau_cap:g}) * noise_floor = {amplified:.3g} exceeds "
                f"tolerance {self.tolerance:g}; lower tau_cap")

    def replace(self, **changes) -> "InversionConfig":
        return InversionConfig(**{**self.__dict__, **changes})


def _band(G: CriticalLineSpectrum, tau_cap: float) -> np.ndarray:
    return np.abs(G.tau) <= tau_cap * (1 + 1e-12)


def recovered_spectrum(G_spec: CriticalLineSpectrum, cfg: InversionConfig = InversionConfig(),
                       n: int | None = None) -> CriticalLineSpectrum:
    """Phi * G (or P_n * G when ``n`` is given), zeroed outside |tau| <= tau_cap."""
    band = _band(G_spec, cfg.tau_cap)
    tau = np.where(band, G_spec.tau, 0.0)
    mult = phi_multiplier(tau) if n is None else pn_multiplier(tau, n)
    return G_spec.with_values(np.where(band, mult * G_spec.values, 0.0))


def invert_spectral(G_spec: CriticalLineSpectrum, cfg: InversionConfig = InversionConfig(),
                    x_grid=None) -> SampledFunction:
    """f from its S2 spectrum by the exact inverse multiplier."""
    return mellin_inverse(recovered_spectrum(G_spec, cfg), _grid(x_grid))


def invert_series(G_spec: CriticalLineSpectrum, n: int | None = None,
                  x_grid=None, cfg: InversionConfig = InversionConfig()) -> SampledFunction:
    """n-term series inversion applied on the spectrum side (no numerical derivatives)."""
    n = cfg.n_terms if n is None else n
    return mellin_inverse(recovered_spectrum(G_spec, cfg, n), _grid(x_grid))


def _grid(x_grid):
    if x_grid is None:
        from .mellin import geometric_grid
        return geometric_grid(0.1, 10.0, 64)
    return x_grid


def relative_l2_error(approx: SampledFunction, reference) -> float:
    """Grid L2 error of ``approx`` against ``reference`` (callable or values), relative."""
    ref = reference(approx.x) if callable(reference) else np.asarray(reference)
    ref_fn = SampledFunction(approx.x, ref)
    norm = sampled_l2_squared(ref_fn)
    err = sampled_l2_squared(SampledFunction(approx.x, approx.values - ref))
    if norm == 0:
        return math.sqrt(err)
    return math.sqrt(err / norm)


@dataclass(frozen=True)
class ConvergenceProfile:
    n: tuple
    l2_error: tuple
    monotone: bool
    plateau: float

    def to_list(self) -> list:
        return [{"n": n, "l2_error": e} for n, e in zip(self.n, self.l2_error)]


def convergence_profile(G_spec: CriticalLineSpectrum, reference, x_grid=None, n_max: int = 60,
                        cfg: InversionConfig = InversionConfig(), *,
                        slack: float = 1e-12) -> ConvergenceProfile:
    """Relative L2 error of the n-term reconstruction for n = 0..n_max.

    ``monotone`` is true when no step increases the error by more than
    ``slack`` (relative); ``plateau`` is the final error.
    """
    x = _grid(x_grid)
    errors = []
    for n in range(int(n_max) + 1):
        errors.append(relative_l2_error(invert_series(G_spec, n, x, cfg), reference))
    errs = np.array(errors)
    monotone = bool(np.all(np.diff(errs) <= slack * np.maximum(errs[:-1], 1e-300)))
    return ConvergenceProfile(tuple(range(int(n_max) + 1)), tuple(errors), monotone,
                              float(errs[-1]))
