"""Mellin calculus on the critical line Re s = 1/2.

Spectra are stored as samples of ``f*(1/2 + i tau)`` on a symmetric uniform
tau grid; functions on the half-axis as samples on a positive grid with a
cubic interpolant in ``log x``.
"""

from __future__ import annotations

import csv
import io
import math
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridMismatch, InvalidInput
from .numerics import (DEFAULT_CONFIG, DecayHint, Integrand, QuadratureConfig,
                       as_integrand, integrate_logspace)

DEFAULT_TAU_MAX = 20.0
DEFAULT_TAU_STEP = 0.05
# boundary weight |f| sqrt(x) above this fraction of its peak flags truncation
TRUNCATION_FLAG_LEVEL = 1e-8


def tau_grid(tau_max: float = DEFAULT_TAU_MAX, step: float = DEFAULT_TAU_STEP) -> np.ndarray:
    if not (tau_max > 0 and step > 0):
        raise InvalidInput("tau_max and step must be positive")
    n = int(round(tau_max / step))
    return np.arange(-n, n + 1) * step


def geometric_grid(xmin: float, xmax: float, n: int) -> np.ndarray:
    if not (0 < xmin < xmax) or n < 2:
        raise InvalidInput("geometric grid needs 0 < xmin < xmax and n >= 2")
    return np.geomspace(xmin, xmax, int(n))


def wide_grid(decades: float = 10.0, per_decade: int = 40, center: float = 1.0) -> np.ndarray:
    """Geometric grid covering ``center * 10^[-decades, decades]``."""
    n = int(round(2 * decades * per_decade)) + 1
    return center * np.logspace(-decades, decades, n)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    x: np.ndarray
    values: np.ndarray
    interp: str = "cubic-log"

    def __post_init__(self):
        x = np.array(self.x, dtype=float).ravel()
        v = np.array(self.values, dtype=complex).ravel()
        if x.size == 0:
            raise InvalidInput("sampled function needs at least one abscissa")
        if x.shape != v.shape:
            raise InvalidInput("x and values must have the same length")
        if np.any(~np.isfinite(x)) or np.any(x <= 0):
            raise InvalidInput("abscissae must be finite and positive")
        if np.any(np.diff(x) <= 0):
            raise InvalidInput("abscissae must be strictly increasing")
        if self.interp != "cubic-log":
            raise InvalidInput(f"unsupported interpolation {self.interp!r}")
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @property
    def is_real(self) -> bool:
        return not np.any(self.values.imag)

    @cached_property
    def _spline(self):
        data = self.values.real if self.is_real else self.values
        if self.x.size == 1:
            return lambda u: np.full(np.shape(u), data[0])
        return CubicSpline(np.log(self.x), data)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.x[0]) & (t <= self.x[-1])
        dtype = float if self.is_real else complex
        out = np.zeros(t.shape, dtype=dtype)
        if np.any(inside):
            out[inside] = self._spline(np.log(t[inside]))
        return out

    def as_integrand(self) -> Integrand:
        return Integrand(self.__call__, DecayHint.UNKNOWN, support_min=float(self.x[0]),
                         support_max=float(self.x[-1]))

    def boundary_weight(self) -> float:
        """Largest end-point value of |f| sqrt(x), relative to its peak."""
        w = np.abs(self.values) * np.sqrt(self.x)
        peak = w.max()
        return 0.0 if peak == 0 else float(max(w[0], w[-1]) / peak)


@dataclass(frozen=True, eq=False)
class CriticalLineSpectrum:
    tau: np.ndarray
    values: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        tau = np.array(self.tau, dtype=float).ravel()
        v = np.array(self.values, dtype=complex).ravel()
        if tau.shape != v.shape:
            raise InvalidInput("tau and values must have the same length")
        if tau.size < 3 or tau.size % 2 == 0:
            raise InvalidInput("tau grid must be symmetric about 0 with an odd point count")
        step = (tau[-1] - tau[0]) / (tau.size - 1)
        if step <= 0 or not np.allclose(np.diff(tau), step, rtol=1e-9, atol=0):
            raise InvalidInput("tau grid must be uniform and increasing")
        if not np.allclose(tau, -tau[::-1], rtol=0, atol=1e-9 * step):
            raise InvalidInput("tau grid must be symmetric about 0")
        tau.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "values", v)

    @property
    def step(self) -> float:
        return float((self.tau[-1] - self.tau[0]) / (self.tau.size - 1))

    @property
    def tau_max(self) -> float:
        return float(self.tau[-1])

    @property
    def s(self) -> np.ndarray:
        return 0.5 + 1j * self.tau

    def weights(self) -> np.ndarray:
        """Trapezoidal weights on the tau grid."""
        w = np.full(self.tau.size, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    def with_values(self, values) -> "CriticalLineSpectrum":
        return CriticalLineSpectrum(self.tau, values, self.truncated)

    def same_grid(self, other: "CriticalLineSpectrum") -> bool:
        return self.tau.size == other.tau.size and bool(
            np.allclose(self.tau, other.tau, rtol=0, atol=1e-12 * max(1.0, self.tau_max)))

    def require_same_grid(self, other: "CriticalLineSpectrum"):
        if not self.same_grid(other):
            raise GridMismatch("spectra live on different tau grids")

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.values[::-1] - np.conj(self.values))))

    def reflected(self) -> np.ndarray:
        """Values at 1/2 - i tau."""
        return self.values[::-1]


def _validate_tau(tau) -> np.ndarray:
    if isinstance(tau, CriticalLineSpectrum):
        return tau.tau
    return CriticalLineSpectrum(tau, np.zeros(np.size(tau))).tau


def mellin_forward(f, tau=None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> CriticalLineSpectrum:
    """Spectrum ``int_0^inf f(t) t^(s-1) dt`` at s = 1/2 + i tau for each grid tau."""
    tau = _validate_tau(tau_grid() if tau is None else tau)
    truncated = False
    if isinstance(f, SampledFunction):
        bps = (math.log(f.x[0]), math.log(f.x[-1]))
        if f.x.size == 1:
            raise InvalidInput("cannot transform a single sample")
        truncated = f.boundary_weight() > TRUNCATION_FLAG_LEVEL
        if truncated:
            warnings.warn("zero extension of sampled data truncates non-negligible mass",
                          RuntimeWarning, stacklevel=2)
        func = f.as_integrand()
    else:
        bps = (-math.inf, 0.0, math.inf)
        func = as_integrand(f)

    def g(u):
        weight = func(np.exp(u)) * np.exp(0.5 * u)
        return weight[None, :] * np.exp(1j * tau[:, None] * u[None, :])

    values, _ = integrate_logspace(g, bps, cfg)
    return CriticalLineSpectrum(tau, values, truncated)


def _x_points(x_grid) -> np.ndarray:
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0:
        raise InvalidInput("x grid is empty")
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise InvalidInput("x grid must be positive")
    return x


def inverse_values(F: CriticalLineSpectrum, x, chunk: int = 512) -> np.ndarray:
    """``(1/2pi) int F(tau) x^(-1/2 - i tau) dtau`` by the trapezoidal rule."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    weighted = F.values * F.weights() / (2.0 * math.pi)
    out = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, chunk):
        lx = np.log(flat[start:start + chunk])
        phase = np.outer(lx, F.tau)
        kernel = np.cos(phase) - 1j * np.sin(phase)
        out[start:start + chunk] = np.exp(-0.5 * lx) * (kernel @ weighted)
    return out.reshape(x.shape)


def mellin_inverse(F: CriticalLineSpectrum, x_grid) -> SampledFunction:
    x = _x_points(x_grid)
    return SampledFunction(x, inverse_values(F, x))


def _is_log_uniform(x: np.ndarray) -> bool:
    if x.size < 3:
        return False
    d = np.diff(np.log(x))
    return bool(np.allclose(d, d[0], rtol=1e-8, atol=0))


def sampled_l2_squared(f: SampledFunction) -> float:
    """``int |f|^2 dx`` over the sampled range, integrating in u = log x."""
    u = np.log(f.x)
    y = np.abs(f.values) ** 2 * f.x
    if f.x.size < 2:
        return 0.0
    if _is_log_uniform(f.x):
        return float(np.trapezoid(y, u))
    return float(CubicSpline(u, y).integrate(u[0], u[-1]))


def spectrum_l2_squared(F: CriticalLineSpectrum) -> float:
    """``(1/2pi) int |F|^2 dtau``."""
    return float(np.sum(np.abs(F.values) ** 2 * F.weights()) / (2.0 * math.pi))


def parseval_l2(f: SampledFunction, F: CriticalLineSpectrum) -> tuple[float, float]:
    return sampled_l2_squared(f), spectrum_l2_squared(F)


def parseval_pairing(F: CriticalLineSpectrum, G: CriticalLineSpectrum, x: float) -> complex:
    """``(1/2pi) int F(1/2 + i tau) G(1/2 - i tau) x^(-1/2 - i tau) dtau``."""
    F.require_same_grid(G)
    if not x > 0:
        raise InvalidInput("x must be positive")
    product = F.with_values(F.values * G.reflected())
    return complex(inverse_values(product, np.array(x)))


# CSV serialisation -----------------------------------------------------------

def _format(v: float) -> str:
    return repr(float(v))


def _to_csv(header: str, abscissa: np.ndarray, values: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header.split(","))
    for a, v in zip(abscissa, values):
        writer.writerow([_format(a), _format(v.real), _format(v.imag)])
    return buf.getvalue()


def write_text_atomic(path, text: str):
    """Write ``text`` to ``path`` via a temp file and rename; '-' means stdout."""
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sampled_to_csv(f: SampledFunction) -> str:
    return _to_csv("x,re,im", f.x, f.values)


def spectrum_to_csv(F: CriticalLineSpectrum) -> str:
    return _to_csv("tau,re,im", F.tau, F.values)


def write_sampled_csv(path, f: SampledFunction):
    write_text_atomic(path, sampled_to_csv(f))


def write_spectrum_csv(path, F: CriticalLineSpectrum):
    write_text_atomic(path, spectrum_to_csv(F))


def _read_columns(path, first: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidInput(f"{path}: empty CSV")
    header = [h.strip() for h in rows[0]]
    if header != [first, "re", "im"]:
        raise InvalidInput(f"{path}: expected header '{first},re,im', got {','.join(header)}")
    try:
        data = np.array([[float(c) for c in row] for row in rows[1:] if row], dtype=float)
    except ValueError as exc:
        raise InvalidInput(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != 3:
        raise InvalidInput(f"{path}: every row needs three columns")
    return data[:, 0], data[:, 1] + 1j * data[:, 2]


def read_sampled_csv(path) -> SampledFunction:
    x, v = _read_columns(path, "x")
    return SampledFunction(x, v)


def read_spectrum_csv(path) -> CriticalLineSpectrum:
    tau, v = _read_columns(path, "tau")
    return CriticalLineSpectrum(tau, v)
