"""Convolution for the iterated Stieltjes transform.

With spectra F, G on the critical line the convolution is

    (f*g)(x) = sqrt(x)/(4 pi^2) int int pi^2 (1 + tanh(pi tau) tanh(pi theta))^2
               F(tau) G(theta) x^(-1 - i(tau + theta)) dtau dtheta,

its spectrum is

    (f*g)*(1/2 + i sigma) = (pi/2) int (1 + tanh(pi theta) tanh(pi(sigma - theta)))^2
                            F(sigma - theta) G(theta) dtheta,

and pointwise it equals

    pi^2 sqrt(x) [f g - (2/pi^2) Hf Hg + (1/pi^4) H^2 f H^2 g].

S2 turns it into a product: S2(f*g) = sqrt(x) S2f S2g.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .catalog import CatalogEntry
from .errors import GammaOverflow, InvalidInput
from .mellin import (CriticalLineSpectrum, SampledFunction, geometric_grid, mellin_forward,
                     sampled_l2_squared, tau_grid)
from .numerics import DEFAULT_CONFIG, QuadratureConfig
from .report import VerificationReport
from .special import log_gamma
from . import transforms

# samples per decade and padding used when a convolution must be known off the grid
WIDE_PER_DECADE = 40
WIDE_PAD_DECADES = 10.0


class ConvolutionMethod(enum.Enum):
    MELLIN_BARNES_DOUBLE = "mellin_barnes_double"
    POINTWISE_TRIPLE = "pointwise_triple"


class KernelForm(enum.Enum):
    GAMMA_RATIO = "gamma_ratio"
    TRIG_SIMPLIFIED = "trig_simplified"


@dataclass(frozen=True)
class ConvolutionResult:
    values: SampledFunction
    method: ConvolutionMethod
    kernel_form: KernelForm = KernelForm.TRIG_SIMPLIFIED

    @property
    def x(self) -> np.ndarray:
        return self.values.x

    def __call__(self, x):
        return self.values(x)


# kernel ------------------------------------------------------------------------

def kernel_gamma_ratio(s, w):
    """Gamma(s)Gamma(1-s)Gamma(w)Gamma(1-w) / (Gamma(s+w-1/2) Gamma(3/2-s-w))."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z = s + w - 0.5
    log_ratio = (log_gamma(s, strict=True) + log_gamma(1 - s, strict=True)
                 + log_gamma(w, strict=True) + log_gamma(1 - w, strict=True)
                 - log_gamma(z, strict=True) - log_gamma(1 - z, strict=True))
    return np.exp(log_ratio)


def kernel_trig(s, w):
    """pi (1 - cot(pi s) cot(pi w))."""
    s = np.asarray(s, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.pi * (1.0 - 1.0 / (np.tan(np.pi * s) * np.tan(np.pi * w)))


def kernel_identity_check(s, w) -> float:
    """Max |gamma ratio - pi(1 - cot(pi s)cot(pi w))| over the given points."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if np.any(np.abs(s.real - 0.5) > 1e-12) or np.any(np.abs(w.real - 0.5) > 1e-12):
        raise InvalidInput("kernel identity is checked on the critical line only")
    if np.any(np.abs(s.imag + w.imag) > 50):
        raise GammaOverflow("Im(s + w) leaves the accurate gamma strip")
    # cot(pi/2 + i y) = -i tanh(pi y) avoids tan's pole at s = 1/2
    cot_s = -1j * np.tanh(np.pi * s.imag)
    cot_w = -1j * np.tanh(np.pi * w.imag)
    trig = np.pi * (1.0 - cot_s * cot_w)
    return float(np.max(np.abs(kernel_gamma_ratio(s, w) - trig)))


def _line_kernel(tau, theta):
    # pi^2 (1 + tanh(pi tau) tanh(pi theta))^2, the squared kernel on the line
    return np.pi ** 2 * (1.0 + np.multiply.outer(np.tanh(np.pi * tau), np.tanh(np.pi * theta))) ** 2


# convolution methods -------------------------------------------------------------

def _spectrum_of(f, tau=None) -> CriticalLineSpectrum:
    if isinstance(f, CriticalLineSpectrum):
        return f
    if isinstance(f, CatalogEntry):
        return f.spectrum(tau)
    return mellin_forward(f, tau)


def convolve_mb(F, G, x_grid) -> ConvolutionResult:
    """Tensor-product trapezoid evaluation of the double Mellin-Barnes integral."""
    F = _spectrum_of(F)
    G = _spectrum_of(G, F.tau)
    F.require_same_grid(G)
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0 or np.any(~(x > 0)):
        raise InvalidInput("x grid must be non-empty and positive")
    K = _line_kernel(F.tau, G.tau)
    a_w = F.values * F.weights()
    b_w = G.values * G.weights()
    out = np.empty(x.size, dtype=complex)
    for start in range(0, x.size, 256):
        lx = np.log(x[start:start + 256])
        a = a_w[None, :] * np.exp(-1j * np.outer(lx, F.tau))
        b = b_w[None, :] * np.exp(-1j * np.outer(lx, G.tau))
        inner = b @ K.T
        out[start:start + 256] = np.exp(-0.5 * lx) * np.sum(a * inner, axis=1) / (4 * np.pi ** 2)
    return ConvolutionResult(SampledFunction(x, out), ConvolutionMethod.MELLIN_BARNES_DOUBLE)


def _transform_pair(f, x, cfg):
    """(f, Hf, H^2 f) on x; closed forms are not used so the check stays numeric."""
    if isinstance(f, CatalogEntry) and f.is_zero:
        z = np.zeros(x.size, dtype=complex)
        return z, z, z
    fx = np.asarray(f(x), dtype=complex)
    hf = transforms.hilbert(f, x, cfg=cfg)
    h2f = transforms.hilbert2(f, x, cfg=cfg)
    return fx, hf, h2f


def convolve_pointwise(f, g, x_grid, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ConvolutionResult:
    """Three-product formula built from f, Hf and H^2 f (and the same for g)."""
    x = np.asarray(x_grid, dtype=float).ravel()
    if x.size == 0 or np.any(~(x > 0)):
        raise InvalidInput("x grid must be non-empty and positive")
    pf = _transform_pair(f, x, cfg)
    pg = pf if g is f else _transform_pair(g, x, cfg)
    values = np.pi ** 2 * np.sqrt(x) * (pf[0] * pg[0] - (2 / np.pi ** 2) * pf[1] * pg[1]
                                        + pf[2] * pg[2] / np.pi ** 4)
    return ConvolutionResult(SampledFunction(x, values), ConvolutionMethod.POINTWISE_TRIPLE)


def convolve_spectrum(F: CriticalLineSpectrum, G: CriticalLineSpectrum) -> CriticalLineSpectrum:
    """Spectrum of f*g on F's grid; F and G are taken as zero off the grid."""
    F.require_same_grid(G)
    n = F.tau.size
    idx = np.arange(n)
    # sigma_m - theta_j lands on grid index m - j + (n - 1)/2
    shift = idx[:, None] - idx[None, :] + (n - 1) // 2
    valid = (shift >= 0) & (shift < n)
    Fm = np.where(valid, F.values[np.clip(shift, 0, n - 1)], 0.0)
    diff = F.tau[:, None] - G.tau[None, :]
    kern = (1.0 + np.tanh(np.pi * G.tau)[None, :] * np.tanh(np.pi * diff)) ** 2
    values = 0.5 * np.pi * F.step * np.sum(kern * Fm * G.values[None, :], axis=1)
    return CriticalLineSpectrum(F.tau, values, F.truncated or G.truncated)


def wide_support_grid(x_grid, per_decade: int = WIDE_PER_DECADE,
                      pad_decades: float = WIDE_PAD_DECADES) -> np.ndarray:
    """Geometric grid reaching ``pad_decades`` beyond the range of ``x_grid``."""
    x = np.asarray(x_grid, dtype=float)
    lo = math.log10(x.min()) - pad_decades
    hi = math.log10(x.max()) + pad_decades
    return np.logspace(lo, hi, int(math.ceil((hi - lo) * per_decade)) + 1)


def sampled_convolution(f, g, x_grid, cfg: QuadratureConfig = DEFAULT_CONFIG,
                        method: str = "pointwise") -> SampledFunction:
    """f*g sampled on a wide geometric grid around ``x_grid`` for later transforms."""
    grid = wide_support_grid(x_grid)
    if method == "pointwise":
        return convolve_pointwise(f, g, grid, cfg).values
    return convolve_mb(f, g, grid).values


def truncation_bias(h: SampledFunction, x) -> np.ndarray:
    """Rough size of the S2 contribution lost by zero-extending ``h`` beyond its samples.

    Each tail is modelled as a power law through the last two samples and
    integrated against the log kernel frozen at the end point.
    """
    x = np.asarray(x, dtype=float)
    u = np.log(h.x)
    a = np.abs(h.values)
    bias = np.zeros(x.shape)
    for end, inner in ((0, 1), (-1, -2)):
        if a[end] == 0:
            continue
        power = (math.log(a[end]) - math.log(max(a[inner], 1e-300))) / (u[end] - u[inner])
        # tail integral of a_end (t/t_end)^power, below t_0 or above t_N
        decay = power + 1.0 if end == 0 else -power - 1.0
        mass = a[end] * h.x[end] / decay if decay > 0 else math.inf
        t = h.x[end]
        bias = bias + mass * np.abs(np.log(x / t) / (x - t))
    return bias


def _flags_ok(*entries):
    for e in entries:
        if isinstance(e, CatalogEntry) and not {"sf*_in_L2", "sf*_in_L1"} <= e.flags:
            raise InvalidInput(f"{e.id} lacks the square- and absolute-integrability flags")


def _max_rel(num, ref) -> float:
    num = np.asarray(num)
    ref = np.asarray(ref)
    scale = float(np.max(np.abs(ref), initial=0.0))
    diff = float(np.max(np.abs(num - ref), initial=0.0))
    return diff if scale == 0 else diff / scale


def _label(f) -> str:
    return getattr(f, "id", type(f).__name__)


def factorization_check(f, g, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                        tolerance: float = 1e-3) -> VerificationReport:
    """Compare S2(f*g) with sqrt(x) S2f S2g on ``x_grid``."""
    _flags_ok(f, g)
    x = geometric_grid(0.5, 2.0, 16) if x_grid is None else np.asarray(x_grid, dtype=float)
    report = VerificationReport("factorization", grid={"x": [float(x.min()), float(x.max()), x.size]})
    inputs = {"f": _label(f), "g": _label(g)}
    if getattr(f, "is_zero", False) or getattr(g, "is_zero", False):
        report.add(f"{_label(f)}*{_label(g)}", 0.0, tolerance, inputs=inputs)
        return report
    h = sampled_convolution(f, g, x, cfg)
    left = transforms.stieltjes2(h, x, cfg=cfg)
    s2f = transforms.stieltjes2(f, x, cfg=cfg)
    s2g = s2f if g is f else transforms.stieltjes2(g, x, cfg=cfg)
    right = np.sqrt(x) * s2f * s2g
    scale = float(np.max(np.abs(right)))
    bias = float(np.max(truncation_bias(h, x))) / scale if scale > 0 else 0.0
    inputs["truncation_bias"] = bias
    report.add(f"{_label(f)}*{_label(g)}", _max_rel(left, right), tolerance + bias,
               metric="max_normalized_error", inputs=inputs)
    return report


def lemma_norm(F: CriticalLineSpectrum) -> float:
    """(int |(1/2 + i tau) F(tau)|^2 dtau)^(1/2) by the trapezoidal rule."""
    return float(np.sqrt(np.sum(np.abs(F.s * F.values) ** 2 * F.weights())))


def bounds_check(f, g, x_grid=None, tau=None) -> VerificationReport:
    """Pointwise and L2 norm bounds on f*g as strict ratio cases (< 1 passes).

    The pointwise case uses the double integral on ``x_grid``; the L2 case
    uses the convolution spectrum with Parseval's equality.
    """
    _flags_ok(f, g)
    x = geometric_grid(0.1, 10.0, 64) if x_grid is None else np.asarray(x_grid, dtype=float)
    F = _spectrum_of(f, tau)
    G = _spectrum_of(g, F.tau)
    nf, ng = lemma_norm(F), lemma_norm(G)
    report = VerificationReport("bounds", grid={"x": [float(x.min()), float(x.max()), x.size],
                                                "tau_max": F.tau_max, "tau_step": F.step})
    name = f"{_label(f)}*{_label(g)}"
    inputs = {"f": _label(f), "g": _label(g)}
    conv = convolve_mb(F, G, x).values
    lhs = float(np.max(np.sqrt(x) * np.abs(conv.values)))
    rhs = 2 * np.pi * nf * ng
    pointwise = lhs / rhs if rhs > 0 else 0.0
    H = convolve_spectrum(F, G)
    l2 = float(np.sum(np.abs(H.values) ** 2 * H.weights()) / (2 * np.pi))
    bound = 16 * np.pi ** 2 * nf ** 2 * ng ** 2
    ratio = l2 / bound if bound > 0 else 0.0
    zero = rhs == 0
    report.add(f"{name}:pointwise", pointwise, 1.0, metric="bound_ratio", strict=not zero,
               inputs={**inputs, "lhs": lhs, "rhs": rhs})
    report.add(f"{name}:l2", ratio, 1.0, metric="bound_ratio", strict=not zero,
               inputs={**inputs, "lhs": l2, "rhs": bound})
    return report


def corollary2_check(f, g, x_grid=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                     tolerance: float = 5e-3) -> VerificationReport:
    """Compare H^2(f*g) + pi^2 (f*g) with sqrt(x) S2f S2g on ``x_grid``."""
    _flags_ok(f, g)
    x = geometric_grid(0.5, 2.0, 16) if x_grid is None else np.asarray(x_grid, dtype=float)
    report = VerificationReport("corollary2", grid={"x": [float(x.min()), float(x.max()), x.size]})
    inputs = {"f": _label(f), "g": _label(g)}
    if getattr(f, "is_zero", False) or getattr(g, "is_zero", False):
        report.add(f"{_label(f)}*{_label(g)}", 0.0, tolerance, inputs=inputs)
        return report
    h = sampled_convolution(f, g, x, cfg)
    left = transforms.hilbert2(h, x, cfg=cfg) + np.pi ** 2 * h(x)
    s2f = transforms.stieltjes2(f, x, cfg=cfg)
    s2g = s2f if g is f else transforms.stieltjes2(g, x, cfg=cfg)
    right = np.sqrt(x) * s2f * s2g
    report.add(f"{_label(f)}*{_label(g)}", _max_rel(left, right), tolerance,
               metric="max_normalized_residual", inputs=inputs)
    return report


def spectrum_normalization_check(f, g, x_grid=None, tau=None,
                                 cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                                 tolerance: float = 1e-3) -> VerificationReport:
    """Compare convolve_spectrum with the forward Mellin transform of the sampled convolution.

    The fitted ratio between the two is reported so a wrong overall constant
    shows up as a number rather than as a vague mismatch.
    """
    x = geometric_grid(0.1, 10.0, 8) if x_grid is None else np.asarray(x_grid, dtype=float)
    tau = np.linspace(-5, 5, 201) if tau is None else tau
    F = _spectrum_of(f, tau_grid())
    G = _spectrum_of(g, F.tau)
    H = convolve_spectrum(F, G)
    h = sampled_convolution(f, g, x, cfg)
    with warnings.catch_warnings():
        # the zero-extension flag is carried on the spectrum and reported below
        warnings.simplefilter("ignore", RuntimeWarning)
        numeric = mellin_forward(h, tau, cfg.replace(abs_tol=1e-12))
    predicted = np.interp(tau, H.tau, H.values.real) + 1j * np.interp(tau, H.tau, H.values.imag)
    ratio = complex(np.vdot(predicted, numeric.values) / np.vdot(predicted, predicted))
    report = VerificationReport("spectrum_normalization",
                                notes=[f"fitted ratio mellin(f*g) / convolve_spectrum = {ratio:.12g}"])
    report.add(f"{_label(f)}*{_label(g)}", _max_rel(predicted, numeric.values), tolerance,
               metric="max_normalized_error",
               inputs={"f": _label(f), "g": _label(g), "ratio_re": ratio.real,
                       "ratio_im": ratio.imag, "zero_extension_flagged": numeric.truncated})
    return report


def titchmarsh_sanity(f, g, x_grid=None) -> bool:
    """True when the sampled L2 norm of f*g exceeds 1e-6 (a smoke test only)."""
    for e in (f, g):
        if getattr(e, "is_zero", False):
            raise InvalidInput("both factors must be nonzero")
    _flags_ok(f, g)
    x = geometric_grid(1e-6, 1e6, 481) if x_grid is None else np.asarray(x_grid, dtype=float)
    h = convolve_mb(f, g, x).values
    return bool(math.sqrt(sampled_l2_squared(h)) > 1e-6)
