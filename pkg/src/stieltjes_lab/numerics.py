"""Quadrature engine for integrals over the half-axis (0, inf).

Everything is integrated in logarithmic coordinates.  A half-axis integral
``int_0^inf F(t) dt`` becomes ``int F(c e^v) c e^v dv`` over the real line,
which is then split into unit panels marching outward from a set of finite
breakpoints.  Each direction stops as soon as a panel's absolute mass drops
below ``tail_cut``; the panels are then refined by batched bisection with a
15-point Gauss-Kronrod rule until the global error estimate meets tolerance.

Integrands are vectorised: they receive a 1-D array of abscissae and return
an array whose *last* axis matches it.  Leading axes are treated as
independent components (several poles, several Mellin frequencies ...) that
share a single panel structure.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInput, NonConvergence

# QUADPACK qk15 abscissae and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG7 = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG7[:3]
GAUSS_WEIGHTS[7] = _WG7[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG7[2::-1]

_EPS = np.finfo(float).eps
_U_LIMIT = 700.0            # exp(700) is still finite in double precision
_PANEL_WIDTH = 1.0
_MARCH_BATCH = 8
_MAX_SEGMENTS = 200_000
_MIN_REACH = 48.0           # a march finding no mass yet goes at least this far in u


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    tail_cut: float = 1e-14
    pv_window_factor: float = 1.0
    sing_series_delta: float = 1e-3
    max_depth: int = 40

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidInput("abs_tol and rel_tol must be positive")
        if not self.tail_cut > 0:
            raise InvalidInput("tail_cut must be positive")
        if not 0 < self.sing_series_delta < 0.5:
            raise InvalidInput("sing_series_delta must lie in (0, 0.5)")
        if not 0 < self.pv_window_factor <= 1:
            raise InvalidInput("pv_window_factor must lie in (0, 1]")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise InvalidInput("max_depth must be a positive integer")

    def replace(self, **changes) -> "QuadratureConfig":
        return dataclasses.replace(self, **changes)


DEFAULT_CONFIG = QuadratureConfig()


class DecayHint(enum.Enum):
    ALGEBRAIC = "algebraic"
    EXPONENTIAL = "exponential"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Integrand:
    """A vectorised function of t > 0 plus what is known about its decay.

    ``power`` is the algebraic decay exponent (f ~ t^-power at infinity) when
    ``decay_hint`` is ALGEBRAIC.  ``support_min`` and ``support_max`` bound
    the abscissae of sampled data (the function is zero outside), if the
    integrand comes from samples.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    decay_hint: DecayHint = DecayHint.UNKNOWN
    power: Optional[float] = None
    support_min: Optional[float] = None
    support_max: Optional[float] = None

    def __call__(self, t):
        return self.evaluate(t)


def as_integrand(f) -> Integrand:
    """Coerce catalog entries, sampled functions and callables to Integrand."""
    if isinstance(f, Integrand):
        return f
    to_integrand = getattr(f, "as_integrand", None)
    if to_integrand is not None:
        return to_integrand()
    if callable(f):
        return Integrand(f)
    raise TypeError(f"cannot integrate object of type {type(f).__name__}")


def _evaluate(g, u: np.ndarray) -> np.ndarray:
    vals = np.asarray(g(u))
    if vals.ndim == 0:
        vals = np.full(u.shape, vals)
    if vals.shape[-1] != u.shape[-1]:
        raise InvalidInput("integrand output must end with the abscissa axis")
    if not np.all(np.isfinite(vals)):
        bad = u[np.nonzero(~np.isfinite(vals))[-1][0]]
        raise NonConvergence(f"integrand is not finite at log-abscissa {bad:.6g}")
    return vals


def _gk15(g, a: np.ndarray, b: np.ndarray):
    """Apply the Kronrod rule on segments [a_i, b_i] in one vectorised call.

    Returns per-component integrals, error estimates, roundoff floors and
    absolute masses, each shaped (..., nseg).
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    u = mid[:, None] + half[:, None] * NODES
    vals = _evaluate(g, u.ravel())
    vals = vals.reshape(vals.shape[:-1] + u.shape)
    kron = (vals @ KRONROD_WEIGHTS) * half
    gauss = (vals @ GAUSS_WEIGHTS) * half
    resabs = (np.abs(vals) @ KRONROD_WEIGHTS) * half
    mean = kron / (2.0 * half)
    resasc = (np.abs(vals - mean[..., None]) @ KRONROD_WEIGHTS) * half
    diff = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0,
                          resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5),
                          diff)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(scaled, floor)
    return kron, err, floor, resabs


class _Segments:
    def __init__(self):
        self.a, self.b, self.kron, self.err, self.floor, self.depth = [], [], [], [], [], []

    def add(self, a, b, kron, err, floor, depth):
        self.a.append(a)
        self.b.append(b)
        self.kron.append(kron)
        self.err.append(err)
        self.floor.append(floor)
        self.depth.append(np.full(a.shape, depth, dtype=int))

    def stack(self):
        return (np.concatenate(self.a), np.concatenate(self.b),
                np.concatenate(self.kron, axis=-1), np.concatenate(self.err, axis=-1),
                np.concatenate(self.floor, axis=-1), np.concatenate(self.depth))


def _march(g, start: float, direction: int, cfg: QuadratureConfig, segs: _Segments):
    """Lay unit panels outward from ``start`` until every component's tail is cut.

    A component is done once a panel's absolute mass falls to ``tail_cut``
    times the mass that component has accumulated so far, so the cut is
    independent of the integrand's scale.  A component with no mass yet
    keeps marching until ``_MIN_REACH`` from ``start``.
    """
    pos = start
    running = 0.0
    while True:
        steps = np.arange(_MARCH_BATCH, dtype=float)
        near = pos + direction * steps * _PANEL_WIDTH
        far = near + direction * _PANEL_WIDTH
        if np.max(np.abs(far)) > _U_LIMIT:
            raise NonConvergence("integrand tail did not fall below tail_cut")
        a, b = (near, far) if direction > 0 else (far, near)
        kron, err, floor, resabs = _gk15(g, a, b)
        running_mass = running + np.cumsum(resabs, axis=-1)
        reached = np.abs(far - start) >= _MIN_REACH
        small = (resabs <= cfg.tail_cut * running_mass) & ((running_mass > 0) | reached)
        if small.ndim > 1:
            small = small.reshape(-1, small.shape[-1]).all(axis=0)
        below = np.nonzero(small)[0]
        keep = below[0] + 1 if below.size else _MARCH_BATCH
        segs.add(a[:keep], b[:keep], kron[..., :keep], err[..., :keep], floor[..., :keep], 0)
        if below.size:
            return
        running = running_mass[..., -1:]
        pos = pos + direction * _MARCH_BATCH * _PANEL_WIDTH


def integrate_logspace(g: Callable[[np.ndarray], np.ndarray],
                       breakpoints: Sequence[float] = (-math.inf, 0.0, math.inf),
                       cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Integrate ``g(u)`` over the span of ``breakpoints`` (ends may be infinite).

    Returns ``(value, error_estimate)``; ``value`` keeps the component shape
    of ``g``'s output.
    """
    bps = [float(b) for b in breakpoints]
    if len(bps) < 2 or any(b2 < b1 for b1, b2 in zip(bps, bps[1:])):
        raise InvalidInput("breakpoints must be a non-decreasing sequence of length >= 2")
    finite = [b for b in bps if math.isfinite(b)]
    if not finite:
        finite = [0.0]
    segs = _Segments()
    edges = []
    for lo, hi in zip(finite, finite[1:]):
        if hi > lo:
            n = max(1, math.ceil((hi - lo) / _PANEL_WIDTH - 1e-9))
            edges.append(np.linspace(lo, hi, n + 1))
    if edges:
        a = np.concatenate([e[:-1] for e in edges])
        b = np.concatenate([e[1:] for e in edges])
        segs.add(a, b, *_gk15(g, a, b)[:3], 0)
    if bps[0] == -math.inf:
        _march(g, finite[0], -1, cfg, segs)
    if bps[-1] == math.inf:
        _march(g, finite[-1], +1, cfg, segs)
    if not segs.a:
        return 0.0, 0.0
    a, b, kron, err, floor, depth = segs.stack()

    while True:
        total = kron.sum(axis=-1)
        err_total = err.sum(axis=-1)
        # each component answers to its own tolerance
        tol = np.maximum(np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(total)),
                         2.0 * floor.sum(axis=-1))
        open_ = err_total > tol
        if not np.any(open_):
            return total, float(np.max(err_total))
        score = err / tol[..., None]
        score = np.where(open_[..., None], score, 0.0)
        if score.ndim > 1:
            score = score.reshape(-1, score.shape[-1]).max(axis=0)
        order = np.argsort(-score, kind="stable")
        cum = np.cumsum(score[order])
        count = int(np.searchsorted(cum, cum[-1] - 0.5)) + 1
        pick = order[:count]
        pick = pick[depth[pick] < cfg.max_depth]
        if pick.size == 0:
            worst = float(np.max(err_total / tol))
            raise NonConvergence(
                f"max_depth={cfg.max_depth} reached with error {worst:.3g} x tolerance")
        if a.size + pick.size > _MAX_SEGMENTS:
            raise NonConvergence("segment budget exhausted before meeting tolerance")
        pick.sort()
        mid = 0.5 * (a[pick] + b[pick])
        na = np.concatenate([a[pick], mid])
        nb = np.concatenate([mid, b[pick]])
        nk, ne, nf, _ = _gk15(g, na, nb)
        nd = np.concatenate([depth[pick], depth[pick]]) + 1
        keep = np.ones(a.size, dtype=bool)
        keep[pick] = False
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        kron = np.concatenate([kron[..., keep], nk], axis=-1)
        err = np.concatenate([err[..., keep], ne], axis=-1)
        floor = np.concatenate([floor[..., keep], nf], axis=-1)
        depth = np.concatenate([depth[keep], nd])


def _check_decay(f: Integrand):
    if f.decay_hint is DecayHint.ALGEBRAIC and f.power is not None and f.power <= 1:
        raise InvalidInput(f"t^-{f.power} decay is not integrable at infinity")


def _as_complex(value):
    value = np.asarray(value, dtype=complex)
    return complex(value) if value.ndim == 0 else value


def integrate_halfaxis(f, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Adaptive quadrature of ``int_0^inf f(t) dt`` via the substitution t = e^u."""
    f = as_integrand(f)
    _check_decay(f)

    def g(u):
        t = np.exp(u)
        return f(t) * t

    value, _ = integrate_logspace(g, (-math.inf, 0.0, math.inf), cfg)
    return _as_complex(value)


def _poles(pole) -> np.ndarray:
    x = np.asarray(pole, dtype=float)
    if x.ndim > 1:
        raise InvalidInput("poles must be a scalar or 1-D array")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise InvalidInput("PV poles must be finite and positive")
    return x


def _pv_kernel(v):
    # t/(t - x) at t = x e^v
    return -1.0 / np.expm1(-v)


def anchored_breakpoints(base: Sequence[float], anchors=()) -> list:
    """Merge ``base`` breakpoints with finite ``anchors`` (clipped to the marching range).

    The span between the outermost finite breakpoints is always integrated in
    full, so anchoring at the log-abscissa where the integrand's mass sits
    keeps the tail march from stopping on an empty panel.
    """
    extra = np.asarray(anchors, dtype=float).ravel()
    extra = np.clip(extra[np.isfinite(extra)], -0.9 * _U_LIMIT, 0.9 * _U_LIMIT)
    finite = [b for b in base if math.isfinite(b)]
    if extra.size:
        finite += [float(extra.min()), float(extra.max())]
    head = [-math.inf] if base[0] == -math.inf else []
    tail = [math.inf] if base[-1] == math.inf else []
    return head + sorted(set(finite)) + tail


def pole_anchors(x) -> np.ndarray:
    """Log-abscissas v where t = x e^v equals 1, for a batch of poles."""
    return -np.log(np.asarray(x, dtype=float))


def pv_normalized(numerator: Callable[[np.ndarray], np.ndarray], center: np.ndarray,
                  cfg: QuadratureConfig = DEFAULT_CONFIG, *, window_only: bool = False,
                  anchors=()):
    """PV ``int_0^inf N_x(t) / (t - x) dt`` for a batch of poles x.

    ``numerator(v)`` returns ``N_x(x e^v)`` with shape (npoles, len(v)) and
    ``center`` is ``N_x(x)``.  On the symmetric window
    ``|t - x| < c x`` the constant ``N_x(x)`` is subtracted; its own PV over
    that window vanishes identically.
    """
    c = cfg.pv_window_factor
    lo = math.log1p(-c) if c < 1 else -math.inf
    hi = math.log1p(c)
    center = np.asarray(center)

    def g(v):
        inside = (v > lo) & (v < hi)
        num = numerator(v)
        return (num - np.where(inside, center[..., None], 0.0)) * _pv_kernel(v)

    if window_only:
        bps = [lo, 0.0, hi]
    else:
        bps = anchored_breakpoints([-math.inf] + ([lo] if c < 1 else []) + [0.0, hi, math.inf],
                                   anchors)
    value, _ = integrate_logspace(g, bps, cfg)
    return value


def _check_support(f: Integrand, x: np.ndarray):
    if f.support_min is not None and np.any(x < 1e-3 * f.support_min):
        raise InvalidInput("PV pole lies below 1e-3 times the smallest sampled abscissa")


def _pv_bounded(f: Integrand, xs: np.ndarray, cfg: QuadratureConfig, beta: float):
    """PV over the finite support [a, b] of zero-extended data.

    Inside the support f(x) is subtracted and its principal value
    f(x) log((b - x)/(x - a)) added back in closed form, so the remaining
    integrand is smooth and every pole shares one panel structure in log t.
    """
    a, b = f.support_min, f.support_max
    if np.any(np.isclose(xs, a, rtol=1e-12, atol=0)) or np.any(np.isclose(xs, b, rtol=1e-12, atol=0)):
        raise InvalidInput("PV pole sits on an edge of the sampled support")
    lx = np.log(xs)
    center = f(xs)
    inside = (xs > a) & (xs < b)

    def g(u):
        t = np.exp(u)
        gap = xs[:, None] * np.expm1(u[None, :] - lx[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            weighted = f(t)[None, :] * np.exp(beta * (lx[:, None] - u[None, :]))
            vals = (weighted - center[:, None]) * t[None, :] / gap
        return np.where(gap == 0, 0.0, vals)

    value, _ = integrate_logspace(g, (math.log(a), math.log(b)), cfg)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(b - xs)) - np.log(np.abs(xs - a))
    return value + np.where(inside, center * logs, 0.0)


def integrate_pv(f, pole, cfg: QuadratureConfig = DEFAULT_CONFIG, *,
                 weight_exponent: float = 0.0):
    """Cauchy principal value ``PV int_0^inf (x/t)^beta f(t) / (t - x) dt`` at x = pole.

    ``pole`` may be a scalar or a 1-D array of poles, evaluated together;
    beta = ``weight_exponent`` defaults to 0, the plain Hilbert kernel.
    """
    f = as_integrand(f)
    x = _poles(pole)
    _check_support(f, x)
    xs = np.atleast_1d(x)
    beta = float(weight_exponent)
    if f.support_min is not None and f.support_max is not None:
        value = _pv_bounded(f, xs, cfg, beta)
        return _as_complex(value[0] if x.ndim == 0 else value)

    def numerator(v):
        values = f(xs[:, None] * np.exp(v)[None, :])
        return values * np.exp(-beta * v)[None, :] if beta else values

    value = pv_normalized(numerator, f(xs), cfg, anchors=pole_anchors(xs))
    return _as_complex(value[0] if x.ndim == 0 else value)


def pv_window_term(f, pole, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Only the symmetric-window part ``int (f(t) - f(x)) / (t - x) dt``."""
    f = as_integrand(f)
    x = _poles(pole)
    xs = np.atleast_1d(x)

    def numerator(v):
        return f(xs[:, None] * np.exp(v)[None, :])

    value = pv_normalized(numerator, f(xs), cfg, window_only=True)
    return _as_complex(value[0] if x.ndim == 0 else value)


def log_kernel(x, t, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """The iterated-Stieltjes kernel ``(log x - log t) / (x - t)``.

    Near the diagonal (|t - x| / x below ``sing_series_delta``) the removable
    singularity is resolved by ``(1/x) sum_k (-u)^k / (k + 1)`` with
    ``u = (t - x) / x``.
    """
    x_arr, t_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if np.any(~(x_arr > 0)) or np.any(~(t_arr > 0)):
        raise InvalidInput("log_kernel needs x > 0 and t > 0")
    u = (t_arr - x_arr) / x_arr
    small = np.abs(u) < cfg.sing_series_delta
    out = np.empty(u.shape)
    big = ~small
    # log1p keeps the direct formula accurate right up to the switchover
    near = big & (np.abs(u) < 0.5)
    far = big & ~near
    out[near] = np.log1p(u[near]) / (x_arr[near] * u[near])
    # away from the diagonal log(t/x) avoids the cancellation in 1 + u
    out[far] = np.log(t_arr[far] / x_arr[far]) / (t_arr[far] - x_arr[far])
    if np.any(small):
        us = u[small]
        partial = np.ones_like(us)
        term = np.ones_like(us)
        power = np.ones_like(us)
        for k in range(1, 64):
            power = power * (-us)
            term = power / (k + 1)
            partial = partial + term
            if np.all(np.abs(term) < _EPS * np.abs(partial)):
                break
        out[small] = partial / x_arr[small]
    return float(out) if out.ndim == 0 else out
