"""Independent reference values computed with mpmath at 30 digits."""

import mpmath as mp

mp.mp.dps = 30


def _fn(f):
    return lambda t: f(t)


def halfaxis(f):
    """int_0^inf f(t) dt."""
    return complex(mp.quad(_fn(f), [0, 1, mp.inf]))


def stieltjes(f, x):
    x = mp.mpf(x)
    return complex(mp.quad(lambda t: f(t) / (x + t), [0, x, mp.inf]))


def stieltjes2(f, x):
    x = mp.mpf(x)

    def k(t):
        if t == x:
            return f(t) / x
        return (mp.log(x) - mp.log(t)) / (x - t) * f(t)
    return complex(mp.quad(k, [0, x, mp.inf]))


def laplace(f, x):
    x = mp.mpf(x)
    return complex(mp.quad(lambda t: mp.exp(-x * t) * f(t), [0, 1 / x, mp.inf]))


def hilbert(f, x, beta=0):
    """PV int_0^inf (x/t)^beta f(t)/(t - x) dt by subtraction on [0, 2x]."""
    x = mp.mpf(x)
    g = lambda t: (x / t) ** beta * f(t)
    fx = g(x)
    inner = mp.quad(lambda t: (g(t) - fx) / (t - x), [0, x, 2 * x])
    # PV int_0^{2x} dt/(t - x) = 0
    outer = mp.quad(lambda t: g(t) / (t - x), [2 * x, mp.inf])
    return complex(inner + outer)


def mellin(f, s):
    return complex(mp.quad(lambda t: f(t) * t ** (s - 1), [0, 1, mp.inf]))


def gamma(s):
    return complex(mp.gamma(s))


# catalog functions as mpmath callables
CAUCHY = lambda t: 1 / (1 + t)
EXP = lambda t: mp.exp(-t)
CAUCHY2 = lambda t: 1 / (1 + t) ** 2
GAUSS_LOG = lambda t: mp.exp(-mp.log(t) ** 2)
MP_FUNCTIONS = {"cauchy": CAUCHY, "exp": EXP, "cauchy2": CAUCHY2, "gauss_log": GAUSS_LOG}
