"""Complex gamma function on the accuracy strip used by the library."""

import numpy as np
from scipy.special import loggamma

from .errors import GammaOverflow

STRIP_HALF_WIDTH = 1.0
STRIP_HEIGHT = 50.0


def _check_strip(s):
    if np.any(np.abs(s.real - 0.5) > STRIP_HALF_WIDTH) or np.any(np.abs(s.imag) > STRIP_HEIGHT):
        raise GammaOverflow(
            f"argument outside |Re s - 1/2| <= {STRIP_HALF_WIDTH}, |Im s| <= {STRIP_HEIGHT}")


def log_gamma(s, strict: bool = False):
    """Principal branch of log Gamma(s); ``strict`` enforces the accuracy strip."""
    s = np.asarray(s, dtype=complex)
    if strict:
        _check_strip(s)
    return loggamma(s)


def complex_gamma(s, strict: bool = False):
    out = np.exp(log_gamma(s, strict))
    return complex(out) if out.ndim == 0 else out
