"""Modified Bessel function of the second kind, order zero."""

from __future__ import annotations

import numpy as np

EULER_GAMMA = 0.5772156649015329
# Series is used below this argument. The asymptotic expansion only reaches
# ~1e-9 absolute accuracy once its smallest term (~exp(-2x)) is that small.
SWITCHOVER = 8.0
_SERIES_TERMS = 60
_ASYMPTOTIC_TERMS = 30


def _k0_series(x: np.ndarray) -> np.ndarray:
    # K0(x) = -(ln(x/2) + gamma) I0(x) + sum_k H_k (x^2/4)^k / (k!)^2
    q = 0.25 * x * x
    term = np.ones_like(x)
    i0 = np.ones_like(x)
    tail = np.zeros_like(x)
    harmonic = 0.0
    for k in range(1, _SERIES_TERMS):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        i0 = i0 + term
        tail = tail + harmonic * term
    return -(np.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _k0_asymptotic(x: np.ndarray) -> np.ndarray:
    # sqrt(pi/2x) e^{-x} sum_k (-1)^k [prod_j (2j-1)^2] / (k! (8x)^k), truncated at the smallest term
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _ASYMPTOTIC_TERMS):
        nxt = -term * (2 * k - 1) ** 2 / (8.0 * k * x)
        keep = np.abs(nxt) < np.abs(term)
        term = np.where(keep, nxt, 0.0)
        total = total + term
    return np.sqrt(np.pi / (2 * x)) * np.exp(-x) * total


def k0(x):
    """``K0(x)`` for ``x > 0``; raises ``ValueError`` for ``x <= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(np.isnan(x)):
        raise ValueError("K0 is defined for x > 0 only")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = x < SWITCHOVER
    if small.any():
        out[small] = _k0_series(x[small])
    if (~small).any():
        out[~small] = _k0_asymptotic(x[~small])
    return out[0] if scalar else out
