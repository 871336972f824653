"""Random matrix ensembles and reference densities."""

from __future__ import annotations

from dataclasses import dataclass
from math import erf, inf, pi, sqrt
from typing import Callable

import numpy as np
from scipy import integrate

from .seeding import make_rng, seed_stream
from .special import k0
from .stats import R_EDGES, Histogram, r_statistics


@dataclass(frozen=True)
class ReferenceDensity:
    """A probability density on an interval, with exact bin masses.

    When ``cdf`` is given, bin masses use it; otherwise they come from adaptive
    quadrature of ``pdf``.
    """

    name: str
    pdf: Callable
    support: tuple[float, float]
    cdf: Callable | None = None

    def evaluate(self, x):
        return self.pdf(x)

    def __call__(self, x):
        return self.pdf(x)

    def mass(self, a: float, b: float) -> float:
        lo, hi = self.support
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            return 0.0
        if self.cdf is not None:
            return float(self.cdf(b) - self.cdf(a))
        val, _ = integrate.quad(lambda t: float(self.pdf(t)), a, b, limit=200,
                                epsabs=1e-13, epsrel=1e-11)
        return val

    def normalization(self) -> float:
        return self.mass(*self.support)


def sample_cue(N: int, seed: int) -> np.ndarray:
    """Haar-random unitary: QR of a complex Ginibre matrix with R's diagonal phases removed."""
    if N < 2:
        raise ValueError("N must be >= 2")
    rng = make_rng(seed)
    Z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))[None, :]


def sample_coe(N: int, seed: int) -> np.ndarray:
    """Symmetric unitary ``W^T W`` with ``W`` Haar-random."""
    W = sample_cue(N, seed)
    return W.T @ W


def sample_goe(N: int, seed: int) -> np.ndarray:
    """``(G + G^T)/2`` with standard normal ``G``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    G = make_rng(seed).standard_normal((N, N))
    return 0.5 * (G + G.T)


def density_porter_thomas(N: int = 1, rescaled: bool = False) -> ReferenceDensity:
    """``N exp(-N p)`` on ``p >= 0``; with ``rescaled`` the density of ``x = N p``, ``exp(-x)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    s = 1.0 if rescaled else float(N)
    return ReferenceDensity(
        name="porter_thomas",
        pdf=lambda x: s * np.exp(-s * np.asarray(x, dtype=float)),
        support=(0.0, inf),
        cdf=lambda x: -np.expm1(-s * x) if np.isfinite(x) else 1.0,
    )


def density_bessel_d(N: int) -> ReferenceDensity:
    """Density ``(2N/pi) K0(N d)`` of ``|d| = |c_z c_z0|`` for real Gaussian components."""
    if N < 1:
        raise ValueError("N must be >= 1")

    def pdf(d):
        return (2 * N / pi) * k0(N * np.asarray(d, dtype=float))

    return ReferenceDensity(name="bessel_d", pdf=pdf, support=(0.0, inf))


def density_poisson_r() -> ReferenceDensity:
    """Gap-ratio density ``2/(1+r)^2`` of uncorrelated levels (min/max convention)."""
    return ReferenceDensity(
        name="poisson_r",
        pdf=lambda r: 2.0 / (1.0 + np.asarray(r, dtype=float)) ** 2,
        support=(0.0, 1.0),
        cdf=lambda r: 2.0 * r / (1.0 + r),
    )


def density_half_normal_c(N: int) -> ReferenceDensity:
    """Density of ``|c|`` for real eigenvector components with variance ``1/N``."""
    return ReferenceDensity(
        name="half_normal_c",
        pdf=lambda c: sqrt(2 * N / pi) * np.exp(-0.5 * N * np.asarray(c, dtype=float) ** 2),
        support=(0.0, inf),
        cdf=lambda c: erf(c * sqrt(N / 2)) if np.isfinite(c) else 1.0,
    )


def density_from_histogram(hist: Histogram, name: str) -> ReferenceDensity:
    """Piecewise-constant density matching ``hist`` (in-range mass renormalized to one)."""
    edges = hist.edges
    masses = hist.counts / hist.counts.sum()
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    dens = masses / np.diff(edges)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(dens) - 1)
        return np.where((x >= edges[0]) & (x <= edges[-1]), dens[idx], 0.0)

    return ReferenceDensity(name=name, pdf=pdf, support=(float(edges[0]), float(edges[-1])),
                            cdf=lambda x: float(np.interp(x, edges, cum)))


@dataclass(frozen=True)
class COEReference:
    histogram: Histogram
    density: ReferenceDensity
    mean_r: float


def reference_coe_r(N: int, n_samples: int, seed: int, edges=R_EDGES) -> COEReference:
    """Empirical gap-ratio histogram of ``n_samples`` COE matrices of size ``N``."""
    from .floquet import diagonalize_symmetric_unitary

    if n_samples < 100:
        raise ValueError("n_samples must be >= 100")
    hist = Histogram.empty(edges)
    total, count = 0.0, 0
    for i in range(n_samples):
        spec = diagonalize_symmetric_unitary(sample_coe(N, seed_stream(seed, i)))
        r = r_statistics(spec.phases)
        hist.add(r)
        total += r.sum()
        count += r.size
    return COEReference(hist, density_from_histogram(hist, "coe_r_empirical"), total / count)
