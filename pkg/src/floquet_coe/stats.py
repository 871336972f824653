"""Spectral and output-distribution statistics and histogram distances."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Fixed binnings; every number downstream depends on these, so they are recorded in run metadata.
R_EDGES = np.linspace(0.0, 1.0, 41)
PT_EDGES = np.linspace(0.0, 12.0, 49)
D_BINS = 60
D_RANGE_SCALED = 6.0


def d_edges(N: int, bins: int = D_BINS) -> np.ndarray:
    """Bins for ``|d|`` on ``(0, 6/N]``."""
    return np.linspace(0.0, D_RANGE_SCALED / N, bins + 1)


@dataclass
class Histogram:
    """Fixed-edge histogram that tracks the mass falling outside the edges."""

    edges: np.ndarray
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def empty(cls, edges) -> "Histogram":
        edges = np.asarray(edges, dtype=float)
        return cls(edges, np.zeros(len(edges) - 1, dtype=np.int64))

    @classmethod
    def from_samples(cls, samples, edges) -> "Histogram":
        h = cls.empty(edges)
        h.add(samples)
        return h

    def add(self, samples) -> "Histogram":
        x = np.asarray(samples, dtype=float).ravel()
        lo, hi = self.edges[0], self.edges[-1]
        self.underflow += int(np.count_nonzero(x < lo))
        self.overflow += int(np.count_nonzero(x > hi))
        c, _ = np.histogram(x, bins=self.edges)
        self.counts += c
        return self

    def merge(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.edges, other.edges):
            raise ValueError("cannot merge histograms with different edges")
        return Histogram(self.edges.copy(), self.counts + other.counts,
                         self.underflow + other.underflow, self.overflow + other.overflow)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.total

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.total * self.widths)


@dataclass
class SpectralSample:
    """Per-realization statistics pooled by the experiment drivers."""

    realization_id: int
    r_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    d_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    p_values: np.ndarray = field(default_factory=lambda: np.empty(0))
    M: int = 0


def folded_phases(phases, M: int) -> np.ndarray:
    """Phases multiplied by ``M`` and reduced to ``[0, 2 pi)``, sorted ascending."""
    if M < 1:
        raise ValueError("M must be >= 1")
    return np.sort(np.mod(M * np.asarray(phases, dtype=float), 2 * np.pi))


def r_statistics(sorted_phases) -> np.ndarray:
    """Consecutive-gap ratios ``min/max`` on the circle, including the wrap-around gap.

    Returns one value per gap (cyclically). A pair of zero gaps yields 1, a
    single zero gap yields 0.
    """
    ph = np.asarray(sorted_phases, dtype=float)
    if len(ph) < 3:
        raise ValueError("need at least three phases")
    gaps = np.diff(np.append(ph, ph[0] + 2 * np.pi))
    nxt = np.roll(gaps, -1)
    lo, hi = np.minimum(gaps, nxt), np.maximum(gaps, nxt)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 1.0)
    return r


def eigenstate_products(spec, z0: int) -> np.ndarray:
    """``|<z|E_e><E_e|z0>|`` for all pairs, flattened (length ``N**2``)."""
    O = spec.eigvecs
    return np.abs(O * O[z0][None, :]).ravel()


def l1_distance(hist: Histogram, ref) -> float:
    """l1 distance between the binned empirical distribution and a reference density.

    Reference masses are exact bin integrals, so singular densities are handled
    without point evaluation. Mass outside the histogram range enters as
    ``|empirical - reference|`` per side.
    """
    if hist.total == 0:
        raise ValueError("histogram is empty")
    e = hist.edges
    ref_bins = np.array([ref.mass(a, b) for a, b in zip(e[:-1], e[1:])])
    lo, hi = ref.support
    below = ref.mass(lo, e[0]) if e[0] > lo else 0.0
    above = ref.mass(e[-1], hi) if e[-1] < hi else 0.0
    total = hist.total
    return float(np.sum(np.abs(hist.counts / total - ref_bins))
                 + abs(hist.underflow / total - below)
                 + abs(hist.overflow / total - above))


def l1_between(a: Histogram, b: Histogram) -> float:
    """l1 distance between two histograms on identical edges."""
    if not np.array_equal(a.edges, b.edges):
        raise ValueError("histograms must share edges")
    ta, tb = a.total, b.total
    return float(np.sum(np.abs(a.counts / ta - b.counts / tb))
                 + abs(a.underflow / ta - b.underflow / tb)
                 + abs(a.overflow / ta - b.overflow / tb))


def anti_concentration_fraction(p_values, delta: float) -> float:
    """Fraction of rescaled probabilities ``N p`` strictly above ``delta``."""
    x = np.asarray(p_values, dtype=float)
    return float(np.count_nonzero(x > delta) / x.size)


def pooled_scaled_probabilities(samples, times) -> np.ndarray:
    """``N p_t(z)`` for every sample, time and ``z``; shape ``(len(samples), len(times), N)``.

    Each sample exposes ``phases``, ``eigvecs`` and ``z0``. Samples are taken in
    the given order, which callers keep sorted by realization id.
    """
    from .floquet import spectral_amplitudes

    out = []
    for s in samples:
        amp = spectral_amplitudes(s.phases, s.eigvecs, s.z0, times)
        out.append(len(s.phases) * np.abs(amp) ** 2)
    return np.stack(out)


def pt_convergence_curve(samples, M_values, edges=PT_EDGES) -> list[tuple[float, float]]:
    """l1 distance to Porter-Thomas for each entry of ``M_values``, pooling all ``z`` and samples."""
    from .rmt import density_porter_thomas

    ref = density_porter_thomas(rescaled=True)
    x = pooled_scaled_probabilities(samples, M_values)
    curve = []
    for k, M in enumerate(M_values):
        h = Histogram.from_samples(x[:, k, :], edges)
        curve.append((M, l1_distance(h, ref)))
    return curve


def plateau_distance(samples, M_values, edges=PT_EDGES) -> float:
    """l1 distance to Porter-Thomas with all listed cycle counts pooled together."""
    from .rmt import density_porter_thomas

    x = pooled_scaled_probabilities(samples, M_values)
    return l1_distance(Histogram.from_samples(x, edges), density_porter_thomas(rescaled=True))
