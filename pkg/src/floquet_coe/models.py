"""Driven disordered Ising and Bose-Hubbard chains.

Both models have the form ``H(t) = H0 + f(t) V`` with ``H0`` diagonal in the
Fock basis and ``V`` a fixed real symmetric matrix. Energies are in units of
the Ising coupling ``J``; Pauli convention ``Z|0> = +|0>``, ``Z|1> = -|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from .hilbert import FockBasis, enumerate_bose_basis, enumerate_spin_basis
from .seeding import make_rng

# Parameter set of the driven-chain figures (units of J).
REFERENCE_PARAMS = {"W": 1.0, "J": 1.0, "F": 2.5, "omega": 8.0}


@dataclass(frozen=True)
class DriveEnvelope:
    """Drive profile ``f(t) = (1 - cos(omega t)) / 2`` with period ``T = 2 pi / omega``."""

    omega: float

    def __post_init__(self):
        if not (np.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be positive and finite, got {self.omega}")

    @property
    def T(self) -> float:
        return 2 * pi / self.omega

    def __call__(self, t):
        return f_envelope(t, self)


def f_envelope(t, env: DriveEnvelope):
    return 0.5 * (1.0 - np.cos(env.omega * np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class DrivenModel:
    """Static diagonal ``H0`` plus drive shape ``V`` on a Fock basis.

    ``site_drive`` is set when ``V`` is a uniform sum of one 2x2 operator over
    every spin site; the integrator then applies the drive as a tensor product
    instead of through a dense eigenbasis.
    """

    name: str
    basis: FockBasis
    H0_diag: np.ndarray
    V_matrix: np.ndarray
    params: dict
    mu: np.ndarray
    site_drive: np.ndarray | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.basis.N

    def hamiltonian(self, t: float, env: DriveEnvelope) -> np.ndarray:
        H = float(f_envelope(t, env)) * self.V_matrix
        H[np.diag_indices_from(H)] += self.H0_diag
        return H

    def average_hamiltonian(self) -> np.ndarray:
        """Period average ``H0 + V/2`` (the undriven comparison model)."""
        H = 0.5 * self.V_matrix
        H[np.diag_indices_from(H)] += self.H0_diag
        return H


def draw_disorder(L: int, W: float, seed: int) -> np.ndarray:
    """Site potentials drawn i.i.d. uniformly from ``{0, W}``."""
    return make_rng(seed).integers(0, 2, size=L).astype(float) * W


def build_ising(L: int, W: float = 1.0, J: float = 1.0, F: float = 2.5,
                disorder_seed: int = 0, mu: np.ndarray | None = None) -> DrivenModel:
    if L < 2:
        raise ValueError(f"Ising chain needs L >= 2, got {L}")
    basis = enumerate_spin_basis(L)
    if mu is None:
        mu = draw_disorder(L, W, disorder_seed)
    mu = np.asarray(mu, dtype=float)
    spins = 1 - 2 * basis.as_array()
    h0 = spins @ mu + J * np.sum(spins[:, :-1] * spins[:, 1:], axis=1)

    N = basis.N
    V = np.zeros((N, N))
    rows = np.arange(N)
    for site in range(L):
        V[rows, rows ^ (1 << (L - 1 - site))] = F
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    return DrivenModel(
        name="ising", basis=basis, H0_diag=h0.astype(float), V_matrix=V,
        params={"L": L, "W": W, "J": J, "F": F}, mu=mu, site_drive=F * X,
    )


def build_bose_hubbard(L: int, n: int, W: float = 1.0, J: float = 1.0, F: float = 2.5,
                       U_int: float = 1.0, disorder_seed: int = 0,
                       mu: np.ndarray | None = None) -> DrivenModel:
    """Disordered Bose-Hubbard chain with all hopping carried by the drive.

    ``J`` only sets the energy unit here; the static part has no hopping term.
    """
    if L < 2:
        raise ValueError(f"Bose-Hubbard chain needs L >= 2, got {L}")
    basis = enumerate_bose_basis(L, n)
    if mu is None:
        mu = draw_disorder(L, W, disorder_seed)
    mu = np.asarray(mu, dtype=float)
    occ = basis.as_array()
    h0 = occ @ mu + 0.5 * U_int * np.sum(occ * (occ - 1), axis=1)

    N = basis.N
    V = np.zeros((N, N))
    for k, state in enumerate(basis.states):
        for l in range(L - 1):
            # a_l^dag a_{l+1}: move one boson from l+1 to l
            if state[l + 1] == 0:
                continue
            target = list(state)
            target[l] += 1
            target[l + 1] -= 1
            j = basis.index_of[tuple(target)]
            amp = -F * sqrt((state[l] + 1) * state[l + 1])
            V[j, k] = amp
            V[k, j] = amp
    return DrivenModel(
        name="bose_hubbard", basis=basis, H0_diag=h0.astype(float), V_matrix=V,
        params={"L": L, "n": n, "W": W, "J": J, "F": F, "U_int": U_int}, mu=mu,
    )


def random_initial_state(basis: FockBasis, seed: int) -> int:
    """Uniformly random basis ordinal."""
    return int(make_rng(seed).integers(0, basis.N))
