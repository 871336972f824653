"""Many-body Fock bases for spin-1/2 chains and fixed-number boson chains."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import SizeLimitError

MAX_SPIN_SITES = 14
MAX_BOSE_DIM = 50_000


@dataclass(frozen=True)
class FockBasis:
    """Lexicographically ordered list of occupation tuples.

    ``kind`` is ``"spin"`` or ``"boson"``. For spins the ordinal of a state is
    the integer whose binary digits (site 0 most significant) are the tuple.
    """

    kind: str
    L: int
    D: int
    states: tuple[tuple[int, ...], ...]
    n_particles: int | None = None
    index_of: dict[tuple[int, ...], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index_of", {s: k for k, s in enumerate(self.states)})

    @property
    def N(self) -> int:
        return len(self.states)

    def __len__(self) -> int:
        return len(self.states)

    def as_array(self) -> np.ndarray:
        """Occupations as an ``(N, L)`` integer array."""
        return np.array(self.states, dtype=np.int64).reshape(self.N, self.L)


def enumerate_spin_basis(L: int) -> FockBasis:
    if not 1 <= L <= MAX_SPIN_SITES:
        raise SizeLimitError(f"spin chain length L={L} outside [1, {MAX_SPIN_SITES}]")
    states = tuple(itertools.product((0, 1), repeat=L))
    return FockBasis(kind="spin", L=L, D=2, states=states)


def _compositions(n: int, L: int):
    # lexicographic: first site occupation ascending
    if L == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, L - 1):
            yield (first,) + rest


def enumerate_bose_basis(L: int, n: int) -> FockBasis:
    if L < 1 or n < 0:
        raise ValueError(f"need L >= 1 and n >= 0, got L={L}, n={n}")
    dim = comb(n + L - 1, n)
    if dim > MAX_BOSE_DIM:
        raise SizeLimitError(f"boson basis dimension {dim} exceeds {MAX_BOSE_DIM}")
    states = tuple(_compositions(n, L))
    return FockBasis(kind="boson", L=L, D=n + 1, states=states, n_particles=n)
