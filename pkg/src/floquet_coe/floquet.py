"""One-period Floquet operators, their symmetric-unitary spectra, and stroboscopic evolution.

The period propagator of ``H(t) = H0 + f(t) V`` is built from a palindromic
operator splitting of the extended autonomous system: the "A" flow advances
time together with the diagonal ``H0``, the "B" flow applies ``f(t) V`` with
time frozen. Each factor is complex symmetric and the drive is symmetric about
``T/2``, so the product is exactly transpose-symmetric at every step count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import IntegratorError, NumericalError, SymmetryError
from .models import DriveEnvelope, DrivenModel

log = logging.getLogger(__name__)

# (A coefficients, B coefficients); both palindromic, each summing to one.
_BM = (0.0792036964311957, 0.353172906049774, -0.0420650803577195)
_BB = (0.209515106613362, -0.143851773179818)
SCHEMES = {
    # second-order Strang splitting with midpoint sampling of f(t)
    "strang": ((0.5, 0.5), (1.0,)),
    # optimized 6-stage fourth-order palindromic splitting
    "bm4": (
        (_BM[0], _BM[1], _BM[2], 1 - 2 * sum(_BM), _BM[2], _BM[1], _BM[0]),
        (_BB[0], _BB[1], 0.5 - sum(_BB), 0.5 - sum(_BB), _BB[1], _BB[0]),
    ),
}
DEFAULT_SCHEME = "bm4"
CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class FloquetSpectrum:
    """Symmetric unitary ``U_F = sum_e exp(-i phase_e) |E_e><E_e|`` with real eigenvectors."""

    U_F: np.ndarray
    phases: np.ndarray
    eigvecs: np.ndarray
    symmetry_residual: float
    unitarity_residual: float

    @property
    def N(self) -> int:
        return len(self.phases)

    def reconstruct(self) -> np.ndarray:
        return (self.eigvecs * np.exp(-1j * self.phases)) @ self.eigvecs.T

    def reconstruction_residual(self) -> float:
        return float(np.max(np.abs(self.U_F - self.reconstruct())))

    def eigen_residual(self) -> float:
        """Largest per-column ``|U v - exp(-i phase) v|``."""
        lhs = self.U_F @ self.eigvecs
        rhs = self.eigvecs * np.exp(-1j * self.phases)
        return float(np.max(np.abs(lhs - rhs)))


def unitarity_residual(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(len(U)))))


def symmetry_residual(U: np.ndarray) -> float:
    return float(np.max(np.abs(U - U.T)))


def _flow_sequence(steps: int, dt: float, scheme: str):
    """Merged A-flow durations and (B-flow duration, sample time) pairs in time order.

    Returns ``(a_first, a_between, a_last, b_list)`` with ``len(a_between) ==
    len(b_list) - 1``.
    """
    a, b = SCHEMES[scheme]
    m = len(b)
    a_between, b_list = [], []
    t = 0.0
    for k in range(steps):
        for j in range(m):
            if j == 0 and k > 0:
                a_between.append((a[m] + a[0]) * dt)
            elif j > 0:
                a_between.append(a[j] * dt)
            t += a[j] * dt
            b_list.append((b[j] * dt, t))
        t += a[m] * dt
    return a[0] * dt, a_between, a[m] * dt, b_list


def _site_rotation(op: np.ndarray, theta: float) -> np.ndarray:
    w, q = np.linalg.eigh(op)
    return (q * np.exp(-1j * theta * w)) @ q.T


def _kron_power(R: np.ndarray, n: int) -> np.ndarray:
    if n == 0:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, [R] * n)


def _apply_uniform_product(R: np.ndarray, L: int, A: np.ndarray) -> np.ndarray:
    """Apply ``R`` on every site (site 0 most significant) to the rows of ``A``."""
    N = A.shape[0]
    L1 = L // 2
    n1, n2 = 1 << L1, 1 << (L - L1)
    K1, K2 = _kron_power(R, L1), _kron_power(R, L - L1)
    A = (K1 @ A.reshape(n1, -1)).reshape(n1, n2, -1)
    A = np.matmul(K2, A)
    return A.reshape(N, -1)


def compute_floquet_operator(model: DrivenModel, env: DriveEnvelope, steps: int,
                             scheme: str = DEFAULT_SCHEME, route: str = "auto") -> np.ndarray:
    """Propagator over one drive period with ``steps`` splitting steps.

    ``route`` selects how the drive factor is applied: ``"eig"`` uses a dense
    eigendecomposition of ``V`` computed once, ``"product"`` uses the
    single-site tensor structure (Ising drive only), ``"auto"`` picks
    ``"product"`` when available.
    """
    if steps < 16 or steps % 2:
        raise ValueError(f"steps must be an even integer >= 16, got {steps}")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown splitting scheme {scheme!r}")
    if route == "auto":
        route = "product" if model.site_drive is not None else "eig"

    dt = env.T / steps
    a_first, a_between, a_last, b_list = _flow_sequence(steps, dt, scheme)
    h0 = model.H0_diag
    f = env(np.array([tm for _, tm in b_list]))
    theta = np.array([bd for bd, _ in b_list]) * f

    if route == "product":
        if model.site_drive is None:
            raise ValueError("product route requires a uniform single-site drive")
        L = model.basis.L
        A = np.diag(np.exp(-1j * a_first * h0))
        for j, th in enumerate(theta):
            A = _apply_uniform_product(_site_rotation(model.site_drive, th), L, A)
            a_next = a_between[j] if j < len(a_between) else a_last
            A *= np.exp(-1j * a_next * h0)[:, None]
        return A

    if route != "eig":
        raise ValueError(f"unknown route {route!r}")
    try:
        w, Q = np.linalg.eigh(model.V_matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigendecomposition of the drive operator failed") from exc
    # A-flows conjugated into the eigenbasis of V; only a handful of distinct durations occur
    cache: dict[float, np.ndarray] = {}

    def kick(duration: float) -> np.ndarray:
        if duration not in cache:
            cache[duration] = (Q.T * np.exp(-1j * duration * h0)) @ Q
        return cache[duration]

    A = np.diag(np.exp(-1j * theta[0] * w))
    for j in range(1, len(theta)):
        A = kick(a_between[j - 1]) @ A
        A *= np.exp(-1j * theta[j] * w)[:, None]
    left = Q * np.exp(-1j * a_last * h0)[:, None]
    right = Q.T * np.exp(-1j * a_first * h0)[None, :]
    return left @ A @ right


def verify_convergence(model: DrivenModel, env: DriveEnvelope, steps: int,
                       scheme: str = DEFAULT_SCHEME, route: str = "auto") -> float:
    """Max entrywise difference between propagators at ``steps`` and ``2*steps``."""
    U1 = compute_floquet_operator(model, env, steps, scheme, route)
    U2 = compute_floquet_operator(model, env, 2 * steps, scheme, route)
    return float(np.max(np.abs(U1 - U2)))


@dataclass(frozen=True)
class ConvergedOperator:
    U: np.ndarray
    steps: int
    residual: float
    history: tuple


def converged_floquet_operator(model: DrivenModel, env: DriveEnvelope,
                               tol: float = CONVERGENCE_TOL, start_steps: int = 64,
                               scheme: str = DEFAULT_SCHEME, route: str = "auto",
                               max_steps: int = 1 << 20) -> ConvergedOperator:
    """Double the step count from ``start_steps`` until successive propagators agree to ``tol``.

    The finer of the last two propagators is returned. Raises
    ``IntegratorError`` if the residual fails to decrease over three doublings.
    """
    steps = start_steps
    prev = compute_floquet_operator(model, env, steps, scheme, route)
    history = []
    while True:
        cur = compute_floquet_operator(model, env, 2 * steps, scheme, route)
        res = float(np.max(np.abs(cur - prev)))
        history.append((steps, res))
        log.debug("steps=%d residual=%.3e", steps, res)
        if res < tol:
            return ConvergedOperator(cur, 2 * steps, res, tuple(history))
        if len(history) > 3 and res >= min(r for _, r in history[-4:-1]):
            raise IntegratorError(f"residual not decreasing over three doublings: {history}")
        steps *= 2
        if 2 * steps > max_steps:
            raise IntegratorError(f"no convergence to {tol} within {max_steps} steps: {history}")
        prev = cur


def diagonalize_symmetric_unitary(U: np.ndarray, check: bool = True) -> FloquetSpectrum:
    """Real-orthogonal eigendecomposition of a symmetric unitary matrix.

    Writes ``U = X + iY``; ``X`` and ``Y`` are commuting real symmetric
    matrices, so eigenvectors of ``X`` are refined inside near-degenerate
    clusters by diagonalizing ``Y`` there.
    """
    U = np.asarray(U, dtype=complex)
    N = len(U)
    sym = symmetry_residual(U)
    if check and sym >= 1e-9:
        raise SymmetryError(f"matrix is not symmetric (residual {sym:.2e})")
    X = 0.5 * (U.real + U.real.T)
    Y = 0.5 * (U.imag + U.imag.T)
    comm = float(np.max(np.abs(X @ Y - Y @ X)))
    if comm > 1e-9:
        raise SymmetryError(f"real and imaginary parts do not commute ({comm:.2e})")
    try:
        xv, O = np.linalg.eigh(X)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigh failed on the real part") from exc

    gap_tol = 1e-10 * N
    breaks = np.flatnonzero(np.diff(xv) > gap_tol) + 1
    for cluster in np.split(np.arange(N), breaks):
        if len(cluster) < 2:
            continue
        Oc = O[:, cluster]
        _, R = np.linalg.eigh(Oc.T @ Y @ Oc)
        O[:, cluster] = Oc @ R

    yv = np.einsum("ij,ij->j", O, Y @ O)
    xd = np.einsum("ij,ij->j", O, X @ O)
    phases = np.mod(np.arctan2(-yv, xd), 2 * np.pi)
    order = np.argsort(phases, kind="stable")
    return FloquetSpectrum(
        U_F=U, phases=phases[order], eigvecs=O[:, order],
        symmetry_residual=sym, unitarity_residual=unitarity_residual(U),
    )


def spectral_amplitudes(phases: np.ndarray, eigvecs: np.ndarray, z0: int, times) -> np.ndarray:
    """Amplitudes ``<z| exp(-i t diag(phases)) |z0>`` in the eigenbasis, shape ``(len(times), N)``.

    ``phases`` are per-period quasi-energy phases (times = cycle counts) or
    energies (times = physical times).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    c0 = eigvecs[z0]
    weights = np.exp(-1j * np.outer(phases, times)) * c0[:, None]
    return (eigvecs @ weights).T


def output_probabilities(spec: FloquetSpectrum, z0: int, M: int) -> np.ndarray:
    """``p_M(z) = |<z|U_F^M|z0>|^2`` for every basis state ``z``."""
    if M < 0:
        raise ValueError("M must be nonnegative")
    amp = spectral_amplitudes(spec.phases, spec.eigvecs, z0, [M])[0]
    return np.abs(amp) ** 2


def static_evolution(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` for a real symmetric ``H``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    try:
        E, O = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("eigh failed on the static Hamiltonian") from exc
    return (O * np.exp(-1j * t * E)) @ O.T
