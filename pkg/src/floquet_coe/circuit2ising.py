"""Random COE-structured circuits and their exact complex-Ising partition functions.

A circuit amplitude ``<z|C^M|z0>`` equals ``2^{-G/2} sum_s exp[(i pi/4) E(s)]``
where one classical spin lives on every stretch of a qubit's world-line between
consecutive non-diagonal gates, and each gate adds the phase terms of its matrix
written as ``exp[(i pi/4) Phi(s)]``:

    SX   Phi = 1 + s_l s_r                   (J += 1)
    SY   Phi = 1 - s_l + s_r - s_l s_r       (J -= 1, h_l -= 1, h_r += 1)
    SYT  Phi = 1 + s_l - s_r - s_l s_r       (J -= 1, h_l += 1, h_r -= 1)
    H    Phi = 1 - s_l - s_r + s_l s_r       (J += 1, h_l -= 1, h_r -= 1)
    T    Phi = (1 - s) / 2                   (h -= 1/2)
    CZ   Phi = 1 - s_a - s_b + s_a s_b       (J_ab += 1, h_a -= 1, h_b -= 1)

with ``s = 1 - 2z``. The constant parts are kept in an ``offset`` so that the
partition function reproduces the amplitude including its global phase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import sqrt
from typing import NamedTuple

import numpy as np

from .errors import MappingError, SizeLimitError
from .seeding import make_rng, seed_stream

MAX_FREE_SPINS = 24
MAX_ORACLE_QUBITS = 12

_S2 = 1 / sqrt(2)
GATE_MATRICES = {
    "H": _S2 * np.array([[1, 1], [1, -1]], dtype=complex),
    "SX": _S2 * np.array([[1j, 1], [1, 1j]], dtype=complex),
    "SY": _S2 * np.array([[1, -1], [1, 1]], dtype=complex),
    "SYT": _S2 * np.array([[1, 1], [-1, 1]], dtype=complex),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}
NON_DIAGONAL = {"H", "SX", "SY", "SYT"}
ARITY = {"H": 1, "SX": 1, "SY": 1, "SYT": 1, "T": 1, "CZ": 2}
TRANSPOSE = {"SY": "SYT", "SYT": "SY"}

# (2*offset, J, 2*h_left, 2*h_right) per non-diagonal gate; fields doubled to stay integral
_TWO_POINT = {
    "SX": (2, 1, 0, 0),
    "SY": (2, -1, -2, 2),
    "SYT": (2, -1, 2, -2),
    "H": (2, 1, -2, -2),
}


class Gate(NamedTuple):
    kind: str
    qubits: tuple[int, ...]

    def transposed(self) -> "Gate":
        return Gate(TRANSPOSE.get(self.kind, self.kind), self.qubits)

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.qubits)])


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    layers: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        for i, layer in enumerate(self.layers):
            seen: set[int] = set()
            for g in layer:
                if g.kind not in ARITY or len(g.qubits) != ARITY[g.kind]:
                    raise ValueError(f"layer {i}: malformed gate {g}")
                for q in g.qubits:
                    if not 0 <= q < self.n_qubits:
                        raise ValueError(f"layer {i}: qubit {q} out of range")
                    if q in seen:
                        raise ValueError(f"layer {i}: qubit {q} touched twice")
                    seen.add(q)

    def gates(self):
        for layer in self.layers:
            yield from layer

    @property
    def n_non_diagonal(self) -> int:
        return sum(g.kind in NON_DIAGONAL for g in self.gates())

    def to_text(self) -> str:
        return "".join(", ".join(map(str, layer)) + "\n" for layer in self.layers)

    @classmethod
    def from_text(cls, text: str, n_qubits: int | None = None) -> "Circuit":
        layers = []
        for line in text.splitlines():
            line = line.split("#", 1)[0]
            tokens = line.replace(",", " ").split()
            if not tokens:
                continue
            layer, k = [], 0
            while k < len(tokens):
                kind = tokens[k].upper()
                if kind not in ARITY:
                    raise ValueError(f"unknown gate token {tokens[k]!r}")
                n = ARITY[kind]
                qs = tuple(int(t) for t in tokens[k + 1:k + 1 + n])
                if len(qs) != n:
                    raise ValueError(f"gate {kind} needs {n} qubit indices")
                layer.append(Gate(kind, qs))
                k += 1 + n
            layers.append(tuple(layer))
        if n_qubits is None:
            n_qubits = 1 + max((q for layer in layers for g in layer for q in g.qubits), default=0)
        return cls(n_qubits, tuple(layers))


def build_coe_circuit(n_qubits: int, n_layers: int, seed: int) -> Circuit:
    """``U^T U`` for a random circuit ``U``: a Hadamard layer then ``n_layers`` cycles.

    Each cycle is one layer of single-qubit gates drawn uniformly from
    {SX, SY, T} followed by CZ on nearest-neighbour pairs starting at qubit 0
    on even cycles and qubit 1 on odd ones. The transpose half replays the
    forward layers in reverse with SY replaced by SYT.
    """
    if n_qubits < 1 or n_layers < 0:
        raise ValueError("need n_qubits >= 1 and n_layers >= 0")
    rng = make_rng(seed)
    choices = ("SX", "SY", "T")
    forward = [tuple(Gate("H", (q,)) for q in range(n_qubits))]
    for cycle in range(n_layers):
        picks = rng.integers(0, 3, size=n_qubits)
        forward.append(tuple(Gate(choices[p], (q,)) for q, p in enumerate(picks)))
        cz = tuple(Gate("CZ", (q, q + 1)) for q in range(cycle % 2, n_qubits - 1, 2))
        if cz:
            forward.append(cz)
    backward = [tuple(g.transposed() for g in layer) for layer in reversed(forward)]
    return Circuit(n_qubits, tuple(forward + backward))


# --- statevector oracle -------------------------------------------------------

def _bits(value, n: int) -> tuple[int, ...]:
    if isinstance(value, (int, np.integer)):
        return tuple((int(value) >> (n - 1 - q)) & 1 for q in range(n))
    bits = tuple(int(b) for b in value)
    if len(bits) != n:
        raise ValueError(f"bit-string length {len(bits)} != {n}")
    return bits


def _apply(state: np.ndarray, gate: Gate) -> np.ndarray:
    m = GATE_MATRICES[gate.kind]
    k = len(gate.qubits)
    m = m.reshape((2,) * (2 * k))
    out = np.tensordot(m, state, axes=(list(range(k, 2 * k)), list(gate.qubits)))
    return np.moveaxis(out, list(range(k)), list(gate.qubits))


def run_statevector(c: Circuit, state: np.ndarray, M: int = 1) -> np.ndarray:
    if c.n_qubits > MAX_ORACLE_QUBITS:
        raise SizeLimitError(f"{c.n_qubits} qubits exceed oracle limit {MAX_ORACLE_QUBITS}")
    psi = np.asarray(state, dtype=complex).reshape((2,) * c.n_qubits)
    for _ in range(M):
        for g in c.gates():
            psi = _apply(psi, g)
    return psi.reshape(-1)


def circuit_unitary(c: Circuit, M: int = 1) -> np.ndarray:
    n = 1 << c.n_qubits
    return np.stack([run_statevector(c, np.eye(n)[k], M) for k in range(n)], axis=1)


def amplitude_oracle(c: Circuit, z0, z, M: int = 1) -> complex:
    """``<z| C^M |z0>`` by dense statevector simulation (qubit 0 is the leading bit)."""
    n = c.n_qubits
    if n > MAX_ORACLE_QUBITS:
        raise SizeLimitError(f"{n} qubits exceed oracle limit {MAX_ORACLE_QUBITS}")
    b0, b1 = _bits(z0, n), _bits(z, n)
    psi = np.zeros((2,) * n, dtype=complex)
    psi[b0] = 1.0
    out = run_statevector(c, psi, M).reshape((2,) * n)
    return complex(out[b1])


# --- Ising mapping ------------------------------------------------------------

@dataclass
class IsingGraph:
    """Complex-weight Ising model ``E(s) = offset + sum h_i s_i + sum J_ij s_i s_j``.

    Fields and the offset are half-integers and are stored doubled
    (``h2``, ``offset2``); couplings are integers.
    """

    nodes: list[dict]
    h2: np.ndarray
    edges: dict[tuple[int, int], int]
    pins: dict[int, int]
    G: int
    offset2: int = 0

    @property
    def h(self) -> np.ndarray:
        return self.h2 / 2.0

    @property
    def offset(self) -> float:
        return self.offset2 / 2.0

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def free_nodes(self) -> list[int]:
        return [i for i in range(self.n_nodes) if i not in self.pins]

    @property
    def n_free(self) -> int:
        return self.n_nodes - len(self.pins)

    def energy(self, spins) -> np.ndarray:
        """``E(s)`` for full spin assignments (pins are not enforced here)."""
        s = np.atleast_2d(np.asarray(spins, dtype=float))
        e = self.offset + s @ self.h
        for (i, j), J in self.edges.items():
            e = e + J * s[:, i] * s[:, j]
        return e

    def to_json(self) -> str:
        data = {
            "nodes": self.nodes,
            "h": [float(x) for x in self.h],
            "edges": [[i, j, int(J)] for (i, j), J in sorted(self.edges.items())],
            "pins": {str(k): int(v) for k, v in sorted(self.pins.items())},
            "G": int(self.G),
            "offset": self.offset,
        }
        return json.dumps(data, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IsingGraph":
        d = json.loads(text)
        return cls(
            nodes=d["nodes"],
            h2=np.array([round(2 * x) for x in d["h"]], dtype=np.int64),
            edges={(i, j): J for i, j, J in d["edges"]},
            pins={int(k): int(v) for k, v in d["pins"].items()},
            G=int(d["G"]),
            offset2=round(2 * d["offset"]),
        )


class _UnionFind:
    def __init__(self):
        self.parent: list[int] = []

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def map_to_ising(c: Circuit, z0, z, M: int = 1, max_free: int | None = MAX_FREE_SPINS) -> IsingGraph:
    """Ising graph whose partition function equals ``<z| C^M |z0>``.

    Each period gets its own copy of the world-line nodes; the last node of a
    row in period ``m`` is identified with the first node of that row in
    period ``m + 1``. Input spins are pinned to ``1 - 2 z0``, output spins to
    ``1 - 2 z``.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    n = c.n_qubits
    b0, b1 = _bits(z0, n), _bits(z, n)
    uf = _UnionFind()
    raw_nodes: list[dict] = []
    h2: list[int] = []
    edges: list[tuple[int, int, int]] = []
    offset2 = 0
    G = 0

    def new_node(row: int, position: int, period: int) -> int:
        raw_nodes.append({"row": row, "position": position, "period": period})
        h2.append(0)
        return uf.add()

    first: list[int] = []
    current: list[int] = []
    for m in range(M):
        starts = [new_node(q, 0, m) for q in range(n)]
        if m == 0:
            first = list(starts)
        else:
            for q in range(n):
                uf.union(current[q], starts[q])
        current = list(starts)
        position = [0] * n
        for g in c.gates():
            if g.kind in NON_DIAGONAL:
                (q,) = g.qubits
                o2, J, hl, hr = _TWO_POINT[g.kind]
                position[q] += 1
                j = new_node(q, position[q], m)
                i = current[q]
                edges.append((i, j, J))
                h2[i] += hl
                h2[j] += hr
                offset2 += o2
                G += 1
                current[q] = j
            elif g.kind == "T":
                h2[current[g.qubits[0]]] -= 1
                offset2 += 1
            elif g.kind == "CZ":
                a, b = (current[q] for q in g.qubits)
                edges.append((a, b, 1))
                h2[a] -= 2
                h2[b] -= 2
                offset2 += 2
            else:  # pragma: no cover - Circuit validates kinds
                raise MappingError(f"unsupported gate {g.kind}")

    raw_pins: list[tuple[int, int]] = [(first[q], 1 - 2 * b0[q]) for q in range(n)]
    raw_pins += [(current[q], 1 - 2 * b1[q]) for q in range(n)]

    # compact union-find roots into consecutive node ids, in creation order
    roots: dict[int, int] = {}
    for k in range(len(raw_nodes)):
        r = uf.find(k)
        if r not in roots:
            roots[r] = len(roots)
    nid = [roots[uf.find(k)] for k in range(len(raw_nodes))]
    nodes = [dict(raw_nodes[r]) for r in roots]
    H2 = np.zeros(len(nodes), dtype=np.int64)
    for k, v in enumerate(h2):
        H2[nid[k]] += v
    emap: dict[tuple[int, int], int] = {}
    for i, j, J in edges:
        a, b = nid[i], nid[j]
        if a == b:
            offset2 += 2 * J  # s_a^2 = 1
            continue
        key = (min(a, b), max(a, b))
        emap[key] = emap.get(key, 0) + J
    emap = {k: v for k, v in emap.items() if v != 0}
    pins: dict[int, int] = {}
    for k, s in raw_pins:
        a = nid[k]
        if pins.get(a, s) != s:
            raise MappingError(f"node {a} pinned to both +1 and -1")
        pins[a] = s

    graph = IsingGraph(nodes=nodes, h2=H2, edges=emap, pins=pins, G=G, offset2=offset2)
    if max_free is not None and graph.n_free > max_free:
        raise SizeLimitError(f"{graph.n_free} free spins exceed the limit of {max_free}")
    return graph


def _half_energies(graph: IsingGraph):
    """Doubled energy as a quadratic form in the free spins after substituting pins."""
    free = graph.free_nodes
    index = {node: k for k, node in enumerate(free)}
    const2 = graph.offset2 + sum(int(graph.h2[p]) * s for p, s in graph.pins.items())
    field2 = np.array([int(graph.h2[f]) for f in free], dtype=np.int64)
    K = np.zeros((len(free), len(free)), dtype=np.int64)
    for (i, j), J in graph.edges.items():
        pi_, pj = i in graph.pins, j in graph.pins
        if pi_ and pj:
            const2 += 2 * J * graph.pins[i] * graph.pins[j]
        elif pi_:
            field2[index[j]] += 2 * J * graph.pins[i]
        elif pj:
            field2[index[i]] += 2 * J * graph.pins[j]
        else:
            a, b = index[i], index[j]
            K[a, b] += 2 * J
            K[b, a] += 2 * J
    return const2, field2, K


def _spin_table(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (1 - 2 * bits).astype(float)


def energy_residue_counts(graph: IsingGraph, max_free: int = MAX_FREE_SPINS) -> np.ndarray:
    """Number of free-spin assignments with ``2 E(s) = r (mod 16)`` for ``r = 0..15``.

    Every assignment is enumerated. Free spin ``k`` takes the value of bit ``k``
    of the configuration index; the index space is split into a low and a high
    half so that the energy is assembled as ``E_low + E_high + cross`` with
    exact small-integer arithmetic in float64.
    """
    n = graph.n_free
    if n > max_free:
        raise SizeLimitError(f"{n} free spins exceed the limit of {max_free}")
    const2, field2, K = _half_energies(graph)
    counts = np.zeros(16, dtype=np.int64)
    if n == 0:
        counts[const2 % 16] += 1
        return counts
    n_lo = n // 2
    n_hi = n - n_lo
    S_lo, S_hi = _spin_table(n_lo), _spin_table(n_hi)
    f = field2.astype(float)
    Kf = K.astype(float)
    lo, hi = slice(0, n_lo), slice(n_lo, n)
    e_lo = S_lo @ f[lo] + 0.5 * np.einsum("ci,ij,cj->c", S_lo, Kf[lo, lo], S_lo)
    e_hi = S_hi @ f[hi] + 0.5 * np.einsum("ci,ij,cj->c", S_hi, Kf[hi, hi], S_hi)
    cross_w = S_lo @ Kf[lo, hi]  # (2^n_lo, n_hi)
    block = max(1, (1 << 22) // max(1, S_lo.shape[0]))
    for start in range(0, S_hi.shape[0], block):
        sh = S_hi[start:start + block]
        e2 = const2 + e_lo[:, None] + e_hi[None, start:start + block] + cross_w @ sh.T
        r = np.rint(e2).astype(np.int64) % 16
        counts += np.bincount(r.ravel(), minlength=16)
    return counts


def partition_function(graph: IsingGraph, max_free: int = MAX_FREE_SPINS) -> complex:
    """``2^{-G/2} sum_s exp[(i pi/4) E(s)]`` over all free-spin assignments."""
    counts = energy_residue_counts(graph, max_free)
    phases = np.exp(1j * np.pi * np.arange(16) / 8)
    return complex(2.0 ** (-graph.G / 2) * np.dot(counts, phases))


def verify_mapping(c: Circuit, M: int, trials: int, seed: int) -> float:
    """Largest ``|Z_Ising - amplitude|`` over ``trials`` random ``(z0, z)`` pairs."""
    rng = make_rng(seed)
    dim = 1 << c.n_qubits
    worst = 0.0
    for _ in range(trials):
        z0, z = (int(v) for v in rng.integers(0, dim, size=2))
        zi = partition_function(map_to_ising(c, z0, z, M))
        amp = amplitude_oracle(c, z0, z, M)
        worst = max(worst, abs(zi - amp))
    return worst


@dataclass
class MappingReport:
    max_deviation: float
    n_circuits: int
    n_amplitudes: int
    failures: int
    cases: list = field(default_factory=list)


def verify_random_circuits(n_circuits: int = 100, max_qubits: int = 4, max_layers: int = 8,
                           Ms=(1, 2), trials: int = 2, seed: int = 0,
                           max_free: int = MAX_FREE_SPINS, tol: float = 1e-10) -> MappingReport:
    """Check the mapping on random COE circuits of random size.

    Sizes are drawn uniformly (qubits in ``1..max_qubits``, cycles in
    ``1..max_layers``, ``M`` from ``Ms``); when the drawn instance exceeds the
    free-spin guard its cycle count is lowered until it fits.
    """
    report = MappingReport(0.0, 0, 0, 0)
    for i in range(n_circuits):
        rng = make_rng(seed_stream(seed, i))
        nq = int(rng.integers(1, max_qubits + 1))
        nl = int(rng.integers(1, max_layers + 1))
        M = int(Ms[int(rng.integers(0, len(Ms)))])
        cseed = int(rng.integers(0, 2**63))
        while True:
            c = build_coe_circuit(nq, nl, cseed)
            nfree = map_to_ising(c, 0, 0, M, max_free=None).n_free
            if nfree <= max_free or nl == 0:
                break
            nl -= 1
        dev = verify_mapping(c, M, trials, seed_stream(cseed, 1))
        report.cases.append({"n_qubits": nq, "cycles": nl, "M": M, "free_spins": nfree,
                             "max_deviation": dev})
        report.max_deviation = max(report.max_deviation, dev)
        report.n_circuits += 1
        report.n_amplitudes += trials
        report.failures += int(not dev < tol)
    return report
