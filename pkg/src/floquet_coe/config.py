"""Experiment configuration: plain-text ``key = value`` files."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

EXPERIMENTS = ("level_spacing", "eigenstate_dist", "pt_convergence", "anti_concentration",
               "undriven_compare", "verify_ising_map", "rmt_baseline")
MODELS = ("ising", "bose_hubbard", "coe", "goe")


@dataclass
class ExperimentConfig:
    experiment: str
    model: str = "ising"
    L: int = 8
    n_particles: int | None = None
    N: int | None = None
    W: float = 1.0
    J: float = 1.0
    F: float = 2.5
    U_int: float = 1.0
    omega: float = 8.0
    M_list: list[int] = field(default_factory=lambda: [1])
    plateau_M: list[int] = field(default_factory=lambda: list(range(100, 200)))
    times: list[float] = field(default_factory=lambda: [1000.0 + 10.0 * k for k in range(100)])
    realizations: int = 10
    master_seed: int = 0
    output_dir: str = "out"
    threads: int = 1
    r_bins: int = 40
    pt_bins: int = 48
    pt_xmax: float = 12.0
    d_bins: int = 60
    coe_reference_samples: int = 500
    coe_reference_N: int | None = None
    integrator_tol: float = 1e-8
    start_steps: int = 64
    scheme: str = "bm4"
    trials: int = 2
    max_qubits: int = 4
    max_layers: int = 8

    def __post_init__(self):
        self.validate()

    @property
    def dim(self) -> int:
        """Hilbert-space dimension implied by the model parameters."""
        from math import comb

        if self.model == "ising":
            return 1 << self.L
        if self.model == "bose_hubbard":
            n = self.particles
            return comb(n + self.L - 1, n)
        if self.N is None:
            raise ConfigError(f"model {self.model} needs N")
        return self.N

    @property
    def particles(self) -> int:
        return self.L // 2 if self.n_particles is None else self.n_particles

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        for name in ("W", "J", "F", "U_int", "omega", "pt_xmax", "integrator_tol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be finite and nonnegative, got {v}")
        if self.omega <= 0:
            raise ConfigError("omega must be positive")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.model in ("ising", "bose_hubbard") and self.L < 2:
            raise ConfigError("L must be >= 2")
        if self.model in ("coe", "goe") and (self.N is None or self.N < 2):
            raise ConfigError("coe/goe models need N >= 2")
        if any(m < 0 for m in self.M_list) or any(m < 0 for m in self.plateau_M):
            raise ConfigError("cycle counts must be nonnegative")
        if any(not (math.isfinite(t) and t >= 0) for t in self.times):
            raise ConfigError("times must be finite and nonnegative")
        if min(self.r_bins, self.pt_bins, self.d_bins) < 1:
            raise ConfigError("bin counts must be positive")
        if self.scheme not in ("bm4", "strang"):
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.start_steps < 16 or self.start_steps % 2:
            raise ConfigError("start_steps must be an even integer >= 16")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in an unsigned 64-bit integer")

    def to_dict(self) -> dict:
        return asdict(self)


def _parse_int_list(text: str) -> list[int]:
    out: list[int] = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        if ":" in tok:
            parts = [int(p) for p in tok.split(":")]
            out.extend(range(*parts))
        else:
            out.append(int(tok))
    return out


def _parse_float_list(text: str) -> list[float]:
    out: list[float] = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        if ":" in tok:
            start, stop, step = (float(p) for p in tok.split(":"))
            n = int(math.floor((stop - start) / step + 1e-9))
            out.extend(start + step * k for k in range(max(n, 0)))
        else:
            out.append(float(tok))
    return out


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if key in ("M_list", "plateau_M"):
        return _parse_int_list(raw)
    if key == "times":
        return _parse_float_list(raw)
    if "int" in kind:
        if raw.lower() in ("none", ""):
            return None
        return int(raw, 0)
    if "float" in kind:
        return float(raw)
    return raw


def parse_config_text(text: str, overrides: dict | None = None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` starts a comment)."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = _convert(key, raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {raw!r}") from exc
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if "experiment" not in values:
        raise ConfigError("missing required key 'experiment'")
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, overrides)
