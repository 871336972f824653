"""Experiment drivers shared by the command line and the acceptance suite.

Every driver returns an ``ExperimentResult`` holding a JSON-ready summary and
named curves (header plus rows). Realizations are computed independently from
child seeds and always pooled in ascending realization id, so the output does
not depend on how work was scheduled.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import circuit2ising, floquet, rmt, stats
from .config import ExperimentConfig
from .models import DriveEnvelope, build_bose_hubbard, build_ising, random_initial_state
from .seeding import make_rng, seed_stream

log = logging.getLogger(__name__)

POOLING_POLICY = "pooled over all outcomes z and realizations (ascending id), single histogram"


@dataclass
class Realization:
    """Spectral data of one disorder realization or random-matrix instance.

    For ``kind == "floquet"`` the ``phases`` are quasi-energy phases per cycle and
    evolution times are cycle counts; for ``kind == "static"`` they are energies
    and times are physical.
    """

    realization_id: int
    kind: str
    phases: np.ndarray
    eigvecs: np.ndarray
    z0: int
    diagnostics: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)
    mu: list | None = None

    @property
    def N(self) -> int:
        return len(self.phases)


@dataclass
class ExperimentResult:
    summary: dict
    curves: dict = field(default_factory=dict)


def _model(cfg: ExperimentConfig, disorder_seed: int):
    if cfg.model == "ising":
        return build_ising(cfg.L, cfg.W, cfg.J, cfg.F, disorder_seed)
    return build_bose_hubbard(cfg.L, cfg.particles, cfg.W, cfg.J, cfg.F, cfg.U_int, disorder_seed)


def compute_realization(cfg: ExperimentConfig, rid: int, driven: bool = True) -> Realization:
    """One realization; ``driven=False`` replaces the drive by its period average."""
    child = seed_stream(cfg.master_seed, rid)
    dseed, zseed = seed_stream(child, 0), seed_stream(child, 1)
    seeds = {"child": child, "disorder": dseed, "initial_state": zseed}

    if cfg.model == "coe":
        U = rmt.sample_coe(cfg.N, dseed)
        spec = floquet.diagonalize_symmetric_unitary(U)
        z0 = int(make_rng(zseed).integers(0, cfg.N))
        diag = _spectrum_diagnostics(spec)
        return Realization(rid, "floquet", spec.phases, spec.eigvecs, z0, diag, seeds)
    if cfg.model == "goe":
        H = rmt.sample_goe(cfg.N, dseed)
        E, O = np.linalg.eigh(H)
        z0 = int(make_rng(zseed).integers(0, cfg.N))
        return Realization(rid, "static", E, O, z0, {}, seeds)

    model = _model(cfg, dseed)
    z0 = random_initial_state(model.basis, zseed)
    if not driven:
        E, O = np.linalg.eigh(model.average_hamiltonian())
        return Realization(rid, "static", E, O, z0, {}, seeds, model.mu.tolist())
    env = DriveEnvelope(cfg.omega)
    conv = floquet.converged_floquet_operator(model, env, tol=cfg.integrator_tol,
                                              start_steps=cfg.start_steps, scheme=cfg.scheme)
    spec = floquet.diagonalize_symmetric_unitary(conv.U)
    diag = _spectrum_diagnostics(spec)
    diag.update(steps=conv.steps, convergence_residual=conv.residual)
    return Realization(rid, "floquet", spec.phases, spec.eigvecs, z0, diag, seeds, model.mu.tolist())


def _spectrum_diagnostics(spec: floquet.FloquetSpectrum) -> dict:
    return {
        "unitarity_residual": spec.unitarity_residual,
        "symmetry_residual": spec.symmetry_residual,
        "reconstruction_residual": spec.reconstruction_residual(),
        "eigen_residual": spec.eigen_residual(),
    }


def compute_realizations(cfg: ExperimentConfig, ids=None, driven: bool = True,
                         threads: int | None = None) -> list[Realization]:
    ids = list(range(cfg.realizations)) if ids is None else sorted(ids)
    threads = cfg.threads if threads is None else threads
    work = partial(compute_realization, cfg, driven=driven)
    if threads <= 1 or len(ids) <= 1:
        return [work(i) for i in ids]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, ids))


def diagnostics_summary(reals: list[Realization]) -> dict:
    keys = sorted({k for r in reals for k in r.diagnostics})
    out = {}
    for k in keys:
        vals = [r.diagnostics[k] for r in reals if k in r.diagnostics]
        out[f"max_{k}"] = max(vals)
    return out


def _hist_rows(h: stats.Histogram, *refs) -> list[list[float]]:
    rows = []
    dens = h.density
    ref_dens = [[ref.mass(a, b) / (b - a) for a, b in zip(h.edges[:-1], h.edges[1:])] for ref in refs]
    for k in range(len(h.counts)):
        rows.append([h.edges[k], h.edges[k + 1], dens[k], *[rd[k] for rd in ref_dens]])
    return rows


# execution settings that must not change any number in the artifacts
_EXECUTION_KEYS = ("output_dir", "threads")


def config_record(cfg: ExperimentConfig) -> dict:
    return {k: v for k, v in cfg.to_dict().items() if k not in _EXECUTION_KEYS}


def _base_summary(cfg: ExperimentConfig, reals=None) -> dict:
    s = {"config": config_record(cfg), "pooling": POOLING_POLICY}
    if reals:
        s["seeds"] = [r.seeds for r in reals]
        s["initial_states"] = [r.z0 for r in reals]
        s["integrator"] = {"scheme": cfg.scheme, "tolerance": cfg.integrator_tol,
                           "start_steps": cfg.start_steps,
                           "steps": sorted({r.diagnostics["steps"] for r in reals
                                            if "steps" in r.diagnostics})}
        s["residuals"] = diagnostics_summary(reals)
    return s


def r_edges(cfg: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, 1.0, cfg.r_bins + 1)


def pt_edges(cfg: ExperimentConfig) -> np.ndarray:
    return np.linspace(0.0, cfg.pt_xmax, cfg.pt_bins + 1)


# --- individual experiments ---------------------------------------------------

def level_spacing(cfg: ExperimentConfig, reals=None, coe_ref=None) -> ExperimentResult:
    reals = compute_realizations(cfg) if reals is None else reals
    edges = r_edges(cfg)
    coe_N = cfg.coe_reference_N or reals[0].N
    if coe_ref is None:
        coe_ref = rmt.reference_coe_r(coe_N,
                                      cfg.coe_reference_samples,
                                      seed_stream(cfg.master_seed, 2**32), edges)
    poi = rmt.density_poisson_r()
    summary = _base_summary(cfg, reals)
    summary["binning"] = {"r_bins": cfg.r_bins, "range": [0.0, 1.0]}
    summary["coe_reference"] = {"N": coe_N,
                                "samples": cfg.coe_reference_samples, "mean_r": coe_ref.mean_r}
    curves = {}
    per_M = {}
    for M in cfg.M_list:
        h = stats.Histogram.empty(edges)
        rsum, rcount = 0.0, 0
        for r in reals:
            vals = stats.r_statistics(stats.folded_phases(r.phases, max(M, 1)))
            h.add(vals)
            rsum += vals.sum()
            rcount += vals.size
        per_M[str(M)] = {
            "l1_coe": stats.l1_distance(h, coe_ref.density),
            "l1_poisson": stats.l1_distance(h, poi),
            "mean_r": rsum / rcount,
            "first_bin_density": float(h.density[0]),
            "argmax_bin": int(np.argmax(h.counts)),
            "samples": h.total,
        }
        curves[f"r_hist_M{M}"] = (["bin_lo", "bin_hi", "density", "coe_reference", "poisson"],
                                  _hist_rows(h, coe_ref.density, poi))
    summary["results"] = per_M
    return ExperimentResult(summary, curves)


def eigenstate_dist(cfg: ExperimentConfig, reals=None) -> ExperimentResult:
    reals = compute_realizations(cfg) if reals is None else reals
    N = reals[0].N
    edges = stats.d_edges(N, cfg.d_bins)
    h = stats.Histogram.empty(edges)
    for r in reals:
        h.add(np.abs(r.eigvecs * r.eigvecs[r.z0][None, :]))
    ref = rmt.density_bessel_d(N)
    summary = _base_summary(cfg, reals)
    summary["binning"] = {"d_bins": cfg.d_bins, "range": [0.0, float(edges[-1])],
                          "tail": "overflow mass compared with reference tail mass"}
    summary["results"] = {"l1_bessel": stats.l1_distance(h, ref), "samples": h.total,
                          "overflow_fraction": h.overflow / h.total}
    return ExperimentResult(summary, {"d_hist": (["bin_lo", "bin_hi", "density", "bessel"],
                                                 _hist_rows(h, ref))})


def pt_curve(reals, times, edges) -> list[tuple[float, float]]:
    return stats.pt_convergence_curve(reals, times, edges)


def pt_convergence(cfg: ExperimentConfig, reals=None) -> ExperimentResult:
    reals = compute_realizations(cfg) if reals is None else reals
    edges = pt_edges(cfg)
    curve = pt_curve(reals, cfg.M_list, edges)
    summary = _base_summary(cfg, reals)
    summary["binning"] = {"pt_bins": cfg.pt_bins, "range": [0.0, cfg.pt_xmax],
                          "variable": "N*p", "tail": "overflow mass compared with exp(-xmax)"}
    results = {"curve": [[float(m), d] for m, d in curve]}
    if cfg.plateau_M:
        results["plateau_M"] = [min(cfg.plateau_M), max(cfg.plateau_M)]
        results["plateau_l1"] = stats.plateau_distance(reals, cfg.plateau_M, edges)
    summary["results"] = results
    return ExperimentResult(summary, {"pt_convergence": (["M", "l1"], [[m, d] for m, d in curve])})


def amplitude_variances(reals, times) -> dict:
    """Mean over samples and times of the variance over ``z`` of Re and Im amplitudes."""
    va, vb = [], []
    for r in reals:
        amp = floquet.spectral_amplitudes(r.phases, r.eigvecs, r.z0, times)
        va.append(np.var(amp.real, axis=1).mean())
        vb.append(np.var(amp.imag, axis=1).mean())
    N = reals[0].N
    return {"var_a": float(np.mean(va)), "var_b": float(np.mean(vb)),
            "target": 1.0 / (2 * N)}


def anti_concentration(cfg: ExperimentConfig, reals=None) -> ExperimentResult:
    reals = compute_realizations(cfg) if reals is None else reals
    times = cfg.M_list if reals[0].kind == "floquet" else cfg.times
    x = stats.pooled_scaled_probabilities(reals, times)
    edges = pt_edges(cfg)
    h = stats.Histogram.from_samples(x, edges)
    ref = rmt.density_porter_thomas(rescaled=True)
    summary = _base_summary(cfg, reals)
    summary["binning"] = {"pt_bins": cfg.pt_bins, "range": [0.0, cfg.pt_xmax], "variable": "N*p"}
    summary["results"] = {
        "fraction_above_1": stats.anti_concentration_fraction(x, 1.0),
        "porter_thomas_fraction": float(np.exp(-1.0)),
        "mean_scaled_p": float(x.mean()),
        "l1_porter_thomas": stats.l1_distance(h, ref),
        "samples": int(x.size),
        **amplitude_variances(reals, times),
    }
    return ExperimentResult(summary, {"scaled_p_hist": (["bin_lo", "bin_hi", "density", "porter_thomas"],
                                                        _hist_rows(h, ref))})


def undriven_compare(cfg: ExperimentConfig, driven=None, undriven=None, goe=None) -> ExperimentResult:
    """Driven chain vs its period-averaged Hamiltonian vs GOE matrices of equal size."""
    driven = compute_realizations(cfg) if driven is None else driven
    undriven = compute_realizations(cfg, driven=False) if undriven is None else undriven
    if goe is None:
        goe_cfg = ExperimentConfig(**{**cfg.to_dict(), "model": "goe", "N": driven[0].N,
                                      "master_seed": seed_stream(cfg.master_seed, 2**33)})
        goe = compute_realizations(goe_cfg)
    edges = pt_edges(cfg)
    d_plateau = stats.plateau_distance(driven, cfg.plateau_M, edges)
    u_plateau = stats.plateau_distance(undriven, cfg.times, edges)
    g_plateau = stats.plateau_distance(goe, cfg.times, edges)
    bessel = rmt.density_bessel_d(driven[0].N)
    d_l1 = {}
    for name, group in (("driven", driven), ("undriven", undriven), ("goe", goe)):
        h = stats.Histogram.empty(stats.d_edges(group[0].N, cfg.d_bins))
        for r in group:
            h.add(np.abs(r.eigvecs * r.eigvecs[r.z0][None, :]))
        d_l1[name] = stats.l1_distance(h, bessel)
    undriven_curve = pt_curve(undriven, cfg.times, edges)
    goe_curve = pt_curve(goe, cfg.times, edges)
    summary = _base_summary(cfg, driven)
    summary["binning"] = {"pt_bins": cfg.pt_bins, "range": [0.0, cfg.pt_xmax], "d_bins": cfg.d_bins}
    summary["results"] = {
        "driven_plateau_l1": d_plateau,
        "undriven_plateau_l1": u_plateau,
        "goe_plateau_l1": g_plateau,
        "ratio_undriven_to_driven": u_plateau / d_plateau,
        "l1_bessel": d_l1,
        "times": [min(cfg.times), max(cfg.times)],
    }
    rows = [[t, a, b] for (t, a), (_, b) in zip(undriven_curve, goe_curve)]
    return ExperimentResult(summary, {"undriven_pt": (["t", "l1_undriven", "l1_goe"], rows)})


def verify_ising_map(cfg: ExperimentConfig) -> ExperimentResult:
    rep = circuit2ising.verify_random_circuits(
        n_circuits=cfg.realizations, max_qubits=cfg.max_qubits, max_layers=cfg.max_layers,
        Ms=tuple(m for m in cfg.M_list if m >= 1) or (1,), trials=cfg.trials,
        seed=cfg.master_seed)
    summary = {"config": config_record(cfg), "results": {
        "max_deviation": rep.max_deviation, "failures": rep.failures,
        "circuits": rep.n_circuits, "amplitudes": rep.n_amplitudes,
        "free_spin_guard": circuit2ising.MAX_FREE_SPINS,
        "size_policy": "cycles lowered until free spins fit the guard"}}
    rows = [[k, c["n_qubits"], c["cycles"], c["M"], c["free_spins"], c["max_deviation"]]
            for k, c in enumerate(rep.cases)]
    return ExperimentResult(summary, {"ising_map_cases": (
        ["circuit", "n_qubits", "cycles", "M", "free_spins", "max_deviation"], rows)})


def rmt_baseline(cfg: ExperimentConfig, reals=None) -> ExperimentResult:
    """COE sanity run: gap ratios, eigenvector components, Porter-Thomas and amplitude variances."""
    cfg_coe = cfg if cfg.model == "coe" else ExperimentConfig(**{**cfg.to_dict(), "model": "coe"})
    reals = compute_realizations(cfg_coe) if reals is None else reals
    N = reals[0].N
    h_c = stats.Histogram.from_samples(np.abs(np.concatenate([r.eigvecs.ravel() for r in reals])),
                                       np.linspace(0, 4 / np.sqrt(N), 41))
    edges = pt_edges(cfg)
    x = stats.pooled_scaled_probabilities(reals, cfg.plateau_M)
    h_p = stats.Histogram.from_samples(x, edges)
    rvals = np.concatenate([stats.r_statistics(r.phases) for r in reals])
    summary = _base_summary(cfg_coe, reals)
    summary["results"] = {
        "mean_r": float(rvals.mean()),
        "l1_half_normal_c": stats.l1_distance(h_c, rmt.density_half_normal_c(N)),
        "plateau_l1_porter_thomas": stats.l1_distance(h_p, rmt.density_porter_thomas(rescaled=True)),
        "fraction_above_1": stats.anti_concentration_fraction(x, 1.0),
        **amplitude_variances(reals, cfg.plateau_M),
    }
    return ExperimentResult(summary, {"component_hist": (
        ["bin_lo", "bin_hi", "density", "half_normal"], _hist_rows(h_c, rmt.density_half_normal_c(N)))})


DRIVERS = {
    "level_spacing": level_spacing,
    "eigenstate_dist": eigenstate_dist,
    "pt_convergence": pt_convergence,
    "anti_concentration": anti_concentration,
    "undriven_compare": undriven_compare,
    "verify_ising_map": verify_ising_map,
    "rmt_baseline": rmt_baseline,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return DRIVERS[cfg.experiment](cfg)
