"""The four named experiments, built from validated configuration.

Each run_* function takes a ScenarioConfig and returns a dict of results;
pass out_dir to also write the plot-ready CSV files and a JSON summary.
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from . import io, observe
from .basis import (SingleQubitConfiguration, build_annealer_basis,
                    build_single_qubit_basis)
from .config import ScenarioConfig, default_config  # noqa: F401 (re-export)
from .config import parse_config  # noqa: F401
from .continuum import build_band, calibrate_coupling, golden_rule_width
from .operators import (AnnealerHamiltonian, AnnealerParams, GravononCoupling,
                        PhononCoupling, SingleQubitParams,
                        assemble_single_qubit, flip_even_isometry)
from .propagate import WaveFunctional, evolve_static, evolve_timedep
from .schedule import Schedule
from .units import angular_to_ghz, ghz_to_angular

# Mass inside this margin (rad/ns) of the reference energy counts as neither
# below nor above when splitting a spectral distribution into two clusters.
CLUSTER_MARGIN = 0.1


# Passed as out_dir by internal reference runs that must never write files.
_NO_OUTPUT = object()


def _should_write(cfg: ScenarioConfig, out_dir) -> bool:
    if out_dir is _NO_OUTPUT:
        return False
    return (out_dir is not None or bool(cfg["output.directory"])
            or bool(os.environ.get("FLUXSIM_OUT")))


def resolve_out_dir(cfg: ScenarioConfig, out_dir=None) -> Path:
    if out_dir is not None:
        path = Path(out_dir)
    elif cfg["output.directory"]:
        path = Path(cfg["output.directory"])
    else:
        path = Path(os.environ.get("FLUXSIM_OUT", "out"))
    path.mkdir(parents=True, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# parameter builders


def make_single_qubit_params(cfg: ScenarioConfig, coupled: bool = True) -> SingleQubitParams:
    n = cfg["single.band.n_modes"]
    center = ghz_to_angular(cfg["single.band.center"])
    halfwidth = ghz_to_angular(cfg["single.band.halfwidth"])
    if coupled:
        w = calibrate_coupling((n, center, halfwidth), cfg["single.band.lifetime"])
    else:
        w = 0.0
    band_kappa = build_band(n, center, halfwidth, w)
    band_lambda = build_band(n, center, halfwidth, w)
    return SingleQubitParams(
        e_qubit=(ghz_to_angular(cfg["single.e_qubit_1"]), ghz_to_angular(cfg["single.e_qubit_2"])),
        e_warp=(ghz_to_angular(cfg["single.e_warp_1"]), ghz_to_angular(cfg["single.e_warp_2"])),
        v_loc=(ghz_to_angular(cfg["single.v_loc_1"]), ghz_to_angular(cfg["single.v_loc_2"])),
        omega_photon=ghz_to_angular(cfg["single.omega_photon"]),
        v_dipole=ghz_to_angular(cfg["single.v_dipole"]),
        kappa_band=band_kappa,
        lambda_band=band_lambda,
    )


def make_j_matrix(cfg: ScenarioConfig) -> np.ndarray:
    ring = ghz_to_angular(cfg["anneal.j_ring"])
    chord = ghz_to_angular(cfg["anneal.j_chord"])
    j = np.zeros((4, 4))
    for a, b in ((0, 1), (1, 2), (2, 3), (3, 0)):
        j[a, b] = j[b, a] = ring
    j[0, 2] = j[2, 0] = chord
    return j


def make_schedule(cfg: ScenarioConfig) -> Schedule:
    h0 = ghz_to_angular(cfg["anneal.h0"])
    return Schedule(t_f=cfg["anneal.t_f"], h0=(h0,) * 4, form=cfg["anneal.form"])


def make_gravonon_band(cfg: ScenarioConfig):
    n = cfg["gravonon.n_modes"]
    center = ghz_to_angular(cfg["gravonon.center"])
    halfwidth = ghz_to_angular(cfg["gravonon.halfwidth"])
    w = ghz_to_angular(cfg["gravonon.coupling"])
    return build_band(n, center, halfwidth, w)


def make_annealer_params(cfg: ScenarioConfig, phonon: bool = False,
                         gravonon: bool = False) -> AnnealerParams:
    ph = None
    if phonon:
        ph = PhononCoupling(
            omega_phonon=ghz_to_angular(cfg["phonon.omega"]),
            v_phonon=ghz_to_angular(cfg["phonon.coupling"]),
            switch_on=cfg["phonon.switch_on"],
            ramp=cfg["phonon.ramp"],
            qubit=cfg["phonon.qubit"],
        )
    gr = None
    if gravonon:
        gr = GravononCoupling(
            band=make_gravonon_band(cfg),
            coupled_qubit=cfg["gravonon.coupled_qubit"],
            direction=cfg["gravonon.direction"],
        )
    return AnnealerParams(j_matrix=make_j_matrix(cfg), schedule=make_schedule(cfg),
                          phonon=ph, gravonon=gr)


# ---------------------------------------------------------------------------
# Ramsey scenario


def split_into_clusters(dist, reference_energy: float, margin: float = CLUSTER_MARGIN):
    """Mass of a spectral distribution below / near / above a reference."""
    below = dist.weights[dist.energies < reference_energy - margin].sum()
    above = dist.weights[dist.energies > reference_energy + margin].sum()
    return float(below), float(1.0 - below - above), float(above)


def run_ramsey(cfg: ScenarioConfig, out_dir=None) -> dict:
    n = cfg["single.band.n_modes"]
    basis = build_single_qubit_basis(n, n)
    params = make_single_qubit_params(cfg, coupled=True)
    params0 = make_single_qubit_params(cfg, coupled=False)
    h = assemble_single_qubit(params, basis)
    h0 = assemble_single_qubit(params0, basis)

    psi0 = WaveFunctional.basis_state(basis, SingleQubitConfiguration(1, 0))
    times = np.arange(0.0, cfg["ramsey.t_max"] + 0.5 * cfg["ramsey.sample_dt"],
                      cfg["ramsey.sample_dt"])
    dense_threshold = cfg["numerics.dense_threshold"]
    result = evolve_static(h, psi0, times, dense_threshold=dense_threshold)
    result0 = evolve_static(h0, psi0, times, dense_threshold=dense_threshold)

    plus = observe.current_direction_weight(result, +1)
    minus = observe.current_direction_weight(result, -1)
    plus0 = observe.current_direction_weight(result0, +1)
    sectors = observe.gravonon_sector_weight(result)
    fit = observe.fit_damped_oscillation(plus)
    fit0 = observe.fit_damped_oscillation(plus0)

    spectral = observe.spectral_weight(psi0, h)
    e0 = float(np.real(h.matrix[0, 0]))
    below, near, above = split_into_clusters(spectral, e0)

    summary = {
        "scenario": "ramsey",
        "calibrated_coupling_ghz": angular_to_ghz(params.kappa_band.coupling),
        "golden_rule_width_per_ns": golden_rule_width(params.kappa_band),
        "band_recurrence_time_ns": params.kappa_band.recurrence_time,
        "fit": {"amplitude": fit.amplitude, "decay_time_ns": fit.decay_time,
                "plateau": fit.plateau, "residual": fit.residual,
                "undamped": fit.undamped},
        "fit_uncoupled": {"decay_time_ns": fit0.decay_time, "undamped": fit0.undamped},
        "spectral_split": {"mass_below": below, "mass_near": near, "mass_above": above,
                           "reference_energy_ghz": angular_to_ghz(e0)},
        "norm_drift": max(result.norm_drift, result0.norm_drift),
    }

    if _should_write(cfg, out_dir):
        out = resolve_out_dir(cfg, out_dir)
        io.write_csv(out / "ramsey_traces.csv", {
            "time_ns": times,
            "weight_plus": plus.series["direction_+1"],
            "weight_minus": minus.series["direction_-1"],
            "weight_kappa": sectors.series["kappa"],
            "weight_lambda": sectors.series["lambda"],
            "weight_flat": sectors.series["flat"],
            "weight_plus_uncoupled": plus0.series["direction_+1"],
        })
        io.write_csv(out / "spectral.csv", {
            "energy_ghz": [angular_to_ghz(e) for e in spectral.energies],
            "weight": spectral.weights,
        })
        io.write_json(out / "summary.json", summary)

    return {"result": result, "result_uncoupled": result0, "trace_plus": plus,
            "trace_minus": minus, "trace_plus_uncoupled": plus0, "sectors": sectors,
            "fit": fit, "fit_uncoupled": fit0, "spectral": spectral, "summary": summary}


# ---------------------------------------------------------------------------
# annealing scenarios


def _reference_hamiltonian(cfg: ScenarioConfig):
    """Unperturbed (no phonon, no continuum) annealer on the plain spin basis."""
    basis16 = build_annealer_basis(0, 0)
    family = AnnealerHamiltonian(make_annealer_params(cfg), basis16)
    return basis16, family.at


def _initial_state(basis, family16, basis16):
    """Bare instantaneous ground state at t = 0, embedded in the full basis."""
    h0 = family16(0.0)
    _, vectors = np.linalg.eigh(h0.dense())
    ground16 = vectors[:, 0]
    dim = basis.dimension
    amp = np.zeros(dim, dtype=complex)
    block = amp.reshape(basis16.dimension, -1)
    block[:, 0] = ground16
    return WaveFunctional(basis, amp / np.linalg.norm(amp))


def _symmetric_gap_spectrum(cfg: ScenarioConfig, family16_at, basis16):
    """Two lowest even-sector eigenvalues of the unperturbed H on a grid."""
    iso = flip_even_isometry(basis16)
    times = np.linspace(0.0, cfg["anneal.t_f"], cfg["anneal.spectrum_samples"])
    spectrum = []
    for t in times:
        h_sym = iso.T @ family16_at(float(t)).dense() @ iso
        energies = np.linalg.eigvalsh(h_sym)
        spectrum.append((float(t), energies))
    return spectrum


def _lz_estimate(spectrum, gap_time, gap_value):
    """Diabatic probability exp(-2 pi D^2 / (4 v)) from the gap-curve
    curvature at the avoided crossing: gap ~ sqrt(D^2 + v^2 (t - t*)^2)."""
    times = np.array([t for t, _ in spectrum])
    gaps = np.array([e[1] - e[0] for _, e in spectrum])
    k = int(np.argmin(np.abs(times - gap_time)))
    lo, hi = max(0, k - 2), min(len(times), k + 3)
    if hi - lo < 3:
        return None
    coeffs = np.polyfit(times[lo:hi] - gap_time, gaps[lo:hi], 2)
    curvature = 2.0 * coeffs[0]
    if curvature <= 0:
        return None
    v = math.sqrt(curvature * gap_value)
    return math.exp(-2.0 * math.pi * gap_value ** 2 / (4.0 * v))


def run_anneal(cfg: ScenarioConfig, out_dir=None) -> dict:
    basis16, ref_at = _reference_hamiltonian(cfg)
    psi0 = _initial_state(basis16, ref_at, basis16)
    t_f = cfg["anneal.t_f"]
    result = evolve_timedep(ref_at, psi0, 0.0, t_f, cfg["numerics.dt"],
                            snapshot_stride=cfg["numerics.snapshot_stride"])

    times = np.linspace(0.0, t_f, cfg["anneal.spectrum_samples"])
    from .propagate import instantaneous_spectrum
    full_spectrum = instantaneous_spectrum(ref_at, times, cfg["anneal.n_lowest"])
    sym_spectrum = _symmetric_gap_spectrum(cfg, ref_at, basis16)
    gap_time, gap_value = observe.min_gap(sym_spectrum)
    populations = observe.eigenstate_population(result, ref_at, cfg["anneal.n_lowest"])
    success = observe.success_probability(result.final_state, make_j_matrix(cfg))
    lz = _lz_estimate(sym_spectrum, gap_time, gap_value)

    summary = {
        "scenario": "anneal",
        "t_f_ns": t_f,
        "min_gap_ghz": angular_to_ghz(gap_value),
        "min_gap_time_ns": gap_time,
        "interior_minimum": bool(0.0 < gap_time < t_f),
        "lz_diabatic_estimate": lz,
        "success_probability": success,
        "norm_drift": result.norm_drift,
    }

    if _should_write(cfg, out_dir):
        out = resolve_out_dir(cfg, out_dir)
        io.write_csv(out / "spectrum.csv", {
            "time_ns": [t for t, _ in full_spectrum],
            **{f"e{n}_ghz": [angular_to_ghz(e[n]) for _, e in full_spectrum]
               for n in range(cfg["anneal.n_lowest"])},
        })
        io.write_csv(out / "gap.csv", {
            "time_ns": [t for t, _ in sym_spectrum],
            "gap_ghz": [angular_to_ghz(e[1] - e[0]) for _, e in sym_spectrum],
        })
        io.write_csv(out / "populations.csv", {
            "time_ns": populations.times,
            **{k: v for k, v in populations.series.items()},
        })
        io.write_json(out / "summary.json", summary)

    return {"result": result, "spectrum": full_spectrum, "sym_spectrum": sym_spectrum,
            "populations": populations, "summary": summary}


def _redistribution_stats(cfg, populations, trace_q, switch_on):
    after = populations.times >= switch_on
    ground_after = populations.series["eigenstate_0"][after]
    excited_gains = sorted((float(populations.series[f"eigenstate_{n}"][after].max())
                            for n in range(1, cfg["anneal.n_lowest"])), reverse=True)
    q_values = next(iter(trace_q.series.values()))[after]
    crossings = int(np.sum(np.diff(np.sign(q_values - 0.5)) != 0))
    return {
        "min_ground_weight_after_switch": float(ground_after.min()),
        "excited_max_weights": excited_gains,
        "n_excited_above_0p02": int(sum(g > 0.02 for g in excited_gains)),
        "qubit_crossings_of_half": crossings,
    }


def _run_annealer_model(cfg: ScenarioConfig, phonon: bool, gravonon: bool):
    params = make_annealer_params(cfg, phonon=phonon, gravonon=gravonon)
    n_grav = cfg["gravonon.n_modes"] if gravonon else 0
    basis = build_annealer_basis(cfg["phonon.n_max"] if phonon else 0, n_grav)
    family = AnnealerHamiltonian(params, basis)
    basis16, ref_at = _reference_hamiltonian(cfg)
    psi0 = _initial_state(basis, ref_at, basis16)
    result = evolve_timedep(family.at, psi0, 0.0, cfg["anneal.t_f"], cfg["numerics.dt"],
                            snapshot_stride=cfg["numerics.snapshot_stride"])
    return params, basis, ref_at, result


def run_anneal_phonon(cfg: ScenarioConfig, out_dir=None) -> dict:
    params, basis, ref_at, result = _run_annealer_model(cfg, phonon=True, gravonon=False)
    populations = observe.eigenstate_population(result, ref_at, cfg["anneal.n_lowest"])
    manifold = observe.ground_manifold_weight(result, ref_at)
    q = cfg["phonon.qubit"]
    trace_q = observe.spin_alignment_weight(result, q)
    success = observe.success_probability(result.final_state, make_j_matrix(cfg))
    stats = _redistribution_stats(cfg, populations, trace_q, cfg["phonon.switch_on"])

    summary = {
        "scenario": "anneal-phonon",
        "success_probability": success,
        "norm_drift": result.norm_drift,
        **stats,
    }

    if _should_write(cfg, out_dir):
        out = resolve_out_dir(cfg, out_dir)
        io.write_csv(out / "populations.csv", {
            "time_ns": populations.times,
            **{k: v for k, v in populations.series.items()},
            "ground_manifold": manifold.series["ground_manifold"],
        })
        io.write_csv(out / f"qubit{q}_currents.csv", {
            "time_ns": trace_q.times,
            f"qubit{q}_aligned_weight": trace_q.series[f"qubit{q}_aligned_1"],
        })
        io.write_json(out / "summary.json", summary)

    return {"result": result, "populations": populations, "ground_manifold": manifold,
            "qubit_trace": trace_q, "summary": summary}


def _total_variation(dist_a, dist_b) -> float:
    return 0.5 * float(np.abs(dist_a.weights - dist_b.weights).sum())


# Observation instants for the suppression comparison, as fractions of t_f:
# late enough that the phonon damage in the unprotected run is established,
# early enough that the protected run has not yet accumulated its own damage.
OBSERVE_FRACTIONS = (0.75, 0.79, 0.83, 0.87)
# Manifold weights beat coherently (period ~100-200 ns at the default t_f);
# each instant is reported as a mean over a window of this half-width so the
# comparison reflects the envelope rather than the beat phase.
OBSERVE_HALFWIDTH_FRACTION = 0.05


def _window_mean(times, values, center, half) -> float:
    mask = (times >= center - half) & (times <= center + half)
    if not mask.any():
        return float(np.interp(center, times, values))
    return float(np.asarray(values)[mask].mean())


def run_anneal_phonon_gravonon(cfg: ScenarioConfig, out_dir=None) -> dict:
    params, basis, ref_at, result = _run_annealer_model(cfg, phonon=True, gravonon=True)
    populations = observe.eigenstate_population(result, ref_at, cfg["anneal.n_lowest"])
    manifold = observe.ground_manifold_weight(result, ref_at)
    success = observe.success_probability(result.final_state, make_j_matrix(cfg))
    grav_spectrum = observe.gravonon_occupation_spectrum(result, band=params.gravonon.band)

    # Matched phonon-only reference run for the suppression comparison
    # (output suppressed so it cannot clobber this scenario's files).
    reference = run_anneal_phonon(cfg, out_dir=_NO_OUTPUT)
    ref_manifold = reference["ground_manifold"]

    switch_on, ramp = cfg["phonon.switch_on"], cfg["phonon.ramp"]
    t_f = cfg["anneal.t_f"]
    instants = [frac * t_f for frac in OBSERVE_FRACTIONS]
    half = OBSERVE_HALFWIDTH_FRACTION * t_f
    comparison = []
    for t_obs in instants:
        a = _window_mean(manifold.times, manifold.series["ground_manifold"],
                         t_obs, half)
        b = _window_mean(ref_manifold.times, ref_manifold.series["ground_manifold"],
                         t_obs, half)
        comparison.append({"time_ns": t_obs, "with_gravonons": a,
                           "phonon_only": b, "margin": a - b})

    before = [d for t, d in grav_spectrum if t <= switch_on - 0.5 * ramp][-1]
    after = grav_spectrum[-1][1]
    tv = _total_variation(before, after)

    summary = {
        "scenario": "anneal-phonon-gravonon",
        "success_probability": success,
        "success_probability_phonon_only": reference["summary"]["success_probability"],
        "ground_manifold_comparison": comparison,
        "min_suppression_margin": min(c["margin"] for c in comparison),
        "gravonon_spectrum_total_variation": tv,
        "coupling_ghz": angular_to_ghz(params.gravonon.band.coupling),
        "norm_drift": result.norm_drift,
    }

    if _should_write(cfg, out_dir):
        out = resolve_out_dir(cfg, out_dir)
        io.write_csv(out / "populations.csv", {
            "time_ns": populations.times,
            **{k: v for k, v in populations.series.items()},
            "ground_manifold": manifold.series["ground_manifold"],
        })
        io.write_csv(out / "gravonon_spectrum.csv", {
            "time_ns": [t for t, _ in grav_spectrum],
            **{f"mode_{m}": [d.weights[m] for _, d in grav_spectrum]
               for m in range(grav_spectrum[0][1].weights.size)},
        })
        io.write_json(out / "summary.json", summary)

    return {"result": result, "populations": populations, "ground_manifold": manifold,
            "gravonon_spectrum": grav_spectrum, "reference": reference,
            "summary": summary}


RUNNERS = {
    "ramsey": run_ramsey,
    "anneal": run_anneal,
    "anneal-phonon": run_anneal_phonon,
    "anneal-phonon-gravonon": run_anneal_phonon_gravonon,
}
