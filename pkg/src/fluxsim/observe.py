"""Everything the simulations report: spectral weights, direction weights,
eigenstate populations, continuum occupation, gap minima, damping fits,
success probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from .basis import AnnealerConfiguration, Basis, SingleQubitConfiguration
from .operators import HermitianOperator
from .propagate import EvolutionResult, WaveFunctional

WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class SpectralDistribution:
    """Non-negative weights over an energy axis, summing to one."""

    energies: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if self.energies.shape != self.weights.shape:
            raise ValueError("energies and weights must align")
        if np.any(self.weights < -WEIGHT_TOL):
            raise ValueError("weights must be non-negative")
        if abs(self.weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {self.weights.sum()}, expected 1")


@dataclass
class PopulationTrace:
    """Labelled weight-vs-time series over a common time grid."""

    times: np.ndarray
    series: dict

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        for label, values in self.series.items():
            self.series[label] = np.asarray(values, dtype=float)
            if self.series[label].shape != self.times.shape:
                raise ValueError(f"series {label!r} does not match the time grid")


@dataclass(frozen=True)
class DampingFit:
    """Envelope fit of an oscillating trace: plateau +- amplitude*exp(-t/tau)."""

    amplitude: float
    decay_time: float
    plateau: float
    residual: float
    window: float

    @property
    def undamped(self) -> bool:
        """Decay slower than ten fit windows is indistinguishable from none."""
        return self.decay_time > 10.0 * self.window


def spectral_weight(psi0: WaveFunctional, h: HermitianOperator) -> SpectralDistribution:
    """Weight |<n|psi0>|^2 of the state on each eigenstate of h."""
    if psi0.amplitudes.shape[0] != h.dimension:
        raise ValueError("state and operator dimensions differ")
    energies, vectors = np.linalg.eigh(h.dense())
    weights = np.abs(vectors.conj().T @ psi0.amplitudes) ** 2
    return SpectralDistribution(energies=energies, weights=weights / weights.sum())


def _single_qubit_direction_mask(basis: Basis, direction: int) -> np.ndarray:
    if not isinstance(basis[0], SingleQubitConfiguration):
        raise ValueError("current_direction_weight expects the single-qubit basis")
    return np.array([c.current_direction == direction for c in basis])


def current_direction_weight(result: EvolutionResult, direction: int) -> PopulationTrace:
    """Total weight of all configurations with the current in one direction."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    mask = _single_qubit_direction_mask(result.states[0].basis, direction)
    values = result.weights()[:, mask].sum(axis=1)
    return PopulationTrace(times=result.times, series={f"direction_{direction:+d}": values})


def gravonon_sector_weight(result: EvolutionResult) -> PopulationTrace:
    """Weights of the kappa-excited, lambda-excited and flat sectors."""
    basis = result.states[0].basis
    if not isinstance(basis[0], SingleQubitConfiguration):
        raise ValueError("gravonon_sector_weight expects the single-qubit basis")
    kappa = np.array([c.kappa_index > 0 for c in basis])
    lam = np.array([c.lambda_index > 0 for c in basis])
    w = result.weights()
    return PopulationTrace(times=result.times, series={
        "kappa": w[:, kappa].sum(axis=1),
        "lambda": w[:, lam].sum(axis=1),
        "flat": w[:, ~(kappa | lam)].sum(axis=1),
    })


def spin_direction_weight(result: EvolutionResult, qubit: int, direction: int) -> PopulationTrace:
    """Weight of all annealer configurations with one qubit's current in the
    given direction (phonon and continuum labels traced over)."""
    basis = result.states[0].basis
    if not isinstance(basis[0], AnnealerConfiguration):
        raise ValueError("spin_direction_weight expects the annealer basis")
    mask = np.array([c.ising.spins[qubit - 1] == direction for c in basis])
    values = result.weights()[:, mask].sum(axis=1)
    return PopulationTrace(times=result.times,
                           series={f"qubit{qubit}_{direction:+d}": values})


def spin_alignment_weight(result: EvolutionResult, qubit: int,
                          reference_qubit: int = 1) -> PopulationTrace:
    """Weight of configurations where one qubit's current is aligned with a
    reference qubit's. The Hamiltonian commutes with the global spin flip, so
    the absolute direction weight of a parity eigenstate is identically 1/2;
    the current *relative to the rest of the register* is the observable that
    actually flips.
    """
    basis = result.states[0].basis
    if not isinstance(basis[0], AnnealerConfiguration):
        raise ValueError("spin_alignment_weight expects the annealer basis")
    mask = np.array([c.ising.spins[qubit - 1] == c.ising.spins[reference_qubit - 1]
                     for c in basis])
    values = result.weights()[:, mask].sum(axis=1)
    return PopulationTrace(times=result.times,
                           series={f"qubit{qubit}_aligned_{reference_qubit}": values})


def eigenstate_population(result: EvolutionResult,
                          reference_h: Callable[[float], HermitianOperator],
                          n_lowest: int) -> PopulationTrace:
    """Weights of the lowest instantaneous eigenstates of the unperturbed
    (no phonon, no continuum) Hamiltonian, recomputed per snapshot.

    Phonon and continuum labels are traced over; eigenstates are labelled by
    energy order, which differs from overlap continuity exactly at crossings.
    """
    basis = result.states[0].basis
    if not isinstance(basis[0], AnnealerConfiguration):
        raise ValueError("eigenstate_population expects the annealer basis")
    n_spin = 2 ** basis[0].ising.n_qubits
    series = {n: [] for n in range(n_lowest)}
    for t, state in zip(result.times, result.states):
        href = reference_h(float(t))
        if href.dimension != n_spin:
            raise ValueError("reference Hamiltonian must live on the plain spin basis")
        _, vectors = np.linalg.eigh(href.dense())
        block = state.amplitudes.reshape(n_spin, -1)
        overlaps = vectors.conj().T @ block  # (n_spin, n_sectors)
        weights = (np.abs(overlaps) ** 2).sum(axis=1)
        for n in range(n_lowest):
            series[n].append(weights[n])
    return PopulationTrace(times=result.times,
                           series={f"eigenstate_{n}": np.array(v)
                                   for n, v in series.items()})


def ground_manifold_weight(result: EvolutionResult,
                           reference_h: Callable[[float], HermitianOperator],
                           manifold_size: int = 2) -> PopulationTrace:
    """Weight on the lowest `manifold_size` instantaneous eigenstates of the
    unperturbed reference, traced over phonon and continuum labels. The
    default of two covers the globally flipped ground pair, which becomes
    exactly degenerate at the end of the anneal."""
    basis = result.states[0].basis
    n_spin = 2 ** basis[0].ising.n_qubits
    values = []
    for t, state in zip(result.times, result.states):
        href = reference_h(float(t))
        _, vectors = np.linalg.eigh(href.dense())
        block = state.amplitudes.reshape(n_spin, -1)
        overlaps = vectors[:, :manifold_size].conj().T @ block
        values.append((np.abs(overlaps) ** 2).sum())
    return PopulationTrace(times=result.times,
                           series={"ground_manifold": np.array(values)})


def gravonon_occupation_spectrum(result: EvolutionResult,
                                 band=None) -> list:
    """Per-time distribution over the continuum mode index (0 = ground mode).

    Returns a list of (time, SpectralDistribution); the energy axis is the
    band energies prefixed with 0 for the ground mode, or plain indices when
    no band is given."""
    basis = result.states[0].basis
    if not isinstance(basis[0], AnnealerConfiguration):
        raise ValueError("gravonon_occupation_spectrum expects the annealer basis")
    n_grav = max(c.gravonon_index for c in basis) + 1
    n_spin = 2 ** basis[0].ising.n_qubits
    if band is not None:
        axis = np.concatenate(([0.0], band.energies))
    else:
        axis = np.arange(n_grav, dtype=float)
    out = []
    for t, state in zip(result.times, result.states):
        block = np.abs(state.amplitudes.reshape(n_spin, -1, n_grav)) ** 2
        weights = block.sum(axis=(0, 1))
        out.append((float(t), SpectralDistribution(energies=axis,
                                                   weights=weights / weights.sum())))
    return out


def min_gap(spectrum: Sequence) -> tuple:
    """Minimum over time of E_1 - E_0, with parabolic refinement around the
    grid minimum.  `spectrum` is a list of (time, energies)."""
    times = np.array([t for t, _ in spectrum])
    gaps = np.array([e[1] - e[0] for _, e in spectrum])
    if gaps.size < 1 or any(len(e) < 2 for _, e in spectrum):
        raise ValueError("need at least two energy levels per time")
    k = int(np.argmin(gaps))
    if 0 < k < gaps.size - 1:
        # parabola through the three points around the grid minimum
        t0, t1, t2 = times[k - 1:k + 2]
        g0, g1, g2 = gaps[k - 1:k + 2]
        denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
        a = (t2 * (g1 - g0) + t1 * (g0 - g2) + t0 * (g2 - g1)) / denom
        b = (t2 ** 2 * (g0 - g1) + t1 ** 2 * (g2 - g0) + t0 ** 2 * (g1 - g2)) / denom
        if a > 0:
            t_min = -b / (2 * a)
            if t0 <= t_min <= t2:
                c = g1 - a * t1 ** 2 - b * t1
                return (float(t_min), float(a * t_min ** 2 + b * t_min + c))
    return (float(times[k]), float(gaps[k]))


def _extrema(times: np.ndarray, values: np.ndarray):
    """Interior local extrema (times, values, kind) of a sampled trace."""
    d = np.diff(values)
    ext_t, ext_v, kind = [], [], []
    for i in range(1, values.size - 1):
        if d[i - 1] > 0 >= d[i]:
            ext_t.append(times[i]); ext_v.append(values[i]); kind.append(1)
        elif d[i - 1] < 0 <= d[i]:
            ext_t.append(times[i]); ext_v.append(values[i]); kind.append(-1)
    return np.array(ext_t), np.array(ext_v), np.array(kind)


def fit_damped_oscillation(trace: PopulationTrace, series: Optional[str] = None) -> DampingFit:
    """Least-squares fit of the oscillation envelope (extrema) to
    plateau +- amplitude * exp(-t / decay_time)."""
    if series is None:
        if len(trace.series) != 1:
            raise ValueError("trace has several series; name one")
        series = next(iter(trace.series))
    times = trace.times
    values = trace.series[series]
    ext_t, ext_v, kind = _extrema(times, values)
    if ext_t.size < 3:
        raise ValueError(f"trace has {ext_t.size} extrema; need at least 3 to fit")
    # Multi-frequency beats produce secondary wiggles: maxima below the
    # late-time level and minima above it. Only the outer extrema carry the
    # envelope, so drop the rest (keeping at least the three largest).
    level = float(np.median(values[int(0.8 * values.size):]))
    outer = kind * (ext_v - level) > 0
    if outer.sum() >= 3:
        ext_t, ext_v, kind = ext_t[outer], ext_v[outer], kind[outer]
    window = float(times[-1] - times[0])
    tau_max = 1e3 * window

    def residuals(p):
        amplitude, log_tau, plateau = p
        envelope = amplitude * np.exp(-ext_t / np.exp(log_tau))
        return plateau + kind * envelope - ext_v

    a0 = max(0.5 * (ext_v.max() - ext_v.min()), 1e-6)
    p0 = np.array([a0, np.log(window / 3.0), float(np.clip(np.mean(ext_v), 0, 1))])
    fit = least_squares(residuals, p0,
                        bounds=([0.0, np.log(1e-3 * window), 0.0],
                                [2.0, np.log(tau_max), 1.0]))
    amplitude, log_tau, plateau = fit.x
    rms = float(np.sqrt(np.mean(fit.fun ** 2)))
    return DampingFit(amplitude=float(amplitude), decay_time=float(np.exp(log_tau)),
                      plateau=float(plateau), residual=rms, window=window)


def ising_energies(j_matrix: np.ndarray, n_qubits: int = None) -> np.ndarray:
    """Diagonal Ising energies over the spin basis ordering, ordered-pair
    (double-counted) convention: E(s) = sum_{a != b} J_ab s_a s_b."""
    from .basis import all_ising_configurations
    j = np.asarray(j_matrix, dtype=float)
    n = n_qubits or j.shape[0]
    spins = np.array([c.spins for c in all_ising_configurations(n)], dtype=float)
    return np.einsum("ia,ab,ib->i", spins, j, spins)


def success_probability(final_state: WaveFunctional, j_matrix: np.ndarray) -> float:
    """Total weight on the Ising ground manifold (all spin configurations at
    the minimum energy, including the globally flipped partner)."""
    basis = final_state.basis
    if not isinstance(basis[0], AnnealerConfiguration):
        raise ValueError("success_probability expects the annealer basis")
    n_qubits = basis[0].ising.n_qubits
    energies = ising_energies(j_matrix, n_qubits)
    spread = max(energies.max() - energies.min(), 1.0)
    ground = energies - energies.min() <= 1e-9 * spread
    block = np.abs(final_state.amplitudes.reshape(2 ** n_qubits, -1)) ** 2
    return float(block.sum(axis=1)[ground].sum())
