"""Hamiltonian assembly for both models, plus Pauli actions.

Single-qubit model: two loop-current states dipole-coupled through the
photon, each hybridized with a warp-region state that scatters into its
continuum band (the scattering is gated on the warp state being occupied).

Annealer: Ising couplings J_ab sigma^z_a sigma^z_b (sum over ordered pairs,
so each bond enters twice), per-qubit transverse fields ht_a(t) sigma^x_a,
an optional phonon mode exchanging quanta with one qubit inside a smooth
switch-on window, and an optional continuum band scattering on one qubit,
gated by that qubit's current direction.

All energies are angular (rad/ns); see fluxsim.units.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import sparse

from .basis import (AnnealerConfiguration, Basis, IsingConfiguration,
                    SingleQubitConfiguration)
from .continuum import GravononBand
from .schedule import Schedule, smooth_window

HERMITICITY_RTOL = 1e-12
DENSE_ASSEMBLY_LIMIT = 512


class AssemblyError(ValueError):
    """Basis / parameter mismatch during operator assembly."""


@dataclass(frozen=True)
class HermitianOperator:
    """Matrix in a Basis, with its structural nonzeros grouped by the named
    physical term that produced them (term -> (k, 2) index array)."""

    basis: Basis
    matrix: object  # dense ndarray or scipy.sparse matrix
    term_tags: dict

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def hermiticity_residual(self) -> float:
        m = self.matrix
        if self.is_sparse:
            diff = abs(m - m.conj().T)
            num = diff.max() if diff.nnz else 0.0
            scale = abs(m).max() if m.nnz else 0.0
        else:
            num = np.max(np.abs(m - m.conj().T))
            scale = np.max(np.abs(m))
        return float(num / scale) if scale else 0.0


def _check_hermitian(op: HermitianOperator):
    res = op.hermiticity_residual()
    if res > HERMITICITY_RTOL:
        raise AssemblyError(f"assembled matrix not Hermitian (residual {res:.2e})")
    return op


# ---------------------------------------------------------------------------
# single-qubit model


@dataclass(frozen=True)
class SingleQubitParams:
    """Parameters of the single flux qubit plus photon model (rad/ns).

    e_qubit / e_warp: energies of the two loop-current and two warp-region
    states; v_loc: loop-warp hybridization per current direction;
    omega_photon / v_dipole: photon energy and the dipole element connecting
    |1,0,0,0> and |-1,1,0,0>; kappa_band / lambda_band: the continuum bands
    attached to the +2 and -2 warp sectors.
    """

    e_qubit: tuple
    e_warp: tuple
    v_loc: tuple
    omega_photon: float
    v_dipole: float
    kappa_band: GravononBand
    lambda_band: GravononBand


def assemble_single_qubit(params: SingleQubitParams, basis: Basis) -> HermitianOperator:
    """Dense Hamiltonian of the single-qubit model in the given basis."""
    n_kappa = sum(1 for c in basis if c.kappa_index > 0)
    n_lambda = sum(1 for c in basis if c.lambda_index > 0)
    if n_kappa != params.kappa_band.n_modes or n_lambda != params.lambda_band.n_modes:
        raise AssemblyError(
            f"basis holds ({n_kappa}, {n_lambda}) continuum configurations but the "
            f"bands have ({params.kappa_band.n_modes}, {params.lambda_band.n_modes}) modes")

    dim = basis.dimension
    h = np.zeros((dim, dim), dtype=complex)
    tags = {name: [] for name in
            ("site_energy", "local_warp_coupling", "photon_dipole",
             "gravonon_scattering_kappa", "gravonon_scattering_lambda")}

    def flat(label):
        return basis.index_of(SingleQubitConfiguration(label, 0 if label > 0 else 1))

    i_p1, i_p2, i_m1, i_m2 = flat(1), flat(2), flat(-1), flat(-2)

    for i, c in enumerate(basis):
        if c.kappa_index > 0:
            e = params.e_warp[0] + params.kappa_band.energies[c.kappa_index - 1]
        elif c.lambda_index > 0:
            e = (params.e_warp[1] + params.omega_photon
                 + params.lambda_band.energies[c.lambda_index - 1])
        elif abs(c.current_label) == 1:
            e = params.e_qubit[0 if c.current_label > 0 else 1]
            e += params.omega_photon * c.photon_occupation
        else:
            e = params.e_warp[0 if c.current_label > 0 else 1]
            e += params.omega_photon * c.photon_occupation
        h[i, i] = e
        tags["site_energy"].append((i, i))

    def couple(i, j, value, tag):
        h[i, j] += value
        h[j, i] += np.conj(value)
        tags[tag].append((i, j))
        tags[tag].append((j, i))

    couple(i_p1, i_p2, params.v_loc[0], "local_warp_coupling")
    couple(i_m1, i_m2, params.v_loc[1], "local_warp_coupling")
    couple(i_p1, i_m1, params.v_dipole, "photon_dipole")

    # Continuum scattering, active only with the matching warp state occupied.
    for i, c in enumerate(basis):
        if c.kappa_index > 0:
            couple(i_p2, i, params.kappa_band.coupling, "gravonon_scattering_kappa")
        elif c.lambda_index > 0:
            couple(i_m2, i, params.lambda_band.coupling, "gravonon_scattering_lambda")

    tags = {k: np.array(v, dtype=int).reshape(-1, 2) for k, v in tags.items()}
    return _check_hermitian(HermitianOperator(basis=basis, matrix=h, term_tags=tags))


# ---------------------------------------------------------------------------
# Pauli actions on current states


def pauli_z(qubit: int, config: IsingConfiguration):
    """sigma^z on the 1-based qubit: +config for spin +1, -config for -1."""
    if not 1 <= qubit <= config.n_qubits:
        raise IndexError(f"qubit index {qubit} out of range 1..{config.n_qubits}")
    return (config.spins[qubit - 1], config)


def pauli_x(qubit: int, config: IsingConfiguration) -> IsingConfiguration:
    """sigma^x on the 1-based qubit: flips the addressed spin."""
    return config.flipped(qubit)


# ---------------------------------------------------------------------------
# annealer model


@dataclass(frozen=True)
class PhononCoupling:
    """Single phonon mode exchanging quanta with one qubit (default 3).

    The whole term (exchange and number term) is multiplied by a smooth
    switch-on window centered at switch_on with width ramp (ns).  The number
    term carries the factor 1/2 in front of omega, as the model defines it.
    """

    omega_phonon: float
    v_phonon: float
    switch_on: float
    ramp: float
    qubit: int = 3

    def window(self, t: float) -> float:
        return smooth_window(t, self.switch_on, self.ramp)


@dataclass(frozen=True)
class GravononCoupling:
    """Continuum band scattering on one qubit, active only on configurations
    whose coupled-qubit spin matches `direction`."""

    band: GravononBand
    coupled_qubit: int = 3
    direction: int = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")


@dataclass(frozen=True)
class AnnealerParams:
    """Four-qubit annealer parameters: symmetric zero-diagonal J matrix,
    transverse-field schedule, optional phonon and continuum extensions."""

    j_matrix: np.ndarray
    schedule: Schedule
    phonon: Optional[PhononCoupling] = None
    gravonon: Optional[GravononCoupling] = None

    def __post_init__(self):
        j = np.asarray(self.j_matrix, dtype=float)
        object.__setattr__(self, "j_matrix", j)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ValueError("j_matrix must be square")
        if not np.allclose(j, j.T):
            raise ValueError("j_matrix must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("j_matrix must have zero diagonal")
        if self.schedule.n_qubits != j.shape[0]:
            raise ValueError("schedule qubit count does not match j_matrix")

    @property
    def n_qubits(self) -> int:
        return self.j_matrix.shape[0]


class AnnealerHamiltonian:
    """H(t) for the annealer, assembled once into time-independent pieces
    combined per time step with scalar coefficients.

    Pieces: "ising_zz" (diagonal), "transverse_field_a" per qubit (spin-flip
    off-diagonals, coefficient ht_a(t)), "phonon" (exchange plus number term,
    coefficient = switch-on window), "gravonon" (band energies plus gated
    scattering, always on).
    """

    def __init__(self, params: AnnealerParams, basis: Basis):
        self.params = params
        self.basis = basis
        first = basis[0]
        if not isinstance(first, AnnealerConfiguration):
            raise AssemblyError("annealer assembly requires an annealer basis")
        if first.ising.n_qubits != params.n_qubits:
            raise AssemblyError("basis qubit count does not match j_matrix")
        self._n_phonon_max = max(c.phonon_occupation for c in basis)
        self._n_gravonon = max(c.gravonon_index for c in basis)
        if params.phonon is not None and self._n_phonon_max < 1:
            raise AssemblyError("phonon coupling requires phonon levels in the basis")
        if params.gravonon is not None and self._n_gravonon != params.gravonon.band.n_modes:
            raise AssemblyError(
                f"basis holds {self._n_gravonon} continuum modes but the band has "
                f"{params.gravonon.band.n_modes}")
        self._build_pieces()

    # -- structure ---------------------------------------------------------

    def _build_pieces(self):
        basis, params = self.basis, self.params
        dim = basis.dimension
        n = params.n_qubits
        pieces = {}  # name -> (rows, cols, vals)

        spins = np.array([c.ising.spins for c in basis], dtype=float)
        diag_ising = np.einsum("ia,ab,ib->i", spins, params.j_matrix, spins)
        idx = np.arange(dim)
        pieces["ising_zz"] = (idx, idx, diag_ising)

        for alpha in range(1, n + 1):
            rows, cols = [], []
            for i, c in enumerate(basis):
                j = basis.index_of(AnnealerConfiguration(
                    c.ising.flipped(alpha), c.phonon_occupation, c.gravonon_index))
                rows.append(i)
                cols.append(j)
            pieces[f"transverse_field_{alpha}"] = (
                np.array(rows), np.array(cols), np.ones(dim))

        if params.phonon is not None:
            ph = params.phonon
            rows, cols, vals = [], [], []
            for i, c in enumerate(basis):
                p = c.phonon_occupation
                if p > 0:  # number term, (1/2) omega * n
                    rows.append(i)
                    cols.append(i)
                    vals.append(0.5 * ph.omega_phonon * p)
                if p < self._n_phonon_max:  # exchange: flip spin, raise phonon
                    j = basis.index_of(AnnealerConfiguration(
                        c.ising.flipped(ph.qubit), p + 1, c.gravonon_index))
                    v = ph.v_phonon * np.sqrt(p + 1)
                    rows.extend((i, j))
                    cols.extend((j, i))
                    vals.extend((v, v))
            pieces["phonon"] = (np.array(rows), np.array(cols), np.array(vals))

        if params.gravonon is not None:
            gr = params.gravonon
            rows, cols, vals = [], [], []
            for i, c in enumerate(basis):
                g = c.gravonon_index
                if g > 0:
                    rows.append(i)
                    cols.append(i)
                    vals.append(gr.band.energies[g - 1])
                if g == 0 and c.ising.spins[gr.coupled_qubit - 1] == gr.direction:
                    for kappa in range(1, self._n_gravonon + 1):
                        j = basis.index_of(AnnealerConfiguration(
                            c.ising, c.phonon_occupation, kappa))
                        rows.extend((i, j))
                        cols.extend((j, i))
                        vals.extend((gr.band.coupling, gr.band.coupling))
            pieces["gravonon"] = (np.array(rows), np.array(cols), np.array(vals))

        self.term_tags = {name: np.column_stack((r, c))
                          for name, (r, c, _v) in pieces.items()}
        self._dense = dim <= DENSE_ASSEMBLY_LIMIT
        if self._dense:
            self._piece_matrices = {}
            for name, (r, c, v) in pieces.items():
                m = np.zeros((dim, dim), dtype=complex)
                np.add.at(m, (r, c), v)
                self._piece_matrices[name] = m
        else:
            self._build_sparse_template(pieces, dim)

    def _build_sparse_template(self, pieces, dim):
        keys = np.concatenate([r.astype(np.int64) * dim + c.astype(np.int64)
                               for r, c, _v in pieces.values()])
        keys = np.unique(keys)
        rows_u = (keys // dim).astype(np.int32)
        cols_u = (keys % dim).astype(np.int32)
        template = sparse.csr_matrix(
            (np.zeros(keys.size), (rows_u, cols_u)), shape=(dim, dim))
        template.sort_indices()
        # keys are sorted row-major, matching CSR data order for unique entries
        self._indices = template.indices
        self._indptr = template.indptr
        self._dim = dim
        self._piece_data = {}
        for name, (r, c, v) in pieces.items():
            data = np.zeros(keys.size)
            pos = np.searchsorted(keys, r.astype(np.int64) * dim + c.astype(np.int64))
            np.add.at(data, pos, v)
            self._piece_data[name] = data

    # -- evaluation --------------------------------------------------------

    def coefficients(self, t: float) -> dict:
        coeffs = {"ising_zz": 1.0}
        fields = self.params.schedule.fields(t)
        for alpha in range(1, self.params.n_qubits + 1):
            coeffs[f"transverse_field_{alpha}"] = fields[alpha - 1]
        if self.params.phonon is not None:
            coeffs["phonon"] = self.params.phonon.window(t)
        if self.params.gravonon is not None:
            coeffs["gravonon"] = 1.0
        return coeffs

    def at(self, t: float) -> HermitianOperator:
        coeffs = self.coefficients(t)
        if self._dense:
            dim = self.basis.dimension
            h = np.zeros((dim, dim), dtype=complex)
            for name, c in coeffs.items():
                if c != 0.0:
                    h += c * self._piece_matrices[name]
            matrix = h
        else:
            data = np.zeros(self._indices.size)
            for name, c in coeffs.items():
                if c != 0.0:
                    data += c * self._piece_data[name]
            matrix = sparse.csr_matrix(
                (data.astype(complex), self._indices, self._indptr),
                shape=(self._dim, self._dim))
        return HermitianOperator(basis=self.basis, matrix=matrix,
                                 term_tags=self.term_tags)


def assemble_annealer(params: AnnealerParams, basis: Basis, t: float) -> HermitianOperator:
    """Annealer Hamiltonian at time t.  For repeated evaluation build an
    AnnealerHamiltonian once and call .at(t)."""
    return _check_hermitian(AnnealerHamiltonian(params, basis).at(t))


# ---------------------------------------------------------------------------
# helpers


def expectation(op: HermitianOperator, psi) -> float:
    """<psi|H|psi> as a real number."""
    amp = psi.amplitudes
    if amp.shape[0] != op.dimension:
        raise ValueError("operator and state dimensions differ")
    val = complex(np.vdot(amp, op.matrix @ amp))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise ValueError(f"expectation value has imaginary part {val.imag:.2e}")
    return val.real


def global_flip_matrix(basis: Basis) -> np.ndarray:
    """Permutation matrix flipping every spin (phonon/continuum labels kept)."""
    dim = basis.dimension
    f = np.zeros((dim, dim))
    for i, c in enumerate(basis):
        flipped = IsingConfiguration(tuple(-s for s in c.ising.spins))
        j = basis.index_of(AnnealerConfiguration(
            flipped, c.phonon_occupation, c.gravonon_index))
        f[j, i] = 1.0
    return f


def flip_even_isometry(basis: Basis) -> np.ndarray:
    """Isometry onto the even sector of the global spin flip, for a plain
    (no phonon, no continuum) annealer basis.  Columns are the normalized
    even combinations of each {s, -s} pair."""
    if any(c.phonon_occupation or c.gravonon_index for c in basis):
        raise AssemblyError("even-sector isometry expects the plain spin basis")
    dim = basis.dimension
    cols = []
    seen = set()
    for i, c in enumerate(basis):
        if i in seen:
            continue
        flipped = IsingConfiguration(tuple(-s for s in c.ising.spins))
        j = basis.index_of(AnnealerConfiguration(flipped))
        seen.update((i, j))
        v = np.zeros(dim)
        v[i] = v[j] = 1.0 / np.sqrt(2.0)
        cols.append(v)
    return np.column_stack(cols)
