"""Configuration spaces for the single-qubit and four-qubit models.

A configuration is one basis label: qubit current state(s), photon or
phonon occupation, and the index of an excited continuum mode.  A Basis is
an ordered, duplicate-free list of configurations with inverse lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

VALID_CURRENT_LABELS = (1, 2, -1, -2)


@dataclass(frozen=True)
class SingleQubitConfiguration:
    """Field configuration of the single flux qubit plus photon model.

    current_label: +-1 is persistent current in the loop, +-2 is current in
    the warp region of the junction.  kappa_index / lambda_index address the
    excited continuum mode attached to the +2 / -2 warp states (0 = no
    excited mode).
    """

    current_label: int
    photon_occupation: int
    kappa_index: int = 0
    lambda_index: int = 0

    def __post_init__(self):
        if self.current_label not in VALID_CURRENT_LABELS:
            raise ValueError(f"current_label must be one of {VALID_CURRENT_LABELS}, "
                             f"got {self.current_label}")
        if self.photon_occupation not in (0, 1):
            raise ValueError("photon_occupation must be 0 or 1")
        if self.kappa_index < 0 or self.lambda_index < 0:
            raise ValueError("mode indices must be non-negative")
        if self.kappa_index > 0 and self.lambda_index > 0:
            raise ValueError("at most one of kappa_index, lambda_index may be nonzero")
        # Excitation-number conservation ties the photon to the current sign.
        expected_photon = 0 if self.current_label > 0 else 1
        if self.photon_occupation != expected_photon:
            raise ValueError(f"current_label {self.current_label} requires "
                             f"photon_occupation {expected_photon}")
        if self.kappa_index > 0 and not (self.current_label == 2 and self.photon_occupation == 0):
            raise ValueError("kappa_index > 0 requires the |2,0,k,0> sector")
        if self.lambda_index > 0 and not (self.current_label == -2 and self.photon_occupation == 1):
            raise ValueError("lambda_index > 0 requires the |-2,1,0,l> sector")

    @property
    def current_direction(self) -> int:
        """Sign of the current: +1 for clockwise labels, -1 for anticlockwise."""
        return 1 if self.current_label > 0 else -1

    @property
    def in_warp_region(self) -> bool:
        return abs(self.current_label) == 2


@dataclass(frozen=True)
class IsingConfiguration:
    """Tuple of persistent-current directions, one +-1 entry per qubit."""

    spins: tuple

    def __post_init__(self):
        if not 2 <= len(self.spins) <= 5:
            raise ValueError("supported qubit counts are 2..5")
        if any(s not in (1, -1) for s in self.spins):
            raise ValueError("spins must be +1 or -1")

    @property
    def n_qubits(self) -> int:
        return len(self.spins)

    def flipped(self, qubit: int) -> "IsingConfiguration":
        """Return the configuration with the 1-based `qubit` spin flipped."""
        if not 1 <= qubit <= len(self.spins):
            raise IndexError(f"qubit index {qubit} out of range 1..{len(self.spins)}")
        s = list(self.spins)
        s[qubit - 1] = -s[qubit - 1]
        return IsingConfiguration(tuple(s))


@dataclass(frozen=True)
class AnnealerConfiguration:
    """Annealer basis label: spin tuple, phonon occupation, continuum mode.

    gravonon_index 0 is the continuum ground configuration |0 0>; a positive
    index marks the excited mode on the continuum-coupled qubit.  Any spins
    value may carry a positive index; which matrix elements are nonzero is
    decided by the operator assembly, not by the basis.
    """

    ising: IsingConfiguration
    phonon_occupation: int = 0
    gravonon_index: int = 0

    def __post_init__(self):
        if self.phonon_occupation < 0:
            raise ValueError("phonon_occupation must be non-negative")
        if self.gravonon_index < 0:
            raise ValueError("gravonon_index must be non-negative")


class Basis:
    """Ordered set of configurations with O(1) inverse lookup."""

    def __init__(self, configurations):
        self.configurations = tuple(configurations)
        self._index = {c: i for i, c in enumerate(self.configurations)}
        if len(self._index) != len(self.configurations):
            raise ValueError("duplicate configurations in basis")

    def index_of(self, configuration) -> int:
        return self._index[configuration]

    def __contains__(self, configuration) -> bool:
        return configuration in self._index

    def __len__(self) -> int:
        return len(self.configurations)

    def __iter__(self):
        return iter(self.configurations)

    def __getitem__(self, i):
        return self.configurations[i]

    @property
    def dimension(self) -> int:
        return len(self.configurations)


def build_single_qubit_basis(n_kappa: int, n_lambda: int) -> Basis:
    """Basis of the single-qubit model: 4 flat configurations followed by
    the n_kappa |2,0,k,0> and n_lambda |-2,1,0,l> continuum configurations.
    """
    if n_kappa < 1 or n_lambda < 1:
        raise ValueError("mode counts must be positive")
    configs = [
        SingleQubitConfiguration(1, 0),
        SingleQubitConfiguration(2, 0),
        SingleQubitConfiguration(-1, 1),
        SingleQubitConfiguration(-2, 1),
    ]
    configs.extend(SingleQubitConfiguration(2, 0, kappa_index=k)
                   for k in range(1, n_kappa + 1))
    configs.extend(SingleQubitConfiguration(-2, 1, lambda_index=l)
                   for l in range(1, n_lambda + 1))
    return Basis(configs)


def all_ising_configurations(n_qubits: int = 4):
    """All 2**n spin tuples, lexicographic with +1 ordered before -1."""
    return [IsingConfiguration(spins)
            for spins in itertools.product((1, -1), repeat=n_qubits)]


def build_annealer_basis(n_phonon_max: int, n_gravonon: int, n_qubits: int = 4) -> Basis:
    """Annealer basis, ising-major, then phonon, then gravonon index.

    The ordering makes the amplitude vector reshape to
    (2**n_qubits, n_phonon_max + 1, n_gravonon + 1), so reduced weights over
    spin configurations are contiguous-block sums.
    """
    if n_phonon_max < 0 or n_gravonon < 0:
        raise ValueError("occupation bounds must be non-negative")
    configs = [
        AnnealerConfiguration(ising, phonon_occupation=p, gravonon_index=g)
        for ising in all_ising_configurations(n_qubits)
        for p in range(n_phonon_max + 1)
        for g in range(n_gravonon + 1)
    ]
    return Basis(configs)
