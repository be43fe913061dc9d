"""Discretized environmental continuum: a flat band of uniformly spaced
modes with one uniform coupling strength.

The band is the minimal model of a high-density, weakly coupled boson
environment: a discrete state embedded in it decays at the golden-rule
rate 2*pi*W^2*rho until the discreteness of the band makes the amplitude
recur, at t ~ 2*pi / level spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .units import TWO_PI


@dataclass(frozen=True)
class GravononBand:
    """Uniform flat band: N strictly increasing, equally spaced energies on
    [center - halfwidth, center + halfwidth], all coupled with strength W.

    Energies and couplings are angular (rad/ns)."""

    energies: np.ndarray
    coupling: float
    center: float
    halfwidth: float

    def __post_init__(self):
        object.__setattr__(self, "energies", np.asarray(self.energies, dtype=float))
        if self.halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be non-negative")
        if self.energies.ndim != 1 or self.energies.size < 1:
            raise ValueError("energies must be a non-empty 1-d array")
        if self.energies.size > 1 and not np.all(np.diff(self.energies) > 0):
            raise ValueError("energies must be strictly increasing")

    @property
    def n_modes(self) -> int:
        return int(self.energies.size)

    @property
    def density_of_states(self) -> float:
        """Constant by construction: N / (2 * halfwidth), per rad/ns."""
        return self.n_modes / (2.0 * self.halfwidth)

    @property
    def level_spacing(self) -> float:
        if self.n_modes < 2:
            return math.inf
        return float(self.energies[1] - self.energies[0])

    @property
    def recurrence_time(self) -> float:
        """Revival timescale 2*pi / level spacing, in ns."""
        spacing = self.level_spacing
        return math.inf if not math.isfinite(spacing) else TWO_PI / spacing


def build_band(n_modes: int, center: float, halfwidth: float, coupling: float) -> GravononBand:
    """Construct the flat band.  All arguments angular (rad/ns)."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")
    if coupling < 0:
        raise ValueError("coupling must be non-negative")
    if n_modes == 1:
        energies = np.array([center])
    else:
        energies = np.linspace(center - halfwidth, center + halfwidth, n_modes)
    return GravononBand(energies=energies, coupling=coupling,
                        center=center, halfwidth=halfwidth)


def golden_rule_width(band: GravononBand) -> float:
    """Predicted decay rate 2*pi*W^2*rho of a resonant embedded state."""
    return TWO_PI * band.coupling ** 2 * band.density_of_states


def calibrate_coupling(band_shape, target_lifetime: float) -> float:
    """Invert the golden rule: the W for which an embedded state decays with
    the requested lifetime (ns).  band_shape is (n_modes, center, halfwidth).
    """
    n_modes, _center, halfwidth = band_shape
    if target_lifetime <= 0:
        raise ValueError("target_lifetime must be positive")
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")
    rho = n_modes / (2.0 * halfwidth)
    return math.sqrt(1.0 / (TWO_PI * rho * target_lifetime))
