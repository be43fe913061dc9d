"""Annealing schedules: per-qubit transverse-field strength vs time."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SCHEDULE_FORMS = ("linear", "cosine")


@dataclass(frozen=True)
class Schedule:
    """Named transverse-field schedule on [0, t_f].

    h0 is the per-qubit starting amplitude (rad/ns); both forms are
    non-negative, non-increasing and exactly zero at t_f.
    """

    t_f: float
    h0: tuple
    form: str = "linear"

    def __post_init__(self):
        if self.t_f <= 0:
            raise ValueError("t_f must be positive")
        if self.form not in SCHEDULE_FORMS:
            raise ValueError(f"unknown schedule form {self.form!r}")
        object.__setattr__(self, "h0", tuple(float(h) for h in self.h0))
        if any(h < 0 for h in self.h0):
            raise ValueError("h0 must be non-negative")

    @property
    def n_qubits(self) -> int:
        return len(self.h0)

    def _envelope(self, t: float) -> float:
        x = min(max(t / self.t_f, 0.0), 1.0)
        if self.form == "linear":
            return 1.0 - x
        return float(np.cos(0.5 * np.pi * x))

    def ht(self, qubit: int, t: float) -> float:
        """Transverse field on 1-based `qubit` at time t (rad/ns)."""
        if not 1 <= qubit <= len(self.h0):
            raise IndexError(f"qubit index {qubit} out of range")
        self._check_domain(t)
        return self.h0[qubit - 1] * self._envelope(t)

    def fields(self, t: float) -> np.ndarray:
        """All transverse fields at time t."""
        self._check_domain(t)
        env = self._envelope(t)
        return np.array(self.h0) * env

    def _check_domain(self, t: float):
        # Midpoint stepping evaluates up to half a step past t_f; allow 1% slack.
        slack = 0.01 * self.t_f
        if t < -slack or t > self.t_f + slack:
            raise ValueError(f"time {t} outside schedule domain [0, {self.t_f}]")


def smooth_window(t: float, switch_on: float, ramp: float) -> float:
    """C1 switch-on window: exactly 0 before switch_on - ramp/2, exactly 1
    after switch_on + ramp/2, cubic smoothstep across the ramp."""
    if ramp <= 0:
        return 0.0 if t < switch_on else 1.0
    x = (t - switch_on + 0.5 * ramp) / ramp
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    return x * x * (3.0 - 2.0 * x)
