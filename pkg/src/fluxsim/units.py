"""Unit conventions, and the single place where they are converted.

Internally everything runs with hbar = 1: energies are angular frequencies
in rad/ns, times are in ns.  Config files and the CLI accept energies in
plain GHz; they are multiplied by 2*pi exactly once, here, on ingestion.
"""

import math

TWO_PI = 2.0 * math.pi


def ghz_to_angular(value_ghz: float) -> float:
    """Convert an energy in GHz to angular units (rad/ns)."""
    return TWO_PI * value_ghz


def angular_to_ghz(value_rad_per_ns: float) -> float:
    """Convert an angular energy (rad/ns) back to GHz for reporting."""
    return value_rad_per_ns / TWO_PI
