"""Flux-qubit simulations against discretized continua.

Two models share the machinery here: a single flux qubit whose interference
signal is damped by scattering into a dense band of weakly coupled modes,
and a four-qubit transverse-field annealer where a phonon coupling destroys
adiabatic ground-state tracking and a continuum coupling restores it.
"""

from .basis import (AnnealerConfiguration, Basis, IsingConfiguration,
                    SingleQubitConfiguration, all_ising_configurations,
                    build_annealer_basis, build_single_qubit_basis)
from .config import (ConfigError, ScenarioConfig, default_config,
                     dump_default_config, parse_config)
from .continuum import (GravononBand, build_band, calibrate_coupling,
                        golden_rule_width)
from .observe import (DampingFit, PopulationTrace, SpectralDistribution,
                      current_direction_weight, eigenstate_population,
                      fit_damped_oscillation, gravonon_sector_weight,
                      ground_manifold_weight, min_gap, spectral_weight,
                      spin_alignment_weight, spin_direction_weight,
                      success_probability)
from .operators import (AnnealerHamiltonian, AnnealerParams, GravononCoupling,
                        HermitianOperator, PhononCoupling, SingleQubitParams,
                        assemble_annealer, assemble_single_qubit, pauli_x,
                        pauli_z)
from .propagate import (EvolutionResult, NumericalFailure, WaveFunctional,
                        evolve_static, evolve_timedep, instantaneous_spectrum)
from .scenarios import (run_anneal, run_anneal_phonon,
                        run_anneal_phonon_gravonon, run_ramsey)
from .schedule import Schedule, smooth_window
from .units import angular_to_ghz, ghz_to_angular

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
