"""Shared fixtures: the four scenario runs are expensive, so each default-config
run happens once per session and is reused by module and acceptance tests."""

import os
import time
import warnings

import pytest

# The runners treat FLUXSIM_OUT as a request to write files; keep the shared
# in-memory runs from spilling output into an unrelated directory.
os.environ.pop("FLUXSIM_OUT", None)

from fluxsim.config import default_config
from fluxsim.scenarios import (run_anneal, run_anneal_phonon_gravonon,
                               run_ramsey)


@pytest.fixture(scope="session")
def ramsey_run():
    return run_ramsey(default_config())


@pytest.fixture(scope="session")
def anneal_run():
    return run_anneal(default_config())


@pytest.fixture(scope="session")
def gravonon_run():
    """Default suppression scenario; its wall-clock time is part of the
    acceptance contract, so it is measured here."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        start = time.monotonic()
        out = run_anneal_phonon_gravonon(default_config())
        out["wall_seconds"] = time.monotonic() - start
    return out


@pytest.fixture(scope="session")
def phonon_run(gravonon_run):
    """The phonon-only run is computed inside the suppression scenario as its
    matched reference; reuse it instead of repeating the evolution."""
    return gravonon_run["reference"]


@pytest.fixture(scope="session")
def fast_anneal_run():
    """Fast sweep of the same instance, for the Landau-Zener comparison."""
    return run_anneal(default_config().with_overrides({"anneal.t_f": "100.0"}))
