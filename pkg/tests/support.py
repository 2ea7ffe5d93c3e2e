"""Shared fixtures data and cached Monte Carlo runs used by several test modules."""

from functools import lru_cache

from chirpest import ChirpComponent, ModelSpec, NoiseSpec
from chirpest.montecarlo import McScenario, run_scenario

BASE_SEED = 2017
REPS = 100
MA1 = NoiseSpec.ma1(0.5, 0.1)
ONE = ModelSpec((ChirpComponent(2.93, 1.91, 2.5, 0.1),), MA1)
TWO = ModelSpec((ChirpComponent(2, 1.75, 1.5, 0.1), ChirpComponent(3, 2.25, 2.5, 0.2)), MA1)


@lru_cache(maxsize=None)
def one_component_stats(n: int):
    """ALSE and LSE, MA(1) rho=0.5, sigma2=0.1, 100 replications."""
    return run_scenario(McScenario(ONE, n, reps=REPS, base_seed=BASE_SEED))
