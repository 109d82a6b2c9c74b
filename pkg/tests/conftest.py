"""Shared constructions; the figure presets are session-scoped since they take a moment."""

import numpy as np
from pytest import fixture

from src.hardfn import HardFnParams, build_hard_function
from src.uniform import build_reduction_scenario

PRESET_ETAS = (0.5, 0.1)


@fixture(scope="session")
def small_params():
    return HardFnParams(G=1.0, beta=1.0, eta=1.0, eps=1e-2)


@fixture(scope="session")
def small_construction(small_params):
    return build_hard_function(small_params)


@fixture(scope="session", params=PRESET_ETAS, ids=lambda eta: f"eta={eta:g}")
def preset(request):
    """G = beta = 1, eps = 1e-6 with eta in {0.5, 0.1}."""
    return build_hard_function(HardFnParams(G=1.0, beta=1.0, eta=request.param, eps=1e-6))


@fixture(scope="session", params=(4, 10, 100), ids=lambda n: f"n={n}")
def scenario(request):
    return build_reduction_scenario(1.0, 1.0, 1.0, request.param)


@fixture
def rng():
    return np.random.default_rng(1234)
