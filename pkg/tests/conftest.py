import numpy as np
import pytest

from exec_solver import ExponentialKernel, FractionalKernel, ScenarioParams, TimeGrid


@pytest.fixture
def fig1_params():
    # the benchmark scenario used throughout: no running penalty
    return ScenarioParams(q=10.0, T=10.0, lam=0.5, varrho=4.0, phi=0.0)


@pytest.fixture
def exp_kernel():
    return ExponentialKernel(c=1.0, rho=0.5)


@pytest.fixture
def frac_kernel():
    return FractionalKernel(c=1.0, alpha=0.55)


@pytest.fixture
def grid16():
    return TimeGrid.uniform(10.0, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
