import numpy as np
import pytest

from bspsk.sweep import ModulationParams, SweepParams


@pytest.fixture
def small_sweep():
    # 1.8-2.2 MHz over 1 ms; 10 slots of 100 us hold 200 carrier cycles each
    return SweepParams.from_band(f_c=2e6, bandwidth_hz=400e3, T_c=1e-3, K=1.0)


@pytest.fixture
def small_mod():
    return ModulationParams(M=2, T_s=1e-4, E_s=1.0, m=10)


@pytest.fixture
def small_fs():
    return 20e6


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
