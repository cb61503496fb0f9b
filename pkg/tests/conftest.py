import pytest

from predintel.complexity import get_compressor
from predintel.timeseries import (
    RegressorConfig,
    SequenceRegressor,
    gen_line,
    gen_sine,
    gen_sine_trend_noise,
    train_ensemble,
)


@pytest.fixture(scope="session")
def compressor():
    return get_compressor()


@pytest.fixture(scope="session")
def reg_config():
    return RegressorConfig()


@pytest.fixture(scope="session")
def generated():
    return {
        "line": gen_line(1000),
        "sine": gen_sine(500),
        "sine-trend": gen_sine_trend_noise(500, seed=42),
    }


@pytest.fixture(scope="session")
def trained_ensembles(generated, reg_config):
    """One trained ensemble per generator, shared across the suite (training
    is the slow part of the tests)."""
    return {
        name: train_ensemble(ds, reg_config, seeds=range(5))
        for name, ds in generated.items()
    }


@pytest.fixture(scope="session")
def untrained_ensemble(reg_config):
    return [
        SequenceRegressor(reg_config.hidden_units, 900 + s, reg_config.init_scale)
        for s in range(5)
    ]
