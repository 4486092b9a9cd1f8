import os
from typing import Callable, Generator, Sequence

import numpy as np
import pytest
from loguru import logger

# Override settings for testing
os.environ["EBQ_MAX_TERMS"] = "4096"
os.environ["EBQ_SEED"] = "7"
os.environ["EBQ_SAMPLES"] = "2"
os.environ["EBQ_LOG_LEVEL"] = "WARNING"

from app.core.config import get_settings
from app.core.special_functions import clear_caches
from app.models.domain import AlgebraParams, DynamicalParam, TruncationPolicy

get_settings.cache_clear()
logger.info(f"EBQ_SAMPLES: {os.environ['EBQ_SAMPLES']}")

Q = complex(0.45, 0.05)
R = 4.3
C = 1.2


@pytest.fixture(autouse=True)
def fresh_caches() -> Generator[None, None, None]:
    """Start every test with empty memo tables"""
    yield
    clear_caches()


@pytest.fixture
def params_n1() -> AlgebraParams:
    return AlgebraParams(N=1, q=Q, r=R, c=C)


@pytest.fixture
def params_n2() -> AlgebraParams:
    return AlgebraParams(N=2, q=Q, r=R, c=C)


@pytest.fixture
def params_n3() -> AlgebraParams:
    return AlgebraParams(N=3, q=Q, r=R, c=C)


@pytest.fixture
def level_one_params() -> AlgebraParams:
    return AlgebraParams(N=2, q=Q, r=R, c=1)


@pytest.fixture
def policy() -> TruncationPolicy:
    return TruncationPolicy()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def generic_s() -> Callable[..., DynamicalParam]:
    """Factory for a generic dynamical parameter of the right rank"""

    def make(params: AlgebraParams, values: Sequence[complex] | None = None) -> DynamicalParam:
        if values is None:
            values = [0.37 + 0.4 * j + 0.13j * (j + 1) for j in range(params.N)]
        return DynamicalParam.generic(values, params)

    return make
