import numpy as np
import pytest

from multiform.config import RunConfig, Variant
from multiform.functions import BaseFunction, make_embedded
from multiform.models import Formulation, FormulationKind


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ackley_objective(rng):
    return make_embedded(BaseFunction.ACKLEY, 10, 2, rng)


@pytest.fixture
def original_formulation():
    return Formulation(id=0, kind=FormulationKind.ORIGINAL, d=10, ambient_dim=10)


@pytest.fixture
def small_config():
    """A multiform config small enough to run in well under a second."""
    return RunConfig(
        function=BaseFunction.RASTRIGIN,
        D=20,
        d_e=3,
        dims=(6, 6, 6),
        variant=Variant.S_MF,
        K=40,
        max_fes=1200,
        seed=7,
    )
