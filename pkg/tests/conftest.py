from __future__ import annotations

import pytest
from hypothesis import settings

from cyclichyp.groups import FiniteCyclic, FreeGroup, FreeProduct, InfiniteDihedral

settings.register_profile("repo", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("repo")


def all_models():
    return [FreeGroup(2), FiniteCyclic(2), FiniteCyclic(3), FiniteCyclic(4),
            InfiniteDihedral(), FreeProduct((2, 3))]


MODEL_IDS = ["F2", "Z2", "Z3", "Z4", "Dinf", "Z2*Z3"]


@pytest.fixture(params=range(len(MODEL_IDS)), ids=MODEL_IDS)
def model(request):
    return all_models()[request.param]


@pytest.fixture
def F2():
    return FreeGroup(2)
