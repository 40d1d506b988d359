import warnings

import pytest

from henkin_choice import QuantifierPolicy, Strategy, build_full, build_sigma0, build_sigma2, build_sigma3
from henkin_choice.predicate_domain import FidelityWarning


def _quiet(fn, *a):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FidelityWarning)
        return fn(*a)


@pytest.fixture(scope="session")
def full2():
    return build_full(2)


@pytest.fixture(scope="session")
def sigma2_n4():
    return _quiet(build_sigma2, 4, QuantifierPolicy(s_univ=1, s_exist=3, providers=("sigma2-choice",)))


@pytest.fixture(scope="session")
def sigma3_66():
    return build_sigma3(6, 6)


@pytest.fixture(scope="session")
def small_models():
    """Cheap structures for property checks: (structure, budget for random predicates)."""
    pol = QuantifierPolicy(s_univ=1, s_exist=1, strategy=Strategy.ENUMERATE)
    return [
        (_quiet(build_sigma0, 4, pol), 1),
        (_quiet(build_sigma2, 3, pol), 1),
        (_quiet(build_sigma3, 3, 2, pol), 1),
    ]
