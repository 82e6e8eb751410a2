from pathlib import Path

import pytest

from manifolds.manifolds import rational, ruled_trivial, surface
from sums.sums import SumDescriptor, SumSide
from symsum.config import ENVIRONMENT

DESCRIPTORS = Path(__file__).resolve().parent.parent / "descriptors"


def cubic_fiber(n):
    """3H minus the first nine E_i (or all of them when n < 9)."""
    model = rational(n)
    return surface(model, {"H": 3, **{f"E{i}": -1 for i in range(1, min(n, 9) + 1)}}, name="fiber")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for variable in ENVIRONMENT:
        monkeypatch.delenv(variable, raising=False)


@pytest.fixture
def descriptors():
    return DESCRIPTORS


@pytest.fixture
def e1_side():
    F = cubic_fiber(9)
    return SumSide(F.model, F)


@pytest.fixture
def blown_up_side():
    F = cubic_fiber(10)
    return SumSide(F.model, F)


@pytest.fixture
def section_side():
    model = ruled_trivial(1)
    return SumSide(model, surface(model, {"sigma": 1}, name="section"))


@pytest.fixture
def double_side():
    model = ruled_trivial(1)
    return SumSide(model, surface(model, {"sigma": 2}, name="double"))


@pytest.fixture
def e1_e1(e1_side):
    return SumDescriptor(e1_side, e1_side, 1)
