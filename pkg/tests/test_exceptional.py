from itertools import product

import pytest

from exceptional.exceptional import (
    ExceptionalSet,
    MeetsVerdict,
    enumerate_exceptional,
    is_exceptional_cremona,
    meets_all_exceptional,
)
from exceptional.search import box_problem, pairing_constraint, search, square_constraint
from lattice.errors import ExceptionalError, SearchError
from manifolds.manifolds import (
    MinimalModelKind,
    ModelFlags,
    general,
    rational,
    ruled_trivial,
    ruled_twisted,
    s2xs2,
    surface,
)
from tests.conftest import cubic_fiber

# Exceptional classes of CP2 blown up n times, n = 1..6: the del Pezzo counts.
EXCEPTIONAL_COUNTS = {1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27}


def minus_one_classes(M, degree_bound=6):
    """Every class with square -1 and K-pairing -1 in the box, without the omega condition."""
    lattice = M.lattice
    problem = box_problem(
        lattice,
        degree_bound,
        degree_bound + 1,
        [pairing_constraint(lattice, M.K, -1, -1)],
        [square_constraint(lattice, -1, -1)],
    )
    return [lattice.element(vector) for vector in search(problem)]


@pytest.mark.parametrize("n, count", sorted(EXCEPTIONAL_COUNTS.items()))
def test_exceptional_counts(n, count):
    found = enumerate_exceptional(rational(n))
    assert len(found) == count
    assert found.complete


def test_enumeration_order():
    assert [str(E) for E in enumerate_exceptional(rational(2))] == ["E2", "E1", "H - E1 - E2"]


@pytest.mark.parametrize("n", range(1, 7))
def test_cremona_agrees_with_the_search(n):
    M = rational(n)
    found = set(enumerate_exceptional(M))
    candidates = minus_one_classes(M)
    assert set(candidates) == found
    assert all(is_exceptional_cremona(M, A) for A in candidates)


@pytest.mark.parametrize("n", range(1, 4))
def test_cremona_on_the_full_box(n):
    M = rational(n)
    found = set(enumerate_exceptional(M))
    for coeffs in product(range(-6, 7), *[range(-7, 8)] * n):
        A = M.cls(coeffs)
        assert is_exceptional_cremona(M, A) == (A in found)


def test_cremona_examples():
    M = rational(5)
    assert is_exceptional_cremona(M, M.cls((2, -1, -1, -1, -1, -1)))
    assert not is_exceptional_cremona(M, M.cls((1, -1, -1, -1, 0, 0)))
    with pytest.raises(ExceptionalError):
        is_exceptional_cremona(s2xs2(), s2xs2().basis("f"))


def test_ruled_exceptional_classes():
    M = ruled_trivial(1, 1)
    found = enumerate_exceptional(M)
    assert {str(E) for E in found} == {"e1", "f - e1"}
    assert found.complete
    assert len(enumerate_exceptional(ruled_twisted(1))) == 0
    assert len(enumerate_exceptional(s2xs2())) == 0


def test_enumeration_errors():
    M = general("proxy", rational(1).lattice, (-3, 1), 0, (2, -1), ModelFlags(True, MinimalModelKind.NEITHER, 1))
    with pytest.raises(ExceptionalError, match="General"):
        enumerate_exceptional(M)
    with pytest.raises(ExceptionalError):
        enumerate_exceptional(rational(2), 0)


def test_search_is_independent_of_the_worker_count():
    M = rational(5)
    lattice = M.lattice
    problem = box_problem(
        lattice,
        6,
        7,
        [pairing_constraint(lattice, M.K, -1, -1), pairing_constraint(lattice, M.omega_ref, 1, None)],
        [square_constraint(lattice, -1, -1)],
    )
    assert search(problem, jobs=1) == search(problem, jobs=3)
    assert search(problem, first_only=True) == search(problem)[:1]


def test_search_errors():
    lattice = rational(1).lattice
    with pytest.raises(SearchError):
        box_problem(lattice, 0, 3)
    with pytest.raises(SearchError):
        search(box_problem(lattice, 1, 1), jobs=0)


def test_fiber_meets_everything_in_e1():
    F = cubic_fiber(9)
    result = meets_all_exceptional(F.model, F)
    assert result.verdict is MeetsVerdict.YES_BOUNDED
    assert result.checked > 0


def test_cubic_meets_everything_in_cp2_8():
    F = cubic_fiber(8)
    assert meets_all_exceptional(F.model, F).verdict is MeetsVerdict.YES_CERTIFIED


def test_disjoint_exceptional_class_is_the_witness():
    F = cubic_fiber(10)
    result = meets_all_exceptional(F.model, F)
    assert result.verdict is MeetsVerdict.NO
    assert result.witness == F.model.basis("E10")
    assert result.pairing == 0
    assert not result.positivity_violation


def test_negative_pairing_is_a_positivity_violation():
    M = rational(1)
    F = surface(M, {"H": 4, "E1": 1})
    result = meets_all_exceptional(M, F)
    assert result.verdict is MeetsVerdict.NO
    assert result.positivity_violation


def test_meets_on_general_models():
    base = rational(1)
    minimal = general("proxy", base.lattice, base.K, 0, base.omega_ref, ModelFlags(True, MinimalModelKind.NEITHER, 1))
    F = surface(minimal, {"H": 4, "E1": -1})
    assert meets_all_exceptional(minimal, F).verdict is MeetsVerdict.YES_CERTIFIED
    listed = general(
        "listed",
        base.lattice,
        base.K,
        0,
        base.omega_ref,
        ModelFlags(False, MinimalModelKind.NEITHER, 1),
        exceptional_classes=[base.basis("E1")],
    )
    assert meets_all_exceptional(listed, surface(listed, {"H": 4, "E1": -1})).verdict is MeetsVerdict.YES_CERTIFIED
    unknown = general("unknown", base.lattice, base.K, 0, base.omega_ref, ModelFlags(False, MinimalModelKind.NEITHER, 1))
    with pytest.raises(ExceptionalError, match="Supply"):
        meets_all_exceptional(unknown, surface(unknown, {"H": 4, "E1": -1}))


def test_meets_reuses_a_given_set():
    F = cubic_fiber(8)
    empty = ExceptionalSet((), 6, True)
    result = meets_all_exceptional(F.model, F, exceptional_set=empty)
    assert result.verdict is MeetsVerdict.YES_CERTIFIED
    assert result.checked == 0
