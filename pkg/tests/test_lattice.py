import random
from fractions import Fraction
from math import isqrt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lattice.errors import LatticeError, LatticeOverflowError
from lattice.lattice import (
    IntersectionLattice,
    adjunction_genus,
    checked,
    light_cone_check,
    pair,
    random_cone_class,
    sample_light_cone,
    square,
)
from manifolds.manifolds import rational, ruled_trivial, ruled_twisted, s2xs2

CP2_3 = rational(3).lattice
vectors = st.tuples(*[st.integers(-50, 50)] * 4)


def test_pair_on_the_rational_basis():
    lattice = rational(2).lattice
    H, E1, E2 = (lattice.basis(label) for label in ("H", "E1", "E2"))
    assert pair(H, H) == 1
    assert pair(E1, E2) == 0
    assert pair(E1, E1) == -1


def test_pair_on_the_twisted_basis():
    lattice = ruled_twisted(1).lattice
    plus, minus = lattice.basis("s+"), lattice.basis("s-")
    assert pair(plus, minus) == 0
    assert pair(plus, plus) == 1
    assert pair(minus, minus) == -1


def test_pair_rejects_classes_of_different_lattices():
    with pytest.raises(LatticeError, match="CP2#1.*CP2#2"):
        pair(rational(1).basis("H"), rational(2).basis("H"))


def test_square_examples():
    assert square(rational(2).cls({"H": 1, "E1": -1, "E2": -1})) == -1
    p1 = rational(13).cls({"H": 4, "E1": -2, **{f"E{i}": -1 for i in range(2, 14)}})
    assert square(p1) == 0
    cubic = rational(8).cls({"H": 3, **{f"E{i}": -1 for i in range(1, 9)}})
    assert square(cubic) == 1


def test_adjunction_genus_examples():
    M = rational(8)
    assert adjunction_genus(M.K, M.cls({"H": 3, **{f"E{i}": -1 for i in range(1, 9)}})) == 1
    M = rational(13)
    assert adjunction_genus(M.K, M.cls({"H": 4, "E1": -2, **{f"E{i}": -1 for i in range(2, 14)}})) == 2
    M = s2xs2()
    assert adjunction_genus(M.K, M.basis("f")) == 0


def test_adjunction_genus_is_exact():
    lattice = rational(1).lattice
    K = lattice.element((0, 0))
    assert adjunction_genus(K, lattice.basis("H")) == Fraction(3, 2)


@pytest.mark.parametrize(
    "model",
    [rational(0), rational(5), ruled_trivial(1, 2), ruled_trivial(3), ruled_twisted(2), s2xs2(), s2xs2(2)],
)
def test_builtin_lattices_are_unimodular_and_canonical_classes_characteristic(model):
    lattice = model.lattice
    assert lattice.determinant in (1, -1)
    assert lattice.b_plus == 1
    for label in lattice.basis_labels:
        assert adjunction_genus(model.K, lattice.basis(label)).denominator == 1


def test_lattice_validation():
    with pytest.raises(LatticeError, match="unimodular"):
        IntersectionLattice("double", [[2]], ["x"])
    with pytest.raises(LatticeError, match="symmetric"):
        IntersectionLattice("skew", [[0, 1], [0, 0]], ["x", "y"])
    with pytest.raises(LatticeError, match="repeated"):
        IntersectionLattice("twice", [[1, 0], [0, -1]], ["x", "x"])
    with pytest.raises(LatticeError, match="signature"):
        IntersectionLattice("declared", [[1, 0], [0, -1]], ["x", "y"], signature=(2, 0))


def test_signature_of_hyperbolic_sums():
    lattice = IntersectionLattice.hyperbolic("a", "b").orthogonal_sum(IntersectionLattice.hyperbolic("c", "d"), "2U")
    assert lattice.signature == (2, 2)
    assert lattice.is_even()


def test_class_arithmetic_and_labels():
    H, E1 = CP2_3.basis("H"), CP2_3.basis("E1")
    A = 2 * H - E1
    assert str(A) == "2H - E1"
    assert A["H"] == 2
    assert str(CP2_3.zero()) == "0"
    assert CP2_3.from_mapping({"H": 1, "E1": -1, "E2": -1}) == H - E1 - CP2_3.basis("E2")
    with pytest.raises(LatticeError):
        CP2_3.element((1, 2))
    with pytest.raises(LatticeError, match="not a basis label"):
        CP2_3.basis("sigma")


def test_checked_rejects_overflow():
    assert checked(2**63 - 1) == 2**63 - 1
    with pytest.raises(LatticeOverflowError):
        checked(2**63)


@given(vectors, vectors)
def test_pair_is_symmetric(u, v):
    assert pair(CP2_3.element(u), CP2_3.element(v)) == pair(CP2_3.element(v), CP2_3.element(u))


@given(vectors, vectors, vectors, st.integers(-5, 5))
def test_pair_is_bilinear(u, v, w, k):
    a, b, c = CP2_3.element(u), CP2_3.element(v), CP2_3.element(w)
    assert pair(k * a + b, c) == k * pair(a, c) + pair(b, c)


def test_light_cone_examples():
    M = rational(0)
    H = M.basis("H")
    assert light_cone_check(H, H, H).pairing == 1
    lattice = rational(1).lattice
    H, E1 = lattice.basis("H"), lattice.basis("E1")
    report = light_cone_check(H - E1, H, 3 * H - E1)
    assert report.hypotheses_hold
    assert report.pairing == 1
    assert not light_cone_check(E1, H, 3 * H - E1).hypotheses_hold


def test_light_cone_rejects_wrong_type():
    lattice = IntersectionLattice.hyperbolic("a", "b").orthogonal_sum(IntersectionLattice.hyperbolic("c", "d"), "2U")
    a = lattice.basis("a") + lattice.basis("b")
    with pytest.raises(LatticeError, match="b\\+ = 1"):
        light_cone_check(a, a, a)
    lattice = rational(1).lattice
    with pytest.raises(LatticeError, match="positive square"):
        light_cone_check(lattice.basis("H"), lattice.basis("H"), lattice.basis("E1"))


def test_sampled_light_cone_holds():
    assert sample_light_cone(500, seed=7) == 500


@pytest.mark.slow
def test_sampled_light_cone_full():
    assert sample_light_cone(10_000) == 10_000


def test_random_cone_classes_cover_the_box():
    generator = random.Random(3)
    omegas = set()
    wide = negative = False
    for _ in range(300):
        n = generator.randint(1, 10)
        lattice = rational(n).lattice
        omega = random_cone_class(generator, n, 20)
        alpha = random_cone_class(generator, n, 20, omega)
        assert square(lattice.element(omega)) > 0
        assert square(lattice.element(alpha)) >= 0
        assert pair(lattice.element(alpha), lattice.element(omega)) >= 0
        assert max(abs(c) for c in omega + alpha) <= 20
        omegas.add(omega)
        wide |= any(abs(e) > isqrt(alpha[0] ** 2 // n) for e in alpha[1:])
        negative |= alpha[0] < 0
    assert len(omegas) > 100
    assert wide
    assert negative


def test_light_cone_on_null_classes():
    lattice = rational(1).lattice
    H, E1 = lattice.basis("H"), lattice.basis("E1")
    # H + E1 and H - E1 are null and forward, so they pair to 2, never below zero
    assert light_cone_check(H + E1, H - E1, H).pairing == 2
