import pytest

from lattice.errors import ModelError, SurfaceError
from manifolds.manifolds import (
    ManifoldKind,
    MinimalModelKind,
    ModelFlags,
    blow_up,
    chern_numbers,
    detect_ruled_section,
    general,
    noether_check,
    rational,
    rationalize,
    ruled_trivial,
    ruled_twisted,
    s2xs2,
    surface,
    transport,
)


@pytest.mark.parametrize(
    "model, expected",
    [
        (rational(0), (9, 3)),
        (rational(8), (1, 11)),
        (rational(12), (-3, 15)),
        (rational(13), (-4, 16)),
        (s2xs2(), (8, 4)),
        (ruled_trivial(2), (-8, -4)),
        (ruled_twisted(2), (-8, -4)),
        (ruled_trivial(1, 3), (-3, 3)),
    ],
)
def test_chern_numbers(model, expected):
    assert chern_numbers(model) == expected
    assert noether_check(*expected)


def test_noether_check():
    assert noether_check(-4, 16)
    assert not noether_check(1, 10)


def test_blow_up_adds_an_exceptional_class():
    M = blow_up(rational(0))
    assert str(M.K) == "-3H + E1"
    assert chern_numbers(M) == (8, 4)
    assert M.flags.minimal is False
    twisted = blow_up(ruled_twisted(1))
    assert twisted.kind is ManifoldKind.RULED_TRIVIAL
    assert any("normalized" in note for note in twisted.notes)


def test_blow_up_of_a_general_model():
    base = rational(1)
    M = general(
        "fake",
        base.lattice,
        base.K,
        0,
        base.omega_ref,
        ModelFlags(False, MinimalModelKind.NEITHER, 1),
        exceptional_classes=[base.basis("E1")],
        asserted_chern=(8, 4),
    )
    bigger = blow_up(M)
    assert bigger.lattice.basis_labels == ("H", "E1", "E2")
    assert len(bigger.exceptional_classes) == 2
    assert chern_numbers(bigger) == (7, 5)


def test_twisted_blowups_are_normalized():
    M = ruled_twisted(1, 2)
    assert M.kind is ManifoldKind.RULED_TRIVIAL
    assert M.n == 2


def test_constructor_errors():
    with pytest.raises(ModelError):
        rational(-1)
    with pytest.raises(ModelError, match="s2xs2"):
        ruled_trivial(0)
    with pytest.raises(ModelError, match="positive"):
        rational(1, omega=(1, 1))
    lattice = rational(1).lattice
    with pytest.raises(ModelError, match="characteristic"):
        general("bad", lattice, (0, 0), 0, (2, -1), ModelFlags(None, None, 1))
    with pytest.raises(ModelError, match="not an exceptional class"):
        general(
            "bad", lattice, (-3, 1), 0, (2, -1), ModelFlags(None, None, 1), exceptional_classes=[(1, 0)]
        )


def test_surface_genus_from_adjunction():
    F = surface(rational(8), {"H": 3, **{f"E{i}": -1 for i in range(1, 9)}})
    assert (F.square, F.genus) == (1, 1)


def test_surface_validation():
    M = rational(1)
    with pytest.raises(SurfaceError, match="adjunction gives"):
        surface(M, {"H": 3}, genus=2)
    with pytest.raises(SurfaceError, match="adjunction genus"):
        surface(M, {"E1": 2})
    with pytest.raises(SurfaceError, match="pair positively"):
        surface(M, {"E1": -1})
    assert surface(M, {"E1": -1}, symplectic=False).genus == 1


def test_detect_ruled_section():
    M = ruled_trivial(1)
    assert detect_ruled_section(M, surface(M, {"sigma": 1}))
    assert detect_ruled_section(M, surface(M, {"sigma": 1, "f": 2}))
    assert not detect_ruled_section(M, surface(M, {"sigma": 2}))
    M = ruled_trivial(2)
    assert detect_ruled_section(M, surface(M, {"sigma": 1}))
    M = ruled_trivial(1, 1)
    assert not detect_ruled_section(M, surface(M, {"sigma": 1}))
    M = ruled_twisted(1)
    assert detect_ruled_section(M, surface(M, {"s+": 1}))
    M = s2xs2()
    assert not detect_ruled_section(M, surface(M, {"sigma": 2, "f": 2}))


def test_detect_ruled_section_needs_positive_genus():
    M = s2xs2()
    with pytest.raises(SurfaceError):
        detect_ruled_section(M, surface(M, {"f": 1}))


def test_fiber_classes():
    assert str(ruled_trivial(1).fiber_class()) == "f"
    assert str(ruled_twisted(1).fiber_class()) == "s+ - s-"
    with pytest.raises(ModelError):
        rational(1).fiber_class()


def test_rationalize_and_transport():
    M = s2xs2(1)
    F = surface(M, {"sigma": 2, "f": 2, "e1": -1})
    assert F.genus == 1
    R = rationalize(M)
    assert R.name == "CP2#2"
    moved = transport(M, F, R)
    assert str(moved.cls) == "3H - E1 - E2"
    assert (moved.square, moved.genus) == (F.square, F.genus)
    with pytest.raises(ModelError):
        rationalize(s2xs2())
