from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from lattice.errors import ModelError, SurfaceError
from lattice.lattice import IntersectionLattice, adjunction_genus, pair, square

logger = logging.getLogger(__name__)


class ManifoldKind(Enum):
    RATIONAL = "rational"
    RULED_TRIVIAL = "ruled_trivial"
    RULED_TWISTED = "ruled_twisted"
    S2XS2 = "s2xs2"
    GENERAL = "general"


class MinimalModelKind(Enum):
    RATIONAL = "rational"
    RULED = "ruled"
    NEITHER = "neither"


@dataclass(frozen=True)
class ModelFlags:
    """Topological flags of a model.

    For built-in kinds these are derived; for General models they are assertions, and ``None`` means not asserted.
    """

    minimal: bool | None
    minimal_model_kind: MinimalModelKind | None
    b_plus: int | None
    aspherical: bool = False


@dataclass(frozen=True)
class ManifoldModel:
    """A symplectic 4-manifold seen through its intersection lattice and canonical class.

    Attributes:
        kind (ManifoldKind): Which family the model belongs to.
        name (str): A readable name.
        lattice (IntersectionLattice): The intersection lattice of H_2.
        K (HomologyClass): The Poincare dual of the canonical class.
        b1 (int): The first Betti number.
        omega_ref (HomologyClass): A class of positive square standing in for the symplectic class.
        flags (ModelFlags): Minimality, minimal model kind, b+ and asphericity.
        h (int): Base genus for ruled kinds.
        n (int): Number of blowups recorded by the built-in kinds.
        exceptional_classes (tuple): Asserted exceptional classes of a General model, or None.
        asserted_chern (tuple): Chern numbers asserted for abstract General models, or None.
        notes (tuple): Normalizations and assumptions to echo in reports.
    """

    kind: ManifoldKind
    name: str
    lattice: IntersectionLattice = field(repr=False)
    K: object = field(repr=False)
    b1: int
    omega_ref: object = field(repr=False)
    flags: ModelFlags
    h: int = 0
    n: int = 0
    exceptional_classes: tuple | None = field(default=None, repr=False)
    asserted_chern: tuple | None = None
    notes: tuple = ()

    def __post_init__(self):
        if self.K.lattice != self.lattice or self.omega_ref.lattice != self.lattice:
            raise ModelError(f"\n{self.name}: K and omega_ref must live in {self.lattice.name}.")
        if self.b1 < 0:
            raise ModelError(f"\n{self.name}: b1 = {self.b1} must be nonnegative.")
        b_plus = self.flags.b_plus
        if b_plus is not None and (isinstance(b_plus, bool) or not isinstance(b_plus, int) or b_plus < 1):
            raise ModelError(f"\n{self.name}: b_plus = {b_plus!r} must be a positive integer.")
        neither = self.flags.minimal_model_kind is MinimalModelKind.NEITHER
        if self.kind is ManifoldKind.GENERAL and neither and b_plus is None:
            raise ModelError(
                f"\n{self.name}: b_plus is required when the minimal model is neither rational nor ruled."
            )
        # abstract models (asserted Chern numbers) sit on a proxy lattice
        if b_plus is not None and self.asserted_chern is None and b_plus != self.lattice.b_plus:
            raise ModelError(
                f"\n{self.name}: b_plus is asserted as {b_plus} "
                f"but {self.lattice.name} has b+ = {self.lattice.b_plus}."
            )
        if square(self.omega_ref) <= 0:
            raise ModelError(
                f"\n{self.name}: omega_ref {self.omega_ref} has square {square(self.omega_ref)}.\nIt must be positive."
            )
        for label in self.lattice.basis_labels:
            basis = self.lattice.basis(label)
            if (pair(self.K, basis) - square(basis)) % 2 != 0:
                raise ModelError(
                    f"\n{self.name}: K = {self.K} is not characteristic; it fails on {label}."
                )
        if self.exceptional_classes is not None:
            for exceptional in self.exceptional_classes:
                if exceptional.lattice != self.lattice:
                    raise ModelError(f"\n{self.name}: exceptional class {exceptional} is in another lattice.")
                if square(exceptional) != -1 or pair(self.K, exceptional) != -1:
                    raise ModelError(
                        f"\n{self.name}: {exceptional} is not an exceptional class (square and K-pairing must be -1)."
                    )

    def cls(self, coefficients):
        """A class of this model from a coefficient vector or a label mapping."""
        if isinstance(coefficients, dict):
            return self.lattice.from_mapping(coefficients)
        return self.lattice.element(tuple(coefficients))

    def basis(self, label):
        return self.lattice.basis(label)

    def fiber_class(self):
        if self.kind in (ManifoldKind.RULED_TRIVIAL, ManifoldKind.S2XS2):
            return self.basis("f")
        if self.kind is ManifoldKind.RULED_TWISTED:
            return self.basis("s+") - self.basis("s-")
        raise ModelError(f"\n{self.name} is not a ruled model and has no fiber class.")

    def blowup_labels(self):
        if self.kind is ManifoldKind.RATIONAL:
            return tuple(f"E{i}" for i in range(1, self.n + 1))
        if self.kind in (ManifoldKind.RULED_TRIVIAL, ManifoldKind.S2XS2):
            return tuple(f"e{i}" for i in range(1, self.n + 1))
        return ()


@dataclass(frozen=True)
class SurfaceInModel:
    """An embedded surface of a model, validated against adjunction and omega-positivity.

    The genus is computed from the adjunction formula when omitted, and checked against it when given.
    """

    model: ManifoldModel = field(repr=False, compare=False)
    cls: object
    genus: int | None = None
    symplectic: bool = True
    name: str = "F"

    def __post_init__(self):
        if self.cls.lattice != self.model.lattice:
            raise SurfaceError(
                f"\nSurface {self.name} lives in {self.cls.lattice.name}, not in {self.model.lattice.name}."
            )
        computed = adjunction_genus(self.model.K, self.cls)
        if computed.denominator != 1 or computed < 0:
            raise SurfaceError(
                f"\nSurface {self.name} = {self.cls} has adjunction genus {computed}.\nNo embedded connected surface of {self.model.name} lies in this class."
            )
        if self.genus is None:
            object.__setattr__(self, "genus", int(computed))
        elif self.genus != computed:
            raise SurfaceError(
                f"\nSurface {self.name} = {self.cls} was given genus {self.genus} but adjunction gives {computed}."
            )
        if self.symplectic and pair(self.model.omega_ref, self.cls) <= 0:
            raise SurfaceError(
                f"\nSurface {self.name} = {self.cls} pairs {pair(self.model.omega_ref, self.cls)} with omega_ref.\nA symplectic surface must pair positively."
            )

    @property
    def square(self):
        return square(self.cls)


def surface(model, coefficients, genus=None, symplectic=True, name="F"):
    """Build a validated surface of a model.

    Args:
        model (ManifoldModel): The ambient model.
        coefficients (dict | tuple | HomologyClass): The surface class.
        genus (int): Optional genus to check against adjunction.
        symplectic (bool): Whether the surface is asserted symplectic.
        name (str): Name used in reports.

    Returns:
        SurfaceInModel: The validated surface.

    Examples:
        >>> surface(rational(8), {"H": 3, **{f"E{i}": -1 for i in range(1, 9)}}).genus
        1
    """
    if isinstance(coefficients, (dict, tuple, list)):
        coefficients = model.cls(coefficients)
    return SurfaceInModel(model, coefficients, genus, symplectic, name)


def rational(n, omega=None):
    """CP^2 blown up n times, with K = -3H + sum E_i.

    Examples:
        >>> chern_numbers(rational(13))
        (-4, 16)
    """
    if n < 0:
        raise ModelError(f"\nRational(n) needs n >= 0, got {n}.")
    labels = ("H",) + tuple(f"E{i}" for i in range(1, n + 1))
    gram = [[0] * (n + 1) for _ in range(n + 1)]
    gram[0][0] = 1
    for i in range(1, n + 1):
        gram[i][i] = -1
    lattice = IntersectionLattice(f"CP2#{n}", gram, labels, signature=(1, n))
    K = lattice.element((-3,) + (1,) * n)
    omega_ref = lattice.element(tuple(omega) if omega else (n + 1,) + (-1,) * n)
    flags = ModelFlags(n == 0, MinimalModelKind.RATIONAL, 1)
    return ManifoldModel(ManifoldKind.RATIONAL, f"CP2#{n}", lattice, K, 0, omega_ref, flags, n=n)


def _ruled_lattice(name, n, first_labels):
    labels = first_labels + tuple(f"e{i}" for i in range(1, n + 1))
    gram = [[0] * (n + 2) for _ in range(n + 2)]
    gram[0][1] = gram[1][0] = 1
    for i in range(2, n + 2):
        gram[i][i] = -1
    return IntersectionLattice(name, gram, labels, signature=(1, n + 1))


def ruled_trivial(h, n=0, omega=None):
    """The product Sigma_h x S^2 blown up n times, with K = -2 sigma + (2h - 2) f + sum e_i.

    Args:
        h (int): Genus of the base, at least 1.
        n (int): Number of blowups.
        omega (tuple): Optional coefficients overriding the default reference class.

    Returns:
        ManifoldModel: The model.
    """
    if h < 1:
        raise ModelError(
            f"\nRuledTrivial needs base genus h >= 1, got {h}.\nUse s2xs2() for the product of spheres."
        )
    if n < 0:
        raise ModelError(f"\nRuledTrivial needs n >= 0, got {n}.")
    name = f"Sigma{h}xS2#{n}"
    lattice = _ruled_lattice(name, n, ("sigma", "f"))
    K = lattice.element((-2, 2 * h - 2) + (1,) * n)
    omega_ref = lattice.element(tuple(omega) if omega else (n + 1, n + 1) + (-1,) * n)
    flags = ModelFlags(n == 0, MinimalModelKind.RULED, 1)
    return ManifoldModel(
        ManifoldKind.RULED_TRIVIAL, name, lattice, K, 2 * h, omega_ref, flags, h=h, n=n
    )


def ruled_twisted(h, n=0, omega=None):
    """The nontrivial S^2 bundle over Sigma_h, with K = (2h - 3) s+ - (2h - 1) s-.

    Blowups of the twisted bundle are diffeomorphic to blowups of the trivial one, so n > 0 returns RuledTrivial(h, n)
    with a note.
    """
    if h < 1:
        raise ModelError(f"\nRuledTwisted needs base genus h >= 1, got {h}.")
    if n > 0:
        logger.info("Normalizing RuledTwisted(%s, %s) to RuledTrivial(%s, %s)", h, n, h, n)
        model = ruled_trivial(h, n, omega)
        return replace(
            model,
            notes=model.notes
            + (f"RuledTwisted({h}, {n}) normalized to RuledTrivial({h}, {n}) (diffeomorphic after a blowup).",),
        )
    name = f"Sigma{h}~xS2"
    lattice = IntersectionLattice(name, ((1, 0), (0, -1)), ("s+", "s-"), signature=(1, 1))
    K = lattice.element((2 * h - 3, -(2 * h - 1)))
    omega_ref = lattice.element(tuple(omega) if omega else (2, 1))
    flags = ModelFlags(True, MinimalModelKind.RULED, 1)
    return ManifoldModel(
        ManifoldKind.RULED_TWISTED, name, lattice, K, 2 * h, omega_ref, flags, h=h
    )


def s2xs2(n=0, omega=None):
    """S^2 x S^2, optionally blown up n times, with K = -2 sigma - 2 f + sum e_i."""
    if n < 0:
        raise ModelError(f"\nS2xS2 needs n >= 0, got {n}.")
    name = "S2xS2" if n == 0 else f"S2xS2#{n}"
    lattice = _ruled_lattice(name, n, ("sigma", "f"))
    K = lattice.element((-2, -2) + (1,) * n)
    omega_ref = lattice.element(tuple(omega) if omega else (n + 1, n + 1) + (-1,) * n)
    flags = ModelFlags(n == 0, MinimalModelKind.RATIONAL, 1)
    return ManifoldModel(ManifoldKind.S2XS2, name, lattice, K, 0, omega_ref, flags, n=n)


def general(
    name,
    lattice,
    K,
    b1,
    omega_ref,
    flags,
    exceptional_classes=None,
    asserted_chern=None,
    notes=(),
):
    """A model whose data are all supplied by the caller and whose flags are assertions."""
    if isinstance(K, (tuple, list)):
        K = lattice.element(tuple(K))
    if isinstance(omega_ref, (tuple, list)):
        omega_ref = lattice.element(tuple(omega_ref))
    if exceptional_classes is not None:
        exceptional_classes = tuple(
            lattice.element(tuple(e)) if isinstance(e, (tuple, list)) else e
            for e in exceptional_classes
        )
    return ManifoldModel(
        ManifoldKind.GENERAL,
        name,
        lattice,
        K,
        b1,
        omega_ref,
        flags,
        exceptional_classes=exceptional_classes,
        asserted_chern=tuple(asserted_chern) if asserted_chern is not None else None,
        notes=tuple(notes),
    )


def blow_up(M):
    """Blow up a model once.

    The rank grows by one with a new class of square -1, K gains that class, b1 is unchanged and the model is no longer
    minimal.

    Examples:
        >>> blow_up(rational(0)).K
        -3H + E1
    """
    if M.kind is ManifoldKind.RATIONAL:
        return rational(M.n + 1)
    if M.kind is ManifoldKind.RULED_TRIVIAL:
        model = ruled_trivial(M.h, M.n + 1)
        return replace(model, notes=M.notes) if M.notes else model
    if M.kind is ManifoldKind.RULED_TWISTED:
        return ruled_twisted(M.h, 1)
    if M.kind is ManifoldKind.S2XS2:
        return s2xs2(M.n + 1)
    return _blow_up_general(M)


def _blow_up_general(M):
    index = 1
    while f"E{index}" in M.lattice.basis_labels:
        index += 1
    label = f"E{index}"
    lattice = M.lattice.orthogonal_sum(
        IntersectionLattice.diagonal((label,)), M.lattice.name + "#1"
    )
    lift = lambda c: lattice.element(c.coeffs + (0,))
    new = lattice.basis(label)
    scale = 1 if square(M.omega_ref) > 1 else 2
    omega_ref = scale * lift(M.omega_ref) - new
    exceptional = None
    if M.exceptional_classes is not None:
        exceptional = tuple(lift(e) for e in M.exceptional_classes) + (new,)
    chern = None
    if M.asserted_chern is not None:
        chern = (M.asserted_chern[0] - 1, M.asserted_chern[1] + 1)
    flags = replace(M.flags, minimal=False)
    return general(
        f"{M.name}#1",
        lattice,
        lift(M.K) + new,
        M.b1,
        omega_ref,
        flags,
        exceptional_classes=exceptional,
        asserted_chern=chern,
        notes=M.notes,
    )


def chern_numbers(M):
    """The Chern numbers (c1^2, c2) of a model.

    c1^2 is K.K and c2 is the Euler characteristic 2 - 2 b1 + rank; abstract General models return their asserted pair.

    Examples:
        >>> chern_numbers(s2xs2())
        (8, 4)
    """
    if M.asserted_chern is not None:
        return M.asserted_chern
    return square(M.K), 2 - 2 * M.b1 + M.lattice.rank


def noether_check(a, b):
    return (a + b) % 12 == 0


def detect_ruled_section(M, F):
    """Whether F is homologically a section of a minimal ruled model.

    Args:
        M (ManifoldModel): The ambient model.
        F (SurfaceInModel): A surface of positive genus.

    Returns:
        bool: True exactly when M is a minimal ruled model over a base of genus F.genus and F meets the fiber once.
    """
    if F.genus <= 0:
        raise SurfaceError(f"\nSurface {F.name} has genus {F.genus}; ruled section detection needs positive genus.")
    if M.kind in (ManifoldKind.RULED_TRIVIAL, ManifoldKind.RULED_TWISTED):
        if M.n != 0 or F.genus != M.h:
            return False
        return pair(F.cls, M.fiber_class()) == 1
    if M.kind is ManifoldKind.S2XS2:
        # base genus 0, never equal to a positive genus
        return False
    return False


def rationalize(M):
    """Re-express S2xS2 blown up n >= 1 times as Rational(n + 1).

    Returns:
        ManifoldModel: The rational model.
    """
    if M.kind is not ManifoldKind.S2XS2 or M.n < 1:
        raise ModelError(
            f"\n{M.name} cannot be rationalized.\nOnly S2xS2 blown up at least once is diffeomorphic to a blown up CP2."
        )
    model = rational(M.n + 1)
    return replace(model, notes=(f"{M.name} re-expressed as {model.name}.",))


def transport(M, F, target=None):
    """Move a surface of S2xS2#n to the rationalized model."""
    target = target or rationalize(M)
    image = {
        "sigma": {"H": 1, "E1": -1},
        "f": {"H": 1, "E2": -1},
        "e1": {"H": 1, "E1": -1, "E2": -1},
    }
    for i in range(2, M.n + 1):
        image[f"e{i}"] = {f"E{i + 1}": 1}
    total = target.lattice.zero()
    for label, coefficient in zip(M.lattice.basis_labels, F.cls.coeffs):
        if coefficient:
            total = total + coefficient * target.cls(image[label])
    return SurfaceInModel(target, total, F.genus, F.symplectic, F.name)
