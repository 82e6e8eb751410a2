"""Symplectic sums of two models along surfaces of equal genus, and their minimality.

The sum itself is never built as a model: its lattice depends on the gluing map. Only invariants that do not depend on
it are computed, and minimality is decided from the two sides.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, product

from exceptional.exceptional import DEFAULT_DEGREE_BOUND, MeetsVerdict, fiber_constraints, meets_all_exceptional
from exceptional.search import box_problem, genus_constraint, pairing_constraint, search
from knef.knef import is_rationally_knef, missing_assertions
from lattice.errors import InconsistencyError, SumError
from lattice.lattice import pair
from manifolds.manifolds import ManifoldKind, chern_numbers, detect_ruled_section

logger = logging.getLogger(__name__)

DEFAULT_SPLITTING_BOUND = 8

CASE_II_CONSTRUCTION = (
    "a section of a trivial ruling summed with a non-minimal side caps a sphere of square -1 "
    "(pairwise sum construction); the converse follows from the splitting relation"
)
GLUING_NOTE = "the sum is not materialized; every reported quantity is independent of the gluing map"

LEFSCHETZ_REASONS = (
    "every fiber of a relatively minimal Lefschetz fibration of positive genus meets every symplectic (-1)-sphere",
    "a fiber of such a fibration is a section of a ruling only when the fibration is the trivial projection",
)


@dataclass(frozen=True)
class SumSide:
    model: object
    surface: object

    @property
    def lam(self):
        """K + F, the class whose pairings decide the splitting relation."""
        return self.model.K + self.surface.cls


@dataclass(frozen=True)
class SumDescriptor:
    """Two models with a surface each, to be summed along those surfaces.

    Attributes:
        side1 (SumSide): The first model and surface.
        side2 (SumSide): The second model and surface.
        genus (int): The common genus of the two surfaces.
    """

    side1: SumSide
    side2: SumSide
    genus: int

    @property
    def sides(self):
        return (self.side1, self.side2)

    def swapped(self):
        return SumDescriptor(self.side2, self.side1, self.genus)


@dataclass(frozen=True)
class SumValidation:
    ok: bool
    violations: tuple = ()


class MinimalityVerdict(Enum):
    NOT_MINIMAL_CASE_I = "not_minimal_case_i"
    CONDITIONAL_CASE_II = "conditional_case_ii"
    MINIMAL_CASE_III = "minimal_case_iii"


@dataclass(frozen=True)
class MinimalityDecision:
    """The outcome of decide_minimality.

    Attributes:
        verdict (MinimalityVerdict): Which case of the decision applied.
        witness (HomologyClass): For the first case, the exceptional class missing or meeting its surface badly.
        witness_side (int): 1 or 2, the side holding the witness.
        positivity_violation (bool): For the first case, the witness pairs negatively with its surface, which no
            symplectic surface of positive genus does; the input is suspect.
        ruled_side (int): For the second case, the side whose surface is a section of a ruling.
        resolved_minimal (bool): For the second case, the minimality of the other side; None when it is not known.
        certificates (tuple): The two KnefCertificates of the third case.
        meets (tuple): The meets_all_exceptional results of both sides, in order.
        notes (tuple): Assumptions and constructions consumed.
    """

    verdict: MinimalityVerdict
    witness: object = field(default=None, compare=False)
    witness_side: int | None = None
    positivity_violation: bool = False
    ruled_side: int | None = None
    resolved_minimal: bool | None = None
    certificates: tuple = field(default=(), compare=False)
    meets: tuple = field(default=(), compare=False)
    notes: tuple = ()

    def __post_init__(self):
        if self.verdict is MinimalityVerdict.MINIMAL_CASE_III:
            if len(self.certificates) != 2 or not all(c.is_knef for c in self.certificates):
                raise SumError("\nA minimal verdict needs a knef certificate on both sides.")

    @property
    def is_minimal(self):
        """True, False, or None when the second case is left unresolved."""
        if self.verdict is MinimalityVerdict.NOT_MINIMAL_CASE_I:
            return False
        if self.verdict is MinimalityVerdict.CONDITIONAL_CASE_II:
            return self.resolved_minimal
        return True


@dataclass(frozen=True)
class FibrationDescriptor:
    genus: int
    relatively_minimal: bool
    is_trivial_projection: bool


def validate_sum(s):
    """Check the genus and the opposite squares of the two surfaces.

    Returns:
        SumValidation: ok, or every violation found.

    Examples:
        >>> validate_sum(SumDescriptor(fiber_side, fiber_side, 1)).ok
        True
    """
    violations = []
    if s.genus <= 0:
        violations.append(f"genus {s.genus} must be positive")
    for index, side in enumerate(s.sides, start=1):
        if side.surface.genus != s.genus:
            violations.append(
                f"surface {side.surface.name} of side {index} has genus {side.surface.genus}, not {s.genus}"
            )
    squares = (side.surface.square for side in s.sides)
    first, second = squares
    if first + second != 0:
        violations.append(f"surface squares {first} and {second} do not sum to zero")
    return SumValidation(not violations, tuple(violations))


def _require_valid(s):
    validation = validate_sum(s)
    if not validation.ok:
        raise SumError("\nInvalid sum:\n" + "\n".join(validation.violations))


def sum_euler(s):
    """c2 of the sum: c2(X1) + c2(X2) + 4(g - 1), for any admissible pair of squares."""
    _require_valid(s)
    return chern_numbers(s.side1.model)[1] + chern_numbers(s.side2.model)[1] + 4 * (s.genus - 1)


def sum_chern(s):
    """Chern numbers (c1^2, c2) of a sum along surfaces of square zero.

    Args:
        s (SumDescriptor): A valid sum whose surfaces have square zero.

    Returns:
        tuple: (c1^2, c2) as exact integers.

    Examples:
        >>> sum_chern(SumDescriptor(fiber_side, fiber_side, 1))
        (0, 24)
    """
    _require_valid(s)
    if any(side.surface.square != 0 for side in s.sides):
        raise SumError(
            f"\nSurfaces of square {s.side1.surface.square} and {s.side2.surface.square}.\n"
            "c1^2 is only computed for sums along surfaces of square zero; use sum_euler for c2."
        )
    a1, _ = chern_numbers(s.side1.model)
    a2, _ = chern_numbers(s.side2.model)
    return a1 + a2 + 8 * (s.genus - 1), sum_euler(s)


def can_relation(s, A1, A2):
    """<K1 + F1, A1> + <K2 + F2, A2>; a splitting of an exceptional class of the sum has value -1."""
    for index, (side, A) in enumerate(zip(s.sides, (A1, A2)), start=1):
        if A.lattice != side.model.lattice:
            raise SumError(f"\n{A} does not live in side {index} ({side.model.lattice.name}).")
    return pair(s.side1.lam, A1) + pair(s.side2.lam, A2)


def _check_side(side, index):
    M = side.model
    missing = missing_assertions(M)
    if missing:
        raise SumError(f"\nSide {index} ({M.name}) lacks required assertions: {', '.join(missing)}.")
    if M.kind is ManifoldKind.S2XS2 and M.n > 0:
        raise SumError(
            f"\nSide {index} is the blown up S2xS2 {M.name}.\nRe-express it with rationalize() and transport()."
        )


def _known_minimal(M):
    if M.kind is ManifoldKind.GENERAL:
        return M.flags.minimal
    return M.n == 0


def decide_minimality(s, degree_bound=DEFAULT_DEGREE_BOUND, jobs=1):
    """Decide whether the symplectic sum of the two sides is minimal.

    The first case applies when a side has an exceptional class its surface does not meet, the second when a surface is
    a section of a minimal ruled side, and otherwise both surfaces must certify as rationally K-nef.

    Args:
        s (SumDescriptor): A valid sum of positive genus.
        degree_bound (int): Bound for the exceptional searches.
        jobs (int): Worker processes.

    Returns:
        MinimalityDecision: The verdict with its witnesses or certificates.

    Examples:
        >>> decide_minimality(SumDescriptor(fiber_side, fiber_side, 1)).verdict.value
        'minimal_case_iii'
    """
    _require_valid(s)
    for index, side in enumerate(s.sides, start=1):
        _check_side(side, index)
    meets = []
    for index, side in enumerate(s.sides, start=1):
        result = meets_all_exceptional(side.model, side.surface, degree_bound, jobs)
        meets.append(result)
        if result.verdict is MeetsVerdict.NO:
            if result.positivity_violation:
                logger.warning(
                    "%s pairs to %s with the exceptional class %s of %s; check the input",
                    side.surface.name,
                    result.pairing,
                    result.witness,
                    side.model.name,
                )
                note = (
                    f"positivity violation: {side.surface.name} pairs to {result.pairing} with {result.witness}; "
                    "a symplectic surface of positive genus cannot, so check the input"
                )
            else:
                logger.info("Side %s misses the exceptional class %s", index, result.witness)
                note = f"{result.witness} is disjoint from {side.surface.name} and survives in the sum"
            return MinimalityDecision(
                MinimalityVerdict.NOT_MINIMAL_CASE_I,
                witness=result.witness,
                witness_side=index,
                positivity_violation=result.positivity_violation,
                meets=tuple(meets),
                notes=(note, GLUING_NOTE),
            )
    for index, side in enumerate(s.sides, start=1):
        if detect_ruled_section(side.model, side.surface):
            other = s.sides[2 - index]
            resolved = _known_minimal(other.model)
            if resolved is None:
                logger.warning("Minimality of %s is not asserted; the decision stays conditional", other.model.name)
            return MinimalityDecision(
                MinimalityVerdict.CONDITIONAL_CASE_II,
                ruled_side=index,
                resolved_minimal=resolved,
                meets=tuple(meets),
                notes=(CASE_II_CONSTRUCTION, GLUING_NOTE),
            )
    certificates = tuple(is_rationally_knef(side.model, side.surface, degree_bound, jobs) for side in s.sides)
    if not all(certificate.is_knef for certificate in certificates):
        verdicts = ", ".join(f"{c.model_name}: {c.verdict.value}" for c in certificates)
        raise InconsistencyError(
            f"\nNo case of the decision applies ({verdicts}).\nThis is an internal inconsistency and must be reported."
        )
    return MinimalityDecision(
        MinimalityVerdict.MINIMAL_CASE_III,
        certificates=certificates,
        meets=tuple(meets),
        notes=("both surfaces rationally K-nef; no exceptional class of the sum splits", GLUING_NOTE),
    )


def sphere_candidates(side, coeff_bound, jobs=1, negative_only=False, value=None, degree=None):
    """Classes of one side that may carry a sphere component of a limiting curve.

    These are classes of adjunction genus zero, positive on omega_ref, meeting the surface nonnegatively and inside the
    coefficient box. On General models only the asserted exceptional classes are known spheres. value and degree pin
    the pairings with K + F and with the surface.
    """
    M, F = side.model, side.surface
    lam = side.lam
    if M.kind is ManifoldKind.GENERAL:
        return [
            E
            for E in sorted(M.exceptional_classes or (), key=lambda e: e.coeffs)
            if pair(F.cls, E) >= 0
            and max(abs(c) for c in E.coeffs) <= coeff_bound
            and (not negative_only or pair(lam, E) < 0)
            and (value is None or pair(lam, E) == value)
            and (degree is None or pair(F.cls, E) == degree)
        ]
    lattice = M.lattice
    linear = [
        pairing_constraint(lattice, M.omega_ref, 1, None, "omega"),
        pairing_constraint(lattice, F.cls, 0 if degree is None else degree, degree, "surface"),
    ] + fiber_constraints(M)
    if negative_only:
        linear.append(pairing_constraint(lattice, lam, None, -1, "knef"))
    if value is not None:
        linear.append(pairing_constraint(lattice, lam, value, value, "knef"))
    problem = box_problem(lattice, coeff_bound, coeff_bound, linear, [genus_constraint(lattice, M.K, 0)])
    return [lattice.element(vector) for vector in search(problem, jobs)]


def _multiples(atoms, coeff_bound):
    for atom in atoms:
        for m in range(1, coeff_bound + 1):
            A = m * atom
            if max(abs(c) for c in A.coeffs) > coeff_bound:
                break
            yield A


def _splittings_through(s, negative, coeff_bound, jobs):
    """Splittings whose class on side index `negative` pairs negatively with K + F, one atom per side.

    The pairings of that class fix both pairings of its partner, so the other side is only searched at those values.
    """
    side, other = s.sides[negative], s.sides[1 - negative]
    targets = {}
    for A in _multiples(sphere_candidates(side, coeff_bound, jobs, negative_only=True), coeff_bound):
        key = (-1 - pair(side.lam, A), pair(side.surface.cls, A))
        targets.setdefault(key, {}).setdefault(A.coeffs, A)
    zero = other.model.lattice.zero()
    atoms = {}
    found = []
    for (value, d), classes in targets.items():
        partners = {zero.coeffs: zero} if value == 0 and d == 0 else {}
        for m in range(1, coeff_bound + 1):
            if value % m or d % m:
                continue
            key = (value // m, d // m)
            if key not in atoms:
                atoms[key] = sphere_candidates(other, coeff_bound, jobs, value=key[0], degree=key[1])
            for atom in atoms[key]:
                B = m * atom
                if max(abs(c) for c in B.coeffs) <= coeff_bound:
                    partners.setdefault(B.coeffs, B)
        for A in classes.values():
            found.extend((A, B, d) if negative == 0 else (B, A, d) for B in partners.values())
    return found


def _curve_classes(side, atoms, coeff_bound, max_components):
    """Nonnegative combinations of at most max_components atoms in the box, keyed by (<K + F, A>, A.F)."""
    lattice = side.model.lattice
    found = {lattice.zero().coeffs: lattice.zero()}
    for size in range(1, max_components + 1):
        for chosen in combinations(atoms, size):
            for multiplicities in product(range(1, coeff_bound + 1), repeat=size):
                total = lattice.zero()
                for m, atom in zip(multiplicities, chosen):
                    total = total + m * atom
                if max(abs(c) for c in total.coeffs) <= coeff_bound:
                    found.setdefault(total.coeffs, total)
    index = {}
    for A in found.values():
        index.setdefault((pair(side.lam, A), pair(side.surface.cls, A)), []).append(A)
    return index


def enumerate_can_splittings(s, coeff_bound=DEFAULT_SPLITTING_BOUND, max_components=1, jobs=1):
    """Every pair (A1, A2) of curve classes satisfying the splitting relation, in the box.

    Each Ai is zero or a nonnegative combination of sphere candidates, the two meet their surfaces equally
    (d = A1.F1 = A2.F2) and can_relation(s, A1, A2) = -1. Exactly one of A1 and A2 pairs negatively with its K + F;
    with one atom per side that class is enumerated first and its partner searched at the pairings it forces. Larger
    max_components fall back to combining every candidate of both sides, which grows quickly with the box on
    rational sides with many blowups.

    Args:
        s (SumDescriptor): A valid sum.
        coeff_bound (int): Coefficient box for every class.
        max_components (int): Largest number of distinct sphere candidates in one combination.
        jobs (int): Worker processes for the candidate searches.

    Returns:
        list: (A1, A2, d) tuples ordered by the coefficients of A1 then A2.
    """
    _require_valid(s)
    if coeff_bound < 1 or max_components < 1:
        raise SumError(f"\nBounds must be positive, got coeff_bound {coeff_bound}, max_components {max_components}.")
    if not any(sphere_candidates(side, coeff_bound, jobs, negative_only=True) for side in s.sides):
        logger.info("No candidate pairs negatively with K + F on either side; no splittings")
        return []
    if max_components == 1:
        splittings = _splittings_through(s, 0, coeff_bound, jobs) + _splittings_through(s, 1, coeff_bound, jobs)
    else:
        first, second = (
            _curve_classes(side, sphere_candidates(side, coeff_bound, jobs), coeff_bound, max_components)
            for side in s.sides
        )
        splittings = []
        for (value, d), classes in first.items():
            for A2 in second.get((-1 - value, d), ()):
                splittings.extend((A1, A2, d) for A1 in classes)
    splittings.sort(key=lambda entry: (entry[0].coeffs, entry[1].coeffs))
    logger.info("%s splittings at coefficient bound %s", len(splittings), coeff_bound)
    return splittings


def lefschetz_fiber_sum_minimal(f1, f2):
    """The fiber sum of two relatively minimal Lefschetz fibrations of the same positive genus is minimal.

    Args:
        f1 (FibrationDescriptor): The first fibration.
        f2 (FibrationDescriptor): The second fibration.

    Returns:
        bool: True; the facts consumed are listed in LEFSCHETZ_REASONS.

    Examples:
        >>> lefschetz_fiber_sum_minimal(FibrationDescriptor(2, True, False), FibrationDescriptor(2, True, False))
        True
    """
    for index, fibration in enumerate((f1, f2), start=1):
        if fibration.genus <= 0:
            raise SumError(f"\nFibration {index} has fiber genus {fibration.genus}.\nThe genus must be positive.")
        if not fibration.relatively_minimal:
            raise SumError(f"\nFibration {index} is not relatively minimal.")
        if fibration.is_trivial_projection:
            raise SumError(f"\nFibration {index} is the trivial projection Sigma_g x S2 -> S2.")
    if f1.genus != f2.genus:
        raise SumError(f"\nFiber genera {f1.genus} and {f2.genus} differ.")
    return True
