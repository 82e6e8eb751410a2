from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from exceptional.search import box_problem, pairing_constraint, search, square_constraint
from lattice.errors import ExceptionalError
from lattice.lattice import pair, square
from manifolds.manifolds import ManifoldKind

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_BOUND = 6


@dataclass(frozen=True)
class ExceptionalSet:
    """Exceptional classes found in a search box.

    Attributes:
        classes (tuple): Classes with square -1, K-pairing -1 and positive omega-pairing, in lexicographic order.
        bound (int): The degree (Rational) or coefficient (other kinds) bound searched.
        complete (bool): Whether the search provably found every exceptional class.
    """

    classes: tuple
    bound: int
    complete: bool

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)


class MeetsVerdict(Enum):
    YES_CERTIFIED = "yes_certified"
    YES_BOUNDED = "yes_bounded"
    NO = "no"


@dataclass(frozen=True)
class MeetsResult:
    verdict: MeetsVerdict
    witness: object = None
    pairing: int | None = None
    positivity_violation: bool = False
    checked: int = 0
    bound: int | None = None
    note: str = ""


def fiber_constraints(M):
    """Spheres of an irrationally ruled model map with degree zero to the base, so they pair trivially with the fiber."""
    if M.kind in (ManifoldKind.RULED_TRIVIAL, ManifoldKind.RULED_TWISTED) and M.h > 0:
        return [pairing_constraint(M.lattice, M.fiber_class(), 0, 0, "fiber degree")]
    return []


def enumerate_exceptional(M, degree_bound=DEFAULT_DEGREE_BOUND, jobs=1):
    """Find the exceptional classes of a built-in model inside a box.

    Args:
        M (ManifoldModel): A Rational, ruled or S2xS2 model.
        degree_bound (int): Bound on the H-coefficient (Rational) or on the sigma and f coefficients (ruled).
        jobs (int): Worker processes for the box search.

    Returns:
        ExceptionalSet: The classes found, in lexicographic order.

    Examples:
        >>> [str(E) for E in enumerate_exceptional(rational(2))]
        ['E2', 'E1', 'H - E1 - E2']
    """
    if M.kind is ManifoldKind.GENERAL:
        raise ExceptionalError(
            f"\n{M.name} is a General model.\nIts exceptional classes cannot be enumerated; supply them as an assertion."
        )
    if degree_bound < 1:
        raise ExceptionalError(f"\nThe degree bound must be positive, got {degree_bound}.")
    lattice = M.lattice
    linear = [
        pairing_constraint(lattice, M.K, -1, -1, "canonical"),
        pairing_constraint(lattice, M.omega_ref, 1, None, "omega"),
    ] + fiber_constraints(M)
    problem = box_problem(
        lattice, degree_bound, degree_bound + 1, linear, [square_constraint(lattice, -1, -1)]
    )
    classes = tuple(lattice.element(vector) for vector in search(problem, jobs))
    if M.kind is ManifoldKind.RATIONAL:
        complete = M.n <= 8 and degree_bound >= 6
    elif M.kind is ManifoldKind.S2XS2:
        complete = M.n == 0
    else:
        complete = True
    logger.info(
        "%s: %s exceptional classes at bound %s (%s)",
        M.name,
        len(classes),
        degree_bound,
        "complete" if complete else "bounded",
    )
    return ExceptionalSet(classes, degree_bound, complete)


def is_exceptional_cremona(M, A):
    """Recognize an exceptional class of a blown up CP2 by Cremona reduction.

    Write A = dH - sum m_i E_i. While d > 0, reflect in H - E_i - E_j - E_k for the three largest multiplicities, which
    lowers the degree by their excess over d. A is exceptional exactly when this ends at some E_j.

    Args:
        M (ManifoldModel): A Rational model.
        A (HomologyClass): The class to test.

    Returns:
        bool: Whether A is the class of a smooth rational (-1)-curve.

    Examples:
        >>> is_exceptional_cremona(rational(5), two_h_minus_five_points)
        True
    """
    if M.kind is not ManifoldKind.RATIONAL:
        raise ExceptionalError(f"\n{M.name} is not a Rational model; Cremona reduction does not apply.")
    if square(A) != -1 or pair(M.K, A) != -1:
        return False
    degree = A.coeffs[0]
    multiplicities = [-x for x in A.coeffs[1:]]
    multiplicities += [0] * max(0, 3 - len(multiplicities))
    while True:
        if degree < 0:
            return False
        if degree == 0:
            return sorted(multiplicities) == [-1] + [0] * (len(multiplicities) - 1)
        if min(multiplicities) < 0:
            return False
        multiplicities.sort(reverse=True)
        excess = multiplicities[0] + multiplicities[1] + multiplicities[2] - degree
        if excess <= 0:
            return False
        degree -= excess
        for i in range(3):
            multiplicities[i] -= excess


def meets_all_exceptional(M, F, degree_bound=DEFAULT_DEGREE_BOUND, jobs=1, exceptional_set=None):
    """Decide whether F meets every exceptional class of M.

    Args:
        M (ManifoldModel): The ambient model.
        F (SurfaceInModel): A symplectic surface of M.
        degree_bound (int): Search bound passed to enumerate_exceptional.
        jobs (int): Worker processes.
        exceptional_set (ExceptionalSet): A set already enumerated for M, reused when given.

    Returns:
        MeetsResult: yes_certified, yes_bounded, or no with the first witness in lexicographic order.
    """
    if not F.symplectic:
        raise ExceptionalError(f"\nSurface {F.name} is not asserted symplectic.")
    if M.kind is ManifoldKind.GENERAL:
        if M.exceptional_classes is not None:
            classes = tuple(sorted(M.exceptional_classes, key=lambda e: e.coeffs))
            complete = True
            note = "exceptional classes taken from the asserted list"
            bound = None
        elif M.flags.minimal:
            return MeetsResult(
                MeetsVerdict.YES_CERTIFIED, note="minimal by assertion; no exceptional classes"
            )
        else:
            raise ExceptionalError(
                f"\n{M.name} is not asserted minimal and carries no exceptional list.\nSupply the exceptional classes."
            )
    else:
        found = exceptional_set if exceptional_set is not None else enumerate_exceptional(M, degree_bound, jobs)
        classes, complete, bound = found.classes, found.complete, found.bound
        note = "" if complete else f"search bounded at {bound}"
    for A in classes:
        value = pair(F.cls, A)
        if value <= 0:
            return MeetsResult(
                MeetsVerdict.NO,
                witness=A,
                pairing=value,
                positivity_violation=value < 0,
                checked=len(classes),
                bound=bound,
                note="positivity violation" if value < 0 else "disjoint in homology",
            )
    verdict = MeetsVerdict.YES_CERTIFIED if complete else MeetsVerdict.YES_BOUNDED
    return MeetsResult(verdict, checked=len(classes), bound=bound, note=note)
