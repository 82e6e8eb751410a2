from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from itertools import product
from multiprocessing import Pool

from exceptional.exceptional import (
    DEFAULT_DEGREE_BOUND,
    MeetsVerdict,
    enumerate_exceptional,
    fiber_constraints,
    meets_all_exceptional,
)
from exceptional.search import box_problem, pairing_constraint, search, square_constraint
from lattice.errors import InconsistencyError, KnefError, PossquareViolation
from lattice.lattice import light_cone_check, pair, square
from manifolds.manifolds import (
    ManifoldKind,
    MinimalModelKind,
    detect_ruled_section,
    rational,
)

logger = logging.getLogger(__name__)

DEFAULT_COEFF_BOUND = 10

TAUBES = "b+>1 Taubes nonvanishing"
LIU = "Liu forward-cone"
POSSQUARE_AUTHORITY = "positive square lemma for n >= 2 (chamber-structure argument)"
EXCEPTIONAL_LIST = "asserted exceptional list"
MINIMAL_ASSERTION = "asserted minimality"


class KnefVerdict(Enum):
    KNEF = "knef"
    NOT_KNEF = "not_knef"
    RULED_SECTION_EXCEPTION = "ruled_section_exception"


class KnefCase(Enum):
    B_PLUS_GREATER_ONE = "BPlusGreaterOne"
    IRRATIONAL_RULED = "IrrationalRuled"
    S2XS2 = "S2xS2Case"
    RATIONAL_SURFACE = "RationalSurface"
    B_PLUS_ONE_GENERAL = "BPlusOneGeneral"


@dataclass(frozen=True)
class Check:
    description: str
    values: str
    passed: bool


@dataclass(frozen=True)
class KnefCertificate:
    """A trace of how the K-nef condition was decided for one surface.

    Attributes:
        verdict (str): One of the KnefVerdict values.
        case (str): One of the KnefCase values.
        checks (tuple): Check records in the order they were made.
        assumptions_consumed (tuple): Asserted flags the verdict relies on.
        witness (HomologyClass): A class with negative pairing against K + F, when there is one.
        bounds (tuple): (name, value) pairs of the search bounds used.
        notes (tuple): Free-form remarks for the report.
    """

    model_name: str
    surface_name: str
    verdict: str
    case: str
    checks: tuple = ()
    assumptions_consumed: tuple = ()
    witness: object = field(default=None, compare=False)
    bounds: tuple = ()
    notes: tuple = ()

    def __post_init__(self):
        if self.verdict == KnefVerdict.KNEF and not all(check.passed for check in self.checks):
            failed = [check.description for check in self.checks if not check.passed]
            raise KnefError(f"\nA knef certificate cannot carry failed checks: {failed}.")

    @property
    def is_knef(self):
        return self.verdict == KnefVerdict.KNEF


@dataclass(frozen=True)
class PossquareResult:
    holds: bool
    checks: tuple
    derivation: str = ""
    warning: str | None = None


@dataclass(frozen=True)
class OracleResult:
    violation: object = None
    value: int | None = None
    searched: str = ""
    vacuous: bool = False

    @property
    def no_violation(self):
        return self.violation is None


def missing_assertions(M):
    """The flags a General model still needs before its surfaces can be certified."""
    if M.kind is not ManifoldKind.GENERAL:
        return []
    missing = []
    if M.flags.minimal_model_kind is None:
        missing.append("minimal_model_kind")
    if M.exceptional_classes is None and not M.flags.minimal:
        missing.append("exceptional classes (or minimal = true)")
    return missing


def certificate_case(M):
    """Which branch of the case analysis applies to M."""
    if M.kind is ManifoldKind.RATIONAL:
        return KnefCase.RATIONAL_SURFACE
    if M.kind in (ManifoldKind.RULED_TRIVIAL, ManifoldKind.RULED_TWISTED):
        return KnefCase.IRRATIONAL_RULED
    if M.kind is ManifoldKind.S2XS2:
        if M.n > 0:
            raise KnefError(
                f"\n{M.name} is a blown up S2xS2.\nRe-express it with rationalize() and transport() first."
            )
        return KnefCase.S2XS2
    missing = missing_assertions(M)
    if missing:
        raise KnefError(f"\n{M.name} lacks required assertions: {', '.join(missing)}.")
    kind = M.flags.minimal_model_kind
    if kind is not MinimalModelKind.NEITHER:
        raise KnefError(
            f"\n{M.name} asserts a {kind.value} minimal model.\nUse the built-in {kind.value} kinds instead of a General model."
        )
    if M.flags.b_plus > 1:
        return KnefCase.B_PLUS_GREATER_ONE
    return KnefCase.B_PLUS_ONE_GENERAL


def is_rationally_knef(M, F, degree_bound=DEFAULT_DEGREE_BOUND, jobs=1):
    """Certify that K + F pairs nonnegatively with every sphere class, by the case analysis.

    Args:
        M (ManifoldModel): The ambient model.
        F (SurfaceInModel): A symplectic surface of positive genus.
        degree_bound (int): Bound for the exceptional class search.
        jobs (int): Worker processes.

    Returns:
        KnefCertificate: The verdict with its checks.

    Examples:
        >>> is_rationally_knef(s2xs2(), surface(s2xs2(), {"sigma": 2, "f": 2})).verdict.value
        'knef'
    """
    if F.genus == 0:
        raise KnefError(f"\nSurface {F.name} has genus 0; only surfaces of positive genus are considered.")
    if not F.symplectic:
        raise KnefError(f"\nSurface {F.name} is not asserted symplectic.")
    case = certificate_case(M)
    exceptional_set = None
    if M.kind is not ManifoldKind.GENERAL:
        exceptional_set = enumerate_exceptional(M, degree_bound, jobs)
    meets = meets_all_exceptional(M, F, degree_bound, jobs, exceptional_set)
    base = dict(model_name=M.name, surface_name=F.name, case=case)
    bounds = (("degree_bound", degree_bound),)
    if meets.verdict is MeetsVerdict.NO:
        return KnefCertificate(
            verdict=KnefVerdict.NOT_KNEF,
            checks=(
                Check(
                    "F meets every exceptional class",
                    f"F.({meets.witness}) = {meets.pairing}",
                    False,
                ),
            ),
            witness=meets.witness,
            bounds=bounds,
            notes=(meets.note,),
            **base,
        )
    notes = (f"exceptional search {meets.verdict.value} ({meets.checked} classes)",)
    if case == KnefCase.RATIONAL_SURFACE:
        return _rational_certificate(M, F, exceptional_set, base, bounds, notes)
    if case == KnefCase.IRRATIONAL_RULED:
        return _ruled_certificate(M, F, base, bounds, notes)
    if case == KnefCase.S2XS2:
        return _s2xs2_certificate(M, F, base, bounds, notes)
    return _general_certificate(M, F, case, base, bounds, notes)


def _general_certificate(M, F, case, base, bounds, notes):
    assumptions = []
    checks = [Check("minimal model is neither rational nor ruled", "asserted", True)]
    b_plus = M.flags.b_plus
    if case == KnefCase.B_PLUS_GREATER_ONE:
        checks.append(Check("b+ > 1", f"b+ = {b_plus}", b_plus > 1))
        assumptions.append(TAUBES)
    else:
        checks.append(Check("b+ = 1", f"b+ = {b_plus}", b_plus == 1))
        assumptions.append(LIU)
    if M.exceptional_classes is not None:
        assumptions.append(EXCEPTIONAL_LIST)
    elif M.flags.minimal:
        assumptions.append(MINIMAL_ASSERTION)
    logger.info("%s: consuming %s", M.name, ", ".join(assumptions))
    return KnefCertificate(
        verdict=KnefVerdict.KNEF,
        checks=tuple(checks),
        assumptions_consumed=tuple(assumptions),
        bounds=bounds,
        notes=notes,
        **base,
    )


def _section_or_contradiction(M, F, degree, base, bounds, notes, checks):
    fiber = M.fiber_class()
    if degree == 1 and detect_ruled_section(M, F):
        checks.append(Check("<K + F, f> >= 0", f"{pair(M.K + F.cls, fiber)}", False))
        return KnefCertificate(
            verdict=KnefVerdict.RULED_SECTION_EXCEPTION,
            checks=tuple(checks),
            witness=fiber,
            bounds=bounds,
            notes=notes + ("F is homologically a section of the ruling",),
            **base,
        )
    checks.append(Check("adjunction consistent with fiber degree", f"F.f = {degree}", False))
    return KnefCertificate(
        verdict=KnefVerdict.NOT_KNEF,
        checks=tuple(checks),
        bounds=bounds,
        notes=notes + ("adjunction contradiction: no symplectic surface of positive genus has this fiber degree",),
        **base,
    )


def _ruled_certificate(M, F, base, bounds, notes):
    fiber = M.fiber_class()
    lam = M.K + F.cls
    degree = pair(F.cls, fiber)
    if M.kind is ManifoldKind.RULED_TWISTED:
        c = pair(F.cls, M.basis("s+"))
        d = -pair(F.cls, M.basis("s-"))
        checks = [Check("c + d >= 2", f"c = {c}, d = {d}", degree >= 2)]
    elif M.n == 0:
        checks = [Check("c >= 2", f"c = F.f = {degree}", degree >= 2)]
    else:
        return _ruled_blown_up_certificate(M, F, base, bounds, notes)
    if degree >= 2:
        checks.append(Check("<K + F, f> = c - 2 >= 0", f"{pair(lam, fiber)}", True))
        return KnefCertificate(
            verdict=KnefVerdict.KNEF, checks=tuple(checks), bounds=bounds, notes=notes, **base
        )
    return _section_or_contradiction(M, F, degree, base, bounds, notes, checks)


def _ruled_blown_up_certificate(M, F, base, bounds, notes):
    fiber = M.fiber_class()
    lam = M.K + F.cls
    c = pair(F.cls, fiber)
    labels = M.blowup_labels()
    meets = [pair(F.cls, M.basis(label)) for label in labels]
    residues = [pair(F.cls, fiber - M.basis(label)) for label in labels]
    checks = [
        Check("F.e_i >= 1", f"{meets}", all(a >= 1 for a in meets)),
        Check("F.(f - e_i) >= 1", f"{residues}", all(r >= 1 for r in residues)),
        Check("F.f >= 0", f"c = {c}", c >= 0),
        Check("1 <= a_i < c", f"a = {meets}, c = {c}", all(1 <= a < c for a in meets)),
        Check(
            "<K + F, e_i> >= 0 and <K + F, f - e_i> >= 0",
            f"{[pair(lam, M.basis(l)) for l in labels]}, {[pair(lam, fiber - M.basis(l)) for l in labels]}",
            all(pair(lam, M.basis(l)) >= 0 and pair(lam, fiber - M.basis(l)) >= 0 for l in labels),
        ),
    ]
    recorded = notes + (f"<K + F, f> = {pair(lam, fiber)} (recorded, not required)",)
    verdict = KnefVerdict.KNEF if all(check.passed for check in checks) else KnefVerdict.NOT_KNEF
    return KnefCertificate(verdict=verdict, checks=tuple(checks), bounds=bounds, notes=recorded, **base)


def _s2xs2_certificate(M, F, base, bounds, notes):
    c = pair(F.cls, M.basis("f"))
    d = pair(F.cls, M.basis("sigma"))
    adjunction = 2 * ((c - 1) * (d - 1) - 1)
    checks = [
        Check("2g - 2 = 2((c - 1)(d - 1) - 1)", f"{2 * F.genus - 2} = {adjunction}", 2 * F.genus - 2 == adjunction),
        Check("c >= 2", f"c = {c}", c >= 2),
        Check("d >= 2", f"d = {d}", d >= 2),
    ]
    verdict = KnefVerdict.KNEF if all(check.passed for check in checks) else KnefVerdict.NOT_KNEF
    return KnefCertificate(verdict=verdict, checks=tuple(checks), bounds=bounds, notes=notes, **base)


def _rational_certificate(M, F, exceptional_set, base, bounds, notes):
    H = M.basis("H")
    lam = M.K + F.cls
    a = pair(F.cls, H)
    multiplicities = [pair(F.cls, M.basis(label)) for label in M.blowup_labels()]
    lam_square = square(lam)
    k_lam = pair(M.K, lam)
    if lam_square - k_lam != 2 * F.genus - 2:
        raise InconsistencyError(
            f"\nInternal inconsistency: lambda^2 - K.lambda = {lam_square - k_lam} but 2g - 2 = {2 * F.genus - 2}."
        )
    values = [pair(lam, E) for E in exceptional_set]
    checks = [
        Check("b_i = F.E_i >= 1", f"{multiplicities}", all(b >= 1 for b in multiplicities)),
        Check("a >= 3", f"a = {a}", a >= 3),
        Check("<lambda, H> >= 0", f"{pair(lam, H)}", pair(lam, H) >= 0),
        Check(
            f"<lambda, E> >= 0 over {len(values)} exceptional classes",
            f"min = {min(values) if values else 'none'}",
            all(v >= 0 for v in values),
        ),
        Check("lambda^2 >= K.lambda", f"{lam_square} >= {k_lam}", lam_square >= k_lam),
    ]
    if not all(check.passed for check in checks):
        return KnefCertificate(verdict=KnefVerdict.NOT_KNEF, checks=tuple(checks), bounds=bounds, notes=notes, **base)
    lemma = lemma_possquare(M, lam, exceptional_set)
    if not lemma.holds:
        return KnefCertificate(
            verdict=KnefVerdict.NOT_KNEF, checks=tuple(checks) + lemma.checks, bounds=bounds, notes=notes, **base
        )
    checks.append(Check("lambda^2 >= 0", f"{lam_square} ({lemma.derivation})", lam_square >= 0))
    cone = light_cone_check(lam, M.omega_ref, H)
    checks.append(
        Check(
            "light cone: lambda pairs nonnegatively with the forward cone",
            f"<lambda, omega_ref> = {cone.pairing}",
            cone.hypotheses_hold,
        )
    )
    assumptions = (POSSQUARE_AUTHORITY,) if M.n >= 2 else ()
    extra = (lemma.warning,) if lemma.warning else ()
    return KnefCertificate(
        verdict=KnefVerdict.KNEF,
        checks=tuple(checks),
        assumptions_consumed=assumptions,
        bounds=bounds,
        notes=notes + extra,
        **base,
    )


def lemma_possquare(M, lam, E_set):
    """Check the hypotheses of the positive square lemma and conclude lambda^2 >= 0.

    Args:
        M (ManifoldModel): A Rational model.
        lam (HomologyClass): The class lambda.
        E_set (ExceptionalSet): Exceptional classes used for the hypothesis <lambda, E> >= 0.

    Returns:
        PossquareResult: holds with a derivation, or the failed hypotheses.

    Examples:
        >>> lemma_possquare(rational(1), rational(1).cls((2, -1)), enumerate_exceptional(rational(1))).holds
        True
    """
    if M.kind is not ManifoldKind.RATIONAL:
        raise KnefError(f"\n{M.name} is not a Rational model; the positive square lemma does not apply.")
    H = M.basis("H")
    lam_square = square(lam)
    k_lam = pair(M.K, lam)
    values = [pair(lam, E) for E in E_set]
    checks = (
        Check("lambda^2 >= K.lambda", f"{lam_square} >= {k_lam}", lam_square >= k_lam),
        Check("<lambda, H> >= 0", f"{pair(lam, H)}", pair(lam, H) >= 0),
        Check(
            "<lambda, E> >= 0 for every listed exceptional class",
            f"min = {min(values) if values else 'none'}",
            all(v >= 0 for v in values),
        ),
    )
    warning = None
    if not E_set.complete and M.n <= 8:
        warning = f"exceptional set incomplete at bound {E_set.bound}"
    if not all(check.passed for check in checks):
        return PossquareResult(False, checks, warning=warning)
    if M.n == 0:
        return PossquareResult(True, checks, "positive definite form", warning)
    if M.n == 1:
        a = pair(lam, H)
        b = pair(lam, M.basis("E1"))
        k = b - a
        if k > 0:
            raise PossquareViolation(
                f"\nThe integer argument failed for a = {a}, b = {b}: a^2 + 3a >= b^2 + b but b > a."
            )
        return PossquareResult(
            True, checks, f"a = {a}, b = {b}, k = b - a = {k} <= 0, so lambda^2 = (a - b)(a + b) >= 0", warning
        )
    if lam_square < 0:
        if E_set.complete:
            reason = "this would falsify the positive square lemma"
        else:
            reason = f"the exceptional set is incomplete (bounded at {E_set.bound})"
        raise PossquareViolation(f"\n{lam} passes the hypotheses but has square {lam_square}: {reason}.")
    return PossquareResult(True, checks, f"lambda^2 = {lam_square}, n = {M.n} >= 2", warning)


def knef_oracle(M, F, coeff_bound=DEFAULT_COEFF_BOUND, jobs=1):
    """Search the coefficient box for a class violating the K-nef inequality.

    Candidates are the integral A of the box with A^2 >= 0, K.A < 0 and omega_ref.A > 0, with two narrowings. On
    irrationally ruled models only classes of fiber degree 0 (A.f = 0) are searched, since a sphere cannot cover a
    base of positive genus. On General models with b+ = 1 only classes meeting every listed exceptional class
    nonnegatively are searched. Under an asserted b+ > 1 no candidate exists and the result is vacuous.

    Args:
        M (ManifoldModel): The ambient model.
        F (SurfaceInModel): The surface.
        coeff_bound (int): Every coefficient ranges over [-coeff_bound, coeff_bound].
        jobs (int): Worker processes.

    Returns:
        OracleResult: The lexicographically first violation, or none.
    """
    lattice = M.lattice
    lam = M.K + F.cls
    searched = f"coefficients in [-{coeff_bound}, {coeff_bound}]"
    if M.kind is ManifoldKind.GENERAL and M.flags.b_plus is not None and M.flags.b_plus > 1:
        return OracleResult(searched="no sphere classes of nonnegative square under the asserted flags", vacuous=True)
    linear = [
        pairing_constraint(lattice, M.K, None, -1, "canonical"),
        pairing_constraint(lattice, M.omega_ref, 1, None, "omega"),
        pairing_constraint(lattice, lam, None, -1, "knef"),
    ] + fiber_constraints(M)
    if M.kind is ManifoldKind.GENERAL:
        linear += [pairing_constraint(lattice, E, 0, None, "positivity") for E in M.exceptional_classes or ()]
    problem = box_problem(lattice, coeff_bound, coeff_bound, linear, [square_constraint(lattice, 0, None)])
    found = search(problem, jobs, first_only=True)
    if not found:
        return OracleResult(searched=searched)
    A = lattice.element(found[0])
    return OracleResult(A, pair(lam, A), searched)


def _scan_partition(n, coeff_bound, weights, leading):
    if leading < 0:
        return 0, []
    passing = 0
    counterexamples = []
    others = range(-coeff_bound, coeff_bound + 1)
    for tail in product(others, repeat=n):
        lam = (leading,) + tail
        if any(sum(w * x for w, x in zip(weight, lam)) < 0 for weight in weights):
            continue
        lam_square = leading * leading - sum(x * x for x in tail)
        k_lam = -3 * leading + sum(tail)
        if lam_square < k_lam:
            continue
        passing += 1
        if lam_square < 0:
            counterexamples.append(lam)
    return passing, counterexamples


def scan_possquare(n, coeff_bound=10, degree_bound=DEFAULT_DEGREE_BOUND, jobs=1):
    """Scan every integral lambda of a box for a counterexample to the positive square lemma.

    Returns:
        tuple: (number of lambda passing the hypotheses, list of counterexamples).
    """
    model = rational(n)
    E_set = enumerate_exceptional(model, degree_bound)
    weights = [model.lattice.dual(E.coeffs) for E in E_set]
    scan = partial(_scan_partition, n, coeff_bound, weights)
    leading = list(range(-coeff_bound, coeff_bound + 1))
    if jobs == 1:
        parts = [scan(value) for value in leading]
    else:
        with Pool(jobs) as pool:
            parts = pool.map(scan, leading)
    passing = sum(count for count, _ in parts)
    counterexamples = sorted(lam for _, found in parts for lam in found)
    logger.info("Positive square scan n = %s: %s classes passed the hypotheses", n, passing)
    return passing, counterexamples


def scan_integer_path(limit=100):
    """Pairs (a, b) in [0, limit]^2 with a^2 + 3a >= b^2 + b but a < b; the list is empty."""
    return [
        (a, b)
        for a in range(limit + 1)
        for b in range(limit + 1)
        if a * a + 3 * a >= b * b + b and a < b
    ]


def oracle_agrees(certificate, oracle):
    """Whether a certificate and an oracle run tell the same story.

    A knef certificate needs an empty oracle, a ruled section exception needs an oracle violation. When the certificate
    rests on a missed exceptional class the oracle, which only sees classes of nonnegative square, has nothing to say
    and None is returned.
    """
    if certificate.verdict is KnefVerdict.KNEF:
        return oracle.no_violation
    if certificate.verdict is KnefVerdict.RULED_SECTION_EXCEPTION:
        return oracle.violation is not None
    if certificate.witness is not None:
        return None
    return oracle.violation is not None
