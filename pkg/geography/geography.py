"""Building blocks for minimal symplectic 4-manifolds and the region of (c1^2, c2) they reach.

Blocks are summed along their surfaces in chains; every stage of a chain is decided by decide_minimality.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache, partial
from multiprocessing import Pool

from exceptional.exceptional import DEFAULT_DEGREE_BOUND, MeetsVerdict, enumerate_exceptional, meets_all_exceptional
from lattice.errors import BlockError, ChainError, SumError
from lattice.lattice import IntersectionLattice, pair
from manifolds.manifolds import (
    ManifoldKind,
    MinimalModelKind,
    ModelFlags,
    chern_numbers,
    general,
    noether_check,
    rational,
    surface,
)
from sums.sums import MinimalityVerdict, SumDescriptor, SumSide, decide_minimality, sum_chern, sum_euler

logger = logging.getLogger(__name__)

BLOCK_NAMES = ("M_G", "P1", "P2", "Q1", "Q2", "S11", "CP2_8")

SURFACE_INVARIANTS = {
    "M_G": (0, 1),
    "P1": (0, 2),
    "P2": (0, 2),
    "Q1": (0, 2),
    "Q2": (0, 2),
    "S11": (0, 1),
    "CP2_8": (1, 1),
}

ASPHERICAL_NOTE = "the minimal model T^4 is aspherical, so the listed classes are the only exceptional classes"

CHERN_NUMBERS = {
    "P1": (-4, 16),
    "P2": (-3, 15),
    "Q1": (-2, 2),
    "Q2": (0, 0),
    "S11": (1, 23),
    "CP2_8": (1, 11),
}


@dataclass(frozen=True)
class BuildingBlock:
    """A model with a distinguished surface, ready to be summed.

    Attributes:
        name (str): One of BLOCK_NAMES, or a descriptive name for chain-only blocks.
        model (ManifoldModel): The model; abstract blocks use a General proxy lattice.
        surface (SurfaceInModel): The gluing surface.
        chern (tuple): (c1^2, c2).
        abstract (bool): Whether the invariants are asserted rather than computed.
        notes (tuple): Assertions and derivations behind an abstract block.
    """

    name: str
    model: object = field(repr=False)
    surface: object = field(repr=False)
    chern: tuple
    abstract: bool = False
    notes: tuple = ()

    @property
    def side(self):
        return SumSide(self.model, self.surface)


@dataclass(frozen=True)
class ChainLink:
    block: BuildingBlock
    carried: SumSide | None = None


@dataclass(frozen=True)
class ChainStage:
    index: int
    left: str
    right: str
    genus: int
    decision: object = field(compare=False)
    chern: tuple = ()


@dataclass(frozen=True)
class ChainReport:
    """Per-stage decisions of an iterated sum.

    Attributes:
        stages (tuple): ChainStage records, in order.
        chern (tuple): (c1^2, c2) of the last completed stage; c1^2 is None once a stage glued along nonzero squares.
        minimal (bool): Whether every stage was decided minimal.
        failed_stage (int): The stage where a first-case witness stopped the chain, or None.
    """

    stages: tuple
    chern: tuple
    minimal: bool | None
    failed_stage: int | None = None


def torus_lattice(blowups, name=None, labels=None):
    """H_2 of T^4 blown up: three hyperbolic planes, then a diagonal -1 block."""
    lattice = IntersectionLattice.hyperbolic("T1", "T2", "U1")
    for first, second in (("a1", "b1"), ("a2", "b2")):
        lattice = lattice.orthogonal_sum(IntersectionLattice.hyperbolic(first, second), "3U")
    labels = labels or tuple(f"E{i}" for i in range(1, blowups + 1))
    return lattice.orthogonal_sum(IntersectionLattice.diagonal(labels), name or f"T4#{blowups}")


def torus_blowup(labels, exceptional=None, b_plus=3, chern=None, name=None):
    """T^4 blown up at len(labels) points, as a General model with K the sum of the new classes.

    The minimal model T^4 is aspherical, so the exceptional classes are listed rather than searched for; by default every
    new class is listed.
    """
    lattice = torus_lattice(len(labels), name, tuple(labels))
    K = lattice.element((0,) * 6 + (1,) * len(labels))
    omega = lattice.element((10, 10, 1, 1, 1, 1) + (-1,) * len(labels))
    listed = [lattice.basis(label) for label in (labels if exceptional is None else exceptional)]
    return general(
        name or lattice.name,
        lattice,
        K,
        4,
        omega,
        ModelFlags(not labels, MinimalModelKind.NEITHER, b_plus),
        exceptional_classes=listed,
        asserted_chern=chern,
        notes=(ASPHERICAL_NOTE,),
    )


def _proxy(name, K, omega, chern, flags, b1, notes):
    lattice = IntersectionLattice.hyperbolic("u", "v", f"{name} proxy")
    return general(name, lattice, K, b1, omega, flags, asserted_chern=chern, notes=notes)


def _block_m_g(m_g_euler):
    if m_g_euler <= 0 or not noether_check(0, m_g_euler):
        raise BlockError(f"\nM_G needs c2 > 0 with c2 = 0 mod 12, got {m_g_euler}.")
    flags = ModelFlags(True, MinimalModelKind.NEITHER, 3)
    notes = ("spin, hence minimal", "c1^2 = 0 and c2 asserted", "torus T of square 0")
    model = _proxy("M_G", (0, 0), (1, 1), (0, m_g_euler), flags, 0, notes)
    return BuildingBlock("M_G", model, surface(model, {"u": 1}, name="T"), (0, m_g_euler), True, notes)


def _block_p1():
    model = rational(13)
    F = surface(model, {"H": 4, "E1": -2, **{f"E{i}": -1 for i in range(2, 14)}})
    return BuildingBlock("P1", model, F, chern_numbers(model))


def _block_p2():
    model = rational(12)
    coefficients = {"H": 6, **{f"E{i}": -2 for i in range(1, 9)}, **{f"E{i}": -1 for i in range(9, 13)}}
    return BuildingBlock("P2", model, surface(model, coefficients), chern_numbers(model))


def _block_q1():
    model = torus_blowup(("E1", "E2"), name="Q1")
    F = surface(model, {"T1": 1, "T2": 1, "E1": -1, "E2": -1})
    return BuildingBlock("Q1", model, F, chern_numbers(model), notes=model.notes)


def _block_q2():
    flags = ModelFlags(True, MinimalModelKind.NEITHER, 3, aspherical=True)
    notes = (
        "torus bundle over a genus 2 surface; aspherical, hence minimal",
        "c2 = 0 by multiplicativity of the Euler characteristic in fiber bundles",
        "c1^2 = 0 since the signature vanishes",
    )
    model = _proxy("Q2", (0, 2), (1, 1), CHERN_NUMBERS["Q2"], flags, 4, notes)
    return BuildingBlock("Q2", model, surface(model, {"u": 1}), CHERN_NUMBERS["Q2"], True, notes)


def _block_s11(minimal):
    flags = ModelFlags(minimal, MinimalModelKind.NEITHER, 3)
    notes = ("built by the two-stage chain s11_chain()", "c1^2 = 1 asserted; c2 checked against the chain")
    model = _proxy("S11", (0, 0), (1, 1), CHERN_NUMBERS["S11"], flags, 0, notes)
    return BuildingBlock("S11", model, surface(model, {"u": 1}, name="T"), CHERN_NUMBERS["S11"], True, notes)


def _block_cp2_8():
    model = rational(8)
    F = surface(model, {"H": 3, **{f"E{i}": -1 for i in range(1, 9)}})
    return BuildingBlock("CP2_8", model, F, chern_numbers(model))


def _verify_block(block, exceptional_bound, jobs):
    expected = SURFACE_INVARIANTS[block.name]
    found = (block.surface.square, block.surface.genus)
    if found != expected:
        raise BlockError(f"\n{block.name}: surface has (square, genus) = {found}, expected {expected}.")
    if block.name in CHERN_NUMBERS and block.chern != CHERN_NUMBERS[block.name]:
        raise BlockError(f"\n{block.name}: Chern numbers {block.chern}, expected {CHERN_NUMBERS[block.name]}.")
    if not noether_check(*block.chern):
        raise BlockError(f"\n{block.name}: c1^2 + c2 = {sum(block.chern)} is not divisible by 12.")
    M, F = block.model, block.surface
    if M.kind is ManifoldKind.GENERAL and M.exceptional_classes is not None:
        result = meets_all_exceptional(M, F)
        if result.verdict is MeetsVerdict.NO:
            raise BlockError(f"\n{block.name}: the surface misses the listed exceptional class {result.witness}.")
    if exceptional_bound is not None and M.kind is ManifoldKind.RATIONAL:
        lam = M.K + F.cls
        for E in enumerate_exceptional(M, exceptional_bound, jobs):
            if pair(lam, E) < 0:
                raise BlockError(f"\n{block.name}: K + F pairs to {pair(lam, E)} with the exceptional class {E}.")
        logger.info("%s: K + F is nonnegative on exceptional classes up to degree %s", block.name, exceptional_bound)


def building_blocks(m_g_euler=24, exceptional_bound=DEFAULT_DEGREE_BOUND, jobs=1):
    """The seven building blocks, each verified at construction.

    Verified blocks are cached per argument set.

    Args:
        m_g_euler (int): c2 asserted for M_G.
        exceptional_bound (int): Degree bound for checking K + F against the exceptional classes of the rational
            blocks; None skips that check.
        jobs (int): Worker processes for those searches.

    Returns:
        list: BuildingBlocks in the order of BLOCK_NAMES.

    Examples:
        >>> [(b.name, b.surface.square, b.surface.genus) for b in building_blocks()][1]
        ('P1', 0, 2)
    """
    return list(_verified_blocks(m_g_euler, exceptional_bound, jobs))


@lru_cache(maxsize=None)
def _verified_blocks(m_g_euler, exceptional_bound, jobs):
    s11 = verify_chain(*s11_chain())
    if s11.chern[1] != CHERN_NUMBERS["S11"][1]:
        raise BlockError(f"\nS11: the chain reaches c2 = {s11.chern[1]}, expected {CHERN_NUMBERS['S11'][1]}.")
    blocks = [
        _block_m_g(m_g_euler),
        _block_p1(),
        _block_p2(),
        _block_q1(),
        _block_q2(),
        _block_s11(s11.minimal),
        _block_cp2_8(),
    ]
    for block in blocks:
        _verify_block(block, exceptional_bound, jobs)
    return tuple(blocks)


def named_block(name, m_g_euler=24):
    """One building block by name."""
    found = {b.name: b for b in building_blocks(m_g_euler)}
    if name not in found:
        raise BlockError(f"\nUnknown block {name}.\nKnown blocks: {', '.join(BLOCK_NAMES)}.")
    return found[name]


def realizable(a, b, r):
    """Whether (a, b) satisfies a + b = 0 mod 12 and 0 <= a <= 2(b - r).

    Examples:
        >>> realizable(16, 8, 0)
        True
    """
    return (a + b) % 12 == 0 and 0 <= a <= 2 * (b - r)


def _region_row(b_range, r, a):
    return [(a, b) for b in range(b_range[0], b_range[1] + 1) if realizable(a, b, r)]


def enumerate_region(a_range, b_range, r, jobs=1):
    """Every realizable pair in a box, sorted.

    Args:
        a_range (tuple): Inclusive (low, high) for c1^2.
        b_range (tuple): Inclusive (low, high) for c2.
        r (int): The nonnegative constant attached to the group.
        jobs (int): Worker processes, one row of a at a time.

    Returns:
        list: (a, b) pairs.
    """
    if r < 0:
        raise BlockError(f"\nThe constant r must be nonnegative, got {r}.")
    rows = range(a_range[0], a_range[1] + 1)
    worker = partial(_region_row, tuple(b_range), r)
    if jobs == 1:
        found = [worker(a) for a in rows]
    else:
        with Pool(jobs) as pool:
            found = pool.map(worker, rows)
    return sorted(pair_ for row in found for pair_ in row)


def _side_b_plus(side):
    M = side.model
    if M.kind is ManifoldKind.GENERAL:
        return M.flags.b_plus or 0
    return M.lattice.b_plus


def sum_b_plus_bound(s, chern):
    """A lower bound for b+ of the sum, or None when no bound above 1 can be shown.

    With c1^2 known, Noether gives b+ = 2 chi_h - 1 + b1 >= (c1^2 + c2) / 6 - 1. Independently, the complement of F_i
    keeps every positive direction of X_i orthogonal to F_i: all b+(X_i) of them when F_i^2 < 0, at least b+(X_i) - 1
    otherwise. The two complements are disjoint in the sum.

    Examples:
        >>> sum_b_plus_bound(SumDescriptor(fiber_side, fiber_side, 1), (0, 24))
        3
    """
    bounds = [sum(_side_b_plus(side) - (side.surface.square >= 0) for side in s.sides)]
    if chern[0] is not None:
        bounds.append((chern[0] + chern[1]) // 6 - 1)
    bound = max(bounds)
    return bound if bound > 1 else None


def _carried_side(stage, s, previous, decision, chern):
    """The sum so far, as an abstract model holding a parallel copy of the last surface."""
    c2 = chern[1]
    b_plus = sum_b_plus_bound(s, chern)
    kind = None
    # c2 = 3 is CP2 and c2 = 4 is S2 x S2 or CP2 # -CP2, both rational
    if decision.is_minimal and c2 > 0 and c2 not in (3, 4) and b_plus is not None:
        kind = MinimalModelKind.NEITHER
    right = previous.model
    model = general(
        f"Z{stage}",
        right.lattice,
        right.K,
        right.b1,
        right.omega_ref,
        ModelFlags(decision.is_minimal, kind, b_plus),
        asserted_chern=chern,
        notes=(
            f"sum of the first {stage + 1} blocks, carried along a parallel copy of {previous.name}",
            f"b+ >= {b_plus}" if b_plus is not None else "b+ not bounded above 1",
        ),
    )
    return SumSide(model, surface(model, previous.surface.cls.coeffs, name=f"{previous.surface.name}'"))


def verify_chain(first, links, degree_bound=6, jobs=1):
    """Decide every stage of an iterated sum.

    Stage k sums the result of stage k - 1 with links[k - 1].block. The running sum is carried as an abstract model
    holding a parallel copy of the previous block's surface, unless the link supplies its own carried side.

    Args:
        first (BuildingBlock): The first block.
        links (list): ChainLinks, one per stage.
        degree_bound (int): Bound for exceptional searches.
        jobs (int): Worker processes.

    Returns:
        ChainReport: Stage verdicts and the final Chern numbers.
    """
    if not links:
        raise ChainError("\nA chain needs at least one link.")
    left = first.side
    left_name = first.name
    previous = first
    stages = []
    chern = first.chern
    for index, link in enumerate(links, start=1):
        if link.carried is not None:
            left = link.carried
            left_name = link.carried.model.name
        right = link.block.side
        if left.surface.genus != right.surface.genus:
            raise ChainError(
                f"\nStage {index}: genus {left.surface.genus} of {left_name} does not match genus "
                f"{right.surface.genus} of {link.block.name}."
            )
        s = SumDescriptor(left, right, right.surface.genus)
        try:
            decision = decide_minimality(s, degree_bound, jobs)
            c2 = sum_euler(s)
        except SumError as error:
            raise ChainError(f"\nStage {index} ({left_name} + {link.block.name}) failed:{error}") from error
        c1 = None
        if left.surface.square == 0 and chern_numbers(left.model)[0] is not None:
            c1 = sum_chern(s)[0]
        chern = (c1, c2)
        stages.append(ChainStage(index, left_name, link.block.name, s.genus, decision, chern))
        logger.info("Stage %s: %s + %s -> %s", index, left_name, link.block.name, decision.verdict.value)
        if decision.verdict is MinimalityVerdict.NOT_MINIMAL_CASE_I:
            return ChainReport(tuple(stages), chern, False, failed_stage=index)
        if index < len(links) and c2 <= 0:
            raise ChainError(f"\nStage {index} has c2 = {c2}; the sum could be ruled over a curve of positive genus.")
        previous = link.block
        left = _carried_side(index, s, previous, decision, chern)
        left_name = left.model.name
    minimal = True
    for stage in stages:
        if stage.decision.is_minimal is not True:
            minimal = stage.decision.is_minimal
            break
    return ChainReport(tuple(stages), chern, minimal)


def chain_by_names(names, m_g_euler=24):
    """First block and links for a chain of named blocks glued along their square-zero surfaces."""
    if len(names) < 2:
        raise ChainError("\nA chain needs at least two blocks.")
    found = {b.name: b for b in building_blocks(m_g_euler)}
    unknown = [name for name in names if name not in found]
    if unknown:
        raise ChainError(f"\nUnknown blocks {unknown}.\nKnown blocks: {', '.join(BLOCK_NAMES)}.")
    return found[names[0]], [ChainLink(found[name]) for name in names[1:]]


def _cubic():
    model = rational(0)
    return BuildingBlock("CP2 cubic", model, surface(model, {"H": 3}, name="C"), chern_numbers(model))


def s11_chain():
    """The two sums building S11.

    T^4 is blown up once at a point of T1 x pt meeting pt x T2 and at eight more points of T1 x pt; the proper transform
    of T1 (square -9, genus 1) is summed with a cubic of CP2. Eight more points on pt x T2 are then blown up and the
    proper transform of T2 is summed with a second cubic.

    Returns:
        tuple: (first block, links) for verify_chain.
    """
    first_labels = tuple(f"E{i}" for i in range(9))
    torus = torus_blowup(first_labels, name="T4#9")
    F1 = surface(torus, {"T1": 1, **{label: -1 for label in first_labels}}, name="T1'")
    first = BuildingBlock("T4#9", torus, F1, chern_numbers(torus), notes=torus.notes)
    second_labels = first_labels + tuple(f"E{i}" for i in range(9, 17))
    # the complement of T1' (square -9) keeps all three positive directions of T^4
    carried = torus_blowup(
        second_labels,
        exceptional=second_labels[9:],
        b_plus=3,
        chern=(None, 20),
        name="Z1#8",
    )
    F2 = surface(carried, {"T2": 1, "E0": -1, **{label: -1 for label in second_labels[9:]}}, name="T2'")
    links = [ChainLink(_cubic()), ChainLink(_cubic(), SumSide(carried, F2))]
    return first, links
