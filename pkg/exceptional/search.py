"""Exhaustive search for integral classes in a coefficient box.

A lattice is split into a head block, enumerated exhaustively, and a diagonal tail of square -1 classes, explored by a
depth-first search in which every constraint is bounded over the coordinates still free. Tail coordinates that no
constraint can tell apart are enumerated once as a nonincreasing sequence and expanded into their permutations at the
end. The leading head coordinate partitions the box across worker processes; results are merged and sorted, so the
output never depends on the worker count.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import partial
from itertools import product
from math import isqrt
from multiprocessing import Pool

from sympy.utilities.iterables import multiset_permutations

from lattice.errors import SearchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Linear:
    """The constraint lo <= w . x <= hi on a coefficient vector x."""

    weights: tuple
    lo: int | None = None
    hi: int | None = None
    label: str = ""


@dataclass(frozen=True)
class Quadratic:
    """The constraint lo <= alpha * (x . x) + w . x <= hi, with x . x taken in the lattice."""

    alpha: int
    weights: tuple
    lo: int | None = None
    hi: int | None = None
    label: str = ""


@dataclass(frozen=True)
class BoxProblem:
    gram: tuple
    tail_start: int
    head_bound: int
    tail_bound: int
    linear: tuple = ()
    quadratic: tuple = ()

    @property
    def rank(self):
        return len(self.gram)


def pairing_constraint(lattice, vector, lo=None, hi=None, label=""):
    """A linear constraint on the pairing of the unknown class with a fixed class."""
    return Linear(tuple(lattice.dual(vector.coeffs)), lo, hi, label)


def square_constraint(lattice, lo=None, hi=None, label="square"):
    return Quadratic(1, (0,) * lattice.rank, lo, hi, label)


def genus_constraint(lattice, K, genus=0, label="genus"):
    """A.A + K.A = 2 genus - 2."""
    value = 2 * genus - 2
    return Quadratic(1, tuple(lattice.dual(K.coeffs)), value, value, label)


def box_problem(lattice, head_bound, tail_bound, linear=(), quadratic=()):
    if head_bound < 1 or tail_bound < 1:
        raise SearchError(
            f"\nSearch bounds must be positive, got head {head_bound} and tail {tail_bound}."
        )
    return BoxProblem(
        lattice.gram, lattice.tail_start, head_bound, tail_bound, tuple(linear), tuple(quadratic)
    )


def _within(value, lo, hi):
    return (lo is None or value >= lo) and (hi is None or value <= hi)


def _reachable(partial_value, rest_min, rest_max, lo, hi):
    if lo is not None and partial_value + rest_max < lo:
        return False
    if hi is not None and partial_value + rest_min > hi:
        return False
    return True


class _TailSearch:
    """Depth-first search over the diagonal tail for one fixed head assignment."""

    def __init__(self, problem):
        self.problem = problem
        self.tail = list(range(problem.tail_start, problem.rank))
        self.bound = problem.tail_bound
        signatures = {}
        for index in self.tail:
            key = tuple(c.weights[index] for c in problem.linear) + tuple(
                q.weights[index] for q in problem.quadratic
            )
            signatures.setdefault(key, []).append(index)
        self.groups = list(signatures.values())
        self.order = [index for group in self.groups for index in group]
        self.group_start = []
        for group in self.groups:
            self.group_start += [True] + [False] * (len(group) - 1)
        self.budget_quadratics = [
            position
            for position, q in enumerate(problem.quadratic)
            if q.alpha > 0 and q.lo is not None and not any(q.weights[i] for i in self.tail)
        ]
        size = len(self.order) + 1
        self.linear_abs = [[0] * size for _ in problem.linear]
        self.linear_sq = [[0] * size for _ in problem.linear]
        self.quad_min = [[0] * size for _ in problem.quadratic]
        self.quad_max = [[0] * size for _ in problem.quadratic]
        values = range(-self.bound, self.bound + 1)
        for position in range(len(self.order) - 1, -1, -1):
            index = self.order[position]
            for k, c in enumerate(problem.linear):
                w = c.weights[index]
                self.linear_abs[k][position] = self.linear_abs[k][position + 1] + abs(w) * self.bound
                self.linear_sq[k][position] = self.linear_sq[k][position + 1] + w * w
            for k, q in enumerate(problem.quadratic):
                contributions = [-q.alpha * x * x + q.weights[index] * x for x in values]
                self.quad_min[k][position] = self.quad_min[k][position + 1] + min(contributions)
                self.quad_max[k][position] = self.quad_max[k][position + 1] + max(contributions)

    def run(self, head):
        problem = self.problem
        head_size = problem.tail_start
        head_square = 0
        for i in range(head_size):
            if head[i]:
                head_square += head[i] * sum(problem.gram[i][j] * head[j] for j in range(head_size))
        linear = [sum(c.weights[i] * head[i] for i in range(head_size)) for c in problem.linear]
        quadratic = [
            q.alpha * head_square + sum(q.weights[i] * head[i] for i in range(head_size))
            for q in problem.quadratic
        ]
        values = [0] * len(self.order)
        found = []
        self.__descend(0, values, linear, quadratic, None, found)
        return [(tuple(head), found_values) for found_values in found]

    def __budget(self, quadratic):
        budget = None
        for k in self.budget_quadratics:
            q = self.problem.quadratic[k]
            room = (quadratic[k] - q.lo) // q.alpha
            budget = room if budget is None else min(budget, room)
        return budget

    def __feasible(self, position, linear, quadratic, budget):
        problem = self.problem
        for k, c in enumerate(problem.linear):
            reach = self.linear_abs[k][position]
            if budget is not None:
                reach = min(reach, isqrt(budget * self.linear_sq[k][position]))
            if not _reachable(linear[k], -reach, reach, c.lo, c.hi):
                return False
        for k, q in enumerate(problem.quadratic):
            if not _reachable(
                quadratic[k], self.quad_min[k][position], self.quad_max[k][position], q.lo, q.hi
            ):
                return False
        return True

    def __descend(self, position, values, linear, quadratic, cap, found):
        budget = self.__budget(quadratic)
        if budget is not None and budget < 0:
            return
        if not self.__feasible(position, linear, quadratic, budget):
            return
        if position == len(self.order):
            if all(_within(linear[k], c.lo, c.hi) for k, c in enumerate(self.problem.linear)) and all(
                _within(quadratic[k], q.lo, q.hi) for k, q in enumerate(self.problem.quadratic)
            ):
                found.append(tuple(values))
            return
        index = self.order[position]
        limit = self.bound if budget is None else min(self.bound, isqrt(budget))
        top = limit if self.group_start[position] or cap is None else min(limit, cap)
        for x in range(-limit, top + 1):
            values[position] = x
            next_linear = [linear[k] + c.weights[index] * x for k, c in enumerate(self.problem.linear)]
            next_quadratic = [
                quadratic[k] - q.alpha * x * x + q.weights[index] * x
                for k, q in enumerate(self.problem.quadratic)
            ]
            next_cap = x if position + 1 < len(self.order) and not self.group_start[position + 1] else None
            self.__descend(position + 1, values, next_linear, next_quadratic, next_cap, found)
        values[position] = 0

    def expand(self, head, values):
        """Every coefficient vector in the symmetry orbit of one representative."""
        per_group = []
        offset = 0
        for group in self.groups:
            chunk = values[offset : offset + len(group)]
            offset += len(group)
            per_group.append(list(multiset_permutations(list(chunk))))
        for arrangement in product(*per_group):
            vector = list(head) + [0] * len(self.tail)
            for group, chosen in zip(self.groups, arrangement):
                for index, value in zip(group, chosen):
                    vector[index] = value
            yield tuple(vector)

    def smallest(self, head, values):
        """The lexicographically smallest vector in the orbit of one representative."""
        vector = list(head) + [0] * len(self.tail)
        offset = 0
        for group in self.groups:
            chunk = sorted(values[offset : offset + len(group)])
            offset += len(group)
            for index, value in zip(group, chunk):
                vector[index] = value
        return tuple(vector)


def _heads(problem, leading):
    head_size = problem.tail_start
    if head_size == 0:
        return [()]
    others = range(-problem.head_bound, problem.head_bound + 1)
    return [(leading,) + rest for rest in product(others, repeat=head_size - 1)]


def _solve_partition(problem, first_only, leading):
    searcher = _TailSearch(problem)
    results = []
    best = None
    for head in _heads(problem, leading):
        for head_, values in searcher.run(head):
            if first_only:
                candidate = searcher.smallest(head_, values)
                if best is None or candidate < best:
                    best = candidate
            else:
                results.extend(searcher.expand(head_, values))
    if first_only:
        return [best] if best is not None else []
    return results


def search(problem, jobs=1, first_only=False):
    """Enumerate every vector of the box satisfying all constraints.

    Args:
        problem (BoxProblem): The box and its constraints.
        jobs (int): Worker processes; 1 searches in-process.
        first_only (bool): Return only the lexicographically smallest solution.

    Returns:
        list: Sorted coefficient tuples, or a list holding at most one tuple when first_only is set.

    Examples:
        >>> search(box_problem(cp2_3, 6, 7, [k_equals_minus_one], [square_is_minus_one]))[:2]
        [(0, 0, 0, 1), (0, 0, 1, 0)]
    """
    if jobs < 1:
        raise SearchError(f"\nWorker count must be positive, got {jobs}.")
    if problem.tail_start == 0:
        partitions = [None]
    else:
        partitions = list(range(-problem.head_bound, problem.head_bound + 1))
    worker = partial(_solve_partition, problem, first_only)
    if jobs == 1 or len(partitions) == 1:
        chunks = [worker(leading) for leading in partitions]
    else:
        logger.info("Searching %s partitions on %s workers", len(partitions), jobs)
        with Pool(min(jobs, len(partitions))) as pool:
            chunks = pool.map(worker, partitions)
    merged = sorted({vector for chunk in chunks for vector in chunk})
    if first_only:
        return merged[:1]
    return merged
