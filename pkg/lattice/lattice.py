from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

import sympy as sp

from lattice.errors import InconsistencyError, LatticeError, LatticeOverflowError

logger = logging.getLogger(__name__)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def checked(value, context="pairing"):
    """Abort instead of silently leaving the signed 64-bit range.

    Args:
        value (int): The integer to check.
        context (str): What was being computed, for the diagnostic.

    Returns:
        int: The value, unchanged.

    Examples:
        >>> checked(12)
        12
    """
    if INT64_MIN <= value <= INT64_MAX:
        return value
    raise LatticeOverflowError(
        f"\n{context} produced {value}, outside the signed 64-bit range."
    )


@lru_cache(maxsize=256)
def _determinant(gram):
    return int(sp.Matrix(gram).det())


@lru_cache(maxsize=256)
def _signature(gram):
    # A symmetric matrix has only real eigenvalues, so Descartes' rule of signs is exact
    # on its characteristic polynomial once zero is known not to be a root.
    x = sp.Symbol("x")
    coefficients = [int(c) for c in sp.Matrix(gram).charpoly(x).all_coeffs()]
    degree = len(coefficients) - 1
    mirrored = [c * (-1) ** (degree - k) for k, c in enumerate(coefficients)]
    return _sign_changes(coefficients), _sign_changes(mirrored)


def _sign_changes(coefficients):
    signs = [c > 0 for c in coefficients if c != 0]
    return sum(1 for left, right in zip(signs, signs[1:]) if left != right)


class IntersectionLattice:
    """An integral unimodular symmetric pairing with a named basis.

    Two lattices are equal when their names, Gram matrices and labels agree, so models built twice from the same
    parameters can exchange classes.

    Attributes:
        name (str): A readable name such as ``CP2#3``.
        gram (tuple): The Gram matrix as a tuple of integer tuples.
        basis_labels (tuple): One distinct label per basis vector.
        signature (tuple): ``(b_plus, b_minus)`` computed from the Gram matrix.
    """

    def __init__(self, name, gram, basis_labels, signature=None):
        self.name = name
        self.gram = tuple(tuple(int(entry) for entry in row) for row in gram)
        self.basis_labels = tuple(basis_labels)
        self.rank = len(self.gram)
        self.__test_shape()
        self.__test_labels()
        self.determinant = _determinant(self.gram)
        if self.determinant not in (1, -1):
            raise LatticeError(
                f"\n{name} has determinant {self.determinant}.\nAn intersection lattice must be unimodular."
            )
        computed = _signature(self.gram)
        if signature is not None and tuple(signature) != computed:
            raise LatticeError(
                f"\n{name} was declared with signature {tuple(signature)} but its Gram matrix has signature {computed}."
            )
        self.signature = computed
        self.__index = {label: position for position, label in enumerate(self.basis_labels)}
        self.__sparse_rows = tuple(
            tuple((column, entry) for column, entry in enumerate(row) if entry != 0)
            for row in self.gram
        )
        self.tail_start = self.__find_diagonal_tail()

    def __test_shape(self):
        if self.rank == 0:
            raise LatticeError(f"\n{self.name} has rank 0.")
        for row in self.gram:
            if len(row) != self.rank:
                raise LatticeError(f"\n{self.name} has a Gram matrix that is not square.")
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if self.gram[i][j] != self.gram[j][i]:
                    raise LatticeError(
                        f"\n{self.name} has a Gram matrix that is not symmetric at ({i}, {j})."
                    )

    def __test_labels(self):
        if len(self.basis_labels) != self.rank:
            raise LatticeError(
                f"\n{self.name} has {len(self.basis_labels)} labels for rank {self.rank}."
            )
        if len(set(self.basis_labels)) != self.rank:
            raise LatticeError(f"\n{self.name} has repeated basis labels: {self.basis_labels}.")

    def __find_diagonal_tail(self):
        start = self.rank
        while start > 0:
            index = start - 1
            if self.gram[index][index] != -1:
                break
            if any(self.gram[index][j] != 0 for j in range(self.rank) if j != index):
                break
            start = index
        return start

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, IntersectionLattice):
            return NotImplemented
        return (
            self.name == other.name
            and self.gram == other.gram
            and self.basis_labels == other.basis_labels
        )

    def __hash__(self):
        return hash((self.name, self.gram, self.basis_labels))

    def __repr__(self):
        return f"IntersectionLattice({self.name!r}, rank={self.rank}, signature={self.signature})"

    @property
    def b_plus(self):
        return self.signature[0]

    @property
    def b_minus(self):
        return self.signature[1]

    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def index(self, label):
        try:
            return self.__index[label]
        except KeyError:
            raise LatticeError(
                f"\n{label} is not a basis label of {self.name}.\nLabels are {', '.join(self.basis_labels)}."
            ) from None

    def pair_vectors(self, u, v):
        """Pair two raw coefficient vectors.

        Args:
            u (tuple): Coefficients of the first class.
            v (tuple): Coefficients of the second class.

        Returns:
            int: The value of u^T G v.
        """
        total = 0
        for i, row in enumerate(self.__sparse_rows):
            if u[i] == 0:
                continue
            total += u[i] * sum(entry * v[j] for j, entry in row)
        return checked(total, f"pairing in {self.name}")

    def dual(self, v):
        """The weights w with w . x == pair(v, x) for every coefficient vector x."""
        return tuple(sum(entry * v[j] for j, entry in row) for row in self.__sparse_rows)

    def element(self, coeffs):
        return HomologyClass(tuple(coeffs), self)

    def zero(self):
        return HomologyClass((0,) * self.rank, self)

    def basis(self, label):
        coeffs = [0] * self.rank
        coeffs[self.index(label)] = 1
        return HomologyClass(tuple(coeffs), self)

    def from_mapping(self, coefficients):
        """Build a class from a label to coefficient mapping.

        Examples:
            >>> cp2_2.from_mapping({"H": 1, "E1": -1, "E2": -1})
            H - E1 - E2
        """
        coeffs = [0] * self.rank
        for label, value in coefficients.items():
            coeffs[self.index(label)] = int(value)
        return HomologyClass(tuple(coeffs), self)

    def orthogonal_sum(self, other, name, labels=None):
        """The orthogonal sum of two lattices with the second lattice's basis appended."""
        gram = [list(row) + [0] * other.rank for row in self.gram]
        gram += [[0] * self.rank + list(row) for row in other.gram]
        return IntersectionLattice(
            name, gram, labels or self.basis_labels + other.basis_labels
        )

    @staticmethod
    def hyperbolic(first, second, name=None):
        return IntersectionLattice(name or "U", ((0, 1), (1, 0)), (first, second))

    @staticmethod
    def diagonal(labels, sign=-1, name=None):
        size = len(labels)
        gram = [[sign if i == j else 0 for j in range(size)] for i in range(size)]
        return IntersectionLattice(name or f"<{sign}>^{size}", gram, labels)


@dataclass(frozen=True)
class HomologyClass:
    """An integral class in an intersection lattice.

    Poincare duality is the identity on coefficient vectors; the pairing does all the work.
    """

    coeffs: tuple
    lattice: IntersectionLattice = field(compare=True, repr=False)

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise LatticeError(
                f"\nA class with {len(self.coeffs)} coefficients cannot live in {self.lattice.name} of rank {self.lattice.rank}."
            )
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in self.coeffs):
            raise LatticeError(f"\n{self.coeffs} must contain only integers.")

    def __same_lattice(self, other):
        if not isinstance(other, HomologyClass):
            raise LatticeError(f"\n{other!r} is not a homology class.")
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise LatticeError(
                f"\nCannot combine a class of {self.lattice.name} with a class of {other.lattice.name}."
            )

    def __add__(self, other):
        self.__same_lattice(other)
        return HomologyClass(
            tuple(checked(a + b, "addition") for a, b in zip(self.coeffs, other.coeffs)),
            self.lattice,
        )

    def __sub__(self, other):
        self.__same_lattice(other)
        return HomologyClass(
            tuple(checked(a - b, "subtraction") for a, b in zip(self.coeffs, other.coeffs)),
            self.lattice,
        )

    def __neg__(self):
        return HomologyClass(tuple(-a for a in self.coeffs), self.lattice)

    def __mul__(self, scalar):
        if not isinstance(scalar, int):
            return NotImplemented
        return HomologyClass(
            tuple(checked(scalar * a, "scaling") for a in self.coeffs), self.lattice
        )

    __rmul__ = __mul__

    def __getitem__(self, label):
        return self.coeffs[self.lattice.index(label)]

    def __str__(self):
        terms = []
        for label, value in zip(self.lattice.basis_labels, self.coeffs):
            if value == 0:
                continue
            magnitude = "" if abs(value) == 1 else str(abs(value))
            sign = "-" if value < 0 else "+"
            terms.append((sign, f"{magnitude}{label}"))
        if not terms:
            return "0"
        first_sign, first_term = terms[0]
        text = f"-{first_term}" if first_sign == "-" else first_term
        for sign, term in terms[1:]:
            text += f" {sign} {term}"
        return text

    def is_zero(self):
        return not any(self.coeffs)

    def pair(self, other):
        self.__same_lattice(other)
        return self.lattice.pair_vectors(self.coeffs, other.coeffs)

    def square(self):
        return self.lattice.pair_vectors(self.coeffs, self.coeffs)


def pair(a, b):
    """The intersection pairing of two classes of the same lattice.

    Args:
        a (HomologyClass): First class.
        b (HomologyClass): Second class.

    Returns:
        int: a^T G b.

    Examples:
        >>> pair(cp2_1.basis("H"), cp2_1.basis("H"))
        1
    """
    return a.pair(b)


def square(a):
    return a.square()


def adjunction_genus(K, A):
    """The genus the adjunction formula assigns to an embedded surface in class A.

    Args:
        K (HomologyClass): The canonical class.
        A (HomologyClass): The surface class.

    Returns:
        Fraction: (A.A + K.A) / 2 + 1; integral whenever K is characteristic.

    Examples:
        >>> adjunction_genus(K, 3 * H - sum_of_E)
        Fraction(1, 1)
    """
    return Fraction(square(A) + pair(K, A), 2) + 1


@dataclass(frozen=True)
class LightConeReport:
    hypotheses_hold: bool
    pairing: int
    report: tuple


def light_cone_check(alpha, beta, omega_ref):
    """Check the light cone lemma on two classes of a lattice of type (1, n).

    When alpha and beta both have nonnegative square and pair nonnegatively with omega_ref, their pairing is asserted to
    be nonnegative.

    Args:
        alpha (HomologyClass): The first class.
        beta (HomologyClass): The second class.
        omega_ref (HomologyClass): A class of positive square fixing the forward cone.

    Returns:
        LightConeReport: Whether the hypotheses held, the pairing, and one line per hypothesis.

    Examples:
        >>> light_cone_check(H - E1, H, 3 * H - E1).hypotheses_hold
        True
    """
    lattice = omega_ref.lattice
    if lattice.b_plus != 1:
        raise LatticeError(
            f"\n{lattice.name} has b+ = {lattice.b_plus}.\nThe light cone lemma needs b+ = 1."
        )
    omega_square = square(omega_ref)
    if omega_square <= 0:
        raise LatticeError(
            f"\nThe reference class {omega_ref} has square {omega_square}.\nIt must have positive square."
        )
    checks = (
        ("alpha.alpha >= 0", square(alpha), square(alpha) >= 0),
        ("beta.beta >= 0", square(beta), square(beta) >= 0),
        ("alpha.omega >= 0", pair(alpha, omega_ref), pair(alpha, omega_ref) >= 0),
        ("beta.omega >= 0", pair(beta, omega_ref), pair(beta, omega_ref) >= 0),
    )
    value = pair(alpha, beta)
    hold = all(passed for _, _, passed in checks)
    if hold and value < 0:
        raise InconsistencyError(
            f"\nThe light cone lemma failed for {alpha} and {beta} (pairing {value}).\nThis is an internal error."
        )
    return LightConeReport(hold, value, checks)


def _ceil_sqrt(value):
    root = isqrt(value)
    return root if root * root == value else root + 1


def random_cone_class(generator, n, coeff_bound, omega=None):
    """A random class of the diagonal lattice of type (1, n), every coefficient in [-coeff_bound, coeff_bound].

    The tail is drawn from the whole box and halved coordinate by coordinate only while the H-coefficient could not
    cover it. Without omega the class has positive square and a random sign. With omega (a coefficient tuple) it has
    nonnegative square and pairs nonnegatively with omega.

    Args:
        generator (random.Random): The seeded generator.
        n (int): Number of exceptional coordinates, at least 1.
        coeff_bound (int): Bound on every coefficient.
        omega (tuple): Coefficients of the reference class, or None to draw a reference class.

    Returns:
        tuple: The coefficients, H first.
    """
    limit = coeff_bound * coeff_bound - (1 if omega is None else 0)
    tail = [generator.randint(-coeff_bound, coeff_bound) for _ in range(n)]
    while sum(x * x for x in tail) > limit:
        index = generator.randrange(n)
        tail[index] = int(tail[index] / 2)
    norm = sum(x * x for x in tail)
    low = isqrt(norm) + 1 if omega is None else _ceil_sqrt(norm)
    coeffs = (generator.randint(low, coeff_bound),) + tuple(tail)
    if omega is None:
        flip = generator.random() < 0.5
    else:
        flip = coeffs[0] * omega[0] - sum(a * b for a, b in zip(coeffs[1:], omega[1:])) < 0
    return tuple(-c for c in coeffs) if flip else coeffs


def sample_light_cone(samples, max_blowups=10, coeff_bound=20, seed=20240101):
    """Check the light cone lemma on seeded random pairs in lattices of type (1, n).

    Each sample draws n, a reference class omega of positive square, then two classes satisfying the hypotheses against
    that omega, all with coefficients in [-coeff_bound, coeff_bound].

    Args:
        samples (int): Number of pairs.
        max_blowups (int): Largest n.
        coeff_bound (int): Bound on every coefficient.
        seed (int): Seed of the generator.

    Returns:
        int: The number of pairs checked; a failure raises InconsistencyError.
    """
    generator = random.Random(seed)
    lattices = {}
    for _ in range(samples):
        n = generator.randint(1, max_blowups)
        if n not in lattices:
            labels = ("H",) + tuple(f"E{i}" for i in range(1, n + 1))
            gram = [[1 if i == j == 0 else -1 if i == j else 0 for j in range(n + 1)] for i in range(n + 1)]
            lattices[n] = IntersectionLattice(f"CP2#{n}", gram, labels)
        lattice = lattices[n]
        omega = random_cone_class(generator, n, coeff_bound)
        alpha = lattice.element(random_cone_class(generator, n, coeff_bound, omega))
        beta = lattice.element(random_cone_class(generator, n, coeff_bound, omega))
        report = light_cone_check(alpha, beta, lattice.element(omega))
        if not report.hypotheses_hold:
            raise InconsistencyError(f"\nSampled {alpha} and {beta} outside the hypotheses for omega {omega}.")
    logger.info("Light cone lemma held on %s sampled pairs", samples)
    return samples
