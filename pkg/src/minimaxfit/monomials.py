"""Exponent vectors, graded monomial bases, and polynomial evaluation.

All types are immutable and all operations are pure; they work uniformly over
floats and exact rationals (``fractions.Fraction``), which is what makes the
exact certificate mode of the higher layers possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence, Union

Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class ExponentVector:
    """Exponents (e_1, ..., e_d) of a single monomial x^e."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if not self.exponents:
            raise ValueError("exponent vector needs at least one component")
        for e in self.exponents:
            if not isinstance(e, int) or e < 0:
                raise ValueError(f"exponents must be non-negative integers, got {self.exponents}")

    def degree(self) -> int:
        return sum(self.exponents)

    def value_at(self, point: Sequence[Number]) -> Number:
        """The monomial value x^e; x^0 == 1 even at x == 0."""
        if len(point) != len(self.exponents):
            raise ValueError(
                f"point has dimension {len(point)}, exponent vector has {len(self.exponents)}"
            )
        v: Number = 1
        for x, e in zip(point, self.exponents):
            if e:
                v = v * x**e
        return v

    def __len__(self) -> int:
        return len(self.exponents)


@dataclass(frozen=True)
class MonomialBasis:
    """All monomials of total degree <= `degree` in `dimension` variables.

    Ordering is graded lexicographic (total degree ascending, earlier
    coordinates dominating within a degree level), so the constant monomial
    comes first and the degree-(m-1) basis is a prefix of the degree-m basis.
    """

    dimension: int
    degree: int
    exponents: tuple[ExponentVector, ...]

    @property
    def size(self) -> int:
        return len(self.exponents)

    @property
    def nonconstant_count(self) -> int:
        return len(self.exponents) - 1

    def truncated(self, degree: int) -> "MonomialBasis":
        """The prefix basis of the given lower degree."""
        if degree < 0 or degree > self.degree:
            raise ValueError(f"cannot truncate degree-{self.degree} basis to degree {degree}")
        k = math.comb(self.dimension + degree, self.dimension)
        return MonomialBasis(self.dimension, degree, self.exponents[:k])

    def index_of(self, exponents: Sequence[int]) -> int:
        return self.exponents.index(ExponentVector(tuple(exponents)))


def build_basis(dimension: int, degree: int) -> MonomialBasis:
    """Graded-lexicographic basis of all monomials with total degree <= degree."""
    if dimension < 1:
        raise ValueError("dimension must be a positive integer")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    exps = [e for e in product(range(degree + 1), repeat=dimension) if sum(e) <= degree]
    exps.sort(key=lambda e: (sum(e), tuple(-c for c in e)))
    return MonomialBasis(dimension, degree, tuple(ExponentVector(e) for e in exps))


def lift(point: Sequence[Number], basis: MonomialBasis) -> list[Number]:
    """The vector of all basis monomial values at `point`, constant first."""
    if len(point) != basis.dimension:
        raise ValueError(f"point has dimension {len(point)}, basis expects {basis.dimension}")
    return [e.value_at(point) for e in basis.exponents]


@dataclass(frozen=True)
class PolynomialModel:
    """Coefficient vector over a monomial basis, constant coefficient first."""

    basis: MonomialBasis
    coefficients: tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if len(self.coefficients) != self.basis.size:
            raise ValueError(
                f"{len(self.coefficients)} coefficients for a basis of size {self.basis.size}"
            )

    @property
    def degree(self) -> int:
        return self.basis.degree

    def __call__(self, point: Sequence[Number]) -> Number:
        return evaluate(self, point)


def evaluate(model: PolynomialModel, point: Sequence[Number]) -> Number:
    """Polynomial value: inner product of the coefficients with lift(point)."""
    lifted = lift(point, model.basis)
    return sum(c * g for c, g in zip(model.coefficients, lifted))


def zero_model(basis: MonomialBasis) -> PolynomialModel:
    return PolynomialModel(basis, (0,) * basis.size)


WeightTriple = tuple[Number, Number, Number]  # (convex weight, factor, scalar value)


def shift_monomial_weights(
    weights_left: Sequence[WeightTriple],
    weights_right: Sequence[WeightTriple],
    delta: Number,
    tol: float = 1e-9,
) -> tuple[Number, Number]:
    """Both sides of the shifted weighted sum identity.

    Given triples (w_i, a_i, x_i) on the left and (v_i, b_i, y_i) on the right
    with matching weighted masses sum(w a) == sum(v b) and weighted moments
    sum(w a x) == sum(v b y), returns the two sides of

        sum_i w_i a_i (x_i - delta)  and  sum_i v_i b_i (y_i - delta),

    which agree for every scalar delta.  Hypotheses violated beyond `tol`
    (scaled) raise ValueError; pass tol=0 for exact rational inputs.
    """
    mass_l = sum(w * a for w, a, _ in weights_left)
    mass_r = sum(v * b for v, b, _ in weights_right)
    mom_l = sum(w * a * x for w, a, x in weights_left)
    mom_r = sum(v * b * y for v, b, y in weights_right)
    scale = max(1.0, *(abs(float(s)) for s in (mass_l, mass_r, mom_l, mom_r)))
    if abs(mass_l - mass_r) > tol * scale:
        raise ValueError(f"weighted masses differ: {mass_l} vs {mass_r}")
    if abs(mom_l - mom_r) > tol * scale:
        raise ValueError(f"weighted moments differ: {mom_l} vs {mom_r}")
    left = sum(w * a * (x - delta) for w, a, x in weights_left)
    right = sum(v * b * (y - delta) for v, b, y in weights_right)
    return left, right
