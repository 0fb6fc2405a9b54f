"""
Divisor-class arithmetic on the two supported base surfaces.

Pic(P2) = Z with O(d)·O(d') = dd'; Pic(P1xP1) = Z^2 with
(a, b)·(a', b') = ab' + a'b. All arithmetic is exact over Q.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Tuple, Union

from hypersurf.core.error_handling import DomainError, StructuralError

Rational = Union[int, Fraction]


class SurfaceKind(str, Enum):
    """Supported base surfaces."""

    P2 = "P2"
    P1xP1 = "P1xP1"


@dataclass(frozen=True)
class BaseSurface:
    kind: SurfaceKind

    @property
    def picard_rank(self) -> int:
        return 1 if self.kind == SurfaceKind.P2 else 2

    def __str__(self) -> str:
        return self.kind.value


P2 = BaseSurface(SurfaceKind.P2)
P1XP1 = BaseSurface(SurfaceKind.P1xP1)


def base_surface(name: str) -> BaseSurface:
    """Resolve a base surface from its name ("P2" or "P1xP1")."""
    try:
        kind = SurfaceKind(name)
    except ValueError:
        raise StructuralError(f"Unknown base surface '{name}'") from None
    return P2 if kind == SurfaceKind.P2 else P1XP1


@dataclass(frozen=True)
class DivClass:
    """A rational vector in the Picard lattice of a base surface."""

    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def of(cls, *coeffs: Rational) -> "DivClass":
        return cls(tuple(coeffs))

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def _check_rank(self, other: "DivClass") -> None:
        if self.rank != other.rank:
            raise StructuralError(
                f"Class rank mismatch: {self.rank} vs {other.rank}"
            )

    def __add__(self, other: "DivClass") -> "DivClass":
        self._check_rank(other)
        return DivClass(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivClass") -> "DivClass":
        return self + (-other)

    def __neg__(self) -> "DivClass":
        return DivClass(tuple(-c for c in self.coeffs))

    def __mul__(self, scalar: Rational) -> "DivClass":
        return DivClass(tuple(c * Fraction(scalar) for c in self.coeffs))

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"


def zero_class(base: BaseSurface) -> DivClass:
    return DivClass((0,) * base.picard_rank)


def class_sum(base: BaseSurface, classes: Iterable[DivClass]) -> DivClass:
    total = zero_class(base)
    for c in classes:
        total = total + c
    return total


def _check(base: BaseSurface, *classes: DivClass) -> None:
    for c in classes:
        if c.rank != base.picard_rank:
            raise StructuralError(
                f"Class {c} has rank {c.rank}; {base} has Picard rank "
                f"{base.picard_rank}"
            )


def intersect(base: BaseSurface, c1: DivClass, c2: DivClass) -> Fraction:
    """
    Intersection pairing on the base.

    Args:
        base: Base surface
        c1: First class
        c2: Second class

    Returns:
        Exact rational intersection number

    Raises:
        StructuralError: If a class does not match the base rank
    """
    _check(base, c1, c2)
    if base.kind == SurfaceKind.P2:
        return c1.coeffs[0] * c2.coeffs[0]
    (a, b), (a2, b2) = c1.coeffs, c2.coeffs
    return a * b2 + a2 * b


def is_q_ample(base: BaseSurface, c: DivClass) -> bool:
    """Nakai on these bases: ample iff every coefficient is positive."""
    _check(base, c)
    return all(coeff > 0 for coeff in c.coeffs)


def canonical_class(base: BaseSurface) -> DivClass:
    if base.kind == SurfaceKind.P2:
        return DivClass.of(-3)
    return DivClass.of(-2, -2)


def riemann_roch_chi(base: BaseSurface, c: DivClass) -> Fraction:
    """
    Euler characteristic of the line bundle with class ``c``.

    Raises:
        DomainError: If the class is not integral
    """
    _check(base, c)
    if not c.is_integral:
        raise DomainError(f"Riemann-Roch needs an integral class, got {c}")
    if base.kind == SurfaceKind.P2:
        d = c.coeffs[0]
        return (d + 1) * (d + 2) / 2
    a, b = c.coeffs
    return (a + 1) * (b + 1)
