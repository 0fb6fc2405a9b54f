"""
Exact incidence geometry of the built-in curve families.

Curve parameters live in Q(i) together with a point at infinity and are
manipulated as elements of sympy's ``QQ_I`` domain. On P1xP1 the coordinates
are ([x:y], [w:z]) with affine parameters X = x/y and W = w/z; on P2 they are
[x:y:z]. Every incidence is computed symbolically; intersections that need
an extension of Q(i) are rejected.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import sympy
from sympy import QQ_I, Poly

from hypersurf.core.error_handling import (
    DomainError,
    SpecValidationError,
    UnsupportedGeometryError,
)
from hypersurf.services.lattice import DivClass, SurfaceKind

logger = logging.getLogger(__name__)

_T = sympy.Symbol("t")


class _Infinity:
    """The point at infinity of P1."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "inf"


INF = _Infinity()

Param = Union[object, _Infinity]
Point = Tuple[object, ...]

INFINITY_NAMES = {"inf", "oo", "infinity"}

# Optional rational real part, then an optional signed rational multiple of i.
_GAUSSIAN = re.compile(
    r"(?P<re>[+-]?\d+(?:/\d+)?(?=[+-]|$))?"
    r"(?:(?P<sign>[+-])?(?P<im>\d+(?:/\d+)?)?\*?i)?"
)


def gaussian(value: Union[int, Fraction]) -> object:
    """Embed a rational into QQ_I."""
    value = Fraction(value)
    return QQ_I.from_sympy(sympy.Rational(value.numerator, value.denominator))


def to_param(value) -> Param:
    """
    Parse a parameter: an integer, a rational string, a Gaussian rational
    written with ``i`` (``"1/2 - 3*i"``) or ``inf``.

    Raises:
        DomainError: If the value is not in Q(i) or the point at infinity
    """
    if value is INF:
        return INF
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return gaussian(value)
    if isinstance(value, str) and value.strip().lower() in INFINITY_NAMES:
        return INF
    if not isinstance(value, str):
        try:
            if value.parent() == QQ_I:
                return value
        except AttributeError:
            pass
        raise DomainError(f"Unsupported parameter {value!r}")
    text = "".join(value.split())
    match = _GAUSSIAN.fullmatch(text)
    if not text or match is None:
        raise DomainError(f"Parameter '{value}' is not in Q(i)")
    real, sign, imag = match.group("re", "sign", "im")
    try:
        real = Fraction(real) if real else Fraction(0)
        imag = Fraction(imag) if imag else Fraction(int(text.endswith("i")))
    except ZeroDivisionError as e:
        raise DomainError(f"Parameter '{value}' has a zero denominator") from e
    if sign == "-":
        imag = -imag
    return QQ_I.from_sympy(
        sympy.Rational(real.numerator, real.denominator)
        + sympy.Rational(imag.numerator, imag.denominator) * sympy.I
    )


def _rational(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def param_parts(p: Param) -> Tuple[Fraction, Fraction]:
    """Real and imaginary parts of a finite parameter."""
    return _rational(p.x), _rational(p.y)


def format_param(p: Param) -> str:
    if p is INF:
        return "inf"
    real, im = param_parts(p)
    if not im:
        return str(real)
    if im == 1:
        imag = "i"
    elif im == -1:
        imag = "-i"
    else:
        imag = f"{im}*i"
    if not real:
        return imag
    sign = "" if imag.startswith("-") else "+"
    return f"{real}{sign}{imag}"


def _homog(p: Param) -> Tuple[object, object]:
    if p is INF:
        return QQ_I.one, QQ_I.zero
    return p, QQ_I.one


def _dehomog(x, y) -> Param:
    if not y:
        if not x:
            raise UnsupportedGeometryError("degenerate point [0:0]")
        return INF
    return x / y


def format_point(point: Point) -> str:
    if len(point) == 2:
        return f"({format_param(point[0])}, {format_param(point[1])})"
    return "[" + ":".join(format_param(c) for c in point) + "]"


class GeomKind(str, Enum):
    """Built-in curve geometries."""

    FIBER_H = "FIBER_H"
    FIBER_V = "FIBER_V"
    LINE_TANGENT = "LINE_TANGENT"
    DIAGONAL = "DIAGONAL"
    CONIC = "CONIC"
    CUBOID_CI = "CUBOID_CI"


P2_KINDS = {GeomKind.LINE_TANGENT, GeomKind.CONIC}
BILINEAR_KINDS = {GeomKind.DIAGONAL, GeomKind.CUBOID_CI}

# xw, xz, yw, yz coefficients of C_0..C_3
CUBOID_FORMS = {
    0: (0, 1, 1, 0),
    1: (0, -1, 1, 0),
    2: (-1, 0, 0, 1),
    3: (1, 0, 0, 1),
}


@dataclass(frozen=True)
class CurveFamily:
    """
    A concrete member of a built-in family.

    FIBER_H(p) is x/y = p, FIBER_V(p) is w/z = p, DIAGONAL(c, slope s) is
    x/y = s w/z + c, CUBOID_CI(i) is C_i, LINE_TANGENT(p) is the tangent line
    p^2 x + p y + z to the conic y^2 = 4xz (x = 0 for p = inf).
    """

    geom: GeomKind
    param: Optional[Param] = None
    slope: Optional[Param] = None

    def __post_init__(self):
        kind = self.geom
        if kind == GeomKind.CONIC:
            if self.param is not None or self.slope is not None:
                raise SpecValidationError("CONIC takes no parameters")
            return
        if self.param is None:
            raise SpecValidationError(f"{kind.value} needs a parameter")
        if kind == GeomKind.DIAGONAL:
            slope = self.slope if self.slope is not None else QQ_I.one
            if self.param is INF or slope is INF or not slope:
                raise UnsupportedGeometryError(
                    "DIAGONAL needs a finite offset and a finite nonzero slope"
                )
            object.__setattr__(self, "slope", slope)
        elif self.slope is not None:
            raise SpecValidationError(f"{kind.value} takes no slope")
        if kind == GeomKind.CUBOID_CI and self.cuboid_index is None:
            raise SpecValidationError("CUBOID_CI index must be 0, 1, 2 or 3")

    @property
    def surface(self) -> SurfaceKind:
        return SurfaceKind.P2 if self.geom in P2_KINDS else SurfaceKind.P1xP1

    @property
    def cuboid_index(self) -> Optional[int]:
        if self.param is INF:
            return None
        real, im = param_parts(self.param)
        if im or real.denominator != 1 or real not in range(4):
            return None
        return int(real)

    @property
    def cls(self) -> DivClass:
        if self.geom == GeomKind.FIBER_H:
            return DivClass.of(1, 0)
        if self.geom == GeomKind.FIBER_V:
            return DivClass.of(0, 1)
        if self.geom in BILINEAR_KINDS:
            return DivClass.of(1, 1)
        if self.geom == GeomKind.LINE_TANGENT:
            return DivClass.of(1)
        return DivClass.of(2)

    def describe(self) -> str:
        if self.geom == GeomKind.CONIC:
            return "CONIC"
        if self.geom == GeomKind.DIAGONAL and self.slope != QQ_I.one:
            return (
                f"DIAGONAL({format_param(self.param)}, "
                f"slope={format_param(self.slope)})"
            )
        return f"{self.geom.value}({format_param(self.param)})"

    def to_dict(self) -> Dict[str, str]:
        data = {"geom": self.geom.value}
        if self.param is not None:
            data["param"] = format_param(self.param)
        if self.geom == GeomKind.DIAGONAL and self.slope != QQ_I.one:
            data["slope"] = format_param(self.slope)
        return data

    def __str__(self) -> str:
        return self.describe()


def fiber_h(p) -> CurveFamily:
    return CurveFamily(GeomKind.FIBER_H, to_param(p))


def fiber_v(p) -> CurveFamily:
    return CurveFamily(GeomKind.FIBER_V, to_param(p))


def diagonal(c, slope=1) -> CurveFamily:
    return CurveFamily(GeomKind.DIAGONAL, to_param(c), to_param(slope))


def cuboid_curve(i: int) -> CurveFamily:
    return CurveFamily(GeomKind.CUBOID_CI, to_param(i))


def tangent_line(p) -> CurveFamily:
    return CurveFamily(GeomKind.LINE_TANGENT, to_param(p))


def conic() -> CurveFamily:
    return CurveFamily(GeomKind.CONIC)


@dataclass(frozen=True)
class Incidence:
    point: Point
    tangency: int


def bilinear_form(curve: CurveFamily) -> Tuple[object, object, object, object]:
    """Coefficients (A, B, C, D) of A xw + B xz + C yw + D yz."""
    if curve.geom == GeomKind.CUBOID_CI:
        return tuple(gaussian(c) for c in CUBOID_FORMS[curve.cuboid_index])
    if curve.geom == GeomKind.DIAGONAL:
        # xz - s yw - c yz
        return QQ_I.zero, QQ_I.one, -curve.slope, -curve.param
    raise UnsupportedGeometryError(f"{curve} is not a (1,1) curve")


def _line_coefficients(curve: CurveFamily) -> Tuple[object, object, object]:
    p = curve.param
    if p is INF:
        return QQ_I.one, QQ_I.zero, QQ_I.zero
    return p * p, p, QQ_I.one


def _tangency_point(curve: CurveFamily) -> Point:
    p = curve.param
    if p is INF:
        return QQ_I.zero, QQ_I.zero, QQ_I.one
    return _normalize((QQ_I.one, -p - p, p * p))


def _normalize(coords: Tuple[object, ...]) -> Point:
    for c in coords:
        if c:
            return tuple(x / c for x in coords)
    raise UnsupportedGeometryError("degenerate point [0:0:0]")


def same_curve(c1: CurveFamily, c2: CurveFamily) -> bool:
    """Equality of the underlying curves, not just of the descriptors."""
    if c1 == c2:
        return True
    if c1.geom in BILINEAR_KINDS and c2.geom in BILINEAR_KINDS:
        f1, f2 = bilinear_form(c1), bilinear_form(c2)
        return all(
            not (f1[i] * f2[j] - f1[j] * f2[i]) for i in range(4) for j in range(4)
        )
    return False


def binary_quadratic_roots(a, b, c) -> List[Tuple[Param, int]]:
    """Roots in P1 of the binary form a x^2 + b xy + c y^2, with multiplicity."""
    if not a and not b and not c:
        raise UnsupportedGeometryError("curves share a component")
    if not a:
        if not b:
            return [(INF, 2)]
        return [(INF, 1), (-c / b, 1)]
    if not (b * b - QQ_I(4) * a * c):
        return [(-b / (QQ_I(2) * a), 2)]

    poly = Poly(
        QQ_I.to_sympy(a) * _T**2 + QQ_I.to_sympy(b) * _T + QQ_I.to_sympy(c),
        _T,
        domain=QQ_I,
    )
    roots = []
    for factor, multiplicity in poly.factor_list()[1]:
        if factor.degree() != 1:
            raise UnsupportedGeometryError(
                f"intersection points of {poly.as_expr()} are not defined over Q(i)"
            )
        lead, const = (QQ_I.from_sympy(coef) for coef in factor.all_coeffs())
        roots.append((-const / lead, multiplicity))
    return roots


def _fiber_meets_bilinear(fiber: CurveFamily, other: CurveFamily) -> Incidence:
    A, B, C, D = bilinear_form(other)
    if fiber.geom == GeomKind.FIBER_H:
        x, y = _homog(fiber.param)
        cw, cz = A * x + C * y, B * x + D * y
        if not cw and not cz:
            raise UnsupportedGeometryError(f"{other} contains {fiber}")
        return Incidence((fiber.param, _dehomog(-cz, cw)), 1)
    w, z = _homog(fiber.param)
    cx, cy = A * w + B * z, C * w + D * z
    if not cx and not cy:
        raise UnsupportedGeometryError(f"{other} contains {fiber}")
    return Incidence((_dehomog(-cy, cx), fiber.param), 1)


def _bilinear_meets_bilinear(c1: CurveFamily, c2: CurveFamily) -> List[Incidence]:
    A1, B1, C1, D1 = bilinear_form(c1)
    A2, B2, C2, D2 = bilinear_form(c2)
    # [x:y] where the two induced forms in (w, z) are proportional
    qa = A1 * B2 - B1 * A2
    qb = A1 * D2 + C1 * B2 - B1 * C2 - D1 * A2
    qc = C1 * D2 - D1 * C2
    incidences = []
    for X, multiplicity in binary_quadratic_roots(qa, qb, qc):
        x, y = _homog(X)
        cw, cz = A1 * x + C1 * y, B1 * x + D1 * y
        if not cw and not cz:
            cw, cz = A2 * x + C2 * y, B2 * x + D2 * y
        incidences.append(Incidence((X, _dehomog(-cz, cw)), multiplicity))
    return incidences


def _p1p1_intersections(c1: CurveFamily, c2: CurveFamily) -> List[Incidence]:
    kinds = (c1.geom, c2.geom)
    if kinds in (
        (GeomKind.FIBER_H, GeomKind.FIBER_H),
        (GeomKind.FIBER_V, GeomKind.FIBER_V),
    ):
        return []
    if kinds == (GeomKind.FIBER_H, GeomKind.FIBER_V):
        return [Incidence((c1.param, c2.param), 1)]
    if kinds == (GeomKind.FIBER_V, GeomKind.FIBER_H):
        return [Incidence((c2.param, c1.param), 1)]
    if c2.geom in BILINEAR_KINDS and c1.geom not in BILINEAR_KINDS:
        return [_fiber_meets_bilinear(c1, c2)]
    if c1.geom in BILINEAR_KINDS and c2.geom not in BILINEAR_KINDS:
        return [_fiber_meets_bilinear(c2, c1)]
    return _bilinear_meets_bilinear(c1, c2)


def _p2_intersections(c1: CurveFamily, c2: CurveFamily) -> List[Incidence]:
    if c1.geom == GeomKind.CONIC and c2.geom == GeomKind.CONIC:
        raise UnsupportedGeometryError("only one conic is supported")
    if c1.geom == GeomKind.CONIC or c2.geom == GeomKind.CONIC:
        line = c2 if c1.geom == GeomKind.CONIC else c1
        return [Incidence(_tangency_point(line), 2)]
    a1, b1, e1 = _line_coefficients(c1)
    a2, b2, e2 = _line_coefficients(c2)
    cross = (b1 * e2 - e1 * b2, e1 * a2 - a1 * e2, a1 * b2 - b1 * a2)
    return [Incidence(_normalize(cross), 1)]


def intersections(c1: CurveFamily, c2: CurveFamily) -> List[Incidence]:
    """
    Intersection points of two distinct curves with their local multiplicity.

    Raises:
        UnsupportedGeometryError: If the curves live on different surfaces,
            share a component, or meet outside Q(i)
    """
    if c1.surface != c2.surface:
        raise UnsupportedGeometryError(f"{c1} and {c2} live on different bases")
    if same_curve(c1, c2):
        raise UnsupportedGeometryError(f"{c1} and {c2} are the same curve")
    if c1.surface == SurfaceKind.P2:
        return _p2_intersections(c1, c2)
    return _p1p1_intersections(c1, c2)


def contains_point(curve: CurveFamily, point: Point) -> bool:
    """Whether ``point`` lies on ``curve``."""
    if curve.surface == SurfaceKind.P2:
        if len(point) != 3:
            return False
        x, y, z = point
        if curve.geom == GeomKind.CONIC:
            return not (y * y - QQ_I(4) * x * z)
        a, b, c = _line_coefficients(curve)
        return not (a * x + b * y + c * z)
    if len(point) != 2:
        return False
    if curve.geom == GeomKind.FIBER_H:
        return _param_equal(point[0], curve.param)
    if curve.geom == GeomKind.FIBER_V:
        return _param_equal(point[1], curve.param)
    A, B, C, D = bilinear_form(curve)
    x, y = _homog(point[0])
    w, z = _homog(point[1])
    return not (A * x * w + B * x * z + C * y * w + D * y * z)


def _param_equal(p: Param, q: Param) -> bool:
    if p is INF or q is INF:
        return p is q
    return p == q
