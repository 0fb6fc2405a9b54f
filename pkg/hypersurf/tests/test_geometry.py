"""
Unit tests for exact incidence geometry.

Tests:
- Parameter parsing over Q(i)
- Curve family validation and classes
- Pairwise intersections on P1xP1 and P2
"""

from fractions import Fraction

import pytest

from hypersurf.core.error_handling import (
    DomainError,
    SpecValidationError,
    UnsupportedGeometryError,
)
from hypersurf.services.geometry import (
    INF,
    CurveFamily,
    GeomKind,
    binary_quadratic_roots,
    conic,
    contains_point,
    cuboid_curve,
    diagonal,
    fiber_h,
    fiber_v,
    format_param,
    format_point,
    gaussian,
    intersections,
    param_parts,
    same_curve,
    tangent_line,
    to_param,
)
from hypersurf.services.lattice import DivClass


class TestParameters:
    """Tests for parsing and printing parameters."""

    @pytest.mark.parametrize("text", ["inf", "oo", "Infinity"])
    def test_infinity_names(self, text):
        assert to_param(text) is INF

    def test_gaussian_rational(self):
        p = to_param("1/2 - 3*i")
        assert param_parts(p) == (Fraction(1, 2), -3)
        assert format_param(p) == "1/2-3*i"

    @pytest.mark.parametrize(
        "value,expected", [(2, "2"), ("i", "i"), ("-i", "-i"), ("inf", "inf")]
    )
    def test_round_trip_display(self, value, expected):
        assert format_param(to_param(value)) == expected

    def test_integers_and_strings_agree(self):
        assert to_param(3) == to_param("3")

    @pytest.mark.parametrize(
        "value", ["sqrt(2)", "x", "2**(1/3)", 1.5, "0.1", "1e3", "", "1/0", "i*i"]
    )
    def test_outside_q_i_raises(self, value):
        with pytest.raises(DomainError):
            to_param(value)

    @pytest.mark.parametrize(
        "text,parts",
        [
            ("3*i", (0, 3)),
            ("-2/3i", (0, Fraction(-2, 3))),
            ("+1/3", (Fraction(1, 3), 0)),
            ("-4 + i", (-4, 1)),
            ("5-7/2*i", (5, Fraction(-7, 2))),
        ],
    )
    def test_written_forms(self, text, parts):
        assert param_parts(to_param(text)) == parts


class TestCurveFamily:
    """Tests for curve validation and divisor classes."""

    def test_classes(self):
        assert fiber_h(0).cls == DivClass.of(1, 0)
        assert fiber_v(0).cls == DivClass.of(0, 1)
        assert diagonal(1).cls == DivClass.of(1, 1)
        assert cuboid_curve(2).cls == DivClass.of(1, 1)
        assert tangent_line(3).cls == DivClass.of(1)
        assert conic().cls == DivClass.of(2)

    def test_conic_takes_no_parameter(self):
        with pytest.raises(SpecValidationError):
            CurveFamily(GeomKind.CONIC, to_param(1))

    def test_fiber_needs_parameter(self):
        with pytest.raises(SpecValidationError):
            CurveFamily(GeomKind.FIBER_H)

    def test_fiber_takes_no_slope(self):
        with pytest.raises(SpecValidationError):
            CurveFamily(GeomKind.FIBER_H, to_param(0), to_param(2))

    def test_diagonal_needs_finite_nonzero_slope(self):
        with pytest.raises(UnsupportedGeometryError):
            diagonal(0, 0)
        with pytest.raises(UnsupportedGeometryError):
            diagonal("inf")

    def test_cuboid_index_range(self):
        with pytest.raises(SpecValidationError):
            cuboid_curve(4)

    def test_descriptions(self):
        assert str(fiber_h("-i")) == "FIBER_H(-i)"
        assert str(diagonal(0, -1)) == "DIAGONAL(0, slope=-1)"
        assert diagonal(2).to_dict() == {"geom": "DIAGONAL", "param": "2"}
        assert conic().to_dict() == {"geom": "CONIC"}

    def test_same_curve_uses_equations(self):
        """Proportional forms describe one curve."""
        assert same_curve(diagonal(0), diagonal(0, 1))
        assert not same_curve(diagonal(0), diagonal(0, -1))
        assert not same_curve(cuboid_curve(0), cuboid_curve(1))


class TestIntersections:
    """Tests for exact pairwise intersections."""

    def test_parallel_fibers_are_disjoint(self):
        assert intersections(fiber_h(0), fiber_h(1)) == []

    def test_fibers_meet_once(self):
        (inc,) = intersections(fiber_h(0), fiber_v("inf"))
        assert inc.point == (to_param(0), INF)
        assert inc.tangency == 1
        assert format_point(inc.point) == "(0, inf)"

    def test_diagonal_and_antidiagonal(self):
        """x = w and x = -w meet at (0, 0) and (inf, inf)."""
        incs = intersections(diagonal(0), diagonal(0, -1))
        points = {format_point(inc.point) for inc in incs}
        assert points == {"(0, 0)", "(inf, inf)"}

    def test_parallel_diagonals_are_tangent_at_infinity(self):
        (inc,) = intersections(diagonal(0), diagonal(1))
        assert inc.point == (INF, INF)
        assert inc.tangency == 2

    def test_fiber_meets_cuboid_curve(self):
        (inc,) = intersections(fiber_h(0), cuboid_curve(0))
        assert format_point(inc.point) == "(0, 0)"
        assert contains_point(cuboid_curve(0), inc.point)

    def test_cuboid_curves_need_gaussian_points(self):
        """Every meeting point of two C_i is defined over Q(i)."""
        for i in range(4):
            for j in range(i + 1, 4):
                incs = intersections(cuboid_curve(i), cuboid_curve(j))
                assert sum(inc.tangency for inc in incs) == 2
                for inc in incs:
                    assert contains_point(cuboid_curve(i), inc.point)
                    assert contains_point(cuboid_curve(j), inc.point)

    def test_tangent_lines_meet_once(self):
        (inc,) = intersections(tangent_line(1), tangent_line(2))
        assert inc.tangency == 1
        assert contains_point(tangent_line(1), inc.point)
        assert contains_point(tangent_line(2), inc.point)
        assert not contains_point(conic(), inc.point)

    def test_tangent_line_touches_conic(self):
        (inc,) = intersections(tangent_line(3), conic())
        assert inc.tangency == 2
        assert contains_point(conic(), inc.point)

    def test_different_bases_raise(self):
        with pytest.raises(UnsupportedGeometryError):
            intersections(fiber_h(0), tangent_line(1))

    def test_same_curve_raises(self):
        with pytest.raises(UnsupportedGeometryError):
            intersections(diagonal(1), diagonal(1))


class TestBinaryQuadratic:
    """Tests for roots of binary quadratic forms."""

    def test_gaussian_roots(self):
        """t^2 + 1 splits over Q(i)."""
        roots = binary_quadratic_roots(gaussian(1), gaussian(0), gaussian(1))
        assert sorted(format_param(r) for r, _ in roots) == ["-i", "i"]

    def test_double_root(self):
        roots = binary_quadratic_roots(gaussian(1), gaussian(-2), gaussian(1))
        assert [(format_param(r), k) for r, k in roots] == [("1", 2)]

    def test_root_at_infinity(self):
        roots = binary_quadratic_roots(gaussian(0), gaussian(1), gaussian(-3))
        assert {format_param(r) for r, _ in roots} == {"inf", "3"}

    def test_irrational_roots_raise(self):
        with pytest.raises(UnsupportedGeometryError):
            binary_quadratic_roots(gaussian(1), gaussian(0), gaussian(-2))
