"""
Unit tests for floor invariants.

Tests:
- chi and K^2 along the cyclic cover recursion
- The Noether gap closed form
- chi through the pushforward decomposition
- Cuboid bounds and curve inventory
"""

from fractions import Fraction

import pytest

from hypersurf.core.error_handling import DomainError
from hypersurf.services.invariants import (
    chi_via_pushforward,
    cuboid_inequality,
    cuboid_report,
    forced_integrality_general,
    level_invariants,
    noether_gap,
    noether_gap_closed_form,
    sweep_noether_gap,
)
from hypersurf.services.lattice import DivClass
from hypersurf.services.tower import build_tower, cuboid_spec, tangent_lines_spec


class TestLevelInvariants:
    """Tests for chi, K^2 and the canonical class on every floor."""

    def test_cuboid_floors(self, cuboid_tower):
        """(chi, K^2) = (1, 8), (1, 4), (2, 0), (8, 16)."""
        floors = level_invariants(cuboid_tower)
        assert [(f.chi, f.k2) for f in floors] == [(1, 8), (1, 4), (2, 0), (8, 16)]
        assert floors[-1].K_class == DivClass.of(1, 1)
        assert floors[-1].K_ample
        assert not floors[0].K_ample

    def test_generalized_cuboid_m3(self, gencuboid_33):
        top = level_invariants(gencuboid_33)[-1]
        assert (top.chi, top.k2) == (162, 864)
        assert top.K_class == DivClass.of(4, 4)

    def test_tangent_lines(self, lines15):
        """chi = 43 and K = O(7) on the triple cover."""
        top = level_invariants(lines15)[-1]
        assert (top.chi, top.k2) == (43, 147)
        assert top.K_class == DivClass.of(7)
        assert top.branch_component_genus == 0
        assert top.recursion_exact

    def test_branch_intersections(self, lines15):
        top = level_invariants(lines15)[-1]
        assert (top.D_sq, top.D_dot_K) == (225, -45)

    def test_weighted_branch_is_not_exact(self):
        """Multiplicity 2 lines use the reduced divisor."""
        t = build_tower(tangent_lines_spec(a=2))
        top = level_invariants(t)[-1]
        assert not top.recursion_exact
        assert top.chi == 43


class TestNoetherGap:
    """Tests for K^2 - 8 chi on fiber towers."""

    def test_closed_form_values(self):
        assert noether_gap_closed_form(2, 3) == -48
        assert noether_gap_closed_form(3, 3) == -432
        assert noether_gap_closed_form(2, 1) == -4

    def test_towers(self, cuboid_tower, gencuboid_23, gencuboid_33):
        assert noether_gap(cuboid_tower) == -48
        assert noether_gap(gencuboid_23) == -48
        assert noether_gap(gencuboid_33) == -432

    def test_needs_fiber_tower(self, lines15):
        with pytest.raises(DomainError):
            noether_gap(lines15)

    def test_sweep(self):
        rows = sweep_noether_gap([2, 3, 4], [1, 2, 3, 4])
        assert [(row.m, row.n) for row in rows][:3] == [(2, 1), (2, 2), (2, 3)]
        assert len(rows) == 12
        assert all(row.gap == row.expected for row in rows)
        assert all(row.gap < 0 for row in rows)

    def test_sweep_with_threads(self):
        serial = sweep_noether_gap([2, 3], [1, 2])
        assert sweep_noether_gap([2, 3], [1, 2], threads=3) == serial


class TestPushforward:
    """Tests for chi as a sum over the eigensheaves."""

    def test_tangent_lines(self, lines15):
        """1 + chi(O(-5)) + chi(O(-10)) = 1 + 6 + 36."""
        assert chi_via_pushforward(lines15) == 43

    def test_weighted_lines_agree(self):
        t = build_tower(tangent_lines_spec(a=2))
        assert chi_via_pushforward(t) == level_invariants(t)[-1].chi

    def test_first_cuboid_level(self):
        t = build_tower(cuboid_spec().truncated(1))
        assert chi_via_pushforward(t) == 1

    def test_multi_level_raises(self, cuboid_tower):
        with pytest.raises(DomainError):
            chi_via_pushforward(cuboid_tower)


class TestBounds:
    """Tests for the integrality inequalities."""

    def test_forced_integrality(self):
        assert forced_integrality_general(3, 1, Fraction(1, 2))
        assert not forced_integrality_general(3, 2, 4)
        assert forced_integrality_general(6, 2, 2)

    def test_forced_integrality_needs_three_levels(self):
        with pytest.raises(DomainError):
            forced_integrality_general(2, 1, 1)

    def test_cuboid_inequality(self):
        assert cuboid_inequality(8, 0, 2)
        assert not cuboid_inequality(1, 1, 2)

    def test_cuboid_inequality_domain(self):
        with pytest.raises(DomainError):
            cuboid_inequality(0, 0, 0)


class TestCuboidReport:
    """Tests for the cuboid bookkeeping."""

    @pytest.fixture(scope="class")
    def report(self):
        return cuboid_report()

    def test_singular_points(self, report):
        assert report.sing_count == 48
        assert report.degree_bound_constant == 44
        assert report.min_E_intersection == 8

    def test_partition(self, report):
        """Each C_i passes through half of the singular points."""
        assert [(p.e_count, p.e_prime_count) for p in report.partition] == [
            (24, 24)
        ] * 4
        assert report.e_prime_sum_is_2e

    def test_every_node_on_two_curves(self, report):
        assert len(report.node_membership) == 12
        assert all(len(on) == 2 for on in report.node_membership.values())

    def test_curve_inventory(self, report):
        assert report.curve_inventory == {
            "rational": 32,
            "elliptic_fibers": 12,
            "elliptic_orbit": 48,
        }
        assert report.inventory_total == 92
        assert report.asserted
