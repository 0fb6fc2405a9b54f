"""
Unit tests for the complete-intersection families.

Tests:
- Multidegree classification
- Seeded instantiate/validate round trips
- Detection of broken parameter constraints
- Weighted hypersurface and generalized cuboid equations
"""

import time
from dataclasses import replace

import pytest
import sympy

from hypersurf.core.error_handling import DomainError
from hypersurf.services.certify import VerdictKind, verdict
from hypersurf.services.genfam import (
    FamilyKind,
    FamilyRoute,
    classify_multidegree,
    generalized_cuboid,
    instantiate_family,
    random_multidegrees,
    surface_of_cuboids,
    validate_family,
    weighted_hypersurface,
)
from hypersurf.services.hjsing import SingularityType
from hypersurf.services.tower import build_tower, singularity_inventory

A, B, C, D = (FamilyKind.FAM_A, FamilyKind.FAM_B, FamilyKind.FAM_C, FamilyKind.FAM_D)
NONE = FamilyKind.NOT_COVERED


class TestClassification:
    """Tests for matching multidegrees to constructions."""

    @pytest.mark.parametrize(
        "degrees,kinds",
        [
            ((2, 2, 2, 2, 2, 2, 2, 3), (C, A)),
            ((3, 3, 3, 3, 3, 3, 3, 3), (B, A)),
            ((2, 3, 3, 3), (D,)),
            ((2, 3, 3, 3, 3, 3, 3, 3), (D, A)),
            ((3, 3, 3, 3, 3), (B,)),
            ((2, 2, 3, 3, 3, 3), (C,)),
            ((2,) * 8, (A,)),
            ((2, 2, 2, 2), (NONE,)),
            ((2,) * 7, (NONE,)),
            ((2, 2, 3, 3, 3), (NONE,)),
            ((4, 4, 4, 4), (NONE,)),
        ],
    )
    def test_table(self, degrees, kinds):
        assert classify_multidegree(degrees).kinds == kinds

    def test_order_does_not_matter(self):
        assert classify_multidegree((3, 3, 2, 3)).kinds == (D,)

    def test_delegated_routes(self):
        result = classify_multidegree((3,) * 8)
        assert result.routes == (
            FamilyRoute.TANGENT_LINES,
            FamilyRoute.VIA_TANGENT_LINES,
        )

    def test_equal_quartic_degrees_carry_a_note(self):
        result = classify_multidegree((3, 3, 3, 3))
        assert not result.covered
        assert result.notes

    @pytest.mark.parametrize("degrees", [(), (1, 3, 3, 3), (0,)])
    def test_invalid_degrees_raise(self, degrees):
        with pytest.raises(DomainError):
            classify_multidegree(degrees)


class TestRoundTrip:
    """Tests for emitted families."""

    def test_seeded_draws_are_reproducible(self):
        assert random_multidegrees(5, seed=7) == random_multidegrees(5, seed=7)
        assert all(
            classify_multidegree(d).covered for d in random_multidegrees(20, seed=3)
        )

    def test_every_draw_instantiates(self):
        """Each covering kind emits equations of the requested degrees."""
        for degrees in random_multidegrees(40, seed=20240101):
            for kind in classify_multidegree(degrees).kinds:
                eqs = instantiate_family(kind, degrees)
                assert eqs.kind == kind
                assert tuple(r.degree for r in eqs.equations) == degrees
                assert validate_family(eqs) == []

    def test_long_multidegree_validates_quickly(self):
        """Divisibility checks stay within the generators of each form."""
        degrees = (2, 2, 6, 6, 6, 6, 6, 6, 6, 6)
        assert C in classify_multidegree(degrees).kinds
        start = time.perf_counter()
        eqs = instantiate_family(C, degrees)
        assert validate_family(eqs) == []
        assert time.perf_counter() - start < 5

    @pytest.mark.parametrize(
        "kind,degrees",
        [
            (B, (3, 3, 3, 3, 3)),
            (C, (2, 2, 3, 3, 3, 3)),
            (D, (2, 3, 3, 3)),
        ],
    )
    def test_unperturbed_tower_is_hyperbolic(self, kind, degrees):
        eqs = instantiate_family(kind, degrees)
        assert verdict(build_tower(eqs.tower)).kind == VerdictKind.HYPERBOLIC

    @pytest.mark.slow
    def test_every_draw_is_hyperbolic(self):
        """Seeded draws certify at t = 0, apart from the all-2 splitting case."""
        for degrees in random_multidegrees(40, seed=20240101):
            for kind in classify_multidegree(degrees).kinds:
                eqs = instantiate_family(kind, degrees)
                if eqs.notes:
                    continue
                result = verdict(build_tower(eqs.tower))
                assert result.kind == VerdictKind.HYPERBOLIC, (kind, degrees)

    def test_uncovered_kind_raises(self):
        with pytest.raises(DomainError):
            instantiate_family(B, (2, 3, 3, 3))

    def test_fam_a_tower_is_hyperbolic(self):
        eqs = instantiate_family(A, (2, 2, 2, 2, 2, 2, 2, 3))
        assert eqs.parameters["a"] == {f"a_{i}": 3 * i for i in range(1, 7)}
        assert verdict(build_tower(eqs.tower)).kind == VerdictKind.HYPERBOLIC

    def test_all_two_levels_note_splitting(self):
        eqs = instantiate_family(A, (2,) * 8)
        assert eqs.notes

    def test_delegated_kind_keeps_its_name(self):
        eqs = instantiate_family(A, (2, 3, 3, 3, 3, 3, 3, 3))
        assert eqs.kind == A
        assert eqs.route == FamilyRoute.VIA_QUADRIC_FIBERS.value


class TestConstraintViolations:
    """Tests for mutated parameters."""

    @pytest.fixture
    def fam_a(self):
        return instantiate_family(A, (2, 2, 2, 2, 2, 2, 2, 3))

    def _mutate(self, eqs, group, label, value):
        params = {name: dict(values) for name, values in eqs.parameters.items()}
        params[group][label] = value
        return replace(eqs, parameters=params)

    def test_repeated_a(self, fam_a):
        broken = self._mutate(fam_a, "a", "a_2", fam_a.parameters["a"]["a_1"])
        violations = validate_family(broken)
        assert any("a_1" in v and "a_2" in v for v in violations)

    def test_b_next_to_a(self, fam_a):
        broken = self._mutate(fam_a, "b", "b_7_1", fam_a.parameters["a"]["a_1"] + 1)
        violations = validate_family(broken)
        assert any(v.startswith("b_7_1") for v in violations)

    def test_fam_c_antipodal_a(self):
        eqs = instantiate_family(C, (2, 2, 2, 3, 3, 3))
        broken = self._mutate(eqs, "a", "a_2", -eqs.parameters["a"]["a_1"])
        assert "a_1 = -a_2" in validate_family(broken)

    def test_fam_b_repeated_point(self):
        eqs = instantiate_family(B, (3, 3, 3, 3, 3))
        broken = self._mutate(eqs, "a", "a_1_2", eqs.parameters["a"]["a_1_1"])
        assert validate_family(broken)

    @pytest.mark.parametrize("power", [1, 2])
    def test_branch_form_dividing_the_perturbation(self, fam_a, power):
        records = list(fam_a.equations)
        k = next(i for i, r in enumerate(records) if r.perturbation is not None)
        form = 3 * records[k].perturbation.base ** power
        records[k] = replace(records[k], branch_forms=(form,))
        broken = replace(fam_a, equations=tuple(records))
        message = f"{records[k].label}: {form} divides the perturbation"
        assert message in validate_family(broken)


class TestExplicitModels:
    """Tests for the non-family equation sets."""

    def test_weighted_hypersurface(self):
        eqs = weighted_hypersurface()
        assert eqs.ambient == "P(1,1,1,5)"
        assert eqs.degrees == (15,)
        assert validate_family(eqs) == []
        t = build_tower(eqs.tower)
        assert singularity_inventory(t) == {SingularityType(3, 2): 105}

    def test_weighted_hypersurface_divisibility(self):
        with pytest.raises(DomainError):
            weighted_hypersurface(d=4, m=3)

    def test_generalized_cuboid(self):
        eqs = generalized_cuboid(3, 3)
        assert eqs.ambient == "P^6"
        assert eqs.degrees == (3, 3, 3, 2)
        assert len(eqs.variables) == 7
        assert eqs.equations[-1].render() == "z0*z3 = z1*z2"
        assert validate_family(eqs) == []

    def test_surface_of_cuboids_has_rational_coefficients(self):
        """The Gaussian fibers pair up into forms over Q."""
        eqs = surface_of_cuboids()
        assert eqs.degrees == (2, 2, 2, 2)
        assert eqs.equations[0].render() == "z0*z3 = z4**2"
        assert not any(r.lhs.has(sympy.I) for r in eqs.equations)
