"""
Unit tests for JSON encoding of results.
"""

import json
from fractions import Fraction

import pytest
import sympy

from hypersurf.services.geometry import INF, Incidence, fiber_h, to_param
from hypersurf.services.hjsing import SingularityType
from hypersurf.services.lattice import P1XP1, DivClass
from hypersurf.services.serialization import canonical_json, rational_str, to_jsonable
from hypersurf.services.tower import OmegaId


class TestRationals:
    def test_rational_str(self):
        assert rational_str(Fraction(3, 6)) == "1/2"
        assert rational_str(Fraction(-4, 2)) == "-2"
        assert rational_str(5) == "5"

    def test_integral_fractions_become_numbers(self):
        assert to_jsonable(Fraction(4, 2)) == 2
        assert to_jsonable(Fraction(-3, 7)) == "-3/7"


class TestDomainObjects:
    """Tests for the library types."""

    def test_classes_and_types(self):
        assert to_jsonable(DivClass.of(Fraction(1, 2), 2)) == ["1/2", "2"]
        assert to_jsonable(SingularityType(7, 3)) == "1/7(1,3)"
        assert to_jsonable(P1XP1) == "P1xP1"
        assert to_jsonable(OmegaId.FIBER_22) == "FIBER_22"

    def test_parameters(self):
        assert to_jsonable(to_param("1 - i")) == "1-i"
        assert to_jsonable(INF) == "inf"

    def test_curves(self):
        assert to_jsonable(fiber_h("inf")) == {"geom": "FIBER_H", "param": "inf"}

    def test_dataclasses(self):
        inc = Incidence((to_param(0), INF), 1)
        assert to_jsonable(inc) == {"point": ["0", "inf"], "tangency": 1}

    def test_keys_use_display_names(self):
        assert to_jsonable({SingularityType(2, 1): 48}) == {"A1": 48}
        assert to_jsonable({(1, 2): 3}) == {"1,2": 3}

    def test_sympy_expressions(self):
        z0, z3 = sympy.symbols("z0 z3")
        assert to_jsonable(z0 * z3 + 1) == "z0*z3 + 1"

    def test_sets_are_sorted(self):
        assert to_jsonable({3, 1, 2}) == [1, 2, 3]

    def test_unknown_objects_raise(self):
        with pytest.raises(TypeError):
            to_jsonable(object())


class TestCanonicalJson:
    def test_sorted_keys(self):
        text = canonical_json({"b": 1, "a": Fraction(1, 3)})
        assert json.loads(text) == {"a": "1/3", "b": 1}
        assert text.index('"a"') < text.index('"b"')

    def test_deterministic(self):
        data = {"classes": [DivClass.of(1, 1)], "sing": {SingularityType(3, 2): 243}}
        assert canonical_json(data) == canonical_json(dict(reversed(data.items())))
