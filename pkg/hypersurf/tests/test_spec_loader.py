"""
Unit tests for tower specification documents.

Tests:
- Bundled specifications
- Document round trips through dict and TOML
- Field paths in parse errors
"""

import json
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import pytest

from hypersurf.core.error_handling import SpecParseError, SpecValidationError
from hypersurf.services.spec_loader import (
    BUNDLED_SPECS,
    TowerDocument,
    dump_spec,
    dumps_spec_toml,
    load_spec,
    parse_spec_document,
)
from hypersurf.services.tower import (
    cuboid_spec,
    generalized_cuboid_spec,
    tangent_lines_spec,
)


def _document(**level):
    level = {"m": 2, "curves": [{"geom": "FIBER_H", "param": "0"}], **level}
    return {"base": "P1xP1", "omega": "FIBER_22", "levels": [level]}


class TestBundledSpecs:
    """Tests for the specifications shipped with the package."""

    def test_cuboid(self):
        assert load_spec("cuboid") == cuboid_spec()

    def test_generalized_cuboid(self):
        assert load_spec("gencuboid-m3-n3") == generalized_cuboid_spec(3, 3)

    def test_tangent_lines(self):
        assert load_spec("lines15-m3") == tangent_lines_spec()

    def test_fam_a(self):
        spec = load_spec("fam-a-n8")
        assert [level.m for level in spec.levels] == [2, 2, 2, 2, 2, 2, 3]
        assert spec.omega.id.value == "FIBER_DIAG_66"

    @pytest.mark.parametrize("name", BUNDLED_SPECS)
    def test_round_trip(self, name):
        spec = load_spec(name)
        assert parse_spec_document(dump_spec(spec)) == spec
        assert parse_spec_document(tomllib.loads(dumps_spec_toml(spec))) == spec


class TestParseErrors:
    """Tests for malformed documents."""

    def test_degree_below_two(self):
        with pytest.raises(SpecParseError, match="levels.0.m"):
            parse_spec_document(_document(m=1))

    def test_unknown_geometry(self):
        doc = _document(curves=[{"geom": "CIRCLE", "param": "0"}])
        with pytest.raises(SpecParseError, match="levels.0.curves.0.geom"):
            parse_spec_document(doc)

    def test_unknown_field(self):
        doc = _document(curves=[{"geom": "FIBER_H", "param": "0", "weight": 2}])
        with pytest.raises(SpecParseError, match="weight"):
            parse_spec_document(doc)

    def test_parameter_outside_q_i(self):
        doc = _document(curves=[{"geom": "FIBER_H", "param": "sqrt(2)"}])
        with pytest.raises(SpecParseError, match="levels.0.curves.0"):
            parse_spec_document(doc)

    def test_unknown_omega(self):
        doc = _document()
        doc["omega"] = "FIBER_99"
        with pytest.raises(SpecParseError, match="omega"):
            parse_spec_document(doc)

    def test_parse_errors_are_validation_errors(self):
        """Parse failures share the exit status of invalid towers."""
        assert issubclass(SpecParseError, SpecValidationError)


class TestFiles:
    """Tests for reading documents from disk."""

    def test_json_file(self, tmp_path):
        path = tmp_path / "cuboid.json"
        path.write_text(json.dumps(dump_spec(cuboid_spec())))
        assert load_spec(path) == cuboid_spec()

    def test_toml_file(self, tmp_path):
        path = tmp_path / "lines.toml"
        path.write_text(dumps_spec_toml(tangent_lines_spec()))
        assert load_spec(str(path)) == tangent_lines_spec()

    def test_bad_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text('base = "P1xP1"\nomega = \n')
        with pytest.raises(SpecParseError, match="broken.toml"):
            load_spec(path)

    def test_bad_json_reports_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"base": "P2",\n "omega": }')
        with pytest.raises(SpecParseError, match="line 2"):
            load_spec(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecParseError, match="cannot read"):
            load_spec(tmp_path / "nope.toml")

    def test_schema_example_parses(self):
        example = TowerDocument.model_json_schema()["example"]
        spec = parse_spec_document(example)
        assert len(spec.levels) == 1
