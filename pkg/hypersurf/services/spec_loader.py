"""
Tower specification documents.

A specification is a TOML or JSON document:

    base = "P1xP1"
    omega = "FIBER_22"

    [[levels]]
    m = 2
    curves = [
        { geom = "FIBER_H", param = "0" },
        { geom = "FIBER_V", param = "inf" },
    ]

Bundled specifications are addressed by name (``cuboid``, ``fam-a-n8``...).
"""

import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from hypersurf.core.error_handling import DomainError, SpecParseError
from hypersurf.services.geometry import CurveFamily, GeomKind, to_param
from hypersurf.services.lattice import SurfaceKind, base_surface
from hypersurf.services.tower import (
    BranchCurve,
    LevelSpec,
    OmegaId,
    TowerSpec,
    omega_spec,
)

logger = logging.getLogger(__name__)

BUNDLED_SPECS = ("cuboid", "gencuboid-m3-n3", "lines15-m3", "fam-a-n8")

ParamValue = Union[int, str]


# ============================================================================
# Documents
# ============================================================================


class CurveDocument(BaseModel):
    """One weighted branch curve."""

    model_config = ConfigDict(extra="forbid")

    geom: GeomKind = Field(..., description="Built-in curve family")
    param: Optional[ParamValue] = Field(
        None, description="Parameter in Q(i) or 'inf'; omitted for CONIC"
    )
    slope: Optional[ParamValue] = Field(
        None, description="DIAGONAL slope, default 1"
    )
    a: int = Field(1, description="Branch multiplicity, 0 < a < m")


class LevelDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: int = Field(..., ge=2, description="Degree of the cyclic cover")
    curves: List[CurveDocument] = Field(..., min_length=1)


class TowerDocument(BaseModel):
    """A full tower declaration."""

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "base": "P1xP1",
                "omega": "FIBER_22",
                "levels": [
                    {
                        "m": 2,
                        "curves": [
                            {"geom": "FIBER_H", "param": "0"},
                            {"geom": "FIBER_H", "param": "inf"},
                        ],
                    }
                ],
            }
        },
    )

    base: SurfaceKind = Field(..., description="P2 or P1xP1")
    omega: OmegaId = Field(..., description="Built-in symmetric differential")
    levels: List[LevelDocument] = Field(..., min_length=1)


# ============================================================================
# Parsing
# ============================================================================


def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc)


def _curve(doc: CurveDocument, where: str, source: str) -> CurveFamily:
    try:
        param = None if doc.param is None else to_param(doc.param)
        slope = None if doc.slope is None else to_param(doc.slope)
    except DomainError as e:
        raise SpecParseError(f"{source}: {where}: {e}") from e
    return CurveFamily(doc.geom, param, slope)


def parse_spec_document(data: Dict[str, Any], source: str = "<document>") -> TowerSpec:
    """
    Turn a decoded document into a TowerSpec.

    Only the document's shape is checked here; the tower invariants are
    checked by ``build_tower``.

    Raises:
        SpecParseError: With the offending field path
    """
    try:
        doc = TowerDocument.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        raise SpecParseError(
            f"{source}: field '{_field_path(first['loc'])}': {first['msg']}"
        ) from e

    levels = []
    for i, level in enumerate(doc.levels):
        curves = tuple(
            BranchCurve(_curve(c, f"levels.{i}.curves.{j}", source), c.a)
            for j, c in enumerate(level.curves)
        )
        levels.append(LevelSpec(level.m, curves))
    return TowerSpec(
        base=base_surface(doc.base.value),
        omega=omega_spec(doc.omega.value),
        levels=tuple(levels),
    )


def _decode(text: str, source: str, suffix: str) -> Dict[str, Any]:
    if suffix == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(
                f"{source}: line {e.lineno}, column {e.colno}: {e.msg}"
            ) from e
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise SpecParseError(f"{source}: {e}") from e


def bundled_spec_path(name: str) -> Path:
    return Path(str(resources.files("hypersurf") / "specs" / f"{name}.toml"))


def load_spec(location: Union[str, Path]) -> TowerSpec:
    """
    Load a specification from a path or a bundled name.

    Raises:
        SpecParseError: If the file is unreadable or malformed
    """
    name = str(location)
    path = bundled_spec_path(name) if name in BUNDLED_SPECS else Path(name)
    logger.debug(f"Loading tower specification from {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecParseError(f"{path}: cannot read specification ({e.strerror})") from e
    return parse_spec_document(_decode(text, str(path), path.suffix.lower()), str(path))


def dump_spec(spec: TowerSpec) -> Dict[str, Any]:
    """Document form of a TowerSpec; ``parse_spec_document`` reads it back."""
    return spec.to_dict()


def dumps_spec_toml(spec: TowerSpec) -> str:
    """TOML text of a TowerSpec in the bundled layout."""
    data = dump_spec(spec)
    lines = [f'base = "{data["base"]}"', f'omega = "{data["omega"]}"']
    for level in data["levels"]:
        lines += ["", "[[levels]]", f"m = {level['m']}", "curves = ["]
        for curve in level["curves"]:
            fields = ", ".join(
                f"{key} = {value}" if key == "a" else f'{key} = "{value}"'
                for key, value in curve.items()
            )
            lines.append(f"    {{ {fields} }},")
        lines.append("]")
    return "\n".join(lines) + "\n"
