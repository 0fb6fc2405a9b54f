"""
JSON encoding of library results.

Rationals are written as "p/q" strings (integers as plain strings inside
classes, plain numbers elsewhere), classes as lists, singularity types and
curves by their display names, sympy expressions through ``sympy.sstr``.
Keys are sorted so the same object always encodes to the same bytes.
"""

import dataclasses
import json
from enum import Enum
from fractions import Fraction
from typing import Any

import sympy

from hypersurf.services.geometry import INF, CurveFamily, format_param
from hypersurf.services.hjsing import SingularityType
from hypersurf.services.lattice import BaseSurface, DivClass


def rational_str(value: Fraction) -> str:
    """"p/q", or "p" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _key(key: Any) -> str:
    if isinstance(key, Enum):
        return str(key.value)
    if isinstance(key, tuple):
        return ",".join(_key(k) for k in key)
    return str(key)


def to_jsonable(obj: Any) -> Any:
    """
    Convert a result object into plain JSON data.

    Dataclasses are walked field by field, so any report built from the
    service types encodes without a dedicated encoder.
    """
    if isinstance(obj, Enum):
        return obj.value
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else rational_str(obj)
    if isinstance(obj, DivClass):
        return [rational_str(c) for c in obj.coeffs]
    if isinstance(obj, (SingularityType, BaseSurface)):
        return str(obj)
    if isinstance(obj, CurveFamily):
        return obj.to_dict()
    if obj is INF:
        return format_param(obj)
    if isinstance(obj, sympy.Basic):
        return sympy.sstr(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    if hasattr(obj, "parent") and hasattr(obj, "y"):
        # Gaussian parameter
        return format_param(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def canonical_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text for ``obj``."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent)
