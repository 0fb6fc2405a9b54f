"""
`hypersurf generate` - equations of a family, the weighted hypersurface or a
generalized cuboid.
"""

import logging
from typing import Dict, List, Optional

import sympy
from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import emit, output_format, parse_int_list
from hypersurf.core.error_handling import EXIT_OK, DomainError
from hypersurf.services.genfam import (
    EquationSet,
    FamilyKind,
    classify_multidegree,
    generalized_cuboid,
    instantiate_family,
    surface_of_cuboids,
    validate_family,
    weighted_hypersurface,
)

logger = logging.getLogger(__name__)


class EquationModel(BaseModel):
    label: str
    degree: int
    text: str = Field(..., description="lhs = rhs")
    coefficients: Dict[str, str] = Field(
        ..., description="Monomial of lhs - rhs to its coefficient"
    )


class GenerateReport(BaseModel):
    """An explicit system of equations."""

    kind: Optional[str] = None
    route: str
    degrees: List[int]
    ambient: str
    variables: List[str]
    equations: List[EquationModel]
    parameters: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    constraints: List[str] = Field(default_factory=list)
    violations: List[str] = Field(
        default_factory=list, description="Independent constraint re-check"
    )
    tower: Optional[Dict[str, object]] = Field(
        None, description="Tower the system degenerates to at t = 0"
    )
    notes: List[str] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "kind": "FAM_B",
                "route": "tangent-line tower over P2",
                "degrees": [3, 3, 3, 3, 3],
                "ambient": "P^7",
                "variables": ["x", "y", "z", "w1", "w2", "w3", "w4", "w5"],
                "equations": [
                    {
                        "label": "level_1",
                        "degree": 3,
                        "text": "t1*x**3 + (x + y + z)*(4*x + 2*y + z)*(9*x + 3*y + z)"
                        " = w1**3",
                        "coefficients": {"t1*x**3": "1", "w1**3": "-1"},
                    }
                ],
                "constraints": ["[a:b] distinct"],
                "violations": [],
            }
        }
    )


def coefficient_map(expr: sympy.Expr) -> Dict[str, str]:
    terms = sympy.expand(expr).as_coefficients_dict()
    return {sympy.sstr(monomial): sympy.sstr(c) for monomial, c in terms.items()}


def to_model(eqs: EquationSet) -> GenerateReport:
    return GenerateReport(
        kind=eqs.kind.value if eqs.kind is not None else None,
        route=eqs.route,
        degrees=list(eqs.degrees),
        ambient=eqs.ambient,
        variables=[sympy.sstr(v) for v in eqs.variables],
        equations=[
            EquationModel(
                label=r.label,
                degree=r.degree,
                text=r.render(),
                coefficients=coefficient_map(r.lhs - r.rhs),
            )
            for r in eqs.equations
        ],
        parameters=eqs.parameters,
        constraints=list(eqs.constraints),
        violations=validate_family(eqs),
        tower=eqs.tower.to_dict() if eqs.tower is not None else None,
        notes=list(eqs.notes),
    )


def build_equations(
    degrees: Optional[List[int]] = None,
    kind: Optional[str] = None,
    weighted: Optional[List[int]] = None,
    gencuboid: Optional[List[int]] = None,
    cuboid: bool = False,
) -> EquationSet:
    """
    Raises:
        DomainError: If the request is malformed or the multidegree is not
            covered
    """
    if cuboid:
        return surface_of_cuboids()
    if weighted is not None:
        if len(weighted) not in (2, 3):
            raise DomainError("--weighted takes D,M or D,M,A")
        return weighted_hypersurface(*weighted)
    if gencuboid is not None:
        if len(gencuboid) != 2:
            raise DomainError("--gencuboid takes M,N")
        return generalized_cuboid(*gencuboid)
    classification = classify_multidegree(degrees or [])
    if not classification.covered:
        raise DomainError(f"multidegree {classification.degrees} is not covered")
    family = FamilyKind(kind) if kind else classification.primary
    return instantiate_family(family, classification.degrees)


def render_text(report: GenerateReport) -> str:
    header = f"# {report.kind or 'system'} in {report.ambient}: {report.route}"
    lines = [header] + [eq.text for eq in report.equations]
    lines += [f"# {note}" for note in report.notes]
    lines += [f"# VIOLATION {v}" for v in report.violations]
    return "\n".join(lines)


def register(subparsers) -> None:
    parser = subparsers.add_parser("generate", help="emit explicit equations")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--degrees", type=parse_int_list, help="multidegree")
    source.add_argument(
        "--weighted", type=parse_int_list, metavar="D,M[,A]", help="weighted cover"
    )
    source.add_argument(
        "--gencuboid", type=parse_int_list, metavar="M,N", help="generalized cuboid"
    )
    source.add_argument(
        "--cuboid", action="store_true", help="surface of cuboids on the quadric"
    )
    parser.add_argument(
        "--kind",
        choices=[k.value for k in FamilyKind if k != FamilyKind.NOT_COVERED],
        help="family to instantiate (default: the primary one)",
    )
    parser.add_argument(
        "--format", choices=["json", "text"], help="alias of the global --output"
    )
    parser.set_defaults(func=run)


def run(args) -> int:
    eqs = build_equations(
        args.degrees, args.kind, args.weighted, args.gencuboid, args.cuboid
    )
    fmt = args.format or output_format(args)
    emit(to_model(eqs), fmt, render_text)
    return EXIT_OK
