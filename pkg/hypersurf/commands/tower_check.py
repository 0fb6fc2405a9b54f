"""
`hypersurf tower-check --spec FILE` - hypotheses, nodes, singularities and
verdict of a tower.
"""

import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import emit, format_table, output_format
from hypersurf.core.error_handling import EXIT_OK, SNCViolationError
from hypersurf.services.certify import (
    CheckOutcome,
    CurveClassification,
    Verdict,
    verdict,
)
from hypersurf.services.serialization import to_jsonable
from hypersurf.services.spec_loader import load_spec
from hypersurf.services.tower import (
    Tower,
    build_tower,
    incidence_inventory,
    node_inventory,
    node_singularity,
    singularity_inventory,
)

logger = logging.getLogger(__name__)


class CheckModel(BaseModel):
    ok: bool
    witnesses: List[str] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class ChecksModel(BaseModel):
    """The four hypotheses of the hyperbolicity criterion."""

    multiplicity_ok: bool
    snc_ok: bool
    ampleness_ok: bool
    vanishing_ok: bool
    criterion_class: List[str] = Field(
        ..., description="sum_i (1/m_i) D_i - L, as p/q strings"
    )
    details: Dict[str, CheckModel]


class NodeModel(BaseModel):
    level_pair: List[int]
    count: int
    local_mults: List[int]
    singularity: Optional[str] = Field(
        None, description="Type over a same-level node"
    )
    coefficient_factors: int = 0
    on_curves: List[str] = Field(default_factory=list)


class CurveModel(BaseModel):
    curve: str
    role: str
    level: Optional[int] = None
    components: int
    genus: Optional[int] = Field(None, description="Genus of each component on X_n")
    manual: List[str] = Field(default_factory=list)


class TowerCheckReport(BaseModel):
    """Full check of one tower."""

    spec: Dict[str, Any] = Field(..., description="The tower as parsed")
    degrees: List[int]
    total_degree: int
    M_classes: List[List[str]]
    checks: ChecksModel
    nodes: List[NodeModel] = Field(default_factory=list)
    incidences: List[Dict[str, Any]] = Field(
        default_factory=list,
        description="Branch curves meeting non-branch integral curves",
    )
    singularities: Dict[str, int] = Field(default_factory=dict)
    verdict: str
    exceptional_locus: List[CurveModel] = Field(default_factory=list)
    curves: List[CurveModel] = Field(default_factory=list)
    manual: List[str] = Field(default_factory=list)
    reasons: List[str] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "spec": {"base": "P1xP1", "omega": "FIBER_22", "levels": []},
                "degrees": [2, 2, 2],
                "total_degree": 8,
                "M_classes": [["1", "1"], ["1", "1"], ["1", "1"]],
                "checks": {
                    "multiplicity_ok": False,
                    "snc_ok": True,
                    "ampleness_ok": True,
                    "vanishing_ok": False,
                    "criterion_class": ["1", "1"],
                    "details": {},
                },
                "singularities": {"A1": 48},
                "verdict": "INCONCLUSIVE",
            }
        }
    )


def _check(outcome: CheckOutcome) -> CheckModel:
    return CheckModel(
        ok=outcome.ok, witnesses=list(outcome.witnesses), notes=list(outcome.notes)
    )


def _curve(c: CurveClassification) -> CurveModel:
    return CurveModel(
        curve=c.curve,
        role=c.role.value,
        level=c.level,
        components=c.components,
        genus=c.genus,
        manual=list(c.manual),
    )


def _nodes(t: Tower) -> List[NodeModel]:
    try:
        records = node_inventory(t)
    except SNCViolationError:
        return []
    return [
        NodeModel(
            level_pair=list(r.level_pair),
            count=r.count,
            local_mults=list(r.local_mults),
            singularity=str(node_singularity(t, r).canonical())
            if r.same_level
            else None,
            coefficient_factors=r.coefficient_factors,
            on_curves=list(r.on_curves),
        )
        for r in records
    ]


def build_report(t: Tower, result: Verdict) -> TowerCheckReport:
    checks = result.checks
    singularities: Dict[str, int] = {}
    if checks.snc_ok:
        singularities = {str(s): n for s, n in singularity_inventory(t).items()}
    return TowerCheckReport(
        spec=t.spec.to_dict(),
        degrees=list(t.degrees),
        total_degree=t.total_degree,
        M_classes=to_jsonable(list(t.M_classes)),
        checks=ChecksModel(
            multiplicity_ok=checks.multiplicity_ok,
            snc_ok=checks.snc_ok,
            ampleness_ok=checks.ampleness_ok,
            vanishing_ok=checks.vanishing_ok,
            criterion_class=to_jsonable(checks.criterion_class),
            details={o.name: _check(o) for o in checks.outcomes},
        ),
        nodes=_nodes(t),
        incidences=to_jsonable(incidence_inventory(t)),
        singularities=singularities,
        verdict=result.kind.value,
        exceptional_locus=[_curve(c) for c in result.exceptional_locus],
        curves=[_curve(c) for c in result.curves],
        manual=result.manual,
        reasons=list(result.reasons),
    )


def render_text(report: TowerCheckReport) -> str:
    checks = report.checks
    lines = [
        f"tower {report.spec['base']} / {report.spec['omega']}  "
        f"degrees {report.degrees}  N = {report.total_degree}",
        "",
        format_table(
            ["check", "ok", "witness"],
            [
                (name, "yes" if c.ok else "NO", c.witnesses[0] if c.witnesses else "")
                for name, c in checks.details.items()
            ],
        ),
        "",
    ]
    if report.singularities:
        lines.append(
            "singularities: "
            + ", ".join(f"{n} x {s}" for s, n in report.singularities.items())
        )
        lines.append("")
    lines.append(
        format_table(
            ["curve", "role", "level", "components", "genus"],
            [
                (
                    c.curve,
                    c.role,
                    c.level or "",
                    c.components,
                    "?" if c.genus is None else c.genus,
                )
                for c in report.curves
            ],
        )
    )
    lines += ["", f"verdict: {report.verdict}"]
    lines += [f"  reason: {r}" for r in report.reasons]
    lines += [f"  manual: {m}" for m in report.manual]
    return "\n".join(lines)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "tower-check", help="check the hyperbolicity criterion on a tower"
    )
    parser.add_argument(
        "--spec", required=True, help="TOML/JSON file or bundled name (e.g. cuboid)"
    )
    parser.set_defaults(func=run)


def run(args) -> int:
    t = build_tower(load_spec(args.spec))
    result = verdict(t, getattr(args, "threads", None))
    emit(build_report(t, result), output_format(args), render_text)
    return EXIT_OK
