"""
`hypersurf invariants` - per-floor chi, K^2 and canonical class of a tower,
the cuboid report and the Noether gap sweep.
"""

import logging
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import (
    emit,
    format_table,
    output_format,
    parse_int_list,
)
from hypersurf.core.error_handling import EXIT_OK
from hypersurf.services.invariants import (
    CuboidReport,
    chi_via_pushforward,
    cuboid_report,
    level_invariants,
    noether_gap,
    sweep_noether_gap,
)
from hypersurf.services.serialization import rational_str, to_jsonable
from hypersurf.services.spec_loader import load_spec
from hypersurf.services.tower import build_tower, fiber_tower_shape

logger = logging.getLogger(__name__)


class FloorModel(BaseModel):
    level: int
    m: Optional[int] = None
    chi: str
    k2: str
    K_class: List[str]
    K_ample: bool
    D_sq: Optional[str] = None
    D_dot_K: Optional[str] = None
    branch_component_genus: Optional[int] = None
    recursion_exact: bool = True


class InvariantsReport(BaseModel):
    """Invariants of every floor X_0, ..., X_n."""

    spec: Dict[str, object]
    floors: List[FloorModel]
    noether_gap: Optional[str] = Field(
        None, description="K^2 - 8 chi on the top floor (fiber towers)"
    )
    chi_pushforward: Optional[str] = Field(
        None, description="chi(O_Y) as a sum over the cover's eigensheaves"
    )

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "spec": {"base": "P1xP1", "omega": "FIBER_22", "levels": []},
                "floors": [
                    {
                        "level": 0,
                        "chi": "1",
                        "k2": "8",
                        "K_class": ["-2", "-2"],
                        "K_ample": False,
                    }
                ],
                "noether_gap": "-432",
            }
        }
    )


class GapRowModel(BaseModel):
    m: int
    n: int
    gap: str
    expected: str
    K_ample: bool


class GapSweepReport(BaseModel):
    rows: List[GapRowModel]
    all_match: bool


class CuboidReportModel(BaseModel):
    """Singular points, E_i partition and curve inventory of the cuboid tower."""

    sing_count: int
    partition: List[Dict[str, object]]
    e_prime_sum_is_2e: bool
    degree_bound_constant: int
    min_E_intersection: int
    curve_inventory: Dict[str, int]
    inventory_total: int
    certified_inequality: str
    asserted: List[str]

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "sing_count": 48,
                "e_prime_sum_is_2e": True,
                "degree_bound_constant": 44,
                "min_E_intersection": 8,
                "curve_inventory": {
                    "rational": 32,
                    "elliptic_fibers": 12,
                    "elliptic_orbit": 48,
                },
                "inventory_total": 92,
            }
        }
    )


def _optional(value) -> Optional[str]:
    return None if value is None else rational_str(value)


def build_report(location: str) -> InvariantsReport:
    t = build_tower(load_spec(location))
    floors = [
        FloorModel(
            level=f.level,
            m=f.m,
            chi=rational_str(f.chi),
            k2=rational_str(f.k2),
            K_class=to_jsonable(f.K_class),
            K_ample=f.K_ample,
            D_sq=_optional(f.D_sq),
            D_dot_K=_optional(f.D_dot_K),
            branch_component_genus=f.branch_component_genus,
            recursion_exact=f.recursion_exact,
        )
        for f in level_invariants(t)
    ]
    gap = noether_gap(t) if fiber_tower_shape(t) is not None else None
    pushforward = chi_via_pushforward(t) if len(t.levels) == 1 else None
    return InvariantsReport(
        spec=t.spec.to_dict(),
        floors=floors,
        noether_gap=_optional(gap),
        chi_pushforward=_optional(pushforward),
    )


def build_cuboid_report(report: Optional[CuboidReport] = None) -> CuboidReportModel:
    report = report or cuboid_report()
    return CuboidReportModel(
        sing_count=report.sing_count,
        partition=to_jsonable(list(report.partition)),
        e_prime_sum_is_2e=report.e_prime_sum_is_2e,
        degree_bound_constant=report.degree_bound_constant,
        min_E_intersection=report.min_E_intersection,
        curve_inventory=report.curve_inventory,
        inventory_total=report.inventory_total,
        certified_inequality=report.certified_inequality,
        asserted=list(report.asserted),
    )


def build_sweep_report(
    ms: List[int], ns: List[int], threads: Optional[int] = None
) -> GapSweepReport:
    rows = [
        GapRowModel(
            m=row.m,
            n=row.n,
            gap=rational_str(row.gap),
            expected=rational_str(row.expected),
            K_ample=row.K_ample,
        )
        for row in sweep_noether_gap(ms, ns, threads)
    ]
    return GapSweepReport(rows=rows, all_match=all(r.gap == r.expected for r in rows))


def render_text(report: InvariantsReport) -> str:
    rows = [
        (
            f.level,
            f.m or "",
            f.chi,
            f.k2,
            "(" + ", ".join(f.K_class) + ")",
            "yes" if f.K_ample else "no",
            f.D_sq or "",
            f.D_dot_K or "",
            "" if f.branch_component_genus is None else f.branch_component_genus,
        )
        for f in report.floors
    ]
    lines = [
        format_table(
            ["floor", "m", "chi", "K^2", "K", "ample", "D^2", "D.K", "g(D)"], rows
        )
    ]
    if report.noether_gap is not None:
        lines.append(f"\nK^2 - 8 chi = {report.noether_gap}")
    if report.chi_pushforward is not None:
        lines.append(f"chi via pushforward = {report.chi_pushforward}")
    return "\n".join(lines)


def render_cuboid(report: CuboidReportModel) -> str:
    rows = [
        (p["index"], p["e_count"], p["e_prime_count"], " ".join(p["nodes"]))
        for p in report.partition
    ]
    inventory = ", ".join(f"{k}={v}" for k, v in report.curve_inventory.items())
    return "\n".join(
        [
            f"singular points: {report.sing_count}",
            format_table(["i", "|E_i|", "|E_i'|", "nodes on C_i"], rows),
            f"sum E_i' = 2E: {report.e_prime_sum_is_2e}",
            f"deg(C) <= 4g(C) + {report.degree_bound_constant}",
            f"min E.C for rational C: {report.min_E_intersection}",
            f"curves: {inventory} (total {report.inventory_total})",
        ]
    )


def render_sweep(report: GapSweepReport) -> str:
    rows = [(r.m, r.n, r.gap, r.expected, r.K_ample) for r in report.rows]
    return format_table(["m", "n", "K^2-8chi", "closed form", "K ample"], rows)


def register(subparsers) -> None:
    parser = subparsers.add_parser("invariants", help="chi, K^2 and K of every floor")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--spec", help="TOML/JSON file or bundled name")
    source.add_argument(
        "--cuboid", action="store_true", help="report on the cuboid tower"
    )
    source.add_argument(
        "--gap-sweep",
        action="store_true",
        help="check K^2 - 8chi against its closed form on a grid",
    )
    parser.add_argument("--ms", type=parse_int_list, default=[2, 3, 4, 5])
    parser.add_argument("--ns", type=parse_int_list, default=[1, 2, 3, 4, 5, 6])
    parser.set_defaults(func=run)


def run(args) -> int:
    fmt = output_format(args)
    if args.cuboid:
        emit(build_cuboid_report(), fmt, render_cuboid)
    elif args.gap_sweep:
        report = build_sweep_report(args.ms, args.ns, getattr(args, "threads", None))
        emit(report, fmt, render_sweep)
    else:
        emit(build_report(args.spec), fmt, render_text)
    return EXIT_OK
