"""
`hypersurf classify` - which constructions cover a multidegree.
"""

import argparse
import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import (
    emit,
    format_table,
    output_format,
    parse_int_list,
)
from hypersurf.core.concurrency import ordered_map
from hypersurf.core.config import settings
from hypersurf.core.error_handling import EXIT_OK
from hypersurf.services.genfam import (
    Classification,
    classify_multidegree,
    random_multidegrees,
)

logger = logging.getLogger(__name__)


class ClassificationModel(BaseModel):
    degrees: List[int]
    primary: str = Field(..., description="First applicable family")
    kinds: List[str] = Field(..., description="Every applicable family")
    routes: List[str] = Field(..., description="Construction per family")
    notes: List[str] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "degrees": [2, 2, 2, 2, 2, 2, 2, 2],
                "primary": "FAM_A",
                "kinds": ["FAM_A"],
                "routes": [
                    "fiber tower with degree-2 pairs on x - w in {0, 1, 2}"
                ],
                "notes": [],
            }
        }
    )


class ClassifyReport(BaseModel):
    seed: Optional[int] = Field(None, description="Seed of a random sweep")
    results: List[ClassificationModel]


def to_model(c: Classification) -> ClassificationModel:
    return ClassificationModel(
        degrees=list(c.degrees),
        primary=c.primary.value,
        kinds=[k.value for k in c.kinds],
        routes=[r.value for r in c.routes],
        notes=list(c.notes),
    )


def build_report(
    degrees: Optional[List[int]] = None,
    random_count: Optional[int] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
) -> ClassifyReport:
    if random_count is not None:
        seed = settings.SWEEP_SEED if seed is None else seed
        batch = random_multidegrees(random_count, seed)
    else:
        batch = [tuple(degrees or ())]
    results = ordered_map(lambda d: to_model(classify_multidegree(d)), batch, threads)
    if random_count is None:
        seed = None
    return ClassifyReport(seed=seed, results=results)


def render_text(report: ClassifyReport) -> str:
    rows = [
        (
            ",".join(str(d) for d in r.degrees),
            " ".join(r.kinds),
            r.routes[0],
            "; ".join(r.notes),
        )
        for r in report.results
    ]
    return format_table(["degrees", "families", "route", "notes"], rows)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "classify", help="match multidegrees against the family constructions"
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--degrees", type=parse_int_list, help="e.g. 3,3,3,3,3")
    source.add_argument(
        "--random", type=int, metavar="N", help="classify N seeded multidegrees"
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> int:
    report = build_report(
        args.degrees, args.random, args.seed, getattr(args, "threads", None)
    )
    logger.info(f"Classified {len(report.results)} multidegrees")
    emit(report, output_format(args), render_text)
    return EXIT_OK
