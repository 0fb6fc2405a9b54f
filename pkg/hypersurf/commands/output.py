"""
Report rendering shared by the subcommands.

Reports are pydantic models. JSON output dumps the model with sorted keys;
text output is produced by the command's own renderer, usually through
``format_table``.
"""

import argparse
import json
import sys
from typing import Callable, Iterable, List, Optional, Sequence, TextIO

from pydantic import BaseModel

from hypersurf.core.config import settings


def output_format(args) -> str:
    return getattr(args, "output", None) or settings.OUTPUT_FORMAT


def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Left-aligned columns separated by two spaces."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_json(report: BaseModel) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True)


def emit(
    report: BaseModel,
    fmt: str,
    text: Callable[[BaseModel], str],
    stream: Optional[TextIO] = None,
) -> None:
    """Write a report to stdout in the requested format."""
    stream = stream or sys.stdout
    body = render_json(report) if fmt == "json" else text(report)
    stream.write(body.rstrip("\n") + "\n")


def parse_int_list(value: str) -> List[int]:
    """argparse type for comma separated integers ("3,3,3")."""
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers, got '{value}'"
        ) from None
