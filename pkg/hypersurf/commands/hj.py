"""
`hypersurf hj M Q` - resolution data of the singularity 1/m(1, q).
"""

import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import emit, format_table, output_format
from hypersurf.core.error_handling import EXIT_OK
from hypersurf.services.hjsing import (
    SingularityType,
    resolution_data,
    vanishing_certificate,
)
from hypersurf.services.serialization import rational_str

logger = logging.getLogger(__name__)


class CertificateModel(BaseModel):
    r: int = Field(..., description="Symmetric degree of the differential")
    extra_factors: int = Field(0, description="Coefficient factors through the node")
    status: str = Field(..., description="PASS or FAIL")
    witness_index: Optional[int] = Field(
        None, description="First exceptional curve where a term survives"
    )
    min_orders: List[int] = Field(..., description="Minimal term order per E_l")


class HJReport(BaseModel):
    """Continued fraction, resolution sequences and vanishing certificate."""

    m: int
    q: int
    type: str = Field(..., description="Display name of 1/m(1,q)")
    canonical_q: int = Field(..., description="min(q, q^-1 mod m)")
    q_inverse: int
    b: List[int] = Field(..., description="Hirzebruch-Jung continued fraction")
    alpha: List[int]
    beta: List[int]
    gamma: List[int]
    discrepancies: List[str] = Field(..., description="Exact, as p/q strings")
    certificate: CertificateModel

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "m": 7,
                "q": 3,
                "type": "1/7(1,3)",
                "canonical_q": 3,
                "q_inverse": 5,
                "b": [3, 2, 2],
                "alpha": [0, 1, 3, 5, 7],
                "beta": [7, 3, 2, 1, 0],
                "gamma": [-1, 0, 1, 2, 3],
                "discrepancies": ["-3/7", "-2/7", "-1/7"],
                "certificate": {
                    "r": 2,
                    "extra_factors": 0,
                    "status": "PASS",
                    "witness_index": None,
                    "min_orders": [2, 3, 4],
                },
            }
        }
    )


def build_report(m: int, q: int, r: int = 2, extra_factors: int = 0) -> HJReport:
    sing = SingularityType(m, q)
    data = resolution_data(sing)
    cert = vanishing_certificate(sing, r, extra_factors)
    return HJReport(
        m=m,
        q=q,
        type=str(sing),
        canonical_q=sing.canonical().q,
        q_inverse=sing.q_inverse,
        b=list(data.b),
        alpha=list(data.alpha),
        beta=list(data.beta),
        gamma=list(data.gamma),
        discrepancies=[rational_str(d) for d in data.discrepancies],
        certificate=CertificateModel(
            r=r,
            extra_factors=extra_factors,
            status=cert.status.value,
            witness_index=cert.witness_index,
            min_orders=list(cert.min_orders),
        ),
    )


def render_text(report: HJReport) -> str:
    rows = [
        (f"E_{i}", b, report.alpha[i], report.beta[i], report.gamma[i], d)
        for i, (b, d) in enumerate(zip(report.b, report.discrepancies), start=1)
    ]
    cert = report.certificate
    verdict = cert.status
    if cert.witness_index is not None:
        verdict += f" (E_{cert.witness_index})"
    return "\n".join(
        [
            f"{report.type}  m/q = {report.m}/{report.q} = {report.b}",
            "",
            format_table(["curve", "b", "alpha", "beta", "gamma", "discrepancy"], rows),
            "",
            f"vanishing certificate r={cert.r}: {verdict}",
        ]
    )


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "hj", help="Hirzebruch-Jung resolution data of 1/m(1,q)"
    )
    parser.add_argument("m", type=int)
    parser.add_argument("q", type=int)
    parser.add_argument("--r", type=int, default=2, help="symmetric degree")
    parser.add_argument(
        "--extra", type=int, default=0, help="coefficient factors through the node"
    )
    parser.set_defaults(func=run)


def run(args) -> int:
    report = build_report(args.m, args.q, args.r, args.extra)
    logger.info(f"Resolved {report.type} with {len(report.b)} exceptional curves")
    emit(report, output_format(args), render_text)
    return EXIT_OK
