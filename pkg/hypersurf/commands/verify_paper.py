"""
`hypersurf verify-paper` - re-derive every published constant.

Each check recomputes a value from scratch and compares it exactly with the
expected one. Any mismatch exits with the internal-consistency status.
"""

import logging
import time
from fractions import Fraction
from math import gcd
from typing import Callable, List, Tuple

from pydantic import BaseModel, ConfigDict, Field

from hypersurf.commands.output import emit, format_table, output_format
from hypersurf.core.config import settings
from hypersurf.core.error_handling import EXIT_INTERNAL_CONSISTENCY, EXIT_OK
from hypersurf.services.certify import (
    VerdictKind,
    closed_form_branch_genus,
    trace_curve,
    verdict,
)
from hypersurf.services.genfam import (
    classify_multidegree,
    instantiate_family,
    random_multidegrees,
    validate_family,
)
from hypersurf.services.geometry import conic, cuboid_curve
from hypersurf.services.hjsing import (
    SingularityType,
    hj_evaluate,
    hj_expand,
    resolution_data,
    vanishing_certificate,
)
from hypersurf.services.invariants import (
    chi_via_pushforward,
    cuboid_report,
    level_invariants,
    noether_gap,
    noether_gap_closed_form,
    sweep_noether_gap,
)
from hypersurf.services.spec_loader import load_spec
from hypersurf.services.tower import (
    build_tower,
    cuboid_spec,
    generalized_cuboid_spec,
    singularity_inventory,
    tangent_lines_spec,
)

logger = logging.getLogger(__name__)

# (multidegree, every applicable family in order)
CLASSIFIER_TABLE: Tuple[Tuple[Tuple[int, ...], Tuple[str, ...]], ...] = (
    ((2, 2, 2, 2, 2, 2, 2, 2), ("FAM_A",)),
    ((2, 2, 2, 2, 2, 2, 2, 2, 2), ("FAM_A",)),
    ((3, 4, 5, 6, 7), ("FAM_B",)),
    ((3, 3, 3, 3, 3), ("FAM_B",)),
    ((5, 5, 5, 5, 5, 5), ("FAM_B",)),
    ((3, 3, 3, 3, 3, 3, 3, 3), ("FAM_B", "FAM_A")),
    ((2, 3, 3, 3), ("FAM_D",)),
    ((2, 3, 3, 3, 3), ("FAM_D",)),
    ((2, 3, 3, 3, 3, 3, 3, 3), ("FAM_D", "FAM_A")),
    ((2, 2, 3, 3, 3, 3), ("FAM_C",)),
    ((2, 2, 2, 2, 2, 3), ("FAM_C",)),
    ((2, 2, 2, 2, 2, 2, 2, 3), ("FAM_C", "FAM_A")),
    ((2, 2, 2, 2), ("NOT_COVERED",)),
    ((2, 2, 2, 2, 2), ("NOT_COVERED",)),
    ((2, 2, 2, 2, 2, 2), ("NOT_COVERED",)),
    ((2, 2, 2, 2, 2, 2, 2), ("NOT_COVERED",)),
    ((2, 2, 3, 3), ("NOT_COVERED",)),
    ((2, 2, 3, 3, 3), ("NOT_COVERED",)),
    ((3, 3, 3, 3), ("NOT_COVERED",)),
    ((4, 4, 4, 4), ("NOT_COVERED",)),
)


class CheckLine(BaseModel):
    name: str
    status: str = Field(..., description="PASS or FAIL")
    detail: str = ""
    seconds: float = 0.0


class VerifyReport(BaseModel):
    """One line per re-derived constant."""

    checks: List[CheckLine]
    passed: bool

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "checks": [
                    {
                        "name": "cuboid singular points",
                        "status": "PASS",
                        "detail": "48 A1",
                        "seconds": 0.4,
                    }
                ],
                "passed": True,
            }
        }
    )


# ============================================================================
# Checks
# ============================================================================


def _coprime_pairs(limit: int):
    for m in range(2, limit + 1):
        for q in range(1, m):
            if gcd(q, m) == 1:
                yield m, q


def check_hj_identities() -> Tuple[bool, str]:
    limit = settings.HJ_EXHAUSTION_LIMIT
    pairs = 0
    for m, q in _coprime_pairs(limit):
        sing = SingularityType(m, q)
        data = resolution_data(sing)
        a, b, g = data.alpha, data.beta, data.gamma
        if hj_evaluate(list(data.b)) != Fraction(m, q):
            return False, f"m/q != [b] for 1/{m}(1,{q})"
        if hj_expand(m, sing.q_inverse) != list(reversed(data.b)):
            return False, f"reversal fails for 1/{m}(1,{q})"
        for i in range(data.s + 1):
            if a[i + 1] * g[i] - a[i] * g[i + 1] != -1:
                return False, f"alpha/gamma determinant at 1/{m}(1,{q}), i={i}"
        if any(b[i] != q * a[i] - m * g[i] for i in range(data.s + 2)):
            return False, f"beta != q alpha - m gamma at 1/{m}(1,{q})"
        if not all(-1 < d <= 0 for d in data.discrepancies):
            return False, f"discrepancy out of range at 1/{m}(1,{q})"
        if all(d == 0 for d in data.discrepancies) != sing.is_a_series:
            return False, f"crepancy mismatch at 1/{m}(1,{q})"
        pairs += 1
    return True, f"{pairs} pairs with m <= {limit}"


def check_certificate_boundary() -> Tuple[bool, str]:
    limit = settings.HJ_EXHAUSTION_LIMIT
    for m, q in _coprime_pairs(limit):
        passed = vanishing_certificate(SingularityType(m, q), 2).passed
        if passed == (q == 1):
            return False, f"1/{m}(1,{q}) certificate {'PASS' if passed else 'FAIL'}"
    return True, f"fails exactly on 1/m(1,1) for m <= {limit}"


def check_cuboid_constants() -> Tuple[bool, str]:
    report = cuboid_report()
    partition_ok = all(
        p.e_count == 24 and p.e_prime_count == 24 for p in report.partition
    )
    inventory = report.curve_inventory
    ok = (
        report.sing_count == 48
        and partition_ok
        and report.e_prime_sum_is_2e
        and report.degree_bound_constant == 44
        and report.min_E_intersection == 8
        and inventory == {"rational": 32, "elliptic_fibers": 12, "elliptic_orbit": 48}
        and report.inventory_total == 92
    )
    return ok, (
        f"{report.sing_count} A1, E_i/E_i' = 24/24: {partition_ok}, "
        f"sum E_i' = 2E: {report.e_prime_sum_is_2e}, "
        f"bound 4g+{report.degree_bound_constant}, "
        f"min E.C {report.min_E_intersection}, {report.inventory_total} curves"
    )


def check_noether_sweep() -> Tuple[bool, str]:
    rows = sweep_noether_gap(range(2, 6), range(1, 7))
    bad = [(r.m, r.n) for r in rows if r.gap != r.expected]
    if bad:
        return False, f"closed form misses {bad}"
    return True, f"{len(rows)} towers, 2 <= m <= 5, 1 <= n <= 6"


def check_spot_values() -> Tuple[bool, str]:
    expected = {(2, 3): (8, 16, -48), (3, 3): (162, 864, -432)}
    found = []
    for (m, n), (chi, k2, gap) in expected.items():
        t = build_tower(generalized_cuboid_spec(m, n))
        top = level_invariants(t)[-1]
        if (top.chi, top.k2, noether_gap(t)) != (chi, k2, gap):
            return False, f"m={m}, n={n}: chi={top.chi}, K^2={top.k2}"
        if noether_gap_closed_form(m, n) != gap:
            return False, f"closed form at m={m}, n={n}"
        found.append(f"m={m},n={n}: chi={chi}, K^2={k2}, gap={gap}")
    return True, "; ".join(found)


def check_generalized_singularities() -> Tuple[bool, str]:
    inventory = singularity_inventory(build_tower(generalized_cuboid_spec(3, 3)))
    expected = {SingularityType(3, 2): 243}
    return inventory == expected, ", ".join(f"{n} {s}" for s, n in inventory.items())


def check_pushforward() -> Tuple[bool, str]:
    cases = (
        ("cuboid level 1", cuboid_spec().truncated(1), 1),
        ("15 tangent lines, m=3", tangent_lines_spec(), 43),
    )
    parts = []
    for name, spec, expected in cases:
        t = build_tower(spec)
        pushed = chi_via_pushforward(t)
        recursed = level_invariants(t)[-1].chi
        if not pushed == recursed == expected:
            return False, f"{name}: pushforward {pushed}, recursion {recursed}"
        parts.append(f"{name}: {pushed}")
    return True, "; ".join(parts)


def check_genus_engine() -> Tuple[bool, str]:
    compared = 0
    for m in range(2, 7):
        t = build_tower(generalized_cuboid_spec(m, 6))
        for k, level in enumerate(t.levels, start=1):
            curve = level.curves[0].curve
            traced = trace_curve(t, curve).history[k - 1].genus
            if traced != closed_form_branch_genus(m, k):
                return False, f"m={m}, k={k}: traced {traced}"
            compared += 1

    cuboid = build_tower(cuboid_spec())
    fibers = [
        trace_curve(cuboid, cuboid.branch_curve(ref).curve).genus
        for ref in cuboid.branch_refs()
    ]
    if set(fibers) != {1}:
        return False, f"cuboid fibers reach genera {sorted(set(fibers))}"
    for i in range(4):
        c = trace_curve(cuboid, cuboid_curve(i))
        if (c.components, c.genus) != (8, 0):
            return False, f"C_{i}: {c.components} components of genus {c.genus}"

    lines = build_tower(tangent_lines_spec())
    c = trace_curve(lines, conic())
    if (c.components, c.genus) != (1, 13):
        return False, f"conic: {c.components} components of genus {c.genus}"
    return True, (
        f"{compared} closed-form comparisons; cuboid fibers genus 1; "
        f"C_i 8 rational components; conic genus 13"
    )


def check_verdicts() -> Tuple[bool, str]:
    for m in range(3, 6):
        for n in range(3, 6):
            result = verdict(build_tower(generalized_cuboid_spec(m, n)))
            if result.kind != VerdictKind.HYPERBOLIC:
                return False, f"generalized cuboid m={m}, n={n}: {result.kind.value}"

    result = verdict(build_tower(cuboid_spec()))
    if result.kind != VerdictKind.INCONCLUSIVE or result.checks.vanishing_ok:
        return False, f"cuboid: {result.kind.value}"

    result = verdict(build_tower(tangent_lines_spec()))
    locus = {c.curve for c in result.exceptional_locus}
    lines = {f"LINE_TANGENT({p})" for p in range(1, 16)}
    if result.kind != VerdictKind.QUASI_HYPERBOLIC or locus != lines:
        return False, f"15 lines: {result.kind.value}, locus {sorted(locus)}"

    result = verdict(build_tower(load_spec("fam-a-n8")))
    if result.kind != VerdictKind.HYPERBOLIC:
        return False, f"fam-a-n8: {result.kind.value}"
    return True, (
        "generalized cuboids 3<=m,n<=5 HYPERBOLIC; cuboid INCONCLUSIVE; "
        "15 lines QUASI_HYPERBOLIC; fam-a-n8 HYPERBOLIC"
    )


def check_classifier() -> Tuple[bool, str]:
    for degrees, kinds in CLASSIFIER_TABLE:
        found = tuple(k.value for k in classify_multidegree(degrees).kinds)
        if found != kinds:
            return False, f"{degrees}: {found}, expected {kinds}"

    batch = random_multidegrees(100, settings.SWEEP_SEED)
    for degrees in batch:
        c = classify_multidegree(degrees)
        for kind in c.kinds:
            eqs = instantiate_family(kind, degrees)
            violations = validate_family(eqs)
            emitted = tuple(r.degree for r in eqs.equations)
            if violations or emitted != tuple(degrees):
                return False, f"{kind.value} {degrees}: {violations or emitted}"
    return True, (
        f"{len(CLASSIFIER_TABLE)} table entries; {len(batch)} seeded "
        f"multidegrees round-trip"
    )


CHECKS: Tuple[Tuple[str, Callable[[], Tuple[bool, str]]], ...] = (
    ("HJ identities", check_hj_identities),
    ("vanishing certificate boundary", check_certificate_boundary),
    ("cuboid constants", check_cuboid_constants),
    ("Noether gap sweep", check_noether_sweep),
    ("invariant spot values", check_spot_values),
    ("generalized cuboid singularities", check_generalized_singularities),
    ("chi via pushforward", check_pushforward),
    ("genus engine", check_genus_engine),
    ("verdicts", check_verdicts),
    ("family classifier", check_classifier),
)


def build_report() -> VerifyReport:
    lines = []
    for name, check in CHECKS:
        start = time.perf_counter()
        ok, detail = check()
        elapsed = round(time.perf_counter() - start, 3)
        if not ok:
            logger.error(f"{name}: {detail}")
        lines.append(
            CheckLine(
                name=name,
                status="PASS" if ok else "FAIL",
                detail=detail,
                seconds=elapsed,
            )
        )
    return VerifyReport(checks=lines, passed=all(c.status == "PASS" for c in lines))


def render_text(report: VerifyReport) -> str:
    rows = [(c.status, c.name, c.detail) for c in report.checks]
    summary = "all constants reproduced" if report.passed else "MISMATCH"
    return format_table(["status", "check", "detail"], rows) + f"\n\n{summary}"


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "verify-paper", help="re-derive the published constants"
    )
    parser.set_defaults(func=run)


def run(args) -> int:
    report = build_report()
    emit(report, output_format(args), render_text)
    return EXIT_OK if report.passed else EXIT_INTERNAL_CONSISTENCY
