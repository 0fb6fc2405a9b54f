"""
Hypothesis checks, curve tracing and the hyperbolicity verdict.

Every omega-integral curve is followed up the tower with an iterated
Riemann-Hurwitz computation on the normalization of its preimage. A cover
step at level j restricted to a curve is cyclic of degree m_j, branched at
the points where the curve meets the level-j branch divisor, with local
exponent sum(tangency * a) over the branch curves through the point.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from hypersurf.core.concurrency import ordered_map
from hypersurf.core.error_handling import (
    InternalConsistencyError,
    SNCViolationError,
    UnsupportedGeometryError,
)
from hypersurf.services.geometry import (
    CurveFamily,
    GeomKind,
    Point,
    binary_quadratic_roots,
    contains_point,
    fiber_h,
    fiber_v,
    format_point,
    intersections,
    same_curve,
    tangent_line,
)
from hypersurf.services.hjsing import vanishing_certificate
from hypersurf.services.lattice import P2, DivClass, class_sum, is_q_ample
from hypersurf.services.tower import (
    Tower,
    fiber_tower_shape,
    node_inventory,
    node_singularity,
    node_sites,
)

logger = logging.getLogger(__name__)

GENERIC_PARAM_START = 1000


# ============================================================================
# Hypothesis Checks
# ============================================================================


@dataclass(frozen=True)
class CheckOutcome:
    name: str
    ok: bool
    witnesses: Tuple[str, ...] = ()
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CheckReport:
    multiplicity: CheckOutcome
    snc: CheckOutcome
    ampleness: CheckOutcome
    vanishing: CheckOutcome
    criterion_class: DivClass

    @property
    def multiplicity_ok(self) -> bool:
        return self.multiplicity.ok

    @property
    def snc_ok(self) -> bool:
        return self.snc.ok

    @property
    def ampleness_ok(self) -> bool:
        return self.ampleness.ok

    @property
    def vanishing_ok(self) -> bool:
        return self.vanishing.ok

    @property
    def outcomes(self) -> Tuple[CheckOutcome, ...]:
        return (self.multiplicity, self.snc, self.ampleness, self.vanishing)

    @property
    def all_passed(self) -> bool:
        return all(outcome.ok for outcome in self.outcomes)

    @property
    def failures(self) -> List[str]:
        return [
            f"{outcome.name}: {witness}"
            for outcome in self.outcomes
            if not outcome.ok
            for witness in outcome.witnesses
        ]


def criterion_class(t: Tower) -> DivClass:
    """sum_i (1/m_i) sum_j cls(D_ij) - L."""
    scaled = (level.branch_class * Fraction(1, level.m) for level in t.levels)
    return class_sum(t.base, scaled) - t.omega.L


def _check_multiplicities(t: Tower) -> CheckOutcome:
    witnesses, notes = [], []
    for index, level in enumerate(t.levels, start=1):
        for branch in level.curves:
            if not 0 < branch.a < level.m or gcd(branch.a, level.m) != 1:
                witnesses.append(f"level {index}: {branch.curve} has a={branch.a}")
    for inc in t.incidences:
        if inc.first[0] != inc.second[0]:
            continue
        m = t.levels[inc.first[0] - 1].m
        b1, b2 = t.branch_curve(inc.first), t.branch_curve(inc.second)
        if (b1.a + b2.a) % m:
            continue
        message = (
            f"level {inc.first[0]}: a({b1.curve}) + a({b2.curve}) = "
            f"{b1.a + b2.a} = 0 mod {m} at {format_point(inc.point)}"
        )
        if t.omega.coefficient_count(inc.point):
            notes.append(f"{message} (on a coefficient curve, waived)")
        else:
            witnesses.append(message)
    return CheckOutcome("multiplicity", not witnesses, tuple(witnesses), tuple(notes))


def check_hypotheses(t: Tower) -> CheckReport:
    """
    Evaluate the four hypotheses of the criterion on a built tower.

    Failures are reported as data with witnesses, never raised.
    """
    criterion = criterion_class(t)
    ampleness = CheckOutcome(
        "ampleness",
        is_q_ample(t.base, criterion),
        () if is_q_ample(t.base, criterion) else (f"{criterion} is not ample",),
    )
    multiplicity = _check_multiplicities(t)

    try:
        nodes = node_inventory(t)
    except SNCViolationError as e:
        logger.warning(f"SNC check failed: {e}")
        snc = CheckOutcome("snc", False, (str(e),))
        vanishing = CheckOutcome(
            "vanishing", False, ("node inventory unavailable without SNC",)
        )
        return CheckReport(multiplicity, snc, ampleness, vanishing, criterion)
    snc = CheckOutcome("snc", True)

    witnesses = []
    for record in nodes:
        if not record.same_level:
            continue
        sing = node_singularity(t, record)
        result = vanishing_certificate(sing, t.omega.r, record.coefficient_factors)
        if not result.passed:
            witnesses.append(
                f"{sing} at level {record.level_pair[0]} ({record.count} nodes): "
                f"order {min(result.min_orders)} along E_{result.witness_index}"
            )
    vanishing = CheckOutcome("vanishing", not witnesses, tuple(witnesses))
    return CheckReport(multiplicity, snc, ampleness, vanishing, criterion)


# ============================================================================
# Riemann-Hurwitz Engine
# ============================================================================


@dataclass(frozen=True)
class MarkedPoint:
    """
    Points of one component carrying the same exponents.

    ``exponents`` maps each later level to the order of that level's branch
    divisor restricted to the curve at the point; ``count`` is the number of
    such points on each component.
    """

    exponents: Tuple[Tuple[int, int], ...]
    count: int

    def exponent_at(self, level: int) -> int:
        return dict(self.exponents).get(level, 0)


class StepKind(str, Enum):
    COVER = "cover"
    UNBRANCHED = "unbranched"
    RAMIFICATION = "ramification"


@dataclass(frozen=True)
class TraceStep:
    level: int
    m: int
    kind: StepKind
    components: int
    genus: int
    degree: int
    branch_points: int = 0


@dataclass(frozen=True)
class CurveTrace:
    genus: int = 0
    components: int = 1
    degree_over_base_curve: int = 1
    marks: Tuple[MarkedPoint, ...] = ()
    level: int = 0
    history: Tuple[TraceStep, ...] = ()

    def __post_init__(self):
        if 2 * self.genus - 2 < -2 or self.components < 1:
            raise InternalConsistencyError(
                f"invalid trace state: genus {self.genus}, "
                f"{self.components} components"
            )
        if any(mark.count <= 0 for mark in self.marks):
            raise InternalConsistencyError("marked point counts must be positive")

    @property
    def marked(self) -> List[Tuple[int, int, int]]:
        """(level, exponent, count) per marked point group."""
        return [
            (level, exponent, mark.count)
            for mark in self.marks
            for level, exponent in mark.exponents
        ]


def _merge(marks: Sequence[MarkedPoint]) -> Tuple[MarkedPoint, ...]:
    counts: Counter = Counter()
    for mark in marks:
        if mark.exponents:
            counts[mark.exponents] += mark.count
    return tuple(MarkedPoint(exps, count) for exps, count in sorted(counts.items()))


def cover_restriction(
    trace: CurveTrace, m: int, branch_data: Optional[Sequence[int]] = None
) -> CurveTrace:
    """
    Restrict the next m-cyclic cover of the tower to the traced curve.

    Args:
        trace: Current state
        m: Degree of the cover
        branch_data: Extra exponents at this level, one point each per
            component, on top of the marks already carried by the trace

    Returns:
        The trace one level higher. With c = gcd(m, all exponents) the
        preimage splits into c times as many components, each a cyclic cover
        of degree m' = m / c with
        2g' - 2 = m'(2g - 2) + sum_p (m' - gcd(m', x_p / c)).

    Raises:
        InternalConsistencyError: If the Euler characteristic is not even
    """
    level = trace.level + 1
    marks = list(trace.marks)
    marks += [MarkedPoint(((level, x),), 1) for x in branch_data or () if x > 0]

    branched = [mark for mark in marks if mark.exponent_at(level) > 0]
    exponents = [mark.exponent_at(level) for mark in branched]
    c = reduce(gcd, exponents, m) if exponents else m
    m_prime = m // c

    euler = m_prime * (2 * trace.genus - 2)
    lifted = []
    for mark in marks:
        x = mark.exponent_at(level)
        rest = tuple((lv, e) for lv, e in mark.exponents if lv != level)
        if x == 0:
            lifted.append(MarkedPoint(rest, mark.count * m_prime))
            continue
        fibre = gcd(m_prime, x // c)
        euler += mark.count * (m_prime - fibre)
        rho = m_prime // fibre
        lifted.append(
            MarkedPoint(tuple((lv, e * rho) for lv, e in rest), mark.count * fibre)
        )

    if euler % 2:
        raise InternalConsistencyError(
            f"odd Euler characteristic {euler} at level {level} (m={m})"
        )
    genus = euler // 2 + 1
    components = trace.components * c
    degree = trace.degree_over_base_curve * m_prime
    kind = StepKind.COVER if branched else StepKind.UNBRANCHED
    if not branched:
        logger.debug(f"Unbranched restriction at level {level}: components x{m}")
    step = TraceStep(
        level, m, kind, components, genus, degree, sum(mk.count for mk in branched)
    )
    return CurveTrace(
        genus=genus,
        components=components,
        degree_over_base_curve=degree,
        marks=_merge(lifted),
        level=level,
        history=trace.history + (step,),
    )


def ramification_step(trace: CurveTrace, m: int) -> CurveTrace:
    """
    Pass a branch curve through its own level.

    Its reduced preimage maps isomorphically onto it, so genus and components
    are unchanged; the same-level nodes on it stop being marked.
    """
    level = trace.level + 1
    marks = [
        MarkedPoint(
            tuple((lv, e) for lv, e in mark.exponents if lv != level), mark.count
        )
        for mark in trace.marks
    ]
    step = TraceStep(
        level,
        m,
        StepKind.RAMIFICATION,
        trace.components,
        trace.genus,
        trace.degree_over_base_curve,
    )
    return replace(
        trace, marks=_merge(marks), level=level, history=trace.history + (step,)
    )


def closed_form_branch_genus(m: int, k: int) -> int:
    """
    Genus of a level-k branch component of an equal-degree fiber tower inside
    X_{k-1}: 2g - 2 = m^{k-1}((m-1)(k-1) - 2).
    """
    euler = m ** (k - 1) * ((m - 1) * (k - 1) - 2)
    return euler // 2 + 1


# ============================================================================
# Classification
# ============================================================================


class CurveRole(str, Enum):
    BRANCH = "branch"
    NAMED = "named"
    GENERIC = "generic"
    SPECIAL = "special"


@dataclass(frozen=True)
class CurveClassification:
    curve: str
    role: CurveRole
    level: Optional[int]
    components: int
    genus: Optional[int]
    degree: int = 1
    manual: Tuple[str, ...] = ()
    history: Tuple[TraceStep, ...] = ()

    @property
    def in_exceptional_locus(self) -> bool:
        return self.genus is not None and self.genus <= 1


def _marks_on(t: Tower, curve: CurveFamily) -> Tuple[Dict[Point, Dict[int, int]], bool]:
    """Exponents of every level's branch divisor along ``curve``, by point."""
    points: Dict[Point, Dict[int, int]] = defaultdict(lambda: defaultdict(int))
    branches_through: Counter = Counter()
    for ref in t.branch_refs():
        branch = t.branch_curve(ref)
        if same_curve(branch.curve, curve):
            continue
        for inc in intersections(curve, branch.curve):
            points[inc.point][ref[0]] += inc.tangency * branch.a
            branches_through[inc.point] += 1
    passes_node = any(n >= 2 for n in branches_through.values())
    return points, passes_node


def trace_curve(
    t: Tower, curve: CurveFamily, role: CurveRole = CurveRole.NAMED
) -> CurveClassification:
    """Follow ``curve`` through every level of the tower."""
    own = t.level_of(curve)
    if own is not None:
        role = CurveRole.BRANCH
    try:
        points, passes_node = _marks_on(t, curve)
    except UnsupportedGeometryError as e:
        logger.warning(f"Cannot trace {curve}: {e}")
        return CurveClassification(
            curve.describe(), role, own, 1, None, manual=(f"unresolved geometry: {e}",)
        )

    marks = [
        MarkedPoint(tuple(sorted((lv, x) for lv, x in exps.items() if lv != own)), 1)
        for exps in points.values()
    ]
    trace = CurveTrace(marks=_merge(marks))
    for index, level in enumerate(t.levels, start=1):
        if index == own:
            trace = ramification_step(trace, level.m)
        else:
            trace = cover_restriction(trace, level.m)

    manual = []
    if passes_node and trace.genus <= 1 and role != CurveRole.BRANCH:
        manual.append(
            f"passes through a node of the branch divisor and reaches genus "
            f"{trace.genus}"
        )
    return CurveClassification(
        curve=curve.describe(),
        role=role,
        level=own,
        components=trace.components,
        genus=trace.genus,
        degree=trace.degree_over_base_curve,
        manual=tuple(manual),
        history=trace.history,
    )


def _closed_form_check(t: Tower, result: CurveClassification) -> CurveClassification:
    shape = fiber_tower_shape(t)
    if shape is None or result.role != CurveRole.BRANCH or result.genus is None:
        return result
    m, _ = shape
    k = result.level
    traced = result.history[k - 1].genus
    expected = closed_form_branch_genus(m, k)
    if traced == expected:
        return result
    logger.error(
        f"{result.curve}: traced genus {traced} in X_{k - 1} disagrees with the "
        f"closed form {expected}"
    )
    conflict = f"engine genus {traced} conflicts with closed form {expected}"
    return replace(result, manual=result.manual + (f"{conflict} at level {k}",))


def _family_members_through(
    kind: GeomKind, point: Point
) -> List[CurveFamily]:
    if kind == GeomKind.FIBER_H:
        return [fiber_h(point[0])]
    if kind == GeomKind.FIBER_V:
        return [fiber_v(point[1])]
    # p^2 x + p y + z = 0
    x, y, z = point
    return [tangent_line(p) for p, _ in binary_quadratic_roots(x, y, z)]


def _generic_member(t: Tower, kind: GeomKind, sites: Sequence[Point]) -> CurveFamily:
    make = {
        GeomKind.FIBER_H: fiber_h,
        GeomKind.FIBER_V: fiber_v,
        GeomKind.LINE_TANGENT: tangent_line,
    }[kind]
    p = GENERIC_PARAM_START
    while True:
        curve = make(p)
        if t.level_of(curve) is None and not any(
            contains_point(curve, site) for site in sites
        ):
            return curve
        p += 1


def _candidates(t: Tower) -> List[Tuple[CurveFamily, CurveRole]]:
    candidates: List[Tuple[CurveFamily, CurveRole]] = []

    def add(curve: CurveFamily, role: CurveRole) -> None:
        if not any(same_curve(curve, seen) for seen, _ in candidates):
            candidates.append((curve, role))

    for ref in t.branch_refs():
        add(t.branch_curve(ref).curve, CurveRole.BRANCH)
    for curve in t.omega.named_members:
        add(curve, CurveRole.NAMED)

    sites = list(node_sites(t))
    family_kinds = sorted(t.omega.family_kinds, key=lambda kind: kind.value)
    for kind in family_kinds:
        add(_generic_member(t, kind, sites), CurveRole.GENERIC)
    for kind in family_kinds:
        for site in sites:
            if (t.base == P2) != (len(site) == 3):
                continue
            for curve in _family_members_through(kind, site):
                add(curve, CurveRole.SPECIAL)
    return candidates


def classify_preimages(
    t: Tower, threads: Optional[int] = None
) -> List[CurveClassification]:
    """
    Trace every omega-integral curve that can behave differently: the branch
    curves, the named integral curves, one generic member of each integral
    family, and the family members through nodes of the branch divisor.
    """
    candidates = _candidates(t)
    logger.info(
        f"Tracing {len(candidates)} integral curves through {len(t.levels)} levels"
    )

    def run(item: Tuple[CurveFamily, CurveRole]) -> CurveClassification:
        curve, role = item
        return _closed_form_check(t, trace_curve(t, curve, role))

    return ordered_map(run, candidates, threads)


# ============================================================================
# Verdict
# ============================================================================


class VerdictKind(str, Enum):
    HYPERBOLIC = "HYPERBOLIC"
    QUASI_HYPERBOLIC = "QUASI_HYPERBOLIC"
    GENUS_BOUND_ONLY = "GENUS_BOUND_ONLY"
    INCONCLUSIVE = "INCONCLUSIVE"


_RANKS = {
    VerdictKind.HYPERBOLIC: 3,
    VerdictKind.QUASI_HYPERBOLIC: 2,
    VerdictKind.GENUS_BOUND_ONLY: 1,
    VerdictKind.INCONCLUSIVE: 0,
}


def verdict_rank(kind: VerdictKind) -> int:
    return _RANKS[kind]


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    exceptional_locus: Tuple[CurveClassification, ...]
    checks: CheckReport
    curves: Tuple[CurveClassification, ...]
    reasons: Tuple[str, ...] = ()

    @property
    def manual(self) -> List[str]:
        return [f"{c.curve}: {reason}" for c in self.curves for reason in c.manual]


def verdict(t: Tower, threads: Optional[int] = None) -> Verdict:
    """
    Combine the hypothesis checks with the curve classification.

    INCONCLUSIVE when a check fails or a genus is unknown; GENUS_BOUND_ONLY
    when the integral curves of omega are not all known; otherwise
    QUASI_HYPERBOLIC or HYPERBOLIC depending on the genus <= 1 locus.
    """
    checks = check_hypotheses(t)
    curves = tuple(classify_preimages(t, threads))
    locus = tuple(c for c in curves if c.in_exceptional_locus)

    if not checks.all_passed:
        kind, reasons = VerdictKind.INCONCLUSIVE, tuple(checks.failures)
    elif not t.omega.all_solutions_algebraic:
        kind = VerdictKind.GENUS_BOUND_ONLY
        reasons = ("integral curves of omega are not all known",)
    elif any(c.genus is None for c in curves):
        kind = VerdictKind.INCONCLUSIVE
        reasons = tuple(f"{c.curve}: genus unknown" for c in curves if c.genus is None)
    elif locus:
        kind, reasons = VerdictKind.QUASI_HYPERBOLIC, ()
    else:
        kind, reasons = VerdictKind.HYPERBOLIC, ()

    logger.info(f"Verdict {kind.value} with {len(locus)} curves of genus <= 1")
    return Verdict(kind, locus, checks, curves, reasons)
