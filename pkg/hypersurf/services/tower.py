"""
Towers of cyclic covers branched along omega-integral curves.

A tower is declared level by level: level i is an m_i-cyclic cover branched
along sum_j a_ij D_ij, pulled back through every earlier level. Building a
tower validates the declaration and computes the exact pairwise incidences of
its branch curves; every other query is derived from those incidences.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd, prod
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from hypersurf.core.error_handling import (
    DuplicateCurveError,
    MultiplicityError,
    NonIntegralBranchError,
    NonIntegralClassError,
    SNCViolationError,
    SpecValidationError,
    StructuralError,
    UnsupportedGeometryError,
)
from hypersurf.services.geometry import (
    CurveFamily,
    GeomKind,
    Point,
    conic,
    contains_point,
    cuboid_curve,
    diagonal,
    fiber_h,
    fiber_v,
    format_point,
    intersections,
    same_curve,
    tangent_line,
)
from hypersurf.services.hjsing import SingularityType, resolution_data, sing_from_node
from hypersurf.services.lattice import (
    P1XP1,
    P2,
    BaseSurface,
    DivClass,
    class_sum,
    intersect,
)
from hypersurf.services.serialization import canonical_json

logger = logging.getLogger(__name__)


class OmegaId(str, Enum):
    """Built-in symmetric differentials."""

    FIBER_22 = "FIBER_22"
    FIBER_DIAG_44 = "FIBER_DIAG_44"
    FIBER_DIAG_66 = "FIBER_DIAG_66"
    TANGENT_CONIC_4 = "TANGENT_CONIC_4"
    CUBOID_33_0 = "CUBOID_33_0"
    CUBOID_33_1 = "CUBOID_33_1"
    CUBOID_33_2 = "CUBOID_33_2"
    CUBOID_33_3 = "CUBOID_33_3"


@dataclass(frozen=True)
class OmegaSpec:
    """
    A symmetric differential together with its integral curves.

    ``family_kinds`` are geometries whose every member is omega-integral;
    ``named_members`` are the remaining integral curves, listed one by one.
    ``coefficient_curves`` are the curves along which the coefficient of the
    differential vanishes.
    """

    id: OmegaId
    base: BaseSurface
    L: DivClass
    r: int
    family_kinds: FrozenSet[GeomKind]
    named_members: Tuple[CurveFamily, ...] = ()
    coefficient_curves: Tuple[CurveFamily, ...] = ()
    all_solutions_algebraic: bool = True

    @property
    def integral_families(self) -> List[str]:
        kinds = sorted(kind.value for kind in self.family_kinds)
        return [f"{kind}(*)" for kind in kinds] + [
            curve.describe() for curve in self.named_members
        ]

    def admits(self, curve: CurveFamily) -> bool:
        """Whether ``curve`` is an omega-integral curve."""
        if curve.surface != self.base.kind:
            return False
        if curve.geom in self.family_kinds:
            return True
        return any(same_curve(curve, member) for member in self.named_members)

    def coefficient_count(self, point: Point) -> int:
        """Number of coefficient curves through ``point``."""
        return sum(1 for c in self.coefficient_curves if contains_point(c, point))

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.id.value,
            "base": str(self.base),
            "L": [str(c) for c in self.L.coeffs],
            "r": self.r,
            "integral_families": self.integral_families,
            "coefficient_curves": [c.describe() for c in self.coefficient_curves],
            "all_solutions_algebraic": self.all_solutions_algebraic,
        }


_FIBERS = frozenset({GeomKind.FIBER_H, GeomKind.FIBER_V})
_DIAGONALS_44 = (diagonal(0, 1), diagonal(0, -1))
_DIAGONALS_66 = tuple(diagonal(c) for c in (0, -1, 1, 2))


def _cuboid_omega(i: int) -> OmegaSpec:
    curve = cuboid_curve(i)
    return OmegaSpec(
        id=OmegaId(f"CUBOID_33_{i}"),
        base=P1XP1,
        L=DivClass.of(3, 3),
        r=2,
        family_kinds=_FIBERS,
        named_members=(curve,),
        coefficient_curves=(curve,),
    )


OMEGA_SPECS: Dict[OmegaId, OmegaSpec] = {
    OmegaId.FIBER_22: OmegaSpec(
        id=OmegaId.FIBER_22,
        base=P1XP1,
        L=DivClass.of(2, 2),
        r=2,
        family_kinds=_FIBERS,
    ),
    OmegaId.FIBER_DIAG_44: OmegaSpec(
        id=OmegaId.FIBER_DIAG_44,
        base=P1XP1,
        L=DivClass.of(4, 4),
        r=2,
        family_kinds=_FIBERS,
        named_members=_DIAGONALS_44,
        coefficient_curves=_DIAGONALS_44,
    ),
    OmegaId.FIBER_DIAG_66: OmegaSpec(
        id=OmegaId.FIBER_DIAG_66,
        base=P1XP1,
        L=DivClass.of(6, 6),
        r=2,
        family_kinds=_FIBERS,
        named_members=_DIAGONALS_66,
        coefficient_curves=_DIAGONALS_66,
    ),
    OmegaId.TANGENT_CONIC_4: OmegaSpec(
        id=OmegaId.TANGENT_CONIC_4,
        base=P2,
        L=DivClass.of(4),
        r=2,
        family_kinds=frozenset({GeomKind.LINE_TANGENT}),
        named_members=(conic(),),
    ),
    **{OmegaId(f"CUBOID_33_{i}"): _cuboid_omega(i) for i in range(4)},
}


def omega_spec(name: str) -> OmegaSpec:
    try:
        return OMEGA_SPECS[OmegaId(name)]
    except ValueError:
        raise SpecValidationError(f"Unknown omega '{name}'") from None


@dataclass(frozen=True)
class BranchCurve:
    curve: CurveFamily
    a: int = 1


@dataclass(frozen=True)
class LevelSpec:
    """One m-cyclic cover branched along sum_j a_j D_j."""

    m: int
    curves: Tuple[BranchCurve, ...]

    @property
    def branch_class(self) -> DivClass:
        return class_sum(_base_of(self), (b.curve.cls for b in self.curves))

    @property
    def weighted_class(self) -> DivClass:
        return class_sum(_base_of(self), (b.a * b.curve.cls for b in self.curves))

    @property
    def M_class(self) -> DivClass:
        return self.weighted_class * Fraction(1, self.m)

    def to_dict(self) -> Dict[str, object]:
        return {
            "m": self.m,
            "curves": [dict(b.curve.to_dict(), a=b.a) for b in self.curves],
        }


def _base_of(level: LevelSpec) -> BaseSurface:
    if not level.curves:
        raise SpecValidationError("a level needs at least one branch curve")
    return P2 if level.curves[0].curve.surface == P2.kind else P1XP1


@dataclass(frozen=True)
class TowerSpec:
    base: BaseSurface
    omega: OmegaSpec
    levels: Tuple[LevelSpec, ...]

    def truncated(self, k: int) -> "TowerSpec":
        """The first ``k`` levels of the tower."""
        if not 0 <= k <= len(self.levels):
            raise StructuralError(f"cannot truncate {len(self.levels)} levels to {k}")
        return TowerSpec(self.base, self.omega, self.levels[:k])

    def to_dict(self) -> Dict[str, object]:
        return {
            "base": str(self.base),
            "omega": self.omega.id.value,
            "levels": [level.to_dict() for level in self.levels],
        }


CurveRef = Tuple[int, int]


@dataclass(frozen=True)
class PairIncidence:
    """Two branch curves, as (level, index) references, meeting at a point."""

    first: CurveRef
    second: CurveRef
    point: Point
    tangency: int


@dataclass(frozen=True)
class Tower:
    spec: TowerSpec
    incidences: Tuple[PairIncidence, ...] = field(repr=False)

    @property
    def base(self) -> BaseSurface:
        return self.spec.base

    @property
    def omega(self) -> OmegaSpec:
        return self.spec.omega

    @property
    def levels(self) -> Tuple[LevelSpec, ...]:
        return self.spec.levels

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(level.m for level in self.levels)

    @property
    def total_degree(self) -> int:
        return prod(self.degrees)

    @property
    def pullback_degrees(self) -> Tuple[int, ...]:
        """N_k = m_1 ... m_k for k = 1..n."""
        out, running = [], 1
        for m in self.degrees:
            running *= m
            out.append(running)
        return tuple(out)

    @property
    def M_classes(self) -> Tuple[DivClass, ...]:
        return tuple(level.M_class for level in self.levels)

    def branch_curve(self, ref: CurveRef) -> BranchCurve:
        level, index = ref
        return self.levels[level - 1].curves[index]

    def branch_refs(self) -> List[CurveRef]:
        return [
            (i, j)
            for i, level in enumerate(self.levels, start=1)
            for j in range(len(level.curves))
        ]

    def level_of(self, curve: CurveFamily) -> Optional[int]:
        """Level at which ``curve`` is a branch curve, if any."""
        for level, index in self.branch_refs():
            if same_curve(self.branch_curve((level, index)).curve, curve):
                return level
        return None

    def canonical_json(self) -> str:
        return canonical_json(self.spec.to_dict())


def _validate_level(level: LevelSpec, index: int, spec: TowerSpec) -> None:
    if level.m < 2:
        raise MultiplicityError(f"level {index}: m={level.m} must be at least 2")
    if not level.curves:
        raise SpecValidationError(f"level {index} has no branch curves")
    for branch in level.curves:
        if branch.curve.surface != spec.base.kind:
            raise UnsupportedGeometryError(
                f"level {index}: {branch.curve} does not live on {spec.base}"
            )
        if not spec.omega.admits(branch.curve):
            raise NonIntegralBranchError(
                f"level {index}: {branch.curve} is not integral for "
                f"{spec.omega.id.value}"
            )
        if not 0 < branch.a < level.m or gcd(branch.a, level.m) != 1:
            raise MultiplicityError(
                f"level {index}: multiplicity {branch.a} of {branch.curve} must "
                f"satisfy 0 < a < {level.m} and gcd(a, {level.m}) = 1"
            )
    if not level.M_class.is_integral:
        raise NonIntegralClassError(
            f"level {index}: {level.weighted_class} is not divisible by {level.m}"
        )


def build_tower(spec: TowerSpec) -> Tower:
    """
    Validate a tower declaration and compute its branch incidences.

    Raises:
        DuplicateCurveError: If a curve is declared twice
        NonIntegralClassError: If some M_i is not an integral class
        NonIntegralBranchError: If a branch curve is not omega-integral
        MultiplicityError: If a multiplicity or degree is out of range
        UnsupportedGeometryError: If an incidence cannot be computed exactly
    """
    if not spec.levels:
        raise SpecValidationError("a tower needs at least one level")
    if spec.omega.base != spec.base:
        raise UnsupportedGeometryError(
            f"{spec.omega.id.value} lives on {spec.omega.base}, not {spec.base}"
        )
    for index, level in enumerate(spec.levels, start=1):
        _validate_level(level, index, spec)

    refs = [
        (i, j)
        for i, level in enumerate(spec.levels, start=1)
        for j in range(len(level.curves))
    ]

    def curve_at(ref: CurveRef) -> CurveFamily:
        return spec.levels[ref[0] - 1].curves[ref[1]].curve

    incidences = []
    for x, first in enumerate(refs):
        for second in refs[x + 1 :]:
            c1, c2 = curve_at(first), curve_at(second)
            if same_curve(c1, c2):
                raise DuplicateCurveError(
                    f"{c1} appears at level {first[0]} and level {second[0]}"
                )
            for inc in intersections(c1, c2):
                incidences.append(PairIncidence(first, second, inc.point, inc.tangency))

    tower = Tower(spec, tuple(incidences))
    logger.info(
        f"Built tower over {spec.base} with degrees {tower.degrees} "
        f"(N={tower.total_degree}, {len(incidences)} incidences)"
    )
    return tower


@dataclass(frozen=True)
class NodeRecord:
    """Nodes of the branch divisor sharing level pair, multiplicities and curves."""

    level_pair: Tuple[int, int]
    count: int
    local_mults: Tuple[int, int]
    tangency: int = 1
    on_curves: Tuple[str, ...] = ()
    points: Tuple[str, ...] = ()
    coefficient_factors: int = 0

    @property
    def same_level(self) -> bool:
        return self.level_pair[0] == self.level_pair[1]


def node_sites(t: Tower) -> Dict[Point, List[PairIncidence]]:
    """Branch incidences grouped by point."""
    sites: Dict[Point, List[PairIncidence]] = defaultdict(list)
    for inc in t.incidences:
        sites[inc.point].append(inc)
    return dict(sites)


def _non_branch_named(t: Tower) -> List[CurveFamily]:
    seen: List[CurveFamily] = []
    for curve in t.omega.named_members + t.omega.coefficient_curves:
        if t.level_of(curve) is None and not any(same_curve(curve, s) for s in seen):
            seen.append(curve)
    return seen


def node_inventory(t: Tower) -> List[NodeRecord]:
    """
    Nodes of the total branch divisor grouped by level pair.

    Raises:
        SNCViolationError: If three branch curves share a point or two are
            tangent
    """
    named = _non_branch_named(t)
    groups: Dict[tuple, List[str]] = defaultdict(list)
    for point, incs in node_sites(t).items():
        curves = {ref for inc in incs for ref in (inc.first, inc.second)}
        if len(curves) > 2:
            names = ", ".join(str(t.branch_curve(ref).curve) for ref in sorted(curves))
            raise SNCViolationError(
                f"branch curves {names} all pass through {format_point(point)}"
            )
        (inc,) = incs
        if inc.tangency > 1:
            raise SNCViolationError(
                f"{t.branch_curve(inc.first).curve} and "
                f"{t.branch_curve(inc.second).curve} are tangent at "
                f"{format_point(point)}"
            )
        first, second = sorted((inc.first, inc.second))
        mults = (t.branch_curve(first).a, t.branch_curve(second).a)
        on = tuple(c.describe() for c in named if contains_point(c, point))
        key = (
            (first[0], second[0]),
            mults,
            inc.tangency,
            on,
            t.omega.coefficient_count(point),
        )
        groups[key].append(format_point(point))

    records = [
        NodeRecord(
            level_pair=pair,
            count=len(points),
            local_mults=mults,
            tangency=tangency,
            on_curves=on,
            points=tuple(sorted(points)),
            coefficient_factors=extra,
        )
        for (pair, mults, tangency, on, extra), points in groups.items()
    ]
    records.sort(key=lambda r: (r.level_pair, r.local_mults, r.on_curves))
    return records


@dataclass(frozen=True)
class IncidenceRecord:
    """A branch curve meeting a non-branch omega-integral curve."""

    level: int
    branch: str
    curve: str
    point: str
    tangency: int
    a: int


def incidence_inventory(t: Tower) -> List[IncidenceRecord]:
    """Incidences of branch curves with the named non-branch integral curves."""
    records = []
    for curve in _non_branch_named(t):
        for ref in t.branch_refs():
            branch = t.branch_curve(ref)
            for inc in intersections(branch.curve, curve):
                records.append(
                    IncidenceRecord(
                        level=ref[0],
                        branch=branch.curve.describe(),
                        curve=curve.describe(),
                        point=format_point(inc.point),
                        tangency=inc.tangency,
                        a=branch.a,
                    )
                )
    return records


def node_singularity(t: Tower, record: NodeRecord) -> SingularityType:
    m = t.levels[record.level_pair[0] - 1].m
    return sing_from_node(record.local_mults[0], record.local_mults[1], m)


def singularity_inventory(t: Tower) -> Dict[SingularityType, int]:
    """
    Singular points of X_n by canonical type.

    A same-level node at level i is totally ramified at level i and unramified
    at every other level, so it contributes prod_{j != i} m_j points.
    """
    inventory: Dict[SingularityType, int] = defaultdict(int)
    for record in node_inventory(t):
        if not record.same_level:
            continue
        level = record.level_pair[0]
        sing = node_singularity(t, record).canonical()
        inventory[sing] += record.count * t.total_degree // t.degrees[level - 1]
    return dict(sorted(inventory.items()))


@dataclass(frozen=True)
class ExceptionalCoefficients:
    sing: SingularityType
    nodes: int
    coefficients: Tuple[Fraction, ...]


@dataclass(frozen=True)
class LevelRamification:
    """g'^*(sum_j D_ij) = m_i R_i + m_i sum_k (1 + d_k) E_k at one level."""

    level: int
    m: int
    branch_class: DivClass
    exceptional: Tuple[ExceptionalCoefficients, ...]

    @property
    def all_a_series(self) -> bool:
        return all(e.sing.is_a_series for e in self.exceptional)


@dataclass(frozen=True)
class RamificationDecomposition:
    levels: Tuple[LevelRamification, ...]
    aggregate_branch_class: DivClass

    @property
    def all_a_series(self) -> bool:
        return all(level.all_a_series for level in self.levels)

    @property
    def reduces_to_r_plus_e(self) -> bool:
        """Equal degrees and crepant exceptional curves: g'^*(sum D / m) = R + E."""
        return self.all_a_series and len({level.m for level in self.levels}) == 1


def ramification_decomposition(t: Tower) -> RamificationDecomposition:
    nodes = node_inventory(t)
    levels = []
    for index, level in enumerate(t.levels, start=1):
        exceptional = []
        for record in nodes:
            if record.level_pair != (index, index):
                continue
            sing = node_singularity(t, record)
            data = resolution_data(sing)
            coefficients = tuple(
                Fraction(data.beta[k] + data.alpha[k], level.m)
                for k in range(1, data.s + 1)
            )
            exceptional.append(
                ExceptionalCoefficients(sing, record.count, coefficients)
            )
        levels.append(
            LevelRamification(index, level.m, level.branch_class, tuple(exceptional))
        )
    aggregate = class_sum(t.base, (level.branch_class for level in t.levels))
    return RamificationDecomposition(tuple(levels), aggregate)


def normalization_bundle_classes(level: LevelSpec, M: DivClass) -> List[DivClass]:
    """M^(i) = i M - sum_j floor(a_j i / m) D_j for i = 0..m-1."""
    out = []
    for i in range(level.m):
        cls = M * i
        for branch in level.curves:
            cls = cls - branch.curve.cls * ((branch.a * i) // level.m)
        out.append(cls)
    return out


def pullback_intersection(t: Tower, c1: DivClass, c2: DivClass) -> Fraction:
    """Intersection of the pull-backs to X_n (projection formula)."""
    return t.total_degree * intersect(t.base, c1, c2)


def fiber_tower_shape(t: Tower) -> Optional[Tuple[int, int]]:
    """
    (m, n) when the tower is an equal-degree fiber tower: every level has m
    horizontal and m vertical fibers, all with multiplicity 1.
    """
    if t.base != P1XP1:
        return None
    degrees = set(t.degrees)
    if len(degrees) != 1:
        return None
    (m,) = degrees
    for level in t.levels:
        kinds = [b.curve.geom for b in level.curves if b.a == 1]
        if len(kinds) != len(level.curves):
            return None
        if kinds.count(GeomKind.FIBER_H) != m or kinds.count(GeomKind.FIBER_V) != m:
            return None
    return m, len(t.levels)


def _fiber_level(m: int, params: Sequence) -> LevelSpec:
    curves = [BranchCurve(fiber_h(p)) for p in params]
    curves += [BranchCurve(fiber_v(p)) for p in params]
    return LevelSpec(m, tuple(curves))


CUBOID_LEVEL_PARAMS = (("0", "inf"), ("i", "-i"), ("1", "-1"))


def cuboid_spec() -> TowerSpec:
    """The three-level double cover tower of the perfect cuboid surface."""
    levels = tuple(_fiber_level(2, params) for params in CUBOID_LEVEL_PARAMS)
    return TowerSpec(P1XP1, OMEGA_SPECS[OmegaId.FIBER_22], levels)


def generalized_cuboid_spec(m: int, n: int) -> TowerSpec:
    """
    n levels of degree m, level k branched over m horizontal and m vertical
    fibers at the integers (k-1)m+1 .. km.
    """
    if m < 2 or n < 1:
        raise SpecValidationError(f"need m >= 2 and n >= 1, got m={m}, n={n}")
    levels = tuple(
        _fiber_level(m, range((k - 1) * m + 1, k * m + 1)) for k in range(1, n + 1)
    )
    return TowerSpec(P1XP1, OMEGA_SPECS[OmegaId.FIBER_22], levels)


def tangent_lines_spec(
    d: int = 15, m: int = 3, a: int = 1, params: Optional[Sequence] = None
) -> TowerSpec:
    """A single m-cyclic cover of P2 branched over d tangent lines to the conic."""
    params = list(params) if params is not None else list(range(1, d + 1))
    if len(params) != d:
        raise SpecValidationError(f"expected {d} line parameters, got {len(params)}")
    level = LevelSpec(m, tuple(BranchCurve(tangent_line(p), a) for p in params))
    return TowerSpec(P2, OMEGA_SPECS[OmegaId.TANGENT_CONIC_4], (level,))
