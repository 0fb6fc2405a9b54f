"""
Numerical invariants of the floors X_0, ..., X_n of a tower.

chi and K^2 follow the cyclic cover recursion

    chi_k = m chi_{k-1} + (m-1)(2m-1)/(12m) D^2 + (m-1)/4 D.K
    K_k   = g^*(K_{k-1} + (m-1)/m D)

with D the reduced level-k branch divisor pulled back to X_{k-1}. Canonical
classes are kept in the pull-back presentation on the base.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from hypersurf.core.concurrency import ordered_map
from hypersurf.core.error_handling import (
    DomainError,
    InternalConsistencyError,
    SpecValidationError,
)
from hypersurf.services.certify import trace_curve
from hypersurf.services.geometry import contains_point, cuboid_curve, format_point
from hypersurf.services.lattice import (
    DivClass,
    canonical_class,
    intersect,
    is_q_ample,
    riemann_roch_chi,
)
from hypersurf.services.tower import (
    Tower,
    build_tower,
    cuboid_spec,
    fiber_tower_shape,
    generalized_cuboid_spec,
    node_sites,
    normalization_bundle_classes,
    singularity_inventory,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LevelInvariants:
    level: int
    m: Optional[int]
    chi: Fraction
    k2: Fraction
    K_class: DivClass
    K_ample: bool
    D_sq: Optional[Fraction] = None
    D_dot_K: Optional[Fraction] = None
    branch_component_genus: Optional[int] = None
    recursion_exact: bool = True


def _branch_genus(t: Tower, level: int) -> Optional[int]:
    genera = {
        trace_curve(t, branch.curve).history[level - 1].genus
        for branch in t.levels[level - 1].curves
    }
    return genera.pop() if len(genera) == 1 else None


def level_invariants(t: Tower) -> List[LevelInvariants]:
    """
    Invariants of every floor, floor 0 being the base.

    Raises:
        SpecValidationError: If chi or K^2 is not an integer on a floor where
            the recursion is exact
        InternalConsistencyError: If K^2 disagrees with the pulled-back
            canonical class, or a fiber tower misses its closed forms
    """
    base = t.base
    K = canonical_class(base)
    chi = Fraction(1)
    k2 = intersect(base, K, K)
    floors = [LevelInvariants(0, None, chi, k2, K, is_q_ample(base, K))]
    shape = fiber_tower_shape(t)
    previous_degree = 1
    exact = True

    for index, level in enumerate(t.levels, start=1):
        m = level.m
        D = level.branch_class
        exact = exact and all(branch.a == 1 for branch in level.curves)
        d_sq = previous_degree * intersect(base, D, D)
        d_k = previous_degree * intersect(base, D, K)

        chi = (
            m * chi
            + Fraction((m - 1) * (2 * m - 1), 12 * m) * d_sq
            + Fraction(m - 1, 4) * d_k
        )
        ratio = Fraction(m - 1, m)
        k2 = m * (k2 + 2 * ratio * d_k + ratio * ratio * d_sq)
        K = K + D * ratio
        previous_degree *= m

        if k2 != previous_degree * intersect(base, K, K):
            raise InternalConsistencyError(
                f"level {index}: K^2 = {k2} but N K.K = "
                f"{previous_degree * intersect(base, K, K)}"
            )
        for name, value in (("chi", chi), ("K^2", k2)):
            if value.denominator == 1:
                continue
            if exact:
                raise SpecValidationError(
                    f"level {index}: {name} = {value} is not integral"
                )
            logger.warning(
                f"level {index}: {name} = {value} from the reduced recursion"
            )

        genus = _branch_genus(t, index)
        if shape is not None:
            if d_sq != 2 * m ** (index + 1) or (
                genus is not None and d_k != 2 * m * (2 * genus - 2)
            ):
                raise InternalConsistencyError(
                    f"level {index}: D^2 = {d_sq}, D.K = {d_k} miss the fiber "
                    f"tower closed forms"
                )
        floors.append(
            LevelInvariants(
                level=index,
                m=m,
                chi=chi,
                k2=k2,
                K_class=K,
                K_ample=is_q_ample(base, K),
                D_sq=d_sq,
                D_dot_K=d_k,
                branch_component_genus=genus,
                recursion_exact=exact,
            )
        )
    return floors


def noether_gap_closed_form(m: int, k: int) -> Fraction:
    """K^2 - 8 chi = -(2k/3) m^k (m^2 - 1) for the equal-degree fiber towers."""
    return -Fraction(2 * k, 3) * m**k * (m * m - 1)


def noether_gap(t: Tower) -> Fraction:
    """
    K^2 - 8 chi of the top floor, checked against the closed form on every
    floor.

    Raises:
        DomainError: If the tower is not an equal-degree fiber tower
        InternalConsistencyError: On any mismatch
    """
    shape = fiber_tower_shape(t)
    if shape is None:
        raise DomainError(
            "the Noether gap closed form needs an equal-degree fiber tower"
        )
    m, _ = shape
    gap = Fraction(0)
    for floor in level_invariants(t):
        gap = floor.k2 - 8 * floor.chi
        expected = noether_gap_closed_form(m, floor.level)
        if gap != expected:
            raise InternalConsistencyError(
                f"floor {floor.level}: K^2 - 8chi = {gap}, closed form {expected}"
            )
    return gap


@dataclass(frozen=True)
class GapSweepRow:
    m: int
    n: int
    gap: Fraction
    expected: Fraction
    K_ample: bool


def sweep_noether_gap(
    ms: Sequence[int], ns: Sequence[int], threads: Optional[int] = None
) -> List[GapSweepRow]:
    """Check the Noether gap closed form across generalized cuboid towers."""
    grid = [(m, n) for m in ms for n in ns]

    def run(item: Tuple[int, int]) -> GapSweepRow:
        m, n = item
        t = build_tower(generalized_cuboid_spec(m, n))
        gap = noether_gap(t)
        top = level_invariants(t)[-1]
        return GapSweepRow(m, n, gap, noether_gap_closed_form(m, n), top.K_ample)

    return ordered_map(run, grid, threads)


def chi_via_pushforward(t: Tower) -> Fraction:
    """
    chi(O_Y) of a single cyclic cover as sum_i chi(-M^(i)) on the base.

    Raises:
        DomainError: If the tower has more than one level
    """
    if len(t.levels) != 1:
        raise DomainError(
            f"pushforward chi needs a single-level tower, got {len(t.levels)}"
        )
    (level,) = t.levels
    classes = normalization_bundle_classes(level, level.M_class)
    return sum((riemann_roch_chi(t.base, -c) for c in classes), Fraction(0))


def forced_integrality_general(n: int, g: int, deg11: Fraction) -> bool:
    """Whether (4g - 4)/(n - 2) < deg11, forcing omega-integrality."""
    if n <= 2:
        raise DomainError(f"the bound needs n >= 3, got n={n}")
    return Fraction(4 * g - 4, n - 2) < Fraction(deg11)


def cuboid_inequality(deg: int, g: int, EdotC: int) -> bool:
    """
    Whether -deg + E.C' + 4g - 4 is negative, forcing the image of a cuboid
    curve to be omega-integral.
    """
    if deg < 1 or g < 0 or EdotC < 0:
        raise DomainError(f"need deg >= 1, g >= 0, E.C >= 0; got {deg}, {g}, {EdotC}")
    return -deg + EdotC + 4 * g - 4 < 0


@dataclass(frozen=True)
class CuboidPartition:
    index: int
    e_count: int
    e_prime_count: int
    nodes: Tuple[str, ...]


@dataclass(frozen=True)
class CuboidReport:
    sing_count: int
    partition: Tuple[CuboidPartition, ...]
    node_membership: Dict[str, Tuple[int, ...]]
    e_prime_sum_is_2e: bool
    degree_bound_constant: int
    min_E_intersection: int
    curve_inventory: Dict[str, int]
    certified_inequality: str
    asserted: Tuple[str, ...]

    @property
    def inventory_total(self) -> int:
        return sum(self.curve_inventory.values())


CUBOID_PER_CURVE_BOUND = 4
CUBOID_ORBIT_ELLIPTIC = 48


def cuboid_report() -> CuboidReport:
    """
    Bounds and curve inventory of the cuboid tower.

    Raises:
        InternalConsistencyError: If a node does not lie on exactly two C_i
    """
    t = build_tower(cuboid_spec())
    inventory = singularity_inventory(t)
    sing_count = sum(inventory.values())
    curves = [cuboid_curve(i) for i in range(4)]

    membership: Dict[str, Tuple[int, ...]] = {}
    singular_over: Dict[str, int] = {}
    for point, incs in node_sites(t).items():
        (inc,) = incs
        if inc.first[0] != inc.second[0]:
            continue
        label = format_point(point)
        on = tuple(i for i, c in enumerate(curves) if contains_point(c, point))
        if len(on) != 2:
            raise InternalConsistencyError(f"node {label} lies on C_i for i in {on}")
        membership[label] = on
        singular_over[label] = t.total_degree // t.degrees[inc.first[0] - 1]

    partition = []
    e_prime: Counter = Counter()
    for i in range(4):
        nodes = tuple(sorted(label for label, on in membership.items() if i in on))
        others = [label for label in membership if label not in nodes]
        count = sum(singular_over[label] for label in nodes)
        for label in others:
            e_prime[label] += singular_over[label]
        e_prime_count = sum(singular_over[label] for label in others)
        partition.append(CuboidPartition(i, count, e_prime_count, nodes))
    two_e = Counter({label: 2 * n for label, n in singular_over.items()})

    traces = [trace_curve(t, c) for c in curves]
    rational = sum(tr.components for tr in traces if tr.genus == 0)
    fibers = [trace_curve(t, t.branch_curve(ref).curve) for ref in t.branch_refs()]
    elliptic_fibers = sum(tr.components for tr in fibers if tr.genus == 1)

    return CuboidReport(
        sing_count=sing_count,
        partition=tuple(partition),
        node_membership=dict(sorted(membership.items())),
        e_prime_sum_is_2e=e_prime == two_e,
        degree_bound_constant=sing_count - 4,
        min_E_intersection=4 * CUBOID_PER_CURVE_BOUND // 2,
        curve_inventory={
            "rational": rational,
            "elliptic_fibers": elliptic_fibers,
            "elliptic_orbit": CUBOID_ORBIT_ELLIPTIC,
        },
        certified_inequality="E.C' >= deg(C) + 4 - 4g(C)",
        asserted=(
            "elliptic_orbit counts the automorphism orbit of one known elliptic "
            "curve; it is quoted, not traced",
            "a curve of genus <= 1 that is not omega-integral meets at least two "
            "of the singular points (relies on an external classification)",
        ),
    )
