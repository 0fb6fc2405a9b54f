"""
Explicit complete-intersection families of hyperbolic surfaces.

A multidegree is matched against the four constructions: tangent-line towers
over P2 (FAM_B), fiber towers over the quadric with degrees >= 3 (FAM_D),
fiber towers with degree-2 levels paired on the anti-diagonal (FAM_C) or on
shifted diagonals (FAM_A). On the quadric z0 z3 = z1 z2 the form
z0 - p z1 - q z2 + pq z3 cuts out the fibers x = q and w = p, so every
emitted system carries the tower it degenerates to at t = 0.
"""

import logging
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import count
from typing import Dict, List, Optional, Sequence, Tuple

import sympy
from sympy import QQ_I

from hypersurf.core.error_handling import DomainError, InternalConsistencyError
from hypersurf.services.geometry import INF, fiber_h, fiber_v, tangent_line, to_param
from hypersurf.services.lattice import P1XP1, P2
from hypersurf.services.tower import (
    CUBOID_LEVEL_PARAMS,
    OMEGA_SPECS,
    BranchCurve,
    LevelSpec,
    OmegaId,
    TowerSpec,
    cuboid_spec,
    generalized_cuboid_spec,
    tangent_lines_spec,
)

logger = logging.getLogger(__name__)

Z = sympy.symbols("z0:4")
X, Y, W = sympy.symbols("x y z")


class FamilyKind(str, Enum):
    FAM_A = "FAM_A"
    FAM_B = "FAM_B"
    FAM_C = "FAM_C"
    FAM_D = "FAM_D"
    NOT_COVERED = "NOT_COVERED"


class FamilyRoute(str, Enum):
    """How a family is constructed."""

    TANGENT_LINES = "tangent-line tower over P2"
    QUADRIC_FIBERS = "fiber tower over the quadric"
    ANTI_DIAGONAL_PAIRS = "fiber tower with degree-2 pairs on x = -w"
    SHIFTED_DIAGONAL_PAIRS = "fiber tower with degree-2 pairs on x - w in {0, 1, 2}"
    VIA_TANGENT_LINES = "delegated to the tangent-line tower"
    VIA_QUADRIC_FIBERS = "delegated to the quadric fiber tower"
    NONE = "no construction"


_CONSTRUCTION_OF = {
    FamilyRoute.VIA_TANGENT_LINES: FamilyKind.FAM_B,
    FamilyRoute.VIA_QUADRIC_FIBERS: FamilyKind.FAM_D,
}


@dataclass(frozen=True)
class Classification:
    degrees: Tuple[int, ...]
    kinds: Tuple[FamilyKind, ...]
    routes: Tuple[FamilyRoute, ...]
    notes: Tuple[str, ...] = ()

    @property
    def primary(self) -> FamilyKind:
        return self.kinds[0]

    @property
    def covered(self) -> bool:
        return self.primary != FamilyKind.NOT_COVERED


def classify_multidegree(degrees: Sequence[int]) -> Classification:
    """
    Match a multidegree against every construction.

    Kinds are listed with the weakest degree requirement first: FAM_B, FAM_D,
    FAM_C, FAM_A.

    Raises:
        DomainError: If the multidegree is empty or has a degree below 2
    """
    degrees = tuple(int(d) for d in degrees)
    if not degrees or min(degrees) < 2:
        raise DomainError(f"multidegree {degrees} needs entries >= 2")
    n = len(degrees)
    twos = degrees.count(2)

    found: List[Tuple[FamilyKind, FamilyRoute]] = []
    if twos == 0 and n >= 5:
        found.append((FamilyKind.FAM_B, FamilyRoute.TANGENT_LINES))
    if twos == 1 and n >= 4:
        found.append((FamilyKind.FAM_D, FamilyRoute.QUADRIC_FIBERS))
    if twos >= 2 and twos < n and n >= 6:
        found.append((FamilyKind.FAM_C, FamilyRoute.ANTI_DIAGONAL_PAIRS))
    if n >= 8:
        route = {
            0: FamilyRoute.VIA_TANGENT_LINES,
            1: FamilyRoute.VIA_QUADRIC_FIBERS,
        }.get(twos, FamilyRoute.SHIFTED_DIAGONAL_PAIRS)
        found.append((FamilyKind.FAM_A, route))

    notes = []
    if n == 4 and twos == 0 and len(set(degrees)) == 1:
        notes.append(
            f"hyperbolic examples of multidegree {degrees} are known from a "
            f"different construction"
        )
    if not found:
        return Classification(
            degrees, (FamilyKind.NOT_COVERED,), (FamilyRoute.NONE,), tuple(notes)
        )
    kinds, routes = zip(*found)
    return Classification(degrees, kinds, routes, tuple(notes))


@dataclass(frozen=True)
class EquationRecord:
    label: str
    lhs: sympy.Expr
    rhs: sympy.Expr
    degree: int
    perturbation: Optional[sympy.Expr] = None
    branch_forms: Tuple[sympy.Expr, ...] = ()

    def render(self) -> str:
        return f"{sympy.sstr(self.lhs)} = {sympy.sstr(self.rhs)}"


@dataclass(frozen=True)
class EquationSet:
    kind: Optional[FamilyKind]
    route: str
    degrees: Tuple[int, ...]
    ambient: str
    variables: Tuple[sympy.Symbol, ...]
    equations: Tuple[EquationRecord, ...]
    parameters: Dict[str, Dict[str, int]] = field(default_factory=dict)
    constraints: Tuple[str, ...] = ()
    tower: Optional[TowerSpec] = None
    notes: Tuple[str, ...] = ()


def _quadric_form(p, q) -> sympy.Expr:
    """z0 - p z1 - q z2 + pq z3 (with p or q = inf giving the limit form)."""
    if p is INF and q is INF:
        return Z[3]
    if p is INF:
        return Z[3] * q - Z[2]
    if q is INF:
        return Z[3] * p - Z[1]
    return Z[0] - p * Z[1] - q * Z[2] + p * q * Z[3]


def _line_form(a: int, b: int = 1) -> sympy.Expr:
    return a * a * X + a * b * Y + b * b * W


def _as_poly(expr: sympy.Expr, gens: Sequence[sympy.Symbol]) -> sympy.Poly:
    """Build ``expr`` as a polynomial factor by factor, without expanding it first."""
    if expr.is_Add or expr.is_Mul:
        parts = [_as_poly(arg, gens) for arg in expr.args]
        out = parts[0]
        for part in parts[1:]:
            out = out + part if expr.is_Add else out * part
        return out
    if expr.is_Pow and expr.exp.is_Integer and expr.exp > 0:
        return _as_poly(expr.base, gens) ** int(expr.exp)
    return sympy.Poly(expr, *gens)


def _divides(form: sympy.Expr, power: sympy.Expr) -> bool:
    """Whether ``form`` divides the coordinate power ``power``."""
    gens = sorted(form.free_symbols | power.free_symbols, key=str)
    poly = sympy.Poly(form, *gens)
    if poly.total_degree() == 1:
        # Linear forms are prime: only a multiple of the power's own variable.
        return len(poly.terms()) == 1 and power.free_symbols == form.free_symbols
    return sympy.div(power, form, *gens)[1] == 0


def _perturbation(degree: int, forms: Sequence[sympy.Expr], gens) -> sympy.Expr:
    """First pure coordinate power not divisible by any branch form."""
    for g in gens:
        candidate = g**degree
        if not any(_divides(form, candidate) for form in forms):
            return candidate
    raise InternalConsistencyError(f"no coordinate power of degree {degree} fits")


def _product(forms: Sequence[sympy.Expr]) -> sympy.Expr:
    out = sympy.Integer(1)
    for form in forms:
        out = out * form
    return out


def _fiber_tower_equations(
    level_pairs: Sequence[Sequence[Tuple[object, object]]],
    quadric_index: int,
    perturbed: bool,
) -> Tuple[Tuple[EquationRecord, ...], Tuple[sympy.Symbol, ...]]:
    """Equations of a fiber tower on the quadric, one per level plus the quadric."""
    n = len(level_pairs)
    ws = sympy.symbols(f"z4:{4 + n}")
    ts = sympy.symbols(f"t1:{n + 1}")
    records = []
    for i, pairs in enumerate(level_pairs):
        forms = [_quadric_form(p, q) for p, q in pairs]
        lhs = _product(forms)
        perturbation = None
        if perturbed:
            perturbation = _perturbation(len(forms), forms, Z)
            lhs = lhs + ts[i] * perturbation
        records.append(
            EquationRecord(
                label=f"level_{i + 1}",
                lhs=lhs,
                rhs=ws[i] ** len(forms),
                degree=len(forms),
                perturbation=perturbation,
                branch_forms=tuple(forms),
            )
        )
    quadric = EquationRecord("quadric", Z[0] * Z[3], Z[1] * Z[2], 2)
    records.insert(quadric_index, quadric)
    return tuple(records), tuple(Z) + tuple(ws)


def _fiber_levels(
    level_pairs: Sequence[Sequence[Tuple[object, object]]], degrees: Sequence[int]
) -> Tuple[LevelSpec, ...]:
    levels = []
    for m, pairs in zip(degrees, level_pairs):
        curves = []
        for p, q in pairs:
            for curve in (fiber_h(q), fiber_v(p)):
                if curve not in [b.curve for b in curves]:
                    curves.append(BranchCurve(curve))
        levels.append(LevelSpec(m, tuple(curves)))
    return tuple(levels)


def _split_quadric(degrees: Sequence[int]) -> Tuple[int, List[int]]:
    index = list(degrees).index(2)
    return index, [d for i, d in enumerate(degrees) if i != index]


def _instantiate_d(degrees: Sequence[int]) -> EquationSet:
    index, levels = _split_quadric(degrees)
    values = count(1)
    level_pairs, params = [], {"a": {}, "b": {}}
    for i, m in enumerate(levels, start=1):
        pairs = []
        for j in range(1, m + 1):
            v = next(values)
            pairs.append((v, v))
            params["a"][f"a_{i}_{j}"] = v
            params["b"][f"b_{i}_{j}"] = v
        level_pairs.append(pairs)
    equations, variables = _fiber_tower_equations(level_pairs, index, True)
    tower = TowerSpec(
        P1XP1, OMEGA_SPECS[OmegaId.FIBER_22], _fiber_levels(level_pairs, levels)
    )
    return EquationSet(
        kind=FamilyKind.FAM_D,
        route=FamilyRoute.QUADRIC_FIBERS.value,
        degrees=tuple(degrees),
        ambient=f"P^{len(variables) - 1}",
        variables=variables,
        equations=equations,
        parameters=params,
        constraints=("a distinct", "b distinct"),
        tower=tower,
    )


def _instantiate_pairs(kind: FamilyKind, degrees: Sequence[int]) -> EquationSet:
    """FAM_C and FAM_A: degree-2 levels paired on diagonals, others free."""
    index, levels = _split_quadric(degrees)
    r = levels.count(2)
    shifted = kind == FamilyKind.FAM_A
    step = 3 if shifted else 1
    free = count(3 * r + 2, 3) if shifted else count(r + 1)

    params: Dict[str, Dict[str, int]] = {"a": {}, "b": {}, "c": {}}
    level_pairs = []
    a_index = 0
    for i, m in enumerate(levels, start=1):
        if m == 2:
            a_index += 1
            a = step * a_index
            params["a"][f"a_{i}"] = a
            second = (a - 1, a + 1) if shifted else (-a, -a)
            level_pairs.append([(a, a), second])
            continue
        pairs = []
        for j in range(1, m + 1):
            v = next(free)
            params["b"][f"b_{i}_{j}"] = v
            params["c"][f"c_{i}_{j}"] = v
            pairs.append((v, v))
        level_pairs.append(pairs)

    equations, variables = _fiber_tower_equations(level_pairs, index, True)
    omega = OmegaId.FIBER_DIAG_66 if shifted else OmegaId.FIBER_DIAG_44
    tower = TowerSpec(P1XP1, OMEGA_SPECS[omega], _fiber_levels(level_pairs, levels))
    if shifted:
        constraints = (
            "a distinct",
            "a_i != a_j +- 1",
            "b, c != a_k, a_k +- 1",
            "b distinct",
            "c distinct",
        )
        route = FamilyRoute.SHIFTED_DIAGONAL_PAIRS
    else:
        constraints = ("a_i != +-a_j", "b, c != +-a_k", "b distinct", "c distinct")
        route = FamilyRoute.ANTI_DIAGONAL_PAIRS
    notes = ()
    if r == len(levels):
        notes = ("every level has degree 2; the (1,1) curves may split",)
    return EquationSet(
        kind=kind,
        route=route.value,
        degrees=tuple(degrees),
        ambient=f"P^{len(variables) - 1}",
        variables=variables,
        equations=equations,
        parameters=params,
        constraints=constraints,
        tower=tower,
        notes=notes,
    )


def _instantiate_b(degrees: Sequence[int]) -> EquationSet:
    n = len(degrees)
    ws = sympy.symbols(f"w1:{n + 1}")
    ts = sympy.symbols(f"t1:{n + 1}")
    values = count(1)
    params: Dict[str, Dict[str, int]] = {"a": {}, "b": {}}
    records, levels = [], []
    for i, m in enumerate(degrees, start=1):
        points = []
        for j in range(1, m + 1):
            a = next(values)
            params["a"][f"a_{i}_{j}"] = a
            params["b"][f"b_{i}_{j}"] = 1
            points.append(a)
        forms = [_line_form(a) for a in points]
        perturbation = _perturbation(m, forms, (X, Y, W))
        records.append(
            EquationRecord(
                label=f"level_{i}",
                lhs=_product(forms) + ts[i - 1] * perturbation,
                rhs=ws[i - 1] ** m,
                degree=m,
                perturbation=perturbation,
                branch_forms=tuple(forms),
            )
        )
        levels.append(
            LevelSpec(m, tuple(BranchCurve(tangent_line(a)) for a in points))
        )
    tower = TowerSpec(P2, OMEGA_SPECS[OmegaId.TANGENT_CONIC_4], tuple(levels))
    variables = (X, Y, W) + tuple(ws)
    return EquationSet(
        kind=FamilyKind.FAM_B,
        route=FamilyRoute.TANGENT_LINES.value,
        degrees=tuple(degrees),
        ambient=f"P^{len(variables) - 1}",
        variables=variables,
        equations=tuple(records),
        parameters=params,
        constraints=("[a:b] distinct",),
        tower=tower,
    )


def instantiate_family(kind: FamilyKind, degrees: Sequence[int]) -> EquationSet:
    """
    Emit the equations of a family for the given multidegree.

    Raises:
        DomainError: If ``kind`` does not cover the multidegree
        InternalConsistencyError: If the emitted system fails validation
    """
    classification = classify_multidegree(degrees)
    if kind not in classification.kinds or kind == FamilyKind.NOT_COVERED:
        raise DomainError(f"{kind.value} does not cover {classification.degrees}")
    route = classification.routes[classification.kinds.index(kind)]
    target = _CONSTRUCTION_OF.get(route, kind)

    if target == FamilyKind.FAM_B:
        eqs = _instantiate_b(classification.degrees)
    elif target == FamilyKind.FAM_D:
        eqs = _instantiate_d(classification.degrees)
    else:
        eqs = _instantiate_pairs(target, classification.degrees)
    if target != kind:
        eqs = replace(eqs, kind=kind, route=route.value)

    violations = validate_family(eqs)
    if violations:
        raise InternalConsistencyError(
            f"generated {kind.value} family violates: {'; '.join(violations)}"
        )
    logger.info(f"Instantiated {kind.value} for {classification.degrees}")
    return eqs


def _duplicates(group: Dict[str, int]) -> List[str]:
    seen: Dict[int, str] = {}
    out = []
    for label, value in group.items():
        if value in seen:
            out.append(f"{seen[value]} = {label} = {value}")
        else:
            seen[value] = label
    return out


def _construction_of(eqs: EquationSet) -> Optional[FamilyKind]:
    for route, target in _CONSTRUCTION_OF.items():
        if eqs.route == route.value:
            return target
    return eqs.kind


def validate_family(eqs: EquationSet) -> List[str]:
    """
    Re-check the parameter constraints and the emitted equations.

    Returns:
        Violations with the offending labels; empty when the family is valid
    """
    violations = []
    degrees = [record.degree for record in eqs.equations]
    if tuple(degrees) != tuple(eqs.degrees):
        violations.append(f"equation degrees {degrees} != multidegree {eqs.degrees}")
    for record in eqs.equations:
        expr = record.lhs - record.rhs
        gens = [v for v in eqs.variables if v in expr.free_symbols]
        actual = _as_poly(expr, gens).total_degree()
        if actual != record.degree:
            violations.append(f"{record.label} has degree {actual}")
        if record.perturbation is None:
            continue
        for form in record.branch_forms:
            if _divides(form, record.perturbation):
                violations.append(f"{record.label}: {form} divides the perturbation")

    params = eqs.parameters
    kind = _construction_of(eqs)
    if kind in (FamilyKind.FAM_D, FamilyKind.FAM_C, FamilyKind.FAM_A):
        for group in ("b", "c") if kind != FamilyKind.FAM_D else ("a", "b"):
            violations += _duplicates(params.get(group, {}))
    if kind in (FamilyKind.FAM_C, FamilyKind.FAM_A):
        a_values = params.get("a", {})
        violations += _duplicates(a_values)
        avoid = (0, 1, -1) if kind == FamilyKind.FAM_A else (0,)
        labels = list(a_values.items())
        for x, (label1, a1) in enumerate(labels):
            for label2, a2 in labels[x + 1 :]:
                if kind == FamilyKind.FAM_C and a1 == -a2:
                    violations.append(f"{label1} = -{label2}")
                if kind == FamilyKind.FAM_A and abs(a1 - a2) == 1:
                    violations.append(f"{label1} = {label2} +- 1")
        for group in ("b", "c"):
            for label, v in params.get(group, {}).items():
                for a_label, a in a_values.items():
                    if kind == FamilyKind.FAM_C and v in (a, -a):
                        violations.append(f"{label} = +-{a_label}")
                    if kind == FamilyKind.FAM_A and v - a in avoid:
                        violations.append(f"{label} in {a_label} + {{0, +-1}}")
    if kind == FamilyKind.FAM_B:
        points = [
            (params["a"][label], params["b"][label.replace("a_", "b_", 1)])
            for label in params.get("a", {})
        ]
        labels = list(params.get("a", {}))
        for x, (a1, b1) in enumerate(points):
            for y in range(x + 1, len(points)):
                a2, b2 = points[y]
                if a1 * b2 == a2 * b1:
                    violations.append(f"[{labels[x]}] = [{labels[y]}] in P1")
    return violations


def weighted_hypersurface(d: int = 15, m: int = 3, a: int = 1) -> EquationSet:
    """
    prod_{i=1}^d (i^2 x + i y + z)^a = w^m in P(1, 1, 1, da/m).

    Raises:
        DomainError: If m does not divide da
    """
    if (d * a) % m:
        raise DomainError(f"m={m} must divide d*a={d * a}")
    weight = d * a // m
    w = sympy.Symbol("w")
    forms = [_line_form(i) for i in range(1, d + 1)]
    record = EquationRecord(
        label="cover",
        lhs=_product([form**a for form in forms]),
        rhs=w**m,
        degree=d * a,
        branch_forms=tuple(forms),
    )
    return EquationSet(
        kind=None,
        route="weighted cyclic cover of P2",
        degrees=(d * a,),
        ambient=f"P(1,1,1,{weight})",
        variables=(X, Y, W, w),
        equations=(record,),
        parameters={"a": {f"a_{i}": i for i in range(1, d + 1)}},
        tower=tangent_lines_spec(d, m, a),
        notes=(f"w has weight {weight}; the equation is weighted homogeneous",),
    )


def generalized_cuboid(m: int, n: int) -> EquationSet:
    """The generalized cuboid of degree m with n levels in P^{n+3}."""
    spec = generalized_cuboid_spec(m, n)
    level_pairs = [
        [(p, p) for p in range((k - 1) * m + 1, k * m + 1)] for k in range(1, n + 1)
    ]
    params = {
        f"p_{k}_{j}": p
        for k, pairs in enumerate(level_pairs, start=1)
        for j, (p, _) in enumerate(pairs, start=1)
    }
    equations, variables = _fiber_tower_equations(level_pairs, n, False)
    return EquationSet(
        kind=None,
        route=FamilyRoute.QUADRIC_FIBERS.value,
        degrees=(m,) * n + (2,),
        ambient=f"P^{n + 3}",
        variables=variables,
        equations=equations,
        parameters={"p": params},
        tower=spec,
    )


def surface_of_cuboids() -> EquationSet:
    """The cuboid tower written on the quadric, fibers at {0, inf}, {i, -i}, {1, -1}."""
    level_pairs = [
        [(to_param(p), to_param(p)) for p in params] for params in CUBOID_LEVEL_PARAMS
    ]
    sym_pairs = [[(_sym(p), _sym(q)) for p, q in pairs] for pairs in level_pairs]
    equations, variables = _fiber_tower_equations(sym_pairs, 3, False)
    expanded = tuple(
        EquationRecord(
            r.label, sympy.expand(r.lhs), r.rhs, r.degree, branch_forms=r.branch_forms
        )
        for r in equations
    )
    return EquationSet(
        kind=None,
        route=FamilyRoute.QUADRIC_FIBERS.value,
        degrees=(2, 2, 2, 2),
        ambient="P^6",
        variables=variables,
        equations=expanded,
        tower=cuboid_spec(),
        notes=("over Q(i) this model is isomorphic to the Euler cuboid surface",),
    )


def _sym(p):
    return INF if p is INF else QQ_I.to_sympy(p)


def random_multidegrees(
    size: int, seed: int, max_length: int = 10, max_degree: int = 6
) -> List[Tuple[int, ...]]:
    """``size`` multidegrees drawn from a seeded generator."""
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        length = rng.randint(4, max_length)
        degrees = tuple(rng.randint(2, max_degree) for _ in range(length))
        if classify_multidegree(degrees).covered:
            out.append(degrees)
    return out
