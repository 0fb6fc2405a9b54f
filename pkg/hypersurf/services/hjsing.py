"""
Local arithmetic of cyclic quotient singularities 1/m(1, q).

Covers the Hirzebruch-Jung continued fraction m/q = [b_1, ..., b_s], the
resolution sequences alpha, beta, gamma, the discrepancies, and the vanishing
orders of pulled-back monomial differentials along the exceptional curves.

Conventions: u, v are the coordinates downstairs, and E_0, E_{s+1} are the
strict transforms of u = 0 and v = 0. beta_l and alpha_l are the orders of u
and v along E_l, so that on the chart between E_l and E_{l+1}

    u = u_l^{beta_l} u_{l+1}^{beta_{l+1}},  v = u_l^{alpha_l} u_{l+1}^{alpha_{l+1}}.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import List, Optional, Tuple

from hypersurf.core.error_handling import DomainError, StructuralError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class SingularityType:
    """The cyclic quotient singularity 1/m(1, q)."""

    m: int
    q: int

    def __post_init__(self):
        if self.m < 2 or not 0 < self.q < self.m:
            raise DomainError(f"1/{self.m}(1,{self.q}): need 0 < q < m")
        if gcd(self.q, self.m) != 1:
            raise DomainError(f"1/{self.m}(1,{self.q}): gcd(q, m) must be 1")

    @property
    def q_inverse(self) -> int:
        return pow(self.q, -1, self.m)

    @property
    def is_a_series(self) -> bool:
        """Type A_{m-1}, i.e. q = m - 1."""
        return self.q == self.m - 1

    def canonical(self) -> "SingularityType":
        """Representative invariant under swapping the two axes."""
        return SingularityType(self.m, min(self.q, self.q_inverse))

    def __str__(self) -> str:
        if self.is_a_series:
            return f"A{self.m - 1}"
        return f"1/{self.m}(1,{self.q})"


@dataclass(frozen=True)
class ResolutionData:
    sing: SingularityType
    b: Tuple[int, ...]
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]
    gamma: Tuple[int, ...]
    discrepancies: Tuple[Fraction, ...]

    @property
    def s(self) -> int:
        """Length of the exceptional chain."""
        return len(self.b)


class CertificateStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


@dataclass(frozen=True)
class CertificateResult:
    """Outcome of the vanishing check along every exceptional curve."""

    sing: SingularityType
    r: int
    status: CertificateStatus
    extra_factors: int = 0
    witness_index: Optional[int] = None
    min_orders: Tuple[int, ...] = ()

    @property
    def passed(self) -> bool:
        return self.status == CertificateStatus.PASS


def _check_pair(m: int, q: int) -> None:
    if m < 2 or not 0 < q < m:
        raise DomainError(f"hj_expand({m}, {q}): need 0 < q < m")
    if gcd(q, m) != 1:
        raise DomainError(f"hj_expand({m}, {q}): gcd(q, m) must be 1")


def hj_expand(m: int, q: int) -> List[int]:
    """
    Hirzebruch-Jung continued fraction of m/q.

    Args:
        m: Order of the cyclic group
        q: Weight, 0 < q < m and coprime to m

    Returns:
        [b_1, ..., b_s] with every b_i >= 2

    Raises:
        DomainError: If q is out of range or not coprime to m
    """
    _check_pair(m, q)
    b = []
    num, den = m, q
    while den:
        bi = -(-num // den)
        b.append(bi)
        num, den = den, bi * den - num
    return b


def hj_evaluate(b: List[int]) -> Fraction:
    """Evaluate b_1 - 1/(b_2 - 1/(... - 1/b_s))."""
    value = Fraction(b[-1])
    for bi in reversed(b[:-1]):
        value = bi - 1 / value
    return value


def _recurse(b: Tuple[int, ...], first: int, second: int) -> Tuple[int, ...]:
    seq = [first, second]
    for i, bi in enumerate(b, start=1):
        seq.append(bi * seq[i] - seq[i - 1])
    return tuple(seq)


@lru_cache(maxsize=4096)
def resolution_data(sing: SingularityType) -> ResolutionData:
    """
    Resolution sequences of 1/m(1, q).

    beta, alpha and gamma all follow x_{i+1} = b_i x_i - x_{i-1} from
    (m, q), (0, 1) and (-1, 0) respectively; the discrepancy of E_i is
    -1 + (beta_i + alpha_i) / m.
    """
    m = sing.m
    b = tuple(hj_expand(m, sing.q))
    beta = _recurse(b, m, sing.q)
    alpha = _recurse(b, 0, 1)
    gamma = _recurse(b, -1, 0)
    discrepancies = tuple(
        Fraction(beta[i] + alpha[i], m) - 1 for i in range(1, len(b) + 1)
    )
    return ResolutionData(sing, b, alpha, beta, gamma, discrepancies)


def local_chart_exponents(
    data: ResolutionData, i: int
) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """
    Exponents of u and v on the chart with coordinates (u_i, u_{i+1}).

    Returns:
        ((beta_i, beta_{i+1}), (alpha_i, alpha_{i+1})) for 0 <= i <= s
    """
    if not 0 <= i <= data.s:
        raise StructuralError(f"chart index {i} outside 0..{data.s}")
    return (data.beta[i], data.beta[i + 1]), (data.alpha[i], data.alpha[i + 1])


def sing_from_node(a_u: int, a_v: int, m: int) -> SingularityType:
    """
    Singularity over a node of two branch curves with multiplicities a_u, a_v.

    The local model w^m = u^{a_u} v^{a_v} normalizes to 1/m(1, q) with
    a_u q + a_v = 0 mod m.
    """
    for a in (a_u, a_v):
        if not 0 < a < m:
            raise DomainError(f"multiplicity {a} outside 0 < a < {m}")
        if gcd(a, m) != 1:
            raise DomainError(f"multiplicity {a} not coprime to {m}")
    q = (-a_v * pow(a_u, -1, m)) % m
    return SingularityType(m, q)


def term_vanishing_order(
    data: ResolutionData,
    index: int,
    c_u: int,
    c_v: int,
    du_power: int,
    dv_power: int,
    extra_factors: int = 0,
) -> int:
    """
    Certified order along E_index of the pull-back of u^c_u v^c_v du^i dv^j.

    du pulls back with order at least beta - 1 and dv with alpha - 1 (both
    read at E_index).
    Each extra linear factor of the coefficient through the node adds
    min(beta, alpha).

    Raises:
        StructuralError: If index is not an exceptional index
    """
    if not 1 <= index <= data.s:
        raise StructuralError(f"exceptional index {index} outside 1..{data.s}")
    if min(c_u, c_v, du_power, dv_power, extra_factors) < 0:
        raise DomainError("exponents must be nonnegative")
    beta, alpha = data.beta[index], data.alpha[index]
    return (
        c_u * beta
        + c_v * alpha
        + du_power * (beta - 1)
        + dv_power * (alpha - 1)
        + extra_factors * min(beta, alpha)
    )


def _term_orders(data: ResolutionData, index: int, r: int, extra: int) -> List[int]:
    # du^{r-k} dv^k; the pure terms carry a v (k = 0) or a u (k = r) factor
    orders = []
    for k in range(r + 1):
        c_u = 1 if k == r else 0
        c_v = 1 if k == 0 else 0
        orders.append(term_vanishing_order(data, index, c_u, c_v, r - k, k, extra))
    return orders


def vanishing_certificate(
    sing: SingularityType, r: int, extra_factors: int = 0
) -> CertificateResult:
    """
    Check that every term of a degree-r symmetric differential vanishes on E.

    Args:
        sing: Singularity type
        r: Symmetric degree of the differential
        extra_factors: Linear factors of the coefficient through the node

    Returns:
        PASS when all terms have positive order along every E_l; otherwise
        FAIL with the first witnessing index
    """
    if r < 2:
        raise DomainError(f"symmetric degree r={r} must be at least 2")
    data = resolution_data(sing)
    minima = []
    witness = None
    for index in range(1, data.s + 1):
        low = min(_term_orders(data, index, r, extra_factors))
        minima.append(low)
        if low <= 0 and witness is None:
            witness = index
    status = CertificateStatus.PASS if witness is None else CertificateStatus.FAIL
    if witness is not None:
        logger.debug(f"Vanishing certificate fails for {sing} at E_{witness}")
    return CertificateResult(
        sing=sing,
        r=r,
        status=status,
        extra_factors=extra_factors,
        witness_index=witness,
        min_orders=tuple(minima),
    )
