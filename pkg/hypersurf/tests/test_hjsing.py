"""
Unit tests for cyclic quotient singularities.

Tests:
- Continued fractions and resolution sequences
- Discrepancies
- Singularities over nodes
- The vanishing certificate
"""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hypersurf.core.error_handling import DomainError, StructuralError
from hypersurf.services.hjsing import (
    CertificateStatus,
    SingularityType,
    hj_evaluate,
    hj_expand,
    local_chart_exponents,
    resolution_data,
    sing_from_node,
    term_vanishing_order,
    vanishing_certificate,
)

pairs = st.integers(2, 200).flatmap(
    lambda m: st.tuples(st.just(m), st.integers(1, m - 1))
)


class TestContinuedFraction:
    """Tests for the Hirzebruch-Jung expansion."""

    def test_seven_thirds(self):
        """7/3 = 3 - 1/(2 - 1/2)."""
        assert hj_expand(7, 3) == [3, 2, 2]

    def test_a_series(self):
        """1/m(1, m-1) resolves into a chain of (-2)-curves."""
        assert hj_expand(5, 4) == [2, 2, 2, 2]

    def test_one_over_m(self):
        assert hj_expand(5, 1) == [5]

    @pytest.mark.parametrize("m,q", [(6, 2), (4, 0), (4, 4), (1, 1), (9, 3)])
    def test_invalid_pairs_raise(self, m, q):
        """q must lie in (0, m) and be coprime to m."""
        with pytest.raises(DomainError):
            hj_expand(m, q)

    @given(pairs)
    def test_reconstruction_and_reversal(self, pair):
        """[b] evaluates to m/q and m/q^-1 is the reversed expansion."""
        m, q = pair
        assume(gcd(m, q) == 1)
        b = hj_expand(m, q)
        assert all(bi >= 2 for bi in b)
        assert hj_evaluate(b) == Fraction(m, q)
        assert hj_expand(m, pow(q, -1, m)) == list(reversed(b))


class TestResolutionData:
    """Tests for alpha, beta, gamma and the discrepancies."""

    def test_seven_thirds_sequences(self):
        data = resolution_data(SingularityType(7, 3))
        assert data.beta == (7, 3, 2, 1, 0)
        assert data.alpha == (0, 1, 3, 5, 7)
        assert data.gamma == (-1, 0, 1, 2, 3)
        assert data.discrepancies == (
            Fraction(-3, 7),
            Fraction(-2, 7),
            Fraction(-1, 7),
        )
        assert data.s == 3

    @given(pairs)
    def test_identities(self, pair):
        """Determinant identity and beta = q alpha - m gamma."""
        m, q = pair
        assume(gcd(m, q) == 1)
        data = resolution_data(SingularityType(m, q))
        a, b, g = data.alpha, data.beta, data.gamma
        for i in range(data.s + 1):
            assert a[i + 1] * g[i] - a[i] * g[i + 1] == -1
        for i in range(data.s + 2):
            assert b[i] == q * a[i] - m * g[i]
        assert b[-1] == 0 and a[-1] == m

    @given(pairs)
    def test_discrepancies_in_range(self, pair):
        """Discrepancies lie in (-1, 0] and vanish only for the A series."""
        m, q = pair
        assume(gcd(m, q) == 1)
        sing = SingularityType(m, q)
        ds = resolution_data(sing).discrepancies
        assert all(-1 < d <= 0 for d in ds)
        assert all(d == 0 for d in ds) == sing.is_a_series

    def test_chart_exponents(self):
        data = resolution_data(SingularityType(7, 3))
        assert local_chart_exponents(data, 0) == ((7, 3), (0, 1))
        assert local_chart_exponents(data, 3) == ((1, 0), (5, 7))
        with pytest.raises(StructuralError):
            local_chart_exponents(data, 4)


class TestSingularityType:
    """Tests for type normalization."""

    def test_display_names(self):
        assert str(SingularityType(2, 1)) == "A1"
        assert str(SingularityType(3, 2)) == "A2"
        assert str(SingularityType(7, 3)) == "1/7(1,3)"

    def test_canonical_swaps_axes(self):
        """1/7(1,3) and 1/7(1,5) are the same germ."""
        assert SingularityType(7, 5).canonical() == SingularityType(7, 3)

    def test_invalid_type_raises(self):
        with pytest.raises(DomainError):
            SingularityType(6, 3)

    def test_node_with_unit_multiplicities(self):
        """w^m = uv is the A_{m-1} point."""
        assert sing_from_node(1, 1, 3) == SingularityType(3, 2)
        assert sing_from_node(1, 1, 2) == SingularityType(2, 1)

    def test_node_with_weights(self):
        """a_u q + a_v = 0 mod m."""
        sing = sing_from_node(2, 1, 5)
        assert (2 * sing.q + 1) % 5 == 0

    def test_node_multiplicity_not_coprime(self):
        with pytest.raises(DomainError):
            sing_from_node(2, 1, 4)


class TestVanishingCertificate:
    """Tests for the vanishing orders along the exceptional curves."""

    def test_a1_fails_without_coefficient(self):
        """The double cover case leaves the mixed term du dv alive."""
        result = vanishing_certificate(SingularityType(2, 1), 2)
        assert result.status == CertificateStatus.FAIL
        assert result.witness_index == 1
        assert result.min_orders == (0,)

    def test_a1_passes_with_coefficient_factor(self):
        """One coefficient factor through the node lifts every order."""
        result = vanishing_certificate(SingularityType(2, 1), 2, extra_factors=1)
        assert result.passed
        assert result.min_orders == (1,)

    def test_a2_passes(self):
        assert vanishing_certificate(SingularityType(3, 2), 2).passed

    def test_seven_thirds_orders(self):
        result = vanishing_certificate(SingularityType(7, 3), 2)
        assert result.passed
        assert result.min_orders == (2, 3, 4)

    def test_term_order(self):
        """u^c_u v^c_v du^i dv^j along E_l."""
        data = resolution_data(SingularityType(7, 3))
        # beta_1 = 3, alpha_1 = 1
        assert term_vanishing_order(data, 1, 1, 0, 0, 2) == 3
        assert term_vanishing_order(data, 1, 0, 0, 1, 1) == 2
        with pytest.raises(StructuralError):
            term_vanishing_order(data, 0, 0, 0, 1, 1)

    def test_degree_below_two_raises(self):
        with pytest.raises(DomainError):
            vanishing_certificate(SingularityType(3, 2), 1)

    @given(pairs)
    def test_fails_exactly_on_one_over_m(self, pair):
        """The certificate fails on 1/m(1,1) and passes on every other type."""
        m, q = pair
        assume(gcd(m, q) == 1)
        result = vanishing_certificate(SingularityType(m, q), 2)
        assert result.passed == (q != 1)
