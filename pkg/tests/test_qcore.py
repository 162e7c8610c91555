import threading
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qzeta.qcore import (
    BracketPowers,
    DomainError,
    NonRepresentableError,
    QContext,
    TailPolicy,
    TruncationError,
    certified_sum,
    format_bound,
    format_exact,
    geometric_sum,
    parse_scalar,
    q_bracket,
    qpow_exact,
    scalar_from_json,
    scalar_to_json,
    tail_bound_geometric,
)
from qzeta.qeuler import q_euler_number

rationals_01 = st.fractions(min_value=F(1, 1000), max_value=F(999, 1000), max_denominator=1000)
ratios = st.fractions(min_value=F(-999, 1000), max_value=F(999, 1000), max_denominator=1000)


def ctx(q=F(1, 2), u=F(1, 3), **kw):
    return QContext(q, u, **kw)


class TestQBracket:
    def test_examples(self):
        assert q_bracket(0, ctx(q=F(2, 7))) == 0
        assert q_bracket(1, ctx(q=F(2, 7))) == 1
        assert q_bracket(3, ctx()) == F(7, 4)

    @pytest.mark.parametrize("q", [F(1, 2), F(2, 3), F(9, 10), F(1, 97)])
    def test_matches_finite_geometric_sum(self, q):
        c = ctx(q=q)
        for x in range(65):
            assert q_bracket(x, c) == sum((q**i for i in range(x)), F(0))

    @given(rationals_01)
    def test_monotone_and_below_limit(self, q):
        c = ctx(q=q)
        values = [q_bracket(x, c) for x in range(40)]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert all(v < 1 / (1 - q) for v in values)

    def test_non_integer_exponent_rejected_in_exact_mode(self):
        with pytest.raises(NonRepresentableError):
            q_bracket(F(1, 2), ctx())

    def test_certified_mode_accepts_non_integer(self):
        c = ctx(q=F(1, 4), mode="certified")
        assert abs(q_bracket(F(1, 2), c) - F(2, 3)) < mpmath.mpf(2) ** -150


class TestQpowExact:
    def test_examples(self):
        assert qpow_exact(F(1, 2), 3) == F(1, 8)
        with pytest.raises(NonRepresentableError):
            qpow_exact(F(1, 4), F(1, 2))

    def test_presimplified_exponent(self):
        # (q^2)^(3/2) with q = 1/2 becomes q^3
        c = ctx().with_power(2)
        assert c.q == F(1, 4)
        assert c.qpow(F(3, 2)) == F(1, 8)

    def test_rejects_q_outside_unit_interval(self):
        with pytest.raises(DomainError):
            qpow_exact(F(3, 2), 1)


class TestGeometricSum:
    def test_examples(self):
        assert geometric_sum(F(1), F(1, 6)) == F(6, 5)
        assert geometric_sum(F(0), F(1, 2)) == 0
        assert geometric_sum(F(1), F(0)) == 1

    def test_partial_sums_approach(self):
        partial = sum(F(1, 6) ** m for m in range(30))
        assert abs(partial - F(6, 5)) < F(1, 10**20)

    @given(st.fractions(max_denominator=1000), ratios)
    def test_fixed_point(self, a, r):
        s = geometric_sum(a, r)
        assert s == a + r * s

    @pytest.mark.parametrize("r", [F(1), F(-1), F(3, 2)])
    def test_divergent_ratio(self, r):
        with pytest.raises(DomainError):
            geometric_sum(F(1), r)


class TestTailBound:
    def test_examples(self):
        assert tail_bound_geometric(F(1, 3**10), F(1, 3)) == F(1, 3**10) * F(3, 2)
        assert tail_bound_geometric(F(0), F(1, 3)) == 0
        assert tail_bound_geometric(0.01, 0.5) == pytest.approx(0.02)

    @given(st.fractions(min_value=-10, max_value=10, max_denominator=100), ratios, st.integers(0, 50))
    def test_dominates_true_tail(self, a, r, M):
        true_tail = a * r**M / (1 - r)
        assert abs(true_tail) <= tail_bound_geometric(abs(a * r**M), abs(r))

    def test_ratio_one_rejected(self):
        with pytest.raises(DomainError):
            tail_bound_geometric(F(1), F(1))


class TestContext:
    def test_validation(self):
        with pytest.raises(DomainError, match="0<q<1"):
            QContext(F(3, 2), F(1, 3))
        with pytest.raises(DomainError):
            QContext(0, F(1, 3), mode="certified")
        with pytest.raises(DomainError):
            QContext(F(1, 2), F(1))
        with pytest.raises(DomainError):
            QContext(0.5 + 0.1j, F(1, 3))
        with pytest.raises(DomainError):
            QContext(F(1, 2), F(1, 3), precision_bits=40)

    def test_u_zero_is_accepted(self):
        c = QContext(F(1, 2), 0)
        assert q_euler_number(0, c) == 1
        assert q_euler_number(3, c) == 0

    def test_strings_and_decimals_are_exact(self):
        c = QContext("0.5", "1/3")
        assert c.q == F(1, 2) and c.u == F(1, 3)

    def test_complex_parameters_in_certified_mode(self):
        c = QContext("0.5+0.2j", 0.3j, mode="certified")
        assert abs(c.qv - mpmath.mpc(0.5, 0.2)) < 1e-15

    def test_tail_policy_needs_exactly_one_variant(self):
        with pytest.raises(DomainError):
            TailPolicy()
        with pytest.raises(DomainError):
            TailPolicy(target_bound=F(1, 10), fixed_terms=3)
        assert TailPolicy.default(128).target_bound == F(1, 2**64)


class TestCertifiedSum:
    def setup_method(self):
        self.mp = ctx(mode="certified").mp

    def test_geometric_series(self):
        mp = self.mp
        half = mp.mpf(1) / 2
        res = certified_sum(lambda m: half**m, lambda M: half**M / (1 - half), TailPolicy(target_bound=F(1, 10**30)), mp, 128)
        assert res.contains(2)
        assert res.tail_bound <= mp.mpf(10) ** -30

    def test_fixed_terms(self):
        mp = self.mp
        res = certified_sum(lambda m: mp.one, lambda M: mp.zero, TailPolicy(fixed_terms=7), mp, 128)
        assert res.value == 7 and res.terms_used == 7

    def test_truncation_error_when_cap_hit(self):
        mp = self.mp
        with pytest.raises(TruncationError):
            certified_sum(lambda m: mp.one, lambda M: mp.inf, TailPolicy(target_bound=F(1, 10), term_cap=5), mp, 128)


class TestBracketPowerBounds:
    @pytest.mark.parametrize(
        "q,x,s",
        [
            (F(1, 2), F(1), F(2)),
            (F(9, 10), F(5, 2), F(-3)),
            (F(2, 3), F(1), F(1, 2)),
            (0.5 + 0.3j, F(1), 1.5 + 2j),
            (-0.6 + 0.1j, F(3, 2), -2.5 - 1j),
            (0.7j, 2 + 0.5j, 0.25 + 0.5j),
        ],
    )
    def test_bound_dominates_terms(self, q, x, s):
        c = QContext(q, F(1, 3), mode="certified")
        bp = BracketPowers(c, x, s)
        for M in (0, 1, 3, 10, 25):
            b = bp.bound(M)
            for m in range(M, M + 60):
                assert abs(bp.power(m)) <= b


class TestSerialization:
    def test_exact_format(self):
        assert format_exact(F(-7, 12)) == "-7/12"
        assert format_exact(F(4, 2)) == "2"
        assert scalar_to_json(F(2, 5)) == "2/5"

    def test_approx_round_trip(self):
        c = ctx(mode="certified")
        z = c.mp.mpc(1, -2) / 3
        obj = scalar_to_json(z, 128)
        assert set(obj) == {"re", "im", "prec_bits"}
        back = scalar_from_json(obj)
        assert abs(back - z) < mpmath.mpf(2) ** -120

    def test_bound_is_rounded_up(self):
        c = ctx(mode="certified")
        b = c.mp.mpf(1) / 3
        assert c.mp.mpf(format_bound(b)) >= b
        assert format_bound(c.mp.zero) == "0"

    def test_parse_scalar(self):
        assert parse_scalar("0.1") == F(1, 10)
        assert parse_scalar("-7/12") == F(-7, 12)
        assert parse_scalar("1+2j") == 1 + 2j
        assert parse_scalar("1+2i") == 1 + 2j


def test_concurrent_evaluation_is_consistent():
    c = ctx(mode="certified")
    expected = q_euler_number(6, c)
    results = []

    def work():
        results.append(q_euler_number(6, c))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)
