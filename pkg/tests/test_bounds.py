from fractions import Fraction

import mpmath
import pytest

from sumsetlab.bounds import (
    ComparisonTooClose,
    alpha_cubed_below_two,
    alpha_k,
    alpha_k_interval,
    bound_report,
    compare,
    cube_root_two,
    find_k,
    geometric_tail,
    p_bound,
    tail_and_c,
    w,
)
from sumsetlab.core import UsageError


def pascal_rows(limit):
    row = [1]
    rows = [row]
    for _ in range(limit):
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
        rows.append(row)
    return rows


ROWS = pascal_rows(202)


class TestCounting:
    @pytest.mark.parametrize("k", [1, 2, 3, 7, 17, 50])
    def test_w_against_pascal(self, k):
        for n in range(0, 201):
            assert w(n, k) == sum(ROWS[n + 1][: n // k + 1])

    def test_w_examples(self):
        assert w(34, 17) == 1 + 35 + 595
        assert w(10, 1) == 2**11 - 1
        assert w(16, 17) == 1

    def test_p_bound_exact(self):
        assert p_bound(34, 17) == Fraction(631**3, 2**35)
        assert p_bound(34, 17) == Fraction(251239591, 34359738368)

    def test_p_bound_monotone_in_k(self):
        for n in (60, 200, 500):
            vals = [p_bound(n, k) for k in range(2, 40)]
            assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_p_bound_below_one_for_large_n(self):
        for k in (17, 20, 30):
            for n in range(8 * k, 8 * k + 400, 7):
                assert p_bound(n, k) < 1

    def test_bad_args(self):
        with pytest.raises(UsageError):
            w(-1, 3)
        with pytest.raises(UsageError):
            w(5, 0)


def float_alpha(k):
    return k ** (1 / k) * (k / (k - 1)) ** ((k - 1) / k)


class TestAlpha:
    def test_k2(self):
        assert alpha_k(2) == 2
        iv = alpha_k_interval(2)
        assert iv.a <= 2 <= iv.b

    def test_threshold_brackets(self):
        c = cube_root_two()
        assert compare(alpha_k_interval(16), c) > 0
        assert compare(alpha_k_interval(17), c) < 0
        assert not alpha_cubed_below_two(16)
        assert alpha_cubed_below_two(17)

    def test_value_k17(self):
        assert abs(alpha_k(17) - mpmath.mpf("1.2507183")) < 1e-6

    def test_strictly_decreasing(self):
        prev = alpha_k_interval(2)
        for k in range(3, 1001):
            cur = alpha_k_interval(k)
            assert compare(cur, prev) < 0, k
            prev = cur

    @pytest.mark.parametrize("k", [3, 5, 17, 100, 1000, 10**5])
    def test_agrees_with_float_and_high_precision(self, k):
        val = alpha_k(k)
        assert abs(float(val) - float_alpha(k)) < 1e-12
        with mpmath.workdps(60):
            kk = mpmath.mpf(k)
            ref = mpmath.exp(mpmath.log(kk) / kk + (kk - 1) / kk * mpmath.log(kk / (kk - 1)))
            assert abs(val - ref) < mpmath.mpf(2) ** -120
            iv = alpha_k_interval(k)
            assert iv.a <= ref <= iv.b
            assert iv.b - iv.a < mpmath.mpf(2) ** -100

    def test_exact_certificate_matches_intervals(self):
        c = cube_root_two()
        for k in range(2, 200):
            assert alpha_cubed_below_two(k) == (compare(alpha_k_interval(k), c) < 0)

    def test_rejects_small_k(self):
        for fn in (alpha_k, alpha_k_interval, alpha_cubed_below_two):
            with pytest.raises(UsageError):
                fn(1)


class TestFindK:
    def test_default(self):
        assert find_k() == 17

    def test_threshold_1_3(self):
        assert find_k(1.3) == 14
        assert float_alpha(14) < 1.3 < float_alpha(13)

    def test_threshold_just_above_two(self):
        assert find_k("2.000001") == 2

    def test_exact_tie_refused(self):
        with pytest.raises(ComparisonTooClose):
            find_k(Fraction(2))

    def test_threshold_must_exceed_one(self):
        with pytest.raises(UsageError):
            find_k(1)

    def test_compare_margin(self):
        assert compare(1, 2) == -1
        assert compare(Fraction(3, 2), 1) == 1
        with pytest.raises(ComparisonTooClose):
            compare(1, 1 + 2**-25)


class TestTail:
    def test_geometric_tail(self):
        assert abs(geometric_tail(0.5, 0) - 2) < 1e-30
        with mpmath.workprec(200):
            c = mpmath.mpf(0.99)
            assert abs(geometric_tail(0.99, 1000) - c**1000 / (1 - c)) < 1e-30

    def test_certificate_k17(self):
        cert = tail_and_c(1000, 17)
        assert cert.rate < cert.c < 1
        assert abs(cert.rate - 0.97824713) < 1e-7
        assert cert.end_ratio_below_c
        # independent re-check with exact integers: w**3 * 2**-(n+1) <= c**n
        c = Fraction(repr(cert.c))
        for n in range(1000, 1000 + 2001, 50):
            assert Fraction(w(n, 17) ** 3, 2 ** (n + 1)) <= c**n
        assert abs(cert.tail / geometric_tail(cert.c, 1000) - 1) < 1e-9

    def test_rejects_k_without_geometric_rate(self):
        with pytest.raises(UsageError):
            tail_and_c(100, 16)
        with pytest.raises(UsageError):
            tail_and_c(100, 2)

    @pytest.mark.parametrize("k", [17, 20, 40])
    def test_entropy_bound_every_n(self, k):
        # sum_{i <= m/k} C(m, i) <= alpha_k**m, so p_bound(n, k) <= (alpha_k**3 / 2)**(n + 1)
        a = alpha_k_interval(k)
        for n in range(0, 3000, 13):
            assert compare(mpmath.log(w(n, k), 2), (n + 1) * mpmath.log(a.b, 2), margin=0) < 0 or w(n, k) == 1

    def test_c_just_above_rate_certifies(self):
        rate = float(alpha_k(17) ** 3 / 2)
        cert = tail_and_c(0, 17, c=rate + 1e-6, n_check=300)
        assert cert.n0 == 0

    def test_c_must_exceed_rate(self):
        with pytest.raises(UsageError):
            tail_and_c(1000, 17, c=0.9)

    def test_report(self):
        rep = bound_report(34, 17, tail_from=1000)
        assert rep.w == 631
        assert rep.p_bound == p_bound(34, 17)
        assert rep.c_witness is not None and rep.tail is not None
