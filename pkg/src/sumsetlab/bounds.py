"""Counting bounds for the event that a random window is close to a small-factor sumset.

Combinatorial quantities are exact integers or :class:`fractions.Fraction`;
transcendental ones use :mod:`mpmath` intervals so that every comparison is
either decided with a margin of at least ``2**-20`` or refused with
:class:`ComparisonTooClose`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .core import UsageError

PREC_BITS = 128
IV = MPIntervalContext()
IV.prec = PREC_BITS
MARGIN = mpmath.mpf(2) ** -20
FIND_K_CAP = 10**6


class ComparisonTooClose(ArithmeticError):
    pass


class NoCertificate(ArithmeticError):
    """No geometric constant could be certified from the requested starting index."""

    def __init__(self, message: str, smallest_n0: int | None):
        super().__init__(message)
        self.smallest_n0 = smallest_n0


def w(n: int, k: int) -> int:
    """Number of subsets of ``[0, n]`` with at most ``n // k`` elements."""
    if n < 0 or k < 1:
        raise UsageError("need n >= 0 and k >= 1")
    return sum(comb(n + 1, i) for i in range(n // k + 1))


def p_bound(n: int, k: int) -> Fraction:
    """``w(n, k)**3 / 2**(n + 1)``, exactly."""
    return Fraction(w(n, k) ** 3, 2 ** (n + 1))


def render(x: Fraction, bits: int = 64) -> mpmath.mpf:
    with mpmath.workprec(bits):
        return mpmath.mpf(x.numerator) / x.denominator


def alpha_k(k: int) -> mpmath.mpf:
    """``k**(1/k) * (k/(k-1))**((k-1)/k)`` at 128 bits."""
    if k < 2:
        raise UsageError("alpha_k needs k >= 2")
    if k == 2:
        return mpmath.mpf(2)
    with mpmath.workprec(PREC_BITS):
        return +(mpmath.root(k, k) * mpmath.power(mpmath.mpf(k) / (k - 1), mpmath.mpf(k - 1) / k))


def alpha_k_interval(k: int):
    """Enclosure of ``alpha_k`` as an :mod:`mpmath` interval."""
    if k < 2:
        raise UsageError("alpha_k needs k >= 2")
    kk = IV.mpf(k)
    return IV.exp(IV.log(kk) / kk + (kk - 1) / kk * IV.log(kk / (kk - 1)))


def cube_root_two():
    return IV.exp(IV.log(IV.mpf(2)) / 3)


def alpha_cubed_below_two(k: int) -> bool:
    """Exact test of ``alpha_k**3 < 2`` via ``k**(3k) < 2**k * (k-1)**(3(k-1))``."""
    if k < 2:
        raise UsageError("alpha_k needs k >= 2")
    return k ** (3 * k) < 2**k * (k - 1) ** (3 * (k - 1))


def _as_interval(x):
    # floats are taken at their decimal repr, e.g. 1.3 means 13/10
    if isinstance(x, IV.mpf):
        return x
    if isinstance(x, Fraction):
        return IV.mpf(x.numerator) / x.denominator
    if isinstance(x, mpmath.mpf):
        return IV.mpf(x)
    return IV.mpf(repr(x) if isinstance(x, float) else str(x))


def compare(a, b, margin=MARGIN) -> int:
    """Return -1 if ``a < b`` and 1 if ``a > b``; both must be separated by ``margin``."""
    ia, ib = _as_interval(a), _as_interval(b)
    if ia.b + margin <= ib.a:
        return -1
    if ib.b + margin <= ia.a:
        return 1
    raise ComparisonTooClose(f"cannot separate {ia} and {ib} by {mpmath.nstr(margin, 3)}")


def find_k(threshold=None) -> int:
    """Smallest ``k >= 2`` with ``alpha_k(k) < threshold`` (default ``2**(1/3)``)."""
    t = cube_root_two() if threshold is None else _as_interval(threshold)
    if not t.a > 1:
        raise UsageError("threshold must exceed 1")
    for k in range(2, FIND_K_CAP + 1):
        if compare(alpha_k_interval(k), t) < 0:
            return k
    raise ComparisonTooClose(f"no k <= {FIND_K_CAP} found below {t}")


def geometric_tail(c, n0: int) -> mpmath.mpf:
    """``sum_{n >= n0} c**n = c**n0 / (1 - c)``."""
    with mpmath.workprec(PREC_BITS):
        c = mpmath.mpf(c)
        return c**n0 / (1 - c)


def _log2_p_bound(n: int, k: int) -> mpmath.mpf:
    return 3 * mpmath.log(w(n, k), 2) - (n + 1)


@dataclass(frozen=True)
class TailCertificate:
    k: int
    n0: int
    n_check: int
    c: float
    rate: float
    tail: mpmath.mpf
    end_ratio_below_c: bool
    note: str = (
        "c is range-checked on [n0, n0 + n_check]; for all n the entropy bound "
        "w(n, k) <= alpha_k**(n + 1) gives p_bound(n, k) <= rate**(n + 1) < c**n"
    )


def tail_and_c(n0: int, k: int, c=None, n_check: int = 2000) -> TailCertificate:
    """Certify ``p_bound(n, k) <= c**n`` for ``n`` in ``[n0, n0 + n_check]`` and sum the tail.

    Without ``c``, the smallest value of ``rate + (1 - rate) * j / 64`` that
    passes is chosen, where ``rate = alpha_k**3 / 2``.
    """
    if n0 < 0 or n_check < 1:
        raise UsageError("need n0 >= 0 and n_check >= 1")
    if not alpha_cubed_below_two(k):
        raise UsageError(f"alpha_{k}**3 >= 2: no geometric bound along this route")
    with mpmath.workprec(PREC_BITS):
        rate = alpha_k(k) ** 3 / 2
        logs = {n: _log2_p_bound(n, k) for n in range(0, n0 + n_check + 2)}
        if c is None:
            candidates = [rate + (1 - rate) * mpmath.mpf(j) / 64 for j in range(1, 64)]
        else:
            cc = mpmath.mpf(c)
            if not (mpmath.mpf(0.5) < cc < 1):
                raise UsageError("c must lie in (1/2, 1)")
            if not cc > rate:
                raise UsageError(f"c must exceed alpha_k**3/2 = {mpmath.nstr(rate, 8)}")
            candidates = [cc]

        def failures(cand) -> list[int]:
            lc = mpmath.log(cand, 2)
            return [n for n in range(0, n0 + n_check + 1) if logs[n] > n * lc]

        for cand in candidates:
            bad = failures(cand)
            if not bad or bad[-1] < n0:
                end = n0 + n_check
                ratio_ok = logs[end + 1] - logs[end] <= mpmath.log(cand, 2)
                return TailCertificate(
                    k, n0, n_check, float(cand), float(rate), geometric_tail(cand, n0), bool(ratio_ok)
                )
        bad = failures(candidates[-1])
        smallest = bad[-1] + 1 if bad[-1] < n0 + n_check else None
        raise NoCertificate(f"no c certified from n0={n0}", smallest)


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    w: int
    p_bound: Fraction
    alpha_k: mpmath.mpf
    c_witness: float | None = None
    tail: mpmath.mpf | None = None


def bound_report(n: int, k: int, tail_from: int | None = None) -> BoundReport:
    c = tail = None
    if tail_from is not None:
        cert = tail_and_c(tail_from, k)
        c, tail = cert.c, cert.tail
    return BoundReport(n, k, w(n, k), p_bound(n, k), alpha_k(k) if k >= 2 else mpmath.inf, c, tail)
