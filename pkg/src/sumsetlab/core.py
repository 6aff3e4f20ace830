"""Finite integer-set windows stored as Python ints used as bit-vectors.

Bit ``i`` of :attr:`SetWindow.bits` records membership of the integer ``i``;
a window of length ``n`` covers the inclusive range ``[0, n]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class UsageError(ValueError):
    """Raised when an operation is called outside its preconditions."""


class LimitExceeded(UsageError):
    """The request is well formed but larger than this build is willing to run."""


def iter_bits(bits: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``bits`` in increasing order."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def window_mask(n: int) -> int:
    return (1 << (n + 1)) - 1


@dataclass(frozen=True)
class SetWindow:
    """The prefix ``S ∩ [0, length]`` of a set of nonnegative integers."""

    length: int
    bits: int = 0

    def __post_init__(self) -> None:
        if self.length < 0:
            raise UsageError(f"window length must be >= 0, got {self.length}")
        if self.bits < 0 or self.bits >> (self.length + 1):
            raise UsageError(f"members outside [0, {self.length}]")

    @classmethod
    def from_members(cls, members: Iterable[int], length: int | None = None) -> SetWindow:
        bits = 0
        for m in members:
            if m < 0:
                raise UsageError(f"negative member {m}")
            bits |= 1 << m
        if length is None:
            length = max(bits.bit_length() - 1, 0)
        return cls(length, bits)

    @classmethod
    def full(cls, length: int) -> SetWindow:
        return cls(length, window_mask(length))

    @classmethod
    def empty(cls, length: int) -> SetWindow:
        return cls(length, 0)

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and 0 <= x <= self.length and bool(self.bits >> x & 1)

    @property
    def cardinality(self) -> int:
        return self.bits.bit_count()

    def members(self) -> list[int]:
        return list(iter_bits(self.bits))

    def min(self) -> int | None:
        return (self.bits & -self.bits).bit_length() - 1 if self.bits else None

    def max(self) -> int | None:
        return self.bits.bit_length() - 1 if self.bits else None

    def restrict(self, n: int) -> SetWindow:
        """Return ``S ∩ [0, n]`` as a window of length ``n`` (``n`` may exceed the current length)."""
        return SetWindow(n, self.bits & window_mask(n))

    def shift(self, d: int) -> SetWindow:
        """Translate by ``d >= 0``, growing the window by ``d``."""
        return SetWindow(self.length + d, self.bits << d)

    def to_binary(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.length + 1))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self)) + "}"


def sumset_bits(y_bits: int, z_bits: int, n: int) -> int:
    """Shift-or sumset of two bit-vectors, truncated to ``[0, n]``."""
    if y_bits.bit_count() > z_bits.bit_count():
        y_bits, z_bits = z_bits, y_bits
    mask = window_mask(n)
    z_bits &= mask
    out = 0
    for y in iter_bits(y_bits):
        if y > n:
            break
        out |= z_bits << y
    return out & mask


def sumset_window(Y: SetWindow, Z: SetWindow, n: int) -> SetWindow:
    """Return ``(Y + Z) ∩ [0, n]``."""
    if Y.length > n or Z.length > n:
        raise UsageError("factor windows must not be longer than the target window")
    return SetWindow(n, sumset_bits(Y.bits, Z.bits, n))


def sym_diff_count(A: SetWindow, B: SetWindow) -> int:
    if A.length != B.length:
        raise UsageError(f"window lengths differ: {A.length} != {B.length}")
    return (A.bits ^ B.bits).bit_count()


@dataclass(frozen=True)
class CountingProfile:
    """Samples of ``(n, |S(n)|, |S(n)| / n**alpha)`` on a checkpoint grid."""

    alpha: float
    samples: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)

    @property
    def last_ratio(self) -> float:
        return self.samples[-1][2] if self.samples else 0.0

    def vanishing(self, tol: float) -> bool:
        """Trend flag: is the last normalized count below ``tol``?"""
        return self.last_ratio < tol


def z_alpha_profile(S: SetWindow, alpha: float, checkpoints: Sequence[int]) -> CountingProfile:
    if not 0 < alpha <= 1:
        raise UsageError(f"alpha must lie in (0, 1], got {alpha}")
    grid = sorted(set(checkpoints))
    if grid and (grid[0] < 1 or grid[-1] > S.length):
        raise UsageError(f"checkpoints must lie in [1, {S.length}]")
    samples = []
    for n in grid:
        count = (S.bits & window_mask(n)).bit_count()
        samples.append((n, count, count / n**alpha))
    return CountingProfile(alpha, tuple(samples))


def pattern_frequency(A: SetWindow, I_length: int, F: SetWindow, n: int) -> int:
    """Count shifts ``j`` in ``[0, n]`` where ``A ∩ (I + j) = F + j`` with ``I = [0, I_length - 1]``.

    One AND-chain over ``I_length`` shifted copies of ``A``; no per-``j`` loop.
    """
    if I_length < 1:
        raise UsageError("pattern window must have length >= 1")
    if F.bits >> I_length:
        raise UsageError(f"pattern {F} does not fit in [0, {I_length - 1}]")
    if n < 0 or n + I_length - 1 > A.length:
        raise UsageError(f"need 0 <= n and n + {I_length - 1} <= {A.length}")
    mask = window_mask(n)
    match = mask
    for i in range(I_length):
        shifted = A.bits >> i
        match &= shifted if F.bits >> i & 1 else ~shifted
    return (match & mask).bit_count()
