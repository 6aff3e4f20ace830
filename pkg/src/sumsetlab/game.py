"""Banach–Mazur play over cylinders of ``P(N)``.

A cylinder ``{A : A ∩ [0, k] = F}`` is stored as the pair ``(F, k)``.  Player I
(an adversary) hands over a cylinder; Player II answers with the smaller
cylinder whose prefix on ``[0, 7k + t^2]`` is ``F ∪ (k, 2k] ∪ {5k + i t : 1 <= i <= t}``
with ``t = floor(k**beta)``.  The limit set of a play is only ever known
through its finite prefix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable

import mpmath

from .core import LimitExceeded, SetWindow, UsageError, window_mask
from .decomposer import SearchConfig, Verdict, search
from .rng import CounterRNG

MAX_WINDOW = 1 << 26


class GameProtocolError(RuntimeError):
    def __init__(self, round_index: int, message: str):
        super().__init__(f"round {round_index}: {message}")
        self.round_index = round_index


def floor_power(base: int, exponent: float) -> int:
    """``floor(base ** exponent)`` for ``base >= 0``, free of float rounding.

    ``exponent`` is read at its decimal repr; ``0.8`` means ``4/5`` so
    ``floor_power(32, 0.8) == 16`` even though ``32 ** 0.8`` evaluates to
    ``16.000000000000004``.
    """
    if base < 0 or exponent < 0:
        raise UsageError("need base >= 0 and exponent >= 0")
    if base == 0:
        return 0 if exponent > 0 else 1
    frac = Fraction(repr(exponent)) if isinstance(exponent, float) else Fraction(exponent)
    p, q = frac.numerator, frac.denominator
    if q <= 1000:
        target = base**p
        t = int(math.exp(p / q * math.log(base)))
        while t**q > target:
            t -= 1
        while (t + 1) ** q <= target:
            t += 1
        return t
    with mpmath.workprec(256):
        v = mpmath.power(base, mpmath.mpf(p) / q)
        t = int(mpmath.floor(v))
        if min(v - t, t + 1 - v) < mpmath.mpf(2) ** -200:
            raise ArithmeticError(f"floor of {base}**{exponent} is numerically ambiguous")
        return t


def _check_alpha_beta(alpha: float, beta: float) -> None:
    a = Fraction(repr(alpha)) if isinstance(alpha, float) else Fraction(alpha)
    b = Fraction(repr(beta)) if isinstance(beta, float) else Fraction(beta)
    if not 0 < a < Fraction(1, 3):
        raise UsageError(f"alpha must lie in (0, 1/3), got {alpha}")
    if not Fraction(3, 4) < b < 1:
        raise UsageError(f"beta must lie in (3/4, 1), got {beta}")
    if not a * b < Fraction(1, 4):
        raise UsageError(f"need alpha * beta < 1/4, got {float(a * b)}")


@dataclass(frozen=True)
class GameParams:
    alpha: float = 0.25
    beta: float = 0.8
    rounds: int = 1
    player1: str = "minimal"
    seed: int = 0
    f0: SetWindow = field(default_factory=lambda: SetWindow.from_members([0, 1]))
    k0: int = 4

    def __post_init__(self) -> None:
        _check_alpha_beta(self.alpha, self.beta)
        if self.rounds < 1:
            raise UsageError("rounds must be >= 1")
        if self.player1 not in ADVERSARIES:
            raise UsageError(f"unknown adversary {self.player1!r}; choose from {sorted(ADVERSARIES)}")


@dataclass(frozen=True)
class MoveRecord:
    m: int
    F: SetWindow
    k: int
    t: int
    window_end: int
    prefix: SetWindow

    def to_dict(self) -> dict:
        return {"m": self.m, "F": self.F.members(), "k": self.k, "t": self.t, "window_end": self.window_end}


def player2_move(F: SetWindow, k: int, beta: float, m: int = 0) -> MoveRecord:
    if not 0.75 < beta < 1:
        raise UsageError(f"beta must lie in (3/4, 1), got {beta}")
    if k < 1:
        raise UsageError("k must be >= 1")
    top = F.max()
    if top is not None and top > k:
        raise UsageError(f"k = {k} is below max F = {top}")
    if len(F) < 2:
        raise UsageError("the cylinder base needs at least two elements")
    t = floor_power(k, beta)
    end = 7 * k + t * t
    if end > MAX_WINDOW:
        raise LimitExceeded(f"window end {end} exceeds the supported {MAX_WINDOW}")
    bits = F.bits | (window_mask(2 * k) ^ window_mask(k))
    for i in range(1, t + 1):
        bits |= 1 << (5 * k + i * t)
    return MoveRecord(m, F.restrict(k), k, t, end, SetWindow(end, bits))


# Player I: given the previous move and a per-round generator, return (F, k)
# describing a cylinder inside Player II's last answer.
Adversary = Callable[[MoveRecord, CounterRNG], "tuple[SetWindow, int]"]


def _minimal(prev: MoveRecord, rng: CounterRNG) -> tuple[SetWindow, int]:
    k = prev.window_end + 1
    return prev.prefix.restrict(k), k


def _random(prev: MoveRecord, rng: CounterRNG) -> tuple[SetWindow, int]:
    w = prev.window_end
    k = w + 1 + rng.below(w)
    extra = rng.bits(k - w) << (w + 1)
    return SetWindow(k, prev.prefix.bits | extra), k


def _sumsetish(prev: MoveRecord, rng: CounterRNG) -> tuple[SetWindow, int]:
    # append ({0, 1} + {0, d, ..., (L-1) d}) shifted past a random gap
    w = prev.window_end
    start = w + 2 + rng.below(w)
    d = 2 + rng.below(3)
    length = 2 + rng.below(8)
    block = 0
    for i in range(length):
        block |= 0b11 << (start + i * d)
    k = start + (length - 1) * d + 1 + rng.below(w)
    return SetWindow(k, prev.prefix.bits | block), k


ADVERSARIES: dict[str, Adversary] = {"minimal": _minimal, "random": _random, "sumsetish": _sumsetish}


@dataclass(frozen=True)
class GameTranscript:
    params: GameParams
    moves: tuple[MoveRecord, ...]
    limit_prefix: SetWindow

    def to_dict(self) -> dict:
        p = self.params
        return {
            "params": {"alpha": p.alpha, "beta": p.beta, "rounds": p.rounds, "player1": p.player1,
                       "seed": p.seed, "f0": p.f0.members(), "k0": p.k0},
            "moves": [mv.to_dict() for mv in self.moves],
            "limit_prefix": {"length": self.limit_prefix.length, "members": self.limit_prefix.members()},
        }


def play(params: GameParams) -> GameTranscript:
    F, k = params.f0, params.k0
    adversary = ADVERSARIES[params.player1]
    moves: list[MoveRecord] = []
    for m in range(params.rounds):
        if moves:
            prev = moves[-1]
            F, k = adversary(prev, CounterRNG(params.seed, m))
            if k <= prev.window_end:
                raise GameProtocolError(m, f"k = {k} does not pass the previous window end {prev.window_end}")
            if F.max() is not None and F.max() > k:
                raise GameProtocolError(m, "cylinder base extends past k")
            if F.bits & window_mask(prev.window_end) != prev.prefix.bits:
                raise GameProtocolError(m, "cylinder is not inside the previous answer")
        moves.append(player2_move(F, k, params.beta, m))
    return GameTranscript(params, tuple(moves), moves[-1].prefix)


def structure_violations(move: MoveRecord, beta: float) -> list[str]:
    """Independent re-check of one answer; an empty list means the move is well formed."""
    out = []
    k, t, end, pre = move.k, move.t, move.window_end, move.prefix
    kb = k**beta
    if t < 1 or not t - 1e-9 <= kb < t + 1 - 1e-9:
        out.append(f"t = {t} is not floor({k}**{beta})")
    if end != 7 * k + t * t or end <= 2 * k:
        out.append("window end mismatch")
    if len(move.F) < 2:
        out.append("|F| < 2")
    if pre.restrict(k) != move.F:
        out.append("prefix on [0, k] differs from F")
    block = window_mask(2 * k) ^ window_mask(k)
    if pre.bits & block != block:
        out.append("block (k, 2k] incomplete")
    prog = 0
    for i in range(1, t + 1):
        prog |= 1 << (5 * k + i * t)
    if pre.bits & prog != prog:
        out.append("progression incomplete")
    if pre.bits & ~window_mask(2 * k) != prog:
        out.append("unexpected members beyond 2k")
    if pre.bits >> (5 * k + t * t + 1):
        out.append("terminal gap is not empty")
    return out


@dataclass(frozen=True)
class RoundCheck:
    m: int
    n: int
    budget: int
    verdict: Verdict
    nodes: int
    flips: tuple[int, ...] | None = None
    Y: tuple[int, ...] | None = None
    Z: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "budget": self.budget, "verdict": self.verdict.value,
                "nodes": self.nodes, "flips": self.flips, "Y": self.Y, "Z": self.Z}


@dataclass(frozen=True)
class VerifyReport:
    alpha: float
    checks: tuple[RoundCheck, ...]
    note: str = ("finite-window evidence only: a verdict at one window neither proves nor refutes "
                 "the asymptotic statement")

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "checks": [c.to_dict() for c in self.checks], "note": self.note}


def verify_prefix(
    transcript: GameTranscript,
    alpha: float,
    config: SearchConfig = SearchConfig(),
    rounds: Iterable[int] | None = None,
) -> VerifyReport:
    """Run the budgeted decider on the limit prefix at each chosen round's window end.

    The budget at window end ``n`` is ``floor(n**alpha / 2)``.
    """
    wanted = set(range(len(transcript.moves))) if rounds is None else set(rounds)
    checks = []
    for move in transcript.moves:
        if move.m not in wanted:
            continue
        n = move.window_end
        budget = floor_power(n, alpha) // 2
        res = search(transcript.limit_prefix.restrict(n), replace(config, budget=budget))
        wit = res.witness
        checks.append(RoundCheck(
            move.m, n, budget, res.verdict, res.nodes,
            wit.flips if wit else None,
            tuple(wit.decomposition.Y) if wit else None,
            tuple(wit.decomposition.Z) if wit else None,
        ))
    return VerifyReport(alpha, tuple(checks))
