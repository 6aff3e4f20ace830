"""Deciding whether a window ``A ⊆ [0, n]`` is a truncated sumset ``(Y + Z) ∩ [0, n]``.

The search scans positions ``x = 0..n`` in increasing order and decides, for
each ``x``, whether it joins ``Y``, ``Z``, both or neither.  Branches are tried
in the fixed order ``(neither, Z only, Y only, both)``, so the first witness
found is reproducible.  Every sum ``y + z`` is created when the larger of the
two factors is placed, which means that by the time the scan passes ``x`` the
coverage status of ``x`` is final.

In budgeted mode the target ``A'`` is not fixed: covering a non-member of ``A``
and leaving a member uncovered each cost one flip, and a branch dies as soon
as its flips exceed the budget.  With budget 0 this is the exact decision.

Symmetry breaking: ``min Y <= min Z``.  Nothing else is normalized; in
particular ``0 ∈ Y`` cannot be assumed for windows (``A = ∅, n = 3`` is only
decomposable with both factors inside ``[2, 3]``).

A note on what "decomposable" means here: this is a finite construction, not
the infinite notion of reducibility.  Factors live in ``[0, n]`` and sums above
``n`` are discarded, so for example ``Y = {0, n}`` and ``Z = A`` decompose every
``A`` with ``0 ∉ A`` and ``|A| >= 2``.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .core import LimitExceeded, SetWindow, UsageError, iter_bits, sumset_bits, sumset_window, window_mask

ORACLE_MAX_N = 13
CENSUS_MAX_N = 16


class Verdict(str, enum.Enum):
    DECOMPOSABLE = "decomposable"
    IRREDUCIBLE = "irreducible"
    INCONCLUSIVE = "inconclusive"


class Inconclusive(RuntimeError):
    """The node limit tripped before the search finished."""

    def __init__(self, nodes: int):
        super().__init__(f"search inconclusive after {nodes} nodes")
        self.nodes = nodes


@dataclass(frozen=True)
class SearchConfig:
    min_size: int = 2
    budget: int = 0
    size_cap: int | None = None
    node_limit: int | None = None

    def __post_init__(self) -> None:
        if self.min_size < 1:
            raise UsageError("min_size must be >= 1")
        if self.budget < 0:
            raise UsageError("budget must be >= 0")
        if self.size_cap is not None and self.size_cap < self.min_size:
            raise UsageError("size_cap must be >= min_size")
        if self.node_limit is not None and self.node_limit < 1:
            raise UsageError("node_limit must be >= 1")


@dataclass(frozen=True)
class Decomposition:
    Y: SetWindow
    Z: SetWindow

    def sumset(self, n: int) -> SetWindow:
        return sumset_window(self.Y, self.Z, n)


@dataclass(frozen=True)
class BudgetedWitness:
    A_prime: SetWindow
    decomposition: Decomposition
    flips: tuple[int, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class SearchResult:
    verdict: Verdict
    witness: BudgetedWitness | None
    nodes: int


def _plane_add(planes: list[int], v: int) -> None:
    # saturating bit-sliced counter; the top plane is sticky
    for i in range(len(planes) - 1):
        carry = planes[i] & v
        planes[i] ^= v
        v = carry
        if not v:
            return
    planes[-1] |= v


def _over_budget(shifts: list[int], bad: int, r: int) -> int:
    """Positions ``p`` where more than ``r`` of the ``bad >> s`` (``s`` in ``shifts``) have bit ``p`` set."""
    if r == 0:
        out = 0
        for s in shifts:
            out |= bad >> s
        return out
    # counts 0..r+1 need r.bit_length()+1 planes plus a sticky overflow flag
    width = (r + 1).bit_length()
    planes = [0] * (width + 1)
    for s in shifts:
        _plane_add(planes, bad >> s)
    # value > r  <=>  overflow or binary value in planes[:width] exceeds r
    over = planes[-1]
    gt = 0
    eq = -1
    for i in reversed(range(width)):
        bit_r = r >> i & 1
        p = planes[i]
        if bit_r:
            eq &= p
        else:
            gt |= eq & p
            eq &= ~p
    return over | gt


def _search(a: int, n: int, cfg: SearchConfig) -> SearchResult:
    mask = window_mask(n)
    s = cfg.min_size
    t = cfg.budget
    cap = cfg.size_cap if cfg.size_cap is not None else n + 1
    capped = cfg.size_cap is not None
    limit = cfg.node_limit
    not_a = ~a & mask

    nodes = 0
    if capped:
        nodes = 1
        # |(Y+Z) ∩ [0,n]| <= cap**2, so at least |A| - cap**2 members must be dropped
        if a.bit_count() - cap * cap > t:
            return SearchResult(Verdict.IRREDUCIBLE, None, nodes)

    # state: (next position, Y, Z, covered sums, flips spent, |Y|, |Z|)
    stack = [(0, 0, 0, 0, 0, 0, 0)]
    while stack:
        x, Y, Z, cov, cost, ny, nz = stack.pop()
        nodes += 1
        if limit is not None and nodes > limit:
            return SearchResult(Verdict.INCONCLUSIVE, None, nodes - 1)
        if x > n:
            if ny >= s and nz >= s:
                dec = Decomposition(SetWindow(n, Y), SetWindow(n, Z))
                flips = tuple(iter_bits(cov ^ a))
                return SearchResult(Verdict.DECOMPOSABLE, BudgetedWitness(SetWindow(n, cov), dec, flips), nodes)
            continue

        left = n - x  # positions still open after x
        xbit = 1 << x
        in_a = a & xbit
        above = mask & ~((xbit << 1) - 1)
        children = []
        for in_y, in_z in ((False, False), (False, True), (True, False), (True, True)):
            if in_z and not in_y and ny == 0:
                continue
            ny2 = ny + in_y
            nz2 = nz + in_z
            if ny2 > cap or nz2 > cap or ny2 + left < s or nz2 + left < s:
                continue
            new = 0
            if in_y:
                new |= Z << x
            if in_z:
                new |= Y << x
            if in_y and in_z:
                new |= xbit << x
            new &= mask
            cov2 = cov | new
            cost2 = cost + (new & ~cov & not_a).bit_count()
            if in_a and not cov2 & xbit:
                cost2 += 1
            if cost2 > t:
                continue
            Y2 = Y | xbit if in_y else Y
            Z2 = Z | xbit if in_z else Z

            need = a & above & ~cov2
            if need:
                # Future factors: a later y may join Y only if its sums with the
                # current Z add at most `r` unpaid non-members (likewise for Z).
                r = t - cost2
                bad = not_a & ~cov2
                open_pos = above
                if Z2:
                    fy = open_pos & ~_over_budget(list(iter_bits(Z2)), bad, r)
                else:
                    fy = open_pos
                if Y2:
                    fz = open_pos & ~_over_budget(list(iter_bits(Y2)), bad, r)
                else:
                    fz = open_pos
                if ny2 == cap:
                    fy = 0
                if nz2 == cap:
                    fz = 0
                reach = 0
                if fy:
                    reach |= sumset_bits(fy, Z2 | fz, n)
                if fz:
                    reach |= sumset_bits(Y2, fz, n)
                missing = (need & ~reach).bit_count()
                if capped:
                    # later placements add at most cap*cap - |Y|*|Z| new sums
                    missing = max(missing, need.bit_count() - (cap * cap - ny2 * nz2))
                if cost2 + missing > t:
                    continue
            children.append((x + 1, Y2, Z2, cov2, cost2, ny2, nz2))
        stack.extend(reversed(children))
    return SearchResult(Verdict.IRREDUCIBLE, None, nodes)


def search(A: SetWindow, config: SearchConfig = SearchConfig()) -> SearchResult:
    """Run the decider and report its verdict, witness and node count."""
    if config.budget > A.length + 1:
        raise UsageError(f"budget {config.budget} exceeds window size {A.length + 1}")
    return _search(A.bits, A.length, config)


def decide_budgeted(A: SetWindow, config: SearchConfig = SearchConfig()) -> BudgetedWitness | None:
    """Find ``A'`` within ``config.budget`` flips of ``A`` that is a truncated sumset.

    Returns ``None`` when no such ``A'`` exists and raises :class:`Inconclusive`
    when ``config.node_limit`` is exhausted first.
    """
    res = search(A, config)
    if res.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive(res.nodes)
    return res.witness


def decide_exact(A: SetWindow, config: SearchConfig = SearchConfig()) -> Decomposition | None:
    if config.budget != 0:
        raise UsageError("decide_exact requires budget 0; use decide_budgeted")
    found = decide_budgeted(A, config)
    return found.decomposition if found is not None else None


def event_parameter(n: int, k: int) -> int:
    if k < 1:
        raise UsageError("k must be >= 1")
    return n // k


def is_in_E_n(X: SetWindow, n: int, k: int, node_limit: int | None = None) -> bool:
    """Is ``X ⊆ [0, n]`` within ``n // k`` flips of some ``(Y+Z) ∩ [0, n]`` with ``|Y|, |Z| <= n // k``?

    When ``n // k == 0`` only empty factors fit, so the event is ``{∅}``.
    """
    X = X.restrict(n) if X.length != n else X
    cap = event_parameter(n, k)
    if cap == 0:
        return X.bits == 0
    cfg = SearchConfig(min_size=1, budget=cap, size_cap=cap, node_limit=node_limit)
    return decide_budgeted(X, cfg) is not None


def oracle_decomposable_masks(n: int, min_size: int = 2, size_cap: int | None = None) -> set[int]:
    """Every mask ``(Y+Z) ∩ [0, n]`` over all factor pairs meeting the size constraints.

    Brute force over all ``4**(n+1)`` ordered pairs; for each ``Y`` the sumsets
    against all ``Z`` are built by doubling: ``S(Z | 1<<b) = S(Z) | (Y << b)``.
    """
    if n < 0:
        raise UsageError("n must be >= 0")
    if n > ORACLE_MAX_N:
        raise LimitExceeded(f"oracle enumeration needs 0 <= n <= {ORACLE_MAX_N}, got {n}")
    size = 1 << (n + 1)
    mask = size - 1
    hi = n + 1 if size_cap is None else size_cap
    idx = np.arange(size, dtype=np.uint32)
    pop = np.zeros(size, dtype=np.int64)
    for b in range(n + 1):
        pop += (idx >> b) & 1
    z_ok = (pop >= min_size) & (pop <= hi)
    seen = np.zeros(size, dtype=bool)
    for y in range(size):
        if not min_size <= pop[y] <= hi:
            continue
        sums = np.zeros(1, dtype=np.uint32)
        for b in range(n + 1):
            sums = np.concatenate([sums, sums | np.uint32(((y << b) & mask))])
        seen[sums[z_ok]] = True
    return set(np.flatnonzero(seen).tolist())


def oracle_pairs_naive(n: int, min_size: int = 2) -> set[int]:
    """Slow twin of :func:`oracle_decomposable_masks` via :func:`sumset_window`; small ``n`` only."""
    subsets = [b for b in range(1 << (n + 1)) if b.bit_count() >= min_size]
    return {
        sumset_window(SetWindow(n, y), SetWindow(n, z), n).bits for y, z in product(subsets, repeat=2)
    }


@dataclass(frozen=True)
class CensusResult:
    n: int
    total: int
    decomposable: int
    irreducible: int
    inconclusive: int

    @property
    def fraction(self) -> float:
        return self.decomposable / self.total


def _census_chunk(args: tuple[int, int, int, SearchConfig]) -> tuple[int, int, int]:
    n, prefix, low_bits, cfg = args
    counts = [0, 0, 0]
    base = prefix << low_bits
    for low in range(1 << low_bits):
        v = _search(base | low, n, cfg).verdict
        if v is Verdict.DECOMPOSABLE:
            counts[0] += 1
        elif v is Verdict.IRREDUCIBLE:
            counts[1] += 1
        else:
            counts[2] += 1
    return counts[0], counts[1], counts[2]


def census(
    n: int, config: SearchConfig = SearchConfig(), workers: int = 1, max_n: int = CENSUS_MAX_N
) -> CensusResult:
    """Classify every ``A ⊆ [0, n]``.

    The mask space is split by its top ``min(n+1, 6)`` bits into disjoint work
    items whose counts are summed, so the result does not depend on ``workers``.
    """
    if n < 0:
        raise UsageError("n must be >= 0")
    if n > max_n:
        raise LimitExceeded(
            f"exhaustive census over 2**{n + 1} windows refused (max n = {max_n}); "
            "estimate the fraction by sampling instead"
        )
    if config.budget > n + 1:
        raise UsageError(f"budget {config.budget} exceeds window size {n + 1}")
    high = min(n + 1, 6)
    low_bits = n + 1 - high
    items = [(n, p, low_bits, config) for p in range(1 << high)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_census_chunk, items))
    else:
        parts = [_census_chunk(it) for it in items]
    dec = sum(p[0] for p in parts)
    irr = sum(p[1] for p in parts)
    inc = sum(p[2] for p in parts)
    return CensusResult(n, 1 << (n + 1), dec, irr, inc)
