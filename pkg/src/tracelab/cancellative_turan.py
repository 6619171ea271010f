"""Cancellative and union-free uniform families, their extremal sizes at
desk scale, and small exact Turán numbers for four-vertex triple patterns.

An l-graph is *cancellative* when no three edges H1, H2, H3 satisfy
|H1 & H2| = l-1 and H1 ^ H2 inside H3.  For l = 2 this is exactly
triangle-freeness; the extremal counts follow the balanced-product
formula prod floor((n+i)/l) in the supported range, which the searches
here confirm exactly.

The two triple patterns live on four vertices: the complete one (all
four triples) and the one-short variant (any three).  Their Turán
numbers compose, together with the full lower levels, into the least
family size forcing a 4-window trace of 2^4 - 1 resp. 2^4 - 2.
"""

from __future__ import annotations

from enum import Enum
from itertools import combinations
from math import comb
from time import perf_counter
from typing import NamedTuple

from .search import (
    DEFAULT_BUDGET_NODES,
    DEFAULT_BUDGET_SECS,
    SearchResult,
    _Budget,
    _candidate_masks,
    _canonicalize,
    _solve_state,
)
from .setcore import (
    FamilyError,
    SetFamily,
    arrows,
    elements_of,
    is_downset,
    level,
    trace_size,
)


class Pattern(Enum):
    """Triple patterns on k+1 vertices: all k-sets, or one short of all."""

    K_COMPLETE = "k4"
    K_MINUS = "k4minus"

    def window_limit(self, k: int) -> int:
        """Most k-sets a (k+1)-window may span while staying pattern-free."""
        return k if self is Pattern.K_COMPLETE else k - 1

    def forced_trace(self, k: int) -> int:
        """Trace level a (k+1)-window reaches once the pattern appears
        inside a down-set."""
        full = 1 << (k + 1)
        return full - 1 if self is Pattern.K_COMPLETE else full - 2


class PatternCheck(NamedTuple):
    ok: bool
    witness: tuple[int, int, int] | None  # (H1, H2, H3) masks when violated


def _require_uniform(h: SetFamily, l: int) -> None:
    bad = [set(elements_of(m)) for m in h.members if m.bit_count() != l]
    if bad:
        raise FamilyError(f"expected a {l}-uniform family, offending members {bad}")


def is_cancellative(h: SetFamily, l: int) -> PatternCheck:
    """No edges H1, H2 meeting in l-1 points with H1 ^ H2 inside a third
    edge.  The witness triple, when present, is the first in canonical
    scan order (members sorted by mask)."""
    _require_uniform(h, l)
    ms = h.members
    for i, h1 in enumerate(ms):
        for h2 in ms[i + 1 :]:
            if (h1 & h2).bit_count() != l - 1:
                continue
            d = h1 ^ h2
            for h3 in ms:
                if d & h3 == d:
                    return PatternCheck(False, (h1, h2, h3))
    return PatternCheck(True, None)


def is_unionfree(h: SetFamily, l: int) -> PatternCheck:
    """No three distinct edges with F1 ^ F2 inside F3; strictly stronger
    than cancellative (the intersection size is unconstrained)."""
    _require_uniform(h, l)
    ms = h.members
    for i, f1 in enumerate(ms):
        for f2 in ms[i + 1 :]:
            d = f1 ^ f2
            if d.bit_count() > l:
                continue
            for f3 in ms:
                if d & f3 == d:
                    # f3 cannot equal f1 or f2: d leaves both
                    return PatternCheck(False, (f1, f2, f3))
    return PatternCheck(True, None)


def violation_trace_window(fam: SetFamily, l: int) -> int | None:
    """Window certifying a big trace out of a cancellativity breach.

    Looks for F1, F2 at level l meeting in l-1 points whose symmetric
    difference belongs to the down-set (equivalently, lies inside some
    member).  Their union Y then carries, besides the two full power
    sets 2^F1 and 2^F2, the extra pair F1 ^ F2, so the trace reaches
    3 * 2^(l-1) + 1.  The bound is recounted before returning; None when
    no qualifying pair exists.
    """
    if not is_downset(fam):
        raise FamilyError("expected a down-set")
    target = 3 * (1 << (l - 1)) + 1
    lv = level(fam, l).members
    for i, f1 in enumerate(lv):
        for f2 in lv[i + 1 :]:
            if (f1 & f2).bit_count() != l - 1:
                continue
            if (f1 ^ f2) not in fam:
                continue
            y = f1 | f2
            if trace_size(fam, y) >= target:
                return y
    return None


def pattern_free(h: SetFamily, k: int, pattern: Pattern) -> bool:
    """True iff no k+1 vertices span more k-sets than the pattern allows."""
    _require_uniform(h, k)
    if h.n < k + 1:
        return len(h) <= pattern.window_limit(k)
    limit = pattern.window_limit(k)
    ms = h.members
    for combo in combinations(range(h.n), k + 1):
        w = 0
        for b in combo:
            w |= 1 << b
        if sum(1 for m in ms if m & w == m) > limit:
            return False
    return True


class ArrowPatternVerdict(NamedTuple):
    arrow_holds: bool
    pattern_free: bool


def arrow_vs_pattern(fam: SetFamily, k: int, pattern: Pattern) -> ArrowPatternVerdict:
    """Both sides of the equivalence for down-sets with members of size
    at most k: some (k+1)-window reaches the pattern's trace level iff
    the k-level is not pattern-free."""
    oversize = [set(elements_of(m)) for m in fam.members if m.bit_count() > k]
    if oversize:
        raise FamilyError(f"members larger than {k}: {oversize}")
    if not is_downset(fam):
        raise FamilyError("expected a down-set")
    if fam.n < k + 1:
        raise FamilyError(f"need n >= {k + 1} for (k+1)-windows")
    holds = arrows(fam, k + 1, pattern.forced_trace(k))
    free = pattern_free(level(fam, k), k, pattern)
    return ArrowPatternVerdict(holds, free)


# ---------------------------------------------------------------------------
# extremal searches


class _CancellativeState:
    """Incremental cancellative feasibility for l >= 3.

    Bookkeeping: ``diffs`` counts symmetric differences of chosen pairs
    meeting in l-1 points (future edges must avoid covering them) and
    ``cov2`` counts 2-subsets covered by chosen edges (new co-(l-1)
    pairs must not have their difference already covered).
    """

    def __init__(self, n: int, l: int):
        self.nbits = n
        self.l = l
        self.masks = _candidate_masks(n, [l])
        self.cards = [l] * len(self.masks)
        self.idx_of = {m: i for i, m in enumerate(self.masks)}
        self.by_card = {l: list(range(len(self.masks)))}
        self.card_list_desc = [l]
        self.min_card = l
        self.status = [0] * len(self.masks)
        self.chosen_masks: list[int] = []
        self.diffs: dict[int, int] = {}
        self.cov2: dict[int, int] = {}
        self.pair_subsets = [self._two_subsets(m) for m in self.masks]
        self.feasible_root = True

    @staticmethod
    def _two_subsets(m: int) -> tuple[int, ...]:
        bits = []
        b = m
        while b:
            low = b & -b
            bits.append(low)
            b ^= low
        return tuple(x | y for i, x in enumerate(bits) for y in bits[i + 1 :])

    def _addable_mask(self, e: int, subs) -> bool:
        diffs = self.diffs
        for d in subs:
            if d in diffs:
                return False
        lm1 = self.l - 1
        cov2 = self.cov2
        for f in self.chosen_masks:
            if (e & f).bit_count() == lm1 and (e ^ f) in cov2:
                return False
        return True

    def try_add_group(self, i: int):
        e = self.masks[i]
        subs = self.pair_subsets[i]
        if self.status[i] != 0 or not self._addable_mask(e, subs):
            return None
        lm1 = self.l - 1
        for f in self.chosen_masks:
            if (e & f).bit_count() == lm1:
                d = e ^ f
                self.diffs[d] = self.diffs.get(d, 0) + 1
        for d in subs:
            self.cov2[d] = self.cov2.get(d, 0) + 1
        self.chosen_masks.append(e)
        self.status[i] = 1
        return [i]

    def undo_add_group(self, adds) -> None:
        (i,) = adds
        e = self.masks[i]
        self.status[i] = 0
        self.chosen_masks.pop()
        for d in self.pair_subsets[i]:
            if self.cov2[d] == 1:
                del self.cov2[d]
            else:
                self.cov2[d] -= 1
        lm1 = self.l - 1
        for f in self.chosen_masks:
            if (e & f).bit_count() == lm1:
                d = e ^ f
                if self.diffs[d] == 1:
                    del self.diffs[d]
                else:
                    self.diffs[d] -= 1

    def mark_out(self, i: int) -> None:
        self.status[i] = 2

    def unmark_out(self, i: int) -> None:
        self.status[i] = 0

    def pick_first(self):
        for i in range(len(self.masks)):
            if self.status[i] == 0 and self._addable_mask(self.masks[i], self.pair_subsets[i]):
                return i
        return None

    def bound_remaining(self) -> int:
        return sum(
            1
            for i in range(len(self.masks))
            if self.status[i] == 0 and self._addable_mask(self.masks[i], self.pair_subsets[i])
        )

    def all_in_candidates(self):
        return None


def _build_cancellative_state(n: int, l: int) -> _CancellativeState:
    return _CancellativeState(n, l)


def max_cancellative(
    n: int,
    l: int,
    budget_nodes: int = DEFAULT_BUDGET_NODES,
    budget_secs: float = DEFAULT_BUDGET_SECS,
    threads: int = 1,
    use_symmetry: bool = True,
) -> SearchResult:
    """Exact maximum size of a cancellative l-graph on [n] (l in {2, 3});
    expected to match prod floor((n+i)/l) in the supported range."""
    if l not in (2, 3):
        raise FamilyError(f"cancellative search supports l in {{2, 3}}, got l={l}")
    if not l <= n <= 12:
        raise FamilyError(f"need l <= n <= 12, got n={n}")
    t0 = perf_counter()
    budget = _Budget(budget_nodes, budget_secs)
    if l == 2:
        # triangle-free == cancellative for graphs: cap 2 edges per 3-window
        spec, args = "tracelab.search:_build_uniform_window_state", (n, 2, 3, 2)
    else:
        spec, args = "tracelab.cancellative_turan:_build_cancellative_state", (n, l)
    got, sel, comp = _solve_state(
        spec,
        args,
        best0=-1,
        exclude_first_cards=frozenset(),
        budget=budget,
        use_symmetry=use_symmetry,
        threads=threads,
    )
    witness = SetFamily.from_masks(n, _canonicalize(sel or [], n))
    if len(witness) != max(got, 0) or not is_cancellative(witness, l).ok:
        raise RuntimeError("witness failed independent re-verification")
    return SearchResult(len(witness), witness, comp, budget.nodes, perf_counter() - t0)


def ex3(
    n: int,
    pattern: Pattern,
    budget_nodes: int = DEFAULT_BUDGET_NODES,
    budget_secs: float = DEFAULT_BUDGET_SECS,
    threads: int = 1,
    use_symmetry: bool = True,
) -> SearchResult:
    """Exact Turán number: most triples on [n] with every 4-window
    spanning at most the pattern's limit.  Values at these sizes are
    computed data, not published constants."""
    if not 4 <= n <= 12:
        raise FamilyError(f"need 4 <= n <= 12, got n={n}")
    t0 = perf_counter()
    budget = _Budget(budget_nodes, budget_secs)
    limit = pattern.window_limit(3)
    got, sel, comp = _solve_state(
        "tracelab.search:_build_uniform_window_state",
        (n, 3, 4, limit),
        best0=-1,
        exclude_first_cards=frozenset(),
        budget=budget,
        use_symmetry=use_symmetry,
        threads=threads,
    )
    witness = SetFamily.from_masks(n, _canonicalize(sel or [], n))
    if len(witness) != max(got, 0) or not pattern_free(witness, 3, pattern):
        raise RuntimeError("witness failed independent re-verification")
    # independent window recount, bypassing the search bookkeeping
    for combo in combinations(range(n), 4):
        w = 0
        for b in combo:
            w |= 1 << b
        if sum(1 for m in witness.members if m & w == m) > limit:
            raise RuntimeError("witness failed independent re-verification")
    return SearchResult(len(witness), witness, comp, budget.nodes, perf_counter() - t0)


def forcing_size_from_turan(n: int, k: int, pattern: Pattern, **search_kw) -> int:
    """Least size forcing a (k+1)-window trace at the pattern's level,
    composed as 1 + sum_{l<k} C(n,l) + (Turán number of the pattern)."""
    if k != 3:
        raise FamilyError("only k=3 is supported (triple patterns)")
    ex = ex3(n, pattern, **search_kw)
    if not ex.proved_optimal:
        raise FamilyError("Turán search hit its budget; composition would be unproven")
    return 1 + sum(comb(n, i) for i in range(k)) + ex.optimum
