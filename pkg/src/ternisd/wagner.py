"""Generalized-birthday subset-sum engine over GF(3).

Leaf lists hold random {0,1}-combinations of contiguous column stacks;
pairs of lists are repeatedly joined under an equality constraint on a
fresh window of trit positions until every position is constrained.
The multi-target variant replaces the last leaf by the (negated) target
list so only 2^a - 1 lists are generated from the columns.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .f3 import TritVector
from .pgess import Budget, ssnzc_to_ss

LOG2_3 = math.log2(3)


class ParamError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    key: TritVector                 # element of GF(3)^ell
    coeff: TritVector               # coefficient vector over the full column range
    index: int = 0                  # target index (multi-target solves)


@dataclass
class MergeList:
    entries: list[Entry]
    sorted_window: Optional[tuple[int, int]] = None  # [lo, hi) of the last sort

    def __len__(self) -> int:
        return len(self.entries)


def window_value(key: TritVector, lo: int, hi: int) -> int:
    """Trit window as a base-3 integer, packed-plane extraction."""
    mask = (1 << (hi - lo)) - 1
    p1 = (key.p1 >> lo) & mask
    p2 = (key.p2 >> lo) & mask
    v = 0
    for i in range(hi - lo):
        v = 3 * v + (((p1 >> i) & 1) + 2 * ((p2 >> i) & 1))
    return v


def stack_partition(m: int, stacks: int) -> list[tuple[int, int]]:
    """Contiguous stacks; the remainder spreads one-per-stack from the left."""
    base, extra = divmod(m, stacks)
    bounds = []
    start = 0
    for i in range(stacks):
        size = base + (1 if i < extra else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def theorem_constraint_ok(k: int, ell: int, a: int) -> bool:
    """3^(ell/a) <= 2^((k+ell)/2^a)."""
    return (ell / a) * LOG2_3 <= (k + ell) / (2 ** a)


def doom_constraint_ok(k: int, ell: int, a: int) -> bool:
    """Relaxed version with 2^a - 1 generated lists."""
    return (ell / a) * LOG2_3 <= (k + ell) / (2 ** a - 1)


@dataclass(frozen=True)
class WagnerParams:
    """Floor count and per-round constraint widths for one tree solve.

    Widths are kept in log2 units and realized as trit positions by the
    schedule, with the rounding residue pushed to the final round so the
    positions sum to ell exactly.
    """

    a: int
    merge_widths: tuple[float, ...]
    leaf_size_log2: float

    def validate(self, k: int, ell: int) -> None:
        if len(self.merge_widths) != self.a:
            raise ParamError("one width per round")
        total = sum(self.merge_widths)
        if abs(total - ell * LOG2_3) > 1e-9:
            raise ParamError(f"widths sum to {total}, need ell*log2(3) = {ell * LOG2_3}")
        if self.leaf_size_log2 > (k + ell) / 2 ** self.a + 1e-9:
            raise ParamError("leaf size exceeds stack capacity")

    @staticmethod
    def for_instance(k: int, ell: int, a: Optional[int] = None) -> "WagnerParams":
        sp = smoothed_params(k, ell)
        a = a if a is not None else sp.a
        if sp.smoothed and a == sp.a:
            later = [sp.lambda_log2] * (a - 1)
            widths = tuple([sp.m_log2] + later)
            leaf = (k + ell) / 2 ** a
        else:
            widths = tuple([ell * LOG2_3 / a] * a)
            leaf = min((k + ell) / 2 ** a, ell * LOG2_3 / a)
        return WagnerParams(a=a, merge_widths=widths, leaf_size_log2=leaf)

    def trit_schedule(self, ell: int) -> list[int]:
        trits = [round(w / LOG2_3) for w in self.merge_widths[: self.a - 1]]
        used = sum(trits)
        if used > ell:
            trits = [int(w / LOG2_3) for w in self.merge_widths[: self.a - 1]]
            used = sum(trits)
        return trits + [ell - used]


@dataclass(frozen=True)
class SmoothedParams:
    a: int
    lambda_log2: float
    m_log2: float           # first-level constraint width in log2 units
    smoothed: bool

    @property
    def m_trits(self) -> float:
        return self.m_log2 / LOG2_3


def smoothed_params(k: int, ell: int) -> SmoothedParams:
    """List size allowing amortized O(1) output, with the fractional floor count.

    Picks the largest a with 3^(ell/(a-1)) < 2^((k+ell)/2^(a-1)); for
    a >= 3 the first merge window shrinks so that maximal leaves feed
    constant-size lists everywhere above.  Below a = 3 there is nothing
    to smooth and the integer-floor schedule is returned.
    """
    if ell <= 0:
        return SmoothedParams(a=1, lambda_log2=0.0, m_log2=0.0, smoothed=False)
    a = 1
    while a <= 64 and (ell / a) * LOG2_3 < (k + ell) / (2 ** a):
        a += 1
    # loop exits at the first failing floor count, so the strict inequality
    # holds at a - 1 and a is the value the refinement wants
    if a < 3:
        a_t1 = max((j for j in range(1, 65) if theorem_constraint_ok(k, ell, j)), default=1)
        lam = (ell / a_t1) * LOG2_3
        return SmoothedParams(a=a_t1, lambda_log2=lam, m_log2=lam, smoothed=False)
    lam = ell * LOG2_3 / (a - 2) - (k + ell) / ((a - 2) * 2 ** (a - 1))
    m_log2 = 2 * (k + ell) / 2 ** a - lam
    return SmoothedParams(a=a, lambda_log2=lam, m_log2=m_log2, smoothed=True)


def width_schedule(ell: int, a: int) -> list[int]:
    """Per-round trit windows; rounding residue lands on the final round."""
    per = ell / a
    widths = [round(per)] * (a - 1) if a > 1 else []
    used = sum(widths)
    if used > ell:  # clamp pathological rounding at tiny ell
        widths = [ell // a] * (a - 1)
        used = sum(widths)
    widths.append(ell - used)
    return widths


def build_leaves(
    columns: Sequence[TritVector],
    a: int,
    L: int,
    rng,
    doom_targets: Optional[Sequence[TritVector]] = None,
) -> list[MergeList]:
    """2^a leaf lists of {0,1}-combinations with coefficient tracking.

    When ``doom_targets`` is given, the columns are split over 2^a - 1
    stacks and the final leaf holds the negated targets (so the root
    condition becomes "sum equals zero"), each entry tagged with its
    target index.
    """
    m = len(columns)
    ell = columns[0].length if columns else 0
    n_lists = 2 ** a
    gen_lists = n_lists - 1 if doom_targets is not None else n_lists
    bounds = stack_partition(m, gen_lists)
    leaves = []
    for lo, hi in bounds:
        size = hi - lo
        cap = 1 << size
        if L > cap:
            raise ParamError(f"leaf size {L} exceeds stack capacity {cap}")
        if 2 * L >= cap:
            subsets = range(cap)
        else:
            seen = set()
            while len(seen) < L:
                seen.add(int(rng.integers(0, cap)))
            subsets = sorted(seen)
        entries = []
        for bits in subsets:
            key = TritVector.zeros(ell)
            for i in range(size):
                if (bits >> i) & 1:
                    key = key.add(columns[lo + i])
            coeff = TritVector(m, bits << lo, 0)
            entries.append(Entry(key, coeff))
        leaves.append(MergeList(entries))
    if doom_targets is not None:
        entries = [
            Entry(t.neg(), TritVector.zeros(m), index=i) for i, t in enumerate(doom_targets)
        ]
        leaves.append(MergeList(entries))
    return leaves


def merge(
    left: MergeList,
    right: MergeList,
    window: tuple[int, int],
    residue_target: TritVector,
    budget: Optional[Budget] = None,
) -> MergeList:
    """Pairs whose key sum matches the residue on the window, sort-merge join."""
    lo, hi = window
    if lo == hi:
        out = [
            Entry(el.key.add(er.key), el.coeff.add(er.coeff), el.index + er.index)
            for el in left.entries
            for er in right.entries
        ]
        if budget is not None:
            budget.spend(max(1, len(out)))
        return MergeList(out)
    t = window_value(residue_target, lo, hi)
    lsorted = sorted(left.entries, key=lambda e: window_value(e.key, lo, hi))
    rsorted = sorted(right.entries, key=lambda e: window_value(e.key, lo, hi))
    rvals = [window_value(e.key, lo, hi) for e in rsorted]
    out = []
    span = hi - lo
    for el in lsorted:
        lv = window_value(el.key, lo, hi)
        # digit-wise complement (t - lv) over GF(3)^span, same positional encoding
        need = 0
        tv, lvv, mult = t, lv, 1
        for _ in range(span):
            need += ((tv % 3 - lvv % 3) % 3) * mult
            tv //= 3
            lvv //= 3
            mult *= 3
        i = bisect.bisect_left(rvals, need)
        stop = False
        while i < len(rvals) and rvals[i] == need:
            er = rsorted[i]
            out.append(Entry(el.key.add(er.key), el.coeff.add(er.coeff), el.index + er.index))
            i += 1
            if budget is not None and not budget.spend():
                stop = True
                break
        if stop or (budget is not None and not budget.spend()):
            break
    return MergeList(out, sorted_window=None)


def solve_binary(
    columns: Sequence[TritVector],
    target: TritVector,
    a: int,
    L: int,
    rng,
    budget: Optional[Budget] = None,
    doom_targets: Optional[Sequence[TritVector]] = None,
) -> list[Entry]:
    """{0,1} subset-sum solutions via the a-level merge tree.

    Returns root entries; each coefficient vector re-sums to the target
    (or to ``doom_targets[entry.index]`` in the multi-target variant).
    """
    ell = target.length
    if a < 1:
        raise ParamError("a must be >= 1")
    k = len(columns) - ell
    if doom_targets is None and not theorem_constraint_ok(k, ell, a):
        # allowed at desk scale when leaves are exhaustive; re-check capacity
        bounds = stack_partition(len(columns), 2 ** a)
        if any(L > (1 << (hi - lo)) for lo, hi in bounds):
            raise ParamError("list size infeasible for this floor count")
    lists = build_leaves(columns, a, L, rng, doom_targets)
    widths = width_schedule(ell, a)
    zero = TritVector.zeros(ell)
    effective_target = zero if doom_targets is not None else target
    hi = ell
    for rnd in range(a):
        t = widths[rnd]
        lo = hi - t
        nxt = []
        for i in range(0, len(lists), 2):
            residue = effective_target if i + 2 >= len(lists) else zero
            nxt.append(merge(lists[i], lists[i + 1], (lo, hi), residue, budget))
        lists = nxt
        hi = lo
    assert hi == 0 and len(lists) == 1
    return lists[0].entries


def resummation_check(columns: Sequence[TritVector], entry: Entry, target: TritVector) -> bool:
    acc = TritVector.zeros(target.length)
    coeff = entry.coeff
    for i in range(coeff.length):
        c = coeff[i]
        if c:
            acc = acc.add(columns[i].scale(c))
    return acc == target


class WagnerEngine:
    """Full-weight subset-sum engine behind the solve-loop contract.

    Declares weight k + ell: the binary tree output is shifted back to
    {1,2} coefficients through the binary reduction.
    """

    def __init__(self, p: int, a: Optional[int] = None, leaf_size: Optional[int] = None):
        self.weight = p
        self.a = a
        self.leaf_size = leaf_size

    def _choose_a(self, m: int, ell: int) -> int:
        if self.a is not None:
            return self.a
        return 2 if m >= 4 and ell >= 2 else 1

    def _choose_L(self, m: int, a: int) -> int:
        if self.leaf_size is not None:
            return self.leaf_size
        bounds = stack_partition(m, 2 ** a)
        smallest = min(hi - lo for lo, hi in bounds)
        return 1 << smallest if smallest <= 12 else 4096

    def solve(self, columns, target, rng, budget: Budget):
        if self.weight != len(columns):
            raise ParamError("engine declares full weight: p must equal k + ell")
        red = ssnzc_to_ss(list(columns), target)
        a = self._choose_a(len(columns), target.length)
        L = self._choose_L(len(columns), a)
        for entry in solve_binary(columns, red.transformed_target, a, L, rng, budget):
            yield red.to_ssnzc(entry.coeff)

    def solve_multi(self, columns, targets, rng, budget: Budget):
        if self.weight != len(columns):
            raise ParamError("engine declares full weight: p must equal k + ell")
        acc = TritVector.zeros(targets[0].length)
        for x in columns:
            acc = acc.add(x)
        transformed = [t.sub(acc) for t in targets]
        a = self._choose_a(len(columns), targets[0].length)
        L = self._choose_L(len(columns), a)
        m = len(columns)
        all_ones = TritVector(m, (1 << m) - 1, 0)
        for entry in solve_binary(
            columns, TritVector.zeros(targets[0].length), a, L, rng, budget,
            doom_targets=transformed,
        ):
            yield entry.coeff.add(all_ones), entry.index
