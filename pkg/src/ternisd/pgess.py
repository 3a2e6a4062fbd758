"""Permutation / partial-elimination / subset-sum / test solve loop.

The framework owns the permutation and the row reduction; engines only
ever see the ``ell x (k+ell)`` reduced matrix as a list of columns in
GF(3)^ell plus a target, and return coefficient vectors.  Every solution
an engine emits is re-verified here before it is accepted.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Optional, Protocol

from .f3 import Permutation, TritMatrix, TritVector, partial_gaussian_elim, syndrome
from .instances import DoomInstance, SdInstance, TAG_SOLVE, stream

LOG2_3 = math.log2(3)


class InfeasibleError(ValueError):
    """Parameters admit no solution path."""


def binom_log2(n: float, k: float) -> float:
    if k < 0 or k > n:
        return float("-inf")
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / math.log(2)


def success_prob_log2(n: int, k: int, ell: int, p: int, w: int, q: int = 3) -> float:
    """log2 of the per-candidate probability that the residual weight lands.

    Numerator counts weight-(w-p) residuals; the denominator is the
    smaller of the ambient space and the solution-count bound.
    """
    if w - p < 0 or w - p > n - k - ell:
        return float("-inf")
    num = binom_log2(n - k - ell, w - p) + (w - p) * math.log2(q - 1)
    den = min(
        (n - k - ell) * math.log2(q),
        binom_log2(n, w) + w * math.log2(q - 1) - ell * math.log2(q),
    )
    return num - den


def expected_runtime_log2(T_log2: float, S_log2: float, P_log2: float) -> float:
    """T * max(1, 1/(|S| P)) in log2 units."""
    return T_log2 + max(0.0, -(S_log2 + P_log2))


@dataclass
class Budget:
    """Shared operation budget; engines and the test loop draw it down."""

    ops: int = 10 ** 9

    def spend(self, amount: int = 1) -> bool:
        if self.ops <= 0:
            return False
        self.ops -= amount
        return self.ops > -1

    @property
    def exhausted(self) -> bool:
        return self.ops <= 0


@dataclass(frozen=True)
class PgessParams:
    ell: int
    p: int
    max_restarts: int = 200
    target_solutions_per_restart: int = 0  # 0: engine default


class SubsetSumEngine(Protocol):
    """Finds coefficient vectors b over GF(3) with sum_i b_i x_i = target."""

    weight: Optional[int]  # declared weight of every returned vector; None = unconstrained

    def solve(
        self,
        columns: list[TritVector],
        target: TritVector,
        rng,
        budget: Budget,
    ) -> Iterable[TritVector]:
        ...


@dataclass
class SolveReport:
    solution: Optional[TritVector] = None
    syndrome_index: Optional[int] = None  # multi-syndrome solves only
    restarts_used: int = 0
    subset_sum_candidates_tested: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SsnzcReduction:
    """Full-weight GF(3) subset sum rewritten as a binary subset sum.

    With b = b' + 1 coordinate-wise, sum b_i x_i = s becomes
    sum b'_i x_i = s - sum x_i over b' in {0,1}.
    """

    transformed_target: TritVector
    column_sum: TritVector

    def to_ssnzc(self, bprime: TritVector) -> TritVector:
        all_ones = TritVector(bprime.length, (1 << bprime.length) - 1, 0)
        return bprime.add(all_ones)

    def to_ss(self, b: TritVector) -> TritVector:
        all_ones = TritVector(b.length, (1 << b.length) - 1, 0)
        return b.sub(all_ones)


def ssnzc_to_ss(columns: list[TritVector], target: TritVector) -> SsnzcReduction:
    acc = TritVector.zeros(target.length)
    for x in columns:
        acc = acc.add(x)
    return SsnzcReduction(transformed_target=target.sub(acc), column_sum=acc)


class EnumerationEngine:
    """Exhaustive weight-p enumeration over the reduced columns.

    With ell = 0 this is the classic information-set baseline; with
    ell > 0 it filters candidates against the parity window directly.
    """

    def __init__(self, weight: int):
        self.weight = weight

    def solve(self, columns, target, rng, budget: Budget) -> Iterator[TritVector]:
        m = len(columns)
        p = self.weight
        if p > m:
            return
        for support in combinations(range(m), p):
            for pattern in product((1, 2), repeat=p):
                if not budget.spend():
                    return
                acc = TritVector.zeros(target.length)
                for pos, val in zip(support, pattern):
                    acc = acc.add(columns[pos].scale(val))
                if acc == target:
                    trits = [0] * m
                    for pos, val in zip(support, pattern):
                        trits[pos] = val
                    yield TritVector.from_trits(trits)


def _split_syndrome(S: TritMatrix, s: TritVector, ell: int) -> tuple[TritVector, TritVector]:
    st = S.mul_vec(s)
    r = st.length - ell
    return st.slice(0, r), st.slice(r, st.length)


def _attempt(
    inst_H: TritMatrix,
    targets: list[TritVector],
    n: int,
    k: int,
    w: int,
    params: PgessParams,
    engine: SubsetSumEngine,
    rng,
    budget: Budget,
) -> tuple[Optional[tuple[TritVector, int]], int]:
    """One restart: permutation, elimination, subset sum, test.

    Returns (hit or None, candidates tested); the count is kept local so
    parallel restarts reduce deterministically.
    """
    ell, p = params.ell, params.p
    perm = None
    pge = None
    for _ in range(100 * n):
        mapping = list(range(n))
        # Fisher-Yates with the restart stream
        for i in range(n - 1):
            j = i + int(rng.integers(0, n - i))
            mapping[i], mapping[j] = mapping[j], mapping[i]
        perm = Permutation(tuple(mapping))
        pge = partial_gaussian_elim(inst_H, ell, perm)
        if pge is not None:
            break
    if pge is None:
        raise RuntimeError("could not find an invertible leading block")

    columns = pge.Hsecond.columns()
    split = [_split_syndrome(pge.S, s, ell) for s in targets]
    tested = 0

    def test(e_second: TritVector, idx: int) -> Optional[tuple[TritVector, int]]:
        s_prime = split[idx][0]
        e_prime = s_prime.sub(pge.Hprime.mul_vec(e_second))
        if e_prime.weight() != w - p:
            return None
        e_perm = e_prime.concat(e_second)
        e = perm.unpermute_vector(e_perm)
        # never trust the engine: full re-verification
        if e.weight() == w and syndrome(inst_H, e) == targets[idx]:
            return e, idx
        return None

    solve_multi = getattr(engine, "solve_multi", None)
    if len(targets) > 1 and solve_multi is not None:
        for e_second, idx in solve_multi(columns, [t[1] for t in split], rng, budget):
            tested += 1
            hit = test(e_second, idx)
            if hit is not None:
                return hit, tested
            if budget.exhausted:
                return None, tested
        return None, tested

    for idx, (_, s_second) in enumerate(split):
        for e_second in engine.solve(columns, s_second, rng, budget):
            tested += 1
            hit = test(e_second, idx)
            if hit is not None:
                return hit, tested
            if budget.exhausted:
                return None, tested
        if budget.exhausted:
            return None, tested
    return None, tested


def run(
    inst: SdInstance,
    params: PgessParams,
    engine: SubsetSumEngine,
    budget: Optional[Budget] = None,
    threads: int = 1,
) -> SolveReport:
    return _run_targets(inst.H, [inst.s], inst.n, inst.k, inst.w, inst.seed, params, engine, budget, threads)


def run_doom(
    inst: DoomInstance,
    params: PgessParams,
    engine: SubsetSumEngine,
    budget: Optional[Budget] = None,
    threads: int = 1,
) -> SolveReport:
    return _run_targets(
        inst.H, list(inst.syndromes), inst.n, inst.k, inst.w, inst.seed, params, engine, budget, threads
    )


def _run_targets(
    H: TritMatrix,
    targets: list[TritVector],
    n: int,
    k: int,
    w: int,
    seed: int,
    params: PgessParams,
    engine: SubsetSumEngine,
    budget: Optional[Budget],
    threads: int,
) -> SolveReport:
    if engine.weight is not None and engine.weight != params.p:
        raise InfeasibleError("engine weight constraint differs from params.p")
    if not (0 <= params.ell <= n - k) or not (0 <= params.p <= k + params.ell):
        raise InfeasibleError("ell or p out of range")
    budget = budget if budget is not None else Budget()
    t0 = time.perf_counter()
    report = SolveReport()

    def one(i: int) -> tuple[Optional[tuple[TritVector, int]], int]:
        rng = stream(seed, TAG_SOLVE, i)
        return _attempt(H, targets, n, k, w, params, engine, rng, budget)

    restarts = 0
    tested_total = 0
    found: Optional[tuple[TritVector, int]] = None
    if threads <= 1:
        for i in range(params.max_restarts):
            restarts += 1
            found, tested = one(i)
            tested_total += tested
            if found is not None or budget.exhausted:
                break
    else:
        # deterministic reduction: chunks in index order, first hit wins
        with ThreadPoolExecutor(max_workers=threads) as pool:
            i = 0
            while i < params.max_restarts and found is None and not budget.exhausted:
                chunk = list(range(i, min(i + threads, params.max_restarts)))
                for res, tested in pool.map(one, chunk):
                    restarts += 1
                    tested_total += tested
                    if res is not None and found is None:
                        found = res
                i += len(chunk)

    report.restarts_used = restarts
    report.subset_sum_candidates_tested = tested_total
    if found is not None:
        report.solution, report.syndrome_index = found
    report.wall_time = time.perf_counter() - t0
    return report


def default_restart_budget(n: int, k: int, ell: int, p: int, w: int, s_count_log2: float, cap: int = 10_000) -> int:
    """ceil(8 / success-estimate) with a hard cap, geometric-trial bound."""
    per = success_prob_log2(n, k, ell, p, w) + max(0.0, s_count_log2)
    if per == float("-inf"):
        return cap
    est = min(1.0, 2.0 ** per)
    if est <= 0:
        return cap
    return min(cap, max(1, math.ceil(8.0 / est)))
