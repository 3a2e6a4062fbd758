"""Representation-technique machinery: decomposition counting and the layered tree.

Counting side: a vector with given 1/2-densities is written as a sum of
two vectors of prescribed densities; the number of ways is governed by a
nine-cell decomposition table with two degrees of freedom, one of which
(the asymmetry) is always zero at the optimum, leaving a degree-3
stationarity condition in the remaining variable z.

Solving side: a layered merge tree where some levels split supports
left/right and others split values into prescribed-density summands,
discarding merged sums whose coordinate composition misses the target
(the badly-formed ones).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence, Union

from scipy.optimize import brentq

from .f3 import TritVector
from .pgess import Budget, ssnzc_to_ss
from .wagner import Entry, MergeList, merge, width_schedule

LOG2_3 = math.log2(3)


class InfeasiblePairError(ValueError):
    """No decomposition table exists for the requested density pair."""


@dataclass(frozen=True)
class Density:
    alpha: float  # fraction of coordinates equal to 1
    beta: float   # fraction equal to 2

    def __post_init__(self):
        if self.alpha < -1e-12 or self.beta < -1e-12 or self.alpha + self.beta > 1 + 1e-12:
            raise ValueError(f"invalid density ({self.alpha}, {self.beta})")

    @property
    def zero(self) -> float:
        return 1.0 - self.alpha - self.beta


def xlog2x(x: float) -> float:
    return 0.0 if x <= 0 else x * math.log2(x)


def g(n: float, k1: float, k2: float) -> float:
    """Multinomial exponent n*lg(n) - k1*lg(k1) - k2*lg(k2) - (n-k1-k2)*lg(...)."""
    rest = n - k1 - k2
    if k1 < -1e-12 or k2 < -1e-12 or rest < -1e-12:
        raise ValueError(f"g domain violation: ({n}, {k1}, {k2})")
    return xlog2x(n) - xlog2x(max(k1, 0.0)) - xlog2x(max(k2, 0.0)) - xlog2x(max(rest, 0.0))


def entropy3(d: Density) -> float:
    """Per-coordinate count exponent of vectors with composition d."""
    return g(1.0, d.alpha, d.beta)


def _table_coeffs(a0: Density, a1: Density) -> tuple[float, float, float, float, float]:
    A1 = 2 * a0.alpha + a0.beta - a1.alpha - 2 * a1.beta
    A2 = a0.alpha + 2 * a0.beta - 2 * a1.alpha - a1.beta
    B1 = -2 * a0.alpha - a0.beta + 4 * a1.alpha + 2 * a1.beta
    B2 = -a0.alpha - 2 * a0.beta + 2 * a1.alpha + 4 * a1.beta
    x00_at_0 = a0.zero
    return A1, A2, B1, B2, x00_at_0


def z_interval(a0: Density, a1: Density) -> tuple[float, float]:
    """Feasibility interval for z from the nine nonnegativity constraints."""
    A1, A2, B1, B2, zero0 = _table_coeffs(a0, a1)
    zmin = max(0.0, -A1 / 3, -A2 / 3)
    zmax = min(zero0 / 2, B1 / 6, B2 / 6)
    if zmin > zmax + 1e-12:
        raise InfeasiblePairError(f"{a0} cannot split into two {a1}")
    return zmin, min(zmax, max(zmin, zmax))


def decomposition_table(a0: Density, a1: Density, z: float) -> dict[str, float]:
    """All nine cell densities at asymmetry zero."""
    A1, A2, B1, B2, zero0 = _table_coeffs(a0, a1)
    return {
        "x00": zero0 - 2 * z,
        "x01": A1 / 3 + z,
        "x10": A1 / 3 + z,
        "x02": A2 / 3 + z,
        "x20": A2 / 3 + z,
        "x11": B1 / 3 - 2 * z,
        "x12": z,
        "x21": z,
        "x22": B2 / 3 - 2 * z,
    }


def rep_objective(a0: Density, a1: Density, z: float) -> float:
    """Per-coordinate exponent of the decomposition count at table position z."""
    t = decomposition_table(a0, a1, z)
    return (
        g(a0.zero, t["x12"], t["x21"])
        + g(a0.alpha, t["x01"], t["x10"])
        + g(a0.beta, t["x02"], t["x20"])
    )


def solve_typical_z(a0: Density, a1: Density, tol: float = 1e-12) -> float:
    """Root of the degree-3 stationarity condition inside the feasible interval.

    The condition is x01*x02*x12 = x00*x11*x22; the objective is concave
    so the sign of the difference changes exactly once.  Bracketed root
    finding is used instead of the closed cubic form: the interval
    endpoints give guaranteed signs even when leading coefficients cancel.
    """
    zmin, zmax = z_interval(a0, a1)
    if zmax - zmin < tol:
        return zmin

    def phi(z: float) -> float:
        t = decomposition_table(a0, a1, z)
        return t["x01"] * t["x02"] * t["x12"] - t["x00"] * t["x11"] * t["x22"]

    lo, hi = phi(zmin), phi(zmax)
    if lo > 0:
        return zmin
    if hi < 0:
        return zmax
    if lo == 0.0 and hi == 0.0:
        # degenerate products at both ends: fall back to a golden-section max
        return _golden_max(lambda z: rep_objective(a0, a1, z), zmin, zmax, tol)
    return float(brentq(phi, zmin, zmax, xtol=tol, maxiter=200))


def _golden_max(f, lo: float, hi: float, tol: float) -> float:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    while b - a > tol:
        if f(c) >= f(d):
            b, d = d, c
            c = b - invphi * (b - a)
        else:
            a, c = c, d
            d = a + invphi * (b - a)
    return (a + b) / 2


def nrep_exponent_log2(a0: Density, a1: Density) -> float:
    """Per-coordinate log2 of the number of two-summand decompositions."""
    return rep_objective(a0, a1, solve_typical_z(a0, a1))


def wellformed_size_log2(
    L_log2: float, a0: Density, a1: Density, merge_width_log2: float
) -> float:
    """Expected well-formed output exponent when merging two density-a1 lists.

    Survivors of the window constraint number 2*L - width; among all
    summand pairs only Nrep * 2^(g0 - 2 g1) form a density-a0 vector.
    """
    return (
        2 * L_log2
        - merge_width_log2
        + nrep_exponent_log2(a0, a1)
        + entropy3(a0)
        - 2 * entropy3(a1)
    )


# -- layered solve tree (desk scale) -----------------------------------------


@dataclass(frozen=True)
class LeftRight:
    pass


@dataclass(frozen=True)
class Representation:
    child: Density


@dataclass(frozen=True)
class PartialRep:
    """Two-level stage: a lambda1 fraction gets one representation level
    (then left-right), the rest gets representations at both levels."""

    lambda1: float
    rho1: Density
    rho2: Density
    rho3: Density


@dataclass(frozen=True)
class PartialRepCont:
    """Second level of a PartialRep stage; placed by the plan for arity."""


LayerSpec = Union[LeftRight, Representation, PartialRep, PartialRepCont]


@dataclass(frozen=True)
class Seg:
    """A contiguous index range of a node's support with a composition target.

    ``cont`` records what the second level of a PartialRep stage does to
    this segment: LeftRight for the one-representation-level fraction,
    Representation(rho3) for the rest, None outside a stage.
    """

    indices: tuple[int, ...]
    n1: int
    n2: int
    cont: "Union[None, LeftRight, Representation]" = None

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class RepPlan:
    layers: tuple[LayerSpec, ...]
    tolerance: int = 0
    leaf_size: Optional[int] = None  # None: exhaustive up to a cap

    @property
    def a(self) -> int:
        return len(self.layers)

    def validate(self) -> None:
        for i, layer in enumerate(self.layers):
            if isinstance(layer, PartialRep):
                if i + 1 >= len(self.layers) or not isinstance(self.layers[i + 1], PartialRepCont):
                    raise ValueError("PartialRep must be followed by its continuation level")
            if isinstance(layer, PartialRepCont):
                if i == 0 or not isinstance(self.layers[i - 1], PartialRep):
                    raise ValueError("dangling PartialRepCont")


def _round_counts(d: Density, m: int) -> tuple[int, int]:
    return round(d.alpha * m), round(d.beta * m)


def _split_counts(n1: int, n2: int, m: int, m_left: int) -> tuple[tuple[int, int], tuple[int, int]]:
    l1 = min(round(n1 * m_left / m), m_left) if m else 0
    l2 = min(round(n2 * m_left / m), m_left - l1) if m else 0
    return (l1, l2), (n1 - l1, n2 - l2)


def _split_lr(seg: Seg) -> tuple[Seg, Seg]:
    half = (seg.size + 1) // 2
    (l1, l2), (r1, r2) = _split_counts(seg.n1, seg.n2, seg.size, half)
    return Seg(seg.indices[:half], l1, l2), Seg(seg.indices[half:], r1, r2)


def plan_segments(plan: RepPlan, m: int) -> list[list[list[Seg]]]:
    """Per level, per node, the segment structure.

    Level 0 is the root (one node); level ``a`` holds the 2^a leaves.
    The binary track starts at half ones, the dominant composition.
    """
    plan.validate()
    root = [Seg(tuple(range(m)), m // 2, 0)]
    levels = [[root]]
    for layer in plan.layers:
        prev = levels[-1]
        nxt: list[list[Seg]] = []
        for node in prev:
            left: list[Seg] = []
            right: list[Seg] = []
            for seg in node:
                if isinstance(layer, LeftRight):
                    sl, sr = _split_lr(seg)
                    left.append(sl)
                    right.append(sr)
                elif isinstance(layer, Representation):
                    c1, c2 = _round_counts(layer.child, seg.size)
                    for side in (left, right):
                        side.append(Seg(seg.indices, c1, c2))
                elif isinstance(layer, PartialRep):
                    mA = round(layer.lambda1 * seg.size)
                    idxA, idxB = seg.indices[:mA], seg.indices[mA:]
                    n1A, n2A = _round_counts(layer.rho1, len(idxA))
                    n1B, n2B = _round_counts(layer.rho2, len(idxB))
                    for side in (left, right):
                        side.append(Seg(idxA, n1A, n2A, cont=LeftRight()))
                        side.append(Seg(idxB, n1B, n2B, cont=Representation(layer.rho3)))
                elif isinstance(layer, PartialRepCont):
                    if isinstance(seg.cont, LeftRight):
                        sl, sr = _split_lr(seg)
                        left.append(sl)
                        right.append(sr)
                    elif isinstance(seg.cont, Representation):
                        c1, c2 = _round_counts(seg.cont.child, seg.size)
                        for side in (left, right):
                            side.append(Seg(seg.indices, c1, c2))
                    else:
                        raise ValueError("PartialRepCont reached a segment with no stage")
                else:
                    raise TypeError(f"unknown layer {layer!r}")
            nxt.append(left)
            nxt.append(right)
        levels.append(nxt)
    return levels


def _rep_segments(node_segs: list[Seg], layer: LayerSpec) -> list[Seg]:
    """Segments of the node that the given layer rebuilds by representation."""
    if isinstance(layer, Representation):
        return list(node_segs)
    if isinstance(layer, PartialRep):
        return list(node_segs)  # both fractions are representations at stage one
    if isinstance(layer, PartialRepCont):
        return [s for s in node_segs if isinstance(s.cont, Representation)]
    return []


def enumerate_comp_vectors(m: int, n1: int, n2: int):
    """All {0,1,2} words of length m with exactly n1 ones and n2 twos."""
    for ones in combinations(range(m), n1):
        rest = [i for i in range(m) if i not in ones]
        for twos in combinations(rest, n2):
            word = [0] * m
            for i in ones:
                word[i] = 1
            for i in twos:
                word[i] = 2
            yield word


def comp_class_size(m: int, n1: int, n2: int) -> int:
    return math.comb(m, n1) * math.comb(m - n1, n2)


def _sample_comp(rng, m: int, n1: int, n2: int) -> list[int]:
    perm = list(rng.permutation(m))
    word = [0] * m
    for i in perm[:n1]:
        word[i] = 1
    for i in perm[n1:n1 + n2]:
        word[i] = 2
    return word


def _leaf_list(
    columns: Sequence[TritVector],
    segs: list[Seg],
    L: Optional[int],
    rng,
    exhaustive_cap: int = 4096,
) -> MergeList:
    """Leaf entries with exact per-segment compositions, keys pre-summed."""
    m_total = len(columns)
    ell = columns[0].length if columns else 0
    total = 1
    for s in segs:
        total *= comp_class_size(s.size, s.n1, s.n2)
    exhaustive = (L is None and total <= exhaustive_cap) or (L is not None and L >= total)
    entries = []

    def make_entry(words: list[list[int]]) -> Entry:
        trits = [0] * m_total
        for seg, word in zip(segs, words):
            for pos, val in zip(seg.indices, word):
                trits[pos] = val
        coeff = TritVector.from_trits(trits)
        key = TritVector.zeros(ell)
        for pos in range(m_total):
            c = coeff[pos]
            if c:
                key = key.add(columns[pos].scale(c))
        return Entry(key, coeff)

    if exhaustive:
        def rec(i: int, acc: list[list[int]]):
            if i == len(segs):
                entries.append(make_entry(acc))
                return
            for word in enumerate_comp_vectors(segs[i].size, segs[i].n1, segs[i].n2):
                rec(i + 1, acc + [word])

        rec(0, [])
    else:
        want = L if L is not None else min(total, exhaustive_cap)
        seen = set()
        guard = 0
        while len(entries) < want and guard < 50 * want:
            guard += 1
            words = [_sample_comp(rng, s.size, s.n1, s.n2) for s in segs]
            keybits = tuple(tuple(w) for w in words)
            if keybits in seen:
                continue
            seen.add(keybits)
            entries.append(make_entry(words))
    return MergeList(entries)


def filter_wellformed(mlist: MergeList, segs: list[Seg], tolerance: int) -> MergeList:
    """Drop entries whose per-segment 1/2-counts miss the targets by > tolerance."""
    kept = []
    for e in mlist.entries:
        ok = True
        for seg in segs:
            c1 = sum(1 for i in seg.indices if e.coeff[i] == 1)
            c2 = sum(1 for i in seg.indices if e.coeff[i] == 2)
            if abs(c1 - seg.n1) > tolerance or abs(c2 - seg.n2) > tolerance:
                ok = False
                break
        if ok:
            kept.append(e)
    return MergeList(kept)


def rep_solve(
    columns: Sequence[TritVector],
    target: TritVector,
    plan: RepPlan,
    rng,
    budget: Optional[Budget] = None,
) -> list[Entry]:
    """Run the layered tree; outputs re-sum to the target and carry the
    root composition within the plan's tolerance."""
    m = len(columns)
    ell = target.length
    a = plan.a
    levels = plan_segments(plan, m)
    widths = width_schedule(ell, a)
    zero = TritVector.zeros(ell)

    lists = [
        _leaf_list(columns, node, plan.leaf_size, rng)
        for node in levels[a]
    ]
    hi = ell
    for rnd in range(a):
        level = a - 1 - rnd          # level being formed
        layer = plan.layers[level]   # split from `level` to `level + 1`
        t = widths[rnd]
        lo = hi - t
        nxt = []
        for i in range(0, len(lists), 2):
            residue = target if i + 2 >= len(lists) else zero
            merged = merge(lists[i], lists[i + 1], (lo, hi), residue, budget)
            node_segs = levels[level][i // 2]
            rep_segs = _rep_segments(node_segs, layer)
            if rep_segs:
                merged = filter_wellformed(merged, rep_segs, plan.tolerance)
            nxt.append(merged)
        lists = nxt
        hi = lo
    assert hi == 0 and len(lists) == 1
    return lists[0].entries


def default_plan(m: int, tolerance: int = 1) -> RepPlan:
    """Depth-2 plan: one representation level over the full window, then
    a left-right split; child density is the plain halving of the ones."""
    child = Density(0.25, 0.0)
    return RepPlan(layers=(Representation(child), LeftRight()), tolerance=tolerance)


class RepEngine:
    """Full-weight subset-sum engine running the representation tree."""

    def __init__(self, p: int, plan: Optional[RepPlan] = None):
        self.weight = p
        self.plan = plan

    def solve(self, columns, target, rng, budget: Budget):
        if self.weight != len(columns):
            raise ValueError("engine declares full weight: p must equal k + ell")
        red = ssnzc_to_ss(list(columns), target)
        plan = self.plan if self.plan is not None else default_plan(len(columns))
        for entry in rep_solve(columns, red.transformed_target, plan, rng, budget):
            yield red.to_ssnzc(entry.coeff)


# -- plan serialization -------------------------------------------------------


def serialize_plan(plan: RepPlan) -> str:
    lines = [f"a={plan.a}", f"tolerance={plan.tolerance}"]
    if plan.leaf_size is not None:
        lines.append(f"leaf_size={plan.leaf_size}")
    for i, layer in enumerate(plan.layers, start=1):
        if isinstance(layer, LeftRight):
            lines.append(f"level={i} kind=leftright")
        elif isinstance(layer, Representation):
            lines.append(
                f"level={i} kind=representation alpha={layer.child.alpha:.6f} "
                f"beta={layer.child.beta:.6f}"
            )
        elif isinstance(layer, PartialRep):
            lines.append(
                f"level={i} kind=partial lambda1={layer.lambda1:.6f} "
                f"rho1={layer.rho1.alpha:.6f},{layer.rho1.beta:.6f} "
                f"rho2={layer.rho2.alpha:.6f},{layer.rho2.beta:.6f} "
                f"rho3={layer.rho3.alpha:.6f},{layer.rho3.beta:.6f}"
            )
        elif isinstance(layer, PartialRepCont):
            lines.append(f"level={i} kind=partial-cont")
    return "\n".join(lines) + "\n"


def parse_plan(text: str) -> RepPlan:
    tolerance = 0
    leaf_size = None
    layers: list[LayerSpec] = []
    for line in text.strip().splitlines():
        fields = dict(part.split("=", 1) for part in line.split())
        if "a" in fields and "level" not in fields:
            continue
        if "tolerance" in fields and "level" not in fields:
            tolerance = int(fields["tolerance"])
            continue
        if "leaf_size" in fields and "level" not in fields:
            leaf_size = int(fields["leaf_size"])
            continue
        kind = fields["kind"]
        if kind == "leftright":
            layers.append(LeftRight())
        elif kind == "representation":
            layers.append(Representation(Density(float(fields["alpha"]), float(fields["beta"]))))
        elif kind == "partial":
            def dens(s):
                x, y = s.split(",")
                return Density(float(x), float(y))

            layers.append(
                PartialRep(
                    float(fields["lambda1"]), dens(fields["rho1"]),
                    dens(fields["rho2"]), dens(fields["rho3"]),
                )
            )
        elif kind == "partial-cont":
            layers.append(PartialRepCont())
        else:
            raise ValueError(f"unknown layer kind {kind!r}")
    plan = RepPlan(tuple(layers), tolerance=tolerance, leaf_size=leaf_size)
    plan.validate()
    return plan

