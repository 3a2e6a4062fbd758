"""Asymptotic cost exponents for large-weight ternary decoding.

Everything is expressed per coordinate in log2 units: a value c stands
for 2^(c n).  The solve-loop cost model is

    cost = (tree work) + max(0, -log2 P - log2 |found|),

where P is the residual-weight success probability and |found| counts
distinct subset-sum solutions produced per restart.  Tree schedules are
evaluated by a per-level ledger tracking entry counts, distinct counts
and duplicate multiplicities, so representation layers are charged
honestly for badly-formed waste and duplicate coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

from scipy.optimize import brentq, minimize

from .reps import (
    Density,
    InfeasiblePairError,
    entropy3,
    nrep_exponent_log2,
)

LOG2_3 = math.log2(3)
R_MAX = (LOG2_3 - 1) / LOG2_3

# reference values for the binary representation-technique algorithm; its
# machinery is not implemented here, the numbers are shipped as constants
BJMM_Q2_EXPONENT = 0.102
BJMM_Q2_EXPONENT_RATE = 0.427
BJMM_Q2_MIN_SIZE_KBITS = 374.0
BJMM_Q2_MIN_SIZE_RATE = 0.326


class InfeasibleError(ValueError):
    pass


def h2(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -x * math.log2(x) - (1 - x) * math.log2(1 - x)


def h2_inv(y: float) -> float:
    """Inverse of h2 on [0, 1/2]."""
    if y <= 0:
        return 0.0
    if y >= 1:
        return 0.5
    return float(brentq(lambda x: h2(x) - y, 1e-15, 0.5, xtol=1e-14))


def wgv_high(R: float) -> float:
    """The weight in [2/3, 1] where the expected solution count crosses one.

    Root of W + h2(W) = (1 - R) log2(3); undefined beyond R_MAX.
    """
    if R < 0 or R > R_MAX + 1e-15:
        raise InfeasibleError(f"undefined for R = {R} > {R_MAX}")
    target = (1 - R) * LOG2_3
    f = lambda W: W + h2(W) - target
    if f(1.0) > 0:
        return 1.0
    return float(brentq(f, 2 / 3, 1.0, xtol=1e-13))


def _golden_min(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-9) -> tuple[float, float]:
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = (a + b) / 2
    return x, fn(x)


@dataclass
class ExponentResult:
    exponent: float
    algorithm: str
    q: int
    R: float
    W: float
    params: dict = field(default_factory=dict)
    space_exponent: float = 0.0
    feasible: bool = True
    converged: bool = True


# -- residual-weight success probability (q = 3, full subset-sum weight) ------


def success_exponent_q3(R: float, W: float, L: float) -> float:
    """log2 P for ell/n = L and the full-weight subset-sum choice."""
    rem = 1 - R - L
    wp = W - R - L  # residual weight fraction
    if wp < -1e-12 or rem <= 0 or wp > rem + 1e-12:
        return float("-inf")
    wp = min(max(wp, 0.0), rem)
    num = rem * h2(wp / rem) + wp
    den = min(rem * LOG2_3, h2(W) + W - L * LOG2_3)
    return num - den


# -- continuous layered plans --------------------------------------------------


@dataclass(frozen=True)
class CLeftRight:
    pass


@dataclass(frozen=True)
class CRep:
    child: Density


@dataclass(frozen=True)
class CPartial:
    lambda1: float
    rho1: Density
    rho2: Density
    rho3: Density


@dataclass(frozen=True)
class CPartialCont:
    pass


@dataclass(frozen=True)
class CSeg:
    frac: float          # window length as a fraction of k + ell
    dens: Density
    cont: object = None  # CLeftRight / CRep marker inside a partial stage


@dataclass(frozen=True)
class PlanStructure:
    """Per-unit-kappa geometry of a symmetric layered plan.

    comp[j]: per-node composition entropy at level j (units of kappa).
    delta[j], nrep[j]: badly-formed loss and representation exponent of
    the merge forming level j (units of kappa); rep_level[j] flags merges
    with representation segments.
    """

    a: int
    comp: tuple[float, ...]
    delta: tuple[float, ...]
    nrep: tuple[float, ...]
    rep_level: tuple[bool, ...]


def _cache_key(layers) -> tuple:
    out = []
    for layer in layers:
        if isinstance(layer, CLeftRight):
            out.append(("lr",))
        elif isinstance(layer, CRep):
            out.append(("rep", layer.child.alpha, layer.child.beta))
        elif isinstance(layer, CPartial):
            out.append(
                (
                    "part",
                    layer.lambda1,
                    layer.rho1.alpha, layer.rho1.beta,
                    layer.rho2.alpha, layer.rho2.beta,
                    layer.rho3.alpha, layer.rho3.beta,
                )
            )
        elif isinstance(layer, CPartialCont):
            out.append(("cont",))
        else:
            raise TypeError(layer)
    return tuple(out)


@lru_cache(maxsize=100_000)
def _structure_cached(key: tuple) -> PlanStructure:
    layers = []
    for item in key:
        if item[0] == "lr":
            layers.append(CLeftRight())
        elif item[0] == "rep":
            layers.append(CRep(Density(item[1], item[2])))
        elif item[0] == "part":
            layers.append(
                CPartial(
                    item[1],
                    Density(item[2], item[3]),
                    Density(item[4], item[5]),
                    Density(item[6], item[7]),
                )
            )
        else:
            layers.append(CPartialCont())
    return _build_structure(layers)


def plan_structure(layers) -> PlanStructure:
    return _structure_cached(_cache_key(layers))


def _build_structure(layers) -> PlanStructure:
    a = len(layers)
    root = [CSeg(1.0, Density(0.5, 0.0))]
    per_level = [root]
    delta = [0.0] * a
    nrep = [0.0] * a
    rep_flag = [False] * a
    segs = root
    for j, layer in enumerate(layers):
        nxt: list[CSeg] = []
        d_acc = 0.0
        r_acc = 0.0
        has_rep = False
        for seg in segs:
            if isinstance(layer, CLeftRight):
                nxt.append(CSeg(seg.frac / 2, seg.dens))
            elif isinstance(layer, CRep):
                has_rep = True
                rep = nrep_exponent_log2(seg.dens, layer.child)
                d_acc += seg.frac * (rep + entropy3(seg.dens) - 2 * entropy3(layer.child))
                r_acc += seg.frac * rep
                nxt.append(CSeg(seg.frac, layer.child))
            elif isinstance(layer, CPartial):
                has_rep = True
                fA = seg.frac * layer.lambda1
                fB = seg.frac * (1 - layer.lambda1)
                for frac, rho, cont in (
                    (fA, layer.rho1, CLeftRight()),
                    (fB, layer.rho2, CRep(layer.rho3)),
                ):
                    if frac <= 0:
                        continue
                    rep = nrep_exponent_log2(seg.dens, rho)
                    d_acc += frac * (rep + entropy3(seg.dens) - 2 * entropy3(rho))
                    r_acc += frac * rep
                    nxt.append(CSeg(frac, rho, cont=cont))
            elif isinstance(layer, CPartialCont):
                if isinstance(seg.cont, CLeftRight):
                    nxt.append(CSeg(seg.frac / 2, seg.dens))
                elif isinstance(seg.cont, CRep):
                    has_rep = True
                    child = seg.cont.child
                    rep = nrep_exponent_log2(seg.dens, child)
                    d_acc += seg.frac * (rep + entropy3(seg.dens) - 2 * entropy3(child))
                    r_acc += seg.frac * rep
                    nxt.append(CSeg(seg.frac, child))
                else:
                    raise InfeasibleError("continuation without a stage")
            else:
                raise TypeError(layer)
        delta[j] = d_acc
        nrep[j] = r_acc
        rep_flag[j] = has_rep
        per_level.append(nxt)
        segs = nxt
    comp = tuple(sum(s.frac * entropy3(s.dens) for s in lvl) for lvl in per_level)
    return PlanStructure(a, comp, tuple(delta), tuple(nrep), tuple(rep_flag))


@dataclass
class PlanLedger:
    """Everything criterion-level checks need about one evaluated schedule."""

    lam0: float
    widths: list[float]
    entries: list[float]
    distinct: list[float]
    found: float
    solutions: float
    representations: float
    waste: float
    leaf: float
    leaf_cap: float
    total_width: float


def evaluate_plan(
    R: float,
    W: float,
    L: float,
    structure: PlanStructure,
    lam0: float,
) -> tuple[float, Optional[PlanLedger]]:
    """Cost exponent of the greedy width schedule at list-size budget lam0."""
    kappa = R + L
    W_tot = L * LOG2_3
    a = structure.a
    comp = [c * kappa for c in structure.comp]
    delta = [d * kappa for d in structure.delta]
    nrep = [r * kappa for r in structure.nrep]

    P = success_exponent_q3(R, W, L)
    if P == float("-inf"):
        return float("inf"), None

    X = min(lam0, comp[a])

    def distinct_chain(widths: list[float]) -> tuple[list[float], float]:
        """Deduplicated per-level list sizes and the work exponent.

        Lists are sorted anyway, so identical coefficient vectors (the
        same parent reached through several representations) are dropped
        after each merge; the raw pre-dedup pair count still costs work.
        """
        w_acc = [0.0] * (a + 1)
        for j in range(a - 1, -1, -1):
            w_acc[j] = w_acc[j + 1] + widths[j]
        cap = [comp[j] - w_acc[j] for j in range(a + 1)]
        d = [0.0] * (a + 1)
        d[a] = min(X, cap[a])
        work = X
        for j in range(a - 1, -1, -1):
            raw = 2 * d[j + 1] - widths[j]
            f = raw + delta[j]
            if structure.rep_level[j]:
                m = nrep[j] - w_acc[j + 1] + 2 * (d[j + 1] - cap[j + 1])
                d[j] = min(f - max(0.0, m), cap[j])
            else:
                d[j] = min(f, cap[j])
            work = max(work, d[j + 1], raw, d[j])
        return d, work

    # greedy schedule: spend the minimum width keeping raw pair counts at
    # or below the budget (tracking the honest deduplicated sizes), then
    # dump the rest at the root
    widths = [0.0] * a
    d_run = X
    w_acc = 0.0
    for j in range(a - 1, 0, -1):
        widths[j] = max(0.0, 2 * d_run - lam0)
        raw = 2 * d_run - widths[j]
        f = raw + delta[j]
        cap_child = comp[j + 1] - w_acc
        if structure.rep_level[j]:
            m = nrep[j] - w_acc + 2 * (d_run - cap_child)
            f -= max(0.0, m)
        w_acc += widths[j]
        d_run = min(f, comp[j] - w_acc)
    widths[0] = W_tot - sum(widths[1:])
    if widths[0] < -1e-12:
        return float("inf"), None
    d, work = distinct_chain(widths)
    if a >= 2:
        # a root merge overflowing the budget is repaired by pushing the
        # excess one level down; each unit shaves the raw pair count by one
        raw0 = 2 * d[1] - widths[0]
        if raw0 > lam0 + 1e-12:
            shift = min(raw0 - lam0, max(widths[0], 0.0))
            widths[1] += shift
            widths[0] -= shift
            d, work = distinct_chain(widths)

    found = d[0]
    cost = work + max(0.0, -P - found)

    # token accounting for the conservation ledger: entry counts without
    # deduplication obey sols + reps - waste = tokens exactly
    e_tok = [0.0] * (a + 1)
    e_tok[a] = X
    for j in range(a - 1, -1, -1):
        e_tok[j] = 2 * e_tok[j + 1] - widths[j] + delta[j]
    solutions = kappa - W_tot
    reps_total = sum((2 ** j) * nrep[j] for j in range(a))
    waste = sum((2 ** j - 1) * widths[j] for j in range(a)) + (2 ** a) * (comp[a] - X)
    ledger = PlanLedger(
        lam0=lam0,
        widths=widths,
        entries=e_tok,
        distinct=d,
        found=found,
        solutions=solutions,
        representations=reps_total,
        waste=waste,
        leaf=X,
        leaf_cap=comp[a],
        total_width=W_tot,
    )
    return cost, ledger


def best_lam0(R: float, W: float, L: float, structure: PlanStructure) -> tuple[float, float]:
    """1-D minimization of the schedule cost over the list-size budget."""
    def fn(lam0: float) -> float:
        if lam0 <= 0:
            return float("inf")
        return evaluate_plan(R, W, L, structure, lam0)[0]

    hi = max(R + L, 0.05)
    best_c, best_l = float("inf"), 0.0
    grid = [hi * (i + 1) / 48 for i in range(48)]
    for lam0 in grid:
        c = fn(lam0)
        if c < best_c:
            best_c, best_l = c, lam0
    if best_c == float("inf"):
        return float("inf"), 0.0
    step = hi / 48
    lo, up = max(1e-9, best_l - step), min(hi, best_l + step)
    x, c = _golden_min(fn, lo, up, tol=1e-10)
    if c < best_c:
        best_c, best_l = c, x
    return best_c, best_l


# -- Prange -------------------------------------------------------------------


def prange_exponent(q: int, R: float, W: float) -> ExponentResult:
    """Bare information-set baseline: no parity window, weight-split only."""
    if not (0 < R < 1) or not (0 <= W <= 1):
        raise InfeasibleError(f"bad (R, W) = ({R}, {W})")
    lo = max(0.0, W - (1 - R))
    hi = min(R, W)
    if lo > hi + 1e-12:
        raise InfeasibleError("empty weight-split range")
    lgq1 = math.log2(q - 1) if q > 2 else 0.0

    def neg_phi(p: float) -> float:
        return -((1 - R) * h2((W - p) / (1 - R)) + (W - p) * lgq1)

    if hi - lo < 1e-15:
        p_star, phi = lo, -neg_phi(lo)
    else:
        p_star, val = _golden_min(neg_phi, lo, hi, tol=1e-12)
        for cand in (lo, hi):
            if neg_phi(cand) < val:
                p_star, val = cand, neg_phi(cand)
        phi = -val
    den = min((1 - R) * math.log2(q), h2(W) + W * lgq1)
    exponent = max(0.0, den - phi)
    return ExponentResult(
        exponent=exponent, algorithm="prange", q=q, R=R, W=W,
        params={"p": p_star, "ell": 0.0}, space_exponent=0.0,
    )


# -- Wagner (q = 3, large weight) ----------------------------------------------


def _wagner_cost_at(R: float, W: float, L: float, a_range=range(1, 10)) -> tuple[float, dict]:
    best = (float("inf"), {})
    for a in a_range:
        structure = plan_structure([CLeftRight()] * a)
        c, lam0 = best_lam0(R, W, L, structure)
        if c < best[0]:
            best = (c, {"a": a, "lam0": lam0})
    return best


def _doom_cost_at(R: float, W: float, L: float, z_rel: float, a_range=range(1, 10)) -> tuple[float, dict]:
    """All-left-right tree with the last leaf replaced by the target list."""
    kappa = R + L
    W_tot = L * LOG2_3
    P = success_exponent_q3(R, W, L)
    if P == float("-inf"):
        return float("inf"), {}
    best = (float("inf"), {})
    for a in a_range:
        stacks = 2 ** a - 1
        leaf_cap = kappa / stacks

        def cost_fn(lam0: float) -> float:
            if lam0 <= 0:
                return float("inf")
            X = min(lam0, leaf_cap)
            Z = min(z_rel, lam0)
            widths = [0.0] * a
            u = X
            us = [0.0] * (a + 1)
            us[a] = X
            for j in range(a - 1, 0, -1):
                widths[j] = max(0.0, 2 * us[j + 1] - lam0)
                us[j] = 2 * us[j + 1] - widths[j]
            widths[0] = W_tot - sum(widths[1:])
            if widths[0] < -1e-12:
                return float("inf")
            v = Z
            work = max(X, Z)
            for j in range(a - 1, -1, -1):
                v = v + us[j + 1] - widths[j]
                work = max(work, us[j + 1], v)
                if j > 0:
                    work = max(work, 2 * us[j + 1] - widths[j])
            found = min(v, kappa + z_rel - W_tot)
            return work + max(0.0, -P - found)

        grid_hi = max(kappa, 0.05)
        best_c, best_l = float("inf"), 0.0
        for i in range(48):
            lam0 = grid_hi * (i + 1) / 48
            c = cost_fn(lam0)
            if c < best_c:
                best_c, best_l = c, lam0
        if best_c < float("inf"):
            x, c = _golden_min(cost_fn, max(1e-9, best_l - grid_hi / 48), min(grid_hi, best_l + grid_hi / 48), tol=1e-10)
            if c < best_c:
                best_c, best_l = c, x
        if best_c < best[0]:
            best = (best_c, {"a": a, "lam0": best_l})
    return best


def wagner_exponent(
    R: float, W: float, doom_z_log2: Optional[float] = None, grid_points: int = 200
) -> ExponentResult:
    """Birthday-tree exponent embedded in the solve loop, q = 3, W >= 2/3."""
    if W < 2 / 3 - 1e-9:
        raise InfeasibleError("the implemented large-weight path needs W >= 2/3")
    L_hi = W - R - 1e-9
    if L_hi <= 0:
        raise InfeasibleError("W <= R leaves no subset-sum window")

    def at(L: float) -> float:
        if doom_z_log2 is None:
            return _wagner_cost_at(R, W, L)[0]
        # extra targets can always be ignored, so the multi-target tree
        # never costs more than the single-target one
        return min(_doom_cost_at(R, W, L, doom_z_log2)[0], _wagner_cost_at(R, W, L)[0])

    grid = [L_hi * (i + 1) / grid_points for i in range(grid_points)]
    best_c, best_L = float("inf"), grid[0]
    for L in grid:
        c = at(L)
        if c < best_c:
            best_c, best_L = c, L
    step = L_hi / grid_points
    x, c = _golden_min(at, max(1e-9, best_L - step), min(L_hi, best_L + step), tol=1e-9)
    if c < best_c:
        best_c, best_L = c, x
    if doom_z_log2 is None:
        _, info = _wagner_cost_at(R, W, best_L)
    else:
        cd, infod = _doom_cost_at(R, W, best_L, doom_z_log2)
        cp, infop = _wagner_cost_at(R, W, best_L)
        info = infod if cd <= cp else infop
    return ExponentResult(
        exponent=best_c, algorithm="wagner", q=3, R=R, W=W,
        params={"ell": best_L, **info}, space_exponent=info.get("lam0", best_c),
    )


# -- representation trees -------------------------------------------------------


def _template_layers(kind: str, a: int, params: Sequence[float]):
    if kind == "lr":
        return [CLeftRight()] * a
    if kind == "rep1":
        pos = int(params[0])
        alpha, beta = params[1], params[2]
        layers: list = [CLeftRight()] * a
        layers[pos] = CRep(Density(alpha, beta))
        return layers
    if kind == "t44":
        lam1, a1, b1, a2, b2, a3, b3 = params
        return (
            [CLeftRight()] * (a - 3)
            + [
                CPartial(lam1, Density(a1, b1), Density(a2, b2), Density(a3, b3)),
                CPartialCont(),
                CLeftRight(),
            ]
        )
    raise ValueError(kind)


ROOT_DENSITY = Density(0.5, 0.0)


def child_from_table(parent: Density, t01: float, t02: float, tz: float) -> Density:
    """Child density from normalized decomposition-table coordinates.

    (t01, t02, tz) in [0,1]^3 parameterize the symmetric table cells, so
    every point maps to a density pair the parent can actually split into;
    direct (alpha, beta) coordinates leave only a thin feasible slab.
    """
    t01 = min(max(t01, 0.0), 1.0)
    t02 = min(max(t02, 0.0), 1.0)
    tz = min(max(tz, 0.0), 1.0)
    x01 = t01 * parent.alpha / 2
    x02 = t02 * parent.beta / 2
    z = tz * (1 - parent.alpha - parent.beta) / 2
    a1 = x01 + (parent.beta - 2 * x02) + z
    b1 = x02 + z + (parent.alpha - 2 * x01)
    return Density(max(a1, 0.0), max(b1, 0.0))


def _rep_cost(R: float, W: float, L: float, layers) -> tuple[float, float]:
    try:
        structure = plan_structure(layers)
    except (InfeasiblePairError, ValueError):
        return float("inf"), 0.0
    return best_lam0(R, W, L, structure)




def _t44_from_coords(x: Sequence[float]) -> tuple[float, tuple[float, ...]]:
    """(lam1-clamped, density params for the t44 template) from coordinates
    (lam1, t1a, t1z, t2a, t2z, t3a, t3b, t3z)."""
    lam1 = min(max(x[0], 0.0), 1.0)
    rho1 = child_from_table(ROOT_DENSITY, x[1], 0.0, x[2])
    rho2 = child_from_table(ROOT_DENSITY, x[3], 0.0, x[4])
    rho3 = child_from_table(rho2, x[5], x[6], x[7])
    return lam1, (lam1, rho1.alpha, rho1.beta, rho2.alpha, rho2.beta, rho3.alpha, rho3.beta)


# deterministic starting points, in (Lfrac, lam1, t1a, t1z, t2a, t2z, t3a, t3b, t3z)
_T44_STARTS = (
    # shallow dual-representation stage (hard-instance regime)
    (0.68, 0.0, 1.0, 0.02, 1.0, 0.0215, 1.0, 0.226, 0.0037),
    # partial stage with a dominant one-level fraction (abundant-solution regime)
    (0.22, 0.7252, 1.0, 0.004, 0.984, 0.016, 1.0, 0.0, 0.0),
    (0.45, 0.5, 1.0, 0.01, 1.0, 0.01, 1.0, 0.1, 0.005),
)

_REP1_STARTS = (
    (0.55, 1.0, 0.0),
    (0.85, 1.0, 0.05),
    (0.35, 0.9, 0.1),
)


def rep_exponent(R: float, W: float, effort: str = "full") -> ExponentResult:
    """Best layered-plan exponent; the all-left-right tree is in the search
    space so this never exceeds the plain birthday result."""
    if W < 2 / 3 - 1e-9:
        raise InfeasibleError("the implemented large-weight path needs W >= 2/3")
    L_hi = W - R - 1e-9
    if L_hi <= 0:
        raise InfeasibleError("W <= R leaves no subset-sum window")
    wag = wagner_exponent(R, W)
    best = (wag.exponent, {"template": "lr", **wag.params})

    def consider(c: float, info: dict):
        nonlocal best
        if c < best[0]:
            best = (c, info)

    nm_opts = {"xatol": 1e-7, "fatol": 1e-9, "maxiter": 2500 if effort == "full" else 900}

    # single representation level
    if effort == "min":
        rep1_cases = []
    else:
        rep1_cases = [(a, pos) for a in ((2, 3, 4) if effort == "full" else (2, 3)) for pos in
                      (range(a - 1) if effort == "full" else (0,))]
    for a, pos in rep1_cases:
        def objective(x, a=a, pos=pos):
            Lfrac, t01, tz = x
            if not (0.005 <= Lfrac <= 0.999):
                return 10.0
            rho = child_from_table(ROOT_DENSITY, t01, 0.0, tz)
            try:
                c, _ = _rep_cost(R, W, Lfrac * L_hi, _template_layers("rep1", a, (pos, rho.alpha, rho.beta)))
            except (InfeasiblePairError, ValueError):
                return 10.0
            return min(c, 10.0)

        starts = _REP1_STARTS if effort == "full" else _REP1_STARTS[:2]
        for x0 in starts:
            res = minimize(objective, list(x0), method="Nelder-Mead", options=nm_opts)
            if res.fun < best[0]:
                rho = child_from_table(ROOT_DENSITY, res.x[1], 0.0, res.x[2])
                consider(float(res.fun), {
                    "template": "rep1", "a": a, "pos": pos,
                    "ell": float(res.x[0] * L_hi), "rho": (rho.alpha, rho.beta),
                })

    # the two-level (partial) representation stage above a bottom split
    t44_as = (3, 4, 5, 6, 7, 8) if effort == "full" else (3, 6, 7)
    t44_starts = _T44_STARTS if effort == "full" else _T44_STARTS[:2]
    if effort == "min":
        t44_as = (3,)
        t44_starts = _T44_STARTS[:1]
    for a in t44_as:
        def objective(x, a=a):
            Lfrac = x[0]
            if not (0.005 <= Lfrac <= 0.999):
                return 10.0
            try:
                _, dens = _t44_from_coords(x[1:])
                c, _ = _rep_cost(R, W, Lfrac * L_hi, _template_layers("t44", a, dens))
            except (InfeasiblePairError, ValueError):
                return 10.0
            return min(c, 10.0)

        for x0 in t44_starts:
            res = minimize(objective, list(x0), method="Nelder-Mead", options=nm_opts)
            if res.fun < best[0]:
                lam1, dens = _t44_from_coords(res.x[1:])
                consider(float(res.fun), {
                    "template": "t44", "a": a, "ell": float(res.x[0] * L_hi),
                    "lambda1": lam1,
                    "rho1": dens[1:3], "rho2": dens[3:5], "rho3": dens[5:7],
                })

    exponent, info = best
    return ExponentResult(
        exponent=exponent, algorithm="rep", q=3, R=R, W=W,
        params=info, space_exponent=info.get("lam0", exponent),
    )


def rep_plan_ledger(R: float, W: float, info: dict) -> PlanLedger:
    """Re-evaluate the winning plan and expose its accounting ledger."""
    template = info.get("template", "lr")
    L = info["ell"]
    if template == "lr":
        layers = [CLeftRight()] * info.get("a", 1)
    elif template == "rep1":
        layers = _template_layers("rep1", info["a"], (info["pos"], *info["rho"]))
    else:
        layers = _template_layers(
            "t44", info["a"],
            (info["lambda1"], *info["rho1"], *info["rho2"], *info["rho3"]),
        )
    structure = plan_structure(layers)
    _, lam0 = best_lam0(R, W, L, structure)
    cost, ledger = evaluate_plan(R, W, L, structure, lam0)
    assert ledger is not None
    return ledger


def rep_plan_text(R: float, W: float, info: dict) -> str:
    """Reproducible key=value description of the winning plan."""
    lines = [
        f"template={info.get('template', 'lr')}",
        f"R={R:.6f}",
        f"W={W:.6f}",
        f"ell_over_n={info['ell']:.6f}",
        f"a={info.get('a', 1)}",
    ]
    if info.get("template") == "rep1":
        lines.append(f"pos={info['pos']}")
        lines.append(f"rho={info['rho'][0]:.6f},{info['rho'][1]:.6f}")
    if info.get("template") == "t44":
        lines.append(f"lambda1={info['lambda1']:.6f}")
        for name in ("rho1", "rho2", "rho3"):
            d = info[name]
            lines.append(f"{name}={d[0]:.6f},{d[1]:.6f}")
    return "\n".join(lines) + "\n"


# -- q = 2 closed forms ---------------------------------------------------------


def dumer2_exponent(R: float, W: float, coarse: bool = False) -> ExponentResult:
    """Binary two-list birthday decoding, the q = 2 comparison baseline."""

    def cost_at(L: float, p: float, X: float) -> float:
        rem = 1 - R - L
        if rem <= 0 or W - p < 0 or W - p > rem or p < 0 or p > R + L:
            return float("inf")
        cap = ((R + L) / 2) * h2(p / (R + L))
        Xc = min(X, cap)
        out = 2 * Xc - L
        num = rem * h2((W - p) / rem)
        den = min(rem, h2(W) - L)
        P = num - den
        s_all = (R + L) * h2(p / (R + L)) - L
        found = min(out, s_all)
        return max(Xc, out) + max(0.0, -P - found)

    def at_Lp(L: float, p: float) -> float:
        cap = ((R + L) / 2) * h2(p / (R + L)) if R + L > 0 else 0.0
        if cap <= 0:
            return cost_at(L, p, 0.0)
        x, c = _golden_min(lambda X: cost_at(L, p, X), 1e-9, cap, tol=1e-9)
        return c

    pts = 20 if coarse else 40
    best = (float("inf"), 0.0, 0.0)
    for i in range(pts):
        L = (1 - R - 1e-6) * (i + 1) / pts
        for j in range(pts):
            p = min(R + L, W) * (j + 1) / pts
            c = at_Lp(L, p)
            if c < best[0]:
                best = (c, L, p)
    c0, L0, p0 = best
    stepL = (1 - R) / pts
    stepp = min(R + L0, W) / pts
    for _ in range(2):
        L0, _c = _golden_min(lambda L: at_Lp(L, p0), max(1e-9, L0 - stepL), min(1 - R - 1e-6, L0 + stepL), tol=1e-8)
        p0, c0 = _golden_min(lambda p: at_Lp(L0, p), max(1e-9, p0 - stepp), min(min(R + L0, W), p0 + stepp), tol=1e-8)
        stepL /= 5
        stepp /= 5
    return ExponentResult(
        exponent=c0, algorithm="dumer", q=2, R=R, W=W, params={"ell": L0, "p": p0}
    )


# -- hardest weights, worst rates, minimum input sizes ---------------------------


def hardest_weight(q: int, R: float) -> float:
    if q == 2:
        return h2_inv(1 - R)
    if R <= R_MAX:
        return wgv_high(R)
    return 1.0


def exponent_at(algorithm: str, q: int, R: float, W: float, effort: str = "full") -> float:
    if algorithm == "prange":
        return prange_exponent(q, R, W).exponent
    if algorithm in ("wagner", "dumer"):
        if q == 2:
            return dumer2_exponent(R, W, coarse=effort != "full").exponent
        return wagner_exponent(R, W, grid_points=200 if effort == "full" else 48).exponent
    if algorithm in ("rep", "bjmm"):
        if q == 2:
            raise InfeasibleError("binary representation machinery is reference-only")
        return rep_exponent(R, W, effort=effort).exponent
    raise ValueError(algorithm)


def worst_case_exponent(algorithm: str, q: int, effort: str = "full") -> ExponentResult:
    """max over R of the hardest-weight exponent, the headline table entry."""
    if q == 2 and algorithm in ("rep", "bjmm"):
        return ExponentResult(
            exponent=BJMM_Q2_EXPONENT, algorithm="bjmm-reference", q=2,
            R=BJMM_Q2_EXPONENT_RATE, W=h2_inv(1 - BJMM_Q2_EXPONENT_RATE),
            params={"reference_constant": True},
        )

    def neg(R: float) -> float:
        W = hardest_weight(q, R)
        try:
            return -exponent_at(algorithm, q, R, W, effort="fast")
        except InfeasibleError:
            return float("inf")

    lo, hi = 0.02, (R_MAX if q == 3 else 0.98)
    grid = [lo + (hi - lo) * i / 60 for i in range(61)]
    best_R, best_v = lo, float("inf")
    for Rg in grid:
        v = neg(Rg)
        if v < best_v:
            best_R, best_v = Rg, v
    step = (hi - lo) / 60
    x, v = _golden_min(neg, max(lo, best_R - step), min(hi, best_R + step), tol=1e-7)
    if v < best_v:
        best_R, best_v = x, v
    W = hardest_weight(q, best_R)
    F = exponent_at(algorithm, q, best_R, W, effort=effort)
    return ExponentResult(exponent=F, algorithm=algorithm, q=q, R=best_R, W=W)


def min_input_size(algorithm: str, q: int, security_bits: float = 128.0, effort: str = "fast") -> dict:
    """Smallest systematic-form input (kbits) forcing 2^security_bits work.

    The matrix is stored as its non-identity block: R(1-R) n^2 log2(q)
    bits with n = security_bits / F(R) at the hardest weight for R.
    """
    if q == 2 and algorithm in ("rep", "bjmm"):
        return {
            "kbits": BJMM_Q2_MIN_SIZE_KBITS,
            "R_star": BJMM_Q2_MIN_SIZE_RATE,
            "reference_constant": True,
        }

    def size_kbits(R: float) -> float:
        W = hardest_weight(q, R)
        try:
            F = exponent_at(algorithm, q, R, W, effort=effort)
        except InfeasibleError:
            return float("inf")
        if F <= 1e-9:
            return float("inf")
        n = security_bits / F
        return R * (1 - R) * n * n * math.log2(q) / 1000.0

    lo = 0.05
    hi = R_MAX if q == 3 else 0.9
    pts = 24 if algorithm in ("rep", "bjmm") else 80
    grid = [lo + (hi - lo) * i / pts for i in range(pts + 1)]
    best_R, best_v = lo, float("inf")
    for Rg in grid:
        v = size_kbits(Rg)
        if v < best_v:
            best_R, best_v = Rg, v
    step = (hi - lo) / pts
    x, v = _golden_min(size_kbits, max(lo, best_R - step), min(hi, best_R + step),
                       tol=1e-5 if algorithm in ("rep", "bjmm") else 1e-7)
    if v < best_v:
        best_R, best_v = x, v
    return {"kbits": best_v, "R_star": best_R, "reference_constant": False}


# -- parameter audit -------------------------------------------------------------


def wave_security(n: int, k: int, w: int, doom_z_log2: float = 64.0) -> dict:
    """Security of one parameter set against the multi-target message attack.

    Key size counts the non-identity block of the systematic parity-check
    matrix, k(n-k) trits; a signature is one length-n trit vector.
    """
    R, W = k / n, w / n
    z_rel = doom_z_log2 / n
    wag = wagner_exponent(R, W, doom_z_log2=z_rel)
    rep = rep_exponent(R, W, effort="min")
    exponent = min(wag.exponent, rep.exponent)
    bits = n * exponent
    return {
        "security_bits": bits,
        "exponent": exponent,
        "wagner_doom_exponent": wag.exponent,
        "rep_exponent": rep.exponent,
        "key_size_mb": k * (n - k) * LOG2_3 / 8e6,
        "signature_kb": n * LOG2_3 / 8e3,
    }


def curve(R: float, algorithm: str, W_grid: Sequence[float], q: int = 3, effort: str = "fast") -> list[tuple[float, float]]:
    """(W, exponent) points, CSV-ready."""
    out = []
    for W in W_grid:
        try:
            F = exponent_at(algorithm, q, R, W, effort=effort)
        except InfeasibleError:
            continue
        out.append((W, F))
    return out


def curve_csv(points: Sequence[tuple[float, float]], algorithm: str, R: float, q: int = 3) -> str:
    lines = ["W,exponent,algorithm,R,q"]
    for W, F in points:
        lines.append(f"{W:.6f},{F:.6f},{algorithm},{R:.6f},{q}")
    return "\n".join(lines) + "\n"
