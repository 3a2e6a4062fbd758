"""Instance generation, serialization, and the exhaustive desk-scale oracle.

Randomness: Philox (a 64-bit counter-based generator) keyed through
``numpy.random.SeedSequence(seed, tag)``, one stream per purpose, so the
same seed never correlates across generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .f3 import TritMatrix, TritVector, rank, syndrome

# purpose tags for per-stream seeding
TAG_SD = 0x5D3
TAG_DOOM = 0xD003
TAG_SOLVE = 0x501E


class ParameterError(ValueError):
    """Instance parameters out of range."""


class FormatError(ValueError):
    """Malformed instance file."""


def stream(seed: int, tag: int, *extra: int) -> np.random.Generator:
    """Philox stream derived from (seed, purpose tag, substream indices)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, tag) + extra)))


@dataclass(frozen=True)
class SdInstance:
    n: int
    k: int
    w: int
    H: TritMatrix
    s: TritVector
    planted: Optional[TritVector]
    seed: int

    def check(self) -> None:
        assert self.H.rows == self.n - self.k and self.H.cols == self.n
        assert rank(self.H) == self.n - self.k
        assert self.s.length == self.n - self.k
        if self.planted is not None:
            assert self.planted.weight() == self.w
            assert syndrome(self.H, self.planted) == self.s


@dataclass(frozen=True)
class DoomInstance:
    n: int
    k: int
    w: int
    z: int
    H: TritMatrix
    syndromes: tuple[TritVector, ...]
    planted_index: Optional[int]
    planted: Optional[TritVector]
    seed: int

    def check(self) -> None:
        assert self.H.rows == self.n - self.k and self.H.cols == self.n
        assert rank(self.H) == self.n - self.k
        assert len(self.syndromes) == self.z
        if self.planted is not None:
            assert self.planted.weight() == self.w
            assert syndrome(self.H, self.planted) == self.syndromes[self.planted_index]


def _random_trit_vector(rng: np.random.Generator, n: int) -> TritVector:
    return TritVector.from_trits(int(t) for t in rng.integers(0, 3, size=n))


def _random_full_rank(rng: np.random.Generator, m: int, n: int) -> TritMatrix:
    # rejection sampling; failure probability < 1/2 per draw over GF(3)
    for _ in range(64):
        H = TritMatrix.from_rows(
            [[int(t) for t in rng.integers(0, 3, size=n)] for _ in range(m)]
        )
        if rank(H) == m:
            return H
    raise RuntimeError("full-rank rejection sampling exceeded 64 draws")


def random_weight_vector(rng: np.random.Generator, n: int, w: int) -> TritVector:
    """Uniform weight-w vector: Fisher-Yates prefix support, signs in {1,2}."""
    idx = np.arange(n)
    for i in range(w):
        j = i + int(rng.integers(0, n - i))
        idx[i], idx[j] = idx[j], idx[i]
    trits = [0] * n
    for i in range(w):
        trits[int(idx[i])] = int(rng.integers(1, 3))
    return TritVector.from_trits(trits)


def gen_sd(n: int, k: int, w: int, seed: int) -> SdInstance:
    if not (0 < k < n) or not (0 <= w <= n):
        raise ParameterError(f"bad (n, k, w) = ({n}, {k}, {w})")
    rng = stream(seed, TAG_SD)
    H = _random_full_rank(rng, n - k, n)
    e = random_weight_vector(rng, n, w)
    return SdInstance(n, k, w, H, syndrome(H, e), e, seed)


def gen_doom(n: int, k: int, w: int, z: int, seed: int) -> DoomInstance:
    if not (0 < k < n) or not (0 <= w <= n) or z < 1:
        raise ParameterError(f"bad (n, k, w, z) = ({n}, {k}, {w}, {z})")
    rng = stream(seed, TAG_DOOM)
    H = _random_full_rank(rng, n - k, n)
    e = random_weight_vector(rng, n, w)
    planted_index = int(rng.integers(0, z))
    syndromes = []
    for i in range(z):
        if i == planted_index:
            syndromes.append(syndrome(H, e))
        else:
            syndromes.append(_random_trit_vector(rng, n - k))
    return DoomInstance(n, k, w, z, H, tuple(syndromes), planted_index, e, seed)


def expected_solutions_log2(n: int, k: int, w: int, q: int = 3) -> float:
    """log2 of binom(n,w) (q-1)^w / q^(n-k), exact via lgamma."""
    if not (0 <= w <= n) or k > n:
        raise ParameterError("bad parameters")
    lg_binom = (math.lgamma(n + 1) - math.lgamma(w + 1) - math.lgamma(n - w + 1)) / math.log(2)
    return lg_binom + w * math.log2(q - 1) - (n - k) * math.log2(q)


def _dense(H: TritMatrix) -> np.ndarray:
    return np.array([r.trits() for r in H.row_vecs], dtype=np.int64)


def brute_force_solutions(
    inst: SdInstance, cap: int = 1 << 20
) -> list[TritVector]:
    """All e with weight(e) = w and He^T = s, by exhaustive enumeration.

    Independent of the solver path: dense numpy arithmetic mod 3 over
    every support (lexicographic) and every {1,2} pattern (lexicographic,
    1 before 2).  Enumeration order is deterministic.
    """
    n, w = inst.n, inst.w
    count = math.comb(n, w) * (2 ** w)
    if count > 1 << 30:
        raise ParameterError("instance too large for exhaustive enumeration")
    Ht = _dense(inst.H).T  # n x (n-k)
    s = np.array(inst.s.trits(), dtype=np.int64)
    if w == 0:
        return [TritVector.zeros(n)] if inst.s.is_zero() else []
    # patterns[i] enumerates {1,2}^w in lexicographic order
    shifts = np.arange(w - 1, -1, -1)
    patterns = ((np.arange(2 ** w)[:, None] >> shifts) & 1) + 1  # 2^w x w
    out: list[TritVector] = []
    for support in combinations(range(n), w):
        sub = Ht[list(support), :]  # w x (n-k)
        syn = (patterns @ sub) % 3
        hits = np.nonzero((syn == s).all(axis=1))[0]
        for h in hits:
            trits = [0] * n
            for pos, val in zip(support, patterns[h]):
                trits[pos] = int(val)
            out.append(TritVector.from_trits(trits))
            if len(out) >= cap:
                return out
    return out


def count_solutions_dense(H: np.ndarray, s: np.ndarray, w: int) -> int:
    """Solution count for a dense (n-k) x n matrix, used by statistics tests."""
    n = H.shape[1]
    Ht = H.T
    shifts = np.arange(w - 1, -1, -1)
    patterns = ((np.arange(2 ** w)[:, None] >> shifts) & 1) + 1
    total = 0
    for support in combinations(range(n), w):
        syn = (patterns @ Ht[list(support), :]) % 3
        total += int((syn == s).all(axis=1).sum())
    return total


# -- instance file format ----------------------------------------------------
#
# line 1: "sd3 <n> <k> <w>"  or  "doom3 <n> <k> <w> <z>"
# next n-k lines: rows of H, n characters from {0,1,2}
# next 1 (or z) lines: syndrome(s), n-k characters
# optional: "planted <n chars>"; for doom3 additionally "index <i>" (0-based)


def _parse_trit_line(line: str, expect_len: int) -> TritVector:
    if len(line) != expect_len or any(c not in "012" for c in line):
        raise FormatError(f"expected {expect_len} trit characters, got {line!r}")
    return TritVector.from_trits(int(c) for c in line)


def serialize(inst: SdInstance | DoomInstance) -> str:
    lines = []
    if isinstance(inst, SdInstance):
        lines.append(f"sd3 {inst.n} {inst.k} {inst.w}")
        syndromes = [inst.s]
    else:
        lines.append(f"doom3 {inst.n} {inst.k} {inst.w} {inst.z}")
        syndromes = list(inst.syndromes)
    for r in inst.H.row_vecs:
        lines.append(str(r))
    for s in syndromes:
        lines.append(str(s))
    if inst.planted is not None:
        lines.append(f"planted {inst.planted}")
        if isinstance(inst, DoomInstance):
            lines.append(f"index {inst.planted_index}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> SdInstance | DoomInstance:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FormatError("empty file")
    head = lines[0].split(" ")
    if head[0] == "sd3":
        if len(head) != 4:
            raise FormatError("header must be 'sd3 <n> <k> <w>'")
        try:
            n, k, w = (int(x) for x in head[1:])
        except ValueError as exc:
            raise FormatError("non-integer header field") from exc
        z = 1
        doom = False
    elif head[0] == "doom3":
        if len(head) != 5:
            raise FormatError("header must be 'doom3 <n> <k> <w> <z>'")
        try:
            n, k, w, z = (int(x) for x in head[1:])
        except ValueError as exc:
            raise FormatError("non-integer header field") from exc
        doom = True
    else:
        raise FormatError(f"unknown format tag {head[0]!r}")
    if not (0 < k < n) or not (0 <= w <= n) or z < 1:
        raise FormatError("parameters out of range")
    need = 1 + (n - k) + z
    if len(lines) < need:
        raise FormatError("truncated file")
    rows = [_parse_trit_line(lines[1 + i], n) for i in range(n - k)]
    H = TritMatrix.from_rows(rows)
    syndromes = [_parse_trit_line(lines[1 + (n - k) + i], n - k) for i in range(z)]
    planted = None
    planted_index = None
    rest = lines[need:]
    if rest:
        first = rest.pop(0)
        if not first.startswith("planted "):
            raise FormatError(f"unexpected line {first!r}")
        planted = _parse_trit_line(first[len("planted "):], n)
    if doom and planted is not None:
        if not rest:
            raise FormatError("doom3 planted line requires an index line")
        idx_line = rest.pop(0)
        if not idx_line.startswith("index "):
            raise FormatError(f"unexpected line {idx_line!r}")
        try:
            planted_index = int(idx_line[len("index "):])
        except ValueError as exc:
            raise FormatError("non-integer planted index") from exc
        if not 0 <= planted_index < z:
            raise FormatError("planted index out of range")
    if rest:
        raise FormatError(f"trailing content: {rest[0]!r}")
    if doom:
        return DoomInstance(n, k, w, z, H, tuple(syndromes), planted_index, planted, seed=0)
    return SdInstance(n, k, w, H, syndromes[0], planted, seed=0)
