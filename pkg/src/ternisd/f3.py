"""Exact GF(3) arithmetic on bit-plane packed vectors and matrices.

A trit vector of length n is stored as two parallel bit-planes held in
arbitrary-precision integers: bit i of ``p1`` is set iff coordinate i
equals 1, bit i of ``p2`` iff it equals 2.  The planes are disjoint and
zero above ``length``.  All word-parallel operations reduce to integer
bit operations, which Python applies limb-wise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class DimensionError(ValueError):
    """Operand lengths or shapes do not match."""


@dataclass(frozen=True)
class TritVector:
    length: int
    p1: int = 0
    p2: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError("negative length")
        mask = (1 << self.length) - 1
        if self.p1 & self.p2:
            raise ValueError("bit-planes overlap: a trit must be one of 0,1,2")
        if (self.p1 | self.p2) & ~mask:
            raise ValueError("set bits beyond vector length")

    @staticmethod
    def from_trits(trits: Iterable[int]) -> "TritVector":
        p1 = p2 = 0
        n = 0
        for t in trits:
            if t == 1:
                p1 |= 1 << n
            elif t == 2:
                p2 |= 1 << n
            elif t != 0:
                raise ValueError(f"not a trit: {t!r}")
            n += 1
        return TritVector(n, p1, p2)

    @staticmethod
    def zeros(n: int) -> "TritVector":
        return TritVector(n, 0, 0)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        if (self.p1 >> i) & 1:
            return 1
        if (self.p2 >> i) & 1:
            return 2
        return 0

    def trits(self) -> list[int]:
        return [self[i] for i in range(self.length)]

    def __iter__(self) -> Iterator[int]:
        return iter(self.trits())

    def __str__(self) -> str:
        return "".join(str(t) for t in self.trits())

    def weight(self) -> int:
        return (self.p1 | self.p2).bit_count()

    def is_zero(self) -> bool:
        return not (self.p1 | self.p2)

    def add(self, other: "TritVector") -> "TritVector":
        if self.length != other.length:
            raise DimensionError(f"length mismatch: {self.length} != {other.length}")
        a1, a2, b1, b2 = self.p1, self.p2, other.p1, other.p2
        # truth table of (a+b) mod 3 on disjoint planes
        c1 = (b1 & ~(a1 | a2)) | (a1 & ~(b1 | b2)) | (a2 & b2)
        c2 = (b2 & ~(a1 | a2)) | (a2 & ~(b1 | b2)) | (a1 & b1)
        return TritVector(self.length, c1, c2)

    def neg(self) -> "TritVector":
        # -1 = 2 mod 3: swap the planes
        return TritVector(self.length, self.p2, self.p1)

    def sub(self, other: "TritVector") -> "TritVector":
        return self.add(other.neg())

    def scale(self, c: int) -> "TritVector":
        c %= 3
        if c == 0:
            return TritVector.zeros(self.length)
        if c == 1:
            return self
        return self.neg()

    def dot(self, other: "TritVector") -> int:
        """Inner product over GF(3)."""
        if self.length != other.length:
            raise DimensionError("length mismatch")
        one = (self.p1 & other.p1) | (self.p2 & other.p2)
        two = (self.p1 & other.p2) | (self.p2 & other.p1)
        return (one.bit_count() + 2 * two.bit_count()) % 3

    def concat(self, other: "TritVector") -> "TritVector":
        return TritVector(
            self.length + other.length,
            self.p1 | (other.p1 << self.length),
            self.p2 | (other.p2 << self.length),
        )

    def slice(self, start: int, stop: int) -> "TritVector":
        if not 0 <= start <= stop <= self.length:
            raise IndexError((start, stop))
        mask = (1 << (stop - start)) - 1
        return TritVector(stop - start, (self.p1 >> start) & mask, (self.p2 >> start) & mask)


def weight(v: TritVector) -> int:
    return v.weight()


def add(a: TritVector, b: TritVector) -> TritVector:
    return a.add(b)


@dataclass(frozen=True)
class TritMatrix:
    rows: int
    cols: int
    row_vecs: tuple[TritVector, ...]

    def __post_init__(self):
        if len(self.row_vecs) != self.rows:
            raise DimensionError("row count mismatch")
        for r in self.row_vecs:
            if r.length != self.cols:
                raise DimensionError("ragged rows")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int] | TritVector]) -> "TritMatrix":
        vecs = tuple(r if isinstance(r, TritVector) else TritVector.from_trits(r) for r in rows)
        cols = vecs[0].length if vecs else 0
        return TritMatrix(len(vecs), cols, vecs)

    @staticmethod
    def identity(n: int) -> "TritMatrix":
        return TritMatrix(n, n, tuple(TritVector(n, 1 << i, 0) for i in range(n)))

    def row(self, i: int) -> TritVector:
        return self.row_vecs[i]

    def entry(self, i: int, j: int) -> int:
        return self.row_vecs[i][j]

    def column(self, j: int) -> TritVector:
        return TritVector.from_trits(self.row_vecs[i][j] for i in range(self.rows))

    def columns(self) -> list[TritVector]:
        """Materialize all columns once (used by subset-sum engines)."""
        p1s = [0] * self.cols
        p2s = [0] * self.cols
        for i, r in enumerate(self.row_vecs):
            bit = 1 << i
            p1 = r.p1
            while p1:
                j = (p1 & -p1).bit_length() - 1
                p1s[j] |= bit
                p1 &= p1 - 1
            p2 = r.p2
            while p2:
                j = (p2 & -p2).bit_length() - 1
                p2s[j] |= bit
                p2 &= p2 - 1
        return [TritVector(self.rows, p1s[j], p2s[j]) for j in range(self.cols)]

    def submatrix_cols(self, start: int, stop: int) -> "TritMatrix":
        return TritMatrix(self.rows, stop - start, tuple(r.slice(start, stop) for r in self.row_vecs))

    def mul_vec(self, e: TritVector) -> TritVector:
        """Matrix-vector product H e^T as a length-``rows`` vector."""
        if e.length != self.cols:
            raise DimensionError("vector length != matrix cols")
        return TritVector.from_trits(r.dot(e) for r in self.row_vecs)

    def mul_mat(self, other: "TritMatrix") -> "TritMatrix":
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        cols = other.columns()
        out_rows = []
        for r in self.row_vecs:
            out_rows.append(TritVector.from_trits(r.dot(c) for c in cols))
        return TritMatrix(self.rows, other.cols, tuple(out_rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TritMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.row_vecs) == (other.rows, other.cols, other.row_vecs)


def syndrome(H: TritMatrix, e: TritVector) -> TritVector:
    """s with s[j] = sum_i H[j][i] * e[i] mod 3."""
    return H.mul_vec(e)


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        n = len(self.mapping)
        if sorted(self.mapping) != list(range(n)):
            raise ValueError("not a permutation of 0..n-1")

    @staticmethod
    def identity(n: int) -> "Permutation":
        return Permutation(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.mapping)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def apply_to_vector(self, v: TritVector) -> TritVector:
        """w with w[i] = v[mapping[i]]."""
        if v.length != len(self.mapping):
            raise DimensionError("length mismatch")
        return TritVector.from_trits(v[j] for j in self.mapping)

    def apply_to_columns(self, H: TritMatrix) -> TritMatrix:
        """H' with column i of H' = column mapping[i] of H."""
        if H.cols != len(self.mapping):
            raise DimensionError("width mismatch")
        return TritMatrix(
            H.rows, H.cols, tuple(self.apply_to_vector(r) for r in H.row_vecs)
        )

    def unpermute_vector(self, e: TritVector) -> TritVector:
        """w with w[mapping[i]] = e[i]; inverse of apply_to_vector."""
        return self.inverse().apply_to_vector(e)


@dataclass(frozen=True)
class PgeResult:
    S: TritMatrix        # invertible row-operation matrix, (n-k) x (n-k)
    Hprime: TritMatrix   # (n-k-ell) x (k+ell)
    Hsecond: TritMatrix  # ell x (k+ell)
    reduced: TritMatrix  # S * H_pi, full (n-k) x n


def partial_gaussian_elim(H: TritMatrix, ell: int, perm: Permutation) -> PgeResult | None:
    """Row-reduce the column-permuted matrix to [[I, H'], [0, H'']].

    Eliminates on the first ``rows - ell`` columns of ``H`` permuted by
    ``perm``.  Returns None (the "go back and re-draw the permutation"
    signal) when the top-left square block is rank deficient.
    """
    m = H.rows
    if not 0 <= ell <= m:
        raise DimensionError("ell out of range")
    Hp = perm.apply_to_columns(H)
    r = m - ell
    work = list(Hp.row_vecs)
    s_rows = list(TritMatrix.identity(m).row_vecs)

    for col in range(r):
        piv = None
        for i in range(col, m):
            if work[i][col] != 0:
                piv = i
                break
        if piv is None:
            return None
        work[col], work[piv] = work[piv], work[col]
        s_rows[col], s_rows[piv] = s_rows[piv], s_rows[col]
        if work[col][col] == 2:
            # 2 * 2 = 1 mod 3: scaling by the inverse is plane swap
            work[col] = work[col].neg()
            s_rows[col] = s_rows[col].neg()
        for i in range(m):
            if i == col:
                continue
            f = work[i][col]
            if f:
                work[i] = work[i].add(work[col].scale(3 - f))
                s_rows[i] = s_rows[i].add(s_rows[col].scale(3 - f))

    reduced = TritMatrix(m, H.cols, tuple(work))
    S = TritMatrix(m, m, tuple(s_rows))
    Hprime = TritMatrix(r, H.cols - r, tuple(work[i].slice(r, H.cols) for i in range(r)))
    Hsecond = TritMatrix(ell, H.cols - r, tuple(work[i].slice(r, H.cols) for i in range(r, m)))
    return PgeResult(S, Hprime, Hsecond, reduced)


def rank(H: TritMatrix) -> int:
    """Rank over GF(3), free column pivoting."""
    work = list(H.row_vecs)
    r = 0
    for col in range(H.cols):
        piv = None
        for i in range(r, H.rows):
            if work[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        if work[r][col] == 2:
            work[r] = work[r].neg()
        for i in range(H.rows):
            if i != r and work[i][col]:
                work[i] = work[i].add(work[r].scale(3 - work[i][col]))
        r += 1
        if r == H.rows:
            break
    return r
