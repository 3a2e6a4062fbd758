import random

import pytest
from hypothesis import given, strategies as st

from ternisd.f3 import (
    DimensionError,
    Permutation,
    TritMatrix,
    TritVector,
    partial_gaussian_elim,
    rank,
    syndrome,
)


def tv(*trits):
    return TritVector.from_trits(trits)


trit_lists = st.lists(st.integers(0, 2), min_size=0, max_size=96)


def random_vector(rng, n):
    return TritVector.from_trits(rng.choice([0, 1, 2]) for _ in range(n))


def random_full_rank(rng, m, n):
    while True:
        H = TritMatrix.from_rows(
            [[rng.choice([0, 1, 2]) for _ in range(n)] for _ in range(m)]
        )
        if rank(H) == m:
            return H


class TestAdd:
    def test_hand_values(self):
        assert tv(1, 2).add(tv(2, 2)).trits() == [0, 1]

    def test_identity(self):
        v = tv(0, 1, 2, 2, 1)
        assert v.add(TritVector.zeros(5)) == v

    def test_additive_inverse(self):
        a = tv(0, 1, 2, 1)
        b = tv(0, 2, 1, 2)
        assert a.add(b).is_zero()

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            tv(1).add(tv(1, 2))

    @given(trit_lists, st.data())
    def test_commutative_associative(self, trits, data):
        n = len(trits)
        a = TritVector.from_trits(trits)
        b = TritVector.from_trits(data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
        c = TritVector.from_trits(data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)))
        assert a.add(b) == b.add(a)
        assert a.add(b).add(c) == a.add(b.add(c))

    @given(trit_lists)
    def test_neg_is_inverse(self, trits):
        v = TritVector.from_trits(trits)
        assert v.add(v.neg()).is_zero()

    @given(trit_lists, st.data())
    def test_matches_scalar_arithmetic(self, trits, data):
        n = len(trits)
        other = data.draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
        a = TritVector.from_trits(trits)
        b = TritVector.from_trits(other)
        assert a.add(b).trits() == [(x + y) % 3 for x, y in zip(trits, other)]


class TestWeight:
    def test_examples(self):
        assert tv(0, 1, 2, 0).weight() == 2
        assert TritVector.zeros(8).weight() == 0
        assert tv(2, 2, 2, 2, 2).weight() == 5

    @given(trit_lists)
    def test_counts_nonzeros(self, trits):
        assert TritVector.from_trits(trits).weight() == sum(1 for t in trits if t)


class TestSyndrome:
    def test_identity_matrix(self):
        H = TritMatrix.identity(3)
        e = tv(1, 0, 2)
        assert syndrome(H, e) == e

    def test_2x2_hand(self):
        H = TritMatrix.from_rows([[1, 1], [2, 1]])
        assert syndrome(H, tv(1, 1)).trits() == [2, 0]

    def test_zero_vector(self):
        rng = random.Random(11)
        H = random_full_rank(rng, 4, 9)
        assert syndrome(H, TritVector.zeros(9)).is_zero()

    def test_linearity(self):
        rng = random.Random(5)
        H = random_full_rank(rng, 5, 12)
        for _ in range(20):
            e1 = random_vector(rng, 12)
            e2 = random_vector(rng, 12)
            assert syndrome(H, e1.add(e2)) == syndrome(H, e1).add(syndrome(H, e2))

    def test_matches_naive(self):
        rng = random.Random(7)
        H = random_full_rank(rng, 4, 8)
        for _ in range(10):
            e = random_vector(rng, 8)
            naive = [
                sum(H.entry(j, i) * e[i] for i in range(8)) % 3 for j in range(4)
            ]
            assert syndrome(H, e).trits() == naive


class TestColumns:
    def test_columns_match_entries(self):
        rng = random.Random(3)
        H = random_full_rank(rng, 5, 11)
        cols = H.columns()
        for j in range(11):
            assert cols[j].trits() == [H.entry(i, j) for i in range(5)]


class TestPermutation:
    def test_roundtrip_and_weight(self):
        rng = random.Random(1)
        for _ in range(20):
            n = rng.randrange(1, 40)
            m = list(range(n))
            rng.shuffle(m)
            p = Permutation(tuple(m))
            v = random_vector(rng, n)
            assert p.inverse().apply_to_vector(p.apply_to_vector(v)) == v
            assert p.apply_to_vector(v).weight() == v.weight()

    def test_unpermute_solves_original(self):
        # H e_unperm^T == H_pi e^T, the step-back at the end of a solve
        rng = random.Random(2)
        H = random_full_rank(rng, 4, 10)
        m = list(range(10))
        rng.shuffle(m)
        p = Permutation(tuple(m))
        Hp = p.apply_to_columns(H)
        e = random_vector(rng, 10)
        assert syndrome(H, p.unpermute_vector(e)) == syndrome(Hp, e)


class TestPartialGaussianElim:
    def test_identity_block_ell0(self):
        A = [[1, 2, 0], [0, 1, 1], [2, 2, 1]]
        rows = [[1 if i == j else 0 for j in range(3)] + A[i] for i in range(3)]
        H = TritMatrix.from_rows(rows)
        res = partial_gaussian_elim(H, 0, Permutation.identity(6))
        assert res is not None
        assert res.S == TritMatrix.identity(3)
        assert res.Hprime == TritMatrix.from_rows(A)
        assert res.Hsecond.rows == 0

    def test_degenerate_ell_equals_rows(self):
        rng = random.Random(9)
        H = random_full_rank(rng, 4, 9)
        res = partial_gaussian_elim(H, 4, Permutation.identity(9))
        assert res is not None
        # no elimination: S is the identity, H'' is the right block
        assert res.S == TritMatrix.identity(4)
        assert res.Hsecond == H.submatrix_cols(0, 9)

    def test_block_shape_and_multiply_back(self):
        rng = random.Random(13)
        for trial in range(25):
            n, m, ell = 10, 6, 2
            H = random_full_rank(rng, m, n)
            perm_list = list(range(n))
            rng.shuffle(perm_list)
            perm = Permutation(tuple(perm_list))
            res = partial_gaussian_elim(H, ell, perm)
            if res is None:
                continue
            Hp = perm.apply_to_columns(H)
            # S * H_pi equals the reduced matrix bit for bit
            assert res.S.mul_mat(Hp) == res.reduced
            r = m - ell
            for i in range(r):
                for j in range(r):
                    assert res.reduced.entry(i, j) == (1 if i == j else 0)
            for i in range(r, m):
                for j in range(r):
                    assert res.reduced.entry(i, j) == 0
            assert res.Hprime.rows == r and res.Hprime.cols == n - r
            assert res.Hsecond.rows == ell and res.Hsecond.cols == n - r
            # S invertible
            assert rank(res.S) == m

    def test_singular_flag(self):
        # duplicate leading columns force a rank-deficient top-left block
        H = TritMatrix.from_rows([[1, 1, 0, 2], [2, 2, 1, 0]])
        assert partial_gaussian_elim(H, 0, Permutation.identity(4)) is None


class TestRank:
    def test_known_values(self):
        assert rank(TritMatrix.identity(5)) == 5
        H = TritMatrix.from_rows([[1, 2, 0], [2, 1, 0]])  # row2 = 2*row1
        assert rank(H) == 1
