import csv
import io

import numpy as np
import pytest

from nwhankel import hankel as H
from nwhankel.errors import InputError, NoNonzeroBasis, NotWellMatched
from nwhankel.nested_words import enumerate_all, enumerate_well_matched, is_well_matched, parse_word
from nwhankel.wvpa import random_wvpa

FIG2_LABELS = [parse_word(t) for t in ["eps", "a", "<a a>", "a a", "<a a a>", "<a <a a> a>"]]
FIG2 = np.array(
    [
        [0, 0, 1, 0, 1, 2],
        [0, 0, 1, 0, 1, 2],
        [1, 1, 2, 1, 2, 3],
        [0, 0, 1, 0, 1, 2],
        [1, 1, 2, 1, 2, 3],
        [2, 2, 3, 2, 3, 4],
    ],
    dtype=float,
)


def brute_rank(m, tol=1e-9):
    m = np.asarray(m, dtype=float)
    if not np.any(m):
        return 0
    return int(np.linalg.matrix_rank(m, tol=tol * np.linalg.norm(m, 2)))


class TestOracles:
    def test_builtins(self):
        w = parse_word("<a <a a> a> a")
        assert H.paren_count()(w) == 2.0
        assert H.dyck_one()(w) == 1.0
        assert H.builtin_oracle("constant0")(w) == 0.0
        assert H.builtin_oracle("constant(2.5)")(w) == 2.5

    def test_unknown(self):
        with pytest.raises(InputError):
            H.builtin_oracle("fibonacci")

    def test_deterministic_and_memoized(self):
        calls = []
        f = H.Oracle("probe", lambda w: calls.append(w) or len(w))
        w = parse_word("a a")
        assert f(w) == f(w) == 2.0
        assert len(calls) == 1


class TestBuildBlock:
    def test_paren_block(self):
        b = H.build_block(H.paren_count(), FIG2_LABELS, FIG2_LABELS)
        assert np.array_equal(b.entries, FIG2)
        assert b.entries[2, 2] == 2 and b.entries[5, 5] == 4
        assert H.block_rank(b) == 2

    def test_zero_block(self):
        words = enumerate_well_matched(("a",), 3)
        b = H.build_block(H.constant(0), words, words)
        assert not np.any(b.entries)
        assert H.block_rank(b) == 0

    def test_dyck_one_all_ones(self):
        words = enumerate_well_matched(("a",), 4)
        b = H.build_block(H.dyck_one(), words, words)
        assert np.all(b.entries == 1.0)
        assert H.block_rank(b) == 1

    def test_entries_recomputable(self):
        f = H.automaton_oracle(random_wvpa(2, ("a", "b"), 2, seed=5))
        words = enumerate_well_matched(("a", "b"), 2)
        b = H.build_block(f, words, words)
        for i, u in enumerate(words):
            for j, v in enumerate(words):
                assert b.entries[i, j] == f(u + v)

    def test_rejects_unmatched_label(self):
        with pytest.raises(NotWellMatched):
            H.build_block(H.dyck_one(), [parse_word("<a")], [()])

    def test_csv_layout(self):
        b = H.build_block(H.paren_count(), FIG2_LABELS, FIG2_LABELS)
        rows = list(csv.reader(io.StringIO(b.to_csv())))
        assert rows[0] == ["", "eps", "a", "<a a>", "a a", "<a a a>", "<a <a a> a>"]
        assert rows[6][0] == "<a <a a> a>"
        assert [float(x) for x in rows[6][1:]] == [2, 2, 3, 2, 3, 4]


class TestRank:
    def test_random_automaton_bound(self):
        f = H.automaton_oracle(random_wvpa(2, ("a",), 1, seed=0))
        words = enumerate_well_matched(("a",), 6)
        assert H.block_rank(H.build_block(f, words, words)) <= 4

    def test_monotone_in_truncation(self):
        oracles = [H.paren_count(), H.dyck_one()] + [
            H.automaton_oracle(random_wvpa(n, ("a",), 2, seed=n)) for n in (1, 2, 3)
        ]
        for f in oracles:
            ranks = []
            for length in range(0, 5):
                words = enumerate_well_matched(("a",), length)
                ranks.append(H.block_rank(H.build_block(f, words, words), 1e-7))
            assert ranks == sorted(ranks)

    @pytest.mark.parametrize("seed", range(6))
    def test_rank_at_most_state_count(self, seed):
        # a row of the block is w -> (alpha^T M_u) . (M_w eta): at most n independent rows
        n = 1 + seed % 3
        f = H.automaton_oracle(random_wvpa(n, ("a", "b"), 2, seed))
        words = enumerate_well_matched(("a", "b"), 3)
        assert H.block_rank(H.build_block(f, words, words), 1e-7) <= n


class TestStabilized:
    def test_paren_count(self):
        st = H.stabilized_block(H.paren_count(), ("a",), 2, 8)
        assert (st.rank, st.stabilized) == (2, True)
        assert [L for L, _ in st.history] == [2, 3, 4]
        for length, rank in st.history:
            words = enumerate_well_matched(("a",), length)
            assert rank == brute_rank([[H.paren_count()(u + v) for v in words] for u in words])

    def test_constant(self):
        st = H.stabilized_block(H.constant(5), ("a",), 2, 8)
        assert (st.rank, st.stabilized) == (1, True)
        assert st.history[0] == (2, 1)

    def test_random_automaton(self):
        st = H.stabilized_block(H.automaton_oracle(random_wvpa(2, ("a",), 1, seed=3)), ("a",), 2, 8)
        assert st.stabilized and st.rank <= 4

    def test_not_stabilized_flag(self):
        st = H.stabilized_block(H.paren_count(), ("a",), 2, 3)
        assert not st.stabilized and st.max_word_len == 3

    def test_bad_range(self):
        with pytest.raises(InputError):
            H.stabilized_block(H.paren_count(), ("a",), 5, 3)


class TestSelectSpanning:
    def test_paren_block(self):
        b = H.build_block(H.paren_count(), FIG2_LABELS, FIG2_LABELS)
        g = H.select_spanning(b, 2)
        assert g.distinct == (parse_word("<a a>"), parse_word("<a <a a> a>"))
        assert np.array_equal(g.values, [[1, 2], [1, 2]])
        assert np.array_equal(g.betas, np.ones((2, 2)))

    def test_dyck_one(self):
        words = enumerate_well_matched(("a",), 4)
        g = H.select_spanning(H.build_block(H.dyck_one(), words, words), 1)
        assert g.words == (((),),)

    def test_zero_function(self):
        words = enumerate_well_matched(("a",), 3)
        with pytest.raises(NoNonzeroBasis):
            H.select_spanning(H.build_block(H.constant(0), words, words), 1)

    def test_nonzero_rows_do_not_reach_rank(self):
        # only "<a a>" has a nonzero value, yet the row of eps is independent of it
        target = parse_word("<a a>")
        f = H.Oracle("point", lambda w: 1.0 if w == target else 0.0)
        words = enumerate_well_matched(("a",), 2)
        b = H.build_block(f, words, words)
        assert H.block_rank(b) == 2
        with pytest.raises(NoNonzeroBasis):
            H.select_spanning(b, 2)

    def test_grid_invariants_random(self):
        for seed in range(10):
            f = H.automaton_oracle(random_wvpa(3, ("a",), 2, seed))
            st = H.stabilized_block(f, ("a",), 2, 8, 1e-7)
            n = H.grid_size(st.rank)
            g = H.select_spanning(st.block, n, 1e-7, rank=st.rank)
            assert np.all(g.values != 0)
            assert np.allclose(g.betas[0], 1.0)
            for i, j, w in g.cells():
                assert g.values[i, j] == f(w)
                assert np.isclose(g.betas[i, j], g.values[i, j] / g.values[0, j])
            rows = np.array([st.block.row(w) for w in g.distinct])
            assert np.linalg.matrix_rank(rows) == st.rank

    def test_rank_too_large(self):
        b = H.build_block(H.paren_count(), FIG2_LABELS, FIG2_LABELS)
        with pytest.raises(InputError):
            H.select_spanning(b, 1)

    @pytest.mark.parametrize("rank, n", [(0, 0), (1, 1), (2, 2), (4, 2), (5, 3), (9, 3), (10, 4)])
    def test_grid_size(self, rank, n):
        assert H.grid_size(rank) == n


class TestWordHankel:
    def test_dyck_growth(self):
        growth = H.word_hankel_rank_growth(H.dyck_one(), ("a",), [2, 4, 6])
        ranks = [r for _, r in growth]
        assert all(a < b for a, b in zip(ranks, ranks[1:]))
        for L, r in growth:
            assert r >= L // 2 + 1

    def test_dense_block_brute_force(self):
        f = H.dyck_one()
        for L in range(0, 5):
            words, h = H.word_hankel_block(f, ("a",), L)
            assert words == enumerate_all(("a",), L)
            for i, u in enumerate(words):
                for j, v in enumerate(words):
                    assert h[i, j] == (1.0 if is_well_matched(u + v) else 0.0)
            assert H.word_hankel_rank(f, ("a",), L) == brute_rank(h)

    def test_profile_path_matches_dense(self):
        for f in (H.dyck_one(), H.constant(3.0)):
            for L in range(0, 6):
                _, h = H.word_hankel_block(f, ("a",), L)
                assert H.word_hankel_rank(f, ("a",), L) == brute_rank(h)

    def test_zero(self):
        assert H.word_hankel_rank_growth(H.constant(0), ("a",), [2, 4]) == [(2, 0), (4, 0)]

    def test_paren_count_growth(self):
        ranks = [r for _, r in H.word_hankel_rank_growth(H.paren_count(), ("a",), [2, 4, 6])]
        assert all(a < b for a, b in zip(ranks, ranks[1:]))

    def test_lengths_ascending(self):
        with pytest.raises(InputError):
            H.word_hankel_rank_growth(H.dyck_one(), ("a",), [4, 2])

    def test_nested_rank_stays_one(self):
        for L in range(0, 7):
            words = enumerate_well_matched(("a",), L)
            assert H.block_rank(H.build_block(H.dyck_one(), words, words)) == 1


@pytest.mark.parametrize("seed", range(5))
def test_rows_are_combinations_of_automaton_basis(seed):
    n = 1 + seed % 3
    a = random_wvpa(n, ("a", "b"), 2, seed)
    cols = enumerate_well_matched(("a", "b"), 3)
    v = H.automaton_row_basis(a, cols)
    for u in enumerate_well_matched(("a", "b"), 4):
        row = np.array([a.behavior(u + w) for w in cols])
        combo = np.einsum("ij,ijk->k", a.word_matrix(u), v)
        assert np.allclose(combo, row, rtol=1e-9, atol=1e-9 * max(1.0, np.max(np.abs(row))))
