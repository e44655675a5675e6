import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nwhankel.errors import InputError, NotWellMatched, UnknownLetter
from nwhankel.nested_words import (
    Kind,
    call,
    enumerate_well_matched,
    nesting_depth,
    parse_word,
    ret,
)
from nwhankel.wvpa import Wvpa, paren_count_automaton, random_wvpa


def one_state(call_w=1.0, ret_w=3.0, int_w=2.0):
    return Wvpa(1, ("a",), 1, [1.0], [1.0], {"a": [[int_w]]}, {("a", 1): [[call_w]]}, {("a", 1): [[ret_w]]})


def recursive_matrix(a, w):
    """Evaluate by the inductive definition: split off the first block."""
    if not w:
        return np.eye(a.n)
    head = w[0]
    if head.kind is Kind.INTERNAL:
        return a.m_int[head.symbol] @ recursive_matrix(a, w[1:])
    depth = 0
    for k, x in enumerate(w):
        depth += {Kind.CALL: 1, Kind.RETURN: -1, Kind.INTERNAL: 0}[x.kind]
        if depth == 0:
            break
    inner = recursive_matrix(a, w[1:k])
    block = sum(
        a.m_call[head.symbol, g] @ inner @ a.m_ret[w[k].symbol, g] for g in range(1, a.gamma + 1)
    )
    return block @ recursive_matrix(a, w[k + 1:])


class TestWordMatrix:
    def test_empty_is_identity(self):
        a = random_wvpa(3, ("a", "b"), 2, seed=0)
        assert np.array_equal(a.word_matrix(()), np.eye(3))

    def test_internal_powers(self):
        assert one_state().word_matrix(parse_word("a a a"))[0, 0] == 8.0

    def test_nesting_rule(self):
        assert one_state().word_matrix(parse_word("<a a a>"))[0, 0] == 6.0

    def test_errors(self):
        a = one_state()
        with pytest.raises(NotWellMatched):
            a.word_matrix(parse_word("<a a"))
        with pytest.raises(NotWellMatched):
            a.word_matrix(parse_word("a>"))
        with pytest.raises(UnknownLetter):
            a.word_matrix(parse_word("b"))

    def test_scan_matches_recursive_definition(self):
        for seed, (n, alphabet, g) in enumerate([(1, "a", 1), (2, "ab", 2), (3, "a", 3)]):
            a = random_wvpa(n, tuple(alphabet), g, seed)
            for w in enumerate_well_matched(tuple(alphabet), 6 if len(alphabet) == 1 else 4):
                want = recursive_matrix(a, w)
                got = a.word_matrix(w)
                assert np.allclose(got, want, rtol=1e-9, atol=1e-12)

    def test_stack_depth_equals_nesting_depth(self):
        a = random_wvpa(2, ("a", "b"), 2, seed=4)
        for w in enumerate_well_matched(("a", "b"), 5):
            assert a.scan(w)[1] == nesting_depth(w)


class TestBehavior:
    def test_paren_count_fixture(self):
        a = paren_count_automaton()
        assert a.behavior(parse_word("<a a>")) == 1.0
        assert a.behavior(parse_word("<a <a a> a>")) == 2.0
        assert a.behavior(()) == 0.0

    def test_paren_count_fixture_is_pair_count(self):
        a = paren_count_automaton()
        for w in enumerate_well_matched(("a",), 8):
            assert a.behavior(w) == sum(1 for x in w if x.kind is Kind.CALL)

    def test_empty_word(self):
        a = random_wvpa(3, ("a",), 2, seed=9)
        assert a.behavior(()) == float(a.alpha @ a.eta)


class TestRandom:
    def test_deterministic(self):
        a = random_wvpa(3, ("a", "b"), 2, seed=7)
        b = random_wvpa(3, ("a", "b"), 2, seed=7)
        assert a.to_dict() == b.to_dict()
        assert a.to_dict() != random_wvpa(3, ("a", "b"), 2, seed=8).to_dict()

    def test_range_and_shape(self):
        a = random_wvpa(1, ("a",), 1, seed=0)
        assert a.n == 1 and a.gamma == 1
        for m in [a.alpha, a.eta, *a.m_int.values(), *a.m_call.values(), *a.m_ret.values()]:
            assert np.all(np.abs(m) <= 1.0)

    def test_homomorphism_on_random_pairs(self):
        a = random_wvpa(2, ("a",), 1, seed=1)
        words = enumerate_well_matched(("a",), 5)
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = words[rng.integers(len(words))]
            v = words[rng.integers(len(words))]
            assert np.allclose(a.word_matrix(u + v), a.word_matrix(u) @ a.word_matrix(v), rtol=1e-9, atol=1e-12)


class TestJson:
    def test_round_trip(self):
        a = random_wvpa(2, ("a", "b"), 3, seed=2)
        data = json.loads(a.to_json())
        assert set(data["m_call"]) == {f"{s}/{g}" for s in "ab" for g in (1, 2, 3)}
        b = Wvpa.from_json(a.to_json())
        assert b.to_dict() == a.to_dict()

    def test_missing_matrix(self):
        data = paren_count_automaton().to_dict()
        del data["m_ret"]["a/1"]
        with pytest.raises(InputError):
            Wvpa.from_dict(data)

    def test_wrong_shape(self):
        data = paren_count_automaton().to_dict()
        data["alpha"] = [1.0]
        with pytest.raises(InputError):
            Wvpa.from_dict(data)

    def test_bad_key(self):
        data = paren_count_automaton().to_dict()
        data["m_call"] = {"a": data["m_call"]["a/1"]}
        with pytest.raises(InputError):
            Wvpa.from_dict(data)

    def test_non_finite(self):
        data = paren_count_automaton().to_dict()
        data["eta"] = [0.0, float("inf")]
        with pytest.raises(InputError):
            Wvpa.from_dict(data)

    def test_immutable(self):
        a = paren_count_automaton()
        with pytest.raises(ValueError):
            a.alpha[0] = 5.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 2))
def test_nesting_closure_property(seed, n, gamma):
    a = random_wvpa(n, ("a", "b"), gamma, seed)
    for u in enumerate_well_matched(("a", "b"), 3):
        mu = a.word_matrix(u)
        for c in "ab":
            for r in "ab":
                want = sum(a.m_call[c, g] @ mu @ a.m_ret[r, g] for g in range(1, gamma + 1))
                got = a.word_matrix((call(c),) + u + (ret(r),))
                assert np.allclose(got, want, rtol=1e-9, atol=1e-12)
