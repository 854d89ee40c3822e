import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import timed_words, zero_free_words, zero_twins
from tabandwidth.metric import (
    INF,
    CapacityCapExceeded,
    ZeroFreeWord,
    directed_distance,
    distance,
    eps_capacity,
    eps_net_greedy,
    format_word,
    is_eps_net,
    nu_word,
    parse_word,
    upsilon,
    zero_class_key,
    zero_separated_subset,
)
from tabandwidth.model import TimedWord

F = Fraction
U = parse_word("a@0.7 b@1.8 a@3 b@4 a@4.1")
V = parse_word("a@0.6 a@1 b@1.7 a@3 a@4.1 b@4.2")


def test_parse_and_format():
    w = parse_word("a@1 {a,b}@5/2")
    assert w.events == (("a", F(1)), (frozenset("ab"), F(5, 2)))
    assert format_word(w) == "a@1 {a,b}@5/2"
    assert parse_word("ε") == TimedWord()
    with pytest.raises(ValueError):
        parse_word("a1")


def test_unmatched_letter_is_infinite():
    assert directed_distance(parse_word("a@1"), parse_word("b@1")) == INF
    assert directed_distance(TimedWord(), parse_word("b@1")) == 0


def test_distances_of_two_word_pair():
    assert directed_distance(U, V) == F(1, 5)
    assert directed_distance(V, U) == F(3, 10)
    assert distance(U, V) == F(3, 10)


def test_simultaneous_reorder_is_distance_zero():
    w, v = parse_word("a@1 b@1"), parse_word("b@1 b@1 a@1")
    assert distance(w, v) == 0 and upsilon([w, v]) == 1


def test_nu_of_example():
    got = nu_word(parse_word("c@0 a@5 b@5 a@5 c@7"))
    assert got == ZeroFreeWord(((frozenset("ab"), F(5)), (frozenset("c"), F(7))))
    assert nu_word(parse_word("a@0 b@0")) == ZeroFreeWord()


def test_zero_free_word_validation():
    with pytest.raises(ValueError):
        ZeroFreeWord(((frozenset("a"), F(0)),))
    with pytest.raises(ValueError):
        ZeroFreeWord(((frozenset("a"), F(1)), (frozenset("b"), F(1))))


def test_upsilon_small_sets():
    assert upsilon([parse_word("a@0"), TimedWord()]) == 2
    assert upsilon([parse_word(f"a@{k}") for k in range(1, 6)]) == 5


def test_capacity_small():
    words = [parse_word(f"a@{k}/4") for k in range(1, 9)]
    assert eps_capacity(words, F(1, 4)).size == 4
    assert eps_capacity(words, F(1, 8)).size == 8
    assert eps_capacity([parse_word("a@1 b@1"), parse_word("b@1 a@1")], 1).size == 1
    greedy = eps_capacity(words, F(1, 4), mode="greedy")
    assert not greedy.exact and greedy.size <= 4
    assert math.isclose(eps_capacity(words, F(1, 4)).log2, 2.0)


def test_capacity_cap():
    words = [parse_word(f"a@{k}/16") for k in range(1, 40)]
    with pytest.raises(CapacityCapExceeded):
        eps_capacity(words, F(1, 8), node_cap=5)


# ---- properties against direct definitions ----

@settings(max_examples=300, deadline=None)
@given(timed_words(), timed_words())
def test_directed_distance_by_definition(w, v):
    expected = F(0)
    for a, t in w.events:
        gaps = [abs(t - s) for b, s in v.events if b == a]
        expected = max(expected, min(gaps)) if gaps else INF
        if expected == INF:
            break
    assert directed_distance(w, v) == expected


@settings(max_examples=300, deadline=None)
@given(zero_twins())
def test_twins_share_class(pair):
    w, v = pair
    assert distance(w, v) == 0
    assert zero_class_key(w) == zero_class_key(v)
    assert nu_word(w) == nu_word(v)


@settings(max_examples=200, deadline=None)
@given(st.lists(timed_words(max_len=3), max_size=8))
def test_upsilon_equals_zero_separated_size(words):
    assert upsilon(words) == len(zero_separated_subset(words))


@settings(max_examples=200, deadline=None)
@given(st.lists(zero_free_words(max_len=2), max_size=7, unique=True), st.sampled_from([F(1, 4), F(1, 2), F(1)]))
def test_capacity_against_brute_force(words, eps):
    best = 0
    for k in range(len(words), 0, -1):
        if any(all(distance(a, b) > eps for a, b in combinations(c, 2)) for c in combinations(words, k)):
            best = k
            break
    res = eps_capacity(words, eps)
    assert res.size == best
    assert all(distance(a, b) > eps for i, a in enumerate(res.words) for b in res.words[i + 1:])
    net = eps_net_greedy(words, eps)
    assert is_eps_net(net, words, eps) and len(net) <= best


@settings(max_examples=200, deadline=None)
@given(timed_words())
def test_format_round_trip(w):
    assert parse_word(format_word(w)) == w
