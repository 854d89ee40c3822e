import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import nu_language, path_words
from strategies import small_graphs
from tabandwidth.metric import zero_class_key
from tabandwidth.model import TimedWord, ValidationError
from tabandwidth.stg import (
    BudgetExceeded,
    QuasiPolynomial,
    SimplyTimedGraph,
    Transition,
    adjacency_matrix,
    characteristic,
    count_zero_free_words,
    determinize,
    dump_stg,
    enumerate_words,
    growth_pipeline,
    growth_rate,
    oracle_growth_estimate,
    parse_stg,
    spectral_crossing,
    zero_eliminate,
)

F = Fraction
Z = sympy.Symbol("z")


def test_parse_and_dump_round_trip(two_state):
    again = parse_stg(dump_stg(two_state))
    assert set(again.transitions) == {
        Transition(str(t.origin), t.delay, t.label, str(t.dest)) for t in two_state.transitions
    }


def test_parse_rejects_bad_documents():
    with pytest.raises(ValidationError):
        parse_stg("states: [p]\n")
    with pytest.raises(ValidationError):
        parse_stg("transitions:\n  - {from: p, delay: -1, label: a, to: p}\n")
    with pytest.raises(ValidationError):
        parse_stg("states: [p]\ntransitions:\n  - {from: p, delay: 1, label: a, to: q}\n")


def test_list_labels_become_sets():
    g = parse_stg("transitions:\n  - {from: p, delay: 1, label: [a, b], to: p}\n")
    assert g.transitions[0].label == frozenset("ab")


def test_zero_eliminate_two_state_graph(two_state):
    zf = zero_eliminate(two_state)
    assert zf.is_zero_free
    assert Transition("q", F(3), frozenset("ab"), "q") in zf.transitions
    assert Transition("q", F(3), frozenset("a"), "p") in zf.transitions


def test_determinize_requires_zero_free(two_state):
    with pytest.raises(ValueError):
        determinize(two_state)


def test_quasi_polynomial_text_and_zeta():
    q = QuasiPolynomial({0: 1, F(1, 2): -2, 1: -3, F(3, 2): 6})
    assert str(q) == "1 - 2z^(1/2) - 3z + 6z^(3/2)"
    assert q.scale == 2 and q.to_zeta() == (1, -2, -3, 6)
    assert QuasiPolynomial.from_zeta((1, -2, -3, 6), 2) == q


def test_two_state_growth(two_state):
    r, graphs = growth_pipeline(two_state)
    assert r.characteristic == QuasiPolynomial({0: 1, 2: -1, 3: -1, 5: -2, 7: 2})
    assert r.z0 == pytest.approx(0.698776, abs=1e-6)
    assert r.beta == pytest.approx(-math.log2(r.z0), rel=1e-12)
    assert r.checks["real_axis"]["agrees"] and r.checks["spectral"]["agrees"]
    assert graphs.deterministic.is_deterministic


def test_acyclic_graph_has_rate_zero():
    g = SimplyTimedGraph(["p", "q"], [("p", 1, "a", "q")])
    r = growth_rate(g)
    assert r.beta == 0.0 and r.z0 is None
    assert spectral_crossing(adjacency_matrix(determinize(g))) is None


def test_single_loop_rate():
    g = SimplyTimedGraph(["p"], [("p", 2, "a", "p"), ("p", 2, "b", "p")])
    assert growth_rate(g).beta == pytest.approx(0.5, abs=1e-12)


def test_counting_budget():
    g = SimplyTimedGraph(["p"], [("p", 1, "a", "p"), ("p", 1, "b", "p")])
    assert count_zero_free_words(g, 3) == 1 + 2 + 4 + 8
    with pytest.raises(BudgetExceeded):
        enumerate_words(g, 20, budget=100)


def test_oracle_estimate_of_doubling_loop():
    g = SimplyTimedGraph(["p"], [("p", 1, "a", "p"), ("p", 1, "b", "p")])
    (est,) = oracle_growth_estimate(g, [12])
    assert est.upsilon == 2**13 - 1
    assert est.slope == pytest.approx(1.0, abs=0.01)


# ---- oracles ----

@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_zero_eliminate_language(g):
    assert path_words(zero_eliminate(g), 6) == nu_language(g, 6)


@settings(max_examples=200, deadline=None)
@given(small_graphs(delays=st.sampled_from([F(1), F(3, 2), F(2)])))
def test_determinize_keeps_language_and_counts(g):
    d = determinize(g)
    assert d.is_deterministic
    words = path_words(g, 6)
    assert path_words(d, 6) == words
    assert count_zero_free_words(g, 6) == len(words)


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_characteristic_against_sympy(g):
    m = adjacency_matrix(g)
    n = len(g.states)
    scale = m.scale
    ref = sympy.Matrix(n, n, lambda i, j: (1 if i == j else 0) - sum(
        c * Z ** int(e * scale) for e, c in m.entries[i][j].terms.items()
    )).det()
    mine = characteristic(m).to_zeta(scale) if not characteristic(m).is_zero() else ()
    expected = sympy.Poly(sympy.expand(ref), Z).all_coeffs()[::-1] if sympy.expand(ref) != 0 else []
    assert list(mine) == [int(c) for c in expected]
    for method in ("cofactor", "bareiss"):
        assert characteristic(m, method) == characteristic(m)


def _raw_words(g, horizon):
    """Every word of every run within ``horizon``, simultaneous events in a fixed order."""
    out = {TimedWord()}
    seen = set()
    stack = [(q, F(0), frozenset()) for q in g.states]
    while stack:
        conf = stack.pop()
        if conf in seen:
            continue
        seen.add(conf)
        q, t, events = conf
        for tr in g.transitions:
            if tr.origin == q and t + tr.delay <= horizon:
                ev = events | {(tr.label, t + tr.delay)}
                out.add(TimedWord(tuple(sorted(ev, key=lambda e: (e[1], str(e[0]))))))
                stack.append((tr.dest, t + tr.delay, frozenset(ev)))
    return out


@settings(max_examples=200, deadline=None)
@given(small_graphs())
def test_enumerated_classes_match_class_keys(g):
    words = enumerate_words(g, 6)
    assert len(words) == len({zero_class_key(w) for w in _raw_words(g, F(6))})
    assert len({zero_class_key(w) for w in words}) == len(words)
