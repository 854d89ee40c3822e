from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tabandwidth.barycentric import closure_delay_interval, in_closure, region_vertices
from tabandwidth.model import ClockValuation
from tabandwidth.orbit import (
    CAP,
    OrbitGraph,
    cycle_step_report,
    cycle_transitions,
    edge_orbit_graph,
    idempotent_power,
    meagerness_witness_search,
    orbit_graph,
    standard_form_check,
    standard_permutation,
    standard_timing,
    vertex_step,
)

F = Fraction


def test_standard_permutation_shapes():
    assert standard_permutation(2, 1) == ((0, 1), (1, 0))
    assert standard_permutation(3, 0) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    # row i sends vertex i to column (i - l) mod k
    assert standard_permutation(3, 1) == ((0, 0, 1), (1, 0, 0), (0, 1, 0))
    assert standard_timing(2, 1, 0) == ((0, 1), (0, 0))


def test_standard_form_check_accepts_and_rejects():
    P, D = standard_permutation(3, 2), standard_timing(3, 2, 1)
    assert standard_form_check(P, D, F(1) + F(2, 3)).ok
    assert not standard_form_check(P, D, F(1)).ok
    bad_perm = ((1, 0, 0), (0, 0, 1), (0, 1, 0))
    assert "anti-diagonal" in standard_form_check(bad_perm, bad_perm).reason
    uneven = ((0, 3), (1, 0))  # slow vertex needs exactly one more than the fast one
    assert not standard_form_check(standard_permutation(2, 1), uneven).ok
    assert not standard_form_check(((1, 1), (0, 0)), ((1, 1), (0, 0))).ok


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, k - 1), st.integers(0, 4))))
def test_standard_forms_pass_their_own_check(kld):
    k, l, d = kld
    form = standard_form_check(standard_permutation(k, l), standard_timing(k, l, d), F(d) + F(l, k))
    assert form.ok and (form.k, form.l, form.d) == (k, l, d)


def _bool_mult(a, b):
    n = len(a)
    return tuple(tuple(int(any(a[i][m] and b[m][j] for m in range(n))) for j in range(n)) for i in range(n))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 2), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_idempotent_power_against_repeated_products(rows):
    counts = tuple(map(tuple, rows))
    vs = tuple((i,) for i in range(len(rows)))
    j, power = idempotent_power(OrbitGraph(vs, vs, counts))
    boolean = tuple(tuple(int(c > 0) for c in r) for r in counts)
    powers = [boolean]
    while len(powers) < j:
        powers.append(_bool_mult(powers[-1], boolean))
    assert all(_bool_mult(p, p) != p for p in powers[:-1])
    assert _bool_mult(powers[-1], powers[-1]) == powers[-1]
    assert power.edges == tuple(tuple(bool(c) for c in r) for r in powers[-1])


def _vertex_step_by_closure(v, e):
    clocks = e.source.start_region.clocks
    targets = set(region_vertices(e.target.start_region))
    out = set()
    for t in range(0, e.firing_region.bound + 2):
        moved = ClockValuation(clocks, tuple(F(c + t) for c in v))
        if not e.firing_region.is_bounded():
            w = closure_delay_interval(ClockValuation(clocks, tuple(F(c) for c in v)), e.firing_region)
            ok = not w.is_empty and w.lo <= t and (w.hi is None or t <= w.hi)
        else:
            ok = in_closure(moved, e.firing_region)
        landed = tuple(0 if c in e.resets else n + t for c, n in zip(clocks, v))
        if ok and landed in targets:
            out.add((t, landed))
    return out


def test_vertex_steps_on_examples(split):
    for name, rsta in split.items():
        for e in rsta.edges:
            if not e.source.start_region.is_bounded() or not e.target.start_region.is_bounded():
                continue
            for v in region_vertices(e.source.start_region):
                assert vertex_step(v, e) == _vertex_step_by_closure(v, e), (name, str(e))


def _count_paths(path, u, w):
    """Number of vertex sequences from u to w along the path, by explicit enumeration."""
    layers = [{u: 1}]
    for e in path:
        nxt = {}
        for v, c in layers[-1].items():
            for _, x in vertex_step(v, e):
                nxt[x] = nxt.get(x, 0) + c
        layers.append(nxt)
    return layers[-1].get(w, 0)


def test_orbit_graph_counts_paths(split):
    rsta = split["a1"]
    loop = [e for e in rsta.edges if e.source == e.target]
    for n in (1, 2, 3):
        path = loop[:1] * n
        g = orbit_graph(path)
        for (i, u), (j, w) in product(enumerate(g.source_vertices), enumerate(g.target_vertices)):
            assert g.counts[i][j] == min(CAP, _count_paths(path, u, w))
    with pytest.raises(ValueError):
        orbit_graph([])


def test_edge_orbit_graph_of_a6_half_step(split):
    rsta = split["a6"]
    e = next(e for e in rsta.edges if e.source.base == "q" and e.source.start_region.dimension == 1)
    g = edge_orbit_graph(e)
    assert sum(map(sum, g.counts)) >= 1


@pytest.mark.parametrize("name", ["a2", "a3", "a5", "a6", "a7"])
def test_cycle_steps_in_standard_form(name, split, abstraction):
    steps = cycle_step_report(split[name], abstraction[name])
    assert all(s.form.ok for s in steps), [s.form.reason for s in steps if not s.form.ok]


def test_cycle_transitions_of_a5(abstraction):
    assert len(cycle_transitions(abstraction["a5"])) == 3


@pytest.mark.parametrize("name,expected", [
    ("a1", True), ("a2", True), ("a3", False), ("a4", True), ("a5", False), ("a6", False), ("a7", True),
])
def test_witness_search_matches_classes(name, expected, split):
    w = meagerness_witness_search(split[name], 6)
    assert (w is not None) == expected
    if w is not None:
        assert w.multiplicity >= CAP
        assert w.to_data()["vertex_pair"] == [list(w.vertex)] * 2
