"""Vertex-level reachability through split edges, orbit graphs and cycle checks.

Orbit matrices count vertex-to-vertex paths in the natural numbers saturated
at 2, which is enough to tell "one way" from "several ways".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Sequence

import networkx as nx

from .barycentric import (
    AbstractState,
    Vertex,
    closed_delay_set,
    closure_delay_interval,
    in_closure,
    region_vertices,
    smallest_face,
)
from .model import ClockValuation
from .regions import RegionSplitAutomaton, SplitEdge, SplitLocation
from .stg import SimplyTimedGraph, Transition

CAP = 2


def _valuation(clocks, v: Sequence) -> ClockValuation:
    return ClockValuation(tuple(clocks), tuple(Fraction(c) for c in v))


def vertex_step(v: Vertex, e: SplitEdge) -> set[tuple[int, Vertex]]:
    """Integer delays taking vertex ``v`` through the closed edge ``e`` onto a target vertex."""
    region = e.source.start_region
    x = _valuation(region.clocks, v)
    if not in_closure(x, region):
        raise ValueError(f"vertex {v} is not in the closure of {region}")
    window = closure_delay_interval(x, e.firing_region)
    if window.is_empty:
        return set()
    targets = set(region_vertices(e.target.start_region))
    limit = e.firing_region.bound + 1
    hi = limit if window.hi is None else min(window.hi, limit)
    out = set()
    t = int(window.lo) if window.lo.denominator == 1 else int(window.lo) + 1
    while t <= hi:
        moved = tuple(0 if c in e.resets else n + t for c, n in zip(region.clocks, v))
        if moved in targets:
            out.add((t, moved))
        t += 1
    return out


@dataclass(frozen=True)
class OrbitGraph:
    source_vertices: tuple[Vertex, ...]
    target_vertices: tuple[Vertex, ...]
    counts: tuple[tuple[int, ...], ...]  # path multiplicities saturated at CAP

    def __post_init__(self):
        if len(self.counts) != len(self.source_vertices) or any(
            len(row) != len(self.target_vertices) for row in self.counts
        ):
            raise ValueError("orbit matrix shape does not match its vertex lists")

    @property
    def edges(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(c > 0 for c in row) for row in self.counts)

    @property
    def is_square(self) -> bool:
        return self.source_vertices == self.target_vertices


def _matmul(a, b) -> tuple[tuple[int, ...], ...]:
    n, m = len(a), len(b[0]) if b else 0
    inner = len(b)
    return tuple(
        tuple(min(CAP, sum(a[i][k] * b[k][j] for k in range(inner))) for j in range(m))
        for i in range(n)
    )


def compose(g1: OrbitGraph, g2: OrbitGraph) -> OrbitGraph:
    if g1.target_vertices != g2.source_vertices:
        raise ValueError("orbit graphs do not compose")
    return OrbitGraph(g1.source_vertices, g2.target_vertices, _matmul(g1.counts, g2.counts))


def identity_graph(loc: SplitLocation) -> OrbitGraph:
    vs = tuple(region_vertices(loc.start_region))
    n = len(vs)
    return OrbitGraph(vs, vs, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def edge_orbit_graph(e: SplitEdge) -> OrbitGraph:
    src = tuple(region_vertices(e.source.start_region))
    dst = tuple(region_vertices(e.target.start_region))
    index = {v: j for j, v in enumerate(dst)}
    rows = []
    for v in src:
        row = [0] * len(dst)
        for _, w in vertex_step(v, e):
            row[index[w]] = min(CAP, row[index[w]] + 1)
        rows.append(tuple(row))
    return OrbitGraph(src, dst, tuple(rows))


def orbit_graph(path: Sequence[SplitEdge], location: SplitLocation | None = None) -> OrbitGraph:
    """Composed vertex reachability along ``path``; the identity on ``location`` if empty."""
    if not path:
        if location is None:
            raise ValueError("an empty path needs its location")
        return identity_graph(location)
    for e1, e2 in zip(path, path[1:]):
        if e1.target != e2.source:
            raise ValueError(f"path does not compose at {e1} / {e2}")
    g = edge_orbit_graph(path[0])
    for e in path[1:]:
        g = compose(g, edge_orbit_graph(e))
    return g


def _boolean(m):
    return tuple(tuple(int(c > 0) for c in row) for row in m)


def idempotent_power(g: OrbitGraph) -> tuple[int, OrbitGraph]:
    """Smallest ``j`` whose boolean power is idempotent, with the counted power ``g**j``."""
    if not g.is_square:
        raise ValueError("idempotent powers need a square orbit graph")
    base = _boolean(g.counts)
    power_b, power_n = base, g.counts
    j = 1
    while _boolean(_matmul(power_b, power_b)) != power_b:
        power_b = _boolean(_matmul(power_b, base))
        power_n = _matmul(power_n, g.counts)
        j += 1
    return j, OrbitGraph(g.source_vertices, g.target_vertices, power_n)


# --------------------------------------------------------------------------
# standard forms of cycle steps

def standard_permutation(k: int, l: int) -> tuple[tuple[int, ...], ...]:
    """``P^{kl}``: the first ``l`` vertices move to the last ``l`` slots, the rest shift down."""
    return tuple(tuple(int(j == (i - l) % k) for j in range(k)) for i in range(k))


def standard_timing(k: int, l: int, d: int) -> tuple[tuple[int, ...], ...]:
    perm = standard_permutation(k, l)
    return tuple(
        tuple((d + 1 if i < l else d) if perm[i][j] else 0 for j in range(k)) for i in range(k)
    )


@dataclass(frozen=True)
class StandardForm:
    ok: bool
    k: int
    l: int | None = None
    d: int | None = None
    reason: str = ""


def standard_form_check(P, D, barycentric_delay: Fraction | None = None) -> StandardForm:
    k = len(P)
    if any(len(row) != k for row in P) or len(D) != k:
        return StandardForm(False, k, reason="matrices are not square of equal size")
    for i, row in enumerate(P):
        if sum(1 for c in row if c) != 1:
            return StandardForm(False, k, reason=f"row {i} is not a bijection row")
    for j in range(k):
        if sum(1 for i in range(k) if P[i][j]) != 1:
            return StandardForm(False, k, reason=f"column {j} is not a bijection column")
    shape = tuple(tuple(int(bool(c)) for c in row) for row in P)
    l = next((l for l in range(k) if standard_permutation(k, l) == shape), None)
    if l is None:
        return StandardForm(False, k, reason="permutation is not block anti-diagonal")
    fast = [D[i][j] for i in range(l, k) for j in range(k) if shape[i][j]]
    slow = [D[i][j] for i in range(l) for j in range(k) if shape[i][j]]
    d = fast[0] if fast else slow[0] - 1
    if any(t != d for t in fast) or any(t != d + 1 for t in slow):
        return StandardForm(False, k, l, reason="timings are not d for fast and d+1 for slow vertices")
    if any(D[i][j] for i in range(k) for j in range(k) if not shape[i][j]):
        return StandardForm(False, k, l, d, reason="timing outside the permutation support")
    if barycentric_delay is not None and Fraction(d) + Fraction(l, k) != barycentric_delay:
        return StandardForm(False, k, l, d, reason=f"barycenter delay {barycentric_delay} differs from d + l/k")
    return StandardForm(True, k, l, d)


@dataclass(frozen=True)
class CycleStep:
    transition: Transition
    edge: SplitEdge
    P: tuple[tuple[int, ...], ...]
    D: tuple[tuple[int, ...], ...]
    form: StandardForm


def cycle_transitions(g: SimplyTimedGraph) -> list[Transition]:
    """Transitions lying on some cycle: self-loops or edges inside a nontrivial strong component."""
    dg = nx.DiGraph()
    dg.add_nodes_from(g.states)
    dg.add_edges_from((t.origin, t.dest) for t in g.transitions)
    comp, size = {}, {}
    for i, c in enumerate(nx.strongly_connected_components(dg)):
        size[i] = len(c)
        for s in c:
            comp[s] = i
    return [
        t for t in g.transitions
        if t.origin == t.dest or (comp[t.origin] == comp[t.dest] and size[comp[t.origin]] > 1)
    ]


def _face_vertices(state: AbstractState) -> list[Vertex]:
    face = smallest_face(state.point, state.location.start_region)
    return [tuple(int(c) for c in v) for v in face.vertices()]


def analyse_cycle_step(rsta: RegionSplitAutomaton, tr: Transition) -> CycleStep:
    """Search for the bijection and vertex timings realising an abstraction transition.

    Candidates are permutations of the face vertices compatible with
    ``vertex_step`` whose mean delay equals the barycenter delay; the first
    candidate in standard form is reported, else the last mismatch.
    """
    src: AbstractState = tr.origin
    dst: AbstractState = tr.dest
    edges = [
        e for e in rsta.edges
        if e.source == src.location and e.target == dst.location and e.label == tr.label
        and closed_delay_set(src.point, e, dst.point).singleton == tr.delay
    ]
    if not edges:
        raise ValueError(f"no split edge realises {tr}")
    us, ws = _face_vertices(src), _face_vertices(dst)
    k = len(us)
    best = None
    for e in edges:
        options = []
        for u in us:
            steps = vertex_step(u, e)
            options.append({w: sorted(t for t, x in steps if x == w) for w in ws})
        for perm in permutations(range(k)):
            choices = [options[i][ws[perm[i]]] for i in range(k)]
            if any(not c for c in choices):
                continue
            for delays in product(*choices):
                if Fraction(sum(delays), k) != tr.delay:
                    continue
                P = tuple(tuple(int(perm[i] == j) for j in range(k)) for i in range(k))
                D = tuple(tuple(delays[i] if perm[i] == j else 0 for j in range(k)) for i in range(k))
                form = standard_form_check(P, D, tr.delay)
                step = CycleStep(tr, e, P, D, form)
                if form.ok:
                    return step
                best = step
    if best is None:
        empty = ((0,) * k,) * k
        best = CycleStep(tr, edges[0], empty, empty, StandardForm(False, k, reason="no vertex bijection matches the delay"))
    return best


def cycle_step_report(rsta: RegionSplitAutomaton, g: SimplyTimedGraph) -> list[CycleStep]:
    return [analyse_cycle_step(rsta, tr) for tr in cycle_transitions(g)]


# --------------------------------------------------------------------------
# witness search

@dataclass(frozen=True)
class Witness:
    edge_ids: tuple[int, ...]  # positions in rsta.edges
    location: SplitLocation
    power: int
    vertex: Vertex
    multiplicity: int

    @property
    def vertex_pair(self) -> tuple[Vertex, Vertex]:
        return (self.vertex, self.vertex)

    def to_data(self) -> dict:
        return {
            "edges": list(self.edge_ids),
            "location": str(self.location),
            "power": self.power,
            "vertex_pair": [list(self.vertex), list(self.vertex)],
            "paths": f">={self.multiplicity}",
        }


def meagerness_witness_search(rsta: RegionSplitAutomaton, max_len: int) -> Witness | None:
    """Closed paths of at most ``max_len`` edges whose idempotent power has a
    vertex reaching itself in two or more ways.

    Paths are explored breadth first and merged when they reach the same
    location with the same counted orbit matrix, so the search is exhaustive
    up to the bound.  Finding nothing proves nothing.
    """
    edge_graphs = [edge_orbit_graph(e) for e in rsta.edges]
    by_source: dict = {}
    for i, e in enumerate(rsta.edges):
        by_source.setdefault(e.source, []).append(i)
    for start in rsta.locations:
        seen = set()
        queue = deque()
        for i in by_source.get(start, ()):
            queue.append(((i,), rsta.edges[i].target, edge_graphs[i].counts))
        while queue:
            path, loc, counts = queue.popleft()
            if (loc, counts) in seen:
                continue
            seen.add((loc, counts))
            if loc == start:
                vs = edge_graphs[path[0]].source_vertices
                j, power = idempotent_power(OrbitGraph(vs, vs, counts))
                for i, v in enumerate(vs):
                    if power.counts[i][i] >= CAP:
                        return Witness(path, start, j, v, power.counts[i][i])
            if len(path) >= max_len:
                continue
            for i in by_source.get(loc, ()):
                queue.append((path + (i,), rsta.edges[i].target, _matmul(counts, edge_graphs[i].counts)))
    return None
