"""Clock regions and the region-split form of a deterministic timed automaton."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import networkx as nx

from .model import (
    ClockValuation,
    Guard,
    TimedAutomaton,
    ValidationError,
    check_determinism,
    max_constant,
)


class EmptyLanguageError(ValueError):
    """No accepting behaviour survives trimming."""


class UnboundedRegionError(ValueError):
    """A trimmed split location starts in a region with clocks above the max constant."""


@dataclass(frozen=True)
class Region:
    """A clock region.

    ``ints[i]`` is the integer part of clock ``clocks[i]`` or ``None`` when the
    clock is above ``bound``.  Bounded clocks are either in ``zero`` (integral
    value) or in exactly one of ``classes``, which lists groups of clocks with
    equal fractional part in ascending order.
    """

    clocks: tuple[str, ...]
    ints: tuple[int | None, ...]
    zero: frozenset[str]
    classes: tuple[frozenset[str], ...]
    bound: int

    def __post_init__(self):
        seen: set[str] = set(self.zero)
        for cls in self.classes:
            if not cls or cls & seen:
                raise ValueError("fractional classes must be nonempty and disjoint")
            seen |= cls
        bounded = {c for c, k in zip(self.clocks, self.ints) if k is not None}
        if seen != bounded:
            raise ValueError("every bounded clock needs exactly one fractional position")
        for c, k in zip(self.clocks, self.ints):
            if k is None:
                continue
            if not 0 <= k <= self.bound or (k == self.bound and c not in self.zero):
                raise ValueError(f"integer part of {c} out of range")

    @property
    def dimension(self) -> int:
        return len(self.classes)

    def int_part(self, clock: str) -> int | None:
        return self.ints[self.clocks.index(clock)]

    def is_top(self, clock: str) -> bool:
        return self.int_part(clock) is None

    def is_bounded(self) -> bool:
        return all(k is not None for k in self.ints)

    def class_rank(self, clock: str) -> int:
        """0 for integral clocks, ``i+1`` for clocks in ``classes[i]``."""
        if clock in self.zero:
            return 0
        for i, cls in enumerate(self.classes):
            if clock in cls:
                return i + 1
        raise KeyError(f"{clock} is above the max constant")

    def contains(self, v: ClockValuation) -> bool:
        return region_of(v, self.bound) == self

    def sample(self) -> ClockValuation:
        """An interior point: the i-th class gets fractional part i/(dim+1)."""
        k = self.dimension + 1
        values = []
        for c, n in zip(self.clocks, self.ints):
            if n is None:
                values.append(Fraction(self.bound + 1))
            else:
                values.append(n + Fraction(self.class_rank(c), k))
        return ClockValuation(self.clocks, tuple(values))

    def describe(self) -> str:
        """Compact text such as ``x∈(0,1), y=0, frac: y<x``."""
        parts = []
        for c, n in zip(self.clocks, self.ints):
            if n is None:
                parts.append(f"{c}>{self.bound}")
            elif c in self.zero:
                parts.append(f"{c}={n}")
            else:
                parts.append(f"{c}∈({n},{n + 1})")
        order = [sorted(self.zero)]
        order += [sorted(cls) for cls in self.classes]
        if self.classes:
            chain = "<".join("=".join(g) if g else "0" for g in order)
            parts.append(f"frac: {chain}")
        return ", ".join(parts)

    def bounded_clocks(self) -> frozenset[str]:
        return frozenset(c for c, n in zip(self.clocks, self.ints) if n is not None)

    def __str__(self):
        return self.describe()


def region_of(v: ClockValuation, bound: int) -> Region:
    ints: list[int | None] = []
    zero: set[str] = set()
    fracs: dict[Fraction, set[str]] = {}
    for c, x in zip(v.clocks, v.values):
        if x > bound:
            ints.append(None)
            continue
        n = math.floor(x)
        ints.append(n)
        f = x - n
        if f == 0:
            zero.add(c)
        else:
            fracs.setdefault(f, set()).add(c)
    classes = tuple(frozenset(fracs[f]) for f in sorted(fracs))
    return Region(v.clocks, tuple(ints), frozenset(zero), classes, bound)


def _next_region(r: Region) -> Region | None:
    """Immediate time successor of ``r``, or None when every clock is above the bound."""
    if not r.bounded_clocks():
        return None
    ints = dict(zip(r.clocks, r.ints))
    if r.zero:
        leaving = set()
        for c in r.zero:
            if ints[c] == r.bound:
                ints[c] = None
            else:
                leaving.add(c)
        classes = ((frozenset(leaving),) if leaving else ()) + r.classes
        zero: frozenset[str] = frozenset()
    else:
        top = r.classes[-1]
        for c in top:
            ints[c] += 1
        classes = r.classes[:-1]
        zero = top
    return Region(r.clocks, tuple(ints[c] for c in r.clocks), zero, classes, r.bound)


def time_successors(r: Region) -> list[Region]:
    """The chain of regions visited by letting time elapse from ``r`` (``r`` first)."""
    chain = [r]
    while True:
        nxt = _next_region(chain[-1])
        if nxt is None:
            return chain
        chain.append(nxt)


def reset_region(r: Region, resets: Iterable[str]) -> Region:
    resets = frozenset(resets)
    if not resets:
        return r
    ints = tuple(0 if c in resets else n for c, n in zip(r.clocks, r.ints))
    classes = tuple(cls - resets for cls in r.classes if cls - resets)
    return Region(r.clocks, ints, r.zero | (resets & set(r.clocks)), classes, r.bound)


def region_satisfies(r: Region, g: Guard) -> bool:
    """Whether the whole region satisfies ``g`` (regions never straddle a guard)."""
    if g.constraints and g.max_bound() > r.bound:
        raise ValueError(f"guard constant {g.max_bound()} exceeds region bound {r.bound}")
    for con in g.constraints:
        n = r.int_part(con.clock)
        b, rel = con.bound, con.relation
        if n is None:
            ok = rel in (">", ">=")
        elif con.clock in r.zero:
            ok = con.holds(n)
        elif rel in ("<", "<="):
            ok = n + 1 <= b
        else:
            ok = n >= b
        if not ok:
            return False
    return True


@dataclass(frozen=True)
class SplitLocation:
    base: str
    start_region: Region

    def __str__(self):
        return f"{self.base}[{self.start_region.describe()}]"


@dataclass(frozen=True)
class SplitEdge:
    source: SplitLocation
    target: SplitLocation
    label: str
    firing_region: Region
    resets: frozenset[str]
    edge_index: int = -1  # position of the originating edge in the automaton

    def __str__(self):
        return f"{self.source} --{self.label}--> {self.target}"


@dataclass(frozen=True)
class RegionSplitAutomaton:
    clocks: tuple[str, ...]
    alphabet: tuple[str, ...]
    bound: int
    locations: tuple[SplitLocation, ...]
    edges: tuple[SplitEdge, ...]
    initial: SplitLocation
    final: frozenset[SplitLocation]

    def outgoing(self, loc: SplitLocation) -> list[SplitEdge]:
        return [e for e in self.edges if e.source == loc]

    def graph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.locations)
        for i, e in enumerate(self.edges):
            g.add_edge(e.source, e.target, key=i, edge=e)
        return g


def _explore(a: TimedAutomaton, bound: int):
    init = SplitLocation(a.initial_location, region_of(a.initial_valuation, bound))
    locations = [init]
    seen = {init}
    edges: list[SplitEdge] = []
    queue = deque([init])
    while queue:
        loc = queue.popleft()
        chain = time_successors(loc.start_region)
        for idx, e in enumerate(a.edges):
            if e.source != loc.base:
                continue
            for fr in chain:
                if not region_satisfies(fr, e.guard):
                    continue
                start = reset_region(fr, e.resets)
                s_guard = a.start.get(e.target)
                if s_guard is not None and not region_satisfies(start, s_guard):
                    continue
                dst = SplitLocation(e.target, start)
                edges.append(SplitEdge(loc, dst, e.label, fr, frozenset(e.resets), idx))
                if dst not in seen:
                    seen.add(dst)
                    locations.append(dst)
                    queue.append(dst)
    return init, locations, edges


def region_split(
    a: TimedAutomaton,
    prune_tails: bool = True,
    allow_unbounded: bool = False,
) -> RegionSplitAutomaton:
    """Region-split form of ``a`` restricted to its reachable, co-reachable part.

    A split location is final when its base location has a final constraint
    that its start region satisfies.  With ``prune_tails`` (the default),
    locations from which no cycle is reachable are dropped too, except the
    initial one; they carry finitely many behaviours and cannot influence
    growth.  Locations left without a path to a final one are then declared
    final so the result stays trim.
    """
    report = check_determinism(a)
    if not report.deterministic:
        raise ValidationError(f"automaton is not deterministic; conflicting edges {report.conflicts}")
    bound = max_constant(a)
    init, locations, edges = _explore(a, bound)

    final = {
        loc for loc in locations
        if loc.base in a.final and region_satisfies(loc.start_region, a.final[loc.base])
    }
    g = nx.MultiDiGraph()
    g.add_nodes_from(locations)
    g.add_edges_from((e.source, e.target) for e in edges)
    co_reach = set(final)
    for f in final:
        co_reach |= nx.ancestors(g, f)
    if init not in co_reach:
        raise EmptyLanguageError("the automaton accepts no word: its initial location cannot reach a final one")
    keep = co_reach

    if prune_tails:
        sub = g.subgraph(keep)
        cyclic = set()
        for comp in nx.strongly_connected_components(sub):
            node = next(iter(comp))
            if len(comp) > 1 or sub.has_edge(node, node):
                cyclic |= comp
        lead_to_cycle = set(cyclic)
        for c in cyclic:
            lead_to_cycle |= nx.ancestors(sub, c)
        keep = lead_to_cycle | {init}
        sub = g.subgraph(keep)
        still = {f for f in final if f in keep}
        reach_final = set(still)
        for f in still:
            reach_final |= nx.ancestors(sub, f)
        final = still | (keep - reach_final)
    else:
        final = final & keep

    kept_locs = tuple(loc for loc in locations if loc in keep)
    kept_edges = tuple(e for e in edges if e.source in keep and e.target in keep)
    if not allow_unbounded:
        for loc in kept_locs:
            if not loc.start_region.is_bounded():
                raise UnboundedRegionError(
                    f"split location {loc} starts above the max constant; "
                    "its behaviour needs unbounded regions"
                )
    return RegionSplitAutomaton(
        clocks=a.clocks,
        alphabet=a.alphabet,
        bound=bound,
        locations=kept_locs,
        edges=kept_edges,
        initial=init,
        final=frozenset(final),
    )
