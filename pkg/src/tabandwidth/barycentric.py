"""Faces of clock regions, their barycenters, and the barycentric abstraction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .model import ClockValuation, format_rational
from .regions import Region, RegionSplitAutomaton, SplitEdge, SplitLocation
from .stg import SimplyTimedGraph, Transition

Vertex = tuple[int, ...]  # integer coordinates in the automaton's clock order


class OutsideClosureError(ValueError):
    pass


def region_vertices(r: Region) -> list[Vertex]:
    """Vertices of the closed simplex ``r``, ascending by coordinate sum.

    Vertex ``j`` raises the ``j`` topmost fractional classes of the floor point.
    """
    if not r.is_bounded():
        raise ValueError(f"region {r} is unbounded and has no vertex list")
    base = list(r.ints)
    out = [tuple(base)]
    k = r.dimension
    for j in range(1, k + 1):
        raised = set().union(*r.classes[k - j:])
        out.append(tuple(n + (1 if c in raised else 0) for c, n in zip(r.clocks, base)))
    return out


@dataclass(frozen=True)
class Face:
    region: Region
    indices: tuple[int, ...]  # sorted positions in region_vertices(region)

    def vertices(self) -> list[Vertex]:
        vs = region_vertices(self.region)
        return [vs[i] for i in self.indices]

    @property
    def dimension(self) -> int:
        return len(self.indices) - 1


@dataclass(frozen=True)
class Barycenter:
    point: ClockValuation
    face: Face

    @property
    def dimension(self) -> int:
        return self.face.dimension

    def __str__(self):
        coords = ",".join(format_rational(v) for v in self.point.values)
        return f"({coords})"


def all_faces(r: Region) -> list[Face]:
    n = r.dimension + 1
    return [Face(r, idx) for size in range(1, n + 1) for idx in combinations(range(n), size)]


def barycenter(f: Face) -> Barycenter:
    vs = f.vertices()
    k = len(vs)
    coords = tuple(Fraction(sum(v[i] for v in vs), k) for i in range(len(f.region.clocks)))
    return Barycenter(ClockValuation(f.region.clocks, coords), f)


def barycentric_coordinates(x: ClockValuation, r: Region) -> tuple[Fraction, ...]:
    """Weights of ``x`` on ``region_vertices(r)``; raises if ``x`` is outside the closure."""
    if not r.is_bounded():
        raise ValueError("unbounded region")
    vals = x.as_dict()
    for c in r.zero:
        if vals[c] != r.int_part(c):
            raise OutsideClosureError(f"{c}={vals[c]} leaves the closure of {r}")
    levels = [Fraction(0)]
    for cls in r.classes:
        offsets = {vals[c] - r.int_part(c) for c in cls}
        if len(offsets) != 1:
            raise OutsideClosureError(f"clocks {sorted(cls)} must share their fractional part")
        levels.append(offsets.pop())
    levels.append(Fraction(1))
    steps = [b - a for a, b in zip(levels, levels[1:])]
    if any(s < 0 for s in steps):
        raise OutsideClosureError(f"{x} leaves the closure of {r}")
    k = r.dimension
    # steps[i] is the weight of the vertex raising the top k-i classes
    return tuple(steps[k - j] for j in range(k + 1))


def in_closure(x: ClockValuation, r: Region) -> bool:
    try:
        barycentric_coordinates(x, r)
    except OutsideClosureError:
        return False
    return True


def smallest_face(x: ClockValuation, r: Region) -> Face:
    weights = barycentric_coordinates(x, r)
    return Face(r, tuple(i for i, w in enumerate(weights) if w > 0))


@dataclass(frozen=True)
class DelaySet:
    """Closed set of delays ``[lo, hi]``; ``hi is None`` means unbounded, ``lo is None`` empty."""

    lo: Fraction | None
    hi: Fraction | None = None

    @property
    def is_empty(self) -> bool:
        return self.lo is None

    @property
    def singleton(self) -> Fraction | None:
        return self.lo if self.lo is not None and self.hi == self.lo else None

    def __str__(self):
        if self.is_empty:
            return "∅"
        if self.singleton is not None:
            return "{" + format_rational(self.lo) + "}"
        hi = "∞" if self.hi is None else format_rational(self.hi)
        return f"[{format_rational(self.lo)}, {hi}]"


EMPTY = DelaySet(None)


def closure_delay_interval(x: ClockValuation, r: Region) -> DelaySet:
    """All ``t >= 0`` with ``x + t`` in the closure of ``r``."""
    vals = x.as_dict()
    lo, hi = Fraction(0), None

    def cap(value):
        nonlocal hi
        hi = value if hi is None else min(hi, value)

    for c, n in zip(r.clocks, r.ints):
        if n is None:
            lo = max(lo, r.bound - vals[c])
        elif c in r.zero:
            t = n - vals[c]
            lo = max(lo, t)
            cap(t)
    offsets = []
    for cls in r.classes:
        alpha = {vals[c] - r.int_part(c) for c in cls}
        if len(alpha) != 1:
            return EMPTY
        offsets.append(alpha.pop())
    if any(b < a for a, b in zip(offsets, offsets[1:])):
        return EMPTY
    if offsets:
        lo = max(lo, -offsets[0])
        cap(1 - offsets[-1])
    if hi is not None and hi < lo:
        return EMPTY
    return DelaySet(lo, hi)


def closed_delay_set(x: ClockValuation, e: SplitEdge, x_next: ClockValuation) -> DelaySet:
    """Delays ``t`` such that ``x + t`` lies in the closed firing region of ``e``
    and resetting lands exactly on ``x_next``."""
    window = closure_delay_interval(x, e.firing_region)
    if window.is_empty or not in_closure(x_next, e.target.start_region):
        return EMPTY
    lo, hi = window.lo, window.hi
    src, dst = x.as_dict(), x_next.as_dict()
    for c in x.clocks:
        if c in e.resets:
            if dst[c] != 0:
                return EMPTY
            continue
        t = dst[c] - src[c]
        if t < lo or (hi is not None and t > hi):
            return EMPTY
        lo = hi = t
    return DelaySet(lo, hi)


@dataclass(frozen=True)
class AbstractState:
    location: SplitLocation
    point: ClockValuation
    dimension: int

    def __str__(self):
        coords = ",".join(format_rational(v) for v in self.point.values)
        return f"{self.location.base}({coords})"


def location_barycenters(loc: SplitLocation) -> list[Barycenter]:
    return [barycenter(f) for f in all_faces(loc.start_region)]


def build_abstraction(rsta: RegionSplitAutomaton) -> SimplyTimedGraph:
    """Simply-timed graph over (split location, face barycenter) pairs.

    A transition is kept only between barycenters of equal dimension whose
    closed delay set is a single delay.
    """
    centers = {loc: location_barycenters(loc) for loc in rsta.locations}
    states = {
        (loc, b.point): AbstractState(loc, b.point, b.dimension)
        for loc in rsta.locations
        for b in centers[loc]
    }
    transitions = []
    for e in rsta.edges:
        for b in centers[e.source]:
            for b2 in centers[e.target]:
                if b.dimension != b2.dimension:
                    continue
                delays = closed_delay_set(b.point, e, b2.point)
                t = delays.singleton
                if t is not None:
                    transitions.append(
                        Transition(states[e.source, b.point], t, e.label, states[e.target, b2.point])
                    )
    return SimplyTimedGraph(list(states.values()), transitions, alphabet=rsta.alphabet)
