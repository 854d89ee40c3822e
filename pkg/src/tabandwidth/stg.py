"""Simply-timed graphs and their growth rate.

A simply-timed graph has no initial or final states: its language is every
timed word labelling a run that starts anywhere.  The growth rate is read off
the smallest root of ``det(I - M(z))`` where ``M(z)`` sums ``z**delay`` over
the transitions of the 0-free deterministic form.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, NamedTuple, Sequence

import mpmath
import networkx as nx
import numpy as np
import yaml

from . import polynomials as P
from .model import TimedWord, ValidationError, as_rational, format_rational


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed its configured budget."""


class Transition(NamedTuple):
    origin: Hashable
    delay: Fraction
    label: Hashable
    dest: Hashable


def label_key(label) -> tuple:
    """Sort key that is stable across runs for letters and letter sets."""
    if isinstance(label, frozenset):
        return (1, tuple(sorted(map(str, label))))
    return (0, (str(label),))


def format_label(label) -> str:
    if isinstance(label, frozenset):
        return "{" + ",".join(sorted(map(str, label))) + "}"
    return str(label)


def lift_label(label) -> frozenset:
    return label if isinstance(label, frozenset) else frozenset([label])


class SimplyTimedGraph:
    def __init__(self, states: Iterable, transitions: Iterable, alphabet: Iterable | None = None):
        self.states = tuple(dict.fromkeys(states))
        known = set(self.states)
        seen = {}
        for tr in transitions:
            tr = Transition(tr[0], as_rational(tr[1]), tr[2], tr[3])
            if tr.delay < 0:
                raise ValidationError(f"negative delay in {tr}")
            if tr.origin not in known or tr.dest not in known:
                raise ValidationError(f"transition {tr} uses an unknown state")
            seen.setdefault(tr, None)
        self.transitions = tuple(seen)
        labels = {tr.label for tr in self.transitions}
        self.alphabet = tuple(alphabet) if alphabet is not None else tuple(sorted(labels, key=label_key))

    def __repr__(self):
        return f"SimplyTimedGraph({len(self.states)} states, {len(self.transitions)} transitions)"

    @property
    def is_zero_free(self) -> bool:
        return all(tr.delay > 0 for tr in self.transitions)

    @property
    def is_deterministic(self) -> bool:
        dest = {}
        for tr in self.transitions:
            key = (tr.origin, tr.delay, tr.label)
            if dest.setdefault(key, tr.dest) != tr.dest:
                return False
        return True

    def common_denominator(self) -> int:
        n = 1
        for tr in self.transitions:
            n = math.lcm(n, tr.delay.denominator)
        return n

    def outgoing(self) -> dict:
        out = defaultdict(list)
        for tr in self.transitions:
            out[tr.origin].append(tr)
        return out

    def base_letters(self) -> set:
        letters = set()
        for tr in self.transitions:
            letters |= lift_label(tr.label)
        return letters

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.states)
        for tr in self.transitions:
            g.add_edge(tr.origin, tr.dest, delay=tr.delay, label=tr.label)
        return g


# --------------------------------------------------------------------------
# documents

def stg_from_data(data) -> SimplyTimedGraph:
    if not isinstance(data, dict) or "transitions" not in data:
        raise ValidationError("a graph document needs 'states' and 'transitions'")
    states = list(data.get("states") or [])
    transitions = []
    for i, tr in enumerate(data["transitions"]):
        try:
            label = tr["label"]
            label = frozenset(label) if isinstance(label, (list, tuple)) else label
            transitions.append(Transition(tr["from"], as_rational(tr["delay"]), label, tr["to"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"transition #{i}: {exc}") from None
    if not states:
        states = list(dict.fromkeys([t.origin for t in transitions] + [t.dest for t in transitions]))
    return SimplyTimedGraph(states, transitions, data.get("alphabet"))


def parse_stg(text: str) -> SimplyTimedGraph:
    """Read a graph from JSON or YAML (JSON is valid YAML)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"malformed graph document: {exc}") from None
    return stg_from_data(data)


def stg_to_data(g: SimplyTimedGraph) -> dict:
    def lab(label):
        return sorted(map(str, label)) if isinstance(label, frozenset) else label

    return {
        "states": [str(s) for s in g.states],
        "transitions": [
            {"from": str(t.origin), "delay": format_rational(t.delay), "label": lab(t.label), "to": str(t.dest)}
            for t in g.transitions
        ],
    }


def dump_stg(g: SimplyTimedGraph) -> str:
    return json.dumps(stg_to_data(g), indent=2)


# --------------------------------------------------------------------------
# transformations

def zero_eliminate(g: SimplyTimedGraph) -> SimplyTimedGraph:
    """0-free graph whose words are the 0-eliminated words of ``g``.

    Each positive transition is merged with every chain of instantaneous
    transitions that may follow it; the letter sets of the chain are unioned.
    Saturation runs over (state, letter set) pairs, so instant cycles are fine.
    """
    instant = defaultdict(list)
    for tr in g.transitions:
        if tr.delay == 0:
            instant[tr.origin].append(tr)
    out = []
    for tr in g.transitions:
        if tr.delay == 0:
            continue
        start = (tr.dest, lift_label(tr.label))
        seen = {start: None}
        queue = deque([start])
        while queue:
            q, letters = queue.popleft()
            for z in instant[q]:
                nxt = (z.dest, letters | lift_label(z.label))
                if nxt not in seen:
                    seen[nxt] = None
                    queue.append(nxt)
        out += [Transition(tr.origin, tr.delay, letters, q) for q, letters in seen]
    return SimplyTimedGraph(g.states, out)


def _moves(g: SimplyTimedGraph):
    moves = defaultdict(lambda: defaultdict(set))
    for tr in g.transitions:
        moves[tr.origin][(tr.delay, tr.label)].add(tr.dest)
    return moves


def determinize(g: SimplyTimedGraph) -> SimplyTimedGraph:
    """Subset construction started from the set of all states."""
    if not g.is_zero_free:
        raise ValueError("determinize expects a 0-free graph")
    if not g.states:
        return SimplyTimedGraph([], [])
    moves = _moves(g)
    order = {s: i for i, s in enumerate(g.states)}
    start = frozenset(g.states)
    found = {start: None}
    queue = deque([start])
    out = []
    while queue:
        subset = queue.popleft()
        step = defaultdict(set)
        for q in sorted(subset, key=order.__getitem__):
            for key, dests in moves[q].items():
                step[key] |= dests
        for key in sorted(step, key=lambda k: (k[0], label_key(k[1]))):
            nxt = frozenset(step[key])
            out.append(Transition(subset, key[0], key[1], nxt))
            if nxt not in found:
                found[nxt] = None
                queue.append(nxt)
    return SimplyTimedGraph(found, out)


def subset_name(subset: frozenset, g: SimplyTimedGraph) -> str:
    order = {s: i for i, s in enumerate(g.states)}
    return "{" + ",".join(str(s) for s in sorted(subset, key=order.__getitem__)) + "}"


# --------------------------------------------------------------------------
# quasi-polynomials

class QuasiPolynomial:
    """Finite sum of ``coeff * z**exponent`` with rational exponents."""

    def __init__(self, terms: dict):
        clean = {}
        for e, c in terms.items():
            e = as_rational(e)
            if e < 0:
                raise ValueError("exponents must be nonnegative")
            if c:
                clean[e] = clean.get(e, 0) + int(c)
        self.terms = {e: c for e, c in sorted(clean.items()) if c}

    @classmethod
    def from_zeta(cls, coeffs: Sequence[int], scale: int) -> QuasiPolynomial:
        return cls({Fraction(i, scale): c for i, c in enumerate(coeffs) if c})

    @property
    def scale(self) -> int:
        m = 1
        for e in self.terms:
            m = math.lcm(m, e.denominator)
        return m

    def to_zeta(self, scale: int | None = None) -> P.Poly:
        m = scale or self.scale
        if any((e * m).denominator != 1 for e in self.terms):
            raise ValueError(f"scale {m} does not clear the exponents")
        top = int(max(self.terms, default=0) * m)
        coeffs = [0] * (top + 1)
        for e, c in self.terms.items():
            coeffs[int(e * m)] += c
        return P.trim(coeffs)

    def __add__(self, other: QuasiPolynomial) -> QuasiPolynomial:
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, 0) + c
        return QuasiPolynomial(merged)

    def __eq__(self, other):
        return isinstance(other, QuasiPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, z):
        return sum(c * z ** (float(e) if not isinstance(z, Fraction) else e) for e, c in self.terms.items())

    def coefficients(self) -> list[list]:
        return [[format_rational(e), c] for e, c in self.terms.items()]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mag = abs(c)
            if e == 0:
                body = str(mag)
            else:
                power = "" if e == 1 else ("^" + (str(e.numerator) if e.denominator == 1 else f"({e})"))
                body = ("" if mag == 1 else str(mag)) + "z" + power
            parts.append(("-" if c < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


@dataclass
class AdjacencyMatrix:
    states: tuple
    entries: list[list[QuasiPolynomial]]

    @property
    def scale(self) -> int:
        m = 1
        for row in self.entries:
            for q in row:
                m = math.lcm(m, q.scale)
        return m

    def zeta_matrix(self, scale: int | None = None) -> list[list[P.Poly]]:
        m = scale or self.scale
        return [[q.to_zeta(m) for q in row] for row in self.entries]

    def numeric(self, a: float) -> np.ndarray:
        n = len(self.states)
        out = np.zeros((n, n))
        for i, row in enumerate(self.entries):
            for j, q in enumerate(row):
                out[i, j] = sum(c * a ** float(e) for e, c in q.terms.items())
        return out


def adjacency_matrix(g: SimplyTimedGraph) -> AdjacencyMatrix:
    index = {s: i for i, s in enumerate(g.states)}
    n = len(g.states)
    raw = [[defaultdict(int) for _ in range(n)] for _ in range(n)]
    for tr in g.transitions:
        raw[index[tr.origin]][index[tr.dest]][tr.delay] += 1
    return AdjacencyMatrix(g.states, [[QuasiPolynomial(cell) for cell in row] for row in raw])


def _identity_minus(mat: list[list[P.Poly]]) -> list[list[P.Poly]]:
    n = len(mat)
    return [[P.sub(P.ONE if i == j else P.ZERO, mat[i][j]) for j in range(n)] for i in range(n)]


COFACTOR_LIMIT = 8


def determinant(mat: list[list[P.Poly]], method: str = "auto") -> P.Poly:
    """Exact determinant over Z[ζ].

    ``auto`` splits the matrix into strongly connected blocks (the matrix is
    block triangular in their topological order) and uses cofactor expansion
    on blocks up to ``COFACTOR_LIMIT`` rows, Bareiss elimination beyond.
    """
    if method == "cofactor":
        return P.det_cofactor(mat)
    if method == "bareiss":
        return P.det_bareiss(mat)
    if method != "auto":
        raise ValueError(f"unknown determinant method {method!r}")
    n = len(mat)
    dg = nx.DiGraph()
    dg.add_nodes_from(range(n))
    dg.add_edges_from((i, j) for i in range(n) for j in range(n) if i != j and mat[i][j])
    result = P.ONE
    for comp in nx.strongly_connected_components(dg):
        idx = sorted(comp)
        block = [[mat[i][j] for j in idx] for i in idx]
        sub = P.det_cofactor(block) if len(idx) <= COFACTOR_LIMIT else P.det_bareiss(block)
        result = P.mul(result, sub)
        if not result:
            break
    return result


def characteristic(m: AdjacencyMatrix, method: str = "auto") -> QuasiPolynomial:
    """``det(I - M(z))`` computed exactly after substituting ``z = ζ**scale``."""
    scale = m.scale
    det = determinant(_identity_minus(m.zeta_matrix(scale)), method)
    return QuasiPolynomial.from_zeta(det, scale)


# --------------------------------------------------------------------------
# roots and growth

@dataclass
class GrowthResult:
    beta: float
    z0: complex | float | None
    characteristic: QuasiPolynomial
    roots: list[P.Root] = field(default_factory=list)  # roots in ζ, where z = ζ**scale
    scale: int = 1
    checks: dict = field(default_factory=dict)

    @property
    def modulus(self) -> float | None:
        return None if self.z0 is None else abs(self.z0)


def _is_positive_real(z, rel: float = 1e-25) -> bool:
    return abs(mpmath.im(z)) <= rel * abs(z) and mpmath.re(z) > 0


def smallest_root(p: QuasiPolynomial, tolerance: float = 1e-12) -> GrowthResult:
    coeffs = p.to_zeta()
    scale = p.scale
    if not coeffs:
        raise ValueError("the characteristic quasi-polynomial is identically zero")
    if len(coeffs) == 1:
        return GrowthResult(0.0, None, p, [], scale, {"acyclic": True})
    found = P.all_roots(coeffs, tolerance)
    roots = [P.Root(complex(z), float(abs(z)), mult, res) for z, mult, res in found]
    smallest = min(abs(z) for z, _, _ in found)
    ties = [z for z, _, _ in found if abs(z) - smallest <= 1e-30 + 1e-20 * smallest]
    zeta0 = next((z for z in ties if _is_positive_real(z)), ties[0])
    with mpmath.workdps(60):
        z0_mp = zeta0 ** scale
        beta = float(-scale * mpmath.log(abs(zeta0), 2))
    z0 = float(mpmath.re(z0_mp)) if _is_positive_real(z0_mp) else complex(z0_mp)
    checks = {"real_axis": _real_axis_check(coeffs, float(smallest), tolerance)}
    if abs(beta) < 1e-15:
        beta = 0.0
    return GrowthResult(beta, z0, p, roots, scale, checks)


def _real_axis_check(coeffs: P.Poly, modulus: float, tolerance: float) -> dict:
    """Scan the positive axis of the square-free part for its first sign change."""
    factors = [f for f, _ in P.square_free_factorization(coeffs)]
    sqfree = P.ONE
    for f in factors:
        sqfree = P.mul(sqfree, f)
    grid = 2048
    top = 2 * modulus
    with mpmath.workdps(60):
        rev = [mpmath.mpf(c) for c in reversed(sqfree)]
        prev_x, prev_v = mpmath.mpf(0), mpmath.polyval(rev, 0)
        for k in range(1, grid + 1):
            x = top * mpmath.mpf(k) / grid
            v = mpmath.polyval(rev, x)
            if v == 0 or (v > 0) != (prev_v > 0):
                root = x if v == 0 else P.bisect_real_root(sqfree, prev_x, x)
                agrees = abs(root - modulus) <= 1e-9 * max(modulus, 1.0)
                return {"first_positive_root": float(root), "agrees": bool(agrees)}
            prev_x, prev_v = x, v
    return {"first_positive_root": None, "agrees": False}


def spectral_crossing(m: AdjacencyMatrix, tolerance: float = 1e-13) -> float | None:
    """The ``a`` in ``(0, 1]`` with spectral radius of ``M(a)`` equal to 1, by bisection.

    The spectral radius is nondecreasing in ``a`` for nonnegative matrices.
    Returns None when it stays below 1 (no cycle).
    """
    if not m.states:
        return None

    def rho(a: float) -> float:
        return float(max(abs(np.linalg.eigvals(m.numeric(a)))))

    if rho(1.0) < 1 - 1e-12:
        return None
    lo, hi = 0.0, 1.0
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if rho(mid) < 1:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@dataclass
class PipelineGraphs:
    zero_free: SimplyTimedGraph
    deterministic: SimplyTimedGraph
    matrix: AdjacencyMatrix


def growth_pipeline(g: SimplyTimedGraph, tolerance: float = 1e-12) -> tuple[GrowthResult, PipelineGraphs]:
    zf = zero_eliminate(g)
    det = determinize(zf)
    mat = adjacency_matrix(det)
    result = smallest_root(characteristic(mat), tolerance)
    crossing = spectral_crossing(mat)
    if result.z0 is None:
        agrees = crossing is None or crossing >= 1 - 1e-9
    else:
        agrees = crossing is not None and abs(crossing - abs(result.z0)) <= 1e-6 * max(abs(result.z0), 1e-3)
    result.checks["spectral"] = {"z0": crossing, "agrees": bool(agrees)}
    return result, PipelineGraphs(zf, det, mat)


def growth_rate(g: SimplyTimedGraph, tolerance: float = 1e-12) -> GrowthResult:
    return growth_pipeline(g, tolerance)[0]


# --------------------------------------------------------------------------
# brute-force oracle

def canonical_word(events: Iterable[tuple]) -> TimedWord:
    """Representative of a word's zero-distance class: sorted events, repeats dropped."""
    unique = set(events)
    return TimedWord(tuple(sorted(unique, key=lambda e: (e[1], label_key(e[0])))))


def enumerate_words(g: SimplyTimedGraph, horizon, budget: int = 1_000_000) -> set[TimedWord]:
    """All words of duration at most ``horizon``, one per zero-distance class.

    For 0-free graphs the representatives are exactly the words themselves.
    """
    T = as_rational(horizon)
    out_edges = g.outgoing()
    keys: set[frozenset] = {frozenset()}
    seen: set = set()
    stack = [(q, Fraction(0), frozenset()) for q in g.states]
    while stack:
        conf = stack.pop()
        if conf in seen:
            continue
        seen.add(conf)
        if len(seen) > budget:
            raise BudgetExceeded(f"more than {budget} run configurations below horizon {T}")
        q, t, events = conf
        for tr in out_edges.get(q, ()):
            t2 = t + tr.delay
            if t2 > T:
                continue
            ev = events | {(tr.label, t2)}
            keys.add(ev)
            stack.append((tr.dest, t2, ev))
    return {canonical_word(k) for k in keys}


def count_zero_free_words(g: SimplyTimedGraph, horizon, budget: int = 1_000_000) -> int:
    """Number of words of duration at most ``horizon`` of a 0-free graph.

    Counts paths of the subset automaton from the full state set, building
    subsets lazily; the empty word is included.
    """
    if not g.is_zero_free:
        raise ValueError("counting by paths needs a 0-free graph")
    T = as_rational(horizon)
    moves = _moves(g)
    succ_cache: dict = {}

    def successors(subset):
        if subset not in succ_cache:
            step = defaultdict(set)
            for q in subset:
                for key, dests in moves[q].items():
                    step[key] |= dests
            succ_cache[subset] = [(d, frozenset(s)) for (d, _), s in step.items()]
        return succ_cache[subset]

    calls = 0

    @lru_cache(maxsize=None)
    def count(subset, remaining):
        nonlocal calls
        calls += 1
        if calls > budget:
            raise BudgetExceeded(f"more than {budget} counting states below horizon {T}")
        total = 1
        for d, nxt in successors(subset):
            if d <= remaining:
                total += count(nxt, remaining - d)
        return total

    if not g.states:
        return 1
    return count(frozenset(g.states), T)


def upsilon_of_language(g: SimplyTimedGraph, horizon, budget: int = 1_000_000) -> int:
    if g.is_zero_free:
        return count_zero_free_words(g, horizon, budget)
    return len(enumerate_words(g, horizon, budget))


@dataclass(frozen=True)
class OracleEstimate:
    horizon: Fraction
    upsilon: int
    rate: float  # log2(upsilon) / T
    slope: float  # (log2 upsilon(T) - log2 upsilon(T/2)) / (T/2)


def oracle_growth_estimate(g: SimplyTimedGraph, horizons: Iterable, budget: int = 1_000_000) -> list[OracleEstimate]:
    out = []
    for T in horizons:
        T = as_rational(T)
        ups = upsilon_of_language(g, T, budget)
        if T == 0:
            out.append(OracleEstimate(T, ups, 0.0, 0.0))
            continue
        half = upsilon_of_language(g, T / 2, budget)
        rate = math.log2(ups) / float(T)
        slope = (math.log2(ups) - math.log2(half)) / float(T / 2)
        out.append(OracleEstimate(T, ups, rate, slope))
    return out
